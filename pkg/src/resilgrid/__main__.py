"""Allow ``python -m resilgrid``."""
import sys

from resilgrid.cli.__main__ import main

if __name__ == "__main__":
    sys.exit(main())
