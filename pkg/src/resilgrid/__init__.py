"""resilgrid: cyber-physical resilience of power grids under IoT botnet attacks.

Botnet propagation risk, a cyber defense Nash game and a receding-horizon
min-max frequency controller, from epidemic model to grid simulation.
"""

__version__ = "0.1.0"
