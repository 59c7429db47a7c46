"""Random arc coverings of the circle: simulation, series criteria and size estimates."""

__version__ = "0.1.0"
