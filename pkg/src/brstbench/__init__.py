"""BRST workbench - exact symbolic checks for involutive ODE systems."""

__version__ = "0.1.0"
