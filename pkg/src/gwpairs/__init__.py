"""Exact series arithmetic, symmetric functions and localization sums for
matching descendent invariants of stable pairs and Gromov-Witten theory."""

__version__ = "0.1.0"
