"""Trivariate vine copula engine.

Builds, simulates, estimates and grids simplified and non-simplified
three-dimensional vine copula densities, and extracts their contour
surfaces for visualization.
"""

from .families import BivariateCopula, Family, family_metadata, params_from_tau

__all__ = [
    "BivariateCopula",
    "Family",
    "family_metadata",
    "params_from_tau",
]

__version__ = "0.1.0"
