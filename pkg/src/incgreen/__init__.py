"""Transmission kernel of a disk with small circular inclusions.

Asymptotic evaluation of the perturbed two-point kernel and its regular
part, an independent spectral-collocation reference solver, and quality
diagnostics (far-field decay, symmetry, shrink-rate convergence).
"""

from .geometry import (Inclusion, Material, Region, RegionKind, Scenario,
                       classify_point, load_scenario, scale_family, validate)
from .engine import grad_r_eps, grid_eval, n_eps, r_eps

__all__ = [
    "Inclusion", "Material", "Region", "RegionKind", "Scenario",
    "classify_point", "load_scenario", "scale_family", "validate",
    "n_eps", "r_eps", "grad_r_eps", "grid_eval",
]
