"""Quality gates: far-field decay, symmetry, and shrink-rate convergence.

All slope fits are least-squares lines in log-log coordinates.  Probe sets
are generated from a seeded generator so every run of a study sees the same
points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import engine, model_fields as mf, oracle
from .geometry import (DomainError, RegionKind, Scenario, classify_point,
                       scale_family)

TWO_PI = 2.0 * math.pi

DECAY_SLOPE_GATE = -1.5       # remainders should decay like 1/|xi|^2
CONVERGENCE_SLOPE_GATE = 1.8  # errors should shrink like epsilon^2
SYMMETRY_SLOPE_GATE = 1.5     # asymmetry is a second-order effect too


def fit_loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(np.asarray(xs, dtype=float)),
                            np.log(np.asarray(ys, dtype=float)), 1)[0])


# --- far-field decay of the kernel remainders -------------------------------


def _far_field_model(cif: mf.CircularInclusionFields, xi, eta, interior_eta):
    """Leading far-field behaviour of the smooth remainder h(xi, eta).

    For an exterior source the remainder decays like the product of two
    dipole factors; for an interior source it carries a logarithmic lead
    plus dipole corrections.  What is left over should fall off like
    1/|xi|^2.
    """
    k = cif.kappa
    a = cif.radius
    mu_o, mu_i = cif.matrix_modulus, cif.inclusion_modulus
    r2 = xi[0] * xi[0] + xi[1] * xi[1]
    dot = xi[0] * eta[0] + xi[1] * eta[1]
    if not interior_eta:
        re2 = eta[0] * eta[0] + eta[1] * eta[1]
        return k * a * a * dot / (TWO_PI * mu_o * re2 * r2)
    return (-(1.0 / mu_i - 1.0 / mu_o) / TWO_PI
            * (0.5 * math.log(r2) - dot / r2)
            + k * dot / (TWO_PI * mu_o * r2))


@dataclass
class DecayReport:
    radii: list[float]
    residuals: list[float]  # max |h - leading model| over the angle sweep
    slope: float | None
    passed: bool
    exact: bool = False     # kappa == 0: remainder identically zero


def decay_check(cif: mf.CircularInclusionFields, eta,
                radii=(8.0, 16.0, 32.0), n_angles: int = 64) -> DecayReport:
    """Measure how fast the remainder minus its far-field model dies off.

    The source branch (inside/outside the inclusion) is taken from eta.
    Passes when the fitted log-log slope is at most -1.5 (the model
    predicts -2) or when the contrast vanishes.
    """
    interior = cif.is_interior(eta)
    h = mf.h_inner if interior else mf.h_outer
    residuals = []
    for r in radii:
        worst = 0.0
        for i in range(n_angles):
            th = TWO_PI * (i + 0.37) / n_angles  # offset avoids axis alignment
            xi = (r * math.cos(th), r * math.sin(th))
            res = h(cif, xi, eta) - _far_field_model(cif, xi, eta, interior)
            worst = max(worst, abs(res))
        residuals.append(worst)
    if cif.kappa == 0.0:
        return DecayReport(list(radii), residuals, None, True, exact=True)
    slope = fit_loglog_slope(radii, residuals)
    return DecayReport(list(radii), residuals, slope,
                       slope <= DECAY_SLOPE_GATE)


# --- symmetry of the two-point kernel ----------------------------------------


@dataclass
class SymmetryReport:
    # per (region_x, region_y) pair: worst |K(x,y) - K(y,x)| and worst |K|
    groups: dict[str, dict[str, float]]
    skipped: int  # pairs rejected by a domain precondition


def symmetry_sweep(scenario: Scenario, pairs) -> SymmetryReport:
    groups: dict[str, dict[str, float]] = {}
    skipped = 0
    for x, y in pairs:
        try:
            fwd = engine.n_eps(scenario, x, y, normalized=True)
            rev = engine.n_eps(scenario, y, x, normalized=True)
        except DomainError:
            skipped += 1
            continue
        key = "|".join(sorted([fwd.region_x.label(), fwd.region_y.label()]))
        g = groups.setdefault(key, {"max_asymmetry": 0.0, "max_value": 0.0,
                                    "count": 0})
        g["max_asymmetry"] = max(g["max_asymmetry"],
                                 abs(fwd.value - rev.value))
        g["max_value"] = max(g["max_value"], abs(fwd.value), abs(rev.value))
        g["count"] += 1
    return SymmetryReport(groups, skipped)


# --- seeded probe sets --------------------------------------------------------


def matrix_probes(scenario: Scenario, n: int = 64, seed: int = 42,
                  interface_clearance: float = 1.5,
                  boundary_clearance: float = 0.05) -> list[tuple[float, float]]:
    """Deterministic matrix-region probes.

    Points keep distance interface_clearance times each physical radius from
    that inclusion's interface and boundary_clearance * R from the outer
    boundary.
    """
    rng = np.random.default_rng(seed)
    R = scenario.outer_radius
    rmax = R * (1.0 - boundary_clearance)
    probes: list[tuple[float, float]] = []
    tries = 0
    while len(probes) < n:
        tries += 1
        if tries > 100000:
            raise RuntimeError("probe sampling failed; clearances too tight")
        p = rng.uniform(-rmax, rmax, size=2)
        if math.hypot(p[0], p[1]) > rmax:
            continue
        ok = True
        for j, inc in enumerate(scenario.inclusions):
            rho = scenario.physical_radius(j)
            d = math.hypot(p[0] - inc.center[0], p[1] - inc.center[1])
            if d < rho + interface_clearance * rho:
                ok = False
                break
        if ok:
            probes.append((float(p[0]), float(p[1])))
    return probes


def inclusion_probes(scenario: Scenario, j: int, n: int = 64,
                     seed: int = 42,
                     interface_clearance: float = 0.3) -> list[tuple[float, float]]:
    """Deterministic probes inside inclusion j, clear of its interface."""
    rng = np.random.default_rng(seed + 1000 * (j + 1))
    inc = scenario.inclusions[j]
    rho = scenario.physical_radius(j)
    rmax = rho * (1.0 - interface_clearance)
    probes: list[tuple[float, float]] = []
    while len(probes) < n:
        p = rng.uniform(-rmax, rmax, size=2)
        if math.hypot(p[0], p[1]) <= rmax:
            probes.append((inc.center[0] + float(p[0]),
                           inc.center[1] + float(p[1])))
    return probes


# --- convergence under family shrinking ---------------------------------------


@dataclass
class ConvergenceReport:
    scales: list[float]
    errors: list[float]       # sup over probes of |approx - reference|
    slope: float | None
    passed: bool
    floor_limited: bool = False
    details: list[dict] = field(default_factory=list)


def convergence_study(scenario: Scenario, y, scales=(0.5, 0.25, 0.125),
                      probes=None, n_modes: int = 32, seed: int = 42,
                      n_probes: int = 64) -> ConvergenceReport:
    """Shrink the inclusion family and measure the approximation error.

    The reference value at each scale comes from the collocation solver.
    A source inside inclusion m rides along with the shrinking:
    y_s = center_m + s (y - center_m).  Passes when the fitted error slope
    is at least 1.8 (the expansion predicts 2), or automatically when all
    contrasts vanish and the error sits on the numerical floor.
    """
    region_y = classify_point(scenario, y)
    host = region_y.index if region_y.kind is RegionKind.INCLUSION else None
    if probes is None:
        probes = matrix_probes(scenario, n=n_probes, seed=seed)

    errors = []
    details = []
    for s in scales:
        sc = scale_family(scenario, s)
        if host is not None:
            c = scenario.inclusions[host].center
            ys = (c[0] + s * (y[0] - c[0]), c[1] + s * (y[1] - c[1]))
        else:
            ys = y
        solution = oracle.solve(oracle.build_system(sc, ys, n_modes=n_modes))
        ref, _, _ = oracle.evaluate_points(solution, probes)
        worst = 0.0
        for p, rv in zip(probes, ref):
            av = engine.r_eps(sc, p, ys, normalized=True).value
            worst = max(worst, float(abs(av - rv)))
        errors.append(worst)
        details.append({"scale": s, "sup_error": worst,
                        "residual_stats": solution.residual_stats})

    if all(inc.material.shear_modulus == scenario.matrix.shear_modulus
           for inc in scenario.inclusions):
        # zero contrast: the expansion is exact and errors sit on the floor
        return ConvergenceReport(list(scales), errors, None, True,
                                 floor_limited=True, details=details)
    slope = fit_loglog_slope(scales, errors)
    return ConvergenceReport(list(scales), errors, slope,
                             slope >= CONVERGENCE_SLOPE_GATE, details=details)


def symmetry_convergence(scenario: Scenario, pairs,
                         scales=(0.5, 0.25, 0.125)) -> ConvergenceReport:
    """Asymmetry of the approximate kernel under family shrinking.

    The exact kernel is symmetric; the approximation breaks symmetry only
    through its remainder, so the worst asymmetry over mixed-region pairs
    should shrink roughly like the square of the scale.  Sources inside an
    inclusion ride along with the shrinking.
    """
    errors = []
    scale_seen = 0.0
    for s in scales:
        sc = scale_family(scenario, s)
        worst = 0.0
        for x, y in pairs:
            region_y = classify_point(scenario, y)
            if region_y.kind is RegionKind.INCLUSION:
                c = scenario.inclusions[region_y.index].center
                ys = (c[0] + s * (y[0] - c[0]), c[1] + s * (y[1] - c[1]))
            else:
                ys = y
            fwd = engine.n_eps(sc, x, ys, normalized=True).value
            rev = engine.n_eps(sc, ys, x, normalized=True).value
            worst = max(worst, abs(fwd - rev))
            scale_seen = max(scale_seen, abs(fwd))
        errors.append(worst)
    # every term of the evaluation is symmetric in closed form, so the
    # asymmetry typically sits on the rounding floor; a slope fit through
    # rounding noise is meaningless, so report floor-limited instead
    if max(errors) <= 1e-12 * scale_seen:
        return ConvergenceReport(list(scales), errors, None, True,
                                 floor_limited=True)
    if all(inc.material.shear_modulus == scenario.matrix.shear_modulus
           for inc in scenario.inclusions):
        return ConvergenceReport(list(scales), errors, None, True,
                                 floor_limited=True)
    slope = fit_loglog_slope(scales, errors)
    return ConvergenceReport(list(scales), errors, slope,
                             slope >= SYMMETRY_SLOPE_GATE)
