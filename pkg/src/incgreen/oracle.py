"""Independent reference solver for the regular part of the perturbed kernel.

Subtracting the free-space logarithm of the source's region from the
perturbed kernel leaves a field that is harmonic in every subdomain.  That
field is expanded in harmonic polynomial / multipole bases (one expansion
per subdomain) and the expansion coefficients are fitted by least-squares
collocation of the exact boundary and interface conditions:

* zero total flux on the outer circle up to the uniform compensating term,
  corrected for the flux of the subtracted logarithm;
* continuity of the field across each interface;
* continuity of traction across each interface, corrected for the traction
  jump of the subtracted logarithm;
* one quadrature row pinning the boundary mean of the field.

No asymptotics anywhere: accuracy is limited only by the truncation order,
so this solves the geometry the expansion upstream only approximates.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from . import engine
from .geometry import (DomainError, OutOfDomainError, RegionKind, Scenario,
                       classify_point, scenario_to_dict, validate)
from .leastsq import RankDeficiencyError, solve_lstsq

TWO_PI = 2.0 * math.pi


class OracleError(RuntimeError):
    pass


class IllConditionedSystemError(OracleError):
    pass


# --- harmonic basis blocks ---------------------------------------------------
#
# Each block is a family of harmonic functions about a center c with scale
# rho.  Columns come in (Re, Im) pairs of powers of w = (z - c)/rho (interior
# block), powers of rho/(z - c) (exterior multipole block, plus a log lead
# column), or powers of z/R for the outer matrix block.  Scaling by rho keeps
# every column O(1) on its own circle.


def _pair_columns(f, fp):
    """Split analytic samples f (values) and fp (d/dz) into real columns."""
    vals = np.empty((f.shape[0], 2 * f.shape[1]))
    vals[:, 0::2] = f.real
    vals[:, 1::2] = f.imag
    gx = np.empty_like(vals)
    gy = np.empty_like(vals)
    gx[:, 0::2] = fp.real
    gy[:, 0::2] = -fp.imag
    gx[:, 1::2] = fp.imag
    gy[:, 1::2] = fp.real
    return vals, gx, gy


def _interior_block(pts, center, rho, n_modes):
    """1 + 2*n_modes columns: constant, then Re/Im of ((z-c)/rho)^n."""
    z = (pts[:, 0] - center[0] + 1j * (pts[:, 1] - center[1])) / rho
    n = np.arange(1, n_modes + 1)
    f = z[:, None] ** n
    fp = n * z[:, None] ** (n - 1) / rho
    vals, gx, gy = _pair_columns(f, fp)
    ones = np.ones((len(pts), 1))
    zeros = np.zeros((len(pts), 1))
    return (np.hstack([ones, vals]), np.hstack([zeros, gx]),
            np.hstack([zeros, gy]))


def _exterior_block(pts, center, rho, n_modes):
    """1 + 2*n_modes columns: log(r/rho), then Re/Im of (rho/(z-c))^n."""
    zc = pts[:, 0] - center[0] + 1j * (pts[:, 1] - center[1])
    w = rho / zc
    n = np.arange(1, n_modes + 1)
    f = w[:, None] ** n
    fp = -n * w[:, None] ** (n + 1) / rho
    vals, gx, gy = _pair_columns(f, fp)
    logcol = np.log(np.abs(zc) / rho)[:, None]
    glog = 1.0 / zc  # d/dz of log(z - c); grad of Re log is (Re, -Im)
    return (np.hstack([logcol, vals]),
            np.hstack([glog.real[:, None], gx]),
            np.hstack([-glog.imag[:, None], gy]))


def _circle_points(center, radius, count, offset):
    th = TWO_PI * (np.arange(count) + offset) / count
    return np.column_stack([center[0] + radius * np.cos(th),
                            center[1] + radius * np.sin(th)])


@dataclass
class CollocationSystem:
    scenario: Scenario
    y: tuple[float, float]
    n_modes: int
    oversample: int
    matrix: np.ndarray
    rhs: np.ndarray
    col_groups: list[tuple[str, int, int]]   # (name, start, stop)
    row_groups: list[tuple[str, int, int]]
    group_scales: dict[str, float]
    host: int | None


def _host_modulus(scenario: Scenario, host) -> float:
    if host is None:
        return scenario.matrix.shear_modulus
    return scenario.inclusions[host].material.shear_modulus


def _source_log_grad(y, pts, mu):
    """Gradient of log|x - y| / (2 pi mu) at the points pts."""
    dx = pts[:, 0] - y[0]
    dy = pts[:, 1] - y[1]
    d2 = dx * dx + dy * dy
    c = 1.0 / (TWO_PI * mu)
    return c * dx / d2, c * dy / d2


def _assemble_rows(scenario: Scenario, y, n_modes, n_colloc, offset, host):
    """Collocation rows at angular offset `offset` (fraction of a spacing).

    Returns (matrix, rhs, row_groups) with raw (unscaled) rows.
    """
    R = scenario.outer_radius
    mu_o = scenario.matrix.shear_modulus
    mu_y = _host_modulus(scenario, host)
    incs = scenario.inclusions
    m = len(incs)
    radii = scenario.physical_radii()

    ncol_block = 1 + 2 * n_modes
    total_cols = ncol_block * (1 + 2 * m)

    def outer_cols(pts):
        vals = np.zeros((len(pts), total_cols))
        gx = np.zeros_like(vals)
        gy = np.zeros_like(vals)
        v, x, g = _interior_block(pts, (0.0, 0.0), R, n_modes)
        vals[:, :ncol_block] = v
        gx[:, :ncol_block] = x
        gy[:, :ncol_block] = g
        for j in range(m):
            s = ncol_block * (1 + j)
            v, x, g = _exterior_block(pts, incs[j].center, radii[j], n_modes)
            vals[:, s:s + ncol_block] = v
            gx[:, s:s + ncol_block] = x
            gy[:, s:s + ncol_block] = g
        return vals, gx, gy

    def inner_cols(pts, j):
        vals = np.zeros((len(pts), total_cols))
        gx = np.zeros_like(vals)
        gy = np.zeros_like(vals)
        s = ncol_block * (1 + m + j)
        v, x, g = _interior_block(pts, incs[j].center, radii[j], n_modes)
        vals[:, s:s + ncol_block] = v
        gx[:, s:s + ncol_block] = x
        gy[:, s:s + ncol_block] = g
        return vals, gx, gy

    rows = []
    rhs = []
    row_groups = []

    def add_group(name, a, b):
        start = sum(len(r) for r in rows)
        rows.append(a)
        rhs.append(b)
        row_groups.append((name, start, start + len(a)))

    # outer circle: mu_o dR/dn = -mu_o c_y d/dn log|x-y| + 1/(2 pi R)
    pts = _circle_points((0.0, 0.0), R, n_colloc, offset)
    nx, ny = pts[:, 0] / R, pts[:, 1] / R
    _, gx, gy = outer_cols(pts)
    sx, sy = _source_log_grad(y, pts, mu_y)
    a = mu_o * (gx * nx[:, None] + gy * ny[:, None])
    b = -mu_o * (sx * nx + sy * ny) + 1.0 / (TWO_PI * R)
    add_group("outer_flux", a, b)

    for j in range(m):
        nc = n_colloc
        pts = _circle_points(incs[j].center, radii[j], nc, offset)
        nx = (pts[:, 0] - incs[j].center[0]) / radii[j]
        ny = (pts[:, 1] - incs[j].center[1]) / radii[j]
        vo, gox, goy = outer_cols(pts)
        vi, gix, giy = inner_cols(pts, j)
        mu_i = incs[j].material.shear_modulus
        # continuity of the regular part across the interface
        add_group(f"continuity_{j}", vo - vi, np.zeros(nc))
        # traction jump equals minus the traction of the subtracted log
        sx, sy = _source_log_grad(y, pts, mu_y)
        a = (mu_i * (gix * nx[:, None] + giy * ny[:, None])
             - mu_o * (gox * nx[:, None] + goy * ny[:, None]))
        b = -(mu_i - mu_o) * (sx * nx + sy * ny)
        add_group(f"traction_{j}", a, b)

    return np.vstack(rows), np.concatenate(rhs), row_groups, outer_cols, inner_cols


def build_system(scenario: Scenario, y, n_modes: int = 32,
                 oversample: int = 4) -> CollocationSystem:
    """Assemble the weighted collocation system for a source at y.

    Each condition group is rescaled to unit rms entry size so no circle
    dominates the fit; traction rows additionally carry 1/mu_o so moduli in
    Pa do not swamp the continuity rows before weighting.
    """
    if n_modes < 4:
        raise OracleError(f"n_modes must be at least 4, got {n_modes}")
    problems = validate(scenario)
    if problems:
        raise OracleError("invalid scenario: " + "; ".join(problems))
    region_y = classify_point(scenario, y)
    if region_y.kind in (RegionKind.OUTER_BOUNDARY, RegionKind.INTERFACE):
        raise DomainError(
            f"source ({y[0]}, {y[1]}) sits on a dividing circle")
    host = region_y.index if region_y.kind is RegionKind.INCLUSION else None

    n_colloc = oversample * (2 * n_modes + 1)
    a, b, row_groups, outer_cols, _ = _assemble_rows(
        scenario, y, n_modes, n_colloc, 0.5, host)

    # boundary-mean row: the full kernel has zero boundary mean, so the
    # regular part must integrate to the boundary mean of the subtracted log
    R = scenario.outer_radius
    mu_y = _host_modulus(scenario, host)
    n_quad = 4 * n_colloc
    qpts = _circle_points((0.0, 0.0), R, n_quad, 0.25)
    vals, _, _ = outer_cols(qpts)
    w = TWO_PI * R / n_quad
    mean_row = (w * vals.sum(axis=0))[None, :]
    mean_rhs = np.array([-R * math.log(R) / mu_y])

    start = a.shape[0]
    a = np.vstack([a, mean_row])
    b = np.concatenate([b, mean_rhs])
    row_groups = row_groups + [("boundary_mean", start, start + 1)]

    # per-group scaling to unit rms entries (traction pre-divided by mu_o)
    scales = {}
    mu_o = scenario.matrix.shear_modulus
    for name, i0, i1 in row_groups:
        if name.startswith("traction") or name == "outer_flux":
            a[i0:i1] /= mu_o
            b[i0:i1] /= mu_o
        s = math.sqrt(float(np.mean(a[i0:i1] ** 2)))
        if s == 0.0:
            s = 1.0
        a[i0:i1] /= s
        b[i0:i1] /= s
        scales[name] = s

    ncol_block = 1 + 2 * n_modes
    m = len(scenario.inclusions)
    col_groups = [("outer", 0, ncol_block)]
    for j in range(m):
        s0 = ncol_block * (1 + j)
        col_groups.append((f"exterior_{j}", s0, s0 + ncol_block))
    for j in range(m):
        s0 = ncol_block * (1 + m + j)
        col_groups.append((f"interior_{j}", s0, s0 + ncol_block))

    return CollocationSystem(scenario, (float(y[0]), float(y[1])), n_modes,
                             oversample, a, b, col_groups, row_groups,
                             scales, host)


@dataclass
class OracleSolution:
    scenario: Scenario
    y: tuple[float, float]
    n_modes: int
    host: int | None
    coefficients: np.ndarray
    residual_stats: dict[str, dict[str, float]]


def solve(system: CollocationSystem) -> OracleSolution:
    """Fit the expansion and verify it on a fresh, denser collocation set."""
    try:
        result = solve_lstsq(system.matrix, system.rhs, rcond=1e-10)
    except RankDeficiencyError as exc:
        name = next(n for n, s0, s1 in system.col_groups
                    if s0 <= exc.column < s1)
        raise IllConditionedSystemError(
            f"collocation system is rank deficient in column group "
            f"'{name}': {exc}") from exc
    coeff = result.coefficients

    # verification residuals: twice as many points, different offset
    n_verify = 2 * system.oversample * (2 * system.n_modes + 1)
    a, b, row_groups, _, _ = _assemble_rows(
        system.scenario, system.y, system.n_modes, n_verify, 0.25, system.host)
    mu_o = system.scenario.matrix.shear_modulus
    stats = {}
    for name, i0, i1 in row_groups:
        block = a[i0:i1]
        rhs = b[i0:i1]
        if name.startswith("traction") or name == "outer_flux":
            block = block / mu_o
            rhs = rhs / mu_o
        res = (block @ coeff - rhs) / system.group_scales[name]
        stats[name] = {"max": float(np.max(np.abs(res))),
                       "rms": float(np.sqrt(np.mean(res ** 2)))}
    # the mean row is a quadrature identity, so the training row serves as
    # its own verification (already weighted)
    name, i0, i1 = next(g for g in system.row_groups
                        if g[0] == "boundary_mean")
    res = system.matrix[i0:i1] @ coeff - system.rhs[i0:i1]
    stats["boundary_mean"] = {"max": float(np.max(np.abs(res))),
                              "rms": float(np.sqrt(np.mean(res ** 2)))}
    return OracleSolution(system.scenario, system.y, system.n_modes,
                          system.host, coeff, stats)


def _eval_points(solution: OracleSolution, pts: np.ndarray):
    """Values and gradients of the fitted regular part at pts (P, 2)."""
    sc = solution.scenario
    n_modes = solution.n_modes
    ncol_block = 1 + 2 * n_modes
    m = len(sc.inclusions)
    radii = sc.physical_radii()
    vals = np.empty(len(pts))
    gx = np.empty(len(pts))
    gy = np.empty(len(pts))
    region = np.full(len(pts), -1)  # -1 matrix, j >= 0 inclusion j
    for j in range(m):
        d = np.hypot(pts[:, 0] - sc.inclusions[j].center[0],
                     pts[:, 1] - sc.inclusions[j].center[1])
        region[d <= radii[j]] = j
    coeff = solution.coefficients

    mask = region == -1
    if mask.any():
        p = pts[mask]
        v, x, g = _interior_block(p, (0.0, 0.0), sc.outer_radius, n_modes)
        acc_v = v @ coeff[:ncol_block]
        acc_x = x @ coeff[:ncol_block]
        acc_y = g @ coeff[:ncol_block]
        for j in range(m):
            s0 = ncol_block * (1 + j)
            v, x, g = _exterior_block(p, sc.inclusions[j].center, radii[j],
                                      n_modes)
            acc_v += v @ coeff[s0:s0 + ncol_block]
            acc_x += x @ coeff[s0:s0 + ncol_block]
            acc_y += g @ coeff[s0:s0 + ncol_block]
        vals[mask], gx[mask], gy[mask] = acc_v, acc_x, acc_y
    for j in range(m):
        mask = region == j
        if not mask.any():
            continue
        s0 = ncol_block * (1 + m + j)
        v, x, g = _interior_block(pts[mask], sc.inclusions[j].center,
                                  radii[j], n_modes)
        vals[mask] = v @ coeff[s0:s0 + ncol_block]
        gx[mask] = x @ coeff[s0:s0 + ncol_block]
        gy[mask] = g @ coeff[s0:s0 + ncol_block]
    return vals, gx, gy


def evaluate(solution: OracleSolution, x) -> float:
    sc = solution.scenario
    if math.hypot(x[0], x[1]) > sc.outer_radius + sc.geom_tol:
        raise OutOfDomainError(f"point ({x[0]}, {x[1]}) is outside the disk")
    vals, _, _ = _eval_points(solution, np.array([x], dtype=float))
    return float(vals[0])


def evaluate_grad(solution: OracleSolution, x) -> tuple[float, float]:
    sc = solution.scenario
    if math.hypot(x[0], x[1]) > sc.outer_radius + sc.geom_tol:
        raise OutOfDomainError(f"point ({x[0]}, {x[1]}) is outside the disk")
    _, gx, gy = _eval_points(solution, np.array([x], dtype=float))
    return (float(gx[0]), float(gy[0]))


def evaluate_points(solution: OracleSolution, pts):
    """Vectorized values and gradients (vals, gx, gy) at pts (P, 2)."""
    return _eval_points(solution, np.asarray(pts, dtype=float))


def scenario_hash(scenario: Scenario) -> str:
    blob = json.dumps(scenario_to_dict(scenario), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def compare(scenario: Scenario, y, probes, n_modes: int = 32,
            oversample: int = 4) -> dict:
    """Reference-vs-asymptotic comparison report over a probe set.

    Values are compared with the zero-boundary-mean normalization on both
    sides, which is the normalization the reference solver pins down;
    gradients are normalization-free.
    """
    solution = solve(build_system(scenario, y, n_modes, oversample))
    pts = np.array(probes, dtype=float)
    ref_v, ref_gx, ref_gy = _eval_points(solution, pts)

    dv = np.empty(len(pts))
    dg = np.empty(len(pts))
    for i, p in enumerate(pts):
        approx = engine.r_eps(scenario, (p[0], p[1]), y, normalized=True)
        grad = engine.grad_r_eps(scenario, (p[0], p[1]), y)
        dv[i] = approx.value - ref_v[i]
        dg[i] = math.hypot(grad.gradient[0] - ref_gx[i],
                           grad.gradient[1] - ref_gy[i])

    gmag = np.hypot(ref_gx, ref_gy)
    return {
        "scenario_hash": scenario_hash(scenario),
        "y": [float(y[0]), float(y[1])],
        "n_modes": n_modes,
        "n_probes": len(pts),
        "sup_value_error": float(np.max(np.abs(dv))),
        "rms_value_error": float(np.sqrt(np.mean(dv ** 2))),
        "sup_grad_error": float(np.max(dg)),
        "rms_grad_error": float(np.sqrt(np.mean(dg ** 2))),
        "value_scale": float(np.max(np.abs(ref_v))),
        "grad_scale": float(np.max(gmag)),
        "residual_stats": solution.residual_stats,
        "probes": [[float(p[0]), float(p[1])] for p in pts],
    }
