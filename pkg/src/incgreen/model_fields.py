"""Closed-form building blocks for the antiplane transmission problem.

Two families of kernels:

* DiskNeumann - the Neumann function of the homogeneous disk (zero-flux
  boundary condition up to the uniform compensating flux -1/|boundary|),
  via the image point y* = R^2 y / |y|^2, together with its regular part
  and analytic gradients.

* CircularInclusionFields - the transmission kernel of a single circular
  inclusion of radius a in an unbounded matrix, split into the free-space
  logarithm and a smooth remainder h with four branches (source and field
  point each inside or outside the inclusion), plus the dipole fields that
  encode the leading far-field perturbation.

Points are (x, y) tuples; everything here is scalar math on purpose - the
evaluation loops upstream call these millions of times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import (GEOM_TOL_FACTOR, DegenerateSourceError,
                       SingularEvaluationError)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DiskNeumann:
    """Neumann function data for a homogeneous disk of radius R."""
    radius: float
    shear_modulus: float
    normalized: bool = False  # subtract the boundary mean so the trace integrates to zero

    @property
    def norm_shift(self) -> float:
        # boundary mean of the raw kernel; subtracting it from the regular
        # part makes the full kernel integrate to zero over the boundary
        return 3.0 * math.log(self.radius) / (TWO_PI * self.shear_modulus)


def _check_interior(dn: DiskNeumann, p, name):
    r = math.hypot(p[0], p[1])
    tol = GEOM_TOL_FACTOR * dn.radius
    if r > dn.radius - tol:
        raise DegenerateSourceError(
            f"{name} ({p[0]}, {p[1]}) must lie strictly inside the disk "
            f"of radius {dn.radius}")
    return r


def _image(dn: DiskNeumann, p, rp):
    s = dn.radius * dn.radius / (rp * rp)
    return (s * p[0], s * p[1])


def regular_part_disk(dn: DiskNeumann, x, y) -> float:
    """Smooth complement of the free-space logarithm in the disk kernel.

    Symmetric in (x, y): |x - y*| |y| equals |y - x*| |x| whenever both
    points are inside the disk.
    """
    ry = _check_interior(dn, y, "source")
    if ry == 0.0:
        # image at infinity; the product |x - y*||y| tends to R^2
        val = 2.0 * math.log(dn.radius) / (TWO_PI * dn.shear_modulus)
    else:
        ys = _image(dn, y, ry)
        val = math.log(math.hypot(x[0] - ys[0], x[1] - ys[1]) * ry) \
            / (TWO_PI * dn.shear_modulus)
    if dn.normalized:
        val -= dn.norm_shift
    return val


def neumann_disk(dn: DiskNeumann, x, y) -> float:
    d = math.hypot(x[0] - y[0], x[1] - y[1])
    if d <= GEOM_TOL_FACTOR * dn.radius:
        raise SingularEvaluationError(
            f"field point coincides with the source at ({y[0]}, {y[1]})")
    return -math.log(d) / (TWO_PI * dn.shear_modulus) - regular_part_disk(dn, x, y)


def grad_x_regular_part(dn: DiskNeumann, x, y):
    """Gradient in the field point; normalization shifts do not matter here."""
    ry = _check_interior(dn, y, "source")
    if ry == 0.0:
        return (0.0, 0.0)
    ys = _image(dn, y, ry)
    dx, dy = x[0] - ys[0], x[1] - ys[1]
    c = 1.0 / (TWO_PI * dn.shear_modulus * (dx * dx + dy * dy))
    return (c * dx, c * dy)


def grad_y_regular_part(dn: DiskNeumann, x, y):
    # symmetry of the regular part swaps the roles of the arguments
    _check_interior(dn, y, "source")
    return grad_x_regular_part(dn, y, x)


def grad_x_dot_grad_y_regular_part(dn: DiskNeumann, x, y, v):
    """Gradient in x of  v . grad_y regular_part(x, y)  for fixed y and v."""
    rx = _check_interior(dn, x, "field point")
    _check_interior(dn, y, "source")
    if rx == 0.0:
        # removable singularity of the image map: the limit at the center
        # is -v / (2 pi mu R^2)
        c = -1.0 / (TWO_PI * dn.shear_modulus * dn.radius * dn.radius)
        return (c * v[0], c * v[1])
    xs = _image(dn, x, rx)
    dx, dy = y[0] - xs[0], y[1] - xs[1]
    d2 = dx * dx + dy * dy
    # gradient of (v . d / |d|^2) with respect to d
    gd = (v[0] / d2 - 2.0 * (v[0] * dx + v[1] * dy) * dx / (d2 * d2),
          v[1] / d2 - 2.0 * (v[0] * dx + v[1] * dy) * dy / (d2 * d2))
    # Jacobian of the image map x -> R^2 x / |x|^2 (symmetric)
    s = dn.radius * dn.radius / (rx * rx)
    nx, ny = x[0] / rx, x[1] / rx
    j11 = s * (1.0 - 2.0 * nx * nx)
    j12 = s * (-2.0 * nx * ny)
    j22 = s * (1.0 - 2.0 * ny * ny)
    c = -1.0 / (TWO_PI * dn.shear_modulus)  # d depends on x through -x*
    return (c * (j11 * gd[0] + j12 * gd[1]),
            c * (j12 * gd[0] + j22 * gd[1]))


# --- single circular inclusion in an unbounded matrix -----------------------


@dataclass(frozen=True)
class CircularInclusionFields:
    """Transmission kernel pieces for one inclusion of radius a.

    Works in the stretched frame where the inclusion is the disk |xi| < a
    centred at the origin.
    """
    radius: float
    matrix_modulus: float
    inclusion_modulus: float

    @property
    def kappa(self) -> float:
        return ((self.inclusion_modulus - self.matrix_modulus)
                / (self.inclusion_modulus + self.matrix_modulus))

    def is_interior(self, p) -> bool:
        # ties go to the interior branch; both branches agree on the circle
        return math.hypot(p[0], p[1]) <= self.radius * (1.0 + GEOM_TOL_FACTOR)


def _require_exterior(cif, eta):
    if math.hypot(eta[0], eta[1]) < cif.radius * (1.0 - GEOM_TOL_FACTOR):
        raise DegenerateSourceError(
            f"source ({eta[0]}, {eta[1]}) must lie outside the inclusion "
            f"of radius {cif.radius}")


def _require_interior(cif, eta):
    if math.hypot(eta[0], eta[1]) > cif.radius * (1.0 + GEOM_TOL_FACTOR):
        raise DegenerateSourceError(
            f"source ({eta[0]}, {eta[1]}) must lie inside the inclusion "
            f"of radius {cif.radius}")


def h_outer(cif: CircularInclusionFields, xi, eta,
            interior: bool | None = None) -> float:
    """Smooth remainder of the kernel for a source outside the inclusion.

    `interior` forces the field-point branch; used to take one-sided limits
    exactly on the interface circle.
    """
    _require_exterior(cif, eta)
    k = cif.kappa
    mu_o = cif.matrix_modulus
    if cif.is_interior(xi) if interior is None else interior:
        d = math.hypot(xi[0] - eta[0], xi[1] - eta[1])
        return k / (TWO_PI * mu_o) * (-math.log(d)
                                      + math.log(math.hypot(eta[0], eta[1])))
    re2 = eta[0] * eta[0] + eta[1] * eta[1]
    s = cif.radius * cif.radius / re2
    di = math.hypot(xi[0] - s * eta[0], xi[1] - s * eta[1])
    return -k / (TWO_PI * mu_o) * (math.log(di)
                                   - math.log(math.hypot(xi[0], xi[1])))


def grad_h_outer(cif: CircularInclusionFields, xi, eta,
                 interior: bool | None = None):
    _require_exterior(cif, eta)
    k = cif.kappa
    mu_o = cif.matrix_modulus
    if cif.is_interior(xi) if interior is None else interior:
        dx, dy = xi[0] - eta[0], xi[1] - eta[1]
        c = -k / (TWO_PI * mu_o * (dx * dx + dy * dy))
        return (c * dx, c * dy)
    re2 = eta[0] * eta[0] + eta[1] * eta[1]
    s = cif.radius * cif.radius / re2
    dx, dy = xi[0] - s * eta[0], xi[1] - s * eta[1]
    d2 = dx * dx + dy * dy
    r2 = xi[0] * xi[0] + xi[1] * xi[1]
    c = -k / (TWO_PI * mu_o)
    return (c * (dx / d2 - xi[0] / r2), c * (dy / d2 - xi[1] / r2))


def h_inner(cif: CircularInclusionFields, xi, eta,
            interior: bool | None = None) -> float:
    """Smooth remainder of the kernel for a source inside the inclusion.

    The interior branch uses the rearrangement
        (|eta|/a) |xi - a^2 eta/|eta|^2| = sqrt(|eta|^2|xi|^2/a^2
                                                - 2 xi.eta + a^2),
    which stays finite as eta -> 0.
    """
    _require_interior(cif, eta)
    k = cif.kappa
    a = cif.radius
    mu_o, mu_i = cif.matrix_modulus, cif.inclusion_modulus
    if cif.is_interior(xi) if interior is None else interior:
        q = ((eta[0] * eta[0] + eta[1] * eta[1])
             * (xi[0] * xi[0] + xi[1] * xi[1]) / (a * a)
             - 2.0 * (xi[0] * eta[0] + xi[1] * eta[1]) + a * a)
        return k / TWO_PI * (0.5 * math.log(q) / mu_i + math.log(a) / mu_o)
    d = math.hypot(xi[0] - eta[0], xi[1] - eta[1])
    if d == 0.0:
        raise SingularEvaluationError("field point coincides with the source")
    return k / TWO_PI * (math.log(d) / mu_i
                         + math.log(math.hypot(xi[0], xi[1])) / mu_o)


def grad_h_inner(cif: CircularInclusionFields, xi, eta,
                 interior: bool | None = None):
    _require_interior(cif, eta)
    k = cif.kappa
    a = cif.radius
    mu_o, mu_i = cif.matrix_modulus, cif.inclusion_modulus
    if cif.is_interior(xi) if interior is None else interior:
        re2 = eta[0] * eta[0] + eta[1] * eta[1]
        q = (re2 * (xi[0] * xi[0] + xi[1] * xi[1]) / (a * a)
             - 2.0 * (xi[0] * eta[0] + xi[1] * eta[1]) + a * a)
        c = k / (TWO_PI * mu_i * q)
        return (c * (re2 * xi[0] / (a * a) - eta[0]),
                c * (re2 * xi[1] / (a * a) - eta[1]))
    dx, dy = xi[0] - eta[0], xi[1] - eta[1]
    d2 = dx * dx + dy * dy
    r2 = xi[0] * xi[0] + xi[1] * xi[1]
    c = k / TWO_PI
    return (c * (dx / (mu_i * d2) + xi[0] / (mu_o * r2)),
            c * (dy / (mu_i * d2) + xi[1] / (mu_o * r2)))


def calN(cif: CircularInclusionFields, xi, eta) -> float:
    """Full single-inclusion transmission kernel: log singularity plus remainder.

    The strength of the logarithm is set by the modulus of the region holding
    the source.  Symmetric in (xi, eta) across all branch combinations.
    """
    d = math.hypot(xi[0] - eta[0], xi[1] - eta[1])
    if d == 0.0:
        raise SingularEvaluationError("field point coincides with the source")
    if cif.is_interior(eta):
        return -math.log(d) / (TWO_PI * cif.inclusion_modulus) \
            - h_inner(cif, xi, eta)
    return -math.log(d) / (TWO_PI * cif.matrix_modulus) \
        - h_outer(cif, xi, eta)


def grad_calN(cif: CircularInclusionFields, xi, eta):
    dx, dy = xi[0] - eta[0], xi[1] - eta[1]
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        raise SingularEvaluationError("field point coincides with the source")
    if cif.is_interior(eta):
        mu = cif.inclusion_modulus
        gh = grad_h_inner(cif, xi, eta)
    else:
        mu = cif.matrix_modulus
        gh = grad_h_outer(cif, xi, eta)
    c = -1.0 / (TWO_PI * mu * d2)
    return (c * dx - gh[0], c * dy - gh[1])


def dipole(cif: CircularInclusionFields, xi, interior: bool | None = None):
    """Dipole field of the inclusion: kappa xi inside, kappa a^2 xi/|xi|^2 outside."""
    k = cif.kappa
    if cif.is_interior(xi) if interior is None else interior:
        return (k * xi[0], k * xi[1])
    r2 = xi[0] * xi[0] + xi[1] * xi[1]
    c = k * cif.radius * cif.radius / r2
    return (c * xi[0], c * xi[1])


def dipole_jacobian(cif: CircularInclusionFields, xi,
                    interior: bool | None = None):
    """Jacobian of the dipole field as ((j11, j12), (j12, j22)); symmetric."""
    k = cif.kappa
    if cif.is_interior(xi) if interior is None else interior:
        return ((k, 0.0), (0.0, k))
    r2 = xi[0] * xi[0] + xi[1] * xi[1]
    c = k * cif.radius * cif.radius / r2
    nx2 = xi[0] * xi[0] / r2
    ny2 = xi[1] * xi[1] / r2
    nxy = xi[0] * xi[1] / r2
    return ((c * (1.0 - 2.0 * nx2), -2.0 * c * nxy),
            (-2.0 * c * nxy, c * (1.0 - 2.0 * ny2)))
