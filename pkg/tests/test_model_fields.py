import math

import numpy as np
import pytest

from incgreen import model_fields as mf
from incgreen.geometry import DegenerateSourceError, SingularEvaluationError

TWO_PI = 2.0 * math.pi


def central_diff(f, p, h=1e-7):
    return ((f((p[0] + h, p[1])) - f((p[0] - h, p[1]))) / (2 * h),
            (f((p[0], p[1] + h)) - f((p[0], p[1] - h))) / (2 * h))


# --- disk kernel --------------------------------------------------------------


def test_disk_kernel_frozen_values():
    # hand-computed from the image construction: y* = y / |y|^2 for R = 1,
    # |x - y*| = 17/6, kernel log argument 0.85, free-space distance 0.2
    dn = mf.DiskNeumann(1.0, 1.0)
    x, y = (0.5, 0.0), (0.3, 0.0)
    assert mf.regular_part_disk(dn, x, y) == pytest.approx(
        math.log(0.85) / TWO_PI, rel=0, abs=1e-15)
    assert mf.neumann_disk(dn, x, y) == pytest.approx(
        -math.log(0.2 * 0.85) / TWO_PI, rel=0, abs=1e-15)
    g = mf.grad_x_regular_part(dn, x, y)
    assert g[0] == pytest.approx(-(6.0 / 17.0) / TWO_PI)
    assert g[1] == 0.0


def test_disk_kernel_scales_with_modulus():
    a = mf.DiskNeumann(2.0, 1.0)
    b = mf.DiskNeumann(2.0, 4.0)
    x, y = (0.5, 0.3), (-0.4, 0.8)
    assert mf.neumann_disk(b, x, y) == pytest.approx(
        mf.neumann_disk(a, x, y) / 4.0)


def test_regular_part_symmetry():
    dn = mf.DiskNeumann(3.0, 2.0)
    rng = np.random.default_rng(7)
    for _ in range(50):
        x = tuple(rng.uniform(-2.0, 2.0, 2))
        y = tuple(rng.uniform(-2.0, 2.0, 2))
        if math.hypot(*x) > 2.9 or math.hypot(*y) > 2.9:
            continue
        a = mf.regular_part_disk(dn, x, y)
        b = mf.regular_part_disk(dn, y, x)
        assert a == pytest.approx(b, rel=1e-13, abs=1e-15)


def test_disk_kernel_zero_flux_and_mean():
    # the normalized trace on the boundary integrates to zero, and the
    # normal derivative is the uniform compensating flux
    dn = mf.DiskNeumann(2.0, 3.0, normalized=True)
    y = (0.4, -0.7)
    n = 4096
    vals = []
    flux = []
    for k in range(n):
        th = TWO_PI * (k + 0.5) / n
        p = (2.0 * math.cos(th), 2.0 * math.sin(th))
        vals.append(mf.neumann_disk(dn, (0.999999 * p[0], 0.999999 * p[1]), y))
        h = 1e-6
        inner = ((1 - h) * p[0], (1 - h) * p[1])
        outer_v = mf.neumann_disk(dn, p, y)
        flux.append(3.0 * (outer_v - mf.neumann_disk(dn, inner, y)) / (2e-6))
    assert abs(np.mean(vals)) < 1e-6
    assert np.allclose(flux, -1.0 / (TWO_PI * 2.0), atol=1e-4)


def test_disk_source_at_center():
    dn = mf.DiskNeumann(2.0, 1.0)
    # limit of the image construction: |x - y*||y| -> R^2
    assert mf.regular_part_disk(dn, (0.5, 0.1), (0.0, 0.0)) == pytest.approx(
        2.0 * math.log(2.0) / TWO_PI)
    assert mf.grad_x_regular_part(dn, (0.5, 0.1), (0.0, 0.0)) == (0.0, 0.0)


def test_disk_gradients_match_finite_differences():
    dn = mf.DiskNeumann(2.0, 1.5)
    x, y = (0.7, -0.3), (0.4, 0.9)
    fd = central_diff(lambda p: mf.regular_part_disk(dn, p, y), x)
    g = mf.grad_x_regular_part(dn, x, y)
    assert np.allclose(fd, g, atol=1e-9)
    fd = central_diff(lambda q: mf.regular_part_disk(dn, x, q), y)
    g = mf.grad_y_regular_part(dn, x, y)
    assert np.allclose(fd, g, atol=1e-9)


def test_mixed_gradient_matches_finite_differences():
    dn = mf.DiskNeumann(2.0, 1.5)
    y0, v = (0.4, 0.9), (0.3, -0.7)

    def f(p):
        g = mf.grad_y_regular_part(dn, p, y0)
        return v[0] * g[0] + v[1] * g[1]

    fd = central_diff(f, (0.7, -0.3))
    g = mf.grad_x_dot_grad_y_regular_part(dn, (0.7, -0.3), y0, v)
    assert np.allclose(fd, g, atol=1e-8)


def test_disk_kernel_guards():
    dn = mf.DiskNeumann(1.0, 1.0)
    with pytest.raises(DegenerateSourceError):
        mf.regular_part_disk(dn, (0.1, 0.1), (1.0, 0.0))  # source on boundary
    with pytest.raises(SingularEvaluationError):
        mf.neumann_disk(dn, (0.3, 0.0), (0.3, 0.0))


# --- single-inclusion kernel ---------------------------------------------------


@pytest.fixture
def cif():
    return mf.CircularInclusionFields(1.0, 1.0, 3.0)  # kappa = 1/2


def test_inclusion_frozen_values(cif):
    # exterior source at (2,0), field at (4,0): image at 1/2, ratio 3.5/4
    assert mf.h_outer(cif, (4.0, 0.0), (2.0, 0.0)) == pytest.approx(
        -math.log(3.5 / 4.0) / (2.0 * TWO_PI), rel=0, abs=1e-15)
    # interior source at (0.5,0), field at (4,0)
    assert mf.h_inner(cif, (4.0, 0.0), (0.5, 0.0)) == pytest.approx(
        (math.log(3.5) / 3.0 + math.log(4.0)) / (2.0 * TWO_PI),
        rel=0, abs=1e-15)


def test_kappa_sign_and_zero():
    soft = mf.CircularInclusionFields(1.0, 3.0, 1.0)
    assert soft.kappa == pytest.approx(-0.5)
    none = mf.CircularInclusionFields(1.0, 2.0, 2.0)
    assert none.kappa == 0.0
    assert mf.h_outer(none, (3.0, 1.0), (2.0, 0.0)) == 0.0
    assert mf.dipole(none, (0.3, 0.1)) == (0.0, 0.0)


def test_calN_symmetry_all_branches(cif):
    pairs = [((4.0, 0.3), (2.0, -1.0)),   # both exterior
             ((0.5, 0.2), (2.0, -1.0)),   # field in, source out
             ((0.5, 0.2), (-0.3, 0.4)),   # both interior
             ((4.0, 0.3), (-0.3, 0.4))]   # field out, source in
    for xi, eta in pairs:
        assert mf.calN(cif, xi, eta) == pytest.approx(
            mf.calN(cif, eta, xi), rel=0, abs=1e-15)


def test_h_gradients_match_finite_differences(cif):
    eta_out, eta_in = (2.0, -1.0), (0.4, -0.2)
    cases = [
        (lambda p: mf.h_outer(cif, p, eta_out),
         lambda p: mf.grad_h_outer(cif, p, eta_out), (3.0, 0.7)),
        (lambda p: mf.h_outer(cif, p, eta_out),
         lambda p: mf.grad_h_outer(cif, p, eta_out), (0.3, 0.2)),
        (lambda p: mf.h_inner(cif, p, eta_in),
         lambda p: mf.grad_h_inner(cif, p, eta_in), (3.0, 0.7)),
        (lambda p: mf.h_inner(cif, p, eta_in),
         lambda p: mf.grad_h_inner(cif, p, eta_in), (0.3, 0.6)),
    ]
    for f, g, p in cases:
        assert np.allclose(central_diff(f, p), g(p), atol=1e-9)


def test_h_inner_stable_near_center(cif):
    # interior branch must stay finite as the source approaches the center
    v = mf.h_inner(cif, (0.3, 0.1), (1e-13, 0.0))
    limit = cif.kappa / TWO_PI * (math.log(1.0) / 3.0 + math.log(1.0))
    assert v == pytest.approx(limit, abs=1e-12)
    g = mf.grad_h_inner(cif, (0.3, 0.1), (1e-13, 0.0))
    assert np.allclose(g, (0.0, 0.0), atol=1e-12)


def test_dipole_and_jacobian(cif):
    assert mf.dipole(cif, (0.3, -0.2)) == (0.15, -0.1)
    d = mf.dipole(cif, (2.0, 0.0))
    assert d == (0.25, 0.0)

    def f0(p):
        return mf.dipole(cif, p)[0]

    def f1(p):
        return mf.dipole(cif, p)[1]

    for p in [(0.3, -0.2), (2.0, 0.9)]:
        jac = mf.dipole_jacobian(cif, p)
        assert np.allclose(central_diff(f0, p), jac[0], atol=1e-9)
        assert np.allclose(central_diff(f1, p), jac[1], atol=1e-9)


def test_branch_override_matches_auto(cif):
    out_pt, in_pt, eta = (3.0, 0.4), (0.5, 0.1), (2.0, -1.0)
    assert mf.h_outer(cif, out_pt, eta) == mf.h_outer(cif, out_pt, eta,
                                                      interior=False)
    assert mf.h_outer(cif, in_pt, eta) == mf.h_outer(cif, in_pt, eta,
                                                     interior=True)


def test_source_branch_guards(cif):
    with pytest.raises(DegenerateSourceError):
        mf.h_outer(cif, (3.0, 0.0), (0.5, 0.0))
    with pytest.raises(DegenerateSourceError):
        mf.h_inner(cif, (3.0, 0.0), (2.0, 0.0))
