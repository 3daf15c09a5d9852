"""Conformal dilations, balancing, and the variational bound.

Oracles used here:
- group structure of the dilations (fixed points, inverses, the
  velocity-addition law for collinear parameters), checked to rounding;
- finite differences for conformality of the differential;
- construct-and-invert for the balancing solver: displace a balanced mass
  distribution by a known dilation and demand recovery of its inverse.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

import stabspec as ss
from stabspec.errors import (
    DomainError,
    NonConvergenceError,
    UnsupportedAmbientError,
)


def _param(*vals):
    return ss.MobiusParam(np.asarray(vals, dtype=float))


def _sphere_cloud(rng, n=64):
    x = rng.standard_normal((n, 4))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


# ------------------------------------------------------------ dilation basics


def test_identity_dilation_is_exact(rng):
    x = _sphere_cloud(rng)
    np.testing.assert_array_equal(ss.mobius_apply(_param(0, 0, 0, 0), x), x)


def test_dilation_preserves_the_sphere(rng):
    x = _sphere_cloud(rng)
    y = ss.mobius_apply(_param(0.3, -0.5, 0.1, 0.4), x)
    np.testing.assert_allclose(np.linalg.norm(y, axis=1), 1.0, atol=1e-14)


def test_inverse_parameter_undoes_the_map(rng):
    a = _param(0.45, 0.2, -0.3, 0.1)
    x = _sphere_cloud(rng)
    back = ss.mobius_apply(a.inverse(), ss.mobius_apply(a, x))
    np.testing.assert_allclose(back, x, atol=1e-13)
    np.testing.assert_array_equal(a.inverse().a, -a.a)


def test_collinear_composition_follows_velocity_addition(rng):
    # dilations along one axis compose like hyperbolic velocity addition
    e = np.array([0.0, 1.0, 0.0, 0.0])
    for alpha, beta in [(0.3, 0.4), (0.7, -0.5), (-0.2, -0.6)]:
        gamma = (alpha + beta) / (1 + alpha * beta)
        x = _sphere_cloud(rng)
        two_step = ss.mobius_apply(ss.MobiusParam(beta * e),
                                   ss.mobius_apply(ss.MobiusParam(alpha * e), x))
        one_step = ss.mobius_apply(ss.MobiusParam(gamma * e), x)
        np.testing.assert_allclose(two_step, one_step, atol=1e-13)


def test_dilation_fixes_its_axis_poles():
    a = _param(0.6, 0.0, 0.0, 0.0)
    poles = np.array([[1.0, 0, 0, 0], [-1.0, 0, 0, 0]])
    np.testing.assert_allclose(ss.mobius_apply(a, poles), poles, atol=1e-14)


def test_differential_is_conformal(rng):
    a = _param(0.35, -0.15, 0.2, 0.05)
    eps = 1e-6
    for _ in range(10):
        x = _sphere_cloud(rng, 1)[0]
        # orthonormal tangent pair at x
        t1 = rng.standard_normal(4)
        t1 -= x * (x @ t1)
        t1 /= np.linalg.norm(t1)
        t2 = rng.standard_normal(4)
        t2 -= x * (x @ t2) + t1 * (t1 @ t2)
        t2 /= np.linalg.norm(t2)

        def push(t):
            plus = (x + eps * t) / np.linalg.norm(x + eps * t)
            minus = (x - eps * t) / np.linalg.norm(x - eps * t)
            return (ss.mobius_apply(a, plus[None]) -
                    ss.mobius_apply(a, minus[None]))[0] / (2 * eps)

        j1, j2 = push(t1), push(t2)
        n1, n2 = np.linalg.norm(j1), np.linalg.norm(j2)
        assert n1 == pytest.approx(n2, rel=1e-6)
        assert abs(j1 @ j2) <= 1e-6 * n1 * n2


def test_parameter_validation():
    with pytest.raises(DomainError):
        _param(1.0, 0, 0, 0)
    with pytest.raises(DomainError):
        _param(0.8, 0.8, 0, 0)
    with pytest.raises(DomainError):
        ss.MobiusParam(np.array([np.nan, 0, 0, 0]))
    with pytest.raises(DomainError):
        ss.mobius_apply(_param(0.2, 0, 0, 0), 1.5 * np.eye(4))
    assert ss.MobiusParam.zero().magnitude == 0.0


def test_image_surface_requires_sphere_ambient():
    s = ss.build(ss.slice_shape("cosh", 0.0, (8, 8)))
    with pytest.raises(UnsupportedAmbientError):
        ss.mobius_image_surface(s, _param(0.2, 0, 0, 0))


def test_image_surface_geometry_is_still_spherical():
    s = ss.build(ss.clifford_torus((16, 16)))
    si = ss.mobius_image_surface(s, _param(0.3, 0.0, 0.1, 0.0))
    fi = ss.compute_geometry(si)
    assert ss.gauss_equation_residual(si, fi) < 1e-10
    assert ss.euler_characteristic(si, fi) == 0
    assert ss.area(si, fi) < 2 * math.pi**2  # dilations shrink the total area


# ----------------------------------------------------------------- balancing


def test_centered_shapes_balance_at_zero(solve):
    for spec in (ss.clifford_torus((16, 16)), ss.flat_torus(0.6, (16, 16)),
                 ss.geodesic_sphere(math.pi / 2, (16, 16))):
        sol = solve(spec, k=2)
        f1 = sol.spectrum.eigenvectors[:, 0]
        a = ss.hersch_balance(sol.surface, sol.fields, f1)
        assert a.magnitude <= 1e-9


def test_balance_recovers_a_known_displacement(solve):
    # move a balanced distribution by a dilation, keep the original weights,
    # and ask the solver to undo it: it must return the inverse parameter
    sol = solve(ss.clifford_torus((20, 20)), k=2)
    a0 = _param(0.3, 0.1, -0.2, 0.0)
    moved = ss.mobius_image_surface(sol.surface, a0)
    recovered = ss.hersch_balance(moved, sol.fields,
                                  np.ones(sol.surface.node_count))
    np.testing.assert_allclose(recovered.a, -a0.a, atol=1e-8)


def test_balance_residual_definition(solve):
    sol = solve(ss.geodesic_sphere(1.0, (16, 16)), k=2)
    f1 = sol.spectrum.eigenvectors[:, 0]
    a = ss.hersch_balance(sol.surface, sol.fields, f1)
    w = np.maximum(f1, 0.0) * sol.fields.area_element
    y = ss.mobius_apply(a, sol.surface.bundle(0)["0"])
    resid = np.linalg.norm(w @ y) / w.sum()
    assert resid <= 1e-9


def test_balance_rejects_bad_weights(solve):
    sol = solve(ss.clifford_torus((12, 12)), k=2)
    n = sol.surface.node_count
    with pytest.raises(DomainError):
        ss.hersch_balance(sol.surface, sol.fields, np.zeros(n))
    with pytest.raises(DomainError):
        ss.hersch_balance(sol.surface, sol.fields, -np.ones(n))
    with pytest.raises(DomainError):
        ss.hersch_balance(sol.surface, sol.fields, np.ones(n - 1))


def test_point_mass_cannot_be_balanced(solve):
    sol = solve(ss.clifford_torus((12, 12)), k=2)
    w = np.zeros(sol.surface.node_count)
    w[17] = 1.0
    with pytest.raises(NonConvergenceError) as err:
        ss.hersch_balance(sol.surface, sol.fields, w)
    assert err.value.residuals is not None


# ----------------------------------------------------- quadrature invariants


def test_willmore_integral_is_conformally_invariant(solve):
    sol = solve(ss.clifford_torus((24, 24)), k=2)
    base = float(np.sum((sol.fields.sigma_sq - 2 * sol.fields.mean_curv**2)
                        * sol.fields.area_element))
    assert base == pytest.approx(4 * math.pi**2, rel=1e-12)
    vals = [ss.conformal_willmore_invariant(sol.surface, _param(*a))
            for a in [(0, 0, 0, 0), (0.2, 0, 0, 0), (0.0, 0.4, 0, 0),
                      (0.25, -0.2, 0.1, 0.0)]]
    np.testing.assert_allclose(vals, base, rtol=1e-12)


def test_willmore_invariance_on_a_non_minimal_torus(solve):
    sol = solve(ss.flat_torus(0.6, (24, 24)), k=2)
    f = sol.fields
    base = float(np.sum((f.sigma_sq - 2 * f.mean_curv**2) * f.area_element))
    r, rho2 = 0.6, 1 - 0.36
    pointwise = (0.64 / 0.36 + 0.36 / 0.64) - 2 * ((1 - 2 * r * r) ** 2
                                                   / (4 * r * r * rho2))
    assert base == pytest.approx(pointwise * 4 * math.pi**2 * r
                                 * math.sqrt(rho2), rel=1e-12)
    moved = ss.conformal_willmore_invariant(sol.surface,
                                            _param(0.3, 0.0, -0.2, 0.1))
    assert moved == pytest.approx(base, rel=1e-12)


def test_dirichlet_energy_equals_twice_image_area(solve):
    sol = solve(ss.clifford_torus((20, 20)), k=2)
    for a in [(0, 0, 0, 0), (0.2, 0, 0, 0), (0.3, -0.1, 0.0, 0.2)]:
        energy, twice_area = ss.dirichlet_energy_check(sol.surface,
                                                       _param(*a))
        assert energy == pytest.approx(twice_area, rel=1e-12)
    base_area = float(np.sum(sol.fields.area_element))
    _, twice_moved = ss.dirichlet_energy_check(sol.surface,
                                               _param(0.3, 0, 0, 0))
    assert twice_moved < 2 * base_area


def test_willmore_type_inequality_with_equality_at_identity(solve):
    sol = solve(ss.clifford_torus((20, 20)), k=2)
    lhs0, rhs0 = ss.willmore_type_inequality_check(sol.surface,
                                                   _param(0, 0, 0, 0))
    assert lhs0 == pytest.approx(rhs0, rel=1e-12)
    for a in [(0.2, 0, 0, 0), (0.0, -0.35, 0.1, 0.0)]:
        lhs, rhs = ss.willmore_type_inequality_check(sol.surface, _param(*a))
        assert lhs >= rhs - 1e-12 * abs(lhs)
        # invariant in the continuum; discretely only up to quadrature error
        assert lhs == pytest.approx(lhs0, rel=1e-6)


# ------------------------------------------------------------ balanced bound


@pytest.mark.parametrize("spec", [
    ss.clifford_torus((20, 20)),
    ss.flat_torus(0.6, (20, 20)),
    ss.geodesic_sphere(math.pi / 2, (20, 20)),
    ss.perturbed_torus(0.7, 0.05, 3, (20, 20)),
], ids=lambda s: s.label)
def test_balanced_bound_dominates_lambda2(solve, spec):
    sol = solve(spec, k=2)
    bound = ss.balanced_rayleigh_bound(sol.surface, sol.fields, sol.pencil,
                                       sol.spectrum)
    assert bound >= sol.spectrum.eigenvalues[1] - 1e-8


def test_balanced_bound_report_records_attempts(solve):
    sol = solve(ss.clifford_torus((16, 16)), k=2)
    starts = [None, np.array([0.2, 0.0, 0.0, 0.0])]
    rep = ss.balanced_bound_report(sol.surface, sol.fields, sol.pencil,
                                   sol.spectrum, starts=starts)
    assert len(rep.attempts) == len(starts)
    assert rep.bound == min(at["bound"] for at in rep.attempts)
    assert rep.balance_residual <= 1e-9
    for at in rep.attempts:
        assert at["residual"] <= 1e-9


def test_balanced_bound_is_tight_for_the_off_center_sphere(solve):
    # balancing pulls a non-equatorial sphere onto a great sphere, where the
    # coordinate functions are genuine second eigenfunctions
    sol = solve(ss.geodesic_sphere(1.0, (32, 32)), k=2)
    rep = ss.balanced_bound_report(sol.surface, sol.fields, sol.pencil,
                                   sol.spectrum)
    assert rep.param.magnitude > 0.1  # it genuinely moved
    gap = rep.bound - sol.spectrum.eigenvalues[1]
    assert -1e-8 <= gap <= 1e-2


def test_balancing_rejects_warped_ambient():
    s = ss.build(ss.slice_shape("cosh", 0.0, (8, 8)))
    f = ss.compute_geometry(s, want_gauss=False)
    with pytest.raises(UnsupportedAmbientError):
        ss.hersch_balance(s, f, np.ones(s.node_count))
