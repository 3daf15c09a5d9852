"""End-to-end acceptance criteria, each at its stated tolerance.

Each test evaluates one criterion, records a PASS/FAIL line for the terminal
summary, and then asserts.  Tolerances and resolutions are the contract —
do not loosen them here.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

import stabspec as ss
from stabspec.eigen import eigenvalue_multiplicity

from conftest import record_acceptance

SQ2INV = 1 / math.sqrt(2)


def _fmt(x, digits=3):
    return f"{x:.{digits}g}"


# criterion 1 -----------------------------------------------------------


def test_criterion_1_minimal_square_torus_spectrum(solve):
    t0 = time.time()
    lam2s, spacings = [], []
    final = None
    for n in (32, 64, 128):
        sol = solve(ss.clifford_torus((n, n)), k=6)
        lam2s.append(sol.spectrum.eigenvalues[1])
        spacings.append(2 * math.pi / n)
        final = sol
    elapsed = time.time() - t0
    vals = final.spectrum.eigenvalues
    mult = eigenvalue_multiplicity(vals, 1)
    order = ss.observed_order(lam2s, spacings)
    checks = [
        abs(vals[0] + 4.0) <= 1e-3,
        abs(vals[1] + 2.0) <= 1e-3,
        mult == 4,
        order is not None and abs(order - 2.0) <= 0.2,
        elapsed < 60.0,
    ]
    detail = (f"lambda1={_fmt(vals[0], 6)} lambda2={_fmt(vals[1], 6)} "
              f"mult={mult} order={_fmt(order)} time={elapsed:.1f}s")
    record_acceptance(1, all(checks), detail)
    assert all(checks), detail


# criterion 2 -----------------------------------------------------------


def test_criterion_2_flat_torus_radius_sweep():
    radii = [0.45, 0.5, 0.55, 0.6, 0.65, SQ2INV, 0.75]
    t0 = time.time()
    reports = ss.sweep_flat_torus(radii, [(48, 48), (96, 96)])
    elapsed = time.time() - t0
    worst_err = 0.0
    checks = [elapsed < 180.0]
    for r, rep in zip(radii, reports):
        oracle = rep.extra["oracle_lambda2"]
        err = abs(rep.results[-1].lambda2 - oracle)
        worst_err = max(worst_err, err)
        checks.append(err <= 1e-3)
        checks.append(rep.lambda2_extrapolated <= -2.0 + 1e-6)
        if r == SQ2INV:
            checks.append(abs(rep.lambda2_extrapolated + 2.0) <= 1e-6)
            checks.append(rep.equality)
        else:
            checks.append(rep.lambda2_extrapolated < -2.0 - 1e-6)
            checks.append(not rep.equality)
    detail = (f"max|lambda2-oracle|={_fmt(worst_err)} "
              f"equality-only-at-r=1/sqrt2 time={elapsed:.1f}s")
    record_acceptance(2, all(checks), detail)
    assert all(checks), detail


# criterion 3 -----------------------------------------------------------


def test_criterion_3_slice_eigenvalues(solve):
    results = {}
    checks = []
    for name, target in [("product", 2.0), ("cosh", 4.0)]:
        t0 = time.time()
        sol = solve(ss.slice_shape(name, 0.0, (96, 96)), k=4)
        elapsed = time.time() - t0
        lam2 = sol.spectrum.eigenvalues[1]
        checks.append(abs(lam2 - target) <= 1e-3)
        checks.append(elapsed < 60.0)
        results[name] = (lam2, target, elapsed)
    detail = " ".join(
        f"{k}: lambda2={_fmt(v[0], 6)} target={v[1]} ({v[2]:.1f}s)"
        for k, v in results.items())
    record_acceptance(3, all(checks), detail)
    assert all(checks), detail


# criterion 4 -----------------------------------------------------------


def test_criterion_4_equatorial_sphere(solve):
    sol = solve(ss.geodesic_sphere(math.pi / 2, (96, 96)), k=4)
    lam2 = sol.spectrum.eigenvalues[1]
    ok = abs(lam2) <= 1e-3
    detail = f"lambda2={_fmt(lam2)}"
    record_acceptance(4, ok, detail)
    assert ok, detail


# criterion 5 -----------------------------------------------------------


def test_criterion_5_amplitude_margins():
    res = [(48, 48), (96, 96)]
    reports = ss.sweep_graph_amplitude(
        "cosh", 0.3, "Y2,0", [0.0, 0.02, 0.05, 0.1], res)
    zero, rest = reports[0], reports[1:]
    margins = [rep.margin for rep in rest]
    checks = [
        abs(zero.margin) <= zero.tol_report,
        all(m > 0 for m in margins),
        margins[0] < margins[1] < margins[2],
        all(rep.passed for rep in reports),
    ]
    detail = (f"margin(0)={_fmt(zero.margin)} tol={_fmt(zero.tol_report)} "
              f"margins={[_fmt(m) for m in margins]}")
    record_acceptance(5, all(checks), detail)
    assert all(checks), detail


# criterion 6 -----------------------------------------------------------


def test_criterion_6_geometric_identities():
    shapes = [
        ss.clifford_torus((96, 96)),
        ss.flat_torus(0.6, (96, 96)),
        ss.geodesic_sphere(1.0, (96, 96)),
        ss.slice_shape("cosh", 0.3, (96, 96)),
        ss.perturbed_torus(SQ2INV, 0.05, 3, (96, 96)),
    ]
    checks = []
    worst = {"gauss": 0.0, "total": 0.0, "pinch": 0.0}
    for spec in shapes:
        s = ss.build(spec)
        f = ss.compute_geometry(s)
        if s.is_sphere3:
            res = ss.gauss_equation_residual(s, f)
            worst["gauss"] = max(worst["gauss"], res)
            checks.append(res <= 1e-4)
        chi = ss.euler_characteristic(s, f)
        gb = abs(ss.total_curvature(s, f) - 2 * math.pi * chi)
        worst["total"] = max(worst["total"], gb)
        checks.append(gb <= 1e-3)
        pinch = float(np.min(f.sigma_sq - 2 * f.mean_curv**2))
        worst["pinch"] = min(worst["pinch"], pinch)
        checks.append(pinch >= -1e-10)
    detail = (f"max gauss residual={_fmt(worst['gauss'])} "
              f"max |total curvature - 2 pi chi|={_fmt(worst['total'])} "
              f"min(|sigma|^2-2H^2)={_fmt(worst['pinch'])}")
    record_acceptance(6, all(checks), detail)
    assert all(checks), detail


# criterion 7 -----------------------------------------------------------


def test_criterion_7_conformal_suite(solve):
    sol = solve(ss.clifford_torus((48, 48)), k=2)
    target = 4 * math.pi**2
    params = [ss.MobiusParam(np.array([m, 0.0, 0.0, 0.0]))
              for m in (0.0, 0.2, 0.4)]
    checks = []
    willmores, dir_rel = [], 0.0
    for p in params:
        w = ss.conformal_willmore_invariant(sol.surface, p)
        willmores.append(w)
        checks.append(abs(w - target) <= 1e-3 * target)
        energy, twice_area = ss.dirichlet_energy_check(sol.surface, p)
        rel = abs(energy - twice_area) / abs(twice_area)
        dir_rel = max(dir_rel, rel)
        checks.append(rel <= 1e-3)
        lhs, rhs = ss.willmore_type_inequality_check(sol.surface, p)
        checks.append(lhs >= rhs - 1e-9 * abs(lhs))
    spread = (max(willmores) - min(willmores)) / target
    checks.append(spread <= 1e-3)
    detail = (f"willmore spread={_fmt(spread)} "
              f"max dirichlet mismatch={_fmt(dir_rel)}")
    record_acceptance(7, all(checks), detail)
    assert all(checks), detail


# criterion 8 -----------------------------------------------------------


def test_criterion_8_balanced_bound(solve):
    checks = []
    worst_resid, worst_slack = 0.0, 0.0
    # residual and bound domination on every shape with a computed ground state
    for spec in [ss.clifford_torus((32, 32)), ss.flat_torus(0.6, (32, 32)),
                 ss.geodesic_sphere(1.0, (32, 32)),
                 ss.perturbed_torus(0.7, 0.05, 3, (32, 32))]:
        sol = solve(spec, k=2)
        f1 = sol.spectrum.eigenvectors[:, 0]
        a = ss.hersch_balance(sol.surface, sol.fields, f1)
        w = np.maximum(f1, 0.0) * sol.fields.area_element
        y = ss.mobius_apply(a, sol.surface.bundle(0)["0"])
        resid = float(np.linalg.norm(w @ y)) / float(w.sum())
        worst_resid = max(worst_resid, resid)
        checks.append(resid <= 1e-9)
        bound = ss.balanced_rayleigh_bound(sol.surface, sol.fields,
                                           sol.pencil, sol.spectrum)
        slack = sol.spectrum.eigenvalues[1] - bound
        worst_slack = max(worst_slack, slack)
        checks.append(bound >= sol.spectrum.eigenvalues[1] - 1e-8)
    # sharpness at 96 x 96 on the minimal torus and geodesic spheres
    gaps = []
    for spec in [ss.clifford_torus((96, 96)),
                 ss.geodesic_sphere(math.pi / 2, (96, 96)),
                 ss.geodesic_sphere(1.0, (96, 96))]:
        sol = solve(spec, k=2)
        bound = ss.balanced_rayleigh_bound(sol.surface, sol.fields,
                                           sol.pencil, sol.spectrum)
        gaps.append(bound - sol.spectrum.eigenvalues[1])
        checks.append(abs(gaps[-1]) <= 1e-3)
    detail = (f"max residual={_fmt(worst_resid)} "
              f"max bound slack={_fmt(worst_slack)} "
              f"96x96 gaps={[_fmt(g) for g in gaps]}")
    record_acceptance(8, all(checks), detail)
    assert all(checks), detail


# criterion 9 -----------------------------------------------------------


def test_criterion_9_solver_guarantees(solve):
    spec = ss.clifford_torus((24, 24))
    s = ss.build(spec)
    f = ss.compute_geometry(s, want_gauss=False)
    p = ss.assemble(s, f)
    dense = ss.smallest_eigenpairs(p, 6, method="dense")
    sparse = ss.smallest_eigenpairs(p, 6, method="sparse")
    A, M = p.stiffness_minus_potential, p.mass
    scale = float(np.max(np.abs(A.data)))
    V = dense.eigenvectors
    res_max = max(
        float(np.linalg.norm(A @ V[:, i] - lam * (M @ V[:, i])))
        for i, lam in enumerate(dense.eigenvalues))
    gram_err = float(np.max(np.abs(V.T @ (M @ V) - np.eye(6))))
    path_diff = float(np.max(np.abs(dense.eigenvalues - sparse.eigenvalues)))

    c = 2.0
    shifted = ss.assemble(s, f, potential_mode="shifted", shift=c)
    sh = ss.smallest_eigenpairs(shifted, 6, method="dense")
    shift_err = float(np.max(np.abs(sh.eigenvalues
                                    - (dense.eigenvalues - c))))

    signed = []
    for catalog_spec in [ss.clifford_torus((16, 16)),
                         ss.flat_torus(0.6, (16, 16)),
                         ss.geodesic_sphere(1.0, (16, 16)),
                         ss.slice_shape("cosh", 0.3, (16, 16)),
                         ss.graph_over_slice("cosh", 0.3, "Y2,0", 0.05,
                                             (16, 16)),
                         ss.perturbed_torus(0.7, 0.05, 3, (16, 16))]:
        sol = solve(catalog_spec, k=2)
        signed.append(float(np.min(sol.spectrum.eigenvectors[:, 0])) > 0)

    checks = [
        res_max <= 1e-9 * scale,
        gram_err <= 1e-10,
        all(signed),
        shift_err <= 1e-12 * (1 + abs(c)) * 10,
        path_diff <= 1e-8,
    ]
    detail = (f"residual={_fmt(res_max / scale)} gram={_fmt(gram_err)} "
              f"shift={_fmt(shift_err)} dense-vs-sparse={_fmt(path_diff)} "
              f"ground states single-signed={all(signed)}")
    record_acceptance(9, all(checks), detail)
    assert all(checks), detail
