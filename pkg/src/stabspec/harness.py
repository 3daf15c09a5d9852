"""Scenario runner: theorem checks, sweeps, refinement studies, reports.

Each check builds a catalog shape at one or more resolutions, solves the
stability pencil, Richardson-extrapolates the second eigenvalue, and
compares it against the relevant bound:

* t11 — closed orientable surface of nonpositive Euler characteristic in
  the 3-sphere: second eigenvalue <= -2 (equality at the square torus).
* t12 — hypersurface of the product ambient (warping h = 1): bound n.
* t13 — hypersurface of a warped ambient whose warping satisfies the
  strict convexity condition: bound is the area-weighted mean of the
  slice second eigenvalue over the surface.
* esi — the conformal-volume upper bound: area-weighted mean of
  n H^2 + (R - 2 Ric(normal)) / (n - 1) - |sigma|^2 - Ric(normal).

The genus hypothesis is verified from the computed total curvature,
never assumed.  The report tolerance is max(5 * Richardson error
estimate, 1e-6) so that no violation is claimed inside discretization
noise.  Reports serialize to JSON (one file per scenario) plus a CSV
summary; every float is written with 12 significant digits.
"""

from __future__ import annotations

import csv
import json
import math
import re
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import catalog, warping as wp
from .assembly import assemble
from .conformal import balanced_bound_report
from .eigen import eigenvalue_multiplicity, smallest_eigenpairs
from .errors import DomainError, HypothesisError
from .surfaces import compute_geometry, euler_characteristic

__all__ = [
    "TheoremReport",
    "ResolutionResult",
    "ConvergenceStudy",
    "check_theorem_11",
    "check_theorem_12",
    "check_theorem_13",
    "check_esi",
    "check_theorem",
    "convergence_study",
    "sweep_flat_torus",
    "sweep_graph_amplitude",
    "balance_bound_scenario",
    "slice_spectrum_report",
    "richardson_extrapolate",
    "observed_order",
    "report_tolerance",
    "write_json_report",
    "write_csv_summary",
    "scenario_slug",
    "SURFACE_DIM",
]

SURFACE_DIM = 2
MIN_REPORT_TOL = 1e-6
DEFAULT_EIGEN_COUNT = 6


def _square(res) -> tuple[int, int]:
    if isinstance(res, int):
        return (res, res)
    pair = tuple(int(x) for x in res)
    if len(pair) != 2:
        raise DomainError(f"resolution must be an integer or a pair, got {res!r}")
    return pair


def richardson_extrapolate(values, spacings) -> tuple[float, float]:
    """(extrapolated value, error estimate) assuming second-order bias.

    Uses the finest two entries; with a single entry the estimate is 0
    and the value passes through.
    """
    values = [float(v) for v in values]
    if len(values) == 1:
        return values[0], 0.0
    h_coarse, h_fine = float(spacings[-2]), float(spacings[-1])
    ratio = h_coarse / h_fine
    if ratio <= 1.0:
        raise DomainError("resolutions must be strictly increasing")
    fine, coarse = values[-1], values[-2]
    correction = (fine - coarse) / (ratio**2 - 1.0)
    return fine + correction, abs(correction)


def observed_order(values, spacings):
    """Convergence order from the last three values, or None.

    Needs three entries with a constant refinement ratio and nonzero
    consecutive differences; warns (and returns None) otherwise.
    """
    if len(values) < 3:
        return None
    v1, v2, v3 = (float(v) for v in values[-3:])
    h1, h2, h3 = (float(h) for h in spacings[-3:])
    r1, r2 = h1 / h2, h2 / h3
    if abs(r1 - r2) > 1e-9 * r1:
        warnings.warn("refinement ratios differ; observed order skipped")
        return None
    if r1 <= 1.0:
        warnings.warn("refinement ratio 1 leaves the convergence order undefined")
        return None
    d1, d2 = v2 - v1, v3 - v2
    if d2 == 0.0 or d1 == 0.0:
        warnings.warn("stalled eigenvalue differences; observed order skipped")
        return None
    if d1 * d2 < 0.0:
        warnings.warn("non-monotone eigenvalue sequence under refinement")
    return math.log(abs(d1 / d2)) / math.log(r1)


def report_tolerance(error_estimate: float) -> float:
    return max(5.0 * abs(error_estimate), MIN_REPORT_TOL)


@dataclass(frozen=True)
class ResolutionResult:
    """Solve data for one grid resolution."""

    resolution: tuple[int, int]
    spacing: float
    lambda1: float
    lambda2: float
    bound: float
    lambda2_multiplicity: int


@dataclass
class TheoremReport:
    theorem_id: str
    scenario: str
    shape: str
    results: list[ResolutionResult]
    bound: float
    lambda2_extrapolated: float
    margin: float
    tol_report: float
    passed: bool
    equality: bool
    order: float | None
    seed: int
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "scenario": self.scenario,
            "shape": self.shape,
            "results": [
                {
                    "resolution": list(r.resolution),
                    "spacing": r.spacing,
                    "lambda1": r.lambda1,
                    "lambda2": r.lambda2,
                    "bound": r.bound,
                    "lambda2_multiplicity": r.lambda2_multiplicity,
                }
                for r in self.results
            ],
            "bound": self.bound,
            "lambda2_extrapolated": self.lambda2_extrapolated,
            "margin": self.margin,
            "tol_report": self.tol_report,
            "passed": self.passed,
            "equality": self.equality,
            "order": self.order,
            "seed": self.seed,
            **({"extra": self.extra} if self.extra else {}),
        }

    def csv_rows(self) -> list[dict]:
        rows = []
        spacings = [r.spacing for r in self.results]
        lams = [r.lambda2 for r in self.results]
        for i, r in enumerate(self.results):
            order = observed_order(lams[: i + 1], spacings[: i + 1]) if i >= 2 else None
            rows.append(
                {
                    "scenario": self.scenario,
                    "resolution": f"{r.resolution[0]}x{r.resolution[1]}",
                    "lambda1": r.lambda1,
                    "lambda2": r.lambda2,
                    "bound": r.bound,
                    "margin": r.bound - r.lambda2,
                    "order": order,
                }
            )
        return rows


def scenario_slug(*parts) -> str:
    text = "-".join(str(p) for p in parts if p is not None and str(p) != "")
    text = text.lower().replace("|", "-")
    text = re.sub(r"[^a-z0-9.+-]+", "-", text)
    return re.sub(r"-{2,}", "-", text).strip("-")


def _solve_at_resolution(spec: catalog.ShapeSpec, res, seed: int,
                         k: int = DEFAULT_EIGEN_COUNT,
                         solver_tol: float = 1e-9):
    res = _square(res)
    import dataclasses

    spec_r = dataclasses.replace(spec, resolution=res)
    surface = catalog.build(spec_r)
    fields = compute_geometry(surface, want_gauss=True)
    pencil = assemble(surface, fields)
    spectrum = smallest_eigenpairs(pencil, k, tol=solver_tol, seed=seed)
    return surface, fields, pencil, spectrum


def _per_resolution_results(spec, resolutions, seed, bound_fn):
    results = []
    last = None
    for res in resolutions:
        surface, fields, pencil, spectrum = _solve_at_resolution(spec, res, seed)
        lam = spectrum.eigenvalues
        bound = float(bound_fn(surface, fields))
        results.append(
            ResolutionResult(
                resolution=(surface.grid.nu, surface.grid.nv),
                spacing=max(surface.grid.du, surface.grid.dv),
                lambda1=float(lam[0]),
                lambda2=float(lam[1]),
                bound=bound,
                lambda2_multiplicity=eigenvalue_multiplicity(lam, 1),
            )
        )
        last = (surface, fields, pencil, spectrum)
    return results, last


def _finish_report(theorem_id, spec, results, seed, extra=None) -> TheoremReport:
    spacings = [r.spacing for r in results]
    lams = [r.lambda2 for r in results]
    lam_hat, err_est = richardson_extrapolate(lams, spacings)
    tol = report_tolerance(err_est)
    bound = results[-1].bound
    margin = bound - lam_hat
    return TheoremReport(
        theorem_id=theorem_id,
        scenario=scenario_slug(theorem_id, spec.label),
        shape=spec.label,
        results=results,
        bound=bound,
        lambda2_extrapolated=lam_hat,
        margin=margin,
        tol_report=tol,
        passed=bool(margin >= -tol),
        equality=bool(abs(margin) <= tol),
        order=observed_order(lams, spacings),
        seed=seed,
        extra=extra or {},
    )


def check_theorem_11(spec: catalog.ShapeSpec, resolutions, seed: int = 0) -> TheoremReport:
    """Second eigenvalue <= -2 for genus >= 1 surfaces in the 3-sphere."""
    probe = catalog.build(spec)
    if not probe.is_sphere3:
        raise HypothesisError("this check applies to surfaces in the 3-sphere")
    chi = euler_characteristic(probe, compute_geometry(probe, want_gauss=True))
    if chi > 0:
        raise HypothesisError(
            f"surface has Euler characteristic {chi}; the bound needs genus >= 1 "
            "(nonpositive Euler characteristic)"
        )
    results, _ = _per_resolution_results(
        spec, resolutions, seed, lambda s, f: -2.0
    )
    return _finish_report("T11", spec, results, seed,
                          extra={"euler_characteristic": chi})


def _require_warped(spec: catalog.ShapeSpec):
    probe = catalog.build(spec)
    if probe.is_sphere3:
        raise HypothesisError("this check applies to hypersurfaces of a warped ambient")
    return probe


def _condition_over_surface(surface) -> tuple[float, float]:
    w = surface.ambient.warping
    t = surface.bundle(2)["0"][:, 0]
    lo, hi = float(np.min(t)), float(np.max(t))
    val, arg = wp.condition_strictness(w, (lo, hi))
    return val, arg


def _slice_mean_bound(surface, fields) -> float:
    w = surface.ambient.warping
    t = surface.bundle(2)["0"][:, 0]
    values = wp.slice_lambda2(w, t)
    return float(np.sum(values * fields.area_element) / np.sum(fields.area_element))


def check_theorem_13(spec: catalog.ShapeSpec, resolutions, seed: int = 0) -> TheoremReport:
    """lambda2 <= area-weighted mean of the slice lambda2 over the surface."""
    probe = _require_warped(spec)
    cond_min, cond_arg = _condition_over_surface(probe)
    if cond_min <= 0.0:
        raise HypothesisError(
            f"strict convexity condition fails at t = {cond_arg:.6g} "
            f"(value {cond_min:.6g}); the bound requires it positive"
        )
    results, _ = _per_resolution_results(spec, resolutions, seed, _slice_mean_bound)
    return _finish_report(
        "T13", spec, results, seed,
        extra={"condition_min": cond_min, "condition_argmin": cond_arg},
    )


def check_theorem_12(spec: catalog.ShapeSpec, resolutions, seed: int = 0) -> TheoremReport:
    """Product-ambient specialization: bound equals the sphere dimension n."""
    probe = _require_warped(spec)
    w = probe.ambient.warping
    samples = np.linspace(w.interval[0], w.interval[1], 17)
    if (float(np.max(np.abs(w.h(samples) - 1.0))) > 1e-12
            or float(np.max(np.abs(w.dh(samples)))) > 1e-12):
        raise HypothesisError(
            "this specialization requires the product ambient (warping h = 1); "
            f"got warping {w.name!r}"
        )
    results, _ = _per_resolution_results(
        spec, resolutions, seed, lambda s, f: float(w.dim_n)
    )
    report = _finish_report("T12", spec, results, seed)
    return report


def _esi_bound(surface, fields) -> float:
    w = surface.ambient.warping
    t = surface.bundle(2)["0"][:, 0]
    n = SURFACE_DIM
    scalar = wp.ambient_ricci(w, t).scalar
    integrand = (
        n * fields.mean_curv**2
        + (scalar - 2.0 * fields.ricci_normal) / (n - 1)
        - fields.sigma_sq
        - fields.ricci_normal
    )
    return float(np.sum(integrand * fields.area_element) / np.sum(fields.area_element))


def check_esi(spec: catalog.ShapeSpec, resolutions, seed: int = 0) -> TheoremReport:
    """Conformal-volume style bound via ambient curvature quadrature."""
    _require_warped(spec)
    results, _ = _per_resolution_results(spec, resolutions, seed, _esi_bound)
    return _finish_report("ESI", spec, results, seed)


_CHECKS = {
    "t11": check_theorem_11,
    "t12": check_theorem_12,
    "t13": check_theorem_13,
    "esi": check_esi,
}


def check_theorem(theorem: str, spec: catalog.ShapeSpec, resolutions,
                  seed: int = 0) -> TheoremReport:
    key = theorem.lower()
    if key not in _CHECKS:
        raise DomainError(f"unknown check {theorem!r}; pick one of {sorted(_CHECKS)}")
    return _CHECKS[key](spec, resolutions, seed=seed)


@dataclass
class ConvergenceStudy:
    scenario: str
    shape: str
    rows: list[dict]
    lambda2_extrapolated: float
    error_estimate: float
    oracle: float | None
    seed: int

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "shape": self.shape,
            "rows": self.rows,
            "lambda2_extrapolated": self.lambda2_extrapolated,
            "error_estimate": self.error_estimate,
            "oracle": self.oracle,
            "seed": self.seed,
        }

    def csv_rows(self) -> list[dict]:
        return [
            {
                "scenario": self.scenario,
                "resolution": r["resolution"],
                "lambda1": r["lambda1"],
                "lambda2": r["lambda2"],
                "bound": self.oracle if self.oracle is not None else "",
                "margin": (self.oracle - r["lambda2"]) if self.oracle is not None else "",
                "order": r["order"],
            }
            for r in self.rows
        ]


def convergence_study(spec: catalog.ShapeSpec, resolutions, seed: int = 0) -> ConvergenceStudy:
    """Second-eigenvalue refinement table with observed convergence orders."""
    if len(resolutions) < 2:
        raise DomainError("a convergence study needs at least two resolutions")
    spacings: list[float] = []
    lams1: list[float] = []
    lams2: list[float] = []
    sizes: list[tuple[int, int]] = []
    for res in resolutions:
        surface, fields, pencil, spectrum = _solve_at_resolution(spec, res, seed)
        sizes.append((surface.grid.nu, surface.grid.nv))
        spacings.append(max(surface.grid.du, surface.grid.dv))
        lams1.append(float(spectrum.eigenvalues[0]))
        lams2.append(float(spectrum.eigenvalues[1]))
    lam_hat, err_est = richardson_extrapolate(lams2, spacings)
    try:
        oracle = catalog.exact_jacobi_spectrum(spec, 2)[1]
    except DomainError:
        oracle = None
    rows = []
    for i in range(len(sizes)):
        rows.append(
            {
                "resolution": f"{sizes[i][0]}x{sizes[i][1]}",
                "spacing": spacings[i],
                "lambda1": lams1[i],
                "lambda2": lams2[i],
                "order": observed_order(lams2[: i + 1], spacings[: i + 1]) if i >= 2 else None,
            }
        )
    return ConvergenceStudy(
        scenario=scenario_slug("converge", spec.label),
        shape=spec.label,
        rows=rows,
        lambda2_extrapolated=lam_hat,
        error_estimate=err_est,
        oracle=None if oracle is None else float(oracle),
        seed=seed,
    )


def sweep_flat_torus(rs, resolutions, seed: int = 0) -> list[TheoremReport]:
    """t11 check across the flat-torus family; tightest at r = 1/sqrt(2)."""
    reports = []
    for r in rs:
        spec = catalog.flat_torus(float(r))
        rep = check_theorem_11(spec, resolutions, seed=seed)
        rep.scenario = scenario_slug("sweep-flat-torus", f"r={float(r):.6g}")
        rep.extra["r"] = float(r)
        rep.extra["oracle_lambda2"] = catalog.exact_jacobi_spectrum(spec, 2)[1]
        reports.append(rep)
    return reports


def sweep_graph_amplitude(warping, t0, perturbation, amplitudes, resolutions,
                          seed: int = 0) -> list[TheoremReport]:
    """t13 check across graph amplitudes; margin grows with amplitude."""
    reports = []
    for amp in amplitudes:
        amp = float(amp)
        spec = (
            catalog.slice_shape(warping, t0)
            if amp == 0.0
            else catalog.graph_over_slice(warping, t0, perturbation, amp)
        )
        rep = check_theorem_13(spec, resolutions, seed=seed)
        rep.scenario = scenario_slug("sweep-graph-amplitude", f"amp={amp:.6g}")
        rep.extra["amplitude"] = amp
        reports.append(rep)
    return reports


def balance_bound_scenario(spec: catalog.ShapeSpec, resolution, seed: int = 0,
                           tol: float = 1e-9, starts=None) -> dict:
    """Balanced-coordinate upper bound vs the computed second eigenvalue."""
    surface, fields, pencil, spectrum = _solve_at_resolution(spec, resolution, seed)
    rep = balanced_bound_report(surface, fields, pencil, spectrum,
                                tol=tol, starts=starts)
    lam2 = float(spectrum.eigenvalues[1])
    return {
        "scenario": scenario_slug("balance-bound", spec.label),
        "shape": spec.label,
        "resolution": f"{surface.grid.nu}x{surface.grid.nv}",
        "lambda1": float(spectrum.eigenvalues[0]),
        "lambda2": lam2,
        "bound": rep.bound,
        "gap": rep.bound - lam2,
        "balance_residual": rep.balance_residual,
        "param_norm": rep.param.magnitude,
        "param": [float(x) for x in rep.param.a],
        "attempts": [
            {
                "start": a["start"],
                "bound": a["bound"],
                "residual": a["residual"],
                "param_norm": a["param"].magnitude,
            }
            for a in rep.attempts
        ],
        "seed": seed,
    }


def slice_spectrum_report(warping, t0: float, count: int = 8) -> dict:
    """Closed-form slice spectrum with band multiplicities."""
    w = warping if isinstance(warping, wp.WarpingFunction) else wp.builtin_warping(str(warping))
    values = wp.slice_spectrum(w, t0, count)
    bands = []
    k = 0
    emitted = 0
    while emitted < count:
        mult = wp.harmonic_multiplicity(k, w.dim_n)
        bands.append(
            {
                "band": k,
                "eigenvalue": wp.slice_eigenvalue_band(w, t0, k),
                "multiplicity": mult,
            }
        )
        emitted += mult
        k += 1
    return {
        "scenario": scenario_slug("slice-spectrum", w.name, f"t0={t0:.6g}"),
        "warping": w.name,
        "t0": float(t0),
        "sphere_dim": w.dim_n,
        "count": count,
        "eigenvalues": [float(v) for v in values],
        "bands": bands,
        "slice_lambda2": wp.slice_lambda2(w, t0),
        "condition_value": wp.convexity_condition(w, t0),
    }


# ----------------------------------------------------------------------
# Report output (12 significant digits everywhere)


def _round12(obj):
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _round12(obj.tolist())
    return obj


def write_json_report(report: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(_round12(report), fh, indent=2, sort_keys=False)
        fh.write("\n")


CSV_COLUMNS = ["scenario", "resolution", "lambda1", "lambda2", "bound", "margin", "order"]


def write_csv_summary(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            out = {}
            for col in CSV_COLUMNS:
                val = row.get(col, "")
                if isinstance(val, (float, np.floating)):
                    out[col] = f"{float(val):.12g}"
                elif val is None:
                    out[col] = ""
                else:
                    out[col] = val
            writer.writerow(out)
