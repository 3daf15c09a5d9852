"""Conformal dilations of the 3-sphere and the balancing construction.

A dilation with parameter `a` (|a| < 1) is built by stereographic
conjugation: project from the antipode of p = a/|a| onto the equatorial
hyperplane orthogonal to p, scale by (1 - |a|)/(1 + |a|), and project
back.  a = 0 is the identity, and negating `a` inverts the map, because
switching the projection pole inverts the Euclidean scale.

The balancing routine moves `a` by a damped fixed-point iteration until
the weighted center of mass of the transformed surface vanishes.  With
the resulting map, the four ambient coordinates of the transformed
immersion are (numerically) orthogonal to the chosen weight function, so
their aggregate Rayleigh quotient upper-bounds the second eigenvalue of
the original pencil — the certified bound returned here.

Image surfaces are built by composing the dilation with the chart
symbolically, so all image geometry flows through the one audited
geometry pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .assembly import OperatorPencil
from .charts import SymbolicChart
from .eigen import Spectrum
from .errors import DomainError, NonConvergenceError, UnsupportedAmbientError
from .surfaces import (
    GeometryFields,
    ImmersedSurface,
    area,
    compute_geometry,
)

__all__ = [
    "MobiusParam",
    "mobius_apply",
    "mobius_image_surface",
    "hersch_balance",
    "balanced_rayleigh_bound",
    "balanced_bound_report",
    "BalancedBoundReport",
    "conformal_willmore_invariant",
    "dirichlet_energy_check",
    "willmore_type_inequality_check",
]

BOUNDARY_MARGIN = 1e-9
BALANCE_CAP = 1.0 - 1e-6
BALANCE_DAMPING = 0.5
BALANCE_MAX_ITER = 500


@dataclass(frozen=True)
class MobiusParam:
    """Parameter of a conformal dilation: a point strictly inside the ball."""

    a: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.a, dtype=float).reshape(4)
        object.__setattr__(self, "a", arr)
        if not np.all(np.isfinite(arr)):
            raise DomainError("dilation parameter must be finite")
        if np.linalg.norm(arr) >= 1.0 - BOUNDARY_MARGIN:
            raise DomainError(
                f"dilation parameter norm {np.linalg.norm(arr):.12g} too close to 1"
            )

    @classmethod
    def zero(cls) -> "MobiusParam":
        return cls(np.zeros(4))

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.a))

    def inverse(self) -> "MobiusParam":
        return MobiusParam(-self.a)


def _as_rows(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    rows = arr.reshape(1, 4) if single else arr
    if rows.ndim != 2 or rows.shape[1] != 4:
        raise DomainError("points must be 4-vectors")
    return rows, single


def mobius_apply(param: MobiusParam, x) -> np.ndarray:
    """Apply the conformal dilation to unit 4-vectors (rows)."""
    rows, single = _as_rows(x)
    norms = np.linalg.norm(rows, axis=1)
    if float(np.max(np.abs(norms - 1.0))) > 1e-8:
        raise DomainError("dilation input points must lie on the unit sphere")
    mag = param.magnitude
    if mag < 1e-15:
        out = rows.copy()
        return out[0] if single else out

    p = param.a / mag
    scale = (1.0 - mag) / (1.0 + mag)

    # Stereographic projection from -p onto the hyperplane orthogonal to p.
    dot = rows @ p
    denom = 1.0 + dot
    safe = denom > 1e-13
    y = np.zeros_like(rows)
    y[safe] = (rows[safe] - dot[safe, None] * p[None, :]) / denom[safe, None]

    y *= scale
    y2 = np.einsum("ij,ij->i", y, y)
    out = (2.0 * y + (1.0 - y2)[:, None] * p[None, :]) / (1.0 + y2)[:, None]
    # The projection pole is a fixed point of the conjugated scaling.
    out[~safe] = -p
    out /= np.linalg.norm(out, axis=1)[:, None]
    return out[0] if single else out


def _composed_chart(chart: SymbolicChart, param: MobiusParam) -> SymbolicChart:
    mag = param.magnitude
    p = [sp.Float(float(c), 17) for c in param.a / mag]
    s = sp.Float((1.0 - mag) / (1.0 + mag), 17)
    e = chart.exprs
    dot = sum(ei * pi for ei, pi in zip(e, p))
    y = [(ei - dot * pi) / (1 + dot) for ei, pi in zip(e, p)]
    y = [s * yi for yi in y]
    y2 = sum(yi * yi for yi in y)
    out = tuple((2 * yi + (1 - y2) * pi) / (1 + y2) for yi, pi in zip(y, p))
    return SymbolicChart(out)


def mobius_image_surface(s: ImmersedSurface, param: MobiusParam) -> ImmersedSurface:
    """The surface re-charted through the conformal dilation."""
    if not s.is_sphere3:
        raise UnsupportedAmbientError("conformal dilations act on the 3-sphere")
    if param.magnitude < 1e-15:
        return s
    if not isinstance(s.chart, SymbolicChart):
        raise DomainError("conformal image surfaces need an analytic chart")
    return ImmersedSurface(
        s.ambient,
        _composed_chart(s.chart, param),
        s.grid,
        topology_hint=s.topology_hint,
        name=f"{s.name} | dilation(|a|={param.magnitude:.4g})",
    )


def hersch_balance(
    s: ImmersedSurface,
    f: GeometryFields,
    f1: np.ndarray,
    tol: float = 1e-9,
    start: np.ndarray | None = None,
) -> MobiusParam:
    """Dilation parameter nulling the f1-weighted center of mass.

    Damped fixed-point iteration: the weighted mean c of the transformed
    node positions is the balancing residual, and the step a <- a - 0.5 c
    has exactly the balanced configurations as fixed points.  The
    residual is measured relative to the total weight, matching
    ||integral of f1 * (transformed position)|| <= tol * integral of f1.
    """
    if not s.is_sphere3:
        raise UnsupportedAmbientError("balancing acts on surfaces in the 3-sphere")
    f1 = np.asarray(f1, dtype=float).ravel()
    if f1.shape != (s.node_count,):
        raise DomainError("weight vector length does not match the surface")
    peak = float(np.max(np.abs(f1))) if f1.size else 0.0
    if peak == 0.0:
        raise DomainError("weight function is identically zero")
    if float(np.min(f1)) < -1e-8 * peak:
        raise DomainError("weight function must be nonnegative")
    weights = np.maximum(f1, 0.0) * f.area_element
    total = float(np.sum(weights))
    if total <= 0.0:
        raise DomainError("weight function has zero total mass")
    weights = weights / total

    coords = s.bundle(2)["0"]
    a = np.zeros(4) if start is None else np.asarray(start, dtype=float).reshape(4)
    residual = np.inf
    for _ in range(BALANCE_MAX_ITER):
        center = weights @ mobius_apply(MobiusParam(a), coords)
        residual = float(np.linalg.norm(center))
        if residual <= tol:
            return MobiusParam(a)
        a = a - BALANCE_DAMPING * center
        nrm = float(np.linalg.norm(a))
        if nrm > BALANCE_CAP:
            a *= BALANCE_CAP / nrm
    raise NonConvergenceError(
        f"balancing iteration did not reach residual {tol:.3e} in "
        f"{BALANCE_MAX_ITER} steps (final residual {residual:.3e}); the "
        "weighted measure may be concentrating near a point",
        residuals=[residual],
    )


def _aggregate_quotient(pencil: OperatorPencil, psi: np.ndarray) -> float:
    num = float(np.einsum("ik,ik->", psi, pencil.stiffness_minus_potential @ psi))
    den = float(np.einsum("ik,ik->", psi, pencil.mass @ psi))
    return num / den


def _oriented_weight(spectrum: Spectrum) -> np.ndarray:
    f1 = spectrum.eigenvectors[:, 0].copy()
    if float(np.sum(f1)) < 0.0:
        f1 = -f1
    return f1


@dataclass(frozen=True)
class BalancedBoundReport:
    """All balancing attempts plus the best certified bound."""

    bound: float
    param: MobiusParam
    balance_residual: float
    attempts: list = field(default_factory=list)


def balanced_rayleigh_bound(
    s: ImmersedSurface,
    f: GeometryFields,
    pencil: OperatorPencil,
    spectrum: Spectrum,
    tol: float = 1e-9,
) -> float:
    """Upper bound for the second pencil eigenvalue from balanced coordinates."""
    return balanced_bound_report(s, f, pencil, spectrum, tol=tol).bound


def balanced_bound_report(
    s: ImmersedSurface,
    f: GeometryFields,
    pencil: OperatorPencil,
    spectrum: Spectrum,
    tol: float = 1e-9,
    starts: list | None = None,
) -> BalancedBoundReport:
    """Balance (possibly from several starts) and evaluate the bound.

    Convergence may land on different balanced points from different
    starts; every attempt is recorded and the smallest (tightest) bound
    is reported.  No uniqueness is assumed.
    """
    if not s.is_sphere3:
        raise UnsupportedAmbientError("the balanced bound applies in the 3-sphere")
    f1 = _oriented_weight(spectrum)
    start_list = [None] if starts is None else list(starts)
    attempts = []
    failures: list[Exception] = []
    for start in start_list:
        try:
            m = hersch_balance(s, f, f1, tol=tol, start=start)
        except NonConvergenceError as err:
            failures.append(err)
            continue
        image = mobius_image_surface(s, m)
        psi = image.bundle(2)["0"]
        center = (np.maximum(f1, 0.0) * f.area_element) @ psi
        residual = float(np.linalg.norm(center) / np.sum(np.maximum(f1, 0.0) * f.area_element))
        bound = _aggregate_quotient(pencil, psi)
        attempts.append(
            {"start": None if start is None else list(map(float, start)),
             "param": m, "residual": residual, "bound": bound}
        )
    if not attempts:
        raise failures[0]
    best = min(attempts, key=lambda rec: rec["bound"])
    return BalancedBoundReport(
        bound=float(best["bound"]),
        param=best["param"],
        balance_residual=float(best["residual"]),
        attempts=attempts,
    )


def conformal_willmore_invariant(s: ImmersedSurface, param: MobiusParam) -> float:
    """Integral of |sigma|^2 - 2 H^2 over the transformed surface.

    Invariant under the conformal group of the 3-sphere up to
    discretization error.
    """
    image = mobius_image_surface(s, param)
    g = compute_geometry(image, want_gauss=False)
    return float(np.sum((g.sigma_sq - 2.0 * g.mean_curv**2) * g.area_element))


def dirichlet_energy_check(s: ImmersedSurface, param: MobiusParam) -> tuple[float, float]:
    """(coordinate Dirichlet energy, twice the image area) — independently.

    The energy integrates the original metric's gradient of the
    transformed coordinates over the original measure; the comparison
    value is twice the area of the image surface.  For a conformal map
    of a two-dimensional immersion the two agree.
    """
    if not s.is_sphere3:
        raise UnsupportedAmbientError("the energy identity applies in the 3-sphere")
    base = compute_geometry(s, want_gauss=False)
    image = mobius_image_surface(s, param)
    b = image.bundle(2)
    psi_u, psi_v = b["u"], b["v"]
    ginv = base.metric_inv
    integrand = (
        ginv[:, 0, 0] * np.einsum("ij,ij->i", psi_u, psi_u)
        + 2.0 * ginv[:, 0, 1] * np.einsum("ij,ij->i", psi_u, psi_v)
        + ginv[:, 1, 1] * np.einsum("ij,ij->i", psi_v, psi_v)
    )
    energy = float(np.sum(integrand * base.area_element))
    image_fields = compute_geometry(image, want_gauss=False)
    return energy, 2.0 * area(image, image_fields)


def willmore_type_inequality_check(s: ImmersedSurface, param: MobiusParam) -> tuple[float, float]:
    """(integral of H^2 + 1 over the image, image area); first >= second."""
    if not s.is_sphere3:
        raise UnsupportedAmbientError("the area comparison applies in the 3-sphere")
    image = mobius_image_surface(s, param)
    g = compute_geometry(image, want_gauss=False)
    lhs = float(np.sum((g.mean_curv**2 + 1.0) * g.area_element))
    return lhs, float(np.sum(g.area_element))
