"""Closed-form geometry of rotationally symmetric ambient spaces.

The ambient spaces handled here are products of a compact interval with a
round unit n-sphere, carrying the metric  dt^2 + h(t)^2 ds^2  for a smooth
positive profile h.  Every quantity below is an exact algebraic function of
the triple (h, h', h''); nothing is differentiated numerically.

Conventions:
  * the normal direction of a centered slice {t} x S^n is +d/dt;
  * mean curvature is the average (not the sum) of principal curvatures;
  * the stability operator of a two-sided hypersurface is
    L = -laplacian - |shape|^2 - Ric(normal, normal).

The profile combination  h''/h + (1 - h'^2)/h^2  ("convexity condition")
controls everything: it is positive exactly when the Ricci curvature,
evaluated on unit directions, is strictly minimized by d/dt, it vanishes
identically on the constant-curvature profiles (h = t, sin t, sinh t), and
n times it equals the second eigenvalue of the slice stability operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError

__all__ = [
    "WarpingFunction",
    "AmbientCurvature",
    "SliceData",
    "builtin_warping",
    "polynomial_warping",
    "trigonometric_warping",
    "BUILTIN_WARPINGS",
    "convexity_condition",
    "ambient_ricci",
    "ricci_direction",
    "slice_data",
    "slice_lambda2",
    "slice_eigenvalue_band",
    "slice_spectrum",
    "harmonic_multiplicity",
    "condition_strictness",
    "space_form_defect",
]


@dataclass(frozen=True)
class WarpingFunction:
    """Profile h > 0 on a compact interval, with its first two derivatives.

    h, dh, d2h must accept floats or numpy arrays.  dim_n is the dimension
    of the sphere factor (so the ambient has dimension dim_n + 1).
    """

    h: Callable
    dh: Callable
    d2h: Callable
    interval: tuple[float, float]
    dim_n: int = 2
    name: str = "custom"

    def __post_init__(self):
        lo, hi = self.interval
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise DomainError(f"interval must be a finite non-empty range, got {self.interval}")
        if int(self.dim_n) < 2:
            raise DomainError(f"sphere factor dimension must be >= 2, got {self.dim_n}")
        # Cheap positivity screen at a few sample points; full checks happen
        # wherever h is actually evaluated.
        ts = np.linspace(lo, hi, 7)
        hs = np.asarray(self.h(ts), dtype=float)
        if not np.all(hs > 0.0):
            raise DomainError(f"profile '{self.name}' is not positive on {self.interval}")

    def contains(self, t) -> bool:
        t = np.asarray(t, dtype=float)
        lo, hi = self.interval
        return bool(np.all((t >= lo) & (t <= hi)))

    def require_inside(self, t) -> None:
        if not self.contains(t):
            lo, hi = self.interval
            raise DomainError(
                f"t outside the domain [{lo}, {hi}] of warping '{self.name}'"
            )


@dataclass(frozen=True)
class AmbientCurvature:
    """Ricci data of dt^2 + h^2 ds^2 at a fixed t, on unit directions."""

    ricci_tt: float
    ricci_tangential: float
    scalar: float


@dataclass(frozen=True)
class SliceData:
    """Extrinsic data of the centered slice {t} x S^n, normal +d/dt.

    All principal curvatures equal h'/h, so mean_curv is h'/h and
    sigma_sq = n (h'/h)^2.  ricci_normal is Ric(d/dt, d/dt) = -n h''/h.
    """

    sigma_sq: float
    mean_curv: float
    ricci_normal: float


def _hs(w: WarpingFunction, t):
    """Evaluate (h, h', h'') with domain and positivity checks."""
    w.require_inside(t)
    t = np.asarray(t, dtype=float)
    h = np.asarray(w.h(t), dtype=float)
    if not np.all(h > 0.0):
        raise DomainError(f"profile '{w.name}' is non-positive at some requested t")
    return h, np.asarray(w.dh(t), dtype=float), np.asarray(w.d2h(t), dtype=float)


def _scalarize(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def convexity_condition(w: WarpingFunction, t):
    """h''/h + (1 - h'^2)/h^2 at t.  Accepts scalars or arrays.

    Positive values certify that d/dt strictly minimizes Ric on unit
    directions; zero identifies the constant-curvature profiles.
    """
    h, dh, d2h = _hs(w, t)
    return _scalarize(d2h / h + (1.0 - dh**2) / h**2)


def space_form_defect(w: WarpingFunction, t):
    """h h'' - h'^2 + 1; identically zero exactly for space-form profiles."""
    h, dh, d2h = _hs(w, t)
    return _scalarize(h * d2h - dh**2 + 1.0)


def ambient_ricci(w: WarpingFunction, t) -> AmbientCurvature:
    """Ricci curvature of the warped ambient at t, on unit directions.

    Ric(d/dt, d/dt)      = -n h''/h
    Ric(v, v), v tangent = -(h''/h - (n-1)(1 - h'^2)/h^2)
    scalar               = -n (2 h''/h - (n-1)(1 - h'^2)/h^2)

    Accepts scalar or array t (fields are then arrays of the same shape).
    """
    h, dh, d2h = _hs(w, t)
    n = w.dim_n
    a = d2h / h
    b = (1.0 - dh**2) / h**2
    return AmbientCurvature(
        ricci_tt=_scalarize(-n * a),
        ricci_tangential=_scalarize(-(a - (n - 1) * b)),
        scalar=_scalarize(-n * (2.0 * a - (n - 1) * b)),
    )


def ricci_direction(w: WarpingFunction, t, cos_angle):
    """Ric(v, v) for a unit direction v with <v, d/dt> = cos_angle.

    Interpolates the two distinguished values quadratically:
    c^2 Ric(dt,dt) + (1 - c^2) Ric(tangential).  Accepts arrays in both
    t and cos_angle (broadcast together).
    """
    c = np.asarray(cos_angle, dtype=float)
    if np.any(np.abs(c) > 1.0 + 1e-12):
        raise DomainError("cos_angle must lie in [-1, 1]")
    c = np.clip(c, -1.0, 1.0)
    h, dh, d2h = _hs(w, t)
    n = w.dim_n
    a = d2h / h
    b = (1.0 - dh**2) / h**2
    ricci_tt = -n * a
    ricci_tan = -(a - (n - 1) * b)
    return _scalarize(c**2 * ricci_tt + (1.0 - c**2) * ricci_tan)


def slice_data(w: WarpingFunction, t: float) -> SliceData:
    """Extrinsic invariants of the slice {t} x S^n with normal +d/dt."""
    h, dh, d2h = _hs(w, t)
    n = w.dim_n
    k = dh / h
    return SliceData(
        sigma_sq=float(n * k**2),
        mean_curv=float(k),
        ricci_normal=float(-n * d2h / h),
    )


def slice_lambda2(w: WarpingFunction, t):
    """Second eigenvalue of the slice stability operator: n * convexity.

    Equals the first-harmonic band of the explicit spectrum (k = 1 in
    slice_eigenvalue_band); the two code paths are kept separate so they
    can check each other.
    """
    n = w.dim_n
    return n * convexity_condition(w, t)


def slice_eigenvalue_band(w: WarpingFunction, t, k: int):
    """Eigenvalue of the slice stability operator on degree-k harmonics.

    The slice is a round n-sphere of radius h(t); restricting
    L = -laplacian - |shape|^2 - Ric(normal, normal) to degree-k spherical
    harmonics gives  k(k+n-1)/h^2 - n (h'/h)^2 + n h''/h.
    """
    if k < 0:
        raise DomainError("harmonic degree k must be >= 0")
    h, dh, d2h = _hs(w, t)
    n = w.dim_n
    return _scalarize(k * (k + n - 1) / h**2 - n * (dh / h) ** 2 + n * d2h / h)


def harmonic_multiplicity(k: int, n: int) -> int:
    """Dimension of degree-k spherical harmonics on S^n."""
    if k < 0 or n < 1:
        raise DomainError("need k >= 0 and n >= 1")
    if k == 0:
        return 1
    return math.comb(k + n, n) - math.comb(k + n - 2, n)


def slice_spectrum(w: WarpingFunction, t: float, count: int) -> np.ndarray:
    """First `count` eigenvalues of the slice operator, with multiplicity."""
    if count < 1:
        raise DomainError("count must be >= 1")
    out: list[float] = []
    k = 0
    while len(out) < count:
        lam = float(slice_eigenvalue_band(w, t, k))
        out.extend([lam] * harmonic_multiplicity(k, w.dim_n))
        k += 1
    return np.array(sorted(out)[:count])


def condition_strictness(w: WarpingFunction, t_range=None, samples: int = 512):
    """Scan the convexity condition over a t-range.

    Returns (min_value, argmin_t).  Strict positivity of min_value is the
    hypothesis under which the slice-averaged eigenvalue bounds apply.
    """
    lo, hi = t_range if t_range is not None else w.interval
    w.require_inside([lo, hi])
    ts = np.linspace(lo, hi, max(int(samples), 2))
    vals = np.asarray(convexity_condition(w, ts), dtype=float)
    i = int(np.argmin(vals))
    return float(vals[i]), float(ts[i])


# ----------------------------------------------------------------------
# Registry


def _const_like(c: float):
    def f(t):
        t = np.asarray(t, dtype=float)
        return np.full_like(t, c) if t.ndim else float(c)

    return f


_BUILTIN_DEFS = {
    # name: (h, h', h'', default interval)
    "product": (_const_like(1.0), _const_like(0.0), _const_like(0.0), (-2.0, 2.0)),
    "sphere": (np.sin, np.cos, lambda t: -np.sin(t), (0.15, math.pi - 0.15)),
    "hyperbolic": (np.sinh, np.cosh, np.sinh, (0.15, 4.0)),
    "euclidean": (
        lambda t: np.asarray(t, dtype=float),
        _const_like(1.0),
        _const_like(0.0),
        (0.15, 4.0),
    ),
    "cosh": (np.cosh, np.sinh, np.cosh, (-2.0, 2.0)),
}

BUILTIN_WARPINGS = tuple(_BUILTIN_DEFS)


def builtin_warping(name: str, interval=None, dim_n: int = 2) -> WarpingFunction:
    """Look up a named profile: product, sphere, hyperbolic, euclidean, cosh."""
    try:
        h, dh, d2h, default_interval = _BUILTIN_DEFS[name]
    except KeyError:
        raise DomainError(
            f"unknown warping '{name}'; known: {', '.join(BUILTIN_WARPINGS)}"
        ) from None
    return WarpingFunction(
        h=h,
        dh=dh,
        d2h=d2h,
        interval=tuple(interval) if interval is not None else default_interval,
        dim_n=dim_n,
        name=name,
    )


def polynomial_warping(coeffs, interval, dim_n: int = 2) -> WarpingFunction:
    """Profile h(t) = sum_k coeffs[k] t^k (coefficients low order first)."""
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise DomainError("polynomial coefficients must be a non-empty 1-d sequence")
    p = np.polynomial.Polynomial(c)
    return WarpingFunction(
        h=p, dh=p.deriv(1), d2h=p.deriv(2), interval=tuple(interval), dim_n=dim_n,
        name=f"poly[{','.join(f'{x:g}' for x in c)}]",
    )


def trigonometric_warping(a0, cos_coeffs=(), sin_coeffs=(), interval=(-math.pi, math.pi),
                          dim_n: int = 2) -> WarpingFunction:
    """Profile h(t) = a0 + sum_k a_k cos(k t) + sum_k b_k sin(k t), k >= 1."""
    ac = np.asarray(cos_coeffs, dtype=float)
    bs = np.asarray(sin_coeffs, dtype=float)
    ks_a = np.arange(1, ac.size + 1, dtype=float)
    ks_b = np.arange(1, bs.size + 1, dtype=float)

    def h(t):
        t = np.asarray(t, dtype=float)[..., None]
        out = a0 + (ac * np.cos(ks_a * t)).sum(-1) + (bs * np.sin(ks_b * t)).sum(-1)
        return out if out.ndim else float(out)

    def dh(t):
        t = np.asarray(t, dtype=float)[..., None]
        out = (-ac * ks_a * np.sin(ks_a * t)).sum(-1) + (bs * ks_b * np.cos(ks_b * t)).sum(-1)
        return out if out.ndim else float(out)

    def d2h(t):
        t = np.asarray(t, dtype=float)[..., None]
        out = (-ac * ks_a**2 * np.cos(ks_a * t)).sum(-1) + (-bs * ks_b**2 * np.sin(ks_b * t)).sum(-1)
        return out if out.ndim else float(out)

    return WarpingFunction(
        h=h, dh=dh, d2h=d2h, interval=tuple(interval), dim_n=dim_n,
        name=f"trig[a0={a0:g}]",
    )
