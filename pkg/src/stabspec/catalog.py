"""Catalog of closed-form test surfaces with known stability spectra.

Every builder returns a ShapeSpec; `build` turns a spec into an
ImmersedSurface over an analytic (symbolic) chart, and
`exact_jacobi_spectrum` returns closed-form eigenvalues of the stability
operator -Laplacian - |sigma|^2 - Ric(normal, normal) for the kinds that
have them:

* flat tori (r cos u, r sin u, sqrt(1-r^2) cos v, sqrt(1-r^2) sin v):
  Fourier modes give m^2/r^2 + k^2/(1-r^2) - |sigma|^2(r) - 2, and
  |sigma|^2(r) + 2 simplifies to 1/(r^2 (1-r^2)).
* geodesic spheres of radius rho: l(l+1)/sin^2(rho) - 2 cot^2(rho) - 2
  with multiplicity 2l+1.
* slices {t0} x S^2 of a warped product: spherical-harmonic bands (see
  warping.slice_spectrum).

Rotationally perturbed tori and graphs over slices have no closed form;
they are exercised against inequalities only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import sympy as sp

from . import warping as wp
from .charts import PARAM_U, PARAM_V, SymbolicChart, real_sph_harm, unit_sphere_chart_exprs
from .errors import DomainError
from .grids import sphere_grid, torus_grid
from .surfaces import ImmersedSurface, Sphere3, WarpedProduct

__all__ = [
    "ShapeSpec",
    "clifford_torus",
    "flat_torus",
    "geodesic_sphere",
    "slice_shape",
    "graph_over_slice",
    "perturbed_torus",
    "registered_perturbations",
    "build",
    "exact_jacobi_spectrum",
]

MAX_PERTURBATION_DEGREE = 4


@dataclass
class ShapeSpec:
    """A catalog surface: construction kind, parameters, grid resolution."""

    kind: str
    resolution: tuple[int, int] = (64, 64)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        nu, nv = self.resolution
        if nu < 8 or nv < 8:
            raise DomainError("resolution must be at least 8 in each direction")

    @property
    def label(self) -> str:
        if not self.params:
            return self.kind
        shown = []
        for k, v in sorted(self.params.items()):
            if isinstance(v, wp.WarpingFunction):
                v = v.name
            elif callable(v):
                v = getattr(v, "__name__", "callable")
            shown.append(f"{k}={v}")
        return f"{self.kind}({', '.join(shown)})"


def clifford_torus(resolution=(64, 64)) -> ShapeSpec:
    return ShapeSpec("clifford-torus", tuple(resolution), {})


def flat_torus(r: float, resolution=(64, 64)) -> ShapeSpec:
    if not 0.0 < r < 1.0:
        raise DomainError(f"flat torus radius must satisfy 0 < r < 1, got {r}")
    return ShapeSpec("flat-torus", tuple(resolution), {"r": float(r)})


def geodesic_sphere(rho: float, resolution=(64, 64)) -> ShapeSpec:
    if not 0.0 < rho < sp.pi.evalf():
        raise DomainError(f"geodesic radius must satisfy 0 < rho < pi, got {rho}")
    return ShapeSpec("geodesic-sphere", tuple(resolution), {"rho": float(rho)})


def slice_shape(warping, t0: float, resolution=(64, 64)) -> ShapeSpec:
    w = _resolve_warping(warping)
    w.require_inside(t0)
    return ShapeSpec("slice", tuple(resolution), {"warping": w, "t0": float(t0)})


def graph_over_slice(warping, t0: float, perturbation, amplitude: float,
                     resolution=(64, 64)) -> ShapeSpec:
    w = _resolve_warping(warping)
    w.require_inside(t0)
    return ShapeSpec(
        "graph-over-slice",
        tuple(resolution),
        {"warping": w, "t0": float(t0), "perturbation": perturbation,
         "amplitude": float(amplitude)},
    )


def perturbed_torus(r: float, eps: float, wave: int = 3,
                    resolution=(64, 64)) -> ShapeSpec:
    """Rotationally symmetric torus with radius r + eps*cos(wave*v)."""
    if eps < 0:
        raise DomainError("perturbation size must be nonnegative")
    if not (0.0 < r - eps and r + eps < 1.0):
        raise DomainError("perturbed radius range must stay inside (0, 1)")
    if wave < 1 or int(wave) != wave:
        raise DomainError("wave number must be a positive integer")
    return ShapeSpec(
        "perturbed-torus", tuple(resolution),
        {"r": float(r), "eps": float(eps), "wave": int(wave)},
    )


def _resolve_warping(warping) -> wp.WarpingFunction:
    if isinstance(warping, wp.WarpingFunction):
        return warping
    return wp.builtin_warping(str(warping))


_PERT_KEY = re.compile(r"^Y(\d+),(-?\d+)$")


def _perturbation_expr(perturbation, theta, phi):
    """Resolve a perturbation spec to a sympy expression in (theta, phi)."""
    if perturbation is None:
        return sp.Integer(0)
    if isinstance(perturbation, str):
        m = _PERT_KEY.match(perturbation.strip())
        if not m:
            raise DomainError(
                f"unknown perturbation {perturbation!r}; use 'Yl,m' with l <= "
                f"{MAX_PERTURBATION_DEGREE}"
            )
        perturbation = (int(m.group(1)), int(m.group(2)))
    if isinstance(perturbation, tuple) and len(perturbation) == 2:
        l, m = int(perturbation[0]), int(perturbation[1])
        if not (0 <= l <= MAX_PERTURBATION_DEGREE and -l <= m <= l):
            raise DomainError(
                f"spherical-harmonic perturbation needs 0 <= l <= "
                f"{MAX_PERTURBATION_DEGREE} and |m| <= l, got ({l}, {m})"
            )
        return real_sph_harm(l, m, theta, phi)
    if callable(perturbation):
        expr = sp.sympify(perturbation(theta, phi))
        extra = expr.free_symbols - {theta, phi}
        if extra:
            raise DomainError(f"perturbation expression has stray symbols {extra}")
        return expr
    raise DomainError(f"cannot interpret perturbation {perturbation!r}")


def registered_perturbations() -> list[str]:
    keys = []
    for l in range(MAX_PERTURBATION_DEGREE + 1):
        for m in range(-l, l + 1):
            keys.append(f"Y{l},{m}")
    return keys


def build(spec: ShapeSpec) -> ImmersedSurface:
    """Construct the immersed surface for a catalog spec."""
    u, v = PARAM_U, PARAM_V
    nu, nv = spec.resolution
    kind = spec.kind
    p = spec.params

    if kind in ("clifford-torus", "flat-torus"):
        r = sp.Float(p["r"], 30) if kind == "flat-torus" else 1 / sp.sqrt(2)
        s = sp.sqrt(1 - r**2)
        exprs = (r * sp.cos(u), r * sp.sin(u), s * sp.cos(v), s * sp.sin(v))
        return ImmersedSurface(
            Sphere3(), SymbolicChart(exprs), torus_grid(nu, nv), name=spec.label
        )

    if kind == "perturbed-torus":
        rho = sp.Float(p["r"], 30) + sp.Float(p["eps"], 30) * sp.cos(p["wave"] * v)
        s = sp.sqrt(1 - rho**2)
        exprs = (rho * sp.cos(u), rho * sp.sin(u), s * sp.cos(v), s * sp.sin(v))
        return ImmersedSurface(
            Sphere3(), SymbolicChart(exprs), torus_grid(nu, nv), name=spec.label
        )

    if kind == "geodesic-sphere":
        rho = sp.Float(p["rho"], 30)
        om = unit_sphere_chart_exprs(u, v)
        exprs = tuple(sp.sin(rho) * c for c in om) + (sp.cos(rho),)
        return ImmersedSurface(
            Sphere3(), SymbolicChart(exprs), sphere_grid(nu, nv), name=spec.label
        )

    if kind in ("slice", "graph-over-slice"):
        w = p["warping"]
        om = unit_sphere_chart_exprs(u, v)
        t_expr = sp.Float(p["t0"], 30)
        if kind == "graph-over-slice":
            pert = _perturbation_expr(p.get("perturbation"), u, v)
            t_expr = t_expr + sp.Float(p["amplitude"], 30) * pert
        exprs = (t_expr,) + om
        surface = ImmersedSurface(
            WarpedProduct(w), SymbolicChart(exprs), sphere_grid(nu, nv),
            name=spec.label,
        )
        # Graphs must stay strictly inside the warping interval.
        w.require_inside(surface.bundle(2)["0"][:, 0])
        return surface

    raise DomainError(f"unknown shape kind {kind!r}")


def _flat_torus_eigenvalues(r: float, count: int):
    a = 1.0 / (r * r)
    b = 1.0 / (1.0 - r * r)
    q = a + b  # equals |sigma|^2 + 2 for the flat torus family
    half = 1
    while True:
        vals = sorted(
            a * m * m + b * k * k - q
            for m in range(-half, half + 1)
            for k in range(-half, half + 1)
        )
        # Any mode outside the box exceeds this, so values below it are
        # enumerated completely.
        boundary = min(a, b) * (half + 1) ** 2 - q
        if len(vals) >= count and vals[count - 1] < boundary:
            return vals[:count]
        half += 1


def exact_jacobi_spectrum(spec: ShapeSpec, count: int) -> list[float]:
    """Closed-form ascending stability eigenvalues, repeated by multiplicity."""
    if count < 1:
        raise DomainError("count must be positive")
    kind = spec.kind
    if kind in ("clifford-torus", "flat-torus"):
        r = spec.params["r"] if kind == "flat-torus" else float(1 / sp.sqrt(2))
        return _flat_torus_eigenvalues(float(r), count)
    if kind == "geodesic-sphere":
        rho = spec.params["rho"]
        sin2 = float(sp.sin(rho) ** 2)
        cot2 = float(sp.cos(rho) ** 2) / sin2
        vals: list[float] = []
        l = 0
        while len(vals) < count:
            lam = l * (l + 1) / sin2 - 2.0 * cot2 - 2.0
            vals.extend([lam] * (2 * l + 1))
            l += 1
        return vals[:count]
    if kind == "slice":
        return list(wp.slice_spectrum(spec.params["warping"], spec.params["t0"], count))
    raise DomainError(f"no closed-form spectrum for shape kind {kind!r}")
