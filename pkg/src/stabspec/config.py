"""Plain-text key=value scenario configuration.

Files hold one `key=value` pair per line; `#` starts a comment and blank
lines are skipped.  Values never contain whitespace (lists are
comma-separated), so the same `key=value` tokens can be passed on the
command line to override file entries.

Recognized keys (not all commands use all of them):

  shape          clifford-torus | flat-torus | geodesic-sphere | slice |
                 graph-over-slice | perturbed-torus
  r, rho, t0, amplitude, eps, wave, perturbation (e.g. Y2,0)
  warping        product | sphere | hyperbolic | euclidean | cosh
  warping_poly   comma-separated polynomial coefficients (low to high),
                 overrides `warping`
  warping_interval  comma pair, e.g. -1,1 (required with warping_poly)
  resolutions    comma list of square grid sizes, e.g. 32,64,128
  resolution     single square grid size (balance-bound)
  rs             comma list of flat-torus radii (sweep)
  amplitudes     comma list of graph amplitudes (sweep)
  count          number of eigenvalues (slice-spectrum)
  tol            balancing tolerance (balance-bound)
  seed           eigensolver seed
"""

from __future__ import annotations

from . import catalog, warping as wp
from .errors import ConfigError

__all__ = [
    "parse_kv_text",
    "load_config_file",
    "merge_overrides",
    "get_str",
    "get_float",
    "get_int",
    "get_float_list",
    "get_int_list",
    "warping_from_config",
    "shape_from_config",
    "resolutions_from_config",
]


def parse_kv_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {raw.strip()!r}")
        out[key] = value
    return out


def load_config_file(path) -> dict[str, str]:
    with open(path) as fh:
        return parse_kv_text(fh.read())


def merge_overrides(cfg: dict[str, str], pairs) -> dict[str, str]:
    merged = dict(cfg)
    for token in pairs:
        if "=" not in token:
            raise ConfigError(f"override {token!r} is not key=value")
        key, _, value = token.partition("=")
        if not key or not value:
            raise ConfigError(f"override {token!r} has an empty key or value")
        merged[key.strip()] = value.strip()
    return merged


def get_str(cfg, key, default=None) -> str:
    value = cfg.get(key, default)
    if value is None:
        raise ConfigError(f"missing required key {key!r}")
    return str(value)


def get_float(cfg, key, default=None) -> float:
    value = cfg.get(key)
    if value is None:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return float(default)
    try:
        return float(value)
    except ValueError as err:
        raise ConfigError(f"key {key!r} must be a number, got {value!r}") from err


def get_int(cfg, key, default=None) -> int:
    value = cfg.get(key)
    if value is None:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return int(default)
    try:
        return int(value)
    except ValueError as err:
        raise ConfigError(f"key {key!r} must be an integer, got {value!r}") from err


def _split_list(cfg, key, default):
    value = cfg.get(key)
    if value is None:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return list(default)
    return [tok for tok in str(value).split(",") if tok != ""]


def get_float_list(cfg, key, default=None) -> list[float]:
    toks = _split_list(cfg, key, default)
    try:
        return [float(t) for t in toks]
    except ValueError as err:
        raise ConfigError(f"key {key!r} must be a comma list of numbers") from err


def get_int_list(cfg, key, default=None) -> list[int]:
    toks = _split_list(cfg, key, default)
    try:
        return [int(t) for t in toks]
    except ValueError as err:
        raise ConfigError(f"key {key!r} must be a comma list of integers") from err


def warping_from_config(cfg) -> wp.WarpingFunction:
    if "warping_poly" in cfg:
        coeffs = get_float_list(cfg, "warping_poly")
        interval = get_float_list(cfg, "warping_interval")
        if len(interval) != 2:
            raise ConfigError("warping_interval must be a comma pair, e.g. -1,1")
        try:
            return wp.polynomial_warping(coeffs, (interval[0], interval[1]))
        except Exception as err:
            raise ConfigError(f"bad polynomial warping: {err}") from err
    name = get_str(cfg, "warping", "product")
    interval = None
    if "warping_interval" in cfg:
        vals = get_float_list(cfg, "warping_interval")
        if len(vals) != 2:
            raise ConfigError("warping_interval must be a comma pair, e.g. -1,1")
        interval = (vals[0], vals[1])
    try:
        return wp.builtin_warping(name, interval=interval)
    except Exception as err:
        raise ConfigError(f"unknown warping {name!r}: {err}") from err


def shape_from_config(cfg, resolution=(64, 64)) -> catalog.ShapeSpec:
    kind = get_str(cfg, "shape")
    try:
        if kind == "clifford-torus":
            return catalog.clifford_torus(resolution)
        if kind == "flat-torus":
            return catalog.flat_torus(get_float(cfg, "r"), resolution)
        if kind == "geodesic-sphere":
            return catalog.geodesic_sphere(get_float(cfg, "rho"), resolution)
        if kind == "slice":
            return catalog.slice_shape(
                warping_from_config(cfg), get_float(cfg, "t0", 0.0), resolution
            )
        if kind == "graph-over-slice":
            return catalog.graph_over_slice(
                warping_from_config(cfg),
                get_float(cfg, "t0", 0.0),
                get_str(cfg, "perturbation", "Y2,0"),
                get_float(cfg, "amplitude"),
                resolution,
            )
        if kind == "perturbed-torus":
            return catalog.perturbed_torus(
                get_float(cfg, "r"),
                get_float(cfg, "eps"),
                get_int(cfg, "wave", 3),
                resolution,
            )
    except ConfigError:
        raise
    except Exception as err:
        raise ConfigError(f"cannot build shape {kind!r}: {err}") from err
    raise ConfigError(
        f"unknown shape {kind!r}; expected clifford-torus, flat-torus, "
        "geodesic-sphere, slice, graph-over-slice, or perturbed-torus"
    )


def resolutions_from_config(cfg, default) -> list[int]:
    res = get_int_list(cfg, "resolutions", default)
    if not res:
        raise ConfigError("resolutions list is empty")
    if any(n < 8 for n in res):
        raise ConfigError("resolutions must be at least 8")
    if sorted(res) != res:
        raise ConfigError("resolutions must be in increasing order")
    return res
