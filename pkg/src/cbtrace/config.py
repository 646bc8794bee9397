"""Instance configuration files and deterministic report emission.

A configuration is a JSON object::

    {
      "weights": [[1, 0], [0, 1], [1, 1]],
      "flavors": ["0", {"re": "0", "im": "1/2"}, "0"],
      "zeta": ["1/3", "1/5"],
      "rho_offset": [1, 0],              optional
      "degree": 8, "lambda_radius": 2,   optional solver parameters
      "tol": 1e-10, "seed": 0,
      "weight": {"numerator": [...], "zeta": [...]}   optional
    }

Rationals are ``"p/q"`` strings (plain integers are accepted too).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .algebra import CoulombData
from .scalars import GaussianRational, format_rational, parse_rational

__all__ = ["ConfigError", "InstanceConfig", "load_config", "parse_config", "emit_config", "dumps_report", "emit_report"]

DEFAULTS = {"degree": 8, "lambda_radius": 2, "tol": 1e-10, "seed": 0}
_KNOWN = {"weights", "flavors", "zeta", "rho_offset", "weight", "normalize", *DEFAULTS}


class ConfigError(ValueError):
    """Validation failure; the message starts with the offending field path."""

    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


@dataclass
class InstanceConfig:
    """Validated instance with solver parameters.

    ``weights``, ``flavors`` and ``zeta`` are the raw values from the file;
    ``data`` holds the normalized algebra data and ``log`` the
    normalization steps applied.
    """

    weights: list
    flavors: list
    zeta: list
    rho_offset: list | None = None
    degree: int = DEFAULTS["degree"]
    lambda_radius: int = DEFAULTS["lambda_radius"]
    tol: float = DEFAULTS["tol"]
    seed: int = DEFAULTS["seed"]
    weight: dict | None = None
    normalize: bool = True
    data: CoulombData | None = field(default=None, compare=False, repr=False)
    log: list = field(default_factory=list, compare=False)


def _rational(value, path):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ConfigError(path, f"expected a rational 'p/q', got {value!r}")
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(path, str(exc)) from None


def _flavor(value, path) -> GaussianRational:
    if isinstance(value, dict):
        extra = set(value) - {"re", "im"}
        if extra:
            raise ConfigError(path, f"unknown keys {sorted(extra)}")
        return GaussianRational(_rational(value.get("re", "0"), path + ".re"), _rational(value.get("im", "0"), path + ".im"))
    return GaussianRational(_rational(value, path))


def _int(value, path, lo=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(path, f"must be >= {lo}")
    return value


def parse_config(obj) -> InstanceConfig:
    """Validate a decoded JSON object.

    Raises
    ------
    ConfigError
        With the path of the offending field.
    """
    if not isinstance(obj, dict):
        raise ConfigError("$", "configuration must be a JSON object")
    unknown = set(obj) - _KNOWN
    if unknown:
        raise ConfigError("$", f"unknown fields {sorted(unknown)}")
    for key in ("weights", "zeta"):
        if key not in obj:
            raise ConfigError(key, "missing required field")
    ws = obj["weights"]
    if not isinstance(ws, list) or not ws:
        raise ConfigError("weights", "expected a non-empty list of integer vectors")
    d = None
    weights = []
    for i, w in enumerate(ws):
        if not isinstance(w, list) or not w:
            raise ConfigError(f"weights[{i}]", "expected a non-empty integer list")
        vec = [_int(x, f"weights[{i}][{j}]") for j, x in enumerate(w)]
        if d is None:
            d = len(vec)
        elif len(vec) != d:
            raise ConfigError(f"weights[{i}]", f"length {len(vec)} differs from rank {d}")
        weights.append(vec)
    zeta_raw = obj["zeta"]
    if not isinstance(zeta_raw, list) or len(zeta_raw) != d:
        raise ConfigError("zeta", f"expected a list of {d} rationals")
    zeta = [_rational(z, f"zeta[{k}]") for k in range(d) for z in [zeta_raw[k]]]
    fl_raw = obj.get("flavors", ["0"] * len(weights))
    if not isinstance(fl_raw, list) or len(fl_raw) != len(weights):
        raise ConfigError("flavors", f"expected a list of {len(weights)} flavors")
    flavors = [_flavor(b, f"flavors[{i}]") for i, b in enumerate(fl_raw)]
    rho_offset = obj.get("rho_offset")
    if rho_offset is not None:
        if not isinstance(rho_offset, list) or len(rho_offset) != d:
            raise ConfigError("rho_offset", f"expected a list of {d} integers")
        rho_offset = [_int(x, f"rho_offset[{k}]") for k, x in enumerate(rho_offset)]
    degree = _int(obj.get("degree", DEFAULTS["degree"]), "degree", 0)
    radius = _int(obj.get("lambda_radius", DEFAULTS["lambda_radius"]), "lambda_radius", 1)
    seed = _int(obj.get("seed", DEFAULTS["seed"]), "seed", 0)
    tol = obj.get("tol", DEFAULTS["tol"])
    if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not (0 < tol < 1) or not math.isfinite(tol):
        raise ConfigError("tol", f"expected a float in (0, 1), got {tol!r}")
    normalize = obj.get("normalize", True)
    if not isinstance(normalize, bool):
        raise ConfigError("normalize", "expected true or false")
    weight = obj.get("weight")
    if weight is not None:
        if not isinstance(weight, dict) or set(weight) - {"numerator", "zeta"}:
            raise ConfigError("weight", "expected an object with 'numerator' and optional 'zeta'")
        for i, t in enumerate(weight.get("numerator", [])):
            path = f"weight.numerator[{i}]"
            if not isinstance(t, dict) or "exp" not in t:
                raise ConfigError(path, "expected an object with 'exp', 're', 'im'")
            if not isinstance(t["exp"], list) or len(t["exp"]) != d:
                raise ConfigError(path + ".exp", f"expected {d} integers")
            for j, e in enumerate(t["exp"]):
                _int(e, f"{path}.exp[{j}]")
            _flavor({k: t[k] for k in ("re", "im") if k in t}, path)
        for k, z in enumerate(weight.get("zeta", [])):
            _rational(z, f"weight.zeta[{k}]")
    try:
        data = CoulombData.build(weights, flavors, zeta, rho_offset, normalize=normalize)
    except ValueError as exc:
        raise ConfigError("weights", str(exc)) from None
    return InstanceConfig(
        weights=weights,
        flavors=flavors,
        zeta=zeta,
        rho_offset=rho_offset,
        degree=degree,
        lambda_radius=radius,
        tol=float(tol),
        seed=seed,
        weight=weight,
        normalize=normalize,
        data=data,
        log=list(data.log),
    )


def load_config(path) -> InstanceConfig:
    """Read and validate a configuration file.

    Raises
    ------
    ConfigError
        On malformed JSON (path ``$``) or invalid fields.
    """
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from None
    return parse_config(obj)


def _flavor_json(b: GaussianRational):
    if b.im == 0:
        return format_rational(b.re)
    return {"re": format_rational(b.re), "im": format_rational(b.im)}


def emit_config(cfg: InstanceConfig) -> dict:
    """JSON object that :func:`parse_config` maps back to ``cfg``."""
    out = {
        "weights": [list(w) for w in cfg.weights],
        "flavors": [_flavor_json(b) for b in cfg.flavors],
        "zeta": [format_rational(z) for z in cfg.zeta],
        "degree": cfg.degree,
        "lambda_radius": cfg.lambda_radius,
        "tol": cfg.tol,
        "seed": cfg.seed,
        "normalize": cfg.normalize,
    }
    if cfg.rho_offset is not None:
        out["rho_offset"] = list(cfg.rho_offset)
    if cfg.weight is not None:
        out["weight"] = cfg.weight
    return out


# reports -----------------------------------------------------------------------------------


def _canon(x):
    """Round floats to 12 significant digits; complex becomes ``{"re","im"}``."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            return str(x)
        v = float(f"{x:.12g}")
        return 0.0 if v == 0 else v
    if isinstance(x, complex):
        return {"re": _canon(x.real), "im": _canon(x.imag)}
    if isinstance(x, dict):
        return {str(k): _canon(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_canon(v) for v in x]
    if hasattr(x, "tolist"):
        return _canon(x.tolist())
    if hasattr(x, "to_json"):
        return _canon(x.to_json())
    if type(x).__name__ == "mpq":
        return format_rational(x)
    if isinstance(x, GaussianRational):
        return {"re": format_rational(x.re), "im": format_rational(x.im)}
    return str(x)


def dumps_report(report: dict, fmt: str = "json") -> str:
    """Serialize a report deterministically."""
    if fmt == "json":
        return json.dumps(_canon(report), sort_keys=True, indent=2) + "\n"
    if fmt == "text":
        return _text(_canon(report))
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(report: dict, fmt: str = "json", path=None) -> str:
    """Write a report to ``path`` (or return it when ``path`` is None)."""
    s = dumps_report(report, fmt)
    if path is not None:
        Path(path).write_text(s)
    return s


def _text(rep: dict) -> str:
    lines = [f"command: {rep.get('command', '?')}"]
    if "blocks" in rep:
        lines.append(f"{'lambda':>12}  {'min eigenvalue':>16}  {'hermitian defect':>16}")
        for b in rep["blocks"]:
            lam = ",".join(str(x) for x in b["lambda"])
            lines.append(f"{lam:>12}  {b['min_eig']:>16.6e}  {b['hermitian_defect']:>16.3e}")
    for key in sorted(rep):
        if key in ("blocks", "command"):
            continue
        val = rep[key]
        if isinstance(val, (dict, list)):
            val = json.dumps(val, sort_keys=True)
            if len(val) > 200:
                val = val[:197] + "..."
        lines.append(f"{key}: {val}")
    return "\n".join(lines) + "\n"
