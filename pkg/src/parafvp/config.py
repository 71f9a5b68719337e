"""Scenario configuration: validation and construction of library objects.

A config is a JSON document. ``validate`` returns a list of findings, each
addressed by its field path; nothing is silently repaired.
"""
import hashlib
import json
import math

import numpy as np

from .boundary import BoundarySignal
from .eigenbasis import SpectralVector, interval_basis, rectangle_basis
from .forward import ModalSignal
from .semigroup import LOG_CAP, TAIL_TOL, propagate

SCENARIOS = ("forward", "backward", "steer", "boundary", "diagnostics", "matrix")
TOP_KEYS = {"scenario", "domain", "time", "data", "thresholds", "seed", "outputs",
            "diagnostics", "matrix"}
VECTOR_PRESETS = ("zero", "mode", "propagated_mode", "random")
SIGNAL_PRESETS = ("zero", "constant", "random")
# which data fields each scenario reads
DATA_FIELDS = {
    "forward": {"u0": "vector", "f": "signal", "g": "boundary"},
    "backward": {"u_T": "vector", "f": "signal", "g": "boundary"},
    "steer": {"v": "vector"},
    "boundary": {"u0": "vector", "f": "signal", "g": "boundary"},
    "diagnostics": {},
    "matrix": {"u0": "list"},
}


def load(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(blob.encode("ascii")).hexdigest()


def parse_length(x):
    """A positive length, or the strings "pi" / "<number>*pi"."""
    if isinstance(x, str):
        s = x.replace(" ", "")
        if s == "pi":
            return math.pi
        if s.endswith("*pi"):
            return float(s[:-3]) * math.pi
        raise ValueError(f"cannot read length {x!r}")
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValueError(f"cannot read length {x!r}")
    return float(x)


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


class _Findings(list):
    def add(self, path, msg):
        self.append(f"{path}: {msg}")


def _check_domain(cfg, out):
    dom = cfg.get("domain")
    if not isinstance(dom, dict):
        out.add("domain", "missing or not an object")
        return None
    kind = dom.get("kind", "interval")
    if kind not in ("interval", "rectangle"):
        out.add("domain.kind", f"unknown domain kind {kind!r}")
        return None
    lengths = dom.get("lengths")
    want = 1 if kind == "interval" else 2
    ok = isinstance(lengths, list) and len(lengths) == want
    if ok:
        for i, x in enumerate(lengths):
            try:
                if not parse_length(x) > 0:
                    out.add(f"domain.lengths[{i}]", "must be positive")
                    ok = False
            except ValueError as err:
                out.add(f"domain.lengths[{i}]", str(err))
                ok = False
    else:
        out.add("domain.lengths", f"expected a list of {want} length(s)")
    n, q = dom.get("n_modes"), dom.get("n_quad")
    if not (_is_int(n) and n >= 1):
        out.add("domain.n_modes", "must be a positive integer")
        ok = False
    if not (_is_int(q) and q >= 1):
        out.add("domain.n_quad", "must be a positive integer")
        ok = False
    elif _is_int(n) and q < 4 * n:
        out.add("domain.n_quad", f"quadrature underresolved (n_quad={q} < 4*n_modes={4 * n})")
    if not ok:
        return None
    return kind, n if kind == "interval" else n * n


def _check_time(cfg, out):
    tm = cfg.get("time")
    if not isinstance(tm, dict):
        out.add("time", "missing or not an object")
        return None
    T = tm.get("T")
    if not _is_num(T):
        out.add("time.T", "must be a number")
        T = None
    elif T <= 0:
        out.add("time.T", f"must be positive (got {T})")
        T = None
    M = tm.get("M", 16)
    if not (_is_int(M) and M >= 1):
        out.add("time.M", "must be a positive integer")
        M = None
    if "T0" in tm:
        T0 = tm["T0"]
        if not (_is_num(T0) and T0 >= 0 and (T is None or T0 < T)):
            out.add("time.T0", "must lie in [0, T)")
    grid = tm.get("out_grid", 11)
    if _is_int(grid):
        if grid < 2:
            out.add("time.out_grid", "needs at least 2 points")
    elif isinstance(grid, list) and all(_is_num(t) for t in grid) and grid:
        if T is not None and any(t < 0 or t > T for t in grid):
            out.add("time.out_grid", "points must lie in [0, T]")
    else:
        out.add("time.out_grid", "expected a point count or a list of times")
    return T, M


def _check_vector(path, spec, n, out):
    if isinstance(spec, list):
        spec = {"coeffs": spec}
    if not isinstance(spec, dict):
        out.add(path, "expected a preset object or a coefficient list")
        return
    if "coeffs" in spec:
        for key in ("coeffs", "imag"):
            c = spec.get(key)
            if c is None:
                continue
            if not (isinstance(c, list) and all(_is_num(x) for x in c)):
                out.add(f"{path}.{key}", "expected a list of numbers")
            elif n is not None and len(c) != n:
                out.add(f"{path}.{key}", f"expected {n} coefficients, got {len(c)}")
        return
    preset = spec.get("preset")
    if preset not in VECTOR_PRESETS:
        out.add(f"{path}.preset", f"unknown preset {preset!r}")
        return
    if preset in ("mode", "propagated_mode"):
        k = spec.get("mode")
        if not (_is_int(k) and k >= 1 and (n is None or k <= n)):
            out.add(f"{path}.mode", f"must be a mode index in [1, {n}]")
    if preset == "propagated_mode" and not (_is_num(spec.get("t", 0.0)) and spec.get("t", 0.0) >= 0):
        out.add(f"{path}.t", "must be a nonnegative number")
    for key in ("scale", "decay"):
        if key in spec and not _is_num(spec[key]):
            out.add(f"{path}.{key}", "must be a number")


def _check_signal(path, spec, n, out):
    if not isinstance(spec, dict):
        out.add(path, "expected a preset object or {'values': ...}")
        return
    if "values" in spec:
        v = spec["values"]
        ok = isinstance(v, list) and all(isinstance(r, list) and all(_is_num(x) for x in r)
                                         for r in v)
        if not ok:
            out.add(f"{path}.values", "expected a list of rows of numbers")
        elif n is not None and (len(v) != n or len({len(r) for r in v}) != 1 or len(v[0]) < 2):
            out.add(f"{path}.values", f"expected {n} rows of equal length >= 2")
        return
    preset = spec.get("preset")
    if preset not in SIGNAL_PRESETS:
        out.add(f"{path}.preset", f"unknown preset {preset!r}")
        return
    if preset == "constant":
        _check_vector(f"{path}.coeffs", spec.get("coeffs", {}), n, out)


def _check_boundary(path, spec, kind, out):
    if not isinstance(spec, dict):
        out.add(path, "expected {'left': ..., 'right': ...}")
        return
    if kind == "rectangle":
        out.add(path, "boundary data are only supported on the interval")
        return
    for side in ("left", "right"):
        v = spec.get(side)
        if _is_num(v):
            continue
        if not (isinstance(v, list) and len(v) >= 2 and all(_is_num(x) for x in v)):
            out.add(f"{path}.{side}", "expected a number or a list of >= 2 numbers")
    l, r = spec.get("left"), spec.get("right")
    if isinstance(l, list) and isinstance(r, list) and len(l) != len(r):
        out.add(path, "left and right must have the same length")


def _check_matrix(cfg, out):
    m = cfg.get("matrix")
    if not isinstance(m, dict):
        out.add("matrix", "missing or not an object")
        return
    if m.get("preset") == "counterexample":
        delta = m.get("delta", 0.5)
        if not (_is_num(delta) and 0 < delta <= 0.5):
            out.add("matrix.delta", "must lie in (0, 1/2]")
        if not (_is_num(m.get("lam", 1.0)) and m.get("lam", 1.0) > 0):
            out.add("matrix.lam", "must be positive")
        return
    re = m.get("real")
    if not (isinstance(re, list) and re and all(isinstance(r, list) and len(r) == len(re)
                                                 and all(_is_num(x) for x in r) for r in re)):
        out.add("matrix.real", "expected a square list of rows")
        return
    im = m.get("imag")
    if im is not None and not (isinstance(im, list) and len(im) == len(re)
                               and all(isinstance(r, list) and len(r) == len(re)
                                       and all(_is_num(x) for x in r) for r in im)):
        out.add("matrix.imag", "must match the shape of matrix.real")


def validate(cfg):
    """All findings for ``cfg``; an empty list means it is runnable."""
    out = _Findings()
    if not isinstance(cfg, dict):
        out.add("<root>", "config must be a JSON object")
        return list(out)
    for key in sorted(set(cfg) - TOP_KEYS):
        out.add(key, "unknown field")
    scen = cfg.get("scenario")
    if scen not in SCENARIOS:
        out.add("scenario", f"must be one of {', '.join(SCENARIOS)}")
        return list(out)
    if "seed" in cfg and not (_is_int(cfg["seed"]) and cfg["seed"] >= 0):
        out.add("seed", "must be a nonnegative integer")
    th = cfg.get("thresholds", {})
    if not isinstance(th, dict):
        out.add("thresholds", "must be an object")
    else:
        for key in ("log_cap", "tail_tol"):
            if key in th and not (_is_num(th[key]) and th[key] > 0):
                out.add(f"thresholds.{key}", "must be a positive number")
    data = cfg.get("data", {})
    if not isinstance(data, dict):
        out.add("data", "must be an object")
        data = {}
    for key in sorted(set(data) - set(DATA_FIELDS[scen])):
        out.add(f"data.{key}", f"not used by the {scen} scenario")
    if scen == "matrix":
        _check_matrix(cfg, out)
        _check_time(cfg, out)
        u0 = data.get("u0")
        if u0 is not None and not (isinstance(u0, list) and all(_is_num(x) for x in u0)):
            out.add("data.u0", "expected a list of numbers")
        return list(out)
    dom = _check_domain(cfg, out)
    kind, n = dom if dom else (None, None)
    if scen == "diagnostics":
        d = cfg.get("diagnostics", {})
        T_list = d.get("T_list", [0, 1, 4])
        if not (isinstance(T_list, list) and all(_is_num(t) and t >= 0 for t in T_list)):
            out.add("diagnostics.T_list", "expected a list of nonnegative times")
        if "time" in cfg:
            _check_time(cfg, out)
        k_max = d.get("k_max")
        if k_max is not None and not (_is_int(k_max) and 1 <= k_max and (n is None or k_max <= n)):
            out.add("diagnostics.k_max", "must lie in [1, n_modes]")
        lc = d.get("weyl_cut")
        if lc is not None and not (_is_num(lc) and lc > 0):
            out.add("diagnostics.weyl_cut", "must be a positive number")
        return list(out)
    _check_time(cfg, out)
    required = {"backward": "u_T", "steer": "v"}.get(scen)
    if required and required not in data:
        out.add(f"data.{required}", "required")
    if scen == "boundary" and "g" not in data:
        out.add("data.g", "required")
    for key, typ in DATA_FIELDS[scen].items():
        if key not in data:
            continue
        path = f"data.{key}"
        if typ == "vector":
            _check_vector(path, data[key], n, out)
        elif typ == "signal":
            _check_signal(path, data[key], n, out)
        elif typ == "boundary":
            _check_boundary(path, data[key], kind, out)
    return list(out)


# construction (assumes a config that validated)

def build_basis(cfg):
    dom = cfg["domain"]
    lengths = [parse_length(x) for x in dom["lengths"]]
    if dom.get("kind", "interval") == "interval":
        return interval_basis(lengths[0], dom["n_modes"], dom["n_quad"])
    return rectangle_basis(lengths[0], lengths[1], dom["n_modes"], dom["n_quad"])


def thresholds(cfg):
    th = cfg.get("thresholds", {})
    return float(th.get("log_cap", LOG_CAP)), float(th.get("tail_tol", TAIL_TOL))


def out_times(cfg):
    tm = cfg["time"]
    grid = tm.get("out_grid", 11)
    if isinstance(grid, list):
        return np.array(grid, dtype=float)
    return np.linspace(0.0, float(tm["T"]), grid)


def build_vector(es, spec, rng):
    if spec is None:
        return SpectralVector.zeros(es)
    if isinstance(spec, list):
        spec = {"coeffs": spec}
    if "coeffs" in spec:
        c = np.array(spec["coeffs"], dtype=complex)
        if "imag" in spec:
            c = c + 1j * np.array(spec["imag"], dtype=float)
        return SpectralVector(c, es)
    preset = spec["preset"]
    scale = float(spec.get("scale", 1.0))
    if preset == "zero":
        return SpectralVector.zeros(es)
    if preset == "mode":
        return SpectralVector.unit(es, spec["mode"], scale)
    if preset == "propagated_mode":
        return propagate(SpectralVector.unit(es, spec["mode"], scale), float(spec.get("t", 0.0)))
    c = rng.normal(size=es.n_modes) * np.exp(-float(spec.get("decay", 0.0)) * es.eigenvalues)
    return SpectralVector(scale * c, es)


def build_signal(es, spec, T, M, rng):
    if spec is None:
        return ModalSignal.zeros(es, T, M)
    if "values" in spec:
        return ModalSignal(T, np.array(spec["values"], dtype=float), es)
    preset = spec["preset"]
    if preset == "zero":
        return ModalSignal.zeros(es, T, M)
    if preset == "constant":
        return ModalSignal.constant(es, T, build_vector(es, spec.get("coeffs"), rng).coeffs, M)
    scale = float(spec.get("scale", 1.0))
    return ModalSignal(T, scale * rng.normal(size=(es.n_modes, M + 1)), es)


def build_boundary(spec, T, M):
    if spec is None:
        return None
    lists = [len(spec[k]) for k in ("left", "right") if isinstance(spec[k], list)]
    n = lists[0] if lists else M + 1
    left, right = (np.array(spec[k], dtype=float) if isinstance(spec[k], list)
                   else np.full(n, float(spec[k])) for k in ("left", "right"))
    return BoundarySignal(T, left, right)
