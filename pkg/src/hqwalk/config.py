"""Run configuration: parsing, defaulting, validation and the manifest.

A config is a JSON document. Every key has a default except ``walk``;
after parsing, :meth:`RunConfig.manifest` echoes the fully resolved
document, and parsing that manifest reproduces it byte for byte.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Mapping

import numpy as np

from .exceptions import ConfigError, WalkError
from .lattice import LatticeState, delta_state, gaussian_state
from .symbol import SINGULAR_POINTS, LaurentMatrixSymbol, TorusGrid, walk_from_spec

__all__ = ["RunConfig", "parse_config", "build_initial", "DEFAULT_T_LIST"]

DEFAULT_N = 256
DEFAULT_OFFSET = 0.5
DEFAULT_T_LIST = [64, 128, 256, 512]

TOP_KEYS = {"walk", "initial", "grid", "t", "t_list", "axes", "out", "probes", "tolerances",
            "exclusion_radius", "singular_points", "method", "monodromy"}
GRID_KEYS = {"N", "offset"}
PROBE_KEYS = {"w", "moments"}
TOL_KEYS = {"gap"}
MONO_KEYS = {"path", "eps", "steps", "start_branch"}
INITIAL_KEYS = {
    "delta": {"kind", "site", "coin"},
    "gaussian": {"kind", "width", "center", "momentum", "coin", "tail"},
    "file": {"kind", "path"},
    "inline": {"kind", "d", "n", "amplitudes"},
}


@dataclass
class RunConfig:
    walk: dict
    initial: dict
    grid: dict
    t: int
    t_list: list
    axes: list
    out: str
    probes: dict
    tolerances: dict
    exclusion_radius: float
    singular_points: list
    method: str
    monodromy: dict
    _symbol: Any = field(default=None, repr=False, compare=False)

    @property
    def symbol(self) -> LaurentMatrixSymbol:
        if self._symbol is None:
            self._symbol = walk_from_spec(self.walk)
        return self._symbol

    @property
    def torus_grid(self) -> TorusGrid:
        return TorusGrid(self.grid["N"], self.symbol.d, self.grid["offset"])

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("_symbol")
        return out

    def manifest(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _unknown(doc: Mapping, allowed: set, where: str):
    extra = sorted(set(doc) - allowed)
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(extra)}")


def _int(x, what) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or int(x) != x:
        raise ConfigError(f"{what} must be an integer, got {x!r}")
    return int(x)


def _coin_pairs(coin, n, what):
    if coin is None:
        return [[1.0, 0.0]] + [[0.0, 0.0]] * (n - 1)
    if len(coin) != n:
        raise ConfigError(f"{what} must have {n} entries, got {len(coin)}")
    pairs = []
    for z in coin:
        if isinstance(z, (list, tuple)) and len(z) == 2:
            pairs.append([float(z[0]), float(z[1])])
        elif isinstance(z, (int, float)):
            pairs.append([float(z), 0.0])
        else:
            raise ConfigError(f"{what} entries are numbers or [re, im] pairs, got {z!r}")
    if not any(re or im for re, im in pairs):
        raise ConfigError(f"{what} must be nonzero")
    return pairs


def _vector(x, d, what):
    if x is None:
        return [0.0] * d
    if len(x) != d:
        raise ConfigError(f"{what} must have length {d}, got {len(x)}")
    return [float(v) for v in x]


def _initial(doc, d, n) -> dict:
    doc = dict(doc or {"kind": "delta"})
    kind = doc.get("kind", "delta")
    if kind not in INITIAL_KEYS:
        raise ConfigError(f"unknown initial kind {kind!r}; expected one of {sorted(INITIAL_KEYS)}")
    _unknown(doc, INITIAL_KEYS[kind], "initial")
    if kind == "delta":
        site = doc.get("site", [0] * d)
        if len(site) != d:
            raise ConfigError(f"initial.site must have length {d}")
        return {"kind": "delta", "site": [_int(v, "initial.site") for v in site],
                "coin": _coin_pairs(doc.get("coin"), n, "initial.coin")}
    if kind == "gaussian":
        width = float(doc.get("width", 4.0))
        if width <= 0:
            raise ConfigError("initial.width must be positive")
        tail = float(doc.get("tail", 1e-12))
        if not 0 < tail < 1:
            raise ConfigError("initial.tail must lie in (0, 1)")
        return {"kind": "gaussian", "width": width,
                "center": _vector(doc.get("center"), d, "initial.center"),
                "momentum": _vector(doc.get("momentum"), d, "initial.momentum"),
                "coin": _coin_pairs(doc.get("coin"), n, "initial.coin"), "tail": tail}
    if kind == "file":
        if "path" not in doc:
            raise ConfigError("initial.path is required for kind 'file'")
        return {"kind": "file", "path": str(doc["path"])}
    out = {"kind": "inline", "d": _int(doc.get("d"), "initial.d"),
           "n": _int(doc.get("n"), "initial.n"), "amplitudes": doc.get("amplitudes", [])}
    if (out["d"], out["n"]) != (d, n):
        raise ConfigError(f"inline initial state has (d, n) = {(out['d'], out['n'])}, walk has {(d, n)}")
    return out


def build_initial(cfg: RunConfig) -> LatticeState:
    """Construct the (normalized) initial state described by ``cfg.initial``."""
    from .io import read_state, state_from_dict

    init = cfg.initial
    kind = init["kind"]
    if kind == "delta":
        coin = [complex(re, im) for re, im in init["coin"]]
        return delta_state(init["site"], coin)
    if kind == "gaussian":
        coin = [complex(re, im) for re, im in init["coin"]]
        return gaussian_state(cfg.symbol.d, coin, init["width"], init["center"],
                              init["momentum"], init["tail"])
    if kind == "file":
        state = read_state(init["path"])
    else:
        state = state_from_dict({k: init[k] for k in ("d", "n", "amplitudes")})
    if (state.d, state.n) != (cfg.symbol.d, cfg.symbol.n):
        raise ConfigError("initial state does not match the walk's (d, n)")
    return state.normalized()


def _monodromy(doc, d) -> dict:
    doc = dict(doc or {})
    _unknown(doc, MONO_KEYS, "monodromy")
    default_path = "r1" if d == 2 else {"line": [[0.0] * d, [np.pi / 2] + [0.0] * (d - 1)]}
    path = doc.get("path", default_path)
    eps = float(doc.get("eps", 0.3))
    steps = _int(doc.get("steps", 1000), "monodromy.steps")
    if steps < 2:
        raise ConfigError("monodromy.steps must be at least 2")
    if isinstance(path, str):
        if path not in ("r1", "r2"):
            raise ConfigError(f"monodromy.path must be 'r1', 'r2' or {{'line': [...]}}, got {path!r}")
        if d != 2:
            raise ConfigError("paths r1 / r2 need a 2-dimensional walk")
    elif isinstance(path, Mapping) and set(path) == {"line"} and len(path["line"]) == 2:
        path = {"line": [_vector(p, d, "monodromy.path.line") for p in path["line"]]}
    else:
        raise ConfigError(f"invalid monodromy.path {path!r}")
    start = doc.get("start_branch")
    if start is None:
        if isinstance(path, str):
            c = (np.cos(eps) + 1.0) / 2.0
            start = [float(c), float(np.sqrt(1.0 - c * c))]
        else:
            start = [1.0, 0.0]
    elif isinstance(start, (int, float)):
        start = [float(start), 0.0]
    else:
        start = [float(start[0]), float(start[1])]
    return {"path": path, "eps": eps, "steps": steps, "start_branch": start}


def parse_config(text) -> RunConfig:
    """Parse a JSON document (string or already-decoded mapping) into a RunConfig."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    else:
        doc = dict(text)
    if not isinstance(doc, Mapping):
        raise ConfigError("config must be a JSON object")
    _unknown(doc, TOP_KEYS, "config")
    if "walk" not in doc:
        raise ConfigError("config needs a 'walk' entry")
    walk = dict(doc["walk"])
    try:
        symbol = walk_from_spec(walk)
    except WalkError as exc:
        raise ConfigError(f"invalid walk: {exc}") from exc
    if "name" in walk:
        walk = {"name": walk["name"], "params": dict(walk.get("params") or {})}
    d, n = symbol.d, symbol.n

    grid = dict(doc.get("grid") or {})
    _unknown(grid, GRID_KEYS, "grid")
    grid = {"N": _int(grid.get("N", DEFAULT_N), "grid.N"),
            "offset": float(grid.get("offset", DEFAULT_OFFSET))}
    try:
        TorusGrid(grid["N"], d, grid["offset"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    t = doc.get("t")
    t_list = doc.get("t_list")
    if t_list is None:
        t_list = [t] if t is not None else list(DEFAULT_T_LIST)
    t_list = [_int(v, "t_list entry") for v in t_list]
    if not t_list or any(v < 1 for v in t_list):
        raise ConfigError("t_list must be a nonempty list of positive integers")
    if any(b <= a for a, b in zip(t_list, t_list[1:])):
        raise ConfigError(f"t_list must be strictly increasing, got {t_list}")
    t = _int(t, "t") if t is not None else t_list[-1]
    if t < 1:
        raise ConfigError("t must be positive")

    axes = [_int(a, "axes entry") for a in doc.get("axes", list(range(1, d + 1)))]
    if not axes or any(not 1 <= a <= d for a in axes):
        raise ConfigError(f"axes must be a nonempty list drawn from 1..{d}, got {axes}")

    probes = dict(doc.get("probes") or {})
    _unknown(probes, PROBE_KEYS, "probes")
    eye = np.eye(d, dtype=int)
    w_list = probes.get("w", [list(map(float, e)) for e in eye] + [[1.0] * d])
    m_list = probes.get("moments", [list(map(int, e)) for e in eye] + [list(map(int, 2 * e)) for e in eye])
    w_list = [_vector(w, d, "probes.w entry") for w in w_list]
    m_list = [[_int(v, "probes.moments entry") for v in m] for m in m_list]
    if any(len(m) != d or min(m) < 0 for m in m_list):
        raise ConfigError(f"probes.moments entries must be length-{d} nonnegative multi-indices")

    tol = dict(doc.get("tolerances") or {})
    _unknown(tol, TOL_KEYS, "tolerances")
    tol = {"gap": float(tol.get("gap", 1e-8))}

    sp = doc.get("singular_points")
    if sp is None:
        sp = [list(map(float, p)) for p in SINGULAR_POINTS.get(symbol.name, ())]
    sp = [_vector(p, d, "singular_points entry") for p in sp]

    method = doc.get("method", "doubling")
    if method not in ("doubling", "sum"):
        raise ConfigError(f"method must be 'doubling' or 'sum', got {method!r}")

    cfg = RunConfig(
        walk=walk,
        initial=_initial(doc.get("initial"), d, n),
        grid=grid,
        t=t,
        t_list=t_list,
        axes=axes,
        out=str(doc.get("out", "out")),
        probes={"w": w_list, "moments": m_list},
        tolerances=tol,
        exclusion_radius=float(doc.get("exclusion_radius", 0.3)),
        singular_points=sp,
        method=method,
        monodromy=_monodromy(doc.get("monodromy"), d),
    )
    cfg._symbol = symbol
    return cfg
