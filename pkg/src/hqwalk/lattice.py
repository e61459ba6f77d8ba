"""Exact time evolution on ``Z^d (x) C^n`` and rescaled position distributions.

States live on a dense bounding box that grows by the symbol's offset
range at every step, so there is no truncation: finite propagation speed
keeps ``U^t xi`` inside ``supp(xi) + t [-r, r]^d``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exceptions import ShapeMismatchError
from .symbol import LaurentMatrixSymbol, TorusGrid, commutator_norm

__all__ = [
    "LatticeState",
    "ScaledDistribution",
    "delta_state",
    "gaussian_state",
    "step",
    "evolve",
    "scaled_distribution",
    "moment",
    "position_mean",
    "concentration_series",
]

DROP_THRESHOLD = 1e-300


@dataclass(frozen=True, eq=False)
class LatticeState:
    """Finitely supported vector ``xi: Z^d -> C^n`` on a bounding box.

    ``amplitudes[idx]`` is the coin vector at site ``origin + idx``.
    ``dropped_mass`` accumulates the squared norm of amplitudes zeroed for
    falling below ``1e-300``; ``truncated_mass`` records the tail removed
    when building an envelope state.
    """

    d: int
    n: int
    origin: np.ndarray
    amplitudes: np.ndarray
    dropped_mass: float = 0.0
    truncated_mass: float = 0.0

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=np.int64).reshape(self.d)
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != self.d + 1 or amps.shape[-1] != self.n:
            raise ShapeMismatchError(
                f"amplitudes of shape {amps.shape} do not match d={self.d}, n={self.n}"
            )
        origin.setflags(write=False)
        amps.setflags(write=False)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_sites(cls, sites: Mapping, n: int | None = None) -> "LatticeState":
        """Build from ``{site: coin vector}``."""
        if not sites:
            raise ValueError("a lattice state needs at least one site")
        keys = [tuple(int(v) for v in np.atleast_1d(s)) for s in sites]
        vecs = [np.atleast_1d(np.asarray(v, dtype=np.complex128)) for v in sites.values()]
        d = len(keys[0])
        n = n or len(vecs[0])
        lo = np.min(keys, axis=0)
        hi = np.max(keys, axis=0)
        amps = np.zeros(tuple(hi - lo + 1) + (n,), dtype=np.complex128)
        for key, vec in zip(keys, vecs):
            if len(key) != d or vec.shape != (n,):
                raise ShapeMismatchError(f"site {key} / vector {vec.shape} inconsistent with d={d}, n={n}")
            amps[tuple(np.array(key) - lo)] += vec
        return cls(d, n, lo, amps)

    @property
    def box_shape(self) -> tuple[int, ...]:
        return self.amplitudes.shape[:-1]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "LatticeState":
        return LatticeState(self.d, self.n, self.origin, self.amplitudes / self.norm(),
                            self.dropped_mass, self.truncated_mass)

    def site_masses(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=-1)

    def support(self) -> np.ndarray:
        """Sites carrying a nonzero amplitude, lexicographically sorted, shape (M, d)."""
        idx = np.argwhere(np.any(self.amplitudes != 0, axis=-1))
        return idx + self.origin

    def items(self):
        """Yield ``(site, vector)`` for nonzero sites in lexicographic order."""
        for site in self.support():
            yield tuple(int(v) for v in site), self[site]

    def __getitem__(self, site) -> np.ndarray:
        idx = np.asarray(site, dtype=np.int64).reshape(self.d) - self.origin
        if np.any(idx < 0) or np.any(idx >= self.box_shape):
            return np.zeros(self.n, dtype=np.complex128)
        return self.amplitudes[tuple(idx)].copy()

    def _aligned(self, other: "LatticeState"):
        if (self.d, self.n) != (other.d, other.n):
            raise ShapeMismatchError("states differ in (d, n)")
        lo = np.minimum(self.origin, other.origin)
        hi = np.maximum(self.origin + self.box_shape, other.origin + other.box_shape)
        out = []
        for st in (self, other):
            amps = np.zeros(tuple(hi - lo) + (self.n,), dtype=np.complex128)
            sl = tuple(slice(a, a + s) for a, s in zip(st.origin - lo, st.box_shape))
            amps[sl] = st.amplitudes
            out.append(amps)
        return lo, out[0], out[1]

    def add(self, other: "LatticeState", scale: complex = 1.0) -> "LatticeState":
        """``self + scale * other`` on the union bounding box."""
        lo, a, b = self._aligned(other)
        return LatticeState(self.d, self.n, lo, a + scale * b)

    def inner(self, other: "LatticeState") -> complex:
        """``<self, other>``, conjugate-linear in ``self``."""
        _, a, b = self._aligned(other)
        return complex(np.vdot(a, b))


def delta_state(site, coin) -> LatticeState:
    """``delta_site (x) coin``, normalized."""
    coin = np.atleast_1d(np.asarray(coin, dtype=np.complex128))
    nrm = np.linalg.norm(coin)
    if nrm == 0:
        raise ValueError("coin vector must be nonzero")
    return LatticeState.from_sites({tuple(np.atleast_1d(site)): coin / nrm})


def gaussian_state(d: int, coin, width: float, center=None, momentum=None,
                   tail: float = 1e-12) -> LatticeState:
    """Gaussian envelope ``exp(-|x-c|^2 / (4 w^2) - i k0.x) (x) coin``.

    The infinite-support vector is cut to the smallest cube whose discarded
    tail carries relative mass at most ``tail``, then renormalized; the
    discarded fraction is kept in ``truncated_mass``.  The resulting vector
    is within ``sqrt(truncated_mass)`` of the untruncated one in norm.
    """
    if width <= 0:
        raise ValueError("width must be positive")
    coin = np.atleast_1d(np.asarray(coin, dtype=np.complex128))
    coin = coin / np.linalg.norm(coin)
    center = np.zeros(d) if center is None else np.asarray(center, dtype=float).reshape(d)
    momentum = np.zeros(d) if momentum is None else np.asarray(momentum, dtype=float).reshape(d)

    big = int(np.ceil(width * np.sqrt(2.0 * np.log(1.0 / tail) + 8.0) * 2.0)) + 2
    profiles = []
    for c in center:
        x = np.arange(np.floor(c) - big, np.floor(c) + big + 1)
        p = np.exp(-((x - c) ** 2) / (2.0 * width**2))
        profiles.append((x, p / p.sum()))
    for R in range(big + 1):
        frac = 1.0
        for (x, p), c in zip(profiles, center):
            frac *= p[np.abs(x - np.floor(c)) <= R].sum()
        if 1.0 - frac <= tail:
            break
    amps = np.ones((), dtype=np.complex128)
    origin = []
    for (x, _), c, k0 in zip(profiles, center, momentum):
        keep = np.abs(x - np.floor(c)) <= R
        xs = x[keep]
        origin.append(int(xs[0]))
        a = np.exp(-((xs - c) ** 2) / (4.0 * width**2) - 1j * k0 * xs)
        amps = np.multiply.outer(amps, a)
    amps = np.multiply.outer(amps, coin)
    amps /= np.linalg.norm(amps)
    return LatticeState(d, len(coin), np.array(origin), amps, truncated_mass=max(0.0, 1.0 - frac))


def _check(symbol: LaurentMatrixSymbol, state: LatticeState):
    if (symbol.d, symbol.n) != (state.d, state.n):
        raise ShapeMismatchError(
            f"symbol has (d, n) = {(symbol.d, symbol.n)} but state has {(state.d, state.n)}"
        )


def step(symbol: LaurentMatrixSymbol, state: LatticeState) -> LatticeState:
    """One application of the walk: ``(U xi)(x) = sum_y A_y xi(x - y)``."""
    _check(symbol, state)
    if len(symbol.offsets) == 0:
        return LatticeState(state.d, state.n, state.origin, np.zeros_like(state.amplitudes))
    lo = symbol.offsets.min(axis=0)
    hi = symbol.offsets.max(axis=0)
    box = state.box_shape
    out = np.zeros(tuple(np.add(box, hi - lo)) + (state.n,), dtype=np.complex128)
    src = state.amplitudes
    for y, a in zip(symbol.offsets, symbol.matrices):
        sl = tuple(slice(s, s + b) for s, b in zip(y - lo, box))
        out[sl] += src @ a.T
    dropped = state.dropped_mass
    tiny = (out != 0) & (np.abs(out) < DROP_THRESHOLD)
    if tiny.any():
        dropped += float(np.sum(np.abs(out[tiny]) ** 2))
        out[tiny] = 0
    return LatticeState(state.d, state.n, state.origin + lo, out, dropped, state.truncated_mass)


def evolve(symbol: LaurentMatrixSymbol, state: LatticeState, t: int) -> LatticeState:
    if t < 0 or int(t) != t:
        raise ValueError(f"t must be a nonnegative integer, got {t}")
    for _ in range(int(t)):
        state = step(symbol, state)
    return state


@dataclass(frozen=True, eq=False)
class ScaledDistribution:
    """Atoms of ``p_t``: mass ``||xi_t(x)||^2`` at velocity ``x / t``.

    Sites are kept as integers so velocities are exact rationals; see
    :meth:`fractions`.
    """

    t: int
    sites: np.ndarray  # (M, d) int64
    masses: np.ndarray  # (M,)

    @property
    def d(self) -> int:
        return self.sites.shape[1]

    @property
    def velocities(self) -> np.ndarray:
        return self.sites / float(self.t)

    @property
    def weights(self) -> np.ndarray:
        return self.masses

    def fractions(self) -> list[tuple[Fraction, ...]]:
        return [tuple(Fraction(int(x), self.t) for x in site) for site in self.sites]

    def total_mass(self) -> float:
        return float(self.masses.sum())


def scaled_distribution(state: LatticeState, t: int) -> ScaledDistribution:
    """Rescaled position distribution of ``state``, taken to be ``U^t xi``."""
    if t < 1 or int(t) != t:
        raise ValueError(f"rescaling needs a positive integer t, got {t}")
    masses = state.site_masses()
    idx = np.argwhere(masses > 0)
    return ScaledDistribution(int(t), idx + state.origin, masses[tuple(idx.T)])


def moment(dist, multi_index: Sequence[int]) -> float:
    """``sum_atoms weight * prod_i v_i^m_i`` for any atom-weighted measure."""
    m = np.asarray(multi_index, dtype=int).reshape(-1)
    v = np.asarray(dist.velocities, dtype=float)
    if m.shape[0] != v.shape[1] or np.any(m < 0):
        raise ValueError(f"multi-index {tuple(m)} invalid for dimension {v.shape[1]}")
    return float(np.sum(dist.weights * np.prod(v**m, axis=1)))


def position_mean(state: LatticeState, axis: int, t: int) -> float:
    """``<(D_axis / t) xi, xi>`` computed on the amplitudes."""
    shape = state.box_shape
    coords = state.origin[axis - 1] + np.arange(shape[axis - 1])
    bshape = [1] * state.d + [1]
    bshape[axis - 1] = shape[axis - 1]
    dxi = coords.reshape(bshape) * state.amplitudes
    return float(np.vdot(state.amplitudes, dxi).real) / t


def concentration_series(symbol: LaurentMatrixSymbol, initial: LatticeState,
                         box: Sequence[float], t_list: Iterable[int],
                         grid: TorusGrid | None = None) -> list[tuple[int, float]]:
    """Mass of ``p_t`` inside ``[-L_1, L_1] x ... x [-L_d, L_d]`` per ``t``.

    Concentration on the box is only guaranteed when every ``L_i`` exceeds
    the walk's speed bound along axis ``i``; a warning is emitted otherwise.
    """
    ts = sorted(int(t) for t in t_list)
    if not ts:
        raise ValueError("t_list is empty")
    box = np.asarray(box, dtype=float).reshape(symbol.d)
    for i, L in enumerate(box, start=1):
        bound = commutator_norm(symbol, i, grid)
        if not L > bound:
            warnings.warn(f"box half-width {L} along axis {i} does not exceed the "
                          f"speed bound {bound:.6g}", stacklevel=2)
    out = []
    state, now = initial, 0
    for t in ts:
        state = evolve(symbol, state, t - now)
        now = t
        dist = scaled_distribution(state, t)
        inside = np.all(np.abs(dist.sites) <= box * t, axis=1)
        out.append((t, float(dist.masses[inside].sum())))
    return out
