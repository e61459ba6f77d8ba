"""Limit distribution of ``x / t`` from spectral data, and comparison probes.

The limit measure is the grid quadrature of ``<E(.) xi, xi>``: each grid
point ``k`` and band ``j`` contribute an atom at the band velocity
``(h_{j,1}(k), ..., h_{j,d}(k))`` with weight ``N^-d |<u_j(k), xi_hat(k)>|^2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import AliasingError, ShapeMismatchError
from .lattice import LatticeState, ScaledDistribution, moment
from .spectral import SpectralGrid, VelocityField
from .symbol import TorusGrid

__all__ = [
    "FourierState",
    "VelocityMeasure",
    "CompareReport",
    "fourier_state",
    "limit_measure",
    "char_function",
    "kolmogorov_distance",
    "compare",
    "h_expectation",
]


@dataclass(frozen=True, eq=False)
class FourierState:
    """``xi_hat(k) = sum_x xi(x) exp(i k.x)`` on every grid point, shape (P, n)."""

    grid: TorusGrid
    values: np.ndarray

    def norm_squared(self) -> float:
        """Grid Parseval sum ``N^-d sum_k ||xi_hat(k)||^2``."""
        return float(self.grid.weight * np.sum(np.abs(self.values) ** 2))


def fourier_state(state: LatticeState, grid: TorusGrid) -> FourierState:
    """Sample the Fourier transform of a finitely supported state.

    The support must fit in one period of the grid, otherwise distinct
    sites alias onto each other and the quadrature weights are wrong.
    """
    if grid.d != state.d:
        raise ShapeMismatchError(f"grid has d={grid.d}, state has d={state.d}")
    sites = state.support()
    N = grid.N
    if len(sites) == 0:
        return FourierState(grid, np.zeros((grid.size, state.n), dtype=np.complex128))
    lo, hi = sites.min(axis=0), sites.max(axis=0)
    extent = hi - lo + 1
    if np.any(extent > N):
        raise AliasingError(extent, N)
    # sum_x a(x) e^{2 pi i (m + o) x / N}: twist by e^{2 pi i o x / N}, then an
    # inverse DFT over x mod N (scaled by N^d) gives every m at once.
    sl = tuple(slice(a, a + e) for a, e in zip(lo - state.origin, extent))
    amps = np.array(state.amplitudes[sl])
    for ax in range(state.d):
        x = lo[ax] + np.arange(extent[ax])
        shape = [1] * (state.d + 1)
        shape[ax] = extent[ax]
        amps = amps * np.exp(2j * np.pi * grid.offset * x / N).reshape(shape)
    torus = np.zeros(grid.shape + (state.n,), dtype=np.complex128)
    torus[tuple(slice(0, e) for e in extent)] = amps
    torus = np.roll(torus, shift=tuple(int(v) % N for v in lo), axis=tuple(range(state.d)))
    vals = np.fft.ifftn(torus, axes=tuple(range(state.d))) * float(N) ** state.d
    return FourierState(grid, vals.reshape(grid.size, state.n))


@dataclass(frozen=True, eq=False)
class VelocityMeasure:
    """Weighted velocity atoms plus the mass left on flagged points."""

    velocities: np.ndarray  # (M, d)
    weights: np.ndarray  # (M,)
    unresolved_mass: float = 0.0
    metadata: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.velocities.shape[1]

    def total_mass(self) -> float:
        return float(self.weights.sum())


def limit_measure(spectral: SpectralGrid, velocity: VelocityField, fstate: FourierState,
                  metadata: dict | None = None) -> VelocityMeasure:
    if spectral.grid is None or spectral.grid != fstate.grid:
        raise ShapeMismatchError("spectral data and Fourier state use different grids")
    if velocity.spectral is not spectral:
        raise ShapeMismatchError("velocity field was not computed from this spectral grid")
    w = fstate.grid.weight
    overlaps = np.einsum("pkj,pk->pj", np.conj(spectral.eigenvectors), fstate.values)
    good = ~spectral.flagged
    weights = w * np.abs(overlaps[good]) ** 2
    vel = velocity.velocities[good]
    unresolved = w * float(np.sum(np.abs(fstate.values[spectral.flagged]) ** 2))
    meta = {"grid_N": spectral.grid.N, "grid_offset": spectral.grid.offset,
            "flagged_points": int(spectral.flagged.sum())}
    meta.update(metadata or {})
    return VelocityMeasure(vel.reshape(-1, vel.shape[-1]), weights.ravel(), unresolved, meta)


def char_function(measure, w) -> complex:
    """``sum weight * exp(i v.w)``; accepts any measure with velocities and weights."""
    v = np.asarray(measure.velocities, dtype=float)
    w = np.asarray(w, dtype=float).reshape(v.shape[1])
    return complex(np.sum(measure.weights * np.exp(1j * (v @ w))))


def kolmogorov_distance(va, wa, vb, wb, atol: float = 1e-12) -> float:
    """Sup distance between the CDFs of two weighted 1-d atom sets.

    Atoms closer than ``atol`` count as sitting at the same point, so that
    rounding in computed velocities does not open a spurious gap.
    """
    va, wa = np.asarray(va, dtype=float), np.asarray(wa, dtype=float)
    vb, wb = np.asarray(vb, dtype=float), np.asarray(wb, dtype=float)
    xs = np.union1d(va, vb)

    def cdf(v, w):
        order = np.argsort(v, kind="stable")
        cum = np.concatenate([[0.0], np.cumsum(w[order])])
        return cum[np.searchsorted(v[order], xs + atol, side="right")]

    return float(np.max(np.abs(cdf(va, wa) - cdf(vb, wb)))) if len(xs) else 0.0


@dataclass(frozen=True)
class CompareReport:
    char_gaps: list  # [(w, gap)]
    moment_gaps: list  # [(m, gap)]
    kolmogorov: list  # per axis

    def to_dict(self) -> dict:
        return {
            "char_function": [{"w": list(map(float, w)), "gap": g} for w, g in self.char_gaps],
            "moments": [{"m": list(map(int, m)), "gap": g} for m, g in self.moment_gaps],
            "kolmogorov": [{"axis": i + 1, "distance": g} for i, g in enumerate(self.kolmogorov)],
        }


def compare(empirical: ScaledDistribution, limit: VelocityMeasure,
            w_list: Sequence = (), m_list: Sequence = ()) -> CompareReport:
    """Integral probes of ``p_t`` against the limit measure."""
    if empirical.d != limit.d:
        raise ShapeMismatchError(f"dimensions differ: {empirical.d} vs {limit.d}")
    chars = [(tuple(w), abs(char_function(empirical, w) - char_function(limit, w)))
             for w in w_list]
    moms = [(tuple(m), abs(moment(empirical, m) - moment(limit, m))) for m in m_list]
    ks = [kolmogorov_distance(empirical.velocities[:, i], empirical.weights,
                              limit.velocities[:, i], limit.weights)
          for i in range(limit.d)]
    return CompareReport(chars, moms, ks)


def h_expectation(hfield: np.ndarray, fstate: FourierState) -> float:
    """Quadrature of ``<H(k) xi_hat(k), xi_hat(k)>`` over points where H is defined."""
    ok = np.all(np.isfinite(hfield), axis=(1, 2))
    x = fstate.values[ok]
    val = np.einsum("pi,pij,pj->", np.conj(x), hfield[ok], x)
    return float(fstate.grid.weight * val.real)
