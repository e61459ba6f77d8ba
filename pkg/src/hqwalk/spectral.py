"""Per-momentum spectral analysis of a walk symbol.

Velocity operators are assembled pointwise from eigenprojections,
``H_i(k) = sum_j h_{j,i}(k) P_j(k)``, with no attempt at global band
labels: for walks like ``exotic2d`` no C^1 eigenvalue branches exist
around the degenerate points. Branch continuation is only done locally,
along a path, in :func:`monodromy_probe`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._parallel import map_chunks
from .exceptions import MonodromyError, ShapeMismatchError
from .symbol import SINGULAR_POINTS, LaurentMatrixSymbol, TorusGrid, derive, evaluate

__all__ = [
    "SpectralGrid",
    "VelocityField",
    "CocycleField",
    "ConvergenceRecord",
    "MonodromyResult",
    "eigendecompose",
    "group_velocity_field",
    "h_operator_field",
    "closed_form_exotic_H",
    "cocycle_average",
    "convergence_report",
    "monodromy_probe",
    "exotic_paths",
    "line_path",
    "torus_distance",
]

GAP_TOL = 1e-8


def _dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def _points_of(grid) -> np.ndarray:
    if isinstance(grid, TorusGrid):
        return grid.points()
    pts = np.asarray(grid, dtype=float)
    return pts.reshape(-1, 1) if pts.ndim == 1 else pts


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Eigen-data of ``U_hat(k)`` at each grid point.

    Eigenvalues at each point are sorted by argument in ``(-pi, pi]``;
    eigenvector columns are orthonormal with their largest-modulus entry
    made real and positive. Points whose smallest eigenvalue gap is below
    ``gap_tol`` (or where the eigensolver failed) are flagged.
    """

    grid: TorusGrid | None
    points: np.ndarray  # (P, d)
    eigenvalues: np.ndarray  # (P, n)
    eigenvectors: np.ndarray  # (P, n, n), columns
    gaps: np.ndarray  # (P,)
    flagged: np.ndarray  # (P,) bool
    gap_tol: float = GAP_TOL

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[1]

    @property
    def flagged_fraction(self) -> float:
        """Fraction of grid points (= Haar measure on the grid) that are flagged."""
        return float(self.flagged.mean()) if self.flagged.size else 0.0

    def projection(self, j: int) -> np.ndarray:
        u = self.eigenvectors[:, :, j]
        return u[:, :, None] * np.conj(u[:, None, :])


def _eig_chunk(u):
    try:
        lam, vec = np.linalg.eig(u)
        ok = np.ones(len(u), dtype=bool)
    except np.linalg.LinAlgError:
        lam = np.full(u.shape[:2], np.nan + 0j)
        vec = np.full(u.shape, np.nan + 0j)
        ok = np.zeros(len(u), dtype=bool)
        for p in range(len(u)):
            try:
                lam[p], vec[p] = np.linalg.eig(u[p])
                ok[p] = True
            except np.linalg.LinAlgError:
                pass
    ok &= np.all(np.isfinite(lam), axis=1) & np.all(np.isfinite(vec), axis=(1, 2))
    lam = np.where(ok[:, None], lam, 1.0)
    vec = np.where(ok[:, None, None], vec, np.eye(u.shape[-1]))
    return lam, vec, ok


def eigendecompose(symbol: LaurentMatrixSymbol, grid, gap_tol: float = GAP_TOL) -> SpectralGrid:
    points = _points_of(grid)
    n = symbol.n

    def work(sl):
        u = evaluate(symbol, points[sl])
        lam, vec, ok = _eig_chunk(u)
        order = np.argsort(np.angle(lam), axis=1, kind="stable")
        lam = np.take_along_axis(lam, order, axis=1)
        vec = np.take_along_axis(vec, order[:, None, :], axis=2)
        # nearest unitary to the eigenvector frame
        w, _, zh = np.linalg.svd(vec)
        vec = w @ zh
        big = np.argmax(np.abs(vec), axis=1)  # (P, n)
        lead = np.take_along_axis(vec, big[:, None, :], axis=1)
        vec = vec * (np.conj(lead) / np.abs(lead))
        if n > 1:
            diff = np.abs(lam[:, :, None] - lam[:, None, :])
            diff[:, np.arange(n), np.arange(n)] = np.inf
            gaps = diff.min(axis=(1, 2))
        else:
            gaps = np.full(len(lam), np.inf)
        flagged = ~ok | (gaps < gap_tol)
        return lam, vec, gaps, flagged

    lam, vec, gaps, flagged = map_chunks(work, len(points))
    return SpectralGrid(grid if isinstance(grid, TorusGrid) else None,
                        points, lam, vec, gaps, flagged, gap_tol)


@dataclass(frozen=True, eq=False)
class VelocityField:
    """Band velocities ``h_{j,i}(k) = -i conj(l_j) <u_j, dU/dk_i u_j>``.

    ``velocities`` has shape ``(P, n, d)`` and is NaN at flagged points.
    ``max_imag`` is the largest imaginary part discarded when taking the
    real part; for a unitary symbol it is rounding noise.
    """

    spectral: SpectralGrid
    velocities: np.ndarray
    max_imag: float


def group_velocity_field(spectral: SpectralGrid, symbol: LaurentMatrixSymbol) -> VelocityField:
    pts = spectral.points
    vec = spectral.eigenvectors
    lam = spectral.eigenvalues
    vel = np.empty(lam.shape + (symbol.d,))
    max_imag = 0.0
    for i in range(1, symbol.d + 1):
        dsym = derive(symbol, i)

        def work(sl):
            du = evaluate(dsym, pts[sl])
            v = vec[sl]
            return np.einsum("pkj,pkl,plj->pj", np.conj(v), du, v)

        q = map_chunks(work, len(pts))
        z = -1j * np.conj(lam) * q
        good = ~spectral.flagged
        if good.any():
            max_imag = max(max_imag, float(np.abs(z.imag[good]).max()))
        vel[:, :, i - 1] = z.real
    vel[spectral.flagged] = np.nan
    return VelocityField(spectral, vel, max_imag)


def h_operator_field(spectral: SpectralGrid, velocity: VelocityField, axis: int) -> np.ndarray:
    """``H_axis(k) = sum_j h_{j,axis}(k) P_j(k)`` as a ``(P, n, n)`` array.

    Flagged points are filled with NaN.
    """
    h = velocity.velocities[:, :, axis - 1]
    v = spectral.eigenvectors
    out = np.einsum("pij,pj,pkj->pik", v, h, np.conj(v))
    out[spectral.flagged] = np.nan
    return out


_SINGULAR_H = 0.5 * np.array([[1, 1], [1, -1]], dtype=np.complex128)


def closed_form_exotic_H(axis: int, k, atol: float = 1e-12) -> np.ndarray:
    """Closed-form velocity operator of the ``exotic2d`` walk.

    Away from ``(0, 0)`` and ``(pi, pi)``::

        sin k_axis / (4 - (cos k1 + cos k2)^2) *
            [[sin k1 + sin k2,          i (e^{-ik1} - e^{-ik2})],
             [i (e^{ik2} - e^{ik1}),    -sin k1 - sin k2      ]]

    and ``1/2 [[1, 1], [1, -1]]`` at the two singular points. ``k`` may be
    a 2-vector or an array of shape ``(..., 2)``.
    """
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    k = np.asarray(k, dtype=float)
    k1, k2 = k[..., 0], k[..., 1]
    c = np.cos(k1) + np.cos(k2)
    s = np.sin(k1) + np.sin(k2)
    w = torus_distance(k, (0.0, 0.0))
    wp = torus_distance(k, (np.pi, np.pi))
    singular = (w <= atol) | (wp <= atol)
    with np.errstate(divide="ignore", invalid="ignore"):
        pref = np.sin(k[..., axis - 1]) / (4.0 - c**2)
    m = np.empty(k.shape[:-1] + (2, 2), dtype=np.complex128)
    m[..., 0, 0] = s
    m[..., 0, 1] = 1j * (np.exp(-1j * k1) - np.exp(-1j * k2))
    m[..., 1, 0] = 1j * (np.exp(1j * k2) - np.exp(1j * k1))
    m[..., 1, 1] = -s
    out = pref[..., None, None] * m
    out[singular] = _SINGULAR_H
    return out


def torus_distance(k, center) -> np.ndarray:
    """Euclidean distance on ``R^d / 2 pi Z^d``."""
    diff = np.asarray(k, dtype=float) - np.asarray(center, dtype=float)
    wrapped = np.abs((diff + np.pi) % (2.0 * np.pi) - np.pi)
    return np.sqrt(np.sum(wrapped**2, axis=-1))


@dataclass(frozen=True, eq=False)
class CocycleField:
    """``C_t(k) = (1 / (i t)) U_hat(k)^{-t} d(U_hat^t)/dk_axis (k)`` per point."""

    t: int
    axis: int
    points: np.ndarray
    values: np.ndarray  # (P, n, n)


def _cocycle_sum(u, du, t):
    # product rule: d(U^{s+1}) = d(U^s) U + U^s dU
    power = np.broadcast_to(np.eye(u.shape[-1], dtype=np.complex128), u.shape).copy()
    deriv = np.zeros_like(u)
    for _ in range(t):
        deriv = deriv @ u + power @ du
        power = power @ u
    return _dagger(power) @ deriv


def _cocycle_doubling(u, du, t):
    # c_t = U^{-t} d(U^t) obeys c_{a+b} = U^{-b} c_a U^b + c_b
    pw, cw = u, _dagger(u) @ du
    pr, cr = None, None
    while True:
        if t & 1:
            if cr is None:
                pr, cr = pw, cw
            else:
                cr = _dagger(pw) @ cr @ pw + cw
                pr = pr @ pw
        t >>= 1
        if not t:
            return cr
        cw = _dagger(pw) @ cw @ pw + cw
        pw = pw @ pw


def cocycle_average(symbol: LaurentMatrixSymbol, axis: int, t: int, grid,
                    method: str = "doubling") -> CocycleField:
    """Averaged logarithmic derivative of ``U_hat^t`` along ``axis``.

    ``method="sum"`` accumulates ``d(U^t)`` by the product rule (O(t)
    matrix products); ``method="doubling"`` uses the cocycle identity to get
    the same quantity in O(log t) products. ``grid`` is a TorusGrid or an
    array of k-points.
    """
    if t < 1 or int(t) != t:
        raise ValueError(f"t must be a positive integer, got {t}")
    if method not in ("sum", "doubling"):
        raise ValueError(f"unknown method {method!r}")
    points = _points_of(grid)
    dsym = derive(symbol, axis)
    kernel = _cocycle_sum if method == "sum" else _cocycle_doubling

    def work(sl):
        u = evaluate(symbol, points[sl])
        du = evaluate(dsym, points[sl])
        return kernel(u, du, int(t)) * (-1j / t)

    return CocycleField(int(t), axis, points, map_chunks(work, len(points)))


@dataclass(frozen=True)
class ConvergenceRecord:
    t: int
    pointwise_err: float
    sup_err: float
    excluded_fraction: float


def convergence_report(symbol: LaurentMatrixSymbol, axis: int, t_list: Sequence[int], grid,
                       reference: np.ndarray | None = None, exclusion_radius: float = 0.3,
                       singular_points=None, method: str = "doubling") -> list[ConvergenceRecord]:
    """Distance between ``C_t`` and the limit field, per ``t``.

    The error at a point is the spectral norm of ``C_t(k) - H(k)``.
    ``pointwise_err`` is the maximum over points farther than
    ``exclusion_radius`` from every singular point; ``sup_err`` is the
    maximum over every point where the reference is defined.
    """
    ts = [int(t) for t in t_list]
    if not ts:
        raise ValueError("t_list is empty")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError(f"t_list must be strictly increasing, got {ts}")
    points = _points_of(grid)
    if reference is None:
        spec = eigendecompose(symbol, grid)
        reference = h_operator_field(spec, group_velocity_field(spec, symbol), axis)
    if reference.shape != (len(points), symbol.n, symbol.n):
        raise ShapeMismatchError("reference field does not match the grid")
    if singular_points is None:
        singular_points = SINGULAR_POINTS.get(symbol.name, ())
    valid = np.all(np.isfinite(reference), axis=(1, 2))
    far = valid.copy()
    for c in singular_points:
        far &= torus_distance(points, c) > exclusion_radius
    dsym = derive(symbol, axis)

    def work(sl):
        u = evaluate(symbol, points[sl])
        du = evaluate(dsym, points[sl])
        ref = np.where(valid[sl, None, None], reference[sl], 0)
        errs = []
        for t in ts:
            c = _cocycle_doubling(u, du, t) if method == "doubling" else _cocycle_sum(u, du, t)
            errs.append(np.linalg.norm(c * (-1j / t) - ref, ord=2, axis=(-2, -1)))
        return np.stack(errs, axis=1)

    errs = map_chunks(work, len(points))
    out = []
    for j, t in enumerate(ts):
        e = errs[:, j]
        out.append(ConvergenceRecord(
            t,
            float(e[far].max()) if far.any() else 0.0,
            float(e[valid].max()) if valid.any() else 0.0,
            float(1.0 - far.mean()),
        ))
    return out


@dataclass(frozen=True, eq=False)
class MonodromyResult:
    endpoint: complex
    s: np.ndarray
    trace: np.ndarray
    steps: int

    def to_dict(self) -> dict:
        return {
            "endpoint": [self.endpoint.real, self.endpoint.imag],
            "steps": self.steps,
            "trace": [[float(s), float(z.real), float(z.imag)] for s, z in zip(self.s, self.trace)],
        }


def _continue(eigs, start, margin, coincide_tol):
    """Follow one eigenvalue through ``eigs`` (shape (S, n)); None if ambiguous."""
    trace = np.empty(len(eigs), dtype=np.complex128)
    prev = prev2 = None
    for m, cands in enumerate(eigs):
        if m == 0:
            pred = start
        elif m == 1:
            pred = prev
        else:
            pred = 2.0 * prev - prev2  # linear predictor carries branches through crossings
        dist = np.abs(cands - pred)
        order = np.argsort(dist, kind="stable")
        best = order[0]
        if len(cands) > 1:
            second = order[1]
            if (dist[second] <= margin * dist[best]
                    and abs(cands[second] - cands[best]) > coincide_tol):
                return None, m
        trace[m] = cands[best]
        prev2, prev = prev, cands[best]
    return trace, None


def monodromy_probe(symbol: LaurentMatrixSymbol, path: Callable[[float], Sequence[float]],
                    steps: int = 1000, start_branch: complex = 1.0, margin: float = 3.0,
                    max_steps: int = 1 << 20, coincide_tol: float = 1e-9) -> MonodromyResult:
    """Continue an eigenvalue of ``U_hat(path(s))`` from ``s = 0`` to ``s = 1``.

    The branch starts at the eigenvalue nearest ``start_branch``. At every
    step the candidate nearest the linear extrapolation of the last two
    values is taken, provided the runner-up is more than ``margin`` times
    farther; otherwise the step count is doubled. Candidates closer than
    ``coincide_tol`` count as one value (an exact crossing).
    """
    steps = int(steps)
    while True:
        s = np.linspace(0.0, 1.0, steps + 1)
        ks = np.array([np.atleast_1d(path(x)) for x in s], dtype=float)
        eigs = np.linalg.eigvals(evaluate(symbol, ks))
        trace, bad = _continue(eigs, complex(start_branch), margin, coincide_tol)
        if trace is not None:
            return MonodromyResult(complex(trace[-1]), s, trace, steps)
        if steps * 2 > max_steps:
            lo = s[max(bad - 1, 0)]
            raise MonodromyError(lo, s[bad], steps)
        steps *= 2


def line_path(k_start, k_end):
    a = np.atleast_1d(np.asarray(k_start, dtype=float))
    b = np.atleast_1d(np.asarray(k_end, dtype=float))
    return lambda s: a + s * (b - a)


def exotic_paths(eps: float):
    """The two paths from ``(-eps, 0)`` to ``(eps, 0)`` around ``(0, 0)``.

    ``r1`` runs straight through the degenerate point; ``r2`` is the half
    circle of radius ``eps`` through ``(0, -eps)``.
    """
    def r1(s):
        return (2.0 * s * eps - eps, 0.0)

    def r2(s):
        return (-eps * np.cos(np.pi * s), -eps * np.sin(np.pi * s))

    return r1, r2
