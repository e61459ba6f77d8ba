"""Translation-invariant walks as matrix-valued Laurent polynomials.

A homogeneous walk on ``l2(Z^d) (x) C^n`` is stored through its coefficients
``A_x``::

    (U xi)(x) = sum_y A_y xi(x - y),        U_hat(k) = sum_x A_x exp(i k.x)

so the shift by ``+e_i`` has symbol ``exp(i k_i)`` and the position operator
``D_i`` acts on the Fourier side as ``-i d/dk_i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .exceptions import NonUnitaryError, WalkError

__all__ = [
    "LaurentMatrixSymbol",
    "TorusGrid",
    "build_named_walk",
    "evaluate",
    "derive",
    "commutator_norm",
    "symbol_pow_at",
    "unitarity_deviation",
    "validate_unitary",
    "walk_from_spec",
    "walk_to_spec",
    "BUILTIN_WALKS",
    "SINGULAR_POINTS",
]

UNITARY_TOL = 1e-12


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on the torus ``[0, 2pi)^d``.

    Grid points along each axis are ``2 pi (m + offset) / N``.  The default
    offset of one half keeps ``0`` and ``pi`` off the grid for even ``N``.
    """

    N: int
    d: int = 1
    offset: float = 0.5

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"grid needs N >= 2, got {self.N}")
        if self.d < 1:
            raise ValueError(f"grid dimension must be positive, got {self.d}")
        if not 0.0 <= self.offset < 1.0:
            raise ValueError(f"grid offset must lie in [0, 1), got {self.offset}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def size(self) -> int:
        return self.N**self.d

    @property
    def weight(self) -> float:
        """Quadrature weight ``N^-d`` of each point (normalized Haar measure)."""
        return float(self.N) ** (-self.d)

    def axis(self) -> np.ndarray:
        return 2.0 * np.pi * (np.arange(self.N) + self.offset) / self.N

    def points(self) -> np.ndarray:
        """All grid points as a ``(N**d, d)`` array in C (lexicographic) order."""
        ax = self.axis()
        mesh = np.meshgrid(*([ax] * self.d), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


def _as_offset(x, d=None) -> tuple[int, ...]:
    off = tuple(int(v) for v in np.atleast_1d(x))
    if any(int(v) != v for v in np.atleast_1d(x)):
        raise WalkError(f"offsets must be integer vectors, got {x!r}")
    if d is not None and len(off) != d:
        raise WalkError(f"offset {off} does not have dimension {d}")
    return off


@dataclass(frozen=True, eq=False)
class LaurentMatrixSymbol:
    """Finitely supported map ``Z^d -> M_n(C)``.

    Coefficients are kept sorted lexicographically by offset; exact zero
    matrices are dropped, so the support and the propagation radius agree.
    Instances are immutable; use the constructors rather than touching the
    arrays.
    """

    d: int
    n: int
    offsets: np.ndarray  # (M, d) int64
    matrices: np.ndarray  # (M, n, n) complex128
    name: str = "custom"
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        offsets = np.asarray(self.offsets, dtype=np.int64).reshape(-1, self.d)
        matrices = np.asarray(self.matrices, dtype=np.complex128).reshape(
            -1, self.n, self.n
        )
        if len(offsets) != len(matrices):
            raise WalkError("offsets and matrices differ in length")
        if len(offsets):
            keys = [tuple(o) for o in offsets]
            if len(set(keys)) != len(keys):
                raise WalkError("duplicate offsets; use from_coefficients to merge")
            order = sorted(range(len(keys)), key=keys.__getitem__)
            offsets, matrices = offsets[order], matrices[order]
        offsets.setflags(write=False)
        matrices.setflags(write=False)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "matrices", matrices)

    @classmethod
    def from_coefficients(cls, coefficients: Mapping, d=None, n=None, name="custom",
                          params=None) -> "LaurentMatrixSymbol":
        """Build from ``{offset: matrix}``; repeated offsets are summed."""
        merged: dict[tuple[int, ...], np.ndarray] = {}
        for off, mat in coefficients.items():
            key = _as_offset(off, d)
            mat = np.atleast_2d(np.asarray(mat, dtype=np.complex128))
            if d is None:
                d = len(key)
            if n is None:
                n = mat.shape[0]
            if mat.shape != (n, n):
                raise WalkError(f"coefficient at {key} has shape {mat.shape}, expected {(n, n)}")
            merged[key] = merged.get(key, 0) + mat
        if d is None or n is None:
            raise WalkError("empty coefficient map needs explicit d and n")
        keys = [k for k in sorted(merged) if np.any(merged[k] != 0)]
        offsets = np.array(keys, dtype=np.int64).reshape(-1, d)
        matrices = np.array([merged[k] for k in keys], dtype=np.complex128).reshape(-1, n, n)
        return cls(d, n, offsets, matrices, name=name, params=dict(params or {}))

    @property
    def radius(self) -> int:
        """Propagation radius ``max_x max_i |x_i|`` over the support."""
        if len(self.offsets) == 0:
            return 0
        return int(np.abs(self.offsets).max())

    @property
    def support(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in o) for o in self.offsets]

    def coefficients(self) -> dict[tuple[int, ...], np.ndarray]:
        return {tuple(int(v) for v in o): m.copy() for o, m in zip(self.offsets, self.matrices)}

    def __call__(self, k) -> np.ndarray:
        return evaluate(self, k)

    def __add__(self, other):
        _check_compatible(self, other)
        coeffs = self.coefficients()
        for off, mat in other.coefficients().items():
            coeffs[off] = coeffs.get(off, 0) + mat
        return LaurentMatrixSymbol.from_coefficients(coeffs, self.d, self.n)

    def __mul__(self, scalar):
        if isinstance(scalar, LaurentMatrixSymbol):
            return NotImplemented
        return LaurentMatrixSymbol.from_coefficients(
            {tuple(o): complex(scalar) * m for o, m in zip(self.offsets, self.matrices)},
            self.d, self.n,
        )

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-1) * other

    def __matmul__(self, other):
        """Symbol product (convolution of coefficient maps)."""
        _check_compatible(self, other)
        coeffs: dict[tuple[int, ...], np.ndarray] = {}
        for xa, a in zip(self.offsets, self.matrices):
            for xb, b in zip(other.offsets, other.matrices):
                key = tuple(int(v) for v in xa + xb)
                coeffs[key] = coeffs.get(key, 0) + a @ b
        return LaurentMatrixSymbol.from_coefficients(coeffs, self.d, self.n)

    def adjoint(self) -> "LaurentMatrixSymbol":
        """Symbol of ``U*``: coefficient ``A_{-x}^*`` at ``x``."""
        return LaurentMatrixSymbol(
            self.d, self.n, -self.offsets, np.conj(np.swapaxes(self.matrices, -1, -2))
        )

    def __repr__(self):
        return (f"LaurentMatrixSymbol(name={self.name!r}, d={self.d}, n={self.n}, "
                f"terms={len(self.offsets)}, radius={self.radius})")


def _check_compatible(a: LaurentMatrixSymbol, b: LaurentMatrixSymbol):
    if not isinstance(b, LaurentMatrixSymbol):
        raise TypeError(f"expected LaurentMatrixSymbol, got {type(b).__name__}")
    if (a.d, a.n) != (b.d, b.n):
        raise WalkError(f"symbols differ in (d, n): {(a.d, a.n)} vs {(b.d, b.n)}")


def evaluate(symbol: LaurentMatrixSymbol, k) -> np.ndarray:
    """``U_hat(k) = sum_x A_x exp(i k.x)``.

    ``k`` may be a single d-vector or an array of shape ``(..., d)``; the
    result has shape ``(..., n, n)``.
    """
    k = np.asarray(k, dtype=float)
    if symbol.d == 1 and (k.ndim == 0 or k.shape[-1] != 1):
        k = k[..., None]
    if k.shape[-1] != symbol.d:
        raise WalkError(f"k has trailing dimension {k.shape[-1]}, expected {symbol.d}")
    if len(symbol.offsets) == 0:
        return np.zeros(k.shape[:-1] + (symbol.n, symbol.n), dtype=np.complex128)
    phases = np.exp(1j * (k @ symbol.offsets.T.astype(float)))
    return np.tensordot(phases, symbol.matrices, axes=([-1], [0]))


def derive(symbol: LaurentMatrixSymbol, axis: int) -> LaurentMatrixSymbol:
    """Partial derivative ``d/dk_axis`` of the symbol (axis is 1-based).

    Coefficientwise ``A_x -> i x_axis A_x``. On the lattice side this is
    the commutator ``[i D_axis, U]``.
    """
    if not 1 <= axis <= symbol.d:
        raise WalkError(f"axis must be in 1..{symbol.d}, got {axis}")
    factor = 1j * symbol.offsets[:, axis - 1].astype(float)
    return LaurentMatrixSymbol.from_coefficients(
        {tuple(o): f * m for o, f, m in zip(symbol.offsets, factor, symbol.matrices)},
        symbol.d, symbol.n,
    )


def unitarity_deviation(symbol: LaurentMatrixSymbol, grid: TorusGrid | None = None):
    """Return ``(max |U U* - I|, worst k)`` over the grid points.

    The default grid has ``max(32, 4r + 3)`` points per axis, which exceeds
    the ``2 (2r + 1)`` samples needed to pin down the degree-``2r``
    trigonometric polynomial ``U U*``.
    """
    if grid is None:
        grid = TorusGrid(max(32, 4 * symbol.radius + 3), symbol.d)
    k = grid.points()
    u = evaluate(symbol, k)
    prod = u @ np.conj(np.swapaxes(u, -1, -2))
    dev = np.abs(prod - np.eye(symbol.n)).max(axis=(-2, -1))
    worst = int(np.argmax(dev))
    return float(dev[worst]), k[worst]


def validate_unitary(symbol: LaurentMatrixSymbol, grid: TorusGrid | None = None,
                     tol: float = UNITARY_TOL) -> LaurentMatrixSymbol:
    dev, worst = unitarity_deviation(symbol, grid)
    if not dev <= tol:
        raise NonUnitaryError(dev, worst)
    return symbol


def commutator_norm(symbol: LaurentMatrixSymbol, axis: int, grid: TorusGrid | None = None) -> float:
    """Grid maximum of ``||d U_hat / dk_axis (k)||`` (spectral norm).

    This is a sampled estimate of ``||[D_axis, U]||``, the speed bound of
    the walk along that axis.
    """
    if grid is None:
        grid = TorusGrid(32, symbol.d)
    du = evaluate(derive(symbol, axis), grid.points())
    if du.size == 0:
        return 0.0
    return float(np.linalg.norm(du, ord=2, axis=(-2, -1)).max())


def symbol_pow_at(symbol: LaurentMatrixSymbol, k, t: int) -> np.ndarray:
    """``U_hat(k)^t`` by repeated squaring."""
    if t < 0 or int(t) != t:
        raise ValueError(f"t must be a nonnegative integer, got {t}")
    return np.linalg.matrix_power(evaluate(symbol, k), int(t))


# -- builtin walks ---------------------------------------------------------

def _shift1d():
    return {(1,): [[1.0]]}


def _hadamard1d():
    # Hadamard coin, then component 0 steps left and component 1 steps right.
    s = 1.0 / np.sqrt(2.0)
    return {(-1,): [[s, s], [0.0, 0.0]], (1,): [[0.0, 0.0], [s, -s]]}


def _exotic2d():
    # U = 1/2 [[S1 + S2, -S1^-1 + S2^-1], [S1 - S2, S1^-1 + S2^-1]]
    return {
        (1, 0): 0.5 * np.array([[1, 0], [1, 0]]),
        (0, 1): 0.5 * np.array([[1, 0], [-1, 0]]),
        (-1, 0): 0.5 * np.array([[0, -1], [0, 1]]),
        (0, -1): 0.5 * np.array([[0, 1], [0, 1]]),
    }


BUILTIN_WALKS = {"shift1d": _shift1d, "hadamard1d": _hadamard1d, "exotic2d": _exotic2d}

# Points where eigenvalues of the builtin symbols collide.
SINGULAR_POINTS = {
    "shift1d": (),
    "hadamard1d": (),
    "exotic2d": ((0.0, 0.0), (np.pi, np.pi)),
}


def _parse_complex(z) -> complex:
    if isinstance(z, (list, tuple)):
        if len(z) != 2:
            raise WalkError(f"complex numbers are [re, im] pairs, got {z!r}")
        return complex(float(z[0]), float(z[1]))
    return complex(z)


def _parse_coefficient_list(entries, d, n):
    coeffs = {}
    for entry in entries:
        try:
            off, rows = entry["offset"], entry["matrix"]
        except (TypeError, KeyError) as exc:
            raise WalkError(f"coefficient entries need 'offset' and 'matrix': {entry!r}") from exc
        mat = np.array([[_parse_complex(z) for z in row] for row in rows], dtype=np.complex128)
        key = _as_offset(off, d)
        coeffs[key] = coeffs.get(key, 0) + mat
    return coeffs


def build_named_walk(name: str, params: Mapping | None = None) -> LaurentMatrixSymbol:
    """Construct a builtin walk, or a ``custom`` one from explicit coefficients.

    ``custom`` takes ``params = {"d": .., "n": .., "coefficients": [...]}``
    with each coefficient ``{"offset": [...], "matrix": [[[re, im], ...], ...]}``.
    The result always passes :func:`validate_unitary`.
    """
    params = dict(params or {})
    if name == "custom":
        unknown = set(params) - {"d", "n", "coefficients"}
        if unknown:
            raise WalkError(f"unknown parameters for custom walk: {sorted(unknown)}")
        if "coefficients" not in params:
            raise WalkError("custom walk requires explicit 'coefficients'")
        d, n = params.get("d"), params.get("n")
        coeffs = _parse_coefficient_list(params["coefficients"], d, n)
        symbol = LaurentMatrixSymbol.from_coefficients(coeffs, d, n, name="custom", params=params)
    elif name in BUILTIN_WALKS:
        if params:
            raise WalkError(f"walk {name!r} takes no parameters, got {sorted(params)}")
        symbol = LaurentMatrixSymbol.from_coefficients(BUILTIN_WALKS[name](), name=name)
    else:
        raise WalkError(
            f"unknown walk {name!r}; expected one of {sorted(BUILTIN_WALKS) + ['custom']}"
        )
    return validate_unitary(symbol)


def walk_from_spec(spec: Mapping) -> LaurentMatrixSymbol:
    """Parse a walk description (named form or explicit coefficient form)."""
    if not isinstance(spec, Mapping):
        raise WalkError(f"walk description must be a mapping, got {type(spec).__name__}")
    if "name" in spec:
        extra = set(spec) - {"name", "params"}
        if extra:
            raise WalkError(f"unknown walk description keys: {sorted(extra)}")
        return build_named_walk(spec["name"], spec.get("params"))
    extra = set(spec) - {"d", "n", "coefficients"}
    if extra:
        raise WalkError(f"unknown walk description keys: {sorted(extra)}")
    return build_named_walk("custom", dict(spec))


def walk_to_spec(symbol: LaurentMatrixSymbol) -> dict:
    """Explicit coefficient form of a symbol, suitable for JSON."""
    return {
        "d": symbol.d,
        "n": symbol.n,
        "coefficients": [
            {
                "offset": [int(v) for v in off],
                "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in mat],
            }
            for off, mat in zip(symbol.offsets, symbol.matrices)
        ],
    }

