"""Fractional and classical differentiation matrices on Jacobi-Gauss grids.

Every matrix maps nodal samples ``u(x_j)`` to nodal samples of the operator
applied to the interpolant of ``u``.  Assembly always happens in the
reference variable on [-1, 1]; :func:`scale_to_interval` (or
:func:`operator_matrix`) rescales to the grid's physical interval.

Products are formed in extended precision (``numpy.longdouble``) against
a modal map refined to the exact inverse of the Jacobi-Vandermonde matrix
at the stored nodes, then rounded once.  Without this, rounding in the
modal map is amplified by the large high-degree columns of the kernel
matrix.

Rows that are meaningless for a given operator (the singular endpoint row
of a Riemann-Liouville matrix) are filled with NaN and listed in
``DiffMatrix.invalid_rows``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .grids import AffineMap, Family, Grid, make_grid
from .jacobi import (
    JacobiParams,
    jacobi_derivative_factor,
    jacobi_table,
    orthogonality_norm,
    rgamma,
)
from .kernels import LEFT, RIGHT, chebyshev_scale, fractional_integral_table, that_left, that_right


class Kind(str, enum.Enum):
    INTEGRAL_L = "integral-l"
    INTEGRAL_R = "integral-r"
    CAPUTO_L = "caputo-l"
    CAPUTO_R = "caputo-r"
    RL_L = "rl-l"
    RL_R = "rl-r"
    RIESZ = "riesz"
    RIESZ_CAPUTO = "riesz-caputo"
    CLASSICAL = "classical"

    @property
    def is_integral(self) -> bool:
        return self in (Kind.INTEGRAL_L, Kind.INTEGRAL_R)


def _is_int(alpha: float) -> bool:
    return float(alpha) == math.floor(alpha)


def riesz_constant(alpha: float) -> float:
    """``c_alpha = -1 / (2 cos(pi alpha / 2))``; undefined for odd integer alpha."""
    if _is_int(alpha) and int(alpha) % 2 == 1:
        raise ValueError(f"Riesz constant has a pole at odd integer alpha={alpha}")
    return -1.0 / (2.0 * math.cos(math.pi * alpha / 2))


@dataclass(frozen=True)
class OperatorSpec:
    kind: Kind
    alpha: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.CLASSICAL:
            if not (_is_int(self.alpha) and self.alpha >= 0):
                raise ValueError("classical derivative order must be a nonnegative integer")
        elif not self.alpha > 0:
            raise ValueError(f"order must be positive, got {self.alpha}")
        if self.kind in (Kind.RIESZ, Kind.RIESZ_CAPUTO):
            riesz_constant(self.alpha)

    @property
    def n(self) -> int:
        """The integer ``n`` with ``n - 1 < alpha <= n``."""
        return int(math.ceil(self.alpha))


@dataclass(frozen=True, eq=False)
class DiffMatrix:
    spec: OperatorSpec
    grid: Grid
    entries: np.ndarray
    invalid_rows: frozenset = frozenset()

    @property
    def valid_rows(self) -> np.ndarray:
        return np.array([i for i in range(self.grid.N + 1) if i not in self.invalid_rows], dtype=int)

    def apply(self, u) -> np.ndarray:
        return self.entries @ np.asarray(u, dtype=float)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True, eq=False)
class ModalMap:
    grid: Grid
    entries: np.ndarray

    def apply(self, u) -> np.ndarray:
        return self.entries @ np.asarray(u, dtype=float)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _grid_from_key(key: tuple) -> Grid:
    a, b, family, N = key
    return make_grid(JacobiParams(a, b), N, Family(family))


EXT = np.longdouble


@lru_cache(maxsize=512)
def _modal_ext(key: tuple) -> np.ndarray:
    g = _grid_from_key(key)
    p, N = g.params, g.N
    P = jacobi_table(p, N, g.nodes)  # P[j, k] = P_k(x_j)
    norms = np.array([orthogonality_norm(p, k) for k in range(N + 1)])
    if g.family is Family.LOBATTO:
        # discrete norm of P_N on Lobatto points
        norms[N] *= 2 + (p.a + p.b + 1) / N
    X = (P.T * g.weights[None, :] / norms[:, None]).astype(EXT)
    # one Newton-Schulz step makes X the inverse of V at the stored nodes
    V = jacobi_table(p, N, g.nodes.astype(EXT))
    X = X + X @ (np.eye(N + 1, dtype=EXT) - V @ X)
    return _frozen(X)


@lru_cache(maxsize=512)
def _modal(key: tuple) -> np.ndarray:
    return _frozen(_modal_ext(key).astype(float))


def _assemble(hat: np.ndarray, key: tuple) -> np.ndarray:
    return _frozen((hat.astype(EXT) @ _modal_ext(key)).astype(float))


def modal_map(grid: Grid) -> ModalMap:
    """Matrix taking nodal values to Jacobi expansion coefficients."""
    return ModalMap(grid, _modal(grid.key))


@lru_cache(maxsize=512)
def _classical(key: tuple, k: int) -> np.ndarray:
    g = _grid_from_key(key)
    N = g.N
    if k == 0:
        return _frozen(np.eye(N + 1))
    hat = np.zeros((N + 1, N + 1), dtype=EXT)
    if k <= N:
        d = np.array([jacobi_derivative_factor(g.params, j, k) for j in range(k, N + 1)])
        hat[:, k:] = jacobi_table(g.params.shifted(k), N - k, g.nodes.astype(EXT)) * d[None, :]
    return _assemble(hat, key)


@lru_cache(maxsize=512)
def _caputo(key: tuple, alpha: float, side: str) -> np.ndarray:
    g = _grid_from_key(key)
    N = g.N
    n = int(math.ceil(alpha))
    hat = np.zeros((N + 1, N + 1), dtype=EXT)
    if n <= N:
        d = np.array([jacobi_derivative_factor(g.params, j, n) for j in range(n, N + 1)])
        # column j uses the degree j - n kernel of the (a + n, b + n) family
        kern = fractional_integral_table(g.params.shifted(n), n - alpha, N - n, g.nodes.astype(EXT), side)
        hat[:, n:] = kern * d[None, :]
        if side == RIGHT and n % 2:
            hat = -hat
    return _assemble(hat, key)


@lru_cache(maxsize=512)
def _integral(key: tuple, alpha: float, side: str) -> np.ndarray:
    g = _grid_from_key(key)
    N = g.N
    if g.params.is_chebyshev:
        table = (that_left if side == LEFT else that_right)(alpha, N, g.nodes.astype(EXT)).values
        hat = table * chebyshev_scale(N)[None, :]
    else:
        hat = fractional_integral_table(g.params, alpha, N, g.nodes.astype(EXT), side)
    return _assemble(hat, key)


def _rl_correction(key: tuple, alpha: float, side: str) -> np.ndarray:
    g = _grid_from_key(key)
    n = int(math.ceil(alpha))
    x = g.nodes
    corr = np.zeros((g.N + 1, g.N + 1))
    with np.errstate(divide="ignore", invalid="ignore"):
        for k in range(n):
            if side == LEFT:
                row = _classical(key, k)[0]
                t = x + 1
                sign = 1.0
            else:
                row = _classical(key, k)[g.N]
                t = 1 - x
                sign = -1.0 if k % 2 else 1.0
            corr += sign * np.outer(np.power(np.maximum(t, 0.0), k - alpha) * rgamma(k + 1 - alpha), row)
    return corr


@lru_cache(maxsize=512)
def _rl(key: tuple, alpha: float, side: str) -> np.ndarray:
    out = _caputo(key, alpha, side) + _rl_correction(key, alpha, side)
    bad = 0 if side == LEFT else -1
    out[bad, :] = np.nan
    return _frozen(out)


def _reference(grid: Grid, spec: OperatorSpec) -> DiffMatrix:
    key, kind, alpha = grid.key, spec.kind, float(spec.alpha)
    N = grid.N
    invalid: frozenset = frozenset()
    integer = _is_int(alpha)
    sign_r = -1.0 if integer and int(alpha) % 2 else 1.0

    if kind is Kind.CLASSICAL:
        entries = _classical(key, int(alpha))
    elif kind is Kind.INTEGRAL_L:
        entries = _integral(key, alpha, LEFT)
    elif kind is Kind.INTEGRAL_R:
        entries = _integral(key, alpha, RIGHT)
    elif kind in (Kind.CAPUTO_L, Kind.RL_L) and integer:
        entries = _classical(key, int(alpha))
    elif kind in (Kind.CAPUTO_R, Kind.RL_R) and integer:
        entries = _frozen(sign_r * _classical(key, int(alpha)))
    elif kind is Kind.CAPUTO_L:
        entries = _caputo(key, alpha, LEFT)
    elif kind is Kind.CAPUTO_R:
        entries = _caputo(key, alpha, RIGHT)
    elif kind is Kind.RL_L:
        entries, invalid = _rl(key, alpha, LEFT), frozenset({0})
    elif kind is Kind.RL_R:
        entries, invalid = _rl(key, alpha, RIGHT), frozenset({N})
    elif kind is Kind.RIESZ:
        left = _reference(grid, OperatorSpec(Kind.RL_L, alpha))
        right = _reference(grid, OperatorSpec(Kind.RL_R, alpha))
        entries = _frozen(riesz_constant(alpha) * (left.entries + right.entries))
        invalid = left.invalid_rows | right.invalid_rows
    elif kind is Kind.RIESZ_CAPUTO:
        left = _reference(grid, OperatorSpec(Kind.CAPUTO_L, alpha))
        right = _reference(grid, OperatorSpec(Kind.CAPUTO_R, alpha))
        entries = _frozen(riesz_constant(alpha) * (left.entries + right.entries))
    else:  # pragma: no cover
        raise ValueError(f"unsupported operator kind {kind}")
    ref_grid = grid if grid.interval.is_identity else grid.on_interval(-1.0, 1.0)
    return DiffMatrix(spec, ref_grid, entries, invalid)


def scale_to_interval(dm: DiffMatrix, m: AffineMap) -> DiffMatrix:
    """Rescale a reference-variable matrix to the physical interval ``m``.

    Derivatives of order alpha pick up ``scale**-alpha``, integrals
    ``scale**alpha``, where ``scale = (x_b - x_a) / 2``.
    """
    power = dm.spec.alpha if dm.spec.kind.is_integral else -dm.spec.alpha
    factor = m.scale**power
    entries = dm.entries if factor == 1.0 else _frozen(dm.entries * factor)
    return replace(dm, grid=dm.grid.on_interval(m.x_a, m.x_b), entries=entries)


def operator_matrix(grid: Grid, spec: OperatorSpec) -> DiffMatrix:
    """Matrix of ``spec`` on ``grid``, scaled to the grid's physical interval."""
    ref = _reference(grid, spec)
    if grid.interval.is_identity:
        return ref
    return scale_to_interval(ref, grid.interval)


def caputo_matrix_left(grid: Grid, alpha: float) -> DiffMatrix:
    return operator_matrix(grid, OperatorSpec(Kind.CAPUTO_L, alpha))


def caputo_matrix_right(grid: Grid, alpha: float) -> DiffMatrix:
    return operator_matrix(grid, OperatorSpec(Kind.CAPUTO_R, alpha))


def frac_integral_matrix(grid: Grid, alpha: float, side: str = LEFT) -> DiffMatrix:
    kind = Kind.INTEGRAL_L if side == LEFT else Kind.INTEGRAL_R
    return operator_matrix(grid, OperatorSpec(kind, alpha))


def rl_matrix(grid: Grid, alpha: float, side: str = LEFT) -> DiffMatrix:
    kind = Kind.RL_L if side == LEFT else Kind.RL_R
    return operator_matrix(grid, OperatorSpec(kind, alpha))


def riesz_matrix(grid: Grid, alpha: float, flavor: str = "rl") -> DiffMatrix:
    """Riesz matrix built on Riemann-Liouville (``flavor='rl'``) or Caputo (``'caputo'``) halves."""
    if flavor not in ("rl", "caputo"):
        raise ValueError(f"flavor must be 'rl' or 'caputo', got {flavor!r}")
    kind = Kind.RIESZ if flavor == "rl" else Kind.RIESZ_CAPUTO
    return operator_matrix(grid, OperatorSpec(kind, alpha))


def classical_matrix(grid: Grid, k: int) -> DiffMatrix:
    return operator_matrix(grid, OperatorSpec(Kind.CLASSICAL, k))
