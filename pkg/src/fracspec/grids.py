"""Jacobi-Gauss type collocation grids and affine interval maps."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .jacobi import JacobiParams, jacobi_table, weight_mass

NEWTON_TOL = 1e-14
NEWTON_MAXITER = 100


class ConvergenceError(RuntimeError):
    pass


class Family(str, enum.Enum):
    LOBATTO = "lobatto"
    GAUSS = "gauss"
    RADAU = "radau"


@dataclass(frozen=True)
class AffineMap:
    x_a: float = -1.0
    x_b: float = 1.0

    def __post_init__(self) -> None:
        if not self.x_b > self.x_a:
            raise ValueError(f"degenerate interval [{self.x_a}, {self.x_b}]")

    @property
    def scale(self) -> float:
        return (self.x_b - self.x_a) / 2

    @property
    def shift(self) -> float:
        return (self.x_a + self.x_b) / 2

    @property
    def is_identity(self) -> bool:
        return self.x_a == -1.0 and self.x_b == 1.0

    def to_physical(self, xhat):
        return ((self.x_b - self.x_a) * np.asarray(xhat) + self.x_a + self.x_b) / 2

    def to_reference(self, x):
        return (2 * np.asarray(x) - self.x_a - self.x_b) / (self.x_b - self.x_a)


def affine_to_physical(m: AffineMap, xhat):
    return m.to_physical(xhat)


def affine_to_reference(m: AffineMap, x):
    return m.to_reference(x)


@dataclass(frozen=True, eq=False)
class Grid:
    """Collocation nodes on [-1, 1] with quadrature weights for the Jacobi weight.

    ``nodes`` and ``weights`` live on the reference interval; ``interval``
    records where the grid is used physically.
    """

    params: JacobiParams
    family: Family
    N: int
    nodes: np.ndarray
    weights: np.ndarray
    interval: AffineMap = field(default_factory=AffineMap)

    @property
    def x_a(self) -> float:
        return self.interval.x_a

    @property
    def x_b(self) -> float:
        return self.interval.x_b

    @property
    def physical_nodes(self) -> np.ndarray:
        return self.interval.to_physical(self.nodes)

    @property
    def key(self) -> tuple:
        return (self.params.a, self.params.b, self.family.value, self.N)

    def on_interval(self, x_a: float, x_b: float) -> Grid:
        return replace(self, interval=AffineMap(x_a, x_b))


def _jacobi_and_derivative(p: JacobiParams, m: int, x: np.ndarray):
    vals = jacobi_table(p, m, x)[:, m]
    dvals = 0.5 * (m + p.a + p.b + 1) * jacobi_table(p.shifted(1), m - 1, x)[:, m - 1]
    return vals, dvals


def jacobi_gauss_roots(p: JacobiParams, m: int) -> np.ndarray:
    """Roots of ``P_m^{a,b}`` in increasing order.

    Newton's method with implicit deflation against all other current
    estimates (Aberth-Ehrlich), seeded by the asymptotic angle formula.
    """
    if m == 0:
        return np.empty(0)
    k = np.arange(m, 0, -1)
    x = np.cos(np.pi * (4 * k - 1 + 2 * p.a) / (4 * m + 2 * p.a + 2 * p.b + 2))
    for _ in range(NEWTON_MAXITER):
        f, df = _jacobi_and_derivative(p, m, x)
        ratio = f / df
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, np.inf)
        step = ratio / (1 - ratio * np.sum(1.0 / diff, axis=1))
        x = x - step
        if np.max(np.abs(step)) < NEWTON_TOL:
            break
    else:
        raise ConvergenceError(f"Newton iteration for P_{m}^({p.a},{p.b}) roots did not converge")
    return np.sort(x)


def jacobi_gauss_rule(p: JacobiParams, m: int) -> tuple[np.ndarray, np.ndarray]:
    """m-point Gauss-Jacobi rule, exact to degree 2m - 1."""
    x = jacobi_gauss_roots(p, m)
    _, df = _jacobi_and_derivative(p, m, x)
    a, b = p.a, p.b
    logc = (
        (a + b + 1) * math.log(2)
        + math.lgamma(m + a + 1)
        + math.lgamma(m + b + 1)
        - math.lgamma(m + a + b + 1)
        - math.lgamma(m + 1)
    )
    w = math.exp(logc) / ((1 - x * x) * df * df)
    return x, w


@lru_cache(maxsize=256)
def _reference_rule(a: float, b: float, family: Family, N: int) -> tuple[np.ndarray, np.ndarray]:
    p = JacobiParams(a, b)
    if family is Family.GAUSS:
        x, w = jacobi_gauss_rule(p, N + 1)
    elif family is Family.RADAU:
        xi, wi = jacobi_gauss_rule(JacobiParams(a, b + 1), N)
        wi = wi / (1 + xi)
        x = np.concatenate(([-1.0], xi))
        w = np.concatenate(([weight_mass(p) - wi.sum()], wi))
    else:
        xi, wi = jacobi_gauss_rule(p.shifted(1), N - 1)
        wi = wi / (1 - xi * xi)
        # endpoint weights from exactness on 1 and x
        mu0 = weight_mass(p)
        mu1 = mu0 * (b - a) / (a + b + 2)
        r0 = mu0 - wi.sum()
        r1 = mu1 - (wi * xi).sum()
        w_left = (r0 - r1) / 2
        w_right = (r0 + r1) / 2
        x = np.concatenate(([-1.0], xi, [1.0]))
        w = np.concatenate(([w_left], wi, [w_right]))
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def make_grid(
    p: JacobiParams,
    N: int,
    family: Family | str = Family.LOBATTO,
    interval: tuple[float, float] = (-1.0, 1.0),
) -> Grid:
    """Grid of ``N + 1`` Jacobi-Gauss(-Radau/-Lobatto) points."""
    family = Family(family)
    if family is Family.LOBATTO and N < 2:
        raise ValueError("Lobatto grids need N >= 2")
    if N < 1:
        raise ValueError("grids need N >= 1")
    x, w = _reference_rule(float(p.a), float(p.b), family, int(N))
    return Grid(p, family, int(N), x, w, AffineMap(*interval))


def jgl_grid(p: JacobiParams, N: int, interval: tuple[float, float] = (-1.0, 1.0)) -> Grid:
    """Jacobi-Gauss-Lobatto grid: the endpoints plus the roots of d/dx P_N^{a,b}."""
    return make_grid(p, N, Family.LOBATTO, interval)
