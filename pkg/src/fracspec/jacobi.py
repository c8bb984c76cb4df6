"""Jacobi polynomials, their recurrence data, derivatives and endpoint values.

Everything here is a pure function of the exponent pair ``(a, b)`` of the
weight ``(1 - x)**a * (1 + x)**b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class PoleError(ValueError):
    """Raised when the gamma function is asked for a value at a pole."""


@dataclass(frozen=True)
class JacobiParams:
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > -1 and self.b > -1):
            raise ValueError(f"Jacobi exponents must exceed -1, got a={self.a}, b={self.b}")

    def shifted(self, m: int) -> JacobiParams:
        """Parameters of the m-th derivative family ``(a + m, b + m)``."""
        return JacobiParams(self.a + m, self.b + m)

    @property
    def is_legendre(self) -> bool:
        return self.a == 0 and self.b == 0

    @property
    def is_chebyshev(self) -> bool:
        return self.a == -0.5 and self.b == -0.5


LEGENDRE = JacobiParams(0.0, 0.0)
CHEBYSHEV = JacobiParams(-0.5, -0.5)


@dataclass(frozen=True)
class RecurrenceCoeffs:
    j: int
    A: float
    B: float
    C: float
    Ahat: float
    Bhat: float
    Chat: float


def gamma(x: float) -> float:
    """Euler's gamma function; raises :class:`PoleError` at 0, -1, -2, ..."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"gamma has a pole at {x}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """Reciprocal gamma, zero at the poles."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)


def _as_params(p: JacobiParams | tuple[float, float]) -> JacobiParams:
    return p if isinstance(p, JacobiParams) else JacobiParams(*p)


def recurrence_coeffs(p: JacobiParams, j: int) -> RecurrenceCoeffs:
    """Three-term and integration-relation coefficients at index ``j >= 1``."""
    if j < 1:
        raise ValueError("recurrence coefficients are defined for j >= 1")
    a, b = p.a, p.b
    s = a + b
    A = (2 * j + s + 1) * (2 * j + s + 2) / (2 * (j + 1) * (j + s + 1))
    B = (b * b - a * a) * (2 * j + s + 1) / (2 * (j + 1) * (j + s + 1) * (2 * j + s))
    C = (j + a) * (j + b) * (2 * j + s + 2) / ((j + 1) * (j + s + 1) * (2 * j + s))
    if j == 1:
        # multiplies d/dx P_0 = 0; the closed form is 0/0 when a + b = -1
        Ahat = 0.0
    else:
        Ahat = -2 * (j + a) * (j + b) / ((j + s) * (2 * j + s) * (2 * j + s + 1))
    Bhat = 2 * (a - b) / ((2 * j + s) * (2 * j + s + 2))
    Chat = 2 * (j + s + 1) / ((2 * j + s + 1) * (2 * j + s + 2))
    return RecurrenceCoeffs(j, A, B, C, Ahat, Bhat, Chat)


def jacobi_table(p: JacobiParams, n: int, x) -> np.ndarray:
    """Values ``P_j(x)`` for ``j = 0..n``; column ``j`` holds degree ``j``."""
    p = _as_params(p)
    x = np.asarray(x)
    if x.dtype != np.longdouble:
        x = x.astype(float)
    out = np.empty(x.shape + (n + 1,), dtype=x.dtype)
    out[..., 0] = 1.0
    if n == 0:
        return out
    out[..., 1] = 0.5 * (p.a + p.b + 2) * x + 0.5 * (p.a - p.b)
    for j in range(1, n):
        r = recurrence_coeffs(p, j)
        out[..., j + 1] = (r.A * x - r.B) * out[..., j] - r.C * out[..., j - 1]
    return out


def jacobi_eval(p: JacobiParams, j: int, x):
    """Evaluate ``P_j^{a,b}(x)`` by forward recurrence."""
    if j < 0:
        raise ValueError("degree must be nonnegative")
    values = jacobi_table(p, j, x)[..., j]
    return float(values) if np.ndim(values) == 0 else values


def jacobi_endpoint(p: JacobiParams, j: int, side: str) -> float:
    """``P_j(1)`` for ``side='right'``, ``P_j(-1)`` for ``side='left'``."""
    p = _as_params(p)
    if side == "right":
        return math.exp(math.lgamma(j + p.a + 1) - math.lgamma(j + 1) - math.lgamma(p.a + 1))
    if side == "left":
        sign = -1.0 if j % 2 else 1.0
        return sign * math.exp(math.lgamma(j + p.b + 1) - math.lgamma(j + 1) - math.lgamma(p.b + 1))
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def jacobi_derivative_factor(p: JacobiParams, j: int, m: int) -> float:
    """Constant ``d`` with ``(d/dx)^m P_j^{a,b} = d * P_{j-m}^{a+m,b+m}``.

    The value is ``Gamma(j + m + a + b + 1) / (2**m Gamma(j + a + b + 1))``,
    i.e. the product ``prod_{i<m} (j + a + b + 1 + i) / 2``.
    """
    p = _as_params(p)
    if m < 0 or m > j:
        raise ValueError(f"derivative order m={m} must satisfy 0 <= m <= j={j}")
    s = j + p.a + p.b + 1
    d = 1.0
    for i in range(m):
        d *= 0.5 * (s + i)
    return d


def orthogonality_norm(p: JacobiParams, n: int) -> float:
    """``gamma_n = integral of P_n**2 (1-x)**a (1+x)**b over [-1, 1]``."""
    p = _as_params(p)
    a, b = p.a, p.b
    if n == 0:
        # (2n + a + b + 1) * Gamma(n + a + b + 1) = Gamma(a + b + 2) at n = 0
        return 2 ** (a + b + 1) * math.exp(
            math.lgamma(a + 1) + math.lgamma(b + 1) - math.lgamma(a + b + 2)
        )
    log = (
        (a + b + 1) * math.log(2)
        + math.lgamma(n + a + 1)
        + math.lgamma(n + b + 1)
        - math.lgamma(n + 1)
        - math.lgamma(n + a + b + 1)
    )
    return math.exp(log) / (2 * n + a + b + 1)


def weight_mass(p: JacobiParams) -> float:
    """Integral of the weight function over [-1, 1]."""
    return orthogonality_norm(p, 0)
