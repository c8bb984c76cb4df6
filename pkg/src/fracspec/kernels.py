"""Fractional integrals of Jacobi polynomials by forward recurrence.

For a node vector ``x`` the left kernel column ``j`` holds

    (1/Gamma(alpha)) * integral_{-1}^{x} (x - s)**(alpha - 1) P_j(s) ds

and the right kernel the mirror integral over ``[x, 1]``.  All columns are
produced at once, which is what matrix assembly needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jacobi import JacobiParams, jacobi_endpoint, recurrence_coeffs

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True, eq=False)
class KernelTable:
    params: JacobiParams
    alpha: float
    side: str
    x: np.ndarray
    values: np.ndarray

    @property
    def j_max(self) -> int:
        return self.values.shape[1] - 1


def _check(alpha: float, side: str) -> None:
    if not alpha > 0:
        raise ValueError(f"fractional integral order must be positive, got {alpha}")
    if side not in (LEFT, RIGHT):
        raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}, got {side!r}")


def _as_real(x) -> np.ndarray:
    # keeps extended precision when the caller asks for it
    x = np.asarray(x)
    return x if x.dtype == np.longdouble else x.astype(float)


def _distance(x: np.ndarray, side: str) -> np.ndarray:
    # distance to the lower limit of integration, clipped against roundoff
    t = x + 1.0 if side == LEFT else 1.0 - x
    return np.maximum(t, 0.0)


def _phat(p: JacobiParams, alpha: float, j_max: int, x, side: str) -> KernelTable:
    _check(alpha, side)
    x = _as_real(x)
    t = _distance(x, side)
    ta = t**alpha
    g1 = math.gamma(alpha + 1)
    g2 = math.gamma(alpha + 2)
    sign = -1.0 if side == LEFT else 1.0
    end = "left" if side == LEFT else "right"

    out = np.empty(x.shape + (j_max + 1,), dtype=x.dtype)
    out[..., 0] = ta / g1
    if j_max >= 1:
        out[..., 1] = 0.5 * (p.a + p.b + 2) * (x * ta / g1 + sign * alpha * t * ta / g2) + 0.5 * (
            p.a - p.b
        ) * out[..., 0]
    ends = [jacobi_endpoint(p, j, end) for j in range(j_max + 1)]
    for j in range(1, j_max):
        r = recurrence_coeffs(p, j)
        aa = alpha * r.A
        denom = 1 + aa * r.Chat
        q = r.Ahat * ends[j - 1] + r.Bhat * ends[j] + r.Chat * ends[j + 1]
        out[..., j + 1] = (
            (r.A * x - r.B - aa * r.Bhat) * out[..., j]
            - (r.C + aa * r.Ahat) * out[..., j - 1]
            + aa * q / g1 * ta
        ) / denom
    return KernelTable(p, alpha, side, x, out)


def phat_left(p: JacobiParams, alpha: float, j_max: int, x) -> KernelTable:
    """Left fractional integrals of ``P_0 .. P_{j_max}`` at the points ``x``."""
    return _phat(p, alpha, j_max, x, LEFT)


def phat_right(p: JacobiParams, alpha: float, j_max: int, x) -> KernelTable:
    """Right fractional integrals of ``P_0 .. P_{j_max}`` at the points ``x``."""
    return _phat(p, alpha, j_max, x, RIGHT)


def _lhat(alpha: float, j_max: int, x, side: str) -> KernelTable:
    _check(alpha, side)
    x = _as_real(x)
    t = _distance(x, side)
    ta = t**alpha
    sign = -1.0 if side == LEFT else 1.0
    out = np.empty(x.shape + (j_max + 1,), dtype=x.dtype)
    out[..., 0] = ta / math.gamma(alpha + 1)
    if j_max >= 1:
        out[..., 1] = x * ta / math.gamma(alpha + 1) + sign * alpha * t * ta / math.gamma(alpha + 2)
    for j in range(1, j_max):
        out[..., j + 1] = ((2 * j + 1) * x * out[..., j] - (j - alpha) * out[..., j - 1]) / (j + 1 + alpha)
    return KernelTable(JacobiParams(0.0, 0.0), alpha, side, x, out)


def lhat_left(alpha: float, j_max: int, x) -> KernelTable:
    """Legendre specialisation of :func:`phat_left`."""
    return _lhat(alpha, j_max, x, LEFT)


def lhat_right(alpha: float, j_max: int, x) -> KernelTable:
    """Legendre specialisation of :func:`phat_right`."""
    return _lhat(alpha, j_max, x, RIGHT)


def _that(alpha: float, j_max: int, x, side: str) -> np.ndarray:
    _check(alpha, side)
    x = _as_real(x)
    t = _distance(x, side)
    ta = t**alpha
    g1, g2, g3 = math.gamma(alpha + 1), math.gamma(alpha + 2), math.gamma(alpha + 3)
    sign = -1.0 if side == LEFT else 1.0
    out = np.empty(x.shape + (j_max + 1,), dtype=x.dtype)
    out[..., 0] = ta / g1
    if j_max >= 1:
        out[..., 1] = x * ta / g1 + sign * alpha * t * ta / g2
    if j_max >= 2:
        # T_2 = 2 t**2 - 4 t + 1 in the distance variable; integral of t**2 carries Gamma(3)
        out[..., 2] = 4 * t * t * ta / g3 - 4 * t * ta / g2 + ta / g1
    for j in range(2, j_max):
        corr = 2 * alpha * ta / (g1 * (j + 1 + alpha) * (j - 1))
        # left carries (-1)**j, right is the x -> -x reflection of left: always negative
        if side == RIGHT or j % 2:
            corr = -corr
        out[..., j + 1] = (
            2 * (j + 1) * x / (j + 1 + alpha) * out[..., j]
            - (j + 1) * (j - 1 - alpha) / ((j + 1 + alpha) * (j - 1)) * out[..., j - 1]
            + corr
        )
    return out


def that_left(alpha: float, j_max: int, x) -> KernelTable:
    """Left fractional integrals of the Chebyshev polynomials ``T_0 .. T_{j_max}``."""
    x = _as_real(x)
    return KernelTable(JacobiParams(-0.5, -0.5), alpha, LEFT, x, _that(alpha, j_max, x, LEFT))


def that_right(alpha: float, j_max: int, x) -> KernelTable:
    """Right fractional integrals of the Chebyshev polynomials ``T_0 .. T_{j_max}``."""
    x = _as_real(x)
    return KernelTable(JacobiParams(-0.5, -0.5), alpha, RIGHT, x, _that(alpha, j_max, x, RIGHT))


def chebyshev_scale(j_max: int) -> np.ndarray:
    """Factors ``Gamma(j + 1/2) / (j! sqrt(pi))`` linking ``T_j`` to ``P_j^{-1/2,-1/2}``."""
    j = np.arange(j_max + 1)
    return np.exp([math.lgamma(k + 0.5) - math.lgamma(k + 1) - 0.5 * math.log(math.pi) for k in j])


def fractional_integral_table(p: JacobiParams, alpha: float, j_max: int, x, side: str) -> np.ndarray:
    """Kernel values for any parameters, using the Legendre fast path when it applies."""
    if p.is_legendre:
        return _lhat(alpha, j_max, x, side).values
    return _phat(p, alpha, j_max, x, side).values
