"""Reference values of fractional operators applied to named test functions.

Two independent routes are available:

``series``
    Expand the function about the lower integration limit and apply the
    closed-form Gamma-ratio rule to each power term.  The sum is carried
    out in multiprecision arithmetic, with working digits growing with the
    degree, because the shifted Taylor coefficients of a high-degree
    polynomial cancel heavily.
``quadrature``
    Evaluate the defining integral with a 64-point Gauss-Jacobi rule whose
    weight absorbs the algebraic endpoint singularity.  Riemann-Liouville
    derivatives differentiate under the integral after the substitution
    ``s = a + (x - a) * tau`` and apply Leibniz's rule.

Right-sided operators are evaluated as left-sided ones on the reflected
function ``x -> f(-x)``; for every kind in this module the reflection
carries no sign.

Nothing in the production path imports this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Protocol

import mpmath
import numpy as np
from numpy.polynomial import Polynomial as _NpPoly
from scipy.special import eval_jacobi, roots_jacobi

from .matrices import Kind, OperatorSpec, riesz_constant

QUAD_POINTS = 64
MAX_POLY_DEGREE = 64
SERIES_DPS = 40


class DivergenceError(ArithmeticError):
    """A Riemann-Liouville value was requested where it is infinite."""


class TestFunction(Protocol):
    def __call__(self, x): ...

    def derivative(self, k: int, x): ...

    def taylor(self, center: float, radius: float) -> list: ...

    def reflected(self) -> TestFunction: ...


@dataclass(frozen=True)
class Polynomial:
    """Power-basis polynomial ``sum c_k x**k``."""

    coeffs: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) - 1 > MAX_POLY_DEGREE:
            raise ValueError(f"polynomial degree is capped at {MAX_POLY_DEGREE}")

    @property
    def _p(self) -> _NpPoly:
        return _NpPoly(self.coeffs)

    def __call__(self, x):
        return self._p(np.asarray(x, dtype=float))

    def derivative(self, k: int, x):
        return self._p.deriv(k)(np.asarray(x, dtype=float)) if k else self(x)

    def taylor(self, center: float, radius: float = 0.0) -> list:
        c = [mpmath.mpf(v) for v in self.coeffs]
        z = mpmath.mpf(center)
        return [
            mpmath.fsum(c[i] * mpmath.binomial(i, k) * z ** (i - k) for i in range(k, len(c)))
            for k in range(len(c))
        ]

    def reflected(self) -> Polynomial:
        return Polynomial(tuple(c * (-1) ** k for k, c in enumerate(self.coeffs)))


@dataclass(frozen=True)
class Sine:
    """``sin(w * x + phase)``."""

    w: float
    phase: float = 0.0

    def __call__(self, x):
        return np.sin(self.w * np.asarray(x, dtype=float) + self.phase)

    def derivative(self, k: int, x):
        return self.w**k * np.sin(self.w * np.asarray(x, dtype=float) + self.phase + k * np.pi / 2)

    def taylor(self, center: float, radius: float) -> list:
        # stop once (w r)**k / k! is far below the working precision
        wr = abs(self.w) * radius
        kmax = 10
        while kmax < wr or kmax * math.log(max(wr, 1e-300)) - math.lgamma(kmax + 1) > -40 * math.log(10):
            kmax += 1
        w = mpmath.mpf(self.w)
        arg = w * mpmath.mpf(center) + mpmath.mpf(self.phase)
        return [w**k * mpmath.sin(arg + k * mpmath.pi / 2) / mpmath.factorial(k) for k in range(kmax + 1)]

    def reflected(self) -> Sine:
        # sin(-w x + phase) = sin(w x + pi - phase)
        return Sine(self.w, math.pi - self.phase)


@dataclass(frozen=True)
class JacobiFunction:
    """A single Jacobi polynomial ``P_j^{a,b}``, evaluated by SciPy."""

    a: float
    b: float
    j: int
    mirrored: bool = False

    def __call__(self, x):
        return self.derivative(0, x)

    def derivative(self, k: int, x):
        x = np.asarray(x, dtype=float)
        if k > self.j:
            return np.zeros_like(x)
        y = -x if self.mirrored else x
        d = 1.0
        for i in range(k):
            d *= 0.5 * (self.j + self.a + self.b + 1 + i)
        sign = (-1) ** k if self.mirrored else 1
        return sign * d * eval_jacobi(self.j - k, self.a + k, self.b + k, y)

    def taylor(self, center: float, radius: float = 0.0) -> list:
        z = -mpmath.mpf(center) if self.mirrored else mpmath.mpf(center)
        out = []
        for k in range(self.j + 1):
            d = mpmath.mpf(1)
            for i in range(k):
                d *= (self.j + self.a + self.b + 1 + i) / mpmath.mpf(2)
            sign = (-1) ** k if self.mirrored else 1
            out.append(sign * d * mpmath.jacobi(self.j - k, self.a + k, self.b + k, z) / mpmath.factorial(k))
        return out

    def reflected(self) -> JacobiFunction:
        return JacobiFunction(self.a, self.b, self.j, not self.mirrored)


NAMED_FUNCTIONS = {
    "one": Polynomial((1.0,)),
    "x": Polynomial((0.0, 1.0)),
    "x+1": Polynomial((1.0, 1.0)),
    "1-x": Polynomial((1.0, -1.0)),
    "sin": Sine(1.0),
    "sin4pi": Sine(4 * math.pi),
    "bump": Polynomial((0.0, 0.0, 1.0, -2.0, 1.0)),  # x**2 (1 - x)**2
}


def named_function(name: str) -> TestFunction:
    """Look up a function by name; ``sin:<w>`` and ``poly:<c0>,<c1>,...`` are also accepted."""
    if name in NAMED_FUNCTIONS:
        return NAMED_FUNCTIONS[name]
    if name.startswith("sin:"):
        return Sine(float(name[4:]))
    if name.startswith("poly:"):
        return Polynomial(tuple(float(c) for c in name[5:].split(",")))
    raise KeyError(f"unknown test function {name!r}")


@dataclass(frozen=True)
class OracleRequest:
    operator: OperatorSpec
    function: TestFunction
    interval: tuple = (-1.0, 1.0)
    points: np.ndarray = field(default_factory=lambda: np.array([0.0]))


@lru_cache(maxsize=256)
def _gauss_jacobi(a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    return roots_jacobi(QUAD_POINTS, a, b)


# ----------------------------------------------------------------------------
# left-sided engines; ``t`` is the distance to the lower limit


def _degree_hint(f: TestFunction) -> int:
    if isinstance(f, Polynomial):
        return len(f.coeffs)
    if isinstance(f, JacobiFunction):
        return f.j
    return 0


def _series_left(kind: Kind, alpha: float, f: TestFunction, lower: float, t: np.ndarray, radius: float):
    n = int(math.ceil(alpha))
    # a degree-m expansion about an endpoint cancels about 0.6 m digits
    with mpmath.workdps(SERIES_DPS + _degree_hint(f)):
        c = f.taylor(lower, radius)
        al = mpmath.mpf(alpha)
        terms = []  # (coefficient, exponent)
        for k, ck in enumerate(c):
            if ck == 0:
                continue
            if kind is Kind.INTEGRAL_L:
                terms.append((ck * mpmath.factorial(k) / mpmath.gamma(k + 1 + al), k + al))
            elif kind is Kind.CLASSICAL:
                if k >= alpha:
                    terms.append((ck * mpmath.factorial(k) / mpmath.factorial(k - int(alpha)), k - al))
            elif not (kind is Kind.CAPUTO_L and k < n):
                coef = ck * mpmath.factorial(k) * mpmath.rgamma(k + 1 - al)
                if coef != 0:
                    terms.append((coef, k - al))
        out = np.empty(t.shape)
        for i, ti in enumerate(t.ravel()):
            tm = mpmath.mpf(float(ti))
            acc = mpmath.mpf(0)
            for coef, e in terms:
                if tm == 0:
                    if e < 0:
                        raise DivergenceError("Riemann-Liouville derivative is infinite at the endpoint")
                    if e == 0:
                        acc += coef
                else:
                    acc += coef * tm**e
            out.flat[i] = float(acc)
    return out


def _frac_integral_quad(g, beta: float, lower: float, x: np.ndarray) -> np.ndarray:
    """(1/Gamma(beta)) int_lower^x (x - s)**(beta - 1) g(s) ds."""
    u, w = _gauss_jacobi(beta - 1.0, 0.0)
    t = x - lower
    s = x[:, None] - t[:, None] * (1 - u[None, :]) / 2
    return (t / 2) ** beta * (g(s) @ w) / math.gamma(beta)


def _rl_quad(f: TestFunction, alpha: float, lower: float, x: np.ndarray) -> np.ndarray:
    n = int(math.ceil(alpha))
    beta = n - alpha
    t = x - lower
    out = np.zeros_like(x)
    for m in range(n + 1):
        # G^(m)(t) = int_0^1 (1 - tau)**(beta - 1) tau**m f^(m)(lower + t tau) dtau
        u, w = _gauss_jacobi(beta - 1.0, float(m))
        tau = (1 + u) / 2
        vals = f.derivative(m, lower + t[:, None] * tau[None, :])
        G = (vals @ w) / 2 ** (beta + m)
        r = n - m
        power = math.gamma(beta + 1) / math.gamma(beta + 1 - r) * t ** (beta - r)
        out = out + math.comb(n, m) * power * G
    return out / math.gamma(beta)


def _quad_left(kind: Kind, alpha: float, f: TestFunction, lower: float, x: np.ndarray):
    if kind is Kind.INTEGRAL_L:
        return _frac_integral_quad(f, alpha, lower, x)
    n = int(math.ceil(alpha))
    if kind is Kind.CLASSICAL or n == alpha:
        return f.derivative(n, x)
    if kind is Kind.CAPUTO_L:
        return _frac_integral_quad(lambda s: f.derivative(n, s), n - alpha, lower, x)
    if kind is Kind.RL_L:
        if np.any(x - lower == 0):
            raise DivergenceError("quadrature route needs points strictly inside the interval")
        return _rl_quad(f, alpha, lower, x)
    raise ValueError(f"no left engine for {kind}")


_LEFT_OF = {
    Kind.INTEGRAL_R: Kind.INTEGRAL_L,
    Kind.CAPUTO_R: Kind.CAPUTO_L,
    Kind.RL_R: Kind.RL_L,
}


def oracle_eval(req: OracleRequest, method: str = "auto") -> np.ndarray:
    """Reference values of ``req.operator`` applied to ``req.function`` at ``req.points``.

    ``method`` is ``'series'``, ``'quadrature'`` or ``'auto'`` (series
    whenever the function can expand itself, quadrature otherwise).
    """
    spec, f = req.operator, req.function
    x_a, x_b = map(float, req.interval)
    x = np.atleast_1d(np.asarray(req.points, dtype=float))
    if method == "auto":
        method = "series" if hasattr(f, "taylor") else "quadrature"
    if method not in ("series", "quadrature"):
        raise ValueError(f"unknown oracle method {method!r}")
    kind, alpha = spec.kind, float(spec.alpha)

    def one_sided(kind: Kind) -> np.ndarray:
        if kind in _LEFT_OF:
            g, lower, pts, kind = f.reflected(), -x_b, -x, _LEFT_OF[kind]
        else:
            g, lower, pts = f, x_a, x
        if method == "series":
            return _series_left(kind, alpha, g, lower, pts - lower, x_b - x_a)
        return _quad_left(kind, alpha, g, lower, pts)

    if kind is Kind.RIESZ:
        return riesz_constant(alpha) * (one_sided(Kind.RL_L) + one_sided(Kind.RL_R))
    if kind is Kind.RIESZ_CAPUTO:
        return riesz_constant(alpha) * (one_sided(Kind.CAPUTO_L) + one_sided(Kind.CAPUTO_R))
    return one_sided(kind)
