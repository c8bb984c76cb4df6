"""Collocation solvers for the Bagley-Torvik equation and fractional diffusion.

Bagley-Torvik::

    u'' + b(x) C_D^alpha u + c(x) u = f   on (x_a, x_b),  1 < alpha < 2

with either initial data ``u(x_a), u'(x_a)`` or boundary data
``u(x_a), u(x_b)``.

Two-sided fractional diffusion::

    u_t = c_+(x) RL_D_L^alpha u + c_-(x) RL_D_R^alpha u + f(x, t)

with Dirichlet data, advanced in time by the trapezoidal rule.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .grids import Grid, jgl_grid
from .jacobi import JacobiParams
from .matrices import Kind, OperatorSpec, operator_matrix, riesz_constant

Coefficient = float | Callable[[np.ndarray], np.ndarray]
COND_LIMIT = 1e15
SERIES_RTOL = 1e-18
SERIES_DPS = 30
FORCING_RULES = ("trapezoidal", "midpoint")


class SingularSystemError(np.linalg.LinAlgError):
    def __init__(self, cond: float):
        super().__init__(f"collocation system is singular to working precision (cond ~ {cond:.3e})")
        self.cond = cond


class ConsistencyWarning(UserWarning):
    pass


def _check_alpha(alpha: float) -> None:
    if not 1 < alpha < 2:
        raise ValueError(f"alpha must lie in (1, 2), got {alpha}")


def _sample(coef: Coefficient, x: np.ndarray) -> np.ndarray:
    if callable(coef):
        return np.broadcast_to(np.asarray(coef(x), dtype=float), x.shape)
    return np.full(x.shape, float(coef))


def _factor(A: np.ndarray):
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularSystemError(cond)
    return lu_factor(A)


@dataclass(frozen=True, eq=False)
class SolveReport:
    grid: Grid
    u: np.ndarray
    error: float | None = None
    wall_time: float = 0.0
    times: np.ndarray | None = None
    history: np.ndarray | None = None

    @property
    def x(self) -> np.ndarray:
        return self.grid.physical_nodes


# ----------------------------------------------------------------------------
# Bagley-Torvik


@dataclass(frozen=True)
class BagleyTorvikProblem:
    alpha: float
    f: Callable[[np.ndarray], np.ndarray]
    mode: str = "ivp"
    interval: tuple[float, float] = (0.0, 1.0)
    b: Coefficient = 1.0
    c: Coefficient = 1.0
    phi_a: float = 0.0
    dphi_a: float | None = None
    phi_b: float | None = None
    exact: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)
        if self.mode == "ivp" and self.dphi_a is None:
            raise ValueError("initial value problem needs dphi_a")
        if self.mode == "bvp" and self.phi_b is None:
            raise ValueError("boundary value problem needs phi_b")
        if self.mode not in ("ivp", "bvp"):
            raise ValueError(f"mode must be 'ivp' or 'bvp', got {self.mode!r}")
        if not self.interval[1] > self.interval[0]:
            raise ValueError(f"degenerate interval {self.interval}")


def _bt_rows(p: BagleyTorvikProblem, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Collocation rows at the interior nodes and their right-hand side."""
    if (grid.x_a, grid.x_b) != tuple(map(float, p.interval)):
        grid = grid.on_interval(*p.interval)
    x = grid.physical_nodes
    inner = slice(1, grid.N)
    D2 = operator_matrix(grid, OperatorSpec(Kind.CLASSICAL, 2)).entries
    Da = operator_matrix(grid, OperatorSpec(Kind.CAPUTO_L, p.alpha)).entries
    rows = D2[inner] + _sample(p.b, x)[inner, None] * Da[inner] + np.diag(_sample(p.c, x))[inner]
    return rows, _sample(p.f, x)[inner]


def _finish(p, grid: Grid, u: np.ndarray, t0: float) -> SolveReport:
    grid = grid.on_interval(*p.interval)
    err = None
    if p.exact is not None:
        err = float(np.max(np.abs(u - p.exact(grid.physical_nodes))))
    return SolveReport(grid, u, err, time.perf_counter() - t0)


def solve_bagley_torvik_ivp(p: BagleyTorvikProblem, grid: Grid) -> SolveReport:
    """Collocate at interior nodes; the derivative condition is the last equation."""
    t0 = time.perf_counter()
    if p.dphi_a is None:
        raise ValueError("initial value problem needs dphi_a")
    if grid.N < 4:
        raise ValueError("Bagley-Torvik collocation needs N >= 4")
    grid = grid.on_interval(*p.interval)
    rows, rhs = _bt_rows(p, grid)
    D1 = operator_matrix(grid, OperatorSpec(Kind.CLASSICAL, 1)).entries
    A = np.vstack([rows, D1[:1]])
    rhs = np.append(rhs, p.dphi_a)
    # u_0 is known: move its column to the right-hand side
    rhs = rhs - A[:, 0] * p.phi_a
    sol = lu_solve(_factor(A[:, 1:]), rhs)
    return _finish(p, grid, np.concatenate(([p.phi_a], sol)), t0)


def solve_bagley_torvik_bvp(p: BagleyTorvikProblem, grid: Grid) -> SolveReport:
    t0 = time.perf_counter()
    if p.phi_b is None:
        raise ValueError("boundary value problem needs phi_b")
    if grid.N < 4:
        raise ValueError("Bagley-Torvik collocation needs N >= 4")
    grid = grid.on_interval(*p.interval)
    A, rhs = _bt_rows(p, grid)
    rhs = rhs - A[:, 0] * p.phi_a - A[:, -1] * p.phi_b
    sol = lu_solve(_factor(A[:, 1:-1]), rhs)
    return _finish(p, grid, np.concatenate(([p.phi_a], sol, [p.phi_b])), t0)


def solve_bagley_torvik(p: BagleyTorvikProblem, grid: Grid) -> SolveReport:
    solver = solve_bagley_torvik_ivp if p.mode == "ivp" else solve_bagley_torvik_bvp
    return solver(p, grid)


def caputo_sine_series(w: float, alpha: float, x, x_a: float = 0.0) -> np.ndarray:
    """Left Caputo derivative of ``sin(w x)`` with lower limit ``x_a``.

    Termwise on the Taylor series about ``x_a``; each term
    ``w**k sin(w x_a + k pi/2) (x - x_a)**k / k!`` maps to
    ``w**k sin(w x_a + k pi/2) (x - x_a)**(k - alpha) / Gamma(k + 1 - alpha)``
    for ``k >= 2``.  Terms grow to about ``exp(|w| (x - x_a))`` before they
    decay, so the sum runs in multiprecision with enough guard digits to
    absorb that cancellation.
    """
    x = np.asarray(x, dtype=float)
    t = np.maximum(x - x_a, 0.0)
    out = np.zeros(x.shape)
    if w == 0:
        return out
    for idx in np.ndindex(x.shape):
        ti = float(t[idx])
        if ti == 0.0:
            continue
        wt = abs(w) * ti
        with mpmath.workdps(SERIES_DPS + int(wt / math.log(10)) + 1):
            W, T, al = mpmath.mpf(w), mpmath.mpf(ti), mpmath.mpf(alpha)
            theta = W * mpmath.mpf(x_a)
            phase = (mpmath.sin(theta), mpmath.cos(theta), -mpmath.sin(theta), -mpmath.cos(theta))
            coef = W**2 * T ** (2 - al) * mpmath.rgamma(3 - al)
            step = W * T
            acc = mpmath.mpf(0)
            k = 2
            while True:
                term = coef * phase[k % 4]
                acc += term
                if k > wt and abs(coef) <= SERIES_RTOL * abs(acc):
                    break
                # w**(k+1) t**(k+1-alpha) / Gamma(k+2-alpha) from the k-th coefficient
                coef = coef * step / (k + 1 - al)
                k += 1
            out[idx] = float(acc)
    return out


def manufactured_rhs_bt(
    w: float,
    alpha: float,
    x,
    interval: tuple[float, float] = (0.0, 1.0),
    b: float = 1.0,
    c: float = 1.0,
) -> np.ndarray:
    """Forcing for which ``sin(w x)`` solves the Bagley-Torvik equation."""
    _check_alpha(alpha)
    x = np.asarray(x, dtype=float)
    s = np.sin(w * x)
    return -(w**2) * s + b * caputo_sine_series(w, alpha, x, interval[0]) + c * s


def bagley_torvik_example(w: float, alpha: float, mode: str = "ivp") -> BagleyTorvikProblem:
    """Manufactured problem on [0, 1] with exact solution ``sin(w x)`` and b = c = 1."""
    kw = dict(dphi_a=float(w)) if mode == "ivp" else dict(phi_b=math.sin(w))
    return BagleyTorvikProblem(
        alpha=alpha,
        f=lambda x: manufactured_rhs_bt(w, alpha, x),
        mode=mode,
        interval=(0.0, 1.0),
        phi_a=0.0,
        exact=lambda x: np.sin(w * np.asarray(x)),
        **kw,
    )


# ----------------------------------------------------------------------------
# fractional diffusion


@dataclass(frozen=True)
class DiffusionProblem:
    alpha: float
    f: Callable[[np.ndarray, float], np.ndarray]
    phi0: Callable[[np.ndarray], np.ndarray]
    T: float
    tau: float
    interval: tuple[float, float] = (0.0, 1.0)
    c_plus: Coefficient = 1.0
    c_minus: Coefficient = 1.0
    phi_a: Callable[[float], float] = lambda t: 0.0
    phi_b: Callable[[float], float] = lambda t: 0.0
    exact: Callable[[np.ndarray, float], np.ndarray] | None = None
    keep_history: bool = False
    # "trapezoidal" averages the forcing over both time levels,
    # "midpoint" samples it once at the half step
    forcing: str = "trapezoidal"

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)
        if self.forcing not in FORCING_RULES:
            raise ValueError(f"forcing must be one of {FORCING_RULES}, got {self.forcing!r}")
        if not (self.T > 0 and self.tau > 0):
            raise ValueError("T and tau must be positive")
        x_a, x_b = self.interval
        if not x_b > x_a:
            raise ValueError(f"degenerate interval {self.interval}")
        mismatch = max(
            abs(float(self.phi0(np.array(x_a))) - self.phi_a(0.0)),
            abs(float(self.phi0(np.array(x_b))) - self.phi_b(0.0)),
        )
        if mismatch > 1e-12:
            warnings.warn(
                f"boundary data and initial profile disagree by {mismatch:.3e} at t=0",
                ConsistencyWarning,
                stacklevel=3,
            )


def diffusion_operator(p: DiffusionProblem, grid: Grid) -> np.ndarray:
    """Rows 1..N-1 of the semi-discrete operator, all N+1 columns."""
    grid = grid.on_interval(*p.interval)
    x = grid.physical_nodes
    inner = slice(1, grid.N)
    L = operator_matrix(grid, OperatorSpec(Kind.RL_L, p.alpha)).entries
    R = operator_matrix(grid, OperatorSpec(Kind.RL_R, p.alpha)).entries
    return _sample(p.c_plus, x)[inner, None] * L[inner] + _sample(p.c_minus, x)[inner, None] * R[inner]


def _time_levels(T: float, tau: float) -> np.ndarray:
    m = T / tau
    steps = round(m)
    if abs(m - steps) <= 1e-12 * max(1.0, m):
        return np.linspace(0.0, T, steps + 1)
    levels = tau * np.arange(math.floor(m) + 1)
    return np.append(levels, T)


def solve_fractional_diffusion(p: DiffusionProblem, grid: Grid) -> SolveReport:
    """Trapezoidal time stepping of the interior unknowns.

    The step matrix is factorized once per distinct step length.  Boundary
    columns of the operator act on the known boundary data and are folded
    into the forcing at each time level.
    """
    t0 = time.perf_counter()
    grid = grid.on_interval(*p.interval)
    N = grid.N
    x = grid.physical_nodes
    A = diffusion_operator(p, grid)
    A_I, A_B = A[:, 1:N], A[:, [0, N]]
    eye = np.eye(N - 1)

    def g(t: float) -> np.ndarray:
        return np.asarray(p.f(x[1:N], t), dtype=float) + A_B @ np.array([p.phi_a(t), p.phi_b(t)])

    levels = _time_levels(p.T, p.tau)
    u = np.asarray(p.phi0(x), dtype=float).copy()
    history = [u.copy()] if p.keep_history else None
    factors: dict[float, tuple] = {}
    g_old = g(levels[0])
    for t_old, t_new in zip(levels[:-1], levels[1:]):
        dt = t_new - t_old
        key = round(dt, 15)
        if key not in factors:
            factors[key] = (_factor(eye - dt / 2 * A_I), eye + dt / 2 * A_I)
        lu, rhs_mat = factors[key]
        g_new = g(t_new)
        if p.forcing == "midpoint":
            load = dt * g(t_old + dt / 2)
        else:
            load = dt / 2 * (g_old + g_new)
        ui = lu_solve(lu, rhs_mat @ u[1:N] + load)
        u = np.concatenate(([p.phi_a(t_new)], ui, [p.phi_b(t_new)]))
        if history is not None:
            history.append(u.copy())
        g_old = g_new

    err = None
    if p.exact is not None:
        err = float(np.max(np.abs(u - p.exact(x, levels[-1]))))
    return SolveReport(
        grid,
        u,
        err,
        time.perf_counter() - t0,
        times=levels,
        history=np.array(history) if history is not None else None,
    )


def _profile(x: np.ndarray) -> np.ndarray:
    return x**2 * (1 - x) ** 2


def _rl_power(k: int, alpha: float, t: np.ndarray) -> np.ndarray:
    # RL derivative of t**k with lower limit at t = 0
    return math.gamma(k + 1) / math.gamma(k + 1 - alpha) * t ** (k - alpha)


def manufactured_rhs_diffusion(alpha: float, x, t: float) -> np.ndarray:
    """Forcing for ``u = (t + 1)**alpha x**2 (1 - x)**2`` under the Riesz operator on [0, 1].

    The profile is ``x**2 - 2 x**3 + x**4`` and, being symmetric under
    ``x -> 1 - x``, has the same coefficients in powers of ``1 - x``.
    """
    _check_alpha(alpha)
    x = np.asarray(x, dtype=float)
    coeffs = {2: 1.0, 3: -2.0, 4: 1.0}
    left = sum(ck * _rl_power(k, alpha, x) for k, ck in coeffs.items())
    right = sum(ck * _rl_power(k, alpha, 1 - x) for k, ck in coeffs.items())
    riesz = riesz_constant(alpha) * (left + right)
    return alpha * (t + 1) ** (alpha - 1) * _profile(x) - (t + 1) ** alpha * riesz


def diffusion_example(alpha: float, tau: float = 1e-2, T: float = 10.0, **kw) -> DiffusionProblem:
    """Riesz diffusion on [0, 1] with exact solution ``(t + 1)**alpha x**2 (1 - x)**2``."""
    c = riesz_constant(alpha)
    return DiffusionProblem(
        alpha=alpha,
        f=lambda x, t: manufactured_rhs_diffusion(alpha, x, t),
        phi0=_profile,
        T=T,
        tau=tau,
        interval=(0.0, 1.0),
        c_plus=c,
        c_minus=c,
        exact=lambda x, t: (t + 1) ** alpha * _profile(np.asarray(x)),
        **kw,
    )


def example_grid(a: float, b: float, N: int, interval=(0.0, 1.0)) -> Grid:
    return jgl_grid(JacobiParams(a, b), N, interval)
