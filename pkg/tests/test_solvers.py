import math
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import gamma

from fracspec.matrices import Kind, OperatorSpec, operator_matrix
from fracspec.oracle import OracleRequest, Polynomial, Sine, oracle_eval
from fracspec.solvers import (
    BagleyTorvikProblem,
    ConsistencyWarning,
    DiffusionProblem,
    SingularSystemError,
    _bt_rows,
    _time_levels,
    bagley_torvik_example,
    caputo_sine_series,
    diffusion_example,
    example_grid,
    manufactured_rhs_bt,
    manufactured_rhs_diffusion,
    solve_bagley_torvik,
    solve_bagley_torvik_bvp,
    solve_bagley_torvik_ivp,
    solve_fractional_diffusion,
)


def bt_error(w, alpha, mode, ab, N):
    return solve_bagley_torvik(bagley_torvik_example(w, alpha, mode), example_grid(*ab, N)).error


# ----------------------------------------------------------------------------
# Bagley-Torvik


def test_ivp_examples():
    assert bt_error(1.0, 1.5, "ivp", (0, 0), 8) <= 1e-8
    assert bt_error(1.0, 1.5, "ivp", (-0.5, -0.5), 16) <= 1e-12


def test_ivp_spectral_convergence():
    errs = [bt_error(1.0, 1.5, "ivp", (0, 0), N) for N in (4, 8, 16)]
    for e0, e1 in zip(errs, errs[1:]):
        assert e1 <= max(e0 * 1e-3, 1e-12)


def test_bvp_examples():
    assert bt_error(4 * math.pi, 1.6, "bvp", (0, 0), 20) == pytest.approx(7.3458e-09, rel=9)
    e = bt_error(4 * math.pi, 1.9, "bvp", (-0.5, -0.5), 16)
    assert 8.5876e-07 / 10 <= e <= 8.5876e-07 * 10


@pytest.mark.parametrize("mode", ["ivp", "bvp"])
def test_polynomial_reproduction(mode):
    alpha = 1.4
    # u = x**2 + x**3 on [0, 1]
    u = Polynomial((0.0, 0.0, 1.0, 1.0))

    def f(x):
        cap = 2 / gamma(3 - alpha) * x ** (2 - alpha) + 6 / gamma(4 - alpha) * x ** (3 - alpha)
        return u.derivative(2, x) + cap + u(x)

    kw = dict(dphi_a=0.0) if mode == "ivp" else dict(phi_b=2.0)
    p = BagleyTorvikProblem(alpha, f, mode, phi_a=0.0, exact=u, **kw)
    assert solve_bagley_torvik(p, example_grid(0, 0, 8)).error <= 1e-11


def test_boundary_conditions_are_imposed_exactly():
    rep = solve_bagley_torvik_bvp(bagley_torvik_example(3.0, 1.3, "bvp"), example_grid(-0.5, 0.5, 12))
    assert rep.u[0] == 0.0 and rep.u[-1] == math.sin(3.0)
    rep = solve_bagley_torvik_ivp(bagley_torvik_example(3.0, 1.3, "ivp"), example_grid(0, 0, 12))
    assert rep.u[0] == 0.0


def test_zero_problem_has_zero_solution():
    p = BagleyTorvikProblem(1.5, lambda x: np.zeros_like(x), "bvp", phi_a=0.0, phi_b=0.0, b=lambda x: 1 + x, c=2.0)
    rep = solve_bagley_torvik(p, example_grid(0, 0, 10))
    assert np.all(rep.u == 0.0)
    assert rep.error is None


def bvp_residual_and_interp_error(N):
    w, alpha = 4 * math.pi, 1.6
    p = bagley_torvik_example(w, alpha, "bvp")
    grid = example_grid(0, 0, N)
    x = grid.physical_nodes
    rows, rhs = _bt_rows(p, grid)
    residual = np.max(np.abs(rows @ np.sin(w * x) - rhs))
    Da = operator_matrix(grid, OperatorSpec(Kind.CAPUTO_L, alpha)).entries
    ref = oracle_eval(OracleRequest(OperatorSpec(Kind.CAPUTO_L, alpha), Sine(w), (0, 1), x[1:-1]), "series")
    return residual, np.max(np.abs(Da[1:-1] @ np.sin(w * x) - ref))


def test_discrete_consistency_at_n24():
    residual, interp = bvp_residual_and_interp_error(24)
    assert residual <= 24 * interp


@pytest.mark.xfail(strict=True, reason="truncation error of the Caputo matrix on sin(4 pi x) is 5e-9 at N = 24")
def test_discrete_consistency_at_n24_below_1e10():
    residual, _ = bvp_residual_and_interp_error(24)
    assert residual <= 1e-10


def test_singular_system_reported():
    p = BagleyTorvikProblem(1.5, lambda x: np.zeros_like(x), "bvp", b=0.0, c=0.0, phi_a=0.0, phi_b=0.0)
    grid = example_grid(0, 0, 8)
    # shift c onto an eigenvalue of the discrete interior second-derivative operator
    rows, _ = _bt_rows(p, grid)
    lam = np.linalg.eigvals(rows[:, 1:-1])
    lam = lam[np.argmin(np.abs(lam))].real
    q = BagleyTorvikProblem(1.5, lambda x: np.zeros_like(x), "bvp", b=0.0, c=-lam, phi_a=0.0, phi_b=0.0)
    with pytest.raises(SingularSystemError) as info:
        solve_bagley_torvik(q, grid)
    assert "cond" in str(info.value)


def test_bt_validation():
    with pytest.raises(ValueError):
        bagley_torvik_example(1.0, 2.0)
    with pytest.raises(ValueError):
        BagleyTorvikProblem(1.5, np.sin, "ivp")
    with pytest.raises(ValueError):
        BagleyTorvikProblem(1.5, np.sin, "bvp")
    with pytest.raises(ValueError):
        solve_bagley_torvik(bagley_torvik_example(1.0, 1.5), example_grid(0, 0, 3))


# ----------------------------------------------------------------------------
# manufactured forcing


def test_rhs_at_origin_is_zero():
    assert manufactured_rhs_bt(1.0, 1.5, np.array([0.0]))[0] == 0.0


def test_sine_series_matches_quadrature_oracle():
    req = OracleRequest(OperatorSpec(Kind.CAPUTO_L, 1.5), Sine(1.0), (0, 1), np.array([0.5]))
    assert_allclose(caputo_sine_series(1.0, 1.5, [0.5]), oracle_eval(req, "quadrature"), atol=1e-10)
    x = np.linspace(0, 1, 9)
    req = OracleRequest(OperatorSpec(Kind.CAPUTO_L, 1.3), Sine(4 * math.pi), (0, 1), x)
    assert_allclose(caputo_sine_series(4 * math.pi, 1.3, x), oracle_eval(req, "series"), atol=1e-8)


def test_sine_series_second_derivative_limit():
    x = np.linspace(0.1, 1, 7)
    assert_allclose(caputo_sine_series(1.0, 1.999, x), -np.sin(x), atol=1e-2)
    # the gap closes linearly in 2 - alpha
    e1 = np.max(np.abs(caputo_sine_series(1.0, 1.999, x) + np.sin(x)))
    e2 = np.max(np.abs(caputo_sine_series(1.0, 1.9999, x) + np.sin(x)))
    assert e2 < e1 / 5


@pytest.mark.xfail(strict=True, reason="the Caputo value at alpha = 1.999 differs from -sin by O(2 - alpha)")
def test_sine_series_second_derivative_to_1e8():
    x = np.linspace(0.1, 1, 7)
    assert_allclose(caputo_sine_series(1.0, 1.999, x), -np.sin(x), atol=1e-8)


def test_sine_series_with_shifted_lower_limit():
    x = np.linspace(0.3, 1.2, 5)
    req = OracleRequest(OperatorSpec(Kind.CAPUTO_L, 1.5), Sine(2.0), (0.2, 1.2), x)
    assert_allclose(caputo_sine_series(2.0, 1.5, x, 0.2), oracle_eval(req, "quadrature"), atol=1e-10)


def test_diffusion_rhs_against_oracle():
    alpha = 1.5
    profile = Polynomial((0.0, 0.0, 1.0, -2.0, 1.0))
    for x, t in [(0.5, 1.0), (1e-3, 0.0)]:
        req = OracleRequest(OperatorSpec(Kind.RIESZ, alpha), profile, (0, 1), np.array([x]))
        riesz = oracle_eval(req, "quadrature")[0]
        ref = alpha * (t + 1) ** (alpha - 1) * profile(x) - (t + 1) ** alpha * riesz
        assert_allclose(manufactured_rhs_diffusion(alpha, np.array([x]), t)[0], ref, atol=1e-9)


def test_diffusion_rhs_time_part():
    x = np.linspace(0.1, 0.9, 5)
    alpha = 1.7
    diff = manufactured_rhs_diffusion(alpha, x, 0.0) - manufactured_rhs_diffusion(alpha, x, 0.0)
    assert np.all(diff == 0)
    # the t = 0 time derivative is alpha * profile
    riesz_part = manufactured_rhs_diffusion(alpha, x, 0.0) - alpha * x**2 * (1 - x) ** 2
    riesz_part_t1 = manufactured_rhs_diffusion(alpha, x, 1.0) - alpha * 2 ** (alpha - 1) * x**2 * (1 - x) ** 2
    assert_allclose(riesz_part_t1, 2**alpha * riesz_part, rtol=1e-12)


# ----------------------------------------------------------------------------
# diffusion


def test_diffusion_examples_with_midpoint_forcing():
    e = solve_fractional_diffusion(diffusion_example(1.5, forcing="midpoint"), example_grid(0, 0, 4)).error
    assert 1.7774e-7 / 5 <= e <= 1.7774e-7 * 5
    e = solve_fractional_diffusion(diffusion_example(1.1, forcing="midpoint"), example_grid(-0.5, 0.5, 4)).error
    assert 9.6527e-9 / 5 <= e <= 9.6527e-9 * 5


def test_endpoint_averaged_forcing_is_more_accurate():
    grid = example_grid(0, 0, 4)
    trap = solve_fractional_diffusion(diffusion_example(1.5), grid).error
    mid = solve_fractional_diffusion(diffusion_example(1.5, forcing="midpoint"), grid).error
    assert trap < mid / 10


@pytest.mark.parametrize("forcing", ["trapezoidal", "midpoint"])
def test_diffusion_time_order(forcing):
    taus = np.array([1e-1, 5e-2, 2.5e-2])
    errs = [
        solve_fractional_diffusion(diffusion_example(1.5, tau, 1.0, forcing=forcing), example_grid(0, 0, 4)).error
        for tau in taus
    ]
    slope = np.polyfit(np.log(taus), np.log(errs), 1)[0]
    assert abs(slope - 2) <= 0.15 * 2


def test_diffusion_zero_problem_and_history():
    p = DiffusionProblem(1.5, lambda x, t: np.zeros_like(x), lambda x: np.zeros_like(x), 0.5, 0.1, keep_history=True)
    rep = solve_fractional_diffusion(p, example_grid(0, 0, 6))
    assert rep.history.shape == (6, 7)
    assert np.all(rep.history == 0)
    assert rep.error is None


def test_partial_final_step():
    assert_allclose(_time_levels(1.0, 0.3), [0, 0.3, 0.6, 0.9, 1.0])
    assert len(_time_levels(10.0, 1e-2)) == 1001
    rep = solve_fractional_diffusion(diffusion_example(1.5, 0.3, 1.0), example_grid(0, 0, 4))
    assert rep.times[-1] == 1.0 and rep.error < 1e-2


def test_diffusion_consistency_warning_and_validation():
    with pytest.warns(ConsistencyWarning):
        DiffusionProblem(1.5, lambda x, t: 0 * x, lambda x: 1 + 0 * x, 1.0, 0.1)
    with pytest.raises(ValueError):
        DiffusionProblem(1.5, lambda x, t: 0 * x, lambda x: 0 * x, 1.0, 0.0)
    with pytest.raises(ValueError):
        diffusion_example(1.5, forcing="euler")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        diffusion_example(1.3)
