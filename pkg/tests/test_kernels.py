import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import eval_chebyt, eval_jacobi, gamma

from fracspec.jacobi import JacobiParams
from fracspec.kernels import (
    LEFT,
    RIGHT,
    chebyshev_scale,
    fractional_integral_table,
    lhat_left,
    lhat_right,
    phat_left,
    phat_right,
    that_left,
    that_right,
)
from fracspec.matrices import Kind, OperatorSpec
from fracspec.oracle import JacobiFunction, OracleRequest, oracle_eval

ALPHAS = [0.3, 0.5, 1.5, 1.9]
POINTS = np.sort(np.random.default_rng(7).uniform(-1, 1, 10))


def quadrature_column(ab, alpha, j, side):
    kind = Kind.INTEGRAL_L if side == LEFT else Kind.INTEGRAL_R
    req = OracleRequest(OperatorSpec(kind, alpha), JacobiFunction(*ab, j), (-1, 1), POINTS)
    return oracle_eval(req, "quadrature")


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("side", [LEFT, RIGHT])
def test_kernel_recurrence_matches_quadrature(pair, alpha, side):
    ab = (pair.a, pair.b)
    T = fractional_integral_table(pair, alpha, 20, POINTS, side)
    for j in range(21):
        assert_allclose(T[:, j], quadrature_column(ab, alpha, j, side), atol=1e-10)


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_general_recurrence_reduces_to_legendre(alpha):
    p = JacobiParams(0, 0)
    assert_allclose(phat_left(p, alpha, 30, POINTS).values, lhat_left(alpha, 30, POINTS).values, atol=1e-12)
    assert_allclose(phat_right(p, alpha, 30, POINTS).values, lhat_right(alpha, 30, POINTS).values, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.3, 1.5, 1.9])
def test_chebyshev_recurrence_matches_scaled_jacobi(alpha):
    p = JacobiParams(-0.5, -0.5)
    s = chebyshev_scale(30)
    assert_allclose(that_left(alpha, 30, POINTS).values * s, phat_left(p, alpha, 30, POINTS).values, atol=1e-12)
    assert_allclose(that_right(alpha, 30, POINTS).values * s, phat_right(p, alpha, 30, POINTS).values, atol=1e-12)


def test_chebyshev_scale_links_t_and_p():
    x = np.linspace(-1, 1, 7)
    s = chebyshev_scale(8)
    for j in range(9):
        assert_allclose(s[j] * eval_chebyt(j, x), eval_jacobi(j, -0.5, -0.5, x), atol=1e-14)


def test_low_degree_closed_forms():
    # I^alpha of 1 and of (x + 1) from the left
    alpha = 0.7
    t = POINTS + 1
    T = lhat_left(alpha, 1, POINTS).values
    assert_allclose(T[:, 0], t**alpha / gamma(alpha + 1), rtol=1e-14)
    # x = (x + 1) - 1
    assert_allclose(T[:, 1], t ** (alpha + 1) / gamma(alpha + 2) - t**alpha / gamma(alpha + 1), atol=1e-14)


def test_kernels_vanish_at_lower_limit(pair):
    left = fractional_integral_table(pair, 0.4, 12, np.array([-1.0]), LEFT)
    right = fractional_integral_table(pair, 0.4, 12, np.array([1.0]), RIGHT)
    assert np.all(left == 0) and np.all(right == 0)


def test_reflection_symmetry(pair):
    # right integral of P^{a,b}_j at x equals (-1)^j times left integral of P^{b,a}_j at -x
    alpha = 1.3
    R = phat_right(pair, alpha, 15, POINTS).values
    L = phat_left(JacobiParams(pair.b, pair.a), alpha, 15, -POINTS).values
    signs = (-1.0) ** np.arange(16)
    assert_allclose(R, L * signs[None, :], atol=1e-12)


def test_kernel_input_validation():
    with pytest.raises(ValueError):
        lhat_left(0.0, 3, POINTS)
    with pytest.raises(ValueError):
        fractional_integral_table(JacobiParams(0, 0), 0.5, 3, POINTS, "up")


def test_extended_precision_passthrough():
    x = POINTS.astype(np.longdouble)
    assert phat_left(JacobiParams(-0.5, 0.5), 0.5, 4, x).values.dtype == np.longdouble
    assert math.isclose(float(lhat_left(0.5, 4, x).values[3, 2]), lhat_left(0.5, 4, POINTS).values[3, 2], rel_tol=1e-14)
