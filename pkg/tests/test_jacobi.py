import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.special import eval_jacobi, roots_jacobi

from fracspec.jacobi import (
    JacobiParams,
    PoleError,
    gamma,
    jacobi_derivative_factor,
    jacobi_endpoint,
    jacobi_eval,
    jacobi_table,
    orthogonality_norm,
    recurrence_coeffs,
    rgamma,
    weight_mass,
)

exponent = st.floats(-0.95, 3.0)


@settings(max_examples=40, deadline=None)
@given(a=exponent, b=exponent, j=st.integers(0, 40))
def test_recurrence_matches_scipy(a, b, j):
    x = np.linspace(-1, 1, 17)
    got = jacobi_eval(JacobiParams(a, b), j, x)
    ref = eval_jacobi(j, a, b, x)
    assert_allclose(got, ref, rtol=1e-10, atol=1e-10 * max(1.0, np.abs(ref).max()))


def test_table_columns_are_degrees():
    p = JacobiParams(0.5, -0.25)
    x = np.array([-0.3, 0.1, 0.9])
    T = jacobi_table(p, 6, x)
    assert T.shape == (3, 7)
    for j in range(7):
        assert_allclose(T[:, j], eval_jacobi(j, 0.5, -0.25, x), rtol=1e-13)


def test_table_keeps_extended_precision():
    x = np.linspace(-1, 1, 5).astype(np.longdouble)
    assert jacobi_table(JacobiParams(0, 0), 4, x).dtype == np.longdouble


@pytest.mark.parametrize("ab", [(0, 0), (-0.5, -0.5), (-0.5, 0.5), (1.5, 0.25)])
@pytest.mark.parametrize("j", [0, 1, 5, 17])
def test_endpoint_values(ab, j):
    p = JacobiParams(*ab)
    assert_allclose(jacobi_endpoint(p, j, "right"), eval_jacobi(j, *ab, 1.0), rtol=1e-13)
    assert_allclose(jacobi_endpoint(p, j, "left"), eval_jacobi(j, *ab, -1.0), rtol=1e-13)


def test_endpoint_rejects_bad_side():
    with pytest.raises(ValueError):
        jacobi_endpoint(JacobiParams(0, 0), 2, "middle")


def test_derivative_relation():
    p = JacobiParams(-0.5, 0.5)
    x = np.linspace(-0.9, 0.9, 7)
    h = 1e-6
    for j in range(2, 9):
        d = jacobi_derivative_factor(p, j, 1)
        fd = (eval_jacobi(j, -0.5, 0.5, x + h) - eval_jacobi(j, -0.5, 0.5, x - h)) / (2 * h)
        assert_allclose(d * eval_jacobi(j - 1, 0.5, 1.5, x), fd, rtol=1e-7, atol=1e-7)


def test_derivative_factor_is_gamma_ratio():
    p = JacobiParams(0.3, -0.4)
    for j, m in [(5, 2), (9, 3), (4, 4)]:
        ref = math.gamma(j + m + p.a + p.b + 1) / (2**m * math.gamma(j + p.a + p.b + 1))
        assert_allclose(jacobi_derivative_factor(p, j, m), ref, rtol=1e-13)
    with pytest.raises(ValueError):
        jacobi_derivative_factor(p, 2, 3)


@pytest.mark.parametrize("ab", [(0, 0), (-0.5, -0.5), (-0.5, 0.5), (2.0, 1.0)])
def test_orthogonality_norms(ab):
    x, w = roots_jacobi(40, *ab)
    P = jacobi_table(JacobiParams(*ab), 20, x)
    G = (P * w[:, None]).T @ P
    norms = [orthogonality_norm(JacobiParams(*ab), n) for n in range(21)]
    assert_allclose(G, np.diag(norms), atol=1e-12 * max(norms))
    assert_allclose(weight_mass(JacobiParams(*ab)), w.sum(), rtol=1e-13)


def test_recurrence_first_index_has_zero_ahat():
    # a + b = -1 makes the closed form 0/0 at j = 1
    r = recurrence_coeffs(JacobiParams(-0.5, -0.5), 1)
    assert r.Ahat == 0.0
    assert all(math.isfinite(v) for v in (r.A, r.B, r.C, r.Bhat, r.Chat))
    with pytest.raises(ValueError):
        recurrence_coeffs(JacobiParams(0, 0), 0)


def test_integration_relation():
    # P_j = Ahat P'_{j-1} + Bhat P'_j + Chat P'_{j+1}
    p = JacobiParams(-0.5, 0.5)
    x = np.linspace(-0.95, 0.95, 9)

    def dP(j):
        if j == 0:
            return np.zeros_like(x)
        return jacobi_derivative_factor(p, j, 1) * eval_jacobi(j - 1, p.a + 1, p.b + 1, x)

    for j in range(1, 12):
        r = recurrence_coeffs(p, j)
        lhs = eval_jacobi(j, p.a, p.b, x)
        assert_allclose(r.Ahat * dP(j - 1) + r.Bhat * dP(j) + r.Chat * dP(j + 1), lhs, atol=1e-12)


def test_params_validation_and_gamma_poles():
    with pytest.raises(ValueError):
        JacobiParams(-1.0, 0.0)
    with pytest.raises(PoleError):
        gamma(-2.0)
    assert rgamma(-3.0) == 0.0
    assert_allclose(gamma(4.5), math.gamma(4.5))
    assert JacobiParams(0, 0).shifted(2) == JacobiParams(2, 2)
    assert JacobiParams(-0.5, -0.5).is_chebyshev and JacobiParams(0, 0).is_legendre
