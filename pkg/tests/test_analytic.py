import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rugosity.analytic import LimitSolution, eval_limit, residual_check, solve_limit
from rugosity.errors import NearSingularSystem, ValidationError
from rugosity.tensors import TOP_ANCHORING, QTensor2

D = TOP_ANCHORING
ZERO = QTensor2(0.0, 0.0)


@pytest.fixture
def symmetric():
    return solve_limit(1.0, 2.0, 2.0, 1.0, D, D)


def test_symmetric_coefficients(symmetric):
    np.testing.assert_allclose(symmetric.c1.as_array(), D.as_array() / (2 * math.e), rtol=1e-15)
    np.testing.assert_allclose(symmetric.c2.as_array(), D.as_array() / 2, rtol=1e-15)


def test_symmetric_endpoint_values(symmetric):
    expected = D.as_array() * (math.exp(-1) + 1) / 2
    np.testing.assert_allclose(eval_limit(symmetric, 0.0).as_array(), expected, rtol=1e-15)
    np.testing.assert_allclose(eval_limit(symmetric, 1.0).as_array(), expected, rtol=1e-15)


def test_reflection_symmetry(rng):
    for _ in range(20):
        c, w, R = rng.uniform(0.1, 5, 3)
        q = QTensor2(*rng.normal(size=2))
        sol = solve_limit(c, w, w, R, q, q)
        y = rng.uniform(0, R, 50)
        np.testing.assert_allclose(sol.components(y), sol.components(R - y), atol=1e-13, rtol=0)


def test_zero_data_gives_zero_solution():
    sol = solve_limit(2.0, 1.0, 3.0, 1.5, ZERO, ZERO)
    assert sol.c1 == ZERO and sol.c2 == ZERO
    assert eval_limit(sol, 0.7) == ZERO
    res = residual_check(sol)
    assert res.max() == 0.0


def test_componentwise_solve_agrees(rng):
    for _ in range(20):
        c, w_ef, w0, R = rng.uniform(0.1, 5, 4)
        q_ef, q_r = QTensor2(*rng.normal(size=2)), QTensor2(*rng.normal(size=2))
        joint = solve_limit(c, w_ef, w0, R, q_ef, q_r)
        k = math.sqrt(c)
        A = np.array([[w_ef / 2 - k, w_ef / 2 + k],
                      [math.exp(R * k) * (w0 / 2 + k), math.exp(-R * k) * (w0 / 2 - k)]])
        for i in range(2):
            rhs = [w_ef / 2 * q_ef.as_array()[i], w0 / 2 * q_r.as_array()[i]]
            c1, c2 = np.linalg.solve(A, rhs)
            scale = max(abs(c1), abs(c2), 1.0)
            assert joint.c1.as_array()[i] == pytest.approx(c1, abs=1e-15 * scale * 10)
            assert joint.c2.as_array()[i] == pytest.approx(c2, abs=1e-15 * scale * 10)


def test_bottom_derivative_sign(symmetric):
    # with equal data the profile dips in the middle, so |Q| decreases into the slab
    dq = symmetric.components(0.0, 1)
    assert dq[0] > 0  # q1 < 0 rises towards zero


def test_perturbation_is_detected():
    # generic parameters: in the symmetric example c1 drops out of the bottom condition
    s = solve_limit(1.0, 3.0, 2.0, 1.0, D, D)
    bumped = LimitSolution(s.c1 + QTensor2(1e-3, 0.0), s.c2, s.c, s.w_ef, s.w0, s.R, s.Q_ef, s.Q_R)
    assert residual_check(bumped).bottom_robin >= 1e-4


def test_validation():
    with pytest.raises(ValidationError):
        solve_limit(0.0, 1.0, 1.0, 1.0, D)
    with pytest.raises(ValidationError):
        solve_limit(1.0, 1.0, 1.0, -1.0, D)
    with pytest.raises(ValidationError):
        eval_limit(solve_limit(1.0, 1.0, 1.0, 1.0, D), 2.0)
    with pytest.raises(ValidationError):
        residual_check(solve_limit(1.0, 1.0, 1.0, 1.0, D), n_samples=2)


def test_near_singular_guard():
    # c = R = 1, w0 = 0: the determinant vanishes at w_ef = -2 tanh(1)
    with pytest.raises(NearSingularSystem):
        solve_limit(1.0, -2.0 * math.tanh(1.0), 0.0, 1.0, D)


def test_to_dict(symmetric):
    d = symmetric.to_dict()
    assert d["c2"] == {"q1": -0.25, "q2": 0.0}


positive = st.floats(0.1, 10)


@given(positive, positive, positive, st.floats(0.5, 4),
       st.tuples(st.floats(-1, 1), st.floats(-1, 1)), st.tuples(st.floats(-1, 1), st.floats(-1, 1)))
def test_residuals_vanish(c, w_ef, w0, R, q_ef, q_r):
    try:
        sol = solve_limit(c, w_ef, w0, R, QTensor2(*q_ef), QTensor2(*q_r))
    except NearSingularSystem:
        return
    assert residual_check(sol).max() <= 1e-12
