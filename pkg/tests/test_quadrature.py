import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectral_beam.errors import DomainError, EvaluationError
from spectral_beam.quadrature import (
    RuleKind,
    chebyshev_rule,
    gauss_rule,
    integrate,
    rule_for_basis,
)


def test_two_point_rule():
    r = gauss_rule(2)
    np.testing.assert_allclose(r.nodes, [-1 / np.sqrt(3), 1 / np.sqrt(3)], rtol=0, atol=1e-15)
    np.testing.assert_allclose(r.weights, [1.0, 1.0], rtol=0, atol=1e-15)
    assert r.exact_degree == 3
    assert integrate(r, lambda x: x**2) == pytest.approx(2 / 3, abs=1e-15)


def test_degree_ten_with_six_nodes():
    assert integrate(gauss_rule(6), lambda x: x**10) == pytest.approx(2 / 11, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.data())
def test_polynomial_exactness(n, data):
    k = data.draw(st.integers(0, 2 * n - 1))
    exact = 0.0 if k % 2 else 2.0 / (k + 1)
    got = integrate(gauss_rule(n), lambda x: x**k)
    assert abs(got - exact) <= 1e-13 * max(1.0, abs(exact))


@pytest.mark.parametrize("n", [1, 2, 7, 20, 45])
def test_gauss_invariants(n):
    r = gauss_rule(n)
    assert np.all(r.weights > 0)
    assert np.all(np.diff(r.nodes) > 0)
    assert abs(r.weights.sum() - 2) < 1e-12
    assert integrate(r, lambda x: x**3 - x) == pytest.approx(0.0, abs=1e-14)


def test_first_clamped_function_squared():
    got = integrate(gauss_rule(20), lambda x: (1 - x**2) ** 4)
    assert got == pytest.approx(256 / 315, abs=1e-14)


def test_chebyshev_nodes_and_bias():
    r = chebyshev_rule(3)
    np.testing.assert_allclose(r.nodes, [-np.sqrt(3) / 2, 0.0, np.sqrt(3) / 2], atol=1e-15)
    assert r.kind is RuleKind.CHEBYSHEV_CORRECTED
    assert abs(integrate(chebyshev_rule(50), lambda x: 1.0) - 2) < 1e-3
    assert integrate(chebyshev_rule(11), lambda x: x) == pytest.approx(0.0, abs=1e-15)


def test_zero_integrand():
    assert integrate(gauss_rule(5), lambda x: 0.0 * x) == 0.0


def test_non_finite_names_node():
    with pytest.raises(EvaluationError, match="node 0"):
        integrate(gauss_rule(4), lambda x: np.where(x < -0.5, np.inf, x))


def test_invalid_size():
    with pytest.raises(DomainError):
        gauss_rule(0)


def test_node_count_policy():
    for N in (1, 10, 15, 40, 64):
        r = rule_for_basis(N)
        assert r.size == max(20, N + 5)
        assert r.exact_degree >= 2 * N + 8
