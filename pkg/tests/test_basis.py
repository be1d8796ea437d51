import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectral_beam.basis import (
    BasisSpec,
    BoundaryCondition,
    boundary_basis_eval,
    chebyshev_eval,
    chebyshev_table,
    orthonormalize,
    raw_basis_table,
    tabulate,
)
from spectral_beam.errors import ConditioningError, DomainError


def test_chebyshev_values():
    assert chebyshev_eval(3, 0.5) == pytest.approx(-1.0, abs=1e-15)
    for n in range(11):
        assert chebyshev_eval(n, 1.0) == pytest.approx(1.0, abs=1e-15)
        assert chebyshev_eval(n, -1.0) == pytest.approx((-1) ** n, abs=1e-15)


def test_chebyshev_derivative_matches_fd():
    h = 1e-6
    fd = (chebyshev_eval(5, 0.3 + h) - chebyshev_eval(5, 0.3 - h)) / (2 * h)
    d = chebyshev_eval(5, 0.3, order=1)
    assert abs(fd - d) / abs(d) < 1e-7


def test_chebyshev_endpoint_derivatives():
    # T_n'(1) = n^2, T_n''(1) = n^2 (n^2 - 1) / 3
    t = chebyshev_table(12, np.array([1.0]))
    n = np.arange(13)
    np.testing.assert_allclose(t[1, :, 0], n**2, rtol=1e-14)
    np.testing.assert_allclose(t[2, :, 0], n**2 * (n**2 - 1) / 3, rtol=1e-13)


def test_chebyshev_domain():
    with pytest.raises(DomainError):
        chebyshev_eval(2, 1.5)


def test_raw_examples():
    assert boundary_basis_eval(BasisSpec(3, "CC"), 1, 0.0) == 1.0
    assert boundary_basis_eval(BasisSpec(3, "CC"), 2, 0.5) == pytest.approx(0.28125, abs=1e-15)
    # simply supported family starts at T_0 so the sine-like fundamental is represented
    assert boundary_basis_eval(BasisSpec(3, "SS"), 1, 0.5) == pytest.approx(0.75, abs=1e-15)
    assert boundary_basis_eval(BasisSpec(3, "SS"), 2, 0.5) == pytest.approx(0.375, abs=1e-15)


def test_index_out_of_range():
    with pytest.raises(DomainError):
        boundary_basis_eval(BasisSpec(3, "CC"), 4, 0.0)


def test_basis_size_cap():
    with pytest.raises(DomainError):
        BasisSpec(65, "CC")
    assert BasisSpec(65, "CC", allow_large=True).N == 65
    with pytest.raises(DomainError):
        BasisSpec(0, "SS")


@pytest.mark.parametrize("bc", list(BoundaryCondition))
def test_essential_conditions(bc):
    spec = BasisSpec(30, bc)
    ends = np.array([-1.0, 1.0])
    raw = raw_basis_table(spec, ends)
    assert np.max(np.abs(raw[0])) < 1e-12
    if bc is BoundaryCondition.CC:
        assert np.max(np.abs(raw[1])) < 1e-12
    tab = tabulate(spec)
    assert np.max(np.abs(tab.evaluate(ends))) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(list(BoundaryCondition)), st.integers(1, 12), st.floats(-0.95, 0.95))
def test_derivatives_match_fd(bc, j, x):
    spec = BasisSpec(12, bc)
    h = 1e-6
    for order in (1, 2):
        fd = (
            boundary_basis_eval(spec, j, x + h, order - 1) - boundary_basis_eval(spec, j, x - h, order - 1)
        ) / (2 * h)
        d = boundary_basis_eval(spec, j, x, order)
        scale = max(1.0, abs(d))
        assert abs(fd - d) / scale < 1e-6


def test_orthonormalize_examples():
    np.testing.assert_allclose(orthonormalize(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(orthonormalize(np.diag([4.0, 9.0])), np.diag([0.5, 1 / 3]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_orthonormalize_random_spd(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((7, 5))
    G = A.T @ A
    R = orthonormalize(G)
    assert np.allclose(np.triu(R, 1), 0)
    assert np.max(np.abs(R @ G @ R.T - np.eye(5))) < 1e-10


def test_orthonormalize_reports_pivot():
    G = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, 1.0]])
    with pytest.raises(ConditioningError) as err:
        orthonormalize(G)
    assert err.value.pivot == 2


@pytest.mark.parametrize("bc", list(BoundaryCondition))
@pytest.mark.parametrize("N", [3, 20, 40, 64])
def test_orthonormal_gram(bc, N):
    tab = tabulate(BasisSpec(N, bc))
    G = tab.mass_gram()
    assert np.max(np.abs(G - np.eye(N))) < 1e-10
    if N == 20:
        assert np.linalg.cond(G) - 1 < 1e-8
        assert tab.raw_gram_condition > 1e3


def test_tabulation_consistency():
    spec = BasisSpec(4, "SS", orthonormalized=False)
    tab = tabulate(spec)
    x0 = tab.nodes[0]
    for j in range(1, 5):
        assert tab.values[j - 1, 0] == pytest.approx(boundary_basis_eval(spec, j, x0), abs=1e-15)


def test_span_preserved():
    # psi_k mixes only phi_1..phi_k
    tab = tabulate(BasisSpec(10, "CC"))
    assert np.allclose(np.triu(tab.transform, 1), 0.0)
