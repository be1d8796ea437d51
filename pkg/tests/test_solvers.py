import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectral_beam.assembly import duffing_model, standard_model
from spectral_beam.basis import BasisSpec
from spectral_beam.errors import ConvergenceError, DomainError, NumericalError
from spectral_beam.solvers import (
    BackboneCurve,
    BackboneSample,
    SolverConfig,
    extract_frequency,
    fit_backbone_beta,
    hbm_backbone,
    linear_modes,
    newmark_transient,
)
from spectral_beam.solvers.frequency import zero_crossings
from spectral_beam.solvers.newmark import TransientResult
from spectral_beam.validation import clamped_root, newmark_order


@pytest.fixture(scope="module")
def cc():
    return standard_model(BasisSpec(8, "CC"))


def test_clamped_oracle_root():
    assert clamped_root() == pytest.approx(4.730040744862704, rel=1e-14)


def test_linear_modes_examples():
    ss = linear_modes(standard_model(BasisSpec(14, "SS")), 2)
    np.testing.assert_allclose(ss.omega_hat, [np.pi**2, 4 * np.pi**2], rtol=1e-8)
    cc = linear_modes(standard_model(BasisSpec(14, "CC")), 1)
    assert cc.omega_hat[0] == pytest.approx(clamped_root() ** 2, rel=1e-6)
    empty = linear_modes(standard_model(BasisSpec(4, "CC")), 0)
    assert empty.omega_hat.size == 0 and empty.shapes.shape == (4, 0)


def test_linear_modes_too_many():
    with pytest.raises(DomainError):
        linear_modes(standard_model(BasisSpec(4, "CC")), 5)


@pytest.mark.parametrize("bc", ["CC", "SS"])
def test_mode_orthogonality(bc):
    m = standard_model(BasisSpec(16, bc))
    r = linear_modes(m, 6)
    V = r.shapes
    assert np.max(np.abs(V.T @ m.M @ V - np.eye(6))) < 1e-8
    KV = V.T @ m.K @ V
    assert np.max(np.abs(KV - np.diag(np.diag(KV)))) < 1e-8 * np.max(np.abs(KV))
    assert np.all(np.diff(r.omega_hat) > 0)
    assert np.all(r.residuals < 1e-10)


def test_eigh_fallback_agrees():
    m = standard_model(BasisSpec(12, "CC"))
    bare = m.with_alpha(m.alpha)
    object.__setattr__(bare, "stiffness_factor", None)
    np.testing.assert_allclose(linear_modes(bare, 3).omega_hat, linear_modes(m, 3).omega_hat, rtol=1e-10)


def test_duffing_single_harmonic_closed_form():
    w = hbm_backbone(duffing_model(), 1, [0.1], n_harmonics=1).samples[0].omega
    assert abs(w - np.sqrt(1 + 0.75 * 0.01)) < 1e-12


def test_harmonic_corrections_shrink():
    w = [hbm_backbone(duffing_model(), 1, [1.0], n_harmonics=h).samples[0].omega for h in (1, 3, 5)]
    assert abs(w[1] - w[0]) > abs(w[2] - w[1])


def test_linear_limit(cc):
    c = hbm_backbone(cc, 1, [1e-7], n_harmonics=3)
    assert abs(c.f_hat[0] - 1) < 1e-6


@pytest.mark.parametrize("bc", ["CC", "SS"])
def test_backbone_hardening(bc):
    m = standard_model(BasisSpec(10, bc))
    c = hbm_backbone(m, 1, np.linspace(0.1, 1.0, 10), n_harmonics=3)
    assert np.all(c.f_hat >= 1) and np.all(np.diff(c.f_hat) >= 0)
    assert np.all(np.diff(c.amplitudes) > 0)
    assert c.metadata["phase_samples"] >= 4 * 3 + 1


def test_amplitude_constraint_is_peak_deflection(cc):
    c = hbm_backbone(cc, 1, [0.4])
    q0 = c.samples[0].coefficients.sum(axis=0)
    w = cc.displacement(q0, np.linspace(-1, 1, 4001))
    assert np.max(np.abs(w)) == pytest.approx(0.4, rel=1e-6)


def test_bad_grid(cc):
    with pytest.raises(DomainError):
        hbm_backbone(cc, 1, [0.3, 0.2])
    with pytest.raises(DomainError):
        hbm_backbone(cc, 1, [0.0, 0.2])


def test_corrector_failure_reports_branch(cc):
    cfg = SolverConfig(max_newton=0, max_bisections=1)
    with pytest.raises(ConvergenceError) as err:
        hbm_backbone(cc, 1, [0.5, 2.0], config=cfg)
    assert "samples" in err.value.state


def test_hbm_matches_transient(cc):
    c = hbm_backbone(cc, 1, [0.5], n_harmonics=5)
    om = c.samples[0].omega
    q0 = c.samples[0].coefficients.sum(axis=0)
    T = 2 * np.pi / om
    tr = newmark_transient(cc, q0, np.zeros(8), T / 200, 200 * 10)
    assert abs(2 * np.pi * extract_frequency(tr, 0) / om - 1) < 5e-3


def test_duffing_transient_matches_hbm():
    d = duffing_model()
    om = hbm_backbone(d, 1, [0.3], n_harmonics=7).samples[0].omega
    tr = newmark_transient(d, [0.3], [0.0], 2 * np.pi / om / 200, 200 * 10)
    assert abs(2 * np.pi * extract_frequency(tr, 0) / om - 1) < 5e-3


def _linear_period_error(spp):
    m = duffing_model(k_linear=np.pi**4, k_cubic=0.0)
    T = 2 / np.pi
    tr = newmark_transient(m, [1.0], [0.0], T / spp, spp * 10)
    return 1 / extract_frequency(tr, 0) / T - 1


def test_newmark_linear_period_within_stated_band():
    # literal requirement at 40 steps per period; see the closed form below
    assert abs(_linear_period_error(40)) < 2e-3


def test_newmark_period_elongation_closed_form():
    # average acceleration: T_num / T = x / arctan(x), x = omega dt / 2
    for spp in (40, 80, 160):
        x = np.pi / spp
        assert _linear_period_error(spp) == pytest.approx(x / np.arctan(x) - 1, rel=5e-3)  # crossing interpolation bias
    assert _linear_period_error(40) / _linear_period_error(80) == pytest.approx(4.0, rel=0.01)
    assert 1.8 <= newmark_order() <= 2.2


def test_zero_initial_state(cc):
    tr = newmark_transient(cc, np.zeros(8), np.zeros(8), 1e-3, 50)
    assert np.all(tr.q_history == 0) and np.all(tr.energy_history == 0)


def test_newmark_energy_short_run(cc):
    v = linear_modes(cc, 1).shapes[:, 0]
    T = 2 * np.pi / linear_modes(cc, 1).omega_hat[0]
    tr = newmark_transient(cc, 0.5 * v, np.zeros(8), T / 800, 800 * 5)
    E = tr.energy_history
    assert np.max(np.abs(E - E[0])) / E[0] < 1e-5
    assert np.max(tr.newton_iteration_counts) <= 5


def test_newmark_failure_names_step(cc):
    v = linear_modes(cc, 1).shapes[:, 0]
    with pytest.raises(ConvergenceError) as err:
        newmark_transient(cc, 50 * v, np.zeros(8), 0.05, 10, max_newton=1)
    assert err.value.step == 1


def test_newmark_guards(cc):
    with pytest.raises(DomainError):
        newmark_transient(cc, np.zeros(8), np.zeros(8), 0.0, 10)


def _signal(t, x):
    return TransientResult(t, x[:, None], np.zeros((t.size, 1)), np.zeros(t.size - 1, int), np.zeros(t.size))


def test_extract_pure_cosine():
    t = np.arange(0, 3.0, 1e-3)
    f = extract_frequency(_signal(t, np.cos(np.pi**2 * t)), 0)
    assert abs(f / (np.pi**2 / (2 * np.pi)) - 1) < 1e-5


def test_extract_constant_signal():
    t = np.arange(0, 1, 1e-2)
    with pytest.raises(NumericalError):
        extract_frequency(_signal(t, np.ones_like(t)), 0)


def test_zero_crossings_interpolate():
    t = np.array([0.0, 1.0, 2.0])
    np.testing.assert_allclose(zero_crossings(t, np.array([1.0, -1.0, -2.0])), [0.5])


def _curve(a, f):
    samples = [BackboneSample(x, 0.0, y, np.zeros(1), 0, 0.0) for x, y in zip(a, f)]
    return BackboneCurve(samples, 1, 1, 1.0)


def test_beta_exact_and_flat():
    a = np.linspace(0.1, 1, 10)
    beta, r2 = fit_backbone_beta(_curve(a, 1 + 0.18 * a * a))
    assert abs(beta - 0.18) < 1e-12 and r2 == pytest.approx(1.0)
    beta, r2 = fit_backbone_beta(_curve(a, np.ones_like(a)))
    assert beta == 0.0


def test_beta_needs_points():
    with pytest.raises(DomainError):
        fit_backbone_beta(_curve([0.1, 0.2, 0.3], [1, 1, 1]))
    with pytest.raises(DomainError):
        fit_backbone_beta(_curve([0.5] * 5, [1.1] * 5))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.01, 0.5), st.floats(0.1, 3.0))
def test_beta_recovery_property(beta, scale):
    a = np.linspace(0.1, 1, 6)
    c = _curve(a, scale * (1 + beta * a * a))
    c.f_hat_linear = scale
    got, _ = fit_backbone_beta(c)
    assert abs(got - beta) < 1e-10
