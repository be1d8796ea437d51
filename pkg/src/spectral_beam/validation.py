"""Built-in acceptance suite, shared by ``spectral-beam validate`` and pytest.

Every check is computed from independent oracles (closed forms, root finding,
finite differences, cross-solver agreement). Published reference numbers that
are not asserted are reported in the ``detail`` column only.
"""

from __future__ import annotations

import contextlib
import io as _io
import time
from dataclasses import dataclass
from unittest import mock

import numpy as np
from scipy.optimize import brentq

from . import assembly
from .assembly import duffing_model, nonlinear_force, nonlinear_jacobian, standard_model
from .basis import BasisSpec, BoundaryCondition
from .material import ConstituentSet, DistributionProfile, ProfileKind, eta_frequency_ratio
from .pipeline import BeamCase, build_model, evaluate
from .quadrature import RuleKind
from .solvers import (
    BackboneCurve,
    BackboneSample,
    extract_frequency,
    fit_backbone_beta,
    hbm_backbone,
    linear_modes,
    newmark_transient,
)
from .solvers.hbm import _Amplitude
from .studies import SweepSpec, convergence_study, fit_linear, fit_quadratic_v, sweep
from .uq import (
    MCProtocol,
    ParamDistribution,
    RandomInputSpec,
    design_ranges,
    ishigami,
    ishigami_first_order,
    monte_carlo,
    pipeline_quantity,
    sobol_first_order,
    sobol_ranking,
    table4_uncertainties,
)

AMPLITUDES = tuple(round(0.1 * k, 10) for k in range(1, 11))
V_GRID = (0.0, 0.05, 0.10, 0.15, 0.20)


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def clamped_root():
    """First positive root of cos(x) cosh(x) = 1."""
    return brentq(lambda x: np.cos(x) * np.cosh(x) - 1.0, 4.0, 5.0, xtol=1e-15, rtol=1e-15)


def _rel(a, b):
    return abs(a - b) / abs(b)


def check_analytic_eigenvalues():
    ss = linear_modes(standard_model(BasisSpec(14, "SS")), 2).omega_hat
    cc = linear_modes(standard_model(BasisSpec(14, "CC")), 1).omega_hat
    e1, e2 = _rel(ss[0], np.pi**2), _rel(ss[1], 4 * np.pi**2)
    e3 = _rel(cc[0], clamped_root() ** 2)
    ok = e1 < 1e-8 and e2 < 1e-8 and e3 < 1e-6
    return ok, f"SS rel err {e1:.1e}, {e2:.1e} (<1e-8); CC rel err {e3:.1e} (<1e-6)"


def check_eta_ratio():
    c = ConstituentSet(E_m=3e9, rho_m=1200.0, E_cnt=1000e9, rho_cnt=1400.0, eta_E=0.8)
    r = eta_frequency_ratio(0.3, 0.8, 0.20, c)
    return _rel(r, 1.613) < 0.005, f"f(0.8)/f(0.3) = {r:.5f} (target 1.613 +/- 0.5%)"


def check_spectral_convergence():
    N_list = tuple(range(6, 21))
    res = convergence_study(N_list, 40)
    eps = dict(zip(N_list, res.eps_rel))
    mono = all(eps[n + 1] <= eps[n] + 1e-14 for n in N_list[:-1])
    band = 5e-4 <= eps[10] <= 5e-3
    e12 = eps[12] < 1e-3
    # informational: the same study with the Chebyshev-node rule
    cheb = convergence_study((10, 12), 40, BeamCase(quadrature=RuleKind.CHEBYSHEV_CORRECTED))
    detail = (
        f"nonincreasing={mono}; eps(10)={eps[10]:.2e} in [5e-4, 5e-3]={band} "
        f"(published 1.6e-3); eps(12)={eps[12]:.2e} < 1e-3={e12}; "
        f"Chebyshev-node rule gives eps(10)={cheb.eps_rel[0]:.2e}, eps(12)={cheb.eps_rel[1]:.2e}"
    )
    return mono and band and e12, detail


def check_parts_identity():
    worst = 0.0
    for bc in BoundaryCondition:
        for n in range(1, 21):
            m = standard_model(BasisSpec(n, bc))
            worst = max(worst, float(np.max(np.abs(m.B + m.C))))
    return worst < 1e-10, f"max |B + C| = {worst:.2e} over CC/SS, N = 1..20 (<1e-10)"


def check_jacobian():
    m = standard_model(BasisSpec(8, "CC"))
    rng = np.random.Generator(np.random.Philox(5))
    worst = 0.0
    for _ in range(20):
        q = rng.standard_normal(8)
        h = 1e-6 * np.linalg.norm(q)
        fd = np.empty((8, 8))
        for j in range(8):
            e = np.zeros(8)
            e[j] = h
            fd[:, j] = (nonlinear_force(m, q + e) - nonlinear_force(m, q - e)) / (2 * h)
        J = nonlinear_jacobian(m, q)
        worst = max(worst, np.max(np.abs(J - fd)) / np.max(np.abs(J)))
    return worst < 1e-6, f"max relative FD mismatch {worst:.1e} over 20 states (<1e-6)"


def check_duffing_and_transient():
    duff = duffing_model()
    errs = []
    for a in (0.05, 0.1, 0.2):
        om = hbm_backbone(duff, 1, [a], n_harmonics=1).samples[0].omega
        errs.append(abs(om - np.sqrt(1 + 0.75 * a * a)))
    case = BeamCase(amplitude=0.5)
    model, _, _ = build_model(case)
    om = hbm_backbone(model, 1, [0.5], n_harmonics=5).samples[0].omega
    v = linear_modes(model, 1).shapes[:, 0]
    peak, _ = _Amplitude(model)(v)
    period = 2 * np.pi / om
    tr = newmark_transient(model, 0.5 / peak * v, np.zeros(model.N), period / 400, 400 * 20)
    om_tr = 2 * np.pi * extract_frequency(tr, 0)
    mis = _rel(om, om_tr)
    ok = max(errs) < 1e-10 and mis < 5e-3
    return ok, f"Duffing max err {max(errs):.1e} (<1e-10); HBM vs Newmark at a=0.5: {mis:.1e} (<5e-3)"


def newmark_order():
    """Observed order of the max trajectory error on q'' + pi^4 q = 0."""
    model = duffing_model(k_linear=np.pi**4, k_cubic=0.0)
    omega = np.pi**2
    T = 2 * np.pi / omega
    errors, dts = [], []
    for spp in (40, 80, 160, 320):
        dt = T / spp
        tr = newmark_transient(model, [1.0], [0.0], dt, 5 * spp)
        errors.append(np.max(np.abs(tr.q_history[:, 0] - np.cos(omega * tr.times))))
        dts.append(dt)
    return float(np.polyfit(np.log(dts), np.log(errors), 1)[0])


def energy_drift(periods=50, steps_per_period=1600):
    model = standard_model(BasisSpec(8, "CC"))
    modes = linear_modes(model, 1)
    v = modes.shapes[:, 0]
    peak, _ = _Amplitude(model)(v)
    q0 = 0.5 / peak * v
    om = hbm_backbone(model, 1, [0.5], n_harmonics=5).samples[0].omega
    dt = 2 * np.pi / om / steps_per_period
    tr = newmark_transient(model, q0, np.zeros(model.N), dt, periods * steps_per_period)
    E = tr.energy_history
    return float(np.max(np.abs(E - E[0])) / E[0])


def check_newmark():
    order = newmark_order()
    drift = energy_drift()
    ok = 1.8 <= order <= 2.2 and drift < 1e-6
    return ok, f"observed order {order:.3f} in [1.8, 2.2]; energy drift over 50 periods {drift:.1e} (<1e-6)"


def check_hardening():
    problems = []
    for bc in BoundaryCondition:
        for v in (0.0, 0.10):
            case = BeamCase(bc=bc, profile=DistributionProfile(ProfileKind.UD, v))
            model, _, _ = build_model(case)
            scale = evaluate(case.replace(amplitude=0.0)).f_hat
            curve = hbm_backbone(model, 1, AMPLITUDES, n_harmonics=3, frequency_scale=scale)
            f = curve.f_hat
            if np.any(f < 1.0) or np.any(np.diff(f) < 0):
                problems.append(f"{bc.value} V={v}")
    rows = sweep(SweepSpec("V_cnt", V_GRID, BeamCase(amplitude=0.3)))
    f = np.array([r.f_hat for r in rows])
    strict = bool(np.all(np.diff(f) > 0))
    gain = f[-1] / f[0] - 1
    ok = not problems and strict and gain >= 0.20
    detail = (
        f"backbones ok={not problems}; f_hat(V) strictly increasing={strict}; "
        f"gain at V=0.20: {100 * gain:.0f}% (>=20%; published 66%)"
    )
    return ok, detail


def check_distribution():
    base = BeamCase(amplitude=0.3)
    ud = evaluate(base.replace(profile=DistributionProfile(ProfileKind.UD, 0.10)))
    fx = evaluate(base.replace(profile=DistributionProfile(ProfileKind.FG_X, 0.10)))
    ok = fx.EI > ud.EI and fx.f_hat > ud.f_hat
    return ok, f"EI FG_X/UD = {fx.EI / ud.EI:.3f}; f_hat FG_X/UD = {fx.f_hat / ud.f_hat:.3f} (both > 1)"


def check_uq():
    add = RandomInputSpec((ParamDistribution.normal("x1", 0, 1), ParamDistribution.normal("x2", 0, 1)))
    s_add = sobol_first_order(add, lambda s: s["x1"] + s["x2"], n_base=4096, seed=11).indices
    ok_add = all(abs(s - 0.5) < 0.05 for s in s_add)

    box = RandomInputSpec(tuple(ParamDistribution.uniform(f"x{i}", -np.pi, np.pi) for i in (1, 2, 3)))
    s_ish = sobol_first_order(
        box, lambda s: ishigami(s["x1"], s["x2"], s["x3"]), n_base=4096, seed=12
    ).indices
    ok_ish = abs(s_ish[0] - ishigami_first_order()[0]) < 0.03

    proto = MCProtocol(n_mc=40, R=5, seed=13)
    q = pipeline_quantity(baseline=BeamCase())
    r1 = monte_carlo(proto, table4_uncertainties(), q)
    r2 = monte_carlo(proto, table4_uncertainties(), q)
    ok_det = repr((r1.mean, r1.run_sd, r1.run_means)) == repr((r2.mean, r2.run_sd, r2.run_means))

    five = sobol_first_order(design_ranges(), pipeline_quantity(), n_base=256, seed=14)
    ranking = sobol_ranking(five)
    ok_rank = ranking[0] == "V_cnt"
    detail = (
        f"additive S={s_add[0]:.3f},{s_add[1]:.3f}; Ishigami S1={s_ish[0]:.4f} (0.3139 +/- 0.03); "
        f"MC bit-identical={ok_det}; five-factor ranking {','.join(ranking)}"
    )
    return ok_add and ok_ish and ok_det and ok_rank, detail


def check_regression():
    v = np.linspace(0, 0.2, 9)
    fq = fit_quadratic_v(v, 1 + 3.65 * v - 1.82 * v * v)
    eq = max(abs(fq.coefficients[1] - 3.65), abs(fq.coefficients[2] + 1.82))
    eta = np.linspace(0.7, 1.0, 7)
    fl = fit_linear(eta, 1.3 + 0.62 * eta)
    el = abs(fl.coefficients[1] - 0.62)
    a = np.linspace(0.1, 1.0, 10)
    curve = BackboneCurve(
        [BackboneSample(x, 0.0, 1 + 0.18 * x * x, np.zeros(1), 0, 0.0) for x in a],
        n_harmonics=1, mode_index=1, omega_linear=1.0,
    )
    beta, _ = fit_backbone_beta(curve)
    eb = abs(beta - 0.18)
    worst = max(eq, el, eb)
    return worst < 1e-10, f"quadratic {eq:.1e}, slope {el:.1e}, beta {eb:.1e} (all <1e-10)"


CHECKS = (
    (1, "analytic eigenvalues", check_analytic_eigenvalues),
    (2, "eta_E frequency ratio", check_eta_ratio),
    (3, "spectral convergence", check_spectral_convergence),
    (4, "integration-by-parts identity", check_parts_identity),
    (5, "Jacobian vs finite differences", check_jacobian),
    (6, "Duffing oracle and HBM/transient", check_duffing_and_transient),
    (7, "Newmark order and energy", check_newmark),
    (8, "hardening and V monotonicity", check_hardening),
    (9, "distribution ordering", check_distribution),
    (10, "Sobol and Monte Carlo", check_uq),
    (11, "regression recovery", check_regression),
)


def run_check(number):
    for n, name, fn in CHECKS:
        if n == number:
            t0 = time.perf_counter()
            try:
                ok, detail = fn()
            except Exception as exc:  # a crash is a failure, not an abort
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            return CheckResult(n, name, bool(ok), detail, time.perf_counter() - t0)
    raise KeyError(number)


@contextlib.contextmanager
def perturbed(nonlinear_factor=None):
    """Test hook: temporarily replace the nonlinear coordinate factor."""
    if nonlinear_factor is None:
        yield
        return
    with mock.patch.object(assembly, "NONLINEAR_FACTOR", float(nonlinear_factor)):
        yield


def run_suite(numbers=None, nonlinear_factor=None):
    numbers = numbers or [n for n, _, _ in CHECKS]
    with perturbed(nonlinear_factor):
        return [run_check(n) for n in numbers]


def format_table(results):
    out = _io.StringIO()
    for r in results:
        out.write(f"{'PASS' if r.passed else 'FAIL'}  {r.number:>2}  {r.name:<34} {r.seconds:6.1f}s  {r.detail}\n")
    out.write(f"{sum(r.passed for r in results)}/{len(results)} criteria passed\n")
    return out.getvalue()
