"""Parametric studies: sweeps, regression fits and the spectral convergence study."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .basis import BoundaryCondition
from .errors import DomainError, SpectralBeamError
from .material import DistributionProfile, ProfileKind
from .pipeline import BeamCase, _template, baseline_frequency, evaluate

RESPONSES = ("f_lin_hz", "f_hat", "alpha", "EI")


class StudyPointError(SpectralBeamError):
    """A grid point of a sweep failed; carries the offending value."""

    def __init__(self, param, value, cause):
        super().__init__(f"{param} = {value!r}: {cause}")
        self.param = param
        self.value = value


class FitError(SpectralBeamError, ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: tuple
    base: BeamCase = field(default_factory=BeamCase)
    responses: tuple = RESPONSES

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise DomainError("sweep grid is empty")
        # validate every grid value before any computation
        for v in self.values:
            self.base.with_param(self.param, v)


@dataclass(frozen=True)
class SweepRow:
    param: str
    value: object
    f_lin_hz: float
    f_hat: float
    alpha: float
    EI: float
    f_hat_linear: float


def _run_point(spec, value):
    try:
        r = evaluate(spec.base.with_param(spec.param, value))
    except Exception as exc:
        raise StudyPointError(spec.param, value, exc) from exc
    return SweepRow(spec.param, value, r.f_lin_hz, r.f_hat, float(r.alpha), float(r.EI), r.f_hat_linear)


def sweep(spec, threads=1):
    """One pipeline evaluation per grid value; rows come back in grid order."""
    if threads <= 1:
        return [_run_point(spec, v) for v in spec.values]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda v: _run_point(spec, v), spec.values))


@dataclass(frozen=True)
class FitResult:
    coefficients: tuple
    r_squared: float
    residual_norm: float
    model_form: str


def _lstsq(X, y, form, offset=0.0):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] < X.shape[1] or np.linalg.matrix_rank(X) < X.shape[1]:
        raise FitError(f"{form}: design matrix is rank deficient")
    coef, *_ = np.linalg.lstsq(X, y - offset, rcond=None)
    resid = y - offset - X @ coef
    ss_res = float(resid @ resid)
    centered = y - y.mean()
    ss_tot = float(centered @ centered)
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return coef, r2, float(np.sqrt(ss_res))


def fit_quadratic_v(v, f_hat):
    """``f_hat = f0 + c1 V + c2 V^2`` with ``f0`` pinned.

    ``f0`` is the computed value at ``V = 0`` when the table contains it and 1
    otherwise. Returns coefficients ``(f0, c1, c2)``.
    """
    v = np.asarray(v, dtype=float)
    f = np.asarray(f_hat, dtype=float)
    if v.size < 4:
        raise FitError("quadratic fit needs at least 4 points")
    at_zero = np.flatnonzero(v == 0.0)
    f0 = float(f[at_zero[0]]) if at_zero.size else 1.0
    coef, r2, rn = _lstsq(np.column_stack([v, v * v]), f, "quadratic-in-V", offset=f0)
    return FitResult((f0, float(coef[0]), float(coef[1])), r2, rn, "quadratic-in-V")


def fit_linear(x, y, form="linear-in-eta"):
    """Ordinary linear fit; coefficients ``(intercept, slope)``."""
    x = np.asarray(x, dtype=float)
    coef, r2, rn = _lstsq(np.column_stack([np.ones_like(x), x]), y, form)
    return FitResult((float(coef[0]), float(coef[1])), r2, rn, form)


def eta_sensitivity_slope(etas, case=None, threads=1):
    """Slope of f_hat against eta_E over ``etas`` (at least 3 values in [0.7, 1])."""
    etas = np.asarray(etas, dtype=float)
    if etas.size < 3 or np.any(etas < 0.70) or np.any(etas > 1.00):
        raise DomainError("need at least 3 eta_E values in [0.70, 1.00]")
    rows = sweep(SweepSpec("eta_E", tuple(etas), case or BeamCase()), threads)
    return fit_linear(etas, [r.f_hat for r in rows])


@dataclass(frozen=True)
class ConvergenceResult:
    N: tuple
    f_hat: tuple
    eps_rel: tuple
    floor: tuple
    reference_N: int
    fit: Optional[FitResult]


def _error_floor(spec, kind):
    # relative accuracy of omega_1 from the SVD of the stiffness factor
    S = _template(spec, kind).stiffness_factor
    s = np.linalg.svd(S, compute_uv=False)
    return 10.0 * np.finfo(float).eps * s[0] / s[-1]


def convergence_study(N_list=tuple(range(6, 21, 2)), reference_N=40, case=None):
    """Relative error of the linear fundamental frequency against ``reference_N``.

    Frequencies are normalized by the reference-size baseline so that the
    table is comparable across ``N``. The log-linear fit
    ``ln eps = slope N + intercept`` uses only the points above ten times the
    round-off floor of the eigen-solve; with fewer than two such points the
    fit is skipped.
    """
    case = case or BeamCase()
    N_list = tuple(int(n) for n in N_list)
    if not N_list or reference_N <= max(N_list):
        raise DomainError("reference_N must exceed every N in the list")
    ref_case = case.replace(N=reference_N, amplitude=0.0, mode_index=1)
    base = baseline_frequency(ref_case)
    ref = evaluate(ref_case).f_lin_hz / base
    f, eps, floor = [], [], []
    for n in N_list:
        c = case.replace(N=n, amplitude=0.0, mode_index=1)
        fn = evaluate(c).f_lin_hz / base
        f.append(fn)
        eps.append(abs(fn - ref) / ref)
        floor.append(_error_floor(c.basis_spec, c.quadrature))
    keep = [i for i in range(len(N_list)) if eps[i] > floor[i]]
    fit = None
    if len(keep) >= 2:
        Ns = np.array([N_list[i] for i in keep], dtype=float)
        fit = fit_linear(Ns, np.log([eps[i] for i in keep]), "log-linear-in-N")
    return ConvergenceResult(tuple(N_list), tuple(f), tuple(eps), tuple(floor), reference_N, fit)


def bc_comparison(case=None, reference_bc=BoundaryCondition.CC):
    """f_hat for both boundary conditions against one common baseline."""
    case = case or BeamCase()
    return {
        bc: evaluate(case.replace(bc=bc, reference_bc=reference_bc)).f_hat
        for bc in (BoundaryCondition.CC, BoundaryCondition.SS)
    }


def distribution_comparison(case=None, kinds=(ProfileKind.UD, ProfileKind.FG_LINEAR, ProfileKind.FG_X)):
    """EI and f_hat per distribution pattern at the case's ``v_star``."""
    case = case or BeamCase()
    out = {}
    for kind in kinds:
        r = evaluate(case.replace(profile=DistributionProfile(kind, case.profile.v_star)))
        out[ProfileKind(kind)] = (float(r.EI), r.f_hat)
    return out


def mixed_partial(case=None, dv=0.01, da=0.05):
    """Central-difference estimate of d2 f_hat / (dV d(w0/h)).

    Stencil: [f(V+dv, a+da) - f(V+dv, a-da) - f(V-dv, a+da) + f(V-dv, a-da)] / (4 dv da)
    at the case's ``(v_star, amplitude)``.
    """
    case = case or BeamCase()
    v, a = case.profile.v_star, case.amplitude
    if v - dv < 0 or a - da <= 0:
        raise DomainError("stencil leaves the valid parameter range")

    def f(vv, aa):
        return evaluate(case.with_param("V_cnt", vv).with_param("amplitude", aa)).f_hat

    value = (f(v + dv, a + da) - f(v + dv, a - da) - f(v - dv, a + da) + f(v - dv, a - da)) / (4 * dv * da)
    stencil = f"central 4-point, dV={dv!r}, d(w0/h)={da!r}, at V={v!r}, w0/h={a!r}"
    return value, stencil
