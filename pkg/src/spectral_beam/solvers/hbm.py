"""Harmonic-balance backbone curves with amplitude continuation.

The periodic free response is expanded in odd cosine harmonics,
``q(tau) = sum_k Q_k cos(k omega tau)``, which fixes the phase (zero velocity
at tau = 0). The cubic force is evaluated by collocation on ``4 K + 2``
equally spaced phase samples, where ``K`` is the highest retained harmonic;
this is alias-free for the retained harmonics and keeps the half-period
antisymmetry exact on the grid.

The amplitude of a solution is the peak of ``w/h`` over the span at tau = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..assembly import batch_force_and_jacobian, nonlinear_force
from ..errors import ConvergenceError, DomainError, NumericalError
from .config import SolverConfig
from .modal import linear_modes

_GRID = np.linspace(-1.0, 1.0, 401)


@dataclass(frozen=True, eq=False)
class BackboneSample:
    amplitude: float
    omega: float
    f_hat: float
    coefficients: np.ndarray
    corrector_iterations: int
    step: float


@dataclass(eq=False)
class BackboneCurve:
    samples: List[BackboneSample]
    n_harmonics: int
    mode_index: int
    omega_linear: float
    f_hat_linear: float = 1.0
    metadata: dict = field(default_factory=dict)

    @property
    def amplitudes(self):
        return np.array([s.amplitude for s in self.samples])

    @property
    def f_hat(self):
        return np.array([s.f_hat for s in self.samples])

    @property
    def omega(self):
        return np.array([s.omega for s in self.samples])


class _Amplitude:
    """Peak displacement functional and its gradient with respect to ``sum_k Q_k``."""

    def __init__(self, model):
        self.model = model
        if model.basis is not None:
            self.grid_values = model.basis.evaluate(_GRID)

    def __call__(self, q):
        if self.model.basis is None:
            i = int(np.argmax(np.abs(q)))
            sign = 1.0 if q[i] >= 0 else -1.0
            grad = np.zeros_like(q)
            grad[i] = sign
            return abs(q[i]), grad
        w = q @ self.grid_values
        i = int(np.argmax(np.abs(w)))
        lo, hi = _GRID[max(i - 1, 0)], _GRID[min(i + 1, _GRID.size - 1)]
        xs = _GRID[i]
        # Newton on dw/dxi = 0 inside the bracketing grid cell
        for _ in range(8):
            d = self.model.basis.evaluate(np.array([xs]), order=1)[:, 0] @ q
            d2 = self.model.basis.evaluate(np.array([xs]), order=2)[:, 0] @ q
            if d2 == 0:
                break
            step = d / d2
            x_new = min(max(xs - step, lo), hi)
            if abs(x_new - xs) < 1e-15:
                xs = x_new
                break
            xs = x_new
        psi = self.model.basis.evaluate(np.array([xs]))[:, 0]
        val = q @ psi
        if abs(val) < abs(w[i]):
            psi = self.grid_values[:, i]
            val = q @ psi
        sign = 1.0 if val >= 0 else -1.0
        return abs(val), sign * psi


class _HarmonicBalance:
    def __init__(self, model, n_harmonics):
        if n_harmonics < 1:
            raise DomainError("n_harmonics must be >= 1")
        self.model = model
        self.orders = np.arange(1, n_harmonics + 1, 2)
        kmax = int(self.orders[-1])
        self.n_samples = 4 * kmax + 2
        theta = 2.0 * np.pi * np.arange(self.n_samples) / self.n_samples
        self.theta = theta
        self.Hc = np.cos(np.outer(theta, self.orders))  # (Nt, H)
        self.amplitude = _Amplitude(model)
        self.H = self.orders.size
        self.N = model.N

    def unpack(self, x):
        return x[:-1].reshape(self.H, self.N), x[-1]

    def residual(self, x, target, with_jacobian=True):
        Q, omega = self.unpack(x)
        M, K = self.model.M, self.model.K
        Nt, H, N = self.n_samples, self.H, self.N
        qt = self.Hc @ Q
        F, J = batch_force_and_jacobian(self.model, qt)
        Fh = (2.0 / Nt) * self.Hc.T @ F
        k2w2 = (self.orders * omega) ** 2
        KQ = Q @ K.T
        MQ = Q @ M.T
        R = KQ - k2w2[:, None] * MQ + Fh
        amp, amp_grad = self.amplitude(Q.sum(axis=0))
        res = np.concatenate([R.ravel(), [amp - target]])
        scale = np.linalg.norm(KQ) + np.linalg.norm(k2w2[:, None] * MQ) + np.linalg.norm(Fh)
        rel = max(
            np.linalg.norm(R) / scale if scale > 0 else np.linalg.norm(R),
            abs(amp - target) / max(target, 1e-300),
        )
        if not with_jacobian:
            return res, rel, None
        jac = np.zeros((H * N + 1, H * N + 1))
        proj = (2.0 / Nt) * np.einsum("th,tg,tij->higj", self.Hc, self.Hc, J)
        for h in range(H):
            proj[h, :, h, :] += K - k2w2[h] * M
        jac[:-1, :-1] = proj.reshape(H * N, H * N)
        jac[:-1, -1] = (-2.0 * self.orders[:, None] ** 2 * omega * MQ).ravel()
        jac[-1, :-1] = np.tile(amp_grad, H)
        return res, rel, jac

    def even_harmonic_residual(self, x):
        """Largest projection of the force onto harmonics that should vanish."""
        Q, _ = self.unpack(x)
        qt = self.Hc @ Q
        F, _ = batch_force_and_jacobian(self.model, qt)
        kmax = int(self.orders[-1])
        even = np.arange(0, 2 * kmax + 1, 2)
        proj_even = np.cos(np.outer(self.theta, even)).T @ F
        proj_sine = np.sin(np.outer(self.theta, np.arange(1, kmax + 1))).T @ F
        scale = max(np.max(np.abs(F)), 1e-300) * self.n_samples
        return max(np.max(np.abs(proj_even)), np.max(np.abs(proj_sine))) / scale

    def solve(self, x0, target, config):
        x = x0.copy()
        rel = np.inf
        for it in range(config.max_newton + 1):
            res, rel, jac = self.residual(x, target)
            if not np.all(np.isfinite(res)):
                break
            if rel < config.newton_tol:
                # one polishing step; cheap at quadratic convergence
                try:
                    x_pol = x - np.linalg.solve(jac, res)
                except np.linalg.LinAlgError:
                    return x, it
                _, rel_pol, _ = self.residual(x_pol, target, with_jacobian=False)
                return (x_pol if rel_pol <= rel else x), it
            try:
                x = x - np.linalg.solve(jac, res)
            except np.linalg.LinAlgError:
                break
        raise ConvergenceError(
            f"harmonic-balance corrector failed at amplitude {target:.6g}",
            residual=rel,
            state=x,
        )


def hbm_backbone(model, mode_index=1, amplitude_grid=(0.1,), n_harmonics=3,
                 config=None, frequency_scale=1.0):
    """Backbone curve of mode ``mode_index`` (1-based) on ``amplitude_grid``.

    ``n_harmonics`` is the highest harmonic order kept; only odd orders
    ``1, 3, ..., n_harmonics`` enter. Each point is corrected by Newton's
    method from the previous solution rescaled to the new amplitude; the
    first point is seeded by the single-harmonic closed form. A failed
    corrector halves the amplitude step up to ``config.max_bisections`` times.

    ``f_hat`` of each sample is ``frequency_scale * omega / omega_linear``.
    """
    config = config or SolverConfig()
    grid = np.asarray(amplitude_grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise DomainError("amplitude grid must be positive and strictly increasing")
    modes = linear_modes(model, mode_index)
    v = modes.shapes[:, mode_index - 1]
    omega_lin = float(modes.omega_hat[mode_index - 1])
    hb = _HarmonicBalance(model, n_harmonics)
    H, N = hb.H, hb.N

    # closed-form single-harmonic seed: w^2 = w_m^2 + 3/4 A^2 v.f(v)
    peak, _ = hb.amplitude(v)
    cubic = float(v @ nonlinear_force(model, v))

    def seed(a):
        A = a / peak
        x = np.zeros(H * N + 1)
        x[:N] = A * v
        x[-1] = np.sqrt(max(omega_lin**2 + 0.75 * A * A * cubic, 1e-30))
        return x

    samples = []
    a_prev, x_prev = 0.0, None
    bisections_total = 0
    for target in grid:
        a_try = target
        halvings = 0
        while True:
            if x_prev is None:
                x0 = seed(a_try)
            else:
                x0 = x_prev.copy()
                x0[:-1] *= a_try / a_prev
            try:
                x, iters = hb.solve(x0, a_try, config)
            except ConvergenceError as exc:
                halvings += 1
                bisections_total += 1
                if halvings > config.max_bisections:
                    raise ConvergenceError(
                        f"continuation stalled between amplitudes {a_prev:.6g} and {target:.6g}",
                        residual=exc.residual,
                        state={"amplitude": a_prev, "x": x_prev, "samples": samples},
                    ) from exc
                a_try = a_prev + 0.5 * (a_try - a_prev)
                continue
            step = a_try - a_prev
            a_prev, x_prev = a_try, x
            if a_try == target:
                break
            a_try = target
            halvings = 0
        leak = hb.even_harmonic_residual(x)
        if leak > config.even_harmonic_tol:
            raise NumericalError(f"even-harmonic residual {leak:.2e} at amplitude {target:.6g}")
        Q, omega = hb.unpack(x)
        samples.append(
            BackboneSample(
                amplitude=float(target),
                omega=float(omega),
                f_hat=float(frequency_scale * omega / omega_lin),
                coefficients=Q.copy(),
                corrector_iterations=int(iters),
                step=float(step),
            )
        )
    return BackboneCurve(
        samples=samples,
        n_harmonics=int(n_harmonics),
        mode_index=int(mode_index),
        omega_linear=omega_lin,
        f_hat_linear=float(frequency_scale),
        metadata={
            "harmonic_orders": hb.orders.tolist(),
            "phase_samples": hb.n_samples,
            "bisections": bisections_total,
            "newton_tol": config.newton_tol,
        },
    )
