"""Frequency extraction from trajectories and backbone regression."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError, NumericalError


def zero_crossings(times, signal):
    """Linearly interpolated zero-crossing times of a sampled signal."""
    x = np.asarray(signal, dtype=float)
    t = np.asarray(times, dtype=float)
    s = np.sign(x)
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)
    exact = np.flatnonzero(s == 0)
    tc = t[idx] - x[idx] * (t[idx + 1] - t[idx]) / (x[idx + 1] - x[idx])
    return np.sort(np.concatenate([tc, t[exact]]))


def extract_frequency(transient, coordinate_index=0):
    """Fundamental frequency (cycles per unit time) of one coordinate.

    Crossings within the first estimated period are discarded; the
    frequency is the mean crossing spacing of the rest, two crossings per
    cycle.
    """
    tc = zero_crossings(transient.times, transient.q_history[:, coordinate_index])
    if tc.size < 3:
        raise NumericalError(f"only {tc.size} zero crossings; need at least 3")
    period0 = 2.0 * np.mean(np.diff(tc))
    kept = tc[tc >= transient.times[0] + period0]
    if kept.size < 3:
        raise NumericalError("too few zero crossings after discarding the first period")
    half_period = (kept[-1] - kept[0]) / (kept.size - 1)
    return 1.0 / (2.0 * half_period)


def fit_backbone_beta(curve):
    """Fit ``f_hat / f_hat(a -> 0) - 1 = beta a^2``; returns ``(beta, r_squared)``.

    Only samples with amplitude <= 1 are used.
    """
    a = curve.amplitudes
    y = curve.f_hat / curve.f_hat_linear - 1.0
    keep = a <= 1.0
    a, y = a[keep], y[keep]
    if a.size < 4:
        raise DomainError("need at least 4 samples with amplitude <= 1")
    x = a * a
    sxx = float(x @ x)
    if np.unique(a).size < 2 or sxx == 0:
        raise DomainError("degenerate amplitude grid")
    beta = float(x @ y) / sxx
    ss_res = float(np.sum((y - beta * x) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return beta, r2
