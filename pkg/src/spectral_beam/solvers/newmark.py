"""Average-acceleration Newmark integration with Newton iterations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..assembly import nonlinear_force, nonlinear_jacobian
from ..errors import ConvergenceError, DomainError

GAMMA = 0.5
BETA = 0.25


@dataclass(frozen=True, eq=False)
class TransientResult:
    times: np.ndarray
    q_history: np.ndarray
    qdot_history: np.ndarray
    newton_iteration_counts: np.ndarray
    energy_history: np.ndarray


def _relative_residual(R, *parts):
    scale = sum(np.linalg.norm(p) for p in parts)
    norm = np.linalg.norm(R)
    if norm == 0.0:
        return 0.0
    return norm / scale if scale > 0 else np.inf


def newmark_transient(model, q0, qdot0, dt, n_steps, newton_tol=1e-10, max_newton=30):
    """Integrate ``M q'' + K q + f_nl(q) = 0`` from ``(q0, qdot0)``.

    Each step solves the dynamic residual at ``t_{n+1}`` by Newton's method
    with the analytic tangent ``4/dt^2 M + K + df_nl/dq``. Raises
    ``ConvergenceError`` naming the step if the relative residual does not
    drop below ``newton_tol`` within ``max_newton`` iterations.
    """
    if not dt > 0:
        raise DomainError("dt must be positive")
    if not newton_tol > 0:
        raise DomainError("newton_tol must be positive")
    M, K = model.M, model.K
    N = model.N
    c0 = 1.0 / (BETA * dt * dt)
    c1 = 1.0 / (BETA * dt)
    c2 = 1.0 / (2.0 * BETA) - 1.0

    q = np.array(q0, dtype=float).reshape(N)
    v = np.array(qdot0, dtype=float).reshape(N)
    a = np.linalg.solve(M, -(K @ q) - nonlinear_force(model, q))

    qs = np.empty((n_steps + 1, N))
    vs = np.empty((n_steps + 1, N))
    iters = np.zeros(n_steps, dtype=int)
    energy = np.empty(n_steps + 1)
    qs[0], vs[0], energy[0] = q, v, model.energy(q, v)

    for n in range(n_steps):
        q_new = q + dt * v + 0.25 * dt * dt * a  # constant-acceleration predictor
        for it in range(max_newton + 1):
            parts = (c0 * (q_new - q), c1 * v, c2 * a)
            a_new = parts[0] - parts[1] - parts[2]
            f = nonlinear_force(model, q_new)
            Kq = K @ q_new
            R = M @ a_new + Kq + f
            # scale by the separate inertial terms: they cancel near zero crossings
            rel = _relative_residual(R, *(M @ p for p in parts), Kq, f)
            if rel < newton_tol:
                break
            if it == max_newton:
                raise ConvergenceError(
                    f"Newton failed at step {n + 1}: relative residual {rel:.3e}",
                    step=n + 1,
                    residual=rel,
                    state=q_new,
                )
            J = c0 * M + K + nonlinear_jacobian(model, q_new)
            q_new = q_new - np.linalg.solve(J, R)
        iters[n] = it
        v = v + dt * ((1.0 - GAMMA) * a + GAMMA * a_new)
        q, a = q_new, a_new
        qs[n + 1], vs[n + 1], energy[n + 1] = q, v, model.energy(q, v)

    times = dt * np.arange(n_steps + 1)
    return TransientResult(times, qs, vs, iters, energy)
