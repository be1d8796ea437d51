"""Linear modal analysis: K v = w^2 M v."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from ..errors import ConditioningError, DomainError


@dataclass(frozen=True, eq=False)
class ModalResult:
    omega_hat: np.ndarray
    shapes: np.ndarray
    f_hz: np.ndarray
    residuals: np.ndarray


def linear_modes(model, k):
    """Lowest ``k`` modes, mass-normalized.

    M is reduced by Cholesky to a standard symmetric problem. When the model
    carries the weighted second-derivative factor ``S`` (``K = S^T S``) the
    reduced problem is solved through the SVD of ``S L^-T``, which keeps the
    low frequencies accurate to a few ulps even when ``K`` is badly scaled;
    otherwise a symmetric eigensolver is applied to ``L^-1 K L^-T``.
    """
    N = model.N
    if not 0 <= k <= N:
        raise DomainError(f"requested {k} modes from a model of size {N}")
    if k == 0:
        empty = np.zeros(0)
        return ModalResult(empty, np.zeros((N, 0)), empty, empty)
    try:
        L = np.linalg.cholesky(model.M)
    except np.linalg.LinAlgError:
        raise ConditioningError("mass matrix is not positive definite") from None

    if model.stiffness_factor is not None:
        A = solve_triangular(L, model.stiffness_factor.T, lower=True).T
        _, sigma, Vt = np.linalg.svd(A, full_matrices=False)
        order = np.argsort(sigma)[:k]
        omega = sigma[order]
        Y = Vt[order].T
    else:
        Linv_K = solve_triangular(L, model.K, lower=True)
        Kt = solve_triangular(L, Linv_K.T, lower=True)
        Kt = 0.5 * (Kt + Kt.T)
        lam, Y = np.linalg.eigh(Kt)
        if lam[0] <= 0:
            raise ConditioningError("stiffness matrix is not positive definite")
        omega = np.sqrt(lam[:k])
        Y = Y[:, :k]

    shapes = solve_triangular(L.T, Y, lower=False)
    # deterministic sign: largest-magnitude entry positive
    idx = np.argmax(np.abs(shapes), axis=0)
    shapes = shapes * np.sign(shapes[idx, np.arange(k)])
    KV = model.K @ shapes
    res = np.linalg.norm(KV - (omega**2) * (model.M @ shapes), axis=0) / np.linalg.norm(KV, axis=0)
    return ModalResult(omega, shapes, omega * model.f_ref, res)
