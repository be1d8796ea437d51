"""Boundary-adapted Chebyshev trial functions on xi in [-1, 1].

Raw functions are ``g(xi) T_{j-1}(xi)`` with ``g = (1 - xi^2)^2`` for
clamped ends and ``g = 1 - xi^2`` for simply supported ends, ``j = 1..N``.
The optional orthonormalization is a lower-triangular (inverse-Cholesky type)
transform with respect to the dimensionless mass inner product
``(u, v) = 1/2 int u v dxi``.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ConditioningError, DomainError
from .quadrature import rule_for_basis

MAX_BASIS_SIZE = 64


class BoundaryCondition(str, enum.Enum):
    CC = "CC"
    SS = "SS"


@dataclass(frozen=True)
class BasisSpec:
    N: int
    bc: BoundaryCondition
    orthonormalized: bool = True
    allow_large: bool = False

    def __post_init__(self):
        object.__setattr__(self, "bc", BoundaryCondition(self.bc))
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"basis size N must be a positive integer, got {self.N!r}")
        if self.N > MAX_BASIS_SIZE and not self.allow_large:
            raise DomainError(
                f"N={self.N} exceeds {MAX_BASIS_SIZE}; pass allow_large=True to override"
            )


def _check_xi(xi):
    x = np.asarray(xi, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(np.abs(x) > 1.0 + 1e-14):
        raise DomainError("xi must lie in [-1, 1]")
    return x


def chebyshev_table(nmax, xi):
    """T_n, T_n', T_n'' for n = 0..nmax at the points ``xi``.

    Derivatives come from T_n' = n U_{n-1} and T_n'' = n U_{n-1}', with U and
    U' advanced by their own three-term recurrences (no division by 1 - xi^2).
    Returns an array of shape ``(3, nmax + 1, len(xi))``.
    """
    x = np.atleast_1d(_check_xi(xi))
    out = np.zeros((3, nmax + 1, x.size))
    T, dT, d2T = out
    T[0] = 1.0
    if nmax >= 1:
        T[1] = x
    for n in range(1, nmax):
        T[n + 1] = 2.0 * x * T[n] - T[n - 1]
    # U_k and U_k' for k = 0..nmax-1
    u_prev, u = np.zeros_like(x), np.ones_like(x)      # U_{-1}, U_0
    du_prev, du = np.zeros_like(x), np.zeros_like(x)
    for n in range(1, nmax + 1):
        dT[n] = n * u
        d2T[n] = n * du
        u_prev, u, du_prev, du = (
            u,
            2.0 * x * u - u_prev,
            du,
            2.0 * u + 2.0 * x * du - du_prev,
        )
    return out


def chebyshev_eval(n, xi, order=0):
    """Chebyshev polynomial of the first kind (or its 1st/2nd derivative)."""
    if order not in (0, 1, 2):
        raise DomainError("derivative order must be 0, 1 or 2")
    if n < 0:
        raise DomainError("degree must be nonnegative")
    table = chebyshev_table(n, xi)[order, n]
    return float(table[0]) if np.ndim(xi) == 0 else table


def _envelope(bc, x):
    if bc is BoundaryCondition.CC:
        s = 1.0 - x * x
        return s * s, -4.0 * x * s, 12.0 * x * x - 4.0
    return 1.0 - x * x, -2.0 * x, np.full_like(x, -2.0)


def raw_basis_table(spec, xi):
    """Raw boundary-adapted functions and derivatives, shape ``(3, N, len(xi))``."""
    x = np.atleast_1d(_check_xi(xi))
    T, dT, d2T = chebyshev_table(spec.N - 1, x)
    g, dg, d2g = _envelope(spec.bc, x)
    return np.stack(
        [
            g * T,
            dg * T + g * dT,
            d2g * T + 2.0 * dg * dT + g * d2T,
        ]
    )


def boundary_basis_eval(spec, j, xi, order=0):
    """Raw trial function ``j`` (1-based) or one of its first two derivatives."""
    if not 1 <= j <= spec.N:
        raise DomainError(f"basis index j={j} outside 1..{spec.N}")
    if order not in (0, 1, 2):
        raise DomainError("derivative order must be 0, 1 or 2")
    x = np.atleast_1d(_check_xi(xi))
    T, dT, d2T = chebyshev_table(j - 1, x)[:, j - 1]
    g, dg, d2g = _envelope(spec.bc, x)
    value = (g * T, dg * T + g * dT, d2g * T + 2.0 * dg * dT + g * d2T)[order]
    return float(value[0]) if np.ndim(xi) == 0 else value


def orthonormalize(G):
    """Lower-triangular ``R`` with ``R G R^T = I``.

    New functions are ``psi = R phi`` (row convention), so ``psi_k`` only
    mixes ``phi_1..phi_k`` and every leading span is preserved. Raises
    ``ConditioningError`` with the 0-based failing pivot if ``G`` is not SPD.
    """
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    if G.shape != (n, n):
        raise DomainError("Gram matrix must be square")
    scale = max(np.max(np.abs(G)), np.finfo(float).tiny) if n else 1.0
    if n and np.max(np.abs(G - G.T)) > 1e-12 * scale:
        raise ConditioningError("Gram matrix is not symmetric")
    L = np.zeros_like(G)
    for k in range(n):
        d = G[k, k] - np.dot(L[k, :k], L[k, :k])
        if not d > 0:
            raise ConditioningError(
                f"Gram matrix not positive definite: pivot {k} is {d:.3e}", pivot=k
            )
        L[k, k] = np.sqrt(d)
        L[k + 1 :, k] = (G[k + 1 :, k] - L[k + 1 :, :k] @ L[k, :k]) / L[k, k]
    return solve_triangular(L, np.eye(n), lower=True)


@dataclass(frozen=True, eq=False)
class TabulatedBasis:
    spec: BasisSpec
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    first_derivs: np.ndarray
    second_derivs: np.ndarray
    transform: np.ndarray
    raw_gram_condition: float

    def evaluate(self, xi, order=0):
        """Trial functions (after the transform) at arbitrary points."""
        return self.transform @ raw_basis_table(self.spec, xi)[order]

    def mass_gram(self):
        return 0.5 * (self.values * self.weights) @ self.values.T


def mass_gram(raw_values, weights):
    return 0.5 * (raw_values * weights) @ raw_values.T


def tabulate(spec, rule=None):
    """Tabulate trial functions and derivatives at the rule's nodes."""
    if rule is None:
        rule = rule_for_basis(spec.N)
    return _tabulate_cached(spec, rule)


def _qr_transform(raw_values, weights):
    # Householder QR of the weighted value matrix: same triangular factor as
    # Cholesky of the Gram matrix without squaring its condition number.
    A = np.sqrt(0.5 * weights)[:, None] * raw_values.T
    U = np.linalg.qr(A, mode="r")
    signs = np.sign(np.diag(U))
    signs[signs == 0] = 1.0
    U = U * signs[:, None]
    if np.any(np.diag(U) <= 0):
        k = int(np.flatnonzero(np.diag(U) <= 0)[0])
        raise ConditioningError(f"raw basis is rank deficient at pivot {k}", pivot=k)
    R = solve_triangular(U.T, np.eye(U.shape[0]), lower=True)
    # second pass ("twice is enough") removes the residual loss of
    # orthogonality, so one transform serves values and derivatives alike
    G = mass_gram(R @ raw_values, weights)
    return solve_triangular(np.linalg.cholesky(G), R, lower=True)


@functools.lru_cache(maxsize=64)
def _tabulate_cached(spec, rule):
    raw = raw_basis_table(spec, rule.nodes)
    G = mass_gram(raw[0], rule.weights)
    cond = float(np.linalg.cond(G))
    R = _qr_transform(raw[0], rule.weights) if spec.orthonormalized else np.eye(spec.N)
    values, d1, d2 = R @ raw[0], R @ raw[1], R @ raw[2]
    for arr in (values, d1, d2, R):
        arr.setflags(write=False)
    return TabulatedBasis(
        spec=spec,
        nodes=rule.nodes,
        weights=rule.weights,
        values=values,
        first_derivs=d1,
        second_derivs=d2,
        transform=R,
        raw_gram_condition=cond,
    )
