"""Dimensionless reduced-order model of the von Karman beam.

With ``xbar = x/L`` mapped to ``xi = 2 xbar - 1`` and ``w = h * sum_j q_j phi_j``
the semi-discrete equations are ``M q'' + K q + f_nl(q) = 0`` with

    M_ij = 1/2 int phi_i phi_j dxi
    K_ij = 8   int phi_i'' phi_j'' dxi
    B_ij =     int phi_i'' phi_j dxi
    C_ij =     int phi_i' phi_j' dxi       (symmetrized)
    f_nl = -4 alpha (q^T C q) B q

Gradation is through the thickness only, so material enters solely through
``alpha`` and the reference frequency.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .basis import BasisSpec, TabulatedBasis, raw_basis_table, tabulate
from .errors import AccuracyError, ConditioningError
from .material import NondimParameters
from .quadrature import RuleKind, gauss_rule, rule_for_basis

# Coordinate-mapping factor of the nonlinear term; exposed so the validation
# suite can be shown to detect a perturbed constant.
NONLINEAR_FACTOR = 4.0

IDENTITY_TOL = 1e-10
DOUBLING_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ReducedModel:
    M: np.ndarray
    K: np.ndarray
    B: np.ndarray
    C: np.ndarray
    alpha: float
    f_ref: float = 1.0
    spec: Optional[BasisSpec] = None
    basis: Optional[TabulatedBasis] = None
    stiffness_factor: Optional[np.ndarray] = None
    provenance: dict = field(default_factory=dict)

    @property
    def N(self):
        return self.M.shape[0]

    def with_alpha(self, alpha):
        """Same matrices, different nonlinearity scalar (e.g. zeroed)."""
        return ReducedModel(
            self.M, self.K, self.B, self.C, alpha, self.f_ref, self.spec,
            self.basis, self.stiffness_factor, dict(self.provenance),
        )

    def displacement(self, q, xi):
        """Reconstructed ``w/h`` at ``xi`` for coordinates ``q``."""
        if self.basis is None:
            raise ValueError("model has no spatial basis attached")
        return np.asarray(q) @ self.basis.evaluate(xi)

    def energy(self, q, qdot):
        """Kinetic + bending + membrane (quartic) energy."""
        q = np.asarray(q)
        qdot = np.asarray(qdot)
        quad = q @ self.C @ q
        return (
            0.5 * qdot @ self.M @ qdot
            + 0.5 * q @ self.K @ q
            + NONLINEAR_FACTOR / 4.0 * self.alpha * quad * quad
        )


def _raw_matrices(spec, rule):
    return _gram_matrices(raw_basis_table(spec, rule.nodes), rule.weights)


def _gram_matrices(tables, w):
    P, D1, D2 = tables
    M = 0.5 * (P * w) @ P.T
    K = 8.0 * (D2 * w) @ D2.T
    B = (D2 * w) @ P.T
    C = (D1 * w) @ D1.T
    return M, K, B, C


def _sym(A):
    return 0.5 * (A + A.T)


def assemble(spec, nondim, profile=None, c=None, geom=None, rule=None, *, check=True):
    """Assemble the reduced model for basis ``spec``.

    ``profile``, ``c`` and ``geom`` only feed the provenance record; the
    physics they carry is already in ``nondim``. With ``check`` the Gauss
    doubling test and the identity ``B = -C`` are enforced.
    """
    if rule is None:
        rule = rule_for_basis(spec.N)
    tab = tabulate(spec, rule)
    Mr, Kr, Br, Cr = _raw_matrices(spec, rule)

    if check and rule.kind is RuleKind.GAUSS_POLY_EXACT:
        fine = _raw_matrices(spec, gauss_rule(2 * rule.size))
        for name, coarse, ref in zip("MKBC", (Mr, Kr, Br, Cr), fine):
            scale = np.max(np.abs(ref))
            change = np.max(np.abs(coarse - ref)) / scale
            if change > DOUBLING_TOL:
                raise AccuracyError(
                    f"{name} changed by {change:.2e} (relative) under quadrature doubling"
                )

    M, K, B, C = _gram_matrices(
        (tab.values, tab.first_derivs, tab.second_derivs), tab.weights
    )
    M, K, C = _sym(M), _sym(K), _sym(C)

    if check:
        gap = np.max(np.abs(B + C)) / np.max(np.abs(C))
        if gap > IDENTITY_TOL:
            raise AccuracyError(f"integration-by-parts identity B = -C violated by {gap:.2e}")
        for name, A in (("M", M), ("K", K), ("C", C)):
            try:
                np.linalg.cholesky(A)
            except np.linalg.LinAlgError:
                raise ConditioningError(f"assembled {name} is not positive definite") from None

    S = np.sqrt(8.0 * tab.weights)[:, None] * tab.second_derivs.T
    provenance = {
        "bc": spec.bc.value,
        "N": spec.N,
        "rule": rule.kind.value,
        "nodes": rule.size,
    }
    if profile is not None:
        provenance["profile"] = f"{profile.kind.value}:{profile.v_star!r}"
    if geom is not None:
        provenance["geometry"] = f"L={geom.L!r},b={geom.b!r},h={geom.h!r}"
    if c is not None:
        provenance["eta_E"] = c.eta_E
    for A in (M, K, B, C, S):
        A.setflags(write=False)
    return ReducedModel(
        M=M, K=K, B=B, C=C,
        alpha=nondim.alpha, f_ref=nondim.f_ref,
        spec=spec, basis=tab, stiffness_factor=S, provenance=provenance,
    )


def nonlinear_force(model, q):
    """Membrane restoring force ``-4 alpha (q^T C q) B q``; O(N^2)."""
    q = np.asarray(q, dtype=float)
    return -NONLINEAR_FACTOR * model.alpha * (q @ model.C @ q) * (model.B @ q)


def nonlinear_jacobian(model, q):
    """d f_nl / d q = -4 alpha [ (q^T C q) B + 2 (B q)(C q)^T ]."""
    q = np.asarray(q, dtype=float)
    Cq = model.C @ q
    Bq = model.B @ q
    return -NONLINEAR_FACTOR * model.alpha * ((q @ Cq) * model.B + 2.0 * np.outer(Bq, Cq))


def batch_force_and_jacobian(model, Q):
    """Force and Jacobian at many states; ``Q`` has shape ``(n_states, N)``."""
    CQ = Q @ model.C.T
    BQ = Q @ model.B.T
    s = np.einsum("ti,ti->t", Q, CQ)
    k = -NONLINEAR_FACTOR * model.alpha
    F = k * s[:, None] * BQ
    J = k * (s[:, None, None] * model.B[None] + 2.0 * BQ[:, :, None] * CQ[:, None, :])
    return F, J


def duffing_model(k_linear=1.0, k_cubic=1.0, mass=1.0):
    """One-degree-of-freedom ``m q'' + k q + k3 q^3 = 0`` in reduced-model form."""
    one = np.array([[1.0]])
    return ReducedModel(
        M=mass * one,
        K=k_linear * one,
        B=-one.copy(),
        C=one.copy(),
        alpha=0.25 * k_cubic,
        provenance={"kind": "duffing"},
    )


def standard_model(spec, alpha=6.0, f_ref=1.0, rule=None):
    """Model with an explicit ``alpha`` (homogeneous section by default)."""
    return assemble(spec, NondimParameters(alpha=alpha, f_ref=f_ref), rule=rule)
