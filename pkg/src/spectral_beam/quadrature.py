"""Integration rules on [-1, 1]."""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EvaluationError, NumericalError


class RuleKind(str, enum.Enum):
    GAUSS_POLY_EXACT = "GAUSS_POLY_EXACT"
    CHEBYSHEV_CORRECTED = "CHEBYSHEV_CORRECTED"


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: RuleKind
    exact_degree: int

    @property
    def size(self):
        return self.nodes.size


def _legendre_and_derivative(n, x):
    p0 = np.ones_like(x)
    if n == 0:
        return p0, np.zeros_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@functools.lru_cache(maxsize=128)
def gauss_rule(n):
    """Gauss-Legendre rule with ``n`` nodes (exact through degree ``2n - 1``).

    Roots of P_n are polished by Newton's method from the Tricomi-type
    initial guess; weights are ``2 / ((1 - x^2) P_n'(x)^2)``.
    """
    n = int(n)
    if n < 1:
        raise DomainError("gauss_rule needs at least one node")
    k = np.arange(1, n + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    x = x * (1 - (n - 1) / (8.0 * n**3))
    for _ in range(100):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= 4 * np.finfo(float).eps:
            break
    else:
        raise NumericalError(f"Legendre root iteration did not converge for n={n}")
    _, dp = _legendre_and_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w, RuleKind.GAUSS_POLY_EXACT, 2 * n - 1)


@functools.lru_cache(maxsize=128)
def chebyshev_rule(n):
    """Chebyshev-node rule re-weighted for the plain integral of ``f``.

    Nodes are ``cos((2k - 1) pi / (2n))``; the weights ``(pi/n) sqrt(1 - x^2)``
    undo the Chebyshev weight function. Not polynomially exact: integrands
    without vanishing endpoint factors carry an O(1/n^2) error.
    """
    n = int(n)
    if n < 1:
        raise DomainError("chebyshev_rule needs at least one node")
    k = np.arange(1, n + 1)
    x = np.cos((2 * k - 1) * np.pi / (2 * n))[::-1].copy()
    x = 0.5 * (x - x[::-1])
    w = (np.pi / n) * np.sqrt(1.0 - x * x)
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w, RuleKind.CHEBYSHEV_CORRECTED, 1)


def integrate(rule, f):
    """Weighted sum of ``f`` over the rule's nodes.

    ``f`` is called once with the full node array and must broadcast.
    """
    values = np.asarray(f(rule.nodes), dtype=float)
    values = np.broadcast_to(values, rule.nodes.shape)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise EvaluationError(
            f"integrand not finite at node {bad[0]} (xi={rule.nodes[bad[0]]!r})"
        )
    return float(np.dot(rule.weights, values))


def rule_for_basis(N, kind=RuleKind.GAUSS_POLY_EXACT):
    """Default rule for an ``N``-term basis.

    Gauss nodes are chosen so that ``exact_degree >= 2N + 8``; the Chebyshev
    rule uses ``max(20, N + 5)`` nodes.
    """
    kind = RuleKind(kind)
    n = max(20, N + 5)
    if kind is RuleKind.GAUSS_POLY_EXACT:
        return gauss_rule(n)
    return chebyshev_rule(n)
