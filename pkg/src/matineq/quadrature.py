"""Gauss-Legendre quadrature on [0, 1] for matrix- and eigenvalue-valued
segment integrals of the form integral f((1-x)A + xB) dx."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import hermat
from .hermat import HermitianMatrix, hermitian, symmetrize

DEFAULT_NODES = 32


@dataclass(frozen=True)
class QuadRule:
    """Nodes in (0, 1) and positive weights summing to 1."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if x.shape != w.shape or x.ndim != 1:
            raise ValueError("nodes and weights must be 1-d and equal length")
        if np.any(x <= 0.0) or np.any(x >= 1.0) or np.any(w <= 0.0):
            raise ValueError("nodes must lie in (0,1) with positive weights")
        if abs(w.sum() - 1.0) > 1e-14:
            raise ValueError(f"weights sum to {w.sum()!r}, expected 1")
        object.__setattr__(self, "nodes", hermat._freeze(x))
        object.__setattr__(self, "weights", hermat._freeze(w))

    @property
    def order(self) -> int:
        return self.nodes.size


def _legendre_and_derivative(m: int, x: np.ndarray):
    """P_m(x) and P_m'(x) via the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, m + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    dp = m * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


@lru_cache(maxsize=None)
def gauss_legendre(m: int = DEFAULT_NODES) -> QuadRule:
    """m-point Gauss-Legendre rule mapped to [0, 1].

    Roots found by Newton iteration from the Chebyshev initial guess,
    iterated to 1e-15; exact for polynomials of degree <= 2m - 1.
    """
    if m < 1:
        raise ValueError("need at least one node")
    if m == 1:
        return QuadRule(np.array([0.5]), np.array([1.0]))
    k = np.arange(1, m + 1)
    x = np.cos(math.pi * (k - 0.25) / (m + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_derivative(m, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    _, dp = _legendre_and_derivative(m, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    # Map from [-1, 1] to [0, 1]; total weight 2 becomes 1.
    nodes = (1.0 - x) / 2.0   # reverses order so nodes are ascending
    weights = w / 2.0
    order = np.argsort(nodes)
    return QuadRule(nodes[order], weights[order])


def segment_integral_matrix(A: HermitianMatrix, B: HermitianMatrix, fn,
                            rule: QuadRule | None = None) -> HermitianMatrix:
    """Gauss-Legendre approximation of integral f((1-x)A + xB) dx."""
    rule = rule or gauss_legendre()
    A, B = hermitian(A), hermitian(B)
    acc = np.zeros_like(A.mat)
    for x, w in zip(rule.nodes, rule.weights):
        seg = symmetrize((1.0 - x) * A.mat + x * B.mat)
        acc = acc + w * hermat.apply_fn(seg, fn).mat
    return symmetrize(acc)


def segment_integral_eigenvalue(A: HermitianMatrix, B: HermitianMatrix, fn,
                                j: int, rule: QuadRule | None = None) -> float:
    """Gauss-Legendre approximation of integral lambda_{1+j} of
    f((1-x)A + xB) dx, with lambda_{1+j} the (1+j)-th largest eigenvalue."""
    rule = rule or gauss_legendre()
    A, B = hermitian(A), hermitian(B)
    n = A.dim
    if not 0 <= j < n:
        raise IndexError(f"eigenvalue index {j} out of range for dim {n}")
    total = 0.0
    for x, w in zip(rule.nodes, rule.weights):
        seg = symmetrize((1.0 - x) * A.mat + x * B.mat)
        lam = hermat.eigvals_desc(seg)
        bad = hermat.spectrum_in_domain(lam, *fn.domain)
        if bad.size:
            from .errors import DomainViolation

            raise DomainViolation(
                f"segment spectrum leaves domain of '{fn.name}' at x={x:.4f}",
                offending=lam[bad],
            )
        flam = np.sort(np.asarray(fn(np.clip(lam, *fn.domain))))[::-1]
        total += w * flam[j]
    return float(total)
