"""
Kernel approximation error measures, normalized so they compare across n:
spectral ||G - G'||_2 / n (worst case) and Frobenius ||G - G'||_F / n^2
(global).
"""
import math
from typing import NamedTuple

import numpy as np

from sketching.exceptions import ContractViolation
from sketching.kernels import best_rank_k
from sketching.numerics import as_matrix, spectral_norm, sym_eig


def _difference(G, Gp):
    G = as_matrix(G, 'G')
    Gp = as_matrix(Gp, "G'")
    if G.shape != Gp.shape or G.shape[0] != G.shape[1]:
        raise ContractViolation(f"error measures need two square matrices of one shape, got {G.shape} and {Gp.shape}")
    return G, Gp, G - Gp


def spectral_error(G, Gp):
    G, _, diff = _difference(G, Gp)
    return spectral_norm(diff) / G.shape[0]


def frobenius_error(G, Gp):
    G, _, diff = _difference(G, Gp)
    return float(np.linalg.norm(diff, 'fro')) / G.shape[0] ** 2


def rank_k_frobenius_error(G, Gp, k):
    """||G - G'_k||_F / n^2."""
    G, Gp, _ = _difference(G, Gp)
    return float(np.linalg.norm(G - best_rank_k(Gp, k), 'fro')) / G.shape[0] ** 2


class RankKCheck(NamedTuple):
    lhs: float
    rhs: float
    slack: float

    @property
    def holds(self):
        return self.lhs <= self.rhs + self.slack


def rank_k_frobenius_check(G, Gp, k):
    """
    Both sides of ||G - G'_k||_F <= ||G - G_k||_F + ||G - G'||_2 sqrt(k),
    with the measured spectral error on the right.
    """
    G, Gp, diff = _difference(G, Gp)
    n = G.shape[0]
    if not 1 <= k <= n:
        raise ContractViolation(f"k must satisfy 1 <= k <= n={n}, got {k}")
    lhs = float(np.linalg.norm(G - best_rank_k(Gp, k), 'fro'))
    rhs = float(np.linalg.norm(G - best_rank_k(G, k), 'fro')) + spectral_norm(diff) * math.sqrt(k)
    return RankKCheck(lhs=lhs, rhs=rhs, slack=1e-6 * n)


def phi_from_gram(G):
    """An explicit feature matrix with Phi Phi^T = G: V Lambda^1/2, negatives clamped."""
    values, vectors = sym_eig(G)
    return vectors * np.sqrt(np.maximum(values, 0.0))


def max_directional_gap(G, Phi, Y):
    """max over eigenvectors v of G - YY^T of | ||Phi^T v||^2 - ||Y^T v||^2 |."""
    _, vectors = sym_eig(as_matrix(G, 'G') - Y @ Y.T)
    gaps = np.sum((Phi.T @ vectors) ** 2, axis=0) - np.sum((Y.T @ vectors) ** 2, axis=0)
    return float(np.max(np.abs(gaps)))
