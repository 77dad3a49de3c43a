"""
Shift-invariant kernels and the exact gram matrix used as evaluation oracle.

The Gaussian kernel is normalized so that K(x, x) = 1, which makes
trace(G) = n. There is no (1/2pi)^(d/2) prefactor.
"""
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .exceptions import ContractViolation
from .numerics import as_matrix, sym_eig

GAUSSIAN = 'gaussian'
KERNEL_FAMILIES = (GAUSSIAN,)


@dataclass(frozen=True)
class KernelSpec:
    family: str = GAUSSIAN
    sigma: float = 1.0

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise ContractViolation(f"unknown kernel family {self.family!r}, expected one of {KERNEL_FAMILIES}")
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise ContractViolation(f"kernel bandwidth sigma must be positive, got {self.sigma}")

    def from_sq_distance(self, sq_dist):
        return np.exp(-np.asarray(sq_dist) / (2.0 * self.sigma ** 2))

    def to_record(self):
        return {'family': self.family, 'sigma': float(self.sigma)}

    @classmethod
    def from_record(cls, record):
        return cls(family=record['family'], sigma=float(record['sigma']))


def eval_kernel(spec, x, y):
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape or x.size < 1:
        raise ContractViolation(f"kernel arguments must share a dimension >= 1, got {x.size} and {y.size}")
    diff = x - y
    return float(spec.from_sq_distance(diff @ diff))


def cross_kernel(spec, X, Y):
    """K(X_i, Y_j) for every row pair; used by Nystrom to build C and c_row."""
    X = as_matrix(X, 'X')
    Y = as_matrix(Y, 'Y')
    if X.shape[1] != Y.shape[1]:
        raise ContractViolation(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    return spec.from_sq_distance(cdist(X, Y, metric='sqeuclidean'))


def gram(spec, A):
    """Exact n x n gram matrix: upper triangle evaluated, mirrored, unit diagonal."""
    A = as_matrix(A)
    n = A.shape[0]
    if n < 1:
        raise ContractViolation("gram matrix needs at least one point")
    if n == 1:
        return np.ones((1, 1))

    G = squareform(spec.from_sq_distance(pdist(A, metric='sqeuclidean')))
    np.fill_diagonal(G, 1.0)
    return G


def best_rank_k(G, k):
    G = as_matrix(G, 'G')
    n = G.shape[0]
    if not 1 <= k <= n:
        raise ContractViolation(f"rank k must satisfy 1 <= k <= {n}, got {k}")
    values, vectors = sym_eig(G)
    # largest magnitude, so round-off negatives never displace real signal
    top = np.argsort(-np.abs(values), kind='stable')[:k]
    V_k = vectors[:, top]
    return (V_k * values[top]) @ V_k.T
