"""
Dense linear algebra shared by the sketches, the baselines and the
evaluation oracles: thin SVD, symmetric eigendecomposition, pseudoinverse and
spectral norm. All functions are pure.
"""
import logging
from typing import NamedTuple

import numpy as np
import scipy.linalg
from sklearn.utils.extmath import svd_flip

from .exceptions import ContractViolation, NumericalFailure

logger = logging.getLogger(__name__)

POWER_ITERATION_TOL = 1e-6
POWER_ITERATION_MAX_ITER = 10_000
SYMMETRY_TOL = 1e-10
SECOND_START_SEED = 20240917


class SvdResult(NamedTuple):
    U: np.ndarray  # n x r
    S: np.ndarray  # r, non-increasing
    V: np.ndarray  # d x r


def as_matrix(A, name='A'):
    """Return A as a finite 2-d float64 array or raise ContractViolation."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ContractViolation(f"{name} must be 2-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ContractViolation(f"{name} contains NaN or Inf entries")
    return A


def thin_svd(A):
    A = as_matrix(A)
    if min(A.shape) < 1:
        raise ContractViolation(f"cannot decompose an empty matrix of shape {A.shape}")

    try:
        U, S, Vt = scipy.linalg.svd(A, full_matrices=False, check_finite=False, lapack_driver='gesdd')
    except np.linalg.LinAlgError:
        logger.debug("gesdd did not converge on %s matrix, retrying with gesvd", A.shape)
        try:
            U, S, Vt = scipy.linalg.svd(A, full_matrices=False, check_finite=False, lapack_driver='gesvd')
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(f"SVD did not converge for a {A.shape[0]}x{A.shape[1]} matrix") from exc

    # deterministic signs: largest |entry| of every left vector is positive
    U, Vt = svd_flip(U, Vt)
    return SvdResult(U=U, S=S, V=Vt.T)


def symmetrize(G):
    return (G + G.T) / 2.0


def sym_eig(G):
    """Eigenpairs of a symmetric matrix, eigenvalues non-increasing."""
    G = as_matrix(G, 'G')
    if G.shape[0] != G.shape[1]:
        raise ContractViolation(f"sym_eig needs a square matrix, got shape {G.shape}")

    try:
        values, vectors = scipy.linalg.eigh(symmetrize(G), check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed for a {G.shape[0]}x{G.shape[0]} matrix") from exc
    return values[::-1], vectors[:, ::-1]


def default_pinv_tol(shape):
    return max(shape) * np.finfo(np.float64).eps


def pinv(A, tol=None):
    """
    Moore-Penrose pseudoinverse.

    `tol` is relative: singular values at or below tol * sigma_1 are treated
    as zero. Defaults to max(rows, cols) * machine epsilon.
    """
    A = as_matrix(A)
    if tol is None:
        tol = default_pinv_tol(A.shape)
    if tol < 0:
        raise ContractViolation(f"pinv tolerance must be >= 0, got {tol}")

    if not np.any(A):
        return np.zeros((A.shape[1], A.shape[0]))

    U, S, V = thin_svd(A)
    keep = S > tol * S[0]
    return (V[:, keep] / S[keep]) @ U[:, keep].T


def is_symmetric(A, tol=SYMMETRY_TOL):
    if A.shape[0] != A.shape[1]:
        return False
    scale = np.linalg.norm(A)
    return np.linalg.norm(A - A.T) <= tol * scale


def _power_iteration(A, v, tol, max_iter):
    """sqrt of the Rayleigh quotient of A^T A at convergence, 0.0 if v lies in the null space."""
    v = v / np.linalg.norm(v)
    previous = None
    for iteration in range(max_iter):
        w = A.T @ (A @ v)
        rayleigh = float(v @ w)
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return 0.0
        v = w / norm_w
        if previous is not None and abs(rayleigh - previous) <= tol * abs(rayleigh):
            logger.debug("power iteration converged after %d iterations", iteration + 1)
            return float(np.sqrt(max(float(v @ (A.T @ (A @ v))), 0.0)))
        previous = rayleigh
    raise NumericalFailure(f"power iteration did not converge within {max_iter} iterations")


def spectral_norm(A, tol=POWER_ITERATION_TOL, max_iter=POWER_ITERATION_MAX_ITER):
    """
    Largest singular value.

    Symmetric inputs go through the dense eigensolver. Everything else runs
    power iteration on A^T A twice, from the normalized all-ones vector and
    from a fixed PCG64 draw, and keeps the larger value: a start orthogonal
    to the top singular vector converges to a smaller one.
    """
    A = as_matrix(A)
    if A.size == 0 or not np.any(A):
        return 0.0

    if is_symmetric(A):
        values = scipy.linalg.eigvalsh(symmetrize(A), check_finite=False)
        return float(np.max(np.abs(values)))

    ones = np.ones(A.shape[1])
    second = np.random.Generator(np.random.PCG64(SECOND_START_SEED)).standard_normal(A.shape[1])
    result = max(_power_iteration(A, ones, tol, max_iter), _power_iteration(A, second, tol, max_iter))
    if result == 0.0:
        logger.debug("both power iteration starts annihilated, falling back to SVD")
        return float(thin_svd(A).S[0])
    return result
