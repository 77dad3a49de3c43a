"""
The two streaming competitors:

* RNCA: exact linear PCA on the random feature matrix, via the m x m
  covariance accumulated as n rank-one updates.
* Nystrom: c independent single-slot reservoirs over the stream, then
  G ~ C W_k^+ C^T from the sampled points.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg.blas import dsyr

from .exceptions import ConfigurationError, ContractViolation
from .kernels import cross_kernel, gram
from .numerics import as_matrix, default_pinv_tol, sym_eig
from .rff import FeatureMap, apply, apply_batch
from .seeding import RESERVOIRS, substream
from .skpca import Projection, _check_accuracy, iter_rows
from .space import meter_or_null

logger = logging.getLogger(__name__)


# RNCA

@dataclass(frozen=True, eq=False)
class RncaModel:
    fm: FeatureMap
    cov: np.ndarray = field(repr=False)
    n_seen: int
    eigvals: np.ndarray = field(repr=False)
    eigvecs: np.ndarray = field(repr=False)
    center: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def d(self):
        return self.fm.d

    @property
    def m(self):
        return self.fm.m

    @property
    def space_entries(self):
        return self.m ** 2 + self.m * self.d


def _mirror_upper(cov):
    # dsyr only touches the upper triangle
    for j in range(cov.shape[0] - 1):
        cov[j + 1:, j] = cov[j, j + 1:]
    return cov


def rnca_from_covariance(fm, cov, n_seen, center=None, meter=None):
    meter = meter_or_null(meter)
    eigvals, eigvecs = sym_eig(cov)
    meter.hold('rnca.eig', eigvals.size + eigvecs.size)
    for array in (cov, eigvals, eigvecs):
        array.setflags(write=False)
    return RncaModel(fm=fm, cov=cov, n_seen=n_seen, eigvals=eigvals, eigvecs=eigvecs, center=center)


def rnca_train(fm, stream, meter=None, center=None):
    meter = meter_or_null(meter)
    started = time.perf_counter()
    meter.hold('rff.R', fm.R)
    meter.hold('rff.gamma', fm.gamma)
    cov = meter.hold('rnca.cov', np.zeros((fm.m, fm.m), order='F'))

    n_seen = 0
    for index, row in iter_rows(stream, center):
        if row.size != fm.d:
            raise ContractViolation(f"stream row {index} has dimension {row.size}, feature map expects {fm.d}")
        if not np.all(np.isfinite(row)):
            raise ContractViolation(f"stream row {index} contains NaN or Inf entries")
        meter.hold('row', row)
        z = meter.hold('z', apply(fm, row))
        cov = dsyr(1.0, z, lower=0, a=cov, overwrite_a=True)
        n_seen += 1

    cov = _mirror_upper(cov)
    # eigendecomposition once, at the end of training
    model = rnca_from_covariance(fm, cov, n_seen, center=center, meter=meter)
    logger.info("rnca trained on n=%d d=%d (m=%d) in %.3fs", n_seen, fm.d, fm.m, time.perf_counter() - started)
    return model


def _rnca_rank(model, k):
    k = model.m if k is None else k
    if not 1 <= k <= model.m:
        raise ContractViolation(f"k must satisfy 1 <= k <= m={model.m}, got {k}")
    return k


def rnca_test(model, x, k=None):
    k = _rnca_rank(model, k)
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != model.d:
        raise ContractViolation(f"point has dimension {x.size}, model expects {model.d}")
    if model.center is not None:
        x = x - model.center
    lifted = apply(model.fm, x)
    V_k = model.eigvecs[:, :k]
    loading = V_k.T @ lifted
    residual = float(np.linalg.norm(lifted - V_k @ loading))
    return Projection(lifted=lifted, loading=loading, residual=residual)


def rnca_reconstruct(model, A, k=None, chunk_rows=1024):
    """Z V_k V_k^T Z^T; k = m gives Z Z^T."""
    k = _rnca_rank(model, k)
    A = as_matrix(A)
    if A.shape[1] != model.d:
        raise ContractViolation(f"data has {A.shape[1]} columns, model expects {model.d}")
    if model.center is not None:
        A = A - model.center
    V_k = model.eigvecs[:, :k]
    Y = np.vstack([apply_batch(model.fm, A[start:start + chunk_rows]) @ V_k
                   for start in range(0, A.shape[0], chunk_rows)])
    return Y @ Y.T


# Nystrom

def nystrom_sample_count(eps, delta, n):
    """c = ceil(ln(2n / delta) / eps^2)."""
    _check_accuracy(eps, delta)
    return math.ceil(math.log(2.0 * n / delta) / eps ** 2)


class ReservoirSlots:
    """
    c independent single-item reservoirs. At step t every slot replaces its
    content with probability 1/t, so slots sample with replacement.
    """

    def __init__(self, c, rng):
        if c < 1:
            raise ConfigurationError(f"reservoir needs c >= 1 slots, got {c}")
        self.c = int(c)
        self.rng = rng
        self.t = 0
        self.samples = None
        self.replacements = np.zeros(self.c, dtype=np.int64)

    def offer(self, row):
        row = np.asarray(row, dtype=np.float64).ravel()
        if self.samples is None:
            self.samples = np.zeros((self.c, row.size))
        self.t += 1
        replace = self.rng.random(self.c) < 1.0 / self.t
        if replace.any():
            self.samples[replace] = row
            self.replacements[replace] += 1
        return replace

    @property
    def filled(self):
        return self.t > 0


@dataclass(frozen=True, eq=False)
class NystromModel:
    kernel: object
    samples: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    Wk_pinv: np.ndarray = field(repr=False)
    eigvals: np.ndarray = field(repr=False)
    eigvecs: np.ndarray = field(repr=False)
    retained: int
    k: int
    seed: int
    n_seen: int
    replacements: np.ndarray = field(repr=False)
    center: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def c(self):
        return self.samples.shape[0]

    @property
    def d(self):
        return self.samples.shape[1]

    @property
    def space_entries(self):
        return self.c ** 2 + self.c * self.d


class NystromProjection(NamedTuple):
    c_row: np.ndarray
    loading: np.ndarray
    residual: float


def _check_nystrom_sizes(c, k):
    if c < 1:
        raise ConfigurationError(f"Nystrom needs c >= 1 samples, got {c}")
    if not 1 <= k <= c:
        raise ConfigurationError(f"Nystrom rank must satisfy 1 <= k <= c={c}, got {k}")


def nystrom_from_samples(kernel, samples, k, seed, n_seen, replacements, center=None, meter=None):
    meter = meter_or_null(meter)
    samples = as_matrix(samples, 'samples')
    _check_nystrom_sizes(samples.shape[0], k)

    W = meter.hold('nystrom.W', gram(kernel, samples))
    eigvals, eigvecs = sym_eig(W)
    meter.hold('nystrom.eig', eigvals.size + eigvecs.size)

    # pinv(best_rank_k(W)) straight from the eigenpairs; W is PSD so the
    # singular values of W_k are its top-k eigenvalues
    cutoff = default_pinv_tol(W.shape) * max(eigvals[0], 0.0)
    top = eigvals[:k]
    usable = top > cutoff
    V_k = eigvecs[:, :k][:, usable]
    Wk_pinv = meter.hold('nystrom.Wk_pinv', (V_k / top[usable]) @ V_k.T)
    retained = int(np.count_nonzero(eigvals > cutoff))

    for array in (samples, W, Wk_pinv, eigvals, eigvecs):
        array.setflags(write=False)
    return NystromModel(
        kernel=kernel, samples=samples, W=W, Wk_pinv=Wk_pinv, eigvals=eigvals, eigvecs=eigvecs,
        retained=retained, k=int(k), seed=int(seed), n_seen=int(n_seen),
        replacements=np.asarray(replacements, dtype=np.int64), center=center,
    )


def nystrom_train(spec, c, k, seed, stream, meter=None, center=None):
    _check_nystrom_sizes(c, k)
    meter = meter_or_null(meter)
    started = time.perf_counter()
    reservoir = ReservoirSlots(c, substream(seed, RESERVOIRS))

    for index, row in iter_rows(stream, center):
        if not np.all(np.isfinite(row)):
            raise ContractViolation(f"stream row {index} contains NaN or Inf entries")
        if reservoir.samples is None:
            meter.hold('row', row)
        reservoir.offer(row)
        meter.hold('nystrom.samples', reservoir.samples)

    model = nystrom_from_samples(
        spec, reservoir.samples.copy(), k, seed, reservoir.t, reservoir.replacements,
        center=center, meter=meter,
    )
    logger.info(
        "nystrom trained on n=%d d=%d (c=%d, k=%d, %d replacements) in %.3fs",
        reservoir.t, model.d, c, k, int(reservoir.replacements.sum()), time.perf_counter() - started,
    )
    return model


def nystrom_test(model, x, k=None):
    """
    Kernel row against the samples, then coordinates in the eigenbasis of W
    (y = Lambda^-1/2 V^T c_row over eigenvalues above the pinv cutoff). The
    loading is the first k coordinates (k defaults to the model's rank), the
    residual the norm of the rest.
    """
    k = model.k if k is None else k
    if not 1 <= k <= model.c:
        raise ContractViolation(f"k must satisfy 1 <= k <= c={model.c}, got {k}")
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != model.d:
        raise ContractViolation(f"point has dimension {x.size}, model expects {model.d}")
    if model.center is not None:
        x = x - model.center

    c_row = cross_kernel(model.kernel, x[None, :], model.samples)[0]
    r = model.retained
    coords = (model.eigvecs[:, :r].T @ c_row) / np.sqrt(model.eigvals[:r])

    loading = np.zeros(k)
    head = min(k, r)
    loading[:head] = coords[:head]
    residual = float(np.linalg.norm(coords[head:]))
    return NystromProjection(c_row=c_row, loading=loading, residual=residual)


def nystrom_reconstruct(model, A):
    A = as_matrix(A)
    if A.shape[1] != model.d:
        raise ContractViolation(f"data has {A.shape[1]} columns, model expects {model.d}")
    if model.center is not None:
        A = A - model.center
    C = cross_kernel(model.kernel, A, model.samples)
    G_bar = C @ model.Wk_pinv @ C.T
    return (G_bar + G_bar.T) / 2.0
