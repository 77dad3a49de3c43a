"""
Streaming kernel PCA: random Fourier features fed row by row into a
Frequent Directions sketch. One pass, O(dm + ell m) working entries.
"""
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import ConfigurationError, ContractViolation
from .fd import FdSketch, validate_sketch_size
from .kernels import KernelSpec
from .numerics import as_matrix
from .rff import FeatureMap, apply, apply_batch, sample_feature_map
from .space import meter_or_null

logger = logging.getLogger(__name__)

ELL_RULES = {
    # ell for the end-to-end ||G - G~||_2 <= eps n guarantee
    'end_to_end': 4.0,
    # ell for the sketch step alone, ||ZZ^T - ZWW^TZ^T||_2 <= eps n
    'sketch_only': 2.0,
}


def even_ceil(value):
    rounded = math.ceil(value)
    return rounded + (rounded % 2)


def feature_count(eps, delta, n):
    """m = ceil(((9 + 8 eps) / eps^2) ln(2n / delta)), the for-all feature count."""
    _check_accuracy(eps, delta)
    return math.ceil(((9.0 + 8.0 * eps) / eps ** 2) * math.log(2.0 * n / delta))


def for_each_feature_count(eps, delta):
    """m = ceil(ln(2 / delta) / (2 eps^2)); holds for one fixed direction, independent of n."""
    _check_accuracy(eps, delta)
    return math.ceil(math.log(2.0 / delta) / (2.0 * eps ** 2))


def sketch_size(eps, rule='end_to_end'):
    if rule not in ELL_RULES:
        raise ConfigurationError(f"unknown ell rule {rule!r}, expected one of {sorted(ELL_RULES)}")
    return max(2, even_ceil(ELL_RULES[rule] / eps))


def _check_accuracy(eps, delta):
    if not (0 < eps < 1 and 0 < delta < 1):
        raise ConfigurationError(f"eps and delta must lie in (0, 1), got eps={eps}, delta={delta}")


@dataclass(frozen=True)
class SkpcaConfig:
    m: int
    ell: int
    kernel: KernelSpec = field(default_factory=KernelSpec)
    seed: int = 0
    eps: Optional[float] = None
    delta: Optional[float] = None

    def __post_init__(self):
        if self.m < self.ell:
            raise ConfigurationError(f"feature count m={self.m} must be >= sketch size ell={self.ell}")
        validate_sketch_size(self.ell, self.m)
        if self.eps is not None or self.delta is not None:
            if self.eps is None or self.delta is None:
                raise ConfigurationError("eps and delta must be given together")
            _check_accuracy(self.eps, self.delta)

    @classmethod
    def from_accuracy(cls, eps, delta, n, kernel=None, seed=0, m=None, ell=None, ell_rule='end_to_end'):
        derived_m = feature_count(eps, delta, n)
        derived_ell = sketch_size(eps, ell_rule)
        if m is not None and m != derived_m:
            raise ConfigurationError(f"explicit m={m} disagrees with m={derived_m} derived from eps={eps}, delta={delta}, n={n}")
        if ell is not None and ell != derived_ell:
            raise ConfigurationError(f"explicit ell={ell} disagrees with ell={derived_ell} derived from eps={eps}")
        return cls(m=derived_m, ell=derived_ell, kernel=kernel or KernelSpec(), seed=seed, eps=eps, delta=delta)

    def space_entries(self, d):
        return self.m * d + self.m * self.ell


@dataclass(frozen=True, eq=False)
class SkpcaModel:
    fm: FeatureMap
    W: np.ndarray = field(repr=False)
    S: np.ndarray = field(repr=False)
    n_seen: int
    center: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def ell(self):
        return self.W.shape[1]

    @property
    def d(self):
        return self.fm.d

    @property
    def space_entries(self):
        return self.fm.m * self.fm.d + self.fm.m * self.ell


class Projection(NamedTuple):
    lifted: np.ndarray
    loading: np.ndarray
    residual: float


def iter_rows(stream, center=None):
    """Yield (index, row) with a fixed dimension, raising on drift."""
    rows = iter(stream)
    first = next(rows, None)
    if first is None:
        raise ContractViolation("training stream is empty")
    first = np.asarray(first, dtype=np.float64).ravel()
    d = first.size
    if d < 1:
        raise ContractViolation("training points must have dimension >= 1")
    if center is not None and np.size(center) != d:
        raise ContractViolation(f"centering vector has length {np.size(center)}, data has dimension {d}")

    for index, row in enumerate(itertools.chain([first], rows)):
        row = np.asarray(row, dtype=np.float64).ravel()
        if row.size != d:
            raise ContractViolation(f"stream row {index} has dimension {row.size}, expected {d}")
        yield index, (row - center if center is not None else row)


def train(config, stream, meter=None, center=None):
    meter = meter_or_null(meter)
    started = time.perf_counter()
    rows = iter_rows(stream, center)

    index, row = next(rows)
    fm = sample_feature_map(config.kernel, config.m, row.size, config.seed)
    meter.hold('rff.R', fm.R)
    meter.hold('rff.gamma', fm.gamma)
    meter.hold('row', row)
    sketch = FdSketch(config.ell, config.m, meter=meter)

    for index, row in itertools.chain([(index, row)], rows):
        if not np.all(np.isfinite(row)):
            raise ContractViolation(f"stream row {index} contains NaN or Inf entries")
        z = meter.hold('z', apply(fm, row))
        sketch.insert(z)

    W, S = sketch.basis()
    meter.hold('W', W)
    W.setflags(write=False)
    S.setflags(write=False)

    logger.info(
        "skpca trained on n=%d d=%d (m=%d, ell=%d, %d shrinks) in %.3fs",
        sketch.n_inserted, fm.d, config.m, config.ell, sketch.shrinks, time.perf_counter() - started,
    )
    return SkpcaModel(fm=fm, W=W, S=S, n_seen=sketch.n_inserted, center=center)


def _prepare_point(model, x):
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != model.d:
        raise ContractViolation(f"point has dimension {x.size}, model expects {model.d}")
    return x - model.center if model.center is not None else x


def project_test(model, x, k):
    if not 1 <= k <= model.ell:
        raise ContractViolation(f"k must satisfy 1 <= k <= ell={model.ell}, got {k}")
    lifted = apply(model.fm, _prepare_point(model, x))
    W_k = model.W[:, :k]
    loading = W_k.T @ lifted
    residual = float(np.linalg.norm(lifted - W_k @ loading))
    return Projection(lifted=lifted, loading=loading, residual=residual)


def embed(model, A, chunk_rows=1024):
    """ZW, built chunk by chunk so the full n x m Z never exists."""
    A = as_matrix(A)
    if A.shape[1] != model.d:
        raise ContractViolation(f"data has {A.shape[1]} columns, model expects {model.d}")
    if model.center is not None:
        A = A - model.center
    blocks = [apply_batch(model.fm, A[start:start + chunk_rows]) @ model.W
              for start in range(0, A.shape[0], chunk_rows)]
    return np.vstack(blocks) if blocks else np.zeros((0, model.ell))


def reconstruct_gram(model, A, chunk_rows=1024):
    Y = embed(model, A, chunk_rows=chunk_rows)
    return Y @ Y.T
