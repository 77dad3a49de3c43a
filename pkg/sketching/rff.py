"""
Random Fourier feature maps z(x) = sqrt(2/m) * cos(R x + gamma).

For the Gaussian kernel with bandwidth sigma, the rows of R are drawn from
N(0, I / sigma^2) and the phases uniformly from (0, 2pi].
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ContractViolation
from .kernels import GAUSSIAN, KernelSpec
from .numerics import as_matrix
from .seeding import FEATURE_MAP, substream


@dataclass(frozen=True, eq=False)
class FeatureMap:
    R: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    m: int
    d: int
    sigma: float
    seed: int
    family: str = GAUSSIAN

    @property
    def scale(self):
        return math.sqrt(2.0 / self.m)

    @property
    def kernel(self):
        return KernelSpec(family=self.family, sigma=self.sigma)

    @property
    def entries(self):
        return self.R.size + self.gamma.size

    def to_record(self):
        # R is regenerated from the seed, only the recipe is stored
        return {'family': self.family, 'sigma': float(self.sigma), 'm': self.m, 'd': self.d, 'seed': self.seed}

    @classmethod
    def from_record(cls, record):
        spec = KernelSpec(family=record['family'], sigma=float(record['sigma']))
        return sample_feature_map(spec, int(record['m']), int(record['d']), int(record['seed']))


def sample_feature_map(spec, m, d, seed):
    if m < 1 or d < 1:
        raise ContractViolation(f"feature map needs m >= 1 and d >= 1, got m={m}, d={d}")

    rng = substream(seed, FEATURE_MAP)
    # frequencies first (row-major m x d), then phases
    R = rng.standard_normal((m, d)) / spec.sigma
    gamma = 2.0 * np.pi * (1.0 - rng.random(m))

    R.setflags(write=False)
    gamma.setflags(write=False)
    return FeatureMap(R=R, gamma=gamma, m=int(m), d=int(d), sigma=float(spec.sigma), seed=int(seed), family=spec.family)


def apply(fm, x):
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != fm.d:
        raise ContractViolation(f"point has dimension {x.size}, feature map expects {fm.d}")
    return fm.scale * np.cos(fm.R @ x + fm.gamma)


def apply_batch(fm, A):
    A = as_matrix(A)
    if A.shape[1] != fm.d:
        raise ContractViolation(f"data has {A.shape[1]} columns, feature map expects {fm.d}")
    return fm.scale * np.cos(A @ fm.R.T + fm.gamma)
