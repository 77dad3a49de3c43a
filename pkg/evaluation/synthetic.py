"""
Synthetic data sets.

RandomNoisy: A = S D U + F / zeta, an s-dimensional signal (S standard
normal, D linearly decreasing, U a random rotation restricted to s rows)
under full-dimensional Gaussian noise. Draw order inside the data stream:
S, then the rotation, then F.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from sklearn.datasets import make_blobs

from sketching.exceptions import ConfigurationError
from sketching.seeding import SYNTHETIC_DATA, substream


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    d: int
    s: int = 50
    zeta: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ConfigurationError(f"need n >= 1 and d >= 1, got n={self.n}, d={self.d}")
        if not 1 <= self.s < self.d:
            raise ConfigurationError(f"signal dimension s must satisfy 1 <= s < d={self.d}, got {self.s}")
        if not self.zeta > 0:
            raise ConfigurationError(f"noise divisor zeta must be positive, got {self.zeta}")


def signal_scales(s, d):
    """D_ii = 1 - (i - 1) / d for i = 1..s."""
    return 1.0 - np.arange(s) / d


def gen_random_noisy(spec):
    rng = substream(spec.seed, SYNTHETIC_DATA)
    S = rng.standard_normal((spec.n, spec.s))
    Q, _ = scipy.linalg.qr(rng.standard_normal((spec.d, spec.s)), mode='economic')
    U = Q.T
    F = rng.standard_normal((spec.n, spec.d))
    return (S * signal_scales(spec.s, spec.d)) @ U + F / spec.zeta


def gen_gaussian_mixture(n, d, clusters=5, cluster_std=0.5, seed=0, box=2.0):
    """Isotropic Gaussian clusters with centers drawn in [-box, box]^d."""
    if n < 1 or d < 1 or clusters < 1:
        raise ConfigurationError(f"need n, d and clusters >= 1, got n={n}, d={d}, clusters={clusters}")
    if not cluster_std > 0:
        raise ConfigurationError(f"cluster_std must be positive, got {cluster_std}")
    random_state = int(substream(seed, SYNTHETIC_DATA).integers(0, 2**31 - 1))
    X, _ = make_blobs(
        n_samples=n, n_features=d, centers=clusters, cluster_std=cluster_std,
        center_box=(-box, box), random_state=random_state,
    )
    return X
