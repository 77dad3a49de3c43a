"""
Frequent Directions with the half-sketch shrink.

Rows are written into the zero rows of an ell x m matrix B. When no zero row
is left, B is replaced by sqrt(max(0, S^2 - s_h^2)) W^T where s_h is the
(ell/2)-th largest singular value, which zeroes at least ell/2 rows.
"""
import logging

import numpy as np

from .exceptions import ConfigurationError, ContractViolation
from .numerics import thin_svd
from .space import meter_or_null

logger = logging.getLogger(__name__)


def validate_sketch_size(ell, m):
    if ell < 2 or ell > m:
        raise ConfigurationError(f"sketch size ell must satisfy 2 <= ell <= m={m}, got {ell}")
    if ell % 2:
        raise ConfigurationError(f"sketch size ell must be even, got {ell}")


class FdSketch:
    def __init__(self, ell, m, meter=None):
        validate_sketch_size(ell, m)
        self.ell = int(ell)
        self.m = int(m)
        self.B = np.zeros((self.ell, self.m))
        self.filled = 0
        self.n_inserted = 0
        self.inserted_sq_norm = 0.0
        self.shrinks = 0
        self.last_basis = None
        self._meter = meter_or_null(meter)
        self._meter.hold('fd.B', self.B)

    def insert(self, z):
        z = np.asarray(z, dtype=np.float64).ravel()
        if z.size != self.m:
            raise ContractViolation(f"row has length {z.size}, sketch expects {self.m}")
        if not np.all(np.isfinite(z)):
            raise ContractViolation("row contains NaN or Inf entries")

        # occupancy counter, not a numerical scan: a zero row still takes a slot
        self.B[self.filled] = z
        self.filled += 1
        self.n_inserted += 1
        self.inserted_sq_norm += float(z @ z)

        if self.filled == self.ell:
            self._shrink()
        return self

    def extend(self, rows):
        for z in rows:
            self.insert(z)
        return self

    def _shrink(self):
        U, S, V = thin_svd(self.B)
        self._meter.hold('fd.svd', U.size + S.size + V.size)

        half = self.ell // 2
        delta = S[half - 1] ** 2
        shrunk = np.sqrt(np.maximum(S ** 2 - delta, 0.0))

        # rows half-1 .. ell-1 of the rotated sketch are exactly zero
        keep = half - 1
        self.B[:] = 0.0
        self.B[:keep] = shrunk[:keep, None] * V[:, :keep].T
        self.filled = keep
        self.shrinks += 1
        self.last_basis = (V, S)

        self._meter.release('fd.svd')
        logger.debug("shrink %d: delta=%.6g, retained %d rows", self.shrinks, delta, keep)

    def basis(self):
        """
        Fresh SVD of the current sketch.

        Returns (W, S) with W of shape m x ell (orthonormal columns, filled
        out by the SVD itself when B is rank deficient) and the ell singular
        values. B is not modified.
        """
        if self.n_inserted == 0:
            raise ContractViolation("cannot take the basis of an empty sketch")
        _, S, V = thin_svd(self.B)
        return V, S

    @property
    def sq_norm(self):
        return float(np.sum(self.B ** 2))

    def covariance_error_bound(self, tail_sq_norm, k):
        """
        Worst-case bound on ||Ax||^2 - ||Bx||^2 for unit x, given
        ||A - A_k||_F^2. Shrinking at ell/2 leaves ell/2 - k rows of slack.
        """
        slack = self.ell // 2 - k
        if slack <= 0:
            return np.inf
        return tail_sq_norm / slack

    def __repr__(self):
        return f"FdSketch(ell={self.ell}, m={self.m}, filled={self.filled}, inserted={self.n_inserted})"
