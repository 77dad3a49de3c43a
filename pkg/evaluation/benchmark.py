"""
The benchmark harness: every (method, size) cell is trained on the same data,
tested on a held-out set, and scored against the exact gram matrix.

Cells are independent. Each one draws its seed from (master seed, cell index)
and cells may run on worker threads; reports come back in grid order.
"""
import logging
import statistics
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.conf import settings
from joblib import Parallel, delayed

from sketching.baselines import (
    nystrom_reconstruct, nystrom_test, nystrom_train, rnca_reconstruct, rnca_test, rnca_train,
)
from sketching.exceptions import ConfigurationError, ContractViolation
from sketching.kernels import KernelSpec, gram
from sketching.numerics import as_matrix
from sketching.rff import sample_feature_map
from sketching.seeding import TEST_CARVE_OUT, cell_seed, substream
from sketching.serializers import METHODS
from sketching.skpca import SkpcaConfig, project_test, reconstruct_gram, train

from .metrics import frobenius_error, rank_k_frobenius_error, spectral_error
from .models import ErrorReport

logger = logging.getLogger(__name__)


def even_ell(ell):
    """Odd sketch sizes round up, so 5 becomes 6."""
    ell = int(ell)
    if ell < 1:
        raise ConfigurationError(f"sketch size must be positive, got {ell}")
    return max(2, ell + ell % 2)


@dataclass(frozen=True)
class BenchmarkCell:
    method: str
    sample_size: int
    ell: Optional[int] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown method {self.method!r}, expected one of {', '.join(METHODS)}")
        if self.sample_size < 1:
            raise ConfigurationError(f"sample size must be positive, got {self.sample_size}")
        if self.method == 'skpca':
            if self.ell is None:
                raise ConfigurationError("skpca cells need a sketch size")
            if self.ell > self.sample_size:
                raise ConfigurationError(f"sketch size ell={self.ell} exceeds m={self.sample_size}")


def build_grid(methods, sample_sizes, ells=(), c_sizes=None):
    """
    methods x sizes, with every skpca size crossed with every (even) ell.
    Nystrom cells use c_sizes when given, otherwise the shared sample sizes.
    """
    ells = sorted({even_ell(ell) for ell in ells})
    grid = []
    for method in methods:
        sizes = c_sizes if method == 'nystrom' and c_sizes else sample_sizes
        for size in sizes:
            if method == 'skpca':
                grid.extend(BenchmarkCell(method, int(size), ell) for ell in ells)
            else:
                grid.append(BenchmarkCell(method, int(size)))
    return grid


def carve_test_set(data, test_size, seed):
    """Remove a seeded random subset of test_size rows; returns (train, test) in original order."""
    data = as_matrix(data, 'data')
    n = data.shape[0]
    if not 0 <= test_size < n:
        raise ConfigurationError(f"test size must satisfy 0 <= test_size < n={n}, got {test_size}")
    chosen = np.zeros(n, dtype=bool)
    chosen[substream(seed, TEST_CARVE_OUT).permutation(n)[:test_size]] = True
    return data[~chosen], data[chosen]


def check_oracle_size(n, limit=None):
    limit = settings.STREAM_KPCA['ORACLE_MAX_N'] if limit is None else limit
    if n > limit:
        logger.warning("refusing exact gram oracle for n=%d (limit %d)", n, limit)
        raise ConfigurationError(
            f"n={n} exceeds the exact gram oracle limit of {limit}; use a smaller data set "
            f"or raise STREAM_KPCA_ORACLE_MAX_N"
        )


def _timed(repeats, fn):
    """Run fn repeats times; return the last result and the median wall-clock time."""
    seconds = []
    for _ in range(repeats):
        started = time.perf_counter()
        result = fn()
        seconds.append(time.perf_counter() - started)
    return result, statistics.median(seconds)


def _run_cell(index, cell, data, test_set, G, k, *, seed, kernel, eps, delta, center, repeats, timings, chunk_rows):
    cseed = cell_seed(seed, index)
    n, d = data.shape
    repeats = repeats if timings else 1
    rank = min(k, n)

    if cell.method == 'skpca':
        config = SkpcaConfig(m=cell.sample_size, ell=cell.ell, kernel=kernel, seed=cseed)
        model, train_seconds = _timed(repeats, lambda: train(config, iter(data), center=center))
        k_test = min(k, model.ell)
        _, test_seconds = _timed(repeats, lambda: [project_test(model, x, k_test) for x in test_set])
        Gp = reconstruct_gram(model, data, chunk_rows=chunk_rows)
    elif cell.method == 'rnca':
        fm = sample_feature_map(kernel, cell.sample_size, d, cseed)
        model, train_seconds = _timed(repeats, lambda: rnca_train(fm, iter(data), center=center))
        k_test = min(k, model.m)
        _, test_seconds = _timed(repeats, lambda: [rnca_test(model, x, k_test) for x in test_set])
        Gp = rnca_reconstruct(model, data, chunk_rows=chunk_rows)
    else:
        # full W pseudoinverse; only the test loadings are truncated to k
        c = cell.sample_size
        model, train_seconds = _timed(repeats, lambda: nystrom_train(kernel, c, c, cseed, iter(data), center=center))
        k_test = min(k, c)
        _, test_seconds = _timed(repeats, lambda: [nystrom_test(model, x, k_test) for x in test_set])
        Gp = nystrom_reconstruct(model, data)

    report = ErrorReport(
        method=cell.method,
        sample_size=cell.sample_size,
        ell=cell.ell,
        space_entries=model.space_entries,
        spectral_err=spectral_error(G, Gp),
        frobenius_err=frobenius_error(G, Gp),
        rank_k_frobenius=rank_k_frobenius_error(G, Gp, rank),
        train_seconds=train_seconds if timings else None,
        test_seconds=test_seconds if timings else None,
        seed=cseed,
        n=n,
        d=d,
        eps=eps,
        delta=delta,
        k=k,
        sigma=kernel.sigma,
    )
    if report.space_entries != report.expected_space():
        raise ContractViolation(f"{cell.method} space {report.space_entries} does not match {report.expected_space()}")
    logger.info("cell %d: %s", index, report)
    return report


def run_benchmark(grid, data, test_set, k, *, seed=0, sigma=1.0, eps=None, delta=None, center=None,
                  jobs=1, repeats=None, timings=True):
    """
    One unsaved ErrorReport per grid cell, in grid order. Errors compare the
    reconstruction on the training data against its exact gram matrix;
    timings are medians over `repeats` runs (TIMING_REPEATS by default).
    """
    if not grid:
        return []
    data = as_matrix(data, 'data')
    test_set = np.asarray(test_set, dtype=np.float64).reshape(-1, data.shape[1])
    n = data.shape[0]
    if k < 1:
        raise ConfigurationError(f"k must be positive, got {k}")
    check_oracle_size(n)

    config = settings.STREAM_KPCA
    repeats = config['TIMING_REPEATS'] if repeats is None else repeats
    kernel = KernelSpec(sigma=sigma)

    started = time.perf_counter()
    # exact gram, shared read-only by every cell
    G = gram(kernel, data - center if center is not None else data)
    G.setflags(write=False)
    logger.info("exact gram for n=%d built in %.3fs", n, time.perf_counter() - started)

    reports = Parallel(n_jobs=jobs, prefer='threads')(
        delayed(_run_cell)(
            index, cell, data, test_set, G, k,
            seed=seed, kernel=kernel, eps=eps, delta=delta, center=center,
            repeats=repeats, timings=timings, chunk_rows=config['RECONSTRUCT_CHUNK_ROWS'],
        )
        for index, cell in enumerate(grid)
    )
    logger.info(
        "benchmark of %d cells on n=%d d=%d finished in %.3fs",
        len(reports), n, data.shape[1], time.perf_counter() - started,
    )
    return list(reports)
