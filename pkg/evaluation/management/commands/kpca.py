import argparse
import itertools
import time
from functools import partial

import numpy as np
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from joblib import cpu_count

from evaluation.benchmark import build_grid, carve_test_set, even_ell, run_benchmark
from evaluation.datafiles import column_means, count_rows, iter_csv_rows, read_csv_matrix, write_matrix_csv
from evaluation.models import ErrorReport
from evaluation.reports import write_csv, write_jsonl
from evaluation.serializers import (
    DATA_KINDS, BenchmarkConfigSerializer, GenDataConfigSerializer, TestConfigSerializer, TrainConfigSerializer,
)
from sketching.baselines import nystrom_sample_count, nystrom_test, nystrom_train, rnca_test, rnca_train
from sketching.exceptions import ConfigurationError, ContractViolation, StreamKpcaError
from sketching.kernels import KernelSpec
from sketching.persistence import dump_model, load_model, method_of
from sketching.rff import sample_feature_map
from sketching.serializers import METHODS, SkpcaConfigSerializer, validated
from sketching.skpca import ELL_RULES, feature_count, project_test, sketch_size, train


def _agreeing(explicit, derived, flag):
    """An explicit size next to --eps/--delta must match the derived one."""
    if explicit is not None and explicit != derived:
        raise ConfigurationError(f"explicit {flag}={explicit} disagrees with {flag}={derived} derived from --eps/--delta")
    return derived


def _peek(rows):
    rows = iter(rows)
    first = next(rows, None)
    if first is None:
        raise ContractViolation("training stream is empty")
    return first, itertools.chain([first], rows)


class Command(BaseCommand):
    help = "Streaming kernel PCA: generate data, train and test models, run benchmarks."

    def add_arguments(self, parser):
        defaults = settings.STREAM_KPCA
        subparsers = parser.add_subparsers(dest='command', required=True, metavar='subcommand')

        def subcommand(name, help):
            return subparsers.add_parser(name, help=help, description=help,
                                         formatter_class=argparse.ArgumentDefaultsHelpFormatter)

        def reading(sub):
            sub.add_argument('--input', required=True, help="input CSV, one point per line")
            sub.add_argument('--header', action='store_true', help="the input starts with a header line")
            sub.add_argument('--drop-first-col', action='store_true', help="ignore the first column (labels)")

        def common(sub):
            sub.add_argument('--seed', type=int, default=0, help="master seed for every random draw")

        gen = subcommand('gen-data', "Write a synthetic data set as CSV.")
        gen.add_argument('--output', required=True, help="CSV path to write")
        gen.add_argument('--kind', choices=DATA_KINDS, default='random-noisy', help="data generator")
        gen.add_argument('--n', type=int, default=1000, help="number of points")
        gen.add_argument('--d', type=int, default=100, help="dimension")
        gen.add_argument('--s', type=int, default=50, help="signal dimension (random-noisy)")
        gen.add_argument('--zeta', type=float, default=10.0, help="noise divisor (random-noisy)")
        gen.add_argument('--clusters', type=int, default=5, help="number of clusters (blobs)")
        gen.add_argument('--cluster-std', type=float, default=0.5, help="cluster standard deviation (blobs)")
        gen.add_argument('--header', action='store_true', help="write column names c0..c{d-1}")
        common(gen)

        fit = subcommand('train', "Stream a CSV through one method and write the model file.")
        reading(fit)
        fit.add_argument('--output', required=True, help="model file to write")
        fit.add_argument('--method', choices=METHODS, default='skpca', help="method to train")
        fit.add_argument('--m', type=int, help="number of random features (skpca, rnca)")
        fit.add_argument('--ell', type=int, help="sketch size, even (skpca)")
        fit.add_argument('--c', type=int, help="number of sampled points (nystrom); defaults to --m")
        fit.add_argument('--k', type=int, help="rank of the pseudoinverse (nystrom); defaults to c")
        fit.add_argument('--sigma', type=float, default=defaults['DEFAULT_SIGMA'], help="Gaussian kernel bandwidth")
        fit.add_argument('--eps', type=float, help="target accuracy; derives m, ell and c")
        fit.add_argument('--delta', type=float, help="failure probability, with --eps")
        fit.add_argument('--ell-rule', choices=sorted(ELL_RULES), default='end_to_end',
                         help="how ell is derived from --eps")
        fit.add_argument('--center', action='store_true', help="subtract the column mean (extra pass)")
        common(fit)

        check = subcommand('test', "Project held-out points with a trained model.")
        reading(check)
        check.add_argument('--model', required=True, help="model file written by train")
        check.add_argument('--output', required=True, help="CSV of k loadings then the residual, per point")
        check.add_argument('--k', type=int, help="number of loading coordinates; defaults to the model rank")
        common(check)

        bench = subcommand('benchmark', "Score a grid of methods against the exact gram matrix.")
        reading(bench)
        bench.add_argument('--output', required=True, help="report CSV to write")
        bench.add_argument('--method', nargs='+', choices=METHODS, default=list(METHODS), help="methods in the grid")
        bench.add_argument('--m', type=int, nargs='+', help="feature counts (and Nystrom sample counts without --c)")
        bench.add_argument('--ell', type=int, nargs='+', help="skpca sketch sizes; odd values round up to even")
        bench.add_argument('--c', type=int, nargs='+', help="Nystrom sample counts")
        bench.add_argument('--k', type=int, default=10, help="rank for tests and the rank-k error")
        bench.add_argument('--sigma', type=float, default=defaults['DEFAULT_SIGMA'], help="Gaussian kernel bandwidth")
        bench.add_argument('--eps', type=float, help="target accuracy; derives absent grid axes")
        bench.add_argument('--delta', type=float, help="failure probability, with --eps")
        bench.add_argument('--center', action='store_true', help="subtract the training column mean")
        bench.add_argument('--test-size', type=int, default=defaults['DEFAULT_TEST_SIZE'], help="held-out points")
        bench.add_argument('--repeats', type=int, default=defaults['TIMING_REPEATS'], help="timing repetitions")
        bench.add_argument('--jobs', type=int, default=cpu_count(), help="worker threads for grid cells")
        bench.add_argument('--jsonl', help="also write the reports as JSON lines")
        bench.add_argument('--record', metavar='LABEL', help="save the reports to the database under LABEL")
        bench.add_argument('--no-timings', action='store_true', help="leave wall-clock columns empty")
        common(bench)

    def handle(self, *args, **options):
        handlers = {
            'gen-data': self.handle_gen_data,
            'train': self.handle_train,
            'test': self.handle_test,
            'benchmark': self.handle_benchmark,
        }
        try:
            handlers[options['command']](options)
        except StreamKpcaError as exc:
            raise CommandError(f"{exc.kind}: {exc}")
        except OSError as exc:
            raise CommandError(f"io_error: {exc.filename}: {exc.strerror or exc}")

    def _reading(self, data):
        return {
            'header': data['header'],
            'drop_first_col': data['drop_first_col'],
            'chunk_rows': settings.STREAM_KPCA['CSV_CHUNK_ROWS'],
        }

    def handle_gen_data(self, options):
        serializer = GenDataConfigSerializer(data=options)
        data = validated(serializer)
        A = serializer.generate()
        write_matrix_csv(data['output'], A, header=data['header'])
        self.stdout.write(f"wrote {A.shape[0]} x {A.shape[1]} {data['kind']} data to {data['output']}")

    def handle_train(self, options):
        data = validated(TrainConfigSerializer(data=options))
        path, method, seed = data['input'], data['method'], data['seed']
        reading = self._reading(data)
        eps, delta = data.get('eps'), data.get('delta')

        center = column_means(path, **reading) if data['center'] else None
        n = None
        if eps is not None:
            n = count_rows(path, **reading)
            if n == 0:
                raise ContractViolation("training stream is empty")

        kernel = KernelSpec(sigma=data['sigma'])
        rows = iter_csv_rows(path, **reading)
        started = time.perf_counter()

        if method == 'skpca':
            config = validated(SkpcaConfigSerializer(data={
                'm': data.get('m'), 'ell': data.get('ell'), 'kernel': kernel.to_record(), 'seed': seed,
                'eps': eps, 'delta': delta, 'n': n, 'ell_rule': data['ell_rule'],
            }))['config']
            model = train(config, rows, center=center)
            sizes = f"m={config.m} ell={config.ell}"
        elif method == 'rnca':
            m = data.get('m') if eps is None else _agreeing(data.get('m'), feature_count(eps, delta, n), '--m')
            first, rows = _peek(rows)
            fm = sample_feature_map(kernel, m, first.size, seed)
            model = rnca_train(fm, rows, center=center)
            sizes = f"m={m}"
        else:
            c = data.get('c') or data.get('m')
            if eps is not None:
                c = _agreeing(c, nystrom_sample_count(eps, delta, n), '--c' if data.get('c') else '--m')
            k = data.get('k') or c
            model = nystrom_train(kernel, c, k, seed, rows, center=center)
            sizes = f"c={c} k={k}"

        elapsed = time.perf_counter() - started
        dump_model(model, data['output'])
        self.stdout.write(
            f"trained {method} on n={model.n_seen} d={model.d} ({sizes}) in {elapsed:.3f}s, "
            f"space_entries={model.space_entries}"
        )

    def handle_test(self, options):
        data = validated(TestConfigSerializer(data=options))
        model = load_model(data['model'])
        method = method_of(model)
        k = data.get('k')
        if method == 'skpca':
            k = k or model.ell
            project = partial(project_test, model, k=k)
        elif method == 'rnca':
            k = k or model.m
            project = partial(rnca_test, model, k=k)
        else:
            k = k or model.k
            project = partial(nystrom_test, model, k=k)

        out = []
        started = time.perf_counter()
        for x in iter_csv_rows(data['input'], **self._reading(data)):
            result = project(x)
            out.append(np.append(result.loading, result.residual))
        elapsed = time.perf_counter() - started

        write_matrix_csv(data['output'], np.vstack(out) if out else np.zeros((0, k + 1)))
        per_point = elapsed / len(out) if out else 0.0
        self.stdout.write(
            f"tested {len(out)} points with {method} (k={k}) in {elapsed:.6f}s, {per_point:.3e}s per point"
        )

    def handle_benchmark(self, options):
        data = validated(BenchmarkConfigSerializer(data=options))
        A = read_csv_matrix(data['input'], **self._reading(data))
        if A.shape[0] == 0:
            raise ContractViolation("benchmark input is empty")
        train_set, test_set = carve_test_set(A, data['test_size'], data['seed'])
        n = train_set.shape[0]

        m_sizes, ells, c_sizes = data.get('m'), data.get('ell'), data.get('c')
        eps, delta = data.get('eps'), data.get('delta')
        if eps is not None:
            derived_m = feature_count(eps, delta, n)
            derived_ell = sketch_size(eps)
            derived_c = nystrom_sample_count(eps, delta, n)
            m_sizes = [_agreeing(m, derived_m, '--m') for m in m_sizes or [None]]
            ells = [_agreeing(ell and even_ell(ell), derived_ell, '--ell') for ell in ells or [None]]
            c_sizes = [_agreeing(c, derived_c, '--c') for c in c_sizes or [None]]

        grid = build_grid(data['method'], m_sizes or [], ells or [], c_sizes)
        timings = not data['no_timings']
        center = train_set.mean(axis=0) if data['center'] else None
        reports = run_benchmark(
            grid, train_set, test_set, data['k'],
            seed=data['seed'], sigma=data['sigma'], eps=eps, delta=delta, center=center,
            jobs=data['jobs'], repeats=data['repeats'], timings=timings,
        )

        write_csv(reports, data['output'], timings=timings)
        if data.get('jsonl'):
            write_jsonl(reports, data['jsonl'], timings=timings)
        if data.get('record'):
            for report in reports:
                report.run_label = data['record']
            ErrorReport.objects.bulk_create(reports)

        for report in reports:
            self.stdout.write(str(report))
        self.stdout.write(f"wrote {len(reports)} report rows to {data['output']}")
