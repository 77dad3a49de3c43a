import contextlib
import io
import os
import tempfile

import numpy as np
from django.core.management import CommandError, call_command
from django.test import SimpleTestCase, TestCase

from evaluation.datafiles import read_csv_matrix, write_matrix_csv
from evaluation.models import ErrorReport
from evaluation.reports import read_report_csv
from evaluation.synthetic import gen_gaussian_mixture
from sketching.skpca import feature_count


class KpcaCommandMixin:
    def setUp(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.tmp = tmp.name

    def path(self, name):
        return os.path.join(self.tmp, name)

    def kpca(self, *args):
        out = io.StringIO()
        call_command('kpca', *[str(arg) for arg in args], stdout=out)
        return out.getvalue()

    def write_data(self, name, A, header=False):
        write_matrix_csv(self.path(name), A, header=header)
        return self.path(name)

    def read_bytes(self, name):
        with open(self.path(name), 'rb') as handle:
            return handle.read()


class GenDataCommandTests(KpcaCommandMixin, SimpleTestCase):
    def test_small_random_noisy(self):
        out = self.kpca('gen-data', '--output', self.path('a.csv'), '--n', 10, '--d', 4, '--s', 2, '--seed', 7)
        self.assertIn('wrote 10 x 4 random-noisy data', out)
        self.assertEqual(read_csv_matrix(self.path('a.csv')).shape, (10, 4))

    def test_same_seed_same_bytes(self):
        for name in ('a.csv', 'b.csv'):
            self.kpca('gen-data', '--output', self.path(name), '--n', 10, '--d', 4, '--s', 2, '--seed', 7)
        self.assertEqual(self.read_bytes('a.csv'), self.read_bytes('b.csv'))

    def test_default_signal_dimension(self):
        self.kpca('gen-data', '--output', self.path('a.csv'), '--n', 200, '--d', 1000, '--header')
        self.assertEqual(read_csv_matrix(self.path('a.csv'), header=True).shape, (200, 1000))

    def test_blobs(self):
        out = self.kpca('gen-data', '--kind', 'blobs', '--output', self.path('a.csv'), '--n', 30, '--d', 2)
        self.assertIn('blobs', out)

    def test_invalid_signal_dimension(self):
        with self.assertRaisesMessage(CommandError, 'configuration_error'):
            self.kpca('gen-data', '--output', self.path('a.csv'), '--n', 10, '--d', 4, '--s', 4)

    def test_help_shows_defaults(self):
        out = io.StringIO()
        with contextlib.redirect_stdout(out), self.assertRaises(SystemExit):
            call_command('kpca', 'gen-data', '--help')
        self.assertIn('default: 1000', out.getvalue())


class TrainCommandTests(KpcaCommandMixin, SimpleTestCase):
    def setUp(self):
        super().setUp()
        self.data = self.write_data('train.csv', gen_gaussian_mixture(200, 4, seed=0))

    def test_skpca_with_explicit_sizes(self):
        out = self.kpca('train', '--input', self.data, '--output', self.path('m.json'), '--m', 64, '--ell', 8)
        self.assertIn('trained skpca on n=200 d=4 (m=64 ell=8)', out)
        self.assertIn(f'space_entries={64 * 4 + 64 * 8}', out)

    def test_sizes_derived_from_accuracy(self):
        data = self.write_data('big.csv', gen_gaussian_mixture(2000, 3, seed=1))
        out = self.kpca('train', '--input', data, '--output', self.path('m.json'), '--eps', 0.25, '--delta', 0.1)
        self.assertIn('(m=1865 ell=16)', out)

    def test_rerun_writes_the_same_model(self):
        for name in ('a.json', 'b.json'):
            self.kpca('train', '--input', self.data, '--output', self.path(name), '--m', 32, '--ell', 4, '--seed', 5)
        self.assertEqual(self.read_bytes('a.json'), self.read_bytes('b.json'))

    def test_baselines(self):
        out = self.kpca('train', '--method', 'rnca', '--input', self.data, '--output', self.path('r.json'), '--m', 16)
        self.assertIn('trained rnca on n=200 d=4 (m=16)', out)
        out = self.kpca('train', '--method', 'nystrom', '--input', self.data, '--output', self.path('n.json'),
                        '--c', 12, '--k', 4)
        self.assertIn('(c=12 k=4)', out)
        self.assertIn(f'space_entries={12 * 12 + 12 * 4}', out)

    def test_centered_training(self):
        self.kpca('train', '--input', self.data, '--output', self.path('m.json'), '--m', 32, '--ell', 4, '--center')
        self.assertTrue(os.path.exists(self.path('m.json')))

    def test_empty_input_writes_no_model(self):
        empty = self.write_data('empty.csv', np.zeros((0, 4)))
        with self.assertRaisesMessage(CommandError, 'contract_violation: training stream is empty'):
            self.kpca('train', '--input', empty, '--output', self.path('m.json'), '--m', 32, '--ell', 4)
        self.assertFalse(os.path.exists(self.path('m.json')))

    def test_malformed_input(self):
        with open(self.path('bad.csv'), 'w') as handle:
            handle.write('1,2\n3,x\n')
        with self.assertRaisesMessage(CommandError, 'malformed_input: line 2'):
            self.kpca('train', '--input', self.path('bad.csv'), '--output', self.path('m.json'), '--m', 8, '--ell', 2)

    def test_missing_input(self):
        with self.assertRaisesMessage(CommandError, 'io_error'):
            self.kpca('train', '--input', self.path('absent.csv'), '--output', self.path('m.json'),
                      '--m', 8, '--ell', 2)

    def test_configuration_conflicts(self):
        base = ('train', '--input', self.data, '--output', self.path('m.json'))
        for extra in (
            ('--m', 32),
            ('--m', 32, '--ell', 5),
            ('--method', 'rnca', '--m', 32, '--ell', 4),
            ('--method', 'rnca', '--m', 32, '--k', 2),
            ('--eps', 0.25),
            ('--eps', 0.25, '--delta', 0.1, '--m', 100),
            ('--m', 32, '--ell', 4, '--sigma', 0),
        ):
            with self.subTest(extra=extra):
                with self.assertRaisesMessage(CommandError, 'configuration_error'):
                    self.kpca(*base, *extra)


    def test_conflict_names_the_flag_that_was_given(self):
        with self.assertRaisesMessage(CommandError, 'explicit --m=5 disagrees'):
            self.kpca('train', '--input', self.data, '--output', self.path('n.json'), '--method', 'nystrom',
                      '--m', 5, '--eps', 0.25, '--delta', 0.1)
        with self.assertRaisesMessage(CommandError, 'explicit --c=5 disagrees'):
            self.kpca('train', '--input', self.data, '--output', self.path('n.json'), '--method', 'nystrom',
                      '--c', 5, '--eps', 0.25, '--delta', 0.1)


class TestCommandTests(KpcaCommandMixin, SimpleTestCase):
    def setUp(self):
        super().setUp()
        A = gen_gaussian_mixture(105, 3, seed=2)
        self.data = self.write_data('train.csv', A[:100])
        self.points = self.write_data('test.csv', A[100:])
        self.kpca('train', '--input', self.data, '--output', self.path('s.json'), '--m', 32, '--ell', 4)

    def test_loadings_and_residuals(self):
        out = self.kpca('test', '--input', self.points, '--model', self.path('s.json'),
                        '--output', self.path('out.csv'), '--k', 1)
        self.assertIn('tested 5 points with skpca (k=1)', out)
        result = read_csv_matrix(self.path('out.csv'))
        self.assertEqual(result.shape, (5, 2))
        self.assertTrue(np.all(result[:, 1] >= 0.0))

    def test_default_rank(self):
        self.kpca('test', '--input', self.points, '--model', self.path('s.json'), '--output', self.path('out.csv'))
        self.assertEqual(read_csv_matrix(self.path('out.csv')).shape, (5, 5))

    def test_every_method(self):
        self.kpca('train', '--method', 'rnca', '--input', self.data, '--output', self.path('r.json'), '--m', 8)
        self.kpca('train', '--method', 'nystrom', '--input', self.data, '--output', self.path('n.json'), '--c', 6)
        for name, width in (('r.json', 9), ('n.json', 7)):
            self.kpca('test', '--input', self.points, '--model', self.path(name), '--output', self.path('out.csv'))
            self.assertEqual(read_csv_matrix(self.path('out.csv')).shape, (5, width))

    def test_dimension_mismatch(self):
        other = self.write_data('wide.csv', np.ones((2, 4)))
        with self.assertRaisesMessage(CommandError, 'contract_violation'):
            self.kpca('test', '--input', other, '--model', self.path('s.json'), '--output', self.path('out.csv'))

    def test_rank_above_sketch(self):
        with self.assertRaisesMessage(CommandError, 'contract_violation'):
            self.kpca('test', '--input', self.points, '--model', self.path('s.json'),
                      '--output', self.path('out.csv'), '--k', 5)

    def test_bad_model_file(self):
        with open(self.path('bad.json'), 'w') as handle:
            handle.write('{"method": "skpca"}')
        with self.assertRaisesMessage(CommandError, 'model_file_error'):
            self.kpca('test', '--input', self.points, '--model', self.path('bad.json'), '--output', self.path('o.csv'))


class BenchmarkCommandTests(KpcaCommandMixin, SimpleTestCase):
    def setUp(self):
        super().setUp()
        self.data = self.write_data('data.csv', gen_gaussian_mixture(250, 3, seed=3))

    def benchmark(self, output, *extra):
        return self.kpca(
            'benchmark', '--input', self.data, '--output', self.path(output), '--method', 'skpca', 'rnca',
            '--m', 32, 64, '--ell', 4, 8, '--k', 3, '--test-size', 50, '--jobs', 1, '--repeats', 1, *extra,
        )

    def test_grid_rows(self):
        out = self.benchmark('report.csv')
        self.assertIn('wrote 6 report rows', out)
        frame = read_report_csv(self.path('report.csv'))
        self.assertEqual(len(frame), 6)
        self.assertEqual(list(frame['method']), ['skpca'] * 4 + ['rnca'] * 2)
        self.assertTrue((frame['n'] == 200).all())
        self.assertTrue((frame['train_seconds'] > 0).all())

    def test_without_timings_is_reproducible(self):
        self.benchmark('a.csv', '--no-timings', '--jsonl', self.path('a.jsonl'))
        self.benchmark('b.csv', '--no-timings', '--jsonl', self.path('b.jsonl'))
        self.assertEqual(self.read_bytes('a.csv'), self.read_bytes('b.csv'))
        self.assertEqual(self.read_bytes('a.jsonl'), self.read_bytes('b.jsonl'))

    def test_nystrom_uses_m_without_c(self):
        self.kpca('benchmark', '--input', self.data, '--output', self.path('n.csv'), '--method', 'nystrom',
                  '--m', 20, '--k', 3, '--test-size', 50, '--repeats', 1)
        frame = read_report_csv(self.path('n.csv'))
        self.assertEqual(list(frame['sample_size']), [20])
        self.assertEqual(list(frame['space_entries']), [20 * 20 + 20 * 3])

    def test_odd_ell_is_rounded_before_the_accuracy_check(self):
        self.kpca('benchmark', '--input', self.data, '--output', self.path('e.csv'), '--method', 'skpca',
                  '--eps', 0.25, '--delta', 0.1, '--ell', 15, '--k', 3, '--test-size', 150,
                  '--repeats', 1, '--jobs', 1, '--no-timings')
        frame = read_report_csv(self.path('e.csv'))
        self.assertEqual(list(frame['ell']), [16])
        self.assertEqual(list(frame['sample_size']), [feature_count(0.25, 0.1, 100)])

    def test_missing_axes(self):
        with self.assertRaisesMessage(CommandError, 'configuration_error'):
            self.kpca('benchmark', '--input', self.data, '--output', self.path('x.csv'), '--method', 'skpca',
                      '--m', 32)

    def test_test_size_must_leave_training_rows(self):
        with self.assertRaisesMessage(CommandError, 'configuration_error'):
            self.benchmark('x.csv', '--test-size', 250)


class RecordedBenchmarkTests(KpcaCommandMixin, TestCase):
    def test_reports_are_saved_under_the_label(self):
        data = self.write_data('data.csv', gen_gaussian_mixture(120, 3, seed=4))
        self.kpca('benchmark', '--input', data, '--output', self.path('r.csv'), '--method', 'rnca', 'nystrom',
                  '--m', 16, '--k', 2, '--test-size', 20, '--repeats', 1, '--jobs', 1, '--record', 'nightly')
        saved = ErrorReport.objects.filter(run_label='nightly')
        self.assertEqual(saved.count(), 2)
        self.assertEqual(sorted(saved.values_list('method', flat=True)), ['nystrom', 'rnca'])


class PipelineTests(KpcaCommandMixin, SimpleTestCase):
    def run_pipeline(self, tag):
        data, model = self.path(f'{tag}.csv'), self.path(f'{tag}.json')
        self.kpca('gen-data', '--output', data, '--n', 500, '--d', 20, '--s', 5, '--seed', 11)
        self.kpca('train', '--input', data, '--output', model, '--m', 64, '--ell', 8, '--seed', 11)
        self.kpca('test', '--input', data, '--model', model, '--output', self.path(f'{tag}-test.csv'), '--k', 3)
        self.kpca('benchmark', '--input', data, '--output', self.path(f'{tag}-report.csv'), '--m', 32, 64,
                  '--ell', 8, '--c', 20, '--k', 3, '--test-size', 50, '--no-timings', '--seed', 11)

    def test_two_runs_are_byte_identical(self):
        self.run_pipeline('a')
        self.run_pipeline('b')
        for suffix in ('.csv', '.json', '-test.csv', '-report.csv'):
            with self.subTest(suffix=suffix):
                self.assertEqual(self.read_bytes(f'a{suffix}'), self.read_bytes(f'b{suffix}'))
        frame = read_report_csv(self.path('a-report.csv'))
        errors = frame[['spectral_err', 'frobenius_err', 'rank_k_frobenius']].to_numpy()
        self.assertTrue(np.all(np.isfinite(errors)))
        self.assertTrue(np.all(errors >= 0.0))
