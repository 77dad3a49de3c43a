import json
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from evaluation.synthetic import gen_gaussian_mixture
from sketching.baselines import nystrom_test, nystrom_train, rnca_test, rnca_train
from sketching.exceptions import ConfigurationError, ModelFileError
from sketching.kernels import KernelSpec
from sketching.persistence import dump_model, dumps_model, load_model, method_of, model_from_record, same_model
from sketching.rff import sample_feature_map
from sketching.serializers import SkpcaConfigSerializer, validated
from sketching.skpca import SkpcaConfig, project_test, train


class ModelFileTests(SimpleTestCase):
    def setUp(self):
        self.A = gen_gaussian_mixture(60, 3, seed=6)
        self.center = self.A.mean(axis=0)
        self.models = {
            'skpca': train(SkpcaConfig(m=32, ell=6, kernel=KernelSpec(sigma=1.5), seed=4), iter(self.A)),
            'rnca': rnca_train(sample_feature_map(KernelSpec(), 20, 3, seed=2), iter(self.A), center=self.center),
            'nystrom': nystrom_train(KernelSpec(sigma=0.8), 8, 5, 3, iter(self.A)),
        }
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.tmp = tmp.name

    def path(self, name):
        return os.path.join(self.tmp, name)

    def test_reload_gives_the_same_model(self):
        for method, model in self.models.items():
            with self.subTest(method=method):
                dump_model(model, self.path(f'{method}.json'))
                again = load_model(self.path(f'{method}.json'))
                self.assertEqual(method_of(again), method)
                self.assertTrue(same_model(model, again))

    def test_reloaded_models_project_identically(self):
        x = self.A[10]
        dump_model(self.models['skpca'], self.path('s.json'))
        dump_model(self.models['rnca'], self.path('r.json'))
        dump_model(self.models['nystrom'], self.path('n.json'))
        np.testing.assert_array_equal(
            project_test(load_model(self.path('s.json')), x, 3).loading, project_test(self.models['skpca'], x, 3).loading,
        )
        np.testing.assert_array_equal(
            rnca_test(load_model(self.path('r.json')), x, 5).loading, rnca_test(self.models['rnca'], x, 5).loading,
        )
        np.testing.assert_array_equal(
            nystrom_test(load_model(self.path('n.json')), x).loading, nystrom_test(self.models['nystrom'], x).loading,
        )

    def test_dumps_are_byte_identical(self):
        again = train(SkpcaConfig(m=32, ell=6, kernel=KernelSpec(sigma=1.5), seed=4), iter(self.A))
        self.assertEqual(dumps_model(self.models['skpca']), dumps_model(again))

    def test_center_is_preserved(self):
        dump_model(self.models['rnca'], self.path('r.json'))
        np.testing.assert_array_equal(load_model(self.path('r.json')).center, self.center)
        dump_model(self.models['skpca'], self.path('s.json'))
        self.assertIsNone(load_model(self.path('s.json')).center)

    def test_feature_map_is_stored_as_its_recipe(self):
        record = json.loads(dumps_model(self.models['skpca']))
        self.assertEqual(record['feature_map'], {'family': 'gaussian', 'sigma': 1.5, 'm': 32, 'd': 3, 'seed': 4})
        self.assertNotIn('R', record)

    def test_rejects_other_versions(self):
        record = json.loads(dumps_model(self.models['skpca']))
        record['version'] = 99
        with self.assertRaisesMessage(ModelFileError, 'unsupported model file version'):
            model_from_record(record)

    def test_rejects_unknown_method(self):
        record = json.loads(dumps_model(self.models['rnca']))
        record['method'] = 'pca'
        with self.assertRaises(ModelFileError):
            model_from_record(record)
        with self.assertRaises(ModelFileError):
            model_from_record(['not', 'a', 'record'])

    def test_rejects_shape_mismatch(self):
        record = json.loads(dumps_model(self.models['skpca']))
        record['ell'] = 8
        with self.assertRaises(ModelFileError):
            model_from_record(record)

    def test_rejects_nystrom_rank_above_samples(self):
        record = json.loads(dumps_model(self.models['nystrom']))
        record['k'] = 9
        with self.assertRaises(ModelFileError):
            model_from_record(record)

    def test_rejects_corrupt_payload(self):
        record = json.loads(dumps_model(self.models['rnca']))
        record['cov']['data'] = '***'
        with self.assertRaises(ModelFileError):
            model_from_record(record)

    def test_rejects_non_json(self):
        with open(self.path('bad.json'), 'w') as handle:
            handle.write('skpca\n1 2 3\n')
        with self.assertRaises(ModelFileError):
            load_model(self.path('bad.json'))

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            load_model(self.path('absent.json'))


class SkpcaConfigSerializerTests(SimpleTestCase):
    def test_explicit_sizes(self):
        data = validated(SkpcaConfigSerializer(data={'m': 64, 'ell': 8, 'kernel': {'sigma': 2.0}, 'seed': 3}))
        self.assertEqual(data['config'], SkpcaConfig(m=64, ell=8, kernel=KernelSpec(sigma=2.0), seed=3))

    def test_derived_sizes(self):
        data = validated(SkpcaConfigSerializer(data={'eps': 0.25, 'delta': 0.1, 'n': 2000, 'ell_rule': 'sketch_only'}))
        self.assertEqual((data['config'].m, data['config'].ell), (1865, 8))

    def test_errors(self):
        for payload in (
            {'m': 64},
            {'eps': 0.25, 'n': 2000},
            {'eps': 0.25, 'delta': 0.1},
            {'m': 64, 'ell': 7},
            {'m': 64, 'ell': 8, 'kernel': {'sigma': -1.0}},
            {'eps': 0.25, 'delta': 0.1, 'n': 2000, 'm': 100},
        ):
            with self.subTest(payload=payload):
                with self.assertRaises(ConfigurationError):
                    validated(SkpcaConfigSerializer(data=payload))
