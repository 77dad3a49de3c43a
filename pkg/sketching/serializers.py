import base64

import numpy as np
from rest_framework import serializers

from .exceptions import ConfigurationError
from .kernels import KERNEL_FAMILIES, KernelSpec
from .skpca import ELL_RULES, SkpcaConfig

MODEL_FORMAT = 'stream-kpca-model'
MODEL_VERSION = 1
METHODS = ('skpca', 'rnca', 'nystrom')


class ArrayField(serializers.Field):
    """numpy array <-> {'dtype', 'shape', 'data'} with base64 little-endian bytes."""

    def __init__(self, dtype='<f8', **kwargs):
        self.dtype = np.dtype(dtype)
        super().__init__(**kwargs)

    def to_representation(self, value):
        array = np.ascontiguousarray(value, dtype=self.dtype)
        return {
            'dtype': self.dtype.str,
            'shape': list(array.shape),
            'data': base64.b64encode(array.tobytes()).decode('ascii'),
        }

    def to_internal_value(self, data):
        if not isinstance(data, dict) or not {'dtype', 'shape', 'data'} <= set(data):
            raise serializers.ValidationError("expected an object with dtype, shape and data")
        if np.dtype(data['dtype']) != self.dtype:
            raise serializers.ValidationError(f"expected dtype {self.dtype.str}, got {data['dtype']}")
        try:
            raw = base64.b64decode(data['data'], validate=True)
            array = np.frombuffer(raw, dtype=self.dtype).reshape(data['shape']).copy()
        except (ValueError, TypeError) as exc:
            raise serializers.ValidationError(f"corrupt array payload: {exc}")
        if self.dtype.kind == 'f' and not np.all(np.isfinite(array)):
            raise serializers.ValidationError("array contains NaN or Inf entries")
        return array


class KernelSpecSerializer(serializers.Serializer):
    family = serializers.ChoiceField(choices=KERNEL_FAMILIES, default='gaussian')
    sigma = serializers.FloatField(default=1.0)

    def validate_sigma(self, value):
        if not np.isfinite(value) or value <= 0:
            raise serializers.ValidationError("sigma must be a positive number.")
        return value

    def to_spec(self):
        return KernelSpec(**self.validated_data)


class SkpcaConfigSerializer(serializers.Serializer):
    m = serializers.IntegerField(min_value=2, required=False, allow_null=True)
    ell = serializers.IntegerField(min_value=2, required=False, allow_null=True)
    kernel = KernelSpecSerializer(required=False)
    seed = serializers.IntegerField(min_value=0, default=0)
    eps = serializers.FloatField(required=False, allow_null=True)
    delta = serializers.FloatField(required=False, allow_null=True)
    n = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    ell_rule = serializers.ChoiceField(choices=sorted(ELL_RULES), default='end_to_end')

    def validate(self, data):
        kernel = KernelSpec(**data.get('kernel', {}))
        eps, delta = data.get('eps'), data.get('delta')
        try:
            if eps is not None or delta is not None:
                if eps is None or delta is None:
                    raise ConfigurationError("eps and delta must be given together.")
                if data.get('n') is None:
                    raise ConfigurationError("n is required to derive m from eps and delta.")
                config = SkpcaConfig.from_accuracy(
                    eps, delta, data['n'], kernel=kernel, seed=data['seed'],
                    m=data.get('m'), ell=data.get('ell'), ell_rule=data['ell_rule'],
                )
            else:
                if data.get('m') is None or data.get('ell') is None:
                    raise ConfigurationError("either m and ell, or eps and delta, are required.")
                config = SkpcaConfig(m=data['m'], ell=data['ell'], kernel=kernel, seed=data['seed'])
        except ConfigurationError as exc:
            raise serializers.ValidationError(str(exc))
        data['config'] = config
        return data

    def to_config(self):
        return self.validated_data['config']


def validated(serializer):
    """is_valid() that raises ConfigurationError instead of returning False."""
    if not serializer.is_valid():
        raise ConfigurationError.from_serializer(serializer)
    return serializer.validated_data


# model files

class FeatureMapRecordSerializer(serializers.Serializer):
    family = serializers.ChoiceField(choices=KERNEL_FAMILIES)
    sigma = serializers.FloatField()
    m = serializers.IntegerField(min_value=1)
    d = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0)


class ModelHeaderSerializer(serializers.Serializer):
    format = serializers.CharField()
    version = serializers.IntegerField()
    method = serializers.ChoiceField(choices=METHODS)
    n_seen = serializers.IntegerField(min_value=1)
    center = ArrayField(required=False, allow_null=True)

    def validate_format(self, value):
        if value != MODEL_FORMAT:
            raise serializers.ValidationError(f"not a {MODEL_FORMAT} file.")
        return value

    def validate_version(self, value):
        if value != MODEL_VERSION:
            raise serializers.ValidationError(f"unsupported model file version {value}, expected {MODEL_VERSION}.")
        return value


class SkpcaRecordSerializer(ModelHeaderSerializer):
    feature_map = FeatureMapRecordSerializer()
    ell = serializers.IntegerField(min_value=2)
    W = ArrayField()
    S = ArrayField()

    def validate(self, data):
        fm, ell = data['feature_map'], data['ell']
        if data['W'].shape != (fm['m'], ell):
            raise serializers.ValidationError(f"W has shape {data['W'].shape}, expected ({fm['m']}, {ell}).")
        if data['S'].shape != (ell,):
            raise serializers.ValidationError(f"S has shape {data['S'].shape}, expected ({ell},).")
        return data


class RncaRecordSerializer(ModelHeaderSerializer):
    feature_map = FeatureMapRecordSerializer()
    cov = ArrayField()

    def validate(self, data):
        m = data['feature_map']['m']
        if data['cov'].shape != (m, m):
            raise serializers.ValidationError(f"cov has shape {data['cov'].shape}, expected ({m}, {m}).")
        return data


class NystromRecordSerializer(ModelHeaderSerializer):
    kernel = KernelSpecSerializer()
    k = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0)
    samples = ArrayField()
    replacements = ArrayField(dtype='<i8')

    def validate(self, data):
        c = data['samples'].shape[0] if data['samples'].ndim == 2 else 0
        if c < 1:
            raise serializers.ValidationError("samples must be a non-empty c x d matrix.")
        if data['k'] > c:
            raise serializers.ValidationError(f"k={data['k']} exceeds c={c}.")
        if data['replacements'].shape != (c,):
            raise serializers.ValidationError("replacements must hold one counter per sample slot.")
        return data


RECORD_SERIALIZERS = {
    'skpca': SkpcaRecordSerializer,
    'rnca': RncaRecordSerializer,
    'nystrom': NystromRecordSerializer,
}
