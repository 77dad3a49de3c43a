from rest_framework import serializers

from sketching.exceptions import ConfigurationError
from sketching.serializers import METHODS
from sketching.skpca import ELL_RULES

from .models import REPORT_COLUMNS, ErrorReport
from .synthetic import SyntheticSpec, gen_gaussian_mixture, gen_random_noisy

DATA_KINDS = ('random-noisy', 'blobs')


class ErrorReportSerializer(serializers.ModelSerializer):
    class Meta:
        model = ErrorReport
        fields = REPORT_COLUMNS


class SyntheticSpecSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=DATA_KINDS, default='random-noisy')
    n = serializers.IntegerField(min_value=1)
    d = serializers.IntegerField(min_value=1)
    s = serializers.IntegerField(min_value=1, default=50)
    zeta = serializers.FloatField(default=10.0)
    seed = serializers.IntegerField(min_value=0, default=0)
    clusters = serializers.IntegerField(min_value=1, default=5)
    cluster_std = serializers.FloatField(default=0.5)

    def validate(self, data):
        if data['kind'] == 'random-noisy':
            try:
                data['spec'] = SyntheticSpec(n=data['n'], d=data['d'], s=data['s'], zeta=data['zeta'], seed=data['seed'])
            except ConfigurationError as exc:
                raise serializers.ValidationError(str(exc))
        elif data['cluster_std'] <= 0:
            raise serializers.ValidationError({'cluster_std': "must be positive."})
        return data

    def generate(self):
        data = self.validated_data
        if data['kind'] == 'random-noisy':
            return gen_random_noisy(data['spec'])
        return gen_gaussian_mixture(
            data['n'], data['d'], clusters=data['clusters'], cluster_std=data['cluster_std'], seed=data['seed'],
        )


class RunConfigSerializer(serializers.Serializer):
    """Flags shared by every kpca subcommand; subclasses check their own combinations."""

    command = serializers.ChoiceField(choices=['gen-data', 'train', 'test', 'benchmark'])
    output = serializers.CharField()
    seed = serializers.IntegerField(min_value=0, default=0)
    header = serializers.BooleanField(default=False)

    def check_accuracy(self, data):
        eps, delta = data.get('eps'), data.get('delta')
        if (eps is None) != (delta is None):
            raise serializers.ValidationError("--eps and --delta must be given together.")
        if eps is not None and not (0 < eps < 1 and 0 < delta < 1):
            raise serializers.ValidationError("--eps and --delta must lie in (0, 1).")
        return eps is not None


class GenDataConfigSerializer(RunConfigSerializer, SyntheticSpecSerializer):
    pass


class InputConfigSerializer(RunConfigSerializer):
    input = serializers.CharField()
    drop_first_col = serializers.BooleanField(default=False)


class TrainConfigSerializer(InputConfigSerializer):
    method = serializers.ChoiceField(choices=METHODS, default='skpca')
    m = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    ell = serializers.IntegerField(min_value=2, required=False, allow_null=True)
    c = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    k = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    sigma = serializers.FloatField()
    eps = serializers.FloatField(required=False, allow_null=True)
    delta = serializers.FloatField(required=False, allow_null=True)
    ell_rule = serializers.ChoiceField(choices=sorted(ELL_RULES), default='end_to_end')
    center = serializers.BooleanField(default=False)

    def validate_sigma(self, value):
        if not value > 0:
            raise serializers.ValidationError("sigma must be positive.")
        return value

    def validate(self, data):
        method = data['method']
        derived = self.check_accuracy(data)
        if method != 'skpca' and data.get('ell') is not None:
            raise serializers.ValidationError("--ell only applies to --method skpca.")
        if method != 'nystrom':
            for name in ('c', 'k'):
                if data.get(name) is not None:
                    raise serializers.ValidationError(f"--{name} only applies to --method nystrom.")
        if derived:
            return data
        if method == 'skpca' and (data.get('m') is None or data.get('ell') is None):
            raise serializers.ValidationError("skpca needs --m and --ell, or --eps and --delta.")
        if method == 'rnca' and data.get('m') is None:
            raise serializers.ValidationError("rnca needs --m, or --eps and --delta.")
        if method == 'nystrom' and data.get('c') is None and data.get('m') is None:
            raise serializers.ValidationError("nystrom needs --c, or --eps and --delta.")
        return data


class TestConfigSerializer(InputConfigSerializer):
    model = serializers.CharField()
    k = serializers.IntegerField(min_value=1, required=False, allow_null=True)


class BenchmarkConfigSerializer(InputConfigSerializer):
    method = serializers.ListField(child=serializers.ChoiceField(choices=METHODS), min_length=1)
    m = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False, allow_null=True)
    ell = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False, allow_null=True)
    c = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False, allow_null=True)
    k = serializers.IntegerField(min_value=1)
    sigma = serializers.FloatField()
    eps = serializers.FloatField(required=False, allow_null=True)
    delta = serializers.FloatField(required=False, allow_null=True)
    center = serializers.BooleanField(default=False)
    test_size = serializers.IntegerField(min_value=1)
    repeats = serializers.IntegerField(min_value=1)
    jobs = serializers.IntegerField()
    jsonl = serializers.CharField(required=False, allow_null=True)
    record = serializers.CharField(required=False, allow_null=True, max_length=100)
    no_timings = serializers.BooleanField(default=False)

    def validate_sigma(self, value):
        if not value > 0:
            raise serializers.ValidationError("sigma must be positive.")
        return value

    def validate_jobs(self, value):
        if value == 0:
            raise serializers.ValidationError("jobs must be non-zero (-1 uses every core).")
        return value

    def validate(self, data):
        derived = self.check_accuracy(data)
        methods = set(data['method'])
        if not derived:
            if methods & {'skpca', 'rnca'} and not data.get('m'):
                raise serializers.ValidationError("skpca and rnca cells need --m, or --eps and --delta.")
            if 'skpca' in methods and not data.get('ell'):
                raise serializers.ValidationError("skpca cells need --ell, or --eps and --delta.")
            if 'nystrom' in methods and not (data.get('c') or data.get('m')):
                raise serializers.ValidationError("nystrom cells need --c (or --m), or --eps and --delta.")
        return data
