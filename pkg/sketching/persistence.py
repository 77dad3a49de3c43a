"""Versioned JSON model files; feature maps are stored as their seed recipe."""
import json
import logging

from .baselines import NystromModel, RncaModel, nystrom_from_samples, rnca_from_covariance
from .exceptions import ModelFileError
from .kernels import KernelSpec
from .rff import FeatureMap
from .serializers import MODEL_FORMAT, MODEL_VERSION, RECORD_SERIALIZERS
from .skpca import SkpcaModel

logger = logging.getLogger(__name__)


def method_of(model):
    if isinstance(model, SkpcaModel):
        return 'skpca'
    if isinstance(model, RncaModel):
        return 'rnca'
    if isinstance(model, NystromModel):
        return 'nystrom'
    raise TypeError(f"not a trained model: {type(model).__name__}")


def model_to_record(model):
    method = method_of(model)
    instance = {
        'format': MODEL_FORMAT,
        'version': MODEL_VERSION,
        'method': method,
        'n_seen': model.n_seen,
        'center': model.center,
    }
    if method == 'skpca':
        instance.update(feature_map=model.fm.to_record(), ell=model.ell, W=model.W, S=model.S)
    elif method == 'rnca':
        instance.update(feature_map=model.fm.to_record(), cov=model.cov)
    else:
        instance.update(
            kernel=model.kernel.to_record(), k=model.k, seed=model.seed,
            samples=model.samples, replacements=model.replacements,
        )
    return dict(RECORD_SERIALIZERS[method](instance).data)


def model_from_record(record):
    method = record.get('method') if isinstance(record, dict) else None
    if method not in RECORD_SERIALIZERS:
        raise ModelFileError(f"unknown model method {method!r}")
    serializer = RECORD_SERIALIZERS[method](data=record)
    if not serializer.is_valid():
        raise ModelFileError(f"invalid {method} model file: {dict(serializer.errors)}")
    data = serializer.validated_data
    center = data.get('center')

    if method == 'skpca':
        fm = FeatureMap.from_record(data['feature_map'])
        for array in (data['W'], data['S']):
            array.setflags(write=False)
        return SkpcaModel(fm=fm, W=data['W'], S=data['S'], n_seen=data['n_seen'], center=center)
    if method == 'rnca':
        fm = FeatureMap.from_record(data['feature_map'])
        return rnca_from_covariance(fm, data['cov'], data['n_seen'], center=center)
    return nystrom_from_samples(
        KernelSpec(**data['kernel']), data['samples'], data['k'], data['seed'],
        data['n_seen'], data['replacements'], center=center,
    )


def dumps_model(model):
    return json.dumps(model_to_record(model), sort_keys=True, separators=(',', ':')) + '\n'


def dump_model(model, path):
    payload = dumps_model(model)
    with open(path, 'w', encoding='ascii', newline='\n') as handle:
        handle.write(payload)
    logger.info("wrote %s model to %s (%d bytes)", method_of(model), path, len(payload))


def load_model(path):
    try:
        with open(path, encoding='ascii') as handle:
            record = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: not a model file ({exc})") from exc
    model = model_from_record(record)
    if model.center is not None:
        model.center.setflags(write=False)
    return model


def same_model(left, right):
    """Structural equality of two trained models, used after a reload."""
    return method_of(left) == method_of(right) and dumps_model(left) == dumps_model(right)
