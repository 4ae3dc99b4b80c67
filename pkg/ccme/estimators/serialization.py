"""Model files: one ``.npz`` container with a schema version.

Arrays are stored as-is, so weights and matrices round-trip bit for bit.
Networks go under ``<prefix>/W<i>`` and ``<prefix>/b<i>``, Cholesky
factors under ``<prefix>/lower`` and ``<prefix>/ridge``.
"""
import json
import logging
import zipfile

import numpy as np

from ccme.errors import DataFormatError
from ccme.estimators.model import MODEL_CLASSES, DeepFeatureCcme, NeuralKernelCcme, RidgeCcme
from ccme.estimators.pseudo import PseudoOutcomes
from ccme.kernels import CholeskyFactor, KernelSpec
from ccme.neuralnet import MlpParams
from ccme.utils import atomic_write

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

PSEUDO_FIELDS = ('outcomes', 'outcome_weight', 'model_weight', 'coefficients', 'anchors')


def _put_network(arrays, prefix, params):
    for i, (W, b) in enumerate(zip(params.weights, params.biases)):
        arrays[f'{prefix}/W{i}'] = W
        arrays[f'{prefix}/b{i}'] = b


def _get_network(arrays, prefix):
    weights, biases = [], []
    while f'{prefix}/W{len(weights)}' in arrays:
        i = len(weights)
        weights.append(arrays[f'{prefix}/W{i}'])
        biases.append(arrays[f'{prefix}/b{i}'])
    if not weights:
        raise DataFormatError(f'model file has no {prefix} network')
    return MlpParams(weights, biases)


def _put_kernel(arrays, prefix, spec):
    arrays[f'{prefix}/bandwidth'] = np.array(spec.bandwidth)
    arrays[f'{prefix}/normalized'] = np.array(spec.normalized)


def _get_kernel(arrays, prefix):
    return KernelSpec(float(arrays[f'{prefix}/bandwidth']), bool(arrays[f'{prefix}/normalized']))


def model_arrays(model):
    arrays = {
        'schema_version': np.array(SCHEMA_VERSION),
        'method': np.array(model.method),
        'variant': np.array(model.variant),
        'y_min': np.asarray(model.y_min),
        'y_max': np.asarray(model.y_max),
        'd_v': np.array(model.d_v),
        'diagnostics': np.array(json.dumps(model.diagnostics, default=float, sort_keys=True)),
    }
    _put_kernel(arrays, 'kernel_y', model.kernel_y)

    if model.method in ('rr', 'df'):
        for name in PSEUDO_FIELDS:
            arrays[f'pseudo/{name}'] = getattr(model.pseudo, name)
        arrays['factor/lower'] = model.factor.lower
        arrays['factor/ridge'] = np.array(model.factor.ridge)
    if model.method == 'rr':
        arrays['V1'] = model.V1
        _put_kernel(arrays, 'kernel_v', model.kernel_v)
    elif model.method == 'df':
        arrays['psi'] = model.psi
        _put_network(arrays, 'network', model.network)
    else:
        arrays['grid'] = model.grid
        arrays['K_M'] = model.K_M
        _put_network(arrays, 'network', model.network)
    return arrays


def save_model(model, path):
    arrays = model_arrays(model)
    with atomic_write(path, 'wb') as handle:
        np.savez(handle, **arrays)
    logger.info('saved %s/%s model to %s', model.method, model.variant, path)


def load_model(path):
    try:
        with np.load(path, allow_pickle=False) as data:
            arrays = {key: data[key] for key in data.files}
    except (OSError, ValueError, zipfile.BadZipFile) as exc:
        raise DataFormatError(f'cannot read model {path}: {exc}') from exc

    try:
        return model_from_arrays(arrays)
    except KeyError as exc:
        raise DataFormatError(f'model file {path} lacks {exc}') from exc


def model_from_arrays(arrays):
    version = int(arrays.get('schema_version', -1))
    if version != SCHEMA_VERSION:
        raise DataFormatError(f'unsupported model schema version {version}')
    method = str(arrays['method'])
    if method not in MODEL_CLASSES:
        raise DataFormatError(f'unknown model method {method!r}')

    kernel_y = _get_kernel(arrays, 'kernel_y')
    common = dict(variant=str(arrays['variant']), kernel_y=kernel_y, y_min=arrays['y_min'],
                  y_max=arrays['y_max'], d_v=int(arrays['d_v']),
                  diagnostics=json.loads(str(arrays['diagnostics'])))

    if method == 'nk':
        return NeuralKernelCcme(network=_get_network(arrays, 'network'), grid=arrays['grid'],
                                K_M=arrays['K_M'], **common)

    pseudo = PseudoOutcomes(kernel_y, *(arrays[f'pseudo/{name}'] for name in PSEUDO_FIELDS))
    factor = CholeskyFactor(lower=arrays['factor/lower'], ridge=float(arrays['factor/ridge']))
    if method == 'rr':
        return RidgeCcme(pseudo=pseudo, V1=arrays['V1'], kernel_v=_get_kernel(arrays, 'kernel_v'),
                         factor=factor, **common)
    return DeepFeatureCcme(pseudo=pseudo, network=_get_network(arrays, 'network'), psi=arrays['psi'],
                           factor=factor, **common)
