"""A small ReLU multilayer perceptron trained with momentum SGD.

Weights follow the ``W_i: d_i x d_{i-1}`` convention, so a layer maps a
batch ``H`` to ``H @ W.T + b``. Hidden layers use ReLU, the output layer is
linear.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from ccme.errors import InvalidArgumentError, NumericError

logger = logging.getLogger(__name__)


@dataclass
class MlpParams:
    weights: list
    biases: list

    @property
    def layer_sizes(self):
        return [self.weights[0].shape[1]] + [W.shape[0] for W in self.weights]

    @property
    def n_params(self):
        return sum(W.size + b.size for W, b in zip(self.weights, self.biases))

    def copy(self):
        return MlpParams([W.copy() for W in self.weights], [b.copy() for b in self.biases])

    def zeros_like(self):
        return MlpParams([np.zeros_like(W) for W in self.weights],
                         [np.zeros_like(b) for b in self.biases])

    def arrays(self):
        for W, b in zip(self.weights, self.biases):
            yield W
            yield b


@dataclass
class ForwardCache:
    inputs: np.ndarray
    pre_activations: list
    weights: list


@dataclass
class SgdState:
    buffers: MlpParams
    lr: float
    momentum: float = 0.9


def mlp_init(layer_sizes, seed):
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2:
        raise InvalidArgumentError('an MLP needs at least an input and an output size')
    if any(s < 1 for s in sizes):
        raise InvalidArgumentError(f'layer sizes must be positive, got {sizes}')

    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for d_in, d_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (d_in + d_out))
        weights.append(rng.uniform(-limit, limit, size=(d_out, d_in)))
        biases.append(np.zeros(d_out))
    return MlpParams(weights, biases)


def mlp_forward(params, batch):
    H = np.asarray(batch, dtype=float)
    if H.ndim == 1:
        H = H.reshape(1, -1)
    if H.shape[1] != params.weights[0].shape[1]:
        raise InvalidArgumentError(
            f'batch has {H.shape[1]} columns, network expects {params.weights[0].shape[1]}')

    inputs = H
    pre_activations = []
    last = len(params.weights) - 1
    for i, (W, b) in enumerate(zip(params.weights, params.biases)):
        Z = H @ W.T + b
        pre_activations.append(Z)
        H = Z if i == last else np.maximum(Z, 0.0)
    return H, ForwardCache(inputs, pre_activations, list(params.weights))


def mlp_backward(params, cache, output_grad):
    if len(cache.weights) != len(params.weights) or any(
            a is not b for a, b in zip(cache.weights, params.weights)):
        raise InvalidArgumentError('forward cache does not belong to these parameters')
    G = np.asarray(output_grad, dtype=float)
    if G.shape != cache.pre_activations[-1].shape:
        raise InvalidArgumentError(
            f'output gradient has shape {G.shape}, expected {cache.pre_activations[-1].shape}')

    grads_W = [None] * len(params.weights)
    grads_b = [None] * len(params.weights)
    for i in range(len(params.weights) - 1, -1, -1):
        if i > 0:
            H_prev = np.maximum(cache.pre_activations[i - 1], 0.0)
        else:
            H_prev = cache.inputs
        grads_W[i] = G.T @ H_prev
        grads_b[i] = G.sum(axis=0)
        if i > 0:
            G = (G @ params.weights[i]) * (cache.pre_activations[i - 1] > 0)
    return MlpParams(grads_W, grads_b)


def sgd_state(params, lr, momentum=0.9):
    if not 0 <= momentum < 1:
        raise InvalidArgumentError(f'momentum must lie in [0, 1), got {momentum}')
    return SgdState(params.zeros_like(), float(lr), float(momentum))


def sgd_step(params, grads, state):
    """Classical momentum: ``buf = mu * buf + g``; ``p = p - lr * buf``."""
    if [W.shape for W in grads.weights] != [W.shape for W in params.weights]:
        raise InvalidArgumentError('gradient shapes do not match the parameters')

    new_params = MlpParams([], [])
    new_buffers = MlpParams([], [])
    for name in ('weights', 'biases'):
        for p, g, buf in zip(getattr(params, name), getattr(grads, name),
                             getattr(state.buffers, name)):
            buf = state.momentum * buf + g
            getattr(new_buffers, name).append(buf)
            getattr(new_params, name).append(p - state.lr * buf)
    return new_params, SgdState(new_buffers, state.lr, state.momentum)


@dataclass
class TrainConfig:
    lr: float
    epochs: int
    momentum: float = 0.9
    batch_size: int = None
    val_fraction: float = 0.0
    patience: int = 10
    log_every: int = 500


@dataclass
class TrainResult:
    params: MlpParams
    losses: list = field(default_factory=list)
    val_losses: list = field(default_factory=list)
    best_epoch: int = None


def train_network(params, inputs, objective, config, seed=0, name='network'):
    """Minimize ``objective`` over the network parameters.

    ``objective(outputs, rows)`` receives the network outputs on ``inputs[rows]``
    and returns ``(loss, d loss / d outputs)``.
    """
    inputs = np.asarray(inputs, dtype=float)
    n = len(inputs)
    rng = np.random.default_rng(seed)

    rows = np.arange(n)
    val_rows = None
    if config.val_fraction > 0:
        perm = rng.permutation(n)
        n_val = max(1, int(round(config.val_fraction * n)))
        if n - n_val < 1:
            raise InvalidArgumentError(f'{name}: too few rows for a validation split')
        val_rows, rows = np.sort(perm[:n_val]), np.sort(perm[n_val:])

    state = sgd_state(params, config.lr, config.momentum)
    result = TrainResult(params)
    best = (np.inf, params, None)
    stale = 0

    for epoch in range(config.epochs):
        epoch_loss = 0.0
        for batch in _batches(rows, config.batch_size, rng):
            outputs, cache = mlp_forward(params, inputs[batch])
            loss, grad = objective(outputs, batch)
            if not np.isfinite(loss):
                raise NumericError(f'{name}: non-finite training loss at epoch {epoch}', epoch=epoch)
            grads = mlp_backward(params, cache, grad)
            params, state = sgd_step(params, grads, state)
            epoch_loss += loss * len(batch) / len(rows)
        result.losses.append(epoch_loss)

        if config.log_every and epoch % config.log_every == 0:
            logger.debug('%s epoch %d loss %.6g', name, epoch, epoch_loss)

        if val_rows is not None:
            outputs, _ = mlp_forward(params, inputs[val_rows])
            val_loss, _ = objective(outputs, val_rows)
            result.val_losses.append(val_loss)
            if val_loss < best[0]:
                best, stale = (val_loss, params, epoch), 0
            else:
                stale += 1
                if stale >= config.patience:
                    logger.info('%s: early stop at epoch %d (best %d)', name, epoch, best[2])
                    break

    if val_rows is not None and best[2] is not None:
        params, result.best_epoch = best[1], best[2]
    result.params = params
    if result.losses:
        logger.info('%s: trained %d epochs, final loss %.6g', name, len(result.losses), result.losses[-1])
    return result


def _batches(rows, batch_size, rng):
    if not batch_size or batch_size >= len(rows):
        yield rows
        return
    perm = rows[rng.permutation(len(rows))]
    for start in range(0, len(perm), batch_size):
        yield np.sort(perm[start:start + batch_size])
