import logging

import numpy as np
from scipy.special import expit, log_expit

from ccme.errors import DegenerateDataError, InvalidArgumentError
from ccme.neuralnet import MlpParams, mlp_backward, mlp_forward, sgd_state, sgd_step
from ccme.propensity.models import DEFAULT_CLIP, LogisticPropensity, check_clip

logger = logging.getLogger(__name__)


def logistic_loss(coef, intercept, X, A):
    """Mean log-loss and its gradient with respect to (coef, intercept)."""
    z = X @ coef + intercept
    loss = -np.mean(A * log_expit(z) + (1 - A) * log_expit(-z))
    residual = (expit(z) - A) / len(A)
    return loss, X.T @ residual, residual.sum()


def fit_logistic(X, A, epochs=2000, lr=0.1, clip=DEFAULT_CLIP):
    """Unpenalized logistic regression by full-batch gradient descent."""
    X = np.asarray(X, dtype=float)
    A = np.asarray(A, dtype=float).ravel()
    clip = check_clip(clip)
    if len(X) < 2 or len(X) != len(A):
        raise InvalidArgumentError('logistic regression needs at least 2 matching rows')
    if A.min() == A.max():
        raise DegenerateDataError('logistic propensity needs both treated and control rows')

    # a one-layer linear network: logits = X @ W.T + b
    params = MlpParams([np.zeros((1, X.shape[1]))], [np.zeros(1)])
    state = sgd_state(params, lr, momentum=0.0)
    for _ in range(epochs):
        logits, cache = mlp_forward(params, X)
        residual = (expit(logits[:, 0]) - A) / len(A)
        params, state = sgd_step(params, mlp_backward(params, cache, residual[:, None]), state)

    coef, intercept = params.weights[0][0].copy(), float(params.biases[0][0])
    loss, _, _ = logistic_loss(coef, intercept, X, A)
    logger.info('logistic propensity: %d steps, log-loss %.4f', epochs, loss)
    return LogisticPropensity(coef=coef, intercept=intercept, clip=clip)
