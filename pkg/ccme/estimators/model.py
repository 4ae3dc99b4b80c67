"""Fitted conditional counterfactual mean embeddings."""
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from ccme.errors import InvalidArgumentError
from ccme.estimators.pseudo import PseudoOutcomes
from ccme.kernels import CholeskyFactor, KernelSpec, as_points, gram
from ccme.neuralnet import MlpParams, mlp_forward


@dataclass(kw_only=True)
class CcmeModel:
    method: ClassVar[str]

    variant: str
    kernel_y: KernelSpec
    y_min: np.ndarray
    y_max: np.ndarray
    d_v: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def d_y(self):
        return len(np.atleast_1d(self.y_min))

    def check_v(self, V):
        # a 1-d v is one conditioning point
        V = np.asarray(V, dtype=float)
        V = V.reshape(1, -1) if V.ndim <= 1 else as_points(V)
        if V.shape[1] != self.d_v:
            raise InvalidArgumentError(f'v has {V.shape[1]} coordinates, model expects {self.d_v}')
        return V

    def check_y(self, y):
        y = as_points(y)
        if y.shape[1] != self.d_y:
            raise InvalidArgumentError(f'y has {y.shape[1]} coordinates, model expects {self.d_y}')
        if len(y) == 0:
            raise InvalidArgumentError('the outcome grid is empty')
        return y

    def default_grid(self, size, padding=2.0):
        if self.d_y != 1:
            raise InvalidArgumentError('a default grid exists only for scalar outcomes')
        lo, hi = float(np.ravel(self.y_min)[0]), float(np.ravel(self.y_max)[0])
        return np.linspace(lo - padding, hi + padding, size)


@dataclass(kw_only=True)
class RidgeCcme(CcmeModel):
    """Kernel ridge regression of the pseudo-outcomes on V."""
    method: ClassVar[str] = 'rr'

    pseudo: PseudoOutcomes
    V1: np.ndarray
    kernel_v: KernelSpec
    factor: CholeskyFactor

    def linear_weights(self, V):
        """beta(v) = (K_V + n lambda_1 I)^-1 k_V(v), one column per v."""
        return self.factor.solve(gram(self.kernel_v, self.V1, self.check_v(V)))


@dataclass(kw_only=True)
class DeepFeatureCcme(CcmeModel):
    """Ridge regression on learned features psi(v)."""
    method: ClassVar[str] = 'df'

    pseudo: PseudoOutcomes
    network: MlpParams
    psi: np.ndarray
    factor: CholeskyFactor

    def features(self, V):
        return mlp_forward(self.network, self.check_v(V))[0]

    def linear_weights(self, V):
        return self.psi @ self.factor.solve(self.features(V).T)


@dataclass(kw_only=True)
class NeuralKernelCcme(CcmeModel):
    """Network coefficients over fixed outcome grid points."""
    method: ClassVar[str] = 'nk'

    network: MlpParams
    grid: np.ndarray
    K_M: np.ndarray

    def grid_coefficients(self, V):
        return mlp_forward(self.network, self.check_v(V))[0]


MODEL_CLASSES = {cls.method: cls for cls in (RidgeCcme, DeepFeatureCcme, NeuralKernelCcme)}
