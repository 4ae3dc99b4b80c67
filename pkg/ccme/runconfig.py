"""Resolved run configuration: class defaults, then a JSON file, then flags."""
import dataclasses
import json
from dataclasses import dataclass, field, fields

import numpy as np

from ccme.errors import ConfigurationError, DataFormatError
from ccme.utils import atomic_write

METHODS = ('rr', 'df', 'nk')
VARIANTS = ('dr', 'ipw', 'pi', 'onestep')
SCENARIOS = ('a', 'b', 'c')
PROPENSITIES = ('forest', 'logistic', 'oracle')
GRID_MODES = ('uniform', 'sample')

# Column of X6 (1-based); scenario (c) drops it from the outcome model
MISSPECIFIED_COLUMN = 6


@dataclass
class RunConfig:
    method: str = 'rr'
    variant: str = 'dr'
    scenario: str = 'a'
    n: int = 200
    seed: int = 0

    bandwidth_x: float = 2.0
    bandwidth_v: float = 2.0
    bandwidth_y: float = 2.0
    lambda_0: float = 20.0
    lambda_1: float = 20.0

    grid_size: int = 20
    grid_mode: str = 'uniform'
    grid_padding: float = 2.0
    grid_points: list = None
    stage2_grid_points: list = None

    hidden_layers: tuple = (20, 20)
    momentum: float = 0.9
    df_lr_base: float = 2e-4
    nk_lr_base: float = 4e-4
    lr_reference_n: int = 200
    df_epochs: tuple = (6000, 1000)
    nk_epochs: tuple = (16000, 500)
    batch_size: int = None
    val_fraction: float = 0.0
    patience: int = 10

    propensity: str = None
    clip: tuple = (0.01, 0.99)
    forest_trees: int = 100
    forest_depth: int = 4
    forest_features: object = 'sqrt'
    logistic_steps: int = 2000
    logistic_lr: float = 0.1

    v_columns: tuple = (1, 2, 3, 4, 5)
    outcome_columns: tuple = None

    methods: tuple = METHODS
    variants: tuple = VARIANTS
    scenarios: tuple = SCENARIOS
    n_list: tuple = (200, 500, 1000, 2000, 5000, 10000, 20000)
    seeds: tuple = tuple(range(10))
    rr_max_n: int = 20000
    test_points: int = 10000
    eval_grid_size: int = 1000

    threads: int = 1
    log_level: str = 'INFO'
    output_dir: str = 'results'
    filters: dict = field(default_factory=dict)

    @classmethod
    def from_object(cls, obj):
        """Read defaults from the UPPERCASE attributes of a config class."""
        values = {}
        for f in fields(cls):
            key = f.name.upper()
            if hasattr(obj, key):
                values[f.name] = getattr(obj, key)
        return cls(**values)

    def update(self, mapping):
        known = {f.name for f in fields(self)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise ConfigurationError(f'unknown config keys: {", ".join(unknown)}')
        return dataclasses.replace(self, **{k: v for k, v in mapping.items() if v is not None})

    def to_dict(self):
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = [list(v) if isinstance(v, tuple) else v for v in value]
            out[f.name] = value
        return out

    def dump(self, path=None):
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is None:
            return text
        with atomic_write(path) as handle:
            handle.write(text + '\n')
        return text

    # Derived settings

    @property
    def propensity_kind(self):
        if self.propensity is not None:
            return self.propensity
        return 'logistic' if self.scenario == 'b' else 'forest'

    def outcome_column_indices(self, d_x):
        """Zero-based X columns feeding the first-stage outcome model."""
        if self.outcome_columns is not None:
            cols = [c - 1 for c in self.outcome_columns]
        else:
            cols = list(range(d_x))
            if self.scenario == 'c' and d_x >= MISSPECIFIED_COLUMN:
                cols.remove(MISSPECIFIED_COLUMN - 1)
        if any(c < 0 or c >= d_x for c in cols):
            raise ConfigurationError(f'outcome_columns out of range for {d_x} covariates')
        return tuple(cols)

    def v_column_indices(self, d_x):
        cols = tuple(c - 1 for c in self.v_columns)
        if any(c < 0 or c >= d_x for c in cols):
            raise ConfigurationError(f'v_columns out of range for {d_x} covariates')
        return cols

    def learning_rate(self, method, n):
        base = self.df_lr_base if method == 'df' else self.nk_lr_base
        return base * n / self.lr_reference_n

    def epochs(self, method):
        return tuple(self.df_epochs if method == 'df' else self.nk_epochs)

    def validate(self):
        if self.method not in METHODS:
            raise ConfigurationError(f'method must be one of {METHODS}, got {self.method!r}')
        if self.variant not in VARIANTS:
            raise ConfigurationError(f'variant must be one of {VARIANTS}, got {self.variant!r}')
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(f'scenario must be one of {SCENARIOS}, got {self.scenario!r}')
        if self.propensity is not None and self.propensity not in PROPENSITIES:
            raise ConfigurationError(f'propensity must be one of {PROPENSITIES}')
        if self.grid_mode not in GRID_MODES:
            raise ConfigurationError(f'grid_mode must be one of {GRID_MODES}')
        for name in ('bandwidth_x', 'bandwidth_v', 'bandwidth_y', 'lambda_0', 'lambda_1'):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigurationError(f'{name} must be positive, got {value}')
        if self.grid_size < 1:
            raise ConfigurationError('grid_size must be at least 1')
        lo, hi = self.clip
        if not 0 < lo < hi < 1:
            raise ConfigurationError(f'clip bounds must satisfy 0 < lo < hi < 1, got {self.clip}')
        if self.n < 4:
            raise ConfigurationError('n must be at least 4')
        if self.seed < 0:
            raise ConfigurationError(f'seed must be non-negative, got {self.seed}')
        negative = [s for s in self.seeds if s < 0]
        if negative:
            raise ConfigurationError(f'seeds must be non-negative, got {negative}')
        if self.forest_features not in ('sqrt', 'all') and not (
                isinstance(self.forest_features, int) and self.forest_features >= 1):
            raise ConfigurationError(f"forest_features must be 'sqrt', 'all' or a positive int, "
                                     f'got {self.forest_features!r}')
        if not 0 <= self.val_fraction < 1:
            raise ConfigurationError('val_fraction must lie in [0, 1)')
        for name in ('methods', 'variants', 'scenarios'):
            allowed = {'methods': METHODS, 'variants': VARIANTS, 'scenarios': SCENARIOS}[name]
            bad = [v for v in getattr(self, name) if v not in allowed]
            if bad:
                raise ConfigurationError(f'{name} contains unknown entries {bad}')
        self._validate_grids()
        return self

    def _validate_grids(self):
        if self.grid_points is None:
            if self.stage2_grid_points is not None:
                raise ConfigurationError('grid mismatch: stage2_grid_points given without grid_points')
            return
        grid = np.asarray(self.grid_points, dtype=float)
        if len(grid) != self.grid_size:
            raise ConfigurationError(
                f'grid mismatch: {len(grid)} grid points but grid_size is {self.grid_size}')
        if len(np.unique(grid, axis=0)) != len(grid):
            raise ConfigurationError('grid mismatch: grid points must be distinct')
        if self.stage2_grid_points is not None:
            other = np.asarray(self.stage2_grid_points, dtype=float)
            if other.shape != grid.shape or not np.array_equal(other, grid):
                raise ConfigurationError(
                    'grid mismatch: the second stage must use the first-stage grid points')


def load_json(path):
    try:
        with open(path) as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataFormatError(f'cannot read config {path}: {exc}') from exc
    if not isinstance(data, dict):
        raise DataFormatError(f'config {path} must hold a JSON object')
    return data


def _coerce(config):
    # JSON gives lists; keep the tuple-typed fields hashable and comparable
    for name in ('hidden_layers', 'df_epochs', 'nk_epochs', 'clip', 'v_columns', 'methods',
                 'variants', 'scenarios', 'n_list', 'seeds'):
        value = getattr(config, name)
        if isinstance(value, int) and name == 'seeds':
            value = range(value)
        setattr(config, name, tuple(value))
    if config.outcome_columns is not None:
        config.outcome_columns = tuple(config.outcome_columns)
    return config
