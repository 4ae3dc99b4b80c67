# ccme/propensity/__init__.py
from .models import (ForestPropensity, LogisticPropensity, OraclePropensity, PropensityModel,
                     clipped_fraction)
from .logistic import fit_logistic, logistic_loss
from .forest import TreeNode, candidate_count, fit_forest
from .oracle import ORACLES, synthetic_propensity


def predict_propensity(model, x):
    return model.predict(x)
