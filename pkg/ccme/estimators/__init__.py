# ccme/estimators/__init__.py
from .data import Dataset, SplitDataset, split_data
from .losses import nk_loss, nk_objective, trace_loss, trace_objective
from .first_stage import (DeepFeatureCme, FirstStage, NeuralKernelCme, RidgeCme, check_overlap,
                          fit_first_stage_df, fit_first_stage_nk, fit_first_stage_rr,
                          fit_propensity, make_grid)
from .pseudo import PseudoOutcomes, build_k_xi, compute_omega, pseudo_targets
from .model import MODEL_CLASSES, CcmeModel, DeepFeatureCcme, NeuralKernelCcme, RidgeCcme
from .second_stage import (check_grid, fit_one_step, fit_second_stage_df, fit_second_stage_nk,
                           fit_second_stage_rr)
from .fit import fit_ccme, train_configs
from .serialization import SCHEMA_VERSION, load_model, save_model
