# ccme/synthbench/__init__.py
from .dgp import BETA, GAMMA, DgpConfig, LatentRecord, generate, noise_scale
from .truth import PROFILES, GroundTruth, true_density
from .metrics import loglog_slope, mse
from .sweep import (SWEEP_COLUMNS, SweepCell, build_cells, read_sweep, records_frame, run_cell,
                    run_sweep, summarize, write_frame)
from .profiles import PROFILE_COLUMNS, run_profiles
