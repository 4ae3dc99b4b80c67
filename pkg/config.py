import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    # Kernels (one Gaussian bandwidth per space)
    BANDWIDTH_X = 2.0
    BANDWIDTH_V = 2.0
    BANDWIDTH_Y = 2.0

    # Ridge regularization, scaled by the stage sample size at use
    LAMBDA_0 = 20.0
    LAMBDA_1 = 20.0

    # Feature dimension (DF) / grid size (NK)
    GRID_SIZE = 20
    GRID_MODE = 'uniform'
    GRID_PADDING = 2.0
    GRID_POINTS = None
    STAGE2_GRID_POINTS = None

    # Networks: 2 hidden layers x 20 units, SGD with momentum, full batch
    HIDDEN_LAYERS = (20, 20)
    MOMENTUM = 0.9
    DF_LR_BASE = 2e-4
    NK_LR_BASE = 4e-4
    LR_REFERENCE_N = 200
    DF_EPOCHS = (6000, 1000)
    NK_EPOCHS = (16000, 500)
    BATCH_SIZE = None
    VAL_FRACTION = 0.0
    PATIENCE = 10

    # Propensity
    PROPENSITY = None  # None picks by scenario: forest, or logistic for (b)
    CLIP = (0.01, 0.99)
    FOREST_TREES = 100
    FOREST_DEPTH = 4
    FOREST_FEATURES = 'sqrt'  # candidate features per node: 'sqrt', 'all' or a count
    LOGISTIC_STEPS = 2000
    LOGISTIC_LR = 0.1

    # Estimation
    METHOD = 'rr'
    VARIANT = 'dr'
    SCENARIO = 'a'
    N = 200
    SEED = 0
    V_COLUMNS = (1, 2, 3, 4, 5)
    OUTCOME_COLUMNS = None

    # Benchmark sweep
    METHODS = ('rr', 'df', 'nk')
    VARIANTS = ('dr', 'ipw', 'pi', 'onestep')
    SCENARIOS = ('a', 'b', 'c')
    N_LIST = (200, 500, 1000, 2000, 5000, 10000, 20000)
    SEEDS = tuple(range(10))
    RR_MAX_N = 20000
    TEST_POINTS = 10000
    EVAL_GRID_SIZE = 1000

    # Runtime (override with env vars)
    THREADS = int(os.getenv('CCME_THREADS', '1'))
    LOG_LEVEL = os.getenv('CCME_LOG_LEVEL', 'INFO')
    LOGGING_CONFIG = os.getenv('CCME_LOGGING_CONFIG', os.path.join(os.path.dirname(__file__), 'logging.ini'))
    OUTPUT_DIR = os.getenv('CCME_OUTPUT_DIR', 'results')


class DeskConfig(Config):
    # CI acceptance profile: minutes instead of hours
    N_LIST = (200, 500, 2000, 5000)
    SEEDS = tuple(range(5))
    TEST_POINTS = 500
    EVAL_GRID_SIZE = 200


class TestingConfig(DeskConfig):
    DF_EPOCHS = (200, 100)
    NK_EPOCHS = (300, 100)
    FOREST_TREES = 10
    LOGISTIC_STEPS = 500
    TEST_POINTS = 50
    EVAL_GRID_SIZE = 60
