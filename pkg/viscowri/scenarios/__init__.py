from .config import SCENARIO_DIR, SCENARIO_KINDS, ExperimentConfig
from .cs1d import CONFIGURATIONS, CsExperiment, cs1d_experiment, cs_operator, cs_signal
from .custom import CustomWorkflow, custom_experiment, data_table, seismograms
from .extract import extract_file, extract_physical, mechanism_comparison
from .inclusion import InclusionExperiment, inclusion_experiment, inclusion_models
from .metrics import MetricsReport, model_error, relative_discrepancy
from .piecewise import PiecewiseExperiment, band_of_each, piecewise_wavefield_experiment
from .writers import OutputWriter
