"""Change-point tests for the covariance structure of K independent
high-dimensional vector time series, built from CUSUM statistics of
projected bilinear forms of the sample covariance matrices."""

from .errors import (
    ConfigurationError,
    CovCusumError,
    DegenerateLrvError,
    IngestionError,
    ShapeError,
)
from .simgen import Panel, PanelConfig, gen_ar1_panel, gen_dirichlet_projection
from .sumproc import (
    ProjectedSample,
    ProjectionPair,
    TargetBilinear,
    bridge_process,
    d_process,
    per_sample_max_sq,
    pooled_d_grid_max,
    project,
)
from .lrv import LrvEstimate, andrews_bandwidth, autocov_hat, lrv_estimate, qs_weight
from .limits import (
    CritValRequest,
    critical_value,
    simulate_brownian_paths,
    simulate_path_extrema,
    sup_abs_bb_cdf,
    sup_abs_bm_cdf,
)
from .cptest import (
    TestReport,
    TestSpec,
    run_q_breve_test,
    run_q_test,
    run_test,
    run_v_breve_test,
    run_v_test,
)
from .harness import ExperimentConfig, change_time_mapping, run_experiment

__version__ = "0.1.0"
