"""Goodness-of-fit testing for right-censored survival data.

The test statistic is a kernel distance between the uniform law and a
censoring-adjusted distribution estimate of the transformed sample,
calibrated by a wild bootstrap.  Classical competitors (chi-square,
log-rank variants, combined weighted log-rank) and a Monte-Carlo
experiment harness are included.
"""

from .classical import (
    DEFAULT_WEIGHT_FNS,
    ChiSquareOutcome,
    NormalOutcome,
    PearsonCells,
    WeightFn,
    combined_wlr_test,
    logrank_test,
    pearson_cells,
    pearson_test,
)
from .data import (
    CensoredObservation,
    Dataset,
    NullModel,
    StepCDF,
    TransformedDataset,
    ftilde_eval,
    kaplan_meier,
    median_heuristic,
    read_dataset_csv,
    risk_function,
    transform,
    transform_cumhaz,
    write_dataset_csv,
)
from .errors import (
    CensoredMMDError,
    DatasetFormatError,
    DegenerateCensoringError,
    DimensionMismatchError,
    EmptyCellError,
    InvalidModelError,
    NoSolutionError,
    RootNotBracketedError,
    ZeroVarianceError,
)
from .harness import (
    ALL_TESTS,
    ExperimentConfig,
    ResultRow,
    emit_table,
    load_config,
    null_model_from_hazard,
    parse_table,
    run_experiment,
    run_single_test,
)
from .kernels import (
    MAX_U,
    JGram,
    KernelSpec,
    j_eval,
    j_gram,
    k_eval,
    line_integral,
    rect_integral,
)
from .mmd import (
    BootstrapScheme,
    TestOutcome,
    bootstrap_statistic,
    draw_weights,
    run_test,
    run_test_on_gram,
    u_statistic,
    v_statistic,
)
from .simulate import (
    CensoringSpec,
    ConstantHazard,
    HazardModel,
    PeriodicHazard,
    WeibullHazard,
    calibrate_censoring,
    censored_fraction,
    cumulative_hazard,
    hazard_rate,
    invert_cumulative_hazard,
    sample_dataset,
    sample_survival,
    survival_function,
)

__version__ = "0.1.0"
