"""Two-stage national-happiness regression toolkit.

Per-year micro OLS produces yearly intercepts (mean happiness net of
socio-demographics); a macro regression relates those intercepts to national
indicators.  Includes ordered-probit estimation, heteroskedasticity and
serial-correlation diagnostics, effect decompositions, synthetic-data
generators with known ground truth, and a CLI.
"""

from .data_model import (
    CategoricalTerm,
    DesignMatrix,
    DummySpec,
    MacroSeries,
    MicroDataset,
    ModelSpec,
    SummaryTable,
    encode_design_matrix,
    load_macro_csv,
    load_micro_csv,
    summarize,
    write_macro_csv,
    write_micro_csv,
)
from .diagnostics import (
    AutocorrEstimate,
    TestReport,
    breusch_pagan,
    difference,
    durbin_alternative,
    durbin_rho,
    first_order_autocorr,
    linear_detrend,
    time_trend_test,
)
from .errors import (
    ConvergenceError,
    DataError,
    EstimationError,
    HappymetricsError,
    SeparationError,
    SpecError,
)
from .estimators import (
    OlsResult,
    OrderedProbitResult,
    normal_cdf,
    ols_fit,
    ordered_probit_fit,
    t_distribution_sf,
)
from .pipeline import (
    Decomposition,
    EffectReport,
    PipelineOutputs,
    StageTwoFit,
    YearlyHappinessSeries,
    YearlyValue,
    default_micro_spec,
    intercept_identity_check,
    load_model_spec,
    percent_effect,
    pooled_micro_fit,
    run_pipeline,
    stage_one,
    stage_two,
    unemployment_net_effect,
)
from .synth import (
    MacroDGP,
    MicroDGP,
    SyntheticMicro,
    default_macro_dgp,
    default_micro_dgp,
    generate_macro,
    generate_micro,
)

__version__ = "0.1.0"
