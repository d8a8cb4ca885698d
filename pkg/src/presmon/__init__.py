"""presmon: cost-aware alarming on top of outcome predictions for running cases.

The package turns an outcome classifier over event-log prefixes into a
decision system: a parameterized cost model prices interventions, undesired
outcomes and false alarms; an empirically tuned likelihood threshold decides
when to raise the one-per-case alarm; reports quantify cost, benefit and
return on investment against fixed baselines.
"""

from .alarm import (
    AlarmPolicy,
    CaseCostRecord,
    ConstantCosts,
    CostReport,
    PartitionCounts,
    alarm_index,
    case_cost,
    log_cost,
    log_cost_from_scores,
    roi_feasible,
)
from .cost_model import (
    AttributeProportional,
    Constant,
    CostModel,
    CostSpec,
    ExponentialTimeGrowth,
    LinearPrefixDecay,
    LinearPrefixGrowth,
    PrefixRemainderRatio,
    compile_cost_model,
    constant_cost_spec,
    cost_spec_from_config,
    cost_spec_to_config,
    scenario_preset,
)
from .encoding import EncodingSchema, PrefixEncoder, encode, fit_schema
from .estimator import (
    Hyperparams,
    OutcomeEstimator,
    make_training_set,
    tune_hyperparams,
)
from .eventlog import (
    Event,
    EventLog,
    LogSchema,
    Prefix,
    RareCategoryFolder,
    SplitLogs,
    Trace,
    cut_trivially_known,
    decision_prefixes,
    fold_rare_categories,
    impute_missing,
    parse_log,
    prefix,
    temporal_split,
    truncate_log,
)
from .gbt import GradientBoostedTreesClassifier, LogisticRegressionClassifier
from .pipeline import ExperimentConfig, PipelineArtifacts, load_config, run_pipeline
from .sweep import run_sweep
from .synthetic import SyntheticSpec, generate_synthetic
from .thresholding import (
    ThresholdSearchResult,
    find_global_threshold,
    find_per_length_thresholds,
    score_log,
)

__version__ = "0.1.0"
