"""Neurochaos learning for node classification on graph CSV exports.

Pipeline: min-max normalization, GLS chaotic feature extraction (four
statistics per input dimension), optional mean neighbor aggregation, and
a cosine-similarity class-prototype classifier, with a staged grid search
and stratified cross-validation for parameter selection.
"""

from .chaos import (
    ChaosFeatures,
    ChaosFex,
    GlsParams,
    N_FEATURES_PER_INPUT,
    NeuralTrace,
    generate_trace,
    gls_step,
    trace_features,
    transform_matrix,
)
from .classifier import (
    ChaosNetClassifier,
    MinMaxNormalizer,
    MissingClassError,
    NeurochaosClassifier,
    cosine_similarity_matrix,
    load_model,
    save_model,
)
from .evaluation import (
    EvalResult,
    ParamGrid,
    SplitPlan,
    StagedSearchConfig,
    StratificationError,
    SweepRecord,
    evaluate_pipeline,
    grid_search,
    kfold_indices,
    macro_f1,
    per_class_f1,
    read_sweep_csv,
    staged_search,
    stratified_split,
    write_sweep_csv,
)
from .graph import (
    GraphDataset,
    GraphFormatError,
    HomophilyReport,
    LoadingStrategy,
    ReferentialIntegrityError,
    assemble_inputs,
    homophily,
    load_graph,
    mean_aggregate,
    save_graph,
)

__version__ = "0.1.0"
