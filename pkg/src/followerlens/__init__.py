"""followerlens: estimate untampered follower counts from behavioral neighbors.

The pipeline: ingest user traces (model), embed each user as an 18-dimension
behavioral vector (features), rank a random reference population by distance
and predict the follower count from the fence-filtered neighborhood
(neighborhood), flag users whose displayed count deviates from the estimate
(detection), cluster unfollow time series to isolate aggressive customers
(clustering), and generate labeled synthetic corpora for evaluation (synth).
"""

from .model import (
    Corpus,
    FollowerRecord,
    LoadResult,
    Rejection,
    TweetRecord,
    UserSnapshot,
    UserTrace,
    load_corpus,
    save_corpus,
)
from .features import (
    FEATURE_NAMES,
    FeatureVector,
    NormalizationModel,
    featurize,
    fit_normalizer,
    gain_per_day,
    normalize,
    overlap,
    spike_score,
    unfollow_entropy,
)
from .neighborhood import (
    BACKENDS,
    NeighborEntry,
    NeighborIndex,
    NeighborSet,
    Prediction,
    PredictionRecord,
    build_index,
    predict_followers,
    predict_for_user,
    query_neighbors,
)
from .clustering import (
    ClusterAssignment,
    UnfollowSeries,
    select_aggressive,
    spectral_cluster,
    unfollow_series,
)
from .detection import (
    DetectionReport,
    PrecisionRecall,
    ToleranceScore,
    bucket_for_count,
    detect,
    evaluate_accuracy,
    precision_recall,
    sweep_error_rates,
    tolerance_score,
)
from .synth import GeneratorConfig, generate, inject_manipulation
from .errors import (
    CorpusConflictError,
    CorpusLoadError,
    FollowerLensError,
    InsufficientDataError,
    MissingLabelError,
    NoNeighborsError,
    RecordInvalidError,
    ShapeMismatchError,
)

__version__ = "0.1.0"

__all__ = [
    "BACKENDS",
    "ClusterAssignment",
    "Corpus",
    "CorpusConflictError",
    "CorpusLoadError",
    "DetectionReport",
    "FEATURE_NAMES",
    "FeatureVector",
    "FollowerLensError",
    "FollowerRecord",
    "GeneratorConfig",
    "InsufficientDataError",
    "LoadResult",
    "MissingLabelError",
    "NeighborEntry",
    "NeighborIndex",
    "NeighborSet",
    "NoNeighborsError",
    "NormalizationModel",
    "PrecisionRecall",
    "Prediction",
    "PredictionRecord",
    "RecordInvalidError",
    "Rejection",
    "ShapeMismatchError",
    "ToleranceScore",
    "TweetRecord",
    "UnfollowSeries",
    "UserSnapshot",
    "UserTrace",
    "bucket_for_count",
    "build_index",
    "detect",
    "evaluate_accuracy",
    "featurize",
    "fit_normalizer",
    "gain_per_day",
    "generate",
    "inject_manipulation",
    "load_corpus",
    "normalize",
    "overlap",
    "precision_recall",
    "predict_followers",
    "predict_for_user",
    "query_neighbors",
    "save_corpus",
    "select_aggressive",
    "spectral_cluster",
    "spike_score",
    "sweep_error_rates",
    "tolerance_score",
    "unfollow_entropy",
    "unfollow_series",
]
