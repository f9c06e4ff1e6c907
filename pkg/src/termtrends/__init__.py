"""termtrends: diachronic word-embedding training, validation, and querying.

Pipeline: ingest timestamped corpora -> sliding year windows -> per-window
vocabularies -> embedding training with per-epoch snapshots -> keyword test
suite scoring and best-epoch selection -> similarity / analogy / rank-trend
queries with CSV reports and rendered figures.
"""

__version__ = "0.1.0"

from .cooccur import CooccurrenceTable, build_cooccurrence
from .corpus import (
    Document,
    Observation,
    TokenizerConfig,
    ingest_book,
    ingest_documents,
    load_stopwords,
    read_observations,
    tokenize,
    write_observations,
)
from .errors import (
    DataError,
    DegenerateQueryError,
    NoScorableCasesError,
    NumericalError,
    OutOfVocabularyError,
    TermTrendsError,
    UsageError,
)
from .evaluate import (
    CaseResult,
    Combination,
    EpochScore,
    Keyword,
    SuiteResult,
    expand_keyword,
    read_keywords,
    score_case,
    score_suite,
    select_best_epoch,
)
from .models import EmbeddingModel, load_model, save_model
from .pipeline import RunConfig, RunManifest, run_pipeline
from .query import QueryExpression, RankedNeighbor, compose, parse_expression, prefix_min_rank, rank_of, top_k
from .training import SnapshotWriter, TrainerConfig, train
from .trends import TrendPoint, TrendSeries, export_trend_csv, load_selected_models, trend
from .windows import TimeWindow, Vocabulary, build_vocabulary, build_windows

__all__ = [
    "__version__",
    "CaseResult",
    "Combination",
    "CooccurrenceTable",
    "DataError",
    "DegenerateQueryError",
    "Document",
    "EmbeddingModel",
    "EpochScore",
    "Keyword",
    "NoScorableCasesError",
    "NumericalError",
    "Observation",
    "OutOfVocabularyError",
    "QueryExpression",
    "RankedNeighbor",
    "RunConfig",
    "RunManifest",
    "SnapshotWriter",
    "SuiteResult",
    "TermTrendsError",
    "TimeWindow",
    "TokenizerConfig",
    "TrainerConfig",
    "TrendPoint",
    "TrendSeries",
    "UsageError",
    "Vocabulary",
    "build_cooccurrence",
    "build_vocabulary",
    "build_windows",
    "compose",
    "expand_keyword",
    "export_trend_csv",
    "ingest_book",
    "ingest_documents",
    "load_model",
    "load_selected_models",
    "load_stopwords",
    "parse_expression",
    "prefix_min_rank",
    "rank_of",
    "read_keywords",
    "read_observations",
    "run_pipeline",
    "save_model",
    "score_case",
    "score_suite",
    "select_best_epoch",
    "tokenize",
    "top_k",
    "train",
    "trend",
    "write_observations",
]
