"""Lexical semantic change detection from time-sliced corpora.

Train one skip-gram space per corpus slice, align the spaces with an
orthogonal (Procrustes) or CCA linear map, and classify target words as
changed/unchanged from their cosine distances via threshold or
rank-aggregation strategies.
"""

from .align import (
    SeedDictionary,
    Transform,
    apply_transform,
    build_seed_dictionary,
    fit_cca,
    fit_orthogonal,
)
from .change import (
    BinaryDecision,
    ChangeScore,
    classify_binary,
    cosine_similarity,
    largest_gap_threshold,
    mean_threshold,
    score_targets,
)
from .corpus import CorpusReader, TokenRecord, Variant, Vocabulary, build_vocab, parse_corpus
from .errors import LscdError
from .evaluation import InjectionPlan, accuracy, inject_changes, random_baseline
from .ranking import RankRun, RankSummary, aggregate_ranks, rank_one_run, split_by_rank_gap
from .sgns import EmbeddingSpace, SgnsConfig, load_embeddings, save_embeddings, train_sgns

__version__ = "0.1.0"

__all__ = [
    "BinaryDecision",
    "ChangeScore",
    "CorpusReader",
    "EmbeddingSpace",
    "InjectionPlan",
    "LscdError",
    "RankRun",
    "RankSummary",
    "SeedDictionary",
    "SgnsConfig",
    "TokenRecord",
    "Transform",
    "Variant",
    "Vocabulary",
    "accuracy",
    "aggregate_ranks",
    "apply_transform",
    "build_seed_dictionary",
    "build_vocab",
    "classify_binary",
    "cosine_similarity",
    "fit_cca",
    "fit_orthogonal",
    "inject_changes",
    "largest_gap_threshold",
    "load_embeddings",
    "mean_threshold",
    "parse_corpus",
    "random_baseline",
    "rank_one_run",
    "save_embeddings",
    "score_targets",
    "split_by_rank_gap",
    "train_sgns",
]
