"""Per-target change scores and binary decisions.

The continuous change score for a target is the cosine DISTANCE between its
vector in the aligned earlier space and its vector in the later space; a word
whose distance exceeds the threshold is labelled changed (strict inequality,
ties count as unchanged).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ScoringError, ThresholdError
from .sgns import EmbeddingSpace

STRATEGY_MEAN = "mean"
STRATEGY_LARGEST_GAP = "largest_gap"
STRATEGY_FIXED = "fixed"
STRATEGY_RANK_GAP = "rank_gap"


@dataclass
class ChangeScore:
    word: str
    similarity: float
    distance: float

    @classmethod
    def from_similarity(cls, word: str, similarity: float) -> "ChangeScore":
        return cls(word, similarity, 1.0 - similarity)


@dataclass
class BinaryDecision:
    word: str
    changed: bool
    threshold_used: float
    strategy: str


def cosine_similarity(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ScoringError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ScoringError("cosine similarity undefined for a zero vector (untrained or missing word?)")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def score_targets(aligned_src: EmbeddingSpace, tgt: EmbeddingSpace,
                  targets: Iterable[str]) -> tuple[list[ChangeScore], list[tuple[str, str]]]:
    """Score every target present in both vocabularies.

    Returns (scores, missing) where missing lists (word, side) for targets
    absent from the source, target, or both vocabularies.
    """
    scores: list[ChangeScore] = []
    missing: list[tuple[str, str]] = []
    for word in targets:
        in_src = word in aligned_src.vocab
        in_tgt = word in tgt.vocab
        if in_src and in_tgt:
            sim = cosine_similarity(aligned_src.vector(word), tgt.vector(word))
            scores.append(ChangeScore.from_similarity(word, sim))
        elif in_tgt:
            missing.append((word, "source"))
        elif in_src:
            missing.append((word, "target"))
        else:
            missing.append((word, "both"))
    return scores, missing


def mean_threshold(scores: Sequence[ChangeScore]) -> float:
    if not scores:
        raise ThresholdError("mean threshold needs at least one score")
    return sum(s.distance for s in scores) / len(scores)


def largest_gap_threshold(scores: Sequence[ChangeScore]) -> float:
    """Midpoint of the widest gap between sorted distances.

    Equal-width gaps resolve toward the one with the larger lower endpoint,
    which pushes fewer words into "changed".
    """
    if len(scores) < 2:
        raise ThresholdError("largest-gap threshold needs at least two scores")
    values = sorted(s.distance for s in scores)
    best_gap = 0.0
    best = None
    for low, high in zip(values, values[1:]):
        gap = high - low
        if gap >= best_gap and gap > 0.0:
            best_gap = gap
            best = (low, high)
    if best is None:
        raise ThresholdError("all distances are equal; no gap exists")
    return (best[0] + best[1]) / 2.0


def classify_binary(scores: Sequence[ChangeScore], strategy: str,
                    fixed_t: float | None = None) -> list[BinaryDecision]:
    if strategy == STRATEGY_MEAN:
        threshold = mean_threshold(scores)
    elif strategy == STRATEGY_LARGEST_GAP:
        threshold = largest_gap_threshold(scores)
    elif strategy == STRATEGY_FIXED:
        if fixed_t is None:
            raise ThresholdError("strategy 'fixed' requires fixed_t")
        threshold = float(fixed_t)
    else:
        raise ThresholdError(f"unknown strategy {strategy!r}")
    return [
        BinaryDecision(s.word, s.distance > threshold, threshold, strategy)
        for s in scores
    ]
