"""Repeated-runs ranking: per-run rank orders, per-pair statistics, and the
cross-pair composite rank with its standard error.

One "embedding pair" is an (earlier, later) space combination, identified by
pair_id; re-training with fresh seeds gives several runs per pair. Rank 1 is
the most-changed target (largest cosine distance). The standard error of a
composite rank divides by the square root of the number of embedding pairs,
not the total number of runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .change import STRATEGY_RANK_GAP, BinaryDecision, ChangeScore
from .errors import LscdError, ThresholdError


@dataclass
class RankRun:
    pair_id: str
    run_id: int
    ranks: dict[str, int]


@dataclass
class RankSummary:
    word: str
    mean_rank_per_pair: dict[str, float]
    std_per_pair: dict[str, float]
    composite_rank: float
    sem: float


def rank_one_run(scores: Sequence[ChangeScore]) -> dict[str, int]:
    """Assign ranks 1..n by descending distance; exact ties break lexicographically."""
    if not scores:
        raise LscdError("cannot rank an empty score list")
    ordered = sorted(scores, key=lambda s: (-s.distance, s.word))
    return {s.word: i + 1 for i, s in enumerate(ordered)}


def _pstdev(values: Sequence[float]) -> float:
    mean = sum(values) / len(values)
    return math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))


def aggregate_ranks(runs: Sequence[RankRun]) -> list[RankSummary]:
    """Reduce runs to per-pair means/stds and the cross-pair composite."""
    if not runs:
        raise LscdError("no runs to aggregate")
    words = set(runs[0].ranks)
    for run in runs:
        if set(run.ranks) != words:
            raise LscdError(
                f"run {run.pair_id}/{run.run_id} covers a different target set"
            )
    by_pair: dict[str, list[RankRun]] = {}
    for run in runs:
        by_pair.setdefault(run.pair_id, []).append(run)
    pair_ids = sorted(by_pair)

    summaries = []
    for word in sorted(words):
        means: dict[str, float] = {}
        stds: dict[str, float] = {}
        for pid in pair_ids:
            ranks = [run.ranks[word] for run in by_pair[pid]]
            means[pid] = sum(ranks) / len(ranks)
            stds[pid] = _pstdev(ranks)
        pair_means = [means[pid] for pid in pair_ids]
        composite = sum(pair_means) / len(pair_means)
        sem = _pstdev(pair_means) / math.sqrt(len(pair_means))
        summaries.append(RankSummary(word, means, stds, composite, sem))
    return summaries


def split_by_rank_gap(summaries: Sequence[RankSummary],
                      distance_estimates: Mapping[str, float]) -> tuple[list[BinaryDecision], str | None]:
    """Split targets at the largest composite-rank gap.

    The largest gap in the distance estimates (walked in the same rank order)
    is computed as well; when the two gaps disagree about the split point the
    rank gap wins and a warning naming both candidates is returned.
    """
    if len(summaries) < 2:
        raise ThresholdError("rank-gap split needs at least two summaries")
    ordered = sorted(summaries, key=lambda s: (s.composite_rank, s.word))
    rank_gaps = [b.composite_rank - a.composite_rank for a, b in zip(ordered, ordered[1:])]
    dist_gaps = [
        distance_estimates[a.word] - distance_estimates[b.word]
        for a, b in zip(ordered, ordered[1:])
    ]
    rank_split = max(range(len(rank_gaps)), key=lambda i: (rank_gaps[i], -i))
    dist_split = max(range(len(dist_gaps)), key=lambda i: (dist_gaps[i], -i))
    warning = None
    if dist_split != rank_split:
        warning = (
            f"competing gaps: rank gap splits after position {rank_split + 1} "
            f"({ordered[rank_split].word}), distance gap after position {dist_split + 1} "
            f"({ordered[dist_split].word}); using the rank gap"
        )
    cut = ordered[rank_split].composite_rank + rank_gaps[rank_split] / 2.0
    decisions = [
        BinaryDecision(s.word, s.composite_rank < cut, cut, STRATEGY_RANK_GAP)
        for s in ordered
    ]
    return decisions, warning


def variant_stability_report(grouped_runs: Mapping[tuple[str, int], Sequence[RankRun]]) -> list[tuple[str, int, float]]:
    """Rows of (variant, embedding_dim, mean over targets of per-target rank std).

    Keys of *grouped_runs* are (variant, dim); the std for each target is
    taken over all runs in that group.
    """
    rows = []
    for (variant, dim) in sorted(grouped_runs):
        runs = grouped_runs[(variant, dim)]
        if not runs:
            continue
        words = sorted(runs[0].ranks)
        stds = [_pstdev([run.ranks[w] for run in runs]) for w in words]
        rows.append((variant, dim, sum(stds) / len(stds)))
    return rows
