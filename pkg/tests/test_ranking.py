import math
import random

import pytest

from lscd.change import ChangeScore
from lscd.errors import LscdError, ThresholdError
from lscd.ranking import (
    RankRun,
    aggregate_ranks,
    rank_one_run,
    split_by_rank_gap,
    variant_stability_report,
)


def scores_of(distances):
    return [ChangeScore(w, 1.0 - d, d) for w, d in distances.items()]


class TestRankOneRun:
    def test_sorting_example(self):
        ranks = rank_one_run(scores_of({"a": 0.9, "b": 0.1, "c": 0.5}))
        assert ranks == {"a": 1, "c": 2, "b": 3}

    def test_tie_breaks_lexicographically(self):
        assert rank_one_run(scores_of({"b": 0.5, "a": 0.5})) == {"a": 1, "b": 2}

    def test_single_target(self):
        assert rank_one_run(scores_of({"solo": 0.2})) == {"solo": 1}

    def test_empty_rejected(self):
        with pytest.raises(LscdError):
            rank_one_run([])

    def test_always_a_permutation(self):
        rng = random.Random(0)
        for _ in range(200):
            n = rng.randint(1, 15)
            distances = {f"w{i}": round(rng.random(), 2) for i in range(n)}
            ranks = rank_one_run(scores_of(distances))
            assert sorted(ranks.values()) == list(range(1, n + 1))


class TestAggregate:
    def test_two_runs_one_pair(self):
        runs = [RankRun("p0", 0, {"a": 1, "b": 2}), RankRun("p0", 1, {"a": 2, "b": 1})]
        summaries = {s.word: s for s in aggregate_ranks(runs)}
        assert summaries["a"].composite_rank == 1.5
        assert summaries["b"].composite_rank == 1.5
        assert summaries["a"].mean_rank_per_pair == {"p0": 1.5}

    def test_worked_sem_example(self):
        # per-pair means 3 and 5 for word w: composite 4,
        # sem = population std {3,5} / sqrt(2) = 1/sqrt(2)
        base = {"a": 1, "b": 2, "w": 3, "c": 4, "d": 5}
        swapped = {"a": 1, "b": 2, "c": 3, "d": 4, "w": 5}
        runs = [
            RankRun("p0", 0, dict(base)), RankRun("p0", 1, dict(base)),
            RankRun("p1", 0, dict(swapped)), RankRun("p1", 1, dict(swapped)),
        ]
        summary = {s.word: s for s in aggregate_ranks(runs)}["w"]
        assert summary.mean_rank_per_pair == {"p0": 3.0, "p1": 5.0}
        assert summary.composite_rank == 4.0
        assert abs(summary.sem - 1.0 / math.sqrt(2.0)) < 1e-12

    def test_identical_runs_have_zero_spread(self):
        ranks = {"a": 1, "b": 2, "c": 3}
        runs = [RankRun("p0", i, dict(ranks)) for i in range(4)]
        for s in aggregate_ranks(runs):
            assert s.sem == 0.0
            assert s.std_per_pair["p0"] == 0.0

    def test_single_pair_equals_its_own_statistics(self):
        runs = [RankRun("p0", 0, {"a": 1, "b": 2}), RankRun("p0", 1, {"a": 1, "b": 2})]
        for s in aggregate_ranks(runs):
            assert s.composite_rank == s.mean_rank_per_pair["p0"]

    def test_inconsistent_target_sets_rejected(self):
        runs = [RankRun("p0", 0, {"a": 1}), RankRun("p0", 1, {"b": 1})]
        with pytest.raises(LscdError):
            aggregate_ranks(runs)

    def test_fuzzed_invariants(self):
        rng = random.Random(1)
        for _ in range(300):
            n = rng.randint(2, 10)
            n_pairs = rng.randint(1, 4)
            words = [f"w{i}" for i in range(n)]
            runs = []
            for p in range(n_pairs):
                for r in range(rng.randint(1, 4)):
                    perm = list(range(1, n + 1))
                    rng.shuffle(perm)
                    runs.append(RankRun(f"p{p}", r, dict(zip(words, perm))))
            summaries = aggregate_ranks(runs)
            # mean composite over words is (n+1)/2: every run is a permutation
            mean_composite = sum(s.composite_rank for s in summaries) / n
            assert abs(mean_composite - (n + 1) / 2.0) < 1e-9
            for s in summaries:
                for pid, val in s.mean_rank_per_pair.items():
                    assert 1.0 <= val <= n
                pair_means = [s.mean_rank_per_pair[p] for p in sorted(s.mean_rank_per_pair)]
                pstd = math.sqrt(sum((v - sum(pair_means) / len(pair_means)) ** 2 for v in pair_means) / len(pair_means))
                assert abs(s.sem - pstd / math.sqrt(len(pair_means))) < 1e-12
            # supply order must not matter
            shuffled = list(runs)
            rng.shuffle(shuffled)
            again = aggregate_ranks(shuffled)
            assert [(s.word, s.composite_rank) for s in summaries] == \
                   [(s.word, s.composite_rank) for s in again]


def summaries_with(composites, sems=None):
    runs = []
    sems = sems or {}
    from lscd.ranking import RankSummary
    return [RankSummary(w, {"p0": c}, {"p0": 0.0}, c, sems.get(w, 0.0))
            for w, c in composites.items()]


class TestSplitByRankGap:
    def test_concordant_gap(self):
        summaries = summaries_with({"a": 1.0, "b": 1.2, "c": 7.8, "d": 8.0})
        distances = {"a": 0.9, "b": 0.8, "c": 0.2, "d": 0.1}
        decisions, warning = split_by_rank_gap(summaries, distances)
        assert warning is None
        assert {d.word for d in decisions if d.changed} == {"a", "b"}

    def test_competing_gaps_prefer_rank_and_warn(self):
        summaries = summaries_with({"a": 1.0, "b": 1.2, "c": 7.8, "d": 8.0})
        distances = {"a": 0.9, "b": 0.5, "c": 0.45, "d": 0.1}  # biggest distance drop after "a"
        decisions, warning = split_by_rank_gap(summaries, distances)
        assert warning is not None and "competing" in warning
        assert {d.word for d in decisions if d.changed} == {"a", "b"}

    def test_two_targets_degenerate(self):
        summaries = summaries_with({"a": 1.0, "b": 2.0})
        decisions, _ = split_by_rank_gap(summaries, {"a": 0.8, "b": 0.2})
        assert [d.word for d in decisions if d.changed] == ["a"]

    def test_needs_two(self):
        with pytest.raises(ThresholdError):
            split_by_rank_gap(summaries_with({"a": 1.0}), {"a": 0.5})

    def test_decision_metadata(self):
        summaries = summaries_with({"a": 1.0, "b": 5.0})
        decisions, _ = split_by_rank_gap(summaries, {"a": 0.8, "b": 0.2})
        for d in decisions:
            assert d.strategy == "rank_gap"
            assert d.changed == (dict(a=1.0, b=5.0)[d.word] < d.threshold_used)


class TestStabilityReport:
    def test_single_run_zero_std(self):
        runs = {("lemma", 100): [RankRun("lemma:d100", 0, {"a": 1, "b": 2})]}
        assert variant_stability_report(runs) == [("lemma", 100, 0.0)]

    def test_identical_runs_zero_std(self):
        ranks = {"a": 1, "b": 2}
        runs = {("form", 50): [RankRun("form:d50", i, dict(ranks)) for i in range(3)]}
        assert variant_stability_report(runs) == [("form", 50, 0.0)]

    def test_mixed_runs_positive_std(self):
        runs = {("lemma", 10): [
            RankRun("lemma:d10", 0, {"a": 1, "b": 2}),
            RankRun("lemma:d10", 1, {"a": 2, "b": 1}),
        ]}
        rows = variant_stability_report(runs)
        assert rows == [("lemma", 10, 0.5)]

    def test_rows_sorted_by_variant_then_dim(self):
        run = RankRun("x", 0, {"a": 1})
        runs = {("lemma", 20): [run], ("form", 10): [run], ("form", 5): [run]}
        rows = variant_stability_report(runs)
        assert [(v, d) for v, d, _ in rows] == [("form", 5), ("form", 10), ("lemma", 20)]
