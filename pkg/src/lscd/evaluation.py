"""Gold-label scoring and synthetic-change construction.

Real change corpora cannot ship with the artifact, so end-to-end behaviour is
validated with donor substitution: a fraction of one word's occurrences in
the later corpus is rewritten as the pseudo-target, which grafts the donor's
contexts onto the target as an artificial second sense. Designated stable
words keep their distribution and should score near zero distance.
"""

from __future__ import annotations

import math
import random
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .corpus import TokenSequence
from .errors import EvaluationError, PlanError
from .textio import read_tsv, write_tsv

GoldLabels = dict[str, bool]

_TOPIC_WORD = re.compile(r"^(t\d+)w\d+$")


@dataclass
class InjectionPlan:
    pseudo_targets: list[tuple[str, str, float]]  # (target, donor, replacement fraction)
    stable_words: list[str]

    def __post_init__(self):
        names = [t for t, _, _ in self.pseudo_targets]
        names += [d for _, d, _ in self.pseudo_targets]
        names += list(self.stable_words)
        if len(set(names)) != len(names):
            raise PlanError("plan words must be pairwise distinct across targets, donors, and stable words")
        for target, donor, fraction in self.pseudo_targets:
            if not 0.0 < fraction <= 1.0:
                raise PlanError(f"replacement fraction for {target!r} must be in (0, 1], got {fraction}")

    def targets(self) -> list[str]:
        return [t for t, _, _ in self.pseudo_targets] + list(self.stable_words)

    def gold(self) -> GoldLabels:
        gold: GoldLabels = {t: True for t, _, _ in self.pseudo_targets}
        gold.update({w: False for w in self.stable_words})
        return gold


def accuracy(pred: Mapping[str, bool], gold: GoldLabels) -> float:
    if not gold:
        raise EvaluationError("gold label set is empty")
    correct = 0
    for word, label in gold.items():
        if word not in pred:
            raise EvaluationError(f"no prediction for gold word {word!r}")
        correct += pred[word] == label
    return correct / len(gold)


def inject_changes(later_corpus: Iterable[TokenSequence], plan: InjectionPlan,
                   seed: int = 0) -> tuple[list[TokenSequence], GoldLabels]:
    """Rewrite a seeded Bernoulli fraction of each donor's occurrences.

    Samples containing no donor are passed through untouched (the same list
    object), so everything outside the injection sites stays byte-identical.
    """
    samples = later_corpus if isinstance(later_corpus, list) else [list(s) for s in later_corpus]
    donor_of = {donor: (target, fraction) for target, donor, fraction in plan.pseudo_targets}
    target_set = {target for target, _, _ in plan.pseudo_targets}

    counts: Counter[str] = Counter()
    for sample in samples:
        for token in sample:
            if token in donor_of or token in target_set:
                counts[token] += 1
    for target, donor, fraction in plan.pseudo_targets:
        if counts[donor] == 0:
            raise PlanError(f"donor {donor!r} does not occur in the later corpus")
        if counts[donor] < counts[target] * fraction:
            raise PlanError(
                f"donor {donor!r} occurs {counts[donor]} times, fewer than "
                f"target {target!r} frequency x fraction ({counts[target]} x {fraction})"
            )

    rng = random.Random(seed)
    out: list[TokenSequence] = []
    for sample in samples:
        if any(token in donor_of for token in sample):
            rewritten = []
            for token in sample:
                hit = donor_of.get(token)
                if hit is not None and rng.random() < hit[1]:
                    rewritten.append(hit[0])
                else:
                    rewritten.append(token)
            out.append(rewritten)
        else:
            out.append(sample)
    return out, plan.gold()


def random_baseline(targets: Iterable[str], seed: int = 0) -> dict[str, bool]:
    rng = random.Random(seed)
    return {word: rng.random() < 0.5 for word in targets}


def load_gold(path) -> GoldLabels:
    gold: GoldLabels = {}
    for row in read_tsv(path):
        if len(row) < 2:
            raise EvaluationError(f"gold row {row!r} needs word<TAB>label")
        if row[1] not in ("0", "1"):
            raise EvaluationError(f"gold label for {row[0]!r} must be 0 or 1, got {row[1]!r}")
        gold[row[0]] = row[1] == "1"
    return gold


def save_gold(gold: GoldLabels, path) -> None:
    write_tsv(path, [(w, int(v)) for w, v in gold.items()])


def load_plan(path) -> InjectionPlan:
    """Plan TSV: "pseudo<TAB>target<TAB>donor<TAB>fraction" or "stable<TAB>word" rows."""
    pseudo: list[tuple[str, str, float]] = []
    stable: list[str] = []
    for row in read_tsv(path):
        kind = row[0]
        if kind == "pseudo" and len(row) == 4:
            pseudo.append((row[1], row[2], float(row[3])))
        elif kind == "stable" and len(row) == 2:
            stable.append(row[1])
        else:
            raise PlanError(f"bad plan row {row!r}")
    return InjectionPlan(pseudo, stable)


def save_plan(plan: InjectionPlan, path) -> None:
    rows: list[tuple] = [("pseudo", t, d, f) for t, d, f in plan.pseudo_targets]
    rows += [("stable", w) for w in plan.stable_words]
    write_tsv(path, rows)


def synthesize_corpus(n_tokens: int, seed: int = 0, n_topics: int = 20,
                      topic_vocab: int = 400, shared_vocab: int = 200,
                      sentence_len: tuple[int, int] = (8, 20),
                      shared_rate: float = 0.35) -> list[TokenSequence]:
    """Generate a topic-structured corpus with Zipfian word frequencies.

    Each sentence draws from one topic's vocabulary mixed with a shared
    function-word pool, so words acquire topic-specific co-occurrence
    statistics; that is the structure the detection pipeline feeds on. A
    public-domain text can substitute for this wherever one is available.
    """
    rng = np.random.default_rng(seed)
    shared = [f"w{j}" for j in range(shared_vocab)]
    topics = [[f"t{k}w{j}" for j in range(topic_vocab)] for k in range(n_topics)]
    shared_cum = np.cumsum(1.0 / np.arange(1, shared_vocab + 1))
    shared_cum /= shared_cum[-1]
    topic_cum = np.cumsum(1.0 / np.arange(1, topic_vocab + 1) ** 1.1)
    topic_cum /= topic_cum[-1]

    corpus: list[TokenSequence] = []
    produced = 0
    while produced < n_tokens:
        words = topics[int(rng.integers(n_topics))]
        length = int(rng.integers(sentence_len[0], sentence_len[1] + 1))
        from_shared = rng.random(length) < shared_rate
        draws = rng.random(length)
        shared_idx = np.searchsorted(shared_cum, draws, side="right")
        topic_idx = np.searchsorted(topic_cum, draws, side="right")
        corpus.append([
            shared[shared_idx[i]] if from_shared[i] else words[topic_idx[i]]
            for i in range(length)
        ])
        produced += length
    return corpus


def default_plan(corpus: list[TokenSequence], n_changed: int = 5, n_stable: int = 5,
                 fraction: float = 0.75, min_count: int = 100) -> InjectionPlan:
    """Assemble a plan from a corpus's own frequent words.

    When the corpus carries topic markers (synthesize_corpus output), one
    representative word is taken per topic so each target's donor comes from
    a different topic; otherwise words are taken in plain frequency order.
    """
    freq: Counter[str] = Counter()
    for sample in corpus:
        freq.update(sample)
    frequent = [w for w, c in sorted(freq.items(), key=lambda kv: (-kv[1], kv[0])) if c >= min_count]
    needed = 2 * n_changed + n_stable

    groups: dict[str, str] = {}
    for word in frequent:
        m = _TOPIC_WORD.match(word)
        if m and m.group(1) not in groups:
            groups[m.group(1)] = word
    if len(groups) >= needed:
        picks = [groups[key] for key in sorted(groups, key=lambda k: int(k[1:]))[:needed]]
    elif len(frequent) >= needed:
        picks = frequent[:needed]
    else:
        raise PlanError(
            f"corpus has only {len(frequent)} words with count >= {min_count}; need {needed}"
        )
    pairs = []
    for a, b in zip(picks[:n_changed], picks[n_changed:2 * n_changed]):
        # the more frequent word donates, so donor count >= target count * fraction
        target, donor = (a, b) if freq[b] >= freq[a] else (b, a)
        pairs.append((target, donor, fraction))
    stable = picks[2 * n_changed:needed]
    return InjectionPlan(pairs, stable)


def mean_baseline_accuracy(targets: list[str], gold: GoldLabels, n_seeds: int = 1000,
                           first_seed: int = 0) -> float:
    total = 0.0
    for seed in range(first_seed, first_seed + n_seeds):
        total += accuracy(random_baseline(targets, seed), gold)
    return total / n_seeds


def binomial_bound(n: int, p: float, z: float = 3.0) -> tuple[float, float]:
    """z-sigma interval around the expected count of a Binomial(n, p)."""
    mean = n * p
    sigma = math.sqrt(n * p * (1.0 - p))
    return mean - z * sigma, mean + z * sigma
