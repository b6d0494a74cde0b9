"""Skip-gram with negative sampling, trained from scratch.

The trainer follows the canonical word2vec recipe: input vectors initialised
uniformly in (-0.5/dim, +0.5/dim), output vectors at zero, negatives drawn
from the unigram distribution raised to 0.75, per-center window width drawn
uniformly from 1..window, exact sigmoid (no lookup table), and a linear
learning-rate decay down to initial_lr * 1e-4. Context pairs never cross
sample boundaries.

The hot loop is JIT-compiled with numba and releases the GIL, so multiple
workers can hammer the shared weight matrices word2vec-style (lock-free,
racy by design). One worker with a fixed seed is bit-reproducible.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np
from numba import njit

from .corpus import TokenSequence, Vocabulary, build_vocab
from .errors import ConfigError, EmbeddingFormatError, NumericalError
from .textio import fmt_float

LR_FLOOR_FACTOR = 1e-4
NEGATIVE_POWER = 0.75


@dataclass
class SgnsConfig:
    dim: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    min_count: int = 5
    initial_lr: float = 0.025
    subsample_t: float = 0.0
    seed: int = 1
    workers: int = 1

    def __post_init__(self):
        for name in ("dim", "window", "negatives", "epochs", "min_count", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer, got {getattr(self, name)}")
        if self.initial_lr <= 0:
            raise ConfigError(f"initial_lr must be positive, got {self.initial_lr}")
        if self.subsample_t < 0:
            raise ConfigError(f"subsample_t must be >= 0, got {self.subsample_t}")
        if self.seed < 0:
            raise ConfigError(f"seed must be unsigned, got {self.seed}")


@dataclass
class EmbeddingSpace:
    vocab: Vocabulary
    matrix: np.ndarray
    epoch_losses: list[float] = field(default_factory=list, repr=False)
    epoch_pairs: list[int] = field(default_factory=list, repr=False)
    context_matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.vocab):
            raise NumericalError(
                f"matrix shape {self.matrix.shape} does not match vocabulary size {len(self.vocab)}"
            )
        if not np.all(np.isfinite(self.matrix)):
            raise NumericalError("embedding matrix contains non-finite values")

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def vector(self, word: str) -> np.ndarray:
        return self.matrix[self.vocab.index[word]]


def build_negative_table(counts, power: float = NEGATIVE_POWER, size: int | None = None) -> np.ndarray:
    """Allocate table slots proportional to count**power (largest remainder)."""
    counts = np.asarray(counts, dtype=np.float64)
    if counts.size == 0 or np.any(counts <= 0):
        raise ConfigError("negative-sampling table needs positive counts")
    if size is None:
        size = int(min(10_000_000, max(1_000_000, 50 * counts.size)))
    weights = counts**power
    ideal = weights / weights.sum() * size
    slots = np.floor(ideal).astype(np.int64)
    shortfall = size - int(slots.sum())
    if shortfall > 0:
        order = np.argsort(-(ideal - slots), kind="stable")
        slots[order[:shortfall]] += 1
    return np.repeat(np.arange(counts.size, dtype=np.int32), slots)


@njit(cache=True, nogil=True, fastmath=True)
def _draw_negatives(table, n, seed):
    """Draw n table entries with the same LCG indexing the trainer uses."""
    out = np.empty(n, dtype=np.int32)
    state = np.uint64(seed)
    tsize = np.uint64(table.shape[0])
    for i in range(n):
        state = state * np.uint64(25214903917) + np.uint64(11)
        out[i] = table[np.int64((state >> np.uint64(16)) % tsize)]
    return out


@njit(cache=True, nogil=True, fastmath=True)
def _train_shard(syn0, syn1, flat, offsets, table, window, negatives,
                 initial_lr, subsample_t, keep_prob, epochs, seed,
                 loss_out, pair_out):
    dim = syn0.shape[1]
    tsize = np.uint64(table.shape[0])
    state = np.uint64(seed)
    total_words = np.float64(flat.shape[0]) * np.float64(epochs)
    words_done = np.float64(0.0)
    lr_floor = initial_lr * LR_FLOOR_FACTOR
    neu1e = np.zeros(dim, dtype=np.float32)
    max_len = 0
    for si in range(offsets.shape[0] - 1):
        slen = offsets[si + 1] - offsets[si]
        if slen > max_len:
            max_len = slen
    sent = np.empty(max_len, dtype=np.int32)

    for epoch in range(epochs):
        loss = 0.0
        pairs = np.int64(0)
        for si in range(offsets.shape[0] - 1):
            beg = offsets[si]
            end = offsets[si + 1]
            alpha = initial_lr * (1.0 - words_done / (total_words + 1.0))
            if alpha < lr_floor:
                alpha = lr_floor
            words_done += end - beg

            slen = 0
            if subsample_t > 0.0:
                for pos in range(beg, end):
                    w = flat[pos]
                    if keep_prob[w] < 1.0:
                        state = state * np.uint64(25214903917) + np.uint64(11)
                        r = np.float64(state >> np.uint64(32)) / 4294967296.0
                        if r >= keep_prob[w]:
                            continue
                    sent[slen] = w
                    slen += 1
            else:
                for pos in range(beg, end):
                    sent[slen] = flat[pos]
                    slen += 1

            for pos in range(slen):
                center = sent[pos]
                state = state * np.uint64(25214903917) + np.uint64(11)
                shrink = np.int64((state >> np.uint64(16)) % np.uint64(window))
                reach = window - shrink
                lo = pos - reach
                hi = pos + reach
                if lo < 0:
                    lo = 0
                if hi > slen - 1:
                    hi = slen - 1
                for cpos in range(lo, hi + 1):
                    if cpos == pos:
                        continue
                    ctx = sent[cpos]
                    for k in range(dim):
                        neu1e[k] = 0.0
                    for neg in range(negatives + 1):
                        if neg == 0:
                            tgt = ctx
                            label = 1.0
                        else:
                            state = state * np.uint64(25214903917) + np.uint64(11)
                            tgt = table[np.int64((state >> np.uint64(16)) % tsize)]
                            if tgt == ctx:
                                continue
                            label = 0.0
                        f = np.float32(0.0)
                        for k in range(dim):
                            f += syn0[center, k] * syn1[tgt, k]
                        if f >= 0.0:
                            p = 1.0 / (1.0 + np.exp(-np.float64(f)))
                        else:
                            e = np.exp(np.float64(f))
                            p = e / (1.0 + e)
                        if label > 0.5:
                            q = p
                        else:
                            q = 1.0 - p
                        if q < 1e-10:
                            q = 1e-10
                        loss += -np.log(q)
                        g = np.float32((label - p) * alpha)
                        for k in range(dim):
                            neu1e[k] += g * syn1[tgt, k]
                        for k in range(dim):
                            syn1[tgt, k] += g * syn0[center, k]
                    for k in range(dim):
                        syn0[center, k] += neu1e[k]
                    pairs += 1
        loss_out[epoch] = loss
        pair_out[epoch] = pairs


def _encode(samples: Iterable[TokenSequence], vocab: Vocabulary) -> list[np.ndarray]:
    index = vocab.index
    encoded = []
    for sample in samples:
        ids = [index[w] for w in sample if w in index]
        if ids:
            encoded.append(np.asarray(ids, dtype=np.int32))
    return encoded


def _flatten(sentences: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    offsets = np.zeros(len(sentences) + 1, dtype=np.int64)
    for i, s in enumerate(sentences):
        offsets[i + 1] = offsets[i] + s.shape[0]
    flat = np.empty(offsets[-1], dtype=np.int32)
    for i, s in enumerate(sentences):
        flat[offsets[i]:offsets[i + 1]] = s
    return flat, offsets


def _keep_probabilities(counts, subsample_t: float) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.float64)
    keep = np.ones(counts.size, dtype=np.float64)
    if subsample_t > 0:
        ratio = subsample_t * counts.sum() / counts
        keep = np.minimum(np.sqrt(ratio) + ratio, 1.0)
    return keep


def train_sgns(samples: Iterable[TokenSequence], config: SgnsConfig,
               vocab: Vocabulary | None = None) -> EmbeddingSpace:
    """Train one embedding space. *samples* must be re-iterable.

    A pre-built vocabulary can be passed to skip the counting pass; it must
    have been built with the same min_count.
    """
    if vocab is None:
        vocab = build_vocab(samples, config.min_count)
    if len(vocab) == 0:
        raise ConfigError("no word reaches min_count; nothing to train on")

    sentences = _encode(samples, vocab)
    if not sentences:
        raise ConfigError("corpus is empty after vocabulary filtering")

    table = build_negative_table(vocab.counts)
    keep_prob = _keep_probabilities(vocab.counts, config.subsample_t)

    rng = np.random.default_rng(config.seed)
    syn0 = ((rng.random((len(vocab), config.dim)) - 0.5) / config.dim).astype(np.float32)
    syn1 = np.zeros((len(vocab), config.dim), dtype=np.float32)

    workers = min(config.workers, len(sentences))
    losses = np.zeros((workers, config.epochs), dtype=np.float64)
    counts = np.zeros((workers, config.epochs), dtype=np.int64)

    if workers == 1:
        flat, offsets = _flatten(sentences)
        _train_shard(syn0, syn1, flat, offsets, table, config.window, config.negatives,
                     config.initial_lr, config.subsample_t, keep_prob, config.epochs,
                     np.uint64(config.seed & 0xFFFFFFFFFFFFFFFF) | np.uint64(1),
                     losses[0], counts[0])
    else:
        shards = [_flatten(sentences[w::workers]) for w in range(workers)]
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_train_shard, syn0, syn1, flat, offsets, table,
                            config.window, config.negatives, config.initial_lr,
                            config.subsample_t, keep_prob, config.epochs,
                            np.uint64((config.seed + 7919 * (w + 1)) & 0xFFFFFFFFFFFFFFFF) | np.uint64(1),
                            losses[w], counts[w])
                for w, (flat, offsets) in enumerate(shards)
            ]
            for fut in futures:
                fut.result()

    pair_totals = counts.sum(axis=0)
    epoch_losses = [
        float(losses[:, e].sum() / pair_totals[e]) if pair_totals[e] else 0.0
        for e in range(config.epochs)
    ]
    return EmbeddingSpace(vocab, syn0.astype(np.float64), epoch_losses,
                          epoch_pairs=[int(x) for x in pair_totals],
                          context_matrix=syn1.astype(np.float64))


def save_embeddings(space: EmbeddingSpace, dest) -> None:
    """Write word2vec text format: "<|V|> <dim>" header, one word per line."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            save_embeddings(space, fh)
        return
    dest.write(f"{len(space.vocab)} {space.dim}\n")
    for i, word in enumerate(space.vocab.words):
        dest.write(word)
        row = space.matrix[i]
        for x in row:
            dest.write(" ")
            dest.write(fmt_float(x))
        dest.write("\n")


def load_embeddings(source) -> EmbeddingSpace:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return load_embeddings(fh)
    header = source.readline().split()
    if len(header) != 2:
        raise EmbeddingFormatError(f"bad header {header!r}: expected '<words> <dim>'")
    try:
        n_words, dim = int(header[0]), int(header[1])
    except ValueError:
        raise EmbeddingFormatError(f"non-numeric header {header!r}") from None
    words: list[str] = []
    matrix = np.empty((n_words, dim), dtype=np.float64)
    for i in range(n_words):
        line = source.readline()
        if not line:
            raise EmbeddingFormatError(f"header promised {n_words} rows but file has {i}")
        parts = line.rstrip("\n").split(" ")
        if len(parts) != dim + 1:
            raise EmbeddingFormatError(f"row {i + 1}: expected {dim} components, got {len(parts) - 1}")
        words.append(parts[0])
        try:
            matrix[i] = [float(x) for x in parts[1:]]
        except ValueError:
            raise EmbeddingFormatError(f"row {i + 1}: non-numeric component") from None
    trailing = source.read().strip()
    if trailing:
        raise EmbeddingFormatError(f"header promised {n_words} rows but file has more")
    return EmbeddingSpace(Vocabulary(words, [1] * n_words), matrix)
