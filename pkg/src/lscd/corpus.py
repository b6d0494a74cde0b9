"""Corpus ingestion: token rendering under a variant and vocabulary construction.

Two input formats are supported:

* ``tsv``   -- one token per line as ``form<TAB>pos<TAB>lemma``; a blank line
  ends the current sample. This is the canonical format for tagged corpora.
* ``plain`` -- one pre-rendered sample per line, units separated by spaces.

A "variant" decides how a token record is rendered into a single unit string:
the surface form, the lemma, or either of those with the POS tag appended
after an underscore.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

from .errors import ConfigError, CorpusParseError

TokenSequence = list[str]


class TokenRecord(NamedTuple):
    form: str
    pos: str
    lemma: str


class Variant(enum.Enum):
    FORM = "form"
    LEMMA = "lemma"
    FORM_POS = "form_pos"
    LEMMA_POS = "lemma_pos"

    @classmethod
    def parse(cls, name: str) -> "Variant":
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(v.value for v in cls)
            raise ConfigError(f"unknown corpus variant {name!r} (expected one of: {valid})") from None


POS_SEPARATOR = "_"


def render_record(record: TokenRecord, variant: Variant, line: int | None = None) -> str:
    """Render one token record into a unit string under *variant*.

    Raises CorpusParseError when the variant needs a field that is empty.
    """
    if variant in (Variant.LEMMA, Variant.LEMMA_POS) and not record.lemma:
        raise CorpusParseError(f"variant {variant.value!r} requires a lemma but token {record.form!r} has none", line)
    if variant in (Variant.FORM_POS, Variant.LEMMA_POS) and not record.pos:
        raise CorpusParseError(f"variant {variant.value!r} requires a POS tag but token {record.form!r} has none", line)
    if variant is Variant.FORM:
        return record.form
    if variant is Variant.LEMMA:
        return record.lemma
    if variant is Variant.FORM_POS:
        return record.form + POS_SEPARATOR + record.pos
    return record.lemma + POS_SEPARATOR + record.pos


def split_rendered(unit: str) -> tuple[str, str]:
    """Split a POS-augmented unit back into (base, pos).

    The POS tag is the suffix after the last separator, so bases that
    themselves contain the separator survive a round trip.
    """
    base, _, pos = unit.rpartition(POS_SEPARATOR)
    return base, pos


def parse_corpus(lines: Iterable[str], format: str, variant: Variant) -> Iterator[TokenSequence]:
    """Parse a line stream into token sequences. Empty samples are dropped."""
    if format == "plain":
        yield from _parse_plain(lines)
    elif format == "tsv":
        yield from _parse_tsv(lines, variant)
    else:
        raise ConfigError(f"unknown corpus format {format!r} (expected 'plain' or 'tsv')")


def _parse_plain(lines: Iterable[str]) -> Iterator[TokenSequence]:
    for raw in lines:
        units = raw.split()
        if units:
            yield units


def _parse_tsv(lines: Iterable[str], variant: Variant) -> Iterator[TokenSequence]:
    sample: TokenSequence = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            if sample:
                yield sample
                sample = []
            continue
        fields = line.split("\t")
        if len(fields) < 3:
            raise CorpusParseError(f"expected form<TAB>pos<TAB>lemma, got {len(fields)} field(s)", lineno)
        record = TokenRecord(fields[0], fields[1], fields[2])
        if not record.form or any(ch.isspace() for ch in record.form):
            raise CorpusParseError(f"bad surface form {record.form!r}", lineno)
        sample.append(render_record(record, variant, lineno))
    if sample:
        yield sample


class CorpusReader:
    """Replayable sample stream backed by a file.

    Each iteration re-opens the file, so the reader can be passed anywhere a
    multi-pass sample stream is expected (vocabulary counting, every training
    epoch, injection).
    """

    def __init__(self, path: str | Path, format: str = "tsv", variant: Variant = Variant.LEMMA):
        self.path = Path(path)
        self.format = format
        self.variant = variant

    def __iter__(self) -> Iterator[TokenSequence]:
        with open(self.path, encoding="utf-8") as fh:
            yield from parse_corpus(fh, self.format, self.variant)


@dataclass
class Vocabulary:
    """Frequency-filtered word list with dense, deterministic indices.

    Entries are ordered by descending count, ties broken lexicographically,
    so the same corpus always produces the same index assignment.
    """

    words: list[str]
    counts: list[int]
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ConfigError("vocabulary contains duplicate words")

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def total_tokens(self) -> int:
        return sum(self.counts)


def build_vocab(samples: Iterable[TokenSequence], min_count: int = 5) -> Vocabulary:
    if min_count < 1:
        raise ConfigError(f"min_count must be >= 1, got {min_count}")
    freq: Counter[str] = Counter()
    for sample in samples:
        freq.update(sample)
    kept = [(w, c) for w, c in freq.items() if c >= min_count]
    kept.sort(key=lambda wc: (-wc[1], wc[0]))
    return Vocabulary([w for w, _ in kept], [c for _, c in kept])
