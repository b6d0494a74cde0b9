"""Declarative run configuration and the seed-derivation scheme.

A config is a flat text file of ``key = value`` lines ('#' starts a comment).
CLI flags of the form ``--set key=value`` override file values. All derived
randomness flows from one master seed through ``derive_seed``, so any stage
can be re-run in isolation and reproduce the pipeline's results.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .align import DICT_MODE_INTERSECTION, DICT_MODE_RANDOM_K, PREPROCESS_CHOICES
from .corpus import Variant
from .errors import ConfigError
from .sgns import SgnsConfig

STRATEGIES = ("mean", "largest_gap", "fixed", "ranking")
METHODS = ("procrustes", "cca")
DEFAULT_DIM_BLOCKS = ",".join(f"{b}-{b + 5}" for b in range(100, 211, 10))


def derive_seed(master: int, *parts) -> int:
    """Stable 64-bit seed from the master seed and a stage/part path."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master)).encode())
    for part in parts:
        h.update(b"|")
        h.update(str(part).encode())
    return int.from_bytes(h.digest(), "big")


def parse_dim_schedule(spec: str) -> list[int]:
    """Parse "100-105,110-115" style block lists into a flat dimension list."""
    dims: list[int] = []
    for block in spec.split(","):
        block = block.strip()
        if not block:
            continue
        if "-" in block:
            lo_s, _, hi_s = block.partition("-")
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError:
                raise ConfigError(f"bad dimension block {block!r}") from None
            if hi < lo or lo < 1:
                raise ConfigError(f"bad dimension block {block!r}")
            dims.extend(range(lo, hi + 1))
        else:
            try:
                dims.append(int(block))
            except ValueError:
                raise ConfigError(f"bad dimension entry {block!r}") from None
    if not dims:
        raise ConfigError(f"empty dimension schedule {spec!r}")
    return dims


@dataclass
class RunConfig:
    earlier_corpus: Path
    later_corpus: Path
    corpus_format: str = "tsv"
    variant: Variant = Variant.LEMMA
    variants: list[Variant] = field(default_factory=list)  # rank command only
    dim: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    min_count: int = 5
    initial_lr: float = 0.025
    subsample_t: float = 0.0
    workers: int = 1
    method: str = "procrustes"
    dict_mode: str = DICT_MODE_INTERSECTION
    dict_size: int = 5000
    preprocess: str = "unit"
    ridge: float = 1e-8
    strategy: str = "largest_gap"
    fixed_t: float | None = None
    dims: str = DEFAULT_DIM_BLOCKS
    runs_per_pair: int = 40
    targets_path: Path | None = None
    gold_path: Path | None = None
    output_dir: Path = Path("out")
    seed: int = 1

    def sgns_config(self, dim: int | None = None, seed: int | None = None,
                    workers: int | None = None) -> SgnsConfig:
        return SgnsConfig(
            dim=self.dim if dim is None else dim,
            window=self.window,
            negatives=self.negatives,
            epochs=self.epochs,
            min_count=self.min_count,
            initial_lr=self.initial_lr,
            subsample_t=self.subsample_t,
            seed=self.seed if seed is None else seed,
            workers=self.workers if workers is None else workers,
        )

    def targets(self) -> list[str]:
        if self.targets_path is None:
            raise ConfigError("no targets file configured (key: targets)")
        words = []
        with open(self.targets_path, encoding="utf-8") as fh:
            for line in fh:
                word = line.strip()
                if word:
                    words.append(word)
        if not words:
            raise ConfigError(f"targets file {self.targets_path} is empty")
        return words

    def dim_schedule(self) -> list[int]:
        return parse_dim_schedule(self.dims)

    def rank_variants(self) -> list[Variant]:
        return self.variants if self.variants else [self.variant]


_KEYS = {
    "earlier_corpus", "later_corpus", "corpus_format", "variant", "variants",
    "dim", "window", "negatives", "epochs", "min_count", "initial_lr",
    "subsample_t", "workers", "method", "dict_mode", "dict_size", "preprocess",
    "ridge", "strategy", "fixed_t", "dims", "runs_per_pair", "targets", "gold",
    "output_dir", "seed",
}
_INT_KEYS = {"dim", "window", "negatives", "epochs", "min_count", "workers",
             "dict_size", "runs_per_pair", "seed"}
_FLOAT_KEYS = {"initial_lr", "subsample_t", "ridge", "fixed_t"}


def parse_config_text(text: str, overrides: dict[str, str] | None = None,
                      base_dir: Path | None = None) -> RunConfig:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEYS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        values[key] = value
    if overrides:
        for key, value in overrides.items():
            if key not in _KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = value
    return _build_config(values, base_dir or Path("."))


def load_config(path, overrides: dict[str, str] | None = None) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    return parse_config_text(path.read_text(encoding="utf-8"), overrides, path.parent)


def _build_config(values: dict[str, str], base_dir: Path) -> RunConfig:
    for required in ("earlier_corpus", "later_corpus"):
        if required not in values:
            raise ConfigError(f"config is missing required key {required!r}")

    def path_of(key: str) -> Path:
        p = Path(values[key])
        return p if p.is_absolute() else base_dir / p

    kwargs: dict = {
        "earlier_corpus": path_of("earlier_corpus"),
        "later_corpus": path_of("later_corpus"),
    }
    if "targets" in values:
        kwargs["targets_path"] = path_of("targets")
    if "gold" in values:
        kwargs["gold_path"] = path_of("gold")
    if "output_dir" in values:
        kwargs["output_dir"] = path_of("output_dir")
    if "variant" in values:
        kwargs["variant"] = Variant.parse(values["variant"])
    if "variants" in values:
        kwargs["variants"] = [Variant.parse(v.strip()) for v in values["variants"].split(",") if v.strip()]
    for key in ("corpus_format", "method", "dict_mode", "preprocess", "strategy", "dims"):
        if key in values:
            kwargs[key] = values[key]
    for key in _INT_KEYS:
        if key in values:
            try:
                kwargs[key] = int(values[key])
            except ValueError:
                raise ConfigError(f"config key {key!r} must be an integer, got {values[key]!r}") from None
    for key in _FLOAT_KEYS:
        if key in values and values[key]:
            try:
                kwargs[key] = float(values[key])
            except ValueError:
                raise ConfigError(f"config key {key!r} must be a number, got {values[key]!r}") from None

    config = RunConfig(**kwargs)
    validate_config(config)
    return config


def validate_config(config: RunConfig) -> None:
    """Reject bad configs before any compute happens."""
    if config.corpus_format not in ("tsv", "plain"):
        raise ConfigError(f"corpus_format must be 'tsv' or 'plain', got {config.corpus_format!r}")
    if config.method not in METHODS:
        raise ConfigError(f"method must be one of {METHODS}, got {config.method!r}")
    if config.dict_mode not in (DICT_MODE_INTERSECTION, DICT_MODE_RANDOM_K):
        raise ConfigError(f"unknown dict_mode {config.dict_mode!r}")
    if config.preprocess not in PREPROCESS_CHOICES:
        raise ConfigError(f"preprocess must be one of {PREPROCESS_CHOICES}, got {config.preprocess!r}")
    if config.strategy not in STRATEGIES:
        raise ConfigError(f"strategy must be one of {STRATEGIES}, got {config.strategy!r}")
    if config.strategy == "fixed" and config.fixed_t is None:
        raise ConfigError("strategy 'fixed' requires fixed_t")
    if config.strategy == "ranking":
        parse_dim_schedule(config.dims)
        if config.runs_per_pair < 1:
            raise ConfigError("runs_per_pair must be >= 1")
    for label, p in (("earlier_corpus", config.earlier_corpus), ("later_corpus", config.later_corpus),
                     ("targets", config.targets_path), ("gold", config.gold_path)):
        if p is not None and not Path(p).exists():
            raise ConfigError(f"{label} path {p} does not exist")
    config.sgns_config()  # validates the numeric training fields
