"""Command-line pipeline: every stage is a subcommand, outputs are TSV files
plus rendered figures, and a master seed makes everything re-runnable.

Subcommands: train, align, score, classify, rank, eval, synth, pipeline.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import align as align_mod
from . import change as change_mod
from . import evaluation, plots, ranking
from .config import RunConfig, derive_seed, load_config
from .corpus import CorpusReader
from .errors import ConfigError, LscdError
from .sgns import load_embeddings, save_embeddings, train_sgns
from .textio import fmt_float, read_tsv, write_tsv


def _outdir(config: RunConfig) -> Path:
    config.output_dir.mkdir(parents=True, exist_ok=True)
    return config.output_dir


def cmd_train(config: RunConfig) -> tuple[Path, Path]:
    """Train one embedding space per corpus slice and save both."""
    out = _outdir(config)
    paths = []
    for slice_name, corpus_path in (("earlier", config.earlier_corpus),
                                    ("later", config.later_corpus)):
        reader = CorpusReader(corpus_path, config.corpus_format, config.variant)
        sgns_cfg = config.sgns_config(seed=derive_seed(config.seed, "train", slice_name))
        space = train_sgns(reader, sgns_cfg)
        path = out / f"{slice_name}.vec"
        save_embeddings(space, path)
        paths.append(path)
    return paths[0], paths[1]


def _load_targets_or_empty(config: RunConfig) -> list[str]:
    return config.targets() if config.targets_path is not None else []


def _require(path: Path, producer: str) -> Path:
    if not Path(path).exists():
        raise ConfigError(f"{path} does not exist; run 'lscd {producer}' first or pass the path explicitly")
    return path


def cmd_align(config: RunConfig, src_path: Path | None = None, tgt_path: Path | None = None,
              out_path: Path | None = None) -> Path:
    out = _outdir(config)
    src_path = _require(src_path or out / "earlier.vec", "train")
    tgt_path = _require(tgt_path or out / "later.vec", "train")
    out_path = out_path or out / "transform.txt"
    src = load_embeddings(src_path)
    tgt = load_embeddings(tgt_path)
    dictionary = align_mod.build_seed_dictionary(
        src.vocab, tgt.vocab, targets=_load_targets_or_empty(config),
        mode=config.dict_mode, k=config.dict_size, seed=derive_seed(config.seed, "dict"))
    if config.method == "procrustes":
        transform = align_mod.fit_orthogonal(src, tgt, dictionary, preprocess=config.preprocess)
    else:
        transform = align_mod.fit_cca(src, tgt, dictionary, ridge=config.ridge)
    align_mod.save_transform(transform, out_path)
    return out_path


def cmd_score(config: RunConfig, transform_path: Path | None = None,
              src_path: Path | None = None, tgt_path: Path | None = None,
              scores_out: Path | None = None, missing_out: Path | None = None) -> tuple[Path, Path]:
    out = _outdir(config)
    transform_path = _require(transform_path or out / "transform.txt", "align")
    src_path = _require(src_path or out / "earlier.vec", "train")
    tgt_path = _require(tgt_path or out / "later.vec", "train")
    scores_out = scores_out or out / "scores.tsv"
    missing_out = missing_out or out / "missing.tsv"
    transform = align_mod.load_transform(transform_path)
    src = load_embeddings(src_path)
    tgt = load_embeddings(tgt_path)
    aligned = align_mod.apply_transform(transform, src)
    scores, missing = change_mod.score_targets(aligned, tgt, config.targets())
    write_tsv(scores_out, [(s.word, fmt_float(s.similarity), fmt_float(s.distance)) for s in scores])
    write_tsv(missing_out, missing)
    return scores_out, missing_out


def _read_scores(path) -> list[change_mod.ChangeScore]:
    scores = []
    for row in read_tsv(path):
        if len(row) != 3:
            raise ConfigError(f"score row {row!r} must be word<TAB>similarity<TAB>distance")
        scores.append(change_mod.ChangeScore(row[0], float(row[1]), float(row[2])))
    return scores


def cmd_classify(config: RunConfig, scores_path: Path | None = None,
                 out_path: Path | None = None) -> Path:
    out = _outdir(config)
    scores_path = _require(scores_path or out / "scores.tsv", "score")
    out_path = out_path or out / "decisions.tsv"
    if config.strategy == "ranking":
        raise ConfigError("strategy 'ranking' is driven by the rank subcommand, not classify")
    scores = _read_scores(scores_path)
    decisions = change_mod.classify_binary(scores, config.strategy, config.fixed_t)
    write_tsv(out_path, [
        (d.word, int(d.changed), fmt_float(d.threshold_used), d.strategy) for d in decisions
    ])
    plots.save_decision_figure(scores, decisions, out_path.with_suffix(".png"))
    return out_path


def _read_predictions(path) -> dict[str, bool]:
    pred: dict[str, bool] = {}
    for row in read_tsv(path):
        if len(row) < 2 or row[1] not in ("0", "1"):
            raise ConfigError(f"prediction row {row!r} must start with word<TAB>{{0,1}}")
        pred[row[0]] = row[1] == "1"
    return pred


def cmd_eval(pred_path, gold_path, out_path: Path | None = None) -> float:
    gold = evaluation.load_gold(gold_path)
    pred = _read_predictions(pred_path)
    acc = evaluation.accuracy(pred, gold)
    correct = round(acc * len(gold))
    rows = [("accuracy", fmt_float(acc)), ("correct", correct), ("total", len(gold))]
    if out_path is not None:
        write_tsv(out_path, rows)
    for key, value in rows:
        print(f"{key}\t{value}")
    return acc


def cmd_synth(config: RunConfig, plan_path, out_corpus: Path | None = None,
              out_gold: Path | None = None) -> tuple[Path, Path]:
    out = _outdir(config)
    out_corpus = out_corpus or out / "injected.txt"
    out_gold = out_gold or out / "gold.tsv"
    plan = evaluation.load_plan(plan_path)
    reader = CorpusReader(config.later_corpus, config.corpus_format, config.variant)
    injected, gold = evaluation.inject_changes(list(reader), plan,
                                               seed=derive_seed(config.seed, "synth"))
    with open(out_corpus, "w", encoding="utf-8", newline="\n") as fh:
        for sample in injected:
            fh.write(" ".join(sample))
            fh.write("\n")
    evaluation.save_gold(gold, out_gold)
    return out_corpus, out_gold


def cmd_pipeline(config: RunConfig) -> dict[str, Path]:
    """train -> align -> score -> classify (-> eval when gold is configured).

    Composed from the stage commands themselves, so its outputs are identical
    to running the stages one at a time with the same config and seed.
    """
    artifacts: dict[str, Path] = {}
    artifacts["earlier"], artifacts["later"] = cmd_train(config)
    artifacts["transform"] = cmd_align(config)
    artifacts["scores"], artifacts["missing"] = cmd_score(config)
    artifacts["decisions"] = cmd_classify(config)
    if config.gold_path is not None:
        out = _outdir(config) / "accuracy.tsv"
        cmd_eval(artifacts["decisions"], config.gold_path, out)
        artifacts["accuracy"] = out
    return artifacts


def _rank_single_run(config: RunConfig, variant, dim: int, run_id: int,
                     targets: list[str]):
    """One independent train+align+score job; returns word->distance.

    Trains single-threaded: the run itself is the unit of parallelism, and
    its result depends only on the derived seeds, never on schedule order.
    """
    seed_e = derive_seed(config.seed, "rank", variant.value, dim, run_id, "earlier")
    seed_l = derive_seed(config.seed, "rank", variant.value, dim, run_id, "later")
    seed_d = derive_seed(config.seed, "rank", variant.value, dim, run_id, "dict")
    earlier = train_sgns(CorpusReader(config.earlier_corpus, config.corpus_format, variant),
                         config.sgns_config(dim=dim, seed=seed_e, workers=1))
    later = train_sgns(CorpusReader(config.later_corpus, config.corpus_format, variant),
                       config.sgns_config(dim=dim, seed=seed_l, workers=1))
    dictionary = align_mod.build_seed_dictionary(
        earlier.vocab, later.vocab, targets=targets,
        mode=config.dict_mode, k=config.dict_size, seed=seed_d)
    if config.method == "procrustes":
        transform = align_mod.fit_orthogonal(earlier, later, dictionary, preprocess=config.preprocess)
    else:
        transform = align_mod.fit_cca(earlier, later, dictionary, ridge=config.ridge)
    aligned = align_mod.apply_transform(transform, earlier)
    scores, _ = change_mod.score_targets(aligned, later, targets)
    return {s.word: s.distance for s in scores}


def cmd_rank(config: RunConfig) -> dict[str, Path]:
    """Run the dims x runs schedule, aggregate ranks, and emit the reports.

    The composite-rank summary covers the configured primary variant; any
    extra entries in `variants` feed the stability comparison only.
    """
    out = _outdir(config)
    targets = config.targets()
    dims = config.dim_schedule()
    variants = config.rank_variants()
    primary = variants[0]

    jobs = [(variant, dim, run_id)
            for variant in variants for dim in dims
            for run_id in range(config.runs_per_pair)]
    distance_rows: dict[tuple[str, int, int], dict[str, float]] = {}
    if config.workers > 1:
        import concurrent.futures
        with concurrent.futures.ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = {pool.submit(_rank_single_run, config, v, d, r, targets): (v.value, d, r)
                       for v, d, r in jobs}
            for future, key in futures.items():
                distance_rows[key] = future.result()
    else:
        for variant, dim, run_id in jobs:
            distance_rows[(variant.value, dim, run_id)] = _rank_single_run(
                config, variant, dim, run_id, targets)

    covered = set(targets)
    for distances in distance_rows.values():
        covered &= set(distances)
    dropped = [w for w in targets if w not in covered]
    if dropped:
        print(f"[rank] targets missing from some run's vocabulary, dropped: {', '.join(dropped)}",
              file=sys.stderr)
    if not covered:
        raise ConfigError("no target survives vocabulary filtering in every run")

    runs: list[ranking.RankRun] = []
    ledger_rows = []
    grouped: dict[tuple[str, int], list[ranking.RankRun]] = {}
    for (variant_name, dim, run_id), distances in sorted(distance_rows.items()):
        scores = [change_mod.ChangeScore(w, 1.0 - d, d) for w, d in distances.items() if w in covered]
        ranks = ranking.rank_one_run(scores)
        pair_id = f"{variant_name}:d{dim}"
        run = ranking.RankRun(pair_id, run_id, ranks)
        grouped.setdefault((variant_name, dim), []).append(run)
        if variant_name == primary.value:
            runs.append(run)
        for word in sorted(ranks):
            ledger_rows.append((pair_id, run_id, word, fmt_float(distances[word]), ranks[word]))

    summaries = ranking.aggregate_ranks(runs)
    mean_distance = {
        w: sum(distance_rows[key][w] for key in distance_rows if key[0] == primary.value)
        / sum(1 for key in distance_rows if key[0] == primary.value)
        for w in covered
    }
    decisions, warning = ranking.split_by_rank_gap(summaries, mean_distance)
    if warning:
        print(f"[rank] warning: {warning}", file=sys.stderr)
    label = {d.word: d.changed for d in decisions}

    paths = {
        "runs": out / "runs.tsv",
        "summary": out / "rank_summary.tsv",
        "stability": out / "stability.tsv",
        "stability_fig": out / "stability.png",
        "summary_fig": out / "rank_summary.png",
    }
    write_tsv(paths["runs"], ledger_rows)
    write_tsv(paths["summary"], [
        (s.word, fmt_float(s.composite_rank), fmt_float(s.sem),
         fmt_float(mean_distance[s.word]), int(label[s.word]))
        for s in sorted(summaries, key=lambda s: s.composite_rank)
    ])
    stability = ranking.variant_stability_report(grouped)
    write_tsv(paths["stability"], [(v, d, fmt_float(x)) for v, d, x in stability])
    plots.save_stability_figure(stability, paths["stability_fig"])
    plots.save_rank_summary_figure(summaries, decisions, paths["summary_fig"])
    return paths


def _parse_overrides(pairs: list[str]) -> dict[str, str]:
    overrides = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        overrides[key.strip()] = value.strip()
    return overrides


def _add_config_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="run configuration file (key = value lines)")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config value")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lscd",
        description="Detect lexical semantic change between two time-sliced corpora.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one embedding space per corpus slice")
    _add_config_arg(p)

    p = sub.add_parser("align", help="fit the source->target transform")
    _add_config_arg(p)
    p.add_argument("--src", type=Path, help="source embeddings (default: <output_dir>/earlier.vec)")
    p.add_argument("--tgt", type=Path, help="target embeddings (default: <output_dir>/later.vec)")
    p.add_argument("--out", type=Path, help="transform file (default: <output_dir>/transform.txt)")

    p = sub.add_parser("score", help="cosine-score the targets across aligned spaces")
    _add_config_arg(p)
    p.add_argument("--transform", type=Path)
    p.add_argument("--src", type=Path)
    p.add_argument("--tgt", type=Path)
    p.add_argument("--scores-out", type=Path)
    p.add_argument("--missing-out", type=Path)

    p = sub.add_parser("classify", help="turn scores into changed/unchanged decisions")
    _add_config_arg(p)
    p.add_argument("--scores", type=Path)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("rank", help="run the repeated-training ranking schedule")
    _add_config_arg(p)

    p = sub.add_parser("eval", help="score predictions against gold labels")
    p.add_argument("--pred", type=Path, required=True)
    p.add_argument("--gold", type=Path, required=True)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("synth", help="inject synthetic changes into the later corpus")
    _add_config_arg(p)
    p.add_argument("--plan", type=Path, required=True)
    p.add_argument("--out-corpus", type=Path)
    p.add_argument("--out-gold", type=Path)

    p = sub.add_parser("pipeline", help="train, align, score, classify, eval end to end")
    _add_config_arg(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    stage = args.command
    try:
        if stage == "eval":
            cmd_eval(args.pred, args.gold, args.out)
            return 0
        config = load_config(args.config, _parse_overrides(args.set))
        if stage == "train":
            earlier, later = cmd_train(config)
            print(f"wrote {earlier} and {later}")
        elif stage == "align":
            print(f"wrote {cmd_align(config, args.src, args.tgt, args.out)}")
        elif stage == "score":
            scores, missing = cmd_score(config, args.transform, args.src, args.tgt,
                                        args.scores_out, args.missing_out)
            print(f"wrote {scores} and {missing}")
        elif stage == "classify":
            print(f"wrote {cmd_classify(config, args.scores, args.out)}")
        elif stage == "rank":
            paths = cmd_rank(config)
            print("wrote " + ", ".join(str(p) for p in paths.values()))
        elif stage == "synth":
            corpus, gold = cmd_synth(config, args.plan, args.out_corpus, args.out_gold)
            print(f"wrote {corpus} and {gold}")
        elif stage == "pipeline":
            artifacts = cmd_pipeline(config)
            print("wrote " + ", ".join(str(p) for p in artifacts.values()))
        return 0
    except LscdError as err:
        print(f"[{stage}] error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
