import pytest

from lscd.evaluation import default_plan, inject_changes, save_gold, save_plan, synthesize_corpus


def write_plain(path, samples):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sample in samples:
            fh.write(" ".join(sample))
            fh.write("\n")


@pytest.fixture(scope="session")
def tiny_split(tmp_path_factory):
    """A small structured corpus split in half, with injected changes.

    Sized for fast CLI tests: the detection signal is real but weak; tests
    against it check plumbing and determinism, not accuracy.
    """
    root = tmp_path_factory.mktemp("tiny")
    corpus = synthesize_corpus(24_000, seed=99, n_topics=10, topic_vocab=40,
                               shared_vocab=30, sentence_len=(6, 14))
    half = len(corpus) // 2
    earlier, later = corpus[:half], corpus[half:]
    plan = default_plan(later, n_changed=3, n_stable=3, fraction=0.75, min_count=40)
    injected, gold = inject_changes(later, plan, seed=5)

    paths = {
        "earlier": root / "earlier.txt",
        "later": root / "later.txt",
        "later_raw": root / "later_raw.txt",
        "targets": root / "targets.txt",
        "gold": root / "gold.tsv",
        "plan": root / "plan.tsv",
        "root": root,
    }
    write_plain(paths["earlier"], earlier)
    write_plain(paths["later"], injected)
    write_plain(paths["later_raw"], later)
    paths["targets"].write_text("".join(w + "\n" for w in plan.targets()), encoding="utf-8")
    save_gold(gold, paths["gold"])
    save_plan(plan, paths["plan"])
    return paths


def write_config(path, values):
    path.write_text("".join(f"{k} = {v}\n" for k, v in values.items()), encoding="utf-8")
    return path


def tiny_config_values(paths, out_dir, **overrides):
    values = {
        "earlier_corpus": paths["earlier"],
        "later_corpus": paths["later"],
        "corpus_format": "plain",
        "variant": "form",
        "dim": 16,
        "window": 3,
        "negatives": 5,
        "epochs": 2,
        "min_count": 5,
        "targets": paths["targets"],
        "output_dir": out_dir,
        "seed": 42,
        "strategy": "largest_gap",
        "method": "procrustes",
    }
    values.update(overrides)
    return values
