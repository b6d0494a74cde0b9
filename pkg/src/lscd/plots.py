"""Matplotlib figures rendered next to the delimited report files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def save_decision_figure(scores, decisions, path) -> None:
    """Horizontal bars of per-target distances with the threshold line."""
    changed = {d.word for d in decisions if d.changed}
    threshold = decisions[0].threshold_used if decisions else None
    ordered = sorted(scores, key=lambda s: s.distance)
    words = [s.word for s in ordered]
    dists = [s.distance for s in ordered]
    colors = ["#c44e52" if w in changed else "#4c72b0" for w in words]

    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.35 * len(words))))
    ax.barh(range(len(words)), dists, color=colors)
    ax.set_yticks(range(len(words)))
    ax.set_yticklabels(words)
    ax.set_xlabel("cosine distance")
    if threshold is not None:
        ax.axvline(threshold, color="black", linestyle="--", linewidth=1,
                   label=f"threshold = {threshold:.4f}")
        ax.legend(loc="lower right", fontsize=8)
    ax.set_title("per-target change scores")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_stability_figure(rows, path) -> None:
    """Mean rank deviation versus embedding size, one line per corpus variant."""
    by_variant: dict[str, list[tuple[int, float]]] = {}
    for variant, dim, value in rows:
        by_variant.setdefault(variant, []).append((dim, value))

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for variant in sorted(by_variant):
        points = sorted(by_variant[variant])
        ax.plot([p[0] for p in points], [p[1] for p in points], marker="o",
                markersize=3, label=variant)
    ax.set_xlabel("embedding dimension")
    ax.set_ylabel("mean std of rank")
    ax.set_title("rank stability by corpus variant")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_rank_summary_figure(summaries, decisions, path) -> None:
    """Composite ranks with standard-error bars, changed targets highlighted."""
    changed = {d.word for d in decisions if d.changed}
    ordered = sorted(summaries, key=lambda s: s.composite_rank)
    words = [s.word for s in ordered]
    comps = [s.composite_rank for s in ordered]
    sems = [s.sem for s in ordered]
    colors = ["#c44e52" if w in changed else "#4c72b0" for w in words]

    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.35 * len(words))))
    ax.errorbar(comps, range(len(words)), xerr=sems, fmt="none", ecolor="gray",
                capsize=2, linewidth=1)
    ax.scatter(comps, range(len(words)), c=colors, zorder=3)
    ax.set_yticks(range(len(words)))
    ax.set_yticklabels(words)
    ax.invert_yaxis()
    ax.set_xlabel("composite rank (1 = most changed)")
    ax.set_title("rank aggregation across embedding pairs")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
