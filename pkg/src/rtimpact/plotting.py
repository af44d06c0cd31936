"""Optional PNG figures drawn from perspective results (``--figures``)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

PNG_META = {"Software": None}


def _save(fig, out_dir: str, name: str) -> str:
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, name), dpi=110, metadata=PNG_META)
    plt.close(fig)
    return name


def robustness_figure(result, out_dir: str) -> str:
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6), sharey=True)
    x = list(range(len(result.steps) + 1))
    panels = (("weight", "residual_weight", "weight"), ("edges", "residual_edges", "edges"),
              ("giant", None, "giant component"))
    for ax, (key, residual, title) in zip(axes, panels):
        ax.plot(x, [100.0] + [s.percent[key] for s in result.steps], marker="o", ms=3, color="black",
                label=f"{result.attribution} attribution")
        if residual and result.attribution != "incident":
            ax.plot(x, [100.0] + [s.percent[residual] for s in result.steps], ls="--", color="grey",
                    label="residual graph")
            ax.legend(fontsize=7)
        ax.set_title(f"{title} (% of original)")
        ticks = [0] + [i + 1 for i, s in enumerate(result.steps) if s.r == 1.0]
        ax.set_xticks(ticks)
        ax.set_xticklabels(["start"] + [s.group for s in result.steps if s.r == 1.0], rotation=30, fontsize=7)
    axes[0].set_ylabel("%")
    return _save(fig, out_dir, "robustness.png")


def structure_figure(result, out_dir: str) -> str:
    fig, ax = plt.subplots(figsize=(8, 3.6))
    ks = [r.k for r in result.rows]
    for i, name in enumerate(result.names):
        share = result.user_shares[i]
        ax.plot(ks, [r.fractions[i] / share if share else 0 for r in result.rows], marker=".", label=name)
    ax.axhline(1.0, color="grey", lw=0.8, ls="--")
    ax.set_xlabel("k-shell")
    ax.set_ylabel("shell share / user share")
    ax.legend(fontsize=7)
    return _save(fig, out_dir, "structure.png")


def temporal_figure(result, out_dir: str) -> str:
    fig, ax = plt.subplots(figsize=(8, 3.6))
    labels = [b.label for b in result.buckets]
    for i, name in enumerate(result.names):
        line, = ax.plot(range(len(labels)), [b.shares[i] for b in result.buckets], marker=".", label=name)
        ax.axhline(result.user_shares[i], color=line.get_color(), lw=0.8, ls="--")
    step = max(1, len(labels) // 10)
    ax.set_xticks(range(0, len(labels), step))
    ax.set_xticklabels(labels[::step], rotation=30, fontsize=7)
    ax.set_ylabel("share of traffic")
    ax.legend(fontsize=7)
    return _save(fig, out_dir, "temporal.png")


def virality_figure(result, out_dir: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 3.6))
    for g in result.groups:
        ax.plot(range(1, len(g.curve) + 1), [c / 3600 for c in g.curve], marker=".", label=g.group)
    ax.set_xlabel("i-th retweeter")
    ax.set_ylabel("hours since first retweet")
    ax.legend(fontsize=7)
    return _save(fig, out_dir, "virality_curves.png")


def render(name: str, result, out_dir: str) -> list[str]:
    """Figures for one perspective; perspectives without a figure return []."""
    if name == "robustness":
        return [robustness_figure(result, out_dir)]
    if name == "structure" and result.rows:
        return [structure_figure(result, out_dir)]
    if name == "temporal":
        return [temporal_figure(result, out_dir)]
    if name == "virality" and result[1] is not None:
        return [virality_figure(result[1], out_dir)]
    return []
