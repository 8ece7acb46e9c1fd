"""PNG summaries of campaign reports, rendered with the Agg backend."""
from __future__ import annotations

import os

from .report import CampaignReport


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def counts_figure(report: CampaignReport, directory: str) -> str:
    """Horizontal bar chart of every count in the report (log scale)."""
    plt = _pyplot()
    os.makedirs(directory, exist_ok=True)
    items = sorted(report.counts.items())
    fig, ax = plt.subplots(figsize=(7, 0.45 * len(items) + 1.2))
    names = [k for k, _ in items]
    values = [max(v, 0) for _, v in items]
    colors = ["tab:red" if "counterexample" in k else "tab:blue" for k in names]
    ax.barh(names, values, color=colors)
    if any(values):
        ax.set_xscale("symlog")
    ax.invert_yaxis()
    ax.set_title(f"{report.id}: {report.verdict}")
    ax.set_xlabel("count")
    fig.tight_layout()
    path = os.path.join(directory, f"{report.id}-counts.png")
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def wf_membership_figure(grid_text: str, alphas, directory: str) -> str:
    """Membership of every tree of the grid in each rank class, as a 0/1 matrix."""
    from . import wf_complexity as wf

    plt = _pyplot()
    os.makedirs(directory, exist_ok=True)
    grid = wf.Grid.parse(grid_text)
    trees = [s for s in grid.membership_sets() if wf.is_prefix_closed(s)]
    trees.sort(key=lambda t: (wf.wf_rank(t), len(t), sorted(t)))
    matrix = [[int(wf.wf_membership(t, a)) for t in trees] for a in alphas]
    fig, ax = plt.subplots(figsize=(max(6, 0.3 * len(trees)), 0.5 * len(alphas) + 1.5))
    ax.imshow(matrix, aspect="auto", cmap="Greys", vmin=0, vmax=1)
    ax.set_yticks(range(len(alphas)), [str(a) for a in alphas])
    ax.set_xticks(range(len(trees)), [str(wf.wf_rank(t)) for t in trees], fontsize=7)
    ax.set_xlabel("trees of the grid, labeled by rank")
    ax.set_ylabel("alpha")
    ax.set_title(f"rank below alpha on {grid_text}")
    fig.tight_layout()
    path = os.path.join(directory, "wf-membership.png")
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
