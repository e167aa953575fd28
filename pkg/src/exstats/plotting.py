"""Matplotlib renderings written next to the text outputs."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402

from .expr import Expression  # noqa: E402
from .model import ExcitationModel  # noqa: E402
from .proctools import config_words  # noqa: E402


def plot_expression_graph(m: ExcitationModel, e: Expression, path: str | Path, title: str = "") -> Path:
    """Draw e as a cycle on the configuration graph (red: positive, blue: negative)."""
    g = nx.MultiDiGraph()
    n = m.config_count
    for k, c in e.items():
        s, a = divmod(k, n)
        g.add_edge(a, m.step[s][a], coeff=c, op=m.operators[s].label)
    fig, ax = plt.subplots(figsize=(6, 6))
    if g.number_of_nodes():
        words = config_words(m)
        pos = nx.kamada_kawai_layout(g) if g.number_of_nodes() > 2 else nx.circular_layout(g)
        nx.draw_networkx_nodes(g, pos, ax=ax, node_color="#eeeeee", edgecolors="black", node_size=500)
        nx.draw_networkx_labels(g, pos, {v: words[v] for v in g.nodes}, ax=ax, font_size=7)
        for i, (a, b, data) in enumerate(g.edges(data=True)):
            color = "red" if data["coeff"] > 0 else "blue"
            nx.draw_networkx_edges(g, pos, edgelist=[(a, b)], ax=ax, edge_color=color, arrows=True,
                                   connectionstyle=f"arc3,rad={0.1 + 0.08 * (i % 3)}", node_size=500)
    ax.set_title(title or f"{len(e)} terms")
    ax.set_axis_off()
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_norm_trace(trace: Sequence[int], path: str | Path, restart_norms: Sequence[int] = ()) -> Path:
    """Accepted norms of the winning restart, with the final norm of every restart beside it."""
    fig, axes = plt.subplots(1, 2 if restart_norms else 1, figsize=(9 if restart_norms else 5, 3.5))
    axes = axes if restart_norms else [axes]
    axes[0].step(range(len(trace)), trace, where="post")
    axes[0].set_xlabel("accepted move")
    axes[0].set_ylabel("norm")
    axes[0].set_title("best restart")
    if restart_norms:
        axes[1].hist(restart_norms, bins=range(min(restart_norms), max(restart_norms) + 3, 2), align="left")
        axes[1].set_xlabel("final norm")
        axes[1].set_ylabel("restarts")
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
