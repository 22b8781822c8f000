"""Matplotlib renderers for report figures.

Reports can drop static figure files next to their text output: a
layered diagram of a space's specialization order, the shrinking level
sizes of the two discontinuity series, and a point-by-piece view of a
cover. Everything renders headless through the Agg backend.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .finspace import FiniteSpace
from .mapcalc import CoverResult, SeriesReport


def _quotient(space: FiniteSpace):
    classes: dict[int, list[int]] = {}
    for x in range(space.n):
        classes.setdefault(space.up[x], []).append(x)
    reps = sorted(classes.values(), key=lambda c: c[0])
    index = {x: i for i, cls in enumerate(reps) for x in cls}
    le = [
        (a, b)
        for a, ca in enumerate(reps)
        for b, cb in enumerate(reps)
        if a != b and space.le(ca[0], cb[0])
    ]
    return reps, index, le


def _ranks(count: int, le: list) -> list[int]:
    below = {b: [a for a, b2 in le if b2 == b] for b in range(count)}
    rank = [0] * count
    changed = True
    while changed:
        changed = False
        for b in range(count):
            for a in below[b]:
                if rank[b] < rank[a] + 1:
                    rank[b] = rank[a] + 1
                    changed = True
    return rank


def space_figure(space: FiniteSpace, title: str = "space"):
    """Layered drawing of the specialization order on class blocks;
    an edge x -> y means x lies in the closure of y."""
    reps, _, le = _quotient(space)
    count = len(reps)
    rank = _ranks(count, le)
    covers = [
        (a, b)
        for a, b in le
        if not any((a, c) in le and (c, b) in le for c in range(count))
    ]
    per_rank: dict[int, list[int]] = {}
    for i, r in enumerate(rank):
        per_rank.setdefault(r, []).append(i)
    pos = {}
    for r, nodes in per_rank.items():
        for k, i in enumerate(nodes):
            pos[i] = (k - (len(nodes) - 1) / 2, r)
    fig, ax = plt.subplots(figsize=(4, 3))
    for a, b in covers:
        xa, ya = pos[a]
        xb, yb = pos[b]
        ax.plot([xa, xb], [ya, yb], color="0.6", lw=1, zorder=1)
    for i, cls in enumerate(reps):
        x, y = pos[i]
        ax.scatter([x], [y], s=400, color="#cfe3f5", edgecolor="0.3", zorder=2)
        ax.annotate(
            ",".join(str(p) for p in cls),
            (x, y),
            ha="center",
            va="center",
            fontsize=9,
            zorder=3,
        )
    ax.set_title(title)
    ax.set_axis_off()
    fig.tight_layout()
    return fig


def series_figure(reports: list[SeriesReport], title: str = "discontinuity series"):
    fig, ax = plt.subplots(figsize=(4, 3))
    for rep in reports:
        sizes = [len(s) for s in rep.sets]
        ax.plot(
            range(len(sizes)),
            sizes,
            marker="o",
            label=f"{rep.kind} ({rep.verdict})",
        )
    ax.set_xlabel("step")
    ax.set_ylabel("level size")
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig


def cover_figure(cover: CoverResult, n: int, title: str = "cover"):
    fig, ax = plt.subplots(figsize=(4, 3))
    pieces = [p for p in cover.pieces if hasattr(p, "mask")]
    if pieces:
        grid = [
            [1 if (p.mask >> x) & 1 else 0 for x in range(n)] for p in pieces
        ]
        ax.imshow(grid, aspect="auto", cmap="Blues", vmin=0, vmax=1)
        ax.set_xticks(range(n))
        ax.set_yticks(range(len(pieces)))
        ax.set_yticklabels([f"piece {i}" for i in range(len(pieces))], fontsize=8)
        ax.set_xlabel("point")
    else:
        ax.text(0.5, 0.5, str(cover.cardinality), ha="center", va="center")
        ax.set_axis_off()
    ax.set_title(f"{title} ({cover.cardinality})")
    fig.tight_layout()
    return fig


def tree_series_figure(reports: list[SeriesReport], title: str = "tree series"):
    fig, ax = plt.subplots(figsize=(4, 3))
    for rep in reports:
        sizes = [len(s) for s in rep.sets]
        ax.plot(range(len(sizes)), sizes, marker="s", label=f"{rep.kind} shapes")
    ax.set_xlabel("step")
    ax.set_ylabel("shapes in level")
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig


def save(fig, path) -> str:
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return str(path)
