"""Render solution-set membership scatter plots from exported JSON files.

Consumes only the documented file formats (solution-set JSON and report
CSV); it never imports the learning library. Output is deterministic:
fixed style, no timestamps, stable SVG ids.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "setplot"

# Layer precedence: a policy in several sets is drawn once, as the
# innermost set it belongs to.
LAYERS = ("ch", "pf", "cdus", "dus-only")

STYLE = {
    "ch": dict(marker="*", s=160, color="#d62728", label="convex hull", zorder=5),
    "pf": dict(marker="^", s=80, color="#1f77b4", label="Pareto front", zorder=4),
    "cdus": dict(marker="o", s=55, color="#2ca02c", label="convex dist. undominated", zorder=3),
    "dus-only": dict(marker="s", s=40, color="#7f7f7f", label="dist. undominated only", zorder=2),
}


def load_set(path) -> dict[str, np.ndarray]:
    """Policy id -> expected value vector, from a solution-set JSON file."""
    data = json.loads(Path(path).read_text())
    if int(data["dim"]) != 2:
        raise ValueError(f"{path}: plots are bivariate only, got dim {data['dim']}")
    out = {}
    for entry in data["entries"]:
        atoms = np.array([a["v"] for a in entry["dist"]["atoms"]], dtype=float)
        probs = np.array([a["p"] for a in entry["dist"]["atoms"]], dtype=float)
        out[entry["id"]] = probs @ atoms
    return out


def _pareto_staircase(points: np.ndarray) -> np.ndarray | None:
    """Vertices of the maximization staircase through the given points."""
    if len(points) == 0:
        return None
    order = np.lexsort((-points[:, 1], points[:, 0]))
    pts = points[order]
    verts = [pts[0]]
    for nxt in pts[1:]:
        prev = verts[-1]
        verts.append(np.array([nxt[0], prev[1]]))
        verts.append(nxt)
    return np.array(verts)


def _upper_frontier(points: np.ndarray) -> np.ndarray | None:
    """Convex-hull points sorted by the first objective."""
    if len(points) == 0:
        return None
    order = np.lexsort((-points[:, 1], points[:, 0]))
    return points[order]


def plot_solution_sets(
    dus_path,
    cdus_path,
    pf_path,
    ch_path,
    out_path,
    fmt: str = "png",
) -> dict:
    """Write the membership scatter plot; returns input and marker counts.

    Marker counts are read back from the scatter artists, so the report
    reflects what was actually drawn.
    """
    if fmt not in ("png", "svg"):
        raise ValueError(f"unsupported format {fmt!r}")
    dus = load_set(dus_path)
    cdus = load_set(cdus_path)
    pf = load_set(pf_path)
    ch = load_set(ch_path)

    membership = {layer: [] for layer in LAYERS}
    for pid, value in dus.items():
        if pid in ch:
            membership["ch"].append(value)
        elif pid in pf:
            membership["pf"].append(value)
        elif pid in cdus:
            membership["cdus"].append(value)
        else:
            membership["dus-only"].append(value)

    fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=100)
    artists = {}
    for layer in LAYERS:
        pts = np.array(membership[layer]) if membership[layer] else np.empty((0, 2))
        artists[layer] = ax.scatter(pts[:, 0], pts[:, 1], **STYLE[layer])

    pf_line = _pareto_staircase(np.array(list(pf.values())) if pf else np.empty((0, 2)))
    if pf_line is not None and len(pf_line) > 1:
        ax.plot(pf_line[:, 0], pf_line[:, 1], color="#1f77b4", lw=1.2,
                ls="--", zorder=1, label="PF staircase")
    ch_line = _upper_frontier(np.array(list(ch.values())) if ch else np.empty((0, 2)))
    if ch_line is not None and len(ch_line) > 1:
        ax.plot(ch_line[:, 0], ch_line[:, 1], color="#d62728", lw=1.2,
                zorder=1, label="CH frontier")

    ax.set_xlabel("objective 1")
    ax.set_ylabel("objective 2")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, format=fmt, metadata=_clean_metadata(fmt))
    plt.close(fig)

    return {
        "inputs": {"dus": len(dus), "cdus": len(cdus), "pf": len(pf), "ch": len(ch)},
        "markers": {
            layer: len(artists[layer].get_offsets()) for layer in LAYERS
        },
    }


def _clean_metadata(fmt: str) -> dict:
    if fmt == "svg":
        return {"Date": None}
    return {"Software": None}
