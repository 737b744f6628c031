"""Static figure rendering for the CLI reports.

Figures are written as SVG with a pinned hash salt and no creation date so
that identical inputs produce byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_SVG_SALT = "altengine"


def ternary_xy(vertices) -> np.ndarray:
    """Project rows (p1, p2, p3) of the 3-simplex into the plane via
    x = p2 + p3/2, y = (sqrt(3)/2) p3. Corners map to (0,0), (1,0), (1/2,
    sqrt(3)/2)."""
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    if V.shape[1] != 3:
        raise ValueError(f"ternary projection needs 3 columns, got {V.shape[1]}")
    x = V[:, 1] + 0.5 * V[:, 2]
    y = (np.sqrt(3.0) / 2.0) * V[:, 2]
    return np.column_stack([x, y])


def _polygon_order(points: np.ndarray) -> np.ndarray:
    centre = points.mean(axis=0)
    angles = np.arctan2(points[:, 1] - centre[1], points[:, 0] - centre[0])
    return points[np.argsort(angles, kind="stable")]


def _save_deterministic(fig, path: str) -> None:
    with plt.rc_context({"svg.hashsalt": _SVG_SALT}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render_simplex_figure(path: str, hull_vertices, polytope_vertices,
                          top_bound: float) -> None:
    """Draw the d=3 reachable region inside the probability simplex.

    Three layers: the simplex boundary with the excluded band of states whose
    top occupation exceeds ``top_bound`` (a triangle hugging the top corner),
    the reachable hull polygon, and the guaranteed inner polytope.
    """
    hull = np.atleast_2d(np.asarray(hull_vertices, dtype=float))
    poly = None
    if polytope_vertices is not None:
        poly = np.atleast_2d(np.asarray(polytope_vertices, dtype=float))
        if poly.shape[1] != 3:
            raise ValueError("simplex figure requires d=3 vertex rows")
    if hull.shape[1] != 3:
        raise ValueError("simplex figure requires d=3 vertex rows")
    thr = float(top_bound)

    fig, ax = plt.subplots(figsize=(6.0, 5.5))
    corners = ternary_xy(np.eye(3))
    ax.plot(np.append(corners[:, 0], corners[0, 0]),
            np.append(corners[:, 1], corners[0, 1]),
            color="0.25", linewidth=1.0)

    if thr < 1.0:
        band = ternary_xy(np.array([
            [1.0 - thr, 0.0, thr],
            [0.0, 1.0 - thr, thr],
            [0.0, 0.0, 1.0],
        ]))
        ax.fill(band[:, 0], band[:, 1], color="0.85", zorder=1,
                label="excluded by top bound")

    hull_xy = _polygon_order(ternary_xy(hull))
    ax.fill(hull_xy[:, 0], hull_xy[:, 1], facecolor="tab:blue", alpha=0.45,
            edgecolor="tab:blue", linewidth=1.2, zorder=2, label="reachable hull")

    if poly is not None:
        poly_xy = _polygon_order(ternary_xy(poly))
        ax.fill(poly_xy[:, 0], poly_xy[:, 1], facecolor="none",
                edgecolor="tab:red", linewidth=1.4, zorder=3,
                label="guaranteed polytope")

    for label, (cx, cy) in zip(("p1", "p2", "p3"), corners):
        ax.annotate(label, (cx, cy), textcoords="offset points",
                    xytext=(0, 6 if cy > 0 else -12), ha="center")

    ax.set_aspect("equal")
    ax.set_axis_off()
    ax.legend(loc="upper left", frameon=False, fontsize=8)
    _save_deterministic(fig, path)


def render_sweep_figure(path: str, rows) -> None:
    """Plot stroke lower bounds against the fractional exponent, one line per
    dimension, log scale on the bound axis. ``rows`` is an iterable of
    (d, alpha, bound) triples; infinite bounds are dropped from the plot."""
    data: dict[int, list[tuple[float, float]]] = {}
    for d, alpha, bound in rows:
        if np.isfinite(bound):
            data.setdefault(int(d), []).append((float(alpha), float(bound)))

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for d in sorted(data):
        pts = sorted(data[d])
        ax.semilogy([a for a, _ in pts], [b for _, b in pts],
                    marker=".", markersize=3, linewidth=1.0, label=f"d = {d}")
    ax.set_xlabel("fractional exponent")
    ax.set_ylabel("stroke lower bound")
    ax.grid(True, which="both", linewidth=0.3, alpha=0.5)
    ax.legend(frameon=False, fontsize=8)
    _save_deterministic(fig, path)
