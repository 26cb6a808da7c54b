"""Geometric plausibility metrics for finished layouts.

The collision test reuses the engine's own pair eligibility rules
(same-level footprint overlap, cross-level vertical overlap with
support chains excluded) so a clean metrics report and a zero-force
ledger agree about what counts as a collision.  Navigability is a
grid walk: a floor cell is free when nothing at standing height covers
its center, and the score is the share of all floor cells lying in the
single largest 4-connected free region.

Support accounting: an object on another object or on the floor is
"supported" when at least ``support_threshold`` of its footprint area
lies over the parent surface (the room rectangle, for floor objects).
Wall- and ceiling-mounted objects are attached rather than resting, so
they always count as supported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import footprint, interval_overlap, overlap_area, rect_corners
from .scene import SceneState

__all__ = [
    "MetricsReport",
    "collision_pairs",
    "support_ratio",
    "is_out_of_bounds",
    "navigability",
    "evaluate",
    "evaluate_corpus",
    "aggregate",
    "REPORT_COLUMNS",
]

# Column names used by per-scene and aggregate CSV output.
REPORT_COLUMNS = ("COL_ob", "COL_sc", "SUP", "OOB", "NAV")

_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.int8)


@dataclass(frozen=True)
class MetricsReport:
    """Plausibility scores for one scene.

    ``col_ob``, ``sup``, ``oob`` and ``nav`` are percentages in
    [0, 100]; ``col_sc`` flags whether any collision exists at all.
    """

    col_ob: float
    col_sc: bool
    sup: float
    oob: float
    nav: float

    def row(self) -> tuple[float, float, float, float, float]:
        return (self.col_ob, 100.0 if self.col_sc else 0.0, self.sup, self.oob, self.nav)


def collision_pairs(scene: SceneState, eps: float = 1e-6) -> list[tuple[str, str]]:
    """All colliding object pairs, in index order.

    Same-level pairs collide when their footprints overlap by more than
    ``eps`` area; cross-level pairs additionally need vertical extent
    overlap, and pairs along one support chain never collide.
    """
    objs = scene.objects
    fps = [footprint(o) for o in objs]
    out: list[tuple[str, str]] = []
    for i in range(len(objs)):
        a = objs[i]
        for j in range(i + 1, len(objs)):
            b = objs[j]
            if overlap_area(fps[i], fps[j]) <= eps:
                continue
            if scene.same_level(a.id, b.id):
                out.append((a.id, b.id))
                continue
            if scene.is_ancestor(a.id, b.id) or scene.is_ancestor(b.id, a.id):
                continue
            if interval_overlap(a.p_vert, a.z_top, b.p_vert, b.z_top) > eps:
                out.append((a.id, b.id))
    return out


def support_ratio(scene: SceneState, obj_id: str) -> float:
    """Fraction of an object's footprint resting on its parent surface."""
    o = scene.get(obj_id)
    if o.parent.kind in ("wall", "ceiling"):
        return 1.0
    w, d, _ = o.eff_dims
    area = w * d
    if area <= 0.0:
        return 1.0
    fp = footprint(o)
    if o.parent.kind == "floor":
        room = scene.room
        base = rect_corners(
            0.5 * room.width, 0.5 * room.depth, 0.0, 0.5 * room.width, 0.5 * room.depth
        )
    else:
        base = footprint(scene.get(o.parent.ref))
    return overlap_area(fp, base) / area


def is_out_of_bounds(scene: SceneState, obj_id: str, eps: float = 1e-6) -> bool:
    """True when any part of the object pokes outside the room volume."""
    o = scene.get(obj_id)
    if o.p_vert < -eps or o.z_top > scene.room.height + eps:
        return True
    fp = footprint(o)
    w, d, _ = o.eff_dims
    area = w * d
    room = scene.room
    base = rect_corners(
        0.5 * room.width, 0.5 * room.depth, 0.0, 0.5 * room.width, 0.5 * room.depth
    )
    return area - overlap_area(fp, base) > eps


def navigability(
    scene: SceneState, cell: float = 0.1, clearance: float = 1.8
) -> float:
    """Largest reachable free-floor share, in percent.

    The floor is rasterized into ``cell``-sized squares (full cells
    only); a cell is blocked when some object's footprint covers its
    center and the object's vertical extent intersects the standing
    band [0, clearance).
    """
    room = scene.room
    nx = int(room.width / cell + 1e-9)
    ny = int(room.depth / cell + 1e-9)
    if nx < 1 or ny < 1:
        return 100.0
    cx = (np.arange(nx) + 0.5) * cell
    cy = (np.arange(ny) + 0.5) * cell
    gx, gy = np.meshgrid(cx, cy, indexing="ij")
    free = np.ones((nx, ny), dtype=bool)
    for o in scene.objects:
        if interval_overlap(o.p_vert, o.z_top, 0.0, clearance) <= 0.0:
            continue
        fp = footprint(o)
        inside = np.ones((nx, ny), dtype=bool)
        for k in range(4):
            x0, y0 = fp[k]
            x1, y1 = fp[(k + 1) % 4]
            # Counter-clockwise corners: inside is the non-negative side.
            inside &= (x1 - x0) * (gy - y0) - (y1 - y0) * (gx - x0) >= 0.0
        free &= ~inside
    total = nx * ny
    if not free.any():
        return 0.0
    labels, count = ndimage.label(free, structure=_FOUR_CONNECTED)
    if count == 0:
        return 0.0
    sizes = ndimage.sum_labels(free, labels, index=np.arange(1, count + 1))
    return 100.0 * float(sizes.max()) / total


def evaluate(
    scene: SceneState,
    collision_eps: float = 1e-6,
    support_threshold: float = 0.8,
    oob_eps: float = 1e-6,
    nav_cell: float = 0.1,
    nav_clearance: float = 1.8,
) -> MetricsReport:
    """Score one scene on collision, support, bounds and navigability."""
    n = len(scene.objects)
    if n == 0:
        return MetricsReport(col_ob=0.0, col_sc=False, sup=100.0, oob=0.0, nav=100.0)
    pairs = collision_pairs(scene, collision_eps)
    hit: set[str] = set()
    for a, b in pairs:
        hit.add(a)
        hit.add(b)
    supported = sum(
        1 for o in scene.objects if support_ratio(scene, o.id) >= support_threshold
    )
    oob = sum(1 for o in scene.objects if is_out_of_bounds(scene, o.id, oob_eps))
    return MetricsReport(
        col_ob=100.0 * len(hit) / n,
        col_sc=bool(pairs),
        sup=100.0 * supported / n,
        oob=100.0 * oob / n,
        nav=navigability(scene, nav_cell, nav_clearance),
    )


def evaluate_corpus(
    items, **kwargs
) -> tuple[list[tuple[str, MetricsReport]], dict[str, float]]:
    """Score (name, scene) pairs and aggregate the lot.

    Returns per-scene reports plus a mean row; ``COL_sc`` aggregates to
    the percentage of scenes with at least one collision.
    """
    rows = [(name, evaluate(scene, **kwargs)) for name, scene in items]
    return rows, aggregate(r for _, r in rows)


def aggregate(reports) -> dict[str, float]:
    reports = list(reports)
    if not reports:
        return {k: math.nan for k in REPORT_COLUMNS}
    return {
        "COL_ob": sum(r.col_ob for r in reports) / len(reports),
        "COL_sc": 100.0 * sum(1 for r in reports if r.col_sc) / len(reports),
        "SUP": sum(r.sup for r in reports) / len(reports),
        "OOB": sum(r.oob for r in reports) / len(reports),
        "NAV": sum(r.nav for r in reports) / len(reports),
    }
