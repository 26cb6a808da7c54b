"""Constraint violation measures and the pseudo-forces they induce.

Every operator measures one kind of layout violation and returns raw
(unweighted) contributions.  Per-kind weights are applied only when
contributions are accumulated into net forces, so the raw values stay
inspectable.  Force conventions:

- planar forces are (fx, fy) vectors in meters (area- or depth-valued),
- vertical forces are signed scalars along +z,
- torques are signed yaw deltas in degrees,

and each contribution carries exactly one non-zero channel.

Degenerate directions (coincident centers, coincident nearest points)
fall back to +x; ties in vertical ordering favor the first object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .geometry import (
    WALL_NAMES,
    Footprint,
    Point,
    footprint,
    halfplane_area,
    interval_overlap,
    overlap_area,
    rect_corners,
    sat_mtv,
    _nearest,
)

__all__ = [
    "ForceKind",
    "PLANAR_KINDS",
    "VERTICAL_KINDS",
    "TORQUE_KINDS",
    "ForceContribution",
    "ForceLedger",
    "weight_of",
    "col_h",
    "col_v",
    "bnd_h",
    "bnd_v",
    "sup",
    "adj",
    "wall",
    "align",
    "point",
    "shortest_signed_angle",
    "accumulate",
]


class ForceKind(IntEnum):
    COL_H = 0
    COL_V = 1
    BND_H = 2
    BND_V = 3
    SUP = 4
    ADJ = 5
    WALL = 6
    ALIGN = 7
    POINT = 8


PLANAR_KINDS = frozenset(
    {ForceKind.COL_H, ForceKind.BND_H, ForceKind.SUP, ForceKind.ADJ, ForceKind.WALL}
)
VERTICAL_KINDS = frozenset({ForceKind.COL_V, ForceKind.BND_V})
TORQUE_KINDS = frozenset({ForceKind.ALIGN, ForceKind.POINT})

_WEIGHT_ATTR = {
    ForceKind.COL_H: "w_col",
    ForceKind.COL_V: "w_vcol",
    ForceKind.BND_H: "w_bnd",
    ForceKind.BND_V: "w_bnd",
    ForceKind.SUP: "w_sup",
    ForceKind.ADJ: "w_adj",
    ForceKind.WALL: "w_wall",
    ForceKind.ALIGN: "w_align",
    ForceKind.POINT: "w_pnt",
}

# Source codes used in the packed contribution buffers.
SRC_NONE = -1
SRC_FLOOR = -2
SRC_CEILING = -3
SRC_WALL_BASE = -4  # -4 - wall_index


def weight_of(kind: ForceKind, params) -> float:
    return getattr(params, _WEIGHT_ATTR[ForceKind(kind)])


@dataclass(frozen=True)
class ForceContribution:
    """One raw violation measure attributed to one object."""

    obj: str
    kind: ForceKind
    planar: Point = (0.0, 0.0)
    vertical: float = 0.0
    torque: float = 0.0
    source: str | None = None

    def magnitude(self) -> float:
        return math.hypot(self.planar[0], self.planar[1]) + abs(self.vertical) + abs(self.torque)


# Scalar operator cores --------------------------------------------------
#
# These work on precomputed footprints and are the reference semantics
# mirrored by the compiled kernel.


def _unit_or_x(dx: float, dy: float) -> Point:
    ln = math.sqrt(dx * dx + dy * dy)
    if ln <= 1e-12:
        return (1.0, 0.0)
    return (dx / ln, dy / ln)


def colh_sat_force(fa: Footprint, fb: Footprint, ca: Point, cb: Point) -> Point | None:
    """Separation force on the first object: MTV depth along the MTV axis."""
    m = sat_mtv(fa, fb, ca, cb)
    if m is None or m.depth <= 0.0:
        return None
    return (m.depth * m.axis[0], m.depth * m.axis[1])


def colh_area_force(fa: Footprint, fb: Footprint, ca: Point, cb: Point) -> Point | None:
    """Separation force on the first object: overlap area along the center axis."""
    area = overlap_area(fa, fb)
    if area <= 0.0:
        return None
    ux, uy = _unit_or_x(ca[0] - cb[0], ca[1] - cb[1])
    return (area * ux, area * uy)


def colv_force(az: float, ah: float, bz: float, bh: float) -> tuple[float, float] | None:
    """Vertical separation on (a, b): overlap extent, higher object pushed up."""
    ov = interval_overlap(az, az + ah, bz, bz + bh)
    if ov <= 0.0:
        return None
    if az + 0.5 * ah >= bz + 0.5 * bh:
        return (ov, -ov)
    return (-ov, ov)


def bndh_force(f: Footprint, room_w: float, room_d: float) -> Point | None:
    """Inward force from per-wall out-of-bounds footprint areas."""
    minx = min(f[0][0], f[1][0], f[2][0], f[3][0])
    maxx = max(f[0][0], f[1][0], f[2][0], f[3][0])
    miny = min(f[0][1], f[1][1], f[2][1], f[3][1])
    maxy = max(f[0][1], f[1][1], f[2][1], f[3][1])
    if minx >= 0.0 and maxx <= room_w and miny >= 0.0 and maxy <= room_d:
        return None
    a_left = halfplane_area(f, 1.0, 0.0, 0.0)
    a_right = halfplane_area(f, -1.0, 0.0, -room_w)
    a_front = halfplane_area(f, 0.0, 1.0, 0.0)
    a_back = halfplane_area(f, 0.0, -1.0, -room_d)
    fx = a_left - a_right
    fy = a_front - a_back
    if a_left == 0.0 and a_right == 0.0 and a_front == 0.0 and a_back == 0.0:
        return None
    return (fx, fy)


def bndv_penetrations(z: float, h: float, room_h: float) -> tuple[float, float]:
    """(below-floor depth, above-ceiling depth), each >= 0."""
    below = -z if z < 0.0 else 0.0
    top = z + h
    above = top - room_h if top > room_h else 0.0
    return below, above


def sup_force(
    fc: Footprint,
    child_area: float,
    fp: Footprint,
    cc: Point,
    cp: Point,
    threshold: float,
) -> Point | None:
    """Pull toward the parent center when coverage drops below threshold."""
    inter = overlap_area(fc, fp)
    if child_area <= 0.0 or inter / child_area >= threshold:
        return None
    mag = child_area - inter
    ux, uy = _unit_or_x(cp[0] - cc[0], cp[1] - cc[1])
    return (mag * ux, mag * uy)


def adj_force(fa: Footprint, fb: Footprint, target: float) -> Point | None:
    """Spring force on the first object toward/away from the second.

    Magnitude is |nearest distance - target|; overlapping footprints
    repel along the centroid axis.
    """
    d, pa, pb = _nearest(fa, fb)
    diff = d - target
    if diff == 0.0:
        return None
    ux, uy = _unit_or_x(pb[0] - pa[0], pb[1] - pa[1])
    return (diff * ux, diff * uy)


def wall_force(
    f: Footprint, wall_index: int, room_w: float, room_d: float, tolerance: float
) -> Point | None:
    """Pull toward a wall when the clearance exceeds the tolerance."""
    if wall_index == 0:
        c = min(f[0][0], f[1][0], f[2][0], f[3][0])
        ux, uy = -1.0, 0.0
    elif wall_index == 1:
        c = room_w - max(f[0][0], f[1][0], f[2][0], f[3][0])
        ux, uy = 1.0, 0.0
    elif wall_index == 2:
        c = min(f[0][1], f[1][1], f[2][1], f[3][1])
        ux, uy = 0.0, -1.0
    else:
        c = room_d - max(f[0][1], f[1][1], f[2][1], f[3][1])
        ux, uy = 0.0, 1.0
    if c <= tolerance:
        return None
    mag = c - tolerance
    return (mag * ux, mag * uy)


def shortest_signed_angle(delta_deg: float) -> float:
    """Map an angle difference to the signed shortest arc in (-180, 180]."""
    r = math.fmod(delta_deg, 360.0)
    if r <= -180.0:
        r += 360.0
    elif r > 180.0:
        r -= 360.0
    return r


def align_delta(yaw: float, target_yaw: float) -> float | None:
    d = shortest_signed_angle(target_yaw - yaw)
    if d == 0.0:
        return None
    return d


def point_delta(x: float, y: float, yaw: float, tx: float, ty: float) -> float | None:
    """Torque turning yaw toward a target position (yaw 0 faces +y)."""
    dx = tx - x
    dy = ty - y
    if dx * dx + dy * dy <= 1e-24:
        return None
    desired = math.degrees(math.atan2(-dx, dy))
    return align_delta(yaw, desired)


# Object-level operators -------------------------------------------------


def col_h(a, b, mode: str = "sat") -> list[ForceContribution]:
    """Horizontal collision forces for a same-level pair (both objects)."""
    fa = footprint(a)
    fb = footprint(b)
    if mode == "sat":
        r = colh_sat_force(fa, fb, a.p_plane, b.p_plane)
    elif mode == "area":
        r = colh_area_force(fa, fb, a.p_plane, b.p_plane)
    else:
        raise ValueError(f"unknown collision mode: {mode!r}")
    if r is None:
        return []
    fx, fy = r
    return [
        ForceContribution(a.id, ForceKind.COL_H, planar=(fx, fy), source=b.id),
        ForceContribution(b.id, ForceKind.COL_H, planar=(-fx, -fy), source=a.id),
    ]


def col_v(a, b) -> list[ForceContribution]:
    """Vertical collision forces for a cross-level pair (both objects)."""
    fa = footprint(a)
    fb = footprint(b)
    if overlap_area(fa, fb) <= 0.0:
        return []
    r = colv_force(a.p_vert, a.eff_dims[2], b.p_vert, b.eff_dims[2])
    if r is None:
        return []
    fza, fzb = r
    return [
        ForceContribution(a.id, ForceKind.COL_V, vertical=fza, source=b.id),
        ForceContribution(b.id, ForceKind.COL_V, vertical=fzb, source=a.id),
    ]


def bnd_h(o, room) -> list[ForceContribution]:
    r = bndh_force(footprint(o), room.width, room.depth)
    if r is None:
        return []
    return [ForceContribution(o.id, ForceKind.BND_H, planar=r)]


def bnd_v(o, room) -> list[ForceContribution]:
    below, above = bndv_penetrations(o.p_vert, o.eff_dims[2], room.height)
    out = []
    if below > 0.0:
        out.append(ForceContribution(o.id, ForceKind.BND_V, vertical=below, source="floor"))
    if above > 0.0:
        out.append(ForceContribution(o.id, ForceKind.BND_V, vertical=-above, source="ceiling"))
    return out


def sup(child, parent, threshold: float = 0.8) -> list[ForceContribution]:
    """Support force pulling an under-covered child onto its parent."""
    w, d, _ = child.eff_dims
    r = sup_force(
        footprint(child), w * d, footprint(parent), child.p_plane, parent.p_plane, threshold
    )
    if r is None:
        return []
    return [ForceContribution(child.id, ForceKind.SUP, planar=r, source=parent.id)]


def adj(a, b, target: float) -> list[ForceContribution]:
    r = adj_force(footprint(a), footprint(b), target)
    if r is None:
        return []
    fx, fy = r
    return [
        ForceContribution(a.id, ForceKind.ADJ, planar=(fx, fy), source=b.id),
        ForceContribution(b.id, ForceKind.ADJ, planar=(-fx, -fy), source=a.id),
    ]


def wall(o, wall_name: str, room, tolerance: float = 0.02) -> list[ForceContribution]:
    r = wall_force(
        footprint(o), WALL_NAMES.index(wall_name), room.width, room.depth, tolerance
    )
    if r is None:
        return []
    return [ForceContribution(o.id, ForceKind.WALL, planar=r, source=wall_name)]


def align(o, target_yaw: float, source: str | None = None) -> list[ForceContribution]:
    d = align_delta(o.yaw, target_yaw)
    if d is None:
        return []
    return [ForceContribution(o.id, ForceKind.ALIGN, torque=d, source=source)]


def point(o, target) -> list[ForceContribution]:
    d = point_delta(o.p_plane[0], o.p_plane[1], o.yaw, target.p_plane[0], target.p_plane[1])
    if d is None:
        return []
    return [ForceContribution(o.id, ForceKind.POINT, torque=d, source=target.id)]


# Ledger ------------------------------------------------------------------


class ForceLedger:
    """Accumulated forces plus the raw contribution rows behind them.

    The accumulators are rebuilt every evaluation; the displacement
    history ring and evasion state persist across an optimization run.
    """

    def __init__(self, ids: tuple[str, ...], window: int, capacity: int):
        n = len(ids)
        self.ids = tuple(ids)
        self.index = {oid: i for i, oid in enumerate(self.ids)}
        self.window = int(window)
        self.f_plane = np.zeros((n, 2), dtype=np.float64)
        self.f_vert = np.zeros(n, dtype=np.float64)
        self.tau = np.zeros(n, dtype=np.float64)
        self.c_obj = np.zeros(capacity, dtype=np.int32)
        self.c_kind = np.zeros(capacity, dtype=np.uint8)
        self.c_vec = np.zeros((capacity, 4), dtype=np.float64)
        self.c_src = np.zeros(capacity, dtype=np.int32)
        self.count = 0
        self.hist = np.zeros((n, self.window, 3), dtype=np.float64)
        self.hist_len = 0
        self.hist_head = 0
        self.evade_timer = np.zeros(n, dtype=np.int64)
        self.evade_force = np.zeros((n, 2), dtype=np.float64)

    def __len__(self) -> int:
        return len(self.ids)

    def residual(self) -> float:
        """Total unresolved force: sum of planar norm, |vertical| and |torque|."""
        total = 0.0
        fp = self.f_plane
        fv = self.f_vert
        tq = self.tau
        for i in range(len(self.ids)):
            total += math.sqrt(fp[i, 0] * fp[i, 0] + fp[i, 1] * fp[i, 1])
            total += abs(fv[i])
            total += abs(tq[i])
        return float(total)

    def decode_source(self, code: int) -> str | None:
        if code >= 0:
            return self.ids[code]
        if code == SRC_NONE:
            return None
        if code == SRC_FLOOR:
            return "floor"
        if code == SRC_CEILING:
            return "ceiling"
        return WALL_NAMES[SRC_WALL_BASE - code]

    def _row(self, r: int) -> ForceContribution:
        return ForceContribution(
            obj=self.ids[self.c_obj[r]],
            kind=ForceKind(int(self.c_kind[r])),
            planar=(float(self.c_vec[r, 0]), float(self.c_vec[r, 1])),
            vertical=float(self.c_vec[r, 2]),
            torque=float(self.c_vec[r, 3]),
            source=self.decode_source(int(self.c_src[r])),
        )

    def contributions(self) -> dict[str, list[ForceContribution]]:
        out: dict[str, list[ForceContribution]] = {oid: [] for oid in self.ids}
        for r in range(self.count):
            out[self.ids[self.c_obj[r]]].append(self._row(r))
        return out

    def contributions_for(self, obj_id: str) -> list[ForceContribution]:
        i = self.index[obj_id]
        return [self._row(r) for r in range(self.count) if self.c_obj[r] == i]

    def iter_rows(self):
        """Yield (obj_index, kind, fx, fy, fz, torque, src_code) raw rows."""
        for r in range(self.count):
            v = self.c_vec[r]
            yield (
                int(self.c_obj[r]),
                int(self.c_kind[r]),
                float(v[0]),
                float(v[1]),
                float(v[2]),
                float(v[3]),
                int(self.c_src[r]),
            )

    def weighted_planar_rows(self, i: int, params) -> list[Point]:
        out = []
        for r in range(self.count):
            if int(self.c_obj[r]) != i:
                continue
            kind = ForceKind(int(self.c_kind[r]))
            if kind not in PLANAR_KINDS:
                continue
            w = weight_of(kind, params)
            out.append((w * float(self.c_vec[r, 0]), w * float(self.c_vec[r, 1])))
        return out

    def vertical_rows(self, i: int) -> list[tuple[ForceKind, float, int]]:
        out = []
        for r in range(self.count):
            if int(self.c_obj[r]) != i:
                continue
            kind = ForceKind(int(self.c_kind[r]))
            if kind not in VERTICAL_KINDS:
                continue
            out.append((kind, float(self.c_vec[r, 2]), int(self.c_src[r])))
        return out

    def push_displacement(self, dplane: np.ndarray, dz: np.ndarray) -> None:
        col = self.hist_head
        self.hist[:, col, 0] = dplane[:, 0]
        self.hist[:, col, 1] = dplane[:, 1]
        self.hist[:, col, 2] = dz
        self.hist_head = (col + 1) % self.window
        if self.hist_len < self.window:
            self.hist_len += 1

    def planar_activity(self, i: int) -> tuple[float, float]:
        """(cumulative path length, net displacement) over the stored window."""
        m = self.hist_len
        h = self.hist[i, :m]
        cum = float(np.hypot(h[:, 0], h[:, 1]).sum())
        net = float(math.hypot(float(h[:, 0].sum()), float(h[:, 1].sum())))
        return cum, net

    def vertical_activity(self, i: int) -> tuple[float, float]:
        m = self.hist_len
        h = self.hist[i, :m, 2]
        return float(np.abs(h).sum()), float(abs(h.sum()))


def accumulate(scene, constraints, params) -> "ForceLedger":
    """Evaluate every constraint force for a scene into a fresh ledger.

    Contributions are emitted in a fixed, documented order so the
    accumulated sums are bit-reproducible: per-object boundary and
    support terms first (ascending index), then collision terms for
    index-ordered pairs, then the explicit constraint lists in input
    order.
    """
    from ._runtime import Runtime

    rt = Runtime(scene, constraints, params)
    rt.evaluate()
    return rt.ledger
