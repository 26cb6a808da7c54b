"""Planar geometry primitives for oriented rectangles.

Conventions used throughout the package:

- A footprint is the XY projection of a box: four corner points in
  counter-clockwise order starting at the local (+w/2, +d/2) corner.
- Yaw is measured in degrees, counter-clockwise about +z, with yaw 0
  facing +y.
- Rooms are axis-aligned with the origin at the left/front corner, so
  the interior is [0, width] x [0, depth].

The compiled kernel re-implements these routines in C.  Keep the order
of arithmetic operations stable here: the two implementations are held
to exact agreement by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "Mtv",
    "Point",
    "Footprint",
    "rect_corners",
    "footprint",
    "centroid",
    "polygon_area",
    "sat_mtv",
    "clip_intersection",
    "overlap_area",
    "halfplane_area",
    "interval_overlap",
    "z_interval_overlap",
    "nearest_distance",
    "nearest_points",
    "wall_clearance",
    "point_in_convex",
    "WALL_NAMES",
]

Point = tuple[float, float]
Footprint = Sequence[Point]

WALL_NAMES = ("left", "right", "front", "back")

_DEG = math.pi / 180.0

# Local corner offsets, counter-clockwise starting at (+hw, +hd).
_CORNER_SIGNS = ((1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0))


@dataclass(frozen=True)
class Mtv:
    """Minimum translation vector between two overlapping footprints.

    ``axis`` is unit length and points from the second footprint's
    center toward the first's.  ``depth`` is the overlap extent along
    ``axis``; it is zero when the footprints merely touch.
    """

    axis: Point
    depth: float


def rect_corners(
    cx: float, cy: float, yaw_deg: float, half_w: float, half_d: float
) -> tuple[Point, Point, Point, Point]:
    """Corners of an oriented rectangle, CCW from the (+w, +d) corner."""
    r = yaw_deg * _DEG
    c = math.cos(r)
    s = math.sin(r)
    out = []
    for sx, sy in _CORNER_SIGNS:
        lx = sx * half_w
        ly = sy * half_d
        out.append((cx + (lx * c - ly * s), cy + (lx * s + ly * c)))
    return tuple(out)


def footprint(obj) -> tuple[Point, Point, Point, Point]:
    """XY footprint of an object with ``p_plane``, ``yaw`` and ``eff_dims``."""
    w, d, _ = obj.eff_dims
    x, y = obj.p_plane
    return rect_corners(x, y, obj.yaw, 0.5 * w, 0.5 * d)


def centroid(f: Footprint) -> Point:
    """Mean of the corner points."""
    sx = 0.0
    sy = 0.0
    for p in f:
        sx += p[0]
        sy += p[1]
    n = float(len(f))
    return (sx / n, sy / n)


def polygon_area(pts: Sequence[Point]) -> float:
    """Unsigned area of a simple polygon (shoelace formula)."""
    n = len(pts)
    if n < 3:
        return 0.0
    acc = 0.0
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return 0.5 * abs(acc)


def sat_mtv(
    a: Footprint,
    b: Footprint,
    center_a: Point | None = None,
    center_b: Point | None = None,
) -> Mtv | None:
    """Separating-axis test for two convex footprints.

    Returns the minimum translation vector, or None when a separating
    axis exists.  Candidate axes are the edge normals of ``a`` followed
    by those of ``b``; on equal depths the earliest axis wins.  The
    axis is flipped, if needed, to point from ``b``'s center toward
    ``a``'s; when the centers coincide the enumeration-order direction
    is kept.

    Args:
        a: First footprint (CCW corner points).
        b: Second footprint.
        center_a: Optional center override for orienting the axis;
            defaults to the corner mean.
        center_b: Optional center override for ``b``.
    """
    best = math.inf
    bax = 0.0
    bay = 0.0
    na = len(a)
    nb = len(b)
    for poly, n in ((a, na), (b, nb)):
        for k in range(n):
            p0 = poly[k]
            p1 = poly[(k + 1) % n]
            ex = p1[0] - p0[0]
            ey = p1[1] - p0[1]
            nx = ey
            ny = -ex
            ln = math.sqrt(nx * nx + ny * ny)
            if ln <= 1e-15:
                continue
            nx /= ln
            ny /= ln
            amin = math.inf
            amax = -math.inf
            for p in a:
                d = p[0] * nx + p[1] * ny
                if d < amin:
                    amin = d
                if d > amax:
                    amax = d
            bmin = math.inf
            bmax = -math.inf
            for p in b:
                d = p[0] * nx + p[1] * ny
                if d < bmin:
                    bmin = d
                if d > bmax:
                    bmax = d
            hi = amax if amax < bmax else bmax
            lo = amin if amin > bmin else bmin
            o = hi - lo
            if o < 0.0:
                return None
            if o < best:
                best = o
                bax = nx
                bay = ny
    if center_a is None:
        center_a = centroid(a)
    if center_b is None:
        center_b = centroid(b)
    dx = center_a[0] - center_b[0]
    dy = center_a[1] - center_b[1]
    if bax * dx + bay * dy < 0.0:
        bax = -bax
        bay = -bay
    return Mtv((bax, bay), best)


def clip_intersection(subject: Footprint, clip: Footprint) -> list[Point]:
    """Intersection polygon of two convex CCW polygons (Sutherland-Hodgman)."""
    output = [(p[0], p[1]) for p in subject]
    nc = len(clip)
    for k in range(nc):
        if not output:
            return []
        ax, ay = clip[k][0], clip[k][1]
        bx, by = clip[(k + 1) % nc][0], clip[(k + 1) % nc][1]
        abx = bx - ax
        aby = by - ay
        incoming = output
        output = []
        sx, sy = incoming[-1]
        ds = abx * (sy - ay) - aby * (sx - ax)
        for ex, ey in incoming:
            de = abx * (ey - ay) - aby * (ex - ax)
            if de >= 0.0:
                if ds < 0.0:
                    t = ds / (ds - de)
                    output.append((sx + t * (ex - sx), sy + t * (ey - sy)))
                output.append((ex, ey))
            elif ds >= 0.0:
                t = ds / (ds - de)
                output.append((sx + t * (ex - sx), sy + t * (ey - sy)))
            sx, sy = ex, ey
            ds = de
    return output


def _axis_aligned(f: Footprint) -> bool:
    e0x = f[1][0] - f[0][0]
    e0y = f[1][1] - f[0][1]
    e1x = f[2][0] - f[1][0]
    e1y = f[2][1] - f[1][1]
    ok0 = abs(e0x) <= 1e-12 or abs(e0y) <= 1e-12
    ok1 = abs(e1x) <= 1e-12 or abs(e1y) <= 1e-12
    return ok0 and ok1


def overlap_area(a: Footprint, b: Footprint) -> float:
    """Area of the intersection of two convex footprints.

    Axis-aligned pairs take an interval-arithmetic fast path; the
    general case clips one polygon against the other.
    """
    if _axis_aligned(a) and _axis_aligned(b):
        alox = min(a[0][0], a[1][0], a[2][0], a[3][0])
        ahix = max(a[0][0], a[1][0], a[2][0], a[3][0])
        aloy = min(a[0][1], a[1][1], a[2][1], a[3][1])
        ahiy = max(a[0][1], a[1][1], a[2][1], a[3][1])
        blox = min(b[0][0], b[1][0], b[2][0], b[3][0])
        bhix = max(b[0][0], b[1][0], b[2][0], b[3][0])
        bloy = min(b[0][1], b[1][1], b[2][1], b[3][1])
        bhiy = max(b[0][1], b[1][1], b[2][1], b[3][1])
        ox = (ahix if ahix < bhix else bhix) - (alox if alox > blox else blox)
        if ox <= 0.0:
            return 0.0
        oy = (ahiy if ahiy < bhiy else bhiy) - (aloy if aloy > bloy else bloy)
        if oy <= 0.0:
            return 0.0
        return ox * oy
    return polygon_area(clip_intersection(a, b))


def halfplane_area(f: Footprint, nx: float, ny: float, offset: float) -> float:
    """Area of the part of ``f`` inside the halfplane nx*x + ny*y <= offset."""
    output = [(p[0], p[1]) for p in f]
    if not output:
        return 0.0
    clipped: list[Point] = []
    sx, sy = output[-1]
    ds = offset - (nx * sx + ny * sy)
    for ex, ey in output:
        de = offset - (nx * ex + ny * ey)
        if de >= 0.0:
            if ds < 0.0:
                t = ds / (ds - de)
                clipped.append((sx + t * (ex - sx), sy + t * (ey - sy)))
            clipped.append((ex, ey))
        elif ds >= 0.0:
            t = ds / (ds - de)
            clipped.append((sx + t * (ex - sx), sy + t * (ey - sy)))
        sx, sy = ex, ey
        ds = de
    return polygon_area(clipped)


def interval_overlap(lo1: float, hi1: float, lo2: float, hi2: float) -> float:
    """Length of the intersection of two closed intervals (0 if disjoint)."""
    hi = hi1 if hi1 < hi2 else hi2
    lo = lo1 if lo1 > lo2 else lo2
    d = hi - lo
    return d if d > 0.0 else 0.0


def z_interval_overlap(a, b) -> float:
    """Vertical extent shared by two objects' occupied z intervals."""
    ah = a.eff_dims[2]
    bh = b.eff_dims[2]
    return interval_overlap(a.p_vert, a.p_vert + ah, b.p_vert, b.p_vert + bh)


def _point_segment_d2(
    px: float, py: float, ax: float, ay: float, bx: float, by: float
) -> tuple[float, float, float]:
    dx = bx - ax
    dy = by - ay
    l2 = dx * dx + dy * dy
    if l2 <= 0.0:
        t = 0.0
    else:
        t = ((px - ax) * dx + (py - ay) * dy) / l2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    qx = ax + t * dx
    qy = ay + t * dy
    ddx = px - qx
    ddy = py - qy
    return ddx * ddx + ddy * ddy, qx, qy


def _nearest(a: Footprint, b: Footprint) -> tuple[float, Point, Point]:
    m = sat_mtv(a, b)
    if m is not None and m.depth > 0.0:
        return 0.0, centroid(a), centroid(b)
    best = math.inf
    bpa: Point = (a[0][0], a[0][1])
    bpb: Point = (b[0][0], b[0][1])
    nb = len(b)
    na = len(a)
    for p in a:
        for k in range(nb):
            q0 = b[k]
            q1 = b[(k + 1) % nb]
            d2, qx, qy = _point_segment_d2(p[0], p[1], q0[0], q0[1], q1[0], q1[1])
            if d2 < best:
                best = d2
                bpa = (p[0], p[1])
                bpb = (qx, qy)
    for p in b:
        for k in range(na):
            q0 = a[k]
            q1 = a[(k + 1) % na]
            d2, qx, qy = _point_segment_d2(p[0], p[1], q0[0], q0[1], q1[0], q1[1])
            if d2 < best:
                best = d2
                bpa = (qx, qy)
                bpb = (p[0], p[1])
    return math.sqrt(best), bpa, bpb


def nearest_distance(a: Footprint, b: Footprint) -> float:
    """Smallest planar distance between two footprints (0 if overlapping)."""
    d, _, _ = _nearest(a, b)
    return d


def nearest_points(a: Footprint, b: Footprint) -> tuple[Point, Point]:
    """Closest point pair between two footprints.

    For overlapping footprints the pair degenerates to the two corner
    means; callers needing a direction must handle that case.
    """
    _, pa, pb = _nearest(a, b)
    return pa, pb


def wall_clearance(f: Footprint, wall: str, room) -> float:
    """Signed distance from a footprint to a room wall.

    Positive means the footprint is inside the room with that much gap;
    negative means it protrudes past the wall plane.
    """
    if wall == "left":
        return min(f[0][0], f[1][0], f[2][0], f[3][0])
    if wall == "right":
        return room.width - max(f[0][0], f[1][0], f[2][0], f[3][0])
    if wall == "front":
        return min(f[0][1], f[1][1], f[2][1], f[3][1])
    if wall == "back":
        return room.depth - max(f[0][1], f[1][1], f[2][1], f[3][1])
    raise ValueError(f"unknown wall name: {wall!r}")


def point_in_convex(f: Footprint, x: float, y: float, eps: float = 1e-12) -> bool:
    """True if (x, y) lies inside or on a convex CCW polygon."""
    n = len(f)
    for k in range(n):
        ax, ay = f[k]
        bx, by = f[(k + 1) % n]
        if (bx - ax) * (y - ay) - (by - ay) * (x - ax) < -eps:
            return False
    return True
