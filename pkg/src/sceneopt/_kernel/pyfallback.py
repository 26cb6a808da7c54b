"""Pure-Python force evaluation over flat arrays.

Reference implementation of the kernel contract.  The compiled kernel
mirrors this routine's arithmetic and emission order exactly; the two
are held to bit-identical outputs by the parity tests.

Contribution rows are emitted in a fixed order: per-object boundary and
support terms (ascending object index), collision terms for pairs in
(i, j) index order, then adjacency, wall, align and point terms in
constraint input order.  Accumulators are updated in emission order.
"""

from __future__ import annotations

from ..forces import (
    SRC_CEILING,
    SRC_FLOOR,
    SRC_NONE,
    SRC_WALL_BASE,
    ForceKind,
    adj_force,
    align_delta,
    bndh_force,
    bndv_penetrations,
    colh_area_force,
    colh_sat_force,
    colv_force,
    point_delta,
    sup_force,
    wall_force,
)
from ..geometry import overlap_area, rect_corners

_K_COLH = int(ForceKind.COL_H)
_K_COLV = int(ForceKind.COL_V)
_K_BNDH = int(ForceKind.BND_H)
_K_BNDV = int(ForceKind.BND_V)
_K_SUP = int(ForceKind.SUP)
_K_ADJ = int(ForceKind.ADJ)
_K_WALL = int(ForceKind.WALL)
_K_ALIGN = int(ForceKind.ALIGN)
_K_POINT = int(ForceKind.POINT)


def evaluate(
    pos,
    z,
    yaw,
    half_w,
    half_d,
    h_eff,
    level_id,
    parent_idx,
    excl,
    room_w,
    room_d,
    room_h,
    adj_a,
    adj_b,
    adj_t,
    wall_obj,
    wall_id,
    align_obj,
    align_src,
    align_angle,
    point_obj,
    point_tgt,
    w_col,
    w_vcol,
    w_bnd,
    w_sup,
    w_adj,
    w_wall,
    w_pnt,
    w_align,
    support_threshold,
    wall_tolerance,
    area_mode,
    f_plane,
    f_vert,
    tau,
    c_obj,
    c_kind,
    c_vec,
    c_src,
) -> int:
    """Fill accumulators and contribution buffers; returns rows written."""
    n = pos.shape[0]
    f_plane[:] = 0.0
    f_vert[:] = 0.0
    tau[:] = 0.0
    m = 0

    xs = [float(pos[i, 0]) for i in range(n)]
    ys = [float(pos[i, 1]) for i in range(n)]
    zs = [float(z[i]) for i in range(n)]
    hs = [float(h_eff[i]) for i in range(n)]
    yaws = [float(yaw[i]) for i in range(n)]
    corners = [
        rect_corners(xs[i], ys[i], yaws[i], float(half_w[i]), float(half_d[i]))
        for i in range(n)
    ]

    def emit(i: int, kind: int, fx: float, fy: float, fz: float, tq: float, src: int, w: float) -> None:
        nonlocal m
        c_obj[m] = i
        c_kind[m] = kind
        c_vec[m, 0] = fx
        c_vec[m, 1] = fy
        c_vec[m, 2] = fz
        c_vec[m, 3] = tq
        c_src[m] = src
        m += 1
        f_plane[i, 0] += w * fx
        f_plane[i, 1] += w * fy
        f_vert[i] += w * fz
        tau[i] += w * tq

    # Per-object boundary and support terms.
    for i in range(n):
        r = bndh_force(corners[i], room_w, room_d)
        if r is not None:
            emit(i, _K_BNDH, r[0], r[1], 0.0, 0.0, SRC_NONE, w_bnd)
        below, above = bndv_penetrations(zs[i], hs[i], room_h)
        if below > 0.0:
            emit(i, _K_BNDV, 0.0, 0.0, below, 0.0, SRC_FLOOR, w_bnd)
        if above > 0.0:
            emit(i, _K_BNDV, 0.0, 0.0, -above, 0.0, SRC_CEILING, w_bnd)
        p = int(parent_idx[i])
        if p >= 0:
            child_area = (2.0 * float(half_w[i])) * (2.0 * float(half_d[i]))
            r = sup_force(
                corners[i],
                child_area,
                corners[p],
                (xs[i], ys[i]),
                (xs[p], ys[p]),
                support_threshold,
            )
            if r is not None:
                emit(i, _K_SUP, r[0], r[1], 0.0, 0.0, p, w_sup)

    # Collision terms for index-ordered pairs.
    for i in range(n):
        for j in range(i + 1, n):
            if level_id[i] == level_id[j]:
                if area_mode:
                    r = colh_area_force(corners[i], corners[j], (xs[i], ys[i]), (xs[j], ys[j]))
                else:
                    r = colh_sat_force(corners[i], corners[j], (xs[i], ys[i]), (xs[j], ys[j]))
                if r is not None:
                    emit(i, _K_COLH, r[0], r[1], 0.0, 0.0, j, w_col)
                    emit(j, _K_COLH, -r[0], -r[1], 0.0, 0.0, i, w_col)
            else:
                if excl[i, j]:
                    continue
                if overlap_area(corners[i], corners[j]) <= 0.0:
                    continue
                rv = colv_force(zs[i], hs[i], zs[j], hs[j])
                if rv is not None:
                    emit(i, _K_COLV, 0.0, 0.0, rv[0], 0.0, j, w_vcol)
                    emit(j, _K_COLV, 0.0, 0.0, rv[1], 0.0, i, w_vcol)

    # Explicit constraints, in input order.
    for k in range(adj_a.shape[0]):
        a = int(adj_a[k])
        b = int(adj_b[k])
        r = adj_force(corners[a], corners[b], float(adj_t[k]))
        if r is not None:
            emit(a, _K_ADJ, r[0], r[1], 0.0, 0.0, b, w_adj)
            emit(b, _K_ADJ, -r[0], -r[1], 0.0, 0.0, a, w_adj)

    for k in range(wall_obj.shape[0]):
        o = int(wall_obj[k])
        wid = int(wall_id[k])
        r = wall_force(corners[o], wid, room_w, room_d, wall_tolerance)
        if r is not None:
            emit(o, _K_WALL, r[0], r[1], 0.0, 0.0, SRC_WALL_BASE - wid, w_wall)

    for k in range(align_obj.shape[0]):
        o = int(align_obj[k])
        s = int(align_src[k])
        target = yaws[s] if s >= 0 else float(align_angle[k])
        d = align_delta(yaws[o], target)
        if d is not None:
            emit(o, _K_ALIGN, 0.0, 0.0, 0.0, d, s if s >= 0 else SRC_NONE, w_align)

    for k in range(point_obj.shape[0]):
        o = int(point_obj[k])
        t = int(point_tgt[k])
        d = point_delta(xs[o], ys[o], yaws[o], xs[t], ys[t])
        if d is not None:
            emit(o, _K_POINT, 0.0, 0.0, 0.0, d, t, w_pnt)

    return m
