# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled force evaluation over flat arrays.

Mirrors ``pyfallback.evaluate`` exactly: same contribution emission
order and the same floating-point operation order, so both backends
produce bit-identical ledgers.  Any change here must be made in the
fallback as well (and vice versa); the parity tests enforce agreement.
"""

import numpy as np

from libc.math cimport M_PI, atan2, cos, fabs, fmod, sin, sqrt

cdef double DEG = M_PI / 180.0
cdef double RAD2DEG = 180.0 / M_PI
cdef double INF = float("inf")

# Contribution kind codes (must match forces.ForceKind).
cdef int K_COLH = 0
cdef int K_COLV = 1
cdef int K_BNDH = 2
cdef int K_BNDV = 3
cdef int K_SUP = 4
cdef int K_ADJ = 5
cdef int K_WALL = 6
cdef int K_ALIGN = 7
cdef int K_POINT = 8

cdef int SRC_NONE = -1
cdef int SRC_FLOOR = -2
cdef int SRC_CEILING = -3
cdef int SRC_WALL_BASE = -4


cdef inline void _rect_corners(double cx, double cy, double yaw, double hw, double hd,
                               double* fx, double* fy) noexcept:
    cdef double r = yaw * DEG
    cdef double c = cos(r)
    cdef double s = sin(r)
    cdef double lx, ly
    lx = 1.0 * hw; ly = 1.0 * hd
    fx[0] = cx + (lx * c - ly * s); fy[0] = cy + (lx * s + ly * c)
    lx = -1.0 * hw; ly = 1.0 * hd
    fx[1] = cx + (lx * c - ly * s); fy[1] = cy + (lx * s + ly * c)
    lx = -1.0 * hw; ly = -1.0 * hd
    fx[2] = cx + (lx * c - ly * s); fy[2] = cy + (lx * s + ly * c)
    lx = 1.0 * hw; ly = -1.0 * hd
    fx[3] = cx + (lx * c - ly * s); fy[3] = cy + (lx * s + ly * c)


cdef inline int _sat_mtv(double* axv, double* ayv, double* bxv, double* byv,
                         double cax, double cay, double cbx, double cby,
                         double* out3) noexcept:
    """Writes (axis_x, axis_y, depth) to out3; returns 0 when separated."""
    cdef double best = INF
    cdef double bax = 0.0
    cdef double bay = 0.0
    cdef int src, k, i
    cdef double p0x, p0y, p1x, p1y, ex, ey, nx, ny, ln, d
    cdef double amin, amax, bmin, bmax, hi, lo, o
    cdef double dx, dy
    for src in range(2):
        for k in range(4):
            if src == 0:
                p0x = axv[k]; p0y = ayv[k]
                p1x = axv[(k + 1) & 3]; p1y = ayv[(k + 1) & 3]
            else:
                p0x = bxv[k]; p0y = byv[k]
                p1x = bxv[(k + 1) & 3]; p1y = byv[(k + 1) & 3]
            ex = p1x - p0x
            ey = p1y - p0y
            nx = ey
            ny = -ex
            ln = sqrt(nx * nx + ny * ny)
            if ln <= 1e-15:
                continue
            nx /= ln
            ny /= ln
            amin = INF; amax = -INF
            for i in range(4):
                d = axv[i] * nx + ayv[i] * ny
                if d < amin:
                    amin = d
                if d > amax:
                    amax = d
            bmin = INF; bmax = -INF
            for i in range(4):
                d = bxv[i] * nx + byv[i] * ny
                if d < bmin:
                    bmin = d
                if d > bmax:
                    bmax = d
            hi = amax if amax < bmax else bmax
            lo = amin if amin > bmin else bmin
            o = hi - lo
            if o < 0.0:
                return 0
            if o < best:
                best = o
                bax = nx
                bay = ny
    dx = cax - cbx
    dy = cay - cby
    if bax * dx + bay * dy < 0.0:
        bax = -bax
        bay = -bay
    out3[0] = bax
    out3[1] = bay
    out3[2] = best
    return 1


cdef inline double _poly_area(double* px, double* py, int n) noexcept:
    cdef double acc = 0.0
    cdef int i, j
    if n < 3:
        return 0.0
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        acc += px[i] * py[j] - px[j] * py[i]
    return 0.5 * fabs(acc)


cdef inline int _clip_intersection(double* sxv, double* syv,
                                   double* cxv, double* cyv,
                                   double* outx, double* outy) noexcept:
    """Clip 4-gon s by convex CCW 4-gon c (Sutherland-Hodgman)."""
    cdef double bufx[16]
    cdef double bufy[16]
    cdef int n_in, n_out, k, e
    cdef double ax, ay, bx, by, abx, aby, sx, sy, ds, ex, ey, de, t
    for k in range(4):
        outx[k] = sxv[k]
        outy[k] = syv[k]
    n_out = 4
    for k in range(4):
        if n_out == 0:
            return 0
        ax = cxv[k]; ay = cyv[k]
        bx = cxv[(k + 1) & 3]; by = cyv[(k + 1) & 3]
        abx = bx - ax
        aby = by - ay
        n_in = n_out
        for e in range(n_in):
            bufx[e] = outx[e]
            bufy[e] = outy[e]
        n_out = 0
        sx = bufx[n_in - 1]; sy = bufy[n_in - 1]
        ds = abx * (sy - ay) - aby * (sx - ax)
        for e in range(n_in):
            ex = bufx[e]; ey = bufy[e]
            de = abx * (ey - ay) - aby * (ex - ax)
            if de >= 0.0:
                if ds < 0.0:
                    t = ds / (ds - de)
                    outx[n_out] = sx + t * (ex - sx)
                    outy[n_out] = sy + t * (ey - sy)
                    n_out += 1
                outx[n_out] = ex
                outy[n_out] = ey
                n_out += 1
            elif ds >= 0.0:
                t = ds / (ds - de)
                outx[n_out] = sx + t * (ex - sx)
                outy[n_out] = sy + t * (ey - sy)
                n_out += 1
            sx = ex; sy = ey
            ds = de
    return n_out


cdef inline bint _axis_aligned(double* fx, double* fy) noexcept:
    cdef double e0x = fx[1] - fx[0]
    cdef double e0y = fy[1] - fy[0]
    cdef double e1x = fx[2] - fx[1]
    cdef double e1y = fy[2] - fy[1]
    cdef bint ok0 = fabs(e0x) <= 1e-12 or fabs(e0y) <= 1e-12
    cdef bint ok1 = fabs(e1x) <= 1e-12 or fabs(e1y) <= 1e-12
    return ok0 and ok1


cdef inline double _min4(double a, double b, double c, double d) noexcept:
    cdef double m = a
    if b < m:
        m = b
    if c < m:
        m = c
    if d < m:
        m = d
    return m


cdef inline double _max4(double a, double b, double c, double d) noexcept:
    cdef double m = a
    if b > m:
        m = b
    if c > m:
        m = c
    if d > m:
        m = d
    return m


cdef inline double _overlap_area(double* axv, double* ayv, double* bxv, double* byv) noexcept:
    cdef double alox, ahix, aloy, ahiy, blox, bhix, bloy, bhiy, ox, oy
    cdef double outx[16]
    cdef double outy[16]
    cdef int n
    if _axis_aligned(axv, ayv) and _axis_aligned(bxv, byv):
        alox = _min4(axv[0], axv[1], axv[2], axv[3])
        ahix = _max4(axv[0], axv[1], axv[2], axv[3])
        aloy = _min4(ayv[0], ayv[1], ayv[2], ayv[3])
        ahiy = _max4(ayv[0], ayv[1], ayv[2], ayv[3])
        blox = _min4(bxv[0], bxv[1], bxv[2], bxv[3])
        bhix = _max4(bxv[0], bxv[1], bxv[2], bxv[3])
        bloy = _min4(byv[0], byv[1], byv[2], byv[3])
        bhiy = _max4(byv[0], byv[1], byv[2], byv[3])
        ox = (ahix if ahix < bhix else bhix) - (alox if alox > blox else blox)
        if ox <= 0.0:
            return 0.0
        oy = (ahiy if ahiy < bhiy else bhiy) - (aloy if aloy > bloy else bloy)
        if oy <= 0.0:
            return 0.0
        return ox * oy
    n = _clip_intersection(axv, ayv, bxv, byv, outx, outy)
    return _poly_area(outx, outy, n)


cdef inline double _halfplane_area(double* fx, double* fy,
                                   double nx, double ny, double offset) noexcept:
    cdef double outx[8]
    cdef double outy[8]
    cdef int n_out = 0
    cdef double sx, sy, ds, ex, ey, de, t
    cdef int e
    sx = fx[3]; sy = fy[3]
    ds = offset - (nx * sx + ny * sy)
    for e in range(4):
        ex = fx[e]; ey = fy[e]
        de = offset - (nx * ex + ny * ey)
        if de >= 0.0:
            if ds < 0.0:
                t = ds / (ds - de)
                outx[n_out] = sx + t * (ex - sx)
                outy[n_out] = sy + t * (ey - sy)
                n_out += 1
            outx[n_out] = ex
            outy[n_out] = ey
            n_out += 1
        elif ds >= 0.0:
            t = ds / (ds - de)
            outx[n_out] = sx + t * (ex - sx)
            outy[n_out] = sy + t * (ey - sy)
            n_out += 1
        sx = ex; sy = ey
        ds = de
    return _poly_area(outx, outy, n_out)


cdef inline double _pt_seg_d2(double px, double py, double ax, double ay,
                              double bx, double by, double* qx, double* qy) noexcept:
    cdef double dx = bx - ax
    cdef double dy = by - ay
    cdef double l2 = dx * dx + dy * dy
    cdef double t, ddx, ddy
    if l2 <= 0.0:
        t = 0.0
    else:
        t = ((px - ax) * dx + (py - ay) * dy) / l2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    qx[0] = ax + t * dx
    qy[0] = ay + t * dy
    ddx = px - qx[0]
    ddy = py - qy[0]
    return ddx * ddx + ddy * ddy


cdef inline void _centroid4(double* px, double* py, double* cx, double* cy) noexcept:
    cdef double sx = 0.0
    cdef double sy = 0.0
    cdef int i
    for i in range(4):
        sx += px[i]
        sy += py[i]
    cx[0] = sx / 4.0
    cy[0] = sy / 4.0


cdef inline double _nearest(double* axv, double* ayv, double* bxv, double* byv,
                            double* pax, double* pay, double* pbx, double* pby) noexcept:
    cdef double mtv[3]
    cdef double cax, cay, cbx, cby
    cdef double best, d2, qx, qy
    cdef int i, k, k1
    _centroid4(axv, ayv, &cax, &cay)
    _centroid4(bxv, byv, &cbx, &cby)
    if _sat_mtv(axv, ayv, bxv, byv, cax, cay, cbx, cby, mtv) and mtv[2] > 0.0:
        pax[0] = cax; pay[0] = cay
        pbx[0] = cbx; pby[0] = cby
        return 0.0
    best = INF
    pax[0] = axv[0]; pay[0] = ayv[0]
    pbx[0] = bxv[0]; pby[0] = byv[0]
    for i in range(4):
        for k in range(4):
            k1 = (k + 1) & 3
            d2 = _pt_seg_d2(axv[i], ayv[i], bxv[k], byv[k], bxv[k1], byv[k1], &qx, &qy)
            if d2 < best:
                best = d2
                pax[0] = axv[i]; pay[0] = ayv[i]
                pbx[0] = qx; pby[0] = qy
    for i in range(4):
        for k in range(4):
            k1 = (k + 1) & 3
            d2 = _pt_seg_d2(bxv[i], byv[i], axv[k], ayv[k], axv[k1], ayv[k1], &qx, &qy)
            if d2 < best:
                best = d2
                pax[0] = qx; pay[0] = qy
                pbx[0] = bxv[i]; pby[0] = byv[i]
    return sqrt(best)


cdef inline void _unit_or_x(double dx, double dy, double* ux, double* uy) noexcept:
    cdef double ln = sqrt(dx * dx + dy * dy)
    if ln <= 1e-12:
        ux[0] = 1.0
        uy[0] = 0.0
    else:
        ux[0] = dx / ln
        uy[0] = dy / ln


cdef inline double _shortest_signed(double delta) noexcept:
    cdef double r = fmod(delta, 360.0)
    if r <= -180.0:
        r += 360.0
    elif r > 180.0:
        r -= 360.0
    return r


def evaluate(double[:, ::1] pos, double[::1] z, double[::1] yaw,
             double[::1] half_w, double[::1] half_d, double[::1] h_eff,
             int[::1] level_id, int[::1] parent_idx, unsigned char[:, ::1] excl,
             double room_w, double room_d, double room_h,
             int[::1] adj_a, int[::1] adj_b, double[::1] adj_t,
             int[::1] wall_obj, int[::1] wall_id,
             int[::1] align_obj, int[::1] align_src, double[::1] align_angle,
             int[::1] point_obj, int[::1] point_tgt,
             double w_col, double w_vcol, double w_bnd, double w_sup,
             double w_adj, double w_wall, double w_pnt, double w_align,
             double support_threshold, double wall_tolerance, int area_mode,
             double[:, ::1] f_plane, double[::1] f_vert, double[::1] tau,
             int[::1] c_obj, unsigned char[::1] c_kind,
             double[:, ::1] c_vec, int[::1] c_src):
    """Fill accumulators and contribution buffers; returns rows written."""
    cdef int n = pos.shape[0]
    cdef int m = 0
    cdef int i, j, k, p, o, s, t_i, wid
    cdef double fx, fy, fz, tq, w
    cdef double minx, maxx, miny, maxy
    cdef double a_left, a_right, a_front, a_back
    cdef double below, above, top
    cdef double child_area, inter, mag, ux, uy
    cdef double area, ov, za, zb
    cdef double d, diff, target, dx, dy, desired
    cdef double pax, pay, pbx, pby
    cdef double c_wall
    cdef double mtv[3]

    for i in range(n):
        f_plane[i, 0] = 0.0
        f_plane[i, 1] = 0.0
        f_vert[i] = 0.0
        tau[i] = 0.0

    corners = np.empty((n, 2, 4), dtype=np.float64)
    cdef double[:, :, ::1] cnr = corners
    for i in range(n):
        _rect_corners(pos[i, 0], pos[i, 1], yaw[i], half_w[i], half_d[i],
                      &cnr[i, 0, 0], &cnr[i, 1, 0])

    # Per-object boundary and support terms.
    for i in range(n):
        minx = _min4(cnr[i, 0, 0], cnr[i, 0, 1], cnr[i, 0, 2], cnr[i, 0, 3])
        maxx = _max4(cnr[i, 0, 0], cnr[i, 0, 1], cnr[i, 0, 2], cnr[i, 0, 3])
        miny = _min4(cnr[i, 1, 0], cnr[i, 1, 1], cnr[i, 1, 2], cnr[i, 1, 3])
        maxy = _max4(cnr[i, 1, 0], cnr[i, 1, 1], cnr[i, 1, 2], cnr[i, 1, 3])
        if not (minx >= 0.0 and maxx <= room_w and miny >= 0.0 and maxy <= room_d):
            a_left = _halfplane_area(&cnr[i, 0, 0], &cnr[i, 1, 0], 1.0, 0.0, 0.0)
            a_right = _halfplane_area(&cnr[i, 0, 0], &cnr[i, 1, 0], -1.0, 0.0, -room_w)
            a_front = _halfplane_area(&cnr[i, 0, 0], &cnr[i, 1, 0], 0.0, 1.0, 0.0)
            a_back = _halfplane_area(&cnr[i, 0, 0], &cnr[i, 1, 0], 0.0, -1.0, -room_d)
            fx = a_left - a_right
            fy = a_front - a_back
            if not (a_left == 0.0 and a_right == 0.0 and a_front == 0.0 and a_back == 0.0):
                c_obj[m] = i; c_kind[m] = K_BNDH
                c_vec[m, 0] = fx; c_vec[m, 1] = fy; c_vec[m, 2] = 0.0; c_vec[m, 3] = 0.0
                c_src[m] = SRC_NONE
                m += 1
                f_plane[i, 0] += w_bnd * fx
                f_plane[i, 1] += w_bnd * fy
        below = -z[i] if z[i] < 0.0 else 0.0
        top = z[i] + h_eff[i]
        above = top - room_h if top > room_h else 0.0
        if below > 0.0:
            c_obj[m] = i; c_kind[m] = K_BNDV
            c_vec[m, 0] = 0.0; c_vec[m, 1] = 0.0; c_vec[m, 2] = below; c_vec[m, 3] = 0.0
            c_src[m] = SRC_FLOOR
            m += 1
            f_vert[i] += w_bnd * below
        if above > 0.0:
            c_obj[m] = i; c_kind[m] = K_BNDV
            c_vec[m, 0] = 0.0; c_vec[m, 1] = 0.0; c_vec[m, 2] = -above; c_vec[m, 3] = 0.0
            c_src[m] = SRC_CEILING
            m += 1
            f_vert[i] += w_bnd * (-above)
        p = parent_idx[i]
        if p >= 0:
            child_area = (2.0 * half_w[i]) * (2.0 * half_d[i])
            inter = _overlap_area(&cnr[i, 0, 0], &cnr[i, 1, 0], &cnr[p, 0, 0], &cnr[p, 1, 0])
            if child_area > 0.0 and inter / child_area < support_threshold:
                mag = child_area - inter
                _unit_or_x(pos[p, 0] - pos[i, 0], pos[p, 1] - pos[i, 1], &ux, &uy)
                fx = mag * ux
                fy = mag * uy
                c_obj[m] = i; c_kind[m] = K_SUP
                c_vec[m, 0] = fx; c_vec[m, 1] = fy; c_vec[m, 2] = 0.0; c_vec[m, 3] = 0.0
                c_src[m] = p
                m += 1
                f_plane[i, 0] += w_sup * fx
                f_plane[i, 1] += w_sup * fy

    # Collision terms for index-ordered pairs.
    for i in range(n):
        for j in range(i + 1, n):
            if level_id[i] == level_id[j]:
                if area_mode:
                    area = _overlap_area(&cnr[i, 0, 0], &cnr[i, 1, 0],
                                         &cnr[j, 0, 0], &cnr[j, 1, 0])
                    if area <= 0.0:
                        continue
                    _unit_or_x(pos[i, 0] - pos[j, 0], pos[i, 1] - pos[j, 1], &ux, &uy)
                    fx = area * ux
                    fy = area * uy
                else:
                    if not _sat_mtv(&cnr[i, 0, 0], &cnr[i, 1, 0],
                                    &cnr[j, 0, 0], &cnr[j, 1, 0],
                                    pos[i, 0], pos[i, 1], pos[j, 0], pos[j, 1], mtv):
                        continue
                    if mtv[2] <= 0.0:
                        continue
                    fx = mtv[2] * mtv[0]
                    fy = mtv[2] * mtv[1]
                c_obj[m] = i; c_kind[m] = K_COLH
                c_vec[m, 0] = fx; c_vec[m, 1] = fy; c_vec[m, 2] = 0.0; c_vec[m, 3] = 0.0
                c_src[m] = j
                m += 1
                f_plane[i, 0] += w_col * fx
                f_plane[i, 1] += w_col * fy
                c_obj[m] = j; c_kind[m] = K_COLH
                c_vec[m, 0] = -fx; c_vec[m, 1] = -fy; c_vec[m, 2] = 0.0; c_vec[m, 3] = 0.0
                c_src[m] = i
                m += 1
                f_plane[j, 0] += w_col * (-fx)
                f_plane[j, 1] += w_col * (-fy)
            else:
                if excl[i, j]:
                    continue
                if _overlap_area(&cnr[i, 0, 0], &cnr[i, 1, 0],
                                 &cnr[j, 0, 0], &cnr[j, 1, 0]) <= 0.0:
                    continue
                ov = z[i] + h_eff[i]
                zb = z[j] + h_eff[j]
                ov = (ov if ov < zb else zb) - (z[i] if z[i] > z[j] else z[j])
                if ov <= 0.0:
                    continue
                za = z[i] + 0.5 * h_eff[i]
                zb = z[j] + 0.5 * h_eff[j]
                if za >= zb:
                    fz = ov
                else:
                    fz = -ov
                c_obj[m] = i; c_kind[m] = K_COLV
                c_vec[m, 0] = 0.0; c_vec[m, 1] = 0.0; c_vec[m, 2] = fz; c_vec[m, 3] = 0.0
                c_src[m] = j
                m += 1
                f_vert[i] += w_vcol * fz
                c_obj[m] = j; c_kind[m] = K_COLV
                c_vec[m, 0] = 0.0; c_vec[m, 1] = 0.0; c_vec[m, 2] = -fz; c_vec[m, 3] = 0.0
                c_src[m] = i
                m += 1
                f_vert[j] += w_vcol * (-fz)

    # Explicit constraints, in input order.
    for k in range(adj_a.shape[0]):
        i = adj_a[k]
        j = adj_b[k]
        d = _nearest(&cnr[i, 0, 0], &cnr[i, 1, 0], &cnr[j, 0, 0], &cnr[j, 1, 0],
                     &pax, &pay, &pbx, &pby)
        diff = d - adj_t[k]
        if diff == 0.0:
            continue
        _unit_or_x(pbx - pax, pby - pay, &ux, &uy)
        fx = diff * ux
        fy = diff * uy
        c_obj[m] = i; c_kind[m] = K_ADJ
        c_vec[m, 0] = fx; c_vec[m, 1] = fy; c_vec[m, 2] = 0.0; c_vec[m, 3] = 0.0
        c_src[m] = j
        m += 1
        f_plane[i, 0] += w_adj * fx
        f_plane[i, 1] += w_adj * fy
        c_obj[m] = j; c_kind[m] = K_ADJ
        c_vec[m, 0] = -fx; c_vec[m, 1] = -fy; c_vec[m, 2] = 0.0; c_vec[m, 3] = 0.0
        c_src[m] = i
        m += 1
        f_plane[j, 0] += w_adj * (-fx)
        f_plane[j, 1] += w_adj * (-fy)

    for k in range(wall_obj.shape[0]):
        o = wall_obj[k]
        wid = wall_id[k]
        if wid == 0:
            c_wall = _min4(cnr[o, 0, 0], cnr[o, 0, 1], cnr[o, 0, 2], cnr[o, 0, 3])
            ux = -1.0; uy = 0.0
        elif wid == 1:
            c_wall = room_w - _max4(cnr[o, 0, 0], cnr[o, 0, 1], cnr[o, 0, 2], cnr[o, 0, 3])
            ux = 1.0; uy = 0.0
        elif wid == 2:
            c_wall = _min4(cnr[o, 1, 0], cnr[o, 1, 1], cnr[o, 1, 2], cnr[o, 1, 3])
            ux = 0.0; uy = -1.0
        else:
            c_wall = room_d - _max4(cnr[o, 1, 0], cnr[o, 1, 1], cnr[o, 1, 2], cnr[o, 1, 3])
            ux = 0.0; uy = 1.0
        if c_wall <= wall_tolerance:
            continue
        mag = c_wall - wall_tolerance
        fx = mag * ux
        fy = mag * uy
        c_obj[m] = o; c_kind[m] = K_WALL
        c_vec[m, 0] = fx; c_vec[m, 1] = fy; c_vec[m, 2] = 0.0; c_vec[m, 3] = 0.0
        c_src[m] = SRC_WALL_BASE - wid
        m += 1
        f_plane[o, 0] += w_wall * fx
        f_plane[o, 1] += w_wall * fy

    for k in range(align_obj.shape[0]):
        o = align_obj[k]
        s = align_src[k]
        if s >= 0:
            target = yaw[s]
        else:
            target = align_angle[k]
        tq = _shortest_signed(target - yaw[o])
        if tq == 0.0:
            continue
        c_obj[m] = o; c_kind[m] = K_ALIGN
        c_vec[m, 0] = 0.0; c_vec[m, 1] = 0.0; c_vec[m, 2] = 0.0; c_vec[m, 3] = tq
        c_src[m] = s if s >= 0 else SRC_NONE
        m += 1
        tau[o] += w_align * tq

    for k in range(point_obj.shape[0]):
        o = point_obj[k]
        t_i = point_tgt[k]
        dx = pos[t_i, 0] - pos[o, 0]
        dy = pos[t_i, 1] - pos[o, 1]
        if dx * dx + dy * dy <= 1e-24:
            continue
        desired = atan2(-dx, dy) * RAD2DEG
        tq = _shortest_signed(desired - yaw[o])
        if tq == 0.0:
            continue
        c_obj[m] = o; c_kind[m] = K_POINT
        c_vec[m, 0] = 0.0; c_vec[m, 1] = 0.0; c_vec[m, 2] = 0.0; c_vec[m, 3] = tq
        c_src[m] = t_i
        m += 1
        tau[o] += w_pnt * tq

    return m
