import math

import numpy as np
import pytest

from sceneopt.forces import (
    ForceContribution,
    ForceKind,
    ForceLedger,
    PLANAR_KINDS,
    TORQUE_KINDS,
    VERTICAL_KINDS,
    accumulate,
    adj,
    adj_force,
    align,
    align_delta,
    bnd_h,
    bnd_v,
    bndh_force,
    bndv_penetrations,
    col_h,
    col_v,
    colh_area_force,
    colh_sat_force,
    colv_force,
    point,
    point_delta,
    shortest_signed_angle,
    sup,
    sup_force,
    wall,
    wall_force,
    weight_of,
)
from sceneopt.geometry import rect_corners
from sceneopt.optimizer import OptimizerParams
from sceneopt.scene import (
    AgainstWall,
    AlignWith,
    ConstraintSet,
    ObjectState,
    ParentRef,
    RoomSpec,
    SceneState,
    derive_all_verticals,
)


def sq(cx, cy, half=0.5, yaw=0.0):
    return rect_corners(cx, cy, yaw, half, half)


def box(oid, x, y, yaw=0.0, dims=(1.0, 1.0, 0.5), parent=ParentRef("floor"), z=0.0):
    return ObjectState(oid, oid, (x, y), z, yaw, dims, parent=parent)


class TestKindSets:
    def test_partition(self):
        all_kinds = set(ForceKind)
        assert PLANAR_KINDS | VERTICAL_KINDS | TORQUE_KINDS == all_kinds
        assert not (PLANAR_KINDS & VERTICAL_KINDS)
        assert not (PLANAR_KINDS & TORQUE_KINDS)

    def test_weight_of(self):
        p = OptimizerParams()
        assert weight_of(ForceKind.COL_H, p) == p.w_col
        assert weight_of(ForceKind.BND_V, p) == p.w_bnd
        assert weight_of(ForceKind.POINT, p) == p.w_pnt


class TestCollisionCores:
    def test_sat_overlapping_pair(self):
        f = colh_sat_force(sq(0, 0), sq(0.6, 0), (0, 0), (0.6, 0))
        assert f == pytest.approx((-0.4, 0.0))

    def test_sat_disjoint(self):
        assert colh_sat_force(sq(0, 0), sq(2, 0), (0, 0), (2, 0)) is None

    def test_sat_touching_is_none(self):
        # zero-depth contact produces no force
        assert colh_sat_force(sq(0, 0), sq(1.0, 0), (0, 0), (1.0, 0)) is None

    def test_area_overlapping_pair(self):
        f = colh_area_force(sq(0, 0), sq(0.6, 0), (0, 0), (0.6, 0))
        assert f == pytest.approx((-0.4, 0.0))

    def test_area_coincident_centers_fall_back_to_x(self):
        f = colh_area_force(sq(0, 0), sq(0, 0), (0, 0), (0, 0))
        assert f == pytest.approx((1.0, 0.0))

    def test_colv_higher_pushed_up(self):
        assert colv_force(0.0, 1.0, 0.5, 1.0) == pytest.approx((-0.5, 0.5))
        assert colv_force(0.5, 1.0, 0.0, 1.0) == pytest.approx((0.5, -0.5))

    def test_colv_tie_favors_first(self):
        assert colv_force(0.0, 1.0, 0.0, 1.0) == (1.0, -1.0)

    def test_colv_disjoint(self):
        assert colv_force(0.0, 0.5, 0.5, 0.5) is None
        assert colv_force(0.0, 0.5, 0.8, 0.5) is None


class TestBoundaryCores:
    def test_left_protrusion(self):
        # box spans x in [-0.4, 0.2]: 0.4 m of the 0.8 m deep box is outside
        f = rect_corners(-0.1, 1.0, 0.0, 0.3, 0.4)
        assert bndh_force(f, 4.0, 3.0) == pytest.approx((0.4 * 0.8, 0.0))

    def test_corner_protrusion_combines_axes(self):
        f = rect_corners(-0.1, -0.2, 0.0, 0.3, 0.4)
        fx, fy = bndh_force(f, 4.0, 3.0)
        assert fx == pytest.approx(0.4 * 0.8)
        assert fy == pytest.approx(0.6 * 0.6)

    def test_inside_is_none(self):
        assert bndh_force(sq(2.0, 1.5), 4.0, 3.0) is None

    def test_bndv(self):
        assert bndv_penetrations(-0.1, 1.0, 2.5) == pytest.approx((0.1, 0.0))
        assert bndv_penetrations(2.0, 1.0, 2.5) == pytest.approx((0.0, 0.5))
        assert bndv_penetrations(0.5, 1.0, 2.5) == (0.0, 0.0)


class TestSupportCore:
    def test_undercovered_child_pulled_in(self):
        child = sq(0.8, 0.0)
        parent = rect_corners(0.0, 0.0, 0.0, 1.0, 1.0)
        f = sup_force(child, 1.0, parent, (0.8, 0.0), (0.0, 0.0), 0.8)
        assert f == pytest.approx((-0.3, 0.0))

    def test_covered_child_is_none(self):
        child = sq(0.2, 0.0)
        parent = rect_corners(0.0, 0.0, 0.0, 1.0, 1.0)
        assert sup_force(child, 1.0, parent, (0.2, 0.0), (0.0, 0.0), 0.8) is None


class TestAdjCore:
    def test_spring_pulls_toward_target_gap(self):
        f = adj_force(sq(0, 0), sq(2, 0), 0.4)
        assert f == pytest.approx((0.6, 0.0))

    def test_spring_pushes_past_target_gap(self):
        f = adj_force(sq(0, 0), sq(2, 0), 1.5)
        assert f == pytest.approx((-0.5, 0.0))

    def test_overlap_repels_along_centroid_axis(self):
        f = adj_force(sq(0, 0), sq(0.5, 0), 0.2)
        assert f == pytest.approx((-0.2, 0.0))

    def test_exact_distance_is_none(self):
        assert adj_force(sq(0, 0), sq(2, 0), 1.0) is None


class TestWallCore:
    def test_pull_toward_left(self):
        f = wall_force(sq(0.8, 1.0, half=0.3), 0, 4.0, 3.0, 0.02)
        assert f == pytest.approx((-0.48, 0.0))

    def test_pull_toward_each_wall(self):
        fp = sq(2.0, 1.5, half=0.5)
        assert wall_force(fp, 0, 4.0, 3.0, 0.0) == pytest.approx((-1.5, 0.0))
        assert wall_force(fp, 1, 4.0, 3.0, 0.0) == pytest.approx((1.5, 0.0))
        assert wall_force(fp, 2, 4.0, 3.0, 0.0) == pytest.approx((0.0, -1.0))
        assert wall_force(fp, 3, 4.0, 3.0, 0.0) == pytest.approx((0.0, 1.0))

    def test_within_tolerance_is_none(self):
        assert wall_force(sq(0.51, 1.0), 0, 4.0, 3.0, 0.02) is None


class TestAngleCores:
    @pytest.mark.parametrize(
        "delta,expect",
        [
            (0.0, 0.0),
            (90.0, 90.0),
            (180.0, 180.0),
            (181.0, -179.0),
            (-180.0, 180.0),
            (-90.0, -90.0),
            (359.0, -1.0),
            (540.0, 180.0),
            (720.0, 0.0),
        ],
    )
    def test_shortest_signed_angle(self, delta, expect):
        assert shortest_signed_angle(delta) == pytest.approx(expect)

    def test_align_delta(self):
        assert align_delta(10.0, 10.0) is None
        assert align_delta(350.0, 10.0) == pytest.approx(20.0)
        assert align_delta(10.0, 350.0) == pytest.approx(-20.0)

    def test_point_delta_quadrants(self):
        # yaw 0 faces +y; target to the left means a positive (CCW) turn
        assert point_delta(0, 0, 0.0, -1.0, 0.0) == pytest.approx(90.0)
        assert point_delta(0, 0, 0.0, 1.0, 0.0) == pytest.approx(-90.0)
        assert point_delta(0, 0, 0.0, 0.0, 1.0) is None  # already facing
        assert point_delta(0, 0, 0.0, 1.0, -1.0) == pytest.approx(-135.0)

    def test_point_delta_coincident_is_none(self):
        assert point_delta(1.0, 1.0, 30.0, 1.0, 1.0) is None


class TestObjectOps:
    def test_col_h_newton_pair(self):
        a, b = box("a", 1.6, 1.5), box("b", 2.2, 1.5)
        rows = col_h(a, b, "sat")
        assert [r.obj for r in rows] == ["a", "b"]
        assert rows[0].source == "b" and rows[1].source == "a"
        assert rows[0].planar == pytest.approx((-0.4, 0.0))
        assert rows[1].planar == pytest.approx((0.4, 0.0))
        # Newton pair is an exact negation, not an approximate one
        assert rows[0].planar[0] == -rows[1].planar[0]
        assert rows[0].planar[1] == -rows[1].planar[1]

    def test_col_h_unknown_mode(self):
        with pytest.raises(ValueError, match="mode"):
            col_h(box("a", 0, 0), box("b", 0.5, 0), "hull")

    def test_col_v_requires_footprint_overlap(self):
        a = box("a", 1.0, 1.0, dims=(1, 1, 1))
        b = box("b", 3.0, 1.0, dims=(1, 1, 1))
        assert col_v(a, b) == []
        c = box("c", 1.2, 1.0, dims=(1, 1, 1), z=0.5, parent=ParentRef("wall", "left"))
        rows = col_v(a, c)
        assert rows[0].vertical == -0.5 and rows[1].vertical == 0.5

    def test_bnd_h_emits_single_row(self):
        room = RoomSpec(4.0, 3.0, 2.5)
        rows = bnd_h(box("a", -0.1, 1.0, dims=(0.6, 0.8, 0.5)), room)
        assert len(rows) == 1
        assert rows[0].kind == ForceKind.BND_H
        assert rows[0].planar == pytest.approx((0.4 * 0.8, 0.0))
        assert rows[0].source is None

    def test_bnd_v_sources(self):
        room = RoomSpec(4.0, 3.0, 2.5)
        low = box("a", 1, 1, z=-0.1, parent=ParentRef("wall", "left"))
        rows = bnd_v(low, room)
        assert rows == [ForceContribution("a", ForceKind.BND_V, vertical=0.1, source="floor")]
        high = box("b", 1, 1, z=2.3, parent=ParentRef("wall", "left"))
        rows = bnd_v(high, room)
        assert rows[0].vertical == pytest.approx(-0.3)
        assert rows[0].source == "ceiling"

    def test_sup_row(self):
        parent = box("crate", 2.0, 1.5, dims=(2.0, 2.0, 0.6))
        child = box("cup", 2.8, 1.5, parent=ParentRef("object", "crate"), z=0.6)
        rows = sup(child, parent)
        assert len(rows) == 1
        assert rows[0].obj == "cup" and rows[0].source == "crate"
        assert rows[0].planar == pytest.approx((-0.3, 0.0))

    def test_adj_newton_pair(self):
        rows = adj(box("a", 1.0, 1.0), box("b", 3.0, 1.0), 0.4)
        assert rows[0].planar == pytest.approx((0.6, 0.0))
        assert rows[1].planar == pytest.approx((-0.6, 0.0))
        assert rows[0].planar[0] == -rows[1].planar[0]

    def test_wall_row(self):
        room = RoomSpec(4.0, 3.0, 2.5)
        rows = wall(box("a", 0.8, 1.0, dims=(0.6, 0.6, 0.5)), "left", room)
        assert rows[0].planar == pytest.approx((-0.48, 0.0))
        assert rows[0].source == "left"

    def test_align_and_point_rows(self):
        rows = align(box("a", 1, 1, yaw=30.0), 90.0, source="b")
        assert rows[0].torque == pytest.approx(60.0)
        assert rows[0].kind == ForceKind.ALIGN
        rows = point(box("a", 1, 1), box("t", 0.0, 1.0))
        assert rows[0].torque == pytest.approx(90.0)
        assert rows[0].source == "t"

    def test_magnitude_sums_channels(self):
        c = ForceContribution("a", ForceKind.COL_H, planar=(3.0, 4.0), vertical=-2.0, torque=1.5)
        assert c.magnitude() == pytest.approx(5.0 + 2.0 + 1.5)


class TestLedger:
    def make(self):
        scene = derive_all_verticals(
            SceneState(
                RoomSpec(4.0, 3.0, 2.5),
                (
                    box("a", 1.6, 1.5),
                    box("b", 2.2, 1.5),
                    box("shelf", 3.0, 1.5, z=-0.1, dims=(0.6, 0.6, 0.5), parent=ParentRef("wall", "right")),
                ),
            )
        )
        cons = ConstraintSet(
            against_wall=(AgainstWall("a", "left"),),
            align_with=(AlignWith("b", angle=30.0),),
        )
        return scene, cons, OptimizerParams()

    def test_hand_summed_net_forces(self):
        scene, cons, params = self.make()
        led = accumulate(scene, cons, params)
        # recompute the collision depth and wall clearance with the same
        # primitive operations so the comparison is bit-exact
        depth = (1.6 + 0.5) - (2.2 - 0.5)
        gap = (1.6 - 0.5) - 0.02
        fa = params.w_col * -depth + params.w_wall * -gap
        assert led.f_plane[0, 0] == fa
        assert led.f_plane[0, 1] == 0.0
        assert led.f_plane[1, 0] == params.w_col * depth
        assert led.f_vert[2] == params.w_bnd * 0.1
        assert led.tau[1] == params.w_align * 30.0

    def test_weighted_rows_match_net(self):
        scene, cons, params = self.make()
        led = accumulate(scene, cons, params)
        for i, oid in enumerate(led.ids):
            fx = 0.0
            fy = 0.0
            for wx, wy in led.weighted_planar_rows(i, params):
                fx += wx
                fy += wy
            assert led.f_plane[i, 0] == fx
            assert led.f_plane[i, 1] == fy
            fz = 0.0
            for kind, v, _src in led.vertical_rows(i):
                fz += weight_of(kind, params) * v
            assert led.f_vert[i] == fz

    def test_residual_formula(self):
        scene, cons, params = self.make()
        led = accumulate(scene, cons, params)
        expect = 0.0
        for i in range(len(led)):
            expect += math.hypot(led.f_plane[i, 0], led.f_plane[i, 1])
            expect += abs(led.f_vert[i]) + abs(led.tau[i])
        r = led.residual()
        assert isinstance(r, float)
        assert r == expect

    def test_decoded_sources(self):
        scene, cons, params = self.make()
        led = accumulate(scene, cons, params)
        rows = led.contributions_for("a")
        assert {r.kind for r in rows} == {ForceKind.COL_H, ForceKind.WALL}
        by_kind = {r.kind: r for r in rows}
        assert by_kind[ForceKind.COL_H].source == "b"
        assert by_kind[ForceKind.WALL].source == "left"
        shelf_rows = led.contributions_for("shelf")
        assert shelf_rows[0].source == "floor"

    def test_contributions_groups_every_row(self):
        scene, cons, params = self.make()
        led = accumulate(scene, cons, params)
        groups = led.contributions()
        assert sum(len(v) for v in groups.values()) == led.count
        assert set(groups) == set(led.ids)

    def test_satisfied_scene_has_no_rows(self):
        scene = derive_all_verticals(
            SceneState(RoomSpec(4.0, 3.0, 2.5), (box("a", 1.0, 1.0), box("b", 3.0, 2.0)))
        )
        led = accumulate(scene, ConstraintSet(), OptimizerParams())
        assert led.count == 0
        assert led.residual() == 0.0

    def test_push_displacement_ring(self):
        led = ForceLedger(("a",), window=3, capacity=4)
        steps = [(1.0, 0.0, 0.5), (0.0, 1.0, 0.0), (1.0, 0.0, -0.5), (0.0, 2.0, 1.0)]
        for dx, dy, dz in steps:
            led.push_displacement(np.array([[dx, dy]]), np.array([dz]))
        assert led.hist_len == 3
        # oldest entry (1, 0, 0.5) has been overwritten
        cum, net = led.planar_activity(0)
        assert cum == pytest.approx(1.0 + 1.0 + 2.0)
        assert net == pytest.approx(math.hypot(1.0, 3.0))
        vcum, vnet = led.vertical_activity(0)
        assert vcum == pytest.approx(1.5)
        assert vnet == pytest.approx(0.5)
