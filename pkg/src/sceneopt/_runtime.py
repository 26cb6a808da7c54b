"""Array-backed run state shared by the optimizer and the force kernels.

A Runtime packs a scene and its constraints into flat numpy arrays once,
then supports repeated evaluate/step cycles without touching the
object-level model.  Topology (levels, parent links, collision
eligibility) is fixed for the lifetime of the run; poses and vertical
scales are mutable.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import _kernel
from .forces import ForceLedger
from .scene import ConstraintSet, SceneState

__all__ = ["Runtime"]

_PARENT_KIND_CODE = {"floor": 0, "ceiling": 1, "wall": 2, "object": 3}


class Runtime:
    def __init__(
        self,
        scene: SceneState,
        constraints: ConstraintSet | None = None,
        params=None,
        kernel=None,
    ):
        if params is None:
            from .optimizer import OptimizerParams

            params = OptimizerParams()
        constraints = constraints if constraints is not None else ConstraintSet()
        scene.validate()
        constraints.validate(scene)
        self.params = params
        self.constraints = constraints
        self.room = scene.room
        self.objects = tuple(scene.objects)
        self.kernel = kernel if kernel is not None else _kernel.evaluate
        n = len(self.objects)
        self.n = n

        ids = tuple(o.id for o in self.objects)
        index = {oid: i for i, oid in enumerate(ids)}

        self.pos = np.zeros((n, 2), dtype=np.float64)
        self.z = np.zeros(n, dtype=np.float64)
        self.yaw = np.zeros(n, dtype=np.float64)
        self.half_w = np.zeros(n, dtype=np.float64)
        self.half_d = np.zeros(n, dtype=np.float64)
        self.base_h = np.zeros(n, dtype=np.float64)
        self.scale_z = np.zeros(n, dtype=np.float64)
        self.h_eff = np.zeros(n, dtype=np.float64)
        self.parent_idx = np.full(n, -1, dtype=np.int32)
        self.parent_kind = np.zeros(n, dtype=np.int32)

        levels: dict = {}
        self.level_id = np.zeros(n, dtype=np.int32)
        for i, o in enumerate(self.objects):
            self.pos[i, 0], self.pos[i, 1] = o.p_plane
            self.z[i] = o.p_vert
            self.yaw[i] = o.yaw % 360.0
            w, d, h = o.base_dims
            sx, sy, sz = o.scale
            self.half_w[i] = 0.5 * (w * sx)
            self.half_d[i] = 0.5 * (d * sy)
            self.base_h[i] = h
            self.scale_z[i] = sz
            self.h_eff[i] = h * sz
            self.parent_kind[i] = _PARENT_KIND_CODE[o.parent.kind]
            if o.parent.kind == "object":
                self.parent_idx[i] = index[o.parent.ref]
            self.level_id[i] = levels.setdefault(o.parent, len(levels))

        # Vertical collisions never apply along a support chain.
        self.excl = np.zeros((n, n), dtype=np.uint8)
        for i, o in enumerate(self.objects):
            for aid in scene.ancestors(o.id):
                j = index[aid]
                self.excl[i, j] = 1
                self.excl[j, i] = 1

        self.topo = [index[oid] for oid in scene.topo_order()]
        self.derives_z = (self.parent_kind == 0) | (self.parent_kind == 3)
        self.free_z = ~self.derives_z

        def _idx(oid: str) -> int:
            return index[oid]

        adj = constraints.adjacent
        self.adj_a = np.array([_idx(c.a) for c in adj], dtype=np.int32)
        self.adj_b = np.array([_idx(c.b) for c in adj], dtype=np.int32)
        self.adj_t = np.array([c.distance for c in adj], dtype=np.float64)
        aw = constraints.against_wall
        from .geometry import WALL_NAMES

        self.wall_obj = np.array([_idx(c.obj) for c in aw], dtype=np.int32)
        self.wall_id = np.array([WALL_NAMES.index(c.wall) for c in aw], dtype=np.int32)
        al = constraints.align_with
        self.align_obj = np.array([_idx(c.obj) for c in al], dtype=np.int32)
        self.align_src = np.array(
            [(_idx(c.target) if c.target is not None else -1) for c in al], dtype=np.int32
        )
        self.align_angle = np.array(
            [(c.angle if c.angle is not None else 0.0) for c in al], dtype=np.float64
        )
        pt = constraints.point_toward
        self.point_obj = np.array([_idx(c.obj) for c in pt], dtype=np.int32)
        self.point_tgt = np.array([_idx(c.target) for c in pt], dtype=np.int32)

        capacity = (
            4 * n
            + n * max(0, n - 1)
            + 2 * len(adj)
            + len(aw)
            + len(al)
            + len(pt)
        )
        self.ledger = ForceLedger(ids, params.window, capacity)
        self._area_mode = 1 if params.collision_mode == "area" else 0

    def evaluate(self) -> None:
        """Run one force evaluation into the ledger's accumulators."""
        led = self.ledger
        led.count = self.kernel(
            self.pos,
            self.z,
            self.yaw,
            self.half_w,
            self.half_d,
            self.h_eff,
            self.level_id,
            self.parent_idx,
            self.excl,
            float(self.room.width),
            float(self.room.depth),
            float(self.room.height),
            self.adj_a,
            self.adj_b,
            self.adj_t,
            self.wall_obj,
            self.wall_id,
            self.align_obj,
            self.align_src,
            self.align_angle,
            self.point_obj,
            self.point_tgt,
            float(self.params.w_col),
            float(self.params.w_vcol),
            float(self.params.w_bnd),
            float(self.params.w_sup),
            float(self.params.w_adj),
            float(self.params.w_wall),
            float(self.params.w_pnt),
            float(self.params.w_align),
            float(self.params.support_threshold),
            float(self.params.wall_tolerance),
            self._area_mode,
            led.f_plane,
            led.f_vert,
            led.tau,
            led.c_obj,
            led.c_kind,
            led.c_vec,
            led.c_src,
        )

    def set_scale_z(self, i: int, new_sz: float) -> None:
        self.scale_z[i] = new_sz
        self.h_eff[i] = self.base_h[i] * new_sz

    def step(self) -> tuple[np.ndarray, np.ndarray]:
        """Apply one explicit integration step; returns (planar, z) displacements.

        Children ride their parent's planar delta; derived z values are
        recomputed parents-first afterward.
        """
        p = self.params
        led = self.ledger
        total = p.eta_trans * led.f_plane
        for i in self.topo:
            pi = self.parent_idx[i]
            if pi >= 0:
                total[i, 0] += total[pi, 0]
                total[i, 1] += total[pi, 1]
        self.pos += total
        old_z = self.z.copy()
        self.z[self.free_z] += p.eta_vert * led.f_vert[self.free_z]
        ratio = np.clip(led.tau / p.rot_ramp_deg, -1.0, 1.0)
        self.yaw = np.mod(self.yaw + p.eta_rot * ratio, 360.0)
        self.yaw[self.yaw >= 360.0] = 0.0
        for i in self.topo:
            if self.derives_z[i]:
                pi = self.parent_idx[i]
                self.z[i] = 0.0 if pi < 0 else self.z[pi] + self.h_eff[pi]
        return total, self.z - old_z

    def to_scene(self) -> SceneState:
        objects = []
        for i, o in enumerate(self.objects):
            sx, sy, _ = o.scale
            objects.append(
                dataclasses.replace(
                    o,
                    p_plane=(float(self.pos[i, 0]), float(self.pos[i, 1])),
                    p_vert=float(self.z[i]),
                    yaw=float(self.yaw[i]),
                    scale=(sx, sy, float(self.scale_z[i])),
                )
            )
        return SceneState(self.room, tuple(objects))
