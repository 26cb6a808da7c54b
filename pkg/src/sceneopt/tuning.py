"""Hyperparameter search for the layout optimizer.

The objective for one scene is how much violation is left when the run
stops: every raw contribution magnitude from a fresh force evaluation
of the final layout, plus the residual of that evaluation.  Collisions
are re-measured in area mode for the objective no matter which mode the
engine ran, so the penalty stays in area units and two parameter sets
are compared on the same scale.

The search is seeded random sampling with median pruning: a trial is
abandoned mid-corpus when its running mean penalty exceeds the median
of what completed trials had spent by the same scene.  Completed trials
are never retroactively dropped, and the baseline defaults can be
injected as the first trial so the winner can only match or beat them.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .forces import accumulate
from .optimizer import OptimizerParams, optimize
from .scene import (
    Adjacent,
    AgainstWall,
    AlignWith,
    ConstraintSet,
    ObjectState,
    ParentRef,
    PointToward,
    RoomSpec,
    SceneState,
    derive_all_verticals,
    load_scene,
    save_scene,
)

__all__ = [
    "ParamRange",
    "SearchSpace",
    "TrialRecord",
    "penalty",
    "search",
    "gen_corpus",
    "save_corpus",
    "load_corpus",
]

# Fields the search may vary, with their sampling scale.  Weights and
# the evasion gain span orders of magnitude, so they sample log-uniform;
# step sizes and the evade duration sample linearly.
LOG_FIELDS = (
    "w_col",
    "w_vcol",
    "w_bnd",
    "w_sup",
    "w_adj",
    "w_wall",
    "w_pnt",
    "w_align",
    "lambda_evade",
)
LINEAR_FIELDS = ("eta_trans", "eta_vert", "eta_rot", "t_deadlock")


@dataclass(frozen=True)
class ParamRange:
    lo: float
    hi: float
    scale: str = "linear"
    integer: bool = False

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and self.lo <= 0:
            raise ValueError("log ranges need lo > 0")

    def sample(self, rng: np.random.Generator) -> float:
        if self.scale == "log":
            v = float(10.0 ** rng.uniform(math.log10(self.lo), math.log10(self.hi)))
        else:
            v = float(rng.uniform(self.lo, self.hi))
        if self.integer:
            v = int(round(v))
            v = min(max(v, int(math.ceil(self.lo))), int(math.floor(self.hi)))
        return v


@dataclass
class SearchSpace:
    """Sampling ranges plus the trial budget and pruning cadence."""

    ranges: dict[str, ParamRange]
    budget: int = 200
    prune_interval: int = 1
    include_baseline: bool = True

    def __post_init__(self) -> None:
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.prune_interval < 1:
            raise ValueError("prune_interval must be >= 1")
        known = {f.name for f in dataclasses.fields(OptimizerParams)}
        unknown = set(self.ranges) - known
        if unknown:
            raise ValueError(f"unknown parameter names: {sorted(unknown)}")

    @classmethod
    def around_defaults(
        cls,
        budget: int = 200,
        span: float = 10.0,
        base: OptimizerParams | None = None,
        **kwargs,
    ) -> "SearchSpace":
        """Ranges spanning ``span`` times below/above each default."""
        base = base if base is not None else OptimizerParams()
        ranges: dict[str, ParamRange] = {}
        for name in LOG_FIELDS:
            d = getattr(base, name)
            ranges[name] = ParamRange(d / span, d * span, scale="log")
        for name in LINEAR_FIELDS:
            d = getattr(base, name)
            if name == "t_deadlock":
                ranges[name] = ParamRange(
                    max(2.0, d / span), d * span, scale="linear", integer=True
                )
            else:
                ranges[name] = ParamRange(d / span, d * span, scale="linear")
        return cls(ranges=ranges, budget=budget, **kwargs)

    def sample(self, rng: np.random.Generator, base: OptimizerParams | None = None) -> OptimizerParams:
        base = base if base is not None else OptimizerParams()
        values = {}
        for name in sorted(self.ranges):
            v = self.ranges[name].sample(rng)
            values[name] = int(v) if name == "t_deadlock" else v
        p = dataclasses.replace(base, **values)
        p.validate()
        return p


@dataclass
class TrialRecord:
    """One sampled parameter set and how it fared across the corpus."""

    index: int
    params: OptimizerParams
    scene_penalties: list[float] = field(default_factory=list)
    pruned: bool = False
    seed: int = 0

    @property
    def mean_penalty(self) -> float:
        if not self.scene_penalties:
            return math.inf
        return sum(self.scene_penalties) / len(self.scene_penalties)

    def prefix_mean(self, upto: int) -> float:
        part = self.scene_penalties[: upto + 1]
        return sum(part) / len(part)


def penalty(result, params: OptimizerParams) -> float:
    """Terminal violation mass plus terminal residual for one run.

    Runs whose integration diverged to non-finite poses score infinity,
    so unstable parameter draws lose to anything that stayed finite.
    """
    for o in result.scene.objects:
        values = (*o.p_plane, o.p_vert, o.yaw)
        if not all(math.isfinite(v) for v in values):
            return math.inf
    area_params = dataclasses.replace(params, collision_mode="area")
    led = accumulate(result.scene, result.constraints, area_params)
    total = 0.0
    for r in range(led.count):
        v = led.c_vec[r]
        total += math.hypot(float(v[0]), float(v[1])) + abs(float(v[2])) + abs(float(v[3]))
    return total + led.residual()


def search(
    corpus,
    space: SearchSpace | None = None,
    seed: int = 0,
    base: OptimizerParams | None = None,
) -> tuple[TrialRecord, list[TrialRecord]]:
    """Random-search the space over a corpus; returns (best, all trials).

    ``corpus`` is a list of (scene, constraints) pairs.  The best trial
    is the completed one with the lowest mean penalty (earliest index on
    ties); pruned trials never win.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("corpus is empty")
    if space is None:
        space = SearchSpace.around_defaults()
    base = base if base is not None else OptimizerParams()
    rng = np.random.default_rng(seed)
    n_scenes = len(corpus)
    trials: list[TrialRecord] = []
    completed: list[TrialRecord] = []
    for index in range(space.budget):
        if index == 0 and space.include_baseline:
            params = dataclasses.replace(base)
        else:
            params = space.sample(rng, base)
        rec = TrialRecord(index=index, params=params, seed=seed)
        for si, (scene, cons) in enumerate(corpus):
            res = optimize(scene, cons, params, seed=seed)
            rec.scene_penalties.append(penalty(res, params))
            last = si == n_scenes - 1
            if last or not completed or (si + 1) % space.prune_interval != 0:
                continue
            median = float(np.median([t.prefix_mean(si) for t in completed]))
            if rec.prefix_mean(si) > median:
                rec.pruned = True
                break
        trials.append(rec)
        if not rec.pruned:
            completed.append(rec)
    best = min(completed, key=lambda t: (t.mean_penalty, t.index))
    return best, trials


# Synthetic corpus ---------------------------------------------------------


def _gen_scene(rng: np.random.Generator) -> tuple[SceneState, ConstraintSet]:
    width = float(rng.uniform(3.0, 8.0))
    depth = float(rng.uniform(3.0, 8.0))
    height = float(rng.uniform(2.5, 3.2))
    room = RoomSpec(width, depth, height)
    n = int(rng.integers(5, 21))

    # Footprint budget keeps rooms solvable; drawn dims shrink to fit.
    dims = []
    for _ in range(n):
        w = float(rng.uniform(0.35, 1.1))
        d = float(rng.uniform(0.35, 1.1))
        h = float(rng.uniform(0.25, 0.9))
        dims.append([w, d, h])
    budget = 0.14 * width * depth
    total = sum(w * d for w, d, _ in dims)
    if total > budget:
        f = math.sqrt(budget / total)
        for row in dims:
            row[0] *= f
            row[1] *= f

    k = 1 + n // 7
    centers = [
        (float(rng.uniform(0.3 * width, 0.7 * width)),
         float(rng.uniform(0.3 * depth, 0.7 * depth)))
        for _ in range(k)
    ]

    objects: list[ObjectState] = []
    floor_ids: list[str] = []
    for i in range(n):
        oid = f"obj{i:02d}"
        w, d, h = dims[i]
        roll = float(rng.random())
        stackable = [
            o for o in objects
            if o.parent.kind == "floor" and min(o.eff_dims[0], o.eff_dims[1]) >= 0.5
        ]
        if roll < 0.12 and stackable:
            parent = stackable[int(rng.integers(0, len(stackable)))]
            pw, pd, _ = parent.eff_dims
            cw = min(w, 0.45 * pw)
            cd = min(d, 0.45 * pd)
            ch = float(rng.uniform(0.05, 0.3))
            jx = float(rng.uniform(-0.08, 0.08))
            jy = float(rng.uniform(-0.08, 0.08))
            objects.append(
                ObjectState(
                    oid, f"item {i}",
                    (parent.p_plane[0] + jx, parent.p_plane[1] + jy),
                    0.0, float(rng.uniform(0.0, 360.0)), (cw, cd, ch),
                    parent=ParentRef("object", parent.id),
                )
            )
            continue
        if roll < 0.20:
            wallname = ("left", "right", "front", "back")[int(rng.integers(0, 4))]
            mw = min(w, 0.6)
            md = min(d, 0.4)
            mh = float(rng.uniform(0.2, 0.6))
            z = float(rng.uniform(1.6, max(1.61, height - mh - 0.05)))
            # Thin side faces the wall: left/right mounts keep depth
            # along x, front/back mounts keep it along y (yaw 0).
            if wallname == "left":
                mdims = (md, mw, mh)
                pos = (0.5 * md + 0.01, float(rng.uniform(0.5, depth - 0.5)))
            elif wallname == "right":
                mdims = (md, mw, mh)
                pos = (width - 0.5 * md - 0.01, float(rng.uniform(0.5, depth - 0.5)))
            elif wallname == "front":
                mdims = (mw, md, mh)
                pos = (float(rng.uniform(0.5, width - 0.5)), 0.5 * md + 0.01)
            else:
                mdims = (mw, md, mh)
                pos = (float(rng.uniform(0.5, width - 0.5)), depth - 0.5 * md - 0.01)
            objects.append(
                ObjectState(
                    oid, f"mount {i}", pos, z, 0.0, mdims,
                    parent=ParentRef("wall", wallname),
                )
            )
            continue
        if roll < 0.25:
            ch = float(rng.uniform(0.1, 0.5))
            z = height - ch - float(rng.uniform(0.0, 0.15))
            pos = (
                float(rng.uniform(0.5, width - 0.5)),
                float(rng.uniform(0.5, depth - 0.5)),
            )
            objects.append(
                ObjectState(
                    oid, f"fixture {i}", pos, z, 0.0,
                    (min(w, 0.7), min(d, 0.7), ch),
                    parent=ParentRef("ceiling"),
                )
            )
            continue
        cx, cy = centers[int(rng.integers(0, k))]
        # Clip by the half diagonal so nothing starts through a wall.
        margin = 0.5 * math.hypot(w, d)
        px = cx + float(rng.normal(0.0, 0.35))
        py = cy + float(rng.normal(0.0, 0.35))
        px = min(max(px, margin), width - margin)
        py = min(max(py, margin), depth - margin)
        objects.append(
            ObjectState(
                oid, f"furniture {i}", (px, py), 0.0,
                float(rng.uniform(0.0, 360.0)), (w, d, h),
            )
        )
        floor_ids.append(oid)

    scene = derive_all_verticals(SceneState(room, tuple(objects)))

    adjacent: list[Adjacent] = []
    against: list[AgainstWall] = []
    pointing: list[PointToward] = []
    aligning: list[AlignWith] = []
    if len(floor_ids) >= 2:
        for _ in range(int(rng.integers(0, 3))):
            a, b = rng.choice(len(floor_ids), size=2, replace=False)
            adjacent.append(
                Adjacent(floor_ids[int(a)], floor_ids[int(b)], float(rng.uniform(0.05, 0.6)))
            )
        if rng.random() < 0.4:
            a, b = rng.choice(len(floor_ids), size=2, replace=False)
            pointing.append(PointToward(floor_ids[int(a)], floor_ids[int(b)]))
    if floor_ids and rng.random() < 0.5:
        against.append(
            AgainstWall(
                floor_ids[int(rng.integers(0, len(floor_ids)))],
                ("left", "right", "front", "back")[int(rng.integers(0, 4))],
            )
        )
    if floor_ids and rng.random() < 0.3:
        aligning.append(
            AlignWith(
                floor_ids[int(rng.integers(0, len(floor_ids)))],
                angle=float(rng.choice([0.0, 90.0, 180.0, 270.0])),
            )
        )
    cons = ConstraintSet(
        adjacent=tuple(adjacent),
        against_wall=tuple(against),
        point_toward=tuple(pointing),
        align_with=tuple(aligning),
    )
    scene.validate()
    cons.validate(scene)
    return scene, cons


def gen_corpus(n: int, seed: int = 0) -> list[tuple[SceneState, ConstraintSet]]:
    """Generate ``n`` deliberately conflicted but valid starting scenes.

    Rooms are 3 to 8 meters a side with 5 to 20 objects; floor objects
    cluster so most scenes start with collisions for the optimizer to
    untangle.  The same (n, seed) always yields the identical corpus.
    """
    rng = np.random.default_rng(seed)
    return [_gen_scene(rng) for _ in range(n)]


def save_corpus(directory: str, corpus) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    paths = []
    for i, (scene, cons) in enumerate(corpus):
        path = os.path.join(directory, f"scene_{i:03d}.json")
        save_scene(path, scene, cons)
        paths.append(path)
    return paths


def load_corpus(directory: str) -> list[tuple[SceneState, ConstraintSet]]:
    names = sorted(
        f for f in os.listdir(directory) if f.endswith(".json")
    )
    if not names:
        raise ValueError(f"no scene files in {directory!r}")
    return [load_scene(os.path.join(directory, f)) for f in names]
