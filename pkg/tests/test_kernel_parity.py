"""Bit-level agreement between the compiled kernel and the fallback."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from sceneopt import _kernel
from sceneopt._runtime import Runtime
from sceneopt.optimizer import OptimizerParams
from sceneopt.scene import (
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
)
from sceneopt.tuning import gen_corpus

BACKENDS = _kernel.available_backends()
needs_compiled = pytest.mark.skipif(
    "compiled" not in BACKENDS, reason="compiled kernel not built"
)


def random_scene(rng):
    """A deliberately messy scene: protrusions, stacks, mounts, rotations."""
    room = RoomSpec(
        float(rng.uniform(3.0, 7.0)), float(rng.uniform(3.0, 6.0)), float(rng.uniform(2.2, 3.0))
    )
    n = int(rng.integers(2, 9))
    objects = []
    floor_ids = []
    for i in range(n):
        oid = f"o{i}"
        dims = (
            float(rng.uniform(0.2, 1.4)),
            float(rng.uniform(0.2, 1.4)),
            float(rng.uniform(0.2, 1.0)),
        )
        # position range intentionally exceeds the room to exercise bounds
        x = float(rng.uniform(-0.5, room.width + 0.5))
        y = float(rng.uniform(-0.5, room.depth + 0.5))
        yaw = float(rng.uniform(0.0, 360.0))
        roll = rng.random()
        if roll < 0.2 and floor_ids:
            parent = ParentRef("object", str(rng.choice(floor_ids)))
            z = 0.0
        elif roll < 0.35:
            parent = ParentRef("wall", ["left", "right", "front", "back"][int(rng.integers(4))])
            z = float(rng.uniform(-0.3, room.height))
        elif roll < 0.45:
            parent = ParentRef("ceiling")
            z = float(rng.uniform(room.height - 1.0, room.height + 0.3))
        else:
            parent = ParentRef("floor")
            z = 0.0
            floor_ids.append(oid)
        objects.append(ObjectState(oid, oid, (x, y), z, yaw, dims, parent=parent))
    scene = derive_all_verticals(SceneState(room, tuple(objects)))

    ids = [o.id for o in objects]
    adjacent = []
    against = []
    pointing = []
    aligning = []
    for _ in range(int(rng.integers(0, 3))):
        a, b = rng.choice(ids, size=2, replace=False)
        adjacent.append(Adjacent(str(a), str(b), float(rng.uniform(0.0, 0.8))))
    for _ in range(int(rng.integers(0, 2))):
        against.append(
            AgainstWall(str(rng.choice(ids)), ["left", "right", "front", "back"][int(rng.integers(4))])
        )
    for _ in range(int(rng.integers(0, 2))):
        a, b = rng.choice(ids, size=2, replace=False)
        pointing.append(PointToward(str(a), str(b)))
    for _ in range(int(rng.integers(0, 2))):
        if rng.random() < 0.5:
            aligning.append(AlignWith(str(rng.choice(ids)), angle=float(rng.uniform(0, 360))))
        else:
            a, b = rng.choice(ids, size=2, replace=False)
            aligning.append(AlignWith(str(a), target=str(b)))
    cons = ConstraintSet(tuple(adjacent), tuple(against), tuple(pointing), tuple(aligning))
    return scene, cons


def assert_ledgers_equal(a, b):
    assert a.count == b.count
    np.testing.assert_array_equal(a.f_plane, b.f_plane)
    np.testing.assert_array_equal(a.f_vert, b.f_vert)
    np.testing.assert_array_equal(a.tau, b.tau)
    c = a.count
    np.testing.assert_array_equal(a.c_obj[:c], b.c_obj[:c])
    np.testing.assert_array_equal(a.c_kind[:c], b.c_kind[:c])
    np.testing.assert_array_equal(a.c_vec[:c], b.c_vec[:c])
    np.testing.assert_array_equal(a.c_src[:c], b.c_src[:c])


@needs_compiled
class TestParity:
    @pytest.mark.parametrize("mode", ["sat", "area"])
    def test_fuzzed_scenes_agree_bitwise(self, mode):
        rng = np.random.default_rng(42)
        for _ in range(150):
            scene, cons = random_scene(rng)
            params = OptimizerParams(collision_mode=mode)
            rta = Runtime(scene, cons, params, kernel=BACKENDS["compiled"])
            rtb = Runtime(scene, cons, params, kernel=BACKENDS["python"])
            rta.evaluate()
            rtb.evaluate()
            assert_ledgers_equal(rta.ledger, rtb.ledger)

    def test_generated_corpus_agrees(self):
        for scene, cons in gen_corpus(8, seed=21):
            rta = Runtime(scene, cons, OptimizerParams(), kernel=BACKENDS["compiled"])
            rtb = Runtime(scene, cons, OptimizerParams(), kernel=BACKENDS["python"])
            rta.evaluate()
            rtb.evaluate()
            assert_ledgers_equal(rta.ledger, rtb.ledger)

    def test_agreement_persists_across_steps(self):
        scene, cons = gen_corpus(1, seed=13)[0]
        rta = Runtime(scene, cons, OptimizerParams(), kernel=BACKENDS["compiled"])
        rtb = Runtime(scene, cons, OptimizerParams(), kernel=BACKENDS["python"])
        for _ in range(25):
            rta.evaluate()
            rtb.evaluate()
            assert_ledgers_equal(rta.ledger, rtb.ledger)
            rta.step()
            rtb.step()
        np.testing.assert_array_equal(rta.pos, rtb.pos)
        np.testing.assert_array_equal(rta.z, rtb.z)
        np.testing.assert_array_equal(rta.yaw, rtb.yaw)


_OPT_SNIPPET = """
import json
from sceneopt import _kernel
from sceneopt.optimizer import optimize
from sceneopt.scene import scene_to_dict
from sceneopt.tuning import gen_corpus

scene, cons = gen_corpus(1, seed=11)[0]
res = optimize(scene, cons, seed=0)
print(_kernel.BACKEND)
print(json.dumps(scene_to_dict(res.scene), sort_keys=True))
print(res.iterations, res.converged, repr(res.final_residual))
"""


def _run_with_env(force_python: bool) -> list[str]:
    env = dict(os.environ)
    if force_python:
        env["SCENEOPT_PURE_PYTHON"] = "1"
    else:
        env.pop("SCENEOPT_PURE_PYTHON", None)
    out = subprocess.run(
        [sys.executable, "-c", _OPT_SNIPPET], env=env, capture_output=True, text=True, check=True
    )
    return out.stdout.splitlines()


class TestBackendSelection:
    def test_env_forces_python(self):
        lines = _run_with_env(force_python=True)
        assert lines[0] == "python"

    @needs_compiled
    def test_default_prefers_compiled(self):
        lines = _run_with_env(force_python=False)
        assert lines[0] == "compiled"

    @needs_compiled
    def test_end_to_end_optimize_identical(self):
        a = _run_with_env(force_python=False)
        b = _run_with_env(force_python=True)
        # identical optimized scene and identical trajectory summary
        assert a[1:] == b[1:]
        json.loads(a[1])  # sanity: well-formed payload
