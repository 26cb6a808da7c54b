"""Benchmark the compiled force kernel against the pure-Python fallback.

Builds a crowded 20-object scene, runs repeated full force evaluations
through both backends, reports per-call times, and verifies the two
ledgers agree bit for bit.

Run:  python benchmarks/bench_kernel.py [--objects N] [--repeats R]
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from sceneopt import _kernel
from sceneopt._kernel import pyfallback
from sceneopt._runtime import Runtime
from sceneopt.optimizer import OptimizerParams, optimize
from sceneopt.tuning import gen_corpus
from sceneopt.scene import ConstraintSet, ObjectState, RoomSpec, SceneState


def crowded_scene(n: int, seed: int = 0) -> SceneState:
    rng = np.random.default_rng(seed)
    room = RoomSpec(6.0, 5.0, 2.8)
    objects = []
    for i in range(n):
        objects.append(
            ObjectState(
                id=f"o{i:02d}",
                name=f"box {i}",
                p_plane=(float(rng.uniform(1.5, 4.5)), float(rng.uniform(1.5, 3.5))),
                p_vert=0.0,
                yaw=float(rng.uniform(0.0, 360.0)),
                base_dims=(
                    float(rng.uniform(0.4, 1.2)),
                    float(rng.uniform(0.4, 1.2)),
                    float(rng.uniform(0.3, 0.9)),
                ),
            )
        )
    return SceneState(room, tuple(objects))


def time_backend(kernel, scene: SceneState, repeats: int) -> tuple[float, Runtime]:
    rt = Runtime(scene, ConstraintSet(), OptimizerParams(), kernel=kernel)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        rt.evaluate()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), rt


def ledgers_identical(a, b) -> bool:
    return (
        a.count == b.count
        and np.array_equal(a.f_plane, b.f_plane)
        and np.array_equal(a.f_vert, b.f_vert)
        and np.array_equal(a.tau, b.tau)
        and np.array_equal(a.c_vec[: a.count], b.c_vec[: b.count])
        and np.array_equal(a.c_kind[: a.count], b.c_kind[: b.count])
    )


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--objects", type=int, default=20)
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()

    backends = _kernel.available_backends()
    print(f"available backends: {', '.join(backends)} (active: {_kernel.BACKEND})")
    scene = crowded_scene(args.objects)

    t_py, rt_py = time_backend(pyfallback.evaluate, scene, args.repeats)
    print(f"pure python : {t_py * 1e3:9.3f} ms/eval")
    if "compiled" in backends:
        from sceneopt._kernel import _core

        t_c, rt_c = time_backend(_core.evaluate, scene, args.repeats)
        print(f"compiled    : {t_c * 1e3:9.3f} ms/eval")
        print(f"speedup     : {t_py / t_c:9.1f}x")
        ok = ledgers_identical(rt_py.ledger, rt_c.ledger)
        print(f"bit parity  : {'identical' if ok else 'MISMATCH'}")
        if not ok:
            return 1
    else:
        print("compiled backend unavailable; skipping comparison")

    # End-to-end flavor: one full optimization of a synthetic scene.
    s, c = gen_corpus(1, seed=3)[0]
    t0 = time.perf_counter()
    res = optimize(s, c, seed=0)
    dt = time.perf_counter() - t0
    state = "converged" if res.converged else "stopped"
    print(
        f"full run    : {len(s.objects)} objects, {res.iterations} iterations, "
        f"{dt * 1e3:.1f} ms ({state})"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
