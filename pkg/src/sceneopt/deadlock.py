"""Deadlock detection and escape for force-directed layout runs.

Two failure shapes are handled:

- Horizontal deadlock: an object whose recent displacement shows no
  progress (tiny cumulative motion, or plenty of motion that nets out
  to nothing) while at least two of its planar force contributions
  oppose each other.  The escape injects a sideways force, orthogonal
  to the dominant member of the opposing pair, for a fixed number of
  steps.
- Vertical squeeze: an object simultaneously pushed up and down with
  no vertical progress.  The escape shrinks the object's vertical
  scale to the available gap, clamped to a minimum.

Horizontal detection requires a full displacement window; the vertical
check runs on whatever history exists so squeezes can fire before the
window fills (vertical force stacks damp out quickly, so waiting for a
full window would let them masquerade as converged).
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Sequence

from .forces import SRC_CEILING, SRC_FLOOR
from .geometry import Point

__all__ = [
    "DeadlockEvent",
    "evasion_side",
    "find_opposing_pair",
    "detect_horizontal",
    "handle_deadlocks",
]


@dataclass(frozen=True)
class DeadlockEvent:
    """One guard intervention, recorded for traces and audits."""

    obj: str
    kind: str  # "evade" or "squeeze"
    iteration: int
    axis: Point | None = None
    force: Point | None = None
    new_scale_z: float | None = None


def evasion_side(seed: int, obj_id: str, iteration: int) -> float:
    """Deterministic +-1 choice for the evasion direction."""
    digest = zlib.crc32(f"{seed}:{obj_id}:{iteration}".encode())
    return 1.0 if digest & 1 == 0 else -1.0


def _stalled(cum: float, net: float, params) -> bool:
    """No progress: barely moved, or moved a lot but went nowhere."""
    if cum < params.d2_max_net:
        return True
    return cum > params.d1_min_activity and net < params.d2_max_net


def find_opposing_pair(
    vectors: Sequence[Point], angle_tol_deg: float
) -> tuple[int, int] | None:
    """Indices of the opposing pair with the largest combined magnitude.

    Two vectors oppose when the angle between them is within
    ``angle_tol_deg`` of 180 degrees.  Returns None when no pair opposes.
    """
    mags = [math.hypot(v[0], v[1]) for v in vectors]
    limit = -math.cos(math.radians(angle_tol_deg))
    best = -1.0
    pair: tuple[int, int] | None = None
    for i in range(len(vectors)):
        if mags[i] <= 0.0:
            continue
        for j in range(i + 1, len(vectors)):
            if mags[j] <= 0.0:
                continue
            cosang = (vectors[i][0] * vectors[j][0] + vectors[i][1] * vectors[j][1]) / (
                mags[i] * mags[j]
            )
            if cosang > limit:
                continue
            combined = mags[i] + mags[j]
            if combined > best:
                best = combined
                pair = (i, j)
    return pair


def detect_horizontal(
    displacements: Sequence[Point],
    planar_vectors: Sequence[Point],
    params,
    side: float = 1.0,
) -> tuple[Point, Point] | None:
    """Check one object for horizontal deadlock.

    Args:
        displacements: Per-step planar displacement vectors; detection
            requires at least a full window of them.
        planar_vectors: The object's weighted planar force contributions
            this iteration.
        params: Optimizer parameters (thresholds and evasion scale).
        side: +-1 selecting which orthogonal direction to take.

    Returns:
        (evasion force, opposition axis) or None.  The evasion force is
        orthogonal to the axis by construction.
    """
    if len(displacements) < params.window:
        return None
    cum = 0.0
    sx = 0.0
    sy = 0.0
    for dx, dy in displacements:
        cum += math.hypot(dx, dy)
        sx += dx
        sy += dy
    if not _stalled(cum, math.hypot(sx, sy), params):
        return None
    if len(planar_vectors) < 2:
        return None
    pair = find_opposing_pair(planar_vectors, params.angle_tol_deg)
    if pair is None:
        return None
    va = planar_vectors[pair[0]]
    vb = planar_vectors[pair[1]]
    larger = va if math.hypot(va[0], va[1]) >= math.hypot(vb[0], vb[1]) else vb
    ln = math.hypot(larger[0], larger[1])
    axis = (larger[0] / ln, larger[1] / ln)
    evade = (
        params.lambda_evade * side * -axis[1],
        params.lambda_evade * side * axis[0],
    )
    return evade, axis


def _vertical_gap(rows, rt, i: int) -> float | None:
    """Clear span between the highest pushing-up surface and lowest pushing-down one."""
    lower_top = None
    upper_bottom = None
    for kind, fz, src in rows:
        if fz > 0.0:
            top = 0.0 if src == SRC_FLOOR else float(rt.z[src] + rt.h_eff[src])
            if lower_top is None or top > lower_top:
                lower_top = top
        elif fz < 0.0:
            bottom = float(rt.room.height) if src == SRC_CEILING else float(rt.z[src])
            if upper_bottom is None or bottom < upper_bottom:
                upper_bottom = bottom
    if lower_top is None or upper_bottom is None:
        return None
    return upper_bottom - lower_top


def handle_deadlocks(rt, iteration: int, seed: int, events: list[DeadlockEvent]) -> int:
    """Run the guard for every object; returns the number of active interventions.

    Objects with a running evasion timer get the stored force re-injected
    and are otherwise skipped.  Fresh horizontal detection needs a full
    displacement window; the vertical squeeze check accepts partial
    history.  Injections happen directly on the ledger accumulators, so
    the residual seen by the convergence test includes them.
    """
    params = rt.params
    led = rt.ledger
    active = 0
    for i in range(rt.n):
        if led.evade_timer[i] > 0:
            led.f_plane[i, 0] += led.evade_force[i, 0]
            led.f_plane[i, 1] += led.evade_force[i, 1]
            led.evade_timer[i] -= 1
            active += 1
            continue

        if led.hist_len >= params.window:
            cum, net = led.planar_activity(i)
            if _stalled(cum, net, params):
                vectors = led.weighted_planar_rows(i, params)
                if len(vectors) >= 2:
                    pair = find_opposing_pair(vectors, params.angle_tol_deg)
                    if pair is not None:
                        va = vectors[pair[0]]
                        vb = vectors[pair[1]]
                        larger = (
                            va
                            if math.hypot(va[0], va[1]) >= math.hypot(vb[0], vb[1])
                            else vb
                        )
                        ln = math.hypot(larger[0], larger[1])
                        axis = (larger[0] / ln, larger[1] / ln)
                        side = evasion_side(seed, led.ids[i], iteration)
                        evade = (
                            params.lambda_evade * side * -axis[1],
                            params.lambda_evade * side * axis[0],
                        )
                        led.evade_force[i, 0] = evade[0]
                        led.evade_force[i, 1] = evade[1]
                        led.evade_timer[i] = params.t_deadlock
                        led.f_plane[i, 0] += evade[0]
                        led.f_plane[i, 1] += evade[1]
                        events.append(
                            DeadlockEvent(
                                led.ids[i], "evade", iteration, axis=axis, force=evade
                            )
                        )
                        active += 1
                        continue

        rows = led.vertical_rows(i)
        if not rows:
            continue
        has_up = any(fz > 0.0 for _, fz, _ in rows)
        has_down = any(fz < 0.0 for _, fz, _ in rows)
        if not (has_up and has_down):
            continue
        cum, net = led.vertical_activity(i)
        if not _stalled(cum, net, params):
            continue
        gap = _vertical_gap(rows, rt, i)
        if gap is None:
            continue
        h = float(rt.h_eff[i])
        if gap >= h:
            continue
        new_sz = float(rt.scale_z[i]) * (gap / h) if gap > 0.0 else params.sz_min
        if new_sz < params.sz_min:
            new_sz = params.sz_min
        if new_sz < float(rt.scale_z[i]):
            rt.set_scale_z(i, new_sz)
            events.append(
                DeadlockEvent(led.ids[i], "squeeze", iteration, new_scale_z=new_sz)
            )
            active += 1
    return active
