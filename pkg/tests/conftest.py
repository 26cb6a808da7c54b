"""Shared fixtures and the acceptance summary hook."""

import pytest

from sceneopt.scene import (
    AgainstWall,
    ConstraintSet,
    ObjectState,
    ParentRef,
    RoomSpec,
    SceneState,
    derive_all_verticals,
)

# (ok, label) tuples appended by the acceptance tests; replayed after the
# run so every criterion gets one visible pass/fail line.
ACCEPTANCE_RESULTS: list[tuple[bool, str]] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_RESULTS


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for ok, label in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}")


def floor_box(oid, x, y, yaw=0.0, w=1.0, d=1.0, h=0.5):
    return ObjectState(oid, oid, (x, y), 0.0, yaw, (w, d, h))


def make_scene(objects, room=(4.0, 3.0, 2.5)):
    return derive_all_verticals(SceneState(RoomSpec(*room), tuple(objects)))


@pytest.fixture
def two_box_scene():
    """Two overlapping floor boxes, one wall constraint."""
    scene = make_scene(
        [floor_box("a", 1.6, 1.5), floor_box("b", 2.2, 1.5)]
    )
    cons = ConstraintSet(against_wall=(AgainstWall("a", "left"),))
    return scene, cons


@pytest.fixture
def stacked_scene():
    """A parent crate with a small child object on top."""
    parent = floor_box("crate", 2.0, 1.5, w=1.2, d=1.2, h=0.6)
    child = ObjectState(
        "cup", "cup", (2.1, 1.5), 0.0, 0.0, (0.3, 0.3, 0.2),
        parent=ParentRef("object", "crate"),
    )
    return make_scene([parent, child])


@pytest.fixture
def press_jam():
    """Two-body jam: a pusher wall-pulled into a long slab at the wall.

    The slab's boundary standoff is marginally unstable under the default
    step size, so without the guard the pair chatters forever; with the
    guard the pusher evades around the slab and both settle.
    """
    slab = ObjectState("slab", "slab", (0.26, 2.75), 0.0, 0.0, (0.5, 3.2, 0.5))
    push = ObjectState("push", "push", (1.0, 2.75), 0.0, 0.0, (1.0, 1.0, 0.5))
    scene = derive_all_verticals(SceneState(RoomSpec(4.0, 5.5, 2.5), (slab, push)))
    cons = ConstraintSet(against_wall=(AgainstWall("push", "left"),))
    return scene, cons
