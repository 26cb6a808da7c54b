"""Structured scene edits: add, delete and move commands.

Commands arrive already structured (language parsing happens upstream).
``apply`` is pure and deterministic: it validates the command against
the current scene, produces the edited scene and constraint set, and
touches nothing else.  ``edit_and_optimize`` then re-runs the layout
optimizer and reports how far objects the command never named were
displaced by the re-optimization.

Semantics worth calling out:

- Deleting an object cascades to everything it transitively supports;
  orphaned children would float, which no valid scene allows.
- Moving an object translates its whole subtree by the same planar
  delta and re-derives every affected height, so stacked items stay
  aboard.
- Move keeps the object's constraints by default; ``clear_adjacent``
  drops adjacency constraints naming it, for when the move is meant to
  break a pairing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .optimizer import OptimizerParams, OptResult, optimize
from .scene import (
    ConstraintSet,
    ObjectState,
    ParentRef,
    SceneState,
    SceneValidationError,
    constraints_from_dict,
    derive_all_verticals,
    object_from_dict,
)

__all__ = [
    "EditError",
    "AddCommand",
    "DeleteCommand",
    "MoveCommand",
    "EditCommand",
    "EditOutcome",
    "apply",
    "edit_and_optimize",
    "command_from_dict",
]


class EditError(ValueError):
    """A command that cannot be applied to the given scene."""


@dataclass(frozen=True)
class AddCommand:
    """Insert one new object, optionally with constraints naming it."""

    obj: ObjectState
    constraints: ConstraintSet = ConstraintSet()

    @property
    def named_ids(self) -> frozenset[str]:
        return frozenset({self.obj.id})


@dataclass(frozen=True)
class DeleteCommand:
    """Remove objects (and, transitively, whatever they support)."""

    ids: tuple[str, ...]

    @property
    def named_ids(self) -> frozenset[str]:
        return frozenset(self.ids)


@dataclass(frozen=True)
class MoveCommand:
    """Reposition and/or re-parent one object, subtree riding along."""

    id: str
    p_plane: tuple[float, float] | None = None
    parent: ParentRef | None = None
    clear_adjacent: bool = False

    @property
    def named_ids(self) -> frozenset[str]:
        return frozenset({self.id})


EditCommand = AddCommand | DeleteCommand | MoveCommand


@dataclass
class EditOutcome:
    """An applied command plus the re-optimization that followed it."""

    edited_scene: SceneState
    edited_constraints: ConstraintSet
    result: OptResult
    untouched_drift: float


def _apply_add(scene: SceneState, cons: ConstraintSet, cmd: AddCommand):
    if any(o.id == cmd.obj.id for o in scene.objects):
        raise EditError(f"add: object id {cmd.obj.id!r} already exists")
    if cmd.obj.parent.kind == "object" and not any(
        o.id == cmd.obj.parent.ref for o in scene.objects
    ):
        raise EditError(f"add: parent object {cmd.obj.parent.ref!r} does not exist")
    new_scene = derive_all_verticals(scene.with_objects((*scene.objects, cmd.obj)))
    new_cons = cons.merged(cmd.constraints)
    try:
        new_cons.validate(new_scene)
    except SceneValidationError as exc:
        raise EditError(f"add: {exc}") from exc
    return new_scene, new_cons


def _apply_delete(scene: SceneState, cons: ConstraintSet, cmd: DeleteCommand):
    known = {o.id for o in scene.objects}
    for oid in cmd.ids:
        if oid not in known:
            raise EditError(f"delete: unknown object id {oid!r}")
    doomed: set[str] = set()
    for oid in cmd.ids:
        doomed.add(oid)
        doomed.update(scene.descendants(oid))
    remaining = tuple(o for o in scene.objects if o.id not in doomed)
    return scene.with_objects(remaining), cons.without_objects(doomed)


def _apply_move(scene: SceneState, cons: ConstraintSet, cmd: MoveCommand):
    ids = scene.by_id()
    if cmd.id not in ids:
        raise EditError(f"move: unknown object id {cmd.id!r}")
    if cmd.p_plane is None and cmd.parent is None and not cmd.clear_adjacent:
        raise EditError("move: nothing to change")
    obj = ids[cmd.id]
    new_parent = cmd.parent if cmd.parent is not None else obj.parent
    if new_parent.kind == "object":
        if new_parent.ref == cmd.id:
            raise EditError(f"move: {cmd.id!r} cannot support itself")
        if new_parent.ref not in ids:
            raise EditError(f"move: parent object {new_parent.ref!r} does not exist")
        if new_parent.ref in scene.descendants(cmd.id):
            raise EditError(
                f"move: parent {new_parent.ref!r} is supported by {cmd.id!r} (cycle)"
            )
    new_plane = cmd.p_plane if cmd.p_plane is not None else obj.p_plane
    dx = new_plane[0] - obj.p_plane[0]
    dy = new_plane[1] - obj.p_plane[1]
    subtree = set(scene.descendants(cmd.id))
    moved = []
    for o in scene.objects:
        if o.id == cmd.id:
            moved.append(replace(o, p_plane=new_plane, parent=new_parent))
        elif o.id in subtree:
            moved.append(
                replace(o, p_plane=(o.p_plane[0] + dx, o.p_plane[1] + dy))
            )
        else:
            moved.append(o)
    new_scene = derive_all_verticals(scene.with_objects(moved))
    new_cons = cons
    if cmd.clear_adjacent:
        new_cons = ConstraintSet(
            adjacent=tuple(
                c for c in cons.adjacent if cmd.id not in (c.a, c.b)
            ),
            against_wall=cons.against_wall,
            point_toward=cons.point_toward,
            align_with=cons.align_with,
        )
    return new_scene, new_cons


def apply(
    scene: SceneState, constraints: ConstraintSet, cmd: EditCommand
) -> tuple[SceneState, ConstraintSet]:
    """Apply one command; raises EditError when it does not validate."""
    if isinstance(cmd, AddCommand):
        out = _apply_add(scene, constraints, cmd)
    elif isinstance(cmd, DeleteCommand):
        out = _apply_delete(scene, constraints, cmd)
    elif isinstance(cmd, MoveCommand):
        out = _apply_move(scene, constraints, cmd)
    else:
        raise EditError(f"unknown command type: {type(cmd).__name__}")
    new_scene, new_cons = out
    try:
        new_scene.validate()
        new_cons.validate(new_scene)
    except SceneValidationError as exc:
        raise EditError(str(exc)) from exc
    return new_scene, new_cons


def edit_and_optimize(
    scene: SceneState,
    constraints: ConstraintSet,
    cmd: EditCommand,
    params: OptimizerParams | None = None,
    *,
    seed: int = 0,
    deadlock_guard: bool = True,
) -> EditOutcome:
    """Apply a command, re-optimize, and measure drift of unnamed objects.

    Drift is the largest 3D displacement, between the post-edit scene
    and the optimized one, over objects the command never named.
    """
    edited_scene, edited_cons = apply(scene, constraints, cmd)
    result = optimize(
        edited_scene, edited_cons, params, seed=seed, deadlock_guard=deadlock_guard
    )
    named = cmd.named_ids
    before = edited_scene.by_id()
    drift = 0.0
    for o in result.scene.objects:
        if o.id in named:
            continue
        b = before[o.id]
        d = math.sqrt(
            (o.p_plane[0] - b.p_plane[0]) ** 2
            + (o.p_plane[1] - b.p_plane[1]) ** 2
            + (o.p_vert - b.p_vert) ** 2
        )
        if d > drift:
            drift = d
    return EditOutcome(
        edited_scene=edited_scene,
        edited_constraints=edited_cons,
        result=result,
        untouched_drift=drift,
    )


def command_from_dict(doc: dict) -> EditCommand:
    """Parse the structured command dialect used by the CLI.

    Shapes: ``{"op": "add", "object": {...}, "constraints": {...}}``,
    ``{"op": "delete", "ids": [...]}``, and ``{"op": "move", "id": ...,
    "p_plane": [x, y], "parent": "...", "clear_adjacent": bool}`` with
    every move field beyond ``id`` optional.
    """
    if not isinstance(doc, dict) or "op" not in doc:
        raise EditError("command must be an object with an 'op' field")
    op = doc["op"]
    try:
        if op == "add":
            cons = (
                constraints_from_dict(doc["constraints"])
                if "constraints" in doc
                else ConstraintSet()
            )
            return AddCommand(obj=object_from_dict(doc["object"]), constraints=cons)
        if op == "delete":
            ids = doc["ids"]
            if not isinstance(ids, list) or not ids:
                raise EditError("delete: 'ids' must be a non-empty list")
            return DeleteCommand(ids=tuple(str(i) for i in ids))
        if op == "move":
            plane = doc.get("p_plane")
            parent = doc.get("parent")
            return MoveCommand(
                id=str(doc["id"]),
                p_plane=(float(plane[0]), float(plane[1])) if plane is not None else None,
                parent=ParentRef.decode(parent) if parent is not None else None,
                clear_adjacent=bool(doc.get("clear_adjacent", False)),
            )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, EditError):
            raise
        raise EditError(f"bad {op} command: {exc}") from exc
    raise EditError(f"unknown op {op!r}")
