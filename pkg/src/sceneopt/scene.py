"""Scene data model and JSON serialization.

A scene is an axis-aligned room plus a set of oriented boxes connected
by a support hierarchy: every object is parented to the floor, the
ceiling, a named wall, or another object.  Objects supported by the
floor or by another object have their z coordinate derived (bottom face
flush with the parent's top face); wall- and ceiling-mounted objects
keep a free z.

Units are meters and degrees.  Serialized floats are canonicalized to
9 significant digits so that save -> load -> save is byte-stable.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from .geometry import WALL_NAMES

__all__ = [
    "SceneValidationError",
    "ParentRef",
    "RoomSpec",
    "ObjectState",
    "SceneState",
    "Adjacent",
    "AgainstWall",
    "PointToward",
    "AlignWith",
    "ConstraintSet",
    "derive_vertical",
    "derive_all_verticals",
    "scene_to_dict",
    "scene_from_dict",
    "object_from_dict",
    "constraints_to_dict",
    "constraints_from_dict",
    "load_scene",
    "save_scene",
    "load_constraints",
    "write_text_atomic",
]

_PARENT_KINDS = ("floor", "ceiling", "wall", "object")


class SceneValidationError(ValueError):
    """Raised when a scene or constraint set violates the data contract."""


@dataclass(frozen=True)
class ParentRef:
    """Reference to a supporting surface.

    ``kind`` is one of floor/ceiling/wall/object; ``ref`` names the wall
    or the parent object id and is None for floor and ceiling.
    """

    kind: str
    ref: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in _PARENT_KINDS:
            raise SceneValidationError(f"unknown parent kind: {self.kind!r}")
        if self.kind == "wall" and self.ref not in WALL_NAMES:
            raise SceneValidationError(f"unknown wall name: {self.ref!r}")
        if self.kind == "object" and not self.ref:
            raise SceneValidationError("object parent requires an object id")
        if self.kind in ("floor", "ceiling") and self.ref is not None:
            raise SceneValidationError(f"{self.kind} parent takes no reference")

    @property
    def derives_z(self) -> bool:
        """True when children of this parent get their z derived."""
        return self.kind in ("floor", "object")

    def encode(self) -> str:
        if self.kind in ("floor", "ceiling"):
            return self.kind
        return f"{self.kind}:{self.ref}"

    @classmethod
    def decode(cls, text: str) -> "ParentRef":
        if not isinstance(text, str):
            raise SceneValidationError(f"parent must be a string, got {text!r}")
        if text in ("floor", "ceiling"):
            return cls(text)
        kind, sep, ref = text.partition(":")
        if not sep:
            raise SceneValidationError(f"malformed parent reference: {text!r}")
        return cls(kind, ref)


FLOOR = ParentRef("floor")
CEILING = ParentRef("ceiling")


@dataclass(frozen=True)
class RoomSpec:
    """Axis-aligned room interior [0, width] x [0, depth] x [0, height]."""

    width: float
    depth: float
    height: float

    def __post_init__(self) -> None:
        for name in ("width", "depth", "height"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise SceneValidationError(f"room {name} must be positive, got {v!r}")


@dataclass(frozen=True)
class ObjectState:
    """Pose and extents of one box-shaped object.

    ``p_vert`` is the z coordinate of the bottom face.  ``base_dims``
    are the unscaled width/depth/height; ``scale`` holds per-axis
    multipliers of which only the vertical one is ever adjusted by the
    optimizer (squeeze resolution).
    """

    id: str
    name: str
    p_plane: tuple[float, float]
    p_vert: float
    yaw: float
    base_dims: tuple[float, float, float]
    scale: tuple[float, float, float] = (1.0, 1.0, 1.0)
    parent: ParentRef = FLOOR

    @property
    def eff_dims(self) -> tuple[float, float, float]:
        w, d, h = self.base_dims
        sx, sy, sz = self.scale
        return (w * sx, d * sy, h * sz)

    @property
    def z_top(self) -> float:
        return self.p_vert + self.eff_dims[2]

    def validate(self) -> None:
        if not self.id:
            raise SceneValidationError("object id must be non-empty")
        for v in (*self.p_plane, self.p_vert, self.yaw):
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise SceneValidationError(f"object {self.id!r}: non-finite pose value {v!r}")
        for v in self.base_dims:
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise SceneValidationError(f"object {self.id!r}: dims must be positive, got {v!r}")
        for v in self.scale:
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise SceneValidationError(f"object {self.id!r}: scale must be positive, got {v!r}")


@dataclass(frozen=True)
class SceneState:
    """A room plus its objects, in a stable order."""

    room: RoomSpec
    objects: tuple[ObjectState, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", tuple(self.objects))

    def by_id(self) -> dict[str, ObjectState]:
        return {o.id: o for o in self.objects}

    def get(self, obj_id: str) -> ObjectState:
        for o in self.objects:
            if o.id == obj_id:
                return o
        raise SceneValidationError(f"unknown object id: {obj_id!r}")

    def index_of(self, obj_id: str) -> int:
        for i, o in enumerate(self.objects):
            if o.id == obj_id:
                return i
        raise SceneValidationError(f"unknown object id: {obj_id!r}")

    def with_objects(self, objects: Iterable[ObjectState]) -> "SceneState":
        return SceneState(self.room, tuple(objects))

    def level_of(self, obj_id: str) -> ParentRef:
        return self.get(obj_id).parent

    def same_level(self, a: str, b: str) -> bool:
        """Objects share a level when they rest on the same support."""
        return self.level_of(a) == self.level_of(b)

    def levels(self) -> dict[ParentRef, list[str]]:
        out: dict[ParentRef, list[str]] = {}
        for o in self.objects:
            out.setdefault(o.parent, []).append(o.id)
        return out

    def children_of(self, obj_id: str) -> list[str]:
        return [o.id for o in self.objects if o.parent.kind == "object" and o.parent.ref == obj_id]

    def ancestors(self, obj_id: str) -> Iterator[str]:
        """Walk the support chain upward through object parents."""
        seen = {obj_id}
        ids = self.by_id()
        cur = ids[obj_id] if obj_id in ids else self.get(obj_id)
        while cur.parent.kind == "object":
            pid = cur.parent.ref
            if pid in seen or pid not in ids:
                return
            seen.add(pid)
            yield pid
            cur = ids[pid]

    def is_ancestor(self, a: str, b: str) -> bool:
        """True when ``a`` appears in ``b``'s support chain."""
        return a in self.ancestors(b)

    def descendants(self, obj_id: str) -> list[str]:
        out: list[str] = []
        frontier = [obj_id]
        while frontier:
            nxt: list[str] = []
            for pid in frontier:
                for cid in self.children_of(pid):
                    if cid not in out:
                        out.append(cid)
                        nxt.append(cid)
            frontier = nxt
        return out

    def topo_order(self) -> list[str]:
        """Object ids ordered so that every parent precedes its children."""
        ids = self.by_id()
        order: list[str] = []
        placed: set[str] = set()
        frontier = [o.id for o in self.objects if o.parent.kind != "object"]
        while frontier:
            nxt: list[str] = []
            for oid in frontier:
                order.append(oid)
                placed.add(oid)
            for o in self.objects:
                if o.id in placed or o.parent.kind != "object":
                    continue
                if o.parent.ref in placed:
                    nxt.append(o.id)
            frontier = nxt
        if len(order) != len(self.objects):
            stuck = [o.id for o in self.objects if o.id not in placed]
            raise SceneValidationError(f"support cycle involving object {stuck[0]!r}")
        return order

    def validate(self) -> None:
        seen: set[str] = set()
        for o in self.objects:
            o.validate()
            if o.id in seen:
                raise SceneValidationError(f"duplicate object id: {o.id!r}")
            seen.add(o.id)
        for o in self.objects:
            if o.parent.kind == "object":
                if o.parent.ref == o.id:
                    raise SceneValidationError(f"object {o.id!r} cannot support itself")
                if o.parent.ref not in seen:
                    raise SceneValidationError(
                        f"object {o.id!r} references missing parent {o.parent.ref!r}"
                    )
        self.topo_order()


def derive_vertical(obj: ObjectState, scene: SceneState) -> float:
    """Derived z for floor/object-supported objects; free z otherwise."""
    if obj.parent.kind == "floor":
        return 0.0
    if obj.parent.kind == "object":
        parent = scene.get(obj.parent.ref)
        return parent.z_top
    return obj.p_vert


def derive_all_verticals(scene: SceneState) -> SceneState:
    """Recompute every derived z, parents before children."""
    ids = scene.by_id()
    for oid in scene.topo_order():
        obj = ids[oid]
        if obj.parent.derives_z:
            current = SceneState(scene.room, tuple(ids[o.id] for o in scene.objects))
            ids[oid] = replace(obj, p_vert=derive_vertical(obj, current))
    return scene.with_objects(ids[o.id] for o in scene.objects)


# Constraint records -------------------------------------------------------


@dataclass(frozen=True)
class Adjacent:
    """Keep the nearest faces of two objects at a target distance."""

    a: str
    b: str
    distance: float


@dataclass(frozen=True)
class AgainstWall:
    obj: str
    wall: str


@dataclass(frozen=True)
class PointToward:
    obj: str
    target: str


@dataclass(frozen=True)
class AlignWith:
    """Match another object's yaw, or an absolute angle in degrees."""

    obj: str
    target: str | None = None
    angle: float | None = None


@dataclass(frozen=True)
class ConstraintSet:
    adjacent: tuple[Adjacent, ...] = ()
    against_wall: tuple[AgainstWall, ...] = ()
    point_toward: tuple[PointToward, ...] = ()
    align_with: tuple[AlignWith, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "adjacent", tuple(self.adjacent))
        object.__setattr__(self, "against_wall", tuple(self.against_wall))
        object.__setattr__(self, "point_toward", tuple(self.point_toward))
        object.__setattr__(self, "align_with", tuple(self.align_with))

    def __len__(self) -> int:
        return (
            len(self.adjacent)
            + len(self.against_wall)
            + len(self.point_toward)
            + len(self.align_with)
        )

    def merged(self, other: "ConstraintSet") -> "ConstraintSet":
        return ConstraintSet(
            self.adjacent + other.adjacent,
            self.against_wall + other.against_wall,
            self.point_toward + other.point_toward,
            self.align_with + other.align_with,
        )

    def without_objects(self, ids: set[str]) -> "ConstraintSet":
        """Drop every constraint that mentions any of the given ids."""
        return ConstraintSet(
            tuple(c for c in self.adjacent if c.a not in ids and c.b not in ids),
            tuple(c for c in self.against_wall if c.obj not in ids),
            tuple(c for c in self.point_toward if c.obj not in ids and c.target not in ids),
            tuple(c for c in self.align_with if c.obj not in ids and c.target not in ids),
        )

    def validate(self, scene: SceneState) -> None:
        known = {o.id for o in scene.objects}

        def check(cid: str, role: str) -> None:
            if cid not in known:
                raise SceneValidationError(f"constraint references unknown {role}: {cid!r}")

        for c in self.adjacent:
            check(c.a, "object")
            check(c.b, "object")
            if c.a == c.b:
                raise SceneValidationError(f"adjacent constraint repeats object {c.a!r}")
            if not (isinstance(c.distance, (int, float)) and math.isfinite(c.distance) and c.distance >= 0):
                raise SceneValidationError(f"adjacent distance must be >= 0, got {c.distance!r}")
        for w in self.against_wall:
            check(w.obj, "object")
            if w.wall not in WALL_NAMES:
                raise SceneValidationError(f"unknown wall name: {w.wall!r}")
        for p in self.point_toward:
            check(p.obj, "object")
            check(p.target, "object")
            if p.obj == p.target:
                raise SceneValidationError(f"point_toward constraint repeats object {p.obj!r}")
        for al in self.align_with:
            check(al.obj, "object")
            if (al.target is None) == (al.angle is None):
                raise SceneValidationError(
                    f"align_with on {al.obj!r} needs exactly one of target or angle"
                )
            if al.target is not None:
                check(al.target, "object")
                if al.target == al.obj:
                    raise SceneValidationError(f"align_with constraint repeats object {al.obj!r}")


# JSON serialization -------------------------------------------------------


def _round9(x: float) -> float:
    """Canonicalize a float to 9 significant digits."""
    return float(format(float(x), ".9g"))


def _num(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneValidationError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _vec(value, n: int, where: str) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise SceneValidationError(f"{where}: expected {n} numbers, got {value!r}")
    return tuple(_num(v, where) for v in value)


def scene_to_dict(scene: SceneState, constraints: ConstraintSet | None = None) -> dict:
    doc: dict = {
        "room": {
            "width": _round9(scene.room.width),
            "depth": _round9(scene.room.depth),
            "height": _round9(scene.room.height),
        },
        "objects": [
            {
                "id": o.id,
                "name": o.name,
                "position": [_round9(o.p_plane[0]), _round9(o.p_plane[1])],
                "z": _round9(o.p_vert),
                "yaw": _round9(o.yaw),
                "dims": [_round9(v) for v in o.base_dims],
                "scale": [_round9(v) for v in o.scale],
                "parent": o.parent.encode(),
            }
            for o in scene.objects
        ],
    }
    if constraints is not None and len(constraints) > 0:
        doc["constraints"] = constraints_to_dict(constraints)
    return doc


def constraints_to_dict(constraints: ConstraintSet) -> dict:
    out: dict = {}
    if constraints.adjacent:
        out["adjacent"] = [
            {"a": c.a, "b": c.b, "distance": _round9(c.distance)} for c in constraints.adjacent
        ]
    if constraints.against_wall:
        out["against_wall"] = [{"object": c.obj, "wall": c.wall} for c in constraints.against_wall]
    if constraints.point_toward:
        out["point_toward"] = [
            {"object": c.obj, "target": c.target} for c in constraints.point_toward
        ]
    if constraints.align_with:
        rows = []
        for c in constraints.align_with:
            if c.target is not None:
                rows.append({"object": c.obj, "target": c.target})
            else:
                rows.append({"object": c.obj, "angle": _round9(c.angle)})
        out["align_with"] = rows
    return out


def constraints_from_dict(doc: dict) -> ConstraintSet:
    if not isinstance(doc, dict):
        raise SceneValidationError("constraints must be an object")
    adjacent = tuple(
        Adjacent(str(row["a"]), str(row["b"]), _num(row["distance"], "adjacent.distance"))
        for row in doc.get("adjacent", ())
    )
    against = tuple(
        AgainstWall(str(row["object"]), str(row["wall"])) for row in doc.get("against_wall", ())
    )
    point = tuple(
        PointToward(str(row["object"]), str(row["target"]))
        for row in doc.get("point_toward", ())
    )
    align = []
    for row in doc.get("align_with", ()):
        if "target" in row and "angle" in row:
            raise SceneValidationError(
                f"align_with on {row.get('object')!r} needs exactly one of target or angle"
            )
        if "target" in row:
            align.append(AlignWith(str(row["object"]), target=str(row["target"])))
        elif "angle" in row:
            align.append(AlignWith(str(row["object"]), angle=_num(row["angle"], "align_with.angle")))
        else:
            raise SceneValidationError(
                f"align_with on {row.get('object')!r} needs exactly one of target or angle"
            )
    return ConstraintSet(adjacent, against, point, tuple(align))


def object_from_dict(row: dict) -> ObjectState:
    if not isinstance(row, dict) or "id" not in row:
        raise SceneValidationError(f"object entry missing id: {row!r}")
    oid = str(row["id"])
    where = f"object {oid!r}"
    try:
        return ObjectState(
            id=oid,
            name=str(row.get("name", oid)),
            p_plane=_vec(row.get("position"), 2, f"{where} position"),  # type: ignore[arg-type]
            p_vert=_num(row.get("z", 0.0), f"{where} z"),
            yaw=_num(row.get("yaw", 0.0), f"{where} yaw") % 360.0,
            base_dims=_vec(row.get("dims"), 3, f"{where} dims"),  # type: ignore[arg-type]
            scale=_vec(row.get("scale", (1.0, 1.0, 1.0)), 3, f"{where} scale"),  # type: ignore[arg-type]
            parent=ParentRef.decode(row.get("parent", "floor")),
        )
    except SceneValidationError:
        raise
    except (TypeError, KeyError) as exc:
        raise SceneValidationError(f"{where}: {exc}") from exc


def scene_from_dict(doc: dict) -> tuple[SceneState, ConstraintSet]:
    if not isinstance(doc, dict) or "room" not in doc:
        raise SceneValidationError("scene document must contain a room")
    room_doc = doc["room"]
    room = RoomSpec(
        _num(room_doc.get("width"), "room.width"),
        _num(room_doc.get("depth"), "room.depth"),
        _num(room_doc.get("height"), "room.height"),
    )
    objects = [object_from_dict(row) for row in doc.get("objects", ())]
    scene = SceneState(room, tuple(objects))
    scene.validate()
    scene = derive_all_verticals(scene)
    constraints = constraints_from_dict(doc.get("constraints", {}))
    constraints.validate(scene)
    return scene, constraints


def _dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_text_atomic(path: str, text: str) -> None:
    """Write a file via a temp sibling and rename, so readers never see partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_scene(path: str) -> tuple[SceneState, ConstraintSet]:
    """Load a scene file; returns the scene and any embedded constraints."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneValidationError(f"{path}: invalid JSON ({exc})") from exc
    return scene_from_dict(doc)


def save_scene(path: str, scene: SceneState, constraints: ConstraintSet | None = None) -> None:
    write_text_atomic(path, _dump_json(scene_to_dict(scene, constraints)))


def load_constraints(path: str) -> ConstraintSet:
    """Load a standalone constraints file (bare dict or {"constraints": ...})."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneValidationError(f"{path}: invalid JSON ({exc})") from exc
    if isinstance(doc, dict) and "constraints" in doc:
        doc = doc["constraints"]
    return constraints_from_dict(doc)
