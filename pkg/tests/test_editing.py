import pytest

from sceneopt.editing import (
    AddCommand,
    DeleteCommand,
    EditError,
    MoveCommand,
    apply,
    command_from_dict,
    edit_and_optimize,
)
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


def box(oid, x, y, dims=(1.0, 1.0, 0.5), parent=ParentRef("floor"), z=0.0):
    return ObjectState(oid, oid, (x, y), z, 0.0, dims, parent=parent)


def base_scene():
    desk = box("desk", 2.0, 2.0, dims=(1.6, 0.8, 0.75))
    lamp = box("lamp", 2.2, 2.0, dims=(0.2, 0.2, 0.4), parent=ParentRef("object", "desk"))
    chair = box("chair", 4.0, 2.0, dims=(0.5, 0.5, 0.9))
    scene = derive_all_verticals(SceneState(RoomSpec(6.0, 4.0, 2.5), (desk, lamp, chair)))
    cons = ConstraintSet(
        adjacent=(Adjacent("chair", "desk", 0.1),),
        against_wall=(AgainstWall("desk", "back"),),
    )
    return scene, cons


class TestAdd:
    def test_appends_and_derives(self):
        scene, cons = base_scene()
        mug = box("mug", 2.4, 2.0, dims=(0.1, 0.1, 0.12), parent=ParentRef("object", "desk"))
        out_scene, out_cons = apply(scene, cons, AddCommand(mug))
        assert [o.id for o in out_scene.objects] == ["desk", "lamp", "chair", "mug"]
        assert out_scene.get("mug").p_vert == out_scene.get("desk").z_top
        assert out_cons == cons

    def test_merges_constraints(self):
        scene, cons = base_scene()
        shelf = box("shelf", 1.0, 0.3, dims=(1.0, 0.3, 0.4), z=1.5, parent=ParentRef("wall", "front"))
        cmd = AddCommand(shelf, ConstraintSet(align_with=(AlignWith("shelf", angle=0.0),)))
        _, out_cons = apply(scene, cons, cmd)
        assert out_cons.adjacent == cons.adjacent
        assert out_cons.align_with == (AlignWith("shelf", angle=0.0),)

    def test_duplicate_id(self):
        scene, cons = base_scene()
        with pytest.raises(EditError, match="already exists"):
            apply(scene, cons, AddCommand(box("desk", 1.0, 1.0)))

    def test_missing_parent(self):
        scene, cons = base_scene()
        ghost_child = box("x", 1, 1, parent=ParentRef("object", "ghost"))
        with pytest.raises(EditError, match="does not exist"):
            apply(scene, cons, AddCommand(ghost_child))

    def test_bad_constraints(self):
        scene, cons = base_scene()
        cmd = AddCommand(
            box("x", 1.0, 3.5),
            ConstraintSet(point_toward=(PointToward("x", "ghost"),)),
        )
        with pytest.raises(EditError, match="unknown"):
            apply(scene, cons, cmd)

    def test_named_ids(self):
        assert AddCommand(box("x", 1, 1)).named_ids == frozenset({"x"})


class TestDelete:
    def test_cascades_to_descendants(self):
        scene, cons = base_scene()
        out_scene, out_cons = apply(scene, cons, DeleteCommand(("desk",)))
        assert [o.id for o in out_scene.objects] == ["chair"]
        # constraints naming desk went with it
        assert out_cons.adjacent == ()
        assert out_cons.against_wall == ()

    def test_leaf_delete_keeps_parent(self):
        scene, cons = base_scene()
        out_scene, out_cons = apply(scene, cons, DeleteCommand(("lamp",)))
        assert [o.id for o in out_scene.objects] == ["desk", "chair"]
        assert out_cons == cons

    def test_unknown_id(self):
        scene, cons = base_scene()
        with pytest.raises(EditError, match="unknown object id"):
            apply(scene, cons, DeleteCommand(("ghost",)))

    def test_multi_delete(self):
        scene, cons = base_scene()
        out_scene, _ = apply(scene, cons, DeleteCommand(("lamp", "chair")))
        assert [o.id for o in out_scene.objects] == ["desk"]


class TestMove:
    def test_translates_subtree_exactly(self):
        scene, cons = base_scene()
        out_scene, _ = apply(scene, cons, MoveCommand("desk", p_plane=(3.0, 1.5)))
        desk = out_scene.get("desk")
        lamp = out_scene.get("lamp")
        assert desk.p_plane == (3.0, 1.5)
        # the lamp kept its exact offset relative to the desk
        assert lamp.p_plane == (2.2 + (3.0 - 2.0), 2.0 + (1.5 - 2.0))
        assert lamp.p_vert == desk.z_top
        # untouched object is bit-identical
        assert out_scene.get("chair") == scene.get("chair")

    def test_reparent(self):
        scene, cons = base_scene()
        out_scene, _ = apply(
            scene, cons, MoveCommand("lamp", parent=ParentRef("wall", "left"), p_plane=(0.2, 2.0))
        )
        lamp = out_scene.get("lamp")
        assert lamp.parent == ParentRef("wall", "left")
        # wall mounts keep their old height as the free z start
        assert lamp.p_vert == scene.get("lamp").p_vert

    def test_nothing_to_change(self):
        scene, cons = base_scene()
        with pytest.raises(EditError, match="nothing to change"):
            apply(scene, cons, MoveCommand("desk"))

    def test_self_parent(self):
        scene, cons = base_scene()
        with pytest.raises(EditError, match="itself"):
            apply(scene, cons, MoveCommand("desk", parent=ParentRef("object", "desk")))

    def test_missing_parent(self):
        scene, cons = base_scene()
        with pytest.raises(EditError, match="does not exist"):
            apply(scene, cons, MoveCommand("desk", parent=ParentRef("object", "ghost")))

    def test_cycle(self):
        scene, cons = base_scene()
        with pytest.raises(EditError, match="cycle"):
            apply(scene, cons, MoveCommand("desk", parent=ParentRef("object", "lamp")))

    def test_unknown_id(self):
        scene, cons = base_scene()
        with pytest.raises(EditError, match="unknown object id"):
            apply(scene, cons, MoveCommand("ghost", p_plane=(1.0, 1.0)))

    def test_clear_adjacent(self):
        scene, cons = base_scene()
        out_scene, out_cons = apply(
            scene, cons, MoveCommand("chair", p_plane=(5.0, 3.0), clear_adjacent=True)
        )
        assert out_cons.adjacent == ()
        assert out_cons.against_wall == cons.against_wall
        # clear_adjacent alone is a valid command
        _, only_clear = apply(scene, cons, MoveCommand("chair", clear_adjacent=True))
        assert only_clear.adjacent == ()

    def test_reparent_onto_object_derives_height(self):
        scene, cons = base_scene()
        out_scene, _ = apply(
            scene, cons, MoveCommand("chair", p_plane=(2.0, 2.0), parent=ParentRef("object", "desk"))
        )
        assert out_scene.get("chair").p_vert == out_scene.get("desk").z_top


class TestApplyDispatch:
    def test_unknown_command_type(self):
        scene, cons = base_scene()
        with pytest.raises(EditError, match="unknown command"):
            apply(scene, cons, object())


class TestEditAndOptimize:
    def test_add_far_object_zero_drift(self):
        scene, cons = base_scene()
        settled = edit_and_optimize(scene, cons, DeleteCommand(("chair",)))
        scene2 = settled.result.scene
        cons2 = settled.edited_constraints
        # drop a new object in free space: nothing else should move
        cmd = AddCommand(box("stool", 5.0, 1.0, dims=(0.4, 0.4, 0.45)))
        out = edit_and_optimize(scene2, cons2, cmd)
        assert out.result.converged
        assert out.untouched_drift == 0.0

    def test_add_colliding_object_moves_it(self):
        scene, cons = base_scene()
        cmd = AddCommand(box("crate", 4.2, 2.0, dims=(0.8, 0.8, 0.5)))
        out = edit_and_optimize(scene, cons, cmd)
        assert out.result.converged
        # the edited scene keeps the raw insertion point
        assert out.edited_scene.get("crate").p_plane == (4.2, 2.0)
        # drift measures only objects the command did not name
        moved = out.result.scene.get("crate").p_plane
        assert moved != (4.2, 2.0)
        assert out.untouched_drift >= 0.0

    def test_drift_excludes_named_object(self):
        scene, cons = base_scene()
        out = edit_and_optimize(scene, cons, MoveCommand("chair", p_plane=(4.3, 2.0)))
        assert out.result.converged
        named_move = abs(out.result.scene.get("chair").p_plane[0] - 4.3)
        # chair itself may travel to satisfy its adjacency; drift only
        # reports the others
        assert out.untouched_drift <= named_move + 1e-9 or out.untouched_drift >= 0.0
        before = out.edited_scene.by_id()
        worst = 0.0
        for o in out.result.scene.objects:
            if o.id == "chair":
                continue
            b = before[o.id]
            d = (
                (o.p_plane[0] - b.p_plane[0]) ** 2
                + (o.p_plane[1] - b.p_plane[1]) ** 2
                + (o.p_vert - b.p_vert) ** 2
            ) ** 0.5
            worst = max(worst, d)
        assert out.untouched_drift == pytest.approx(worst)


class TestCommandFromDict:
    def test_add(self):
        cmd = command_from_dict(
            {
                "op": "add",
                "object": {"id": "x", "position": [1, 1], "dims": [1, 1, 1]},
                "constraints": {"against_wall": [{"object": "x", "wall": "left"}]},
            }
        )
        assert isinstance(cmd, AddCommand)
        assert cmd.obj.id == "x"
        assert cmd.constraints.against_wall == (AgainstWall("x", "left"),)

    def test_add_without_constraints(self):
        cmd = command_from_dict({"op": "add", "object": {"id": "x", "position": [1, 1], "dims": [1, 1, 1]}})
        assert cmd.constraints == ConstraintSet()

    def test_delete(self):
        cmd = command_from_dict({"op": "delete", "ids": ["a", "b"]})
        assert cmd == DeleteCommand(("a", "b"))

    def test_delete_empty(self):
        with pytest.raises(EditError, match="non-empty"):
            command_from_dict({"op": "delete", "ids": []})

    def test_move_full(self):
        cmd = command_from_dict(
            {"op": "move", "id": "a", "p_plane": [1.5, 2.0], "parent": "wall:left", "clear_adjacent": True}
        )
        assert cmd == MoveCommand("a", (1.5, 2.0), ParentRef("wall", "left"), True)

    def test_move_minimal(self):
        cmd = command_from_dict({"op": "move", "id": "a", "p_plane": [1.0, 1.0]})
        assert cmd.parent is None and cmd.clear_adjacent is False

    def test_missing_op(self):
        with pytest.raises(EditError, match="'op'"):
            command_from_dict({"ids": ["a"]})

    def test_unknown_op(self):
        with pytest.raises(EditError, match="unknown op"):
            command_from_dict({"op": "rotate", "id": "a"})

    def test_malformed_payload(self):
        with pytest.raises(EditError, match="bad move command"):
            command_from_dict({"op": "move", "p_plane": [1, 1]})
        with pytest.raises(EditError, match="bad add command"):
            command_from_dict({"op": "add"})
