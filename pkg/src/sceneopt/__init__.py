"""Constraint-driven force-directed layout optimization for 3D indoor scenes.

The package models a scene as oriented boxes in a support hierarchy,
turns constraint violations into pseudo-forces, and relaxes the layout
with explicit integration steps plus a deadlock guard.  Companion
modules cover asset ranking, scene editing, plausibility metrics,
hyperparameter search, SVG rendering and a command-line interface.
"""

from ._kernel import BACKEND as kernel_backend
from .deadlock import DeadlockEvent
from .forces import ForceContribution, ForceKind, ForceLedger, accumulate
from .optimizer import OptimizerParams, OptResult, optimize, optimize_groups, residual, step
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
    SceneValidationError,
    load_constraints,
    load_scene,
    save_scene,
)

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "DeadlockEvent",
    "ForceContribution",
    "ForceKind",
    "ForceLedger",
    "accumulate",
    "OptimizerParams",
    "OptResult",
    "optimize",
    "optimize_groups",
    "residual",
    "step",
    "Adjacent",
    "AgainstWall",
    "AlignWith",
    "ConstraintSet",
    "ObjectState",
    "ParentRef",
    "PointToward",
    "RoomSpec",
    "SceneState",
    "SceneValidationError",
    "load_constraints",
    "load_scene",
    "save_scene",
    "__version__",
]
