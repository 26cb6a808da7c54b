"""Top-down SVG rendering of scenes.

Output is plain text assembled with fixed float formatting, so the same
scene always renders to the identical byte sequence; tests diff it
directly.  World y points away from the front wall while SVG y grows
downward, so the vertical axis is flipped and the front wall lands at
the bottom edge of the image.

Each object is its yaw-rotated footprint polygon with a tick from the
center toward the face it points with (yaw 0 faces +y).  Optional
layers add a metric grid with axis labels, object ids, and constraint
overlays (adjacency pairs, wall attractions, pointing directions).
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import footprint
from .scene import ConstraintSet, SceneState

__all__ = ["RenderSpec", "render_svg"]

# Level palette: floor levels first, repeated when levels run long.
_PALETTE = (
    "#9ecae1",
    "#a1d99b",
    "#fdae6b",
    "#bcbddc",
    "#fc9272",
    "#c7e9c0",
    "#fdd0a2",
    "#d4b9da",
)
_FLAT_FILL = "#9ecae1"


@dataclass(frozen=True)
class RenderSpec:
    """Rendering options; lengths are meters, ``scale`` is px per meter."""

    scale: float = 100.0
    show_grid: bool = True
    grid_spacing: float = 1.0
    show_ids: bool = True
    show_constraint_overlays: bool = False
    color_by_level: bool = False

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ValueError("scale must be > 0")
        if self.grid_spacing <= 0:
            raise ValueError("grid spacing must be > 0")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_svg(
    scene: SceneState,
    spec: RenderSpec | None = None,
    constraints: ConstraintSet | None = None,
) -> str:
    """Render a scene (and optionally its constraints) to an SVG string."""
    if spec is None:
        spec = RenderSpec()
    room = scene.room
    s = spec.scale
    width = room.width * s
    height = room.depth * s

    def px(x: float, y: float) -> tuple[float, float]:
        return x * s, (room.depth - y) * s

    lines: list[str] = []
    lines.append('<?xml version="1.0" encoding="UTF-8"?>')
    lines.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
    )
    lines.append(
        f'<rect x="0" y="0" width="{_fmt(width)}" height="{_fmt(height)}" '
        'fill="#fcfcfa" stroke="#303030" stroke-width="2"/>'
    )

    if spec.show_grid:
        step = spec.grid_spacing
        k = 1
        while k * step < room.width:
            gx = k * step * s
            lines.append(
                f'<line x1="{_fmt(gx)}" y1="0" x2="{_fmt(gx)}" y2="{_fmt(height)}" '
                'stroke="#dddddd" stroke-width="1"/>'
            )
            lines.append(
                f'<text x="{_fmt(gx + 2)}" y="{_fmt(height - 4)}" '
                f'font-size="10" fill="#999999">{_fmt(k * step)}</text>'
            )
            k += 1
        k = 1
        while k * step < room.depth:
            gy = (room.depth - k * step) * s
            lines.append(
                f'<line x1="0" y1="{_fmt(gy)}" x2="{_fmt(width)}" y2="{_fmt(gy)}" '
                'stroke="#dddddd" stroke-width="1"/>'
            )
            lines.append(
                f'<text x="4" y="{_fmt(gy - 3)}" '
                f'font-size="10" fill="#999999">{_fmt(k * step)}</text>'
            )
            k += 1

    level_index: dict = {}
    for o in scene.objects:
        level_index.setdefault(o.parent, len(level_index))

    for o in scene.objects:
        corners = footprint(o)
        pts = " ".join(
            f"{_fmt(cx)},{_fmt(cy)}" for cx, cy in (px(x, y) for x, y in corners)
        )
        if spec.color_by_level:
            fill = _PALETTE[level_index[o.parent] % len(_PALETTE)]
        else:
            fill = _FLAT_FILL
        # Mounted objects hover rather than rest; dash their outline.
        dash = ' stroke-dasharray="5,3"' if o.parent.kind in ("wall", "ceiling") else ""
        lines.append(
            f'<polygon points="{pts}" fill="{fill}" fill-opacity="0.75" '
            f'stroke="#303030" stroke-width="1.5"{dash}/>'
        )
        # Orientation tick: center to the midpoint of the facing edge.
        fx = 0.5 * (corners[0][0] + corners[1][0])
        fy = 0.5 * (corners[0][1] + corners[1][1])
        c1 = px(*o.p_plane)
        c2 = px(fx, fy)
        lines.append(
            f'<line x1="{_fmt(c1[0])}" y1="{_fmt(c1[1])}" x2="{_fmt(c2[0])}" '
            f'y2="{_fmt(c2[1])}" stroke="#b03030" stroke-width="2"/>'
        )

    if spec.show_constraint_overlays and constraints is not None:
        index = scene.by_id()

        def center(oid: str) -> tuple[float, float]:
            return px(*index[oid].p_plane)

        for c in constraints.adjacent:
            (x1, y1), (x2, y2) = center(c.a), center(c.b)
            lines.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" '
                f'y2="{_fmt(y2)}" stroke="#2b6cb0" stroke-width="1.5" '
                'stroke-dasharray="6,4"/>'
            )
        for c in constraints.against_wall:
            (x1, y1) = center(c.obj)
            if c.wall == "left":
                x2, y2 = 0.0, y1
            elif c.wall == "right":
                x2, y2 = width, y1
            elif c.wall == "front":
                x2, y2 = x1, height
            else:
                x2, y2 = x1, 0.0
            lines.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" '
                f'y2="{_fmt(y2)}" stroke="#718096" stroke-width="1.5" '
                'stroke-dasharray="2,3"/>'
            )
        for c in constraints.point_toward:
            (x1, y1), (x2, y2) = center(c.obj), center(c.target)
            lines.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" '
                f'y2="{_fmt(y2)}" stroke="#b03030" stroke-width="1" '
                'stroke-dasharray="1,3"/>'
            )
            lines.append(
                f'<circle cx="{_fmt(x2)}" cy="{_fmt(y2)}" r="4" '
                'fill="none" stroke="#b03030" stroke-width="1"/>'
            )

    if spec.show_ids:
        for o in scene.objects:
            cx, cy = px(*o.p_plane)
            lines.append(
                f'<text x="{_fmt(cx)}" y="{_fmt(cy + 4)}" font-size="11" '
                f'fill="#1a1a1a" text-anchor="middle">{o.id}</text>'
            )

    lines.append("</svg>")
    return "\n".join(lines) + "\n"
