"""Deterministic SVG rendering of floorplans with shifters.

One stroked rectangle per room, one filled rectangle per module (color keyed
by voltage level from a fixed palette) and one small dark rectangle per
shifter. Element order and formatting are fixed so identical inputs give
byte-identical documents; the viewBox equals the chip bounds.
"""

from __future__ import annotations

PALETTE = (
    "#d94f4f",
    "#e8a33d",
    "#4f78d9",
    "#53b86e",
    "#9b59b6",
    "#2dbdb6",
    "#c2c24e",
    "#8a6d3b",
)
SHIFTER_FILL = "#1f1f1f"


def _rect(x, y, w, h, chip_h, style) -> str:
    # chip coordinates grow upward; svg grows downward
    return (
        f'<rect x="{x}" y="{chip_h - y - h}" width="{w}" height="{h}" {style}/>'
    )


def render_svg(chip_w, chip_h, rooms, modules, shifters) -> str:
    """Low-level renderer over bare rectangles.

    rooms: (x, y, w, h); modules: (x, y, w, h, level); shifters: (x, y, w, h).
    Shifters with zero size (bookkeeping fallback spots) are drawn 1x1.
    """
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {chip_w} {chip_h}" width="{chip_w}" height="{chip_h}">'
    ]
    for x, y, w, h in rooms:
        parts.append(
            _rect(x, y, w, h, chip_h, 'fill="none" stroke="#555" stroke-width="0.3"')
        )
    for x, y, w, h, level in modules:
        color = PALETTE[(level - 1) % len(PALETTE)]
        parts.append(
            _rect(
                x, y, w, h, chip_h,
                f'fill="{color}" stroke="#000" stroke-width="0.2"',
            )
        )
    for x, y, w, h in shifters:
        if w == 0 or h == 0:
            w = h = 1
        parts.append(_rect(x, y, w, h, chip_h, f'fill="{SHIFTER_FILL}"'))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_svg(floorplan, assignment, shifter_assignment) -> str:
    """Render a packed floorplan, its voltage levels and placed shifters."""
    rooms = [(r.x, r.y, r.w, r.h) for r in floorplan.rooms]
    modules = [
        (r.x, r.y, r.module_w, r.module_h, assignment.level[i])
        for i, r in enumerate(floorplan.rooms)
    ]
    rects = []
    if shifter_assignment is not None:
        placements = shifter_assignment.placements()
        for sid in sorted(placements):
            rects.append(placements[sid])
    return render_svg(floorplan.chip_w, floorplan.chip_h, rooms, modules, rects)
