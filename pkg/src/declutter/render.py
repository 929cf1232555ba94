"""SVG drawing of a scene and, optionally, a relocation path."""
from __future__ import annotations

import xml.etree.ElementTree as ET

from .scene import SceneState

PX_PER_M = 1000.0
PAD = 20.0
COLORS = {"target": "#2e9d3a", "obstacle": "#d23c3c", "first": "#8c8c8c"}


def render_svg(scene: SceneState, path: tuple[int, ...] | None = None) -> str:
    """Top view of the table with the robot's edge at the bottom.

    ``path`` lists object ids in removal order, ending at the target; it is
    drawn as a bold polyline from the access point and its first object is
    grayed out.
    """
    ws = scene.workspace
    w = ws.width * PX_PER_M + 2 * PAD
    h = ws.depth * PX_PER_M + 2 * PAD

    def xy(x, y):
        return PAD + x * PX_PER_M, PAD + (ws.depth - y) * PX_PER_M

    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": f"{w:.0f}", "height": f"{h:.0f}",
        "viewBox": f"0 0 {w:.0f} {h:.0f}",
    })
    x0, y0 = xy(0.0, ws.depth)
    ET.SubElement(svg, "rect", {
        "x": f"{x0:.1f}", "y": f"{y0:.1f}",
        "width": f"{ws.width * PX_PER_M:.1f}", "height": f"{ws.depth * PX_PER_M:.1f}",
        "fill": "none", "stroke": "black",
    })
    first = path[0] if path and len(path) > 1 else None
    for o in scene.present:
        kind = "target" if o.is_target else ("first" if o.id == first else "obstacle")
        cx, cy = xy(o.x, o.y)
        attrs = {
            "id": f"obj{o.id}", "class": kind,
            "cx": f"{cx:.1f}", "cy": f"{cy:.1f}", "r": f"{o.radius * PX_PER_M:.1f}",
            "fill": COLORS[kind], "stroke": "black",
        }
        if not o.known:
            attrs["fill-opacity"] = "0.35"
            attrs["stroke-dasharray"] = "4 2"
        ET.SubElement(svg, "circle", attrs)
    if path:
        pts = [xy(*scene.robot.access_point)] + [xy(*scene[i].center) for i in path]
        ET.SubElement(svg, "polyline", {
            "class": "plan",
            "points": " ".join(f"{x:.1f},{y:.1f}" for x, y in pts),
            "fill": "none", "stroke": "#b00000", "stroke-width": "4",
        })
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"
