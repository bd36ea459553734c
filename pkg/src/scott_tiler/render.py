"""SVG drawings of a line family in the Poincaré disk."""

from __future__ import annotations

import colorsys
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

import numpy as np

from .geom import Point, point_to_disk
from .report import write_atomic

# seven well-separated hues
DEFAULT_PALETTE = ("#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6")
GRAY = "#555555"
MARGIN = 0.02

ET.register_namespace("", "http://www.w3.org/2000/svg")


@dataclass
class RenderSpec:
    width: int = 800
    height: int = 800
    palette: tuple[str, ...] = DEFAULT_PALETTE
    line_width: float = 1.2
    boundary_width: float = 1.0
    show_lines: bool = True
    show_vertices: bool = False
    show_tiles: bool = False
    show_cone_points: bool = False
    show_growth_polygon: bool = False
    tile_fill: dict[int, str] = field(default_factory=lambda: {3: "#fde0dd", 4: "#e0ecf4"})

    def __post_init__(self):
        if len(self.palette) < 7:
            raise ValueError("palette needs at least 7 entries")
        if len({c.lower() for c in self.palette}) != len(self.palette):
            raise ValueError("palette entries must be pairwise distinct")

    def color(self, k: int) -> str:
        """Palette entry for color ``k`` (1-based); extra hues past the palette."""
        if k <= len(self.palette):
            return self.palette[k - 1]
        h = ((k - len(self.palette)) * 0.618034) % 1.0
        r, g, b = colorsys.hsv_to_rgb(h, 0.8, 0.75)
        return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


class _Canvas:
    def __init__(self, spec: RenderSpec):
        self.cx = spec.width / 2
        self.cy = spec.height / 2
        self.scale = min(spec.width, spec.height) / 2 / (1 + MARGIN)

    def xy(self, w: complex) -> tuple[float, float]:
        return self.cx + self.scale * w.real, self.cy - self.scale * w.imag

    def fmt(self, w: complex) -> str:
        x, y = self.xy(w)
        return f"{x:.3f} {y:.3f}"


def _arc(canvas: _Canvas, a: complex, b: complex, phi1: float, phi2: float) -> str:
    """Path command from ``a`` to ``b`` along the geodesic with ends at ``phi1``, ``phi2``."""
    gap = abs(phi2 - phi1)
    gap = min(gap, 2 * math.pi - gap)
    if abs(gap - math.pi) < 1e-9:
        return f"L {canvas.fmt(b)}"
    mid = np.exp(1j * phi1) + np.exp(1j * phi2)
    center = mid / abs(mid) / math.cos(gap / 2)
    radius = math.tan(gap / 2) * canvas.scale
    (ax, ay), (bx, by), (cx, cy) = canvas.xy(a), canvas.xy(b), canvas.xy(center)
    sweep = 1 if (ax - cx) * (by - cy) - (ay - cy) * (bx - cx) > 0 else 0
    return f"A {radius:.3f} {radius:.3f} 0 0 {sweep} {bx:.3f} {by:.3f}"


def geodesic_path(canvas: _Canvas, phi1: float, phi2: float) -> str:
    a, b = np.exp(1j * phi1), np.exp(1j * phi2)
    return f"M {canvas.fmt(a)} {_arc(canvas, a, b, phi1, phi2)}"


def _klein_to_disk(k: complex) -> complex:
    return k / (1 + math.sqrt(max(0.0, 1 - abs(k) ** 2)))


def build_svg(
    angles: np.ndarray,
    colors: dict[int, int] | None = None,
    spec: RenderSpec | None = None,
    tiles: list[tuple[list[complex], list[int], int]] | None = None,
    cone_points: dict[str, list[Point]] | None = None,
    polygon: list[complex] | None = None,
) -> ET.Element:
    """SVG element tree: one ``path.line`` per row of ``angles``.

    ``tiles`` holds (disk-model vertices, side lines, side count) triples,
    ``polygon`` a closed polygon in the disk model drawn as an overlay.
    """
    spec = spec or RenderSpec()
    canvas = _Canvas(spec)
    svg = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "version": "1.1",
            "width": str(spec.width),
            "height": str(spec.height),
            "viewBox": f"0 0 {spec.width} {spec.height}",
        },
    )
    ET.SubElement(
        svg,
        "circle",
        {
            "class": "boundary",
            "cx": f"{canvas.cx:.3f}",
            "cy": f"{canvas.cy:.3f}",
            "r": f"{canvas.scale:.3f}",
            "fill": "#ffffff",
            "stroke": "#000000",
            "stroke-width": str(spec.boundary_width),
        },
    )
    if spec.show_tiles and tiles:
        group = ET.SubElement(svg, "g", {"class": "tiles"})
        for verts, sides, count in tiles:
            fill = spec.tile_fill.get(count)
            if fill is None:
                continue
            cmds = [f"M {canvas.fmt(verts[0])}"]
            for k, l in enumerate(sides):
                a, b = verts[k], verts[(k + 1) % len(verts)]
                cmds.append(_arc(canvas, a, b, *angles[l]))
            ET.SubElement(group, "path", {"class": "tile", "d": " ".join(cmds) + " Z", "fill": fill, "stroke": "none"})
    if spec.show_lines:
        group = ET.SubElement(svg, "g", {"class": "lines", "fill": "none"})
        for i, (phi1, phi2) in enumerate(angles):
            stroke = spec.color(colors[i]) if colors and i in colors else GRAY
            ET.SubElement(
                group,
                "path",
                {
                    "class": "line",
                    "id": f"line-{i}",
                    "d": geodesic_path(canvas, phi1, phi2),
                    "stroke": stroke,
                    "stroke-width": str(spec.line_width),
                },
            )
    if spec.show_growth_polygon and polygon:
        pts = " ".join(canvas.fmt(w).replace(" ", ",") for w in polygon)
        ET.SubElement(svg, "polygon", {"class": "growth", "points": pts, "fill": "none", "stroke": "#000000", "stroke-width": "2"})
    if spec.show_cone_points and cone_points:
        marks = {"X": "#000000", "Y": "#7f7f7f", "Z": "#bcbd22"}
        group = ET.SubElement(svg, "g", {"class": "cone-points"})
        for name, pts in cone_points.items():
            for p in pts:
                x, y = canvas.xy(point_to_disk(p))
                ET.SubElement(group, "circle", {"class": f"cone-{name}", "cx": f"{x:.3f}", "cy": f"{y:.3f}", "r": "2.5", "fill": marks.get(name, "#000000")})
    return svg


def render_svg(A, coloring=None, spec: RenderSpec | None = None, path=None, cone_points=None, polygon=None) -> str:
    """Render an arrangement's lines, colored if a coloring is given.

    Without a coloring every line is gray. Returns the SVG text and, when
    ``path`` is given, writes it there atomically.
    """
    spec = spec or RenderSpec()
    colors = getattr(coloring, "colors", coloring)
    tiles = None
    if spec.show_tiles:
        tiles = [
            ([_klein_to_disk(A.vertices[v].klein) for v in t.vertices], list(t.lines), t.side_count)
            for t in A.complete_tiles()
        ]
    root = build_svg(A.family.angles, colors, spec, tiles, cone_points, polygon)
    text = ET.tostring(root, encoding="unicode", xml_declaration=True)
    if path is not None:
        write_atomic(path, text)
    return text
