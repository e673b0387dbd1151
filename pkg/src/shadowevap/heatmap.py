"""Deterministic SVG wafer heatmaps.

Square cells on the wafer outline with a linear color scale; pure text
output so identical input produces an identical file.
"""

from __future__ import annotations

from typing import Sequence, Union

from .errors import EmptyInput, IoError, ValidationError

# Five-stop blue -> teal -> green -> yellow gradient.
_STOPS = [
    (0.267, 0.005, 0.329),
    (0.229, 0.322, 0.546),
    (0.128, 0.567, 0.551),
    (0.369, 0.789, 0.383),
    (0.993, 0.906, 0.144),
]


def _color(t: float) -> str:
    t = min(1.0, max(0.0, t))
    scaled = t * (len(_STOPS) - 1)
    i = min(int(scaled), len(_STOPS) - 2)
    frac = scaled - i
    rgb = [
        _STOPS[i][k] + frac * (_STOPS[i + 1][k] - _STOPS[i][k]) for k in range(3)
    ]
    return "#" + "".join(f"{round(255 * v):02x}" for v in rgb)


def _cell_size_mm(points: Sequence[tuple[float, float, float]]) -> float:
    """Smallest positive spacing between distinct coordinates, the
    natural cell edge for a regular grid."""
    coords = sorted({p[0] for p in points} | {p[1] for p in points})
    gaps = [b - a for a, b in zip(coords, coords[1:]) if b - a > 1e-9]
    return min(gaps) if gaps else 5.0


def render_heatmap(
    points: Sequence[tuple[float, float, float]],
    field_name: str,
    path: Union[str, object],
    wafer_diameter_mm: float = 100.0,
) -> None:
    """Render (x_mm, y_mm, value) triples as a wafer map SVG.

    Colors are scaled linearly between the field's min and max (a
    constant field renders mid-scale with legend min = max). +y is up.
    """
    if not points:
        raise EmptyInput("no points to render")
    if not wafer_diameter_mm > 0:
        raise ValidationError("wafer_diameter_mm must be > 0")

    values = [p[2] for p in points]
    vmin, vmax = min(values), max(values)
    span = vmax - vmin
    cell = _cell_size_mm(points)
    radius = wafer_diameter_mm / 2.0

    # Layout: wafer drawing area plus a legend strip on the right.
    scale = 6.0  # px per mm
    pad = 20.0
    wafer_px = wafer_diameter_mm * scale
    legend_w = 130.0
    width = pad * 2 + wafer_px + legend_w
    height = pad * 2 + wafer_px
    cx = pad + wafer_px / 2.0
    cy = pad + wafer_px / 2.0

    def px(v: float) -> str:
        return f"{v:.3f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{px(width)}" '
        f'height="{px(height)}" viewBox="0 0 {px(width)} {px(height)}">',
        f'<rect x="0" y="0" width="{px(width)}" height="{px(height)}" fill="#ffffff"/>',
        f'<circle cx="{px(cx)}" cy="{px(cy)}" r="{px(radius * scale)}" '
        f'fill="none" stroke="#333333" stroke-width="1.5"/>',
    ]
    half = cell * scale / 2.0
    for x_mm, y_mm, value in sorted(points, key=lambda p: (p[1], p[0])):
        t = 0.5 if span == 0.0 else (value - vmin) / span
        x0 = cx + x_mm * scale - half
        y0 = cy - y_mm * scale - half
        parts.append(
            f'<rect x="{px(x0)}" y="{px(y0)}" width="{px(cell * scale)}" '
            f'height="{px(cell * scale)}" fill="{_color(t)}">'
            f"<title>({x_mm:g}, {y_mm:g}) mm: {value:.9g}</title></rect>"
        )

    # Legend: vertical gradient bar with min/max labels.
    lx = pad + wafer_px + 30.0
    ly, lh, lw = pad + 20.0, wafer_px - 40.0, 18.0
    n_seg = 32
    for i in range(n_seg):
        t = 1.0 - (i + 0.5) / n_seg
        seg_y = ly + i * lh / n_seg
        parts.append(
            f'<rect x="{px(lx)}" y="{px(seg_y)}" width="{px(lw)}" '
            f'height="{px(lh / n_seg + 0.5)}" fill="{_color(t)}"/>'
        )
    parts.extend(
        [
            f'<text x="{px(lx + lw + 6)}" y="{px(ly + 5)}" font-size="12" '
            f'font-family="monospace">{vmax:.6g}</text>',
            f'<text x="{px(lx + lw + 6)}" y="{px(ly + lh)}" font-size="12" '
            f'font-family="monospace">{vmin:.6g}</text>',
            f'<text x="{px(lx)}" y="{px(ly - 8)}" font-size="12" '
            f'font-family="monospace">{field_name}</text>',
            "</svg>",
        ]
    )
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(parts) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
