"""Minimal SVG line plots with axes, written by hand."""

import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

Point = Tuple[float, float]

PREAMBLE = (
    '<?xml version="1.0" encoding="UTF-8"?>\n'
    '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
    'width="{width}" height="{height}" viewBox="0 0 {width} {height}">\n'
    '<rect x="0" y="0" width="{width}" height="{height}" style="fill:#ffffff"/>'
)
POSTAMBLE = "</svg>"

_MARGIN = 60
_TICK = 5


def _nice_step(span: float) -> float:
    raw = span / 5
    magnitude = 10 ** math.floor(math.log10(raw))
    for factor in (1, 2, 5):
        if factor * magnitude >= raw:
            return factor * magnitude
    return 10 * magnitude


def _ticks(low: float, high: float) -> List[float]:
    step = _nice_step(high - low)
    first = math.ceil(low / step - 1e-9)
    last = math.floor(high / step + 1e-9)
    return [idx * step for idx in range(first, last + 1)]


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _split_finite(points: Sequence[Point]) -> List[List[Point]]:
    segments: List[List[Point]] = [[]]
    for x, y in points:
        if math.isfinite(x) and math.isfinite(y):
            segments[-1].append((float(x), float(y)))
        elif segments[-1]:
            segments.append([])
    return [segment for segment in segments if len(segment) > 1]


class SvgPlot:
    """
    Line plot in data coordinates.

    Polylines are stored as given and mapped to pixels when the plot is
    rendered, once the bounds of all curves are known. Output only
    depends on the inputs, so identical plots give identical files.
    """

    def __init__(
        self,
        title: str = "",
        x_label: str = "",
        y_label: str = "",
        width: int = 640,
        height: int = 480,
    ) -> None:
        self.title = title
        self.x_label = x_label
        self.y_label = y_label
        self.width = width
        self.height = height
        self.min_x: Optional[float] = None
        self.max_x: Optional[float] = None
        self.min_y: Optional[float] = None
        self.max_y: Optional[float] = None
        self.curves: List[Tuple[List[Point], str, float, bool]] = []

    def require(self, x: float, y: float) -> None:
        """
        Grow the bounds so that they contain a point.

        :param x: abscissa.
        :param y: ordinate.
        """
        if self.min_x is None or self.max_x is None:
            self.min_x = self.max_x = x
        else:
            self.min_x = min(self.min_x, x)
            self.max_x = max(self.max_x, x)
        if self.min_y is None or self.max_y is None:
            self.min_y = self.max_y = y
        else:
            self.min_y = min(self.min_y, y)
            self.max_y = max(self.max_y, y)

    def polyline(
        self,
        points: Sequence[Point],
        color: str = "#000000",
        width: float = 1.0,
        dashed: bool = False,
    ) -> None:
        """
        Add a curve; non-finite points break it into pieces.

        :param points: data coordinates.
        :param color: stroke color.
        :param width: stroke width in pixels.
        :param dashed: draw a dashed stroke.
        """
        for segment in _split_finite(points):
            for x, y in segment:
                self.require(x, y)
            self.curves.append((segment, color, width, dashed))

    def _bounds(self) -> Tuple[float, float, float, float]:
        min_x = 0.0 if self.min_x is None else self.min_x
        max_x = 1.0 if self.max_x is None else self.max_x
        min_y = 0.0 if self.min_y is None else self.min_y
        max_y = 1.0 if self.max_y is None else self.max_y
        if max_x - min_x <= 0:
            min_x, max_x = min_x - 0.5, max_x + 0.5
        if max_y - min_y <= 0:
            min_y, max_y = min_y - 0.5, max_y + 0.5
        return min_x, max_x, min_y, max_y

    def render(self) -> str:
        """
        Render the plot.

        :return: SVG document.
        """
        min_x, max_x, min_y, max_y = self._bounds()
        inner_w = self.width - 2 * _MARGIN
        inner_h = self.height - 2 * _MARGIN

        def to_px(x: float, y: float) -> Tuple[float, float]:
            px = _MARGIN + (x - min_x) / (max_x - min_x) * inner_w
            py = self.height - _MARGIN - (y - min_y) / (max_y - min_y) * inner_h
            return px, py

        lines = [PREAMBLE.format(width=self.width, height=self.height)]
        bottom = self.height - _MARGIN
        right = self.width - _MARGIN
        lines.append(
            f'<polyline points="{_MARGIN},{_MARGIN} {_MARGIN},{bottom} '
            f'{right},{bottom}" style="fill:none;stroke:#000000;stroke-width:1"/>',
        )
        for tick in _ticks(min_x, max_x):
            px, _ = to_px(tick, min_y)
            lines.append(
                f'<line x1="{px:.3f}" y1="{bottom}" x2="{px:.3f}" '
                f'y2="{bottom + _TICK}" style="stroke:#000000"/>',
            )
            lines.append(
                f'<text x="{px:.3f}" y="{bottom + 18}" font-size="11" '
                f'text-anchor="middle">{tick:.6g}</text>',
            )
        for tick in _ticks(min_y, max_y):
            _, py = to_px(min_x, tick)
            lines.append(
                f'<line x1="{_MARGIN - _TICK}" y1="{py:.3f}" x2="{_MARGIN}" '
                f'y2="{py:.3f}" style="stroke:#000000"/>',
            )
            lines.append(
                f'<text x="{_MARGIN - 8}" y="{py + 4:.3f}" font-size="11" '
                f'text-anchor="end">{tick:.6g}</text>',
            )
        for segment, color, width, dashed in self.curves:
            coords = " ".join(
                "{:.3f},{:.3f}".format(*to_px(x, y)) for x, y in segment
            )
            dash = ";stroke-dasharray:4,3" if dashed else ""
            lines.append(
                f'<polyline points="{coords}" '
                f'style="fill:none;stroke:{color};stroke-width:{width:g}{dash}"/>',
            )
        if self.title:
            lines.append(
                f'<text x="{self.width / 2:g}" y="{_MARGIN / 2:g}" font-size="14" '
                f'text-anchor="middle">{_escape(self.title)}</text>',
            )
        if self.x_label:
            lines.append(
                f'<text x="{self.width / 2:g}" y="{self.height - 15}" '
                f'font-size="12" text-anchor="middle">{_escape(self.x_label)}</text>',
            )
        if self.y_label:
            middle = self.height / 2
            lines.append(
                f'<text x="15" y="{middle:g}" font-size="12" text-anchor="middle" '
                f'transform="rotate(-90 15 {middle:g})">{_escape(self.y_label)}</text>',
            )
        lines.append(POSTAMBLE)
        return "\n".join(lines) + "\n"

    def save(self, path: Path) -> None:
        """
        Write the rendered plot.

        :param path: target file.
        """
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(), encoding="utf-8")
