"""Stacked time-series panels rendered straight to SVG text.

Output depends only on the input values, so identical logs give identical
bytes and plots can be golden-file tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple
from xml.sax.saxutils import escape

from .errors import DataError
from .telemetry import COLUMN_UNITS, LOG_HEADER, columns


@dataclass(frozen=True)
class Panel:
    column: str
    label: str
    unit: str


@dataclass(frozen=True)
class PlotSpec:
    panels: Tuple[Panel, ...]
    x: str = "t_s"
    title: str = ""

    def __post_init__(self):
        for col in (self.x,) + tuple(p.column for p in self.panels):
            if col not in LOG_HEADER:
                raise DataError(f"unknown log column {col!r}")
        if not self.panels:
            raise DataError("plot needs at least one panel")


DEFAULT_PANELS = (
    Panel("angle_filt_deg", "Elbow angle", "deg"),
    Panel("pos_mm", "Actuator position", "mm"),
    Panel("force_n", "Force", "N"),
)
DEFAULT_SPEC = PlotSpec(DEFAULT_PANELS)

_LABELS = {p.column: p.label for p in DEFAULT_PANELS}
_LABELS.update({"angle_raw_deg": "Raw angle", "cmd_mm": "Command", "stalled": "Stalled",
                "t_s": "Time", "tick": "Tick"})


def spec_for_columns(names: Sequence[str], title: str = "") -> PlotSpec:
    return PlotSpec(
        tuple(Panel(c, _LABELS.get(c, c), COLUMN_UNITS.get(c, "")) for c in names), title=title
    )


WIDTH = 720
PANEL_H = 170
LEFT, RIGHT, TOP, GAP, BOTTOM = 70, 20, 30, 24, 45


def nice_ticks(lo: float, hi: float, target: int = 5) -> List[float]:
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    # ticks enclose the data so the axis ends on labeled values
    start = math.floor(lo / step + 1e-9)
    stop = math.ceil(hi / step - 1e-9)
    return [float(f"{k * step:.12g}") for k in range(start, stop + 1)]


def _num(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _tick_label(v: float) -> str:
    return f"{v:g}"


def emit_plot(spec: PlotSpec, records) -> str:
    """Render ``records`` (LogRecords) as an SVG document string."""
    if not records:
        raise DataError("cannot plot an empty log")
    cols = columns(records)
    xs = [float(v) for v in cols[spec.x]]
    x_ticks = nice_ticks(min(xs), max(xs))
    x_lo, x_hi = x_ticks[0], x_ticks[-1]
    plot_w = WIDTH - LEFT - RIGHT
    n = len(spec.panels)
    height = TOP + n * PANEL_H + (n - 1) * GAP + BOTTOM

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" '
        'font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>',
    ]
    if spec.title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" '
                   f'font-size="13">{escape(spec.title)}</text>')

    def px(v):
        return LEFT + (v - x_lo) / (x_hi - x_lo) * plot_w

    for i, panel in enumerate(spec.panels):
        top = TOP + i * (PANEL_H + GAP)
        ys = [float(v) for v in cols[panel.column]]
        y_ticks = nice_ticks(min(ys), max(ys))
        y_lo, y_hi = y_ticks[0], y_ticks[-1]

        def py(v, top=top, y_lo=y_lo, y_hi=y_hi):
            return top + PANEL_H - (v - y_lo) / (y_hi - y_lo) * PANEL_H

        out.append(f'<g class="panel" id="panel-{escape(panel.column)}">')
        out.append(f'<rect x="{LEFT}" y="{top}" width="{plot_w}" height="{PANEL_H}" '
                   'fill="none" stroke="#444" stroke-width="1"/>')
        for v in y_ticks:
            y = _num(py(v))
            out.append(f'<line x1="{LEFT - 4}" y1="{y}" x2="{LEFT}" y2="{y}" stroke="#444"/>')
            out.append(f'<line x1="{LEFT}" y1="{y}" x2="{LEFT + plot_w}" y2="{y}" '
                       'stroke="#ddd" stroke-width="0.5"/>')
            out.append(f'<text x="{LEFT - 6}" y="{y}" text-anchor="end" '
                       f'dominant-baseline="middle">{_tick_label(v)}</text>')
        for v in x_ticks:
            x = _num(px(v))
            out.append(f'<line x1="{x}" y1="{top + PANEL_H}" x2="{x}" '
                       f'y2="{top + PANEL_H + 4}" stroke="#444"/>')
            if i == n - 1:
                out.append(f'<text x="{x}" y="{top + PANEL_H + 16}" '
                           f'text-anchor="middle">{_tick_label(v)}</text>')
        label = f"{panel.label} ({panel.unit})" if panel.unit else panel.label
        cy = top + PANEL_H / 2
        out.append(f'<text x="16" y="{cy:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {cy:.1f})">{escape(label)}</text>')
        pts = " ".join(f"{_num(px(x))},{_num(py(y))}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="#1f4e9a" stroke-width="1.2" '
                   f'points="{pts}"/>')
        out.append("</g>")

    x_unit = COLUMN_UNITS.get(spec.x, "")
    x_label = _LABELS.get(spec.x, spec.x) + (f" ({x_unit})" if x_unit else "")
    out.append(f'<text x="{LEFT + plot_w / 2:.1f}" y="{height - 10}" '
               f'text-anchor="middle">{escape(x_label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
