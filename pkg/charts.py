"""Cost-vs-distance and gain-vs-distance curves as standalone SVG.

One polyline per NCF value over a log-scaled distance axis. Coordinates are
printed with fixed precision, so identical input gives identical bytes.
"""
import html
import logging
import math
from enum import Enum
from typing import Dict, List, Tuple

import econ_model
from schemas import Scenario, cents_to_dollars

logger = logging.getLogger(__name__)

WIDTH, HEIGHT = 800, 600
LEFT, RIGHT, TOP, BOTTOM = 80, 170, 50, 70
PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]
DISTANCE_TICKS = [0, 1, 10, 100, 1000, 10000, 100000]

Series = Dict[float, List[Tuple[float, int]]]


class CurveKind(str, Enum):
    COST_VS_DISTANCE = "CostVsDistance"
    GAIN_VS_DISTANCE = "GainVsDistance"


def log_distance(miles: float) -> float:
    return math.log10(1 + miles)


class SvgCanvas:
    def __init__(self, width: int = WIDTH, height: int = HEIGHT):
        self.width = width
        self.height = height
        self.parts: List[str] = []

    def line(self, x1, y1, x2, y2, stroke="#000000", width=1.0):
        self.parts.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                          f'style="stroke:{stroke};stroke-width:{width:.1f}"/>')

    def polyline(self, points, stroke, width=2.0):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.parts.append(f'<polyline points="{coords}" '
                          f'style="fill:none;stroke:{stroke};stroke-width:{width:.1f}"/>')

    def text(self, x, y, string, size=12, anchor="start", extra=""):
        self.parts.append(f'<text x="{x:.2f}" y="{y:.2f}" '
                          f'style="font-family:sans-serif;font-size:{size}px;text-anchor:{anchor}"'
                          f'{extra}>{html.escape(string)}</text>')

    def render(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            f'<svg version="1.1" xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" style="fill:#ffffff"/>\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def curve_series(scenario: Scenario, kind: CurveKind) -> Series:
    """(distance, dollars) points per NCF, feasible cells only, by distance."""
    params = scenario.cost_params
    options = sorted(scenario.residences, key=lambda o: o.distance)
    series: Series = {}
    for ncf in scenario.ncf_grid:
        points = []
        for option in options:
            cost = econ_model.monthly_cost(option, ncf, params)
            if not cost.feasible:
                continue
            if kind == CurveKind.COST_VS_DISTANCE:
                points.append((option.distance, cost.total_usd))
            else:
                gain = econ_model.gain_in_place(option, ncf, params)
                points.append((option.distance, cents_to_dollars(gain.gain)))
        series[ncf] = points
    return series


def _nice_ceiling(value: float) -> float:
    if value <= 0:
        return 1.0
    step = 10 ** math.floor(math.log10(value))
    return math.ceil(value / step) * step


def render_curves(series: Series, kind: CurveKind) -> str:
    x_max = max(log_distance(d) for points in series.values() for d, _ in points) or 1.0
    values = [v for points in series.values() for _, v in points]
    y_min = min(0, min(values))
    y_max = _nice_ceiling(max(values))
    plot_w = WIDTH - LEFT - RIGHT
    plot_h = HEIGHT - TOP - BOTTOM

    def sx(miles):
        return LEFT + log_distance(miles) / x_max * plot_w

    def sy(value):
        return TOP + plot_h - (value - y_min) / (y_max - y_min) * plot_h

    svg = SvgCanvas()
    title = ("Monthly housing + transport cost vs commute distance"
             if kind == CurveKind.COST_VS_DISTANCE else
             "Monthly gain over commuting every day vs commute distance")
    svg.text(WIDTH / 2, TOP / 2 + 6, title, size=16, anchor="middle")

    # axes
    svg.line(LEFT, TOP + plot_h, LEFT + plot_w, TOP + plot_h)
    svg.line(LEFT, TOP, LEFT, TOP + plot_h)
    for miles in DISTANCE_TICKS:
        if log_distance(miles) > x_max + 1e-9:
            break
        x = sx(miles)
        svg.line(x, TOP + plot_h, x, TOP + plot_h + 5)
        svg.text(x, TOP + plot_h + 20, f"{miles:,}".replace(",", " "), anchor="middle")
    svg.text(LEFT + plot_w / 2, HEIGHT - 20, "Distance (miles, log scale)", anchor="middle")
    for i in range(6):
        value = y_min + (y_max - y_min) * i / 5
        y = sy(value)
        svg.line(LEFT - 5, y, LEFT, y)
        svg.text(LEFT - 8, y + 4, f"{value:.0f}", anchor="end")
    svg.text(20, TOP + plot_h / 2, "USD per month", anchor="middle",
             extra=f' transform="rotate(-90 20 {TOP + plot_h / 2:.2f})"')

    for i, (ncf, points) in enumerate(sorted(series.items())):
        color = PALETTE[i % len(PALETTE)]
        svg.polyline([(sx(d), sy(v)) for d, v in points], color)
        legend_y = TOP + 20 + i * 20
        svg.line(WIDTH - RIGHT + 20, legend_y - 4, WIDTH - RIGHT + 45, legend_y - 4, color, 2.0)
        svg.text(WIDTH - RIGHT + 52, legend_y, f"NCF={ncf:g}")
    return svg.render()


def emit_curves(scenario: Scenario, kind) -> str:
    kind = CurveKind(kind)
    if len(scenario.residences) < 2:
        raise ValueError("curves need at least 2 residences")
    series = curve_series(scenario, kind)
    for ncf, points in series.items():
        if len(points) < 2:
            raise ValueError(f"series NCF={ncf:g} has {len(points)} feasible point(s); need 2")
    logger.debug("Rendering %s with %d series", kind.value, len(series))
    return render_curves(series, kind)
