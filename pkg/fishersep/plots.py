"""Static SVG figures rendered from a Jinja2 template."""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from jinja2 import Environment, PackageLoader, select_autoescape

from fishersep.models import DimensionEstimate, SeparabilityProfile
from fishersep.separability import theoretical_p_alpha

logger = logging.getLogger(__name__)

env = Environment(
    loader=PackageLoader("fishersep", "templates"),
    autoescape=select_autoescape(["svg", "svg.j2"]),
    trim_blocks=True,
    lstrip_blocks=True,
)

THEORY_DIMENSIONS = range(1, 31)
HISTOGRAM_BINS = 30


@dataclass
class Tick:
    pos: float
    label: str


@dataclass
class Figure:
    title: str
    x_label: str
    y_label: str
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    width: int = 520
    height: int = 380
    left: int = 60
    right: int = 490
    top: int = 30
    bottom: int = 335
    x_ticks: list[Tick] = field(default_factory=list)
    y_ticks: list[Tick] = field(default_factory=list)
    bars: list[dict] = field(default_factory=list)
    lines: list[dict] = field(default_factory=list)
    markers: list[dict] = field(default_factory=list)
    notes: list[dict] = field(default_factory=list)

    def px(self, x: float) -> float:
        lo, hi = self.x_range
        return round(self.left + (x - lo) / (hi - lo) * (self.right - self.left), 2)

    def py(self, y: float) -> float:
        lo, hi = self.y_range
        return round(self.bottom - (y - lo) / (hi - lo) * (self.bottom - self.top), 2)

    def add_ticks(self, n: int = 5, x_format: str = "{:.2g}", y_format: str = "{:.2g}") -> None:
        self.x_ticks = [Tick(self.px(v), x_format.format(v)) for v in np.linspace(*self.x_range, n)]
        self.y_ticks = [Tick(self.py(v), y_format.format(v)) for v in np.linspace(*self.y_range, n)]

    def add_line(self, xs: Sequence[float], ys: Sequence[float], color: str = "black", **kwargs) -> None:
        points = [(self.px(x), self.py(y)) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
        if len(points) >= 2:
            self.lines.append(
                {"points": points, "color": color, "width": kwargs.get("width", 1), "dashed": kwargs.get("dashed", False),
                 "label": kwargs.get("label")}
            )


def _padded(lo: float, hi: float) -> tuple[float, float]:
    if hi <= lo:
        return lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def render(fig: Figure) -> str:
    return env.get_template("figure.svg.j2").render(fig=fig)


def _write(svg: str, path: Optional[Union[str, Path]]) -> str:
    if path is not None:
        Path(path).write_text(svg)
        logger.info("wrote %s", path)
    return svg


def histogram_svg(profile: SeparabilityProfile, path: Optional[Union[str, Path]] = None) -> str:
    """Histogram of the per-point unseparability probabilities at one α."""
    probs = np.asarray(profile.point_probs)
    hi = float(probs.max()) if probs.size and probs.max() > 0 else 1.0
    counts, edges = np.histogram(probs, bins=HISTOGRAM_BINS, range=(0.0, hi))
    fig = Figure(
        title=f"p_alpha at alpha = {profile.alpha:.2f} (mean {profile.mean_prob:.3g})",
        x_label="p_alpha",
        y_label="points",
        x_range=(0.0, hi),
        y_range=(0.0, float(max(counts.max(), 1))),
    )
    fig.add_ticks(x_format="{:.2g}", y_format="{:.0f}")
    base = fig.py(0.0)
    for count, lo, up in zip(counts, edges[:-1], edges[1:]):
        top = fig.py(float(count))
        fig.bars.append({"x": fig.px(lo), "y": top, "width": round(fig.px(up) - fig.px(lo), 2), "height": round(base - top, 2)})
    fig.markers.append({"x": fig.px(profile.mean_prob), "y": base, "radius": 3, "color": "crimson"})
    return _write(render(fig), path)


def separability_curves_svg(
    profiles: list[SeparabilityProfile], path: Optional[Union[str, Path]] = None
) -> str:
    """log10 of the empirical mean probability against α, over the uniform-sphere curves n = 1..30."""
    alphas = np.array([p.alpha for p in profiles])
    grid = np.linspace(alphas.min(), alphas.max(), 60) if alphas.size > 1 else alphas
    theory = {n: np.log10(theoretical_p_alpha(n, grid)) for n in THEORY_DIMENSIONS}
    measured = [(p.alpha, math.log10(p.mean_prob)) for p in profiles if p.mean_prob > 0]

    levels = [float(np.min(theory[max(THEORY_DIMENSIONS)])), float(np.max(theory[1]))] + [y for _, y in measured]
    floor, ceiling = min(levels), max(levels)
    fig = Figure(
        title="mean unseparability probability",
        x_label="alpha",
        y_label="log10 p_alpha",
        x_range=_padded(float(grid.min()), float(grid.max())),
        y_range=_padded(floor, ceiling),
    )
    fig.add_ticks(y_format="{:.1f}")
    for n in THEORY_DIMENSIONS:
        label = str(n) if n in (1, 5, 10, 20, 30) else None
        fig.add_line(grid, theory[n], color="#bbbbbb", label=label)
    if measured:
        fig.add_line([a for a, _ in measured], [y for _, y in measured], color="crimson", width=2)
        for a, y in measured:
            fig.markers.append({"x": fig.px(a), "y": fig.py(y), "radius": 2.5, "color": "crimson"})
    return _write(render(fig), path)


def dimension_profile_svg(estimate: DimensionEstimate, path: Optional[Union[str, Path]] = None) -> str:
    """n_α against α, with the selected estimate marked."""
    points = [(p.alpha, p.dimension) for p in estimate.profiles if p.dimension is not None]
    xs = [a for a, _ in points] or [estimate.alpha_used]
    ys = [d for _, d in points] or [estimate.n_hat]
    fig = Figure(
        title=f"effective dimension (estimate {estimate.n_hat:.2f} at alpha = {estimate.alpha_used:.2f})",
        x_label="alpha",
        y_label="n_alpha",
        x_range=_padded(min(xs), max(xs)),
        y_range=_padded(min(0.0, min(ys)), max(ys)),
    )
    fig.add_ticks(y_format="{:.3g}")
    fig.add_line(xs, ys, color="steelblue", width=2)
    fig.add_line([estimate.alpha_max] * 2, list(fig.y_range), color="#888888", dashed=True)
    fig.markers.append({"x": fig.px(estimate.alpha_used), "y": fig.py(estimate.n_hat), "radius": 4, "color": "crimson"})
    fig.notes.append(
        {"x": fig.px(estimate.alpha_used) + 6, "y": fig.py(estimate.n_hat) - 6, "text": f"{estimate.n_hat:.2f}", "color": "crimson"}
    )
    return _write(render(fig), path)
