"""Graphic representation of a run as an SVG document.

Each site is a vertical ray with site index on the horizontal axis and time
increasing upward.  Black dots mark tree appearances, green segments the
periods a site holds a healthy tree, red segments the burning intervals.
Solid arrows show realized spreads (slope = the drawn delay in model
coordinates); dotted arrows show influence windows that expired without
igniting the neighbor.  Element order is deterministic so equal runs render
byte-identical documents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import RunSummary
from .errors import EmptyWindow

_MARGIN = 40.0
_SITE_STEP = 60.0
_TIME_SCALE = 40.0


@dataclass(frozen=True)
class Arrow:
    """One spread attempt in model coordinates."""

    source: int
    target: int
    t_from: float
    t_to: float
    solid: bool


def build_arrows(run: RunSummary, max_site: int, t_max: float) -> list[Arrow]:
    """Arrow list for the window, realized spreads first, then failures.

    A realized spread points from (source, ignite - delta), inside the
    source's burning interval, to (target, ignite); a failed window is drawn
    from the source's last burning instant to the window close.
    """
    arrows = []
    for att in run.attempts:
        if att.target > max_site:
            continue
        if att.outcome == "ignited":
            if att.ignited_at <= t_max:
                arrows.append(Arrow(att.source, att.target,
                                    att.ignited_at - att.delta, att.ignited_at, True))
        elif att.outcome in ("failed", "empty"):
            if att.window_end <= t_max:
                arrows.append(Arrow(att.source, att.target,
                                    att.window_end - att.delta, att.window_end, False))
    arrows.sort(key=lambda a: (not a.solid, a.source, a.t_to))
    return arrows


def _x(site: int) -> float:
    return _MARGIN + _SITE_STEP * site


def _y(t: float, t_max: float) -> float:
    return _MARGIN + _TIME_SCALE * (t_max - t)


def render_svg(run: RunSummary, max_site: int | None = None,
               t_max: float | None = None) -> str:
    """Render the run restricted to sites <= max_site and times <= t_max."""
    if t_max is None:
        t_max = run.config.t_max
    if not math.isfinite(t_max):
        raise EmptyWindow("render needs a finite time window")
    if max_site is None:
        max_site = min(run.global_max + 1, 40)
    max_site = max(max_site, 0)

    sites = [x for x in range(0, max_site + 1) if x in run.timelines]
    visible = any(ep.plant_time <= t_max
                  for x in sites for ep in run.timelines[x])
    if not visible:
        raise EmptyWindow("no events intersect the requested window")

    width = 2 * _MARGIN + _SITE_STEP * max_site
    height = 2 * _MARGIN + _TIME_SCALE * t_max
    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
               f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">')
    out.append(f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>')

    # site rays and labels
    for x in range(0, max_site + 1):
        px = _x(x)
        out.append(f'<line x1="{px:.2f}" y1="{_y(0.0, t_max):.2f}" x2="{px:.2f}" '
                   f'y2="{_y(t_max, t_max):.2f}" stroke="#cccccc" stroke-width="1"/>')
        out.append(f'<text x="{px:.2f}" y="{height - 12:.2f}" font-size="12" '
                   f'text-anchor="middle" fill="#333333">{x}</text>')

    # occupied and burning segments, then plant dots
    for x in sites:
        px = _x(x)
        for ep in run.timelines[x]:
            if ep.plant_time > t_max:
                continue
            green_end = ep.ignite_time if ep.ignite_time is not None else t_max
            green_end = min(green_end, t_max)
            if green_end >= ep.plant_time:
                out.append(f'<line x1="{px:.2f}" y1="{_y(ep.plant_time, t_max):.2f}" '
                           f'x2="{px:.2f}" y2="{_y(green_end, t_max):.2f}" '
                           f'stroke="green" stroke-width="3"/>')
            if ep.ignite_time is not None and ep.ignite_time <= t_max:
                red_end = min(ep.extinguish_time, t_max)
                if red_end > ep.ignite_time:
                    out.append(f'<line x1="{px:.2f}" y1="{_y(ep.ignite_time, t_max):.2f}" '
                               f'x2="{px:.2f}" y2="{_y(red_end, t_max):.2f}" '
                               f'stroke="red" stroke-width="3"/>')
        for ep in run.timelines[x]:
            if ep.plant_time <= t_max:
                out.append(f'<circle cx="{px:.2f}" cy="{_y(ep.plant_time, t_max):.2f}" '
                           f'r="3" fill="black"/>')

    for arrow in build_arrows(run, max_site, t_max):
        x1, y1 = _x(arrow.source), _y(arrow.t_from, t_max)
        x2, y2 = _x(arrow.target), _y(arrow.t_to, t_max)
        dash = '' if arrow.solid else ' stroke-dasharray="4 3"'
        out.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                   f'stroke="#333333" stroke-width="1.5"{dash}/>')

    out.append("</svg>")
    return "\n".join(out) + "\n"
