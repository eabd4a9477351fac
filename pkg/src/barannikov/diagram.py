"""Diagrams: one column per degree, a dot per critical value, a segment per
couple, optional framing arrows, plus value-curve pictures of event traces.

Rendering is deterministic: identical inputs give identical bytes.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .reduction import BarannikovResult, GeneratorType


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class DiagramPoint:
    name: str
    degree: int
    value: Fraction
    gtype: GeneratorType
    partner: str | None
    frame: str | None = None  # "up" | "down"


@dataclass(frozen=True)
class Diagram:
    ambient_dim: int
    points: tuple[DiagramPoint, ...]

    def couples(self) -> list[tuple[DiagramPoint, DiagramPoint]]:
        """(upper, lower) point pairs, each couple listed once."""
        by_name = {p.name: p for p in self.points}
        out = []
        for p in self.points:
            if p.partner is not None and p.degree == by_name[p.partner].degree + 1:
                out.append((p, by_name[p.partner]))
        return out


@dataclass(frozen=True)
class RenderSpec:
    width: float = 480.0
    height: float = 360.0
    margin: float = 40.0
    y_mode: str = "rank"  # "rank" | "value"


def build_diagram(r: BarannikovResult, frames: Mapping[str, str] | None = None) -> Diagram:
    c = r.complex
    names = {g.name for g in c.generators}
    if frames is not None:
        extra = set(frames) - names
        missing = names - set(frames)
        if extra:
            raise DiagramError(f"frames for unknown generators: {', '.join(sorted(extra))}")
        if missing:
            raise DiagramError(f"frames missing for: {', '.join(sorted(missing))}")
        for name, arrow in frames.items():
            if arrow not in ("up", "down"):
                raise DiagramError(f"frame of {name} must be 'up' or 'down', got {arrow!r}")
    if c.ambient_dim is not None:
        n = c.ambient_dim
    else:
        n = max((g.degree for g in c.generators), default=0)
    partner = r.partner()
    points = tuple(
        DiagramPoint(
            name=g.name,
            degree=g.degree,
            value=g.value,
            gtype=r.types[g.name],
            partner=partner[g.name],
            frame=frames[g.name] if frames is not None else None,
        )
        for g in c.generators
    )
    return Diagram(n, points)


# -- shared layout helpers ------------------------------------------------------


def _y_scale(values: Sequence[Fraction], spec: RenderSpec):
    """Map exact values to canvas y; larger values sit higher (smaller y)."""
    top = spec.margin
    bottom = spec.height - spec.margin
    if not values:
        return lambda v: (top + bottom) / 2
    ordered = sorted(set(values))
    if spec.y_mode == "rank":
        if len(ordered) == 1:
            return lambda v: (top + bottom) / 2
        index = {v: i for i, v in enumerate(ordered)}
        step = (bottom - top) / (len(ordered) - 1)
        return lambda v: bottom - index[v] * step
    vmin, vmax = ordered[0], ordered[-1]
    if vmin == vmax:
        return lambda v: (top + bottom) / 2
    span = vmax - vmin
    return lambda v: bottom - float((v - vmin) / span) * (bottom - top)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _svg_header(spec: RenderSpec) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(spec.width)}" '
        f'height="{_fmt(spec.height)}" viewBox="0 0 {_fmt(spec.width)} {_fmt(spec.height)}">',
        f'<rect x="0" y="0" width="{_fmt(spec.width)}" height="{_fmt(spec.height)}" fill="white"/>',
    ]


def _frame_arrow(x: float, y: float, direction: str) -> str:
    s = 7.0
    if direction == "up":
        y0, y1 = y + s, y - s
        head = f"M {_fmt(x - 3)} {_fmt(y1 + 4)} L {_fmt(x)} {_fmt(y1)} L {_fmt(x + 3)} {_fmt(y1 + 4)}"
    else:
        y0, y1 = y - s, y + s
        head = f"M {_fmt(x - 3)} {_fmt(y1 - 4)} L {_fmt(x)} {_fmt(y1)} L {_fmt(x + 3)} {_fmt(y1 - 4)}"
    return (
        f'<path class="frame" d="M {_fmt(x)} {_fmt(y0)} L {_fmt(x)} {_fmt(y1)} {head}" '
        'stroke="black" fill="none" stroke-width="1"/>'
    )


def render_svg(d: Diagram, spec: RenderSpec | None = None) -> bytes:
    spec = spec or RenderSpec()
    parts = _svg_header(spec)
    n = d.ambient_dim
    inner_w = spec.width - 2 * spec.margin
    ncols = n + 1
    col_x = {
        k: spec.margin + (0.5 if ncols == 1 else (n - k) / (ncols - 1)) * inner_w
        for k in range(ncols)
    }
    for k in range(n, -1, -1):
        x = col_x[k]
        parts.append(
            f'<line class="axis" x1="{_fmt(x)}" y1="{_fmt(spec.margin)}" x2="{_fmt(x)}" '
            f'y2="{_fmt(spec.height - spec.margin)}" stroke="gray" stroke-width="0.5" '
            'stroke-dasharray="4 3"/>'
        )
        parts.append(
            f'<text class="axis-label" x="{_fmt(x)}" y="{_fmt(spec.height - spec.margin + 16)}" '
            f'font-family="monospace" font-size="11" text-anchor="middle">D_{k}</text>'
        )
    yof = _y_scale([p.value for p in d.points], spec)
    pos = {p.name: (col_x.get(p.degree, spec.margin), yof(p.value)) for p in d.points}
    for upper, lower in d.couples():
        x1, y1 = pos[upper.name]
        x2, y2 = pos[lower.name]
        parts.append(
            f'<line class="segment" x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" '
            f'y2="{_fmt(y2)}" stroke="black" stroke-width="1.2"/>'
        )
    for p in d.points:
        x, y = pos[p.name]
        parts.append(
            f'<circle class="dot" cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="black"/>'
        )
        parts.append(
            f'<text class="label" x="{_fmt(x + 6)}" y="{_fmt(y - 5)}" '
            f'font-family="monospace" font-size="10">{p.name}</text>'
        )
        if p.frame is not None:
            parts.append(_frame_arrow(x - 10, y, p.frame))
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


def render_ascii(d: Diagram) -> str:
    """Fixed-width grid: one column per degree (leftmost is the top degree),
    one row per value, highest value first.  Couples share a numeric label,
    the upper end rendered ``[i`` and the lower end ``i]``; frames append
    ``^`` or ``v``."""
    n = d.ambient_dim
    couples = d.couples()
    label = {}
    for i, (upper, lower) in enumerate(sorted(couples, key=lambda ul: ul[1].value), start=1):
        label[upper.name] = f"[{i}"
        label[lower.name] = f"{i}]"
    tokens = {}
    for p in d.points:
        tok = label.get(p.name, "*")
        if p.frame == "up":
            tok += "^"
        elif p.frame == "down":
            tok += "v"
        tokens[p.name] = tok
    headers = [f"D{k}" for k in range(n, -1, -1)]
    width = max([len(h) for h in headers] + [len(t) for t in tokens.values()] + [2])
    value_width = max([len(str(p.value)) for p in d.points] + [len("value")])

    def cell(text: str) -> str:
        return text.ljust(width)

    lines = [" " * value_width + " | " + " ".join(cell(h) for h in headers)]
    lines.append("-" * len(lines[0]))
    for p in sorted(d.points, key=lambda p: p.value, reverse=True):
        row = [cell(".") for _ in range(n + 1)]
        col = n - p.degree
        if 0 <= col <= n:
            row[col] = cell(tokens[p.name])
        lines.append(str(p.value).rjust(value_width) + " | " + " ".join(row) + f"  {p.name}")
    return "\n".join(lines) + "\n"


def render_cerf(trace, spec: RenderSpec | None = None) -> bytes:
    """Critical-value curves across the steps of a path trace.

    Swaps show as transversal crossings; a birth or death event draws a cusp
    glyph where its pair appears or disappears.
    """
    from .path import Birth, Death

    spec = spec or RenderSpec()
    states = [trace.initial] + [step.complex for step in trace.steps]
    nsteps = len(states)
    parts = _svg_header(spec)
    x_of = lambda i: spec.margin + (
        0.5 if nsteps == 1 else i / (nsteps - 1)
    ) * (spec.width - 2 * spec.margin)
    parts.append(
        f'<line class="axis" x1="{_fmt(spec.margin)}" y1="{_fmt(spec.height - spec.margin)}" '
        f'x2="{_fmt(spec.width - spec.margin)}" y2="{_fmt(spec.height - spec.margin)}" '
        'stroke="gray" stroke-width="0.5"/>'
    )
    all_values = [g.value for state in states for g in state.generators]
    yof = _y_scale(all_values, spec)

    alive: dict[str, list[tuple[int, Fraction]]] = {}
    for i, state in enumerate(states):
        for g in state.generators:
            alive.setdefault(g.name, []).append((i, g.value))
    for name in sorted(alive):
        pts = alive[name]
        coords = " ".join(f"{_fmt(x_of(i))},{_fmt(yof(v))}" for i, v in pts)
        parts.append(
            f'<polyline class="curve" points="{coords}" fill="none" stroke="black" stroke-width="1"/>'
        )
    for i, step in enumerate(trace.steps):
        e = step.event
        if isinstance(e, Birth):
            state = states[i + 1]
            vals = [state.value_of(e.p_name), state.value_of(e.q_name)]
            x, y = x_of(i + 1), (yof(vals[0]) + yof(vals[1])) / 2
        elif isinstance(e, Death):
            state = states[i]
            vals = [state.value_of(e.p_name), state.value_of(e.q_name)]
            x, y = x_of(i), (yof(vals[0]) + yof(vals[1])) / 2
        else:
            continue
        parts.append(
            f'<path class="cusp" d="M {_fmt(x - 4)} {_fmt(y - 5)} L {_fmt(x + 4)} {_fmt(y)} '
            f'L {_fmt(x - 4)} {_fmt(y + 5)}" stroke="black" fill="none" stroke-width="1"/>'
        )
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")
