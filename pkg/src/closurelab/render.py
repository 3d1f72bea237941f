"""Deterministic SVG renderings of annulus chains.

One run of a word is drawn inside the outer circle: the two boundary
circles, every chain element, optionally a fitted envelope conic, and a
closure annotation.  Styling is fixed relative to the outer radius and
nothing volatile (timestamps, host data, tool versions) enters the
output, so identical inputs produce identical bytes.  A chain that dies
mid-run is still drawn up to the failure and marked as partial.
"""

from __future__ import annotations

from typing import Optional

from .chains import CircleElement, Word, run_chain, seed_element
from .conics import Conic, conic_points
from .errors import ChainError
from .geometry import Annulus


def _fmt(x: float) -> str:
    return repr(float(x))


def _circle(cx: float, cy: float, radius: float, klass: str,
            style: str) -> str:
    return (f'<circle class="{klass}" cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
            f'r="{_fmt(radius)}" {style}/>')


def render_scene(a: Annulus, w: Word, theta0: float = 0.0,
                 orientation: int = 1,
                 gamma: Optional[Conic] = None) -> tuple[str, bool]:
    """SVG text for one chain run and whether the run completed.

    A closed run draws the word's elements once; an open run adds the
    final mismatched element so the gap is visible; a dead run draws the
    surviving prefix and flags the output as partial.
    """
    complete = True
    closed = False
    defect = None
    note = ""
    try:
        run = run_chain(a, w, seed_element(a, w.letter(0), theta0),
                        orientation)
        closed = run.closed
        defect = run.defect
        elements = list(run.elements[:len(w)])
        if not closed:
            elements.append(run.elements[-1])
    except ChainError as exc:
        complete = False
        elements = list(exc.elements)
        note = f" error={type(exc).__name__}@{exc.index}"

    R = a.R
    cx, cy = a.outer.center.x, a.outer.center.y
    pad = 1.05 * R
    thin = 0.008 * R
    status = "partial" if not complete else ("closed" if closed else "open")
    label = status if defect is None else f"{status} defect={defect:.3e}"

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_fmt(cx - pad)} {_fmt(-cy - pad)} '
        f'{_fmt(2.0 * pad)} {_fmt(2.0 * pad)}">',
        f"<desc>annulus R={_fmt(a.R)} r={_fmt(a.r)} d={_fmt(a.d)} "
        f"center=({_fmt(cx)},{_fmt(cy)}) word={w.letters} "
        f"theta0={_fmt(theta0)} orientation={orientation} status={status} "
        f"defect={'none' if defect is None else _fmt(defect)}"
        f"{note}</desc>",
        '<g transform="scale(1 -1)">',
        _circle(cx, cy, R, "outer",
                f'fill="none" stroke="#1a1a1a" stroke-width="{_fmt(1.5 * thin)}"'),
        _circle(a.inner.center.x, a.inner.center.y, a.r, "inner",
                f'fill="#f2f2f2" stroke="#8c8c8c" stroke-width="{_fmt(thin)}"'),
    ]
    if gamma is not None:
        pts = conic_points(gamma, 180)
        pts.append(pts[0])
        coords = " ".join(f"{_fmt(p.x)},{_fmt(p.y)}" for p in pts)
        parts.append(
            f'<polyline class="gamma" points="{coords}" fill="none" '
            f'stroke="#3a7d44" stroke-width="{_fmt(0.75 * thin)}" '
            f'stroke-dasharray="{_fmt(3.0 * thin)} {_fmt(2.0 * thin)}"/>')
    for elem in elements:
        if isinstance(elem, CircleElement):
            parts.append(_circle(
                elem.circle.center.x, elem.circle.center.y,
                elem.circle.radius, "chain-circle",
                f'fill="none" stroke="#2466a8" stroke-width="{_fmt(thin)}"'))
        else:
            chord = elem.chord
            parts.append(
                f'<line class="chain-chord" x1="{_fmt(chord.p1.x)}" '
                f'y1="{_fmt(chord.p1.y)}" x2="{_fmt(chord.p2.x)}" '
                f'y2="{_fmt(chord.p2.y)}" stroke="#c4501e" '
                f'stroke-width="{_fmt(thin)}"/>')
    parts.append("</g>")
    parts.append(
        f'<text class="annotation" x="{_fmt(cx - pad + 2.0 * thin)}" '
        f'y="{_fmt(-cy - pad + 0.06 * R)}" font-family="monospace" '
        f'font-size="{_fmt(0.05 * R)}" fill="#1a1a1a">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n", complete
