"""Static barcode documents (plain text or SVG 1.1)."""

from __future__ import annotations

import math
from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import UnsupportedFormat
from .persistence import PersistenceDiagram

PANEL_HEIGHT_PER_BAR = 8
PANEL_GAP = 30
WIDTH = 600
MARGIN = 50
TEXT_WIDTH = 50


def _visible(dg: PersistenceDiagram, min_length: float) -> np.ndarray:
    pers = dg.persistence()
    keep = ~np.isfinite(dg.deaths) | (pers >= min_length)
    return dg.pairs[keep]


def _axis(diagrams: Sequence[np.ndarray]) -> tuple[float, float]:
    finite = [p[np.isfinite(p)] for p in diagrams if p.size]
    values = np.concatenate(finite) if finite else np.zeros(0)
    if values.size == 0:
        return 0.0, 1.0
    hi, lo = float(values.max()), float(values.min())
    if hi == lo:
        hi, lo = hi + 0.5, lo - 0.5
    return hi, lo


def _fmt(x: float) -> str:
    return "-inf" if x == -math.inf else f"{x:.6g}"


def render_text(diagrams: Sequence[PersistenceDiagram], min_length: float = 0.0) -> str:
    shown = [_visible(dg, min_length) for dg in diagrams]
    if not any(p.size for p in shown):
        return ""
    hi, lo = _axis(shown)
    span = hi - lo
    lines = [f"level axis: {_fmt(hi)} (left) to {_fmt(lo)} (right)"]
    for dg, pairs in zip(diagrams, shown):
        lines.append(f"H{dg.degree}: {pairs.shape[0]} bars")
        for b, d in pairs:
            start = int(round((hi - b) / span * TEXT_WIDTH))
            if math.isfinite(d):
                stop = int(round((hi - d) / span * TEXT_WIDTH))
                bar = " " * start + "=" * max(stop - start, 1)
            else:
                bar = " " * start + "=" * max(TEXT_WIDTH - start, 1) + ">"
            lines.append(f"  |{bar:<{TEXT_WIDTH + 1}}| {_fmt(b)} -> {_fmt(d)}")
    return "\n".join(lines) + "\n"


def render_svg(diagrams: Sequence[PersistenceDiagram], min_length: float = 0.0) -> str:
    shown = [_visible(dg, min_length) for dg in diagrams]
    hi, lo = _axis(shown)
    span = hi - lo
    inner = WIDTH - 2 * MARGIN

    def xpos(v):
        return MARGIN + (hi - v) / span * inner

    body = []
    y = 20
    for dg, pairs in zip(diagrams, shown):
        if not pairs.size:
            continue
        body.append(f'<text x="{MARGIN}" y="{y}" font-size="12">H{dg.degree}</text>')
        y += 8
        for b, d in pairs:
            x0 = xpos(b)
            if math.isfinite(d):
                x1 = xpos(d)
                body.append(f'<line x1="{x0:.2f}" y1="{y}" x2="{x1:.2f}" y2="{y}" stroke="black" stroke-width="4"/>')
            else:
                x1 = WIDTH - MARGIN + 10
                body.append(
                    f'<line x1="{x0:.2f}" y1="{y}" x2="{x1:.2f}" y2="{y}" stroke="black" '
                    f'stroke-width="4" marker-end="url(#open)"/>'
                )
            y += PANEL_HEIGHT_PER_BAR
        y += PANEL_GAP
    if body:
        body.append(
            f'<text x="{MARGIN}" y="{y}" font-size="11">level {escape(_fmt(hi))} (left) '
            f"to {escape(_fmt(lo))} (right)</text>"
        )
        y += 10
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{y}">\n'
        '<defs><marker id="open" markerWidth="6" markerHeight="6" refX="0" refY="3" orient="auto">'
        '<path d="M0,0 L6,3 L0,6" fill="none" stroke="black"/></marker></defs>\n'
    )
    return head + "\n".join(body) + ("\n" if body else "") + "</svg>\n"


def render_barcode(
    diagrams: Sequence[PersistenceDiagram], format: str = "svg", min_length: float = 0.0
) -> bytes:
    """One panel per degree; bars shorter than ``min_length`` are left out.

    Higher levels are drawn on the left. Essential bars run to the right
    edge and end in an open arrow.
    """
    if format == "svg":
        return render_svg(diagrams, min_length).encode()
    if format == "text":
        return render_text(diagrams, min_length).encode()
    raise UnsupportedFormat(f"unsupported barcode format {format!r}; expected 'svg' or 'text'")
