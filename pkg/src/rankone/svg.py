"""Minimal SVG 1.1 plot of traced eigenvalue curves in the complex plane."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .serialize import fmt

__all__ = ["curves_svg"]

WIDTH = 640
HEIGHT = 640
MARGIN = 40
POS_COLOR = "#d62728"  # tau > 0
NEG_COLOR = "#1f77b4"  # tau < 0


def _bounds(points: np.ndarray):
    x0, x1 = points.real.min(), points.real.max()
    y0, y1 = points.imag.min(), points.imag.max()
    span = max(x1 - x0, y1 - y0, 1e-9)
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    half = 0.55 * span
    return cx - half, cx + half, cy - half, cy + half


def curves_svg(bundle, limits=(), ray_slope: complex | None = None, title: str = "") -> str:
    """Branches split at tau = 0 and drawn as polylines (red for tau > 0,
    blue for tau < 0); ``limits`` as black circles; the line through the
    origin with direction ``ray_slope`` dashed."""
    limits = np.asarray(list(limits), dtype=complex)
    pts = np.concatenate([bundle.branches.ravel(), limits, [0j]])
    pts = pts[np.isfinite(pts)]
    xa, xb, ya, yb = _bounds(pts)
    sx = (WIDTH - 2 * MARGIN) / (xb - xa)
    sy = (HEIGHT - 2 * MARGIN) / (yb - ya)

    def px(z):
        return MARGIN + (z.real - xa) * sx, HEIGHT - MARGIN - (z.imag - ya) * sy

    def path(zs):
        return " ".join(f"{fmt(x)},{fmt(y)}" for x, y in (px(z) for z in zs))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<title>{escape(title)}</title>',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
        f'height="{HEIGHT - 2 * MARGIN}"/></clipPath>',
        f'<rect class="frame" x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
        f'height="{HEIGHT - 2 * MARGIN}" fill="none" stroke="#888" stroke-width="1"/>',
    ]
    ox, oy = px(0j)
    out.append(f'<g clip-path="url(#plot)" stroke="#ccc" stroke-width="1">'
               f'<line class="axis" x1="{MARGIN}" y1="{fmt(oy)}" x2="{WIDTH - MARGIN}" y2="{fmt(oy)}"/>'
               f'<line class="axis" x1="{fmt(ox)}" y1="{MARGIN}" x2="{fmt(ox)}" y2="{HEIGHT - MARGIN}"/></g>')
    if ray_slope is not None and ray_slope != 0:
        d = ray_slope / abs(ray_slope)
        reach = 4 * max(abs(xb - xa), abs(yb - ya)) + abs(complex(0.5 * (xa + xb), 0.5 * (ya + yb)))
        (x1, y1), (x2, y2) = px(-reach * d), px(reach * d)
        out.append(f'<line class="ray" clip-path="url(#plot)" x1="{fmt(x1)}" y1="{fmt(y1)}" '
                   f'x2="{fmt(x2)}" y2="{fmt(y2)}" stroke="black" stroke-width="1" '
                   f'stroke-dasharray="6,4"/>')
    taus = bundle.taus
    neg, pos = taus <= 0, taus >= 0
    for b, br in enumerate(bundle.branches):
        for mask, color, cls in ((neg, NEG_COLOR, "tau-neg"), (pos, POS_COLOR, "tau-pos")):
            if mask.sum() >= 2:
                out.append(f'<polyline class="{cls}" data-branch="{b}" clip-path="url(#plot)" '
                           f'fill="none" stroke="{color}" stroke-width="1.5" points="{path(br[mask])}"/>')
    for z in limits:
        x, y = px(z)
        out.append(f'<circle class="p-uv-root" cx="{fmt(x)}" cy="{fmt(y)}" r="4" '
                   f'fill="none" stroke="black" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
