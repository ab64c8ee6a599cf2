"""Minimal SVG scatter with a fitted power-law line (log2 axes)."""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from .fit import ScalingFit

W, H, PAD = 480, 320, 48


def render_svg(fit: ScalingFit, samples: list[tuple[int, float]] | None = None, title: str = "") -> str:
    pts = [(math.log2(n), math.log2(v)) for n, v in (samples or []) if v > 0]
    means = [(math.log2(n), math.log2(v)) for n, v in fit.points]
    allp = pts + means
    x0, x1 = min(p[0] for p in allp), max(p[0] for p in allp)
    y0, y1 = min(p[1] for p in allp), max(p[1] for p in allp)
    x1, y1 = (x1 if x1 > x0 else x0 + 1), (y1 if y1 > y0 else y0 + 1)

    def sx(x: float) -> float:
        return PAD + (x - x0) / (x1 - x0) * (W - 2 * PAD)

    def sy(y: float) -> float:
        return H - PAD - (y - y0) / (y1 - y0) * (H - 2 * PAD)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD}" y2="{H - PAD}" stroke="black"/>',
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{H - PAD}" stroke="black"/>',
        f'<text x="{W / 2}" y="{H - 12}" text-anchor="middle" font-size="12">log2 n</text>',
        f'<text x="14" y="{H / 2}" font-size="12" transform="rotate(-90 14 {H / 2})" '
        f'text-anchor="middle">log2 {escape(fit.column)}</text>',
        f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="13">'
        f"{escape(title)} slope={fit.slope:.3f}</text>",
    ]
    for x, y in pts:
        out.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="1.5" fill="#9ab" />')
    for x, y in means:
        out.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="4" fill="#c33" />')
    ya, yb = fit.intercept + fit.slope * x0, fit.intercept + fit.slope * x1
    out.append(
        f'<line x1="{sx(x0):.1f}" y1="{sy(ya):.1f}" x2="{sx(x1):.1f}" y2="{sy(yb):.1f}" '
        'stroke="#236" stroke-width="1.5"/>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(fit: ScalingFit, path: str | Path, samples=None, title: str = "") -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(fit, samples, title))
