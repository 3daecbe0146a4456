"""Deterministic SVG rendering of spectral-sequence pages.

One dot per class at (stem, filtration); rho-tower dots run leftward
along constant coweight (stem decreases, filtration fixed for the
Bockstein grading; weight colors encode the coweight).  Differentials
are drawn as (-1, +r) arrows and hidden extensions as dashed lines.
The layout rules here are shared with the browser client: x = stem,
y = filtration, tower dots connected by thin lines.
"""

from __future__ import annotations

from .chart import Page, query

CELL = 28
PAD = 40
COLORS = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896",
]


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def emit_chart(
    page: Page,
    stem_range=(0, 26),
    f_range=(0, 16),
    coweight_range=None,
    tower_cap: int = 12,
    differentials=(),
    hidden=(),
) -> str:
    """Render a page to SVG.

    differentials: iterable of (source (s,f), target (s,f), r).
    hidden: iterable of ((s,f), (s,f), label) dashed edges.
    """
    s_lo, s_hi = stem_range
    f_lo, f_hi = f_range
    width = PAD * 2 + (s_hi - s_lo + 1) * CELL
    height = PAD * 2 + (f_hi - f_lo + 1) * CELL

    def x(s):
        return PAD + (s - s_lo + 0.5) * CELL

    def y(f):
        return height - PAD - (f - f_lo + 0.5) * CELL

    rows = query(page, coweight=coweight_range, stem=None, filtration=(f_lo, f_hi),
                 expand_families_to_f=f_hi)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    # axes
    parts.append(
        f'<line x1="{PAD}" y1="{height - PAD}" x2="{width - PAD}" y2="{height - PAD}" stroke="#333"/>'
    )
    parts.append(
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{height - PAD}" stroke="#333"/>'
    )
    for s in range(s_lo, s_hi + 1, 2):
        parts.append(
            f'<text x="{x(s)}" y="{height - PAD + 16}" font-size="9" text-anchor="middle">{s}</text>'
        )
    for f in range(f_lo, f_hi + 1, 2):
        parts.append(
            f'<text x="{PAD - 14}" y="{y(f) + 3}" font-size="9" text-anchor="middle">{f}</text>'
        )
    # dots: each line contributes its anchor dot plus tower dots leftward
    dots = []
    for t, name, torsion, masked in rows:
        extent = tower_cap if torsion is None else min(torsion, tower_cap)
        for k in range(extent):
            s, f = t.s - k, t.f
            if not (s_lo <= s <= s_hi and f_lo <= f <= f_hi):
                continue
            color = COLORS[t.coweight % len(COLORS)]
            dots.append((s, f, name if k == 0 else f"rho^{k} {name}", color, masked, k))
    dots.sort(key=lambda d: (d[0], d[1], d[2]))
    # connect tower dots
    for t, name, torsion, masked in rows:
        extent = tower_cap if torsion is None else min(torsion, tower_cap)
        if extent >= 2:
            s2 = max(t.s - extent + 1, s_lo)
            if f_lo <= t.f <= f_hi and s2 <= s_hi and t.s >= s_lo:
                parts.append(
                    f'<line x1="{x(min(t.s, s_hi))}" y1="{y(t.f)}" x2="{x(max(s2, s_lo))}" '
                    f'y2="{y(t.f)}" stroke="#bbb" stroke-width="0.7"/>'
                )
    for s, f, label, color, masked, k in dots:
        shape = (
            f'<rect x="{x(s) - 3}" y="{y(f) - 3}" width="6" height="6" fill="{color}"/>'
            if masked
            else f'<circle cx="{x(s)}" cy="{y(f)}" r="3" fill="{color}"/>'
        )
        parts.append(f'<g>{shape}<title>{_esc(label)}</title></g>')
    for (s1, f1), (s2, f2), r in sorted(differentials):
        if s_lo <= s1 <= s_hi and s_lo <= s2 <= s_hi and f_lo <= f1 <= f_hi and f_lo <= f2 <= f_hi:
            parts.append(
                f'<line x1="{x(s1)}" y1="{y(f1)}" x2="{x(s2)}" y2="{y(f2)}" '
                f'stroke="#d62728" stroke-width="1"><title>d{r}</title></line>'
            )
    for (s1, f1), (s2, f2), label in sorted(hidden):
        if s_lo <= s1 <= s_hi and s_lo <= s2 <= s_hi and f_lo <= f1 <= f_hi and f_lo <= f2 <= f_hi:
            parts.append(
                f'<line x1="{x(s1)}" y1="{y(f1)}" x2="{x(s2)}" y2="{y(f2)}" '
                f'stroke="#2ca02c" stroke-width="1" stroke-dasharray="3,2">'
                f"<title>{_esc(label)}</title></line>"
            )
    parts.append("</svg>")
    return "\n".join(parts)
