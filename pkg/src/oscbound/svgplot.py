"""Static SVG line plots: polylines, axes and text labels only."""

from __future__ import annotations

import math

_W, _H = 800, 560
_ML, _MR, _MT, _MB = 80, 30, 50, 60
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _transform(vals, lo, hi, out_lo, out_hi, log):
    if log:
        lo, hi = math.log10(lo), math.log10(hi)
        vals = [math.log10(v) for v in vals]
    span = (hi - lo) or 1.0
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in vals]


def _ticks(lo, hi, log, n=5):
    if log:
        lo_e = math.floor(math.log10(lo))
        hi_e = math.ceil(math.log10(hi))
        return [10.0**e for e in range(lo_e, hi_e + 1)]
    if hi == lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def _fmt(v):
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:.4g}"


def line_plot(path, series, title="", xlabel="", ylabel="", logx=False, logy=False,
              marks=()):
    """Write an SVG of (xs, ys, label) series; `marks` are (x, y, text) dots."""
    xs_all = [x for xs, _, _ in series for x in xs]
    ys_all = [y for _, ys, _ in series for y in ys]
    xs_all += [m[0] for m in marks]
    ys_all += [m[1] for m in marks]
    if not xs_all:
        xs_all, ys_all = [0.0, 1.0], [0.0, 1.0]
    if logx:
        xs_all = [x for x in xs_all if x > 0] or [1e-3, 1.0]
    if logy:
        ys_all = [y for y in ys_all if y > 0] or [1e-3, 1.0]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x0 == x1:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y0 == y1:
        y0, y1 = y0 - 0.5, y1 + 0.5
    if not logy:
        pad = 0.06 * (y1 - y0)
        y0, y1 = y0 - pad, y1 + pad

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="monospace" font-size="13">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>',
           f'<text x="{_W / 2}" y="28" text-anchor="middle" font-size="16">{title}</text>']
    # axes
    out.append(f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" stroke="black"/>')
    out.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" stroke="black"/>')
    for tx in _ticks(x0, x1, logx):
        if not (x0 <= tx <= x1):
            continue
        (px,) = _transform([tx], x0, x1, _ML, _W - _MR, logx)
        out.append(f'<line x1="{px:.1f}" y1="{_H - _MB}" x2="{px:.1f}" y2="{_H - _MB + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.1f}" y="{_H - _MB + 20}" text-anchor="middle">{_fmt(tx)}</text>')
    for ty in _ticks(y0, y1, logy):
        if not (y0 <= ty <= y1):
            continue
        (py,) = _transform([ty], y0, y1, _H - _MB, _MT, logy)
        out.append(f'<line x1="{_ML - 5}" y1="{py:.1f}" x2="{_ML}" y2="{py:.1f}" stroke="black"/>')
        out.append(f'<text x="{_ML - 8}" y="{py + 4:.1f}" text-anchor="end">{_fmt(ty)}</text>')
    out.append(f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 15}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="20" y="{(_MT + _H - _MB) / 2}" text-anchor="middle" '
               f'transform="rotate(-90 20 {(_MT + _H - _MB) / 2})">{ylabel}</text>')
    # series
    for si, (xs, ys, label) in enumerate(series):
        color = _COLORS[si % len(_COLORS)]
        pts = [(x, y) for x, y in zip(xs, ys)
               if (not logx or x > 0) and (not logy or y > 0)]
        if pts:
            px = _transform([p[0] for p in pts], x0, x1, _ML, _W - _MR, logx)
            py = _transform([p[1] for p in pts], y0, y1, _H - _MB, _MT, logy)
            poly = " ".join(f"{a:.1f},{b:.1f}" for a, b in zip(px, py))
            out.append(f'<polyline points="{poly}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            for a, b in zip(px, py):
                out.append(f'<circle cx="{a:.1f}" cy="{b:.1f}" r="2.5" fill="{color}"/>')
        if label:
            ly = _MT + 18 * si
            out.append(f'<line x1="{_W - _MR - 150}" y1="{ly}" x2="{_W - _MR - 120}" y2="{ly}" '
                       f'stroke="{color}" stroke-width="1.5"/>')
            out.append(f'<text x="{_W - _MR - 112}" y="{ly + 4}">{label}</text>')
    for mx, my, mtext in marks:
        if (logx and mx <= 0) or (logy and my <= 0):
            continue
        (px,) = _transform([mx], x0, x1, _ML, _W - _MR, logx)
        (py,) = _transform([my], y0, y1, _H - _MB, _MT, logy)
        out.append(f'<circle cx="{px:.1f}" cy="{py:.1f}" r="4" fill="none" stroke="black" stroke-width="1.5"/>')
        out.append(f'<text x="{px + 8:.1f}" y="{py - 6:.1f}">{mtext}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(out))
