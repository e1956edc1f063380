"""Static SVG rendering. Output is plain text built from fixed-precision
numbers, so identical inputs give byte-identical files."""
from __future__ import annotations

import math

from .mesh import MeshValues, NodalResult, signs

WIDTH, HEIGHT = 640, 580
POS, NEG, MIXED, ZERO = "#c0392b", "#2e6fb5", "#bbbbbb", "#ffffff"


def _header(w, h, title):
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>',
        f'<text x="{w / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{_esc(title)}</text>',
    ]


def _esc(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def diverging(t: float) -> str:
    """t in [-1, 1] -> blue (negative) through white to red (positive)."""
    t = max(-1.0, min(1.0, t))
    if t >= 0:
        r, g, b = 255, int(round(255 * (1 - t))), int(round(255 * (1 - t)))
    else:
        r, g, b = int(round(255 * (1 + t))), int(round(255 * (1 + t))), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def _cell_polys(mv: MeshValues, margin=40):
    g = mv.mesh
    side = min(WIDTH - 2 * margin, (HEIGHT - 2 * margin - 20) / (math.sqrt(3) / 2))
    for c in g.cell_corners:
        pts = []
        for n in c:
            x, y = g.xy(n)
            pts.append((margin + x * side, margin + 20 + (math.sqrt(3) / 2 - y) * side))
        yield c, " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)


def surface_svg(mv: MeshValues, title: str = "") -> str:
    """Heat map of mesh values: one filled triangle per level-m cell, colored by
    the mean of its corner values on a scale symmetric about 0."""
    scale = float(max(abs(v) for v in mv.values)) or 1.0
    out = _header(WIDTH, HEIGHT, title)
    for c, pts in _cell_polys(mv):
        mean = sum(float(mv.values[n]) for n in c) / 3
        out.append(f'<polygon points="{pts}" fill="{diverging(mean / scale)}"/>')
    out.append(f'<text x="10" y="{HEIGHT - 10}" font-family="sans-serif" font-size="12">'
               f'max |u| = {scale:.4e}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def nodal_svg(mv: MeshValues, nodal: NodalResult, title: str = "") -> str:
    """Cells with all corners positive (negative) in red (blue), mixed cells grey."""
    s = signs(mv)
    out = _header(WIDTH, HEIGHT, title)
    for c, pts in _cell_polys(mv):
        cs = {s[n] for n in c}
        if cs == {1}:
            col = POS
        elif cs == {-1}:
            col = NEG
        elif cs == {0}:
            col = ZERO
        else:
            col = MIXED
        out.append(f'<polygon points="{pts}" fill="{col}" stroke="none"/>')
    out.append(f'<text x="10" y="{HEIGHT - 10}" font-family="sans-serif" font-size="12">'
               f'nodal domains: {nodal.count}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def line_svg(series: dict, title: str = "", xlabel: str = "", ylabel: str = "") -> str:
    """Line plot of named [(x, y)] series sharing one pair of axes."""
    palette = ["#c0392b", "#2e6fb5", "#27ae60", "#8e44ad", "#d35400"]
    pts_all = [(float(x), float(y)) for s in series.values() for x, y in s]
    x0, x1 = min(p[0] for p in pts_all), max(p[0] for p in pts_all)
    y0, y1 = min(p[1] for p in pts_all), max(p[1] for p in pts_all)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    L, R, T, B = 70, 20, 40, 50
    w, h = WIDTH - L - R, HEIGHT - T - B

    def px(x):
        return L + (x - x0) / (x1 - x0) * w

    def py(y):
        return T + (1 - (y - y0) / (y1 - y0)) * h

    out = _header(WIDTH, HEIGHT, title)
    out.append(f'<rect x="{L}" y="{T}" width="{w}" height="{h}" fill="none" stroke="#000000"/>')
    for v, anchor in ((x0, "start"), (x1, "end")):
        out.append(f'<text x="{px(v):.2f}" y="{T + h + 16}" text-anchor="{anchor}" '
                   f'font-family="sans-serif" font-size="11">{v:.4g}</text>')
    for v in (y0, y1):
        out.append(f'<text x="{L - 4}" y="{py(v) + 4:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{v:.4g}</text>')
    if xlabel:
        out.append(f'<text x="{L + w / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{_esc(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{T + h / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="12" transform="rotate(-90 14 {T + h / 2:.1f})">{_esc(ylabel)}</text>')
    for i, (name, s) in enumerate(series.items()):
        col = palette[i % len(palette)]
        path = " ".join(f"{px(float(x)):.2f},{py(float(y)):.2f}" for x, y in s)
        out.append(f'<polyline points="{path}" fill="none" stroke="{col}" stroke-width="1.5"/>')
        out.append(f'<text x="{L + 8}" y="{T + 16 + 14 * i}" font-family="sans-serif" '
                   f'font-size="12" fill="{col}">{_esc(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
