"""Deterministic SVG drawings of translation surfaces.

Polygons are laid out left to right in presentation order.  Output depends
only on the inputs: coordinates are rounded to a fixed number of decimals
and elements are emitted in a fixed order, so equal inputs give identical
bytes.
"""
from __future__ import annotations

from . import _geom as g
from .surface import SurfacePoint, SurfacePresentation

__all__ = ["render_svg", "LAYERS"]

LAYERS = ("polygons", "identifications", "singularities", "cylinders", "blockers", "paths")

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
_GAP = 0.3


def _fmt(x: float, digits: int) -> str:
    s = f"{x:.{digits}f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Layout:
    def __init__(self, s: SurfacePresentation, scale: float, digits: int):
        self.digits = digits
        self.scale = scale
        self.offsets = []
        x = 0.0
        ymin = min(float(v[1]) for poly in s.polygons for v in poly)
        ymax = max(float(v[1]) for poly in s.polygons for v in poly)
        for poly in s.polygons:
            xs = [float(v[0]) for v in poly]
            self.offsets.append(x - min(xs))
            x += max(xs) - min(xs) + _GAP
        self.width = (x - _GAP) * scale + 40
        self.height = (ymax - ymin) * scale + 40
        self.ymax = ymax

    def xy(self, p: int, pt) -> tuple[str, str]:
        X = (float(pt[0]) + self.offsets[p]) * self.scale + 20
        Y = (self.ymax - float(pt[1])) * self.scale + 20
        return _fmt(X, self.digits), _fmt(Y, self.digits)


def render_svg(s: SurfacePresentation, *, blockers=(), paths=(), cylinders=None,
               layers=LAYERS, scale: float = 100.0, digits: int = 3) -> str:
    """SVG text for ``s`` with optional blocking points, geodesic paths and a cylinder decomposition."""
    bad = set(layers) - set(LAYERS)
    if bad:
        raise ValueError(f"unknown layers: {sorted(bad)}")
    L = _Layout(s, scale, digits)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(L.width, digits)}" '
           f'height="{_fmt(L.height, digits)}" font-family="monospace" font-size="10">']

    if "polygons" in layers:
        out.append('<g id="polygons" fill="#f4f4f4" stroke="#333" stroke-width="1">')
        for p, poly in enumerate(s.polygons):
            pts = " ".join(",".join(L.xy(p, v)) for v in poly)
            out.append(f'<polygon points="{pts}"/>')
        out.append("</g>")

    if "identifications" in layers:
        out.append('<g id="identifications" text-anchor="middle">')
        for k, ((p, e), (q, f)) in enumerate(s.edge_pairs()):
            for r, i in ((p, e), (q, f)):
                a, b = s.vertex(r, i), s.vertex(r, i + 1)
                mid = ((float(a[0]) + float(b[0])) / 2, (float(a[1]) + float(b[1])) / 2)
                x, y = L.xy(r, mid)
                out.append(f'<text x="{x}" y="{y}" fill="{_PALETTE[k % len(_PALETTE)]}">{k}</text>')
        out.append("</g>")

    if "singularities" in layers:
        out.append('<g id="singularities" stroke="none">')
        angles = s.cone_angles
        for c, cls in enumerate(s.vertex_classes):
            colour = "#000" if angles[c] > 1 else "#999"
            for p, i in cls:
                x, y = L.xy(p, s.vertex(p, i))
                out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{colour}"/>')
        out.append("</g>")

    if "cylinders" in layers and cylinders is not None:
        out.append('<g id="cylinders" stroke-width="1.5" stroke-dasharray="4 2">')
        for k, sc in enumerate(cylinders.saddles):
            colour = _PALETTE[k % len(_PALETTE)]
            for p, a, b in _source_segments(cylinders, sc["segments"]):
                x1, y1 = L.xy(p, a)
                x2, y2 = L.xy(p, b)
                out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{colour}"/>')
        out.append("</g>")

    if "blockers" in layers and blockers:
        out.append('<g id="blockers" fill="#d62728">')
        for pt in sorted(blockers, key=_key):
            x, y = L.xy(pt.polygon, pt.position)
            out.append(f'<rect x="{_fmt(float(x) - 3, digits)}" y="{_fmt(float(y) - 3, digits)}" '
                       f'width="6" height="6"/>')
        out.append("</g>")

    if "paths" in layers and paths:
        out.append('<g id="paths" stroke-width="1.2" fill="none">')
        for k, path in enumerate(paths):
            colour = _PALETTE[(k + 2) % len(_PALETTE)]
            for p, a, b in path.segments:
                x1, y1 = L.xy(p, a)
                x2, y2 = L.xy(p, b)
                out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{colour}"/>')
        out.append("</g>")

    out.append("</svg>")
    return "\n".join(out) + "\n"


def _key(pt: SurfacePoint):
    return (pt.polygon, float(pt.x), float(pt.y))


def _source_segments(dec, segs):
    """Saddle connection pieces mapped back from the sheared frame."""
    inv = g.matinv(dec.frame)
    for p, a, b in segs:
        yield p, g.matvec(inv, a), g.matvec(inv, b)
