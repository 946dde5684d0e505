"""Poche hatching: fill cap polygons with world-space pattern segments.

Spacing is a world-space 0.05 m by default. Line families are centered on
the cap's bounding box, so a cap of projected width W receives
floor(W / spacing) - 1 lines; every emitted segment midpoint lies inside
the loop-with-holes region.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .core import BuildingModel, HatchPattern
from .errors import LayerRefError
from .sectioning import CapPolygon, SectionResult, point_in_loops

DEFAULT_SPACING = 0.05
DOT_HALF = 0.002  # dots are rendered as tiny segments of this half-length


def _line_family_offsets(width: float, spacing: float):
    """Centered family: floor(width/spacing) - 1 offsets spanning the width."""
    n = int(math.floor(width / spacing)) - 1
    if n <= 0:
        return []
    span = (n - 1) * spacing
    start = (width - span) / 2.0
    return [start + k * spacing for k in range(n)]


def _clip_line_to_loops(p0, d, loops):
    """Intersect the infinite line p0 + t*d with the loop set; return the
    inside intervals as segments (midpoint-tested, even-odd)."""
    ts = []
    dx, dy = d
    for loop in loops:
        n = len(loop)
        for i in range(n):
            a = loop[i]
            b = loop[(i + 1) % n]
            ex, ey = b[0] - a[0], b[1] - a[1]
            denom = dx * ey - dy * ex
            if abs(denom) < 1e-15:
                continue
            # solve p0 + t d = a + s e
            rx, ry = a[0] - p0[0], a[1] - p0[1]
            t = (rx * ey - ry * ex) / denom
            s = (rx * dy - ry * dx) / denom
            if -1e-12 <= s <= 1.0 + 1e-12:
                ts.append(t)
    if len(ts) < 2:
        return []
    ts.sort()
    segments = []
    for k in range(len(ts) - 1):
        t0, t1 = ts[k], ts[k + 1]
        if t1 - t0 < 1e-12:
            continue
        mid = (p0[0] + d[0] * (t0 + t1) / 2, p0[1] + d[1] * (t0 + t1) / 2)
        if point_in_loops(mid, loops):
            segments.append(((p0[0] + d[0] * t0, p0[1] + d[1] * t0),
                             (p0[0] + d[0] * t1, p0[1] + d[1] * t1)))
    return segments


def _parallel_hatch(loops, angle_deg: float, spacing: float):
    pts = np.concatenate(loops)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    theta = math.radians(angle_deg)
    d = (math.cos(theta), math.sin(theta))         # line direction
    n = (-math.sin(theta), math.cos(theta))        # family normal
    corners = [(lo[0], lo[1]), (hi[0], lo[1]), (lo[0], hi[1]), (hi[0], hi[1])]
    projs = [c[0] * n[0] + c[1] * n[1] for c in corners]
    width = max(projs) - min(projs)
    base = min(projs)
    segments = []
    for off in _line_family_offsets(width, spacing):
        c = base + off
        p0 = (n[0] * c, n[1] * c)
        segments.extend(_clip_line_to_loops(p0, d, loops))
    return segments


def _dot_hatch(loops, spacing: float):
    pts = np.concatenate(loops)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    segments = []
    for u in _line_family_offsets(hi[0] - lo[0], spacing):
        for v in _line_family_offsets(hi[1] - lo[1], spacing):
            cx, cy = lo[0] + u, lo[1] + v
            if point_in_loops((cx, cy), loops):
                segments.append(((cx - DOT_HALF, cy), (cx + DOT_HALF, cy)))
    return segments


def _zigzag_hatch(loops, spacing: float):
    pts = np.concatenate(loops)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    amp = spacing / 2.0
    segments = []
    for off in _line_family_offsets(hi[1] - lo[1], spacing):
        y = lo[1] + off
        x = lo[0]
        up = True
        while x < hi[0]:
            x2 = min(x + spacing, hi[0])
            y2 = y + (amp if up else -amp)
            for seg in _clip_segment_to_loops((x, y), (x2, y2), loops):
                segments.append(seg)
            x, y = x2, y2
            up = not up
    return segments


def _clip_segment_to_loops(a, b, loops):
    d = (b[0] - a[0], b[1] - a[1])
    length = math.hypot(*d)
    if length < 1e-12:
        return []
    inner = _clip_line_to_loops(a, d, loops)
    out = []
    for (p0, p1) in inner:
        t0 = ((p0[0] - a[0]) * d[0] + (p0[1] - a[1]) * d[1]) / (length * length)
        t1 = ((p1[0] - a[0]) * d[0] + (p1[1] - a[1]) * d[1]) / (length * length)
        t0, t1 = max(0.0, min(t0, t1)), min(1.0, max(t0, t1))
        if t1 - t0 > 1e-9:
            out.append(((a[0] + d[0] * t0, a[1] + d[1] * t0),
                        (a[0] + d[0] * t1, a[1] + d[1] * t1)))
    return out


def hatch_segments(loops, pattern: HatchPattern, spacing: float = DEFAULT_SPACING):
    """2D hatch segments for a loop-with-holes region in the given pattern."""
    if pattern in (HatchPattern.NONE, HatchPattern.SOLID):
        return []
    if pattern is HatchPattern.DIAGONAL45:
        return _parallel_hatch(loops, 45.0, spacing)
    if pattern is HatchPattern.CROSSHATCH:
        return _parallel_hatch(loops, 45.0, spacing) + _parallel_hatch(loops, 135.0, spacing)
    if pattern is HatchPattern.DOTS:
        return _dot_hatch(loops, spacing)
    if pattern is HatchPattern.ZIGZAG:
        return _zigzag_hatch(loops, spacing)
    raise LayerRefError(f"unknown hatch pattern {pattern!r}")


def _pattern_lookup(result: SectionResult, layer_specs):
    """Resolve (element_id, layer_index) -> HatchPattern."""
    if layer_specs is None:
        layer_specs = result.model
    if isinstance(layer_specs, BuildingModel):
        table = {}
        for element in layer_specs.elements:
            for spec, _ in element.meshes:
                table[(element.element_id, spec.layer_index)] = spec.hatch_pattern
        return table
    table = {}
    for key, value in dict(layer_specs).items():
        pattern = getattr(value, "hatch_pattern", value)
        if isinstance(pattern, str):
            try:
                pattern = HatchPattern(pattern)
            except ValueError:
                raise LayerRefError(f"unknown hatch pattern {pattern!r}") from None
        table[key] = pattern
    return table


def generate_poche(result: SectionResult, layer_specs=None,
                   spacing: float = DEFAULT_SPACING) -> SectionResult:
    """Return a new result whose caps carry hatch segments in their layer's
    pattern. ``layer_specs`` defaults to the model's own layer definitions;
    a cap whose layer is missing from the lookup raises LayerRefError."""
    table = _pattern_lookup(result, layer_specs)
    new_caps = []
    for cap in result.caps:
        key = (cap.element_id, cap.layer_index)
        if key not in table:
            raise LayerRefError(f"no layer spec for {key[0]}#{key[1]}")
        segments = hatch_segments(cap.loops, table[key], spacing)
        new_caps.append(replace(cap, hatch=tuple(segments)))
    return replace(result, caps=tuple(new_caps))
