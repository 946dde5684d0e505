"""Drawing output: section SVGs, OBJ-subset mesh export, wireframe visibility.

SVG output is deterministic: fixed header, millimeter user units (1 unit =
1 mm), coordinates rounded to 0.1 mm, content ordered by element id then
layer. Mesh export is the exact inverse of the ingest reader (same grammar,
shortest round-trip float formatting).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Axis, BuildingModel, CameraPose, Sign, triangle_normals
from .errors import NoSection
from .sectioning import FRAME_UV, SectionResult

FEATURE_ANGLE_DEG = 30.0
MM = 1000.0


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SvgStyle:
    cap_fill: str = "#d9d9d9"
    cap_solid_fill: str = "#555555"
    cap_stroke: str = "#000000"
    hatch_stroke: str = "#333333"
    edge_stroke: str = "#888888"
    cap_stroke_width: float = 0.5    # mm
    hatch_width: float = 0.25
    edge_width: float = 0.2
    margin_mm: float = 10.0


def _fmt_mm(x: float) -> str:
    """0.1 mm fixed precision, normalized zero (avoids '-0.0')."""
    v = round(x * MM, 1)
    if v == 0.0:
        v = 0.0
    return f"{v:.1f}"


def _path_d(loops) -> str:
    parts = []
    for loop in loops:
        cmds = [f"M {_fmt_mm(p[0])} {_fmt_mm(-p[1])}" for p in loop[:1]]
        cmds += [f"L {_fmt_mm(p[0])} {_fmt_mm(-p[1])}" for p in loop[1:]]
        parts.append(" ".join(cmds) + " Z")
    return " ".join(parts)


def export_svg(result: SectionResult, view, style: SvgStyle | None = None) -> bytes:
    """Orthographic section drawing on the (axis, sign) plane as SVG bytes.

    Caps render as filled paths (class ``cap``) with their hatch strokes;
    feature edges of the kept geometry beyond the plane render as thin lines.
    Raises :class:`NoSection` when the requested plane is inactive.
    """
    if style is None:
        style = SvgStyle()
    axis, sign = view
    plane = result.box.plane(axis, sign)
    if not plane.active:
        raise NoSection(f"plane {plane.token} is not active")
    ui, vi = FRAME_UV[(axis, sign)]

    caps = sorted(result.caps_for(plane=(axis, sign)),
                  key=lambda c: (c.element_id, c.layer_index))
    from .core import HatchPattern
    solid_layers = set()
    for element in result.model.elements:
        for spec, _ in element.meshes:
            if spec.hatch_pattern is HatchPattern.SOLID:
                solid_layers.add((element.element_id, spec.layer_index))

    # kept feature edges, projected to the view frame
    edge_lines = []
    for lay in sorted(result.layers, key=lambda l: (l.element_id, l.layer_index)):
        if len(lay.kept) == 0:
            continue
        for a, b in feature_edges(lay.vertices, lay.kept):
            pa, pb = lay.vertices[a], lay.vertices[b]
            qa, qb = (pa[ui], pa[vi]), (pb[ui], pb[vi])
            if math.hypot(qb[0] - qa[0], qb[1] - qa[1]) * MM < 0.05:
                continue  # parallel to the view axis: projects to a point
            edge_lines.append((qa, qb))

    xs, ys = [], []
    for cap in caps:
        for loop in cap.loops:
            xs.extend(loop[:, 0])
            ys.extend(loop[:, 1])
    for (a, b) in edge_lines:
        xs.extend([a[0], b[0]])
        ys.extend([a[1], b[1]])
    if not xs:
        raise NoSection(f"no section content on plane {plane.token}")

    min_x = min(xs) * MM - style.margin_mm
    max_x = max(xs) * MM + style.margin_mm
    min_y = -max(ys) * MM - style.margin_mm
    max_y = -min(ys) * MM + style.margin_mm
    width = max_x - min_x
    height = max_y - min_y

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:.1f}mm" height="{height:.1f}mm" '
        f'viewBox="{min_x:.1f} {min_y:.1f} {width:.1f} {height:.1f}">')
    out.append(f'<g id="edges" fill="none" stroke="{style.edge_stroke}" '
               f'stroke-width="{style.edge_width}">')
    for (a, b) in edge_lines:
        out.append(f'<line x1="{_fmt_mm(a[0])}" y1="{_fmt_mm(-a[1])}" '
                   f'x2="{_fmt_mm(b[0])}" y2="{_fmt_mm(-b[1])}"/>')
    out.append('</g>')
    out.append('<g id="caps">')
    for cap in caps:
        fill = style.cap_solid_fill \
            if (cap.element_id, cap.layer_index) in solid_layers else style.cap_fill
        out.append(
            f'<path class="cap" data-element="{cap.element_id}" '
            f'data-layer="{cap.layer_index}" d="{_path_d(cap.loops)}" '
            f'fill="{fill}" fill-rule="evenodd" stroke="{style.cap_stroke}" '
            f'stroke-width="{style.cap_stroke_width}"/>')
        if cap.hatch:
            out.append(f'<g class="hatch" stroke="{style.hatch_stroke}" '
                       f'stroke-width="{style.hatch_width}">')
            for (a, b) in cap.hatch:
                out.append(f'<line x1="{_fmt_mm(a[0])}" y1="{_fmt_mm(-a[1])}" '
                           f'x2="{_fmt_mm(b[0])}" y2="{_fmt_mm(-b[1])}"/>')
            out.append('</g>')
    out.append('</g>')
    out.append('</svg>')
    return ("\n".join(out) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# OBJ export (inverse of ingest.load_geometry)
# ---------------------------------------------------------------------------

def _format_coord(x: float) -> str:
    return repr(float(x))


def _write_group(lines, name, vertices, triangles, base):
    lines.append(f"o {name}")
    used = sorted({int(i) for tri in triangles for i in tri})
    remap = {g: k for k, g in enumerate(used)}
    for g in used:
        p = vertices[g]
        lines.append(f"v {_format_coord(p[0])} {_format_coord(p[1])} {_format_coord(p[2])}")
    for tri in triangles:
        a, b, c = (remap[int(i)] + base + 1 for i in tri)
        lines.append(f"f {a} {b} {c}")
    return base + len(used)


def export_model_mesh(model: BuildingModel) -> bytes:
    """Write a whole model back to the OBJ subset."""
    lines = []
    base = 0
    for element in model.elements:
        single = len(element.meshes) == 1 and element.meshes[0][0].layer_index == 0
        for spec, mesh in element.meshes:
            name = element.element_id if single \
                else f"{element.element_id}#{spec.layer_index}"
            base = _write_group(lines, name, mesh.vertices, mesh.triangles, base)
    return ("\n".join(lines) + "\n").encode("utf-8")


def export_mesh(result: SectionResult, side: str = "kept") -> bytes:
    """Write one side of a section result (kept / discarded / caps) as OBJ."""
    if side not in ("kept", "discarded", "caps"):
        raise ValueError(f"side must be kept, discarded, or caps; got {side!r}")
    lines = []
    base = 0
    if side == "caps":
        caps = sorted(result.caps, key=lambda c: (c.element_id, c.layer_index,
                                                  c.plane.token))
        for cap in caps:
            if len(cap.triangles) == 0:
                continue
            name = f"{cap.element_id}#{cap.layer_index}"
            base = _write_group(lines, name, cap.points3d, cap.triangles, base)
        return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""
    for lay in sorted(result.layers, key=lambda l: (l.element_id, l.layer_index)):
        tris = lay.kept if side == "kept" else lay.discarded
        if len(tris) == 0:
            continue
        name = f"{lay.element_id}#{lay.layer_index}"
        base = _write_group(lines, name, lay.vertices, tris, base)
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""


# ---------------------------------------------------------------------------
# wireframe edge visibility
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WireSegment:
    element_id: str
    p0: tuple
    p1: tuple


def feature_edges(vertices: np.ndarray, triangles: np.ndarray):
    """Undirected (i, j) vertex pairs that are boundary edges or whose
    adjacent face normals differ by more than 30 degrees."""
    tris = np.asarray(triangles, dtype=np.int64)
    if len(tris) == 0:
        return []
    normals = triangle_normals(np.asarray(vertices), tris)
    edge_faces = {}
    for f, tri in enumerate(tris):
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            key = (a, b) if a < b else (b, a)
            edge_faces.setdefault(key, []).append(f)
    cos_cut = math.cos(math.radians(FEATURE_ANGLE_DEG))
    out = []
    for key, faces in edge_faces.items():
        if len(faces) == 1:
            out.append(key)
        elif len(faces) == 2:
            d = float(np.dot(normals[faces[0]], normals[faces[1]]))
            if d < cos_cut:
                out.append(key)
    return out


def _occluded(point, camera_pos, soup_vertices, soup_triangles):
    to_p = np.asarray(point) - camera_pos
    dist = float(np.linalg.norm(to_p))
    if dist < 1e-12:
        return False
    direction = to_p / dist
    idx, tvals = kernels.ray_triangle_hits(camera_pos, direction,
                                           soup_vertices, soup_triangles)
    if len(tvals) == 0:
        return False
    near = tvals[(tvals > 1e-9) & (tvals < dist * (1.0 - 1e-6))]
    return len(near) > 0


def edge_visibility(model: BuildingModel, camera: CameraPose):
    """Split every feature edge into visible and hidden segments.

    Classification is an exact depth test against the model's own triangles:
    candidate transition parameters come from the planes spanned by the
    camera and each occluder edge (plus occluder support planes), and each
    resulting interval is classified at its midpoint. The two lists together
    cover every feature edge exactly.

    Returns (visible, hidden) lists of :class:`WireSegment`.
    """
    pools = []
    for element in model.elements:
        for _, mesh in element.meshes:
            pools.append((element.element_id, np.asarray(mesh.vertices),
                          np.asarray(mesh.triangles)))
    soup_v = []
    soup_t = []
    base = 0
    for _, v, t in pools:
        soup_v.append(v)
        soup_t.append(t + base)
        base += len(v)
    soup_vertices = np.concatenate(soup_v)
    soup_triangles = np.concatenate(soup_t)
    cam = np.asarray(camera.position, dtype=float)

    tri_pts = soup_vertices[soup_triangles]  # (T, 3, 3)

    visible = []
    hidden = []
    for element_id, v, t in pools:
        for (i, j) in feature_edges(v, t):
            p0, p1 = v[i], v[j]
            e = p1 - p0
            params = {0.0, 1.0}
            # candidate occlusion transitions per occluder triangle
            for tri in tri_pts:
                for k in range(4):
                    if k < 3:
                        a, b = tri[k], tri[(k + 1) % 3]
                        n = np.cross(a - cam, b - cam)
                    else:
                        n = np.cross(tri[1] - tri[0], tri[2] - tri[0])
                        a = tri[0]
                    denom = float(np.dot(e, n))
                    if abs(denom) < 1e-15:
                        continue
                    s = float(np.dot(a - p0, n)) / denom
                    if 1e-9 < s < 1.0 - 1e-9:
                        params.add(round(s, 12))
            ts = sorted(params)
            runs = []  # (occluded?, t0, t1)
            for k in range(len(ts) - 1):
                t0, t1 = ts[k], ts[k + 1]
                if t1 - t0 < 1e-12:
                    continue
                mid = p0 + e * ((t0 + t1) / 2.0)
                occ = _occluded(mid, cam, soup_vertices, soup_triangles)
                if runs and runs[-1][0] == occ:
                    runs[-1] = (occ, runs[-1][1], t1)
                else:
                    runs.append((occ, t0, t1))
            for occ, t0, t1 in runs:
                seg = WireSegment(element_id,
                                  tuple(p0 + e * t0), tuple(p0 + e * t1))
                (hidden if occ else visible).append(seg)
    return visible, hidden
