"""Section Mode: clip the model by the section box, build hatched caps,
classify render layers.

Clipping is real CPU mesh splitting (not a fragment-discard effect): every
input triangle lands, possibly subdivided, in exactly one of kept/discarded,
so volume bookkeeping and watertight closure are checkable facts rather than
rendering artifacts.

Cap construction per element, layer, and active plane:

1. split the original layer mesh by that plane alone and take the kept-side
   boundary edges lying on the plane (crossing vertices are snapped exactly
   onto it), reversed so the cap opposes the surface boundary;
2. stitch the directed edges into closed loops (smallest-turning-angle
   continuation at ambiguous junctions);
3. clip the 2D loops by the traces of the other active planes (axis-aligned
   half-plane Sutherland-Hodgman);
4. drop exactly-collinear loop vertices and ear-clip (holes bridged) into
   triangles wound so their normal equals the plane normal.

The kept solid is then closed by its caps and the discarded solid by the
same caps reversed, which is what makes vol(kept) + vol(discarded) equal
the input volume identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import kernels
from .core import (Aabb, Axis, BuildingModel, CameraPose, SectionBox,
                   SectionPlane, Sign, aabb, signed_volume)
from .errors import UnknownElement

CAP_PLANE_TOL = 1e-6      # cap vertices must lie this close to their plane
STITCH_TOL = 1e-7         # endpoint weld tolerance when chaining cut edges
COLLINEAR_EPS = 1e-12     # uv cross-product cutoff for loop simplification
MIN_LOOP_AREA = 1e-12

# In-plane 2D frames: (u_axis, v_axis) world-axis indices chosen so that a
# counterclockwise uv loop has 3D normal equal to the plane normal.
FRAME_UV = {
    (Axis.X, Sign.POS): (2, 1), (Axis.X, Sign.NEG): (1, 2),
    (Axis.Y, Sign.POS): (0, 2), (Axis.Y, Sign.NEG): (2, 0),
    (Axis.Z, Sign.POS): (1, 0), (Axis.Z, Sign.NEG): (0, 1),
}


class RenderLayer(Enum):
    KEPT_SOLID = "KeptSolid"
    DISCARDED_WIREFRAME = "DiscardedWireframe"
    CAP_POCHE = "CapPoche"
    REVEAL_SOLID = "RevealSolid"
    HIGHLIGHT_RED_WIRE = "HighlightRedWire"
    HIGHLIGHT_RED_SOLID = "HighlightRedSolid"


class SectionMode(Enum):
    INSPECT = "inspect"
    SECTION = "section"
    REVEAL = "reveal"


@dataclass(frozen=True)
class ClippedLayer:
    """Surface triangles of one element layer split into kept/discarded."""

    element_id: str
    layer_index: int
    vertices: np.ndarray    # (V, 3) grows with cut points during clipping
    kept: np.ndarray        # (K, 3) int indices
    discarded: np.ndarray   # (D, 3) int indices
    source_watertight: bool = False


@dataclass(frozen=True)
class CapPolygon:
    """One closed cap region (outer loop plus holes) on an active plane.

    ``loops`` are 2D polygons in the plane's uv frame: loops[0] is the outer
    boundary (counterclockwise), the rest are holes (clockwise). ``points3d``
    and ``triangles`` carry the triangulated cap, wound so the triangle
    normals equal the plane normal (outward from the kept solid). ``hatch``
    holds 2D segments filled in by poche generation.
    """

    element_id: str
    layer_index: int
    plane: SectionPlane
    loops: tuple
    points3d: np.ndarray
    triangles: np.ndarray
    hatch: tuple = ()
    open_profile: bool = False

    def area(self) -> float:
        return float(sum(_signed_area(lp) for lp in self.loops))


@dataclass(frozen=True)
class SectionResult:
    """Everything a section produces: split surfaces, caps, and the box used."""

    box: SectionBox
    layers: tuple
    caps: tuple
    model: BuildingModel

    def layer(self, element_id: str, layer_index: int) -> ClippedLayer:
        for lay in self.layers:
            if lay.element_id == element_id and lay.layer_index == layer_index:
                return lay
        raise KeyError((element_id, layer_index))

    def caps_for(self, element_id=None, plane=None) -> list:
        out = []
        for cap in self.caps:
            if element_id is not None and cap.element_id != element_id:
                continue
            if plane is not None and (cap.plane.axis, cap.plane.sign) != plane:
                continue
            out.append(cap)
        return out

    def kept_volume(self) -> float:
        """Volume of the kept solid (kept surface closed by its caps)."""
        total = 0.0
        for lay in self.layers:
            total += signed_volume(lay.vertices, lay.kept)
        for cap in self.caps:
            total += signed_volume(cap.points3d, cap.triangles)
        return total

    def discarded_volume(self) -> float:
        """Volume of the discarded solid (discarded surface, caps reversed)."""
        total = 0.0
        for lay in self.layers:
            total += signed_volume(lay.vertices, lay.discarded)
        for cap in self.caps:
            total -= signed_volume(cap.points3d, cap.triangles)
        return total


@dataclass(frozen=True)
class GeometryBatch:
    element_id: str
    layer_index: int
    vertices: np.ndarray
    triangles: np.ndarray


@dataclass(frozen=True)
class RenderLayerSet:
    """Geometry batches per render layer; each triangle sits in exactly one."""

    batches: dict = field(default_factory=dict)

    def __getitem__(self, layer: RenderLayer) -> list:
        return self.batches.get(layer, [])

    def triangle_count(self, layer: RenderLayer) -> int:
        return sum(len(b.triangles) for b in self[layer])


# ---------------------------------------------------------------------------
# 2D helpers
# ---------------------------------------------------------------------------

def _signed_area(loop: np.ndarray) -> float:
    x = loop[:, 0]
    y = loop[:, 1]
    return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def point_in_loops(point, loops) -> bool:
    """Even-odd containment of a 2D point in a set of closed loops."""
    px, py = float(point[0]), float(point[1])
    inside = False
    for loop in loops:
        n = len(loop)
        for i in range(n):
            x1, y1 = loop[i]
            x2, y2 = loop[(i + 1) % n]
            if (y1 > py) != (y2 > py):
                xc = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
                if xc > px:
                    inside = not inside
    return inside


def _clip_loop_halfplane(points, coord, value, keep_greater):
    """Sutherland-Hodgman clip of one loop by an axis-aligned half-plane."""
    d = (value - points[:, coord]) if keep_greater else (points[:, coord] - value)
    eps = 1e-12
    out = []
    n = len(points)
    for i in range(n):
        j = (i + 1) % n
        di, dj = d[i], d[j]
        if di <= eps:
            out.append(points[i])
        if (di > eps and dj < -eps) or (di < -eps and dj > eps):
            t = di / (di - dj)
            p = points[i] + (points[j] - points[i]) * t
            p[coord] = value
            out.append(p)
    if len(out) < 3:
        return None
    pts = np.asarray(out)
    keep = np.ones(len(pts), dtype=bool)
    for i in range(len(pts)):
        if np.all(np.abs(pts[i] - pts[i - 1]) <= 1e-12) and keep[i - 1]:
            keep[i] = False
    pts = pts[keep]
    return pts if len(pts) >= 3 else None


def _simplify_collinear(loop: np.ndarray) -> np.ndarray:
    """Drop vertices that are exactly on the segment between their neighbors."""
    pts = list(loop)
    changed = True
    while changed and len(pts) > 3:
        changed = False
        n = len(pts)
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if abs(cross) <= COLLINEAR_EPS:
                del pts[i]
                changed = True
                break
    return np.asarray(pts)


# ---------------------------------------------------------------------------
# triangulation (ear clipping with hole bridging)
# ---------------------------------------------------------------------------

def _point_in_triangle(p, a, b, c, eps=1e-12):
    d1 = (p[0] - b[0]) * (a[1] - b[1]) - (a[0] - b[0]) * (p[1] - b[1])
    d2 = (p[0] - c[0]) * (b[1] - c[1]) - (b[0] - c[0]) * (p[1] - c[1])
    d3 = (p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])
    has_neg = (d1 < -eps) or (d2 < -eps) or (d3 < -eps)
    has_pos = (d1 > eps) or (d2 > eps) or (d3 > eps)
    return not (has_neg and has_pos)


def _bridge_hole(seq, points, hole_idx):
    """Merge one hole into the outer sequence via a visibility bridge."""
    hole_pts = [points[i] for i in hole_idx]
    m_local = max(range(len(hole_idx)), key=lambda k: (hole_pts[k][0], hole_pts[k][1]))
    m = hole_idx[m_local]
    mx, my = points[m]

    best = None  # (distance, seq position)
    for si in range(len(seq)):
        a_i, b_i = seq[si], seq[(si + 1) % len(seq)]
        ax, ay = points[a_i]
        bx, by = points[b_i]
        if (ay > my) == (by > my):
            continue
        xc = ax + (my - ay) * (bx - ax) / (by - ay)
        if xc >= mx - 1e-12:
            cand = (si + 1) % len(seq) if bx > ax else si
            if best is None or xc < best[0]:
                best = (xc, cand)
    if best is None:
        pos = min(range(len(seq)),
                  key=lambda si: (points[seq[si]][0] - mx) ** 2
                  + (points[seq[si]][1] - my) ** 2)
    else:
        pos = best[1]

    hole_rot = hole_idx[m_local:] + hole_idx[:m_local]
    p_idx = seq[pos]
    merged = (seq[:pos + 1] + hole_rot + [hole_rot[0], p_idx] + seq[pos + 1:])
    return merged


def triangulate_polygon(outer: np.ndarray, holes=()):
    """Ear-clip a polygon with holes.

    Parameters
    ----------
    outer : (n, 2) float, counterclockwise
    holes : iterable of (m, 2) float, clockwise

    Returns
    -------
    points : (p, 2) float
      Outer and hole vertices (bridging duplicates coordinates, never moves
      them, so every input boundary edge survives as a triangle edge).
    triangles : (t, 3) int
      Counterclockwise triangles indexing ``points``.
    """
    points = [tuple(p) for p in outer]
    seq = list(range(len(outer)))
    for hole in holes:
        start = len(points)
        points.extend(tuple(p) for p in hole)
        seq = _bridge_hole(seq, points, list(range(start, len(points))))

    pts = np.asarray(points, dtype=float)
    tris = []
    guard = 0
    limit = 4 * max(len(seq), 1) ** 2
    while len(seq) > 3 and guard < limit:
        guard += 1
        n = len(seq)
        clipped = False
        for k in range(n):
            ia, ib, ic = seq[(k - 1) % n], seq[k], seq[(k + 1) % n]
            a, b, c = pts[ia], pts[ib], pts[ic]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross < -COLLINEAR_EPS:
                continue  # reflex corner
            ear = True
            for im in seq:
                if im in (ia, ib, ic):
                    continue
                p = pts[im]
                if (np.all(p == a) or np.all(p == b) or np.all(p == c)):
                    continue
                if _point_in_triangle(p, a, b, c):
                    ear = False
                    break
            if not ear:
                continue
            if len({ia, ib, ic}) == 3:
                tris.append((ia, ib, ic))
            del seq[k]
            clipped = True
            break
        if not clipped:
            break
    if len(seq) == 3 and len({seq[0], seq[1], seq[2]}) == 3:
        tris.append((seq[0], seq[1], seq[2]))
    elif len(seq) > 3:
        # stalled on a degenerate configuration: fan as a last resort
        for k in range(1, len(seq) - 1):
            if len({seq[0], seq[k], seq[k + 1]}) == 3:
                tris.append((seq[0], seq[k], seq[k + 1]))
    return pts, np.asarray(tris, dtype=np.int64).reshape(-1, 3)


# ---------------------------------------------------------------------------
# boundary loops on a plane
# ---------------------------------------------------------------------------

def _boundary_edges(triangles: np.ndarray):
    """Directed edges used exactly once across the triangle set."""
    if len(triangles) == 0:
        return []
    directed = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    counts = {}
    for a, b in directed:
        key = (int(a), int(b)) if a < b else (int(b), int(a))
        counts[key] = counts.get(key, 0) + 1
    return [(int(a), int(b)) for a, b in directed
            if counts[(int(a), int(b)) if a < b else (int(b), int(a))] == 1]


def _stitch_cycles(edges, uv):
    """Chain directed edges into closed cycles.

    ``uv`` maps vertex index to 2D position; at junctions with several
    outgoing edges the continuation with the smallest turning angle wins.
    Returns (cycles, leftover_open_chain_count).
    """
    out_map = {}
    for eid, (a, b) in enumerate(edges):
        out_map.setdefault(a, []).append(eid)
    used = [False] * len(edges)
    cycles = []
    open_chains = 0
    for seed in range(len(edges)):
        if used[seed]:
            continue
        used[seed] = True
        chain = [edges[seed][0], edges[seed][1]]
        while True:
            cur, prev = chain[-1], chain[-2]
            if cur == chain[0]:
                cycles.append(chain[:-1])
                break
            candidates = [e for e in out_map.get(cur, []) if not used[e]]
            if not candidates:
                open_chains += 1
                break
            if len(candidates) == 1:
                nxt = candidates[0]
            else:
                din = uv[cur] - uv[prev]
                nd = np.linalg.norm(din)
                din = din / nd if nd > 0 else din
                def straightness(eid):
                    dout = uv[edges[eid][1]] - uv[cur]
                    n = np.linalg.norm(dout)
                    return float(din @ (dout / n)) if n > 0 else -2.0
                nxt = max(candidates, key=straightness)
            used[nxt] = True
            chain.append(edges[nxt][1])
    return cycles, open_chains


def _weld_indices(indices, positions, tol):
    """Map vertex indices to representatives within ``tol`` (grid hashing)."""
    remap = {}
    grid = {}
    inv = 1.0 / tol
    for idx in indices:
        p = positions[idx]
        cell = tuple(int(np.floor(c * inv)) for c in p)
        found = None
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    for other in grid.get((cell[0] + dx, cell[1] + dy, cell[2] + dz), ()):
                        if np.all(np.abs(positions[other] - p) <= tol):
                            found = other
                            break
                    if found is not None:
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            grid.setdefault(cell, []).append(idx)
            remap[idx] = idx
        else:
            remap[idx] = remap[found]
    return remap


def _plane_loops(vertices, kept_tris, plane: SectionPlane):
    """Closed cap loops (2D, plane uv frame) of a kept-side mesh boundary.

    Returns (loops, open_chains): loops are (n, 2) arrays; surface boundary
    edges are reversed before stitching so outer loops come out
    counterclockwise in the uv frame.
    """
    axis = plane.axis.value
    boundary = _boundary_edges(kept_tris)
    on_plane = [(a, b) for a, b in boundary
                if abs(vertices[a][axis] - plane.offset) <= CAP_PLANE_TOL
                and abs(vertices[b][axis] - plane.offset) <= CAP_PLANE_TOL]
    if not on_plane:
        return [], 0
    touched = sorted({i for e in on_plane for i in e})
    remap = _weld_indices(touched, vertices, STITCH_TOL)
    reversed_edges = []
    for a, b in on_plane:
        ra, rb = remap[a], remap[b]
        if ra != rb:
            reversed_edges.append((rb, ra))
    ui, vi = FRAME_UV[(plane.axis, plane.sign)]
    uv = {i: np.array([vertices[i][ui], vertices[i][vi]]) for i in touched}
    cycles, open_chains = _stitch_cycles(reversed_edges, uv)
    loops = []
    for cyc in cycles:
        if len(cyc) < 3:
            continue
        loops.append(np.asarray([[vertices[i][ui], vertices[i][vi]] for i in cyc]))
    return loops, open_chains


# ---------------------------------------------------------------------------
# clipping pipeline
# ---------------------------------------------------------------------------

def set_plane(box: SectionBox, axis: Axis, sign: Sign, offset: float,
              active: bool = True, model: BuildingModel | None = None,
              margin: float = 0.0) -> SectionBox:
    """Move one section plane; clamps into the model bounds (when given)
    and against the paired plane so Pos <= Neg always holds."""
    bounds = aabb(model) if model is not None else None
    return box.with_plane(axis, sign, offset, active, bounds=bounds, margin=margin)


def _split(vertices, triangles, plane: SectionPlane):
    return kernels.split_triangles_by_plane(
        vertices, triangles, plane.axis.value, plane.offset, plane.keeps_greater)


def _build_caps_for_layer(mesh_vertices, mesh_triangles, watertight,
                          element_id, layer_index, plane, other_planes):
    """Cap polygons of one layer on one plane (cross-section, then 2D clip)."""
    verts, kept, _ = _split(mesh_vertices, mesh_triangles, plane)
    loops, open_chains = _plane_loops(verts, kept, plane)
    open_profile = (not watertight) or open_chains > 0

    ui, vi = FRAME_UV[(plane.axis, plane.sign)]
    clipped = []
    for loop in loops:
        pts = loop
        for other in other_planes:
            if other.axis == plane.axis:
                continue  # parallel: satisfied inside the slab by construction
            coord = 0 if other.axis.value == ui else 1
            pts = _clip_loop_halfplane(pts, coord, other.offset, other.keeps_greater)
            if pts is None:
                break
        if pts is None:
            continue
        pts = _simplify_collinear(pts)
        if len(pts) >= 3 and abs(_signed_area(pts)) > MIN_LOOP_AREA:
            clipped.append(pts)

    outers = [lp for lp in clipped if _signed_area(lp) > 0]
    holes = [lp for lp in clipped if _signed_area(lp) < 0]
    caps = []
    for outer in sorted(outers, key=_signed_area):
        my_holes = []
        rest = []
        for hole in holes:
            if point_in_loops(hole[0], [outer]):
                my_holes.append(hole)
            else:
                rest.append(hole)
        holes = rest
        pts2d, tris = triangulate_polygon(outer, my_holes)
        points3d = np.zeros((len(pts2d), 3))
        points3d[:, plane.axis.value] = plane.offset
        points3d[:, ui] = pts2d[:, 0]
        points3d[:, vi] = pts2d[:, 1]
        caps.append(CapPolygon(
            element_id=element_id,
            layer_index=layer_index,
            plane=plane,
            loops=tuple([outer] + my_holes),
            points3d=points3d,
            triangles=tris,
            open_profile=open_profile,
        ))
    return caps


def clip_model(model: BuildingModel, box: SectionBox) -> SectionResult:
    """Clip every element layer by the active planes of the section box.

    Kept and discarded surface triangles partition each input triangle set
    (subdivided as needed); caps close the kept solid on every active plane.
    Non-watertight layers degrade to best-effort caps flagged
    ``open_profile`` rather than raising.
    """
    active = [p for p in box.planes if p.active]

    layers = []
    caps = []
    for element in model.elements:
        for spec, mesh in element.meshes:
            watertight = mesh.watertight or _mesh_is_closed(mesh.triangles)
            verts = np.array(mesh.vertices)
            kept = np.array(mesh.triangles)
            discarded_parts = []
            for plane in active:
                verts, kept, off = _split(verts, kept, plane)
                discarded_parts.append(off)
            for plane in active:
                caps.extend(_build_caps_for_layer(
                    np.array(mesh.vertices), np.array(mesh.triangles),
                    watertight, element.element_id, spec.layer_index,
                    plane, [p for p in active if p is not plane]))

            discarded = np.concatenate(discarded_parts) \
                if discarded_parts else np.empty((0, 3), dtype=np.int64)
            layers.append(ClippedLayer(
                element_id=element.element_id,
                layer_index=spec.layer_index,
                vertices=verts,
                kept=kept,
                discarded=discarded,
                source_watertight=watertight,
            ))
    return SectionResult(box=box, layers=tuple(layers), caps=tuple(caps), model=model)


def _mesh_is_closed(triangles) -> bool:
    from .core import is_watertight
    return is_watertight(np.asarray(triangles))


# ---------------------------------------------------------------------------
# render layer classification
# ---------------------------------------------------------------------------

def classify_layers(result: SectionResult, mode: SectionMode,
                    highlight=None, camera: CameraPose | None = None,
                    context_ids=None) -> RenderLayerSet:
    """Route clipped geometry into render layers for the given mode.

    ``highlight`` is ``(element_id, layer_index or None)`` or an object with
    those attributes (a resolved pick): Inspect mode highlights the whole
    element as a red wireframe, Section/Reveal modes highlight only the
    kept-side part as red solid. In Reveal mode, context elements (explicit
    ``context_ids``, else elements whose kept bounds start no nearer to the
    camera than the nearest discarded geometry) move to RevealSolid.
    """
    hi_element, hi_layer = _normalize_highlight(result, highlight)
    batches = {layer: [] for layer in RenderLayer}

    reveal_ids = set()
    if mode is SectionMode.REVEAL:
        if context_ids is not None:
            reveal_ids = set(context_ids)
        elif camera is not None:
            reveal_ids = _context_elements(result, camera)
        else:
            raise ValueError("reveal mode needs a camera or explicit context_ids")

    for lay in result.layers:
        is_hi = (lay.element_id == hi_element
                 and (hi_layer is None or lay.layer_index == hi_layer))
        if mode is SectionMode.INSPECT:
            tris = np.concatenate([lay.kept, lay.discarded]) \
                if len(lay.discarded) else lay.kept
            target = RenderLayer.HIGHLIGHT_RED_WIRE if is_hi else RenderLayer.KEPT_SOLID
            _add(batches, target, lay, tris)
            continue
        kept_target = RenderLayer.KEPT_SOLID
        if is_hi:
            kept_target = RenderLayer.HIGHLIGHT_RED_SOLID
        elif lay.element_id in reveal_ids:
            kept_target = RenderLayer.REVEAL_SOLID
        _add(batches, kept_target, lay, lay.kept)
        _add(batches, RenderLayer.DISCARDED_WIREFRAME, lay, lay.discarded)

    if mode is not SectionMode.INSPECT:
        for cap in result.caps:
            if len(cap.triangles) == 0:
                continue
            batches[RenderLayer.CAP_POCHE].append(GeometryBatch(
                cap.element_id, cap.layer_index, cap.points3d, cap.triangles))
    return RenderLayerSet(batches=batches)


def _add(batches, layer, lay: ClippedLayer, tris):
    if len(tris):
        batches[layer].append(GeometryBatch(
            lay.element_id, lay.layer_index, lay.vertices, np.asarray(tris)))


def _normalize_highlight(result: SectionResult, highlight):
    if highlight is None:
        return None, None
    if hasattr(highlight, "element_id"):
        element_id = highlight.element_id
        layer = getattr(highlight, "layer_index", None)
    else:
        element_id, layer = highlight
    if element_id is None:
        return None, None
    known = {lay.element_id for lay in result.layers}
    if element_id not in known:
        raise UnknownElement(f"no element {element_id!r} in section result")
    return element_id, layer


def _context_elements(result: SectionResult, camera: CameraPose):
    """Elements whose kept bounds start behind the nearest discarded depth."""
    forward = np.asarray(camera.rotation)[2]
    nearest = None
    for lay in result.layers:
        if len(lay.discarded) == 0:
            continue
        used = np.unique(lay.discarded)
        depths = (lay.vertices[used] - camera.position) @ forward
        lo = float(depths.min())
        nearest = lo if nearest is None else min(nearest, lo)
    if nearest is None:
        return set()
    context = set()
    by_element = {}
    for lay in result.layers:
        if len(lay.kept) == 0:
            continue
        used = np.unique(lay.kept)
        depths = (lay.vertices[used] - camera.position) @ forward
        lo = float(depths.min())
        cur = by_element.get(lay.element_id)
        by_element[lay.element_id] = lo if cur is None else min(cur, lo)
    for element_id, lo in by_element.items():
        if lo >= nearest - 1e-9:
            context.add(element_id)
    return context


# ---------------------------------------------------------------------------
# combined kept+caps mesh (for watertightness checks and mesh export)
# ---------------------------------------------------------------------------

def kept_with_caps(result: SectionResult, element_id: str, layer_index: int,
                   weld_tol: float = 1e-9):
    """The closed kept solid of one layer: kept surface plus its caps,
    vertex-welded across the surface/cap seam and T-junctions resolved
    (cap loops drop collinear cut vertices, so a cap edge may span several
    collinear surface edges until subdivided back)."""
    lay = result.layer(element_id, layer_index)
    pools = [(lay.vertices, lay.kept)]
    for cap in result.caps:
        if cap.element_id == element_id and cap.layer_index == layer_index \
                and len(cap.triangles):
            pools.append((cap.points3d, cap.triangles))
    points, tris = combine_welded(pools, weld_tol)
    return points, resolve_t_junctions(points, tris, weld_tol)


def _unpaired_edges(tris):
    counts = {}
    for tri in tris:
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            key = (a, b) if a < b else (b, a)
            counts[key] = counts.get(key, 0) + 1
    return [e for e, c in counts.items() if c != 2]


def resolve_t_junctions(points, tris, tol: float = 1e-9, max_rounds: int = 16):
    """Split triangle edges at vertices lying on them (T-vertices).

    Only edges that fail the pairing count are examined, and only endpoints
    of other unpaired edges are split candidates, so a genuinely open mesh
    comes back unchanged."""
    tris = [tuple(int(i) for i in t) for t in np.asarray(tris, dtype=np.int64)]
    for _ in range(max_rounds):
        unpaired = _unpaired_edges(tris)
        if not unpaired:
            break
        candidates = sorted({i for e in unpaired for i in e})
        cand_pts = points[candidates]
        unpaired_set = set(unpaired)
        new_tris = []
        changed = False
        for tri in tris:
            split = None
            for k in range(3):
                a, b = tri[k], tri[(k + 1) % 3]
                key = (a, b) if a < b else (b, a)
                if key not in unpaired_set:
                    continue
                pa, pb = points[a], points[b]
                ab = pb - pa
                ab2 = float(ab @ ab)
                if ab2 <= tol * tol:
                    continue
                for m, pm in zip(candidates, cand_pts):
                    if m == a or m == b:
                        continue
                    t = float((pm - pa) @ ab) / ab2
                    if t <= 0.0 or t >= 1.0:
                        continue
                    dist = np.linalg.norm(pm - (pa + t * ab))
                    seg = math_hypot3(ab)
                    if dist <= tol and t * seg > tol and (1 - t) * seg > tol:
                        split = (k, m)
                        break
                if split:
                    break
            if split is None:
                new_tris.append(tri)
            else:
                k, m = split
                a, b, c = tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]
                new_tris.append((a, m, c))
                new_tris.append((m, b, c))
                changed = True
        tris = new_tris
        if not changed:
            break
    return np.asarray(tris, dtype=np.int64).reshape(-1, 3)


def math_hypot3(v) -> float:
    return float(np.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]))


def combine_welded(pools, tol: float = 1e-9):
    """Concatenate (vertices, triangles) pools, welding vertices within tol."""
    all_points = []
    tris_out = []
    offset = 0
    for verts, tris in pools:
        verts = np.asarray(verts)
        all_points.append(verts)
        tris_out.append(np.asarray(tris, dtype=np.int64) + offset)
        offset += len(verts)
    points = np.concatenate(all_points) if all_points else np.empty((0, 3))
    tris = np.concatenate(tris_out) if tris_out else np.empty((0, 3), dtype=np.int64)
    remap_map = _weld_indices(range(len(points)), points, tol)
    remap = np.arange(len(points))
    for k, r in remap_map.items():
        remap[k] = r
    tris = remap[tris]
    tris = tris[(tris[:, 0] != tris[:, 1]) & (tris[:, 1] != tris[:, 2])
                & (tris[:, 0] != tris[:, 2])]
    return points, tris
