"""Ray-cast selection of elements and layers, with poche disambiguation.

A touch through the poche must not select a nearer invisible surface:
with a poche toggle active, the winning hit is the first one lying on the
active plane (within eps_d) whose surface normal agrees with the plane
normal (within eps_theta); without a toggle the nearest hit simply wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import kernels
from .core import Aabb, BuildingModel, Ray, SectionPlane, triangle_normals
from .errors import UnknownElement
from .sectioning import SectionResult

EPS_DISTANCE = 1e-4       # meters: hit-to-plane distance for a poche hit
EPS_ANGLE_DEG = 1.0       # degrees: hit normal vs plane normal
TIE_EPS = 1e-9            # meters: distance ties break by element id


class HitSource(Enum):
    SURFACE = "surface"
    CAP = "cap"


class HighlightStyle(Enum):
    RED_WIREFRAME = "red_wireframe"
    RED_SOLID = "red_solid"


@dataclass(frozen=True)
class RayHit:
    element_id: str
    layer_index: int
    distance: float
    point: tuple
    normal: tuple
    source: HitSource


@dataclass(frozen=True)
class PickResult:
    hit: RayHit | None
    is_poche: bool = False
    highlight: "HighlightSpec | None" = None

    @property
    def element_id(self):
        return self.hit.element_id if self.hit else None

    @property
    def layer_index(self):
        return self.hit.layer_index if self.hit else None


@dataclass(frozen=True)
class HighlightSpec:
    style: HighlightStyle
    element_id: str
    layer_index: int | None
    batches: tuple  # of (vertices, triangles) arrays


def _pick_pools(source):
    """Yield (element_id, layer_index, vertices, triangles, source, aabb)."""
    if isinstance(source, BuildingModel):
        for element in source.elements:
            for spec, mesh in element.meshes:
                yield (element.element_id, spec.layer_index,
                       np.asarray(mesh.vertices), np.asarray(mesh.triangles),
                       HitSource.SURFACE, mesh.aabb())
        return
    if isinstance(source, SectionResult):
        for lay in source.layers:
            if len(lay.kept):
                yield (lay.element_id, lay.layer_index, lay.vertices, lay.kept,
                       HitSource.SURFACE, Aabb.of_points(lay.vertices))
        for cap in source.caps:
            if len(cap.triangles):
                yield (cap.element_id, cap.layer_index, cap.points3d,
                       cap.triangles, HitSource.CAP, Aabb.of_points(cap.points3d))
        return
    raise TypeError(f"cannot cast rays against {type(source).__name__}")


def _ray_hits_aabb(ray: Ray, box: Aabb) -> bool:
    t0, t1 = 0.0, math.inf
    for k in range(3):
        o, d = ray.origin[k], ray.direction[k]
        lo, hi = box.lo[k] - 1e-9, box.hi[k] + 1e-9
        if abs(d) < 1e-15:
            if o < lo or o > hi:
                return False
            continue
        ta, tb = (lo - o) / d, (hi - o) / d
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
        if t0 > t1:
            return False
    return True


def cast_ray(source, ray: Ray) -> list:
    """All intersections of the ray with pickable geometry, nearest first.

    ``source`` is a model (every surface pickable) or a section result (kept
    surfaces and caps pickable; discarded geometry is never hit). Distance
    ties under 1e-9 m order by element id; coincident hits on one surface
    (e.g. a ray through a shared triangle edge) are collapsed to one.
    """
    hits = []
    for element_id, layer_index, verts, tris, src, bb in _pick_pools(source):
        if not _ray_hits_aabb(ray, bb):
            continue
        idx, tvals = kernels.ray_triangle_hits(ray.origin, ray.direction, verts, tris)
        if len(idx) == 0:
            continue
        normals = triangle_normals(verts, np.asarray(tris)[idx])
        for k in range(len(idx)):
            t = float(tvals[k])
            hits.append(RayHit(
                element_id=element_id,
                layer_index=layer_index,
                distance=t,
                point=tuple(ray.at(t)),
                normal=tuple(normals[k]),
                source=src,
            ))
    hits.sort(key=lambda h: (h.distance, h.element_id, h.layer_index, h.source.value))
    # re-sort tie groups so near-equal distances order by element id
    ordered = []
    group = []
    for h in hits:
        if group and h.distance - group[-1].distance > TIE_EPS:
            group.sort(key=lambda g: (g.element_id, g.layer_index,
                                      g.source.value, g.distance))
            ordered.extend(group)
            group = []
        group.append(h)
    group.sort(key=lambda g: (g.element_id, g.layer_index, g.source.value, g.distance))
    ordered.extend(group)
    deduped = []
    for h in ordered:
        if deduped:
            prev = deduped[-1]
            if (prev.element_id == h.element_id
                    and prev.layer_index == h.layer_index
                    and prev.source == h.source
                    and abs(prev.distance - h.distance) <= TIE_EPS):
                continue
        deduped.append(h)
    return deduped


def _angle_deg(a, b) -> float:
    d = float(np.clip(np.dot(a, b), -1.0, 1.0))
    return math.degrees(math.acos(d))


def resolve_pick(hits, active_plane: SectionPlane | None = None,
                 eps_d: float = EPS_DISTANCE,
                 eps_theta_deg: float = EPS_ANGLE_DEG) -> PickResult:
    """Resolve sorted hits into a pick.

    With a poche toggle active, the first hit within ``eps_d`` of the plane
    whose normal is within ``eps_theta_deg`` of the plane normal is the
    poche and wins even when nearer (invisible) surfaces were hit first.
    Without a toggle, the nearest hit wins. Empty hits resolve to a miss.
    """
    if active_plane is not None:
        pn = active_plane.normal
        axis = active_plane.axis.value
        for h in hits:
            if abs(h.point[axis] - active_plane.offset) > eps_d:
                continue
            if _angle_deg(np.asarray(h.normal), pn) > eps_theta_deg:
                continue
            return PickResult(hit=h, is_poche=True)
    if hits:
        return PickResult(hit=hits[0], is_poche=False)
    return PickResult(hit=None, is_poche=False)


def highlight_for(pick: PickResult, source, mode) -> HighlightSpec | None:
    """Highlight geometry for a resolved pick.

    Inspect mode: the whole element as a red wireframe. Section (and reveal)
    modes: only the element geometry on the kept side, red solid. A poche
    pick narrows the highlight to the picked layer's meshes.
    """
    from .sectioning import SectionMode

    if pick.hit is None:
        return None
    element_id = pick.hit.element_id
    layer_index = pick.hit.layer_index if pick.is_poche else None

    if isinstance(mode, str):
        mode = SectionMode(mode)

    batches = []
    if isinstance(source, SectionResult):
        known = {lay.element_id for lay in source.layers}
        if element_id not in known:
            raise UnknownElement(f"no element {element_id!r} in scene")
        for lay in source.layers:
            if lay.element_id != element_id:
                continue
            if layer_index is not None and lay.layer_index != layer_index:
                continue
            if mode is SectionMode.INSPECT:
                tris = np.concatenate([lay.kept, lay.discarded]) \
                    if len(lay.discarded) else lay.kept
            else:
                tris = lay.kept
            if len(tris):
                batches.append((lay.vertices, np.asarray(tris)))
    elif isinstance(source, BuildingModel):
        try:
            element = source.element(element_id)
        except KeyError:
            raise UnknownElement(f"no element {element_id!r} in model") from None
        for spec, mesh in element.meshes:
            if layer_index is not None and spec.layer_index != layer_index:
                continue
            batches.append((np.asarray(mesh.vertices), np.asarray(mesh.triangles)))
    else:
        raise TypeError(f"cannot highlight against {type(source).__name__}")

    style = HighlightStyle.RED_WIREFRAME if mode is SectionMode.INSPECT \
        else HighlightStyle.RED_SOLID
    return HighlightSpec(style=style, element_id=element_id,
                         layer_index=layer_index, batches=tuple(batches))


def pick(source, ray: Ray, active_plane: SectionPlane | None = None,
         mode=None, eps_d: float = EPS_DISTANCE,
         eps_theta_deg: float = EPS_ANGLE_DEG) -> PickResult:
    """cast_ray + resolve_pick (+ highlight when a mode is given)."""
    hits = cast_ray(source, ray)
    result = resolve_pick(hits, active_plane, eps_d, eps_theta_deg)
    if mode is not None and result.hit is not None:
        result = replace(result, highlight=highlight_for(result, source, mode))
    return result
