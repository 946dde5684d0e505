"""Geometric and scene domain types shared by all other modules.

Conventions fixed here and relied on everywhere else:

* world units are meters, right-handed, Z-up;
* a ``Pos`` section plane translates toward the positive axis direction and
  its normal faces the *negative* direction (``Neg`` is the mirror image);
* the kept region of a section box is ``{p : (p - p0) . normal <= 0}`` for
  every active plane, so a lone X-Pos plane at offset ``t`` keeps ``x >= t``.

All types are immutable after construction: arrays are copied in and marked
read-only, and updates (e.g. moving a section plane) return new values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyModel, InvalidPose

GEOM_EPS = 1e-9           # point-on-plane tolerance, meters
DEGENERATE_AREA = 1e-12   # minimum triangle area, square meters


class Axis(Enum):
    X = 0
    Y = 1
    Z = 2


class Sign(Enum):
    POS = "pos"
    NEG = "neg"


class HatchPattern(Enum):
    DIAGONAL45 = "diagonal45"
    CROSSHATCH = "crosshatch"
    DOTS = "dots"
    ZIGZAG = "zigzag"
    SOLID = "solid"
    NONE = "none"


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def triangle_normals(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Unit outward normals per triangle, from winding order."""
    a = vertices[triangles[:, 0]]
    n = np.cross(vertices[triangles[:, 1]] - a, vertices[triangles[:, 2]] - a)
    lengths = np.linalg.norm(n, axis=1)
    lengths[lengths == 0.0] = 1.0
    return n / lengths[:, None]


def triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a = vertices[triangles[:, 0]]
    n = np.cross(vertices[triangles[:, 1]] - a, vertices[triangles[:, 2]] - a)
    return 0.5 * np.linalg.norm(n, axis=1)


def signed_volume(vertices: np.ndarray, triangles: np.ndarray) -> float:
    """Signed enclosed volume via the divergence theorem.

    Exact for closed meshes with outward winding; for open meshes the value
    is gauge-dependent and only meaningful in matched sums.
    """
    if len(triangles) == 0:
        return 0.0
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


def is_watertight(triangles: np.ndarray) -> bool:
    """True iff every undirected edge is used exactly twice, once per direction."""
    if len(triangles) == 0:
        return False
    tris = np.asarray(triangles, dtype=np.int64)
    directed = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    lo = directed.min(axis=1)
    hi = directed.max(axis=1)
    n = int(tris.max()) + 1
    undirected_keys = lo * n + hi
    directed_keys = directed[:, 0] * n + directed[:, 1]
    # each directed edge exactly once, each undirected edge exactly twice
    if len(np.unique(directed_keys)) != len(directed_keys):
        return False
    _, counts = np.unique(undirected_keys, return_counts=True)
    return bool((counts == 2).all())


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box, inclusive corners."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", _readonly(np.asarray(self.lo, dtype=float)))
        object.__setattr__(self, "hi", _readonly(np.asarray(self.hi, dtype=float)))

    @staticmethod
    def of_points(points: np.ndarray) -> "Aabb":
        return Aabb(points.min(axis=0), points.max(axis=0))

    def union(self, other: "Aabb") -> "Aabb":
        return Aabb(np.minimum(self.lo, other.lo), np.maximum(self.hi, other.hi))

    def contains(self, p, tol: float = 0.0) -> bool:
        p = np.asarray(p, dtype=float)
        return bool((p >= self.lo - tol).all() and (p <= self.hi + tol).all())


@dataclass(frozen=True)
class TriMesh:
    """Indexed triangle mesh: ``vertices`` (N, 3) float64, ``triangles`` (M, 3) int.

    Validation enforces finite coordinates, in-range indices, and non-degenerate
    triangles (area > 1e-12 m^2). A mesh constructed with ``watertight=True``
    must additionally have every edge shared by exactly two opposite-winding
    triangles.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    watertight: bool = False

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        t = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if not np.isfinite(v).all():
            raise ValueError("mesh has non-finite vertex coordinates")
        if len(t) and (t.min() < 0 or t.max() >= len(v)):
            raise ValueError("triangle index out of range")
        if len(t):
            areas = triangle_areas(v, t)
            if (areas <= DEGENERATE_AREA).any():
                bad = int(np.argmin(areas))
                raise ValueError(f"degenerate triangle at index {bad} (area {areas[bad]:.3e})")
        if self.watertight and not is_watertight(t):
            raise ValueError("mesh flagged watertight fails the edge-pairing check")
        object.__setattr__(self, "vertices", _readonly(v))
        object.__setattr__(self, "triangles", _readonly(t))

    @property
    def normals(self) -> np.ndarray:
        return triangle_normals(self.vertices, self.triangles)

    def aabb(self) -> Aabb:
        return Aabb.of_points(self.vertices)

    def volume(self) -> float:
        return signed_volume(self.vertices, self.triangles)


@dataclass(frozen=True)
class LayerSpec:
    """One material stratum of an element assembly.

    ``layer_index`` 0 is the exterior face; ``thickness_m`` is informational.
    """

    layer_index: int
    material_name: str
    hatch_pattern: HatchPattern = HatchPattern.DIAGONAL45
    thickness_m: float = 0.0

    def __post_init__(self):
        if self.layer_index < 0:
            raise ValueError("layer_index must be >= 0")
        if not isinstance(self.hatch_pattern, HatchPattern):
            raise ValueError(f"unknown hatch pattern: {self.hatch_pattern!r}")


@dataclass(frozen=True)
class Element:
    """A building component: unique id, category, family, layered meshes."""

    element_id: str
    category: str = ""
    family: str = ""
    meshes: tuple = ()  # tuple of (LayerSpec, TriMesh)

    def __post_init__(self):
        if not self.element_id:
            raise ValueError("element_id must be nonempty")
        meshes = tuple(self.meshes)
        if not meshes:
            raise ValueError(f"element {self.element_id!r} has no meshes")
        seen = set()
        for spec, mesh in meshes:
            if not isinstance(spec, LayerSpec) or not isinstance(mesh, TriMesh):
                raise ValueError("meshes must be (LayerSpec, TriMesh) pairs")
            if spec.layer_index in seen:
                raise ValueError(
                    f"element {self.element_id!r} repeats layer {spec.layer_index}"
                )
            seen.add(spec.layer_index)
        object.__setattr__(self, "meshes", meshes)

    def layer(self, layer_index: int) -> LayerSpec:
        for spec, _ in self.meshes:
            if spec.layer_index == layer_index:
                return spec
        raise KeyError(layer_index)

    def aabb(self) -> Aabb:
        box = self.meshes[0][1].aabb()
        for _, mesh in self.meshes[1:]:
            box = box.union(mesh.aabb())
        return box


@dataclass(frozen=True)
class BuildingModel:
    """The full virtual building: elements with pairwise-distinct ids, meters."""

    elements: tuple = ()
    units: str = field(default="m", init=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        ids = [e.element_id for e in elements]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate element ids: {dupes}")
        object.__setattr__(self, "elements", elements)

    def element(self, element_id: str) -> Element:
        for e in self.elements:
            if e.element_id == element_id:
                return e
        raise KeyError(element_id)

    @property
    def element_ids(self) -> list:
        return [e.element_id for e in self.elements]


def aabb(model: BuildingModel) -> Aabb:
    """Tight axis-aligned bounds over every vertex of every element mesh."""
    if not model.elements:
        raise EmptyModel("model has no elements")
    box = model.elements[0].aabb()
    for e in model.elements[1:]:
        box = box.union(e.aabb())
    return box


_AXIS_VEC = {Axis.X: np.array([1.0, 0.0, 0.0]),
             Axis.Y: np.array([0.0, 1.0, 0.0]),
             Axis.Z: np.array([0.0, 0.0, 1.0])}


@dataclass(frozen=True)
class SectionPlane:
    """One axis-aligned sectional plane.

    The normal of a ``Pos`` plane faces the negative axis direction, so the
    kept half-space ``(p - p0) . normal <= 0`` lies at coordinates >= offset;
    ``Neg`` mirrors this.
    """

    axis: Axis
    sign: Sign
    offset: float = 0.0
    active: bool = False

    def __post_init__(self):
        if not np.isfinite(self.offset):
            raise ValueError("plane offset must be finite")

    @property
    def normal(self) -> np.ndarray:
        v = _AXIS_VEC[self.axis]
        return -v if self.sign is Sign.POS else v.copy()

    @property
    def keeps_greater(self) -> bool:
        """True iff the kept side is axis coordinate >= offset."""
        return self.sign is Sign.POS

    def signed_distance(self, p) -> float:
        """(p - p0) . normal; <= 0 on the kept side."""
        c = float(np.asarray(p, dtype=float)[self.axis.value])
        d = c - self.offset
        return -d if self.sign is Sign.POS else d

    @property
    def token(self) -> str:
        return f"{self.axis.name.lower()}-{self.sign.value}"


PLANE_ORDER = [(Axis.X, Sign.POS), (Axis.X, Sign.NEG),
               (Axis.Y, Sign.POS), (Axis.Y, Sign.NEG),
               (Axis.Z, Sign.POS), (Axis.Z, Sign.NEG)]


def parse_plane_token(token: str):
    """'x-pos' -> (Axis.X, Sign.POS); raises ValueError on unknown tokens."""
    try:
        axis_s, sign_s = token.lower().split("-")
        return Axis[axis_s.upper()], Sign(sign_s)
    except (ValueError, KeyError):
        raise ValueError(f"unknown plane token {token!r}") from None


UNBOUNDED_OFFSET = 1e9  # parking slot for planes of a box with no model


@dataclass(frozen=True)
class SectionBox:
    """Six axis-aligned sectional planes, one per axis and orientation.

    Invariant: offset(Pos) <= offset(Neg) on every axis (violating updates
    are clamped by :func:`with_plane`), so the kept slab never inverts.
    A default box parks Pos planes at -1e9 and Neg at +1e9; boxes built for
    a model park them at the model bounds instead.
    """

    planes: tuple = ()

    def __post_init__(self):
        if not self.planes:
            planes = tuple(
                SectionPlane(a, s,
                             -UNBOUNDED_OFFSET if s is Sign.POS else UNBOUNDED_OFFSET)
                for a, s in PLANE_ORDER)
        else:
            planes = tuple(self.planes)
            keys = [(p.axis, p.sign) for p in planes]
            if keys != PLANE_ORDER:
                raise ValueError("SectionBox requires the six planes in canonical order")
            for axis in Axis:
                if self.plane_of(axis, Sign.POS, planes).offset > \
                        self.plane_of(axis, Sign.NEG, planes).offset:
                    raise ValueError(f"{axis.name}: Pos offset exceeds Neg offset")
        object.__setattr__(self, "planes", planes)

    @staticmethod
    def plane_of(axis: Axis, sign: Sign, planes) -> SectionPlane:
        return planes[PLANE_ORDER.index((axis, sign))]

    def plane(self, axis: Axis, sign: Sign) -> SectionPlane:
        return self.plane_of(axis, sign, self.planes)

    @property
    def active_planes(self) -> list:
        return [p for p in self.planes if p.active]

    @staticmethod
    def for_model(model: BuildingModel) -> "SectionBox":
        """All planes inactive, parked at the model bounds."""
        box = aabb(model)
        planes = []
        for a, s in PLANE_ORDER:
            offset = float(box.lo[a.value] if s is Sign.POS else box.hi[a.value])
            planes.append(SectionPlane(a, s, offset, active=False))
        return SectionBox(tuple(planes))

    def with_plane(self, axis: Axis, sign: Sign, offset: float,
                   active: bool = True, bounds=None, margin: float = 0.0) -> "SectionBox":
        """Return a new box with one plane moved; clamps to keep Pos <= Neg.

        When ``bounds`` (an :class:`Aabb`) is given, the offset is first
        clamped into the model extent widened by ``margin``.
        """
        if not np.isfinite(offset):
            raise ValueError("plane offset must be finite")
        offset = float(offset)
        if bounds is not None:
            offset = min(max(offset, float(bounds.lo[axis.value]) - margin),
                         float(bounds.hi[axis.value]) + margin)
        paired = self.plane(axis, Sign.NEG if sign is Sign.POS else Sign.POS)
        if sign is Sign.POS:
            offset = min(offset, paired.offset)
        else:
            offset = max(offset, paired.offset)
        planes = list(self.planes)
        planes[PLANE_ORDER.index((axis, sign))] = SectionPlane(axis, sign, offset, active)
        return SectionBox(tuple(planes))


def kept_side(box: SectionBox, p) -> bool:
    """True iff ``p`` satisfies every active plane's half-space test.

    Inactive planes never exclude; with all planes inactive every point is kept.
    Points on an active plane (within GEOM_EPS) count as kept.
    """
    for plane in box.planes:
        if plane.active and plane.signed_distance(p) > GEOM_EPS:
            return False
    return True


@dataclass(frozen=True)
class CameraPose:
    """Pinhole camera: world position, world-to-camera rotation, intrinsics.

    The camera looks along +Z of its own frame. ``rotation`` must be
    orthonormal within 1e-9 or construction raises :class:`InvalidPose`.
    """

    position: np.ndarray
    rotation: np.ndarray
    focal_px: float
    principal_px: tuple = (0.0, 0.0)
    image_size_px: tuple = (0, 0)

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float).reshape(3)
        rot = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        if not np.isfinite(pos).all() or not np.isfinite(rot).all():
            raise InvalidPose("non-finite camera pose")
        if np.abs(rot @ rot.T - np.eye(3)).max() > 1e-9:
            raise InvalidPose("camera rotation is not orthonormal within 1e-9")
        if not self.focal_px > 0:
            raise InvalidPose("focal length must be positive")
        object.__setattr__(self, "position", _readonly(pos))
        object.__setattr__(self, "rotation", _readonly(rot))

    def to_camera(self, p) -> np.ndarray:
        return self.rotation @ (np.asarray(p, dtype=float) - self.position)


@dataclass(frozen=True)
class Ray:
    """Origin plus unit direction (|direction| = 1 within 1e-9)."""

    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.origin, dtype=float).reshape(3)
        d = np.asarray(self.direction, dtype=float).reshape(3)
        if not (np.isfinite(o).all() and np.isfinite(d).all()):
            raise ValueError("ray has non-finite components")
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise ValueError("ray direction must be unit length within 1e-9")
        object.__setattr__(self, "origin", _readonly(o))
        object.__setattr__(self, "direction", _readonly(d))

    @staticmethod
    def toward(origin, direction) -> "Ray":
        """Build a ray from an arbitrary nonzero direction, normalizing it."""
        d = np.asarray(direction, dtype=float)
        n = np.linalg.norm(d)
        if n == 0:
            raise ValueError("ray direction must be nonzero")
        return Ray(origin, d / n)

    def at(self, t: float) -> np.ndarray:
        return self.origin + t * self.direction
