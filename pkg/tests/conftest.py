import numpy as np
import pytest
from scipy.spatial import ConvexHull

from sectionlab.core import (BuildingModel, Element, HatchPattern, LayerSpec,
                             SectionBox, TriMesh)

CUBE_VERTICES = np.array([
    [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
    [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1],
], dtype=float)

CUBE_TRIANGLES = np.array([
    [0, 2, 1], [0, 3, 2],   # z=0, outward -z
    [4, 5, 6], [4, 6, 7],   # z=1, outward +z
    [0, 1, 5], [0, 5, 4],   # y=0, outward -y
    [2, 3, 7], [2, 7, 6],   # y=1, outward +y
    [1, 2, 6], [1, 6, 5],   # x=1, outward +x
    [3, 0, 4], [3, 4, 7],   # x=0, outward -x
])


def cube_mesh(origin=(0, 0, 0), size=1.0) -> TriMesh:
    v = CUBE_VERTICES * size + np.asarray(origin, dtype=float)
    return TriMesh(v, CUBE_TRIANGLES, watertight=True)


def random_hull_mesh(rng, n_points=20, scale=2.0) -> TriMesh:
    """Random watertight convex polyhedron (outward-oriented hull)."""
    pts = rng.uniform(-scale, scale, size=(n_points, 3))
    hull = ConvexHull(pts)
    v, t = hull.points, hull.simplices.copy()
    center = v[np.unique(t)].mean(axis=0)
    for i, tri in enumerate(t):
        a, b, c = v[tri]
        if np.dot(np.cross(b - a, c - a), a - center) < 0:
            t[i] = tri[[0, 2, 1]]
    used = np.unique(t)
    remap = {g: l for l, g in enumerate(used)}
    local = np.array([[remap[i] for i in tri] for tri in t])
    return TriMesh(v[used], local, watertight=True)


@pytest.fixture
def unit_cube_model() -> BuildingModel:
    element = Element("cube-1", "Walls", "Test Wall",
                      ((LayerSpec(0, "concrete"), cube_mesh()),))
    return BuildingModel((element,))


@pytest.fixture
def two_cube_model() -> BuildingModel:
    return BuildingModel((
        Element("cube-a", "Walls", "W", ((LayerSpec(0, "brick"), cube_mesh()),)),
        Element("cube-b", "Doors", "D",
                ((LayerSpec(0, "wood"), cube_mesh(origin=(3, 0, 0))),)),
    ))


@pytest.fixture
def wall_two_layer_model() -> BuildingModel:
    """A two-layer wall (outer slab touching inner slab) plus a door block."""
    outer = cube_mesh(origin=(0, 0, 0), size=1.0)
    inner = TriMesh(CUBE_VERTICES * np.array([1.0, 0.5, 1.0]) + np.array([0, 1.0, 0]),
                    CUBE_TRIANGLES, watertight=True)
    wall = Element("wall-7", "Walls", "Basic Wall", (
        (LayerSpec(0, "plaster", HatchPattern.DIAGONAL45, 1.0), outer),
        (LayerSpec(1, "insulation", HatchPattern.CROSSHATCH, 0.5), inner),
    ))
    door = Element("door-1", "Doors", "Single Door",
                   ((LayerSpec(0, "wood", HatchPattern.NONE), cube_mesh(origin=(4, 0, 0))),))
    return BuildingModel((wall, door))


def random_scene(rng, n_elements=2):
    elements = []
    for k in range(n_elements):
        mesh = random_hull_mesh(rng, n_points=int(rng.integers(12, 26)))
        shift = rng.uniform(-1, 1, size=3) + np.array([k * 5.0, 0, 0])
        mesh = TriMesh(np.asarray(mesh.vertices) + shift, mesh.triangles,
                       watertight=True)
        elements.append(Element(f"elem-{k}",
                                meshes=((LayerSpec(0, "stone"), mesh),)))
    return BuildingModel(tuple(elements))


def random_active_box(rng, model, max_planes=6) -> SectionBox:
    from sectionlab.core import Axis, Sign, aabb
    from sectionlab.sectioning import set_plane
    box = SectionBox.for_model(model)
    bounds = aabb(model)
    pairs = [(a, s) for a in Axis for s in Sign]
    rng.shuffle(pairs)
    n = int(rng.integers(1, max_planes + 1))
    for axis, sign in pairs[:n]:
        lo, hi = bounds.lo[axis.value], bounds.hi[axis.value]
        box = set_plane(box, axis, sign, float(rng.uniform(lo, hi)))
    return box
