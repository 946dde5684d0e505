"""sectionlab: headless building-model section engine and study analytics.

Sectioning slices an ID-tagged triangle model with a six-plane section box,
closes the cuts with hatched poche caps, and supports picking through the
poche; the analytics half covers alignment-error measurement, exact
nonparametric paired tests, and NASA TLX workload arithmetic. A thin HTTP
service and CLI expose everything to batch jobs and the browser viewer.
"""

from .core import (Aabb, Axis, BuildingModel, CameraPose, Element,
                   HatchPattern, LayerSpec, Ray, SectionBox, SectionPlane,
                   Sign, TriMesh, aabb, kept_side)
from .kernels import backend_name
from .sectioning import (CapPolygon, RenderLayer, SectionMode, SectionResult,
                         classify_layers, clip_model, set_plane)

__version__ = "0.1.0"

__all__ = [
    "Aabb", "Axis", "BuildingModel", "CameraPose", "CapPolygon", "Element",
    "HatchPattern", "LayerSpec", "Ray", "RenderLayer", "SectionBox",
    "SectionMode", "SectionPlane", "SectionResult", "Sign", "TriMesh",
    "aabb", "backend_name", "classify_layers", "clip_model", "kept_side",
    "set_plane", "__version__",
]
