"""Camera projection, registration alignment-error measurement, pivot axes.

The alignment metric mechanizes the screenshot procedure: a reference
segment of known real length sets the pixel scale, and each sampled pair of
(model-edge, physical-edge) pixels contributes a millimeter error
``|pixel difference| * scale``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import CameraPose
from .errors import BehindCamera, DegenerateReference, InvalidPose, ParseError

DEPTH_EPS = 1e-12


@dataclass(frozen=True)
class AlignmentAnnotation:
    """Reference segment (pixels, with true length in meters) plus sampled
    pixel pairs of model-edge vs physical-edge points."""

    reference_p0: tuple
    reference_p1: tuple
    reference_length_m: float
    samples: tuple  # of ((model_px), (physical_px)) pairs

    def __post_init__(self):
        if self.reference_length_m <= 0:
            raise ValueError("reference true length must be positive")
        if not self.samples:
            raise ValueError("annotation needs at least one sample")


@dataclass(frozen=True)
class AlignmentReport:
    errors_mm: tuple
    mean_mm: float
    max_mm: float
    scale_mm_per_px: float


def project_point(camera: CameraPose, p) -> tuple:
    """Pinhole projection of a world point to pixel coordinates.

    Raises :class:`BehindCamera` for points at or behind the camera plane.
    """
    pc = camera.to_camera(p)
    if pc[2] <= DEPTH_EPS:
        raise BehindCamera(f"point depth {pc[2]:.3e} is not in front of the camera")
    cx, cy = camera.principal_px
    return (camera.focal_px * pc[0] / pc[2] + cx,
            camera.focal_px * pc[1] / pc[2] + cy)


def measure_alignment(annotation: AlignmentAnnotation) -> AlignmentReport:
    """Millimeter alignment errors from pixel-space samples.

    scale = true length / reference pixel length; error_i is the pixel
    distance of sample pair i times the scale. Invariant under uniform image
    rescale since both the reference and the samples scale together.
    """
    p0 = np.asarray(annotation.reference_p0, dtype=float)
    p1 = np.asarray(annotation.reference_p1, dtype=float)
    ref_px = float(np.linalg.norm(p1 - p0))
    if ref_px <= 0.0:
        raise DegenerateReference("reference segment has zero pixel length")
    scale_mm_per_px = annotation.reference_length_m * 1000.0 / ref_px
    errors = []
    for model_px, physical_px in annotation.samples:
        d = np.linalg.norm(np.asarray(model_px, float) - np.asarray(physical_px, float))
        errors.append(float(d) * scale_mm_per_px)
    return AlignmentReport(
        errors_mm=tuple(errors),
        mean_mm=float(np.mean(errors)),
        max_mm=float(np.max(errors)),
        scale_mm_per_px=scale_mm_per_px,
    )


def measure_alignment_batch(annotations) -> dict:
    """Aggregate several screenshots: per-image reports plus both pooled
    weightings (mean over all samples, and mean of per-image means)."""
    reports = [measure_alignment(a) for a in annotations]
    all_errors = [e for r in reports for e in r.errors_mm]
    return {
        "per_image": reports,
        "pooled_mean_mm": float(np.mean(all_errors)),
        "pooled_max_mm": float(np.max(all_errors)),
        "mean_of_image_means_mm": float(np.mean([r.mean_mm for r in reports])),
    }


def pivot_orientation(camera: CameraPose) -> np.ndarray:
    """World axes expressed in the camera frame: rows are R e_x, R e_y, R e_z.

    The result triple stays orthonormal; a non-orthonormal rotation raises
    :class:`InvalidPose`.
    """
    rot = np.asarray(camera.rotation, dtype=float)
    if np.abs(rot @ rot.T - np.eye(3)).max() > 1e-9:
        raise InvalidPose("camera rotation is not orthonormal within 1e-9")
    return np.array([rot @ e for e in np.eye(3)])


def load_annotation(path) -> AlignmentAnnotation:
    """Annotation JSON: {"reference": {"p0", "p1", "length_m"}, "samples":
    [{"model": [px, py], "physical": [px, py]}, ...]}."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid annotation JSON: {exc}", path) from None
    try:
        ref = doc["reference"]
        samples = tuple((tuple(s["model"]), tuple(s["physical"]))
                        for s in doc["samples"])
        return AlignmentAnnotation(
            reference_p0=tuple(ref["p0"]),
            reference_p1=tuple(ref["p1"]),
            reference_length_m=float(ref["length_m"]),
            samples=samples,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"annotation schema error: {exc}", path) from None
