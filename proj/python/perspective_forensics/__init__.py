"""Geometric consistency checks (vanishing points, shadows, reflections)
for annotated images, backed by the C++ core."""

import json

from . import _core
from ._core import (
    Error,
    InsufficientConstraints,
    ParseError,
    SchemaError,
    ValidationError,
    intersect_two_lines,
    project,
    vanishing_point_of_direction,
)

__version__ = _core.__version__


def _decode_numbers(value):
    if isinstance(value, dict):
        return {k: _decode_numbers(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode_numbers(v) for v in value]
    if value in ("inf", "-inf", "nan"):
        return float(value)
    return value


def estimate_vanishing_point(segments):
    """Least-squares vanishing point of segments given as (x1, y1, x2, y2)."""
    return _decode_numbers(json.loads(_core.estimate_vanishing_point(segments)))


def fit_vanishing_line(points):
    """Vanishing line through homogeneous points (hx, hy, hw)."""
    return _decode_numbers(json.loads(_core.fit_vanishing_line(points)))


def analyze_shadows(pairs, tolerance=3.0):
    """Light-source analysis of (object_x, object_y, shadow_x, shadow_y) pairs."""
    return _decode_numbers(json.loads(_core.analyze_shadows(pairs, tolerance)))


def analyze_reflections(pairs, tolerance=3.0):
    """Mirror consistency of (scene_x, scene_y, reflection_x, reflection_y) pairs."""
    return _decode_numbers(json.loads(_core.analyze_reflections(pairs, tolerance)))


def analyze(document, tolerance_px=None):
    """Report text for an annotation document (str or dict)."""
    if not isinstance(document, str):
        document = json.dumps(document)
    return _core.analyze(document, tolerance_px)


def render_overlay(document, tolerance_px=None):
    if not isinstance(document, str):
        document = json.dumps(document)
    return _core.render_overlay(document, tolerance_px)


def synthesize(template, seed, noise_px=0.0, inject_yaw_deg=0.0, inject_shift_px=0.0):
    """(annotation document text, ground-truth text) for a synthetic scene."""
    return _core.synthesize(template, seed, noise_px, inject_yaw_deg, inject_shift_px)


__all__ = [
    "Error",
    "InsufficientConstraints",
    "ParseError",
    "SchemaError",
    "ValidationError",
    "analyze",
    "analyze_reflections",
    "analyze_shadows",
    "estimate_vanishing_point",
    "fit_vanishing_line",
    "intersect_two_lines",
    "project",
    "render_overlay",
    "synthesize",
    "vanishing_point_of_direction",
]
