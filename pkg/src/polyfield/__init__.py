"""Directional 2-PolyVector fields over rasterized 2D line drawings.

The pipeline: parametric scene geometry, anti-aliased rasterization,
polyvector coefficient algebra, analytic ground-truth construction, a
variational solver recovering fields from images alone, evaluation
metrics, and deterministic dataset synthesis. Submodules hold the full
APIs; the names below are the common entry points.
"""

from . import dataset, geometry, groundtruth, metrics, polyvector, raster, variational
from .dataset import (
    DatasetManifest,
    FieldFormatError,
    GenerationError,
    SampleSpec,
    generate,
    read_field,
    sample_scene,
    write_field,
)
from .geometry import (
    Arc,
    CubicBezier,
    DegenerateTangentError,
    Junction,
    LineSegment,
    Primitive,
    Scene,
    closest_point,
    intersections,
    scene_junctions,
    tangent_angle,
)
from .groundtruth import FieldParams, MultiJunctionWarning, assign_pixel, build_field
from .metrics import EvalReport, error_heatmap, regularized_loss
from .polyvector import PolyVectorField, decode, encode, smoothness_energy
from .raster import RasterImage, rasterize, read_png, write_png
from .variational import SolveConfig, SolveResult, solve

__version__ = "0.1.0"

__all__ = [
    "dataset",
    "geometry",
    "groundtruth",
    "metrics",
    "polyvector",
    "raster",
    "variational",
    "DatasetManifest",
    "FieldFormatError",
    "GenerationError",
    "SampleSpec",
    "generate",
    "read_field",
    "sample_scene",
    "write_field",
    "Arc",
    "CubicBezier",
    "DegenerateTangentError",
    "Junction",
    "LineSegment",
    "Primitive",
    "Scene",
    "closest_point",
    "intersections",
    "scene_junctions",
    "tangent_angle",
    "FieldParams",
    "MultiJunctionWarning",
    "assign_pixel",
    "build_field",
    "EvalReport",
    "error_heatmap",
    "regularized_loss",
    "PolyVectorField",
    "decode",
    "encode",
    "smoothness_energy",
    "RasterImage",
    "rasterize",
    "read_png",
    "write_png",
    "SolveConfig",
    "SolveResult",
    "solve",
    "__version__",
]
