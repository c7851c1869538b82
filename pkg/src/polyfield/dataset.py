"""Deterministic scene sampling, bulk generation, and field serialization.

Each record draws from its own RNG stream seeded by a SplitMix64 mix of
the dataset seed and the record index, so records can be produced in any
order (or in parallel) and regeneration is byte-identical. Fields cross
the process/language boundary in the little-endian PVF1 layout described
at `write_field`.
"""

from __future__ import annotations

import json
import os
import struct
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .geometry import Arc, CubicBezier, LineSegment, Scene, scene_junctions
from .groundtruth import FieldParams, MultiJunctionWarning, build_field, multiway_clusters
from .polyvector import PolyVectorField
from .raster import write_png

__all__ = [
    "FieldFormatError",
    "GenerationError",
    "SampleSpec",
    "DatasetManifest",
    "mix_seed",
    "sample_scene",
    "generate",
    "write_field",
    "read_field",
]

_MAGIC = b"PVF1"
_MAX_ATTEMPTS = 20
_MASK64 = (1 << 64) - 1


class FieldFormatError(ValueError):
    """Malformed PVF1 payload; offset is the failing byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class GenerationError(RuntimeError):
    """A record could not be sampled or produced no usable field."""


def mix_seed(seed: int, index: int) -> int:
    """SplitMix64 finalizer of seed XOR index; the per-record RNG seed."""
    z = (seed ^ index) & _MASK64
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SampleSpec:
    """Scene distribution knobs. type_weights order is (line, arc, bezier)."""

    canvas: int = 64
    primitives_min: int = 2
    primitives_max: int = 4
    type_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    margin: float = 4.0
    field_params: FieldParams = dataclass_field(default_factory=FieldParams)

    def __post_init__(self):
        object.__setattr__(self, "type_weights", tuple(float(w) for w in self.type_weights))
        if not 1 <= self.primitives_min <= self.primitives_max:
            raise ValueError("need 1 <= primitives_min <= primitives_max")
        if len(self.type_weights) != 3 or any(w < 0 for w in self.type_weights):
            raise ValueError("type_weights must be three non-negative reals")
        if sum(self.type_weights) == 0.0:
            raise ValueError("type_weights must not all be zero")
        if self.margin < 0.0 or self.canvas - 2.0 * self.margin <= 1.0:
            raise ValueError("margin leaves no room on the canvas")
        if self.canvas / 2.0 - self.margin < 4.0:
            raise ValueError("canvas too small for the arc radius range")

    def to_obj(self) -> dict:
        return {
            "canvas": self.canvas,
            "primitives_min": self.primitives_min,
            "primitives_max": self.primitives_max,
            "type_weights": list(self.type_weights),
            "margin": self.margin,
            "field_params": {
                "d_near": self.field_params.d_near,
                "d_far": self.field_params.d_far,
                "sigma": self.field_params.sigma,
                "threshold": self.field_params.threshold,
                "stroke_width": self.field_params.stroke_width,
                "intersection_tol": self.field_params.intersection_tol,
            },
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "SampleSpec":
        fp = obj.get("field_params", {})
        return cls(
            canvas=obj.get("canvas", 64),
            primitives_min=obj.get("primitives_min", 2),
            primitives_max=obj.get("primitives_max", 4),
            type_weights=tuple(obj.get("type_weights", (1.0, 1.0, 1.0))),
            margin=obj.get("margin", 4.0),
            field_params=FieldParams(**fp),
        )


def _bezier_self_intersects(bez: CubicBezier) -> bool:
    """Flatten to 64 segments and look for any non-adjacent crossing."""
    pts = bez.point(np.linspace(0.0, 1.0, 65))
    a = pts[:-1]
    d = pts[1:] - a
    n = len(a)
    i, j = np.triu_indices(n, k=2)
    # skip the wrap-adjacent pair only when the curve is closed
    p = a[i]
    r = d[i]
    q = a[j]
    s = d[j]
    cross = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    qp = q - p
    ok = np.abs(cross) > 1e-12
    t = np.where(ok, (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / np.where(ok, cross, 1.0), -1.0)
    u = np.where(ok, (qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]) / np.where(ok, cross, 1.0), -1.0)
    hit = ok & (t >= 0.0) & (t <= 1.0) & (u >= 0.0) & (u <= 1.0)
    return bool(np.any(hit))


def _has_ink(prim, canvas: int) -> bool:
    """Some sampled curve point lies a pixel inside the canvas (so at
    least one pixel center falls within the stroke)."""
    pts = prim.point(np.linspace(0.0, 1.0, 64))
    inside = (
        (pts[:, 0] >= 1.0)
        & (pts[:, 0] <= canvas - 1.0)
        & (pts[:, 1] >= 1.0)
        & (pts[:, 1] <= canvas - 1.0)
    )
    return bool(np.any(inside))


def _draw_primitive(rng: np.random.Generator, spec: SampleSpec):
    lo = spec.margin
    hi = spec.canvas - spec.margin
    kind = rng.choice(3, p=np.asarray(spec.type_weights) / sum(spec.type_weights))
    if kind == 0:
        p = rng.uniform(lo, hi, size=(2, 2))
        return LineSegment(tuple(p[0]), tuple(p[1]))
    if kind == 1:
        center = rng.uniform(lo, hi, size=2)
        radius = rng.uniform(4.0, spec.canvas / 2.0 - spec.margin)
        start = rng.uniform(0.0, 2.0 * np.pi)
        span = rng.uniform(np.pi / 3.0, 2.0 * np.pi)
        return Arc(tuple(center), radius, start, start + span)
    p = rng.uniform(lo, hi, size=(4, 2))
    return CubicBezier(tuple(p[0]), tuple(p[1]), tuple(p[2]), tuple(p[3]))


def sample_scene(seed: int, index: int, spec: SampleSpec = SampleSpec()) -> Scene:
    """Draw the record's scene from its own deterministic RNG stream.

    An attempt is discarded (and redrawn, up to 20 times) when a Bezier
    self-intersects, three or more primitives meet within the junction
    tolerance, or no primitive puts ink on the canvas.
    """
    rng = np.random.Generator(np.random.PCG64(mix_seed(seed, index)))
    tol = spec.field_params.intersection_tol
    for _ in range(_MAX_ATTEMPTS):
        count = int(rng.integers(spec.primitives_min, spec.primitives_max + 1))
        prims = [_draw_primitive(rng, spec) for _ in range(count)]
        if any(
            isinstance(p, CubicBezier) and _bezier_self_intersects(p) for p in prims
        ):
            continue
        if not any(_has_ink(p, spec.canvas) for p in prims):
            continue
        scene = Scene(spec.canvas, spec.canvas, tuple(prims))
        if multiway_clusters(scene_junctions(scene, tol), tol):
            continue
        return scene
    raise GenerationError(f"record {index}: no valid scene in {_MAX_ATTEMPTS} attempts")


def write_field(field: PolyVectorField, path) -> None:
    """Serialize to PVF1: magic, uint32 height/width/channels(=4), then
    height*width mask bytes (0/1 row-major), then float32 channel data
    interleaved per pixel as [Re c0, Im c0, Re c2, Im c2]; little-endian
    throughout. Undefined pixels store zeros."""
    h, w = field.height, field.width
    payload = (
        _MAGIC
        + struct.pack("<III", h, w, 4)
        + field.mask.astype(np.uint8).tobytes()
        + field.channels.astype("<f4").tobytes()
    )
    with open(path, "wb") as fh:
        fh.write(payload)


def read_field(path) -> PolyVectorField:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4 or data[:4] != _MAGIC:
        raise FieldFormatError("bad magic", 0)
    if len(data) < 16:
        raise FieldFormatError("truncated header", len(data))
    h, w, ch = struct.unpack_from("<III", data, 4)
    if ch != 4:
        raise FieldFormatError(f"expected 4 channels, got {ch}", 12)
    if h == 0 or w == 0 or h * w > (1 << 32):
        raise FieldFormatError(f"unreasonable dimensions {h}x{w}", 4)
    need = 16 + h * w + h * w * 4 * 4
    if len(data) != need:
        raise FieldFormatError(
            f"payload is {len(data)} bytes, layout needs {need}", min(len(data), need)
        )
    mask_bytes = np.frombuffer(data, dtype=np.uint8, count=h * w, offset=16)
    if np.any(mask_bytes > 1):
        bad = int(np.argmax(mask_bytes > 1))
        raise FieldFormatError("mask byte not 0/1", 16 + bad)
    m = mask_bytes.reshape(h, w).astype(bool)
    chans = (
        np.frombuffer(data, dtype="<f4", count=h * w * 4, offset=16 + h * w)
        .reshape(h, w, 4)
        .astype(float)
    )
    return PolyVectorField(chans, m)


@dataclass(frozen=True)
class DatasetManifest:
    seed: int
    count: int
    train_count: int
    val_count: int
    spec: SampleSpec
    records: tuple[dict, ...]

    def to_obj(self) -> dict:
        return {
            "seed": self.seed,
            "count": self.count,
            "train_count": self.train_count,
            "val_count": self.val_count,
            "spec": self.spec.to_obj(),
            "records": list(self.records),
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "DatasetManifest":
        return cls(
            int(obj["seed"]),
            int(obj["count"]),
            int(obj["train_count"]),
            int(obj["val_count"]),
            SampleSpec.from_obj(obj["spec"]),
            tuple(obj["records"]),
        )

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        with open(path) as fh:
            return cls.from_obj(json.load(fh))


def _make_record(seed: int, index: int, spec: SampleSpec, out_dir: str, split: str) -> dict:
    scene = sample_scene(seed, index, spec)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", MultiJunctionWarning)
        image, fld = build_field(scene, spec.field_params)
    if not np.any(fld.mask):
        raise GenerationError(f"record {index}: empty field mask")
    stem = f"{index:05d}"
    names = (f"scene_{stem}.json", f"image_{stem}.png", f"field_{stem}.pvf")
    with open(os.path.join(out_dir, names[0]), "w") as fh:
        fh.write(scene.to_json())
    write_png(image, os.path.join(out_dir, names[1]))
    write_field(fld, os.path.join(out_dir, names[2]))
    record = {
        "index": index,
        "scene_file": names[0],
        "image_file": names[1],
        "field_file": names[2],
        "split": split,
    }
    notes = [str(w.message) for w in caught if issubclass(w.category, MultiJunctionWarning)]
    if notes:
        record["warnings"] = notes
    return record


def _record_args(args):
    return _make_record(*args)


def generate(
    seed: int, count: int, train_count: int, spec: SampleSpec, out_dir
) -> DatasetManifest:
    """Produce count records (scene JSON, image PNG, field PVF1) plus a
    manifest; the first train_count indices are the train split.

    POLYFIELD_THREADS caps worker processes (default: machine parallelism);
    per-index seeding keeps the output identical at any worker count.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if not 0 <= train_count <= count:
        raise ValueError("need 0 <= train_count <= count")
    out_dir = os.fspath(out_dir)
    os.makedirs(out_dir, exist_ok=True)

    jobs = [
        (seed, i, spec, out_dir, "train" if i < train_count else "val")
        for i in range(count)
    ]
    threads = int(os.environ.get("POLYFIELD_THREADS", os.cpu_count() or 1))
    if threads > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_record_args, jobs, chunksize=16))
    else:
        records = [_make_record(*j) for j in jobs]

    manifest = DatasetManifest(
        seed, count, train_count, count - train_count, spec, tuple(records)
    )
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest.to_obj(), fh, indent=2)
        fh.write("\n")
    return manifest
