"""Readers and writers for the dataset files the generator leaves on disk.

The training side deliberately shares no code with the generator; the
PVF1 byte layout, the grayscale PNGs, and the manifest JSON are the whole
contract between the two. Everything here parses those three formats from
scratch so a regression in either codebase shows up as a format mismatch
instead of silently cancelling out.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FieldFormatError",
    "FieldFile",
    "Manifest",
    "read_field",
    "write_field",
    "read_image",
]

_MAGIC = b"PVF1"


class FieldFormatError(ValueError):
    """Malformed PVF1 payload; offset is the failing byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class FieldFile:
    """One field as stored on disk: float32 channels (height, width, 4)
    ordered [Re c0, Im c0, Re c2, Im c2], boolean mask (height, width).
    Undefined pixels carry zeros."""

    channels: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        ch = np.ascontiguousarray(self.channels, dtype=np.float32)
        m = np.ascontiguousarray(self.mask, dtype=bool)
        if ch.ndim != 3 or ch.shape[2] != 4:
            raise ValueError("channels must have shape (height, width, 4)")
        if m.shape != ch.shape[:2]:
            raise ValueError("mask dimensions must match channels")
        ch = ch.copy()
        ch[~m] = 0.0
        ch.flags.writeable = False
        m.flags.writeable = False
        object.__setattr__(self, "channels", ch)
        object.__setattr__(self, "mask", m)

    @property
    def height(self) -> int:
        return self.channels.shape[0]

    @property
    def width(self) -> int:
        return self.channels.shape[1]


def read_field(path) -> FieldFile:
    """Parse a PVF1 file: magic, uint32 height/width/channels(=4), then
    height*width mask bytes (0/1 row-major), then float32 channel data
    interleaved per pixel; little-endian throughout."""
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
    chans = np.frombuffer(data, dtype="<f4", count=h * w * 4, offset=16 + h * w).reshape(
        h, w, 4
    )
    return FieldFile(chans, m)


def write_field(field: FieldFile, path) -> None:
    """Serialize back to the same PVF1 layout read_field parses."""
    payload = (
        _MAGIC
        + struct.pack("<III", field.height, field.width, 4)
        + field.mask.astype(np.uint8).tobytes()
        + field.channels.astype("<f4").tobytes()
    )
    with open(path, "wb") as fh:
        fh.write(payload)


def read_image(path) -> np.ndarray:
    """Grayscale PNG to float32 intensities in [0, 1], shape (height, width)."""
    from PIL import Image

    with Image.open(path) as im:
        return np.asarray(im.convert("L"), dtype=np.float32) / 255.0


@dataclass(frozen=True)
class Manifest:
    """The generator's manifest.json plus the directory it lives in.

    Records keep their raw dict form; the accessors below resolve the file
    names they carry against the dataset directory. threshold is the ink
    cutoff the generator used, needed to reproduce masks for predictions.
    """

    root: str
    seed: int
    count: int
    train_count: int
    val_count: int
    threshold: float
    records: tuple[dict, ...]

    @classmethod
    def load(cls, path) -> "Manifest":
        path = os.fspath(path)
        with open(path) as fh:
            obj = json.load(fh)
        fp = obj.get("spec", {}).get("field_params", {})
        return cls(
            root=os.path.dirname(os.path.abspath(path)),
            seed=int(obj["seed"]),
            count=int(obj["count"]),
            train_count=int(obj["train_count"]),
            val_count=int(obj["val_count"]),
            threshold=float(fp.get("threshold", 0.5)),
            records=tuple(obj["records"]),
        )

    def split(self, name: str) -> tuple[dict, ...]:
        return tuple(r for r in self.records if r["split"] == name)

    def image_path(self, record: dict) -> str:
        return os.path.join(self.root, record["image_file"])

    def field_path(self, record: dict) -> str:
        return os.path.join(self.root, record["field_file"])
