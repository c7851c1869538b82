"""File format parsing against files the generator actually wrote."""

import struct

import numpy as np
import pytest

from trainer import FieldFile, FieldFormatError, Manifest, read_field, read_image, write_field


def make_field(rng, h=5, w=7):
    channels = rng.normal(size=(h, w, 4)).astype(np.float32)
    mask = rng.random((h, w)) < 0.6
    return FieldFile(channels, mask)


def test_round_trip_is_exact(tmp_path):
    field = make_field(np.random.default_rng(3))
    path = tmp_path / "f.pvf"
    write_field(field, path)
    back = read_field(path)
    assert back.channels.dtype == np.float32
    assert np.array_equal(back.mask, field.mask)
    assert np.array_equal(back.channels, field.channels)


def test_undefined_pixels_store_zeros(tmp_path):
    rng = np.random.default_rng(4)
    channels = rng.normal(size=(3, 3, 4)).astype(np.float32)
    mask = np.zeros((3, 3), dtype=bool)
    mask[1, 1] = True
    field = FieldFile(channels, mask)
    assert np.all(field.channels[~mask] == 0.0)
    path = tmp_path / "f.pvf"
    write_field(field, path)
    raw = np.frombuffer(path.read_bytes()[16 + 9 :], dtype="<f4").reshape(3, 3, 4)
    assert np.all(raw[~mask] == 0.0)
    assert np.array_equal(raw[1, 1], channels[1, 1])


def test_empty_file_layout(tmp_path):
    field = FieldFile(np.zeros((4, 4, 4), dtype=np.float32), np.zeros((4, 4), dtype=bool))
    path = tmp_path / "empty.pvf"
    write_field(field, path)
    assert path.stat().st_size == 16 + 16 + 16 * 16


def write_raw(tmp_path, data):
    path = tmp_path / "bad.pvf"
    path.write_bytes(data)
    return path


def valid_bytes(h=2, w=2):
    mask = bytes([1] * (h * w))
    chans = np.zeros(h * w * 4, dtype="<f4").tobytes()
    return b"PVF1" + struct.pack("<III", h, w, 4) + mask + chans


@pytest.mark.parametrize(
    "mutate,offset",
    [
        (lambda d: b"XVF1" + d[4:], 0),
        (lambda d: d[:10], 10),
        (lambda d: d[:12] + struct.pack("<I", 3) + d[16:], 12),
        (lambda d: d[:4] + struct.pack("<III", 0, 2, 4) + d[16:], 4),
        (lambda d: d[:-1], None),
        (lambda d: d[:17] + b"\x02" + d[18:], 17),
    ],
)
def test_format_errors_carry_offsets(tmp_path, mutate, offset):
    data = mutate(valid_bytes())
    with pytest.raises(FieldFormatError) as err:
        read_field(write_raw(tmp_path, data))
    if offset is not None:
        assert err.value.offset == offset
    else:
        assert err.value.offset == len(data)


def test_fieldfile_validates_shapes():
    with pytest.raises(ValueError):
        FieldFile(np.zeros((3, 3, 2)), np.zeros((3, 3), dtype=bool))
    with pytest.raises(ValueError):
        FieldFile(np.zeros((3, 3, 4)), np.zeros((2, 3), dtype=bool))


def test_generated_records_parse(small_dataset):
    for rec in small_dataset.records:
        image = read_image(small_dataset.image_path(rec))
        field = read_field(small_dataset.field_path(rec))
        assert image.dtype == np.float32
        assert image.shape == field.mask.shape
        assert 0.0 <= image.min() and image.max() <= 1.0
        assert field.mask.any()
        assert np.isfinite(field.channels).all()


def test_mask_matches_thresholded_image(small_dataset):
    # the generator derives the field mask by thresholding the drawing, and
    # the PNG quantization is designed not to move pixels across the cutoff
    for rec in small_dataset.records:
        image = read_image(small_dataset.image_path(rec))
        field = read_field(small_dataset.field_path(rec))
        assert np.array_equal(field.mask, image >= small_dataset.threshold)


def test_manifest_fields(small_dataset):
    assert small_dataset.seed == 77
    assert small_dataset.count == 6
    assert small_dataset.train_count == 4
    assert small_dataset.val_count == 2
    assert small_dataset.threshold == 0.5
    assert len(small_dataset.split("train")) == 4
    assert len(small_dataset.split("val")) == 2
    splits = [r["split"] for r in small_dataset.records]
    assert splits == ["train"] * 4 + ["val"] * 2


def test_manifest_paths_resolve(small_dataset):
    rec = small_dataset.records[0]
    assert small_dataset.image_path(rec).endswith(rec["image_file"])
    assert small_dataset.field_path(rec).startswith(small_dataset.root)
