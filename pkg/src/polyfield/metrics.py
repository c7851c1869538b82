"""Evaluation quantities for predicted fields against ground truth.

All comparisons run on the ground truth's defined mask; predictions over
background pixels are ignored. mse averages over defined pixels times 4
channels; the regularized value adds gamma times the per-defined-pixel
mean of the prediction's smoothness energy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .polyvector import PolyVectorField, smoothness_energy
from .raster import RasterImage

__all__ = ["EvalReport", "mse", "regularized_loss", "error_heatmap"]


@dataclass(frozen=True)
class EvalReport:
    mse: float
    smoothness: float
    regularized: float
    gamma: float
    defined_pixels: int

    def to_obj(self) -> dict:
        return {
            "mse": self.mse,
            "smoothness": self.smoothness,
            "regularized": self.regularized,
            "gamma": self.gamma,
            "defined_pixels": self.defined_pixels,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_obj())

    @classmethod
    def from_obj(cls, obj: dict) -> "EvalReport":
        return cls(
            float(obj["mse"]),
            float(obj["smoothness"]),
            float(obj["regularized"]),
            float(obj["gamma"]),
            int(obj["defined_pixels"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        return cls.from_obj(json.loads(text))


def _check(pred: PolyVectorField, gt: PolyVectorField):
    if pred.channels.shape != gt.channels.shape:
        raise ValueError("field dimensions differ")
    if not np.any(gt.mask):
        raise ValueError("ground truth has no defined pixels")


def mse(pred: PolyVectorField, gt: PolyVectorField) -> float:
    """Mean squared channel difference over gt's defined pixels x 4."""
    _check(pred, gt)
    diff = (pred.channels - gt.channels)[gt.mask]
    return float(np.mean(diff * diff))


def regularized_loss(pred: PolyVectorField, gt: PolyVectorField, gamma: float) -> EvalReport:
    """Alignment mse plus gamma times the per-pixel smoothness mean.

    The smoothness field of the report keeps the raw energy sum so either
    normalization can be recovered.
    """
    _check(pred, gt)
    m = mse(pred, gt)
    sm = smoothness_energy(pred)
    count = int(np.count_nonzero(gt.mask))
    return EvalReport(m, sm, m + gamma * sm / count, gamma, count)


def error_heatmap(pred: PolyVectorField, gt: PolyVectorField) -> RasterImage:
    """Per-pixel squared error over the 4 channels, rescaled to [0, 1] by
    its maximum; zero off the ground-truth mask."""
    _check(pred, gt)
    diff = pred.channels - gt.channels
    err = np.where(gt.mask, np.sum(diff * diff, axis=-1), 0.0)
    top = float(err.max())
    if top > 0.0:
        err = err / top
    return RasterImage(gt.width, gt.height, err)
