"""Training objective over batches of masked coefficient grids.

The objective mirrors the evaluation loss the field generator reports:
alignment is the mean squared channel difference over a record's defined
pixels times 4 channels, and the smoothness penalty divides the raw
energy sum by the same defined-pixel count. Alignment is restricted to
the mask by default while smoothness covers the whole prediction grid,
which pushes the network toward fields that extrapolate smoothly into the
background; both restrictions can be toggled. A batch is reduced as the
mean of per-element losses, skipping (with a warning) any element whose
mask is empty, since an empty mask leaves both terms undefined.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import torch
import torch.nn.functional as F

__all__ = ["EvalReport", "masked_terms", "masked_loss", "combined_differences"]


@dataclass(frozen=True)
class EvalReport:
    """Evaluation summary; to_json matches the generator's report schema."""

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


def combined_differences(channels: torch.Tensor, mask: torch.Tensor | None = None) -> torch.Tensor:
    """Per-pixel gradient proxy: forward difference to the right neighbor
    plus forward difference to the bottom neighbor, summed into the
    upper-left pixel of each pair. With a mask, a difference contributes
    only when both pixels involved are defined.

    channels is (batch, c, height, width); the result has the same shape.
    """
    right = channels[..., :, 1:] - channels[..., :, :-1]
    down = channels[..., 1:, :] - channels[..., :-1, :]
    if mask is not None:
        m = mask.unsqueeze(1)
        right = right * (m[..., :, 1:] & m[..., :, :-1]).to(channels.dtype)
        down = down * (m[..., 1:, :] & m[..., :-1, :]).to(channels.dtype)
    # zero-pad the lost column/row back so both terms land on (h, w)
    return F.pad(right, (0, 1)) + F.pad(down, (0, 0, 0, 1))


def masked_terms(
    pred: torch.Tensor,
    gt: torch.Tensor,
    mask: torch.Tensor,
    gamma: float,
    align_on_mask: bool = True,
    smooth_on_mask: bool = False,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Alignment and regularized scalars for a batch, both differentiable.

    pred and gt are (batch, 4, height, width), mask is a boolean
    (batch, height, width). Returns (alignment, alignment + gamma *
    smoothness / defined count), each averaged over the batch elements
    with a nonempty mask.
    """
    if pred.ndim != 4 or pred.shape != gt.shape:
        raise ValueError("pred and gt must share a (batch, 4, height, width) shape")
    if mask.shape != (pred.shape[0], pred.shape[2], pred.shape[3]):
        raise ValueError("mask must be (batch, height, width)")
    counts = mask.reshape(mask.shape[0], -1).sum(dim=1)
    keep = counts > 0
    if not bool(keep.any()):
        raise ValueError("every batch element has an empty mask")
    if not bool(keep.all()):
        skipped = int((~keep).sum())
        warnings.warn(f"skipping {skipped} batch element(s) with an empty mask")
    safe = counts.clamp(min=1).to(pred.dtype)

    diff2 = (pred - gt) ** 2
    if align_on_mask:
        weighted = diff2 * mask.unsqueeze(1).to(pred.dtype)
        align = weighted.reshape(pred.shape[0], -1).sum(dim=1) / (safe * pred.shape[1])
    else:
        align = diff2.reshape(pred.shape[0], -1).mean(dim=1)

    grad = combined_differences(pred, mask if smooth_on_mask else None)
    smooth = grad.reshape(pred.shape[0], -1).pow(2).sum(dim=1)

    regularized = align + gamma * smooth / safe
    return align[keep].mean(), regularized[keep].mean()


def masked_loss(
    pred: torch.Tensor,
    gt: torch.Tensor,
    mask: torch.Tensor,
    gamma: float,
    align_on_mask: bool = True,
    smooth_on_mask: bool = False,
) -> torch.Tensor:
    """The scalar training objective; see masked_terms for the convention."""
    return masked_terms(pred, gt, mask, gamma, align_on_mask, smooth_on_mask)[1]
