"""Encoder/decoder network mapping a grayscale drawing to field coefficients.

The shape follows the classic segmentation U: stages of two 3x3
convolutions with batch norm and ReLU, max pooling on the way down, a
nearest-neighbor upsample followed by a convolution on the way up, and
skip concatenation between mirrored stages. The classifier head is
replaced by a linear 1x1 convolution with four output channels, one per
coefficient component, so the network regresses rather than labels.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

__all__ = ["UNetConfig", "UNet", "build_model"]


@dataclass(frozen=True)
class UNetConfig:
    """Network shape knobs. Spatial inputs must be divisible by 2**depth."""

    depth: int = 4
    base_channels: int = 64
    in_channels: int = 1
    out_channels: int = 4

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if min(self.base_channels, self.in_channels, self.out_channels) < 1:
            raise ValueError("channel counts must be positive")

    def check_size(self, height: int, width: int) -> None:
        step = 1 << self.depth
        if height % step or width % step:
            raise ValueError(
                f"input {height}x{width} is not divisible by 2^depth = {step}"
            )


def _stage(cin: int, cout: int) -> nn.Sequential:
    # bias folds into the following batch norm, so the convolutions skip it
    return nn.Sequential(
        nn.Conv2d(cin, cout, 3, padding=1, bias=False),
        nn.BatchNorm2d(cout),
        nn.ReLU(inplace=True),
        nn.Conv2d(cout, cout, 3, padding=1, bias=False),
        nn.BatchNorm2d(cout),
        nn.ReLU(inplace=True),
    )


class UNet(nn.Module):
    def __init__(self, config: UNetConfig):
        super().__init__()
        self.config = config
        widths = [config.base_channels << i for i in range(config.depth)]

        self.encoders = nn.ModuleList()
        cin = config.in_channels
        for w in widths:
            self.encoders.append(_stage(cin, w))
            cin = w
        self.pool = nn.MaxPool2d(2)
        self.bottleneck = _stage(widths[-1], widths[-1] * 2)

        self.upsamplers = nn.ModuleList()
        self.decoders = nn.ModuleList()
        cin = widths[-1] * 2
        for w in reversed(widths):
            self.upsamplers.append(
                nn.Sequential(
                    nn.Upsample(scale_factor=2, mode="nearest"),
                    nn.Conv2d(cin, w, 3, padding=1),
                )
            )
            self.decoders.append(_stage(2 * w, w))
            cin = w
        self.head = nn.Conv2d(widths[0], config.out_channels, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.ndim != 4 or x.shape[1] != self.config.in_channels:
            raise ValueError(
                f"expected (batch, {self.config.in_channels}, height, width) input"
            )
        self.config.check_size(x.shape[2], x.shape[3])
        skips = []
        for encode in self.encoders:
            x = encode(x)
            skips.append(x)
            x = self.pool(x)
        x = self.bottleneck(x)
        for upsample, decode, skip in zip(self.upsamplers, self.decoders, reversed(skips)):
            x = upsample(x)
            x = decode(torch.cat([skip, x], dim=1))
        return self.head(x)


def build_model(config: UNetConfig, seed: int | None = None) -> UNet:
    """Construct a U-Net; a given seed pins the parameter initialization
    without disturbing the caller's global RNG state."""
    if seed is None:
        return UNet(config)
    with torch.random.fork_rng():
        torch.manual_seed(seed)
        return UNet(config)
