"""U-Net regression onto direction-field coefficient grids.

Consumes datasets written by the field generator (manifest JSON, PVF1
fields, grayscale PNGs) purely through their on-disk formats and trains
a dense per-pixel regressor against them.
"""

from .fieldio import (
    FieldFile,
    FieldFormatError,
    Manifest,
    read_field,
    read_image,
    write_field,
)
from .losses import EvalReport, combined_differences, masked_loss, masked_terms
from .model import UNet, UNetConfig, build_model
from .training import (
    DivergenceError,
    TrainConfig,
    TrainCurves,
    load_checkpoint,
    predict,
    train_dataset,
    train_single,
)

__all__ = [
    "FieldFile",
    "FieldFormatError",
    "Manifest",
    "read_field",
    "read_image",
    "write_field",
    "EvalReport",
    "combined_differences",
    "masked_loss",
    "masked_terms",
    "UNet",
    "UNetConfig",
    "build_model",
    "DivergenceError",
    "TrainConfig",
    "TrainCurves",
    "load_checkpoint",
    "predict",
    "train_dataset",
    "train_single",
]
