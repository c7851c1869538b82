"""Fitting loops, checkpointing, and prediction export.

Two entry points share one optimization core: train_single overfits one
record to probe expressive power, train_dataset runs minibatch epochs
over a generated dataset. Both log the alignment and regularized loss of
every optimizer step, in the same units the generator's evaluator
reports, so curves from either path can be read against its numbers.
Determinism is owned by the seed: it pins parameter initialization and
the epoch shuffles, and training runs single-process, so a rerun
reproduces the loss trace bit for bit on one machine.
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass

import numpy as np
import torch

from .fieldio import FieldFile, Manifest, read_field, read_image, write_field
from .losses import EvalReport, combined_differences, masked_terms
from .model import UNet, UNetConfig, build_model

__all__ = [
    "TrainConfig",
    "TrainCurves",
    "DivergenceError",
    "train_single",
    "train_dataset",
    "predict",
    "load_checkpoint",
]


class DivergenceError(RuntimeError):
    """Training hit a non-finite loss; iteration is the failing step."""

    def __init__(self, iteration: int):
        super().__init__(f"non-finite loss at iteration {iteration}")
        self.iteration = iteration


@dataclass(frozen=True)
class TrainConfig:
    """Optimization knobs shared by both fitting paths.

    steps counts optimizer iterations when fitting a single record and
    full passes over the training split when fitting a dataset. The two
    mask toggles select where alignment and smoothness are evaluated;
    the defaults align on defined pixels only and smooth everywhere.
    """

    gamma: float = 0.1
    steps: int = 50
    lr: float = 1e-3
    batch_size: int = 16
    seed: int = 0
    align_on_mask: bool = True
    smooth_on_mask: bool = False

    def __post_init__(self):
        if self.gamma < 0.0:
            raise ValueError("gamma must be >= 0")
        if self.steps < 1 or self.batch_size < 1:
            raise ValueError("steps and batch_size must be positive")
        if self.lr <= 0.0:
            raise ValueError("learning rate must be positive")


@dataclass(frozen=True)
class TrainCurves:
    """Per-iteration loss trace; values are taken before each update."""

    mse: tuple[float, ...]
    regularized: tuple[float, ...]

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("iter,mse,regularized\n")
            for i, (m, r) in enumerate(zip(self.mse, self.regularized)):
                fh.write(f"{i},{m!r},{r!r}\n")


def _field_tensors(field: FieldFile) -> tuple[torch.Tensor, torch.Tensor]:
    gt = torch.from_numpy(np.transpose(field.channels, (2, 0, 1)).copy())
    return gt, torch.from_numpy(field.mask.copy())


def _step(model, optimizer, images, gts, masks, config, iteration):
    pred = model(images)
    align, loss = masked_terms(
        pred, gts, masks, config.gamma, config.align_on_mask, config.smooth_on_mask
    )
    m, r = float(align.detach()), float(loss.detach())
    if not (math.isfinite(m) and math.isfinite(r)):
        raise DivergenceError(iteration)
    optimizer.zero_grad()
    loss.backward()
    optimizer.step()
    return m, r


def _calibrate_norm(model, images) -> None:
    """Overwrite batch-norm running statistics with the statistics of the
    given batch, matching train-mode arithmetic exactly.

    Single-record overfitting never feeds the running estimates enough
    batches to converge, so eval-mode output would lag the function the
    optimizer actually minimized. One momentum-1 pass pins the running
    mean and variance to this batch; the variance is then rescaled from
    the unbiased estimate the update stores to the biased one train-mode
    normalization uses, which matters at the small spatial sizes deep in
    the network."""
    sizes: dict[int, int] = {}
    hooks = [
        m.register_forward_pre_hook(
            lambda mod, inp: sizes.__setitem__(id(mod), inp[0].numel() // inp[0].shape[1])
        )
        for m in model.modules()
        if isinstance(m, torch.nn.BatchNorm2d)
    ]
    saved = [
        (m, m.momentum) for m in model.modules() if isinstance(m, torch.nn.BatchNorm2d)
    ]
    was_training = model.training
    model.train()
    for m, _ in saved:
        m.momentum = 1.0
    with torch.no_grad():
        model(images)
    for hook in hooks:
        hook.remove()
    for m, momentum in saved:
        m.momentum = momentum
        n = sizes[id(m)]
        if n > 1:
            m.running_var.mul_((n - 1) / n)
    model.train(was_training)


def _evaluate(model, images, gts, masks, config) -> EvalReport:
    """Pooled evaluation: squared error and smoothness energy are summed
    over the whole set, then normalized by the total defined-pixel count,
    so a one-record set reduces to the generator's per-pair report."""
    was_training = model.training
    model.eval()
    sq = 0.0
    sm = 0.0
    count = 0
    with torch.no_grad():
        for lo in range(0, images.shape[0], config.batch_size):
            img = images[lo : lo + config.batch_size]
            gt = gts[lo : lo + config.batch_size]
            mask = masks[lo : lo + config.batch_size]
            pred = model(img)
            diff2 = (pred - gt) ** 2 * mask.unsqueeze(1).to(pred.dtype)
            sq += float(diff2.sum())
            grad = combined_differences(pred, mask if config.smooth_on_mask else None)
            sm += float(grad.pow(2).sum())
            count += int(mask.sum())
    model.train(was_training)
    if count == 0:
        raise ValueError("evaluation set has no defined pixels")
    mse = sq / (count * 4)
    return EvalReport(mse, sm, mse + config.gamma * sm / count, config.gamma, count)


def train_single(
    image: np.ndarray,
    field: FieldFile,
    config: TrainConfig,
    out_dir=None,
    net: UNetConfig = UNetConfig(),
) -> tuple[UNet, TrainCurves, EvalReport]:
    """Overfit one record for config.steps iterations.

    Returns the trained model, the loss trace, and an evaluation of the
    final prediction against the record's field. Normalization statistics
    are pinned to the record before that evaluation, so eval-mode output
    is the function the optimizer minimized. With out_dir set, the trace
    lands in curves.csv and the evaluation in report.json there.
    """
    if image.shape != field.mask.shape:
        raise ValueError("image and field dimensions differ")
    net.check_size(*image.shape)
    images = torch.from_numpy(np.asarray(image, dtype=np.float32)).reshape(
        1, 1, *image.shape
    )
    gt, mask = _field_tensors(field)
    gts, masks = gt.unsqueeze(0), mask.unsqueeze(0)

    model = build_model(net, seed=config.seed)
    model.train()
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr)
    mses, regs = [], []
    for it in range(config.steps):
        m, r = _step(model, optimizer, images, gts, masks, config, it)
        mses.append(m)
        regs.append(r)

    curves = TrainCurves(tuple(mses), tuple(regs))
    _calibrate_norm(model, images)
    report = _evaluate(model, images, gts, masks, config)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        curves.write_csv(os.path.join(out_dir, "curves.csv"))
        with open(os.path.join(out_dir, "report.json"), "w") as fh:
            fh.write(report.to_json() + "\n")
    return model, curves, report


def _load_split(manifest: Manifest, name: str):
    records = manifest.split(name)
    if not records:
        raise ValueError(f"manifest has no {name} records")
    images, gts, masks = [], [], []
    shape = None
    for rec in records:
        img = read_image(manifest.image_path(rec))
        fld = read_field(manifest.field_path(rec))
        if img.shape != fld.mask.shape:
            raise ValueError(f"record {rec['index']}: image and field dimensions differ")
        if shape is None:
            shape = img.shape
        elif img.shape != shape:
            raise ValueError(f"record {rec['index']}: mixed record sizes in one split")
        images.append(torch.from_numpy(img))
        gt, mask = _field_tensors(fld)
        gts.append(gt)
        masks.append(mask)
    return torch.stack(images).unsqueeze(1), torch.stack(gts), torch.stack(masks)


def train_dataset(
    manifest: Manifest,
    config: TrainConfig,
    out_dir,
    net: UNetConfig = UNetConfig(),
) -> tuple[UNet, TrainCurves, EvalReport]:
    """Minibatch training over the manifest's train split for config.steps
    epochs, then a pooled evaluation over the val split.

    out_dir receives curves.csv, val_report.json, and checkpoint.pt; the
    checkpoint stores the network and optimization settings alongside the
    weights so it can be rebuilt without the original call site.
    """
    tr_images, tr_gts, tr_masks = _load_split(manifest, "train")
    va_images, va_gts, va_masks = _load_split(manifest, "val")
    net.check_size(tr_images.shape[2], tr_images.shape[3])

    model = build_model(net, seed=config.seed)
    model.train()
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr)
    shuffle = np.random.Generator(np.random.PCG64(config.seed))
    n = tr_images.shape[0]
    mses, regs = [], []
    for _ in range(config.steps):
        order = shuffle.permutation(n)
        for lo in range(0, n, config.batch_size):
            pick = torch.from_numpy(order[lo : lo + config.batch_size])
            m, r = _step(
                model,
                optimizer,
                tr_images[pick],
                tr_gts[pick],
                tr_masks[pick],
                config,
                len(mses),
            )
            mses.append(m)
            regs.append(r)

    curves = TrainCurves(tuple(mses), tuple(regs))
    report = _evaluate(model, va_images, va_gts, va_masks, config)

    os.makedirs(out_dir, exist_ok=True)
    curves.write_csv(os.path.join(out_dir, "curves.csv"))
    with open(os.path.join(out_dir, "val_report.json"), "w") as fh:
        fh.write(report.to_json() + "\n")
    torch.save(
        {
            "model_state": model.state_dict(),
            "meta": {
                "network": asdict(net),
                "training": asdict(config),
                "optimizer": "adam",
            },
        },
        os.path.join(out_dir, "checkpoint.pt"),
    )
    return model, curves, report


def load_checkpoint(path) -> tuple[UNet, dict]:
    """Rebuild a trained model from checkpoint.pt; returns (model, meta)."""
    payload = torch.load(path, map_location="cpu", weights_only=True)
    meta = payload["meta"]
    model = UNet(UNetConfig(**meta["network"]))
    model.load_state_dict(payload["model_state"])
    model.eval()
    return model, meta


def predict(
    model: UNet,
    image: np.ndarray,
    out_path=None,
    threshold: float = 0.5,
) -> FieldFile:
    """Run the model on one drawing and package the output as a field.

    The mask is the image thresholded the same way the generator
    thresholds ink, so the file slots into downstream evaluation; with
    out_path set the field is also serialized there.
    """
    arr = np.asarray(image, dtype=np.float32)
    was_training = model.training
    model.eval()
    with torch.no_grad():
        pred = model(torch.from_numpy(arr).reshape(1, 1, *arr.shape))
    model.train(was_training)
    channels = np.transpose(pred[0].numpy(), (1, 2, 0))
    field = FieldFile(channels, arr >= threshold)
    if out_path is not None:
        write_field(field, out_path)
    return field
