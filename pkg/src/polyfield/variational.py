"""Variational field recovery from a raster image alone.

The target directions come from a Sobel gradient estimate (tangent =
gradient rotated a quarter turn); the solver then minimizes

    E(c) = sum_p w_p |c(p) - c*(p)|^2 + gamma * smoothness_energy(c)

over the 4 real coefficient channels of the masked pixels. E is convex
quadratic, so the minimizer solves (W + gamma D^T D) x = W t; we run a
preconditioned conjugate gradient on the four channels in lockstep and
keep the per-iteration energy trace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate

from .polyvector import PolyVectorField, encode, smooth, smoothness_energy
from .raster import RasterImage, mask

__all__ = [
    "SolveConfig",
    "SolveResult",
    "sobel_tangent",
    "build_target",
    "energy",
    "energy_gradient",
    "solve",
]

_SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
_CONFIDENCE_FLOOR = 1e-6
_GRAD_TOL = 1e-6


@dataclass(frozen=True)
class SolveConfig:
    gamma: float = 0.1
    max_iters: int = 500
    tol: float = 1e-8
    threshold: float = 0.5
    sigma: float = 1.0

    def __post_init__(self):
        if self.gamma < 0.0:
            raise ValueError("gamma must be non-negative")
        if self.max_iters < 1:
            raise ValueError("need at least one iteration")
        if self.tol <= 0.0:
            raise ValueError("tolerance must be positive")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if self.sigma < 0.0:
            raise ValueError("sigma must be >= 0")


@dataclass(frozen=True)
class SolveResult:
    """Solver output: the field, the energy at every iterate (index 0 is
    the initial guess), and the final gradient norm."""

    field: PolyVectorField
    energies: tuple[float, ...]
    gradient_norm: float

    @property
    def iterations(self) -> int:
        return len(self.energies) - 1


def sobel_tangent(image: RasterImage):
    """Per-pixel tangent angles in [0, pi) plus a confidence mask.

    Gradient via the 3x3 Sobel pair with replicate borders; the tangent
    is the gradient rotated by pi/2. Pixels with |g| < 1e-6 have no
    usable direction and come back flagged unconfident.
    """
    gx = correlate(image.pixels, _SOBEL_X, mode="nearest")
    gy = correlate(image.pixels, _SOBEL_X.T, mode="nearest")
    norm = np.hypot(gx, gy)
    confident = norm >= _CONFIDENCE_FLOOR
    angles = np.mod(np.arctan2(gy, gx) + np.pi / 2.0, np.pi)
    angles = np.where(angles >= np.pi, angles - np.pi, angles)
    return angles, confident


def build_target(image: RasterImage, config: SolveConfig):
    """Alignment target for the solver: (field, weights).

    Confident masked pixels carry encode(tangent, tangent + pi/2) and
    weight 1; unconfident masked pixels weight 0 (smoothness fills them
    in). A positive config.sigma blurs the target within its own mask,
    mirroring the ground-truth pipeline.
    """
    m = mask(image, config.threshold)
    angles, confident = sobel_tangent(image)
    support = m & confident
    alpha = np.where(support, angles, 0.0)
    beta = np.mod(alpha + np.pi / 2.0, np.pi)
    c0, c2 = encode(alpha, beta)
    target = PolyVectorField.from_complex(c0, c2, support)
    if config.sigma > 0.0:
        target = smooth(target, config.sigma)
    return target, target.mask.astype(float)


def _neighbor_ok(m: np.ndarray):
    right_ok = m[:, :-1] & m[:, 1:]
    down_ok = m[:-1, :] & m[1:, :]
    return right_ok, down_ok


def _grad_op(x, right_ok, down_ok):
    """Per pixel: forward difference right + forward difference down,
    each only where both pixels are defined. Channels ride along."""
    y = np.zeros_like(x)
    y[:, :-1] += np.where(right_ok[..., None], x[:, 1:] - x[:, :-1], 0.0)
    y[:-1, :] += np.where(down_ok[..., None], x[1:, :] - x[:-1, :], 0.0)
    return y


def _grad_op_t(y, right_ok, down_ok):
    x = np.zeros_like(y)
    ry = np.where(right_ok[..., None], y[:, :-1], 0.0)
    x[:, 1:] += ry
    x[:, :-1] -= ry
    dy = np.where(down_ok[..., None], y[:-1, :], 0.0)
    x[1:, :] += dy
    x[:-1, :] -= dy
    return x


def _check_dims(field: PolyVectorField, target: PolyVectorField, weights):
    if field.channels.shape != target.channels.shape:
        raise ValueError("field and target dimensions differ")
    if np.shape(weights) != field.mask.shape:
        raise ValueError("weight grid dimensions differ")


def energy(field: PolyVectorField, target: PolyVectorField, weights, gamma: float) -> float:
    """E = sum_p w_p |c(p) - c*(p)|^2 + gamma * smoothness_energy(field)."""
    _check_dims(field, target, weights)
    diff = field.channels - target.channels
    align = float(np.sum(np.asarray(weights) * np.sum(diff * diff, axis=-1)))
    return align + gamma * smoothness_energy(field)


def energy_gradient(
    field: PolyVectorField, target: PolyVectorField, weights, gamma: float
) -> np.ndarray:
    """dE/dc per channel, zero at undefined pixels; shape (h, w, 4)."""
    _check_dims(field, target, weights)
    w = np.asarray(weights, dtype=float)
    right_ok, down_ok = _neighbor_ok(field.mask)
    g = 2.0 * w[..., None] * (field.channels - target.channels)
    g = g + 2.0 * gamma * _grad_op_t(
        _grad_op(field.channels, right_ok, down_ok), right_ok, down_ok
    )
    g[~field.mask] = 0.0
    return g


def solve(image: RasterImage, config: SolveConfig = SolveConfig()) -> SolveResult:
    """Minimize the alignment + smoothness energy over the masked pixels.

    Jacobi-preconditioned CG on the normal equations, all 4 channels in
    lockstep; stops once the relative energy decrease drops below
    config.tol and the true gradient norm is at most 1e-6 * (1 + E), or
    at max_iters. The reported energy trace is non-increasing.
    """
    m = mask(image, config.threshold)
    if not np.any(m):
        raise ValueError("thresholded image has no pixels to solve on")
    target, weights = build_target(image, config)
    gamma = config.gamma
    right_ok, down_ok = _neighbor_ok(m)

    def apply_a(x):
        y = weights[..., None] * x
        if gamma > 0.0:
            y = y + gamma * _grad_op_t(_grad_op(x, right_ok, down_ok), right_ok, down_ok)
        return y

    def total_energy(x):
        diff = x - target.channels
        align = float(np.sum(weights[..., None] * diff * diff))
        sm = float(np.sum(_grad_op(x, right_ok, down_ok) ** 2))
        return align + gamma * sm

    # Jacobi diagonal of A = W + gamma D^T D
    own = np.zeros(m.shape)
    own[:, :-1] += right_ok
    own[:-1, :] += down_ok
    touched = np.zeros(m.shape)
    touched[:, 1:] += right_ok
    touched[1:, :] += down_ok
    diag = weights + gamma * (own * own + touched)
    minv = np.where((diag > 1e-30) & m, 1.0 / np.maximum(diag, 1e-30), 0.0)

    b = weights[..., None] * target.channels
    x = target.channels.copy()
    r = b - apply_a(x)
    z = minv[..., None] * r
    p = z.copy()
    rz = np.einsum("ijk,ijk->k", r, z)

    energies = [total_energy(x)]
    grad_norm = 2.0 * float(np.linalg.norm(r))
    restarted = False
    for _ in range(config.max_iters):
        if grad_norm <= _GRAD_TOL * (1.0 + energies[-1]):
            break
        ap = apply_a(p)
        pap = np.einsum("ijk,ijk->k", p, ap)
        ok = pap > 0.0
        alpha = np.where(ok, rz / np.where(ok, pap, 1.0), 0.0)
        x_prev = x
        x = x + alpha * p
        e = total_energy(x)
        if e > energies[-1]:
            # roll back a float-noise uphill step; restart the recurrence
            x = x_prev
            if restarted:
                break
            restarted = True
            r = b - apply_a(x)
            z = minv[..., None] * r
            p = z.copy()
            rz = np.einsum("ijk,ijk->k", r, z)
            grad_norm = 2.0 * float(np.linalg.norm(r))
            continue
        restarted = False
        energies.append(e)
        r = r - alpha * ap
        z = minv[..., None] * r
        rz_new = np.einsum("ijk,ijk->k", r, z)
        beta = np.where(rz > 0.0, rz_new / np.where(rz > 0.0, rz, 1.0), 0.0)
        p = z + beta * p
        rz = rz_new

        rel = (energies[-2] - energies[-1]) / max(energies[-2], 1e-300)
        if rel < config.tol:
            # candidate exit: confirm with the exact residual
            r = b - apply_a(x)
            grad_norm = 2.0 * float(np.linalg.norm(r))
            if grad_norm <= _GRAD_TOL * (1.0 + energies[-1]):
                break
            z = minv[..., None] * r
            p = z.copy()
            rz = np.einsum("ijk,ijk->k", r, z)
        else:
            grad_norm = 2.0 * float(np.linalg.norm(r))

    field = PolyVectorField(np.where(m[..., None], x, 0.0), m)
    return SolveResult(field, tuple(energies), grad_norm)
