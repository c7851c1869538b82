"""Algebra of 2-PolyVector fields.

A field stores, per pixel, the coefficients (c0, c2) of the quartic
f(z) = z^4 + c2 z^2 + c0 whose roots are the two sign-free directions
{u, v}: c0 = u^2 v^2 and c2 = -(u^2 + v^2) with u = e^{i alpha},
v = e^{i beta}. Directions are half-angles in [0, pi), so every operation
here is invariant to relabeling u/v and to flipping either sign.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .geometry import reduce_half_turn

__all__ = [
    "PolyVectorField",
    "encode",
    "decode",
    "degenerate",
    "rotate_pair",
    "smooth",
    "smoothness_energy",
    "gaussian_kernel",
]

_DEN_FLOOR = 1e-6


@dataclass(frozen=True)
class PolyVectorField:
    """A 4-channel coefficient grid with a definedness mask.

    channels has shape (height, width, 4) ordered
    [Re c0, Im c0, Re c2, Im c2]; mask has shape (height, width).
    Undefined pixels carry zeros in every channel.
    """

    channels: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        ch = np.ascontiguousarray(self.channels, dtype=float)
        m = np.ascontiguousarray(self.mask, dtype=bool)
        if ch.ndim != 3 or ch.shape[2] != 4:
            raise ValueError("channels must have shape (height, width, 4)")
        if m.shape != ch.shape[:2]:
            raise ValueError("mask dimensions must match channels")
        if not np.all(np.isfinite(ch[m])):
            raise ValueError("defined pixels must hold finite coefficients")
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

    def c0(self) -> np.ndarray:
        return self.channels[..., 0] + 1j * self.channels[..., 1]

    def c2(self) -> np.ndarray:
        return self.channels[..., 2] + 1j * self.channels[..., 3]

    @classmethod
    def from_complex(cls, c0, c2, mask) -> "PolyVectorField":
        ch = np.stack([np.real(c0), np.imag(c0), np.real(c2), np.imag(c2)], axis=-1)
        return cls(ch, mask)


def encode(alpha, beta):
    """Coefficients (c0, c2) of the direction pair; broadcasts over arrays.

    c0 = e^{2i(alpha+beta)}, c2 = -(e^{2i alpha} + e^{2i beta}).
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    u2 = np.exp(2j * alpha)
    v2 = np.exp(2j * beta)
    c0 = u2 * v2
    c2 = -(u2 + v2)
    if alpha.ndim == 0 and beta.ndim == 0:
        return complex(c0), complex(c2)
    return c0, c2


def decode(c0, c2):
    """Direction pair (alpha, beta) with alpha <= beta, both in [0, pi).

    Solves w^2 + c2 w + c0 = 0 for w in {u^2, v^2} by the stable
    quadratic formula: the sqrt branch is flipped to avoid cancellation,
    the larger-magnitude root is computed first and the other recovered
    as c0 / w. c0 = c2 = 0 decodes to the degenerate pair (0, 0).
    """
    c0 = np.asarray(c0, dtype=complex)
    c2 = np.asarray(c2, dtype=complex)
    scalar = c0.ndim == 0 and c2.ndim == 0
    c0, c2 = np.broadcast_arrays(np.atleast_1d(c0), np.atleast_1d(c2))

    disc = np.sqrt(c2 * c2 - 4.0 * c0)
    flip = np.real(np.conj(c2) * disc) < 0.0
    disc = np.where(flip, -disc, disc)
    w1 = -0.5 * (c2 + disc)
    big = np.abs(w1) > 1e-12
    w2 = np.where(big, c0 / np.where(big, w1, 1.0), -0.5 * (c2 - disc))

    a1 = reduce_half_turn(0.5 * np.angle(w1))
    a2 = reduce_half_turn(0.5 * np.angle(w2))
    zero = (np.abs(c0) == 0.0) & (np.abs(c2) == 0.0)
    a1 = np.where(zero, 0.0, a1)
    a2 = np.where(zero, 0.0, a2)
    alpha = np.minimum(a1, a2)
    beta = np.maximum(a1, a2)
    if scalar:
        return float(alpha[0]), float(beta[0])
    return alpha, beta


def degenerate(c0, c2, tol: float = 0.0):
    """True where the coefficients collapse to the all-zero quartic."""
    d = (np.abs(np.asarray(c0)) <= tol) & (np.abs(np.asarray(c2)) <= tol)
    if d.ndim == 0:
        return bool(d)
    return d


def rotate_pair(alpha, beta, theta):
    """Advance both directions by theta and re-canonicalize."""
    a = reduce_half_turn(np.asarray(alpha, dtype=float) + theta)
    b = reduce_half_turn(np.asarray(beta, dtype=float) + theta)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    if np.ndim(alpha) == 0 and np.ndim(beta) == 0:
        return float(lo), float(hi)
    return lo, hi


def gaussian_kernel(sigma: float) -> np.ndarray:
    """1D Gaussian truncated at radius ceil(3*sigma), renormalized to sum 1."""
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    radius = int(np.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=float)
    g = np.exp(-0.5 * (x / sigma) ** 2)
    return g / g.sum()


def smooth(field: PolyVectorField, sigma: float) -> PolyVectorField:
    """Masked normalized Gaussian blur of each channel.

    Each channel is convolved as num = G*(channel*mask), den = G*mask,
    output = num/den. The mask is never enlarged; a pixel is kept only
    where it was defined and den stays above 1e-6 (an average of defined
    neighbors, so constants pass through unchanged).
    """
    g = gaussian_kernel(sigma)

    def blur(img):
        tmp = correlate1d(img, g, axis=0, mode="constant", cval=0.0)
        return correlate1d(tmp, g, axis=1, mode="constant", cval=0.0)

    m = field.mask.astype(float)
    den = blur(m)
    keep = field.mask & (den >= _DEN_FLOOR)
    safe = np.where(den >= _DEN_FLOOR, den, 1.0)
    out = np.empty_like(field.channels)
    for k in range(4):
        out[..., k] = np.where(keep, blur(field.channels[..., k] * m) / safe, 0.0)
    return PolyVectorField(out, keep)


def smoothness_energy(field: PolyVectorField) -> float:
    """Sum over pixels and k in {0, 2} of |grad c_k|^2, where grad c_k at a
    pixel is the forward difference to the right neighbor plus the forward
    difference to the bottom neighbor, each included only when both pixels
    involved are defined."""
    m = field.mask
    total = 0.0
    for c in (field.c0(), field.c2()):
        g = np.zeros_like(c)
        right_ok = m[:, :-1] & m[:, 1:]
        g[:, :-1] += np.where(right_ok, c[:, 1:] - c[:, :-1], 0.0)
        down_ok = m[:-1, :] & m[1:, :]
        g[:-1, :] += np.where(down_ok, c[1:, :] - c[:-1, :], 0.0)
        total += float(np.sum(g.real**2 + g.imag**2))
    return total
