"""Analytic ground-truth field construction.

Every pixel above the ink threshold gets a direction pair: alpha is the
tangent of the closest primitive, beta depends on the distance dJ to the
nearest junction involving that primitive:

  dJ <= d_near            tangent of the junction's other curve,
  dJ >= d_far (or none)   the normal alpha + pi/2,
  in between              shortest-arc interpolation of the doubled angle.

Pairs are encoded to (c0, c2) and optionally blurred with the masked
normalized Gaussian.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import (
    Junction,
    Scene,
    closest_point,
    reduce_half_turn,
    scene_junctions,
    tangent_angle,
)
from .polyvector import PolyVectorField, encode, smooth
from .raster import RasterImage, mask, pixel_centers, scene_distances

__all__ = [
    "FieldParams",
    "MultiJunctionWarning",
    "assign_pixel",
    "build_field",
    "multiway_clusters",
]


class MultiJunctionWarning(UserWarning):
    """Three or more primitives meet within the intersection tolerance."""


@dataclass(frozen=True)
class FieldParams:
    """Tunable distances and defaults of the ground-truth pipeline.

    sigma = 0 switches the final smoothing pass off; the junction blend
    runs between d_near and d_far pixels from a junction.
    """

    d_near: float = 2.0
    d_far: float = 6.0
    sigma: float = 1.0
    threshold: float = 0.5
    stroke_width: float = 1.5
    intersection_tol: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.d_near < self.d_far:
            raise ValueError("need 0 < d_near < d_far")
        if self.sigma < 0.0:
            raise ValueError("sigma must be >= 0")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if not 0.0 < self.stroke_width <= 4.0:
            raise ValueError("stroke width must lie in (0, 4]")
        if self.intersection_tol <= 0.0:
            raise ValueError("intersection tolerance must be positive")


def _junction_tables(scene: Scene, junctions: list[Junction]):
    """Per primitive index: junction points and the other curve's tangent
    angle at its junction parameter."""
    tables: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    sides: dict[int, list[tuple[tuple[float, float], float]]] = {}
    for j in junctions:
        for own in (j.index_a, j.index_b):
            other, t_other = j.other_side(own)
            beta = tangent_angle(scene.primitives[other], t_other, fallback=True)
            sides.setdefault(own, []).append((j.point, beta))
    for k, rows in sides.items():
        pts = np.asarray([r[0] for r in rows])
        betas = np.asarray([r[1] for r in rows])
        tables[k] = (pts, betas)
    return tables


def _beta_rule(alpha, pts, win, tables, params: FieldParams):
    normal = reduce_half_turn(alpha + np.pi / 2.0)
    beta = normal.copy()
    for k in np.unique(win):
        if k not in tables:
            continue
        sel = win == k
        jpts, jbeta = tables[k]
        diff = pts[sel][:, None, :] - jpts[None, :, :]
        dj = np.sqrt(diff[..., 0] ** 2 + diff[..., 1] ** 2)
        nearest = np.argmin(dj, axis=1)
        dJ = dj[np.arange(len(nearest)), nearest]
        btan = jbeta[nearest]

        tan2 = 2.0 * btan
        norm2 = 2.0 * normal[sel]
        lam = (params.d_far - dJ) / (params.d_far - params.d_near)
        arc = np.mod(tan2 - norm2 + np.pi, 2.0 * np.pi) - np.pi
        blended = reduce_half_turn(0.5 * (norm2 + lam * arc))

        b = np.where(dJ <= params.d_near, btan, blended)
        b = np.where(dJ >= params.d_far, normal[sel], b)
        beta[sel] = b
    return beta


def multiway_clusters(junctions: list[Junction], tol: float) -> list[list[int]]:
    """Groups of >= 3 primitive indices whose pairwise junctions cluster
    within tol of each other (a single meeting point of many curves shows
    up as several two-curve junctions)."""
    n = len(junctions)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            pi, pj = junctions[i].point, junctions[j].point
            if (pi[0] - pj[0]) ** 2 + (pi[1] - pj[1]) ** 2 <= tol * tol:
                parent[find(i)] = find(j)
    clusters: dict[int, set[int]] = {}
    for i, j in enumerate(junctions):
        clusters.setdefault(find(i), set()).update((j.index_a, j.index_b))
    return [sorted(prims) for prims in clusters.values() if len(prims) >= 3]


def _warn_multiway(junctions: list[Junction], tol: float) -> None:
    """Warn when three or more primitives meet; the closest-junction rule
    then still only ever sees the two curves of each pairwise junction."""
    bad = multiway_clusters(junctions, tol)
    if bad:
        warnings.warn(
            f"junction cluster joins {len(bad[0])} primitives {bad[0]}; "
            "using the two closest curves",
            MultiJunctionWarning,
            stacklevel=3,
        )


def assign_pixel(
    scene: Scene, junctions: list[Junction], p, params: FieldParams
) -> tuple[float, float]:
    """Direction pair (alpha, beta) at one point, alpha <= beta not imposed:
    alpha is always the own-curve tangent, beta the junction-rule direction."""
    dists = np.empty(len(scene.primitives))
    ts = np.empty(len(scene.primitives))
    for k, prim in enumerate(scene.primitives):
        ts[k], dists[k] = closest_point(prim, p)
    win = int(np.argmin(dists))
    alpha = tangent_angle(scene.primitives[win], float(ts[win]), fallback=True)
    tables = _junction_tables(scene, junctions)
    beta = _beta_rule(
        np.asarray([alpha]),
        np.asarray(p, dtype=float)[None, :],
        np.asarray([win]),
        tables,
        params,
    )
    return float(alpha), float(beta[0])


def build_field(
    scene: Scene, params: FieldParams = FieldParams()
) -> tuple[RasterImage, PolyVectorField]:
    """Rasterize, threshold, assign directions, encode, smooth."""
    h, w = scene.height, scene.width
    if not scene.primitives:
        return (
            RasterImage(w, h, np.zeros((h, w))),
            PolyVectorField(np.zeros((h, w, 4)), np.zeros((h, w), dtype=bool)),
        )

    cutoff = params.stroke_width / 2.0 + 0.5
    T, D = scene_distances(scene, cutoff)
    intensity = np.clip(cutoff - D.min(axis=0), 0.0, 1.0)
    image = RasterImage(w, h, intensity.reshape(h, w))
    m = mask(image, params.threshold)
    flat = m.ravel()
    if not np.any(flat):
        return image, PolyVectorField(np.zeros((h, w, 4)), m)

    win = np.argmin(D[:, flat], axis=0)
    t_win = T[win, np.nonzero(flat)[0]]
    pts = pixel_centers(w, h)[flat]

    alpha = np.empty(len(pts))
    for k in np.unique(win):
        sel = win == k
        alpha[sel] = tangent_angle(scene.primitives[k], t_win[sel], fallback=True)

    junctions = scene_junctions(scene, params.intersection_tol)
    _warn_multiway(junctions, params.intersection_tol)
    beta = _beta_rule(alpha, pts, win, _junction_tables(scene, junctions), params)

    c0, c2 = encode(alpha, beta)
    channels = np.zeros((h * w, 4))
    channels[flat, 0] = c0.real
    channels[flat, 1] = c0.imag
    channels[flat, 2] = c2.real
    channels[flat, 3] = c2.imag
    field = PolyVectorField(channels.reshape(h, w, 4), m)
    if params.sigma > 0.0:
        field = smooth(field, params.sigma)
    return image, field
