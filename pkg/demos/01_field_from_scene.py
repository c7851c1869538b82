"""
Ground truth from a vector scene
================================

Build a small drawing out of the three primitive kinds, rasterize it,
and attach a two-direction field to every stroke pixel. Outputs land in
demos/out/.
"""

import os

import numpy as np

from polyfield.dataset import write_field
from polyfield.geometry import Arc, CubicBezier, LineSegment, Scene, scene_junctions
from polyfield.groundtruth import FieldParams, build_field
from polyfield.polyvector import decode
from polyfield.raster import write_png

out_dir = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(out_dir, exist_ok=True)

# A 64x64 scene: a straight stroke crossing an arc, with a flourish.
scene = Scene(
    64,
    64,
    (
        LineSegment((8.0, 40.0), (56.0, 24.0)),
        Arc((30.0, 30.0), 16.0, -0.8, 2.1),
        CubicBezier((10.0, 12.0), (28.0, 4.0), (44.0, 20.0), (56.0, 10.0)),
    ),
)

# Junctions are where the second field direction stops being the normal.
params = FieldParams()
for j in scene_junctions(scene, params.intersection_tol):
    x, y = j.point
    print(f"primitives {j.index_a} and {j.index_b} cross at ({x:.2f}, {y:.2f})")

image, field = build_field(scene, params)
print(f"{int(field.mask.sum())} of {64 * 64} pixels carry directions")

# Peek at one pixel: the two decoded angles, in degrees.
rows, cols = np.nonzero(field.mask)
r, c = rows[len(rows) // 2], cols[len(rows) // 2]
alpha, beta = decode(complex(field.c0()[r, c]), complex(field.c2()[r, c]))
print(
    f"pixel ({r}, {c}): directions "
    f"{np.degrees(alpha):.1f} and {np.degrees(beta):.1f} degrees"
)

write_png(image, os.path.join(out_dir, "scene.png"))
write_field(field, os.path.join(out_dir, "scene.pvf"))

# The quiver rendering doubles as a quick visual check; stroke direction
# shows as the darker tick of each pair.
from polyfield.cli import main

main(
    [
        "viz",
        "--field",
        os.path.join(out_dir, "scene.pvf"),
        "--image",
        os.path.join(out_dir, "scene.png"),
        "--out",
        os.path.join(out_dir, "scene_quiver.svg"),
    ]
)
print(f"wrote scene.png, scene.pvf, scene_quiver.svg to {out_dir}")
