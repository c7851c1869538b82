"""
Overfitting a single drawing
============================

The quickest sanity check for the whole pipeline: synthesize one record
with the generator, drive the loss toward zero on that record alone,
export the prediction as a field file, and let the generator's own
evaluator score it. If the two sides disagree about the format or the
objective, this script is where it shows.
"""

import json
import os
import subprocess
import sys

from trainer import (
    Manifest, TrainConfig, UNetConfig,
    predict, read_field, read_image, train_single,
)

out_dir = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(out_dir, exist_ok=True)
ds_dir = os.path.join(out_dir, "one_record")


def generator(*args):
    cmd = [sys.executable, "-m", "polyfield.cli", *map(str, args)]
    return subprocess.run(cmd, check=True, capture_output=True, text=True)


# The generator is a subprocess, never an import; files are the contract.
generator("synth", "--seed", 20, "--count", 1, "--train", 1, "--out", ds_dir)
man = Manifest.load(os.path.join(ds_dir, "manifest.json"))
rec = man.split("train")[0]
image = read_image(man.image_path(rec))
field = read_field(man.field_path(rec))
print(f"record {rec['index']}: {int(field.mask.sum())} defined pixels")

model, curves, report = train_single(
    image,
    field,
    TrainConfig(seed=0, gamma=0.01, lr=5e-4, steps=150),
    out_dir=os.path.join(out_dir, "overfit_run"),
    net=UNetConfig(depth=3, base_channels=32),
)
print(f"alignment mse {curves.mse[0]:.4f} -> {curves.mse[-1]:.2e}")
print(f"final report: {report.to_json()}")

# Round trip: export, then score with the evaluator that wrote the
# ground truth in the first place.
pred_path = os.path.join(out_dir, "overfit_prediction.pvf")
predict(model, image, pred_path, threshold=man.threshold)
scored = generator("eval", "--pred", pred_path, "--gt", man.field_path(rec))
their_mse = json.loads(scored.stdout)["mse"]
print(f"generator scores the exported file at mse {their_mse:.2e}")
print(f"loop-internal and exported scores differ by {abs(their_mse - report.mse):.1e}")
