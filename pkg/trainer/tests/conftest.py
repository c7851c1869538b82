"""Shared fixtures for the trainer suite.

Tests marked @pytest.mark.criterion("...") are the acceptance checks; a
hook below prints one PASS/FAIL line per criterion. Everything the suite
needs from the field generator goes through its command line and the
files it writes, never through its Python API, so these tests double as
a check of the on-disk contract between the two packages.
"""

import os
import subprocess
import sys

import numpy as np
import pytest
import torch

from trainer import Manifest, read_field, read_image

torch.set_num_threads(1)


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): top-level acceptance criterion"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when != "call":
        return
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if hasattr(rep, "wasxfail"):
        status = "FAIL (expected)" if rep.skipped else "PASS (unexpectedly)"
    else:
        status = "PASS" if rep.passed else ("FAIL" if rep.failed else "SKIP")
    print(f"\n[criterion] {mark.args[0]}: {status}", flush=True)


def generator_cli(*args, check=True):
    """Run the field generator's command line in a subprocess."""
    env = dict(os.environ, POLYFIELD_THREADS="1")
    return subprocess.run(
        [sys.executable, "-m", "polyfield.cli", *map(str, args)],
        capture_output=True,
        text=True,
        check=check,
        env=env,
    )


def synth_dataset(out_dir, seed, count, train, spec_json=None):
    args = ["synth", "--seed", seed, "--count", count, "--train", train, "--out", out_dir]
    if spec_json is not None:
        spec_path = os.path.join(os.path.dirname(out_dir), f"spec_{seed}.json")
        with open(spec_path, "w") as fh:
            fh.write(spec_json)
        args += ["--spec", spec_path]
    generator_cli(*args)
    return Manifest.load(os.path.join(out_dir, "manifest.json"))


def first_record(manifest):
    rec = manifest.records[0]
    return read_image(manifest.image_path(rec)), read_field(manifest.field_path(rec))


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """Six generated records, four train and two val."""
    out = tmp_path_factory.mktemp("data") / "small"
    return synth_dataset(str(out), 77, 6, 4)


@pytest.fixture(scope="session")
def two_primitive_record(tmp_path_factory):
    """One generated record pinned to exactly two primitives."""
    out = tmp_path_factory.mktemp("data") / "two"
    man = synth_dataset(
        str(out), 11, 1, 1, spec_json='{"primitives_min": 2, "primitives_max": 2}'
    )
    return first_record(man)


def batch_of(channels_hw4, mask_hw, dtype=torch.float64):
    """(h, w, 4) array and mask to a single-element training batch."""
    ch = np.transpose(np.asarray(channels_hw4, dtype=float), (2, 0, 1))
    pred = torch.tensor(ch, dtype=dtype).unsqueeze(0)
    mask = torch.tensor(np.asarray(mask_hw, dtype=bool)).unsqueeze(0)
    return pred, mask
