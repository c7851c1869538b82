"""Command-line entry point.

Subcommands: synth (dataset generation), gt (ground truth for one scene),
solve (variational recovery from an image), eval (report JSON on stdout),
viz (SVG quiver of a field). Exit codes: 0 success, 1 usage error,
2 I/O or format error, 3 numerical failure. Errors print one line to
standard error as `polyfield: <category>: <reason>`.
"""

from __future__ import annotations

import argparse
import base64
import json
import sys

import numpy as np

from .dataset import (
    FieldFormatError,
    GenerationError,
    SampleSpec,
    generate,
    read_field,
    write_field,
)
from .geometry import Scene
from .groundtruth import FieldParams, build_field
from .metrics import regularized_loss
from .polyvector import decode
from .raster import read_png, write_png
from .variational import SolveConfig, solve

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="polyfield", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a dataset")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--train", type=int, required=True)
    p.add_argument("--size", type=int, default=None, help="canvas size in px")
    p.add_argument("--out", required=True)
    p.add_argument("--spec", default=None, help="JSON file of sampling options")

    p = sub.add_parser("gt", help="ground-truth image and field for a scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--d-near", type=float, default=2.0)
    p.add_argument("--d-far", type=float, default=6.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--stroke-width", type=float, default=1.5)
    p.add_argument("--tol", type=float, default=0.5)

    p = sub.add_parser("solve", help="variational field from an image")
    p.add_argument("--image", required=True)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--trace", default=None, help="write iter,energy CSV here")

    p = sub.add_parser("eval", help="compare a field against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--gamma", type=float, default=0.1)

    p = sub.add_parser("viz", help="SVG quiver of a field")
    p.add_argument("--field", required=True)
    p.add_argument("--image", default=None, help="PNG underlay")
    p.add_argument("--out", required=True)
    p.add_argument("--stride", type=int, default=2)
    return parser


def _load_scene(path) -> Scene:
    try:
        with open(path) as fh:
            return Scene.from_obj(json.load(fh))
    except OSError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise _InputError(f"bad scene file {path}: {exc}") from exc


def _load_image(path):
    try:
        return read_png(path)
    except OSError:
        raise
    except Exception as exc:
        raise _InputError(f"bad image file {path}: {exc}") from exc


def _cmd_synth(args) -> int:
    if args.spec is not None:
        try:
            with open(args.spec) as fh:
                spec = SampleSpec.from_obj(json.load(fh))
        except OSError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise _InputError(f"bad spec file {args.spec}: {exc}") from exc
    else:
        spec = SampleSpec()
    if args.size is not None and args.size != spec.canvas:
        spec = SampleSpec(
            canvas=args.size,
            primitives_min=spec.primitives_min,
            primitives_max=spec.primitives_max,
            type_weights=spec.type_weights,
            margin=spec.margin,
            field_params=spec.field_params,
        )
    if args.train > args.count:
        raise _UsageError("--train must not exceed --count")
    generate(args.seed, args.count, args.train, spec, args.out)
    return 0


def _cmd_gt(args) -> int:
    scene = _load_scene(args.scene)
    params = FieldParams(
        d_near=args.d_near,
        d_far=args.d_far,
        sigma=args.sigma,
        threshold=args.threshold,
        stroke_width=args.stroke_width,
        intersection_tol=args.tol,
    )
    image, field = build_field(scene, params)
    write_png(image, args.out + ".png")
    write_field(field, args.out + ".pvf")
    return 0


def _cmd_solve(args) -> int:
    image = _load_image(args.image)
    config = SolveConfig(gamma=args.gamma, max_iters=args.iters)
    result = solve(image, config)
    write_field(result.field, args.out + ".pvf")
    if args.trace is not None:
        with open(args.trace, "w") as fh:
            fh.write("iter,energy\n")
            for i, e in enumerate(result.energies):
                fh.write(f"{i},{e!r}\n")
    return 0


def _cmd_eval(args) -> int:
    pred = read_field(args.pred)
    gt = read_field(args.gt)
    report = regularized_loss(pred, gt, args.gamma)
    print(report.to_json())
    return 0


def _quiver_svg(field, stride: int, image_path=None) -> str:
    h, w = field.height, field.width
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * 8}" height="{h * 8}" '
        f'viewBox="0 0 {w} {h}">\n'
        f'<rect width="{w}" height="{h}" fill="#ffffff"/>\n'
    ]
    if image_path is not None:
        with open(image_path, "rb") as fh:
            data = base64.b64encode(fh.read()).decode("ascii")
        parts.append(
            f'<image x="0" y="0" width="{w}" height="{h}" '
            f'href="data:image/png;base64,{data}" opacity="0.35" '
            'image-rendering="pixelated"/>\n'
        )
    half = 0.4 * stride
    sw = 0.08 * stride
    c0 = field.c0()
    c2 = field.c2()
    rows, cols = np.nonzero(field.mask)
    for r, c in zip(rows, cols):
        if r % stride or c % stride:
            continue
        alpha, beta = decode(complex(c0[r, c]), complex(c2[r, c]))
        cx, cy = c + 0.5, r + 0.5
        for angle, opacity in ((alpha, "1.0"), (beta, "0.5")):
            dx = half * np.cos(angle)
            dy = half * np.sin(angle)
            parts.append(
                f'<line x1="{cx - dx:.3f}" y1="{cy - dy:.3f}" '
                f'x2="{cx + dx:.3f}" y2="{cy + dy:.3f}" '
                f'stroke="#1a1a86" stroke-width="{sw:.3f}" '
                f'stroke-opacity="{opacity}" stroke-linecap="round"/>\n'
            )
    parts.append("</svg>\n")
    return "".join(parts)


def _cmd_viz(args) -> int:
    field = read_field(args.field)
    if args.stride < 1:
        raise _UsageError("--stride must be a positive integer")
    svg = _quiver_svg(field, args.stride, args.image)
    with open(args.out, "w") as fh:
        fh.write(svg)
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "gt": _cmd_gt,
    "solve": _cmd_solve,
    "eval": _cmd_eval,
    "viz": _cmd_viz,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"polyfield: usage: {exc}", file=sys.stderr)
        return 1
    except (OSError, FieldFormatError, _InputError) as exc:
        print(f"polyfield: io: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, GenerationError, np.linalg.LinAlgError) as exc:
        print(f"polyfield: numerical: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
