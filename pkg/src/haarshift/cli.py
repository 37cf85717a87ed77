"""Command-line front end: ``haarshift <subcommand> ...``."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .core import HaarError, forward, inverse, read_haarc, read_signal, write_haarc, write_signal
from .engine import DyadicShift, shift_transform, shift_transform_fractional
from .imaging.bench import benchmark_images, successive_rotation_experiment
from .imaging.image import Image, Rect, pad_to_pow2
from .imaging.pgm import PGMError, read_image, write_image
from .imaging.rotation import METHODS, RotationSpec, rotate
from .profiling import average_complexity_report
from .reference import reference_shifted_transform

TOLERANCE = 1e-9


class DomainError(Exception):
    pass


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_transform(args):
    x = read_signal(args.input)
    write_haarc(forward(x, args.reduction), args.output)


def cmd_inverse(args):
    write_signal(inverse(read_haarc(args.coeffs)), args.output)


def _apply_shift(t, sh: DyadicShift):
    if sh.precision == 0:
        return shift_transform(t, sh.reduced(t.n_levels))
    if not t.is_full:
        raise HaarError("fractional shifts need a fully decimated transform (k = N)")
    return shift_transform_fractional(t, sh)


def cmd_shift(args):
    t = read_haarc(args.coeffs)
    sh = DyadicShift.parse(args.shift)
    out = _apply_shift(t, sh)
    if args.output:
        write_haarc(out, args.output)
    if args.verify:
        ref = reference_shifted_transform(inverse(t), (sh.numerator, sh.precision), t.reduction)
        dev = float(np.max(np.abs(out.coeffs - ref.coeffs)))
        ok = dev <= TOLERANCE
        print(f"verify shift={sh} N={t.n_levels} k={t.reduction}: max deviation {dev:.3e} {'PASS' if ok else 'FAIL'}")
        if not ok:
            raise DomainError("engine and oracle disagree")


def rotated_bounds(rect: Rect, width: int, height: int, theta: float) -> Rect:
    """Bounding box of ``rect`` rotated about the canvas centre, clipped."""
    cx, cy = width / 2, height / 2
    c, s = math.cos(theta), math.sin(theta)
    xs, ys = [], []
    for x in (rect.x, rect.x + rect.width):
        for y in (rect.y, rect.y + rect.height):
            dx, dy = x - cx, y - cy
            xs.append(c * dx + s * dy + cx)
            ys.append(-s * dx + c * dy + cy)
    x0 = max(0, math.floor(min(xs) + 1e-9))
    y0 = max(0, math.floor(min(ys) + 1e-9))
    x1 = min(width, math.ceil(max(xs) - 1e-9))
    y1 = min(height, math.ceil(max(ys) - 1e-9))
    return Rect(x0, y0, x1 - x0, y1 - y0)


def cmd_rotate(args):
    src = read_image(args.input)
    canvas = pad_to_pow2(src, args.background)
    theta = math.radians(args.angle)
    out = rotate(canvas, RotationSpec(theta, args.precision, args.method))
    if args.crop == "canvas":
        region = Rect(0, 0, out.width, out.height)
    elif args.crop == "original":
        region = out.original_rect
    else:
        region = rotated_bounds(out.original_rect, out.width, out.height, theta)
    write_image(Image(out.samples[region.slices()]), args.output, binary=not args.ascii)


def _methods(text: str):
    methods = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise DomainError(f"unknown method(s) {', '.join(bad) or text!r}; choose from {', '.join(METHODS)}")
    return methods


def cmd_bench_rotation(args):
    methods = _methods(args.methods)
    if args.input:
        images = [read_image(p) for p in args.input]
    else:
        images = benchmark_images(args.count, args.size)
    theta = math.radians(args.angle)
    lines = []
    for n, img in enumerate(images):
        report = successive_rotation_experiment(img, args.steps, theta, methods, args.precision)
        body = report.to_csv().splitlines()
        if not lines:
            lines.append("image," + body[0])
        lines.extend(f"{n},{row}" for row in body[1:])
    _emit("\n".join(lines) + "\n", args.output)


def cmd_bench_complexity(args):
    if args.n_min > args.n_max:
        raise DomainError("--n-min exceeds --n-max")
    report = average_complexity_report(range(args.n_min, args.n_max + 1), args.precision)
    _emit(report.to_csv(), args.output)


def cmd_verify(args):
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    cases = 0
    for n in range(1, args.max_n + 1):
        x = rng.normal(size=1 << n)
        for k in range(1, n + 1):
            t = forward(x, k)
            for s in range(1 << n):
                dev = np.max(np.abs(shift_transform(t, s).coeffs - reference_shifted_transform(x, s, k).coeffs))
                worst = max(worst, float(dev))
                cases += 1
    for n in range(1, min(args.max_n, 6) + 1):
        x = rng.normal(size=1 << n)
        t = forward(x)
        for h in range(1, args.max_h + 1):
            for s in range(1 << (n + h)):
                sh = DyadicShift.of(s, h)
                dev = np.max(np.abs(shift_transform_fractional(t, sh).coeffs - reference_shifted_transform(x, sh).coeffs))
                worst = max(worst, float(dev))
                cases += 1
    ok = worst <= TOLERANCE
    print(f"verified {cases} shifted transforms against the spatial oracle: max deviation {worst:.3e} {'PASS' if ok else 'FAIL'}")
    if not ok:
        raise DomainError("engine and oracle disagree")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="haarshift", description="Phase shifting in the Haar wavelet domain.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("transform", help="signal text file -> HAARC coefficients")
    q.add_argument("--input", required=True)
    q.add_argument("--reduction", type=int, default=None, help="reduction steps k (default: full)")
    q.add_argument("--output", required=True)
    q.set_defaults(func=cmd_transform)

    q = sub.add_parser("inverse", help="HAARC coefficients -> signal text file")
    q.add_argument("--coeffs", required=True)
    q.add_argument("--output", required=True)
    q.set_defaults(func=cmd_inverse)

    q = sub.add_parser("shift", help="shift HAARC coefficients by s or s/2^h")
    q.add_argument("--coeffs", required=True)
    q.add_argument("--shift", required=True, help="'s' or 's/D' with D a power of two")
    q.add_argument("--output")
    q.add_argument("--verify", action="store_true", help="check against the spatial-domain oracle")
    q.set_defaults(func=cmd_shift)

    q = sub.add_parser("rotate", help="rotate a PGM image")
    q.add_argument("--input", required=True)
    q.add_argument("--output", required=True)
    q.add_argument("--angle", type=float, required=True, help="degrees, counter-clockwise")
    q.add_argument("--precision", type=int, default=3, help="shift precision exponent h")
    q.add_argument("--method", choices=METHODS, default="haar")
    q.add_argument("--background", type=float, default=0.0)
    q.add_argument("--crop", choices=("bounds", "original", "canvas"), default="bounds")
    q.add_argument("--ascii", action="store_true", help="write P2 instead of P5")
    q.set_defaults(func=cmd_rotate)

    q = sub.add_parser("bench-rotation", help="accumulated error of successive rotations (CSV)")
    q.add_argument("--input", nargs="*", help="PGM images (default: generated test images)")
    q.add_argument("--count", type=int, default=10)
    q.add_argument("--size", type=int, default=256)
    q.add_argument("--steps", type=int, default=16)
    q.add_argument("--angle", type=float, default=22.5, help="degrees per step")
    q.add_argument("--methods", default=",".join(METHODS))
    q.add_argument("--precision", type=int, default=3)
    q.add_argument("--output")
    q.set_defaults(func=cmd_bench_rotation)

    q = sub.add_parser("bench-complexity", help="term-count profile vs log2(L) (CSV)")
    q.add_argument("--n-min", type=int, default=4)
    q.add_argument("--n-max", type=int, default=12)
    q.add_argument("--precision", type=int, default=0)
    q.add_argument("--output")
    q.set_defaults(func=cmd_bench_complexity)

    q = sub.add_parser("verify", help="exhaustive engine-vs-oracle check")
    q.add_argument("--max-n", type=int, default=8)
    q.add_argument("--max-h", type=int, default=3)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors (2) and --help (0)
        return exc.code if isinstance(exc.code, int) else 2
    try:
        args.func(args)
    except (DomainError, HaarError, PGMError, ValueError, OSError) as exc:
        print(f"haarshift: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
