"""Accumulated-error rotation benchmarks and synthetic test imagery."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..engine import worker_count
from .baselines import rotate_samples
from .image import Image, Rect, pad_to_pow2
from .rotation import METHODS, RotationSpec, rotate

REPORT_HEADER = ("method", "steps", "angle_deg", "rms")


def rms_error(a, b, region: Rect | None = None) -> float:
    """Root-mean-square difference of two equal-size images over ``region``."""
    a = a.samples if isinstance(a, Image) else np.asarray(a, dtype=np.float64)
    b = b.samples if isinstance(b, Image) else np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"image sizes differ: {a.shape} vs {b.shape}")
    if region is not None:
        if region.x < 0 or region.y < 0 or region.y + region.height > a.shape[0] or region.x + region.width > a.shape[1]:
            raise ValueError(f"region {region} outside {a.shape[1]}x{a.shape[0]}")
        if region.width < 1 or region.height < 1:
            raise ValueError("empty region")
        a, b = a[region.slices()], b[region.slices()]
    return float(np.sqrt(np.mean((a - b) ** 2)))


@dataclass
class ErrorReport:
    steps: int
    angle: float
    rms: dict[str, float] = field(default_factory=dict)
    per_step: dict[str, list[float]] = field(default_factory=dict)

    def ordering(self) -> list[str]:
        """Methods from worst to best."""
        return sorted(self.rms, key=self.rms.get, reverse=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for m, v in self.rms.items():
            w.writerow([m, self.steps, f"{math.degrees(self.angle):g}", f"{v:.6f}"])
        return buf.getvalue()


def _closes(steps: int, theta: float) -> bool:
    turns = steps * theta / (2 * math.pi)
    return abs(turns - round(turns)) < 1e-9


def successive_rotation_experiment(img: Image, steps: int, theta: float, methods=METHODS, precision: int = 3, keep_steps: bool = False) -> ErrorReport:
    """Rotate ``steps`` times by ``theta`` with each method and measure the
    residual against the original over ``original_rect``."""
    if steps < 1 or not _closes(steps, theta):
        raise ValueError(f"{steps} rotations by {theta} rad do not return to the start")
    canvas = pad_to_pow2(img)
    reference = canvas.samples
    region = canvas.original_rect

    def run(method):
        spec = RotationSpec(theta, precision, method)
        cur = canvas
        trail = []
        for _ in range(steps):
            cur = rotate(cur, spec)
            if keep_steps:
                trail.append(cur.samples.copy())
        residual = rms_error(cur.samples, reference, region)
        if keep_steps:
            # distance to the original after each step's cumulative angle
            return method, residual, trail
        return method, residual, None

    methods = list(methods)
    for m in methods:
        RotationSpec(theta, precision, m)
    workers = min(worker_count(), len(methods))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, methods))
    else:
        results = [run(m) for m in methods]
    report = ErrorReport(steps, theta)
    for method, residual, trail in results:
        report.rms[method] = residual
        if trail is not None:
            report.per_step[method] = [
                rms_error(frame, rotate_samples(reference, (i + 1) * theta, "bicubic", canvas.background), region)
                for i, frame in enumerate(trail)
            ]
    return report


def supersampled_reference(img: Image, theta: float, factor: int = 8) -> Image:
    """High-precision rotation: bicubic samples averaged over a factor x factor
    sub-pixel grid per output pixel."""
    canvas = pad_to_pow2(img)
    return canvas.with_samples(rotate_samples(canvas.samples, theta, "bicubic", canvas.background, factor))


def jaggedness_curve(img: Image, theta: float = math.pi / 4, precisions=range(4), factor: int = 8) -> dict[int, float]:
    """RMS of a single Haar rotation against the supersampled reference, per h."""
    canvas = pad_to_pow2(img)
    ref = supersampled_reference(canvas, theta, factor)
    return {
        h: rms_error(rotate(canvas, RotationSpec(theta, h, "haar")), ref, canvas.original_rect)
        for h in precisions
    }


# Synthetic test imagery --------------------------------------------------------


def _lowpass(noise: np.ndarray, sigma: float) -> np.ndarray:
    ky = np.fft.fftfreq(noise.shape[0])[:, None]
    kx = np.fft.fftfreq(noise.shape[1])[None, :]
    gain = np.exp(-2 * (math.pi * sigma) ** 2 * (kx**2 + ky**2))
    return np.real(np.fft.ifft2(np.fft.fft2(noise) * gain))


def _unit(a: np.ndarray) -> np.ndarray:
    return (a - a.mean()) / max(a.std(), 1e-12)


def _stretch(a: np.ndarray, lo: float = 16.0, hi: float = 239.0) -> np.ndarray:
    a = a - a.min()
    return lo + (hi - lo) * a / max(a.max(), 1e-12)


def textured_image(seed: int, size: int = 256) -> np.ndarray:
    """Deterministic textured test image in [16, 239].

    The family cycles with the seed: multi-scale noise, oriented gratings,
    soft-edged shapes over noise, and a chirp/zone pattern.
    """
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size] + 0.5
    family = seed % 4
    if family == 0:
        a = sum(w * _unit(_lowpass(rng.normal(size=(size, size)), s)) for w, s in ((1.0, 8.0), (0.5, 3.0), (0.25, 1.5)))
    elif family == 1:
        a = np.zeros((size, size))
        for _ in range(4):
            ang = rng.uniform(0, math.pi)
            period = rng.uniform(6, 24)
            phase = rng.uniform(0, 2 * math.pi)
            a += np.cos(2 * math.pi * (x * math.cos(ang) + y * math.sin(ang)) / period + phase)
        a += _unit(_lowpass(rng.normal(size=(size, size)), 4.0))
    elif family == 2:
        a = 0.3 * _unit(_lowpass(rng.normal(size=(size, size)), 2.0))
        scale = 2.0
        for _ in range(25):
            cx, cy = rng.uniform(0, size, 2)
            r = rng.uniform(size / 32, size / 6)
            edge = 1 / (1 + np.exp((np.hypot(x - cx, y - cy) - r) / 0.8))
            a = a * (1 - edge) + edge * rng.uniform(-1, 1) * scale
    else:
        cx, cy = rng.uniform(0.3, 0.7, 2) * size
        rr = np.hypot(x - cx, y - cy)
        a = np.cos(rr**2 / rng.uniform(60, 120)) + 0.7 * _unit(_lowpass(rng.normal(size=(size, size)), 3.0))
    return _stretch(a)


def benchmark_images(count: int = 10, size: int = 256) -> list[Image]:
    return [Image(textured_image(seed, size)) for seed in range(count)]
