"""Three-shear rotation with every shear carried out in the Haar domain.

Rotation by theta moves content with the map (x, y) -> (x cos + y sin,
-x sin + y cos) in pixel coordinates (x right, y down, pixel (i, j) centred
at (j + 0.5, i + 0.5)), i.e. counter-clockwise on screen, about the canvas
centre.  It factors as

    shear_rows(-tan(theta/2)) . shear_cols(sin(theta)) . shear_rows(-tan(theta/2))
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import _forward_rows, _inverse_rows, n_levels_of
from ..engine import shift_rows
from .image import Image

METHODS = ("haar", "nearest", "bilinear", "bicubic", "sinc")


@dataclass(frozen=True)
class RotationSpec:
    angle: float
    precision: int = 3
    method: str = "haar"

    def __post_init__(self):
        if self.precision < 0:
            raise ValueError("precision must be >= 0")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")


def quantize_shift(value: float, h: int) -> int:
    """Numerator of the nearest multiple of 1/2^h (ties to even)."""
    return int(np.round(value * (1 << h)))


def line_offsets(n: int) -> np.ndarray:
    """Signed offset of each line centre from the canvas centre."""
    return np.arange(n) + 0.5 - n / 2


def shear_rows(coeff_rows, a: float, h: int) -> np.ndarray:
    """Shift every full-transform row by quantize(a * y, h), y its signed offset.

    Input and output are (rows, 2^N) stacks of Haar transforms.
    """
    c = np.asarray(coeff_rows, dtype=np.float64)
    n = n_levels_of(c.shape[1])
    numer = np.array([quantize_shift(a * y, h) for y in line_offsets(c.shape[0])], dtype=np.int64)
    numer %= 1 << (n + h)
    # rows with no detail energy are constant and shift-invariant
    active = (numer != 0) & np.any(c[:, 1:] != 0, axis=1)
    out = c.copy()
    if active.any():
        out[active] = shift_rows(c[active], numer[active], h)
    return out


def shear_cols(coeff_cols, a: float, h: int) -> np.ndarray:
    """Column analogue of :func:`shear_rows` (columns hold the transforms)."""
    return shear_rows(np.asarray(coeff_cols).T, a, h).T


def haar_shear_rows(samples, a: float, h: int) -> np.ndarray:
    """Spatial in, spatial out: transform rows, shear in the Haar domain, invert."""
    n = n_levels_of(samples.shape[1])
    return _inverse_rows(shear_rows(_forward_rows(samples, n), a, h), n)


def haar_shear_cols(samples, a: float, h: int) -> np.ndarray:
    return haar_shear_rows(np.asarray(samples).T, a, h).T


def split_quarter_turns(theta: float) -> tuple[int, float]:
    """theta -> (q, phi) with theta = q * pi/2 + phi, |phi| <= pi/4, q in 0..3."""
    theta = math.remainder(theta, 2 * math.pi)  # (-pi, pi]
    if theta == -math.pi:
        theta = math.pi
    q = round(theta / (math.pi / 2))
    phi = theta - q * (math.pi / 2)
    if abs(phi) < 1e-15:
        phi = 0.0
    return q % 4, phi


def quarter_turn(samples: np.ndarray, q: int) -> np.ndarray:
    """Exact rotation by q * pi/2 (counter-clockwise on screen)."""
    if q % 2 and samples.shape[0] != samples.shape[1]:
        raise ValueError("odd quarter turns need a square canvas")
    return np.rot90(samples, q % 4).copy()


def rotate_haar(img: Image, theta: float, h: int = 3) -> Image:
    a = img.samples
    n_levels_of(a.shape[0])
    n_levels_of(a.shape[1])
    q, phi = split_quarter_turns(theta)
    a = quarter_turn(a, q)
    if phi != 0.0:
        t = -math.tan(phi / 2)
        a = haar_shear_rows(a, t, h)
        a = haar_shear_cols(a, math.sin(phi), h)
        a = haar_shear_rows(a, t, h)
    return img.with_samples(a)


def rotate(img: Image, spec: RotationSpec) -> Image:
    """Rotate ``img`` by ``spec.angle`` radians with the chosen method."""
    if spec.method == "haar":
        return rotate_haar(img, spec.angle, spec.precision)
    from .baselines import rotate_baseline

    return rotate_baseline(img, spec)
