from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    width: int
    height: int

    def slices(self) -> tuple[slice, slice]:
        return slice(self.y, self.y + self.height), slice(self.x, self.x + self.width)


@dataclass(frozen=True)
class Image:
    """Grayscale image; ``samples`` is (height, width), row-major, nominally 0..255.

    ``original_rect`` is the pre-padding extent inside the canvas.
    """

    samples: np.ndarray = field(repr=False)
    original_rect: Rect | None = None
    background: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.samples, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"image samples must be a non-empty 2-D array, got {a.shape}")
        object.__setattr__(self, "samples", a)
        if self.original_rect is None:
            object.__setattr__(self, "original_rect", Rect(0, 0, a.shape[1], a.shape[0]))
        r = self.original_rect
        if r.x < 0 or r.y < 0 or r.x + r.width > a.shape[1] or r.y + r.height > a.shape[0]:
            raise ValueError(f"original_rect {r} exceeds canvas {a.shape[1]}x{a.shape[0]}")

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    def with_samples(self, samples) -> "Image":
        return replace(self, samples=samples)

    def original(self) -> np.ndarray:
        """Samples inside ``original_rect``."""
        return self.samples[self.original_rect.slices()]


def next_pow2(n: int) -> int:
    return 1 << max(0, math.ceil(math.log2(max(n, 1))))


def padded_side(width: int, height: int) -> int:
    """Canvas side: next power of two >= twice the (rounded) diagonal."""
    diag = round(math.hypot(width, height))
    return next_pow2(max(2 * diag, width, height))


def is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def pad_to_pow2(img: Image, background: float | None = None) -> Image:
    """Center the original extent on a square power-of-two canvas large enough
    that rotated or sheared content never wraps back over it.

    A canvas that already satisfies the rule is returned unchanged.
    """
    r = img.original_rect
    side = padded_side(r.width, r.height)
    if (
        img.width == img.height
        and is_pow2(img.width)
        and img.width >= side
        and (background is None or background == img.background)
    ):
        return img
    bg = img.background if background is None else float(background)
    canvas = np.full((side, side), bg)
    x0, y0 = (side - r.width) // 2, (side - r.height) // 2
    canvas[y0 : y0 + r.height, x0 : x0 + r.width] = img.original()
    return Image(canvas, Rect(x0, y0, r.width, r.height), bg)
