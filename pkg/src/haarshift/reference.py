"""Brute-force spatial-domain ground truth for the shift engine.

Nothing here touches the closed-form shift code; the only shared pieces are
:func:`haarshift.core.forward` and :func:`haarshift.core.forward2d`.
"""

import numpy as np

from .core import HaarError, forward, forward2d


def circular_shift_spatial(x, s: int) -> np.ndarray:
    """y(n) = x((n + s) mod L)."""
    x = np.asarray(x, dtype=np.float64)
    n = np.arange(x.shape[0])
    return x[(n + s) % x.shape[0]]


def upsample_repeat(x, h: int) -> np.ndarray:
    """Repeat every sample 2**h times (zero details on the added levels)."""
    if h < 0:
        raise HaarError("h must be >= 0")
    return np.repeat(np.asarray(x, dtype=np.float64), 1 << h)


def decimate_average(x, h: int) -> np.ndarray:
    """Mean of consecutive blocks of 2**h samples."""
    x = np.asarray(x, dtype=np.float64)
    if h < 0:
        raise HaarError("h must be >= 0")
    block = 1 << h
    if x.shape[0] % block:
        raise HaarError(f"length {x.shape[0]} not divisible by {block}")
    return x.reshape(-1, block).mean(axis=1)


def reference_shifted_signal(x, numerator: int, h: int = 0) -> np.ndarray:
    up = upsample_repeat(x, h)
    return decimate_average(circular_shift_spatial(up, numerator % up.shape[0]), h)


def reference_shifted_transform(x, shift, k: int | None = None):
    """forward(decimate(shift(upsample(x, h), s), h), k).

    ``shift`` is a DyadicShift, an int, or a (numerator, h) pair.
    """
    numerator, h = _split(shift)
    return forward(reference_shifted_signal(x, numerator, h), k)


def reference_shifted_image(img, sx, sy) -> np.ndarray:
    """Image with columns advanced by ``sx`` and rows by ``sy`` (dyadic)."""
    a = np.asarray(img, dtype=np.float64)
    nx, hx = _split(sx)
    ny, hy = _split(sy)
    rows = np.array([reference_shifted_signal(r, nx, hx) for r in a])
    return np.array([reference_shifted_signal(c, ny, hy) for c in rows.T]).T


def reference_shifted_transform2d(img, sx, sy) -> np.ndarray:
    return forward2d(reference_shifted_image(img, sx, sy))


def _split(shift):
    if isinstance(shift, (int, np.integer)):
        return int(shift), 0
    if isinstance(shift, tuple):
        return int(shift[0]), int(shift[1])
    return shift.numerator, shift.precision
