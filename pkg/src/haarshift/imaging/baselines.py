"""Inverse-mapping rotation with classic interpolation kernels.

Each output pixel centre p samples the source at M(-theta)(p - c) + c, the
inverse of the rotation map used by the Haar pipeline.  Samples outside the
canvas read as the background value.
"""

from __future__ import annotations

import math

import numpy as np

from .image import Image
from .rotation import RotationSpec, quarter_turn, split_quarter_turns


def keys_cubic(t, a: float = -0.5):
    t = np.abs(t)
    t2, t3 = t * t, t * t * t
    near = (a + 2) * t3 - (a + 3) * t2 + 1
    far = a * t3 - 5 * a * t2 + 8 * a * t - 4 * a
    return np.where(t <= 1, near, np.where(t < 2, far, 0.0))


def lanczos3(t):
    t = np.asarray(t, dtype=np.float64)
    return np.where(np.abs(t) < 3, np.sinc(t) * np.sinc(t / 3), 0.0)


def tent(t):
    return np.maximum(0.0, 1.0 - np.abs(t))


# name -> (kernel, radius, normalize weights)
KERNELS = {
    "bilinear": (tent, 1, False),
    "bicubic": (keys_cubic, 2, False),
    "sinc": (lanczos3, 3, True),
}


def _axis_weights(v, kernel, radius, normalize):
    """Integer tap positions and weights for sample-space coordinates ``v``."""
    base = np.floor(v).astype(np.int64)
    offsets = np.arange(-radius + 1, radius + 1)
    taps = base[:, None] + offsets[None, :]
    w = kernel(v[:, None] - taps)
    if normalize:
        w = w / w.sum(axis=1, keepdims=True)
    return taps, w


def sample(src: np.ndarray, sx, sy, method: str, background: float = 0.0) -> np.ndarray:
    """Interpolate ``src`` at continuous coordinates (sx, sy) (pixel-centre
    convention: sample (i, j) sits at x = j + 0.5, y = i + 0.5)."""
    hgt, wid = src.shape
    vx = np.asarray(sx, dtype=np.float64).ravel() - 0.5
    vy = np.asarray(sy, dtype=np.float64).ravel() - 0.5
    if method == "nearest":
        ix = np.floor(vx + 0.5).astype(np.int64)
        iy = np.floor(vy + 0.5).astype(np.int64)
        ok = (ix >= 0) & (ix < wid) & (iy >= 0) & (iy < hgt)
        out = np.full(vx.shape, float(background))
        out[ok] = src[iy[ok], ix[ok]]
        return out.reshape(np.shape(sx))
    try:
        kernel, radius, normalize = KERNELS[method]
    except KeyError:
        raise ValueError(f"unknown interpolation method {method!r}") from None
    tx, wx = _axis_weights(vx, kernel, radius, normalize)
    ty, wy = _axis_weights(vy, kernel, radius, normalize)
    okx = (tx >= 0) & (tx < wid)
    oky = (ty >= 0) & (ty < hgt)
    cx = np.clip(tx, 0, wid - 1)
    cy = np.clip(ty, 0, hgt - 1)
    out = np.zeros(vx.shape)
    for a in range(ty.shape[1]):
        row = np.zeros(vx.shape)
        for b in range(tx.shape[1]):
            vals = np.where(oky[:, a] & okx[:, b], src[cy[:, a], cx[:, b]], background)
            row += wx[:, b] * vals
        out += wy[:, a] * row
    return out.reshape(np.shape(sx))


def _support_box(a: np.ndarray, background: float):
    """Bounding box (y0, y1, x0, x1) of samples that differ from background."""
    mask = a != background
    if not mask.any():
        return None
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return rows[0], rows[-1] + 1, cols[0], cols[-1] + 1


def rotate_samples(src: np.ndarray, phi: float, method: str, background: float = 0.0, supersample: int = 1) -> np.ndarray:
    """Inverse-mapping rotation by ``phi`` about the canvas centre.

    With ``supersample`` > 1 each output pixel is the mean of a
    supersample x supersample grid of sub-pixel samples.
    """
    hgt, wid = src.shape
    out = np.full((hgt, wid), float(background))
    box = _support_box(src, background)
    if box is None:
        return out
    radius = {"nearest": 1}.get(method, KERNELS.get(method, (None, 3, None))[1])
    cy, cx = hgt / 2, wid / 2
    cos, sin = math.cos(phi), math.sin(phi)
    # content can only land where the inverse map hits the support box
    ys, xs = np.mgrid[0:hgt, 0:wid]
    px = xs + 0.5 - cx
    py = ys + 0.5 - cy
    sx = cos * px - sin * py + cx
    sy = sin * px + cos * py + cy
    pad = radius + 1
    y0, y1, x0, x1 = box
    live = (sy > y0 - pad) & (sy < y1 + pad) & (sx > x0 - pad) & (sx < x1 + pad)
    px, py = px[live], py[live]
    acc = np.zeros(px.shape)
    offs = (np.arange(supersample) + 0.5) / supersample - 0.5
    for oy in offs:
        for ox in offs:
            qx, qy = px + ox, py + oy
            acc += sample(src, cos * qx - sin * qy + cx, sin * qx + cos * qy + cy, method, background)
    out[live] = acc / supersample**2
    return out


def rotate_baseline(img: Image, spec: RotationSpec) -> Image:
    if spec.method == "haar":
        raise ValueError("rotate_baseline handles interpolation baselines only")
    q, phi = split_quarter_turns(spec.angle)
    if img.width == img.height:
        a = quarter_turn(img.samples, q)
    else:
        a, phi = img.samples, math.remainder(spec.angle, 2 * math.pi)
    if phi != 0.0:
        a = rotate_samples(a, phi, spec.method, img.background)
    return img.with_samples(a)
