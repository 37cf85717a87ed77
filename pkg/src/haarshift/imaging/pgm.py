"""Minimal PGM (P2/P5) reader and writer for 8-bit grayscale."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .image import Image


class PGMError(ValueError):
    pass


_TOKEN = re.compile(rb"#[^\n]*\n?|(\S+)")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """First ``count`` whitespace-separated header tokens, skipping comments,
    and the offset just past the single whitespace byte that ends the header."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        m = _TOKEN.search(data, pos)
        if m is None:
            raise PGMError("truncated PGM header")
        pos = m.end()
        if m.group(1) is not None:
            tokens.append(m.group(1))
    return tokens, pos + 1


def decode_pgm(data: bytes) -> Image:
    tokens, offset = _header_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise PGMError(f"unsupported magic {magic!r} (expected P2 or P5)")
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise PGMError("non-integer PGM header field") from None
    if width < 1 or height < 1:
        raise PGMError(f"bad dimensions {width}x{height}")
    if not 1 <= maxval <= 255:
        raise PGMError(f"unsupported maxval {maxval} (need 1..255)")
    n = width * height
    if magic == b"P5":
        raw = data[offset : offset + n]
        if len(raw) != n:
            raise PGMError(f"expected {n} raster bytes, found {len(raw)}")
        values = np.frombuffer(raw, dtype=np.uint8).astype(np.float64)
    else:
        body = re.sub(rb"#[^\n]*", b"", data[offset - 1 :]).split()
        if len(body) < n:
            raise PGMError(f"expected {n} samples, found {len(body)}")
        try:
            values = np.array([int(v) for v in body[:n]], dtype=np.float64)
        except ValueError:
            raise PGMError("non-integer sample in P2 raster") from None
    if values.max(initial=0) > maxval:
        raise PGMError("sample exceeds maxval")
    if maxval != 255:
        values = values * (255.0 / maxval)
    return Image(values.reshape(height, width))


def to_bytes8(samples) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero."""
    a = np.clip(np.asarray(samples, dtype=np.float64), 0.0, 255.0)
    return np.floor(a + 0.5).astype(np.uint8)


def encode_pgm(img: Image | np.ndarray, binary: bool = True) -> bytes:
    samples = img.samples if isinstance(img, Image) else np.asarray(img)
    px = to_bytes8(samples)
    h, w = px.shape
    if binary:
        return b"P5\n%d %d\n255\n" % (w, h) + px.tobytes()
    lines = [b"P2", b"%d %d" % (w, h), b"255"]
    lines += [b" ".join(b"%d" % v for v in row) for row in px]
    return b"\n".join(lines) + b"\n"


def read_image(path) -> Image:
    return decode_pgm(Path(path).read_bytes())


def write_image(img, path, binary: bool = True) -> None:
    Path(path).write_bytes(encode_pgm(img, binary))
