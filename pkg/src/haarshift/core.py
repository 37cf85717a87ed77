"""Haar transform tree: forward/inverse transforms, coefficient layout and D-tables.

Coefficients use the averaging convention: a parent blur is the mean of its two
children and a detail is their half-difference.  A transform with ``reduction``
k of a length ``2**N`` signal is stored flat as

    [A^{N-k}_0 .. A^{N-k}_{2^{N-k}-1}, d^{N-k}_*, d^{N-k+1}_*, ..., d^{N-1}_*]

For k == N the blur block is the single dc value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = "HAARC 1"


class HaarError(ValueError):
    """Raised for malformed signals, layouts or out-of-range tree indices."""


def n_levels_of(length: int) -> int:
    """Return N for a length ``2**N`` (N >= 1), else raise."""
    if length < 2 or length & (length - 1):
        raise HaarError(f"signal length must be a power of two >= 2, got {length}")
    return length.bit_length() - 1


def as_signal(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise HaarError("signal must be one-dimensional")
    n_levels_of(arr.shape[0])
    return arr


@dataclass(frozen=True)
class HaarTransform:
    """Flat Haar coefficients of a ``2**n_levels`` signal after ``reduction`` steps.

    ``precision`` records the 1/2^h lattice the coefficients were produced on
    (0 for ordinary transforms); it does not change the layout.
    """

    n_levels: int
    reduction: int
    coeffs: np.ndarray = field(repr=False)
    precision: int = 0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        if c.ndim != 1 or c.shape[0] != 1 << self.n_levels:
            raise HaarError(
                f"expected {1 << self.n_levels} coefficients, got shape {c.shape}"
            )
        if not 1 <= self.reduction <= self.n_levels:
            raise HaarError(f"reduction {self.reduction} outside [1, {self.n_levels}]")
        if self.precision < 0:
            raise HaarError("precision must be >= 0")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def length(self) -> int:
        return 1 << self.n_levels

    @property
    def coarsest(self) -> int:
        """Level of the blur block, N - k."""
        return self.n_levels - self.reduction

    @property
    def is_full(self) -> bool:
        return self.reduction == self.n_levels

    @property
    def dc(self) -> float:
        """A^0_0; for partial transforms recovered as the blur-block mean."""
        if self.is_full:
            return float(self.coeffs[0])
        return float(np.mean(self.blur))

    @property
    def blur(self) -> np.ndarray:
        return self.coeffs[: 1 << self.coarsest]

    def details(self, level: int) -> np.ndarray:
        """The d^level_* block (read-only view)."""
        if not self.coarsest <= level < self.n_levels:
            raise HaarError(
                f"detail level {level} not stored (levels {self.coarsest}..{self.n_levels - 1})"
            )
        start = detail_offset(level, 0)
        return self.coeffs[start : start + (1 << level)]

    def detail(self, level: int, index: int) -> float:
        if not 0 <= index < 1 << level:
            raise HaarError(f"index {index} out of range at level {level}")
        return float(self.details(level)[index])

    def __eq__(self, other):
        if not isinstance(other, HaarTransform):
            return NotImplemented
        return (
            self.n_levels == other.n_levels
            and self.reduction == other.reduction
            and self.precision == other.precision
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None


def detail_offset(level: int, index: int) -> int:
    """Flat offset of d^level_index.  Independent of the reduction because the
    blur block at level N-k has exactly as many entries as all coarser details
    plus the dc would."""
    return (1 << level) + index


def coeff_position(offset: int, n_levels: int, reduction: int) -> tuple[str, int, int]:
    """Inverse of the layout: flat offset -> (kind, level, index), kind in {'A', 'd'}."""
    if not 0 <= offset < 1 << n_levels:
        raise HaarError(f"offset {offset} out of range")
    coarsest = n_levels - reduction
    if offset < 1 << coarsest:
        return "A", coarsest, offset
    level = offset.bit_length() - 1
    return "d", level, offset - (1 << level)


def _forward_rows(a: np.ndarray, reduction: int) -> np.ndarray:
    """Forward transform along the last axis of a (..., 2**N) array."""
    out = np.empty_like(a, dtype=np.float64)
    blur = np.asarray(a, dtype=np.float64)
    n = blur.shape[-1]
    for _ in range(reduction):
        even, odd = blur[..., 0::2], blur[..., 1::2]
        half = n // 2
        out[..., half:n] = (even - odd) / 2
        blur = (even + odd) / 2
        n = half
    out[..., :n] = blur
    return out


def _inverse_rows(c: np.ndarray, reduction: int) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    length = c.shape[-1]
    n = length >> reduction
    blur = c[..., :n]
    while n < length:
        d = c[..., n : 2 * n]
        nxt = np.empty(c.shape[:-1] + (2 * n,))
        nxt[..., 0::2] = blur + d
        nxt[..., 1::2] = blur - d
        blur = nxt
        n *= 2
    return blur


def forward(x, k: int | None = None) -> HaarTransform:
    """Haar transform of ``x`` with ``k`` reduction steps (default: full)."""
    x = as_signal(x)
    n = n_levels_of(x.shape[0])
    if k is None:
        k = n
    if not 1 <= k <= n:
        raise HaarError(f"reduction {k} outside [1, {n}]")
    return HaarTransform(n, k, _forward_rows(x, k))


def inverse(t: HaarTransform) -> np.ndarray:
    if not isinstance(t, HaarTransform):
        raise HaarError("inverse expects a HaarTransform")
    return _inverse_rows(t.coeffs, t.reduction)


def forward2d(img) -> np.ndarray:
    """Standard separable decomposition: full 1-D transform of every row, then
    of every column of the result."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 2:
        raise HaarError("forward2d expects a 2-D array")
    ny, nx = n_levels_of(a.shape[0]), n_levels_of(a.shape[1])
    rows = _forward_rows(a, nx)
    return _forward_rows(rows.T, ny).T


def inverse2d(c) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 2:
        raise HaarError("inverse2d expects a 2-D array")
    ny, nx = n_levels_of(c.shape[0]), n_levels_of(c.shape[1])
    cols = _inverse_rows(c.T, ny).T
    return _inverse_rows(cols, nx)


# D-tables ------------------------------------------------------------------


@dataclass(frozen=True)
class DTable:
    """D^level_i = A^level_i - A^0_0 for i in [0, 2**level)."""

    level: int
    values: np.ndarray
    source_reduction: int


def _descend(prev: np.ndarray, details: np.ndarray) -> np.ndarray:
    """One step of D^l_i = D^{l-1}_{i//2} +/- d^{l-1}_{i//2} (plus for even i)."""
    nxt = np.empty(prev.shape[:-1] + (2 * prev.shape[-1],))
    nxt[..., 0::2] = prev + details
    nxt[..., 1::2] = prev - details
    return nxt


def d_tables_rows(c: np.ndarray, n_levels: int, reduction: int, upto: int | None = None) -> dict[int, np.ndarray]:
    """All D-tables from level N-k to ``upto`` (default N) for a stack of
    flat coefficient rows of shape (..., 2**N)."""
    if upto is None:
        upto = n_levels
    coarsest = n_levels - reduction
    blur = c[..., : 1 << coarsest]
    table = blur - blur.mean(axis=-1, keepdims=True)
    if reduction == n_levels:
        table = np.zeros_like(blur)  # D^0_0 = 0 exactly
    tables = {coarsest: table}
    for level in range(coarsest + 1, upto + 1):
        prev = level - 1
        table = _descend(table, c[..., 1 << prev : 1 << level])
        tables[level] = table
    return tables


def d_tables(t: HaarTransform, upto: int | None = None) -> dict[int, np.ndarray]:
    """Memoizable per-level D-tables for a single transform."""
    return d_tables_rows(t.coeffs, t.n_levels, t.reduction, upto)


def d_table(t: HaarTransform, level: int) -> DTable:
    lo = 0 if t.is_full else t.coarsest
    if not lo <= level <= t.n_levels:
        raise HaarError(f"D-table level {level} outside [{lo}, {t.n_levels}]")
    values = d_tables(t, upto=level)[level]
    return DTable(level, values, t.reduction)


def d_table_extended(t: HaarTransform, level: int, index: int) -> float:
    """D at a level below the leaves of a conceptually upsampled tree.

    Added levels carry zero details, so D^{N+h0}_i = D^N_{i >> h0}.
    """
    if not t.is_full:
        raise HaarError("extended D-table requires a fully decimated transform")
    extra = level - t.n_levels
    if extra < 0:
        raise HaarError(f"extended level {level} is above the leaves (N={t.n_levels})")
    if not 0 <= index < 1 << level:
        raise HaarError(f"index {index} out of range at level {level}")
    return float(d_tables(t)[t.n_levels][index >> extra])


# Text formats ----------------------------------------------------------------


def format_haarc(t: HaarTransform) -> str:
    lines = [MAGIC, f"N={t.n_levels} k={t.reduction} h={t.precision}"]
    lines.extend(repr(float(v)) for v in t.coeffs)
    return "\n".join(lines) + "\n"


def parse_haarc(text: str) -> HaarTransform:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != MAGIC:
        raise HaarError("missing 'HAARC 1' magic line")
    if len(lines) < 2:
        raise HaarError("missing N/k/h header line")
    fields = {}
    for tok in lines[1].split():
        key, sep, val = tok.partition("=")
        if not sep or key not in ("N", "k", "h"):
            raise HaarError(f"bad header token {tok!r}")
        try:
            fields[key] = int(val)
        except ValueError:
            raise HaarError(f"bad header value {tok!r}") from None
    if set(fields) != {"N", "k", "h"}:
        raise HaarError("header must define N, k and h")
    try:
        coeffs = np.array([float(v) for v in lines[2:]])
    except ValueError as exc:
        raise HaarError(f"bad coefficient line: {exc}") from None
    n = fields["N"]
    if n < 1 or len(coeffs) != 1 << n:
        raise HaarError(f"expected {1 << max(n, 0)} coefficients, found {len(coeffs)}")
    return HaarTransform(n, fields["k"], coeffs, fields["h"])


def write_haarc(t: HaarTransform, path) -> None:
    Path(path).write_text(format_haarc(t))


def read_haarc(path) -> HaarTransform:
    return parse_haarc(Path(path).read_text())


def read_signal(path) -> np.ndarray:
    """One real per line; blank lines and '#' comments are ignored."""
    values = []
    for ln in Path(path).read_text().splitlines():
        ln = ln.split("#", 1)[0].strip()
        if ln:
            values.append(float(ln))
    return as_signal(values)


def write_signal(x, path) -> None:
    Path(path).write_text("".join(f"{float(v)!r}\n" for v in np.asarray(x)))
