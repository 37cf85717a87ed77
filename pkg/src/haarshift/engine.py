"""Closed-form phase shifting in the Haar domain.

A shift ``s`` maps x(n) -> x((n + s) mod 2^N).  Dyadic shifts s/2^h are handled
on a conceptual tree extended by h levels of zero details, so that
D^{N+h0}_i = D^N_{i >> h0} and nothing is ever upsampled.

Two paths compute the same numbers:

* ``shifted_detail`` / ``shifted_blur`` / ``shifted_detail_fractional`` expand
  the closed form term by term for one coefficient (``formula_terms`` exposes
  the expansion; the profiler counts it).
* ``shift_rows`` assembles whole transforms for a stack of rows at once, using
  circular prefix sums over memoized D-tables for the windowed sums.
"""

from __future__ import annotations

import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .core import HaarError, HaarTransform, d_tables, d_tables_rows, n_levels_of


@dataclass(frozen=True)
class DyadicShift:
    """Shift of ``numerator / 2**precision`` samples, kept in lowest terms."""

    numerator: int
    precision: int = 0

    def __post_init__(self):
        if self.numerator < 0 or self.precision < 0:
            raise HaarError("dyadic shift needs numerator >= 0 and precision >= 0")
        if self.precision > 0 and self.numerator != 0 and self.numerator % 2 == 0:
            raise HaarError(
                f"{self.numerator}/2^{self.precision} is not canonical; use DyadicShift.of"
            )
        if self.numerator == 0 and self.precision != 0:
            raise HaarError("zero shift must have precision 0; use DyadicShift.of")

    @classmethod
    def of(cls, numerator: int, precision: int = 0) -> "DyadicShift":
        """Canonical form of numerator/2**precision (numerator >= 0)."""
        if numerator < 0 or precision < 0:
            raise HaarError("dyadic shift needs numerator >= 0 and precision >= 0")
        if numerator == 0:
            return cls(0, 0)
        while precision > 0 and numerator % 2 == 0:
            numerator //= 2
            precision -= 1
        return cls(numerator, precision)

    @classmethod
    def parse(cls, text: str) -> "DyadicShift":
        """Accept ``"s"`` or ``"s/D"`` with D a power of two."""
        m = re.fullmatch(r"\s*(\d+)\s*(?:/\s*(\d+)\s*)?", text)
        if not m:
            raise HaarError(f"bad shift {text!r}: expected 's' or 's/D'")
        num = int(m.group(1))
        den = int(m.group(2) or 1)
        if den < 1 or den & (den - 1):
            raise HaarError(f"bad shift {text!r}: denominator must be a power of two")
        return cls.of(num, den.bit_length() - 1)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.precision)

    def reduced(self, n_levels: int) -> int:
        """Numerator modulo the extended lattice length 2^(N+h)."""
        return self.numerator % (1 << (n_levels + self.precision))

    def at_precision(self, h: int) -> int:
        """Numerator expressed on the 1/2^h lattice (h >= self.precision)."""
        if h < self.precision:
            raise HaarError(f"{self} needs precision >= {self.precision}")
        return self.numerator << (h - self.precision)

    def __str__(self):
        if self.precision == 0:
            return str(self.numerator)
        return f"{self.numerator}/{1 << self.precision}"


def two_adic_valuation(s: int) -> int:
    """Largest t with 2^t dividing s."""
    if s < 1:
        raise HaarError("two-adic valuation needs s >= 1 (s = 0 is the identity shift)")
    return (s & -s).bit_length() - 1


class ShiftIndices(NamedTuple):
    t: int
    u: int
    i1: int
    i2: int  # floor of the midpoint when i2_half
    i3: int
    i2_half: bool


def shift_indices(k: int, i: int, s: int) -> ShiftIndices:
    """Window bounds at level N'-t-1 for selector ``k`` > t.

    i1 = 2^{k-t-1} i + floor(s / 2^{t+1}), i3 = i1 + 2^{k-t-1}, i2 the midpoint
    (half-integral exactly when k = t + 1).
    """
    t = two_adic_valuation(s)
    if k <= t:
        raise HaarError(f"k={k} <= t={t}: circular remap, no window")
    span = 1 << (k - t - 1)
    i1 = span * i + (s >> (t + 1))
    return ShiftIndices(t, s >> t, i1, i1 + span // 2, i1 + span, span == 1)


class Term(NamedTuple):
    weight: int
    kind: str  # 'D', 'd' or 'A' (circular remap)
    level: int  # level in the (possibly extended) tree
    index: int


def formula_terms(n_levels: int, k: int, i: int, s: int, h: int = 0, blur: bool = False) -> tuple[list[Term], int]:
    """Expand the closed form for the coefficient at level N+h-k, index i.

    Returns ``(terms, divisor)``; the shifted coefficient (minus A^0_0 for blur)
    is ``sum(w * value) / divisor``.  Indices are already reduced modulo the
    level size.  For fractional shifts whose window sits on added levels the
    detail terms are identically zero and are not emitted.
    """
    nn = n_levels + h
    level = nn - k
    if s == 0 or (k <= two_adic_valuation(s)):
        shift = 0 if s == 0 else s >> k
        return [Term(1, "A" if blur else "d", level, (i + shift) % (1 << level))], 1
    t, _, i1, i2, i3, half = shift_indices(k, i, s)
    lv = nn - t - 1
    size = 1 << lv
    with_details = lv < n_levels
    terms = [Term(1, "D", lv, i1 % size)]
    if blur:
        terms += [Term(2, "D", lv, m % size) for m in range(i1 + 1, i3)]
        terms.append(Term(1, "D", lv, i3 % size))
        if with_details:
            terms += [Term(-1, "d", lv, i1 % size), Term(1, "d", lv, i3 % size)]
        return terms, 1 << (k - t)
    if not half:
        terms += [Term(2, "D", lv, m % size) for m in range(i1 + 1, i2)]
        terms += [Term(-2, "D", lv, m % size) for m in range(i2 + 1, i3)]
    terms.append(Term(-1, "D", lv, i3 % size))
    if with_details:
        terms.append(Term(-1, "d", lv, i1 % size))
        if not half:
            terms.append(Term(2, "d", lv, i2 % size))
        terms.append(Term(-1, "d", lv, i3 % size))
    return terms, 1 << (k - t)


def _evaluate(t: HaarTransform, terms: list[Term], divisor: int) -> float:
    tables = d_tables(t)
    n = t.n_levels
    total = 0.0
    for w, kind, level, index in terms:
        if kind == "D":
            if level > n:
                total += w * tables[n][index >> (level - n)]
            else:
                total += w * tables[level][index]
        elif kind == "d":
            total += w * t.coeffs[(1 << level) + index]
        else:
            total += w * t.blur[index]
    return total / divisor


def _check_shift(s: int, limit: int):
    if not 0 <= s < limit:
        raise HaarError(f"shift {s} outside [0, {limit})")


def shifted_detail(t: HaarTransform, k: int, i: int, s: int) -> float:
    """d^{N-k}_i of the transform of x shifted by integer ``s``."""
    n = t.n_levels
    if not 1 <= k <= t.reduction:
        raise HaarError(f"k={k} outside [1, {t.reduction}]")
    if not 0 <= i < 1 << (n - k):
        raise HaarError(f"index {i} outside level {n - k}")
    _check_shift(s, 1 << n)
    return _evaluate(t, *formula_terms(n, k, i, s))


def shifted_blur(t: HaarTransform, i: int, s: int) -> float:
    """A^{N-k}_i of the partially transformed signal shifted by ``s``."""
    n, k = t.n_levels, t.reduction
    if t.is_full:
        raise HaarError("shifted_blur needs a partial transform (k < N)")
    if not 0 <= i < 1 << (n - k):
        raise HaarError(f"index {i} outside level {n - k}")
    _check_shift(s, 1 << n)
    terms, divisor = formula_terms(n, k, i, s, blur=True)
    if terms[0].kind == "A":
        return _evaluate(t, terms, divisor)
    return t.dc + _evaluate(t, terms, divisor)


def shifted_detail_fractional(t: HaarTransform, h: int, k: int, i: int, s: int) -> float:
    """d^{N+h-k}_i after shifting by s/2^h, for k in [1+h, N+h]."""
    if not t.is_full:
        raise HaarError("fractional shifts need a fully decimated transform")
    if h < 0:
        raise HaarError("h must be >= 0")
    n = t.n_levels
    nn = n + h
    if not 1 + h <= k <= nn:
        raise HaarError(f"k={k} outside [{1 + h}, {nn}]")
    if not 0 <= i < 1 << (nn - k):
        raise HaarError(f"index {i} outside level {nn - k}")
    _check_shift(s, 1 << nn)
    return _evaluate(t, *formula_terms(n, k, i, s, h))


# Whole-transform assembly ------------------------------------------------------


class _Window:
    """Virtual table T[m] = base[(m // rep) % P] with circular prefix sums,
    plus the detail row at the same level (None when it is identically zero).

    P and rep are powers of two, so index arithmetic is shifts and masks.
    """

    def __init__(self, base: np.ndarray, rep: int, details: np.ndarray | None):
        rows, size = base.shape
        self.rep_bits = rep.bit_length() - 1
        self.size_bits = size.bit_length() - 1
        self.mask = size - 1
        self.base = np.ascontiguousarray(base).ravel()
        self.details = None if details is None else np.ascontiguousarray(details).ravel()
        cs = np.zeros((rows, size + 1))
        np.cumsum(base, axis=-1, out=cs[:, 1:])
        self.total = cs[:, -1:]
        self.cs = cs.ravel()
        self.row_base = (np.arange(rows) * size)[:, None]
        self.row_cs = (np.arange(rows) * (size + 1))[:, None]

    def at(self, m):
        return self.base[self.row_base + ((m >> self.rep_bits) & self.mask)]

    def detail(self, m):
        return self.details[self.row_base + (m & self.mask)]

    def _prefix(self, n):
        q = n >> self.rep_bits
        pos = q & self.mask
        whole = (q >> self.size_bits) * self.total + self.cs[self.row_cs + pos]
        if not self.rep_bits:
            return whole
        r = n & ((1 << self.rep_bits) - 1)
        return whole * (1 << self.rep_bits) + r * self.base[self.row_base + pos]

    def sum(self, a, b):
        """sum_{a <= m < b} T[m], elementwise (a <= b)."""
        return self._prefix(b) - self._prefix(a)


def _window_for(coeffs, tables, n, lv):
    if lv <= n:
        base, rep = tables[lv], 1
    else:
        base, rep = tables[n], 1 << (lv - n)
    details = coeffs[:, 1 << lv : 2 << lv] if lv < n else None
    return _Window(base, rep, details)


def _level_values(win: _Window, size_out, k, t, s, blur):
    """Shifted coefficients of one level for rows sharing valuation t (k > t)."""
    span = 1 << (k - t - 1)
    i1 = span * np.arange(size_out)[None, :] + (s >> (t + 1))[:, None]
    i3 = i1 + span
    if blur:
        acc = win.at(i1) + 2 * win.sum(i1 + 1, i3) + win.at(i3)
        if win.details is not None:
            acc += win.detail(i3) - win.detail(i1)
    elif span == 1:
        acc = win.at(i1) - win.at(i3)
        if win.details is not None:
            acc -= win.detail(i1) + win.detail(i3)
    else:
        i2 = i1 + span // 2
        acc = win.at(i1) + 2 * win.sum(i1 + 1, i2) - 2 * win.sum(i2 + 1, i3) - win.at(i3)
        if win.details is not None:
            acc += 2 * win.detail(i2) - win.detail(i1) - win.detail(i3)
    return acc / (1 << (k - t))


def _shift_group(coeffs, n, reduction, s, t, h):
    """Shift a stack of rows that share the valuation t of their shifts (s > 0)."""
    nn = n + h
    coarsest = n - reduction
    lv = nn - t - 1  # every windowed level reads this one
    out = np.empty_like(coeffs)
    rows = np.arange(coeffs.shape[0])[:, None]
    win = None
    if reduction + h > t:
        tables = d_tables_rows(coeffs, n, reduction, upto=min(lv, n))
        win = _window_for(coeffs, tables, n, lv)
    for level in range(coarsest, n):
        k = nn - level
        size = 1 << level
        if k <= t:
            idx = (np.arange(size)[None, :] + (s >> k)[:, None]) % size
            out[:, size : 2 * size] = coeffs[:, size : 2 * size][rows, idx]
        else:
            out[:, size : 2 * size] = _level_values(win, size, k, t, s, False)
    size = 1 << coarsest
    if reduction == n:
        out[:, 0] = coeffs[:, 0]
    elif reduction <= t:
        idx = (np.arange(size)[None, :] + (s >> reduction)[:, None]) % size
        out[:, :size] = coeffs[:, :size][rows, idx]
    else:
        dc = coeffs[:, :size].mean(axis=-1, keepdims=True)
        out[:, :size] = dc + _level_values(win, size, reduction, t, s, True)
    return out


def worker_count() -> int:
    """Worker cap from HAARSHIFT_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("HAARSHIFT_THREADS", "1")))
    except ValueError:
        return 1


def shift_rows(coeffs, numerators, h: int = 0, reduction: int | None = None) -> np.ndarray:
    """Shift every row of a (R, 2^N) stack of flat transforms by its own
    ``numerators[r] / 2**h``.

    Rows must share the reduction; fractional shifts (h > 0) require full
    transforms and return coefficients at the original resolution.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.ndim != 2:
        raise HaarError("shift_rows expects a 2-D stack of transforms")
    n = n_levels_of(coeffs.shape[1])
    if reduction is None:
        reduction = n
    if not 1 <= reduction <= n:
        raise HaarError(f"reduction {reduction} outside [1, {n}]")
    if h > 0 and reduction != n:
        raise HaarError("fractional shifts need fully decimated transforms")
    s_all = np.asarray(numerators, dtype=np.int64).reshape(-1)
    if s_all.shape[0] != coeffs.shape[0]:
        raise HaarError("one shift numerator per row required")
    s_all = s_all % (1 << (n + h))

    out = coeffs.copy()
    moving = s_all != 0
    if not moving.any():
        return out
    t_all = np.zeros_like(s_all)
    t_all[moving] = [two_adic_valuation(int(v)) for v in s_all[moving]]
    jobs = []
    for t in np.unique(t_all[moving]):
        sel = np.flatnonzero(moving & (t_all == t))
        for chunk in np.array_split(sel, min(worker_count(), sel.size)):
            jobs.append(chunk)

    def run(sel):
        return sel, _shift_group(coeffs[sel], n, reduction, s_all[sel], int(t_all[sel[0]]), h)

    workers = worker_count()
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(sel) for sel in jobs]
    for sel, vals in results:
        out[sel] = vals
    return out


def shift_transform(t: HaarTransform, s: int) -> HaarTransform:
    """Transform of x shifted by integer ``s`` computed from ``t`` alone."""
    _check_shift(s, 1 << t.n_levels)
    if s == 0:
        return t
    c = shift_rows(t.coeffs[None, :], [s], 0, t.reduction)[0]
    return HaarTransform(t.n_levels, t.reduction, c, t.precision)


def shift_transform_fractional(t: HaarTransform, sh: DyadicShift) -> HaarTransform:
    """Full transform, at the original resolution, of x shifted by ``sh``."""
    if not t.is_full:
        raise HaarError("fractional shifts need a fully decimated transform")
    s = sh.reduced(t.n_levels)
    if s == 0:
        return t
    c = shift_rows(t.coeffs[None, :], [s], sh.precision)[0]
    return HaarTransform(t.n_levels, t.reduction, c, max(t.precision, sh.precision))


def _as_shift(sh) -> DyadicShift:
    if isinstance(sh, DyadicShift):
        return sh
    if isinstance(sh, (int, np.integer)):
        return DyadicShift.of(int(sh))
    raise HaarError(f"unsupported shift {sh!r}")


def shift_2d(c2, sx, sy) -> np.ndarray:
    """Shift a 2-D separable transform: x-axis along coefficient rows, then
    y-axis along coefficient columns."""
    c2 = np.asarray(c2, dtype=np.float64)
    if c2.ndim != 2:
        raise HaarError("shift_2d expects a 2-D coefficient array")
    ny, nx = n_levels_of(c2.shape[0]), n_levels_of(c2.shape[1])
    sx, sy = _as_shift(sx), _as_shift(sy)
    out = c2
    if sx.reduced(nx):
        out = shift_rows(out, np.full(out.shape[0], sx.reduced(nx)), sx.precision)
    if sy.reduced(ny):
        out = shift_rows(out.T, np.full(out.shape[1], sy.reduced(ny)), sy.precision).T
    return np.ascontiguousarray(out)
