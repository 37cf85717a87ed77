"""Term-count profiling of the closed-form shift formulas."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .core import HaarError
from .engine import formula_terms

CSV_HEADER = ("N", "k", "avg_terms", "max_terms", "log2L", "ratio")


def count_terms(n_levels: int, k: int, s: int, h: int = 0, i: int = 0, blur: bool = False) -> int:
    """Number of D/d terms the closed form touches for one coefficient.

    1 for a circular remap (k <= t); otherwise the window width i3 - i1 plus
    the three boundary D/d terms.
    """
    nn = n_levels + h
    if not 1 + h <= k <= nn:
        raise HaarError(f"k={k} outside [{1 + h}, {nn}]")
    if not 0 <= s < 1 << nn:
        raise HaarError(f"shift {s} outside [0, {1 << nn})")
    if not 0 <= i < 1 << (nn - k):
        raise HaarError(f"index {i} outside level {nn - k}")
    terms, _ = formula_terms(n_levels, k, i, s, h, blur)
    return len(terms)


@dataclass
class LevelStats:
    n_levels: int
    k: int
    avg_terms: float
    max_terms: int
    population: int


@dataclass
class OpCountReport:
    """Per-(N, k) counts and population-weighted per-N averages."""

    levels: list[LevelStats] = field(default_factory=list)
    averages: dict[int, float] = field(default_factory=dict)
    precision: int = 0

    def ratio(self, n_levels: int) -> float:
        return self.averages[n_levels] / self.log2_length(n_levels)

    def log2_length(self, n_levels: int) -> float:
        if self.precision == 0:
            return float(n_levels)
        return math.log2((1 << n_levels) + (1 << self.precision))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for n in sorted(self.averages):
            rows = [st for st in self.levels if st.n_levels == n]
            log2l = self.log2_length(n)
            for st in rows:
                w.writerow([n, st.k, f"{st.avg_terms:.6f}", st.max_terms, f"{log2l:g}", f"{st.avg_terms / log2l:.6f}"])
            w.writerow([n, "all", f"{self.averages[n]:.6f}", max(st.max_terms for st in rows), f"{log2l:g}", f"{self.ratio(n):.6f}"])
        return buf.getvalue()


def _odd_shifts(nn: int, samples: int):
    odd = range(1, 1 << nn, 2)
    if len(odd) <= samples:
        return list(odd)
    step = len(odd) // samples
    return list(odd[::step][:samples])


def average_complexity_report(n_range, h: int = 0, shifts_per_level: int = 4) -> OpCountReport:
    """Worst-case (odd shift) term counts, averaged over every detail
    coefficient of the output, each level weighted by its population.

    Every coefficient index is counted under a handful of odd shifts and the
    worst per-level average over those shifts is kept.
    """
    n_range = list(n_range)
    if not n_range:
        raise HaarError("empty N range")
    report = OpCountReport(precision=h)
    for n in n_range:
        nn = n + h
        weighted = 0.0
        population = 0
        for k in range(1 + h, nn + 1):
            size = 1 << (nn - k)
            best_avg, best_max = 0.0, 0
            for s in _odd_shifts(nn, shifts_per_level):
                counts = [count_terms(n, k, s, h, i) for i in range(size)]
                best_avg = max(best_avg, sum(counts) / len(counts))
                best_max = max(best_max, max(counts))
            report.levels.append(LevelStats(n, k, best_avg, best_max, size))
            weighted += size * best_avg
            population += size
        report.averages[n] = weighted / population
    return report
