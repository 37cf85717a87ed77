import csv
import io
from fractions import Fraction

import pytest

from haarshift.core import HaarError
from haarshift.engine import shift_indices
from haarshift.profiling import CSV_HEADER, average_complexity_report, count_terms


@pytest.mark.parametrize("n, k, s", [(4, 1, 2), (4, 2, 4), (8, 3, 8), (8, 8, 0)])
def test_remap_counts_one(n, k, s):
    assert count_terms(n, k, s) == 1


@pytest.mark.parametrize("k", range(1, 9))
@pytest.mark.parametrize("s", [1, 3, 77, 255])
def test_odd_shift_counts(k, s):
    ix = shift_indices(k, 0, s)
    assert count_terms(8, k, s) == ix.i3 - ix.i1 + 3 == (1 << (k - 1)) + 3


def test_count_n8_k8():
    assert count_terms(8, 8, 1) == 131


def test_count_independent_of_odd_shift_and_index():
    for k in range(1, 6):
        counts = {count_terms(5, k, s, i=i) for s in range(1, 32, 2) for i in range(1 << (5 - k))}
        assert counts == {(1 << (k - 1)) + 3}


def test_n2_average_by_hand():
    # k=1: two coefficients, 4 terms each; k=2: one coefficient, 5 terms
    rep = average_complexity_report([2])
    assert Fraction(rep.averages[2]).limit_denominator(10) == Fraction(13, 3)


def test_ratio_bounded_and_smooth():
    rep = average_complexity_report(range(4, 13))
    for n in range(4, 12):
        q = rep.ratio(n) / rep.ratio(n + 1)
        assert 0.5 <= q <= 2


def test_fractional_budget_uses_extended_length():
    rep = average_complexity_report(range(4, 9), h=3)
    assert rep.log2_length(4) == pytest.approx(4.584962500721156)
    assert all(rep.ratio(n) < 5 for n in range(4, 9))


def test_csv_layout():
    text = average_complexity_report([3, 4]).to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_HEADER == ("N", "k", "avg_terms", "max_terms", "log2L", "ratio")
    assert [r[1] for r in rows[1:]] == ["1", "2", "3", "all", "1", "2", "3", "4", "all"]


@pytest.mark.parametrize("args", [(4, 0, 1), (4, 5, 1), (4, 2, 16), (4, 2, 1, 0, 4)])
def test_count_range_errors(args):
    with pytest.raises(HaarError):
        count_terms(*args)
