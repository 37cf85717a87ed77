from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haarshift.core import HaarError, HaarTransform, forward, forward2d
from haarshift.engine import (
    DyadicShift,
    formula_terms,
    shift_2d,
    shift_indices,
    shift_rows,
    shift_transform,
    shift_transform_fractional,
    shifted_blur,
    shifted_detail,
    shifted_detail_fractional,
    two_adic_valuation,
)
from haarshift.reference import reference_shifted_transform, reference_shifted_transform2d

X = [4.0, 2.0, 6.0, 0.0]
T = forward(X)
TP = forward(X, 1)


@pytest.mark.parametrize("s, t", [(1, 0), (12, 2), (256, 8), (3, 0), (40, 3)])
def test_two_adic_valuation(s, t):
    assert two_adic_valuation(s) == t
    assert (s >> t) % 2 == 1


def test_two_adic_valuation_rejects_zero():
    with pytest.raises(HaarError):
        two_adic_valuation(0)


def test_shift_indices_half_integral():
    ix = shift_indices(1, 0, 1)
    assert ix.t == 0 and ix.i2_half and ix.i3 == ix.i1 + 1
    ix = shift_indices(3, 1, 3)
    assert (ix.i1, ix.i2, ix.i3, ix.i2_half) == (5, 7, 9, False)


@pytest.mark.parametrize("k, i, s, expected", [(2, 0, 1, 1.0), (1, 0, 1, -2.0), (1, 0, 2, 3.0)])
def test_shifted_detail_examples(k, i, s, expected):
    assert shifted_detail(T, k, i, s) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("i, s, expected", [(0, 1, 4.0), (1, 1, 2.0), (0, 2, 3.0)])
def test_shifted_blur_examples(i, s, expected):
    assert shifted_blur(TP, i, s) == pytest.approx(expected, abs=1e-12)


def test_shifted_blur_needs_partial():
    with pytest.raises(HaarError):
        shifted_blur(T, 0, 1)


@pytest.mark.parametrize(
    "args",
    [(T, 3, 0, 1), (T, 1, 2, 1), (T, 1, 0, 4), (T, 0, 0, 1), (T, 1, 0, -1)],
)
def test_shifted_detail_range_errors(args):
    with pytest.raises(HaarError):
        shifted_detail(*args)


def test_shift_transform_example():
    np.testing.assert_allclose(shift_transform(T, 1).coeffs, [3, 1, -2, -2], atol=1e-12)
    assert shift_transform(T, 0) == T


@pytest.mark.parametrize("n", range(1, 7))
def test_per_coefficient_ops_match_oracle(n, rng):
    x = rng.normal(size=1 << n)
    for k in range(1, n + 1):
        t = forward(x, k)
        full = forward(x)
        for s in range(1 << n):
            ref = reference_shifted_transform(x, s, k)
            for i in range(1 << (n - k)):
                assert shifted_detail(full, k, i, s) == pytest.approx(ref.detail(n - k, i), abs=1e-9)
                if k < n:
                    assert shifted_blur(t, i, s) == pytest.approx(ref.coeffs[i], abs=1e-9)


@pytest.mark.parametrize("n", range(1, 9))
def test_shift_transform_matches_oracle(n, rng):
    x = rng.normal(size=1 << n)
    for k in range(1, n + 1):
        t = forward(x, k)
        for s in range(1 << n):
            np.testing.assert_allclose(
                shift_transform(t, s).coeffs, reference_shifted_transform(x, s, k).coeffs, atol=1e-9, rtol=0
            )


def test_fractional_examples():
    assert shifted_detail_fractional(T, 1, 2, 0, 1) == pytest.approx(-0.5)
    assert shifted_detail_fractional(T, 1, 3, 0, 1) == pytest.approx(0.5)
    for k in (2, 3):
        for i in range(1 << (3 - k)):
            assert shifted_detail_fractional(T, 1, k, i, 2) == pytest.approx(shifted_detail(T, k - 1, i, 1))
    half = shift_transform_fractional(T, DyadicShift.of(1, 1))
    np.testing.assert_allclose(half.coeffs, [3, 0.5, -0.5, 0.5], atol=1e-12)
    # two half shifts compose like the oracle chain: [3,4,3,2] -> [3.5,3.5,2.5,2.5]
    twice = shift_transform_fractional(half, DyadicShift.of(1, 1))
    np.testing.assert_allclose(twice.coeffs, [3, 0.5, 0, 0], atol=1e-12)
    assert shift_transform_fractional(T, DyadicShift.of(0, 3)) == T


@pytest.mark.parametrize("n", range(1, 6))
@pytest.mark.parametrize("h", range(1, 4))
def test_fractional_coefficients_match_oracle(n, h, rng):
    x = rng.normal(size=1 << n)
    t = forward(x)
    for s in range(1 << (n + h)):
        ref = reference_shifted_transform(x, (s, h))
        for k in range(1 + h, n + h + 1):
            lv = n + h - k
            for i in range(1 << lv):
                got = shifted_detail_fractional(t, h, k, i, s)
                assert got == pytest.approx(ref.detail(lv, i), abs=1e-9)


def test_fractional_requires_full():
    with pytest.raises(HaarError):
        shift_transform_fractional(TP, DyadicShift.of(1, 1))
    with pytest.raises(HaarError):
        shifted_detail_fractional(T, 1, 1, 0, 1)


def test_fractional_divisor_exponent():
    # N = 4, h = 2, odd s: window on level N' - 1 = 5, beyond the stored tree
    terms, divisor = formula_terms(4, 5, 0, 3, 2)
    assert divisor == 2 ** (5 - 0)
    assert all(term.kind == "D" for term in terms)
    assert {term.level for term in terms} == {5}


def test_blur_middle_weight_is_two():
    terms, divisor = formula_terms(4, 3, 0, 1, blur=True)
    weights = [term.weight for term in terms if term.kind == "D"]
    assert weights == [1, 2, 2, 2, 1] and divisor == 8


def test_composition(rng):
    for _ in range(300):
        n = int(rng.integers(1, 9))
        k = int(rng.integers(1, n + 1))
        s1, s2 = (int(v) for v in rng.integers(0, 1 << n, 2))
        t = forward(rng.normal(size=1 << n), k)
        np.testing.assert_allclose(
            shift_transform(shift_transform(t, s1), s2).coeffs,
            shift_transform(t, (s1 + s2) % (1 << n)).coeffs,
            atol=1e-9,
            rtol=0,
        )


def test_dc_bit_identical(rng):
    x = rng.normal(size=64)
    t = forward(x)
    for s in range(64):
        assert shift_transform(t, s).coeffs[0] == t.coeffs[0]
    for s in range(1, 256):
        assert shift_transform_fractional(t, DyadicShift.of(s, 2)).coeffs[0] == t.coeffs[0]


def test_consistency_across_decimation_depth(rng):
    x = rng.normal(size=64)
    for s in range(1, 64):
        deep = shift_transform(forward(x, 6), s).coeffs
        for k in range(1, 6):
            shallow = shift_transform(forward(x, k), s).coeffs
            start = 1 << (6 - k)
            np.testing.assert_allclose(shallow[start:], deep[start:], atol=1e-12)


@pytest.mark.parametrize("kk", range(0, 5))
def test_level_cascade(kk, rng):
    n = 6
    t = forward(rng.normal(size=1 << n))
    for u in range(1, 1 << (n - kk)):
        out = shift_transform(t, (u << kk) % (1 << n))
        for lv in range(n - kk, n):
            step = u << (lv - (n - kk))
            np.testing.assert_allclose(out.details(lv), np.roll(t.details(lv), -step), atol=1e-12)


def test_shift_rows_periodic(rng):
    c = np.array([forward(r).coeffs for r in rng.normal(size=(5, 16))])
    base = shift_rows(c, [3, 5, 7, 0, 9], 1)
    wrapped = shift_rows(c, [3 + 32, 5 + 64, 7 + 32, 32, 9 + 96], 1)
    np.testing.assert_allclose(base, wrapped, atol=0)
    np.testing.assert_array_equal(shift_rows(c, [0, 0, 0, 0, 0]), c)


def test_shift_rows_threads_are_deterministic(rng, monkeypatch):
    c = np.array([forward(r).coeffs for r in rng.normal(size=(40, 32))])
    s = rng.integers(0, 256, 40)
    single = shift_rows(c, s, 3)
    monkeypatch.setenv("HAARSHIFT_THREADS", "4")
    np.testing.assert_array_equal(shift_rows(c, s, 3), single)


def test_shift_rows_errors():
    c = np.zeros((2, 8))
    with pytest.raises(HaarError):
        shift_rows(c, [1])
    with pytest.raises(HaarError):
        shift_rows(c, [1, 1], 1, reduction=2)
    with pytest.raises(HaarError):
        shift_rows(np.zeros(8), [1])


def test_shift_2d_examples(rng):
    img = rng.normal(size=(4, 4))
    c = forward2d(img)
    np.testing.assert_array_equal(shift_2d(c, 0, 0), c)
    np.testing.assert_allclose(shift_2d(c, 1, 0), forward2d(np.roll(img, -1, axis=1)), atol=1e-12)
    with pytest.raises(HaarError):
        shift_2d(np.zeros((3, 4)), 1, 0)


def test_shift_2d_random_fractional(rng):
    img = rng.normal(size=(8, 8))
    c = forward2d(img)
    worst = 0.0
    for _ in range(100):
        sx = DyadicShift.of(int(rng.integers(0, 64)), int(rng.integers(0, 4)))
        sy = DyadicShift.of(int(rng.integers(0, 64)), int(rng.integers(0, 4)))
        dev = np.max(np.abs(shift_2d(c, sx, sy) - reference_shifted_transform2d(img, sx, sy)))
        worst = max(worst, float(dev))
    assert worst < 1e-9


@pytest.mark.parametrize(
    "text, num, h",
    [("5", 5, 0), ("5/8", 5, 3), ("4/8", 1, 1), ("0/4", 0, 0), (" 3 / 2 ", 3, 1)],
)
def test_dyadic_parse(text, num, h):
    sh = DyadicShift.parse(text)
    assert (sh.numerator, sh.precision) == (num, h)
    assert sh.value == Fraction(num, 1 << h)


@pytest.mark.parametrize("text", ["", "1/3", "-1", "a/2", "1/0"])
def test_dyadic_parse_errors(text):
    with pytest.raises(HaarError):
        DyadicShift.parse(text)


def test_dyadic_canonical():
    with pytest.raises(HaarError):
        DyadicShift(2, 1)
    assert DyadicShift.of(12, 3) == DyadicShift(3, 1)
    assert str(DyadicShift.of(5, 3)) == "5/8"
    assert DyadicShift.of(3, 1).at_precision(3) == 12
    assert DyadicShift.of(37, 1).reduced(4) == 5


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 6).flatmap(
        lambda n: st.tuples(
            st.lists(st.floats(-100, 100), min_size=1 << n, max_size=1 << n),
            st.integers(0, 3),
            st.integers(0, (1 << (n + 3)) - 1),
        )
    )
)
def test_fractional_shift_property(case):
    x, h, s = case
    s %= 1 << (int(np.log2(len(x))) + h)
    sh = DyadicShift.of(s, h)
    got = shift_transform_fractional(forward(x), sh)
    np.testing.assert_allclose(got.coeffs, reference_shifted_transform(x, sh).coeffs, atol=1e-9, rtol=0)


def test_precision_recorded():
    out = shift_transform_fractional(T, DyadicShift.of(1, 2))
    assert isinstance(out, HaarTransform) and out.precision == 2
