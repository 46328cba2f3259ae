"""Truncated and Laurent series arithmetic against naive references."""

import pytest
from hypothesis import given, settings, strategies as st

from orderzeta.errors import PrecisionExhausted
from orderzeta.fq import Fq, FqSpec
from orderzeta.series import (LaurentSeries, TruncatedSeries, ser_mul,
                              ser_unit_inv, ser_val)

F3 = Fq(FqSpec.parse("3"))
F4 = Fq(FqSpec.parse("4"))
F5 = Fq(FqSpec.parse("5"))


def _naive_mul_prime(a, b, p, n):
    out = [0] * n
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j < n:
                out[i + j] = (out[i + j] + x * y) % p
    return tuple(out)


def test_from_poly_pads_and_truncates():
    s = TruncatedSeries.from_poly(F3, (1, 2), 5)
    assert s.coeffs == (1, 2, 0, 0, 0)
    s = TruncatedSeries.from_poly(F3, (1, 2, 1, 1, 1, 1), 3)
    assert s.coeffs == (1, 2, 1)


def test_precision_drops_to_minimum_under_arithmetic():
    a = TruncatedSeries.from_poly(F5, (1, 1, 1), 8)
    b = TruncatedSeries.from_poly(F5, (2, 3), 4)
    assert (a + b).precision == 4
    assert (a * b).precision == 4


def test_valuation_sentinel():
    assert TruncatedSeries.zero(F3, 6).valuation() is None
    assert TruncatedSeries.monomial(F3, 4, 6).valuation() == 4
    assert ser_val((0, 0, 0)) is None


def test_geometric_series_inverse_over_f2():
    f2 = Fq(FqSpec.parse("2"))
    one_minus_t = TruncatedSeries.from_poly(f2, (1, 1), 10)  # 1 + t = 1 - t
    inv = one_minus_t.unit_inverse()
    assert inv.coeffs == (1,) * 10
    assert (one_minus_t * inv).coeffs == (1,) + (0,) * 9


def test_unit_inverse_round_trip_over_f9():
    f9 = Fq(FqSpec.parse("9"))
    a = TruncatedSeries.from_poly(f9, (3, 1, 7, 0, 2), 12)
    assert (a * a.unit_inverse()) == TruncatedSeries.one(f9, 12)


def test_shifts():
    s = TruncatedSeries.from_poly(F3, (1, 2), 4)
    up = s.shift_up(2)
    assert up.coeffs == (0, 0, 1, 2, 0, 0)
    assert up.precision == 6
    down = up.shift_down(2)
    assert down.coeffs == (1, 2, 0, 0)
    with pytest.raises(PrecisionExhausted):
        s.shift_down(1)


def test_agrees_with_compares_common_prefix():
    a = TruncatedSeries.from_poly(F3, (1, 2, 1), 3)
    b = TruncatedSeries.from_poly(F3, (1, 2, 1, 2), 6)
    assert a.agrees_with(b)
    assert not a.agrees_with(TruncatedSeries.from_poly(F3, (2,), 3))


def test_laurent_inverse_with_pole():
    x = LaurentSeries(F3, 2, (1, 1, 0, 0, 0, 0))  # t^2 * (1 + t)
    inv = x.inverse()
    assert inv.valuation() == -2
    prod = x * inv
    assert prod.valuation() == 0
    assert prod.coeffs[ser_val(prod.coeffs)] == 1
    one = LaurentSeries.one(F3, prod.abs_prec)
    assert prod.agrees_with(one)


def test_laurent_to_truncated_rejects_poles():
    x = LaurentSeries(F3, -1, (2, 1, 0, 0))
    with pytest.raises(PrecisionExhausted):
        x.to_truncated(3)
    y = LaurentSeries(F3, -1, (0, 1, 2, 0, 0))
    assert y.to_truncated(3).coeffs == (1, 2, 0)


def test_laurent_inverse_of_apparent_zero_is_refused():
    z = LaurentSeries.zero(F3, 5)
    with pytest.raises(PrecisionExhausted):
        z.inverse()


def test_laurent_addition_aligns_windows():
    a = LaurentSeries(F3, -2, (1, 0, 1, 0, 0, 0))   # t^-2 + 1 + O(t^4)
    b = LaurentSeries(F3, 0, (2, 2, 0, 0))           # 2 + 2t + O(t^4)
    s = a + b
    assert s.valuation() == -2
    # the t^0 digit is 1 + 2 = 0 over F_3
    window = {s.shift + i: c for i, c in enumerate(s.coeffs)}
    assert window[-2] == 1 and window[0] == 0 and window[1] == 2


@settings(max_examples=80, deadline=None)
@given(
    a=st.lists(st.integers(0, 4), min_size=6, max_size=6),
    b=st.lists(st.integers(0, 4), min_size=6, max_size=6),
    c=st.lists(st.integers(0, 4), min_size=6, max_size=6),
)
def test_ring_axioms_and_naive_product_over_f5(a, b, c):
    n = 6
    sa = TruncatedSeries(F5, a)
    sb = TruncatedSeries(F5, b)
    sc = TruncatedSeries(F5, c)
    assert (sa * sb).coeffs == _naive_mul_prime(a, b, 5, n)
    assert (sa * sb).coeffs == (sb * sa).coeffs
    assert ((sa + sb) * sc).coeffs == (sa * sc + sb * sc).coeffs
    assert (sa - sa).is_zero()
    if a[0] != 0:
        assert (sa * sa.unit_inverse()).coeffs == (1,) + (0,) * (n - 1)


@settings(max_examples=60, deadline=None)
@given(
    a=st.lists(st.integers(0, 3), min_size=5, max_size=5),
    b=st.lists(st.integers(0, 3), min_size=5, max_size=5),
)
def test_extension_field_products_associate_with_raw_kernel(a, b):
    sa = TruncatedSeries(F4, a)
    sb = TruncatedSeries(F4, b)
    assert (sa * sb).coeffs == ser_mul(F4, tuple(a), tuple(b))
    if a[0]:
        inv = ser_unit_inv(F4, tuple(a))
        assert ser_mul(F4, tuple(a), inv)[0] == 1
        assert ser_val(ser_mul(F4, tuple(a), inv)[1:]) is None
