"""Finite field contexts checked against hand-computed tables and axioms."""

import pytest
from hypothesis import given, settings, strategies as st

from orderzeta.errors import ParseError, PreconditionViolated
from orderzeta.fq import Fq, FqSpec, embedding, find_irreducible


def field(text):
    return Fq(FqSpec.parse(text))


def test_f4_multiplication_table_by_hand():
    # codes: 0, 1, u = 2, u+1 = 3 with u^2 + u + 1 = 0
    f4 = field("4")
    expected = [
        [0, 0, 0, 0],
        [0, 1, 2, 3],
        [0, 2, 3, 1],
        [0, 3, 1, 2],
    ]
    assert f4._mul == [list(r) for r in expected] or \
        [list(row) for row in f4._mul] == expected


def test_f8_powers_of_generator():
    f8 = field("8")  # u^3 = u + 1
    u = f8.gen
    assert u == 2
    assert f8.mul(u, u) == 4          # u^2
    assert f8.pow(u, 3) == 3          # u + 1
    assert f8.pow(u, 4) == 6          # u^2 + u
    assert f8.pow(u, 7) == 1          # multiplicative order 7


def test_f9_square_of_generator_is_minus_one():
    f9 = field("9")  # u^2 + 1 = 0
    u = f9.gen
    assert u == 3
    assert f9.mul(u, u) == 2          # -1 over F_3
    one_plus_u = f9.add(1, u)
    assert f9.mul(one_plus_u, one_plus_u) == 6   # (1+u)^2 = 2u


def test_f5_inverses():
    f5 = field("5")
    assert f5.inv(2) == 3
    assert f5.inv(4) == 4
    assert f5.mul(2, 3) == 1
    with pytest.raises(ZeroDivisionError):
        f5.inv(0)


def test_from_int_reduces_mod_p():
    f3 = field("3")
    assert f3.from_int(7) == 1
    assert f3.from_int(-1) == 2
    f9 = field("9")
    assert f9.from_int(5) == 2


def test_context_is_cached():
    assert field("7") is field("7")
    assert field("2^2:u^2+u+1") is field("4")


def test_table_cap_refuses_huge_fields():
    with pytest.raises(PreconditionViolated):
        Fq(FqSpec(2, 13))


def test_spec_text_round_trip():
    for text in ["2", "3", "5", "7", "4", "8", "9", "25", "2^2:u^2+u+1",
                 "3^2:u^2+1", "2^3:u^3+u+1"]:
        spec = FqSpec.parse(text)
        again = FqSpec.parse(spec.to_text())
        assert again == spec


def test_spec_rejects_non_prime_powers_and_bad_moduli():
    with pytest.raises(ParseError):
        FqSpec.parse("6")
    with pytest.raises(ParseError):
        FqSpec.parse("12")
    with pytest.raises(ParseError):
        FqSpec.parse("banana")
    with pytest.raises(PreconditionViolated):
        FqSpec.parse("2^2:u^2+1")  # (u+1)^2, reducible
    with pytest.raises(PreconditionViolated):
        FqSpec(4)


def test_find_irreducible_is_lex_smallest():
    assert find_irreducible(2, 2) == (1, 1, 1)
    assert find_irreducible(2, 4) == (1, 1, 0, 0, 1)


def _hom_check(small, big):
    table = embedding(small, big)
    assert table[0] == 0 and table[1] == 1
    for a in small.elements():
        for b in small.elements():
            assert table[small.add(a, b)] == big.add(table[a], table[b])
            assert table[small.mul(a, b)] == big.mul(table[a], table[b])


def test_embedding_is_a_ring_homomorphism():
    _hom_check(field("2"), field("4"))
    _hom_check(field("4"), field("2^4:u^4+u+1"))
    _hom_check(field("3"), field("9"))


def test_embedding_of_prime_field_is_identity_on_codes():
    table = embedding(field("3"), field("9"))
    assert table[:3] == [0, 1, 2]


def test_embedding_rejects_incompatible_fields():
    with pytest.raises(PreconditionViolated):
        embedding(field("4"), field("8"))
    with pytest.raises(PreconditionViolated):
        embedding(field("3"), field("4"))


@pytest.mark.parametrize("qtext", ["2", "3", "4", "5", "7", "8", "9"])
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_field_axioms(qtext, data):
    fq = field(qtext)
    q = fq.q
    a = data.draw(st.integers(0, q - 1))
    b = data.draw(st.integers(0, q - 1))
    c = data.draw(st.integers(0, q - 1))
    assert fq.add(a, b) == fq.add(b, a)
    assert fq.mul(a, b) == fq.mul(b, a)
    assert fq.add(fq.add(a, b), c) == fq.add(a, fq.add(b, c))
    assert fq.mul(fq.mul(a, b), c) == fq.mul(a, fq.mul(b, c))
    assert fq.mul(a, fq.add(b, c)) == fq.add(fq.mul(a, b), fq.mul(a, c))
    assert fq.add(a, fq.neg(a)) == 0
    assert fq.sub(a, b) == fq.add(a, fq.neg(b))
    if a:
        assert fq.mul(a, fq.inv(a)) == 1
        assert fq.pow(a, q - 1) == 1
    # Frobenius is additive
    assert fq.pow(fq.add(a, b), fq.p) == fq.add(fq.pow(a, fq.p), fq.pow(b, fq.p))
