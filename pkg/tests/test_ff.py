import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from verba.ff import (FieldError, canonical_modulus, enumerate_field, field_make, field_of_order,
                      is_irreducible, prime_power)

SMALL_Q = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 49, 64]


def test_prime_field_modulus():
    F = field_make(7, 1)
    assert F.q == 7 and F.modulus == (0, 1)


def test_f4_modulus_and_product():
    F = field_make(2, 2)
    assert F.modulus == (1, 1, 1)
    x = F([0, 1])
    assert (x * x).coeffs == (1, 1)


def test_f9_modulus_by_root_scan():
    # a monic quadratic is irreducible iff it has no root; scan c0 + 3 c1 ascending
    first = None
    for code in range(9):
        c0, c1 = code % 3, code // 3
        if all((r * r + c1 * r + c0) % 3 for r in range(3)):
            first = (c0, c1, 1)
            break
    assert field_make(3, 2).modulus == first == (1, 0, 1)


def test_field_ident():
    assert field_make(3, 2).ident == "3^2#10"
    assert field_make(2, 3).modulus == (1, 1, 0, 1)


def test_errors():
    with pytest.raises(FieldError):
        field_make(6, 1)
    with pytest.raises(FieldError):
        field_make(2, 20)
    with pytest.raises(FieldError):
        field_of_order(12)
    F = field_make(5)
    with pytest.raises(ZeroDivisionError):
        F(0).inv()
    with pytest.raises(FieldError):
        F(1) + field_make(7)(1)


def test_small_examples():
    F5 = field_make(5)
    assert (F5(3) * F5(4)).encode() == 2
    assert field_make(7)(3).inv().encode() == 5
    assert field_make(2)(1).inv().encode() == 1


def test_enumeration_order():
    assert [e.encode() for e in enumerate_field(field_make(5))] == [0, 1, 2, 3, 4]
    assert [str(e) for e in enumerate_field(field_make(2, 2))] == ["0", "1", "x", "x + 1"]
    els = list(enumerate_field(field_make(2, 3)))
    assert len(set(els)) == 8 and all(a**8 == a for a in els)


def test_f8_twist_squared_is_frobenius():
    F = field_make(2, 3)
    for a in enumerate_field(F):
        assert (a**4) ** 4 == a**2
        assert a.frobenius(2) == a**4


def test_f9_inverses():
    F = field_make(3, 2)
    for a in list(enumerate_field(F))[1:]:
        assert a * a.inv() == F.one()


def test_canonical_modulus_is_first_irreducible():
    for p, n in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2)]:
        m = canonical_modulus(p, n)
        assert is_irreducible(m, p)
        code = sum(c * p**i for i, c in enumerate(m[:-1]))
        for earlier in range(code):
            cand = [(earlier // p**i) % p for i in range(n)] + [1]
            assert not is_irreducible(cand, p)


@pytest.mark.parametrize("q", [q for q in SMALL_Q if q <= 9])
def test_field_axioms_exhaustive(q):
    F = field_of_order(q)
    a, b, c = (g.ravel() for g in np.meshgrid(np.arange(q), np.arange(q), np.arange(q),
                                              indexing="ij"))
    assert np.array_equal(F.add(F.add(a, b), c), F.add(a, F.add(b, c)))
    assert np.array_equal(F.mul(F.mul(a, b), c), F.mul(a, F.mul(b, c)))
    assert np.array_equal(F.mul(a, b), F.mul(b, a))
    assert np.array_equal(F.mul(a, F.add(b, c)), F.add(F.mul(a, b), F.mul(a, c)))


@pytest.mark.parametrize("q", SMALL_Q)
def test_fermat_and_encode(q):
    F = field_of_order(q)
    codes = np.arange(q)
    assert np.array_equal(F.power(codes, q), codes)
    assert sorted(e.encode() for e in enumerate_field(F)) == list(range(q))


@pytest.mark.parametrize("q", [4, 8, 9, 16])
def test_frobenius_homomorphism(q):
    F = field_of_order(q)
    els = list(enumerate_field(F))
    for a, b in itertools.product(els, els):
        assert (a + b).frobenius() == a.frobenius() + b.frobenius()
        assert (a * b).frobenius() == a.frobenius() * b.frobenius()


def test_vector_ops_agree_with_elements():
    F = field_make(3, 3)
    for a in range(27):
        for b in range(27):
            ea, eb = F.element(a), F.element(b)
            assert int(F.mul(a, b)) == (ea * eb).encode()
            assert int(F.add(a, b, use_table=False)) == (ea + eb).encode()
            assert int(F.sub(a, b)) == (ea - eb).encode()


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([101, 125, 256, 343, 1031]), st.data())
def test_random_axioms_large_fields(q, data):
    F = field_of_order(q)
    a, b, c = (F.element(data.draw(st.integers(0, q - 1))) for _ in range(3))
    assert (a + b) * c == a * c + b * c
    assert a * (b * c) == (a * b) * c
    if not a.is_zero():
        assert a * a.inv() == F.one()
        assert a ** -3 == (a**3).inv()


@given(st.integers(2, 5000))
def test_prime_power_roundtrip(q):
    pp = prime_power(q)
    if pp is not None:
        p, n = pp
        assert p**n == q
