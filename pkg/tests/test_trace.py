import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from verba.ff import field_make, field_of_order
from verba.grp import SL2
from verba.trace import (Poly, compile_trace2, dickson, perm_poly_test, trace7_relation,
                         univariate, verify_basis_table)
from verba.word import Word, commutator, evaluate_batch, parse_word, sequence_word

S, U, T = Poly.var("s"), Poly.var("u"), Poly.var("t")
X, Y = Word.gen(1, 2), Word.gen(2, 2)


def words(max_len=10):
    letter = st.sampled_from([1, -1, 2, -2])
    return st.lists(letter, max_size=max_len).map(
        lambda ls: Word(2, tuple((abs(g), 1 if g > 0 else -1) for g in ls)))


def oracle_mismatches(w, G, xs, ys):
    tr = G.traces
    pred = compile_trace2(w).eval_field(G.field, tr[xs], tr[G.mul(xs, ys)], tr[ys])
    return int((tr[evaluate_batch(w, [xs, ys], G)] != pred).sum())


def test_small_examples():
    assert compile_trace2(Word.identity(2)) == Poly.const(2)
    assert compile_trace2(X) == S and compile_trace2(Y) == T
    assert compile_trace2(parse_word("x^-1")) == S
    assert compile_trace2(parse_word("x^3")) == S**3 - 3 * S
    assert compile_trace2(parse_word("x^2 y")) == S * U - T
    assert str(compile_trace2(commutator(X, Y))) == "-s*u*t + s^2 + u^2 + t^2 - 2"


def test_basis_table():
    assert verify_basis_table(1000) == 0


def test_oracle_exhaustive_q3():
    G = SL2(3)
    N = G.order
    r = np.arange(N * N)
    for text in ("[x,y]", "x^2 y^-1 x y^3", "[[x,y],y]", "x y x^-1 y^-1 x^2"):
        assert oracle_mismatches(parse_word(text), G, r // N, r % N) == 0


@settings(max_examples=30, deadline=None)
@given(words(), st.sampled_from([5, 7, 9, 11]), st.integers(0, 2**32 - 1))
def test_oracle_random(w, q, seed):
    G = SL2(q)
    rng = np.random.default_rng(seed)
    xs, ys = G.random_indices(rng, 200), G.random_indices(rng, 200)
    assert oracle_mismatches(w, G, xs, ys) == 0


@settings(max_examples=60, deadline=None)
@given(words(), st.integers(0, 20))
def test_cyclic_and_inverse_invariance(w, k):
    f = compile_trace2(w)
    assert compile_trace2(w.inverse()) == f
    syl = w.syllables
    if syl:
        k %= len(syl)
        rot = Word(2, syl[k:] + syl[:k])
        assert compile_trace2(rot) == f


@settings(max_examples=40, deadline=None)
@given(words(max_len=6), st.integers(1, 5))
def test_power_dickson(w, k):
    assert compile_trace2(w**k) == dickson(k).compose(compile_trace2(w))


@settings(max_examples=40, deadline=None)
@given(words(max_len=8))
def test_linear_in_u_when_one_y(w):
    # a word with exactly one occurrence of y has trace polynomial of u-degree <= 1
    if sum(abs(e) for g, e in w.syllables if g == 2) == 1:
        assert compile_trace2(w).degree_in("u") <= 1


def test_engel_consistency():
    for n in (1, 2, 3):
        e = sequence_word("engel", n)
        f = compile_trace2(e)
        nxt = compile_trace2(sequence_word("engel", n + 1))
        # tr([z, y]) depends on tr z, tr zy, tr y only
        zy = compile_trace2(e * Y)
        assert nxt == f**2 + T**2 + zy**2 - f * zy * T - 2


def test_dickson_values():
    assert dickson(0) == univariate({0: 2})
    assert dickson(1) == univariate({1: 1})
    assert dickson(5) == univariate({5: 1, 3: -5, 1: 5})
    F = field_make(7, 2)
    D5 = dickson(5)
    # D5(z + 1/z) = z^5 + z^-5 over F_49
    z = np.arange(1, F.q)
    zi = F.inv(z)
    lhs = D5.eval_field(F, F.add(z, zi))
    rhs = F.add(F.power(z, 5), F.power(zi, 5))
    assert np.array_equal(lhs, rhs)


def test_perm_poly_examples():
    F5 = field_make(5)
    st_, emp = perm_poly_test(univariate({5: 1, 0: 3}), F5, (1, 2))
    assert st_ and emp == {1: True, 2: True}
    st_, emp = perm_poly_test(univariate({3: 1}), F5, (1, 2))
    assert not st_ and emp == {1: True, 2: False}
    st_, emp = perm_poly_test(univariate({2: 1}), F5, (1,))
    assert not st_ and emp == {1: False}
    with pytest.raises(ValueError):
        perm_poly_test(univariate({5: 5}), F5)
    with pytest.raises(ValueError):
        perm_poly_test(S * T, F5)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 7, 9, 13]), st.data())
def test_trace7_relation_vanishes(q, data):
    G = SL2(q)
    x, y, z = (G.element(data.draw(st.integers(0, G.order - 1))) for _ in range(3))
    vals, res = trace7_relation(x, y, z)
    assert len(vals) == 7 and res.is_zero()
    assert vals[6] == (x * y * z).trace()


def test_trace7_rejects_psl():
    from verba.grp import PSL2
    g = PSL2(5).element(1)
    with pytest.raises(ValueError):
        trace7_relation(g, g, g)


def test_poly_arithmetic():
    p = (S + U) ** 2
    assert p == S**2 + 2 * S * U + U**2
    assert (p - p).is_zero()
    assert p.eval_int(1, 2, 3) == 9
    F = field_of_order(7)
    assert int(p.eval_field(F, 1, 2, 3)) == 2
