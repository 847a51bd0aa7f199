import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from verba.grp import PSL2, SL2
from verba.trace import compile_trace2
from verba.word import (LAWS, RecursiveLaw, Word, WordError, WordSyntaxError, canon_form,
                        commutator, complexity, cyclic_reduce, evaluate, evaluate_batch,
                        get_law, law_validate, parse_law_text, parse_word, power_decompose,
                        sequence_word, trace_similar, w_substitute)

X, Y = Word.gen(1, 2), Word.gen(2, 2)


def words(d=2, max_len=12):
    letter = st.sampled_from([g for i in range(1, d + 1) for g in (i, -i)])
    return st.lists(letter, max_size=max_len).map(
        lambda ls: Word(d, tuple((abs(g), 1 if g > 0 else -1) for g in ls)))


def test_parse_examples():
    assert parse_word("[x,y]").syllables == ((1, 1), (2, 1), (1, -1), (2, -1))
    assert parse_word("x x^-1 y").syllables == ((2, 1),)
    assert parse_word("x^-2 y^-1 x") == sequence_word("u", 1)
    assert parse_word("(x y)^2 x1") == parse_word("x y x y x")
    assert parse_word("1").is_identity()


@pytest.mark.parametrize("text,pos", [("x^0", 2), ("x^", 2), ("[x,y", 4), ("q", 0),
                                      ("x)", 1)])
def test_parse_errors(text, pos):
    with pytest.raises(WordSyntaxError) as e:
        parse_word(text)
    assert e.value.pos == pos


def test_generator_out_of_range():
    with pytest.raises(WordSyntaxError):
        parse_word("z", 2)


def test_substitution_examples():
    f = parse_word("[z,y]", 3)
    assert w_substitute(f, [X, Y, commutator(X, Y)]) == sequence_word("engel", 2)
    w = parse_word("x^3 y^-2 x", 2)
    assert w_substitute(w, [X, Y]) == w
    u = LAWS["u"].law
    assert w_substitute(u, [X, Y, Word.identity(2)]).is_identity()
    with pytest.raises(WordError):
        w_substitute(w, [X])


def test_sequences():
    assert sequence_word("engel", 1) == commutator(X, Y)
    assert sequence_word("u", 1) == parse_word("x^-2 y^-1 x")
    assert sequence_word("s", 2) == parse_word("[y x y^-1, x^-1]")
    assert sequence_word("r", 2) == parse_word("[y^2 x y^-2, x^-1]")
    e3 = sequence_word("engel", 3)
    assert e3 == w_substitute(parse_word("[z,y]", 3), [X, Y, sequence_word("engel", 2)])
    with pytest.raises(WordError):
        sequence_word("u", 0)
    with pytest.raises(WordError):
        get_law("nope")


def test_law_validate():
    rep = law_validate(LAWS["u"])
    assert rep.valence == 3 and rep.engel_like
    rep = law_validate(LAWS["engel"])
    assert rep.valence == 2 and rep.engel_like
    rep = law_validate(parse_word("z x", 3))
    assert not rep.engel_like
    with pytest.raises(WordError):
        law_validate(parse_word("x y", 3))
    with pytest.raises(WordError):
        RecursiveLaw(X, parse_word("x y", 3))


def test_law_file():
    law = parse_law_text("# s sequence\nfirst: x\nlaw: [y z y^-1, z^-1]\nname: s2\n")
    assert law.first == LAWS["s"].first and law.law == LAWS["s"].law and law.name == "s2"
    with pytest.raises(WordError):
        parse_law_text("law: [z,y]\n")
    with pytest.raises(WordError):
        parse_law_text("first: x\nlaw: [z,y]\nbogus line\n")


def test_evaluate_examples():
    G = SL2(5)
    g = G.element(17)
    assert evaluate(commutator(X, Y), [g, g]).is_identity()
    F = G.field
    for i, j in [(3, 50), (10, 99), (7, 7)]:
        a, b = G.element(i), G.element(j)
        val = evaluate(commutator(X, Y), [a, b]).trace()
        s, u, t = a.trace(), (a * b).trace(), b.trace()
        assert val == s * s + t * t + u * u - s * u * t - 2
    # x^4 y^4 never equals -I on SL(2,5)
    N = G.order
    r = np.arange(N * N)
    vals = evaluate_batch(parse_word("x^4 y^4"), [r // N, r % N], G)
    minus = G.index_of(F.neg(G.alg.identity())[None])[0]
    assert not (vals == minus).any()


def test_canon_form_examples():
    cf = canon_form(parse_word("x^2 y^3 x^-1 y"))
    assert cf.r == 2 and cf.a == (2, -1) and cf.b == (3, 1)
    cf = canon_form(commutator(X, Y))
    assert cf.r == 2 and cf.a == (1, -1) and cf.b == (1, -1)
    cf = canon_form(parse_word("y^2 x"))
    assert cf.r == 1 and cf.a == (1,) and cf.b == (2,)
    assert compile_trace2(parse_word("y^2 x")) == compile_trace2(parse_word("x y^2"))
    with pytest.raises(WordError):
        canon_form(parse_word("x^3"))


def test_trace_similar_examples():
    assert trace_similar(commutator(X, Y), parse_word("x^-1 y x y^-1"))
    assert not trace_similar(parse_word("x y"), parse_word("x^2 y"))
    w = parse_word("x^3 y^-2 x y^5")
    assert trace_similar(w, w)
    assert complexity(w) == 2


def test_power_decompose_examples():
    pd = power_decompose(parse_word("x y x y x y"))
    assert pd.root == parse_word("x y") and pd.k == 3
    pd = power_decompose(commutator(X, Y))
    assert pd.root == commutator(X, Y) and pd.k == 1
    pd = power_decompose(parse_word("x^2 y x^2 y"))
    assert pd.root == parse_word("x^2 y") and pd.k == 2


@given(words())
def test_reduction_idempotent_and_roundtrip(w):
    again = Word(w.d, w.syllables)
    assert again == w
    assert parse_word(str(w)) == w
    assert parse_word(str(parse_word(str(w)))) == w
    for (g1, _), (g2, _) in zip(w.syllables, w.syllables[1:]):
        assert g1 != g2


@given(words(3), words(3))
def test_word_group_laws(a, b):
    assert (a * b).inverse() == b.inverse() * a.inverse()
    assert (a * a.inverse()).is_identity()
    assert a ** 3 == a * a * a


@given(words())
def test_cyclic_reduce_conjugates(w):
    c, r = cyclic_reduce(w)
    assert c * r * c.inverse() == w
    if len(r.syllables) > 1:
        assert r.syllables[0][0] != r.syllables[-1][0]


@settings(max_examples=40, deadline=None)
@given(words(), words(), st.integers(0, 59), st.integers(0, 59), st.integers(0, 59))
def test_evaluate_homomorphism_and_equivariance(w1, w2, i, j, h):
    G = PSL2(5)
    args = [np.array([i]), np.array([j])]
    a = evaluate_batch(w1, args, G)
    b = evaluate_batch(w2, args, G)
    assert int(evaluate_batch(w1 * w2, args, G)[0]) == int(G.mul(a, b)[0])
    hh = np.array([h])
    conj = [G.conj(x, hh) for x in args]
    assert int(evaluate_batch(w1, conj, G)[0]) == int(G.conj(a, hh)[0])


@settings(max_examples=80, deadline=None)
@given(words(max_len=8), words(max_len=8))
def test_equal_trace_polys_imply_similar(w, v):
    try:
        cw, cv = canon_form(w), canon_form(v)
    except WordError:
        return
    if compile_trace2(w) == compile_trace2(v):
        assert trace_similar(w, v)


@given(words(max_len=8), st.integers(1, 4))
def test_power_decompose_recovers(w, k):
    if w.is_identity():
        return
    pd = power_decompose(w**k)
    c, r = cyclic_reduce(w**k)
    assert pd.k % k == 0 or pd.k >= k
    assert pd.root ** pd.k == r
