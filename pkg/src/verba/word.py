"""Free-group words: parsing, reduction, substitution, evaluation.

A word is stored as a tuple of syllables ``(generator, exponent)`` with
generators numbered from 1; it is always freely reduced.  The commutator
convention throughout is ``[a, b] = a b a^-1 b^-1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_NAMES = ("x", "y", "z")


class WordError(ValueError):
    pass


class WordSyntaxError(WordError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


def _reduce(sylls) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for g, e in sylls:
        if e == 0:
            continue
        if out and out[-1][0] == g:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    return tuple((g, e) for g, e in out)


@dataclass(frozen=True)
class Word:
    d: int
    syllables: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.d < 1:
            raise WordError("alphabet size must be positive")
        for g, _ in self.syllables:
            if not 1 <= g <= self.d:
                raise WordError(f"generator {g} outside alphabet of size {self.d}")
        object.__setattr__(self, "syllables", _reduce(self.syllables))

    @classmethod
    def gen(cls, i: int, d: int) -> "Word":
        return cls(d, ((i, 1),))

    @classmethod
    def identity(cls, d: int) -> "Word":
        return cls(d, ())

    def is_identity(self) -> bool:
        return not self.syllables

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def letters(self) -> list[int]:
        """Signed letters, e.g. x^2 y^-1 -> [1, 1, -2]."""
        out = []
        for g, e in self.syllables:
            out.extend([g if e > 0 else -g] * abs(e))
        return out

    def generators(self) -> frozenset[int]:
        return frozenset(g for g, _ in self.syllables)

    def _same(self, other: "Word"):
        if not isinstance(other, Word) or other.d != self.d:
            raise WordError("words over different alphabets")

    def __mul__(self, other: "Word") -> "Word":
        self._same(other)
        return Word(self.d, self.syllables + other.syllables)

    def inverse(self) -> "Word":
        return Word(self.d, tuple((g, -e) for g, e in reversed(self.syllables)))

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(self.d, base.syllables * abs(k))

    def with_alphabet(self, d: int) -> "Word":
        return Word(d, self.syllables)

    def __str__(self) -> str:
        if not self.syllables:
            return "1"
        parts = []
        for g, e in self.syllables:
            name = _NAMES[g - 1] if self.d <= 3 else f"x{g}"
            parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Word({str(self)!r}, d={self.d})"


def commutator(a: Word, b: Word) -> Word:
    return a * b * a.inverse() * b.inverse()


# -- parsing ------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, d: int):
        self.text = text
        self.d = d
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise WordSyntaxError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def word(self, stop: str) -> Word:
        acc = Word.identity(self.d)
        while self.peek() and self.peek() not in stop:
            acc = acc * self.term()
        return acc

    def term(self) -> Word:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            self._skip()
            m = re.compile(r"-?\d+").match(self.text, self.pos)
            if not m:
                raise WordSyntaxError("expected integer exponent", self.pos)
            k = int(m.group())
            if k == 0:
                raise WordSyntaxError("zero exponent", self.pos)
            self.pos = m.end()
            base = base**k
        return base

    def atom(self) -> Word:
        ch = self.peek()
        start = self.pos
        if ch == "(":
            self.pos += 1
            w = self.word(")")
            self.expect(")")
            return w
        if ch == "[":
            self.pos += 1
            a = self.word(",")
            self.expect(",")
            b = self.word("]")
            self.expect("]")
            return commutator(a, b)
        if ch == "1":
            self.pos += 1
            return Word.identity(self.d)
        m = re.compile(r"x\d+|[xyz]").match(self.text, self.pos)
        if not m:
            raise WordSyntaxError(f"unexpected {ch or 'end of input'!r}", start)
        tok = m.group()
        idx = _NAMES.index(tok) + 1 if len(tok) == 1 else int(tok[1:])
        if not 1 <= idx <= self.d:
            raise WordSyntaxError(f"generator {tok} outside alphabet of size {self.d}", start)
        self.pos = m.end()
        return Word.gen(idx, self.d)


def parse_word(text: str, d: int = 2) -> Word:
    """Parse e.g. ``"[x,y]^2 x^-1"`` into a freely reduced word over d letters."""
    p = _Parser(text, d)
    w = p.word("")
    if p.peek():
        raise WordSyntaxError(f"unexpected {p.peek()!r}", p.pos)
    return w


def w_substitute(w: Word, images: Sequence[Word]) -> Word:
    """Replace generator i by images[i-1] and reduce."""
    if len(images) != w.d:
        raise WordError(f"need {w.d} images, got {len(images)}")
    d = images[0].d
    if any(im.d != d for im in images):
        raise WordError("images over different alphabets")
    acc = Word.identity(d)
    for g, e in w.syllables:
        acc = acc * images[g - 1] ** e
    return acc


# -- evaluation ---------------------------------------------------------------

def _power(alg, a, k: int):
    if k < 0:
        a, k = alg.inv(a), -k
    out = None
    while k:
        if k & 1:
            out = a if out is None else alg.mul(out, a)
        k >>= 1
        if k:
            a = alg.mul(a, a)
    return out


def evaluate_batch(w: Word, args: Sequence, alg):
    """Evaluate w on batches.  ``alg`` supplies mul/inv/one on its batch type.

    For a :class:`~verba.grp.MatrixGroup` the batches are index arrays; for a
    :class:`~verba.grp.MatrixAlgebra` they are entry arrays ``(..., n*n)``.
    """
    if len(args) != w.d:
        raise WordError(f"word needs {w.d} arguments, got {len(args)}")
    cache = {}
    out = None
    for g, e in w.syllables:
        key = (g, e)
        if key not in cache:
            cache[key] = _power(alg, args[g - 1], e)
        p = cache[key]
        out = p if out is None else alg.mul(out, p)
    if out is None:
        return alg.one(np.asarray(args[0]))
    return out


def evaluate(w: Word, args: Sequence):
    """Evaluate w on group elements, multiplying syllable powers left to right."""
    from .grp import GroupElement, GroupError

    if len(args) != w.d:
        raise WordError(f"word needs {w.d} arguments, got {len(args)}")
    group = args[0].group
    if any(not isinstance(a, GroupElement) or a.group != group for a in args):
        raise GroupError("arguments from different groups")
    mats = [a.matrix for a in args]
    res = evaluate_batch(w, mats, group.alg)
    if hasattr(group, "canonical"):
        res = group.canonical(res)
    return GroupElement(group, tuple(int(c) for c in res))


# -- cyclic structure ---------------------------------------------------------

def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Return (c, r) with w = c r c^-1 and r cyclically reduced."""
    s = list(w.syllables)
    conj: list[tuple[int, int]] = []
    while len(s) >= 2 and s[0][0] == s[-1][0]:
        g, e1 = s[0]
        e2 = s[-1][1]
        conj.append((g, -e2))
        s = [(g, e1 + e2)] + s[1:-1] if e1 + e2 else s[1:-1]
        s = list(_reduce(s))
    c = Word(w.d, tuple(conj))
    r = Word(w.d, tuple(s))
    assert c * r * c.inverse() == w
    return c, r


@dataclass(frozen=True)
class CanonForm:
    a: tuple[int, ...]
    b: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.a)

    def syllables(self) -> tuple[int, ...]:
        out = []
        for ai, bi in zip(self.a, self.b):
            out += [ai, bi]
        return tuple(out)


def canon_form(w: Word) -> CanonForm:
    """Cyclic canonical form x^a1 y^b1 ... x^ar y^br of a two-letter word."""
    if w.d != 2:
        raise WordError("canonical form is defined for two-letter words")
    if w.is_identity():
        raise WordError("identity word has no canonical form")
    _, r = cyclic_reduce(w)
    s = list(r.syllables)
    if len(s) < 2:
        raise WordError(f"{w} is not of alternating type")
    if s[0][0] != 1:
        s = s[1:] + s[:1]
    return CanonForm(tuple(e for _, e in s[0::2]), tuple(e for _, e in s[1::2]))


def complexity(w: Word) -> int:
    return canon_form(w).r


def trace_similar(w: Word, v: Word) -> bool:
    cw, cv = canon_form(w), canon_form(v)
    return (cw.r == cv.r
            and sorted(map(abs, cw.a)) == sorted(map(abs, cv.a))
            and sorted(map(abs, cw.b)) == sorted(map(abs, cv.b)))


@dataclass(frozen=True)
class PowerDecomposition:
    root: Word
    k: int
    conjugator: Word


def power_decompose(w: Word) -> PowerDecomposition:
    """Largest k with w = c v^k c^-1 (v cyclically reduced)."""
    if w.is_identity():
        raise WordError("identity word has no power decomposition")
    c, r = cyclic_reduce(w)
    s = r.syllables
    if len(s) == 1:
        g, e = s[0]
        return PowerDecomposition(Word(w.d, ((g, 1 if e > 0 else -1),)), abs(e), c)
    n = len(s)
    for period in range(1, n + 1):
        if n % period == 0 and s == s[:period] * (n // period):
            return PowerDecomposition(Word(w.d, s[:period]), n // period, c)
    raise AssertionError("unreachable")


# -- recursive laws -----------------------------------------------------------

@dataclass(frozen=True)
class RecursiveLaw:
    """v_1 = first(x, y), v_{n+1} = law(x, y, v_n)."""

    first: Word
    law: Word
    name: str = "custom"

    def __post_init__(self):
        if self.first.d != 2:
            raise WordError("first word must be over (x, y)")
        if self.law.d != 3:
            raise WordError("law must be a word over (x, y, z)")
        if 3 not in self.law.generators():
            raise WordError("z must occur in the law")

    @property
    def valence(self) -> int:
        return len(self.law.generators())

    def term(self, n: int) -> Word:
        return sequence_word(self, n)


@dataclass(frozen=True)
class LawReport:
    valence: int
    engel_like: bool
    derived_series_checked: bool = False


def law_validate(law: RecursiveLaw | Word) -> LawReport:
    f = law.law if isinstance(law, RecursiveLaw) else law
    if f.d != 3 or 3 not in f.generators():
        raise WordError("z must occur in the law")
    x, y = Word.gen(1, 2), Word.gen(2, 2)
    at_one = w_substitute(f, [x, y, Word.identity(2)])
    return LawReport(valence=len(f.generators()), engel_like=at_one.is_identity())


def _law(name: str, first: str, law: str) -> RecursiveLaw:
    return RecursiveLaw(parse_word(first, 2), parse_word(law, 3), name)


LAWS = {
    "engel": _law("engel", "[x,y]", "[z,y]"),
    "u": _law("u", "x^-2 y^-1 x", "[x z x^-1, y z y^-1]"),
    "s": _law("s", "x", "[y z y^-1, z^-1]"),
    "r": _law("r", "x", "[y^2 z y^-2, z^-1]"),
}


def get_law(kind: str | RecursiveLaw) -> RecursiveLaw:
    if isinstance(kind, RecursiveLaw):
        return kind
    try:
        return LAWS[kind]
    except KeyError:
        raise WordError(f"unknown sequence {kind!r}") from None


def sequence_word(kind: str | RecursiveLaw, n: int) -> Word:
    """n-th term (n >= 1) of a named or custom recursive sequence."""
    law = get_law(kind)
    if n < 1:
        raise WordError("sequence index starts at 1")
    v = law.first
    x, y = Word.gen(1, 2), Word.gen(2, 2)
    for _ in range(n - 1):
        v = w_substitute(law.law, [x, y, v])
    return v


def parse_law_text(text: str) -> RecursiveLaw:
    """Parse a law file with lines ``first: <word>`` and ``law: <word>``."""
    fields = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition(":")
        if not sep or key.strip() not in ("first", "law", "name"):
            raise WordError(f"bad law line {line!r}")
        fields[key.strip()] = val.strip()
    if "first" not in fields or "law" not in fields:
        raise WordError("law file needs 'first:' and 'law:' lines")
    return RecursiveLaw(parse_word(fields["first"], 2), parse_word(fields["law"], 3),
                        fields.get("name", "custom"))
