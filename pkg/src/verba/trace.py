"""Fricke trace polynomials of two-letter words.

For X, Y in SL(2) every product of X, Y and their inverses is a combination
c0*1 + c1*X + c2*Y + c3*XY whose coefficients are integer polynomials in
s = tr X, u = tr XY, t = tr Y.  The basis products are derived mechanically
from X^2 = sX - 1, Y^2 = tY - 1 and XY + YX = (u - st) + tX + sY, then
checked numerically against random matrices before first use.
"""

from __future__ import annotations

import functools
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .ff import FieldSpec, field_make
from .word import Word, WordError, cyclic_reduce

TRACE_VARS = ("s", "u", "t")


class Poly:
    """Sparse polynomial with exact integer coefficients.

    ``terms`` maps exponent tuples (aligned with ``vars``) to nonzero ints.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, ...], int] | None = None,
                 vars: Sequence[str] = TRACE_VARS):
        self.vars = tuple(vars)
        self.terms = {e: int(c) for e, c in (terms or {}).items() if c}
        self._hash = None

    @classmethod
    def const(cls, c: int, vars: Sequence[str] = TRACE_VARS) -> "Poly":
        return cls({(0,) * len(vars): c}, vars)

    @classmethod
    def var(cls, name: str, vars: Sequence[str] = TRACE_VARS) -> "Poly":
        vars = tuple(vars)
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls({tuple(e): 1}, vars)

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.vars != self.vars:
                raise ValueError(f"variable mismatch {self.vars} vs {other.vars}")
            return other
        return Poly.const(int(other), self.vars)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(out, self.vars)

    __radd__ = __add__

    def __neg__(self):
        return Poly({e: -c for e, c in self.terms.items()}, self.vars)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(out, self.vars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.const(1, self.vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(other, self.vars)
        return isinstance(other, Poly) and self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def coeff(self, exps: tuple[int, ...]) -> int:
        return self.terms.get(tuple(exps), 0)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Descending total degree, then descending lexicographic in variable order."""
        return sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-x for x in kv[0])))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (e, c) in enumerate(self.sorted_terms()):
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            mag = abs(c)
            body = mono if (mag == 1 and mono) else (f"{mag}*{mono}" if mono else str(mag))
            if i == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append(("- " if c < 0 else "+ ") + body)
        return " ".join(out)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r})"

    # -- evaluation -----------------------------------------------------------
    def eval_int(self, *values: int) -> int:
        return sum(c * _prod(v**k for v, k in zip(values, e)) for e, c in self.terms.items())

    def eval_field(self, field: FieldSpec, *values):
        """Evaluate at field codes (scalars or broadcastable arrays); returns codes."""
        vals = [np.asarray(v, dtype=np.int64) for v in values]
        if len(vals) != len(self.vars):
            raise ValueError(f"need {len(self.vars)} values")
        shape = np.broadcast_shapes(*(v.shape for v in vals)) if vals else ()
        powers = []
        for i, v in enumerate(vals):
            top = self.degree_in(self.vars[i])
            pw = [np.ones_like(v)]
            for _ in range(max(top, 0)):
                pw.append(field.mul(pw[-1], v))
            powers.append(pw)
        acc = np.zeros(shape, dtype=np.int64)
        for e, c in self.terms.items():
            cm = c % field.p
            if cm == 0:
                continue
            term = np.full(shape, cm, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    term = field.mul(term, powers[i][k])
            acc = field.add(acc, term)
        return acc

    def reduce_mod(self, p: int) -> "Poly":
        return Poly({e: c % p for e, c in self.terms.items()}, self.vars)

    def compose(self, inner: "Poly") -> "Poly":
        """self o inner, for univariate self."""
        if len(self.vars) != 1:
            raise ValueError("outer polynomial must be univariate")
        out = Poly.const(0, inner.vars)
        for k in range(self.degree(), -1, -1):
            out = out * inner + self.coeff((k,))
        return out


def _prod(it):
    out = 1
    for x in it:
        out *= x
    return out


# -- basis (1, X, Y, XY) ------------------------------------------------------

_S, _U, _T = (Poly.var(v) for v in TRACE_VARS)
_ONE = Poly.const(1)
_BASIS = ("", "X", "Y", "XY")


def _normal_form(word: str) -> dict[str, Poly]:
    """Rewrite a word in X, Y into the basis via the Cayley-Hamilton relations."""
    rules = {
        "XX": {"X": _S, "": -_ONE},
        "YY": {"Y": _T, "": -_ONE},
        "YX": {"": _U - _S * _T, "X": _T, "Y": _S, "XY": -_ONE},
    }
    for i in range(len(word) - 1):
        pat = word[i:i + 2]
        if pat in rules:
            out: dict[str, Poly] = {}
            for mono, c in rules[pat].items():
                for b, c2 in _normal_form(word[:i] + mono + word[i + 2:]).items():
                    out[b] = out.get(b, Poly()) + c * c2
            return {b: c for b, c in out.items() if not c.is_zero()}
    return {word: _ONE}


@functools.lru_cache(maxsize=1)
def basis_table() -> tuple[tuple[tuple[Poly, ...], ...], ...]:
    """table[i][j] = coefficients of basis_i * basis_j in the basis."""
    rows = []
    for a in _BASIS:
        row = []
        for b in _BASIS:
            nf = _normal_form(a + b)
            row.append(tuple(nf.get(k, Poly()) for k in _BASIS))
        rows.append(tuple(row))
    return tuple(rows)


def verify_basis_table(trials: int = 1000, p: int = 101, seed: int = 0) -> int:
    """Check every basis product as a full matrix identity on random SL(2,p) pairs.

    Returns the number of failures (0 expected).
    """
    rng = np.random.default_rng(seed)
    F = field_make(p)
    failures = 0
    table = basis_table()

    def rand_sl2():
        while True:
            a, b, c = (int(v) for v in rng.integers(0, p, 3))
            if a:
                return np.array([[a, b], [c, (1 + b * c) * pow(a, p - 2, p) % p]], dtype=object)

    for _ in range(trials):
        X, Y = rand_sl2(), rand_sl2()
        s, t = int(X.trace()) % p, int(Y.trace()) % p
        u = int((X @ Y).trace()) % p
        mats = [np.eye(2, dtype=object), X, Y, (X @ Y) % p]
        for i, j in product(range(4), repeat=2):
            lhs = (mats[i] @ mats[j]) % p
            rhs = np.zeros((2, 2), dtype=object)
            for k, coef in enumerate(table[i][j]):
                rhs = rhs + int(coef.eval_field(F, s, u, t)) * mats[k]
            if not np.array_equal(lhs % p, rhs % p):
                failures += 1
    return failures


@functools.lru_cache(maxsize=1)
def _checked_table():
    if verify_basis_table(trials=25, seed=12345):
        raise RuntimeError("basis product table failed numeric verification")
    return basis_table()


class QuatRep:
    """c0*1 + c1*X + c2*Y + c3*XY with polynomial coefficients in s, u, t."""

    __slots__ = ("c",)

    def __init__(self, c: Sequence[Poly]):
        self.c = tuple(c)

    @classmethod
    def unit(cls) -> "QuatRep":
        return cls((_ONE, Poly(), Poly(), Poly()))

    @classmethod
    def letter(cls, g: int, inverse: bool) -> "QuatRep":
        z = Poly()
        if g == 1:
            return cls((_S, -_ONE, z, z) if inverse else (z, _ONE, z, z))
        return cls((_T, z, -_ONE, z) if inverse else (z, z, _ONE, z))

    def __mul__(self, other: "QuatRep") -> "QuatRep":
        table = _checked_table()
        out = [Poly(), Poly(), Poly(), Poly()]
        for i, a in enumerate(self.c):
            if a.is_zero():
                continue
            for j, b in enumerate(other.c):
                if b.is_zero():
                    continue
                ab = a * b
                for k, coef in enumerate(table[i][j]):
                    if not coef.is_zero():
                        out[k] = out[k] + ab * coef
        return QuatRep(out)

    def __pow__(self, k: int) -> "QuatRep":
        out, base = QuatRep.unit(), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def trace(self) -> Poly:
        c0, c1, c2, c3 = self.c
        return 2 * c0 + _S * c1 + _T * c2 + _U * c3


@functools.lru_cache(maxsize=4096)
def compile_trace2(w: Word) -> Poly:
    """The polynomial f_w(s, u, t) with tr w(x, y) = f_w(tr x, tr xy, tr y)."""
    if w.d != 2:
        raise WordError("trace compiler needs a word over exactly two letters")
    _, r = cyclic_reduce(w)
    acc = QuatRep.unit()
    for g, e in r.syllables:
        acc = acc * QuatRep.letter(g, e < 0) ** abs(e)
    return acc.trace()


# -- univariate tools -----------------------------------------------------------

@functools.lru_cache(maxsize=None)
def dickson(n: int, var: str = "x") -> Poly:
    """D_n with D_n(z + 1/z) = z^n + z^-n."""
    n = abs(n)
    x = Poly.var(var, (var,))
    prev, cur = Poly.const(2, (var,)), x
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, x * cur - prev
    return cur


def univariate(coeffs: Mapping[int, int], var: str = "x") -> Poly:
    return Poly({(k,): c for k, c in coeffs.items()}, (var,))


def perm_poly_test(h: Poly, spec: FieldSpec, extensions: Sequence[int] = (1,)):
    """Structural a*x^(p^k) + b test plus exhaustive bijectivity per extension degree.

    Returns (structural_flag, {degree: bijective_flag}).
    """
    if len(h.vars) != 1:
        raise ValueError("permutation test needs a univariate polynomial")
    p = spec.p
    red = h.reduce_mod(p)
    if red.degree() < 1:
        raise ValueError("polynomial is constant modulo p")
    nonconst = [k for (k,) in red.terms if k > 0]
    structural = len(nonconst) == 1 and _is_power_of(nonconst[0], p)
    empirical = {}
    for e in extensions:
        F = field_make(p, spec.n * e)
        vals = red.eval_field(F, np.arange(F.q))
        empirical[e] = len(np.unique(vals)) == F.q
    return structural, empirical


def _is_power_of(k: int, p: int) -> bool:
    while k % p == 0:
        k //= p
    return k == 1


# -- three letters, numeric only ------------------------------------------------

def trace7_relation(x, y, z):
    """(a1, a2, a3, a12, a13, a23, a123) for x, y, z in SL(2,q), and the residual
    of the quadratic relation they satisfy (zero for genuine matrices)."""
    from .grp import MatrixGroup

    g = x.group
    if not isinstance(g, MatrixGroup) or g.variant != "SL2" or y.group != g or z.group != g:
        raise ValueError("trace7_relation needs three elements of one SL(2,q)")
    a1, a2, a3 = x.trace(), y.trace(), z.trace()
    a12, a13, a23 = (x * y).trace(), (x * z).trace(), (y * z).trace()
    a123 = (x * y * z).trace()
    res = (a123 * a123 - a123 * (a12 * a3 + a13 * a2 + a23 * a1 - a1 * a2 * a3)
           + (a1 * a1 + a2 * a2 + a3 * a3 + a12 * a12 + a13 * a13 + a23 * a23
              - a1 * a2 * a12 - a1 * a3 * a13 - a2 * a3 * a23 + a12 * a13 * a23 - 4))
    return (a1, a2, a3, a12, a13, a23, a123), res
