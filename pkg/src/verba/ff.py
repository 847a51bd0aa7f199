"""Finite fields F_q, q = p^n, with a canonical defining polynomial.

Elements are encoded as integers ``sum(c_i * p**i)`` of their coefficient
vectors in the polynomial basis.  Every census loop works on numpy arrays of
these codes through the vectorised helpers on :class:`FieldSpec`; the
:class:`FieldElement` wrapper is the scalar, user-facing value.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Sequence

import numpy as np

DEFAULT_FIELD_CAP = 2**16
_ADD_TABLE_CAP = 1024


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, n) with q = p**n, or None if q is not a prime power."""
    if q < 2:
        return None
    p = 2
    while p * p <= q and q % p:
        p += 1
    if q % p:
        p = q
    n, r = 0, q
    while r % p == 0:
        r //= p
        n += 1
    return (p, n) if r == 1 else None


# -- dense polynomials over F_p, coefficient lists low -> high ---------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    m = _trim([c % p for c in m])
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def _polymulmod(a: Sequence[int], b: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _polymod(out, m, p)


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    n = len(poly) - 1
    for d in range(1, n // 2 + 1):
        for low in product(range(p), repeat=d):
            if not _polymod(poly, list(low) + [1], p):
                return False
    return True


def canonical_modulus(p: int, n: int) -> tuple[int, ...]:
    """First monic irreducible of degree n in ascending base-p order of (c_0..c_{n-1})."""
    for code in range(p**n):
        low = [(code // p**i) % p for i in range(n)]
        poly = low + [1]
        if is_irreducible(poly, p):
            return tuple(poly)
    raise FieldError(f"no irreducible polynomial of degree {n} over F_{p}")  # unreachable


@dataclass(frozen=True)
class FieldSpec:
    """The field F_{p^n} = F_p[x]/(modulus)."""

    p: int
    n: int
    modulus: tuple[int, ...] = field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.n

    @property
    def ident(self) -> str:
        code = sum(c * self.p**i for i, c in enumerate(self.modulus))
        return f"{self.p}^{self.n}#{code}"

    def __str__(self) -> str:
        return f"F_{self.q}"

    # -- scalar helpers on codes --------------------------------------------
    def digits(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.n)]

    def undigits(self, c: Sequence[int]) -> int:
        return sum((x % self.p) * self.p**i for i, x in enumerate(c))

    def _mul_slow(self, a: int, b: int) -> int:
        if self.n == 1:
            return a * b % self.p
        return self.undigits(_polymulmod(self.digits(a), self.digits(b), self.modulus, self.p))

    @functools.cached_property
    def _tables(self) -> tuple[np.ndarray, np.ndarray, int]:
        """(exp, log, generator) for the cyclic group F_q^*; log[0] = -1."""
        q = self.q
        for g in range(2, q) if q > 2 else [1]:
            exp = [1]
            x = g
            while x != 1:
                exp.append(x)
                x = self._mul_slow(x, g)
            if len(exp) == q - 1:
                break
        exp_arr = np.array(exp + exp, dtype=np.int64)
        log_arr = np.full(q, -1, dtype=np.int64)
        log_arr[np.array(exp, dtype=np.int64)] = np.arange(q - 1)
        return exp_arr, log_arr, g

    @functools.cached_property
    def _add_table(self) -> np.ndarray | None:
        if self.p == 2 or self.n == 1 or self.q > _ADD_TABLE_CAP:
            return None
        codes = np.arange(self.q)
        return self.add(codes[:, None], codes[None, :], use_table=False)

    @functools.cached_property
    def neg_table(self) -> np.ndarray:
        return self.neg(np.arange(self.q))

    @functools.cached_property
    def inv_table(self) -> np.ndarray:
        """inv_table[a] = a^-1, with inv_table[0] = 0 as a sentinel."""
        exp, log, _ = self._tables
        out = np.zeros(self.q, dtype=np.int64)
        nz = np.arange(1, self.q)
        out[nz] = exp[(-log[nz]) % (self.q - 1)]
        return out

    @property
    def generator(self) -> int:
        return self._tables[2]

    # -- vectorised operations on integer codes -----------------------------
    def add(self, a, b, use_table: bool = True):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.n == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        tab = self._add_table if use_table else None
        if tab is not None:
            return tab[a, b]
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        pw = 1
        for _ in range(self.n):
            out += ((a // pw % self.p + b // pw % self.p) % self.p) * pw
            pw *= self.p
        return out

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.n == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        out = np.zeros(a.shape, dtype=np.int64)
        pw = 1
        for _ in range(self.n):
            out += ((-(a // pw % self.p)) % self.p) * pw
            pw *= self.p
        return out

    def sub(self, a, b):
        if self.n == 1:
            return (np.asarray(a, dtype=np.int64) - b) % self.p
        return self.add(a, self.neg_table[np.asarray(b, dtype=np.int64)])

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.n == 1:
            return a * b % self.p
        exp, log, _ = self._tables
        prod = exp[(log[a] + log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, prod)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in " + str(self))
        return self.inv_table[a]

    def power(self, a, k: int):
        a = np.asarray(a, dtype=np.int64)
        if k < 0:
            a, k = self.inv(a), -k
        if self.n == 1:
            out = np.ones(a.shape, dtype=np.int64)
            base = a % self.p
            while k:
                if k & 1:
                    out = out * base % self.p
                base = base * base % self.p
                k >>= 1
            return out
        exp, log, _ = self._tables
        res = exp[(log[a] * (k % (self.q - 1))) % (self.q - 1)]
        if k == 0:
            return np.ones(a.shape, dtype=np.int64)
        return np.where(a == 0, 0, res)

    def from_int(self, c: int) -> int:
        """Image of an integer in the prime subfield."""
        return c % self.p

    # -- element-level API --------------------------------------------------
    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, (list, tuple)):
            if len(value) > self.n:
                raise FieldError("too many coefficients")
            return FieldElement(self, self.undigits(value))
        return FieldElement(self, int(value) % self.p)

    def element(self, code: int) -> "FieldElement":
        if not 0 <= code < self.q:
            raise FieldError(f"code {code} out of range for {self}")
        return FieldElement(self, code)

    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    def one(self) -> "FieldElement":
        return FieldElement(self, 1)


class FieldElement:
    """Immutable element of a :class:`FieldSpec`, stored as its integer code."""

    __slots__ = ("spec", "value")

    def __init__(self, spec: FieldSpec, value: int):
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "value", int(value))

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(self.spec.digits(self.value))

    def encode(self) -> int:
        return self.value

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldError(f"mixed fields {self.spec} and {other.spec}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.spec.p
        return NotImplemented

    def _wrap(self, v) -> FieldElement:
        return FieldElement(self.spec, int(v))

    def __add__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.sub(self.value, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.sub(b, self.value))

    def __neg__(self):
        return self._wrap(self.spec.neg(self.value))

    def __mul__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.mul(self.value, b))

    __rmul__ = __mul__

    def inv(self) -> FieldElement:
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero in " + str(self.spec))
        if self.spec.n == 1:
            return self._wrap(pow(self.value, self.spec.p - 2, self.spec.p))
        return self._wrap(_ext_euclid_inverse(self.spec, self.value))

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return self * FieldElement(self.spec, b).inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        result, base = self.spec.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def frobenius(self, times: int = 1) -> FieldElement:
        return self ** (self.spec.p**times)

    def is_zero(self) -> bool:
        return self.value == 0

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.spec.p and self.value < self.spec.p
        return NotImplemented

    def __hash__(self):
        return hash((self.spec.ident, self.value))

    def __repr__(self):
        if self.spec.n == 1:
            return str(self.value)
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            coef = str(c) if (c != 1 or i == 0) else ""
            terms.append(coef + ("*" if coef and mono else "") + mono)
        return " + ".join(terms) or "0"


def _ext_euclid_inverse(spec: FieldSpec, a: int) -> int:
    """Inverse via the extended Euclidean algorithm on polynomials over F_p."""
    p = spec.p
    r0, r1 = list(spec.modulus), _trim(spec.digits(a))
    s0, s1 = [], [1]
    while r1:
        # polynomial division r0 = quo * r1 + rem
        rem = list(r0)
        quo = [0] * max(len(r0) - len(r1) + 1, 1)
        inv_lead = pow(r1[-1], p - 2, p)
        while len(_trim(rem)) >= len(r1):
            c = rem[-1] * inv_lead % p
            shift = len(rem) - len(r1)
            quo[shift] = c
            for i, x in enumerate(r1):
                rem[shift + i] = (rem[shift + i] - c * x) % p
        # s_next = s0 - quo * s1
        prod = [0] * (len(quo) + len(s1))
        for i, x in enumerate(quo):
            for j, y in enumerate(s1):
                prod[i + j] = (prod[i + j] + x * y) % p
        s_next = [((s0[i] if i < len(s0) else 0) - (prod[i] if i < len(prod) else 0)) % p
                  for i in range(max(len(s0), len(prod)))]
        r0, r1 = r1, _trim(rem)
        s0, s1 = s1, _trim(s_next)
    # r0 is a nonzero constant
    c = pow(r0[0], p - 2, p)
    return spec.undigits(_polymod([x * c for x in s0], spec.modulus, p))


@functools.lru_cache(maxsize=None)
def _field_make(p: int, n: int) -> FieldSpec:
    mod = canonical_modulus(p, n) if n > 1 else (0, 1)
    return FieldSpec(p, n, mod)


def field_make(p: int, n: int = 1, cap: int = DEFAULT_FIELD_CAP) -> FieldSpec:
    """Build F_{p^n} with the canonical modulus (deterministic and cached)."""
    if not isinstance(p, int) or not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if n < 1:
        raise FieldError("extension degree must be >= 1")
    if p**n > cap:
        raise FieldError(f"q = {p}^{n} exceeds the field size cap {cap}")
    return _field_make(p, n)


def field_of_order(q: int, cap: int = DEFAULT_FIELD_CAP) -> FieldSpec:
    pn = prime_power(q)
    if pn is None:
        raise FieldError(f"{q} is not a prime power")
    return field_make(pn[0], pn[1], cap)


def enumerate_field(spec: FieldSpec) -> Iterator[FieldElement]:
    """All q elements in ascending code order, starting at 0."""
    for code in range(spec.q):
        yield FieldElement(spec, code)
