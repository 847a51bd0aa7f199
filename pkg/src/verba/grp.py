"""Matrix groups over finite fields as finite point sets.

Enumerable groups (SL(2,q), PSL(2,q), SL(3,q)) are materialised as an
``(order, n*n)`` array of entry codes in lexicographic order of the entry
tuple; an element's *index* is its row in that array and every census works
on index arrays.  The Suzuki family is represented only through the
parametrised matrices ``x(v), y(v)`` and is never enumerated.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ff import FieldElement, FieldSpec, field_make, field_of_order

DEFAULT_GROUP_CAP = 10**5
CAYLEY_CAP = 6000


class GroupError(ValueError):
    pass


class CapExceeded(GroupError):
    pass


# -- batched matrix arithmetic over a field ----------------------------------

class MatrixAlgebra:
    """Batched n x n matrix arithmetic; a batch is an int64 array (..., n*n)."""

    def __init__(self, field: FieldSpec, n: int):
        self.field = field
        self.n = n

    def identity(self, shape=()) -> np.ndarray:
        eye = np.zeros(self.n * self.n, dtype=np.int64)
        eye[:: self.n + 1] = 1
        return np.broadcast_to(eye, tuple(shape) + (self.n * self.n,)).copy()

    def one(self, like: np.ndarray) -> np.ndarray:
        return self.identity(like.shape[:-1])

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        F, n = self.field, self.n
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if F.n == 1:
            shape = np.broadcast_shapes(a.shape, b.shape)
            out = np.matmul(a.reshape(a.shape[:-1] + (n, n)), b.reshape(b.shape[:-1] + (n, n))) % F.p
            return out.reshape(shape)
        shape = np.broadcast_shapes(a.shape, b.shape)
        out = np.empty(shape, dtype=np.int64)
        for i in range(n):
            for j in range(n):
                acc = F.mul(a[..., i * n], b[..., j])
                for k in range(1, n):
                    acc = F.add(acc, F.mul(a[..., i * n + k], b[..., k * n + j]))
                out[..., i * n + j] = acc
        return out

    def neg(self, a: np.ndarray) -> np.ndarray:
        return self.field.neg(a)

    def trace(self, a: np.ndarray) -> np.ndarray:
        F, n = self.field, self.n
        a = np.asarray(a, dtype=np.int64)
        acc = a[..., 0]
        for i in range(1, n):
            acc = F.add(acc, a[..., i * (n + 1)])
        return acc

    def det(self, a: np.ndarray) -> np.ndarray:
        F, n = self.field, self.n
        a = np.asarray(a, dtype=np.int64)
        if n == 2:
            return F.sub(F.mul(a[..., 0], a[..., 3]), F.mul(a[..., 1], a[..., 2]))
        m = a.reshape(-1, n, n).copy()
        rows = np.arange(m.shape[0])
        det = np.ones(m.shape[0], dtype=np.int64)
        for col in range(n):
            nz = m[:, col:, col] != 0
            has = nz.any(axis=1)
            r = col + np.argmax(nz, axis=1)
            swap = r != col
            top = m[rows, col].copy()
            m[rows, col] = m[rows, r]
            m[rows, r] = top
            det = np.where(swap, F.neg(det), det)
            piv = np.where(has, m[:, col, col], 1)
            det = np.where(has, F.mul(det, piv), 0)
            pinv = F.inv(piv)
            for i in range(col + 1, n):
                fac = F.mul(m[:, i, col], pinv)
                m[:, i, :] = F.sub(m[:, i, :], F.mul(fac[:, None], m[:, col, :]))
        return det.reshape(a.shape[:-1])

    def inv(self, a: np.ndarray) -> np.ndarray:
        """Inverse of invertible matrices (adjugate for n = 2, Gauss-Jordan otherwise)."""
        F, n = self.field, self.n
        a = np.asarray(a, dtype=np.int64)
        if n == 2:
            d = self.det(a)
            dinv = F.inv(d)
            out = np.stack([a[..., 3], F.neg(a[..., 1]), F.neg(a[..., 2]), a[..., 0]], axis=-1)
            return F.mul(out, dinv[..., None])
        shape = a.shape
        m = a.reshape(-1, n, n).copy()
        e = self.identity((m.shape[0],)).reshape(-1, n, n)
        rows = np.arange(m.shape[0])
        for col in range(n):
            nz = m[:, col:, col] != 0
            if not nz.any(axis=1).all():
                raise GroupError("singular matrix in batch")
            r = col + np.argmax(nz, axis=1)
            for arr in (m, e):
                top = arr[rows, col].copy()
                arr[rows, col] = arr[rows, r]
                arr[rows, r] = top
            pinv = F.inv(m[:, col, col])
            m[:, col, :] = F.mul(m[:, col, :], pinv[:, None])
            e[:, col, :] = F.mul(e[:, col, :], pinv[:, None])
            for i in range(n):
                if i == col:
                    continue
                fac = m[:, i, col][:, None].copy()
                m[:, i, :] = F.sub(m[:, i, :], F.mul(fac, m[:, col, :]))
                e[:, i, :] = F.sub(e[:, i, :], F.mul(fac, e[:, col, :]))
        return e.reshape(shape)


# -- groups -----------------------------------------------------------------

@dataclass(frozen=True)
class ClassTable:
    """Conjugacy classes: representative index, size, and class id per element."""

    reps: np.ndarray
    sizes: np.ndarray
    class_of: np.ndarray

    @property
    def k(self) -> int:
        return len(self.reps)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.class_of == c)


class MatrixGroup:
    """SL(n,q) or PSL(2,q) with cached enumeration, index map and class table.

    Methods ``mul``, ``inv`` and ``one`` act on arrays of element indices, so
    words can be evaluated on whole batches of tuples at once.
    """

    def __init__(self, variant: str, field: FieldSpec, cap: int = DEFAULT_GROUP_CAP):
        if variant not in ("SL2", "PSL2", "SL3"):
            raise GroupError(f"unknown variant {variant!r}")
        self.variant = variant
        self.field = field
        self.dim = 3 if variant == "SL3" else 2
        self.projective = variant == "PSL2" and field.p != 2
        self.alg = MatrixAlgebra(field, self.dim)
        self.cap = cap
        q = field.q
        expected = self.expected_order()
        if expected > cap:
            raise CapExceeded(f"|{self.name}| = {expected} exceeds the enumeration cap {cap}")
        if variant == "SL3" and q**9 > 2 * 10**6:
            raise CapExceeded("SL3 enumeration is limited to q <= 5")

    @property
    def name(self) -> str:
        return f"{self.variant}/{self.field.q}"

    def __repr__(self) -> str:
        return f"MatrixGroup({self.name})"

    def __eq__(self, other):
        return (isinstance(other, MatrixGroup) and self.variant == other.variant
                and self.field == other.field)

    def __hash__(self):
        return hash((self.variant, self.field))

    def expected_order(self) -> int:
        q = self.field.q
        if self.dim == 2:
            o = q * (q * q - 1)
            return o // math.gcd(2, q - 1) if self.variant == "PSL2" else o
        return q**3 * (q**2 - 1) * (q**3 - 1)

    # -- enumeration --------------------------------------------------------
    def _keys(self, mats: np.ndarray) -> np.ndarray:
        q = self.field.q
        key = np.zeros(mats.shape[:-1], dtype=np.int64)
        for i in range(mats.shape[-1]):
            key = key * q + mats[..., i]
        return key

    def canonical(self, mats: np.ndarray) -> np.ndarray:
        """PSL2 representative: the lexicographically smaller of M and -M."""
        mats = np.asarray(mats, dtype=np.int64)
        if not self.projective:
            return mats
        F = self.field
        lead = np.where(mats[..., 0] != 0, mats[..., 0], mats[..., 1])
        flip = F.neg(lead) < lead
        return np.where(flip[..., None], F.neg(mats), mats)

    @functools.cached_property
    def elements(self) -> np.ndarray:
        F = self.field
        q = F.q
        if self.dim == 2:
            codes = np.arange(q)
            a, b, c = np.meshgrid(codes[1:], codes, codes, indexing="ij")
            a, b, c = a.ravel(), b.ravel(), c.ravel()
            d = F.mul(F.add(1, F.mul(b, c)), F.inv(a))
            m1 = np.stack([a, b, c, d], axis=1)
            b2, d2 = np.meshgrid(codes[1:], codes, indexing="ij")
            b2, d2 = b2.ravel(), d2.ravel()
            c2 = F.neg(F.inv(b2))
            m0 = np.stack([np.zeros_like(b2), b2, c2, d2], axis=1)
            mats = np.concatenate([m0, m1])
        else:
            allm = np.array(np.unravel_index(np.arange(q**9), (q,) * 9)).T.astype(np.int64)
            mats = allm[self.alg.det(allm) == 1]
        if self.projective:
            mats = mats[(self.canonical(mats) == mats).all(axis=1)]
        mats = mats[np.argsort(self._keys(mats), kind="stable")]
        mats.setflags(write=False)
        if len(mats) != self.expected_order():
            raise GroupError(f"enumeration of {self.name} gave {len(mats)} elements")
        return mats

    @functools.cached_property
    def _sorted_keys(self) -> np.ndarray:
        return self._keys(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def index_of(self, mats: np.ndarray) -> np.ndarray:
        """Indices of matrices (canonicalised first); raises if any is not a member."""
        mats = self.canonical(mats)
        keys = self._keys(mats)
        idx = np.searchsorted(self._sorted_keys, keys)
        idx = np.minimum(idx, self.order - 1)
        if not np.array_equal(self._sorted_keys[idx], keys):
            raise GroupError(f"matrix not in {self.name}")
        return idx

    # -- index-level arithmetic ---------------------------------------------
    @functools.cached_property
    def identity_index(self) -> int:
        return int(self.index_of(self.alg.identity()))

    @functools.cached_property
    def inverse_table(self) -> np.ndarray:
        return self.index_of(self.alg.inv(self.elements))

    @functools.cached_property
    def traces(self) -> np.ndarray:
        return self.alg.trace(self.elements)

    _cayley: np.ndarray | None = None

    def build_cayley(self) -> np.ndarray:
        """Full multiplication table (int32); only for order <= CAYLEY_CAP."""
        if self._cayley is None:
            if self.order > CAYLEY_CAP:
                raise CapExceeded(f"Cayley table for {self.name} exceeds cap {CAYLEY_CAP}")
            tab = np.empty((self.order, self.order), dtype=np.int32)
            els = self.elements
            for i in range(self.order):
                tab[i] = self.index_of(self.alg.mul(els[i], els))
            self._cayley = tab
        return self._cayley

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._cayley is not None:
            return self._cayley[a, b].astype(np.int64)
        els = self.elements
        return self.index_of(self.alg.mul(els[a], els[b]))

    def inv(self, a) -> np.ndarray:
        return self.inverse_table[np.asarray(a, dtype=np.int64)]

    def one(self, like) -> np.ndarray:
        return np.full(np.shape(like), self.identity_index, dtype=np.int64)

    def power(self, a, k: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if k < 0:
            a, k = self.inv(a), -k
        out = self.one(a)
        while k:
            if k & 1:
                out = self.mul(out, a)
            k >>= 1
            if k:
                a = self.mul(a, a)
        return out

    def conj(self, g, h) -> np.ndarray:
        """h g h^-1."""
        return self.mul(self.mul(h, g), self.inv(h))

    @functools.cached_property
    def central_indices(self) -> np.ndarray:
        F = self.field
        cands = [self.alg.identity()]
        if not self.projective and self.dim == 2 and F.p != 2:
            cands.append(F.neg(self.alg.identity()))
        return np.unique(np.concatenate([self.index_of(c[None]) for c in cands]))

    def is_central(self, a) -> np.ndarray:
        return np.isin(np.asarray(a), self.central_indices)

    def element_orders(self, idx) -> np.ndarray:
        idx = np.atleast_1d(np.asarray(idx, dtype=np.int64))
        out = np.zeros(len(idx), dtype=np.int64)
        cur = idx.copy()
        e = self.identity_index
        k = 1
        while (out == 0).any():
            hit = (cur == e) & (out == 0)
            out[hit] = k
            cur = self.mul(cur, idx)
            k += 1
        return out

    @functools.cached_property
    def classes(self) -> ClassTable:
        """Conjugacy classes as full orbits of g under x -> h g h^-1, h in G."""
        n = self.order
        class_of = np.full(n, -1, dtype=np.int64)
        everyone = np.arange(n)
        inv_all = self.inverse_table
        reps, sizes = [], []
        for g in range(n):
            if class_of[g] >= 0:
                continue
            orbit = np.unique(self.mul(self.mul(everyone, np.full(n, g)), inv_all))
            class_of[orbit] = len(reps)
            reps.append(g)
            sizes.append(len(orbit))
        return ClassTable(np.array(reps), np.array(sizes), class_of)

    def random_indices(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.integers(0, self.order, size=size)

    # -- element-level API --------------------------------------------------
    def element(self, idx: int) -> "GroupElement":
        return GroupElement(self, tuple(int(c) for c in self.elements[idx]))

    def __call__(self, rows: Sequence) -> "GroupElement":
        flat = [int(v.value if isinstance(v, FieldElement) else v)
                for row in rows for v in (row if isinstance(row, (list, tuple)) else [row])]
        F = self.field
        flat = [v if 0 <= v < F.q else v % F.p for v in flat]
        m = np.array(flat, dtype=np.int64)
        if len(flat) != self.dim**2 or int(self.alg.det(m)) != 1:
            raise GroupError("entries do not form a determinant-1 matrix")
        return GroupElement(self, tuple(int(c) for c in self.canonical(m)))

    def identity(self) -> "GroupElement":
        return self.element(self.identity_index)

    def __iter__(self):
        for i in range(self.order):
            yield self.element(i)


class GroupElement:
    """A matrix in a concrete group; immutable, compared by entries."""

    __slots__ = ("group", "entries")

    def __init__(self, group, entries: tuple[int, ...]):
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    def field_entries(self) -> list[FieldElement]:
        F = self.group.field
        return [F.element(c) for c in self.entries]

    def _check(self, other: "GroupElement"):
        if not isinstance(other, GroupElement) or other.group != self.group:
            raise GroupError("elements belong to different groups")

    def _make(self, m: np.ndarray) -> "GroupElement":
        g = self.group
        if isinstance(g, MatrixGroup):
            m = g.canonical(m)
        return GroupElement(g, tuple(int(c) for c in m))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return self._make(self.group.alg.mul(self.matrix, other.matrix))

    def inv(self) -> "GroupElement":
        return self._make(self.group.alg.inv(self.matrix))

    def __pow__(self, k: int) -> "GroupElement":
        base = self if k >= 0 else self.inv()
        k = abs(k)
        out = self._make(self.group.alg.identity())
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def trace(self) -> FieldElement:
        return self.group.field.element(int(self.group.alg.trace(self.matrix)))

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.matrix, self.group.alg.identity()))

    def is_central(self) -> bool:
        alg = self.group.alg
        m = self.matrix
        return bool(np.array_equal(m, alg.identity())
                    or np.array_equal(m, alg.neg(alg.identity())))

    def order(self) -> int:
        k, cur = 1, self
        while not cur.is_identity():
            cur = cur * self
            k += 1
        return k

    @property
    def index(self) -> int:
        return int(self.group.index_of(self.matrix))

    def __eq__(self, other):
        return (isinstance(other, GroupElement) and other.group == self.group
                and other.entries == self.entries)

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        n = self.group.alg.n
        rows = [list(self.entries[i * n:(i + 1) * n]) for i in range(n)]
        return f"{self.group.name}{rows}"


# -- Suzuki family -----------------------------------------------------------

class SuzukiFamily:
    """Parametrised 4x4 matrices over F_q, q = 2^(2m+1); not enumerated."""

    def __init__(self, m: int):
        if m < 1:
            raise GroupError("m must be a positive integer")
        self.m = m
        self.field = field_make(2, 2 * m + 1)
        self.alg = MatrixAlgebra(self.field, 4)

    @property
    def name(self) -> str:
        return f"Sz-family/{self.m}"

    @property
    def twist_exponent(self) -> int:
        return 2 ** (self.m + 1)

    def twist(self, a):
        """theta(a) = a^(2^(m+1)); theta(theta(a)) = a^2 on F_q."""
        return self.field.power(a, self.twist_exponent)

    def __eq__(self, other):
        return isinstance(other, SuzukiFamily) and other.m == self.m

    def __hash__(self):
        return hash(("Sz", self.m))

    # batch versions: a, b are code arrays of equal shape
    def template(self, a, b) -> np.ndarray:
        F = self.field
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a0, b0 = self.twist(a), self.twist(b)
        z = np.zeros_like(a)
        o = np.ones_like(a)
        e00 = F.add(F.add(F.mul(F.mul(a, a), a0), F.mul(a, b)), b0)
        e10 = F.add(F.mul(a, a0), b)
        return np.stack([e00, b, a, o,
                         e10, a0, o, z,
                         a, o, z, z,
                         o, z, z, z], axis=-1)

    def points(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        v = np.asarray(v, dtype=np.int64)
        return self.template(v[..., 0], v[..., 1]), self.template(v[..., 2], v[..., 3])


def suzuki_point(m: int, v: Sequence) -> tuple[GroupElement, GroupElement]:
    """x(v), y(v) for v = (a, b, c, d) in F_{2^(2m+1)}^4, twist applied automatically."""
    fam = SuzukiFamily(m)
    codes = []
    for e in v:
        if isinstance(e, FieldElement):
            if e.spec != fam.field:
                raise GroupError(f"parameters must lie in {fam.field}")
            codes.append(e.value)
        else:
            codes.append(int(e))
    if len(codes) != 4:
        raise GroupError("v must have four coordinates")
    x, y = fam.points(np.array(codes))
    return (GroupElement(fam, tuple(int(c) for c in x)),
            GroupElement(fam, tuple(int(c) for c in y)))


# -- construction from identifiers ------------------------------------------

def make_group(variant: str, q: int, cap: int = DEFAULT_GROUP_CAP) -> MatrixGroup:
    """Cached construction; one shared instance per (variant, q, cap)."""
    return _make_group(variant, q, cap)


@functools.lru_cache(maxsize=None)
def _make_group(variant: str, q: int, cap: int) -> MatrixGroup:
    return MatrixGroup(variant, field_of_order(q), cap)


def SL2(q: int) -> MatrixGroup:
    return make_group("SL2", q)


def PSL2(q: int) -> MatrixGroup:
    return make_group("PSL2", q)


def SL3(q: int = 3) -> MatrixGroup:
    return make_group("SL3", q)


def parse_group(text: str, cap: int = DEFAULT_GROUP_CAP):
    """Parse identifiers such as 'SL2/7', 'PSL2/9', 'SL3/3', 'Sz-family/1'."""
    try:
        kind, arg = text.strip().split("/")
        val = int(arg)
    except ValueError:
        raise GroupError(f"bad group identifier {text!r}") from None
    if kind == "Sz-family":
        return SuzukiFamily(val)
    if kind in ("PSL3", "SL3"):
        return make_group("SL3", val, cap)
    if kind in ("SL2", "PSL2"):
        return make_group(kind, val, cap)
    raise GroupError(f"bad group identifier {text!r}")
