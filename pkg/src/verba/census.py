"""Images, fibres and statistics of word maps on small matrix groups.

Word maps are conjugation equivariant, so counts are tallied per conjugacy
class: the first letter ranges over class representatives (weighted by class
size) and the remaining letters over the whole group.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import _par
from .ff import FieldSpec, field_of_order
from .grp import MatrixGroup, make_group
from .trace import Poly, compile_trace2
from .word import Word, commutator, evaluate_batch, sequence_word

DEFAULT_BUDGET = 2 * 10**8
BLOCK = 1 << 15
FIBRE_HEADER = "verba-fibretable v1"


class CensusError(ValueError):
    pass


class BudgetExceeded(CensusError):
    pass


# -- tuple enumeration -----------------------------------------------------------

def _reduced_tuples(G: MatrixGroup, d: int, lo: int, hi: int):
    """Tuples (rep_slot, x_1, ..., x_d) for flat ranks in [lo, hi).

    x_1 is the class representative ``reps[rep_slot]``; the others run over G.
    """
    N = G.order
    r = np.arange(lo, hi, dtype=np.int64)
    rest = N ** (d - 1)
    slot = r // rest
    r = r % rest
    args = [G.classes.reps[slot]]
    for i in range(d - 1):
        args.append((r // N ** (d - 2 - i)) % N)
    return slot, args


def _check_budget(n: int, budget: int):
    if n > budget:
        raise BudgetExceeded(f"{n} evaluations exceed budget {budget}")


def class_matrix(G: MatrixGroup, d: int, func: Callable, budget: int = DEFAULT_BUDGET,
                 workers: int = 1) -> np.ndarray:
    """M[r, K] = #{(x_2..x_d) : func(rep_r, x_2, ...) lies in class K}.

    ``func`` maps a list of d index arrays to an index array; entries equal to
    -1 are dropped (used for predicates).
    """
    cls = G.classes
    k = cls.k
    total = k * G.order ** (d - 1)
    _check_budget(total, budget)

    def run(bounds):
        slot, args = _reduced_tuples(G, d, *bounds)
        vals = func(args)
        keep = vals >= 0
        flat = slot[keep] * k + cls.class_of[vals[keep]]
        return np.bincount(flat, minlength=k * k)

    acc = np.zeros(k * k, dtype=np.int64)
    for part in _par.map_blocks(run, _par.blocks(total, BLOCK), workers):
        acc += part
    return acc.reshape(k, k)


def _pushforward(G: MatrixGroup, M: np.ndarray) -> np.ndarray:
    """Per-class fibre N(g) for g in class K from the representative matrix."""
    sizes = G.classes.sizes
    weighted = sizes @ M
    if np.any(weighted % sizes):
        raise AssertionError("fibre counts are not constant on classes")
    return weighted // sizes


def count_tuples(G: MatrixGroup, d: int, pred: Callable, budget: int = DEFAULT_BUDGET,
                 workers: int = 1) -> int:
    """#{(x_1..x_d) in G^d : pred} for a conjugation-invariant predicate."""
    cls = G.classes
    total = cls.k * G.order ** (d - 1)
    _check_budget(total, budget)

    def run(bounds):
        slot, args = _reduced_tuples(G, d, *bounds)
        ok = pred(args)
        return int(cls.sizes[slot[ok]].sum())

    return sum(_par.map_blocks(run, _par.blocks(total, BLOCK), workers))


# -- censuses ----------------------------------------------------------------------

@dataclass
class Census:
    word: Word
    group: MatrixGroup
    fibre: np.ndarray          # N_w(g) for g in class K, indexed by K
    checks: int                # word evaluations performed

    @property
    def reps(self) -> np.ndarray:
        return self.group.classes.reps

    @property
    def sizes(self) -> np.ndarray:
        return self.group.classes.sizes

    @property
    def arity(self) -> int:
        return self.word.d

    @property
    def image_classes(self) -> np.ndarray:
        return np.flatnonzero(self.fibre > 0)

    @property
    def image(self) -> np.ndarray:
        """Boolean bitmap over element indices."""
        return self.fibre[self.group.classes.class_of] > 0

    @property
    def image_size(self) -> int:
        return int(self.sizes[self.fibre > 0].sum())

    def total(self) -> int:
        return int((self.fibre * self.sizes).sum())

    def per_class(self) -> list[dict]:
        G = self.group
        return [{"rep": list(G.element(int(r)).entries), "class_size": int(s), "fibre": int(f)}
                for r, s, f in zip(self.reps, self.sizes, self.fibre)]


def fibre_census(w: Word, G: MatrixGroup, budget: int = DEFAULT_BUDGET, workers: int = 1,
                 per_element: bool = False) -> Census:
    """Exact N_w on every conjugacy class."""
    if per_element:
        return _census_brute(w, G, budget, workers)
    M = class_matrix(G, w.d, lambda args: evaluate_batch(w, args, G), budget, workers)
    fib = _pushforward(G, M)
    c = Census(w, G, fib, G.classes.k * G.order ** (w.d - 1))
    if c.total() != G.order ** w.d:
        raise AssertionError("partition identity failed")
    return c


def _census_brute(w: Word, G: MatrixGroup, budget: int, workers: int) -> Census:
    N, d = G.order, w.d
    total = N**d
    _check_budget(total, budget)

    def run(bounds):
        r = np.arange(*bounds, dtype=np.int64)
        args = [(r // N ** (d - 1 - i)) % N for i in range(d)]
        return np.bincount(evaluate_batch(w, args, G), minlength=N)

    counts = np.zeros(N, dtype=np.int64)
    for part in _par.map_blocks(run, _par.blocks(total, BLOCK), workers):
        counts += part
    cls = G.classes
    fib = counts[cls.reps]
    if not np.array_equal(counts, fib[cls.class_of]):
        raise AssertionError("N_w is not constant on conjugacy classes")
    return Census(w, G, fib, total)


def element_fibres(census: Census) -> np.ndarray:
    return census.fibre[census.group.classes.class_of]


# -- images and set powers --------------------------------------------------------

def class_product(G: MatrixGroup, A: Sequence[int], B: Sequence[int]) -> np.ndarray:
    """Class ids covered by C_a C_b for a in A, b in B (unions of classes are normal)."""
    cls = G.classes
    hit = np.zeros(cls.k, dtype=bool)
    members_b = np.concatenate([cls.members(int(b)) for b in B]) if len(B) else np.zeros(0, int)
    for a in A:
        prod = G.mul(np.full(len(members_b), cls.reps[int(a)]), members_b)
        hit[cls.class_of[prod]] = True
        if hit.all():
            break
    return np.flatnonzero(hit)


def product_bitmap(G: MatrixGroup, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Elementwise bitmap of A*B by full enumeration of A x B."""
    out = np.zeros(G.order, dtype=bool)
    a_idx, b_idx = np.flatnonzero(A), np.flatnonzero(B)
    for a in a_idx:
        out[G.mul(np.full(len(b_idx), a), b_idx)] = True
        if out.all():
            break
    return out


@dataclass
class ImageReport:
    group: str
    word: str
    image_size: int
    order: int
    surjective: bool
    missing_classes: list[int]
    cover_exponent: int | None
    log_ratio: float
    census: Census = field(repr=False)


def image_and_cover(w: Word, G: MatrixGroup, k: int = 1, budget: int = DEFAULT_BUDGET,
                    workers: int = 1) -> ImageReport:
    """Image of w, surjectivity, and the least j <= k with w(G)^j = G."""
    c = fibre_census(w, G, budget, workers)
    img = list(c.image_classes)
    kk = G.classes.k
    cover = None
    cur = img
    for j in range(1, k + 1):
        if j > 1:
            cur = list(class_product(G, cur, img))
        if len(cur) == kk:
            cover = j
            break
    size = c.image_size
    ratio = math.log(size) / math.log(G.order) if G.order > 1 else 1.0
    missing = [int(i) for i in np.flatnonzero(c.fibre == 0)]
    return ImageReport(G.name, str(w), size, G.order, not missing, missing, cover, ratio, c)


def ore_check(G: MatrixGroup, workers: int = 1) -> ImageReport:
    return image_and_cover(commutator(Word.gen(1, 2), Word.gen(2, 2)), G, 1, workers=workers)


# -- sequence counts -----------------------------------------------------------------

def count_u_equation(G: MatrixGroup, workers: int = 1) -> int:
    """#{(x, y) in G^2 : u_1(x, y) = u_2(x, y) != 1}."""
    u1, u2 = sequence_word("u", 1), sequence_word("u", 2)

    def pred(args):
        a = evaluate_batch(u1, args, G)
        b = evaluate_batch(u2, args, G)
        return (a == b) & (a != G.identity_index)

    return count_tuples(G, 2, pred, workers=workers)


# -- fibre table of pi(x, y) = (tr x, tr xy, tr y) -----------------------------------

@dataclass
class FibreTable:
    field: FieldSpec
    counts: np.ndarray   # shape (q, q, q), indexed by codes of (s, u, t)

    @property
    def q(self) -> int:
        return self.field.q

    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        return (isinstance(other, FibreTable) and self.field == other.field
                and np.array_equal(self.counts, other.counts))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"{FIBRE_HEADER}, field={self.field.ident}, q={self.q}\n")
        s, u, t = np.nonzero(np.ones_like(self.counts, dtype=bool))
        for a, b, c, n in zip(s, u, t, self.counts.ravel()):
            buf.write(f"{a},{b},{c},{n}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "FibreTable":
        lines = text.splitlines()
        if not lines:
            raise CensusError("empty fibre table file")
        head = [h.strip() for h in lines[0].split(",")]
        if len(head) != 3 or head[0] != FIBRE_HEADER or not head[1].startswith("field=") \
                or not head[2].startswith("q="):
            raise CensusError(f"bad fibre table header {lines[0]!r}")
        try:
            q = int(head[2][2:])
        except ValueError:
            raise CensusError(f"bad fibre table header {lines[0]!r}") from None
        F = field_of_order(q)
        if head[1][6:] != F.ident:
            raise CensusError(f"field {head[1][6:]} does not match {F.ident}")
        counts = np.full((q, q, q), -1, dtype=np.int64)
        for row in csv.reader(lines[1:]):
            try:
                a, b, c, n = (int(v) for v in row)
                counts[a, b, c] = n
            except (ValueError, IndexError):
                raise CensusError(f"malformed fibre table row {row!r}") from None
        if (counts < 0).any():
            raise CensusError("fibre table is incomplete")
        return cls(F, counts)


def _fibre_table_reduced(G: MatrixGroup, workers: int) -> np.ndarray:
    q = G.field.q
    cls = G.classes
    tr = G.traces
    ys = np.arange(G.order)

    def run(slot):
        r = cls.reps[slot]
        u = tr[G.mul(np.full(G.order, r), ys)]
        idx = (tr[r] * q + u) * q + tr[ys]
        return np.bincount(idx, minlength=q**3) * cls.sizes[slot]

    acc = np.zeros(q**3, dtype=np.int64)
    for part in _par.map_blocks(run, list(range(cls.k)), workers):
        acc += part
    return acc.reshape(q, q, q)


def _fibre_table_naive(G: MatrixGroup) -> np.ndarray:
    q, N = G.field.q, G.order
    tr = G.traces
    acc = np.zeros(q**3, dtype=np.int64)
    ys = np.arange(N)
    for x in range(N):
        u = tr[G.mul(np.full(N, x), ys)]
        acc += np.bincount((tr[x] * q + u) * q + tr[ys], minlength=q**3)
    return acc.reshape(q, q, q)


def default_cache_dir() -> Path | None:
    env = os.environ.get("VERBA_CACHE")
    return Path(env) if env else None


def build_fibre_table(q: int, cache: str | Path | None = None, workers: int = 1,
                      cross_check: bool | None = None) -> FibreTable:
    """N_pi(s, u, t) over SL(2,q)^2, read from / written to ``cache`` if given."""
    F = field_of_order(q)
    path = None
    if cache is not None:
        path = Path(cache) / f"fibretable-{F.ident.replace('^', '_').replace('#', '-')}.csv"
        if path.exists():
            tab = FibreTable.from_csv(path.read_text())
            if tab.field != F:
                raise CensusError(f"cache file {path} is for another field")
            return tab
    G = make_group("SL2", q)
    counts = _fibre_table_reduced(G, workers)
    if cross_check is None:
        cross_check = q <= 7
    if cross_check and not np.array_equal(counts, _fibre_table_naive(G)):
        raise AssertionError("class-reduced fibre table disagrees with naive count")
    tab = FibreTable(F, counts)
    if tab.total() != G.order**2:
        raise AssertionError("fibre table does not sum to |SL(2,q)|^2")
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(tab.to_csv())
    return tab


def discriminant_mask(F: FieldSpec) -> np.ndarray:
    """(s, u, t) with (s^2-4)(t^2-4)(s^2+t^2+u^2-ust-4) != 0."""
    s, u, t = Poly.var("s"), Poly.var("u"), Poly.var("t")
    D = (s * s - 4) * (t * t - 4) * (s * s + t * t + u * u - u * s * t - 4)
    q = F.q
    grid = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij")
    return (D.eval_field(F, *(g.ravel() for g in grid)) != 0).reshape(q, q, q)


def fibre_spread(tab: FibreTable) -> Fraction:
    """Smallest C with |N - q^3| <= C q^2 at every point off the discriminant locus."""
    q = tab.q
    vals = tab.counts[discriminant_mask(tab.field)]
    if not len(vals):
        return Fraction(0)
    return Fraction(int(np.abs(vals - q**3).max()), q * q)


@dataclass
class TraceCensus:
    q: int
    poly: str
    T: np.ndarray                       # T(a) indexed by code of a
    trace_class_size: np.ndarray        # #{g in SL(2,q) : tr g = a}
    unresolved: list[int]               # codes of +-2

    def fibre_at_trace(self, a: int) -> int:
        if a in self.unresolved:
            raise CensusError("trace +-2 classes are unresolved at trace level")
        n, sz = int(self.T[a]), int(self.trace_class_size[a])
        if n % sz:
            raise AssertionError("trace census is not divisible by the class size")
        return n // sz


def trace_census(f_w: Poly | Word, table: FibreTable) -> TraceCensus:
    """Distribution of tr w(x, y) over SL(2,q)^2 through the fibre table."""
    if isinstance(f_w, Word):
        f_w = compile_trace2(f_w)
    F = table.field
    q = F.q
    grid = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij")
    vals = f_w.eval_field(F, *(g.ravel() for g in grid))
    T = np.zeros(q, dtype=np.int64)
    np.add.at(T, vals, table.counts.ravel())
    G = make_group("SL2", q)
    sizes = np.bincount(G.traces, minlength=q)
    two = F.from_int(2)
    unresolved = sorted({int(two), int(F.neg(two))})
    return TraceCensus(q, str(f_w), T, sizes, unresolved)


def compare_trace_census(w: Word, q: int, table: FibreTable | None = None) -> list[dict]:
    """Per SL(2,q) class with trace != +-2: trace-level and brute-force N_w."""
    table = table or build_fibre_table(q)
    tc = trace_census(w, table)
    G = make_group("SL2", q)
    c = fibre_census(w, G)
    out = []
    for K, r in enumerate(G.classes.reps):
        a = int(G.traces[r])
        if a in tc.unresolved:
            continue
        out.append({"class": K, "trace": a, "trace_level": tc.fibre_at_trace(a),
                    "direct": int(c.fibre[K])})
    return out


# -- equidistribution ---------------------------------------------------------------

@dataclass
class EquidistReport:
    epsilon_star: Fraction
    excluded: int
    l1: Fraction
    order: int
    epsilon_inf: Fraction


def deviations(census: Census) -> tuple[list[Fraction], list[int]]:
    """Relative deviation |N(g) - mean| / mean per class, with class sizes."""
    N = census.group.order
    mean = Fraction(N ** census.arity, N)
    devs = [abs(Fraction(int(f)) - mean) / mean for f in census.fibre]
    return devs, [int(s) for s in census.sizes]


def excluded_count(devs: Sequence[Fraction], sizes: Sequence[int], eps: Fraction) -> int:
    """#{g : deviation(g) >= eps}."""
    return sum(s for d, s in zip(devs, sizes) if d >= eps)


def is_equidistributed(devs, sizes, eps: Fraction) -> bool:
    """Some Y' with #Y' > (1 - eps)|G| has every deviation < eps."""
    order = sum(sizes)
    return excluded_count(devs, sizes, eps) < eps * order


def epsilon_infimum(devs: Sequence[Fraction], sizes: Sequence[int]) -> Fraction:
    """Infimum of all valid eps (not necessarily attained).

    On an interval (l, h] between consecutive observed deviations the excluded
    count is the constant B = #{dev > l}, so eps is valid there iff eps > B/|G|.
    """
    order = sum(sizes)
    levels = sorted(set(devs) | {Fraction(0)})
    best = None
    for i, lo in enumerate(levels):
        hi = levels[i + 1] if i + 1 < len(levels) else None
        cand = max(lo, Fraction(sum(s for d, s in zip(devs, sizes) if d > lo), order))
        if hi is not None and cand >= hi:
            continue
        best = cand if best is None else min(best, cand)
    return best


def epsilon_star(devs: Sequence[Fraction], sizes: Sequence[int]) -> tuple[Fraction, int]:
    """Least observed deviation d such that every eps slightly above d is valid.

    Just above d the excluded set is {dev > d}, so the test is
    #{dev > d} <= d |G|.  Returns d and that excluded count.  The projection
    word gives 0.
    """
    order = sum(sizes)
    for eps in sorted(set(devs)):
        B = sum(s for d, s in zip(devs, sizes) if d > eps)
        if B <= eps * order:
            return eps, B
    raise AssertionError("the largest deviation always qualifies")


def l1_distance(census: Census) -> Fraction:
    N = census.group.order
    tot = N ** census.arity
    return sum((abs(Fraction(int(f), tot) - Fraction(1, N)) * int(s)
                for f, s in zip(census.fibre, census.sizes)), Fraction(0))


def equidist_stats(census: Census) -> EquidistReport:
    devs, sizes = deviations(census)
    eps, excl = epsilon_star(devs, sizes)
    return EquidistReport(eps, excl, l1_distance(census), census.group.order,
                          epsilon_infimum(devs, sizes))


# -- character degree data and the Witten bound --------------------------------------

# irreducible character degrees of PSL(2,q)
DEGREES: dict[str, list[int]] = {
    "PSL2/4": [1, 4, 5, 3, 3],
    "PSL2/5": [1, 5, 3, 3, 4],
    "PSL2/7": [1, 7, 3, 3, 8, 6],
    "PSL2/8": [1, 8, 9, 9, 9, 7, 7, 7, 7],
    "PSL2/9": [1, 9, 5, 5, 10, 8, 8],
    "PSL2/11": [1, 11, 5, 5, 12, 12, 10, 10],
    "PSL2/13": [1, 13, 7, 7, 14, 14, 12, 12, 12],
}


class DegreeDataError(CensusError):
    pass


def validate_degrees(G: MatrixGroup, degrees: Sequence[int]) -> None:
    if len(degrees) != G.classes.k:
        raise DegreeDataError(f"{len(degrees)} degrees but k(G) = {G.classes.k}")
    if sum(d * d for d in degrees) != G.order:
        raise DegreeDataError(f"sum of squared degrees != |G| = {G.order}")


def sqrt_interval(x: Fraction, digits: int = 30) -> tuple[Fraction, Fraction]:
    """Outward-rounded enclosure of sqrt(x)."""
    scale = 10**digits
    lo = math.isqrt(x.numerator * scale * scale // x.denominator)
    hi = lo + 1
    return Fraction(lo, scale), Fraction(hi, scale)


@dataclass
class WittenReport:
    zeta2: Fraction
    bound: tuple[Fraction, Fraction]
    l1: Fraction
    passed: bool


def witten_check(G: MatrixGroup, degrees: Sequence[int], census: Census | None = None) -> WittenReport:
    validate_degrees(G, degrees)
    if census is None:
        census = fibre_census(commutator(Word.gen(1, 2), Word.gen(2, 2)), G)
    zeta = sum((Fraction(1, d * d) for d in degrees), Fraction(0))
    l1 = l1_distance(census)
    return WittenReport(zeta, sqrt_interval(zeta - 1), l1, l1 * l1 <= zeta - 1)


# -- class products --------------------------------------------------------------------

@dataclass
class ClassPairReport:
    group: str
    mode: str
    order_filter: bool
    pairs: list[tuple[int, ...]]
    coprime6: list[bool]


def _full_product(G: MatrixGroup, a: int, b: int) -> np.ndarray:
    cls = G.classes
    A, B = cls.members(a), cls.members(b)
    out = np.zeros(G.order, dtype=bool)
    for x in A:
        out[G.mul(np.full(len(B), x), B)] = True
    return out


def class_pair_search(G: MatrixGroup, mode: str, order_filter: bool = False,
                      budget: int = DEFAULT_BUDGET, workers: int = 1) -> ClassPairReport:
    """thompson: classes C with C C = G.  gm: ordered pairs with C1 C2 = G minus {1}."""
    if mode not in ("thompson", "gm"):
        raise CensusError(f"unknown mode {mode!r}")
    cls = G.classes
    orders = G.element_orders(cls.reps)
    coprime = [bool(math.gcd(int(o), 6) == 1) for o in orders]
    e_cls = int(cls.class_of[G.identity_index])
    cands = [c for c in range(cls.k) if c != e_cls and (coprime[c] or not order_filter)]
    everything = np.ones(cls.k, dtype=bool)
    nontrivial = everything.copy()
    nontrivial[e_cls] = False
    target = everything if mode == "thompson" else nontrivial
    todo = [(c, c) for c in cands] if mode == "thompson" else [(a, b) for a in cands for b in cands]

    def test(pair):
        hit = np.zeros(cls.k, dtype=bool)
        hit[class_product(G, [pair[0]], [pair[1]])] = True
        return bool(np.array_equal(hit, target))

    flags_ok = _par.map_blocks(test, todo, workers)
    pairs = [(p[0],) if mode == "thompson" else p for p, ok in zip(todo, flags_ok) if ok]
    # re-verify by full product enumeration
    for p in pairs:
        a, b = (p[0], p[0]) if len(p) == 1 else p
        _check_budget(int(cls.sizes[a]) * int(cls.sizes[b]), budget)
        full = _full_product(G, a, b)
        want = np.ones(G.order, dtype=bool)
        if mode == "gm":
            want[G.identity_index] = False
        if not np.array_equal(full, want):
            raise AssertionError(f"class product {p} failed full verification")
    flags = [all(coprime[c] for c in p) for p in pairs]
    return ClassPairReport(G.name, mode, order_filter, pairs, flags)


# -- Engel curve criterion --------------------------------------------------------------

def engel_r() -> Poly:
    s, t = Poly.var("s"), Poly.var("t")
    return s * s + 2 * t * t - s * t * t - 2


@dataclass
class EngelCurveReport:
    n: int
    q: int
    curve: list[int]
    direct: list[int] | None
    equal: bool | None
    covers_all: bool


def engel_curve_values(n: int, F: FieldSpec) -> np.ndarray:
    """Values of r^(n)(s1, t) over F_q^2 (r iterated n times in its first argument)."""
    r = engel_r()
    q = F.q
    s, t = (g.ravel() for g in np.meshgrid(np.arange(q), np.arange(q), indexing="ij"))
    u0 = np.zeros_like(s)
    for _ in range(n):
        s = r.eval_field(F, s, u0, t)
    return s


def engel_curve_check(n: int, q: int, direct: bool = True, workers: int = 1) -> EngelCurveReport:
    """Traces a != +-2 reached by the curve r^(n)(s1, t) = a versus by e_{n+1} on SL(2,q)."""
    if n < 1:
        raise CensusError("n must be positive")
    F = field_of_order(q)
    two = F.from_int(2)
    pm2 = {int(two), int(F.neg(two))}
    vals = engel_curve_values(n, F)
    curve_all = set(int(v) for v in np.unique(vals))
    curve = sorted(curve_all - pm2)
    covers = len(curve_all) == q
    d_list, eq = None, None
    if direct:
        G = make_group("SL2", q)
        c = fibre_census(sequence_word("engel", n + 1), G, workers=workers)
        traces = set(int(a) for a in G.traces[c.reps[c.fibre > 0]])
        d_list = sorted(traces - pm2)
        eq = d_list == curve
    return EngelCurveReport(n, q, curve, d_list, eq, covers)


# -- -I as x^a y^b ---------------------------------------------------------------------

@dataclass
class MinusIdReport:
    a: int
    b: int
    q: int
    found: bool
    witness: tuple | None


def minus_id_check(a: int, b: int, q: int) -> MinusIdReport:
    """Exact decision of whether x^a y^b = -I has a solution in SL(2,q)."""
    F = field_of_order(q)
    if F.p == 2:
        raise CensusError("-I = I in characteristic 2; q must be odd")
    G = make_group("SL2", q)
    allg = np.arange(G.order)
    pa, pb = G.power(allg, a), G.power(allg, b)
    minus = int(G.index_of(F.neg(G.alg.identity())[None])[0])
    # x^a y^b = -I  iff  y^b = -x^{-a}
    need = G.mul(np.full(G.order, minus), G.inv(pa))
    in_pb = np.zeros(G.order, dtype=bool)
    in_pb[pb] = True
    hits = np.flatnonzero(in_pb[need])
    if not len(hits):
        return MinusIdReport(a, b, q, False, None)
    x = int(hits[0])
    y = int(np.flatnonzero(pb == need[x])[0])
    assert int(G.mul(G.power(x, a), G.power(y, b))) == minus
    return MinusIdReport(a, b, q, True, (G.element(x), G.element(y)))


# -- bound calculators ------------------------------------------------------------------

def weil_holds(q: int, g: int, d: int, k: int) -> bool:
    """q + 1 - 2g sqrt(q) - d - k > 0, decided in integers."""
    lhs = q + 1 - d - k
    return lhs > 0 and lhs * lhs > 4 * g * g * q


def weil_threshold(g: int, d: int, k: int) -> int:
    """Least q0 >= 1 such that the Weil lower bound is positive for every q >= q0."""
    if min(g, d, k) < 0:
        raise CensusError("weil parameters must be nonnegative")
    c = 1 - d - k
    D = g * g - c
    if D < 0:
        return 1
    q0 = max(1, 2 * g * g - c + math.isqrt(4 * g * g * D) + 1)
    # positivity region for large q is q > (g + sqrt(D))^2
    assert weil_holds(q0, g, d, k)
    return q0


@dataclass
class GLBound:
    d: int
    q: int
    lo: int
    hi: int

    @property
    def exact(self) -> bool:
        return self.lo == self.hi


def gl_bound(d: int, q: int) -> GLBound:
    """(d-1)(d-2) q^(3/2) + 12 (d+4)^4 q, exact when q is a square."""
    from .ff import prime_power

    if d < 0 or prime_power(q) is None:
        raise CensusError("gl needs d >= 0 and a prime power q")
    a, b = (d - 1) * (d - 2), 12 * (d + 4) ** 4 * q
    r = math.isqrt(q**3)
    if r * r == q**3:
        return GLBound(d, q, a * r + b, a * r + b)
    return GLBound(d, q, a * r + b, a * (r + 1) + b)


def bounds_calc(kind: str, *args: int):
    if kind == "weil":
        return weil_threshold(*args)
    if kind == "gl":
        return gl_bound(*args)
    raise CensusError(f"unknown bound {kind!r}")
