"""Verbal dynamical systems over finite matrix groups.

For a recursive law (w, f) and a pair (x, y) the sequence v_1 = w(x, y),
v_{n+1} = f(x, y, v_n) is an orbit of z -> f(x, y, z) on a finite group, so it
is eventually periodic.  Cycle detection runs vectorised over whole blocks of
pairs (Brent's algorithm in lockstep).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _par
from .ff import FieldSpec, field_of_order
from .grp import GroupElement, MatrixAlgebra, MatrixGroup, SuzukiFamily, make_group
from .trace import Poly, compile_trace2
from .word import (RecursiveLaw, Word, WordError, evaluate_batch, get_law,
                   law_validate, sequence_word, w_substitute)

DEFAULT_SEED = 20240531


class DynError(ValueError):
    pass


class SearchBudgetExceeded(DynError):
    pass


@dataclass(frozen=True)
class VerbalSystem:
    group: MatrixGroup
    law: RecursiveLaw
    forbid_minus_identity: bool = False

    def __post_init__(self):
        if not law_validate(self.law).engel_like:
            raise DynError(f"law {self.law.law} is not Engel-like")

    @property
    def forbidden_indices(self) -> np.ndarray:
        if self.forbid_minus_identity:
            return self.group.central_indices
        return np.array([self.group.identity_index])

    def is_forbidden(self, z) -> np.ndarray:
        return np.isin(z, self.forbidden_indices)

    def first(self, x, y):
        return evaluate_batch(self.law.first, [x, y], self.group)

    def step(self, x, y, z):
        return evaluate_batch(self.law.law, [x, y, z], self.group)


@dataclass(frozen=True)
class OrbitResult:
    x: GroupElement
    y: GroupElement
    tail: int
    cycle: int
    avoids_forbidden: bool

    @property
    def witness(self) -> tuple[int, int] | None:
        """(n, m) with v_n = v_m != 1: first cycle entry and its return."""
        if not self.avoids_forbidden:
            return None
        return (self.tail + 1, self.tail + 1 + self.cycle)


def _brent(step: Callable, z0: tuple[np.ndarray, ...]):
    """Vectorised Brent cycle detection.  State is a tuple of index arrays.

    ``step(state, rows)`` advances the rows selected by ``rows``.
    Returns (mu, lam, cycle_start_state).
    """
    n = len(z0[0])

    def eq(a, b):
        out = np.ones(len(a[0]), dtype=bool)
        for u, v in zip(a, b):
            out &= u == v
        return out

    def advance(state, rows):
        sub = step(tuple(s[rows] for s in state), rows)
        new = tuple(s.copy() for s in state)
        for s, t in zip(new, sub):
            s[rows] = t
        return new

    power = np.ones(n, dtype=np.int64)
    lam = np.ones(n, dtype=np.int64)
    tort = z0
    hare = advance(z0, np.arange(n))
    active = np.ones(n, dtype=bool)
    final_lam = np.zeros(n, dtype=np.int64)
    while True:
        hit = active & eq(tort, hare)
        final_lam[hit] = lam[hit]
        active &= ~hit
        if not active.any():
            break
        reset = active & (power == lam)
        tort = tuple(np.where(reset, h, t) for t, h in zip(tort, hare))
        power = np.where(reset, power * 2, power)
        lam = np.where(reset, 0, lam)
        rows = np.flatnonzero(active)
        hare = advance(hare, rows)
        lam[rows] += 1
    lam = final_lam
    # tail length
    tort, hare = z0, z0
    k = 0
    while True:
        rows = np.flatnonzero(lam > k)
        if not len(rows):
            break
        hare = advance(hare, rows)
        k += 1
    mu = np.zeros(n, dtype=np.int64)
    active = ~eq(tort, hare)
    while active.any():
        rows = np.flatnonzero(active)
        tort = advance(tort, rows)
        hare = advance(hare, rows)
        mu[rows] += 1
        active = ~eq(tort, hare)
    return mu, lam, tort


def _cycle_avoids(step, start, lam, forbidden: Callable) -> np.ndarray:
    """True where no element of the cycle through ``start`` is forbidden."""
    ok = ~forbidden(start)
    cur = start
    k = 1
    while True:
        rows = np.flatnonzero((lam > k) & ok)
        if not len(rows):
            return ok
        sub = step(tuple(s[rows] for s in cur), rows)
        cur = tuple(s.copy() for s in cur)
        for s, t in zip(cur, sub):
            s[rows] = t
        ok[rows] &= ~forbidden(tuple(s[rows] for s in cur))
        k += 1


def orbit_batch(sys: VerbalSystem, x: np.ndarray, y: np.ndarray):
    """(tail, cycle, avoids) for every pair (x[i], y[i]) given as index arrays."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    z0 = (sys.first(x, y),)

    def step(state, rows):
        return (sys.step(x[rows], y[rows], state[0]),)

    mu, lam, start = _brent(step, z0)
    avoids = _cycle_avoids(step, start, lam, lambda st: sys.is_forbidden(st[0]))
    on_identity = start[0] == sys.group.identity_index
    if np.any(on_identity & (lam != 1)):
        raise AssertionError("Engel-like law has a cycle through the identity of length > 1")
    return mu, lam, avoids


def orbit(sys: VerbalSystem, x: GroupElement, y: GroupElement) -> OrbitResult:
    mu, lam, ok = orbit_batch(sys, np.array([x.index]), np.array([y.index]))
    return OrbitResult(x, y, int(mu[0]), int(lam[0]), bool(ok[0]))


def sequence_values(sys: VerbalSystem, x, y, upto: int) -> list[np.ndarray]:
    """[v_1, ..., v_upto] as index arrays."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    vals = [sys.first(x, y)]
    while len(vals) < upto:
        vals.append(sys.step(x, y, vals[-1]))
    return vals


@dataclass(frozen=True)
class GoodnessWitness:
    group: str
    law: str
    x: GroupElement
    y: GroupElement
    n: int
    m: int
    pair_rank: int

    def as_dict(self) -> dict:
        return {"group": self.group, "law": self.law, "x": list(self.x.entries),
                "y": list(self.y.entries), "x_index": self.x.index, "y_index": self.y.index,
                "n": self.n, "m": self.m, "pair_rank": self.pair_rank}


def verify_witness(sys: VerbalSystem, x: GroupElement, y: GroupElement, n: int, m: int) -> bool:
    vals = sequence_values(sys, np.array([x.index]), np.array([y.index]), m)
    vn, vm = int(vals[n - 1][0]), int(vals[m - 1][0])
    return vn == vm and not bool(sys.is_forbidden(np.array([vn]))[0])


def goodness_at_q(sys: VerbalSystem, pinned: tuple[int, int] | None = None,
                  workers: int = 1, block: int = 4096,
                  max_pairs: int | None = None) -> GoodnessWitness | None:
    """First pair in canonical order with v_n = v_m != 1, or None if none exists.

    Pairs are ranked x-major (rank = index(x) * |G| + index(y)).  With
    ``pinned=(n, m)`` only that equation is tested; otherwise the minimal (n, m)
    of the pair's orbit is reported.
    """
    G = sys.group
    N = G.order
    total = N * N if max_pairs is None else min(N * N, max_pairs)

    def scan(bounds):
        lo, hi = bounds
        ranks = np.arange(lo, hi)
        x, y = ranks // N, ranks % N
        if pinned is not None:
            n, m = pinned
            vals = sequence_values(sys, x, y, m)
            good = (vals[n - 1] == vals[m - 1]) & ~sys.is_forbidden(vals[n - 1])
            hits = np.flatnonzero(good)
            if not len(hits):
                return None
            i = hits[0]
            return int(ranks[i]), n, m
        mu, lam, ok = orbit_batch(sys, x, y)
        hits = np.flatnonzero(ok)
        if not len(hits):
            return None
        i = hits[0]
        return int(ranks[i]), int(mu[i]) + 1, int(mu[i] + lam[i]) + 1

    hit = _par.first_hit(scan, _par.blocks(total, block), workers)
    if hit is None:
        return None
    rank, n, m = hit
    return GoodnessWitness(G.name, sys.law.name, G.element(rank // N), G.element(rank % N),
                           n, m, rank)


# -- trace level ----------------------------------------------------------------

def sl2_with_trace(F: FieldSpec, t: int) -> np.ndarray:
    """All SL(2,q) matrices with trace t, in lexicographic entry order."""
    q = F.q
    codes = np.arange(q)
    a, b = np.meshgrid(codes, codes[1:], indexing="ij")
    a, b = a.ravel(), b.ravel()
    d = F.sub(t, a)
    c = F.mul(F.sub(F.mul(a, d), 1), F.inv(b))
    parts = [np.stack([a, b, c, d], axis=1)]
    ad = F.mul(codes, F.sub(t, codes))
    for a0 in codes[ad == 1]:
        cc = codes
        parts.append(np.stack([np.full(q, a0), np.zeros(q, dtype=np.int64), cc,
                               np.full(q, F.sub(t, a0))], axis=1).astype(np.int64))
    mats = np.concatenate(parts)
    key = ((mats[:, 0] * q + mats[:, 1]) * q + mats[:, 2]) * q + mats[:, 3]
    return mats[np.argsort(key)]


def two_valent_trace_map(law: RecursiveLaw) -> tuple[Poly, Poly]:
    """(f1, f2) with f1 = tr f(y, z), f2 = tr(f(y, z) y) in s = tr z, u = tr zy, t = tr y."""
    if 1 in law.law.generators():
        raise DynError("trace_goodness needs a 2-valent law f(y, z)")
    x, y = Word.gen(1, 2), Word.gen(2, 2)
    fw = w_substitute(law.law, [Word.identity(2), y, x])
    return compile_trace2(fw), compile_trace2(fw * y)


def check_commuting_square(law: RecursiveLaw, q: int) -> int:
    """Count pairs (y, z) in SL(2,q)^2 where pi(phi(y, z)) != psi(pi(y, z))."""
    G = make_group("SL2", q)
    F = G.field
    f1, f2 = two_valent_trace_map(law)
    N = G.order
    ranks = np.arange(N * N)
    yy, zz = ranks // N, ranks % N
    fz = evaluate_batch(law.law, [zz, yy, zz], G)  # x is absent from the law
    tr = G.traces
    s, u, t = tr[zz], tr[G.mul(zz, yy)], tr[yy]
    lhs = (tr[fz], tr[G.mul(fz, yy)], t)
    rhs = (f1.eval_field(F, s, u, t), f2.eval_field(F, s, u, t), t)
    bad = np.zeros(len(ranks), dtype=bool)
    for a, b in zip(lhs, rhs):
        bad |= a != b
    return int(bad.sum())


@dataclass
class TraceGoodnessResult:
    q: int
    f1: str
    f2: str
    fixed_points: int
    fixed_outside_forbidden: int
    first_fixed: tuple[int, int, int] | None
    witness: GoodnessWitness | None
    lifted_from: tuple[int, int, int] | None = None
    char2_locus: bool = False

    def as_dict(self) -> dict:
        return {"q": self.q, "f1": self.f1, "f2": self.f2, "fixed_points": self.fixed_points,
                "fixed_outside_forbidden": self.fixed_outside_forbidden,
                "first_fixed": self.first_fixed, "lifted_from": self.lifted_from,
                "char2_locus": self.char2_locus,
                "witness": self.witness.as_dict() if self.witness else None}


def trace_fixed_points(law: RecursiveLaw, F: FieldSpec, projective: bool = True,
                       workers: int = 1):
    """Fixed points of psi = (f1, f2, t) on F_q^3 and the forbidden mask.

    The mask is the trace shadow of z = I (s = 2, u = t), plus that of z = -I
    when working in PSL(2,q).  In characteristic 2 both read s = 0, u = t.
    """
    f1, f2 = two_valent_trace_map(law)
    q = F.q
    s, u, t = (a.ravel() for a in np.meshgrid(np.arange(q), np.arange(q), np.arange(q),
                                                indexing="ij"))

    def run(bounds):
        sl = slice(*bounds)
        return ((f1.eval_field(F, s[sl], u[sl], t[sl]) == s[sl])
                & (f2.eval_field(F, s[sl], u[sl], t[sl]) == u[sl]))

    fixed = np.concatenate(_par.map_blocks(run, _par.blocks(q**3, 1 << 14), workers))
    two = F.from_int(2)
    forbidden = (s == two) & (u == t)
    if projective:
        # z = -I is the identity of PSL(2,q)
        forbidden |= (s == F.neg(two)) & (u == F.neg(t))
    return s, u, t, fixed, forbidden


def trace_goodness(law: RecursiveLaw | str, q: int, max_lifts: int = 64,
                   tries_per_point: int = 16, workers: int = 1) -> TraceGoodnessResult:
    """Fixed points of the trace map outside the forbidden locus, lifted to a witness.

    Every pair in the pi-fibre of a psi-fixed point stays in that fibre, so its
    orbit is preperiodic and never meets z = 1 (which lies over s = 2, u = t).
    """
    law = get_law(law)
    F = field_of_order(q)
    f1, f2 = two_valent_trace_map(law)
    s, u, t, fixed, forbidden = trace_fixed_points(law, F, workers=workers)
    good = np.flatnonzero(fixed & ~forbidden)
    res = TraceGoodnessResult(q, str(f1), str(f2), int(fixed.sum()), len(good),
                              tuple(int(v[good[0]]) for v in (s, u, t)) if len(good) else None,
                              None, char2_locus=F.p == 2)
    G = make_group("PSL2", q)
    sys = VerbalSystem(G, law)
    alg = MatrixAlgebra(F, 2)
    for gi in good[:max_lifts]:
        sv, uv, tv = int(s[gi]), int(u[gi]), int(t[gi])
        zs = sl2_with_trace(F, sv)
        ys = sl2_with_trace(F, tv)
        for z in zs[:tries_per_point]:
            prod_tr = alg.trace(alg.mul(z[None], ys))
            cand = np.flatnonzero(prod_tr == uv)
            if not len(cand):
                continue
            y = ys[cand[0]]
            zi, yi = G.index_of(z[None]), G.index_of(y[None])
            if law.first == Word.gen(1, 2):
                xi = zi
            else:
                xs = np.arange(G.order)
                vals = evaluate_batch(law.first, [xs, np.full(G.order, yi[0])], G)
                hit = np.flatnonzero(vals == zi[0])
                if not len(hit):
                    continue
                xi = xs[hit[:1]]
            mu, lam, ok = orbit_batch(sys, xi, yi)
            if ok[0]:
                n, m = int(mu[0]) + 1, int(mu[0] + lam[0]) + 1
                res.witness = GoodnessWitness(G.name, law.name, G.element(int(xi[0])),
                                              G.element(int(yi[0])), n, m,
                                              int(xi[0]) * G.order + int(yi[0]))
                res.lifted_from = (sv, uv, tv)
                return res
    return res


# -- mapping tori -----------------------------------------------------------------

@dataclass(frozen=True)
class TorusCertificate:
    q: int
    point: tuple[GroupElement, ...]
    period: int
    word: Word
    a: int
    endo: tuple[Word, ...]
    value: GroupElement

    def as_dict(self) -> dict:
        return {"q": self.q, "point": [list(g.entries) for g in self.point],
                "period": self.period, "word": str(self.word), "a": self.a,
                "endo": [str(e) for e in self.endo], "value": list(self.value.entries)}


def _phi(endo: Sequence[Word], G: MatrixGroup):
    def step(state, rows=None):
        return tuple(evaluate_batch(e, list(state), G) for e in endo)
    return step


def verify_certificate(cert: TorusCertificate) -> bool:
    G = cert.point[0].group
    step = _phi(cert.endo, G)
    start = tuple(np.array([g.index]) for g in cert.point)
    cur = start
    for _ in range(cert.period):
        cur = step(cur)
    periodic = all(int(a[0]) == int(b[0]) for a, b in zip(cur, start))
    cur = start
    for _ in range(cert.a):
        cur = step(cur)
    val = evaluate_batch(cert.word, list(cur), G)
    return periodic and not bool(G.is_central(val)[0]) and int(val[0]) == cert.value.index


def mapping_torus_certificate(endo: Sequence[Word], w: Word, a: int, q_list: Sequence[int],
                              seed: int = DEFAULT_SEED, enum_cap: int = 200_000,
                              random_starts: int = 20_000, block: int = 4096,
                              workers: int = 1) -> TorusCertificate | None:
    """Periodic g in SL(2,q)^d of Phi = (w_1, ..., w_d) with w(Phi^a(g)) not in {+-I}."""
    d = len(endo)
    if any(e.d != d for e in endo) or w.d != d:
        raise WordError("endomorphism images and w must be words over d letters")
    if a < 0:
        raise DynError("exponent a must be nonnegative")
    for q in q_list:
        G = make_group("SL2", q)
        N = G.order
        step = _phi(endo, G)
        if N**d <= enum_cap:
            total, rng_starts = N**d, None
        else:
            rng = np.random.default_rng(seed)
            total, rng_starts = random_starts, rng.integers(0, N, size=(random_starts, d))

        def starts(lo, hi):
            if rng_starts is not None:
                return tuple(rng_starts[lo:hi, i] for i in range(d))
            r = np.arange(lo, hi)
            return tuple((r // N ** (d - 1 - i)) % N for i in range(d))

        def scan(bounds):
            lo, hi = bounds
            z0 = starts(lo, hi)
            mu, lam, c0 = _brent(lambda st, rows: step(st), z0)
            # walk each cycle, recording the first position j with w(c_j) not central
            n = len(mu)
            pos = np.full(n, -1, dtype=np.int64)
            cur = c0
            for j in range(int(lam.max())):
                live = np.flatnonzero((pos < 0) & (lam > j))
                if not len(live):
                    break
                val = evaluate_batch(w, [c[live] for c in cur], G)
                good = ~G.is_central(val)
                pos[live[good]] = j
                cur = step(cur)
            hits = np.flatnonzero(pos >= 0)
            if not len(hits):
                return None
            i = hits[0]
            L = int(lam[i])
            shift = (int(pos[i]) - a) % L
            pt = tuple(c[i:i + 1] for c in c0)
            for _ in range(shift):
                pt = step(pt)
            return pt, L

        hit = _par.first_hit(scan, _par.blocks(total, block), workers)
        if hit is None:
            continue
        pt, L = hit
        cur = pt
        for _ in range(a):
            cur = step(cur)
        val = evaluate_batch(w, list(cur), G)
        return TorusCertificate(q, tuple(G.element(int(c[0])) for c in pt), L, w, a,
                                tuple(endo), G.element(int(val[0])))
    return None


# -- Suzuki ---------------------------------------------------------------------------

@dataclass
class SuzukiSearchResult:
    m: int
    q: int
    tuples_scanned: int
    solutions: list[tuple[int, int, int, int]] = field(default_factory=list)


def suzuki_equation_search(m: int, budget: int = 2**20, block: int = 1 << 14) -> SuzukiSearchResult:
    """All v = (a, b, c, d) in F_q^4 with u_1(x(v), y(v)) = u_2(x(v), y(v)) != 1."""
    fam = SuzukiFamily(m)
    q = fam.field.q
    if q**4 > budget:
        raise SearchBudgetExceeded(f"q^4 = {q**4} tuples exceeds budget {budget}")
    u1, u2 = sequence_word("u", 1), sequence_word("u", 2)
    eye = fam.alg.identity()
    out = SuzukiSearchResult(m, q, q**4)
    for lo, hi in _par.blocks(q**4, block):
        r = np.arange(lo, hi)
        v = np.stack([(r // q**(3 - i)) % q for i in range(4)], axis=1)
        x, y = fam.points(v)
        a = evaluate_batch(u1, [x, y], fam.alg)
        b = evaluate_batch(u2, [x, y], fam.alg)
        ok = (a == b).all(axis=1) & ~(a == eye).all(axis=1)
        out.solutions.extend(tuple(int(c) for c in row) for row in v[ok])
    return out


def check_suzuki_solution(m: int, v: Sequence[int]) -> dict:
    """Recover a0, b0, c0, d0 from x(v), y(v) and check twist, determinant, equation."""
    fam = SuzukiFamily(m)
    F = fam.field
    x, y = fam.points(np.array(v))
    twist_ok = True
    for mat, (p1, p2) in ((x, v[:2]), (y, v[2:])):
        p10 = int(mat[5])
        p20 = int(F.sub(F.sub(mat[0], F.mul(F.mul(p1, p1), p10)), F.mul(p1, p2)))
        twist_ok &= p10 == int(fam.twist(p1)) and p20 == int(fam.twist(p2))
    det_ok = int(fam.alg.det(x)) == 1 and int(fam.alg.det(y)) == 1
    u1 = evaluate_batch(sequence_word("u", 1), [x, y], fam.alg)
    u2 = evaluate_batch(sequence_word("u", 2), [x, y], fam.alg)
    eq_ok = bool(np.array_equal(u1, u2)) and not np.array_equal(u1, fam.alg.identity())
    return {"twist": bool(twist_ok), "det": det_ok, "equation": eq_ok}
