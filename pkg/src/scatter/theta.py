"""Broken lines, theta functions, structure constants and the trace.

Broken lines are enumerated backwards from their endpoint.  A segment with
exponent ``m_i`` travels with velocity ``-m_i``, so going back in time moves
along ``+m_i``.  When the backward ray meets a wall with exponent ``u0`` the
earlier exponent is ``m_i - k*u0`` for some term ``c_k z^(k*u0)`` of
``f^e`` with ``e = |<n, m_i>|``.  The pairing is the same for the earlier
and later exponent because ``n`` kills ``u0``.

Coefficients are series in ``k[[Q]]``, stored as :class:`TruncatedSeries`
whose only lattice exponent is zero.
"""
from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .diagram import ScatteringDiagram, Wall, is_consistent
from .errors import DomainError, GenericityError, PreconditionError
from .lattice import pairing
from .series import TruncatedSeries, int_pow, mul

EPSILON = Fraction(1, 1009)
MAX_RETRIES = 32
SPREAD = 97


@dataclass
class BrokenLine:
    """A broken line listed forwards in time.

    ``segments`` holds ``(exponent, coefficient, start)`` triples; ``start``
    is the bend point where the segment begins and ``None`` for the first
    segment, which comes in from infinity.
    """

    asymptotic_direction: tuple
    endpoint: tuple
    segments: list

    @property
    def final_exponent(self) -> tuple:
        return self.segments[-1][0]

    @property
    def final_coefficient(self) -> TruncatedSeries:
        return self.segments[-1][1]

    @property
    def bends(self) -> int:
        return len(self.segments) - 1

    def monomial(self) -> TruncatedSeries:
        m = self.final_exponent
        return self.final_coefficient.map_terms(lambda q, _m: (q, m))


@dataclass
class ThetaExpansion:
    diagram: ScatteringDiagram
    m: tuple
    p: tuple
    series: TruncatedSeries

    def is_triangular(self) -> bool:
        """``series - z^m`` has only terms of positive q-degree."""
        s = self.series
        lead = TruncatedSeries.monomial(s.context, s.rank, s.order, m=self.m)
        return all(s.context.degree(q) > 0 for q, _m, _c in (s - lead).terms())


def _multiple(m, u):
    k = 0
    for a, b in zip(m, u):
        if b == 0:
            if a:
                return None
        elif a % b or (k and a // b != k):
            return None
        else:
            k = a // b
    return k


class _WallData:
    """Per-wall data for tracing: normal, exponent, and cached powers of the function."""

    def __init__(self, wall: Wall, order: int):
        self.wall = wall
        self.normal = wall.normal
        self.u0 = wall.exponent
        self.support = wall.support
        self.function = wall.function.truncate(order)
        self.rate = None
        deg = self.function.context.degree
        for q, m, _c in self.function.terms():
            k = _multiple(m, self.u0)
            if k:
                r = Fraction(deg(q), k)
                self.rate = r if self.rate is None else min(self.rate, r)
        self._powers: dict = {}

    def terms(self, e: int) -> list:
        """Monomials of ``f^e`` as ``(k, c t^q)`` for the term ``c t^q z^(k u0)``."""
        if e not in self._powers:
            f = int_pow(self.function, e)
            ctx, rank, order = f.context, f.rank, f.order
            self._powers[e] = [
                (_multiple(m, self.u0), TruncatedSeries.monomial(ctx, rank, order, q=q, coeff=c))
                for q, m, c in sorted(f.terms(), key=lambda t: (ctx.degree(t[0]), t[0], t[1]))]
        return self._powers[e]


def _ray_interval(cone, x, dirn):
    """Parameters ``s > 0`` with ``x + s*dirn`` in ``cone``, as ``(lo, hi)`` or None; ``hi`` may be None."""
    lo, hi = Fraction(0), None
    for b in cone.equations:
        if pairing(b, x) != 0 or pairing(b, dirn) != 0:
            return None
    for b in cone.inequalities:
        a, c = pairing(b, x), pairing(b, dirn)
        if c == 0:
            if a < 0:
                return None
        elif c > 0:
            lo = max(lo, Fraction(-a) / c)
        else:
            t = Fraction(-a) / c
            hi = t if hi is None else min(hi, t)
    if hi is not None and hi <= lo:
        return None
    return lo, hi


class _Tracer:
    """Backward enumeration of broken lines for one diagram at one order."""

    def __init__(self, d: ScatteringDiagram, order: int):
        self.d = d
        self.order = order
        self.rank = d.ambient_rank
        self.walls = [_WallData(w, order) for w in d.nontrivial_walls()
                      if not w.function.truncate(order).is_one()]
        self.one = TruncatedSeries.one(d.context, d.ambient_rank, order)
        self.reach = self._reachable()

    def _reachable(self) -> dict:
        """Least q-degree needed to shift an exponent by each sum of wall exponents."""
        atoms: dict = {}
        for w in self.walls:
            if w.rate is not None:
                atoms[w.u0] = min(atoms.get(w.u0, w.rate), w.rate)
        zero = (0,) * self.rank
        best = {zero: Fraction(0)}
        heap = [(Fraction(0), zero)]
        while heap:
            cost, v = heapq.heappop(heap)
            if cost > best[v]:
                continue
            for u, r in sorted(atoms.items()):
                c = cost + r
                if c > self.order:
                    continue
                nv = tuple(a + b for a, b in zip(v, u))
                if nv not in best or c < best[nv]:
                    best[nv] = c
                    heapq.heappush(heap, (c, nv))
        return best

    def final_exponents(self, m) -> list:
        return sorted(tuple(a + b for a, b in zip(m, dv)) for dv in self.reach)

    def _affordable(self, m_prev, m, spent) -> bool:
        cost = self.reach.get(tuple(a - b for a, b in zip(m_prev, m)))
        return cost is not None and spent + cost <= self.order

    def _next_walls(self, x, dirn):
        hits = []
        for w in self.walls:
            a, b = pairing(w.normal, x), pairing(w.normal, dirn)
            if b == 0:
                if a == 0 and _ray_interval(w.support, x, dirn) is not None:
                    raise GenericityError(f"broken line runs inside a wall from {x}")
                continue
            s = Fraction(-a) / b
            if s <= 0:
                continue
            y = tuple(xi + s * di for xi, di in zip(x, dirn))
            if not w.support.contains(y):
                continue
            if not w.support.in_relint(y):
                raise GenericityError(f"broken line meets a wall boundary at {y}")
            hits.append((s, y, w))
        if not hits:
            return None, []
        s0 = min(h[0] for h in hits)
        group = [h for h in hits if h[0] == s0]
        if len({h[2].normal for h in group}) > 1:
            raise GenericityError(f"broken line passes through a joint at {group[0][1]}")
        group.sort(key=lambda h: h[2].wall.key())
        return group[0][1], [h[2] for h in group]

    def lines(self, m, p) -> list[BrokenLine]:
        m = tuple(m)
        p = tuple(Fraction(x) for x in p)
        for w in self.walls:
            if w.support.contains(p):
                raise GenericityError(f"endpoint {p} lies on a wall")
        out: list = []
        for m_end in self.final_exponents(m):
            self._trace(m, p, p, m_end, self.one, [], out)
        return out

    def _trace(self, m, p, x, m_cur, coeff, bends, out):
        # ``bends`` lists (later exponent, choice coefficient, point) from the end backwards.
        y, group = self._next_walls(x, m_cur)
        if not group:
            if m_cur == m:
                out.append(_assemble(m, p, m_cur, bends, self.one))
            return
        self._cross(m, p, y, group, 0, m_cur, coeff, bends, out)

    def _cross(self, m, p, y, group, idx, m_cur, coeff, bends, out):
        if idx == len(group):
            self._trace(m, p, y, m_cur, coeff, bends, out)
            return
        w = group[idx]
        e = abs(pairing(w.normal, m_cur))
        for k, ck in w.terms(e):
            new = mul(coeff, ck)
            if new.is_zero():
                continue
            m_prev = tuple(a - k * b for a, b in zip(m_cur, w.u0))
            if not self._affordable(m_prev, m, new.min_degree()):
                continue
            nb = bends if ck.is_one() else bends + [(m_cur, ck, y)]
            self._cross(m, p, y, group, idx + 1, m_prev, new, nb, out)


def _assemble(m, p, m_first, bends, one) -> BrokenLine:
    segs = [(m_first, one, None)]
    coeff = one
    for exp, ck, pt in reversed(bends):
        coeff = mul(coeff, ck)
        if pt == segs[-1][2]:
            # several walls crossed at one point make a single bend
            segs[-1] = (exp, coeff, pt)
        else:
            segs.append((exp, coeff, pt))
    return BrokenLine(m, p, segs)


def _theta_series(tracer: _Tracer, m, p) -> TruncatedSeries:
    m = tuple(m)
    if not any(m):
        return tracer.one
    acc: dict = {}
    for bl in tracer.lines(m, p):
        me = bl.final_exponent
        for q, _z, c in bl.final_coefficient.terms():
            acc[(q, me)] = acc.get((q, me), 0) + c
    return TruncatedSeries(tracer.d.context, tracer.rank, tracer.order, acc)


# ------------------------------------------------------------------ public API


def generic_point(target: Sequence, stream: random.Random) -> tuple:
    """``target + EPSILON*r`` for the next nonzero integer vector ``r`` drawn from ``stream``."""
    while True:
        r = [stream.randint(-SPREAD, SPREAD) for _ in target]
        if any(r):
            return tuple(Fraction(t) + EPSILON * x for t, x in zip(target, r))


def broken_lines(d: ScatteringDiagram, m: Sequence[int], p: Sequence,
                 k: int | None = None) -> list[BrokenLine]:
    m = tuple(m)
    if not any(m):
        raise DomainError("broken lines need a nonzero asymptotic direction")
    if len(m) != d.ambient_rank or len(p) != d.ambient_rank:
        raise DomainError("direction and endpoint must match the ambient rank")
    return _Tracer(d, d.order if k is None else k).lines(m, p)


def theta(d: ScatteringDiagram, m: Sequence[int], p: Sequence, k: int | None = None) -> ThetaExpansion:
    m = tuple(m)
    if len(m) != d.ambient_rank or len(p) != d.ambient_rank:
        raise DomainError("exponent and point must match the ambient rank")
    p = tuple(Fraction(x) for x in p)
    tracer = _Tracer(d, d.order if k is None else k)
    return ThetaExpansion(d, m, p, _theta_series(tracer, m, p))


class ThetaAlgebra:
    """Theta functions of a consistent diagram, with cached expansions and product rows.

    ``strategy="decomposition"`` multiplies expansions at one shared generic
    base point near the origin and peels off theta functions by increasing
    q-degree.  ``strategy="broken-pairs"`` reads the coefficient of ``z^m``
    in the product of expansions at a generic point near each candidate
    ``m``.
    """

    def __init__(self, d: ScatteringDiagram, order: int | None = None, seed_stream: int = 0,
                 check: bool = True):
        self.d = d
        self.order = d.order if order is None else order
        self.seed_stream = seed_stream
        if check and not is_consistent(d, self.order):
            raise PreconditionError("theta function products need a consistent diagram")
        self.tracer = _Tracer(d, self.order)
        self.rank = d.ambient_rank
        self.context = d.context
        self.one = self.tracer.one
        self._zero_m = (0,) * self.rank
        self._base = None
        self._base_stream = random.Random(f"{seed_stream}:base")
        self._cache: dict = {}
        self._rows: dict = {}

    def zero(self) -> TruncatedSeries:
        return TruncatedSeries.zero(self.context, self.rank, self.order)

    # -- expansions
    def expansion(self, m, p) -> TruncatedSeries:
        key = (tuple(m), tuple(p))
        if key not in self._cache:
            self._cache[key] = _theta_series(self.tracer, key[0], key[1])
        return self._cache[key]

    def near(self, target, tag, fn):
        """``fn(p)`` at the first generic ``p`` near ``target`` drawn from the stream named by ``tag``."""
        stream = random.Random(f"{self.seed_stream}:{tag}")
        last = None
        for _ in range(MAX_RETRIES):
            p = generic_point(target, stream)
            try:
                return fn(p)
            except GenericityError as exc:
                last = exc
        raise GenericityError(f"no generic point near {tuple(target)} after {MAX_RETRIES} tries: {last}")

    @property
    def base_point(self) -> tuple:
        if self._base is None:
            self._redraw_base()
        return self._base

    def _redraw_base(self):
        for _ in range(MAX_RETRIES):
            p = generic_point(self._zero_m, self._base_stream)
            if not any(w.support.contains(p) for w in self.tracer.walls):
                self._base = p
                return
        raise GenericityError("no generic base point")

    def theta(self, m) -> TruncatedSeries:
        """Expansion of ``theta_m`` at the base point."""
        return self.expansion(m, self.base_point)

    # -- structure constants
    def decompose(self, s: TruncatedSeries) -> dict:
        """Coefficients of ``s`` (an expansion at the base point) in the theta basis."""
        rest = s.truncate(self.order)
        out: dict = {}
        deg = self.context.degree
        while not rest.is_zero():
            d0 = rest.min_degree()
            for q, m, c in [t for t in rest.terms() if deg(t[0]) == d0]:
                coef = TruncatedSeries.monomial(self.context, self.rank, self.order, q=q, coeff=c)
                out[m] = out[m] + coef if m in out else coef
                rest = rest - mul(coef, self.theta(m))
        return {m: c for m, c in sorted(out.items()) if not c.is_zero()}

    def row(self, m1, m2, strategy: str = "decomposition") -> dict:
        """``{m: C^m_{m1 m2}}`` for the product ``theta_m1 * theta_m2``."""
        key = (tuple(m1), tuple(m2), strategy)
        if key not in self._rows:
            if strategy == "decomposition":
                self._rows[key] = self._row_decomposition(key[0], key[1])
            elif strategy == "broken-pairs":
                self._rows[key] = self._row_pairs(key[0], key[1])
            else:
                raise DomainError(f"unknown strategy {strategy!r}")
        return self._rows[key]

    def _row_decomposition(self, m1, m2):
        for _ in range(MAX_RETRIES):
            try:
                return self.decompose(mul(self.theta(m1), self.theta(m2)))
            except GenericityError:
                # Rows already computed stay valid; only the shared point moves.
                self._redraw_base()
        raise GenericityError(f"no generic base point for the product of {m1} and {m2}")

    def _row_pairs(self, m1, m2):
        finals1 = self.tracer.final_exponents(m1) if any(m1) else [m1]
        finals2 = self.tracer.final_exponents(m2) if any(m2) else [m2]
        candidates = sorted({tuple(a + b for a, b in zip(x, y)) for x in finals1 for y in finals2})
        out = {}
        for m in candidates:
            def coefficient(p, m=m):
                prod = mul(self.expansion(m1, p), self.expansion(m2, p))
                return prod.group_by_m().get(m)
            c = self.near(m, ("pair",) + m, coefficient)
            if c is not None and not c.is_zero():
                out[m] = c
        return out

    # -- elements are dicts m -> coefficient series
    def element(self, m) -> dict:
        return {tuple(m): self.one}

    def multiply_elements(self, x: dict, y: dict, strategy: str = "decomposition") -> dict:
        out: dict = {}
        for a, ca in sorted(x.items()):
            for b, cb in sorted(y.items()):
                c = mul(ca, cb)
                if c.is_zero():
                    continue
                for m, cm in self.row(a, b, strategy).items():
                    v = mul(c, cm)
                    out[m] = out[m] + v if m in out else v
        return {m: c for m, c in sorted(out.items()) if not c.is_zero()}

    def product(self, *ms, strategy: str = "decomposition") -> dict:
        """Theta-basis expansion of ``theta_ms[0] * theta_ms[1] * ...``, folded from the left."""
        acc = self.element(self._zero_m)
        for m in ms:
            acc = self.multiply_elements(acc, self.element(m), strategy)
        return acc

    def trace(self, x: dict) -> TruncatedSeries:
        return x.get(self._zero_m, self.zero())


def multiply(d: ScatteringDiagram, m1, m2, k: int | None = None, strategy: str = "decomposition",
             seed_stream: int = 0) -> dict:
    """Row ``{m: C^m_{m1 m2}}`` of structure constants at order ``k``."""
    return ThetaAlgebra(d, k, seed_stream).row(m1, m2, strategy)


def trace(row: dict, rank: int | None = None):
    """Coefficient of ``theta_0`` in a theta-basis expansion; ``0`` for an empty expansion."""
    if not row:
        return 0
    if rank is None:
        rank = len(next(iter(row)))
    zero = (0,) * rank
    if zero in row:
        return row[zero]
    c = next(iter(row.values()))
    return TruncatedSeries.zero(c.context, c.rank, c.order)


def cprin_theta_shift_check(d: ScatteringDiagram, samples: Iterable, k: int | None = None,
                            seed_stream: int = 0) -> bool:
    """Check ``theta_(m,n)(p) == z^(0,n) * theta_(m,0)(p)`` on each sample.

    Samples are ``(m, n)`` or ``(m, n, p)``.  Without ``p`` a generic point
    near the origin is drawn.
    """
    order = d.order if k is None else k
    tracer = _Tracer(d, order)
    rank = d.ambient_rank
    stream = random.Random(f"{seed_stream}:shift")

    def holds(m, n, p):
        shift = TruncatedSeries.monomial(d.context, rank, order, m=(0,) * len(m) + n)
        top = _theta_series(tracer, m + n, p)
        return top == mul(shift, _theta_series(tracer, m + (0,) * len(n), p))

    for smp in samples:
        m, n = tuple(smp[0]), tuple(smp[1])
        if len(m) + len(n) != rank:
            raise DomainError("sample does not split the ambient lattice")
        if len(smp) > 2:
            if not holds(m, n, tuple(Fraction(x) for x in smp[2])):
                return False
            continue
        for _ in range(MAX_RETRIES):
            try:
                ok = holds(m, n, generic_point((0,) * rank, stream))
            except GenericityError:
                continue
            break
        else:
            raise GenericityError("no generic point for the shift check")
        if not ok:
            return False
    return True
