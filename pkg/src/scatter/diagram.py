"""Walls, scattering diagrams, wall-crossing automorphisms and consistency.

Orientation conventions used throughout the package:

* A wall with direction ``m0`` carries a function in ``k[z^-m0][[Q]]``; its
  monomials have lattice exponents ``k*u0`` with ``u0 = -m0`` and ``k >= 0``.
  The wall is incoming when ``u0`` lies in its support.
* Crossing a wall along a path with velocity ``v`` acts by
  ``z^m -> f^<n, m> z^m`` where ``n`` is the primitive normal of the wall
  with ``<n, v> < 0``.
* Path-ordered products compose as ``theta_last o ... o theta_first``.
* Loops around a joint run counterclockwise in the chosen transversal plane.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from typing import Iterable, Sequence

from .errors import (DimensionError, DomainError, InvalidWallError, NonTransversalPathError)
from .lattice import (LatticeMap, RationalCone, nullspace, pairing, primitive_part,
                      primitive_vector, rank as lin_rank)
from .series import MonoidContext, TruncatedSeries, int_pow, mul

INCOMING = "incoming"
OUTGOING = "outgoing"


def _neg(v):
    return tuple(-x for x in v)


class Wall:
    """A codimension-one cone with an attached function.

    ``direction`` is inferred from the function's monomials when omitted;
    it must be supplied for functions without any ``z`` dependence.
    """

    __slots__ = ("support", "direction", "function", "normal")

    def __init__(self, support: RationalCone, function: TruncatedSeries,
                 direction: Sequence[int] | None = None):
        if support.codim != 1:
            raise InvalidWallError(f"wall support must have codimension one, got {support.codim}")
        if function.rank != support.ambient_rank:
            raise DimensionError("function lattice rank differs from the support rank")
        if not function.is_one_mod_max():
            raise InvalidWallError("wall function must be congruent to 1 modulo the maximal ideal")
        normal = support.span_normal
        exps = [m for m in function.m_exponents() if any(m)]
        if direction is None:
            if not exps:
                raise InvalidWallError("cannot infer the direction of a wall without z-monomials")
            u0 = primitive_part(exps[0])[0]
            direction = _neg(u0)
        direction = tuple(int(x) for x in direction)
        if len(direction) != support.ambient_rank or not any(direction):
            raise InvalidWallError("direction must be a nonzero vector of the ambient rank")
        if primitive_part(direction)[1] != 1:
            raise InvalidWallError("direction must be primitive")
        if pairing(normal, direction) != 0:
            raise InvalidWallError("direction is not tangent to the wall")
        u0 = _neg(direction)
        for m in exps:
            k = _multiple(m, u0)
            if k is None or k <= 0:
                raise InvalidWallError(f"monomial z^{m} is not a positive multiple of {u0}")
        self.support = support
        self.direction = direction
        self.function = function
        self.normal = normal

    @property
    def exponent(self):
        """Primitive exponent direction ``u0 = -direction`` of the function."""
        return _neg(self.direction)

    @property
    def incoming(self) -> bool:
        return self.support.contains(self.exponent)

    @property
    def ambient_rank(self):
        return self.support.ambient_rank

    def with_function(self, f: TruncatedSeries) -> "Wall":
        return Wall(self.support, f, self.direction)

    def with_order(self, order: int) -> "Wall":
        return Wall(self.support, self.function.with_order(order), self.direction)

    def is_trivial(self) -> bool:
        return self.function.is_one()

    def key(self) -> tuple:
        return (self.support.key(), self.direction,
                tuple((q, m, str(c)) for q, m, c in self.function.terms()))

    def __eq__(self, other):
        return (isinstance(other, Wall) and self.support == other.support
                and self.direction == other.direction and self.function == other.function)

    def __hash__(self):
        return hash((self.support, self.direction, self.function))

    def __repr__(self):
        return (f"Wall(normal={list(self.normal)}, ineq={[list(b) for b in self.support.inequalities]}, "
                f"f={self.function.pretty()})")


def _multiple(m, u):
    """``k`` with ``m == k*u`` or None."""
    k = None
    for a, b in zip(m, u):
        if b == 0:
            if a != 0:
                return None
            continue
        if a % b:
            return None
        if k is None:
            k = a // b
        elif k != a // b:
            return None
    return k


def classify(w: Wall) -> str:
    """``incoming`` iff the support is stable under translation by ``-direction``."""
    return INCOMING if w.incoming else OUTGOING


class CWallView:
    """A wall read as cluster-style data ``(n, f)`` with ``f`` in ``k[z^p1(n)]``."""

    def __init__(self, wall: Wall, c_normal: Sequence[int], p1: LatticeMap):
        c_normal = tuple(c_normal)
        if primitive_part(c_normal)[1] != 1:
            raise DomainError("C-wall normal must be primitive")
        if any(pairing(c_normal, g) for g in wall.support.rays + wall.support.lines):
            raise DomainError("support is not contained in the normal's hyperplane")
        v = p1(c_normal)
        for m in wall.function.m_exponents():
            if any(m) and (_multiple(m, v) is None or _multiple(m, v) <= 0):
                raise DomainError(f"monomial z^{m} is not a power of z^p1(n)")
        self.wall = wall
        self.c_normal = c_normal
        self.p1 = p1

    @property
    def incoming(self) -> bool:
        return self.wall.support.contains(self.p1(self.c_normal))


# ------------------------------------------------------------ automorphisms


class WallCrossing:
    """The automorphism ``z^m -> f^<n, m> z^m`` of crossing one wall."""

    __slots__ = ("wall", "co_normal", "function", "_powers")

    def __init__(self, wall: Wall, co_normal: Sequence[int], order: int | None = None):
        co_normal = tuple(co_normal)
        if co_normal != wall.normal and co_normal != _neg(wall.normal):
            raise DomainError("co-normal must be plus or minus the wall normal")
        self.wall = wall
        self.co_normal = co_normal
        f = wall.function
        self.function = f if order is None else f.truncate(order)
        self._powers: dict = {}

    def power(self, k: int) -> TruncatedSeries:
        p = self._powers.get(k)
        if p is None:
            if k in (1, -1) or abs(k) == 0:
                p = int_pow(self.function, k)
            else:
                step = 1 if k > 0 else -1
                p = mul(self.power(k - step), self.power(step))
            self._powers[k] = p
        return p

    def apply(self, s: TruncatedSeries) -> TruncatedSeries:
        n = self.co_normal
        groups: dict = {}
        for (q, m), c in s._coeffs.items():
            groups.setdefault(pairing(n, m), {})[(q, m)] = c
        out = None
        for k in sorted(groups):
            part = s._new(groups[k])
            if k:
                part = mul(part, self.power(k))
            out = part if out is None else out + part
        return out if out is not None else s

    __call__ = apply

    def inverse(self) -> "WallCrossing":
        return WallCrossing(self.wall, _neg(self.co_normal), self.function.order)


def crossing_automorphism(w: Wall, co_normal: Sequence[int]) -> WallCrossing:
    return WallCrossing(w, co_normal)


class Automorphism:
    """A monomial-twisting automorphism, stored by the images of ``z^{e_i}``."""

    __slots__ = ("rank", "context", "order", "images", "_hpow")

    def __init__(self, rank: int, context: MonoidContext, order: int,
                 images: Sequence[TruncatedSeries]):
        self.rank = rank
        self.context = context
        self.order = order
        self.images = tuple(images)
        self._hpow: dict = {}

    @classmethod
    def identity(cls, rank, context, order):
        return cls(rank, context, order, [
            TruncatedSeries.monomial(context, rank, order, m=_unit(rank, i)) for i in range(rank)])

    def then(self, crossing) -> "Automorphism":
        """``crossing o self``."""
        return Automorphism(self.rank, self.context, self.order,
                            [crossing.apply(g) for g in self.images])

    def compose(self, other: "Automorphism") -> "Automorphism":
        """``self o other``."""
        return Automorphism(self.rank, self.context, self.order,
                            [self.apply(g) for g in other.images])

    def multipliers(self) -> list[TruncatedSeries]:
        """``h_i`` with ``image_i = z^{e_i} h_i``."""
        out = []
        for i, g in enumerate(self.images):
            e = _unit(self.rank, i)
            out.append(g.map_terms(lambda q, m, e=e: (q, tuple(a - b for a, b in zip(m, e)))))
        return out

    def _h_power(self, i, k):
        key = (i, k)
        p = self._hpow.get(key)
        if p is None:
            p = int_pow(self.multipliers()[i], k)
            self._hpow[key] = p
        return p

    def apply(self, s: TruncatedSeries) -> TruncatedSeries:
        out = TruncatedSeries.zero(self.context, self.rank, min(self.order, s.order))
        for (q, m), c in s._coeffs.items():
            term = TruncatedSeries.monomial(self.context, self.rank, out.order, m=m, q=q, coeff=c)
            for i, k in enumerate(m):
                if k:
                    term = mul(term, self._h_power(i, k))
            out = out + term
        return out

    __call__ = apply

    def is_identity(self, order: int | None = None) -> bool:
        order = self.order if order is None else order
        zero_q = self.context.zero()
        for i, g in enumerate(self.images):
            if g.truncate(order).coeffs != {(zero_q, _unit(self.rank, i)): 1}:
                return False
        return True

    def defect(self) -> list[TruncatedSeries]:
        """``h_i - 1`` for each basis vector."""
        return [h - 1 for h in self.multipliers()]

    def defect_degree(self) -> int | None:
        """Lowest q-degree at which the automorphism differs from the identity."""
        ds = [d.min_degree() for d in self.defect()]
        ds = [d for d in ds if d is not None]
        return min(ds) if ds else None

    def __eq__(self, other):
        return (isinstance(other, Automorphism) and self.rank == other.rank
                and self.images == other.images)

    def __repr__(self):
        return "Automorphism(" + "; ".join(g.pretty() for g in self.images) + ")"


def _unit(n, i):
    return tuple(int(j == i) for j in range(n))


# --------------------------------------------------------------- diagrams


class ScatteringDiagram:
    """A finite set of walls in ``Z^ambient_rank`` over a monoid, truncated at ``order``."""

    __slots__ = ("ambient_rank", "context", "order", "walls")

    def __init__(self, ambient_rank: int, context: MonoidContext, order: int,
                 walls: Iterable[Wall] = ()):
        ws = []
        for w in walls:
            if w.ambient_rank != ambient_rank:
                raise DimensionError("wall of wrong ambient rank")
            if w.function.context != context:
                raise DimensionError("wall function over a different monoid")
            if w.function.order != order:
                w = w.with_order(order)
            ws.append(w)
        self.ambient_rank = ambient_rank
        self.context = context
        self.order = order
        self.walls = tuple(ws)

    def __iter__(self):
        return iter(self.walls)

    def __len__(self):
        return len(self.walls)

    def __eq__(self, other):
        return (isinstance(other, ScatteringDiagram) and self.ambient_rank == other.ambient_rank
                and self.context == other.context and self.order == other.order
                and sorted_walls(self.walls) == sorted_walls(other.walls))

    def __repr__(self):
        return f"ScatteringDiagram(rank={self.ambient_rank}, order={self.order}, walls={len(self.walls)})"

    def truncate(self, order: int) -> "ScatteringDiagram":
        return ScatteringDiagram(self.ambient_rank, self.context, order,
                                 [w.with_order(order) for w in self.walls])

    def with_walls(self, walls: Iterable[Wall]) -> "ScatteringDiagram":
        return ScatteringDiagram(self.ambient_rank, self.context, self.order, walls)

    def add_walls(self, walls: Iterable[Wall]) -> "ScatteringDiagram":
        return self.with_walls(list(self.walls) + list(walls))

    def nontrivial_walls(self) -> list[Wall]:
        return [w for w in self.walls if not w.function.is_one()]

    def hyperplanes(self) -> list[tuple]:
        return sorted({w.normal for w in self.nontrivial_walls()})

    def one(self) -> TruncatedSeries:
        return TruncatedSeries.one(self.context, self.ambient_rank, self.order)

    def support_contains(self, x) -> bool:
        return any(w.support.contains(x) for w in self.nontrivial_walls())


# ----------------------------------------------------------------- joints


def _restricted_key(h, basis):
    vals = [pairing(h, b) for b in basis]
    if not any(vals):
        return None
    v = primitive_vector(vals)
    first = next(x for x in v if x)
    return v if first > 0 else _neg(v)


def chambers(space: RationalCone, functionals: Iterable[Sequence[int]]) -> list[RationalCone]:
    """Top-dimensional cells of ``space`` cut by the hyperplanes of ``functionals``."""
    basis = space.span_basis()
    cuts = {}
    for h in functionals:
        k = _restricted_key(h, basis)
        if k is not None and k not in cuts:
            cuts[k] = tuple(h)
    cells = [space]
    for k in sorted(cuts):
        h = cuts[k]
        nxt = []
        for c in cells:
            if not any(pairing(h, r) for r in c.rays + c.lines):
                nxt.append(c)
                continue
            plus = c.with_inequality(h)
            minus = c.with_inequality(_neg(h))
            if plus.dim == c.dim and minus.dim == c.dim:
                nxt.extend([plus, minus])
            else:
                nxt.append(c)
        cells = nxt
    return sorted(cells)


@dataclass(frozen=True)
class Joint:
    """A cell of codimension two together with a sample point and a transversal plane."""

    cell: RationalCone
    point: tuple
    plane: tuple

    def key(self):
        return self.cell.key()


def _transversal_plane(span_basis, d):
    units = [_unit(d, i) for i in range(d)]
    for a, b in combinations(units, 2):
        if lin_rank(list(span_basis) + [a, b], d) == d:
            return (a, b)
    raise DomainError("no transversal coordinate plane")


def joints(d: ScatteringDiagram) -> list[Joint]:
    """Codimension-two cells where consistency has to be checked, in canonical order.

    Candidate spans are the pairwise intersections of distinct wall
    hyperplanes and the spans of wall facets; each span is split into
    chambers by every wall hyperplane and facet normal.
    """
    walls = d.nontrivial_walls()
    n = d.ambient_rank
    if n < 2 or not walls:
        return []
    hyper = sorted({w.normal for w in walls})
    spans = set()
    for h1, h2 in combinations(hyper, 2):
        spans.add(RationalCone(n, [h1, h2]))
    for w in walls:
        for b in w.support.inequalities:
            spans.add(RationalCone(n, [w.normal, b]))
    cut_normals = set(hyper)
    for w in walls:
        cut_normals.update(w.support.inequalities)
    cut_normals = sorted(cut_normals)
    out = []
    seen = set()
    for span in sorted(spans):
        plane = _transversal_plane(span.span_basis(), n)
        for cell in chambers(span, cut_normals):
            if cell in seen:
                continue
            seen.add(cell)
            out.append(Joint(cell, cell.relint_point(), plane))
    return out


def _half(v):
    a, b = v
    return 0 if (b > 0 or (b == 0 and a > 0)) else 1


def _angle_cmp(u, v):
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return hu - hv
    cross = u[0] * v[1] - u[1] * v[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def loop_crossings(d: ScatteringDiagram, jt: Joint, walls: Sequence[Wall] | None = None):
    """Counterclockwise crossings ``(plane_ray, wall, co_normal)`` of a small loop around ``jt``."""
    b1, b2 = jt.plane
    x = jt.point
    emb = LatticeMap([[b1[i], b2[i]] for i in range(d.ambient_rank)], 2)
    entries = []
    for w in (walls if walls is not None else d.nontrivial_walls()):
        if not w.support.contains(x):
            continue
        tangent = w.support.tangent_cone_at(x)
        trace = tangent.preimage(emb)
        if trace.dim != 1:
            if trace.dim > 1:
                raise NonTransversalPathError("wall contains the transversal plane")
            continue
        rays = list(trace.rays) + [r for v in trace.lines for r in (v, _neg(v))]
        for r in rays:
            vel = tuple(-r[1] * p + r[0] * q for p, q in zip(b1, b2))
            s = pairing(w.normal, vel)
            if s == 0:
                raise NonTransversalPathError("loop runs tangent to a wall")
            co = w.normal if s < 0 else _neg(w.normal)
            entries.append((r, w, co))
    order = sorted(range(len(entries)),
                   key=cmp_to_key(lambda i, j: _angle_cmp(entries[i][0], entries[j][0])
                                  or _cmp_keys(entries[i][1].key(), entries[j][1].key())))
    return [entries[i] for i in order]


def _cmp_keys(a, b):
    return -1 if a < b else (1 if a > b else 0)


def joint_loop_product(d: ScatteringDiagram, jt: Joint, order: int | None = None,
                       walls: Sequence[Wall] | None = None) -> Automorphism:
    order = d.order if order is None else order
    phi = Automorphism.identity(d.ambient_rank, d.context, order)
    for _r, w, co in loop_crossings(d, jt, walls):
        phi = phi.then(WallCrossing(w, co, order))
    return phi


def path_ordered_product(d: ScatteringDiagram, path: Sequence[Sequence], order: int | None = None) -> Automorphism:
    """Path-ordered product along a polygonal path through the given points.

    Vertices must avoid the support; each segment must meet walls
    transversally and away from their boundaries, at distinct times unless
    the walls involved are coplanar.
    """
    order = d.order if order is None else order
    pts = [tuple(Fraction(c) for c in p) for p in path]
    walls = d.nontrivial_walls()
    for p in pts:
        if any(w.support.contains(p) for w in walls):
            raise NonTransversalPathError(f"path vertex {p} lies on a wall")
    phi = Automorphism.identity(d.ambient_rank, d.context, order)
    for a, b in zip(pts, pts[1:]):
        vel = tuple(y - x for x, y in zip(a, b))
        hits = []
        for w in walls:
            t = crossing_time(w, a, vel)
            if t is not None and 0 < t < 1:
                hits.append((t, w))
        hits.sort(key=lambda h: (h[0], h[1].key()))
        for (t1, w1), (t2, w2) in zip(hits, hits[1:]):
            if t1 == t2 and w1.normal != w2.normal:
                raise NonTransversalPathError("path passes through a joint")
        for _t, w in hits:
            s = pairing(w.normal, vel)
            phi = phi.then(WallCrossing(w, w.normal if s < 0 else _neg(w.normal), order))
    return phi


def crossing_time(w: Wall, base, vel):
    """Time ``t`` at which ``base + t*vel`` meets the support of ``w``, or None.

    Raises when the line runs inside the wall's span or hits the wall's
    relative boundary.
    """
    a = pairing(w.normal, base)
    b = pairing(w.normal, vel)
    if b == 0:
        if a == 0 and any(w.support.contains(tuple(x + s * y for x, y in zip(base, vel)))
                          for s in (Fraction(1, 2),)):
            raise NonTransversalPathError("path runs inside a wall")
        return None
    t = Fraction(-a) / b
    pt = tuple(x + t * y for x, y in zip(base, vel))
    if not w.support.contains(pt):
        return None
    if not w.support.in_relint(pt):
        raise NonTransversalPathError(f"path meets the boundary of a wall at {pt}")
    return t


# ------------------------------------------------------------ consistency


@dataclass
class ConsistencyReport:
    consistent: bool
    failures: list

    def __bool__(self):
        return self.consistent


def is_consistent(d: ScatteringDiagram, order: int | None = None) -> ConsistencyReport:
    """Check that every joint loop product is the identity modulo ``m^(order+1)``."""
    order = d.order if order is None else order
    walls = [w for w in d.nontrivial_walls() if not w.function.truncate(order).is_one()]
    failures = []
    for jt in joints(d.with_walls(walls)):
        phi = joint_loop_product(d, jt, order, walls)
        if not phi.is_identity(order):
            failures.append((jt, phi.defect()))
    return ConsistencyReport(not failures, failures)


# ------------------------------------------------------------ equivalence


def _products_on_cells(walls: Sequence[Wall], cells, one):
    out = []
    for c in cells:
        x = c.relint_point()
        f = one
        for w in walls:
            if w.support.contains(x):
                f = mul(f, w.function)
        out.append(f)
    return out


def equivalent(d1: ScatteringDiagram, d2: ScatteringDiagram) -> bool:
    """Compare per-cell products of wall functions on a common refinement."""
    if d1.ambient_rank != d2.ambient_rank or d1.context != d2.context:
        raise DimensionError("diagrams over different lattices or monoids")
    order = min(d1.order, d2.order)
    w1 = [w for w in d1.truncate(order).nontrivial_walls()]
    w2 = [w for w in d2.truncate(order).nontrivial_walls()]
    hyper = sorted({w.normal for w in w1 + w2})
    one = TruncatedSeries.one(d1.context, d1.ambient_rank, order)
    for h in hyper:
        a = [w for w in w1 if w.normal == h]
        b = [w for w in w2 if w.normal == h]
        cuts = set(g for g in hyper if g != h)
        for w in a + b:
            cuts.update(w.support.inequalities)
        cells = chambers(RationalCone.hyperplane(h), sorted(cuts))
        if _products_on_cells(a, cells, one) != _products_on_cells(b, cells, one):
            return False
    return True


def _try_merge(c1: RationalCone, c2: RationalCone):
    for h in c1.inequalities:
        if _neg(h) in c2.inequalities:
            hull = c1.minkowski_sum(c2)
            if hull.with_inequality(h) == c1 and hull.with_inequality(_neg(h)) == c2:
                return hull
    return None


def normalize(d: ScatteringDiagram) -> ScatteringDiagram:
    """Canonical representative: one wall per maximal convex cell of constant function.

    Walls sharing a hyperplane and a direction are multiplied on a common
    refinement; adjacent cells carrying equal functions are merged again
    whenever their union is convex.
    """
    walls = d.nontrivial_walls()
    groups: dict = {}
    for w in walls:
        groups.setdefault((w.normal, w.direction), []).append(w)
    one = d.one()
    out = []
    for (h, direction) in sorted(groups):
        ws = groups[(h, direction)]
        cuts = sorted({b for w in ws for b in w.support.inequalities})
        cells = chambers(RationalCone.hyperplane(h), cuts)
        funcs = _products_on_cells(ws, cells, one)
        items = [(c, f) for c, f in zip(cells, funcs) if not f.is_one()]
        merged = True
        while merged:
            merged = False
            for i, j in combinations(range(len(items)), 2):
                if items[i][1] == items[j][1]:
                    u = _try_merge(items[i][0], items[j][0])
                    if u is not None:
                        items[i] = (u, items[i][1])
                        del items[j]
                        merged = True
                        break
        out.extend(Wall(c, f, direction) for c, f in items)
    out.sort(key=Wall.key)
    return d.with_walls(out)


def sorted_walls(walls: Iterable[Wall]) -> list[Wall]:
    return sorted(walls, key=Wall.key)


# ----------------------------------------------------- change of lattice


def pullback_diagram(d: ScatteringDiagram, inclusion: LatticeMap, exponent_map: LatticeMap,
                     context: MonoidContext | None = None) -> ScatteringDiagram:
    """Restrict a diagram along an injective linear map ``inclusion: Z^r -> Z^d``.

    Supports are pulled back; walls whose pullback is not of codimension one
    are dropped.  ``exponent_map`` must be a left inverse of ``inclusion`` on
    the exponents that occur.  When the pulled-back normal is ``g`` times a
    primitive functional the function is raised to the power ``g``.
    """
    r = inclusion.source_rank
    context = context or d.context
    out = []
    for w in d.nontrivial_walls():
        sup = w.support.preimage(inclusion)
        if sup.codim != 1:
            continue
        g = primitive_part(inclusion.pullback(w.normal))[1]
        u0 = w.exponent

        def remap(q, m):
            m2 = exponent_map(m)
            if inclusion(m2) != tuple(m):
                raise DomainError(f"exponent {m} does not lie in the sublattice")
            return q, m2

        if inclusion(exponent_map(u0)) != u0:
            raise DomainError(f"wall direction {u0} does not lie in the sublattice")
        f = w.function.map_terms(remap, rank=r)
        out.append(Wall(sup, int_pow(f, g) if g != 1 else f, _neg(exponent_map(u0))))
    return ScatteringDiagram(r, context, d.order, out)


def pushforward_diagram(d: ScatteringDiagram, quotient: LatticeMap) -> ScatteringDiagram:
    """Push a diagram along a surjection whose kernel lies in every wall's lineality space."""
    kernel = nullspace(quotient.matrix, quotient.source_rank)
    out = []
    for w in d.nontrivial_walls():
        for k in kernel:
            if not all(w.support.contains(s) for s in (k, _neg(k))):
                raise DomainError("wall is not invariant under translation by the kernel")
        sup = w.support.map_generators(quotient)
        u0 = quotient(w.exponent)
        f = w.function.map_terms(lambda q, m: (q, quotient(m)), rank=quotient.target_rank)
        out.append(Wall(sup, f, _neg(primitive_part(u0)[0])))
    return ScatteringDiagram(quotient.target_rank, d.context, d.order, out)
