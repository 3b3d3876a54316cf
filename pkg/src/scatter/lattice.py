"""Exact lattice arithmetic and rational polyhedral cones.

Vectors are plain tuples of Python ints (lattice points) or of
``Fraction``/int (rational points).  Functionals on a lattice are tuples as
well; :func:`pairing` evaluates one on the other.

Cones are stored in a canonical H-representation (linear equations cutting
out the span plus an irredundant list of facet inequalities), so two cones
are equal exactly when their stored data are equal.  Generators are derived
on demand.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from .errors import DimensionError, DomainError

Vec = tuple


# ---------------------------------------------------------------- vectors


def pairing(n: Sequence, m: Sequence):
    """Evaluate the functional ``n`` on ``m``."""
    if len(n) != len(m):
        raise DimensionError(f"cannot pair rank {len(n)} with rank {len(m)}")
    return sum(a * b for a, b in zip(n, m))


def primitive_part(v: Sequence[int]) -> tuple[Vec, int]:
    """Split an integer vector as ``g * w`` with ``w`` primitive, ``g > 0``."""
    g = reduce(gcd, v, 0)
    if g == 0:
        raise DomainError("primitive part of the zero vector is undefined")
    return tuple(x // g for x in v), g


def primitive_vector(v: Sequence) -> Vec:
    """Scale a nonzero rational vector to a primitive integer vector.

    The sign is kept, so the result is a positive multiple of ``v``.
    """
    den = 1
    for x in v:
        if isinstance(x, Fraction):
            den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    return primitive_part(ints)[0]


def add(a: Sequence, b: Sequence) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Sequence) -> Vec:
    return tuple(c * x for x in a)


def is_zero(a: Sequence) -> bool:
    return not any(a)


def _normalize_number(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def as_rational_point(coords: Iterable) -> Vec:
    return tuple(_normalize_number(Fraction(x)) for x in coords)


# ------------------------------------------------------- linear algebra


def rref(rows: Iterable[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals.

    Returns the nonzero rows and their pivot columns.
    """
    a = [[Fraction(x) for x in r] for r in rows]
    for r in a:
        if len(r) != ncols:
            raise DimensionError("row length mismatch")
    pivots: list[int] = []
    top = 0
    for c in range(ncols):
        piv = next((i for i in range(top, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[top], a[piv] = a[piv], a[top]
        lead = a[top][c]
        if lead != 1:
            a[top] = [x / lead for x in a[top]]
        row = a[top]
        for i in range(len(a)):
            if i != top and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], row)]
        pivots.append(c)
        top += 1
        if top == len(a):
            break
    return a[:top], pivots


def rank(rows: Iterable[Sequence], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Iterable[Sequence], ncols: int) -> list[Vec]:
    """Basis of ``{x : r.x = 0 for all rows r}`` as primitive integer vectors."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(primitive_vector(v))
    return basis


def canonical_row_space(rows: Iterable[Sequence], ncols: int) -> tuple[Vec, ...]:
    """Canonical basis of a rational row space: RREF rows made primitive."""
    red, _ = rref(rows, ncols)
    return tuple(primitive_vector(r) for r in red)


class _Reducer:
    """Reduce functionals modulo a fixed subspace of functionals."""

    def __init__(self, rows: Sequence[Sequence], ncols: int):
        self.red, self.pivots = rref(rows, ncols)

    def reduce(self, v: Sequence) -> list[Fraction]:
        w = [Fraction(x) for x in v]
        for row, p in zip(self.red, self.pivots):
            if w[p] != 0:
                f = w[p]
                w = [x - f * y for x, y in zip(w, row)]
        return w


def hermite_basis(rows: Iterable[Sequence[int]], ncols: int) -> tuple[Vec, ...]:
    """Row-style Hermite normal form of the integer lattice spanned by ``rows``.

    Pivots are positive and the entries above each pivot are reduced into
    ``[0, pivot)``.  The result is a canonical basis of the lattice.
    """
    a = [list(r) for r in rows if any(r)]
    top = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(top, len(a)) if a[i][c] != 0]
            if not nz:
                break
            best = min(nz, key=lambda i: abs(a[i][c]))
            a[top], a[best] = a[best], a[top]
            clean = True
            for i in range(top + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[top][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[top])]
                    if a[i][c]:
                        clean = False
            if clean:
                break
        if top >= len(a) or a[top][c] == 0:
            continue
        if a[top][c] < 0:
            a[top] = [-x for x in a[top]]
        for i in range(top):
            q = a[i][c] // a[top][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[top])]
        top += 1
    return tuple(tuple(r) for r in a[:top] if any(r))


# ----------------------------------------------------------------- maps


class LatticeMap:
    """An integer matrix viewed as a homomorphism ``Z^source -> Z^target``.

    ``matrix`` has one row per target coordinate.
    """

    __slots__ = ("matrix", "source_rank", "target_rank")

    def __init__(self, matrix: Sequence[Sequence[int]], source_rank: int | None = None):
        rows = tuple(tuple(int(x) for x in r) for r in matrix)
        if source_rank is None:
            if not rows:
                raise DimensionError("source rank required for a map to Z^0")
            source_rank = len(rows[0])
        for r in rows:
            if len(r) != source_rank:
                raise DimensionError("ragged matrix")
        self.matrix = rows
        self.source_rank = source_rank
        self.target_rank = len(rows)

    @classmethod
    def identity(cls, n: int) -> "LatticeMap":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zero(cls, source: int, target: int) -> "LatticeMap":
        return cls([[0] * source for _ in range(target)], source)

    def __call__(self, v: Sequence) -> Vec:
        return self.apply(v)

    def apply(self, v: Sequence) -> Vec:
        if len(v) != self.source_rank:
            raise DimensionError(f"map expects rank {self.source_rank}, got {len(v)}")
        return tuple(sum(a * x for a, x in zip(r, v)) for r in self.matrix)

    def transpose(self) -> "LatticeMap":
        cols = [[r[j] for r in self.matrix] for j in range(self.source_rank)]
        return LatticeMap(cols, self.target_rank)

    def pullback(self, functional: Sequence) -> Vec:
        """The functional ``functional o self`` on the source lattice."""
        if len(functional) != self.target_rank:
            raise DimensionError("functional rank mismatch")
        return tuple(
            sum(functional[i] * self.matrix[i][j] for i in range(self.target_rank))
            for j in range(self.source_rank)
        )

    def compose(self, other: "LatticeMap") -> "LatticeMap":
        """``self o other``."""
        if other.target_rank != self.source_rank:
            raise DimensionError("cannot compose maps of incompatible ranks")
        cols = [other.apply(e) for e in _basis(other.source_rank)]
        rows = [[pairing(r, c) for c in cols] for r in self.matrix]
        return LatticeMap(rows, other.source_rank)

    def kernel(self) -> list[Vec]:
        return kernel_sublattice(self)

    def right_inverse(self) -> "LatticeMap":
        """An integer section ``S`` with ``self o S = id``; needs a surjective map."""
        from sympy import Matrix
        from sympy.matrices.normalforms import smith_normal_decomp

        a = Matrix(self.matrix)
        d, u, v = smith_normal_decomp(a)
        r, c = d.shape
        for i in range(r):
            if abs(d[i, i]) != 1:
                raise DomainError("map is not surjective onto the integer lattice")
        # a = u^-1 d v^-1  and  d d^T = I, so S = v d^T u works.
        s = v * d.T * u
        return LatticeMap([[int(s[i, j]) for j in range(s.shape[1])] for i in range(s.shape[0])],
                          self.target_rank)

    def __eq__(self, other):
        return (isinstance(other, LatticeMap) and self.matrix == other.matrix
                and self.source_rank == other.source_rank)

    def __hash__(self):
        return hash((self.matrix, self.source_rank))

    def __repr__(self):
        return f"LatticeMap({[list(r) for r in self.matrix]})"


def _basis(n: int) -> list[Vec]:
    return [tuple(int(i == j) for j in range(n)) for i in range(n)]


def kernel_sublattice(f: LatticeMap) -> list[Vec]:
    """Saturated basis of ``ker f`` in Hermite normal form.

    The kernel is read off a Smith decomposition ``U A V = D``: the columns
    of the unimodular ``V`` beyond the rank of ``D`` span the kernel and are
    automatically saturated.
    """
    n = f.source_rank
    if f.target_rank == 0 or all(not any(r) for r in f.matrix):
        return list(hermite_basis(_basis(n), n))
    from sympy import Matrix
    from sympy.matrices.normalforms import smith_normal_decomp

    d, _u, v = smith_normal_decomp(Matrix(f.matrix))
    r = sum(1 for i in range(min(d.shape)) if d[i, i] != 0)
    ker = [tuple(int(v[i, j]) for i in range(n)) for j in range(r, n)]
    return list(hermite_basis(ker, n))


class SkewForm:
    """An integral skew-symmetric bilinear form ``{a, b} = a^T B b``."""

    __slots__ = ("matrix", "rank")

    def __init__(self, matrix: Sequence[Sequence[int]]):
        rows = tuple(tuple(int(x) for x in r) for r in matrix)
        n = len(rows)
        for i, r in enumerate(rows):
            if len(r) != n:
                raise DimensionError("skew matrix must be square")
            if r[i] != 0:
                raise DomainError("skew matrix must have zero diagonal")
            for j in range(n):
                if r[j] != -rows[j][i]:
                    raise DomainError("matrix is not skew-symmetric")
        self.matrix = rows
        self.rank = n

    def __call__(self, a: Sequence[int], b: Sequence[int]) -> int:
        return sum(a[i] * self.matrix[i][j] * b[j]
                   for i in range(self.rank) for j in range(self.rank))

    def adjoint(self) -> LatticeMap:
        """The map ``n -> {n, .}`` from the lattice to its dual."""
        return LatticeMap([[self.matrix[i][j] for i in range(self.rank)]
                           for j in range(self.rank)], self.rank)

    def __eq__(self, other):
        return isinstance(other, SkewForm) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"SkewForm({[list(r) for r in self.matrix]})"


# ---------------------------------------------------------------- cones


def _h_to_v(d: int, eqs: Sequence[Vec], ineqs: Sequence[Vec]):
    lines = tuple(canonical_row_space(nullspace(list(eqs) + list(ineqs), d), d))
    span_dim = d - rank(eqs, d)
    pointed = span_dim - len(lines)
    rays = set()
    if pointed > 0:
        for tight in combinations(ineqs, pointed - 1):
            sol = nullspace(list(eqs) + list(tight) + list(lines), d)
            if len(sol) != 1:
                continue
            r = sol[0]
            vals = [pairing(b, r) for b in ineqs]
            if all(x >= 0 for x in vals):
                rays.add(r)
            elif all(x <= 0 for x in vals):
                rays.add(tuple(-x for x in r))
    return lines, tuple(sorted(rays))


def _v_to_h(d: int, lines: Sequence[Vec], rays: Sequence[Vec]):
    gens = list(lines) + list(rays)
    k = rank(gens, d)
    eqs = canonical_row_space(nullspace(gens, d), d)
    ineqs = set()
    pointed = k - len(lines)
    if rays and pointed > 0:
        reducer = _Reducer(eqs, d)
        for tight in combinations(rays, pointed - 1):
            if rank(list(lines) + list(tight), d) != k - 1:
                continue
            b = None
            for w in nullspace(list(lines) + list(tight), d):
                red = reducer.reduce(w)
                if any(red):
                    b = primitive_vector(red)
                    break
            if b is None:
                continue
            vals = [pairing(b, r) for r in rays]
            if all(x >= 0 for x in vals):
                ineqs.add(b)
            elif all(x <= 0 for x in vals):
                ineqs.add(tuple(-x for x in b))
    return tuple(eqs), tuple(sorted(ineqs))


class RationalCone:
    """A rational polyhedral cone with apex at the origin.

    The cone is ``{x : e.x = 0 for e in equations, b.x >= 0 for b in inequalities}``.
    Both lists are kept in canonical form: ``equations`` is the primitive
    RREF basis of the functionals vanishing on the span, and
    ``inequalities`` are the facet normals, reduced modulo the equations and
    sorted.  Hence ``==`` decides equality of cones.
    """

    __slots__ = ("ambient_rank", "equations", "inequalities", "lines", "rays", "_hash")

    def __init__(self, ambient_rank: int, equations: Iterable[Sequence[int]] = (),
                 inequalities: Iterable[Sequence[int]] = ()):
        eqs = [tuple(primitive_vector(e)) for e in equations if any(e)]
        ineqs = [tuple(primitive_vector(b)) for b in inequalities if any(b)]
        for v in eqs + ineqs:
            if len(v) != ambient_rank:
                raise DimensionError("normal of wrong rank")
        lines, rays = _h_to_v(ambient_rank, eqs, ineqs)
        self._set(ambient_rank, lines, rays)

    def _set(self, d, lines, rays):
        eqs, ineqs = _v_to_h(d, lines, rays)
        self.ambient_rank = d
        self.equations = eqs
        self.inequalities = ineqs
        self.lines = tuple(lines)
        self.rays = tuple(rays)
        self._hash = hash((d, eqs, ineqs))

    @classmethod
    def from_generators(cls, ambient_rank: int, rays: Iterable[Sequence] = (),
                        lines: Iterable[Sequence] = ()) -> "RationalCone":
        rays = [primitive_vector(r) for r in rays if any(r)]
        lines = [primitive_vector(v) for v in lines if any(v)]
        for v in rays + lines:
            if len(v) != ambient_rank:
                raise DimensionError("generator of wrong rank")
        # Round-trip through the H-representation to get canonical generators.
        eqs, ineqs = _v_to_h(ambient_rank, lines, rays)
        return cls(ambient_rank, eqs, ineqs)

    @classmethod
    def hyperplane(cls, normal: Sequence[int]) -> "RationalCone":
        return cls(len(normal), [normal])

    @classmethod
    def whole(cls, ambient_rank: int) -> "RationalCone":
        return cls(ambient_rank)

    @classmethod
    def ray(cls, direction: Sequence) -> "RationalCone":
        return cls.from_generators(len(direction), [direction])

    # -- basic data
    @property
    def dim(self) -> int:
        return self.ambient_rank - len(self.equations)

    @property
    def codim(self) -> int:
        return len(self.equations)

    @property
    def span_normal(self) -> Vec | None:
        """The primitive normal of the span when the cone spans a hyperplane."""
        return self.equations[0] if len(self.equations) == 1 else None

    @property
    def inequality_normals(self) -> tuple[Vec, ...]:
        return self.inequalities

    @property
    def is_linear(self) -> bool:
        return not self.inequalities

    def key(self) -> tuple:
        return (self.ambient_rank, self.equations, self.inequalities)

    def __eq__(self, other):
        return isinstance(other, RationalCone) and self.key() == other.key()

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        return (f"RationalCone(rank={self.ambient_rank}, eq={[list(e) for e in self.equations]}, "
                f"ineq={[list(b) for b in self.inequalities]})")

    # -- membership
    def contains(self, x: Sequence) -> bool:
        return (all(pairing(e, x) == 0 for e in self.equations)
                and all(pairing(b, x) >= 0 for b in self.inequalities))

    def __contains__(self, x):
        return self.contains(x)

    def in_relint(self, x: Sequence) -> bool:
        return (all(pairing(e, x) == 0 for e in self.equations)
                and all(pairing(b, x) > 0 for b in self.inequalities))

    def in_span(self, x: Sequence) -> bool:
        return all(pairing(e, x) == 0 for e in self.equations)

    def relint_point(self) -> Vec:
        p = [0] * self.ambient_rank
        for g in self.rays + self.lines:
            p = [a + b for a, b in zip(p, g)]
        return tuple(p)

    def contains_cone(self, other: "RationalCone") -> bool:
        return (all(self.contains(r) for r in other.rays)
                and all(self.contains(v) and self.contains(tuple(-x for x in v))
                        for v in other.lines))

    def span_basis(self) -> tuple[Vec, ...]:
        return tuple(nullspace(self.equations, self.ambient_rank))

    def linear_span(self) -> "RationalCone":
        return RationalCone(self.ambient_rank, self.equations)

    # -- constructions
    def intersection(self, other: "RationalCone") -> "RationalCone":
        if other.ambient_rank != self.ambient_rank:
            raise DimensionError("cones in different ambient ranks")
        return RationalCone(self.ambient_rank, self.equations + other.equations,
                            self.inequalities + other.inequalities)

    def __and__(self, other):
        return self.intersection(other)

    def with_inequality(self, b: Sequence[int]) -> "RationalCone":
        return RationalCone(self.ambient_rank, self.equations, self.inequalities + (tuple(b),))

    def with_equation(self, e: Sequence[int]) -> "RationalCone":
        return RationalCone(self.ambient_rank, self.equations + (tuple(e),), self.inequalities)

    def minkowski_sum(self, other: "RationalCone") -> "RationalCone":
        return RationalCone.from_generators(self.ambient_rank, self.rays + other.rays,
                                            self.lines + other.lines)

    def add_ray(self, v: Sequence) -> "RationalCone":
        return RationalCone.from_generators(self.ambient_rank, self.rays + (tuple(v),), self.lines)

    def tangent_cone_at(self, x: Sequence) -> "RationalCone":
        """Cone of directions into ``self`` from the point ``x`` of ``self``."""
        tight = [b for b in self.inequalities if pairing(b, x) == 0]
        return RationalCone(self.ambient_rank, self.equations, tight)

    def map_generators(self, f: LatticeMap) -> "RationalCone":
        """Image cone under a linear map."""
        return RationalCone.from_generators(f.target_rank, [f(r) for r in self.rays],
                                            [f(v) for v in self.lines])

    def preimage(self, f: LatticeMap) -> "RationalCone":
        """``{x : f(x) in self}``."""
        return RationalCone(f.source_rank, [f.pullback(e) for e in self.equations],
                            [f.pullback(b) for b in self.inequalities])


def cone_ray_crossings(c: RationalCone, base: Sequence, direction: Sequence[int]) -> list[tuple[Fraction, bool]]:
    """Parameters ``s > 0`` with ``base + s*direction`` in the relative interior of ``c``.

    Each entry carries a transversality flag.  A ray running inside the span
    of ``c`` is reported once, at the start of its interval of interior
    parameters, with the flag ``False``.
    """
    if not any(direction):
        raise DomainError("direction must be nonzero")
    base = [Fraction(x) for x in base]
    s = None
    for e in c.equations:
        a = pairing(e, base)
        b = pairing(e, direction)
        if b == 0:
            if a != 0:
                return []
            continue
        t = -a / b
        if s is None:
            s = t
        elif s != t:
            return []
    if s is not None:
        if s <= 0:
            return []
        pt = [x + s * y for x, y in zip(base, direction)]
        return [(s, True)] if c.in_relint(pt) else []
    lo, hi = Fraction(0), None
    for b in c.inequalities:
        a0 = pairing(b, base)
        b0 = pairing(b, direction)
        if b0 == 0:
            if a0 <= 0:
                return []
        elif b0 > 0:
            lo = max(lo, -a0 / b0)
        else:
            t = -a0 / b0
            hi = t if hi is None else min(hi, t)
    if hi is not None and hi <= lo:
        return []
    return [(lo, False)]


def joint(w1: RationalCone, w2: RationalCone) -> RationalCone | None:
    """Intersection of two codimension-one cones when it has codimension two."""
    if w1.ambient_rank != w2.ambient_rank:
        raise DimensionError("cones in different ambient ranks")
    if w1.codim != 1 or w2.codim != 1:
        raise DomainError("joint expects codimension-one cones")
    j = w1.intersection(w2)
    return j if j.dim == w1.ambient_rank - 2 else None
