"""Cluster seeds and the scattering diagrams attached to them.

A seed is a skew-symmetric integer matrix ``B`` on ``N = Z^r`` together with
the set of unfrozen indices.  ``v_i = {e_i, -}`` is row ``i`` of ``B``, read
as an element of the dual lattice ``M``.

Every initial diagram adjoins one bookkeeping variable ``t_i`` per unfrozen
index; the variable records contributions of the i-th initial wall and
makes the q-degree a truncation filtration.  Frozen indices get no
variable (their coefficients are specialized to 1).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .completion import TropicalHypersurface
from .diagram import ScatteringDiagram, Wall, pullback_diagram, pushforward_diagram
from .errors import AssumptionError, DomainError, PsiConditionError
from .lattice import (LatticeMap, RationalCone, SkewForm, kernel_sublattice,
                      primitive_part, rank as lin_rank)
from .series import MonoidContext, TruncatedSeries, int_pow, mul

KINDS = ("cluster", "aprin", "xprin", "hdtv_x", "hdtv_a", "hdtv_a_restricted")


def _unit(n, i):
    return tuple(int(j == i) for j in range(n))


def _neg(v):
    return tuple(-x for x in v)


class Seed:
    """A skew-symmetric seed with frozen and unfrozen basis vectors."""

    def __init__(self, skew, unfrozen: Sequence[int] | None = None):
        self.form = skew if isinstance(skew, SkewForm) else SkewForm(skew)
        self.rank = self.form.rank
        if unfrozen is None:
            unfrozen = range(self.rank)
        unfrozen = tuple(sorted(set(int(i) for i in unfrozen)))
        if any(i < 0 or i >= self.rank for i in unfrozen):
            raise DomainError("unfrozen index out of range")
        self.unfrozen = unfrozen
        for i in unfrozen:
            if not any(self.form.matrix[i]):
                raise DomainError(f"v_{i} = 0 for the unfrozen index {i}")

    @classmethod
    def from_json(cls, data: dict) -> "Seed":
        try:
            rank = int(data["rank"])
            skew = data["skew"]
            unfrozen = data.get("unfrozen", list(range(rank)))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed seed: {exc}") from exc
        if len(skew) != rank:
            raise DomainError("skew matrix size does not match rank")
        return cls(skew, unfrozen)

    def to_json(self) -> dict:
        return {"rank": self.rank, "skew": [list(r) for r in self.form.matrix],
                "unfrozen": list(self.unfrozen)}

    @property
    def skew(self):
        return self.form.matrix

    @property
    def frozen(self):
        return tuple(i for i in range(self.rank) if i not in self.unfrozen)

    @property
    def p1(self) -> LatticeMap:
        """``n -> {n, -}`` from ``N`` to ``M``."""
        return self.form.adjoint()

    def v(self, i: int) -> tuple:
        return tuple(self.form.matrix[i])

    def v_vectors(self) -> list[tuple]:
        return [self.v(i) for i in range(self.rank)]

    def variable_names(self) -> list[str]:
        return [f"t{i + 1}" for i in self.unfrozen]

    def context(self) -> MonoidContext:
        return MonoidContext(self.variable_names())

    def principal(self) -> "PrincipalSeed":
        return PrincipalSeed(self)

    def kernel(self) -> list[tuple]:
        """Basis of ``K = ker(p1)`` in ``N``."""
        return kernel_sublattice(self.p1)

    def kernel_annihilator(self) -> list[tuple]:
        """HNF basis of ``K^perp`` in ``M`` (equivalently, coordinates on ``N/K``)."""
        k = self.kernel()
        if not k:
            return [_unit(self.rank, i) for i in range(self.rank)]
        return kernel_sublattice(LatticeMap(k, self.rank))

    def quotient_map(self) -> LatticeMap:
        """The projection ``N -> N/K`` in the basis dual to :meth:`kernel_annihilator`."""
        return LatticeMap(self.kernel_annihilator(), self.rank)

    def reduced(self) -> "Seed":
        """The seed induced on ``N/K``.

        Requires each unfrozen ``e_i`` to map to a standard basis vector of
        the quotient so that bookkeeping variables keep their meaning.
        """
        q = self.quotient_map()
        s = q.right_inverse()
        b = self.form.matrix
        n2 = q.target_rank
        cols = [s.apply(_unit(n2, a)) for a in range(n2)]
        skew = [[sum(cols[a][i] * b[i][j] * cols[c][j] for i in range(self.rank)
                     for j in range(self.rank)) for c in range(n2)] for a in range(n2)]
        unfrozen = []
        for i in self.unfrozen:
            img = q.apply(_unit(self.rank, i))
            if sorted(img) != [0] * (n2 - 1) + [1]:
                raise DomainError("unfrozen basis vector does not map to a quotient basis vector")
            unfrozen.append(img.index(1))
        if unfrozen != sorted(unfrozen):
            raise DomainError("quotient reorders the unfrozen indices")
        return Seed(skew, unfrozen)

    def __eq__(self, other):
        return isinstance(other, Seed) and self.form == other.form and self.unfrozen == other.unfrozen

    def __repr__(self):
        return f"Seed({[list(r) for r in self.form.matrix]}, unfrozen={list(self.unfrozen)})"


class PrincipalSeed(Seed):
    """The seed with principal coefficients on ``N + M`` built from ``base``.

    The form is ``{(n1,m1),(n2,m2)} = {n1,n2} + <n1,m2> - <n2,m1>`` and the
    unfrozen indices are those of the base, sitting in the ``N`` summand.
    """

    def __init__(self, base: Seed):
        r = base.rank
        b = base.form.matrix
        skew = [[0] * (2 * r) for _ in range(2 * r)]
        for i in range(r):
            for j in range(r):
                skew[i][j] = b[i][j]
            skew[i][r + i] = 1
            skew[r + i][i] = -1
        self.base = base
        super().__init__(skew, base.unfrozen)

    def variable_names(self) -> list[str]:
        return self.base.variable_names()


def v_vectors(s: Seed) -> list[tuple]:
    return s.v_vectors()


@dataclass
class AssumptionReport:
    x_ok: bool
    injective: bool
    coprime_note: str
    problems: list


def check_assumptions(s: Seed) -> AssumptionReport:
    """Check the X-assumptions and injectivity of ``p1`` on the unfrozen part."""
    problems = []
    vs = [s.v(i) for i in s.unfrozen]
    for i, v in zip(s.unfrozen, vs):
        g = primitive_part(v)[1]
        if g != 1:
            problems.append(f"v_{i + 1} not primitive (divisibility {g})")
    rays = [primitive_part(v)[0] for v in vs]
    for a in range(len(rays)):
        for b in range(a + 1, len(rays)):
            if rays[a] == rays[b]:
                problems.append(f"v_{s.unfrozen[a] + 1} and v_{s.unfrozen[b] + 1} span the same ray")
    injective = lin_rank(vs, s.rank) == len(vs) if vs else True
    note = "total coprimality is not verified by this engine"
    return AssumptionReport(not problems, injective, note, problems)


# --------------------------------------------------------- initial diagrams


def _binomial(ctx, rank, order, i_var, exponent, power=1):
    f = TruncatedSeries(ctx, rank, order, {(ctx.zero(), (0,) * rank): 1,
                                           (ctx.generator(i_var), tuple(exponent)): 1})
    return int_pow(f, power) if power != 1 else f


def initial_diagram(s: Seed, kind: str, order: int) -> ScatteringDiagram:
    """The initial (uncompleted) diagram of the given kind."""
    if kind not in KINDS:
        raise DomainError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    base = s.base if isinstance(s, PrincipalSeed) else s
    report = check_assumptions(base)
    r = base.rank
    if kind in ("cluster", "hdtv_x"):
        if kind == "hdtv_x" and not report.x_ok:
            raise AssumptionError("; ".join(report.problems))
        if not report.injective:
            raise AssumptionError("p1 is not injective on the unfrozen sublattice")
        ctx = base.context()
        walls = []
        for a, i in enumerate(base.unfrozen):
            v = base.v(i)
            f = _binomial(ctx, r, order, a, v)
            walls.append(Wall(RationalCone.hyperplane(_unit(r, i)), f,
                              _neg(primitive_part(v)[0])))
        return ScatteringDiagram(r, ctx, order, walls)
    if kind == "aprin":
        ctx = base.context()
        walls = []
        for a, i in enumerate(base.unfrozen):
            exp = base.v(i) + _unit(r, i)
            f = _binomial(ctx, 2 * r, order, a, exp)
            walls.append(Wall(RationalCone.hyperplane(_unit(2 * r, i)), f, _neg(exp)))
        return ScatteringDiagram(2 * r, ctx, order, walls)
    if kind in ("xprin", "hdtv_a_restricted"):
        ctx = base.context()
        walls = []
        for a, i in enumerate(base.unfrozen):
            vp, g = primitive_part(base.v(i))
            f = _binomial(ctx, r, order, a, _unit(r, i), g)
            walls.append(Wall(RationalCone.hyperplane(vp), f, _neg(_unit(r, i))))
        return ScatteringDiagram(r, ctx, order, walls)
    # hdtv_a: one variable t_{ij} per unfrozen i and 1 <= j <= |v_i|.
    names, slots = [], []
    for i in base.unfrozen:
        g = primitive_part(base.v(i))[1]
        slots.append(list(range(len(names), len(names) + g)))
        names.extend(f"t{i + 1}_{j + 1}" for j in range(g))
    ctx = MonoidContext(names)
    walls = []
    for i, idx in zip(base.unfrozen, slots):
        vp = primitive_part(base.v(i))[0]
        f = TruncatedSeries.one(ctx, r, order)
        for a in idx:
            f = mul(f, _binomial(ctx, r, order, a, _unit(r, i)))
        walls.append(Wall(RationalCone.hyperplane(vp), f, _neg(_unit(r, i))))
    return ScatteringDiagram(r, ctx, order, walls)


def hdtv_a_restrict(d: ScatteringDiagram, s: Seed) -> ScatteringDiagram:
    """Set ``t_ij = t_i`` in an ``hdtv_a`` diagram."""
    ctx = s.context()
    index = {}
    for a, i in enumerate(s.unfrozen):
        g = primitive_part(s.v(i))[1]
        for j in range(g):
            index[f"t{i + 1}_{j + 1}"] = a
    cols = [index[n] for n in d.context.names]

    def qmap(q, m):
        out = [0] * ctx.q_rank
        for x, c in zip(q, cols):
            out[c] += x
        return tuple(out), m

    walls = [Wall(w.support, w.function.map_terms(qmap, context=ctx), w.direction)
             for w in d.walls]
    return ScatteringDiagram(d.ambient_rank, ctx, d.order, walls)


def cluster_hypersurface(s: Seed, i: int):
    """The weight-one hypersurface ``e_i^perp / R v_i`` in ``M / Z v_i`` with its lift.

    Returns ``(hypersurface, lift)`` ready for :func:`completion.widget`.
    Needs ``v_i`` primitive.
    """
    v = s.v(i)
    if primitive_part(v)[1] != 1:
        raise AssumptionError(f"v_{i + 1} is not primitive")
    r = s.rank
    q = LatticeMap(kernel_sublattice(LatticeMap([v], r)), r)
    lift_cone = RationalCone.hyperplane(_unit(r, i))
    sect = q.right_inverse()
    # normal of the image hyperplane: e_i = n' o q with n' = e_i o section.
    normal = sect.pullback(_unit(r, i))
    cone = RationalCone.hyperplane(normal)
    return TropicalHypersurface(q.target_rank, [cone], [1], q), {0: lift_cone}


# --------------------------------------------------------------------- psi


def _split(d_rank):
    if d_rank % 2:
        raise PsiConditionError("diagram over M+N must have even rank")
    return d_rank // 2


def psi(d: ScatteringDiagram, seed: Seed | None = None) -> ScatteringDiagram:
    """Quotient a principal-coefficient diagram over ``M + N`` by ``N``.

    Supports must contain ``0 + N`` and lie in some ``(n, 0)^perp``; every
    monomial ``t^b z^(m, n)`` must have ``n`` supported on the unfrozen
    indices with ``b = n_I``.  The output keeps the monoid and sends the
    term to ``t^b z^m``.
    """
    r = _split(d.ambient_rank)
    unfrozen = list(seed.unfrozen) if seed is not None else list(range(r))
    if d.context.q_rank != len(unfrozen):
        raise PsiConditionError("monoid does not match the unfrozen indices")
    proj = LatticeMap([_unit(2 * r, i) for i in range(r)], 2 * r)
    walls = []
    for w in d.walls:
        if any(w.normal[r:]):
            raise PsiConditionError("wall is not contained in a hyperplane (n,0)^perp", w)
        for j in range(r):
            e = _unit(2 * r, r + j)
            if not (w.support.contains(e) and w.support.contains(_neg(e))):
                raise PsiConditionError("wall is not invariant under translation by N", w)

        def rewrite(q, m, w=w):
            n = m[r:]
            if any(n[j] for j in range(r) if j not in unfrozen) or any(x < 0 for x in n):
                raise PsiConditionError(f"monomial exponent {m} leaves the unfrozen cone", w)
            if tuple(n[j] for j in unfrozen) != tuple(q):
                raise PsiConditionError(f"bookkeeping exponent {q} differs from {n}", w)
            return q, m[:r]

        f = w.function.map_terms(rewrite, rank=r)
        sup = w.support.map_generators(proj)
        u = proj(w.exponent)
        if not any(u):
            raise PsiConditionError("wall direction lies in N", w)
        walls.append(Wall(sup, f, _neg(primitive_part(u)[0])))
    return ScatteringDiagram(r, d.context, d.order, walls)


def psi_inverse(d: ScatteringDiagram, seed: Seed) -> ScatteringDiagram:
    """Rebuild a diagram over ``M + N`` from walls in ``M``: supports ``pi^-1``, ``t^b z^m -> t^b z^(m, b)``."""
    r = d.ambient_rank
    unfrozen = list(seed.unfrozen)
    incl = LatticeMap([_unit(2 * r, i) for i in range(r)], 2 * r)
    walls = []
    for w in d.walls:
        sup = w.support.preimage(incl)

        def rewrite(q, m):
            n = [0] * r
            for a, i in enumerate(unfrozen):
                n[i] = q[a]
            return q, tuple(m) + tuple(n)

        f = w.function.map_terms(rewrite, rank=2 * r)
        exps = [m for m in f.m_exponents() if any(m)]
        if not exps:
            continue
        walls.append(Wall(sup, f, _neg(primitive_part(exps[0])[0])))
    return ScatteringDiagram(2 * r, d.context, d.order, walls)


# ----------------------------------------------------------- slice, fiber, quotient


def slice_inclusion(seed: Seed) -> LatticeMap:
    """``n -> (p1(n), n)`` from ``N`` into ``M + N``."""
    r = seed.rank
    p1 = seed.p1.matrix
    rows = [list(p1[j]) for j in range(r)] + [list(_unit(r, j)) for j in range(r)]
    return LatticeMap(rows, r)


def slice_to_x(d: ScatteringDiagram, seed: Seed) -> ScatteringDiagram:
    """Intersect a principal-coefficient diagram with ``N`` embedded by :func:`slice_inclusion`."""
    base = seed.base if isinstance(seed, PrincipalSeed) else seed
    r = base.rank
    if d.ambient_rank != 2 * r:
        raise DomainError("slice needs a diagram over M+N")
    iota = slice_inclusion(base)
    back = LatticeMap([_unit(2 * r, r + j) for j in range(r)], 2 * r)
    return pullback_diagram(d, iota, back)


def _left_inverse(incl: LatticeMap) -> LatticeMap:
    return incl.transpose().right_inverse().transpose()


def fiber_diagram(d: ScatteringDiagram, seed: Seed) -> ScatteringDiagram:
    """Restrict an ``hdtv_x`` diagram in ``M`` to ``K^perp``, in the HNF basis of ``K^perp``."""
    if d.ambient_rank != seed.rank:
        raise DomainError("diagram and seed ranks differ")
    basis = seed.kernel_annihilator()
    incl = LatticeMap([[b[i] for b in basis] for i in range(seed.rank)], len(basis))
    return pullback_diagram(d, incl, _left_inverse(incl))


def quotient_diagram(d: ScatteringDiagram, seed: Seed) -> ScatteringDiagram:
    """Push an ``hdtv_a_restricted`` diagram in ``N`` down to ``N/K``."""
    if d.ambient_rank != seed.rank:
        raise DomainError("diagram and seed ranks differ")
    return pushforward_diagram(d, seed.quotient_map())
