"""Tropical hypersurfaces, widgets, and order-by-order consistent completion.

The completion works one q-degree at a time.  At degree ``j`` it computes
the loop product around every joint of the current diagram.  That product
is the identity below degree ``j``, and its degree-``j`` part is a sum of
derivations ``c t^q z^u d_n``.  Grouping those terms by the primitive
direction of ``u`` gives one new outgoing wall per direction, and inserting
these walls cancels the degree-``j`` defect.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .diagram import (Automorphism, Joint, ScatteringDiagram, Wall, is_consistent, joint_loop_product,
                      joints)
from .errors import CompletionError, DomainError, InvalidWallError, PreconditionError
from .lattice import LatticeMap, RationalCone, kernel_sublattice, pairing, primitive_part
from .series import TruncatedSeries, int_pow, mul


def _neg(v):
    return tuple(-x for x in v)


# ----------------------------------------------------- tropical hypersurfaces


class TropicalHypersurface:
    """A weighted fan of codimension-one cones in ``Z^rank``.

    ``quotient`` optionally records the map ``M -> M/Zv`` whose target is the
    lattice the cones live in.
    """

    def __init__(self, rank: int, cones: Sequence[RationalCone], weights: Sequence[int],
                 quotient: LatticeMap | None = None):
        if len(cones) != len(weights):
            raise DomainError("one weight per cone")
        for c in cones:
            if c.ambient_rank != rank or c.codim != 1:
                raise DomainError("hypersurface cones must have codimension one")
        if any(int(w) < 0 for w in weights):
            raise DomainError("weights must be non-negative")
        self.rank = rank
        self.cones = tuple(cones)
        self.weights = tuple(int(w) for w in weights)
        self.quotient = quotient


def _relative_generator(sigma: RationalCone, omega: RationalCone):
    """Lattice vector of ``span(sigma)`` generating it modulo ``span(omega)``, pointing into sigma."""
    b = next((b for b in sigma.inequalities
              if all(pairing(b, g) == 0 for g in omega.rays + omega.lines)), None)
    if b is None:
        return None
    basis = kernel_sublattice(LatticeMap(sigma.equations)) if sigma.equations else \
        [tuple(int(i == j) for j in range(sigma.ambient_rank)) for i in range(sigma.ambient_rank)]
    vals = [pairing(b, v) for v in basis]
    # Extended gcd over the values gives a vector with minimal positive pairing.
    g, coeffs = 0, [0] * len(vals)
    for idx, x in enumerate(vals):
        if x == 0:
            continue
        if g == 0:
            g, coeffs[idx] = abs(x), (1 if x > 0 else -1)
            continue
        g, s, t = _egcd(g, x)
        coeffs = [c * s for c in coeffs]
        coeffs[idx] = t
    u = [0] * sigma.ambient_rank
    for c, v in zip(coeffs, basis):
        u = [a + c * y for a, y in zip(u, v)]
    return tuple(u)


def _egcd(a, b):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    x0, y0, x1, y1 = 1, 0, 0, 1
    aa, bb = a, b
    while bb:
        q = aa // bb
        aa, bb = bb, aa - q * bb
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if aa < 0:
        aa, x0, y0 = -aa, -x0, -y0
    return aa, x0, y0


def check_balancing(t: TropicalHypersurface):
    """Return ``(balanced, violations)``; each violation is a codimension-two cone."""
    omegas = []
    for sigma in t.cones:
        for b in sigma.inequalities:
            om = sigma.with_equation(b)
            if om.dim == t.rank - 2 and om not in omegas:
                omegas.append(om)
    bad = []
    for om in sorted(omegas):
        total = [0] * t.rank
        x = om.relint_point()
        for sigma, w in zip(t.cones, t.weights):
            if not w or not sigma.contains_cone(om) or sigma.in_relint(x):
                continue
            u = _relative_generator(sigma, om)
            if u is None:
                continue
            total = [a + w * c for a, c in zip(total, u)]
        if not om.in_span(total):
            bad.append(om)
    return (not bad, bad)


def widget(t: TropicalHypersurface, v: Sequence[int], f: TruncatedSeries,
           fan_lift: Mapping[int, RationalCone] | Callable[[int, RationalCone], RationalCone],
           order: int | None = None) -> ScatteringDiagram:
    """Walls ``(lift(sigma), f^w_sigma)`` for the weighted cones of ``t``.

    ``fan_lift`` maps the index of each cone of ``t`` (or, if callable,
    ``(index, cone)``) to a codimension-one cone of the ambient lattice
    containing the ray through ``v``.
    """
    v = tuple(v)
    if primitive_part(v)[1] != 1:
        raise DomainError("widget direction must be primitive")
    if not f.is_one_mod_max():
        raise DomainError("widget function must be congruent to 1")
    order = f.order if order is None else order
    walls = []
    for i, (sigma, w) in enumerate(zip(t.cones, t.weights)):
        if w == 0:
            continue
        if callable(fan_lift):
            lift = fan_lift(i, sigma)
        else:
            if i not in fan_lift:
                raise DomainError(f"missing lift for cone {i}")
            lift = fan_lift[i]
        if lift is None:
            raise DomainError(f"missing lift for cone {i}")
        if not lift.contains(v):
            raise DomainError("lifted cone must contain the widget direction")
        try:
            walls.append(Wall(lift, int_pow(f, w), _neg(v)))
        except InvalidWallError as exc:
            raise DomainError(f"widget function has the wrong monomial support: {exc}") from exc
    return ScatteringDiagram(f.rank, f.context, order, walls)


# ----------------------------------------------------------------- completion


@dataclass
class AddedWall:
    order: int
    joint: RationalCone
    wall: Wall


@dataclass
class CompletionReport:
    input: ScatteringDiagram
    output: ScatteringDiagram
    added: list = field(default_factory=list)
    added_walls: list = field(default_factory=list)

    @property
    def orders(self):
        return sorted({a.order for a in self.added})


def _plane_coords(jt: Joint, v):
    """Coordinates of ``v`` in the transversal plane, modulo the joint's span."""
    b1, b2 = jt.plane
    e1, e2 = jt.cell.equations
    a11, a12 = pairing(e1, b1), pairing(e1, b2)
    a21, a22 = pairing(e2, b1), pairing(e2, b2)
    r1, r2 = pairing(e1, v), pairing(e2, v)
    det = a11 * a22 - a12 * a21
    return (Fraction(r1 * a22 - a12 * r2, det), Fraction(a11 * r2 - r1 * a21, det))


def local_defect_factorization(defect: Automorphism, jt: Joint) -> list[Wall]:
    """Outgoing walls whose insertion cancels the lowest-degree part of ``defect``."""
    j = defect.defect_degree()
    if j is None:
        return []
    d = defect.rank
    vectors: dict = {}
    for i, h in enumerate(defect.multipliers()):
        for (q, u), c in h.degree_part(j)._coeffs.items():
            vectors.setdefault((q, u), [0] * d)[i] = c
    groups: dict = {}
    for (q, u), vec in vectors.items():
        if not any(u):
            raise CompletionError("defect term without z-dependence; no wall can cancel it")
        groups.setdefault(primitive_part(u)[0], []).append((q, u, vec))
    walls = []
    b1, b2 = jt.plane
    for u0 in sorted(groups):
        support = jt.cell.add_ray(_neg(u0))
        if support.codim != 1:
            raise CompletionError(
                f"correction cone from joint {jt.cell} in direction {_neg(u0)} is not a wall")
        normal = support.span_normal
        a, b = _plane_coords(jt, _neg(u0))
        vel = tuple(-b * p + a * q for p, q in zip(b1, b2))
        s = pairing(normal, vel)
        if s == 0:
            raise CompletionError("correction wall is tangent to the loop")
        co = normal if s < 0 else _neg(normal)
        terms = {(defect.context.zero(), (0,) * d): 1}
        for q, u, vec in groups[u0]:
            k = next(i for i in range(d) if co[i])
            lam = Fraction(vec[k]) / co[k]
            if any(Fraction(x) != lam * y for x, y in zip(vec, co)):
                raise CompletionError(
                    f"defect derivation for z^{u} is not normal to its correction wall")
            terms[(q, u)] = -lam
        f = TruncatedSeries(defect.context, d, defect.order, terms)
        w = Wall(support, f, _neg(u0))
        if w.incoming:
            raise CompletionError("correction wall would be incoming")
        walls.append(w)
    return walls


def _check_precondition(d_in: ScatteringDiagram):
    walls = d_in.nontrivial_walls()
    if all(w.incoming for w in walls):
        return
    if is_consistent(d_in, order=min(1, d_in.order)):
        return
    raise PreconditionError(
        "completion needs incoming input walls or an input consistent to order 1")


def complete(d_in: ScatteringDiagram, target_order: int | None = None,
             check: bool = True) -> CompletionReport:
    """Consistent completion of ``d_in`` up to q-degree ``target_order``.

    Input walls are kept as given.  Added walls with equal support and
    direction are merged by multiplying their functions.
    """
    k = d_in.order if target_order is None else target_order
    base = ScatteringDiagram(d_in.ambient_rank, d_in.context, k,
                             [w.with_order(k) for w in d_in.walls])
    _check_precondition(base)
    merged: dict = {}
    report_added = []
    for j in range(1, k + 1):
        current = base.truncate(j).add_walls(
            Wall(s, f.truncate(j), dr) for (s, dr), f in sorted(merged.items(), key=_mkey))
        active = [w for w in current.nontrivial_walls()]
        new = []
        for jt in joints(current):
            phi = joint_loop_product(current, jt, j, active)
            deg = phi.defect_degree()
            if deg is None:
                continue
            if deg < j:
                raise CompletionError(
                    f"joint {jt.cell} is inconsistent below degree {j}; this configuration "
                    "(correction walls meeting along new codimension-two cells) is not supported")
            for w in local_defect_factorization(phi, jt):
                new.append((jt, w))
        for jt, w in new:
            w = w.with_order(k)
            report_added.append(AddedWall(j, jt.cell, w))
            key = (w.support, w.direction)
            merged[key] = mul(merged[key], w.function) if key in merged else w.function
    added = [Wall(s, f, dr) for (s, dr), f in sorted(merged.items(), key=_mkey) if not f.is_one()]
    out = base.add_walls(added)
    if check:
        rep = is_consistent(out)
        if not rep.consistent:
            raise CompletionError(
                f"completion failed the final consistency check at {len(rep.failures)} joints")
    return CompletionReport(d_in, out, report_added, added)


def _mkey(item):
    (s, dr), _f = item
    return (s.key(), dr)
