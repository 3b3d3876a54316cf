from fractions import Fraction

import pytest

from scatter.diagram import (INCOMING, OUTGOING, CWallView, ScatteringDiagram, Wall, classify,
                             crossing_automorphism, equivalent, is_consistent, joints, normalize,
                             path_ordered_product)
from scatter.errors import DomainError, InvalidWallError, NonTransversalPathError
from scatter.lattice import LatticeMap, RationalCone
from scatter.series import MonoidContext, TruncatedSeries, int_pow

from conftest import binomial_wall, line_pair, poly, single_wall

C2 = MonoidContext.free(2)


def corner_wall(order, side=(-1, 0)):
    """``1 + t1 t2 z^(1,1)`` on the ray through ``(-1,-1)``, or through ``(1,1)`` with ``side=(1, 0)``."""
    return binomial_wall(C2, (1, -1), (1, 1), (1, 1), order, ineqs=[side])


def test_wall_validation():
    f = poly(C2, 2, 2, (1, (0, 0), (0, 0)), (1, (1, 0), (1, 0)))
    with pytest.raises(InvalidWallError):
        Wall(RationalCone.hyperplane((1, 0)), f)          # direction not tangent
    with pytest.raises(InvalidWallError):
        Wall(RationalCone(2, [(1, 0), (0, 1)]), f)        # not codimension one
    g = poly(C2, 2, 2, (2, (0, 0), (0, 0)), (1, (1, 0), (1, 0)))
    with pytest.raises(InvalidWallError):
        Wall(RationalCone.hyperplane((0, 1)), g)          # not 1 mod the maximal ideal
    h = f + poly(C2, 2, 2, (1, (-1, 0), (0, 1)))
    with pytest.raises(InvalidWallError):
        Wall(RationalCone.hyperplane((0, 1)), h)          # mixed directions


def test_classify_examples():
    line = binomial_wall(C2, (0, 1), (1, 0), (1, 0), 2)
    assert classify(line) == INCOMING
    assert classify(corner_wall(2)) == OUTGOING
    hdtv = binomial_wall(C2, (1, 0), (0, 1), (1, 0), 2)  # (e1^perp, 1 + t1 z^v1)
    assert classify(hdtv) == INCOMING


def test_classify_under_subdivision_along_direction():
    # Cutting a line along hyperplanes containing the direction keeps the type.
    c3 = MonoidContext.free(1)
    whole = binomial_wall(c3, (0, 0, 1), (1, 0, 0), (1,), 2)
    half = binomial_wall(c3, (0, 0, 1), (1, 0, 0), (1,), 2, ineqs=[(0, 1, 0)])
    assert classify(whole) == classify(half) == INCOMING


def test_crossing_examples():
    w = binomial_wall(C2, (1, 0), (0, 1), (0, 1), 1)
    theta = crossing_automorphism(w, (1, 0))
    x = TruncatedSeries.monomial(C2, 2, 1, m=(1, 0))
    assert theta(x) == poly(C2, 2, 1, (1, (1, 0), (0, 0)), (1, (1, 1), (0, 1)))
    y = TruncatedSeries.monomial(C2, 2, 1, m=(0, 1))
    assert theta(y) == y
    s = poly(C2, 2, 4, (3, (2, -1), (1, 0)), (1, (1, 0), (0, 0)))
    w4 = w.with_order(4)
    assert crossing_automorphism(w4, (-1, 0))(crossing_automorphism(w4, (1, 0))(s)) == s


def test_crossing_rejects_bad_conormal():
    w = binomial_wall(C2, (1, 0), (0, 1), (0, 1), 1)
    with pytest.raises(DomainError):
        crossing_automorphism(w, (0, 1))


def square(r=1):
    return [(r, r), (-r, r), (-r, -r), (r, -r), (r, r)]


def test_path_products():
    empty = ScatteringDiagram(2, C2, 3, [])
    assert path_ordered_product(empty, square()).is_identity()
    one = ScatteringDiagram(2, C2, 3, [binomial_wall(C2, (0, 1), (1, 0), (1, 0), 3)])
    assert path_ordered_product(one, square()).is_identity()
    phi = path_ordered_product(line_pair(2), square())
    assert not phi.is_identity()
    # the defect sits on t1 t2 z^(1,1)
    assert phi.defect_degree() == 2
    assert all(m == (1, 1) for h in phi.defect() for _q, m, _c in h.terms())


def test_path_through_joint_rejected():
    with pytest.raises(NonTransversalPathError):
        path_ordered_product(line_pair(2), [(1, 1), (-1, -1)])
    with pytest.raises(NonTransversalPathError):
        path_ordered_product(line_pair(2), [(1, 0), (2, 1)])


def test_consistency_examples():
    assert is_consistent(single_wall(5))
    bad = is_consistent(line_pair(4))
    assert not bad and len(bad.failures) == 1
    assert bad.failures[0][0].cell.dim == 0
    assert corner_wall(2).support == RationalCone.ray((-1, -1))
    assert is_consistent(line_pair(2).add_walls([corner_wall(2)]))
    # the same function on the opposite ray does not fix it
    assert not is_consistent(line_pair(2).add_walls([corner_wall(2, (1, 0))]))


def test_commutator_corrected_is_consistent_at_order_8():
    d = line_pair(8)
    f = poly(C2, 2, 8, (1, (0, 0), (0, 0)), (1, (1, 1), (1, 1)))
    d = d.add_walls([Wall(RationalCone.ray((-1, -1)), f)])
    assert is_consistent(d, 8)


def test_joints_of_line_pair():
    (jt,) = joints(line_pair(2))
    assert jt.cell == RationalCone(2, [(1, 0), (0, 1)])


def test_equivalence_examples():
    d = single_wall(3)
    w = d.walls[0]
    split = d.with_walls([Wall(RationalCone(2, [(0, 1)], [(1, 0)]), w.function),
                          Wall(RationalCone(2, [(0, 1)], [(-1, 0)]), w.function)])
    assert equivalent(d, split)
    trivial = Wall(RationalCone.hyperplane((1, 0)), TruncatedSeries.one(d.context, 2, 3), (0, 1))
    assert equivalent(d, d.add_walls([trivial]))
    other = d.with_walls([Wall(RationalCone(2, [(0, 1)], [(1, 0)]), w.function),
                          Wall(RationalCone(2, [(0, 1)], [(-1, 0)]), int_pow(w.function, 2))])
    assert not equivalent(d, other)


def test_normalize_merges_split_walls():
    d = single_wall(3)
    w = d.walls[0]
    split = d.with_walls([Wall(RationalCone(2, [(0, 1)], [(1, 0)]), w.function),
                          Wall(RationalCone(2, [(0, 1)], [(-1, 0)]), w.function)])
    assert normalize(split).walls == d.walls


def test_cwall_view():
    # principal A2: wall ((e1,0)^perp, 1 + z^(v1,e1)) with p1(e1,0) = (v1, e1) in the support
    p1 = LatticeMap([[0, -1, -1, 0], [1, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]], 4)
    ctx = MonoidContext.free(1)
    f = poly(ctx, 4, 2, (1, (0, 0, 0, 0), (0,)), (1, (0, 1, 1, 0), (1,)))
    w = Wall(RationalCone.hyperplane((1, 0, 0, 0)), f)
    view = CWallView(w, (1, 0, 0, 0), p1)
    assert view.incoming == w.incoming == True
    with pytest.raises(DomainError):
        CWallView(w, (0, 1, 0, 0), p1)


def test_equivalent_rejects_different_monoids():
    with pytest.raises(ValueError):
        equivalent(single_wall(2), line_pair(2))


def test_exact_points():
    d = single_wall(2)
    assert d.support_contains((Fraction(7, 3), 0))
    assert not d.support_contains((Fraction(7, 3), Fraction(1, 10**9)))
