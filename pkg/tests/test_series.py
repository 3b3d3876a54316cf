from fractions import Fraction

import pytest

from scatter.errors import DomainError, NotInvertibleError
from scatter.lattice import LatticeMap
from scatter.series import (MonoidContext, TruncatedSeries, exp_log, format_rational, int_pow, mul,
                            parse_rational, remap_exponents)

from conftest import poly

C1 = MonoidContext.free(1)
C2 = MonoidContext.free(2)
V = (1, 0)


def one_plus(ctx, order, m=V, q=(1,), c=1):
    return poly(ctx, len(m), order, (1, (0,) * len(m), ctx.zero()), (c, m, q))


def test_difference_of_squares():
    got = mul(one_plus(C1, 2), one_plus(C1, 2, c=-1))
    assert got == poly(C1, 2, 2, (1, (0, 0), (0,)), (-1, (2, 0), (2,)))


def test_unit():
    f = one_plus(C1, 3)
    assert mul(f, TruncatedSeries.one(C1, 2, 3)) == f


def test_four_term_expansion():
    a = one_plus(C2, 2, (1, 0), (1, 0))
    b = one_plus(C2, 2, (0, 1), (0, 1))
    expected = poly(C2, 2, 2, (1, (0, 0), (0, 0)), (1, (1, 0), (1, 0)), (1, (0, 1), (0, 1)),
                    (1, (1, 1), (1, 1)))
    assert mul(a, b) == expected


def test_order_is_min():
    assert mul(one_plus(C1, 2), one_plus(C1, 5)).order == 2


def test_geometric_inverse():
    got = int_pow(one_plus(C1, 2), -1)
    assert got == poly(C1, 2, 2, (1, (0, 0), (0,)), (-1, (1, 0), (1,)), (1, (2, 0), (2,)))


def test_zeroth_and_second_power():
    f = one_plus(C1, 2)
    assert int_pow(f, 0).is_one()
    assert int_pow(f, 2) == poly(C1, 2, 2, (1, (0, 0), (0,)), (2, (1, 0), (1,)), (1, (2, 0), (2,)))


def test_negative_power_needs_unit():
    f = poly(C1, 2, 2, (2, (0, 0), (0,)), (1, V, (1,)))
    int_pow(f, -1)  # constant 2 is a unit over the rationals
    g = poly(C1, 2, 2, (1, V, (0,)), (1, (0, 0), (1,)))
    with pytest.raises(NotInvertibleError):
        int_pow(g, -1)


def test_exp_zero_and_mercator():
    assert exp_log(TruncatedSeries.zero(C1, 2, 3), "exp").is_one()
    got = exp_log(one_plus(C1, 3), "log")
    assert got == poly(C1, 2, 3, (1, (1, 0), (1,)), (Fraction(-1, 2), (2, 0), (2,)),
                       (Fraction(1, 3), (3, 0), (3,)))


def test_exp_log_round_trip():
    f = poly(C2, 2, 4, (1, (0, 0), (0, 0)), (1, (1, 0), (1, 0)), (1, (0, 1), (0, 1)))
    assert exp_log(exp_log(f, "log"), "exp") == f


def test_exp_log_domain():
    with pytest.raises(DomainError):
        exp_log(TruncatedSeries.one(C1, 2, 3), "exp")
    with pytest.raises(DomainError):
        exp_log(TruncatedSeries.zero(C1, 2, 3), "log")


def test_remap_principal_split():
    # 1 + z^((0,1),(1,0)) over M+N becomes 1 + t1 z^(0,1)
    ctx0 = MonoidContext([])
    f = poly(ctx0, 4, 3, (1, (0, 0, 0, 0), ()), (1, (0, 1, 1, 0), ()))
    proj = LatticeMap([[1, 0, 0, 0], [0, 1, 0, 0]])
    got = remap_exponents(f, proj, lambda q, m: (m[2],), context=C1)
    assert got == poly(C1, 2, 3, (1, (0, 0), (0,)), (1, (0, 1), (1,)))


def test_remap_identity():
    f = one_plus(C2, 3, (1, 0), (1, 0))
    assert remap_exponents(f, LatticeMap.identity(2), LatticeMap.identity(2)) == f


def test_remap_merges_variables():
    c4 = MonoidContext(["t1_1", "t1_2"])
    f = mul(one_plus(c4, 3, V, (1, 0)), one_plus(c4, 3, V, (0, 1)))
    got = remap_exponents(f, None, LatticeMap([[1, 1]]), context=C1)
    assert got == poly(C1, 2, 3, (1, (0, 0), (0,)), (2, V, (1,)), (1, (2, 0), (2,)))


def test_truncation_drops_high_degree():
    f = poly(C1, 2, 1, (1, (0, 0), (0,)), (1, V, (1,)), (1, (2, 0), (2,)))
    assert f.terms() == [((0,), (0, 0), 1), ((1,), V, 1)]


def test_weighted_degree():
    ctx = MonoidContext(["a", "b"], [1, 3])
    assert ctx.degree((1, 1)) == 4
    f = poly(ctx, 1, 3, (1, (0,), (0, 0)), (1, (1,), (0, 1)), (1, (2,), (1, 1)))
    assert len(f) == 2


def test_rational_format():
    assert format_rational(Fraction(6, 4)) == "3/2"
    assert format_rational(Fraction(-4, 2)) == "-2"
    assert parse_rational("-3/6") == Fraction(-1, 2)
    with pytest.raises(DomainError):
        parse_rational(0.5)


def test_json_round_trip():
    f = int_pow(one_plus(C2, 4, (1, 1), (1, 1), Fraction(-2, 3)), 3)
    assert TruncatedSeries.from_json(C2, 2, 4, f.to_json()) == f
