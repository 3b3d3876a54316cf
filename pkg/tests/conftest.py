import pytest

from scatter.cluster import Seed
from scatter.diagram import ScatteringDiagram, Wall
from scatter.lattice import RationalCone
from scatter.series import MonoidContext, TruncatedSeries


def poly(ctx, rank, order, *terms):
    """Series from ``(coeff, m, q)`` triples."""
    return TruncatedSeries.from_terms(ctx, rank, order, terms)


def binomial_wall(ctx, normal, m, q, order, coeff=1, ineqs=()):
    rank = len(normal)
    f = poly(ctx, rank, order, (1, (0,) * rank, ctx.zero()), (coeff, m, q))
    return Wall(RationalCone(rank, [normal], ineqs), f)


def line_pair(order):
    """The two-line diagram with ``1 + t1 z^(1,0)`` on the x-axis and ``1 + t2 z^(0,1)`` on the y-axis."""
    ctx = MonoidContext.free(2)
    return ScatteringDiagram(2, ctx, order, [
        binomial_wall(ctx, (0, 1), (1, 0), (1, 0), order),
        binomial_wall(ctx, (1, 0), (0, 1), (0, 1), order),
    ])


def single_wall(order):
    ctx = MonoidContext.free(1)
    return ScatteringDiagram(2, ctx, order, [binomial_wall(ctx, (0, 1), (1, 0), (1,), order)])


@pytest.fixture
def ctx2():
    return MonoidContext.free(2)


@pytest.fixture
def a2():
    return Seed([[0, 1], [-1, 0]])


@pytest.fixture
def kronecker():
    return Seed([[0, 2], [-2, 0]])


@pytest.fixture
def central3():
    return Seed([[0, 1, 0], [-1, 0, 0], [0, 0, 0]], [0, 1])


# criterion number -> (passed, seconds, note); filled by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, secs, note = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({secs:.2f} s) {note}")
