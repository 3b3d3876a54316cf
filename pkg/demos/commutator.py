"""Complete the two-line diagram and look at what was added."""
from scatter import complete, is_consistent
from scatter.diagram import ScatteringDiagram, Wall
from scatter.lattice import RationalCone
from scatter.series import MonoidContext, TruncatedSeries

ORDER = 8


def binomial(ctx, m, q):
    return TruncatedSeries.from_terms(ctx, 2, ORDER, [(1, (0, 0), (0, 0)), (1, m, q)])


def main():
    ctx = MonoidContext.free(2)
    d = ScatteringDiagram(2, ctx, ORDER, [
        Wall(RationalCone.hyperplane((0, 1)), binomial(ctx, (1, 0), (1, 0))),
        Wall(RationalCone.hyperplane((1, 0)), binomial(ctx, (0, 1), (0, 1))),
    ])
    print("consistent before:", bool(is_consistent(d)))
    rep = complete(d)
    for w in rep.added_walls:
        print("added on ray", w.support.rays[0], ":", w.function.pretty())
    print("consistent after:", bool(is_consistent(rep.output)))


if __name__ == "__main__":
    main()
