"""Theta functions and a few structure constants for the A2 seed."""
import sys

from scatter import ThetaAlgebra, complete, initial_diagram
from scatter.cluster import Seed


def show(row):
    return " + ".join(f"({c.pretty()}) theta{m}" for m, c in row.items()) or "0"


def main(order=4):
    seed = Seed([[0, 1], [-1, 0]])
    d = complete(initial_diagram(seed, "hdtv_x", order)).output
    for w in d.walls:
        print(w.support, w.function.pretty())
    alg = ThetaAlgebra(d)
    print("base point", alg.base_point)
    for m in [(1, 0), (0, -1), (1, -1)]:
        print(f"theta{m} =", alg.theta(m).pretty())
    for m1, m2 in [((1, 0), (-1, 0)), ((0, 1), (0, -1)), ((1, 0), (0, -1))]:
        print(f"theta{m1} theta{m2} =", show(alg.row(m1, m2)))


if __name__ == "__main__":
    main(*map(int, sys.argv[1:]))
