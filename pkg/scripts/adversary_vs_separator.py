"""Queries the adversary extracts from each searcher, against s_1/2(G).

Also prints the grid lower-bound constants: the one the minimum
1/2-separator size gives, (1/2) n^(d-1)/d, and the weaker n^(d-1)/(3d).
"""
import argparse
from fractions import Fraction

from pathsearch.experiments import grid_constant_table
from pathsearch.graph import binary_tree, build_grid, path_graph, random_tree, star_graph
from pathsearch.oracles import AdversaryOracle
from pathsearch.searchers import SEARCHERS, applicable
from pathsearch.separators import s_alpha


def hosts():
    for n in (8, 16, 20):
        yield path_graph(n)
    yield star_graph(10)
    yield binary_tree(15)
    yield random_tree(20, seed=1)
    for dims in [(3, 3), (4, 4), (3, 5), (2, 2, 2)]:
        yield build_grid(dims)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grids", type=int, nargs="*", default=[4, 8, 16, 32])
    args = ap.parse_args()

    print(f"{'graph':<14}{'s_1/2':>6}  " + "  ".join(f"{k:>9}" for k in SEARCHERS))
    for g in hosts():
        sep = s_alpha(g, Fraction(1, 2))
        cells = []
        for name, search in SEARCHERS.items():
            if not applicable(name, g):
                cells.append(f"{'-':>9}")
                continue
            adv = AdversaryOracle(g, 0)
            q = search(g, adv).queries_used
            cells.append(f"{q:>9}")
        print(f"{g.name:<14}{sep:>6}  " + "  ".join(cells))

    print("\nd  n   separator       weak")
    for row in grid_constant_table([(2, n) for n in args.grids] + [(3, 4), (3, 8)]):
        print(f"{row['d']}  {row['n']:<3} {row['separator_half']:>9}  {row['weak']:>9}")


if __name__ == "__main__":
    main()
