"""Exact game values h_i^K on small graphs, as CSV."""
import argparse
import sys

from pathsearch.exact_game import results_csv, solve
from pathsearch.graph import Kind, Setting, build_grid, complete_graph, path_graph, pendant_clique, star_graph


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-path", type=int, default=8)
    args = ap.parse_args()

    graphs = [path_graph(n) for n in range(1, args.max_path + 1)]
    graphs += [star_graph(4), complete_graph(4), pendant_clique(4), build_grid((2, 3)), build_grid((2, 2))]
    rows = []
    for g in graphs:
        for setting in Setting:
            if g.n > (7 if setting is Setting.S1 else 8):
                continue
            for kind in Kind:
                rows.append((g.name, 0, setting.value, kind.value, solve(g, 0, setting, kind)))
    sys.stdout.write(results_csv(rows))


if __name__ == "__main__":
    main()
