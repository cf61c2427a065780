"""Worst-case hyperplane-bisection query counts next to the target bound
and the actual cut-size sum.

    python3 scripts/bisection_table.py --seeds 100 --out bisection.csv
"""
import argparse
import csv
import sys

from pathsearch.graph import Kind, Setting, build_grid, random_instance
from pathsearch.oracles import AdversaryOracle, TruthfulOracle
from pathsearch.searchers import grid_bisection_search
from pathsearch.separators import bisection_bound, bisection_cut_sum

GRIDS = [(2, 4), (2, 8), (2, 16), (2, 32), (3, 4), (3, 8)]


def worst(g, setting, kind, seeds):
    most = extra = 0
    for seed in range(seeds):
        res = grid_bisection_search(g, TruthfulOracle(g, random_instance(g, 0, setting, seed), kind))
        most = max(most, res.queries_used)
        extra = max(extra, res.extra_queries)
    return most, extra


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--out", help="CSV path (stdout if omitted)")
    args = ap.parse_args()

    rows = []
    for d, n in GRIDS:
        g = build_grid((n,) * d)
        adv = AdversaryOracle(g, 0)
        adv_q = grid_bisection_search(g, adv).queries_used
        row = {"d": d, "n": n, "target": float(bisection_bound(d, n)), "cut_sum": float(bisection_cut_sum(d, n)),
               "adversary": adv_q}
        for setting in Setting:
            for kind in Kind:
                q, extra = worst(g, setting, kind, args.seeds)
                row[f"{setting.value}{kind.value}"] = q
                row[f"{setting.value}{kind.value}_extra"] = extra
        rows.append(row)
        print(f"G_{d}({n}): target {row['target']:.2f}, cut sum {row['cut_sum']:.2f}, "
              f"adversary {adv_q}, worst S2/B {row['S2B']}, worst S1/A {row['S1A']}", file=sys.stderr)

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
