"""Draw the 4x4 blow-up good system of a random base path.

    python3 scripts/blowup_demo.py --dims 3 3 --seed 4
"""
import argparse

from pathsearch.blowup import audit_good_system, build_good_system
from pathsearch.graph import build_grid, gen_setting2

ARROWS = {(1, 0): ">", (-1, 0): "<", (0, 1): "v", (0, -1): "^"}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs=2, default=[3, 3])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    base = build_grid(args.dims)
    path = gen_setting2(base, 0, seed=args.seed)
    gs = build_good_system(base, path)
    spec = gs.bm.blown
    on_path = set(gs.instance.path)
    print("base path:", [base.grid.coord(v) for v in path.path])
    print("problems:", audit_good_system(base, path, gs) or "none")
    # arrows: the path; r/l/d/u: covering cycles; * marks the endpoint
    for y in range(spec.dims[1]):
        line = ""
        for x in range(spec.dims[0]):
            w = spec.index((x, y))
            nxt = gs.instance.succ[w]
            if nxt < 0:
                ch = "*"
            else:
                c = spec.coord(nxt)
                ch = ARROWS[(c[0] - x, c[1] - y)]
                if w not in on_path:
                    ch = {">": "r", "<": "l", "v": "d", "^": "u"}[ch]
            line += ch + (" | " if x % 4 == 3 and x + 1 < spec.dims[0] else " ")
        print(line)
        if y % 4 == 3 and y + 1 < spec.dims[1]:
            print("-" * len(line))


if __name__ == "__main__":
    main()
