"""Command-line entry point: ``python3 -m pathsearch <command>``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import experiments as ex
from .graph import Graph, GridSpec, Instance, Kind, Setting, build_grid, gen_setting2
from .oracles import AdversaryOracle, Transcript, TruthfulOracle, replay
from .separators import (
    centroid_separator,
    hyperplane_separator,
    min_alpha_separator_exact,
)

OUT_ENV = "PATHSEARCH_OUT"


def default_out() -> Path:
    return Path(os.environ.get(OUT_ENV, "results"))


def _graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", default="grid", choices=ex.FAMILIES)
    p.add_argument("--size", type=int, nargs="+", default=[4, 4],
                   help="grid side lengths, or the vertex count for other families")
    p.add_argument("--edges", help="JSON list of [u, v] pairs for --family edges")
    p.add_argument("--seed", type=int, default=0, help="seed for random tree shapes")


def _graph(args) -> Graph:
    edges = json.loads(args.edges) if args.edges else None
    return ex.Scenario("cli", args.family, args.size, seed=args.seed, edges=edges).graph()


def cmd_run(args) -> int:
    if args.config:
        suite = ex.load_config(args.config)
    elif args.family or args.size:
        suite = [ex.Scenario("cli", seed=0)]
    else:
        suite = ex.default_suite()
    suite = ex.with_overrides(
        suite, family=args.family, size=args.size, setting=args.setting, kind=args.kind,
        searcher=args.searcher, oracle=args.oracle, reps=args.reps, seed=args.seed, source=args.source,
    )
    suite = [ex.replace(sc, name=ex.scenario_name(sc)) if sc.name == "cli" else sc for sc in suite]
    out = Path(args.out) if args.out else default_out()
    out.mkdir(parents=True, exist_ok=True)
    records = []
    for sc in suite:
        records += ex.run(sc, trace=args.trace, transcripts=out / "transcripts" if args.transcripts else None)
    summary = ex.report(records)
    (out / "runs.csv").write_text(ex.records_csv(records))
    (out / "summary.csv").write_text(ex.summary_csv(summary))
    sys.stdout.write(ex.summary_csv(summary))
    return 1 if any(not r.ok for r in records) else 0


def cmd_report(args) -> int:
    records = []
    for path in args.runs:
        records += ex.read_records(Path(path).read_text())
    summary = ex.report(records)
    sys.stdout.write(ex.summary_csv(summary))
    return 1 if any(r.violations for r in summary) else 0


def cmd_verify(args) -> int:
    from .acceptance import run_all

    failed = 0
    for v in run_all(args.only):
        print(v.line())
        if args.verbose or not v.passed:
            for d in v.details:
                print(f"    {d}")
        failed += not v.passed
    return 1 if failed else 0


def cmd_solve(args) -> int:
    from .exact_game import results_csv, solve, verify_relations

    g = _graph(args)
    if args.relations:
        rep = verify_relations(g, args.source)
        for key, gv in rep.values.items():
            print(f"h_{key[1]}^{key[2]} = {gv.value}{' (no instances)' if gv.vacuous else ''}")
        print(f"s_1/2 = {rep.separator}")
        print(f"A >= B in setting 1: {rep.setting1_ok}; in setting 2: {rep.setting2_ok}; "
              f"h_2^B >= s_1/2: {rep.separator_ok}")
        return 0 if rep.ok else 1
    settings = [Setting(args.setting)] if args.setting else list(Setting)
    kinds = [Kind(args.kind)] if args.kind else list(Kind)
    rows = [(g.name, args.source, st.value, k.value, solve(g, args.source, st, k)) for st in settings for k in kinds]
    sys.stdout.write(results_csv(rows))
    return 0


def cmd_separator(args) -> int:
    g = _graph(args)
    if args.method == "exact":
        res = min_alpha_separator_exact(g, Fraction(args.alpha))
    elif args.method == "hyperplane":
        res = hyperplane_separator(g, axis=args.axis)
    else:
        res = centroid_separator(g)
    print(json.dumps(res.to_json()))
    return 0


def cmd_blowup(args) -> int:
    from .blowup import audit_good_system, build_good_system, dump_good_system, simulate_reduction
    from .searchers import grid_bisection_search

    base = build_grid(args.dims)
    if args.action == "build":
        path = gen_setting2(base, 0, seed=args.seed)
        gs = build_good_system(base, path)
        problems = audit_good_system(base, path, gs)
        out = Path(args.out) if args.out else default_out()
        out.mkdir(parents=True, exist_ok=True)
        stem = "blowup-" + "x".join(map(str, args.dims)) + f"-seed{args.seed}"
        inst_json, sidecar = dump_good_system(gs)
        (out / f"{stem}.json").write_text(inst_json)
        (out / f"{stem}.blocks.json").write_text(sidecar)
        print(f"base path {list(path.path)} -> blocks {gs.block_order}; problems: {len(problems)}")
        for p in problems:
            print(f"    {p}")
        return 1 if problems else 0
    if args.oracle == "adversary":
        oracle = AdversaryOracle(base, 0)
    else:
        oracle = TruthfulOracle(base, gen_setting2(base, 0, seed=args.seed), Kind.B)
    r = simulate_reduction(base, oracle, grid_bisection_search)
    print(f"base endpoint {r.base_endpoint}, base queries {r.base_queries}, blown queries {r.blown_queries}, "
          f"replay mismatches {len(r.mismatches)}")
    return 0 if r.ok and oracle.finish(r.base_endpoint) else 1


def _load_instance(path: Path) -> tuple[Graph | None, Instance]:
    data = json.loads(path.read_text())
    if "graph" in data:
        return Graph.from_json(data["graph"]), Instance.from_json(data["instance"])
    if "dims" in data:
        return build_grid(GridSpec(tuple(data["dims"]))), Instance.from_json(data["instance"])
    return None, Instance.from_json(data)


def cmd_replay(args) -> int:
    _, inst = _load_instance(Path(args.instance))
    tr = Transcript.from_jsonl(Path(args.transcript).read_text())
    problems = replay(inst, tr)
    print(f"{len(tr)} entries, {len(problems)} mismatches")
    for p in problems:
        print(f"    {p}")
    return 1 if problems else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pathsearch", description="Hidden-path endpoint search experiments.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="play scenarios and write runs.csv and summary.csv")
    p.add_argument("--config", help="JSON file with a scenario or {'scenarios': [...]}")
    p.add_argument("--family", choices=ex.FAMILIES)
    p.add_argument("--size", type=int, nargs="+")
    p.add_argument("--setting", choices=["S1", "S2"])
    p.add_argument("--kind", choices=["A", "B"])
    p.add_argument("--searcher", choices=sorted(ex.SEARCHERS))
    p.add_argument("--oracle", choices=ex.ORACLES)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--source", type=int)
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./results)")
    p.add_argument("--trace", action="store_true", help="per-round JSON lines on stderr")
    p.add_argument("--transcripts", action="store_true", help="write one JSONL transcript per game")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("report", help="summarise runs.csv files")
    p.add_argument("runs", nargs="+")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--only", type=int, nargs="+", help="criterion numbers")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("solve", help="exact game values on a tiny graph")
    _graph_args(p)
    p.add_argument("--source", type=int, default=0)
    p.add_argument("--setting", choices=["S1", "S2"])
    p.add_argument("--kind", choices=["A", "B"])
    p.add_argument("--relations", action="store_true", help="check A >= B and h_2^B >= s_1/2")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("separator", help="compute a separator")
    _graph_args(p)
    p.add_argument("--method", choices=["exact", "hyperplane", "centroid"], default="exact")
    p.add_argument("--alpha", default="1/2")
    p.add_argument("--axis", type=int, default=0)
    p.set_defaults(fn=cmd_separator)

    p = sub.add_parser("blowup", help="build or verify the 4x4 blow-up reduction")
    p.add_argument("action", choices=["build", "verify"])
    p.add_argument("--dims", type=int, nargs="+", default=[2, 2])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle", choices=["random", "adversary"], default="random")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_blowup)

    p = sub.add_parser("replay", help="check a transcript against an instance")
    p.add_argument("transcript")
    p.add_argument("instance", help="instance JSON (plain, with graph, or a blow-up export)")
    p.set_defaults(fn=cmd_replay)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)
