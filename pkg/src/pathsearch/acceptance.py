"""The acceptance suite: one function per criterion, each returning a verdict
with enough detail to see what failed."""
from __future__ import annotations

import contextlib
import io
import json
import math
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from .blowup import audit_good_system, build_good_system, simulate_reduction
from .exact_game import Game, solve, verify_relations
from .graph import (
    Graph,
    Kind,
    Setting,
    binary_tree,
    build_grid,
    complete_graph,
    enumerate_instances,
    gen_setting2,
    path_graph,
    pendant_clique,
    random_instance,
    random_tree,
    star_graph,
)
from .oracles import (
    AdversaryOracle,
    TruthfulOracle,
    consistency_witness,
    greedy_all_targets,
    separator_certificate,
)
from .searchers import (
    SEARCHERS,
    CentroidProvider,
    HyperplaneProvider,
    applicable,
    grid_bisection_search,
    separator_search,
)
from .separators import (
    anisotropic_grid_bound,
    bisection_bound,
    grid_separator_lower_bound,
    min_alpha_separator_exact,
    s_alpha,
)

HALF = Fraction(1, 2)
BISECTION_GRIDS = [(4, 4), (8, 8), (16, 16), (32, 32), (4, 4, 4), (8, 8, 8)]
SEEDED_RUNS = 100
BISECTION_SECONDS = 60


@dataclass
class Verdict:
    number: int
    title: str
    passed: bool
    details: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.title} ({self.seconds:.1f}s)"


def _timed(number: int, title: str):
    def wrap(fn: Callable[[], tuple[bool, list[str]]]):
        def run() -> Verdict:
            t0 = time.perf_counter()
            ok, details = fn()
            return Verdict(number, title, ok, details, time.perf_counter() - t0)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def _grid_sweep(search) -> tuple[list[str], int]:
    """Seeded games in both settings and kinds plus the adversary on every grid."""
    details, failures = [], 0
    for dims in BISECTION_GRIDS:
        g = build_grid(dims)
        d, n = len(dims), dims[0]
        bound = bisection_bound(d, n)
        for setting in Setting:
            insts = [random_instance(g, 0, setting, seed) for seed in range(SEEDED_RUNS)]
            for kind in Kind:
                worst, wrong = 0, 0
                for inst in insts:
                    res = search(g, TruthfulOracle(g, inst, kind))
                    worst = max(worst, res.queries_used)
                    wrong += res.endpoint != inst.endpoint
                bad = wrong or worst > bound
                failures += bool(bad)
                details.append(f"G_{d}({n}) {setting.value}/{kind.value}: worst {worst} vs bound {float(bound):.2f}"
                               f"{'' if not wrong else f', {wrong} wrong endpoints'}{' FAIL' if bad else ''}")
        adv = AdversaryOracle(g, 0)
        res = search(g, adv)
        bad = not adv.finish(res.endpoint) or res.queries_used > bound
        failures += bool(bad)
        details.append(f"G_{d}({n}) adversary: {res.queries_used} vs bound {float(bound):.2f}{' FAIL' if bad else ''}")
    return details, failures


@_timed(1, "grid bisection stays within (2 + 1/(2^d - 1)) n^(d-1)")
def criterion_1() -> tuple[bool, list[str]]:
    t0 = time.perf_counter()
    details, failures = _grid_sweep(grid_bisection_search)
    elapsed = time.perf_counter() - t0
    slow = elapsed > BISECTION_SECONDS
    details.append(f"runtime {elapsed:.1f}s (limit {BISECTION_SECONDS}s){' FAIL' if slow else ''}")
    return failures == 0 and not slow, details


def _tree_hosts() -> Iterator[Graph]:
    for n in range(2, 65):
        yield path_graph(n)
        yield random_tree(n, seed=n)
        yield binary_tree(n)
        yield star_graph(n - 1)


@_timed(2, "separator search: log2|V| on trees, bisection bound on grids")
def criterion_2() -> tuple[bool, list[str]]:
    details, failures = [], 0
    centroid = lambda g, o: separator_search(g, o, CentroidProvider(), HALF)
    for g in _tree_hosts():
        bound = math.ceil(math.log2(g.n))
        worst = 0
        for setting in Setting:
            insts = enumerate_instances(g, 0, setting, cap=None, limit=5000)
            for kind in Kind:
                for inst in insts:
                    res = centroid(g, TruthfulOracle(g, inst, kind))
                    worst = max(worst, res.queries_used)
                    failures += res.endpoint != inst.endpoint
        adv = AdversaryOracle(g, 0)
        res = centroid(g, adv)
        worst = max(worst, res.queries_used)
        failures += not adv.finish(res.endpoint)
        if worst > bound:
            failures += 1
            details.append(f"{g.name}: worst {worst} > {bound}")
    details.append(f"trees with 2..64 vertices: {failures} failures")
    hyper = lambda g, o: separator_search(g, o, HyperplaneProvider(), HALF)
    grid_details, grid_failures = _grid_sweep(hyper)
    details += grid_details
    return failures + grid_failures == 0, details


def _small_hosts() -> Iterator[Graph]:
    for n in range(1, 21):
        yield path_graph(n)
    for n in range(2, 21):
        yield random_tree(n, seed=n)
    for n in (7, 15, 20):
        yield binary_tree(n)
    for k in (3, 6, 19):
        yield star_graph(k)
    yield build_grid((3, 3))
    yield build_grid((4, 4))


@_timed(3, "adversary forces at least s_1/2(G) queries and a 1/2-separator")
def criterion_3() -> tuple[bool, list[str]]:
    details, failures, games = [], 0, 0
    for g in _small_hosts():
        need = s_alpha(g, HALF)
        for name, search in SEARCHERS.items():
            if not applicable(name, g):
                continue
            adv = AdversaryOracle(g, 0)
            res = search(g, adv)
            games += 1
            cert = separator_certificate(g, adv.state.asked, res.endpoint, adv.state, strict=False)
            honest = True
            if g.n <= 12:
                try:
                    consistency_witness(g, 0, Setting.S2, adv.transcript)
                except Exception:
                    honest = False
            if res.queries_used < need or not cert.ok or not adv.finish(res.endpoint) or not honest:
                failures += 1
                details.append(f"{g.name}/{name}: {res.queries_used} queries, s_1/2 = {need}, "
                               f"separator {cert.ok}, resolved {adv.finish(res.endpoint)}, honest {honest}")
    details.append(f"{games} adversary games, {failures} failures")
    return failures == 0, details


@_timed(4, "exact separators respect (1 - a) n^(d-1)/d and the anisotropic bound")
def criterion_4() -> tuple[bool, list[str]]:
    details, ok = [], True
    for n in (3, 4, 5):
        g = build_grid((n, n))
        for alpha in (HALF, Fraction(2, 3)):
            got = min_alpha_separator_exact(g, alpha).size
            bound = grid_separator_lower_bound(2, n, alpha)
            ok &= got >= bound
            details.append(f"G_2({n}) alpha={alpha}: s = {got} >= {bound}: {got >= bound}")
    for n in (4, 8):
        g = build_grid((n // 4, n))
        for alpha in (HALF, Fraction(2, 3)):
            got = min_alpha_separator_exact(g, alpha).size
            bound = anisotropic_grid_bound(2, n, alpha)
            ok &= got >= bound
            details.append(f"{n // 4}x{n} alpha={alpha}: s = {got} >= {bound}: {got >= bound}")
    return ok, details


def _nondecreasing(length: int, lo: int, hi: int, budget: int) -> Iterator[tuple[int, ...]]:
    if length == 0:
        yield ()
        return
    for x in range(lo, min(hi, budget) + 1):
        for rest in _nondecreasing(length - 1, x, hi, budget - x):
            yield (x,) + rest


def subset_inputs(max_total: int) -> Iterator[list[tuple[int, ...]]]:
    """Every admissible row list with N <= max_total, up to the unread entries.

    The greedy never reads the last entry of a row other than the final one,
    and N does not depend on it, so it is pinned to the smallest legal value.
    Rows are built from the back, each bounded by the mass after it.
    """
    def extend(rows, tail):
        yield rows
        budget = max_total - tail
        for m in range(2, budget + 2):
            for head in _nondecreasing(m - 1, 1, tail, budget):
                yield from extend([head + (head[-1],)] + rows, tail + sum(head))

    for m in range(2, max_total + 1):
        yield from extend([(1,) * m], m)


@_timed(5, "greedy exact subset hits every target z <= N for N <= 14")
def criterion_5() -> tuple[bool, list[str]]:
    inputs = targets = bad = 0
    for rows in subset_inputs(14):
        inputs += 1
        for z, chosen in enumerate(greedy_all_targets(rows)):
            targets += 1
            if sum(rows[i][j] for i, j in chosen) != z or len(set(chosen)) != len(chosen):
                bad += 1
    return bad == 0, [f"{inputs} inputs, {targets} targets, {bad} misses"]


def _base_paths(g: Graph, count: int) -> Iterator:
    for seed in range(count):
        yield gen_setting2(g, 0, seed=seed)


@_timed(6, "good systems mirror the base path and the reduction is consistent")
def criterion_6() -> tuple[bool, list[str]]:
    details, failures = [], 0
    for dims in [(2, 2), (3, 3), (4, 4), (2, 2, 2)]:
        g = build_grid(dims)
        bad = 0
        for path in _base_paths(g, 50):
            bad += bool(audit_good_system(g, path, build_good_system(g, path)))
        failures += bad
        details.append(f"base {dims}: {bad} of 50 good systems rejected")
    g = build_grid((2, 2))
    oracles = [TruthfulOracle(g, inst, Kind.B) for inst in enumerate_instances(g, 0, Setting.S2)]
    oracles += [TruthfulOracle(g, p, Kind.B) for p in _base_paths(g, 50)]
    oracles.append(AdversaryOracle(g, 0))
    bad = 0
    for o in oracles:
        r = simulate_reduction(g, o, grid_bisection_search)
        bad += not (r.ok and o.finish(r.base_endpoint))
    failures += bad
    details.append(f"{len(oracles)} reductions on the 8x8 blow-up of 2x2: {bad} failures")
    return failures == 0, details


def _orbit_representatives(G: nx.Graph) -> list[int]:
    low = {v: v for v in G}
    for m in GraphMatcher(G, G).isomorphisms_iter():
        for v in G:
            low[v] = min(low[v], m[v])
    return sorted(set(low.values()))


def small_connected_graphs(max_n: int = 6) -> Iterator[Graph]:
    for i, G in enumerate(nx.graph_atlas_g()):
        if 0 < G.number_of_nodes() <= max_n and nx.is_connected(G):
            yield Graph.from_edges(G.number_of_nodes(), list(G.edges()), name=f"atlas{i}"), G


def _game_hosts() -> Iterator[Graph]:
    for n in range(1, 8):
        yield path_graph(n)
    yield star_graph(3)
    yield binary_tree(7)
    yield build_grid((2, 2))
    yield build_grid((2, 3))
    yield complete_graph(4)
    yield pendant_clique(4)


@_timed(7, "exact game values: paths, pendant clique, A >= B, searchers >= optimum")
def criterion_7() -> tuple[bool, list[str]]:
    details, ok = [], True
    for n in (2, 4, 8):
        v = solve(path_graph(n), 0, Setting.S2, Kind.B).value
        ok &= v == math.ceil(math.log2(n))
        details.append(f"h_2^B(path {n}) = {v}, expected {math.ceil(math.log2(n))}")
    pend = pendant_clique(4)
    v = solve(pend, 0, Setting.S1, Kind.B).value
    ok &= v == 0
    details.append(f"pendant clique, Setting 1: h = {v}")
    pairs = bad = 0
    for g, G in small_connected_graphs(6):
        for s in _orbit_representatives(G):
            pairs += 1
            rep = verify_relations(g, s)
            if not rep.ok:
                bad += 1
                details.append(f"{g.name} s={s}: {rep.values} separator {rep.separator}")
    ok &= bad == 0
    details.append(f"{pairs} graph/source pairs, {bad} relation failures")
    worse = 0
    for g in _game_hosts():
        for setting in Setting:
            for kind in Kind:
                game = Game(g, 0, setting, kind)
                if not game.instances:
                    continue
                value = game.solve().value
                for name, search in SEARCHERS.items():
                    if not applicable(name, g):
                        continue
                    worst = max(search(g, TruthfulOracle(g, inst, kind)).queries_used for inst in game.instances)
                    if worst < value:
                        worse += 1
                        details.append(f"{g.name} {setting.value}/{kind.value} {name}: worst {worst} < {value}")
    ok &= worse == 0
    details.append(f"searcher worst cases below the optimum: {worse}")
    return ok, details


DETERMINISM_SCENARIOS = [
    {"name": "grid8-s1-b", "family": "grid", "size": [8, 8], "setting": "S1", "kind": "B",
     "searcher": "bisection", "oracle": "random", "reps": 20, "seed": 7},
    {"name": "tree40-s2-a", "family": "tree", "size": [40], "setting": "S2", "kind": "A",
     "searcher": "tree", "oracle": "random", "reps": 20, "seed": 3},
    {"name": "grid4-adv", "family": "grid", "size": [4, 4], "setting": "S2", "kind": "B",
     "searcher": "bisection", "oracle": "adversary"},
]


@_timed(8, "identical seeds give byte-identical CSV output")
def criterion_8() -> tuple[bool, list[str]]:
    from .cli import main

    outs = []
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "scenarios.json"
        cfg.write_text(json.dumps({"scenarios": DETERMINISM_SCENARIOS}))
        for k in range(2):
            out = Path(tmp) / f"run{k}"
            with contextlib.redirect_stdout(io.StringIO()):
                main(["run", "--config", str(cfg), "--out", str(out)])
            outs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
    same = outs[0] == outs[1] and bool(outs[0])
    return same, [f"files compared: {sorted(outs[0])}", f"identical: {same}"]


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


def run_all(only: list[int] | None = None) -> list[Verdict]:
    return [c() for i, c in enumerate(CRITERIA, 1) if not only or i in only]
