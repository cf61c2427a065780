"""Scenario configs, batch runs and bound-comparison tables."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .graph import (
    Graph,
    Kind,
    Setting,
    binary_tree,
    build_grid,
    complete_graph,
    enumerate_instances,
    path_graph,
    pendant_clique,
    random_instance,
    random_tree,
    star_graph,
)
from .oracles import AdversaryOracle, TruthfulOracle, separator_certificate
from .searchers import SEARCHERS, applicable
from .separators import (
    DEFAULT_EXACT_CAP,
    GRID_EXACT_CAP,
    adversary_grid_bound,
    bisection_bound,
    grid_separator_lower_bound,
    s_alpha,
)

ORACLES = ("random", "adversary", "exhaustive")
FAMILIES = ("grid", "path", "tree", "binary_tree", "star", "complete", "pendant", "edges")


class UnsupportedScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    name: str
    family: str = "grid"
    size: list[int] = field(default_factory=lambda: [4, 4])
    setting: str = "S2"
    kind: str = "B"
    searcher: str = "bisection"
    oracle: str = "random"
    reps: int = 1
    seed: int | None = None
    source: int = 0
    enum_cap: int = 12
    edges: list[list[int]] | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise UnsupportedScenarioError(f"unknown scenario keys {sorted(extra)}")
        data = dict(data)
        if isinstance(data.get("size"), int):
            data["size"] = [data["size"]]
        return cls(**data)

    def graph(self) -> Graph:
        f, size = self.family, list(self.size)
        if f == "grid":
            return build_grid(size)
        if f == "path":
            return path_graph(size[0])
        if f == "tree":
            return random_tree(size[0], seed=self.seed or 0)
        if f == "binary_tree":
            return binary_tree(size[0])
        if f == "star":
            return star_graph(size[0])
        if f == "complete":
            return complete_graph(size[0])
        if f == "pendant":
            return pendant_clique(size[0])
        if f == "edges":
            return Graph.from_edges(size[0], [tuple(e) for e in self.edges or []], name=self.name)
        raise UnsupportedScenarioError(f"unknown graph family {f!r}")

    def check(self, g: Graph) -> None:
        if self.oracle not in ORACLES:
            raise UnsupportedScenarioError(f"unknown oracle {self.oracle!r}")
        if self.searcher not in SEARCHERS:
            raise UnsupportedScenarioError(f"unknown searcher {self.searcher!r}")
        Setting(self.setting), Kind(self.kind)
        if self.oracle == "adversary" and (self.setting != "S2" or self.kind != "B"):
            raise UnsupportedScenarioError("the adversary plays Setting 2 with Query B only")
        if self.oracle == "random" and self.seed is None:
            raise UnsupportedScenarioError(f"scenario {self.name}: random oracles need an explicit seed")
        if not applicable(self.searcher, g):
            raise UnsupportedScenarioError(f"searcher {self.searcher} does not apply to {g.name}")
        if not 0 <= self.source < g.n:
            raise UnsupportedScenarioError(f"source {self.source} outside the graph")


@dataclass
class RunRecord:
    scenario: str
    instance: str
    endpoint: int
    correct: bool
    queries: int
    extra_queries: int
    upper_name: str = ""
    upper: Fraction | None = None
    lower_name: str = ""
    lower: Fraction | None = None
    certificate: bool | None = None

    @property
    def upper_ok(self) -> bool:
        return self.upper is None or self.queries <= self.upper

    @property
    def lower_ok(self) -> bool:
        return self.lower is None or self.queries >= self.lower

    @property
    def ok(self) -> bool:
        return self.correct and self.upper_ok and self.lower_ok and self.certificate is not False

    def row(self) -> list:
        fmt = lambda x: "" if x is None else str(x)
        return [self.scenario, self.instance, self.endpoint, int(self.correct), self.queries,
                self.extra_queries, self.upper_name, fmt(self.upper), int(self.upper_ok),
                self.lower_name, fmt(self.lower), int(self.lower_ok), fmt(self.certificate)]


RECORD_HEADER = ["scenario", "instance", "endpoint", "correct", "queries", "extra_queries",
                 "upper_name", "upper", "upper_ok", "lower_name", "lower", "lower_ok", "certificate"]


def _cube(g: Graph) -> tuple[int, int] | None:
    if g.grid is None or len(set(g.grid.dims)) != 1:
        return None
    return g.grid.d, g.grid.dims[0]


def upper_bound(sc: Scenario, g: Graph) -> tuple[str, Fraction | None]:
    if sc.searcher == "bisection" and _cube(g):
        d, n = _cube(g)
        return "bisection", bisection_bound(d, n)
    if sc.searcher == "tree":
        return "log2", Fraction(math.ceil(math.log2(g.n)) if g.n > 1 else 0)
    if sc.searcher == "follow":
        return "vertices", Fraction(g.n)
    return "", None


def lower_bound(sc: Scenario, g: Graph) -> tuple[str, Fraction | None]:
    if sc.oracle != "adversary":
        return "", None
    cap = GRID_EXACT_CAP if g.grid is not None else DEFAULT_EXACT_CAP
    if g.n <= cap:
        return "s_half", Fraction(s_alpha(g, Fraction(1, 2)))
    if _cube(g):
        d, n = _cube(g)
        return "grid_weak", adversary_grid_bound(d, n)
    return "", None


def run(sc: Scenario, trace: bool = False, transcripts: Path | None = None) -> list[RunRecord]:
    """Play every game of a scenario; records come out in instance order."""
    g = sc.graph()
    sc.check(g)
    search = SEARCHERS[sc.searcher]
    setting, kind = Setting(sc.setting), Kind(sc.kind)
    ub_name, ub = upper_bound(sc, g)
    lb_name, lb = lower_bound(sc, g)
    games = []
    if sc.oracle == "adversary":
        games.append(("adversary", AdversaryOracle(g, sc.source)))
    elif sc.oracle == "exhaustive":
        for i, inst in enumerate(enumerate_instances(g, sc.source, setting, cap=sc.enum_cap)):
            games.append((f"enum{i}", TruthfulOracle(g, inst, kind)))
    else:
        for rep in range(sc.reps):
            seed = sc.seed + rep
            games.append((f"seed{seed}", TruthfulOracle(g, random_instance(g, sc.source, setting, seed), kind)))
    out = []
    for tag, oracle in games:
        res = search(g, oracle, trace=trace)
        cert = None
        if sc.oracle == "adversary":
            cert = separator_certificate(g, oracle.state.asked, res.endpoint, oracle.state, strict=False).ok
        out.append(RunRecord(sc.name, tag, res.endpoint, oracle.finish(res.endpoint), res.queries_used,
                             res.extra_queries, ub_name, ub, lb_name, lb, cert))
        if transcripts is not None:
            transcripts.mkdir(parents=True, exist_ok=True)
            (transcripts / f"{sc.name}-{tag}.jsonl").write_text(res.transcript.to_jsonl())
    return out


def records_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_HEADER)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def read_records(text: str) -> list[RunRecord]:
    out = []
    frac = lambda s: Fraction(s) if s else None
    for row in csv.DictReader(io.StringIO(text)):
        cert = {"": None, "True": True, "False": False}[row["certificate"]]
        out.append(RunRecord(row["scenario"], row["instance"], int(row["endpoint"]), row["correct"] == "1",
                             int(row["queries"]), int(row["extra_queries"]), row["upper_name"],
                             frac(row["upper"]), row["lower_name"], frac(row["lower"]), cert))
    return out


@dataclass
class SummaryRow:
    scenario: str
    runs: int
    min_queries: int
    max_queries: int
    mean_queries: float
    upper: Fraction | None
    lower: Fraction | None
    violations: int

    def row(self) -> list:
        fmt = lambda x: "" if x is None else str(x)
        return [self.scenario, self.runs, self.min_queries, self.max_queries, f"{self.mean_queries:.3f}",
                fmt(self.upper), fmt(self.lower), self.violations]


SUMMARY_HEADER = ["scenario", "runs", "min", "max", "mean", "upper", "lower", "violations"]


def report(records: Sequence[RunRecord]) -> list[SummaryRow]:
    if not records:
        raise ValueError("no records to report on")
    groups: dict[str, list[RunRecord]] = {}
    for r in records:
        groups.setdefault(r.scenario, []).append(r)
    out = []
    for name, rs in groups.items():
        q = [r.queries for r in rs]
        out.append(SummaryRow(name, len(rs), min(q), max(q), sum(q) / len(q), rs[0].upper, rs[0].lower,
                              sum(not r.ok for r in rs)))
    return out


def summary_csv(rows: Sequence[SummaryRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for r in rows:
        w.writerow(r.row())
    return buf.getvalue()


def default_suite() -> list[Scenario]:
    """Small reference suite: the examples every run should reproduce."""
    suite = [
        Scenario("grid8-s1-b-bisection", "grid", [8, 8], "S1", "B", "bisection", "random", 100, seed=0),
        Scenario("path8-s2-b-tree-adv", "path", [8], "S2", "B", "tree", "adversary"),
        Scenario("grid3-s2-b-separator-enum", "grid", [3, 3], "S2", "B", "separator", "exhaustive"),
    ]
    for n in (4, 8, 16):
        suite.append(Scenario(f"grid{n}-s2-b-bisection", "grid", [n, n], "S2", "B", "bisection", "random", 100, seed=0))
        suite.append(Scenario(f"grid{n}-s2-b-bisection-adv", "grid", [n, n], "S2", "B", "bisection", "adversary"))
    return suite


def load_config(path: str | Path) -> list[Scenario]:
    data = json.loads(Path(path).read_text())
    items = data.get("scenarios", [data]) if isinstance(data, dict) else data
    return [Scenario.from_dict(d) for d in items]


def with_overrides(suite: Sequence[Scenario], **overrides) -> list[Scenario]:
    changes = {k: v for k, v in overrides.items() if v is not None}
    return [replace(sc, **changes) for sc in suite]


def grid_constant_table(dims: Sequence[tuple[int, int]]) -> list[dict]:
    """Both constants for the adversary bound on G_d(n): separator-based and weak."""
    return [
        {"d": d, "n": n, "separator_half": str(grid_separator_lower_bound(d, n, Fraction(1, 2))),
         "weak": str(adversary_grid_bound(d, n))}
        for d, n in dims
    ]


def scenario_name(sc: Scenario) -> str:
    size = "x".join(map(str, sc.size))
    return f"{sc.family}{size}-{sc.setting.lower()}-{sc.kind.lower()}-{sc.searcher}-{sc.oracle}"


def scenario_json(sc: Scenario) -> str:
    return json.dumps(asdict(sc), sort_keys=True)

