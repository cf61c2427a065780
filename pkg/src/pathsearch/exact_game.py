"""Exact worst-case query counts on tiny graphs by memoised minimax.

A knowledge state is the set of instances consistent with the answers so
far, stored as a bitmask over the enumerated instances. The state is
terminal once every consistent instance has the same endpoint: identifying
the endpoint is enough, it need not be asked.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import Graph, Instance, Kind, Setting, SizeGuardError, enumerate_instances
from .oracles import answer
from .searchers import SearchResult
from .separators import s_alpha

SOLVE_CAPS = {Setting.S2: 8, Setting.S1: 7}


@dataclass(frozen=True)
class GameValue:
    value: int
    first_query: int | None
    instances: int = 0

    @property
    def vacuous(self) -> bool:
        return self.instances == 0


class Game:
    """Minimax over consistent-instance sets for one (graph, source, setting, kind)."""

    def __init__(self, g: Graph, s: int, setting: Setting, kind: Kind, cap: int | None = None):
        setting, kind = Setting(setting), Kind(kind)
        cap = SOLVE_CAPS[setting] if cap is None else cap
        if g.n > cap:
            raise SizeGuardError(f"{g.n} vertices exceeds the game solver cap {cap}")
        self.g, self.s, self.setting, self.kind = g, s, setting, kind
        self.instances: list[Instance] = enumerate_instances(g, s, setting, cap=None)
        self.full = (1 << len(self.instances)) - 1
        ends = {}
        for i, inst in enumerate(self.instances):
            ends[inst.endpoint] = ends.get(inst.endpoint, 0) | (1 << i)
        self.by_endpoint = ends
        # classes[q]: bitmasks of instances grouped by their answer at q
        self.classes: list[list[int]] = []
        for q in range(g.n):
            groups: dict = {}
            for i, inst in enumerate(self.instances):
                a = answer(inst, q, kind)
                groups[a] = groups.get(a, 0) | (1 << i)
            self.classes.append(list(groups.values()))
        self.memo: dict[int, tuple[int, int | None]] = {}

    def terminal(self, mask: int) -> bool:
        return any(mask & ~m == 0 for m in self.by_endpoint.values())

    def _splits(self, mask: int) -> list[tuple[int, list[int]]]:
        out = []
        for q in range(self.g.n):
            parts = [mask & c for c in self.classes[q] if mask & c]
            if len(parts) > 1:
                out.append((max(p.bit_count() for p in parts), q, parts))
        out.sort()
        return [(q, parts) for _, q, parts in out]

    def value(self, mask: int) -> tuple[int, int | None]:
        """(value, best first query) of the state ``mask``."""
        if mask in self.memo:
            return self.memo[mask]
        if self.terminal(mask):
            self.memo[mask] = (0, None)
            return 0, None
        best, best_q = None, None
        for q, parts in self._splits(mask):
            worst = 0
            for p in parts:
                worst = max(worst, 1 + self.value(p)[0])
                if best is not None and worst >= best:
                    break
            if best is None or worst < best:
                best, best_q = worst, q
                if best == 1:
                    break
        if best is None:
            raise RuntimeError("non-terminal state with no informative query")
        self.memo[mask] = (best, best_q)
        return best, best_q

    def solve(self) -> GameValue:
        if not self.instances:
            return GameValue(0, None, 0)
        v, q = self.value(self.full)
        return GameValue(v, q, len(self.instances))

    def restrict(self, mask: int, q: int, ans) -> int:
        keep = 0
        for i, inst in enumerate(self.instances):
            if mask >> i & 1 and answer(inst, q, self.kind) == ans:
                keep |= 1 << i
        return keep


def solve(g: Graph, s: int, setting: Setting, kind: Kind, cap: int | None = None) -> GameValue:
    return Game(g, s, setting, kind, cap).solve()


class OptimalSearcher:
    """Plays the solver's strategy; build once per (graph, source, setting, kind)."""

    def __init__(self, game: Game):
        self.game = game
        game.solve()

    def __call__(self, g: Graph, oracle, trace: bool = False) -> SearchResult:
        game = self.game
        mask = game.full
        while not game.terminal(mask):
            _, q = game.value(mask)
            mask = game.restrict(mask, q, oracle.ask(q))
            if not mask:
                raise RuntimeError("oracle answers contradict every instance")
        i = (mask & -mask).bit_length() - 1
        t = game.instances[i].endpoint
        return SearchResult(t, len(oracle.transcript), oracle.transcript)


@dataclass
class RelationReport:
    graph: str
    source: int
    values: dict[str, GameValue] = field(default_factory=dict)
    separator: int = 0

    def h(self, setting: str, kind: str) -> int:
        return self.values[f"{setting}{kind}"].value

    @property
    def setting1_ok(self) -> bool:
        return self.h("S1", "A") >= self.h("S1", "B")

    @property
    def setting2_ok(self) -> bool:
        return self.h("S2", "A") >= self.h("S2", "B")

    @property
    def separator_ok(self) -> bool:
        return self.h("S2", "B") >= self.separator

    @property
    def ok(self) -> bool:
        return self.setting1_ok and self.setting2_ok and self.separator_ok


def verify_relations(g: Graph, s: int = 0) -> RelationReport:
    rep = RelationReport(g.name, s)
    for setting in Setting:
        for kind in Kind:
            rep.values[f"{setting.value}{kind.value}"] = solve(g, s, setting, kind)
    rep.separator = s_alpha(g, Fraction(1, 2)) if g.is_connected() else 0
    return rep


def results_csv(rows: list[tuple[str, int, str, str, GameValue]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["graph", "source", "setting", "kind", "value", "first_query", "instances"])
    for name, s, setting, kind, gv in rows:
        w.writerow([name, s, setting, kind, gv.value, "" if gv.first_query is None else gv.first_query, gv.instances])
    return buf.getvalue()
