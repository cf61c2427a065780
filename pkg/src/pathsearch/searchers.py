"""Searchers: separator-driven search (generic, grid bisection, trees) and
the follow-the-path baseline."""
from __future__ import annotations

import json
import sys
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .graph import (
    Graph,
    Instance,
    Kind,
    Setting,
    TooManyInstancesError,
    enumerate_instances,
)
from .oracles import (
    Answer,
    AnswerB,
    Transcript,
    is_consistent,
    is_off_path,
    out_arc,
    reveals_endpoint,
)
from .separators import (
    NotATreeError,
    as_fraction,
    bounding_box,
    box_size,
    centroid,
    median_slice,
    min_alpha_separator_exact,
)

OUTSIDE = -1
EXACT_FILTER_LIMIT = 20_000
EXACT_FILTER_MAX_VERTICES = 16


class MissingAnswerError(ValueError):
    pass


class ProviderContractError(RuntimeError):
    pass


class LocalizationError(RuntimeError):
    """The answers admit no part for the endpoint: the oracle contradicted itself."""


@dataclass
class Location:
    status: str  # "located", "identified" or "ambiguous"
    part: int | None = None
    vertex: int | None = None
    candidates: tuple[int, ...] = ()
    unresolved: tuple[int, ...] = ()


@dataclass
class SearchResult:
    endpoint: int
    queries_used: int
    transcript: Transcript
    extra_queries: int = 0
    ambiguous_rounds: int = 0
    rounds: list[dict] = field(default_factory=list)


# -- localisation -----------------------------------------------------------------

@lru_cache(maxsize=64)
def _tree_parents(g: Graph, s: int) -> dict[int, int] | None:
    # on a tree every on-path vertex is entered from its neighbour towards s
    if not g.is_tree():
        return None
    parent = {s: -1}
    order = [s]
    for u in order:
        for w in g.adj[u]:
            if w not in parent:
                parent[w] = u
                order.append(w)
    return parent


def locate_component(g: Graph, answers: dict[int, Answer], parts: list[frozenset[int]], s: int,
                     setting: Setting, kind: Kind, instances: Sequence[Instance] | None = None) -> Location:
    """Which part holds the endpoint, given answers on every vertex bordering the parts.

    Arrivals into a part minus departures from it, plus one if the path starts
    there, is 1 exactly for the endpoint's part. Query B reveals both arc
    directions so the count is always decisive. Query A only reveals
    out-arcs: the predecessor of an asked vertex is known when an asked
    neighbour points to it or when its unasked neighbours all lie in one part;
    otherwise the part stays open, and with ``instances`` the candidates are
    further filtered by full consistency. On a tree the predecessor is always
    the neighbour towards s.
    """
    setting, kind = Setting(setting), Kind(kind)
    for v, a in answers.items():
        if reveals_endpoint(v, a, s):
            return Location("identified", vertex=v)
    label = {}
    for i, p in enumerate(parts):
        for v in p:
            label[v] = i
    for p in parts:
        for v in p:
            for w in g.adj[v]:
                if w not in label and w not in answers:
                    raise MissingAnswerError(f"vertex {w} borders a part but was not asked")
    parents = _tree_parents(g, s)
    k = len(parts)
    arrivals = [0] * k
    known_dep = [0] * k
    open_dep = [0] * k
    unresolved = []
    pred_known = set()
    for c, a in answers.items():
        o = out_arc(c, a)
        if o is not None:
            if o[1] in label:
                arrivals[label[o[1]]] += 1
            elif o[1] in answers:
                pred_known.add(o[1])
    for c, a in answers.items():
        if c == s or (setting is Setting.S2 and is_off_path(c, a, s)):
            continue
        if isinstance(a, AnswerB):
            inc = a.incoming(c)
            if inc and inc[0][0] in label:
                known_dep[label[inc[0][0]]] += 1
            continue
        if c in pred_known:
            continue
        if parents is not None:
            p = parents[c]
            if p in label:
                known_dep[label[p]] += 1
            continue
        sides = {label.get(w, OUTSIDE) for w in g.adj[c] if w not in answers}
        if not sides:
            raise LocalizationError(f"asked vertex {c} has no possible predecessor")
        if len(sides) == 1:
            side = sides.pop()
            if side != OUTSIDE:
                known_dep[side] += 1
        else:
            unresolved.append(c)
            for side in sides:
                if side != OUTSIDE:
                    open_dep[side] += 1
    cands = []
    for i, p in enumerate(parts):
        base = arrivals[i] + (1 if s in p else 0) - known_dep[i]
        if base - open_dep[i] <= 1 <= base:
            cands.append(i)
    if instances is not None and len(cands) > 1:
        ends = {inst.endpoint for inst in instances if is_consistent(inst, answers, kind)}
        cands = [i for i in cands if ends & parts[i]]
    if not cands:
        raise LocalizationError("no part can contain the endpoint")
    if len(cands) == 1:
        return Location("located", part=cands[0], candidates=tuple(cands))
    return Location("ambiguous", candidates=tuple(cands), unresolved=tuple(sorted(unresolved)))


# -- cut providers -------------------------------------------------------------------

class CentroidProvider:
    name = "centroid"

    def __call__(self, g: Graph, region: frozenset[int], rnd: int) -> set[int]:
        return {centroid(g, region)}

    def capacity(self, g: Graph, region: frozenset[int], alpha: Fraction) -> Fraction:
        return alpha * len(region)


class ExactProvider:
    """Minimum alpha-separator of the region's induced subgraph (small regions only)."""

    name = "exact"

    def __init__(self, alpha=Fraction(1, 2)):
        self.alpha = as_fraction(alpha)

    def __call__(self, g: Graph, region: frozenset[int], rnd: int) -> set[int]:
        sub, old = g.subgraph(region)
        res = min_alpha_separator_exact(sub, self.alpha, cap=max(sub.n, 1))
        return {old[v] for v in res.cut} or {old[0]}

    def capacity(self, g: Graph, region: frozenset[int], alpha: Fraction) -> Fraction:
        return alpha * len(region)


class HyperplaneProvider:
    """Lower-median slice of the region's bounding box, axes taken in rotation."""

    name = "hyperplane"

    def __init__(self):
        self.last_axis = -1

    def __call__(self, g: Graph, region: frozenset[int], rnd: int) -> set[int]:
        spec = g.grid
        box = bounding_box(spec, region)
        for step in range(1, spec.d + 1):
            axis = (self.last_axis + step) % spec.d
            lo, hi = box[axis]
            if hi - lo >= 2:
                break
        else:
            return {min(region)}
        self.last_axis = axis
        at = median_slice(box, axis)
        return {v for v in region if spec.coord(v)[axis] == at}

    def capacity(self, g: Graph, region: frozenset[int], alpha: Fraction) -> Fraction:
        return alpha * box_size(bounding_box(g.grid, region))


# -- the search engine ---------------------------------------------------------------

@lru_cache(maxsize=64)
def _filter_instances(g: Graph, s: int, setting: Setting) -> tuple[Instance, ...] | None:
    if g.n > EXACT_FILTER_MAX_VERTICES:
        return None
    try:
        return tuple(enumerate_instances(g, s, setting, cap=None, limit=EXACT_FILTER_LIMIT))
    except TooManyInstancesError:
        return None


class _Game:
    def __init__(self, g: Graph, oracle, trace: bool = False):
        self.g = g
        self.oracle = oracle
        self.s = oracle.source
        self.kind = Kind(oracle.kind)
        self.setting = Setting(oracle.setting)
        self.answers: dict[int, Answer] = {}
        self.found: int | None = None
        self.extra = 0
        self.ambiguous_rounds = 0
        self.rounds: list[dict] = []
        self.trace = trace

    def ask(self, v: int) -> bool:
        if v in self.answers:
            return self.found is not None
        a = self.oracle.ask(v)
        self.answers[v] = a
        if reveals_endpoint(v, a, self.s):
            self.found = v
        return self.found is not None

    def instances(self) -> tuple[Instance, ...] | None:
        return _filter_instances(self.g, self.s, self.setting)

    def result(self, endpoint: int) -> SearchResult:
        return SearchResult(endpoint, len(self.oracle.transcript), self.oracle.transcript,
                            self.extra, self.ambiguous_rounds, self.rounds)

    def emit(self, rec: dict) -> None:
        self.rounds.append(rec)
        if self.trace:
            print(json.dumps(rec), file=sys.stderr)

    def localise(self, region: frozenset[int]) -> frozenset[int] | None:
        """Shrink ``region`` to the part holding the endpoint; None once identified."""
        flagged = False
        while True:
            parts = self.g.components(v for v in region if v not in self.answers)
            insts = None
            if self.kind is Kind.A:
                insts = self.instances()
            loc = locate_component(self.g, self.answers, parts, self.s, self.setting, self.kind, insts)
            if loc.status == "identified":
                self.found = loc.vertex
                return None
            if loc.status == "located":
                return parts[loc.part]
            if not flagged:
                self.ambiguous_rounds += 1
                flagged = True
            if not loc.unresolved:
                raise LocalizationError("ambiguous localisation with nothing left to resolve")
            c = loc.unresolved[0]
            cand = set().union(*(parts[i] for i in loc.candidates))
            options = [w for w in self.g.adj[c] if w not in self.answers]
            options.sort(key=lambda w: (w not in cand, w))
            self.extra += 1
            if self.ask(options[0]):
                return None


def separator_search(g: Graph, oracle, provider=None, alpha=Fraction(1, 2), trace: bool = False) -> SearchResult:
    """Repeatedly ask a whole alpha-separator of the current candidate part.

    Localisation always uses every answer so far against the whole graph, so
    the cumulative asked set is what separates the candidate part.
    """
    alpha = as_fraction(alpha)
    provider = provider if provider is not None else ExactProvider(alpha)
    game = _Game(g, oracle, trace)
    s = game.s
    region = next(c for c in g.components() if s in c)
    rnd = 0
    while True:
        if game.found is not None:
            return game.result(game.found)
        if len(region) == 1:
            (t,) = region
            return game.result(t)
        cut = set(provider(g, region, rnd))
        if not cut or not cut <= region:
            raise ProviderContractError(f"cut {sorted(cut)} is empty or leaves the region")
        cap = provider.capacity(g, region, alpha) if hasattr(provider, "capacity") else alpha * len(region)
        pieces = g.components(region - cut)
        if any(len(p) > cap for p in pieces):
            raise ProviderContractError(f"cut leaves a part larger than {cap}")
        for v in sorted(cut):
            if game.ask(v):
                break
        rec = {"round": rnd, "region": len(region), "cut": sorted(cut)}
        if game.found is None:
            extra_before = game.extra
            new_region = game.localise(region)
            rec["extra"] = game.extra - extra_before
            if new_region is not None:
                if len(new_region) >= len(region):
                    raise ProviderContractError("candidate part did not shrink")
                region = new_region
                rec["located"] = len(region)
        if game.found is not None:
            rec["identified"] = game.found
        game.emit(rec)
        rnd += 1


def grid_bisection_search(g: Graph, oracle, trace: bool = False) -> SearchResult:
    if g.grid is None:
        raise ValueError("grid bisection needs a grid host")
    return separator_search(g, oracle, HyperplaneProvider(), Fraction(1, 2), trace)


def tree_search(g: Graph, oracle, trace: bool = False) -> SearchResult:
    if not g.is_tree():
        raise NotATreeError(f"{g.name or 'graph'} is not a tree")
    return separator_search(g, oracle, CentroidProvider(), Fraction(1, 2), trace)


def follow_path(g: Graph, oracle, trace: bool = False) -> SearchResult:
    """Ask the source, then each revealed successor, until the endpoint shows up."""
    game = _Game(g, oracle, trace)
    v = game.s
    while True:
        if game.ask(v):
            return game.result(v)
        o = out_arc(v, game.answers[v])
        if o is None:
            raise LocalizationError(f"vertex {v} on the path reported no successor")
        v = o[1]


def exact_separator_search(g: Graph, oracle, trace: bool = False) -> SearchResult:
    return separator_search(g, oracle, ExactProvider(Fraction(1, 2)), Fraction(1, 2), trace)


def centroid_search(g: Graph, oracle, trace: bool = False) -> SearchResult:
    return separator_search(g, oracle, CentroidProvider(), Fraction(1, 2), trace)


SEARCHERS: dict[str, Callable] = {
    "follow": follow_path,
    "bisection": grid_bisection_search,
    "tree": tree_search,
    "separator": exact_separator_search,
}


def applicable(name: str, g: Graph) -> bool:
    if name == "bisection":
        return g.grid is not None
    if name == "tree":
        return g.is_tree()
    if name == "separator":
        return g.n <= 20
    return True
