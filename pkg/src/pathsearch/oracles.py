"""Query answering: truthful oracles, the endpoint-maximising adversary, and
the bookkeeping used to certify that an adversary game really forced a
1/2-separator."""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .graph import (
    Graph,
    Instance,
    Kind,
    Setting,
    SizeGuardError,
    TooManyInstancesError,
    enumerate_instances,
    validate_instance,
)

Arc = tuple[int, int]

EXACT_ADVERSARY_LIMIT = 50_000


class InconsistentStateError(RuntimeError):
    """No answer is consistent with the transcript; the adversary lied earlier."""


class NoWitnessError(RuntimeError):
    pass


class SubsetHypothesisError(ValueError):
    pass


class CertificateFailure(AssertionError):
    pass


@dataclass(frozen=True)
class Query:
    vertex: int
    kind: Kind = Kind.B


@dataclass(frozen=True)
class AnswerA:
    status: str  # "endpoint", "arc" or "off"
    arc: Arc | None = None

    def to_json(self) -> dict:
        out = {"kind": "A", "status": self.status}
        if self.arc is not None:
            out["arc"] = list(self.arc)
        return out


@dataclass(frozen=True)
class AnswerB:
    arcs: tuple[Arc, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(sorted(tuple(a) for a in self.arcs)))

    def incoming(self, v: int) -> list[Arc]:
        return [a for a in self.arcs if a[1] == v]

    def outgoing(self, v: int) -> list[Arc]:
        return [a for a in self.arcs if a[0] == v]

    def to_json(self) -> dict:
        return {"kind": "B", "arcs": [list(a) for a in self.arcs]}


Answer = Union[AnswerA, AnswerB]

FOUND = AnswerA("endpoint")
OFF = AnswerA("off")


def answer_from_json(data: dict) -> Answer:
    if data["kind"] == "A":
        arc = tuple(data["arc"]) if data.get("arc") is not None else None
        return AnswerA(data["status"], arc)
    return AnswerB(tuple(tuple(a) for a in data["arcs"]))


def answer(inst: Instance, q: Query | int, kind: Kind | None = None) -> Answer:
    """Truthful reply of ``inst`` to a query."""
    if isinstance(q, Query):
        v, kind = q.vertex, q.kind
    else:
        v = q
    kind = Kind(kind or Kind.B)
    if kind is Kind.A:
        if v == inst.endpoint:
            return FOUND
        w = inst.succ[v]
        if w != -1:
            return AnswerA("arc", (v, w))
        return OFF
    arcs = []
    if inst.pred[v] != -1:
        arcs.append((inst.pred[v], v))
    if inst.succ[v] != -1:
        arcs.append((v, inst.succ[v]))
    return AnswerB(tuple(arcs))


def reveals_endpoint(v: int, ans: Answer, source: int) -> bool:
    """Whether this single answer proves ``v`` is the endpoint."""
    if isinstance(ans, AnswerA):
        return ans.status == "endpoint"
    if not ans.arcs:
        return v == source
    return not ans.outgoing(v)


def is_off_path(v: int, ans: Answer, source: int) -> bool:
    if isinstance(ans, AnswerA):
        return ans.status == "off"
    return not ans.arcs and v != source


def out_arc(v: int, ans: Answer) -> Arc | None:
    if isinstance(ans, AnswerA):
        return ans.arc
    out = ans.outgoing(v)
    return out[0] if out else None


# -- transcripts -------------------------------------------------------------

@dataclass
class Transcript:
    setting: Setting
    kind: Kind
    source: int
    graph: str = ""
    entries: list[tuple[int, Answer]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def append(self, v: int, ans: Answer) -> None:
        self.entries.append((v, ans))

    def answers(self) -> dict[int, Answer]:
        return dict(self.entries)

    def asked(self) -> list[int]:
        return [v for v, _ in self.entries]

    def to_jsonl(self) -> str:
        head = {"setting": self.setting.value, "kind": self.kind.value, "source": self.source, "graph": self.graph}
        lines = [json.dumps({"header": head})]
        lines += [json.dumps({"vertex": v, **a.to_json()}) for v, a in self.entries]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "Transcript":
        lines = [json.loads(x) for x in text.splitlines() if x.strip()]
        head = lines[0]["header"]
        tr = cls(Setting(head["setting"]), Kind(head["kind"]), head["source"], head.get("graph", ""))
        for rec in lines[1:]:
            tr.append(rec["vertex"], answer_from_json(rec))
        return tr


def replay(inst: Instance, transcript: Transcript) -> list[str]:
    """Mismatches between a transcript and the answers ``inst`` would give."""
    out = []
    for i, (v, ans) in enumerate(transcript.entries):
        truth = answer(inst, v, transcript.kind)
        if truth != ans:
            out.append(f"entry {i}: vertex {v} recorded {ans}, instance gives {truth}")
    return out


def is_consistent(inst: Instance, answers: dict[int, Answer], kind: Kind) -> bool:
    return all(answer(inst, v, kind) == a for v, a in answers.items())


class TruthfulOracle:
    def __init__(self, graph: Graph, instance: Instance, kind: Kind):
        self.graph = graph
        self.instance = instance
        self.kind = Kind(kind)
        self.setting = instance.setting
        self.source = instance.source
        self.transcript = Transcript(self.setting, self.kind, self.source, graph.name)

    def ask(self, v: int) -> Answer:
        ans = answer(self.instance, v, self.kind)
        self.transcript.append(v, ans)
        return ans

    def finish(self, endpoint: int) -> bool:
        return endpoint == self.instance.endpoint


# -- adversary -----------------------------------------------------------------

@dataclass
class SplitRecord:
    """One step where the candidate set shrank: the pieces it fell into."""

    query: int
    kept: frozenset[int]
    removed: list[frozenset[int]]

    @property
    def sizes(self) -> list[int]:
        return sorted([len(p) for p in self.removed] + [len(self.kept)])


@dataclass
class AdversaryState:
    candidates: frozenset[int]
    denied: set[int] = field(default_factory=set)
    committed: set[Arc] = field(default_factory=set)
    splits: list[SplitRecord] = field(default_factory=list)
    asked: list[int] = field(default_factory=list)
    answers: dict[int, AnswerB] = field(default_factory=dict)
    asked_at_resolution: list[int] | None = None
    backend: str = "exact"
    # exact backend
    instances: list[Instance] | None = None
    consistent: list[int] | None = None
    # structural backend
    region: frozenset[int] | None = None
    entry: int | None = None
    prefix: list[int] = field(default_factory=list)

    @property
    def cut_sizes(self) -> list[list[int]]:
        return [r.sizes for r in self.splits]


def _pieces(g: Graph, removed: Iterable[int], q: int) -> list[frozenset[int]]:
    removed = set(removed)
    out = []
    if q in removed:
        out.append(frozenset([q]))
        removed.discard(q)
    out.extend(g.components(removed))
    return out


def new_adversary_state(g: Graph, s: int, backend: str = "auto", limit: int = EXACT_ADVERSARY_LIMIT) -> AdversaryState:
    """Fresh Setting-2 / Query-B adversary.

    ``exact`` tracks the full set of consistent instances; ``structural``
    tracks a connected candidate region entered along a committed prefix and
    works on any size of graph.
    """
    if backend in ("auto", "exact"):
        try:
            insts = enumerate_instances(g, s, Setting.S2, cap=None, limit=limit)
        except TooManyInstancesError:
            if backend == "exact":
                raise
        else:
            return AdversaryState(
                candidates=frozenset(i.endpoint for i in insts), backend="exact",
                instances=insts, consistent=list(range(len(insts))),
            )
    comp = next(c for c in g.components() if s in c)
    return AdversaryState(candidates=comp, backend="structural", region=comp, entry=s)


def _answer_order(q: int, s: int, ans: AnswerB, size: int):
    off = not ans.arcs and q != s
    return (-size, 0 if off else 1, ans.arcs)


def adversary_answer(state: AdversaryState, g: Graph, s: int, setting: Setting, q: int) -> tuple[AnswerB, AdversaryState]:
    """Answer ``q`` so that the set of possible endpoints stays largest.

    Ties prefer "not on the path", then the lexicographically smallest arc
    set; revealing the endpoint only happens when nothing else is consistent.
    """
    if Setting(setting) is not Setting.S2:
        raise ValueError("the adversary is defined for Setting 2 only")
    if q in state.answers:
        return state.answers[q], state
    before = state.candidates
    if state.backend == "exact":
        ans = _exact_answer(state, g, s, q)
    else:
        ans = _structural_answer(state, g, s, q)
    state.asked.append(q)
    state.answers[q] = ans
    if is_off_path(q, ans, s):
        state.denied.add(q)
    state.committed.update(ans.arcs)
    if state.candidates != before:
        removed = before - state.candidates
        state.splits.append(SplitRecord(q, state.candidates, _pieces(g, removed, q)))
    if len(state.candidates) == 1 and state.asked_at_resolution is None:
        state.asked_at_resolution = list(state.asked)
    return ans, state


def _exact_answer(state: AdversaryState, g: Graph, s: int, q: int) -> AnswerB:
    classes: dict[AnswerB, list[int]] = {}
    for i in state.consistent:
        classes.setdefault(answer(state.instances[i], q, Kind.B), []).append(i)
    if not classes:
        raise InconsistentStateError("no instance is consistent with the transcript")
    scored = []
    for ans, members in classes.items():
        ends = {state.instances[i].endpoint for i in members}
        scored.append((reveals_endpoint(q, ans, s), _answer_order(q, s, ans, len(ends)), ans, members, ends))
    pool = [x for x in scored if not x[0]] or scored
    _, _, ans, members, ends = min(pool, key=lambda x: x[1])
    state.consistent = members
    state.candidates = frozenset(ends)
    return ans


def _bfs_path(g: Graph, inside: frozenset[int] | set[int], a: int, b: int) -> list[int]:
    parent = {a: -1}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if u == b:
            break
        for w in g.adj[u]:
            if w in inside and w not in parent:
                parent[w] = u
                queue.append(w)
    if b not in parent:
        raise InconsistentStateError(f"no route from {a} to {b} inside the region")
    out = [b]
    while out[-1] != a:
        out.append(parent[out[-1]])
    return out[::-1]


def _structural_answer(state: AdversaryState, g: Graph, s: int, q: int) -> AnswerB:
    region, entry, prefix = state.region, state.entry, state.prefix
    if q not in region:
        if q in prefix:
            i = prefix.index(q)
            nxt = prefix[i + 1] if i + 1 < len(prefix) else entry
            arcs = [(q, nxt)] + ([(prefix[i - 1], q)] if i > 0 else [])
            return AnswerB(tuple(arcs))
        return AnswerB(())
    comps = g.components(region - {q})
    into = [(prefix[-1], q)] if (q == entry and prefix) else []
    if q == entry:
        if not comps:
            return AnswerB(tuple(into))
        best = max(comps, key=lambda c: (len(c), -min(c)))
        b = min(w for w in g.adj[q] if w in best)
        state.prefix = prefix + [q]
        state.region, state.entry = best, b
        state.candidates = best
        return AnswerB(tuple(into + [(q, b)]))
    home = next(c for c in comps if entry in c)
    others = [c for c in comps if c is not home]
    if not others or len(home) >= max(len(c) for c in others):
        state.region = home
        state.candidates = home
        return AnswerB(())
    best = max(others, key=lambda c: (len(c), -min(c)))
    a = min(w for w in g.adj[q] if w in home)
    b = min(w for w in g.adj[q] if w in best)
    route = _bfs_path(g, home, entry, a)
    state.prefix = prefix + route + [q]
    state.region, state.entry = best, b
    state.candidates = best
    return AnswerB(((a, q), (q, b)))


def adversary_witness(state: AdversaryState, g: Graph, s: int, endpoint: int | None = None) -> Instance:
    """A Setting-2 instance reproducing every answer the adversary gave."""
    if endpoint is None:
        endpoint = min(state.candidates)
    if endpoint not in state.candidates:
        raise NoWitnessError(f"{endpoint} is not a possible endpoint")
    if state.backend == "exact":
        for i in state.consistent:
            if state.instances[i].endpoint == endpoint:
                return state.instances[i]
        raise NoWitnessError("no consistent instance ends there")
    path = state.prefix + _bfs_path(g, state.region, state.entry, endpoint)
    return Instance.from_path(g.n, Setting.S2, path)


class AdversaryOracle:
    kind = Kind.B
    setting = Setting.S2

    def __init__(self, graph: Graph, source: int, backend: str = "auto"):
        self.graph = graph
        self.source = source
        self.state = new_adversary_state(graph, source, backend)
        self.transcript = Transcript(Setting.S2, Kind.B, source, graph.name)

    def ask(self, v: int) -> AnswerB:
        ans, _ = adversary_answer(self.state, self.graph, self.source, Setting.S2, v)
        self.transcript.append(v, ans)
        return ans

    def finish(self, endpoint: int) -> bool:
        """True iff the claimed endpoint is the only one still possible."""
        return self.state.candidates == frozenset([endpoint])

    def witness(self, endpoint: int | None = None) -> Instance:
        return adversary_witness(self.state, self.graph, self.source, endpoint)


# -- witnesses -----------------------------------------------------------------

def consistency_witness(g: Graph, s: int, setting: Setting, transcript: Transcript,
                        cap: int | None = 12, hint: Instance | None = None,
                        budget: int = 200_000) -> Instance:
    """Find a valid instance that reproduces every entry of ``transcript``.

    A supplied ``hint`` is checked first. Otherwise small graphs are searched
    exhaustively, and Setting-2 transcripts on larger graphs by a constrained
    path search limited to ``budget`` expansions.
    """
    setting = Setting(setting)
    if hint is not None and not validate_instance(g, hint) and hint.source == s and not replay(hint, transcript):
        return hint
    answers = transcript.answers()
    if cap is None or g.n <= cap:
        for inst in enumerate_instances(g, s, setting, cap=None):
            if is_consistent(inst, answers, transcript.kind):
                return inst
        raise NoWitnessError("no instance is consistent with the transcript")
    if setting is not Setting.S2:
        raise SizeGuardError("Setting-1 witnesses are only searched on small graphs")
    path = _constrained_path(g, s, answers, transcript.kind, budget)
    inst = Instance.from_path(g.n, Setting.S2, path)
    if replay(inst, transcript):
        raise NoWitnessError("constrained search produced an inconsistent path")
    return inst


def _constrained_path(g: Graph, s: int, answers: dict[int, Answer], kind: Kind, budget: int) -> list[int]:
    on_required = {v for v, a in answers.items() if not is_off_path(v, a, s)}
    banned = {v for v, a in answers.items() if is_off_path(v, a, s)}
    forced_next = {}
    forced_prev = {}
    must_end = set()
    for v, a in answers.items():
        if v in banned:
            continue
        o = out_arc(v, a)
        if o is not None:
            forced_next[v] = o[1]
        else:
            must_end.add(v)
        if isinstance(a, AnswerB):
            inc = a.incoming(v)
            if inc:
                forced_prev[v] = inc[0][0]
            elif v != s:
                raise NoWitnessError(f"on-path vertex {v} reported without an in-arc")
    path = [s]
    on = {s}
    steps = 0

    def can_stop(v):
        if v in forced_next:
            return False
        return on_required <= on

    def options(v):
        if v in forced_next:
            return [forced_next[v]]
        if v in must_end:
            return []
        return list(g.adj[v])

    stack = [iter(options(s))]
    if can_stop(s):
        return path
    while stack:
        steps += 1
        if steps > budget:
            raise NoWitnessError("witness search budget exhausted")
        for w in stack[-1]:
            if w in on or w in banned:
                continue
            if w in forced_prev and forced_prev[w] != path[-1]:
                continue
            if w in answers and w not in forced_prev and w != s:
                continue
            path.append(w)
            on.add(w)
            if can_stop(w):
                return path
            stack.append(iter(options(w)))
            break
        else:
            stack.pop()
            on.discard(path.pop())
    raise NoWitnessError("no consistent path exists")


# -- the greedy exact-subset procedure ------------------------------------------

def check_subset_hypotheses(rows: Sequence[Sequence[int]], z: int) -> int:
    """Validate the greedy subset hypotheses and return N."""
    if not rows:
        raise SubsetHypothesisError("need at least one row")
    ys = []
    for i, row in enumerate(rows):
        if len(row) < 2:
            raise SubsetHypothesisError(f"row {i} has fewer than two entries")
        if any(x < 1 or int(x) != x for x in row):
            raise SubsetHypothesisError(f"row {i} has a non-positive or non-integer entry")
        if any(a > b for a, b in zip(row, row[1:])):
            raise SubsetHypothesisError(f"row {i} is not sorted")
        ys.append(sum(row[:-1]))
    if rows[-1][-1] != 1:
        raise SubsetHypothesisError("the last entry of the last row must be 1")
    ys.append(1)
    tail = 0
    tails = []
    for y in reversed(ys):
        tail += y
        tails.append(tail)
    tails = tails[::-1]  # tails[i] = y_i + ... + y_{l+1}
    for i, row in enumerate(rows):
        bound = tails[i + 1]
        if any(x > bound for x in row):
            raise SubsetHypothesisError(f"row {i} has an entry above the later mass {bound}")
    n_total = tails[0]
    if not 0 <= z <= n_total:
        raise SubsetHypothesisError(f"z={z} outside [0, {n_total}]")
    return n_total


def greedy_exact_subset(rows: Sequence[Sequence[int]], z: int) -> list[tuple[int, int]]:
    """Indices ``(i, j)`` of entries summing exactly to ``z``.

    Scans each row except its last entry, in order, taking an entry whenever
    the running sum stays at most ``z``; the final entry of the last row is
    the last candidate.
    """
    check_subset_hypotheses(rows, z)
    return _greedy_scan(rows, z)


def greedy_all_targets(rows: Sequence[Sequence[int]]) -> list[list[tuple[int, int]]]:
    """The greedy subset for every target 0..N, checking the hypotheses once."""
    n_total = check_subset_hypotheses(rows, 0)
    return [_greedy_scan(rows, z) for z in range(n_total + 1)]


def _greedy_scan(rows: Sequence[Sequence[int]], z: int) -> list[tuple[int, int]]:
    chosen = []
    total = 0
    for i, row in enumerate(rows):
        for j in range(len(row) - 1):
            x = row[j]
            if total + x <= z:
                chosen.append((i, j))
                total += x
    if total + 1 <= z:
        chosen.append((len(rows) - 1, len(rows[-1]) - 1))
        total += 1
    if total != z:
        raise AssertionError(f"greedy reached {total}, expected {z}")
    return chosen


# -- separator certificate -----------------------------------------------------

@dataclass
class Certificate:
    is_half_separator: bool
    all_but_one: bool
    asked: int
    side_sizes: list[int]
    grouping_ok: bool | None = None
    grouping_note: str = ""

    @property
    def ok(self) -> bool:
        return self.is_half_separator or self.all_but_one


def is_alpha_separator(g: Graph, cut: Iterable[int], alpha: Fraction) -> bool:
    cut = set(cut)
    rest = [v for v in range(g.n) if v not in cut]
    comps = g.components(rest)
    return len(comps) >= 2 and all(len(c) <= alpha * g.n for c in comps)


def separator_certificate(g: Graph, asked: Iterable[int], endpoint: int,
                          state: AdversaryState | None = None, strict: bool = True) -> Certificate:
    """Check that a finished adversary game asked a 1/2-separator (or |V|-1 vertices).

    With the adversary state the split records are also fed to the greedy
    subset procedure with target ceil(N/2), and the selected pieces are
    checked to form a balanced grouping of the components.
    """
    asked = set(asked)
    n = g.n
    comps = g.components(v for v in range(n) if v not in asked)
    half = is_alpha_separator(g, asked, Fraction(1, 2))
    cert = Certificate(half, len(asked) >= n - 1, len(asked), sorted((len(c) for c in comps), reverse=True))
    if state is not None and state.splits:
        cert.grouping_ok, cert.grouping_note = _grouping_cross_check(g, asked, state)
    if strict and not cert.ok:
        raise CertificateFailure(f"asked set of size {len(asked)} is not a 1/2-separator: parts {cert.side_sizes}")
    return cert


def _grouping_cross_check(g: Graph, asked: set[int], state: AdversaryState) -> tuple[bool | None, str]:
    rows, pieces = [], []
    for rec in state.splits:
        parts = sorted(rec.removed, key=len)
        rows.append([len(p) for p in parts] + [len(rec.kept)])
        pieces.append(parts)
    if len(state.splits[-1].kept) != 1:
        return None, "game ended before a single candidate remained"
    n_total = sum(sum(r[:-1]) for r in rows) + 1
    try:
        chosen = greedy_exact_subset(rows, math.ceil(n_total / 2))
    except SubsetHypothesisError as exc:
        return None, f"subset hypotheses fail on recorded sizes: {exc}"
    union = set()
    for i, j in chosen:
        union |= pieces[i][j] if j < len(pieces[i]) else state.splits[-1].kept
    side_a = union - asked
    side_b = set(range(g.n)) - union - asked
    crossing = any(w in side_b for v in side_a for w in g.adj[v])
    ok = not crossing and len(side_a) <= g.n / 2 and len(side_b) <= g.n / 2
    return ok, f"grouping sizes {len(side_a)}/{len(side_b)}"
