"""The 4x4 blow-up of a grid and the reduction from Setting 2 on the base grid
to Setting 1 on the blown grid.

Every base vertex v owns a 4x4 block of the blown grid (first two axes
scaled by 4). A base path is mirrored by a Setting-1 system whose path runs
through the blocks of the base path in order: it enters a block at corner
p1, walks one side to the neighbouring corner p2 and leaves to the next
block. The rest of the block is covered by two 6-cycles, off-path blocks by
one 16-cycle, and the final block by a snake from p1.

All layouts below are written for p1 = (0, 0), p2 = (3, 0) in block-local
coordinates and moved into place by one of the eight symmetries of the
square.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Callable

from .graph import Graph, GridSpec, Instance, Kind, Setting, build_grid, validate_instance
from .oracles import Answer, AnswerB, Transcript, answer, replay

Local = tuple[int, int]

LL, HL, LH, HH = (0, 0), (3, 0), (0, 3), (3, 3)

SIDE = [(0, 0), (1, 0), (2, 0), (3, 0)]
HALF_CYCLES = [
    [(0, 1), (1, 1), (1, 2), (1, 3), (0, 3), (0, 2)],
    [(2, 1), (3, 1), (3, 2), (3, 3), (2, 3), (2, 2)],
]
RING = [(0, 0), (1, 0), (2, 0), (3, 0), (3, 1), (3, 2), (3, 3), (2, 3),
        (2, 2), (2, 1), (1, 1), (1, 2), (1, 3), (0, 3), (0, 2), (0, 1)]
SNAKE = [(0, 0), (1, 0), (2, 0), (3, 0), (3, 1), (2, 1), (1, 1), (0, 1),
         (0, 2), (1, 2), (2, 2), (3, 2), (3, 3), (2, 3), (1, 3), (0, 3)]


class ConstructionError(RuntimeError):
    """Corner constraints contradict each other; the construction has a bug."""


class SynthesisError(RuntimeError):
    pass


def _symmetries() -> list[Callable[[Local], Local]]:
    out = []
    for swap, fa, fb in product((False, True), repeat=3):
        def t(p, swap=swap, fa=fa, fb=fb):
            x, y = (p[1], p[0]) if swap else p
            return (3 - x if fa else x, 3 - y if fb else y)
        out.append(t)
    return out


SYMMETRIES = _symmetries()


def _placing(p1: Local, p2: Local | None) -> Callable[[Local], Local]:
    for t in SYMMETRIES:
        if t(LL) == p1 and (p2 is None or t(HL) == p2):
            return t
    raise ConstructionError(f"no symmetry maps the template to corners {p1}, {p2}")


def _cycle_arcs(cycle: list[Local]) -> list[tuple[Local, Local]]:
    return [(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))]


def _path_arcs(path: list[Local]) -> list[tuple[Local, Local]]:
    return list(zip(path, path[1:]))


# -- geometry ---------------------------------------------------------------------------

def blowup_spec(base: GridSpec) -> GridSpec:
    if base.d < 2:
        raise ValueError("the blow-up needs at least two axes")
    return GridSpec((4 * base.dims[0], 4 * base.dims[1]) + tuple(base.dims[2:]))


@dataclass
class BlockMap:
    base: GridSpec
    blown: GridSpec = field(init=False)

    def __post_init__(self):
        self.blown = blowup_spec(self.base)

    def vertex(self, v: int, local: Local) -> int:
        c = self.base.coord(v)
        return self.blown.index((4 * c[0] + local[0], 4 * c[1] + local[1]) + tuple(c[2:]))

    def block(self, v: int) -> list[int]:
        return [self.vertex(v, (a, b)) for a in range(4) for b in range(4)]

    def owner(self, w: int) -> int:
        c = self.blown.coord(w)
        return self.base.index((c[0] // 4, c[1] // 4) + tuple(c[2:]))

    def local(self, w: int) -> Local:
        c = self.blown.coord(w)
        return (c[0] % 4, c[1] % 4)

    def parity(self, v: int) -> int:
        return sum(self.base.coord(v)[2:]) % 2


def _direction(spec: GridSpec, u: int, v: int) -> tuple[int, int]:
    cu, cv = spec.coord(u), spec.coord(v)
    for axis in range(spec.d):
        if cu[axis] != cv[axis]:
            return axis, cv[axis] - cu[axis]
    raise ValueError(f"{u} and {v} coincide")


def _side(axis: int, sign: int, entering: bool) -> tuple[int, int]:
    """(local axis, local value) of the block side crossed by a planar move."""
    low = (sign > 0) == entering
    return axis, 0 if low else 3


def corner_roles(bm: BlockMap, v: int, entry: tuple[int, int] | None = None,
                 exit: tuple[int, int] | None = None) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Global coordinates of the admissible entry and exit corners of block ``v``.

    Even parity of the coordinates past the first two puts the entry on the
    low-low/high-high diagonal and the exit on the other one; odd parity
    swaps them. A move along one of the first two axes pins the corner to
    the side it crosses. ``entry``/``exit`` are (axis, sign) of the base arcs.
    """
    first, second = [LL, HH], [LH, HL]
    if bm.parity(v):
        first, second = second, first
    p1s, p2s = _restrict(first, entry, True), _restrict(second, exit, False)
    if not p1s or not p2s:
        raise ConstructionError(f"block {v}: no corner satisfies entry {entry} and exit {exit}")
    glob = lambda ps: [bm.blown.coord(bm.vertex(v, p)) for p in ps]
    return glob(p1s), glob(p2s)


def _restrict(cands: list[Local], move: tuple[int, int] | None, entering: bool) -> list[Local]:
    if move is None or move[0] >= 2:
        return sorted(cands)
    axis, val = _side(move[0], move[1], entering)
    return [p for p in cands if p[axis] == val]


# -- per-block layout ---------------------------------------------------------------------

@dataclass(frozen=True)
class BlockPlan:
    """Arcs inside one block plus the connector directions at its corners."""

    role: str  # "off", "through" or "last"
    p1: Local | None
    p2: Local | None
    arcs: tuple[tuple[Local, Local], ...]
    entry: tuple[int, int] | None
    exit: tuple[int, int] | None


def plan_block(bm: BlockMap, v: int, source: int, ans: AnswerB) -> BlockPlan:
    """Layout of block ``v`` from the base Query-B answer at ``v`` alone.

    Corners not pinned by a planar move take the lowest admissible corner.
    Both ends of a connector along a later axis see the same candidate
    positions, so this choice agrees on both sides without shared state.
    """
    inc, out = ans.incoming(v), ans.outgoing(v)
    if v != source and not inc:
        return BlockPlan("off", None, None, tuple(_cycle_arcs(RING)), None, None)
    entry = _direction(bm.base, *inc[0]) if inc else None
    exit = _direction(bm.base, *out[0]) if out else None
    first, second = [LL, HH], [LH, HL]
    if bm.parity(v):
        first, second = second, first
    p1s = _restrict(first, entry, True)
    if not p1s:
        raise ConstructionError(f"block {v}: no entry corner for {entry}")
    p1 = p1s[0]
    if exit is None:
        t = _placing(p1, None)
        return BlockPlan("last", p1, None, tuple((t(a), t(b)) for a, b in _path_arcs(SNAKE)), entry, None)
    p2s = _restrict(second, exit, False)
    if not p2s:
        raise ConstructionError(f"block {v}: no exit corner for {exit}")
    p2 = p2s[0]
    t = _placing(p1, p2)
    arcs = _path_arcs(SIDE) + [a for c in HALF_CYCLES for a in _cycle_arcs(c)]
    return BlockPlan("through", p1, p2, tuple((t(a), t(b)) for a, b in arcs), entry, exit)


def _step(spec: GridSpec, w: int, move: tuple[int, int], sign: int) -> int:
    c = list(spec.coord(w))
    c[move[0]] += sign * move[1]
    return spec.index(c)


def blown_source(bm: BlockMap, source: int) -> int:
    first = [LH, HL] if bm.parity(source) else [LL, HH]
    return bm.vertex(source, min(first))


def block_arcs(bm: BlockMap, v: int, plan: BlockPlan) -> list[tuple[int, int]]:
    """Every blown arc with an end in block ``v``: inner arcs and both connectors."""
    arcs = [(bm.vertex(v, a), bm.vertex(v, b)) for a, b in plan.arcs]
    if plan.entry is not None:
        p1 = bm.vertex(v, plan.p1)
        arcs.append((_step(bm.blown, p1, plan.entry, -1), p1))
    if plan.exit is not None:
        p2 = bm.vertex(v, plan.p2)
        arcs.append((p2, _step(bm.blown, p2, plan.exit, +1)))
    return arcs


# -- good systems ------------------------------------------------------------------------

@dataclass
class GoodSystem:
    bm: BlockMap
    instance: Instance
    block_order: list[int]
    corners: dict[int, tuple[int, int | None]]

    def to_json(self) -> dict:
        return {"dims": list(self.bm.blown.dims), "instance": self.instance.to_json()}

    def sidecar(self) -> dict:
        return {
            "base_dims": list(self.bm.base.dims),
            "block_order": self.block_order,
            "corners": {str(v): list(c) for v, c in sorted(self.corners.items())},
        }


def build_good_system(base: Graph, path: Instance) -> GoodSystem:
    """Setting-1 system on the blown grid whose path mirrors ``path`` block by block."""
    if base.grid is None:
        raise ValueError("the blow-up needs a grid host")
    if Setting(path.setting) is not Setting.S2:
        raise ValueError("the base instance must be a single path")
    bm = BlockMap(base.grid)
    succ = [-1] * bm.blown.size
    corners = {}
    for v in range(base.n):
        plan = plan_block(bm, v, path.source, answer(path, v, Kind.B))
        for a, b in block_arcs(bm, v, plan):
            if bm.owner(a) == v:
                succ[a] = b
        if plan.role != "off":
            corners[v] = (bm.vertex(v, plan.p1), bm.vertex(v, plan.p2) if plan.p2 else None)
    inst = Instance(Setting.S1, blown_source(bm, path.source), tuple(succ))
    return GoodSystem(bm, inst, block_order(bm, inst), corners)


def block_order(bm: BlockMap, inst: Instance) -> list[int]:
    order = []
    for w in inst.path:
        v = bm.owner(w)
        if not order or order[-1] != v:
            order.append(v)
    return order


def audit_good_system(base: Graph, path: Instance, gs: GoodSystem) -> list[str]:
    """Everything that can be wrong with ``gs``, as readable messages."""
    blown = build_grid(gs.bm.blown)
    problems = list(validate_instance(blown, gs.instance))
    if gs.block_order != list(path.path):
        problems.append(f"block order {gs.block_order} differs from base path {list(path.path)}")
    for v, (p1, p2) in gs.corners.items():
        first = [LH, HL] if gs.bm.parity(v) else [LL, HH]
        if gs.bm.local(p1) not in first:
            problems.append(f"block {v}: entry corner {gs.bm.local(p1)} has the wrong parity")
        if p2 is not None:
            a, b = gs.bm.local(p1), gs.bm.local(p2)
            if sorted([abs(a[0] - b[0]), abs(a[1] - b[1])]) != [0, 3]:
                problems.append(f"block {v}: corners {a}, {b} are not neighbouring corners")
    on_path = set(gs.instance.path)
    for v in range(base.n):
        if v not in path.path and any(w in on_path for w in gs.bm.block(v)):
            problems.append(f"path enters off-path block {v}")
    return problems


# -- the reduction --------------------------------------------------------------------------

class BlowupAdapter:
    """Setting-1 / Query-B oracle on the blown grid backed by a Setting-2 base oracle.

    A blown query costs one base query the first time its block is touched
    and nothing afterwards.
    """

    kind = Kind.B
    setting = Setting.S1

    def __init__(self, base: Graph, base_oracle):
        self.base = base
        self.base_oracle = base_oracle
        self.bm = BlockMap(base.grid)
        self.graph = build_grid(self.bm.blown)
        self.source = blown_source(self.bm, base_oracle.source)
        self.transcript = Transcript(Setting.S1, Kind.B, self.source, self.graph.name)
        self.plans: dict[int, BlockPlan] = {}
        self._arcs: dict[int, list[tuple[int, int]]] = {}

    def _plan(self, v: int) -> BlockPlan:
        if v not in self.plans:
            ans = self.base_oracle.ask(v)
            self.plans[v] = plan_block(self.bm, v, self.base_oracle.source, ans)
            self._arcs[v] = block_arcs(self.bm, v, self.plans[v])
        return self.plans[v]

    def ask(self, w: int) -> AnswerB:
        v = self.bm.owner(w)
        self._plan(v)
        ans = AnswerB(tuple(a for a in self._arcs[v] if w in a))
        if len(ans.arcs) > 2:
            raise SynthesisError(f"vertex {w} got {len(ans.arcs)} arcs")
        self.transcript.append(w, ans)
        return ans


@dataclass
class ReductionResult:
    base_endpoint: int
    blown_endpoint: int
    base_queries: int
    blown_queries: int
    base_transcript: Transcript
    blown_transcript: Transcript
    good_system: GoodSystem
    mismatches: list[str]

    @property
    def ok(self) -> bool:
        return self.base_queries <= self.blown_queries and not self.mismatches


def simulate_reduction(base: Graph, base_oracle, searcher) -> ReductionResult:
    """Run a Setting-1 / Query-B ``searcher`` on the blown grid against ``base_oracle``.

    The base endpoint is read off the blown one. At the end a good system is
    completed from a base path consistent with the base answers and the blown
    transcript is replayed against it.
    """
    adapter = BlowupAdapter(base, base_oracle)
    res = searcher(adapter.graph, adapter)
    t = adapter.bm.owner(res.endpoint)
    if hasattr(base_oracle, "witness"):
        path = base_oracle.witness(t)
    else:
        path = base_oracle.instance
    gs = build_good_system(base, path)
    mismatches = replay(gs.instance, adapter.transcript)
    if gs.instance.endpoint != res.endpoint:
        mismatches.append(f"completed system ends at {gs.instance.endpoint}, searcher said {res.endpoint}")
    return ReductionResult(t, res.endpoint, len(base_oracle.transcript), len(adapter.transcript),
                           base_oracle.transcript, adapter.transcript, gs, mismatches)


def dump_good_system(gs: GoodSystem) -> tuple[str, str]:
    return json.dumps(gs.to_json()), json.dumps(gs.sidecar())
