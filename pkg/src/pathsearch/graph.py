"""Host graphs, grids, and the hidden directed structure D.

Vertices are dense integers ``0..n-1``. Grid vertices are indexed row-major
over 0-indexed coordinate vectors, so vertex 0 is the all-zeros corner.
"""
from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import product
from math import prod
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

DEFAULT_ENUM_CAP = 12


class Setting(str, Enum):
    S1 = "S1"  # one path from s plus directed cycles covering every other vertex
    S2 = "S2"  # a single path from s, everything else isolated


class Kind(str, Enum):
    A = "A"
    B = "B"


class InvalidSpecError(ValueError):
    pass


class NoInstanceError(ValueError):
    pass


class SizeGuardError(ValueError):
    pass


class TooManyInstancesError(SizeGuardError):
    pass


@dataclass(frozen=True)
class GridSpec:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(r) for r in self.dims)
        if not dims:
            raise InvalidSpecError("grid needs at least one axis")
        if any(r < 1 for r in dims):
            raise InvalidSpecError(f"axis lengths must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return prod(self.dims)

    @cached_property
    def _strides(self) -> tuple[int, ...]:
        strides = []
        acc = 1
        for r in reversed(self.dims):
            strides.append(acc)
            acc *= r
        return tuple(reversed(strides))

    def index(self, coord: Sequence[int]) -> int:
        if len(coord) != self.d:
            raise ValueError(f"coordinate {coord} has wrong dimension")
        v = 0
        for c, r, st in zip(coord, self.dims, self._strides):
            if not 0 <= c < r:
                raise ValueError(f"coordinate {coord} outside grid {self.dims}")
            v += c * st
        return v

    def coord(self, v: int) -> tuple[int, ...]:
        out = []
        for st in self._strides:
            c, v = divmod(v, st)
            out.append(c)
        return tuple(out)

    def edge_count(self) -> int:
        total = self.size
        return sum((r - 1) * (total // r) for r in self.dims)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph with sorted adjacency lists."""

    adj: tuple[tuple[int, ...], ...]
    name: str = ""
    grid: GridSpec | None = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], name: str = "", grid=None) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise InvalidSpecError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidSpecError(f"edge ({u}, {v}) out of range")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(tuple(tuple(sorted(s)) for s in nbrs), name=name, grid=grid)

    @property
    def n(self) -> int:
        return len(self.adj)

    def __len__(self) -> int:
        return len(self.adj)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adj)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets[u]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def components(self, vertices: Iterable[int] | None = None) -> list[frozenset[int]]:
        """Connected components of the subgraph induced by ``vertices``."""
        pool = set(range(self.n)) if vertices is None else set(vertices)
        comps = []
        for root in sorted(pool):
            if root not in pool:
                continue
            pool.discard(root)
            comp = [root]
            queue = deque([root])
            while queue:
                u = queue.popleft()
                for w in self.adj[u]:
                    if w in pool:
                        pool.discard(w)
                        comp.append(w)
                        queue.append(w)
            comps.append(frozenset(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def is_tree(self) -> bool:
        return self.n >= 1 and self.edge_count == self.n - 1 and self.is_connected()

    def subgraph(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph relabelled to ``0..k-1``; also returns the old labels."""
        old = sorted(set(vertices))
        new = {v: i for i, v in enumerate(old)}
        edges = [(new[u], new[w]) for u in old for w in self.adj[u] if w in new and u < w]
        return Graph.from_edges(len(old), edges), old

    def to_json(self) -> dict:
        out = {"n": self.n, "name": self.name, "adjacency": [list(a) for a in self.adj]}
        if self.grid is not None:
            out["grid"] = list(self.grid.dims)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        grid = GridSpec(tuple(data["grid"])) if data.get("grid") else None
        g = cls(tuple(tuple(sorted(a)) for a in data["adjacency"]), name=data.get("name", ""), grid=grid)
        problems = check_graph(g)
        if problems:
            raise InvalidSpecError("; ".join(problems))
        return g

    def to_dot(self, instance: "Instance | None" = None) -> str:
        lines = [f'graph "{self.name or "G"}" {{']
        for v in range(self.n):
            label = str(self.grid.coord(v)) if self.grid else str(v)
            lines.append(f'  {v} [label="{label}"];')
        arcs = set(instance.arcs) if instance is not None else set()
        for u, v in self.edges():
            if (u, v) in arcs:
                lines.append(f"  {u} -- {v} [dir=forward, penwidth=2];")
            elif (v, u) in arcs:
                lines.append(f"  {u} -- {v} [dir=back, penwidth=2];")
            else:
                lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines)


def check_graph(g: Graph) -> list[str]:
    problems = []
    for v, nb in enumerate(g.adj):
        if v in nb:
            problems.append(f"self-loop at {v}")
        if len(set(nb)) != len(nb):
            problems.append(f"parallel edge at {v}")
        for w in nb:
            if not 0 <= w < g.n or v not in g.adj[w]:
                problems.append(f"asymmetric adjacency {v}-{w}")
    return problems


# -- graph families -------------------------------------------------------

def build_grid(spec: GridSpec | Sequence[int]) -> Graph:
    if not isinstance(spec, GridSpec):
        spec = GridSpec(tuple(spec))
    edges = []
    for v in range(spec.size):
        c = spec.coord(v)
        for axis in range(spec.d):
            if c[axis] + 1 < spec.dims[axis]:
                nc = list(c)
                nc[axis] += 1
                edges.append((v, spec.index(nc)))
    name = "grid" + "x".join(map(str, spec.dims))
    return Graph.from_edges(spec.size, edges, name=name, grid=spec)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], name=f"path{n}")


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)], name=f"K{n}")


def star_graph(leaves: int) -> Graph:
    """Vertex 0 is the centre."""
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)], name=f"star{leaves}")


def binary_tree(n: int) -> Graph:
    """Heap-ordered binary tree on ``n`` vertices rooted at 0."""
    return Graph.from_edges(n, [((i - 1) // 2, i) for i in range(1, n)], name=f"bintree{n}")


def random_tree(n: int, seed: int) -> Graph:
    rng = random.Random(seed)
    return Graph.from_edges(n, [(rng.randrange(i), i) for i in range(1, n)], name=f"tree{n}s{seed}")


def pendant_clique(k: int) -> Graph:
    """K_k on 0..k-1 with an extra vertex k hanging off vertex 0."""
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)] + [(0, k)]
    return Graph.from_edges(k + 1, edges, name=f"K{k}+pendant")


# -- instances --------------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    """Hidden structure D: ``succ[v]`` is the head of v's out-arc, or -1."""

    setting: Setting
    source: int
    succ: tuple[int, ...]

    @classmethod
    def from_arcs(cls, n: int, setting: Setting, source: int, arcs: Iterable[tuple[int, int]]) -> "Instance":
        succ = [-1] * n
        for u, v in arcs:
            if succ[u] != -1:
                raise ValueError(f"vertex {u} has two out-arcs")
            succ[u] = v
        return cls(Setting(setting), source, tuple(succ))

    @classmethod
    def from_path(cls, n: int, setting: Setting, path: Sequence[int], extra_arcs=()) -> "Instance":
        arcs = list(zip(path, path[1:])) + list(extra_arcs)
        return cls.from_arcs(n, setting, path[0], arcs)

    @property
    def n(self) -> int:
        return len(self.succ)

    @cached_property
    def arcs(self) -> tuple[tuple[int, int], ...]:
        return tuple((u, v) for u, v in enumerate(self.succ) if v != -1)

    @cached_property
    def pred(self) -> tuple[int, ...]:
        pred = [-1] * self.n
        for u, v in self.arcs:
            pred[v] = u
        return tuple(pred)

    @cached_property
    def path(self) -> tuple[int, ...]:
        out = [self.source]
        seen = {self.source}
        v = self.succ[self.source]
        while v != -1:
            if v in seen:
                raise ValueError("walk from the source revisits a vertex")
            seen.add(v)
            out.append(v)
            v = self.succ[v]
        return tuple(out)

    @property
    def endpoint(self) -> int:
        return self.path[-1]

    def cycles(self) -> list[tuple[int, ...]]:
        on_path = set(self.path)
        seen = set(on_path)
        out = []
        for v in range(self.n):
            if v in seen or self.succ[v] == -1:
                continue
            cyc = [v]
            seen.add(v)
            w = self.succ[v]
            while w != v and w != -1 and w not in seen:
                cyc.append(w)
                seen.add(w)
                w = self.succ[w]
            out.append(tuple(cyc))
        return out

    def to_json(self) -> dict:
        return {
            "setting": self.setting.value,
            "source": self.source,
            "n": self.n,
            "arcs": [list(a) for a in self.arcs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Instance":
        return cls.from_arcs(data["n"], Setting(data["setting"]), data["source"], map(tuple, data["arcs"]))


def validate_instance(g: Graph, inst: Instance) -> list[str]:
    """Return every violated constraint; an empty list means the instance is valid."""
    out = []
    n = g.n
    if inst.n != n:
        return [f"instance has {inst.n} vertices, graph has {n}"]
    s = inst.source
    if not 0 <= s < n:
        return [f"source {s} not in graph"]
    indeg = [0] * n
    for u, v in inst.arcs:
        if u == v:
            out.append(f"self-loop arc at {u}")
        elif not g.has_edge(u, v):
            out.append(f"arc {u}->{v} is not an edge of G")
        if 0 <= v < n:
            indeg[v] += 1
    for u, v in inst.arcs:
        if 0 <= v < n and inst.succ[v] == u:
            out.append(f"arcs {u}->{v} and {v}->{u} use the same edge twice")
    for v in range(n):
        if indeg[v] > 1:
            out.append(f"vertex {v} has indegree {indeg[v]}")
    if indeg[s] != 0:
        out.append(f"source {s} has indegree {indeg[s]}")
    if out:
        return out
    try:
        path = inst.path
    except ValueError as exc:
        return [str(exc)]
    if inst.setting is Setting.S2:
        if len(inst.arcs) != len(path) - 1:
            out.append(f"arcs off the source path: {len(inst.arcs) - len(path) + 1} extra")
    else:
        for v in range(n):
            if v != s and indeg[v] != 1:
                out.append(f"vertex {v} has indegree {indeg[v]}, expected 1")
        if not out:
            for v in range(n):
                if v != inst.endpoint and inst.succ[v] == -1:
                    out.append(f"vertex {v} off the path has no out-arc")
    return out


def is_valid(g: Graph, inst: Instance) -> bool:
    return not validate_instance(g, inst)


# -- generators -------------------------------------------------------------

def _dfs_tree_path(g: Graph, s: int, t: int, rng: random.Random | None) -> list[int] | None:
    # recursive DFS so that the tree path from s to t is a genuine DFS branch
    parent = {s: -1}
    it_stack = [(s, _ordered(g.adj[s], rng))]
    while it_stack:
        u, it = it_stack[-1]
        if u == t:
            break
        for w in it:
            if w not in parent:
                parent[w] = u
                it_stack.append((w, _ordered(g.adj[w], rng)))
                break
        else:
            it_stack.pop()
    if t not in parent:
        return None
    return [u for u, _ in it_stack]


def _ordered(nbrs, rng):
    nbrs = list(nbrs)
    if rng is not None:
        rng.shuffle(nbrs)
    return iter(nbrs)


def gen_setting2(g: Graph, s: int, seed: int | None = None, target: int | None = None) -> Instance:
    """A Setting-2 path from ``s``.

    With ``target`` the path ends there (a DFS branch, randomised when a seed is
    given); otherwise the seed picks a random reachable endpoint.
    """
    if not 0 <= s < g.n:
        raise ValueError(f"source {s} not in graph")
    rng = random.Random(seed) if seed is not None else None
    if target is None:
        if rng is None:
            raise ValueError("need a seed or a target endpoint")
        reachable = sorted(next(c for c in g.components() if s in c))
        target = rng.choice(reachable)
    path = _dfs_tree_path(g, s, target, rng)
    if path is None:
        raise NoInstanceError(f"no simple path from {s} to {target}")
    return Instance.from_path(g.n, Setting.S2, path)


def _random_cover(g: Graph, s: int, t: int, rng: random.Random) -> list[int] | None:
    """One random perfect matching between out-slots V-{t} and in-slots V-{s}."""
    n = g.n
    nprng = np.random.default_rng(rng.randrange(2**63))
    rows = [v for v in range(n) if v != t]
    cols = [v for v in range(n) if v != s]
    rows = [rows[i] for i in nprng.permutation(len(rows))]
    cols = [cols[i] for i in nprng.permutation(len(cols))]
    col_pos = {v: i for i, v in enumerate(cols)}
    indptr, indices = [0], []
    for u in rows:
        indices.extend(col_pos[w] for w in g.adj[u] if w != s)
        indptr.append(len(indices))
    mat = csr_matrix((np.ones(len(indices)), np.array(indices, dtype=np.int32), np.array(indptr)),
                     shape=(len(rows), len(cols)))
    match = maximum_bipartite_matching(mat, perm_type="column")
    if np.any(match < 0):
        return None
    succ = [-1] * n
    for i, j in enumerate(match):
        succ[rows[i]] = cols[j]
    return succ


def _reverse_cycle(succ: list[int], start: int) -> None:
    cyc = [start]
    w = succ[start]
    while w != start:
        cyc.append(w)
        w = succ[w]
    for i, v in enumerate(cyc):
        succ[v] = cyc[i - 1]


def _repair_two_cycles(g: Graph, s: int, succ: list[int], rng: random.Random, rounds: int = 200) -> bool:
    """Splice every 2-cycle u<->v into a neighbouring arc a->b as a->u->v->b.

    When only a reversed arc b->a is available and it lies on a cycle, the
    cycle is reversed first (a reversed cycle is still a valid cover).
    """
    n = len(succ)
    for _ in range(rounds):
        twos = [u for u in range(n) if succ[u] != -1 and u < succ[u] and succ[succ[u]] == u]
        if not twos:
            return True
        rng.shuffle(twos)
        on_path = set()
        v = s
        while v != -1:
            on_path.add(v)
            v = succ[v]
        progressed = False
        for u in twos:
            v = succ[u]
            if succ[v] != u:
                continue
            direct, flipped = [], []
            for x, y in ((u, v), (v, u)):
                for a in g.adj[x]:
                    if a in (u, v):
                        continue
                    for b in g.adj[y]:
                        if b in (u, v) or b == a:
                            continue
                        if succ[a] == b:
                            direct.append((a, b, x, y))
                        elif succ[b] == a and a not in on_path and succ[a] != b:
                            flipped.append((a, b, x, y))
            if direct:
                a, b, x, y = rng.choice(direct)
            elif flipped:
                a, b, x, y = rng.choice(flipped)
                _reverse_cycle(succ, a)
            else:
                continue
            succ[a], succ[x], succ[y] = x, y, b
            progressed = True
        if not progressed:
            return False
    return False


def gen_setting1(g: Graph, s: int, t: int, seed: int | None = 0, tries: int = 30) -> Instance:
    """A Setting-1 structure with endpoint ``t`` built from bipartite matchings.

    Each perfect matching of out-slots to in-slots is a path from s to t plus
    vertex-disjoint cycles; 2-cycles are spliced into neighbouring arcs. Small
    graphs fall back to exhaustive enumeration before reporting no instance.
    """
    n = g.n
    if n == 1:
        return Instance(Setting.S1, s, (-1,))
    rng = random.Random(seed)
    for _ in range(tries):
        succ = _random_cover(g, s, t, rng)
        if succ is None:
            break
        if _repair_two_cycles(g, s, succ, rng):
            inst = Instance(Setting.S1, s, tuple(succ))
            if is_valid(g, inst):
                return inst
    if n <= DEFAULT_ENUM_CAP:
        found = [i for i in enumerate_instances(g, s, Setting.S1) if i.endpoint == t]
        if found:
            return rng.choice(found)
    raise NoInstanceError(f"no Setting-1 cover with source {s} and endpoint {t}")


def bipartition(g: Graph) -> list[int] | None:
    """2-colouring of ``g`` (colour of each vertex) or None if not bipartite."""
    colour = [-1] * g.n
    for root in range(g.n):
        if colour[root] != -1:
            continue
        colour[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in g.adj[u]:
                if colour[w] == -1:
                    colour[w] = 1 - colour[u]
                    queue.append(w)
                elif colour[w] == colour[u]:
                    return None
    return colour


def setting1_parity_ok(g: Graph, s: int, t: int) -> bool:
    """Necessary counting condition on bipartite hosts: every arc joins the two colour classes."""
    colour = bipartition(g)
    if colour is None:
        return True
    black = colour.count(colour[s])
    white = g.n - black
    t_black = colour[t] == colour[s]
    return black - t_black == white


def random_instance(g: Graph, s: int, setting: Setting, seed: int, max_targets: int = 50) -> Instance:
    """Seeded instance with a uniformly drawn endpoint (redrawn while infeasible)."""
    rng = random.Random(seed)
    if Setting(setting) is Setting.S2:
        return gen_setting2(g, s, seed=rng.randrange(2**31))
    for _ in range(max_targets):
        t = rng.randrange(g.n)
        if (t == s and g.n > 1) or not setting1_parity_ok(g, s, t):
            continue
        try:
            return gen_setting1(g, s, t, seed=rng.randrange(2**31))
        except NoInstanceError:
            continue
    raise NoInstanceError("could not draw a feasible Setting-1 endpoint")


# -- exhaustive enumeration ---------------------------------------------------

def _paths_from(g: Graph, s: int) -> Iterator[list[int]]:
    path = [s]
    on = {s}
    stack = [iter(g.adj[s])]
    yield list(path)
    while stack:
        for w in stack[-1]:
            if w not in on:
                path.append(w)
                on.add(w)
                stack.append(iter(g.adj[w]))
                yield list(path)
                break
        else:
            stack.pop()
            on.discard(path.pop())


def _covers(g: Graph, s: int) -> Iterator[tuple[int, ...]]:
    n = g.n
    succ = [-1] * n
    used = [False] * n  # used[v]: v already has its in-arc
    used[s] = True
    # closes[v]: vertices whose last possible in-arc source is v
    closes = [[] for _ in range(n)]
    for w in range(n):
        if g.adj[w]:
            closes[max(g.adj[w])].append(w)

    def rec(v: int, ends: int):
        if v == n:
            if ends == 1:
                yield tuple(succ)
            return
        if ends == 0:
            succ[v] = -1
            if all(used[w] for w in closes[v]):
                yield from rec(v + 1, 1)
        for w in g.adj[v]:
            if used[w] or (w < v and succ[w] == v):
                continue
            succ[v] = w
            used[w] = True
            if all(used[x] for x in closes[v]):
                yield from rec(v + 1, ends)
            used[w] = False
        succ[v] = -1

    yield from rec(0, 0)


def enumerate_instances(g: Graph, s: int, setting: Setting, cap: int | None = DEFAULT_ENUM_CAP,
                        limit: int | None = None) -> list[Instance]:
    """Every valid instance with source ``s``, in a fixed deterministic order."""
    if cap is not None and g.n > cap:
        raise SizeGuardError(f"{g.n} vertices exceeds enumeration cap {cap}")
    setting = Setting(setting)
    out: list[Instance] = []
    if setting is Setting.S2:
        for p in _paths_from(g, s):
            out.append(Instance.from_path(g.n, setting, p))
            if limit is not None and len(out) > limit:
                raise TooManyInstancesError(f"more than {limit} instances")
    else:
        for succ in _covers(g, s):
            out.append(Instance(setting, s, succ))
            if limit is not None and len(out) > limit:
                raise TooManyInstancesError(f"more than {limit} instances")
    return out


def dumps_instance(g: Graph, inst: Instance) -> str:
    return json.dumps({"graph": g.to_json(), "instance": inst.to_json()})
