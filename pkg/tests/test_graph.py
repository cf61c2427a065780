import json

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from pathsearch.graph import (
    Graph,
    GridSpec,
    Instance,
    InvalidSpecError,
    NoInstanceError,
    Setting,
    SizeGuardError,
    bipartition,
    build_grid,
    complete_graph,
    enumerate_instances,
    gen_setting1,
    gen_setting2,
    path_graph,
    random_instance,
    random_tree,
    setting1_parity_ok,
    validate_instance,
)


def to_nx(g: Graph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges())
    return G


@pytest.mark.parametrize("dims, n, m", [((3, 3), 9, 12), ((2,), 2, 1), ((4, 4, 4), 64, 144)])
def test_grid_sizes(dims, n, m):
    g = build_grid(dims)
    assert (g.n, g.edge_count) == (n, m)


def test_empty_dims_rejected():
    with pytest.raises(InvalidSpecError):
        build_grid(())


@given(st.lists(st.integers(1, 5), min_size=1, max_size=4))
def test_grid_matches_networkx(dims):
    g = build_grid(dims)
    ref = nx.grid_graph(dim=list(reversed(dims)))
    assert g.edge_count == ref.number_of_edges() == GridSpec(tuple(dims)).edge_count()
    spec = g.grid
    for u, v in g.edges():
        a, b = spec.coord(u), spec.coord(v)
        assert sum(abs(x - y) for x, y in zip(a, b)) == 1


def test_edge_formula_at_scale():
    assert GridSpec((100, 100, 100)).edge_count() == 3 * 99 * 100 * 100
    assert build_grid((1000, 1000)).edge_count == 2 * 999 * 1000


def test_validate_examples():
    g = build_grid((2, 2))
    idx = g.grid.index
    cyc = [idx((0, 0)), idx((0, 1)), idx((1, 1)), idx((1, 0))]
    assert validate_instance(g, Instance.from_path(4, Setting.S1, cyc)) == []
    assert validate_instance(g, Instance.from_path(4, Setting.S2, cyc)) == []
    short = Instance.from_path(4, Setting.S1, cyc[:2])
    assert validate_instance(g, short)


def test_validate_rejects_two_cycles_and_non_edges():
    g = path_graph(4)
    bad = Instance.from_arcs(4, Setting.S1, 0, [(0, 1), (1, 2), (2, 3), (3, 2)])
    assert validate_instance(g, bad)
    jump = Instance.from_path(4, Setting.S2, [0, 2])
    assert validate_instance(g, jump)


def test_gen_setting2_examples():
    g = path_graph(8)
    assert gen_setting2(g, 0, target=3).path == (0, 1, 2, 3)
    assert gen_setting2(g, 0, target=0).arcs == ()
    g3 = build_grid((3, 3))
    assert validate_instance(g3, gen_setting2(g3, 0, seed=5)) == []


def test_gen_setting2_unreachable():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(NoInstanceError):
        gen_setting2(g, 0, target=2)


def test_gen_setting1_examples():
    g = build_grid((2, 2))
    inst = gen_setting1(g, 0, g.grid.index((1, 0)))
    assert validate_instance(g, inst) == [] and len(inst.path) == 4
    assert gen_setting1(path_graph(3), 0, 2).path == (0, 1, 2)
    g3 = build_grid((3, 3))
    inst = gen_setting1(g3, 0, g3.grid.index((1, 1)))
    assert validate_instance(g3, inst) == []
    # the neighbour of the corner sits in the smaller colour class: no cover ends there
    with pytest.raises(NoInstanceError):
        gen_setting1(g3, 0, g3.grid.index((0, 1)))


def test_gen_setting1_parity_obstruction():
    g = build_grid((2, 2))
    # same colour class as the source: the other class would need an extra in-arc
    with pytest.raises(NoInstanceError):
        gen_setting1(g, 0, g.grid.index((1, 1)))
    assert not setting1_parity_ok(g, 0, g.grid.index((1, 1)))


@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 10_000))
def test_generated_instances_validate(a, b, seed):
    g = build_grid((a, b))
    for setting in Setting:
        try:
            inst = random_instance(g, 0, setting, seed)
        except NoInstanceError:
            continue
        assert validate_instance(g, inst) == []
        if setting is Setting.S1:
            rest = set(range(g.n)) - set(inst.path)
            covered = [v for c in inst.cycles() for v in c]
            assert sorted(covered) == sorted(rest)
            assert all(len(c) >= 3 for c in inst.cycles())


def test_enumeration_examples():
    assert len(enumerate_instances(path_graph(4), 0, Setting.S2)) == 4
    tri = enumerate_instances(complete_graph(3), 0, Setting.S2)
    assert sorted(i.path for i in tri) == [(0,), (0, 1), (0, 1, 2), (0, 2), (0, 2, 1)]
    single = enumerate_instances(path_graph(1), 0, Setting.S1)
    assert len(single) == 1 and single[0].arcs == ()


def test_enumeration_cap():
    with pytest.raises(SizeGuardError):
        enumerate_instances(build_grid((4, 4)), 0, Setting.S2)


def _dfs_path_count(G: nx.Graph, s: int) -> int:
    return 1 + sum(len(list(nx.all_simple_paths(G, s, t))) for t in G if t != s)


@given(st.integers(1, 8), st.integers(0, 2**20))
def test_setting2_count_matches_networkx(n, seed):
    G = nx.gnp_random_graph(n, 0.5, seed=seed)
    g = Graph.from_edges(n, list(G.edges()))
    insts = enumerate_instances(g, 0, Setting.S2)
    assert len(insts) == _dfs_path_count(G, 0)
    assert len({i.succ for i in insts}) == len(insts)


@given(st.integers(1, 7), st.integers(0, 2**20))
def test_setting1_enumeration_is_exhaustive(n, seed):
    G = nx.gnp_random_graph(n, 0.6, seed=seed)
    g = Graph.from_edges(n, list(G.edges()))
    got = {i.succ for i in enumerate_instances(g, 0, Setting.S1)}
    # brute force over every successor function
    import itertools

    options = [[-1] + list(g.adj[v]) for v in range(n)]
    want = set()
    for succ in itertools.product(*options):
        inst = Instance(Setting.S1, 0, tuple(succ))
        try:
            if not validate_instance(g, inst):
                want.add(inst.succ)
        except ValueError:
            continue
    assert got == want


def test_json_round_trip():
    g = build_grid((3, 4))
    assert Graph.from_json(json.loads(json.dumps(g.to_json()))).adj == g.adj
    inst = random_instance(g, 0, Setting.S1, 3)
    again = Instance.from_json(json.loads(json.dumps(inst.to_json())))
    assert again == inst


def test_dot_export_marks_arcs():
    g = path_graph(3)
    dot = g.to_dot(Instance.from_path(3, Setting.S2, [0, 1]))
    assert dot.startswith("graph") or dot.startswith("digraph")
    assert "0" in dot and "1" in dot


def test_bipartition_of_grid_and_tree():
    col = bipartition(build_grid((3, 3)))
    assert col is not None and col[0] != col[1]
    assert bipartition(complete_graph(3)) is None
    assert bipartition(random_tree(10, seed=1)) is not None
