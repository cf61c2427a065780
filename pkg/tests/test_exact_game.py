import math

import pytest
from hypothesis import given, settings, strategies as st

from pathsearch.exact_game import Game, OptimalSearcher, results_csv, solve, verify_relations
from pathsearch.graph import (
    Graph,
    Kind,
    Setting,
    SizeGuardError,
    build_grid,
    complete_graph,
    path_graph,
    pendant_clique,
    star_graph,
)
from pathsearch.oracles import TruthfulOracle
from pathsearch.searchers import SEARCHERS, applicable


@pytest.mark.parametrize("n", range(1, 9))
def test_path_values(n):
    # ceil(log2 n) coincides with this only at powers of two
    assert solve(path_graph(n), 0, Setting.S2, Kind.B).value == (n.bit_length() - 1)


def test_path_powers_of_two_match_ceil_log():
    for n in (2, 4, 8):
        assert solve(path_graph(n), 0, Setting.S2, Kind.B).value == math.ceil(math.log2(n))


def test_pendant_clique():
    g = pendant_clique(4)
    assert solve(g, 0, Setting.S1, Kind.A).value == 0
    assert solve(g, 0, Setting.S1, Kind.B).value == 0
    assert solve(g, 0, Setting.S2, Kind.B).value == 3


def test_trivial_games():
    gv = solve(path_graph(1), 0, Setting.S2, Kind.B)
    assert gv.value == 0 and gv.first_query is None
    assert solve(star_graph(3), 0, Setting.S2, Kind.A).value == 1


def test_solver_cap():
    with pytest.raises(SizeGuardError):
        Game(path_graph(9), 0, Setting.S2, Kind.B)
    with pytest.raises(SizeGuardError):
        Game(path_graph(8), 0, Setting.S1, Kind.B)


@st.composite
def tiny_graphs(draw):
    n = draw(st.integers(2, 6))
    rnd = draw(st.randoms(use_true_random=False))
    # spanning tree plus a few extra edges keeps it connected
    edges = {tuple(sorted((v, rnd.randrange(v)))) for v in range(1, n)}
    for _ in range(draw(st.integers(0, 4))):
        a, b = rnd.sample(range(n), 2)
        edges.add(tuple(sorted((a, b))))
    return Graph.from_edges(n, sorted(edges))


@settings(max_examples=25)
@given(tiny_graphs(), st.randoms(use_true_random=False))
def test_values_invariant_under_relabelling(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    h = Graph.from_edges(g.n, [(perm[a], perm[b]) for a, b in g.edges()])
    for setting in Setting:
        for kind in Kind:
            assert solve(g, 0, setting, kind).value == solve(h, perm[0], setting, kind).value


@settings(max_examples=25)
@given(tiny_graphs())
def test_relations(g):
    rep = verify_relations(g, 0)
    assert rep.ok


@pytest.mark.parametrize("g", [path_graph(6), star_graph(4), complete_graph(4), build_grid((2, 3)), pendant_clique(4)],
                         ids=lambda g: g.name)
@pytest.mark.parametrize("setting", list(Setting))
@pytest.mark.parametrize("kind", list(Kind))
def test_optimal_strategy_meets_value(g, setting, kind):
    game = Game(g, 0, setting, kind)
    value = game.solve().value
    play = OptimalSearcher(game)
    worst = 0
    for inst in game.instances:
        oracle = TruthfulOracle(g, inst, kind)
        res = play(g, oracle)
        assert res.endpoint == inst.endpoint
        worst = max(worst, res.queries_used)
    assert worst == value
    # no heuristic searcher beats the minimax value on its worst instance
    for name, search in SEARCHERS.items():
        if applicable(name, g) and game.instances:
            worst = max(search(g, TruthfulOracle(g, i, kind)).queries_used for i in game.instances)
            assert worst >= value, name


def test_results_csv():
    gv = solve(path_graph(4), 0, Setting.S2, Kind.B)
    text = results_csv([("path4", 0, "S2", "B", gv)])
    assert text.splitlines()[1] == f"path4,0,S2,B,2,{gv.first_query},4"
