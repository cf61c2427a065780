import pytest
from hypothesis import given, settings, strategies as st

from pathsearch.blowup import (
    BlockMap,
    BlowupAdapter,
    audit_good_system,
    blowup_spec,
    build_good_system,
    corner_roles,
    dump_good_system,
    simulate_reduction,
)
from pathsearch.graph import GridSpec, Instance, Kind, Setting, build_grid, enumerate_instances, gen_setting2, validate_instance
from pathsearch.oracles import AdversaryOracle, TruthfulOracle, replay
from pathsearch.searchers import grid_bisection_search


def test_blowup_dims():
    assert blowup_spec(GridSpec((2, 2))).dims == (8, 8)
    assert blowup_spec(GridSpec((2, 2, 3))).dims == (8, 8, 3)
    assert blowup_spec(GridSpec((2, 2, 8))).dims == (8, 8, 8)
    with pytest.raises(ValueError):
        blowup_spec(GridSpec((5,)))


@pytest.mark.parametrize("dims", [(2, 2), (3, 2), (2, 2, 3)])
def test_blocks_partition_the_blown_grid(dims):
    bm = BlockMap(GridSpec(dims))
    seen = []
    for v in range(bm.base.size):
        block = bm.block(v)
        assert len(block) == 16 and all(bm.owner(w) == v for w in block)
        seen += block
    assert sorted(seen) == list(range(bm.blown.size))


def test_corner_roles_examples():
    bm = BlockMap(GridSpec((2, 2)))
    p1, p2 = corner_roles(bm, bm.base.index((1, 0)))
    assert sorted(p1) == [(4, 0), (7, 3)]
    assert sorted(p2) == [(4, 3), (7, 0)]
    bm3 = BlockMap(GridSpec((2, 2, 2)))
    p1, _ = corner_roles(bm3, bm3.base.index((0, 0, 1)))
    assert sorted(p1) == [(0, 3, 1), (3, 0, 1)]
    # entering from the left along axis 0 pins the entry to the low side
    p1, _ = corner_roles(bm, bm.base.index((1, 0)), entry=(0, 1))
    assert p1 == [(4, 0)]


def test_every_move_pair_has_corners():
    bm = BlockMap(GridSpec((3, 3, 2)))
    moves = [None] + [(axis, sign) for axis in range(3) for sign in (1, -1)]
    for v in range(bm.base.size):
        for entry in moves:
            for exit in moves:
                p1s, p2s = corner_roles(bm, v, entry, exit)
                assert p1s and p2s
                for a in p1s:
                    for b in p2s:
                        diff = sorted(abs(x - y) for x, y in zip(a[:2], b[:2]))
                        assert diff in ([0, 3], [3, 3])


def test_two_block_example():
    base = build_grid((2, 2))
    path = Instance.from_path(4, Setting.S2, [base.grid.index((0, 0)), base.grid.index((0, 1))])
    gs = build_good_system(base, path)
    assert gs.bm.blown.dims == (8, 8)
    assert gs.block_order == [0, 1]
    assert validate_instance(build_grid((8, 8)), gs.instance) == []
    assert audit_good_system(base, path, gs) == []


def test_length_zero_path():
    base = build_grid((2, 2))
    path = Instance.from_path(4, Setting.S2, [0])
    gs = build_good_system(base, path)
    assert len(gs.instance.path) == 16
    assert {gs.bm.owner(w) for w in gs.instance.path} == {0}
    assert audit_good_system(base, path, gs) == []


@pytest.mark.parametrize("dims", [(2, 2), (3, 3), (2, 3), (2, 2, 2), (2, 2, 3)])
def test_every_path_gives_a_good_system(dims):
    base = build_grid(dims)
    for path in enumerate_instances(base, 0, Setting.S2, cap=None, limit=5000):
        gs = build_good_system(base, path)
        assert audit_good_system(base, path, gs) == [], list(path.path)


@settings(max_examples=40)
@given(st.sampled_from([(4, 4), (3, 5), (2, 2, 2), (3, 3, 2)]), st.integers(0, 10_000), st.integers(0, 100))
def test_random_paths_give_good_systems(dims, seed, src):
    base = build_grid(dims)
    s = src % base.n
    path = gen_setting2(base, s, seed=seed)
    gs = build_good_system(base, path)
    assert audit_good_system(base, path, gs) == []


def test_export_round_trip():
    base = build_grid((2, 2))
    gs = build_good_system(base, gen_setting2(base, 0, seed=1))
    inst_json, side = dump_good_system(gs)
    assert '"block_order"' in side and '"dims": [8, 8]' in inst_json


@pytest.mark.parametrize("seed", range(10))
def test_reduction_with_truthful_base(seed):
    base = build_grid((2, 2))
    oracle = TruthfulOracle(base, gen_setting2(base, 0, seed=seed), Kind.B)
    r = simulate_reduction(base, oracle, grid_bisection_search)
    assert r.ok and oracle.finish(r.base_endpoint)
    assert r.base_queries <= 4 < r.blown_queries


def test_reduction_with_adversary():
    base = build_grid((2, 2))
    adv = AdversaryOracle(base, 0)
    r = simulate_reduction(base, adv, grid_bisection_search)
    assert r.ok and adv.finish(r.base_endpoint)
    assert replay(r.good_system.instance, r.blown_transcript) == []


def test_repeat_queries_in_a_block_are_free():
    base = build_grid((2, 2))
    oracle = TruthfulOracle(base, gen_setting2(base, 0, seed=0), Kind.B)
    adapter = BlowupAdapter(base, oracle)
    block = adapter.bm.block(3)
    for w in block + block:
        adapter.ask(w)
    assert len(oracle.transcript) == 1 and len(adapter.transcript) == 32
    first, second = adapter.transcript.entries[:16], adapter.transcript.entries[16:]
    assert first == second


def test_off_path_block_answers_are_ring_arcs():
    base = build_grid((2, 2))
    path = Instance.from_path(4, Setting.S2, [0, 1])
    adapter = BlowupAdapter(base, TruthfulOracle(base, path, Kind.B))
    for w in adapter.bm.block(3):
        ans = adapter.ask(w)
        assert len(ans.arcs) == 2
        assert all(adapter.bm.owner(x) == 3 for arc in ans.arcs for x in arc)
