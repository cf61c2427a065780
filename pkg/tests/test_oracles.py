import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pathsearch.graph import (
    Graph,
    Instance,
    Kind,
    Setting,
    build_grid,
    complete_graph,
    enumerate_instances,
    path_graph,
    random_instance,
    random_tree,
    star_graph,
)
from pathsearch.oracles import (
    FOUND,
    OFF,
    AdversaryOracle,
    AnswerA,
    AnswerB,
    CertificateFailure,
    SubsetHypothesisError,
    Transcript,
    TruthfulOracle,
    adversary_witness,
    answer,
    check_subset_hypotheses,
    consistency_witness,
    greedy_all_targets,
    greedy_exact_subset,
    is_consistent,
    replay,
    separator_certificate,
)
from pathsearch.searchers import SEARCHERS, applicable
from pathsearch.separators import s_alpha


def test_truthful_answers():
    inst = Instance.from_path(4, Setting.S2, [0, 1, 2])
    assert answer(inst, 2, Kind.B) == AnswerB(((1, 2),))
    assert answer(inst, 3, Kind.A) == OFF
    assert answer(inst, 2, Kind.A) == FOUND
    assert answer(inst, 0, Kind.A) == AnswerA("arc", (0, 1))
    cyc = Instance.from_arcs(4, Setting.S1, 3, [(0, 1), (1, 2), (2, 0)])
    assert answer(cyc, 1, Kind.B) == AnswerB(((0, 1), (1, 2)))


@given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 999), st.sampled_from(list(Setting)))
def test_single_incoming_only_at_endpoint(a, b, seed, setting):
    g = build_grid((a, b))
    try:
        inst = random_instance(g, 0, setting, seed)
    except ValueError:
        return
    for v in range(g.n):
        ans = answer(inst, v, Kind.B)
        if len(ans.arcs) == 1 and ans.arcs[0][1] == v:
            assert v == inst.endpoint


@given(st.integers(2, 5), st.integers(0, 999), st.sampled_from(list(Kind)))
def test_replay_reproduces_transcript(n, seed, kind):
    g = build_grid((n, n))
    inst = random_instance(g, 0, Setting.S2, seed)
    o = TruthfulOracle(g, inst, kind)
    for v in range(g.n):
        o.ask(v)
    text = o.transcript.to_jsonl()
    assert replay(inst, Transcript.from_jsonl(text)) == []
    assert Transcript.from_jsonl(text).to_jsonl() == text


def _endpoint_set(g, s, answers):
    return {i.endpoint for i in enumerate_instances(g, s, Setting.S2, cap=None)
            if is_consistent(i, answers, Kind.B)}


def test_adversary_denies_middle_of_path():
    g = path_graph(8)
    adv = AdversaryOracle(g, 0)
    assert adv.ask(4) == AnswerB(())
    assert adv.state.candidates == frozenset(range(4))


def test_adversary_on_star_leaf():
    g = star_graph(3)
    adv = AdversaryOracle(g, 0)
    assert adv.ask(1) == AnswerB(())
    assert adv.state.candidates == frozenset({0, 2, 3})


def test_adversary_single_vertex():
    g = path_graph(1)
    adv = AdversaryOracle(g, 0)
    assert adv.ask(0) == AnswerB(())
    assert adv.finish(0)


def _hosts():
    yield path_graph(7)
    yield star_graph(4)
    yield complete_graph(4)
    yield random_tree(9, seed=2)
    yield build_grid((3, 3))
    yield Graph.from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)])


@pytest.mark.parametrize("g", list(_hosts()), ids=lambda g: g.name or "edges")
@given(order=st.randoms(use_true_random=False))
def test_adversary_candidates_are_exact(g, order):
    verts = list(range(g.n))
    order.shuffle(verts)
    adv = AdversaryOracle(g, 0, backend="exact")
    for v in verts:
        adv.ask(v)
        answers = adv.transcript.answers()
        assert adv.state.candidates == _endpoint_set(g, 0, answers)
        assert replay(consistency_witness(g, 0, Setting.S2, adv.transcript), adv.transcript) == []
        if len(adv.state.candidates) == 1:
            break


@given(order=st.randoms(use_true_random=False))
def test_structural_adversary_stays_honest_on_4x4(order):
    g = build_grid((4, 4))
    verts = list(range(g.n))
    order.shuffle(verts)
    adv = AdversaryOracle(g, 0, backend="structural")
    for v in verts[:10]:
        adv.ask(v)
        answers = adv.transcript.answers()
        assert adv.state.candidates <= _endpoint_set(g, 0, answers)
        w = adv.witness()
        assert replay(w, adv.transcript) == []


def test_witness_examples():
    g = path_graph(8)
    empty = Transcript(Setting.S2, Kind.B, 0)
    assert replay(consistency_witness(g, 0, Setting.S2, empty), empty) == []
    adv = AdversaryOracle(g, 0)
    adv.ask(4)
    w = consistency_witness(g, 0, Setting.S2, adv.transcript)
    assert 4 not in w.path
    assert adversary_witness(adv.state, g, 0).endpoint in adv.state.candidates


def test_greedy_examples():
    assert greedy_exact_subset([(1, 1)], 0) == []
    assert greedy_exact_subset([(1, 1)], 1) == [(0, 0)]
    assert greedy_exact_subset([(1, 2, 2), (1, 1)], 3) == [(0, 0), (0, 1)]
    assert greedy_exact_subset([(1, 2, 2), (1, 1)], 5)[-1] == (1, 1)


@pytest.mark.parametrize("rows, z", [
    ([(1,)], 0),               # row too short
    ([(2, 1)], 0),             # unsorted
    ([(1, 2)], 0),             # last entry must be 1
    ([(5, 5), (1, 1)], 0),     # entry above the later mass
    ([(1, 1)], 3),             # z above N
])
def test_subset_hypotheses_enforced(rows, z):
    with pytest.raises(SubsetHypothesisError):
        greedy_exact_subset(rows, z)


@st.composite
def subset_rows(draw):
    rows = [tuple([1] * draw(st.integers(2, 4)))]
    tail = len(rows[0])
    for _ in range(draw(st.integers(0, 3))):
        m = draw(st.integers(2, 4))
        head = sorted(draw(st.lists(st.integers(1, tail), min_size=m - 1, max_size=m - 1)))
        last = draw(st.integers(head[-1], tail))
        rows.insert(0, tuple(head) + (last,))
        tail += sum(head)
    return rows


@given(subset_rows())
def test_greedy_matches_subset_sum(rows):
    n_total = check_subset_hypotheses(rows, 0)
    entries = [x for row in rows for x in row[:-1]] + [1]
    reachable = {sum(c) for k in range(len(entries) + 1) for c in itertools.combinations(entries, k)}
    assert set(range(n_total + 1)) <= reachable
    for z, chosen in enumerate(greedy_all_targets(rows)):
        assert sum(rows[i][j] for i, j in chosen) == z
        assert chosen == greedy_exact_subset(rows, z)


def test_certificate_on_path():
    g = path_graph(8)
    adv = AdversaryOracle(g, 0)
    res = SEARCHERS["tree"](g, adv)
    cert = separator_certificate(g, adv.state.asked, res.endpoint, adv.state)
    assert cert.is_half_separator


def test_certificate_on_complete_graph():
    g = complete_graph(4)
    adv = AdversaryOracle(g, 0)
    res = SEARCHERS["follow"](g, adv)
    cert = separator_certificate(g, adv.state.asked, res.endpoint, adv.state)
    assert cert.all_but_one and cert.asked >= 3 == s_alpha(g, Fraction(1, 2))


@pytest.mark.parametrize("name", ["bisection", "separator", "follow"])
def test_certificate_on_small_grid(name):
    g = build_grid((3, 3))
    adv = AdversaryOracle(g, 0)
    res = SEARCHERS[name](g, adv)
    separator_certificate(g, adv.state.asked, res.endpoint, adv.state)
    assert len(adv.state.asked) >= s_alpha(g, Fraction(1, 2)) == 3


def test_certificate_rejects_small_sets():
    with pytest.raises(CertificateFailure):
        separator_certificate(path_graph(8), [0], 0)


@pytest.mark.parametrize("g", [path_graph(12), random_tree(14, seed=4), build_grid((3, 4)), star_graph(6)],
                         ids=lambda g: g.name)
def test_adversary_forces_separator_for_every_searcher(g):
    need = s_alpha(g, Fraction(1, 2))
    for name, search in SEARCHERS.items():
        if not applicable(name, g):
            continue
        adv = AdversaryOracle(g, 0)
        res = search(g, adv)
        assert adv.finish(res.endpoint)
        assert res.queries_used >= need
        assert separator_certificate(g, adv.state.asked, res.endpoint, adv.state, strict=False).ok
