import networkx as nx
import pytest

from mwaycore import (Substrate, CyclicGraph, FrontierLimitExceeded, InvalidFoliation, KeyNotFound, SubstrateMismatch,
                      make_rule, parse_state)
from mwayevolution import (MultiwayGraph, Strategy, evolve, singleway_evolve, foliate, foliation_from_time_function,
                           branchial_graph, branchial_sizes, paths_between)
from mwaypresets import growth_tower, growth_initial, RED_PATH


def growth(steps, **kwargs):
    return evolve(growth_initial(), growth_tower(), steps, **kwargs)


def test_growth_counts():
    g = growth(3)
    assert g.state_counts_by_generation() == [1, 2, 3, 4]
    # two events from every state of generations 0 to 2
    assert len(g.events) == 2 * (1 + 2 + 3)


def test_generation_n_is_a_b_i_a_b_j():
    g = growth(4)
    for n in range(5):
        texts = sorted(g.text(k) for k in g.generation(n))
        expected = sorted("A" + "B" * i + "A" + "B" * (n - i) for i in range(n + 1))
        assert texts == expected


def test_every_state_has_one_event_per_a():
    g = growth(3)
    for key in g.generation(2):
        assert len(g.out_edges(key)) == 2


def test_zero_steps_and_bad_steps():
    g = growth(0)
    assert [g.text(k) for k in g.states] == ["AA"]
    assert not g.events
    with pytest.raises(ValueError):
        growth(-1)


def test_state_cap():
    with pytest.raises(FrontierLimitExceeded):
        growth(5, max_states=3)


def test_workers_do_not_change_the_graph():
    single = growth(5)
    threaded = growth(5, workers=4)
    assert list(single.events) == list(threaded.events)
    assert single.edges == threaded.edges
    assert list(single.states) == list(threaded.states)


def test_several_initial_states():
    initial = [parse_state(Substrate.STRING, "AA", index=0), parse_state(Substrate.STRING, "AB", index=1)]
    g = evolve(initial, growth_tower(), 1)
    assert len(g.initial_keys) == 2
    assert g.key("ABB") in g.states


def test_substrates_must_agree():
    with pytest.raises(SubstrateMismatch):
        evolve(parse_state(Substrate.HYPERGRAPH, "{{0,1}}"), growth_tower(), 1)
    with pytest.raises(ValueError):
        evolve([], growth_tower(), 1)


def test_lookups():
    g = growth(2)
    assert g.text(g.key("ABA")) == "ABA"
    with pytest.raises(KeyNotFound):
        g.state(b"ZZZ")
    assert g.children(g.key("AA")) == sorted([g.key("AAB"), g.key("ABA")])
    assert g.parents(g.key("ABAB")) == sorted([g.key("AAB"), g.key("ABA")])
    assert g.levels() == [0]

    G = g.to_networkx()
    assert G.number_of_nodes() == len(g.states)
    assert G.number_of_edges() == len(g.events)


# ----------------------------------------------------------------------------
def test_first_match_history():
    history = singleway_evolve(growth_initial(), growth_tower(), 3)
    assert [state.text for state, _ in history] == ["AA", "ABA", "ABBA", "ABBBA"]
    assert [len(events) for _, events in history] == [0, 1, 1, 1]


def test_non_overlapping_history_fires_every_disjoint_match():
    history = singleway_evolve(parse_state(Substrate.STRING, "AAA"), growth_tower(), 2,
                               strategy="nonoverlapping", seed=5)
    assert [state.text for state, _ in history] == ["AAA", "ABABAB", "ABBABBABB"]
    assert [len(events) for _, events in history] == [0, 3, 3]
    assert Strategy("first") == Strategy.FIRST_MATCH


def test_singleway_stops_when_nothing_matches():
    rule = make_rule(Substrate.STRING, "A", "B")
    history = singleway_evolve(parse_state(Substrate.STRING, "AA"), [rule], 10)
    assert [state.text for state, _ in history] == ["AA", "BA", "BB"]


# ----------------------------------------------------------------------------
def test_generational_foliation():
    g = growth(3)
    f = foliate(g)
    assert len(f) == 4
    assert [len(s) for s in f.slices] == [1, 2, 3, 4]
    assert f.time(g.key("ABAB")) == 2


def test_cycles_have_no_generational_foliation():
    rules = [make_rule(Substrate.STRING, "AB", "BA"), make_rule(Substrate.STRING, "BA", "AB")]
    g = evolve(parse_state(Substrate.STRING, "AB"), rules, 3)
    assert len(g.states) == 2
    assert len(g.events) == 2
    with pytest.raises(CyclicGraph):
        foliate(g)


def test_custom_time_function():
    g = growth(2)
    times = {k: 2 * r.first_generation for k, r in g.states.items()}
    f = foliation_from_time_function(g, times)
    assert [len(s) for s in f.slices] == [1, 0, 2, 0, 3]

    with pytest.raises(InvalidFoliation):
        foliation_from_time_function(g, {k: 0 for k in g.states})
    with pytest.raises(InvalidFoliation):
        foliation_from_time_function(g, {g.key("AA"): 0})


def test_branchial_slice_is_a_path():
    g = growth(3)
    B = branchial_graph(g, foliate(g), 2)
    assert B.number_of_nodes() == 3
    assert nx.is_isomorphic(B, nx.path_graph(3))
    middle = g.key("ABAB")
    assert B.degree(middle) == 2
    assert all(w == 1 for _, _, w in B.edges(data="weight"))


def test_branchial_sizes_per_slice():
    g = growth(3)
    assert branchial_sizes(g) == [(1, 0), (2, 1), (3, 2), (4, 3)]


# ----------------------------------------------------------------------------
def test_paths_through_the_growth_lattice():
    g = growth(6)
    paths = paths_between(g, g.key("AA"), g.key("ABBBABBB"))
    assert len(paths) == 20
    assert [g.key(t) for t in RED_PATH] in paths
    assert all(len(p) == 7 for p in paths)

    assert len(paths_between(g, g.key("AA"), g.key("ABBBABBB"), max_paths=5)) == 5
    assert paths_between(g, g.key("AA"), g.key("AA")) == [[g.key("AA")]]
    assert paths_between(g, g.key("ABA"), g.key("AAB")) == []


def test_hand_built_graph():
    g = MultiwayGraph(substrate=Substrate.STRING)
    a, b = parse_state(Substrate.STRING, "A"), parse_state(Substrate.STRING, "B")
    event = g.link(a, b, "flip")
    assert g.initial_keys == {a.canonical_key}
    assert g.states[b.canonical_key].first_generation == 1
    assert g.out_edges(a.canonical_key) == [(event.id, b.canonical_key)]
