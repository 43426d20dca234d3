import random
from itertools import permutations

import pytest

import mwayhypergraphs
from mwayhypergraphs import Hypergraph, canonicalize, isomorphic, categorify, groupoidify, closure_rules
from mwaycore import Substrate, ArityError, ParseError, make_rule, parse_state, parse_payload, successors
from mwayevolution import evolve
from mwaypresets import SIGNATURE_RULE, DOUBLE_SELF_LOOP, hypergraph_rule


def brute_force_isomorphic(h1: Hypergraph, h2: Hypergraph) -> bool:
    v1, v2 = h1.vertices(), h2.vertices()
    if len(v1) != len(v2) or len(h1.edges) != len(h2.edges):
        return False
    target = sorted(h2.edges)
    for image in permutations(v2):
        mapping = dict(zip(v1, image))
        if sorted(tuple(mapping[v] for v in edge) for edge in h1.edges) == target:
            return True
    return False


def random_hypergraph(rng: random.Random) -> Hypergraph:
    n_vertices = rng.randint(1, 6)
    n_edges = rng.randint(1, 6)
    return Hypergraph(edges=tuple(tuple(rng.randrange(n_vertices) for _ in range(rng.randint(1, 3)))
                                  for _ in range(n_edges)))


def relabeled(h: Hypergraph, rng: random.Random) -> Hypergraph:
    vertices = h.vertices()
    image = rng.sample(range(10, 30), len(vertices))
    mapping = dict(zip(vertices, image))
    edges = [tuple(mapping[v] for v in edge) for edge in h.edges]
    rng.shuffle(edges)
    return Hypergraph(edges=tuple(edges))


def mutated(h: Hypergraph, rng: random.Random) -> Hypergraph:
    edges = [list(edge) for edge in h.edges]
    edge = rng.choice(edges)
    edge[rng.randrange(len(edge))] = rng.randrange(7)
    return Hypergraph(edges=tuple(tuple(e) for e in edges))


def test_certificates_agree_with_permutation_oracle():
    rng = random.Random(20211)
    for _ in range(500):
        h1 = random_hypergraph(rng)
        choice = rng.random()
        if choice < 0.4:
            h2 = relabeled(h1, rng)
        elif choice < 0.8:
            h2 = mutated(h1, rng)
        else:
            h2 = random_hypergraph(rng)
        assert isomorphic(h1, h2) == brute_force_isomorphic(h1, h2), (h1.text, h2.text)


def test_canonical_key_ignores_labels_and_edge_order():
    a = parse_state(Substrate.HYPERGRAPH, "{{1,2},{2,3}}")
    b = parse_state(Substrate.HYPERGRAPH, "{{5,9},{7,5}}")
    assert a == b
    assert a.canonical_key == canonicalize(b.payload).certificate


def test_edges_are_ordered():
    chain = parse_payload(Substrate.HYPERGRAPH, "{{1,2},{2,3}}")
    collider = parse_payload(Substrate.HYPERGRAPH, "{{1,2},{3,2}}")
    assert not isomorphic(chain, collider)


def test_canonical_form_is_idempotent():
    rng = random.Random(7)
    for _ in range(50):
        h = random_hypergraph(rng)
        once = canonicalize(h)
        twice = canonicalize(Hypergraph(edges=once.edges))
        assert once.edges == twice.edges
        assert once.certificate == twice.certificate


def test_state_labels_must_be_numbers():
    with pytest.raises(ParseError):
        parse_state(Substrate.HYPERGRAPH, "{{a,b}}")


def test_fresh_vertices_count_up_from_the_largest_label():
    rule = make_rule(Substrate.HYPERGRAPH, "{{x,y},{y,z}}", "{{x,y},{y,z},{x,w}}")
    payload = parse_payload(Substrate.HYPERGRAPH, "{{1,2},{2,3}}")
    (match,) = mwayhypergraphs.enumerate_matches(payload, rule)
    result, event = mwayhypergraphs.apply_match(payload, match)
    assert result.edges == ((1, 2), (2, 3), (1, 4))
    assert len(event.consumed_tokens) == 2
    assert len(event.produced_tokens) == 3


def test_injective_matching():
    loose = make_rule(Substrate.HYPERGRAPH, "{{x,y}}", "{{y,x}}")
    strict = make_rule(Substrate.HYPERGRAPH, "{{x,y}}", "{{y,x}}", injective=True)
    payload = parse_payload(Substrate.HYPERGRAPH, "{{0,0},{0,1}}")
    assert len(mwayhypergraphs.enumerate_matches(payload, loose)) == 2
    assert len(mwayhypergraphs.enumerate_matches(payload, strict)) == 1


def test_unbound_rhs_variables_become_fresh():
    rule = make_rule(Substrate.HYPERGRAPH, "{{x}}", "{{x,y},{y}}")
    assert rule.rhs.fresh_vars == {"y"}


def test_double_self_loop_merges_onto_one_state():
    initial = parse_state(Substrate.HYPERGRAPH, DOUBLE_SELF_LOOP)
    rule = hypergraph_rule(SIGNATURE_RULE)
    found = successors(initial, [rule])

    # the two loops can be taken in either order
    assert len(found) == 2
    assert len({target for _, target in found}) == 1
    (target,) = {target for _, target in found}
    assert len(target.payload.edges) == 4

    g = evolve(initial, [rule], 1)
    assert len(g.states) == 2
    assert len(g.events) == 2


def test_signature_rule_adds_two_edges_per_event():
    initial = parse_state(Substrate.HYPERGRAPH, DOUBLE_SELF_LOOP)
    g = evolve(initial, [hypergraph_rule(SIGNATURE_RULE)], 2)
    assert g.state_counts_by_generation()[0] == 1
    for event in g.events.values():
        assert len(event.produced_tokens) - len(event.consumed_tokens) == 2
        source = g.state(event.source_state_key)
        target = g.state(event.target_state_key)
        assert len(target.payload.edges) == len(source.payload.edges) + 2


def test_categorify_and_groupoidify():
    path = parse_payload(Substrate.HYPERGRAPH, "{{1,2},{2,3}}")
    assert categorify(path).text == "{{1,2},{2,3},{1,3},{1,1},{2,2},{3,3}}"
    edge = parse_payload(Substrate.HYPERGRAPH, "{{1,2}}")
    assert groupoidify(edge).text == "{{1,2},{2,1},{1,1},{2,2}}"


def transitive_reflexive_oracle(edges, symmetric=False):
    closed = set(edges)
    vertices = {v for e in edges for v in e}
    closed |= {(v, v) for v in vertices}
    changed = True
    while changed:
        changed = False
        extra = {(a, d) for (a, b) in closed for (c, d) in closed if b == c}
        if symmetric:
            extra |= {(b, a) for (a, b) in closed}
        if not extra <= closed:
            closed |= extra
            changed = True
    return closed


def test_closure_presets_against_oracle_and_idempotent():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(1, 5)
        edges = tuple((rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(1, 6)))
        h = Hypergraph(edges=edges)
        for close, symmetric in ((categorify, False), (groupoidify, True)):
            once = close(h)
            assert set(once.edges) == transitive_reflexive_oracle(edges, symmetric)
            assert set(close(once).edges) == set(once.edges)
            assert close(once).edges == once.edges


def test_closure_presets_need_binary_edges():
    with pytest.raises(ArityError):
        categorify(Hypergraph(edges=((1, 2, 3),)))


def test_closure_rules():
    category = closure_rules("category")
    assert [r.id for r in category] == ["transitivity", "reflexivity"]
    assert [r.id for r in closure_rules("groupoid")] == ["transitivity", "reflexivity", "symmetry"]
    with pytest.raises(ValueError):
        closure_rules("monoid")

    # one transitivity step on a path adds the shortcut edge
    state = parse_state(Substrate.HYPERGRAPH, "{{1,2},{2,3}}")
    targets = {t for _, t in successors(state, category[:1])}
    assert targets == {parse_state(Substrate.HYPERGRAPH, "{{1,2},{2,3},{1,3}}")}
