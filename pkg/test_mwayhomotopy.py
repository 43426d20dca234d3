import pytest

from mwaycore import Substrate, LengthMismatch, EndpointMismatch, make_rule, parse_state
from mwayevolution import MultiwayGraph, evolve
from mwayhomotopy import (synthesize_homotopy_rules, induce, find_squares, find_cubes, synthesize_cell_rules,
                          two_cell_between, three_cell_between, ladder_subgraph, check_composition_closure)
from mwaypresets import (RED_PATH, YELLOW_PATH, LEVEL1_RULES, CORNER_LEVEL2_RULES, LITERAL_LEVEL2_RULES,
                         RED_CELL_PATHS, YELLOW_CELL_PATHS, CELL_LEVEL1_RULES, growth_tower, growth_initial)


def strip(steps=6, skip=()):
    table = tuple(pair for pair in LEVEL1_RULES if pair not in skip)
    return evolve(growth_initial(), growth_tower(table), steps)


def corners(g, *texts):
    return tuple(g.key(t) for t in texts)


# ----------------------------------------------------------------------------
def test_synthesis_pairs_interior_states():
    base = evolve(growth_initial(), growth_tower(), 6)
    rules = synthesize_homotopy_rules(RED_PATH, YELLOW_PATH, graph=base)
    assert [(r.text, r.level, r.anchored) for r in rules] == [(f"{lhs} -> {rhs}", 1, True) for lhs, rhs in LEVEL1_RULES]
    assert rules[0].id == "AAB->ABA@1"


def test_synthesis_checks_the_paths():
    base = evolve(growth_initial(), growth_tower(), 6)
    with pytest.raises(LengthMismatch):
        synthesize_homotopy_rules(RED_PATH, YELLOW_PATH[:-1], graph=base)
    with pytest.raises(EndpointMismatch):
        synthesize_homotopy_rules(RED_PATH[:-1], YELLOW_PATH[:-1], graph=base)
    with pytest.raises(ValueError):
        synthesize_homotopy_rules(RED_PATH, YELLOW_PATH, level=0, graph=base)
    with pytest.raises(ValueError):
        synthesize_homotopy_rules(RED_PATH, YELLOW_PATH)
    assert synthesize_homotopy_rules(RED_PATH, RED_PATH, graph=base) == []


def test_induce_adds_one_level():
    base = evolve(growth_initial(), growth_tower(), 6)
    rules = synthesize_homotopy_rules(RED_PATH, YELLOW_PATH, graph=base)
    g = induce(base, rules)
    assert g.levels() == [0, 1]
    assert len(g.edges_at_level(1)) == 5
    assert g.tower.height == 1
    assert len(g.edges_at_level(0)) == len(base.edges)

    assert induce(base, []) is base
    with pytest.raises(ValueError):
        induce(base, [make_rule(Substrate.STRING, "AAB", "ABA", level=1),
                      make_rule(Substrate.STRING, "AAB", "AABB", level=2)])


def test_inverse_edges():
    g = evolve(growth_initial(), growth_tower().with_inverses(), 3)
    for source, _, target in g.edges:
        if g.states[target].first_generation < 3:
            assert g.has_edge(target, source)


# ----------------------------------------------------------------------------
def test_squares_of_the_strip():
    g = strip()
    squares = find_squares(g)
    assert len(squares) == 8
    full = {s.corners for s in squares if not s.degenerate}
    assert full == {
        corners(g, "AAB", "AABB", "ABA", "ABBA"),
        corners(g, "AABB", "AABBB", "ABBA", "ABBBA"),
        corners(g, "AABBB", "ABABBB", "ABBBA", "ABBBAB"),
        corners(g, "ABABBB", "ABBABBB", "ABBBAB", "ABBBABB"),
    }
    # the triangles at either end of the strip
    assert corners(g, "AA", "AAB", "AA", "ABA") in {s.corners for s in squares}
    assert corners(g, "ABBABBB", "ABBBABBB", "ABBBABB", "ABBBABBB") in {s.corners for s in squares}


def test_two_cell_between_the_paths():
    g = strip()
    cell = two_cell_between(g, RED_PATH, YELLOW_PATH)
    assert cell is not None
    assert len(cell.squares) == 6
    assert cell.p1 == corners(g, *RED_PATH)

    gapped = strip(skip=[("AABBB", "ABBBA")])
    assert two_cell_between(gapped, RED_PATH, YELLOW_PATH) is None


def test_ladder_subgraph():
    g = strip()
    L = ladder_subgraph(g, RED_PATH, YELLOW_PATH)
    assert L.number_of_nodes() == 12
    assert L.number_of_edges() == 17
    assert sum(1 for _, _, level in L.edges(data="level") if level == 1) == 5


def test_composition_closure():
    g = strip()
    assert check_composition_closure(g, 1).closed
    report = check_composition_closure(g, 2)
    assert report.closed
    assert report.cells_checked == 5
    assert report.dict(g)["closed"] is True

    gapped = check_composition_closure(strip(skip=[("AABBB", "ABBBA")]), 2)
    assert not gapped.closed
    assert gapped.dict()["violations"]

    with pytest.raises(ValueError):
        check_composition_closure(g, 4)


def test_dimension_one_flags_level_jumps():
    rules = [make_rule(Substrate.STRING, "A", "AB"), make_rule(Substrate.STRING, "AA", "ABAB", level=1)]
    g = evolve(parse_state(Substrate.STRING, "AA"), rules, 2)
    assert not check_composition_closure(g, 1).closed


# ----------------------------------------------------------------------------
def test_corner_rules_bound_one_cube():
    g = evolve(growth_initial(), growth_tower(LEVEL1_RULES, CORNER_LEVEL2_RULES), 6)
    (cube,) = find_cubes(g)
    assert cube.corner(0, 0, 0) == g.key("AAB")
    assert cube.corner(1, 1, 0) == g.key("ABBA")
    assert cube.corner(0, 0, 1) == g.key("AABB")
    assert cube.corner(1, 1, 1) == g.key("ABBBA")
    assert len(cube.faces) == 6


def cell_graph(steps=9, skip=()):
    literal = tuple(pair for pair in LITERAL_LEVEL2_RULES if pair not in skip)
    return evolve(growth_initial(), growth_tower(CELL_LEVEL1_RULES, literal), steps)


def test_cell_paths_synthesize_the_level1_rules():
    base = evolve(growth_initial(), growth_tower(), 8)
    rules = [r for pair in (RED_CELL_PATHS, YELLOW_CELL_PATHS) for r in synthesize_homotopy_rules(*pair, graph=base)]
    assert [(r.text, r.level) for r in rules] == [(f"{lhs} -> {rhs}", 1) for lhs, rhs in CELL_LEVEL1_RULES]


def test_literal_level2_rules_bound_a_three_cell():
    g = cell_graph()
    assert g.levels() == [0, 1, 2]
    # single-square cubes need level-2 edges on all four corners of a (0,1) square
    assert find_cubes(g) == []

    cell = three_cell_between(g, RED_CELL_PATHS, YELLOW_CELL_PATHS)
    assert cell is not None
    assert len(cell.lower.squares) == 8
    assert len(cell.upper.squares) == 4
    assert cell.checkpoints == ((0, 0), (4, 2), (8, 4))

    first, second = cell.blocks
    assert first.corner(0, 0, 0) == g.key("AA")
    assert first.corner(1, 0, 0) == g.key("AABBBB")
    assert first.corner(1, 1, 0) == g.key("ABBBBA")
    assert first.corner(1, 0, 1) == g.key("ABABBB")
    assert first.corner(1, 1, 1) == g.key("ABBBAB")
    assert second.corner(1, 1, 1) == g.key("ABBBABBB")
    assert len(first.faces) == 4 + 2 + 2

    middle = cell.rungs[1]
    assert middle.corners == corners(g, "AABBBB", "ABBBBA", "ABABBB", "ABBBAB")
    assert (middle.vertical_level, middle.horizontal_level) == (1, 2)
    assert not middle.degenerate
    assert cell.rungs[0].degenerate


def test_three_cell_needs_its_end_arrows():
    # ABBBBABBBB first appears in generation 8 and is only expanded with a ninth step
    assert three_cell_between(cell_graph(steps=8), RED_CELL_PATHS, YELLOW_CELL_PATHS) is None
    assert three_cell_between(cell_graph(skip=[("AA", "ABAB")]), RED_CELL_PATHS, YELLOW_CELL_PATHS) is None

    coarse = three_cell_between(cell_graph(skip=[("AABBBB", "ABABBB")]), RED_CELL_PATHS, YELLOW_CELL_PATHS)
    assert coarse.checkpoints == ((0, 0), (8, 4))
    assert len(coarse.blocks) == 1

    # without the yellow rungs there is no upper 2-cell
    g = evolve(growth_initial(), growth_tower(CELL_LEVEL1_RULES[:7], LITERAL_LEVEL2_RULES), 9)
    assert three_cell_between(g, RED_CELL_PATHS, YELLOW_CELL_PATHS) is None


def test_no_cubes_below_level_two():
    assert find_cubes(strip()) == []


def test_cell_rules_pair_square_corners():
    g = strip()
    index = {s.corners: s for s in find_squares(g)}
    s1 = index[corners(g, "AAB", "AABB", "ABA", "ABBA")]
    s2 = index[corners(g, "AABB", "AABBB", "ABBA", "ABBBA")]
    rules = synthesize_cell_rules(g, s1, s2)
    assert [(r.text, r.level) for r in rules] == [(f"{lhs} -> {rhs}", 2) for lhs, rhs in CORNER_LEVEL2_RULES]


def hand_built_cube():
    g = MultiwayGraph(substrate=Substrate.STRING)
    s = {name: parse_state(Substrate.STRING, name) for name in ["A", "B", "C", "D", "E", "F", "G", "H"]}
    # bottom A B C D and top E F G H, each with level 0 verticals and level 1 horizontals
    for a, b, c, d in (("A", "B", "C", "D"), ("E", "F", "G", "H")):
        g.link(s[a], s[b], "v", 0)
        g.link(s[c], s[d], "v", 0)
        g.link(s[a], s[c], "h", 1)
        g.link(s[b], s[d], "h", 1)
    for low, high in zip("ABCD", "EFGH"):
        g.link(s[low], s[high], "u", 2)
    return g


def test_hand_built_cube():
    g = hand_built_cube()
    assert len(g.edges) == 12
    (cube,) = find_cubes(g)
    assert cube.corner(1, 1, 1) == g.key("H")
    report = check_composition_closure(g, 3)
    assert report.closed
    assert report.cells_checked == 2
