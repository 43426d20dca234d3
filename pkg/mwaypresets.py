"""
mwaypresets.py

Ready-made rule systems: the group axioms as term rules, the category/groupoid closure
rules, and the string homotopy demonstration around A -> AB.
"""

from typing import List, Tuple

from simpleLogger import CHATTY, DEBUG, INFO, WARN, ERROR  # noqa: F401
from mwaycore import Substrate, Rule, RuleTower, make_rule, parse_state
from mwayhypergraphs import closure_rules  # noqa: F401

# ============================================================================
# Group axioms, every law in both orientations. a' in a bare lhs or only on the rhs
# ranges over GROUP_CONSTANTS.
GROUP_VARIABLES = ("x", "y", "z", "a'")
GROUP_CONSTANTS = ("a", "b", "e")
GROUP_RULES = (
    ("g[x, g[y, z]]",   "g[g[x, y], z]"),
    ("g[g[x, y], z]",   "g[x, g[y, z]]"),
    ("g[a', e]",        "a'"),
    ("a'",              "g[a', e]"),
    ("g[e, a']",        "a'"),
    ("a'",              "g[e, a']"),
    ("g[a', inv[a']]",  "e"),
    ("e",               "g[a', inv[a']]"),
    ("g[inv[a'], a']",  "e"),
    ("e",               "g[inv[a'], a']"),
)

def group_axiom_rules(associativity_only: bool = False, constants: Tuple[str, ...] = GROUP_CONSTANTS) -> List[Rule]:
    table = GROUP_RULES[:2] if associativity_only else GROUP_RULES
    return [make_rule(Substrate.TERM, lhs, rhs, variables=GROUP_VARIABLES, constants=constants) for lhs, rhs in table]

# ============================================================================
# A -> AB from AA, and the two proof paths AA -> ABBBABBB used for homotopy synthesis
GROWTH_RULE = ("A", "AB")
GROWTH_INIT = "AA"
RED_PATH    = ("AA", "AAB", "AABB", "AABBB", "ABABBB", "ABBABBB", "ABBBABBB")
YELLOW_PATH = ("AA", "ABA", "ABBA", "ABBBA", "ABBBAB", "ABBBABB", "ABBBABBB")

LEVEL1_RULES = (
    ("AAB",     "ABA"),
    ("AABB",    "ABBA"),
    ("AABBB",   "ABBBA"),
    ("ABABBB",  "ABBBAB"),
    ("ABBABBB", "ABBBABB"),
)
# Corners of the two strip squares next to AAB -> ABA paired one level up; bounds one cube
CORNER_LEVEL2_RULES = (
    ("AAB",  "AABB"),
    ("AABB", "AABBB"),
    ("ABA",  "ABBA"),
    ("ABBA", "ABBBA"),
)
# Level-2 arrows between far corners of the two 2-cells
LITERAL_LEVEL2_RULES = (
    ("AA",         "ABAB"),
    ("ABBBBABBBB", "ABBBABBB"),
    ("AABBBB",     "ABABBB"),
    ("ABBBBA",     "ABBBAB"),
)

# Two proofs of AA -> ABBBBABBBB and two of ABAB -> ABBBABBB; the literal level-2 rules
# carry the 2-cell of the first pair onto the 2-cell of the second
RED_CELL_PATHS = (
    ("AA", "AAB", "AABB", "AABBB", "AABBBB", "ABABBBB", "ABBABBBB", "ABBBABBBB", "ABBBBABBBB"),
    ("AA", "ABA", "ABBA", "ABBBA", "ABBBBA", "ABBBBAB", "ABBBBABB", "ABBBBABBB", "ABBBBABBBB"),
)
YELLOW_CELL_PATHS = (
    ("ABAB", "ABABB", "ABABBB", "ABBABBB", "ABBBABBB"),
    ("ABAB", "ABBAB", "ABBBAB", "ABBBABB", "ABBBABBB"),
)
CELL_LEVEL1_RULES = tuple(
    (u, v) for p1, p2 in (RED_CELL_PATHS, YELLOW_CELL_PATHS) for u, v in zip(p1[1:-1], p2[1:-1])
)

def growth_tower(*upper_levels: Tuple[Tuple[str, str], ...]) -> RuleTower:
    """A -> AB on level 0, then one table of whole-state rules per higher level."""
    rules = [make_rule(Substrate.STRING, *GROWTH_RULE)]
    for level, table in enumerate(upper_levels, start=1):
        rules += [make_rule(Substrate.STRING, lhs, rhs, level=level) for lhs, rhs in table]
    return RuleTower.from_rules(rules)

def growth_initial():
    return parse_state(Substrate.STRING, GROWTH_INIT)

# ============================================================================
# Hypergraph systems
SIGNATURE_RULE   = ("{{x,y},{y,z}}", "{{w,y},{y,z},{z,w},{x,w}}")
STAR_RULE        = ("{{x,y},{z,y}}", "{{x,w},{y,w},{z,w}}")
DOUBLE_SELF_LOOP = "{{0,0},{0,0}}"

def hypergraph_rule(table: Tuple[str, str]) -> Rule:
    return make_rule(Substrate.HYPERGRAPH, *table)
