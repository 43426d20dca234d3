from collections import namedtuple
from pathlib import Path

import pytest

from mwaycore import Substrate, ParseError, SemanticError
from mwayrulefile import parse_rule_file, print_rule_file, format_rule, unanchor
from mwayterms import OrderingKind

RULES_DIR = Path(__file__).parent / "rules"

GROWTH = """\
# A -> AB from AA
substrate: string
alphabet: A B
init: AA
A -> AB
AAB -> ABA @level 1
"""

BadFile = namedtuple("BadFile", ["text", "error", "line", "column"])
BAD_FILES = [
    BadFile("substrate: string\nA -> \n", ParseError, 2, 5),
    BadFile("substrate: string\n -> B\n", ParseError, 2, 2),
    BadFile("substrate: string\nalphabet: A B\nA -> AC\n", SemanticError, 3, 7),
    BadFile("substrate: string\nA -> B @level x\n", ParseError, 2, 15),
    BadFile("substrate: string\nA -> B @weird\n", ParseError, 2, 8),
    BadFile("substrate: graph\nA -> B\n", ParseError, 1, 1),
    BadFile("substrate: string\nsubstrate: term\nA -> B\n", SemanticError, 2, 1),
    BadFile("A -> B\n", SemanticError, 1, 1),
    BadFile("substrate: string\ncolour: red\nA -> B\n", ParseError, 2, 1),
    BadFile("substrate: hypergraph\n{{x,y}} -> {{x,y}\n", ParseError, 2, 18),
    BadFile("substrate: term\nvariables: x\nx -> f[x]\n", SemanticError, 3, 1),
    BadFile("substrate: term\nf[a] -> f[a, a]\n", SemanticError, 2, 1),
    BadFile("substrate: string\nAB -> A @level 1\n", SemanticError, 2, 1),
    BadFile("substrate: string\nconstants: a\nA -> B\n", SemanticError, 2, 1),
    BadFile("substrate: term\nalphabet: f a\nconstants: c\nf[a] -> a\n", SemanticError, 3, 1),
]


def test_growth_file():
    rf = parse_rule_file(GROWTH)
    assert rf.substrate == Substrate.STRING
    assert rf.alphabet == ("A", "B")
    assert [s.text for s in rf.initial] == ["AA"]
    assert rf.tower.height == 1
    assert [r.id for r in rf.rules] == ["A->AB", "AAB->ABA@1"]
    assert rf.rules[1].anchored
    assert rf.term_ordering().kind == OrderingKind.SHORTLEX


def test_annotations():
    rf = parse_rule_file("substrate: hypergraph\n"
                         "{{x,y}} -> {{y,x}} @injective @id flip\n"
                         "{{x,y}} -> {{x,y},{y,z}} @level 1 @unanchored\n")
    flip, grow = rf.rules
    assert flip.id == "flip"
    assert flip.injective
    assert grow.level == 1
    assert not grow.anchored
    assert format_rule(flip) == "{{x,y}} -> {{y,x}} @injective @id flip"
    assert format_rule(grow) == "{{x,y}} -> {{x,y},{y,z}} @level 1 @unanchored"


def test_term_header():
    rf = parse_rule_file((RULES_DIR / "group_axioms.rules").read_text())
    assert rf.substrate == Substrate.TERM
    assert rf.variables == ("x", "y", "z", "a'")
    assert rf.constants == ("a", "b", "e")
    assert rf.precedence == ("inv", "g", "e", "a", "b")
    assert rf.term_ordering().kind == OrderingKind.LPO
    assert [s.text for s in rf.initial] == ["g[a, inv[a]]", "g[g[a, b], inv[b]]"]
    assert len(rf.rules) == 10
    assert all(rule.constants == rf.constants for rule in rf.rules)
    assert rf.header()["constants"] == "a b e"


def test_ascending_precedence():
    rf = parse_rule_file((RULES_DIR / "completion_aba.rules").read_text())
    assert rf.precedence == ("b", "a")
    assert rf.header()["precedence"] == "b > a"


@pytest.mark.parametrize("bad", BAD_FILES, ids=lambda b: b.text.splitlines()[-1])
def test_errors_carry_line_and_column(bad):
    with pytest.raises(bad.error) as info:
        parse_rule_file(bad.text)
    assert info.value.line == bad.line
    assert info.value.column == bad.column


def test_comments_and_blank_lines():
    rf = parse_rule_file("\n# nothing here\nsubstrate: string   # trailing\n\nA -> AB  # grow\n")
    assert [r.text for r in rf.rules] == ["A -> AB"]
    assert rf.initial == ()


@pytest.mark.parametrize("path", sorted(RULES_DIR.glob("*.rules")), ids=lambda p: p.name)
def test_shipped_files_survive_printing(path):
    rf = parse_rule_file(path.read_text())
    assert rf.initial
    assert parse_rule_file(print_rule_file(rf)) == rf


def test_unanchor_keeps_the_base_level():
    rf = parse_rule_file(GROWTH)
    loose = unanchor(rf.tower)
    assert not any(r.anchored for r in loose.all_rules())
    assert loose.levels[0] == rf.tower.levels[0]
    assert [r.level for r in loose.all_rules()] == [0, 1]
