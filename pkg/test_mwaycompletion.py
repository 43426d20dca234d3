import random
from collections import namedtuple

import pytest

from mwaycore import Substrate, SubstrateUnsupported, add_inverses, make_rule, parse_state, successors
from mwaycompletion import (CompletionStatus, critical_pairs, joinable, normal_form, compare_states, knuth_bendix,
                            observer_report)
from mwaypresets import group_axiom_rules
from mwayterms import TermOrdering

SHORTLEX_AB = TermOrdering.from_chain("shortlex", "a < b")


def string_rules(*pairs):
    return [make_rule(Substrate.STRING, lhs, rhs) for lhs, rhs in pairs]


def term_rules(*pairs, variables=("x", "y", "z")):
    return [make_rule(Substrate.TERM, lhs, rhs, variables=variables) for lhs, rhs in pairs]


def test_self_overlap_of_aba():
    (pair,) = critical_pairs(string_rules(("aba", "b")))
    assert pair.peak.text == "ababa"
    assert {pair.left_result.text, pair.right_result.text} == {"bba", "abb"}
    assert not pair.trivial
    assert pair.rule_ids == ("aba->b", "aba->b")


def test_contained_lhs_gives_a_pair():
    pairs = critical_pairs(string_rules(("abc", "x"), ("b", "y")))
    assert any(p.peak.text == "abc" and {p.left_result.text, p.right_result.text} == {"x", "ayc"} for p in pairs)


def test_joinability_is_bounded():
    rules = string_rules(("aba", "b"))
    (pair,) = critical_pairs(rules)
    assert not joinable(pair, rules, 3)
    assert joinable(pair, string_rules(("aba", "b"), ("bba", "abb")), 1)


def test_completion_of_aba():
    result = knuth_bendix(string_rules(("aba", "b")), SHORTLEX_AB)
    assert result.status == CompletionStatus.COMPLETED
    assert [r.text for r in result.rules] == ["aba -> b", "bba -> abb"]
    assert result.provenance["bba->abb"] == ("ababa", ("aba->b", "aba->b"))
    assert any("orient bba -> abb" in line for line in result.trace)
    assert result.dict()["status"] == "Completed"

    assert normal_form(parse_state(Substrate.STRING, "ababa"), result.rules).text == "abb"


def test_complete_systems_are_left_alone():
    rules = string_rules(("aa", "a"))
    result = knuth_bendix(rules, SHORTLEX_AB)
    assert result.status == CompletionStatus.COMPLETED
    assert list(result.rules) == rules
    assert result.iterations == 1


def test_non_decreasing_rule_is_an_order_failure():
    result = knuth_bendix(string_rules(("ab", "ba")), SHORTLEX_AB)
    assert result.status == CompletionStatus.ORDER_FAILURE
    assert result.iterations == 0
    assert "ab -> ba" in result.reason


def test_rule_cap_reports_divergence():
    result = knuth_bendix(string_rules(("aba", "b")), SHORTLEX_AB, max_rules=1)
    assert result.status == CompletionStatus.DIVERGED
    assert "more than 1 rules" in result.reason


def test_term_completion():
    rules = term_rules(("f[f[x]]", "g[x]"))
    (pair,) = critical_pairs(rules)
    assert pair.peak.text == "f[f[f[x]]]"

    result = knuth_bendix(rules, TermOrdering.from_chain("lpo", "f > g"))
    assert result.status == CompletionStatus.COMPLETED
    assert sorted(r.text for r in result.rules) == ["f[f[x]] -> g[x]", "f[g[x]] -> g[f[x]]"]
    assert result.provenance["f[g[x]]->g[f[x]]"][0] == "f[f[f[x]]]"


def test_interreduction_can_be_switched_off():
    on = knuth_bendix(string_rules(("aba", "b")), SHORTLEX_AB)
    off = knuth_bendix(string_rules(("aba", "b")), SHORTLEX_AB, interreduce=False)
    assert off.status == CompletionStatus.COMPLETED
    assert not any("interreduce" in line for line in off.trace)
    assert [r.text for r in off.rules] == [r.text for r in on.rules]


def test_unsupported_inputs():
    with pytest.raises(SubstrateUnsupported):
        critical_pairs([make_rule(Substrate.HYPERGRAPH, "{{x,y}}", "{{y,x}}")])
    with pytest.raises(ValueError):
        critical_pairs([make_rule(Substrate.STRING, "AAB", "ABA", level=1)])
    with pytest.raises(ValueError):
        critical_pairs(group_axiom_rules())
    with pytest.raises(SubstrateUnsupported):
        state = parse_state(Substrate.HYPERGRAPH, "{{0,1}}")
        compare_states(state, state, SHORTLEX_AB)
    assert critical_pairs([]) == []


def test_compare_states():
    u, v = parse_state(Substrate.STRING, "bba"), parse_state(Substrate.STRING, "abb")
    assert compare_states(u, v, SHORTLEX_AB) == 1
    assert compare_states(v, u, SHORTLEX_AB) == -1


# ----------------------------------------------------------------------------
def test_observer_report():
    report = observer_report(parse_state(Substrate.STRING, "ababa"), string_rules(("aba", "b")), SHORTLEX_AB, 3)
    assert report.completion.status == CompletionStatus.COMPLETED
    assert report.before[0] == (1, 0)
    assert report.after[0] == (1, 0)
    assert report.after
    data = report.dict()
    assert data["completion"]["rules"] == ["aba -> b", "bba -> abb"]


def test_observer_report_without_completion():
    report = observer_report(parse_state(Substrate.STRING, "abab"), string_rules(("ab", "ba")), SHORTLEX_AB, 2)
    assert report.completion.status == CompletionStatus.ORDER_FAILURE
    assert report.after == ()
    assert report.before


# ----------------------------------------------------------------------------
def random_word(rng, max_len=8):
    return "".join(rng.choice("ab") for _ in range(rng.randint(1, max_len)))


def test_completed_aba_is_locally_confluent():
    result = knuth_bendix(string_rules(("aba", "b")), SHORTLEX_AB)
    assert result.status == CompletionStatus.COMPLETED
    rng = random.Random(2024)
    redexes = 0
    for _ in range(1000):
        peak = parse_state(Substrate.STRING, random_word(rng))
        forms = {normal_form(target, result.rules).canonical_key for _, target in successors(peak, result.rules)}
        redexes += bool(forms)
        assert len(forms) <= 1, peak.text
    assert redexes > 100


def equivalent(lhs, rhs, rules, depth):
    """rhs is reached from lhs by at most `depth` steps of the rules used in both directions."""
    both = sorted(add_inverses(rules), key=lambda r: r.id)
    reached = {lhs.canonical_key}
    layer = [lhs]
    for _ in range(depth):
        following = []
        for state in layer:
            for _, target in successors(state, both):
                if target.canonical_key not in reached:
                    reached.add(target.canonical_key)
                    following.append(target)
        layer = following
    return rhs.canonical_key in reached


Completion = namedtuple("Completion", ["substrate", "rules", "ordering"])
COMPLETIONS = [
    Completion(Substrate.STRING, [("aba", "b")], SHORTLEX_AB),
    Completion(Substrate.TERM, [("f[f[x]]", "g[x]")], TermOrdering.from_chain("lpo", "f > g")),
]


@pytest.mark.parametrize("case", COMPLETIONS, ids=lambda c: c.substrate.value)
def test_added_rules_follow_from_the_original_rules(case):
    original = [make_rule(case.substrate, lhs, rhs, variables=("x",) if case.substrate == Substrate.TERM else ())
                for lhs, rhs in case.rules]
    result = knuth_bendix(original, case.ordering)
    assert result.status == CompletionStatus.COMPLETED
    added = [rule for rule in result.rules if rule not in original]
    assert added
    for rule in added:
        assert rule.id in result.provenance
        # variables read as constants: the equation then holds for that instance
        lhs, rhs = (parse_state(case.substrate, side) for side in rule.text.split(" -> "))
        assert equivalent(lhs, rhs, original, 3), rule.text
        peak = parse_state(case.substrate, result.provenance[rule.id][0])
        assert equivalent(peak, lhs, original, 3) or equivalent(peak, rhs, original, 3)
