"""
mwaycompletion.py

Critical pairs, bounded joinability and Knuth-Bendix completion for string and term
rules, plus the observer report: branchial sizes per slice before and after completion.
"""

import dataclasses
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from simpleLogger import CHATTY, DEBUG, INFO, WARN, ERROR, TRACE  # noqa: F401
from mwaycore import (Substrate, State, Rule, RuleTower, as_tower, substrate_module, initial_tokens, make_rule,
                      find_matches, rewrite, successors, Incomparable, SubstrateUnsupported, SubstrateMismatch)
from mwayevolution import evolve, foliate, branchial_sizes
from mwaymisc import resident_memory_mb
import mwaystrings
import mwayterms
from mwayterms import Term, Var, TermOrdering

# ============================================================================
@dataclass( frozen = True )
class CriticalPair:
    peak: State
    left_result: State
    right_result: State
    overlap: str
    rule_ids: Tuple[str, str] = ("", "")

    @property
    def trivial(self) -> bool:
        return self.left_result == self.right_result

# ----------------------------------------------------------------------------
def _stamp(payload) -> State:
    """Canonical State with fresh tokens, so it can be rewritten."""
    module = substrate_module(payload.substrate)
    return State.of(module.with_tokens(payload, initial_tokens("cp", module.atom_count(payload))))

def _rule_substrate(rules: Sequence[Rule]) -> Optional[Substrate]:
    if not rules:
        return None
    substrate = rules[0].substrate
    for rule in rules:
        if rule.substrate != substrate:
            raise SubstrateMismatch("Rules mix substrates")
        if rule.level != 0:
            raise ValueError(f"Critical pairs are computed for level 0 rules only, '{rule.id}' has level {rule.level}")
    if substrate == Substrate.HYPERGRAPH:
        raise SubstrateUnsupported("Critical pairs are not defined for hypergraph rules")
    for rule in rules:
        if substrate == Substrate.TERM and mwayterms.ranged_variables(rule):
            raise ValueError(f"Rule '{rule.id}' ranges variables over constants; critical pairs need lhs-bound variables")
    return substrate

def _string_pairs(r1: Rule, r2: Rule) -> List[CriticalPair]:
    l1, l2 = r1.lhs, r2.lhs
    found = []
    # suffix of l1 == prefix of l2
    for k in range(1, min(len(l1), len(l2))):
        if l1[-k:] == l2[:k]:
            peak = l1 + l2[k:]
            left = r1.rhs + l2[k:]
            right = l1[:-k] + r2.rhs
            found.append((peak, left, right, f"overlap k={k}"))
    # l2 inside l1
    if r1 != r2 and len(l2) <= len(l1):
        for p in range(len(l1) - len(l2) + 1):
            if l1[p:p + len(l2)] == l2:
                right = l1[:p] + r2.rhs + l1[p + len(l2):]
                found.append((l1, r1.rhs, right, f"contains p={p}"))
    to_state = lambda symbols: _stamp(mwaystrings.pattern_payload(symbols))  # noqa: E731
    return [CriticalPair(peak=to_state(peak), left_result=to_state(left), right_result=to_state(right),
                         overlap=overlap, rule_ids=(r1.id, r2.id))
            for peak, left, right, overlap in found]

def _tidy_variables(*terms):
    """Rename unifier variables back to short names, in order of first appearance."""
    mapping: Dict[str, str] = {}
    used: Set[str] = set()
    for t in terms:
        for _, node in mwayterms.subterms(t):
            if isinstance(node, Var) and node.name not in mapping:
                name = node.name[:-2] if node.name.endswith(("_1", "_2")) else node.name
                while name in used:
                    name += "'"
                mapping[node.name] = name
                used.add(name)
    subst = {old: Var(name=new) for old, new in mapping.items()}
    return [mwayterms.substitute(t, subst) for t in terms]

def _term_pairs(r1: Rule, r2: Rule) -> List[CriticalPair]:
    outer = mwayterms.rename_variables(r1.lhs, "_1")
    outer_rhs = mwayterms.rename_variables(r1.rhs, "_1")
    inner = mwayterms.rename_variables(r2.lhs, "_2")
    inner_rhs = mwayterms.rename_variables(r2.rhs, "_2")
    found = []
    for pos, sub in mwayterms.subterms(outer):
        if isinstance(sub, Var):
            continue
        if not pos and r1 == r2:
            continue
        sigma = mwayterms.unify(sub, inner)
        if sigma is None:
            continue
        peak = mwayterms.substitute(outer, sigma)
        left = mwayterms.substitute(outer_rhs, sigma)
        right = mwayterms.replace_at(peak, pos, mwayterms.substitute(inner_rhs, sigma))
        peak, left, right = _tidy_variables(peak, left, right)
        found.append(CriticalPair(peak=_stamp(peak), left_result=_stamp(left), right_result=_stamp(right),
                                  overlap=f"at={list(pos)}", rule_ids=(r1.id, r2.id)))
    return found

def critical_pairs(rules: Iterable[Rule]) -> List[CriticalPair]:
    """All critical pairs over ordered rule pairs (sorted by id); mirror images listed once."""
    rules = sorted(rules, key=lambda r: r.id)
    substrate = _rule_substrate(rules)
    if substrate is None:
        return []
    pairs: List[CriticalPair] = []
    seen = set()
    for r1 in rules:
        for r2 in rules:
            found = _string_pairs(r1, r2) if substrate == Substrate.STRING else _term_pairs(r1, r2)
            for pair in found:
                ident = (pair.peak, frozenset((pair.left_result.canonical_key, pair.right_result.canonical_key)))
                if ident in seen:
                    continue
                seen.add(ident)
                pairs.append(pair)
    CHATTY(f"{len(pairs)} critical pairs for {len(rules)} rules")
    return pairs

# ============================================================================
def _reachable(state: State, rules: Sequence[Rule], depth: int) -> Set[bytes]:
    reached = {state.canonical_key}
    layer = [state]
    for _ in range(depth):
        following = []
        for s in layer:
            for _, target in successors(s, rules):
                if target.canonical_key not in reached:
                    reached.add(target.canonical_key)
                    following.append(target)
        layer = following
    return reached

def joinable(pair: CriticalPair, rules: Iterable[Rule], depth: int) -> bool:
    """Both results reach a common state within `depth` rewrites each."""
    rules = list(rules)
    return bool(_reachable(pair.left_result, rules, depth) & _reachable(pair.right_result, rules, depth))

def _position(match) -> Tuple:
    return (match.binding[0],) if match.binding else ()

def normal_form(state: State, rules: Iterable[Rule], max_steps: int = 1000) -> State:
    """Leftmost-outermost rewriting until no rule applies."""
    rules = list(rules)
    payload = state.payload
    for _ in range(max_steps):
        matches = find_matches(payload, rules)
        if not matches:
            return State.of(payload)
        match = min(matches, key=lambda m: (_position(m), m.rule.id))
        payload, _, _ = rewrite(payload, match)
    WARN(f"No normal form for {state.text} within {max_steps} steps")
    return State.of(payload)

# ============================================================================
class CompletionStatus(str, Enum):
    COMPLETED     = "Completed"
    DIVERGED      = "Diverged"
    ORDER_FAILURE = "OrderFailure"

@dataclass( frozen = True )
class CompletionResult:
    status: CompletionStatus
    rules: Tuple[Rule, ...]
    trace: Tuple[str, ...] = ()
    iterations: int = 0
    reason: str = ""
    # added rule id -> (peak text, ids of the two overlapping rules)
    provenance: Dict[str, Tuple[str, Tuple[str, str]]] = field(default_factory=dict, compare=False)

    def dict(self) -> Dict:
        return {
            'status':     self.status.value,
            'rules':      [rule.text for rule in self.rules],
            'iterations': self.iterations,
            'reason':     self.reason,
            'provenance': {rid: {'peak': peak, 'parents': list(parents)}
                           for rid, (peak, parents) in sorted(self.provenance.items())},
        }

def compare_states(u: State, v: State, ordering: TermOrdering) -> int:
    """-1, 0 or 1; 0 also for pairs the ordering cannot decide."""
    try:
        if u.substrate == Substrate.STRING:
            return mwaystrings.compare(u.payload.symbols, v.payload.symbols, ordering)
        if u.substrate == Substrate.TERM:
            return int(mwayterms.compare(u.payload, v.payload, ordering))
    except Incomparable:
        return 0
    raise SubstrateUnsupported(f"No reduction ordering for {u.substrate.value} states")

def _pattern_state(rule: Rule, side) -> State:
    return _stamp(substrate_module(rule.substrate).pattern_payload(side))

def _oriented_rule(u: State, v: State, ordering: TermOrdering) -> Optional[Rule]:
    c = compare_states(u, v, ordering)
    if c == 0:
        return None
    lhs, rhs = (u, v) if c > 0 else (v, u)
    module = substrate_module(u.substrate)
    return make_rule(u.substrate, module.payload_pattern(lhs.payload), module.payload_pattern(rhs.payload))

def knuth_bendix(rules: Iterable[Rule],
                 ordering: TermOrdering,
                 max_rules: int = 50,
                 max_iters: int = 50,
                 interreduce: bool = True,
                 ) -> CompletionResult:
    """
    Each round orients every critical pair whose normal forms differ into a new rule,
    then (optionally) interreduces. Stops when a round adds nothing.
    """
    current: List[Rule] = sorted(as_tower(rules).all_rules(), key=lambda r: r.id)
    _rule_substrate(current)
    # oriented rules carry no constants, so input rules drop theirs to compare equal
    current = [dataclasses.replace(r, constants=()) for r in current]
    trace: List[str] = []
    provenance: Dict[str, Tuple[str, Tuple[str, str]]] = {}

    def log(line: str) -> None:
        trace.append(line)
        TRACE(line)

    def result(status, iterations, reason=""):
        return CompletionResult(status=status, rules=tuple(sorted(current, key=lambda r: r.id)),
                                trace=tuple(trace), iterations=iterations, reason=reason, provenance=provenance)

    for rule in current:
        if compare_states(_pattern_state(rule, rule.lhs), _pattern_state(rule, rule.rhs), ordering) <= 0:
            reason = f"initial rule {rule.text} is not decreasing under {ordering.kind.value}"
            log(f"iteration 0 order failure: {reason}")
            return result(CompletionStatus.ORDER_FAILURE, 0, reason)

    for iteration in range(1, max_iters + 1):
        added = 0
        for pair in critical_pairs(current):
            left = normal_form(pair.left_result, current)
            right = normal_form(pair.right_result, current)
            if left == right:
                continue
            rule = _oriented_rule(left, right, ordering)
            if rule is None:
                reason = f"cannot orient {left.text} = {right.text} from peak {pair.peak.text}"
                log(f"iteration {iteration} pair {pair.peak.text}: {reason}")
                return result(CompletionStatus.ORDER_FAILURE, iteration, reason)
            if rule in current:
                continue
            current.append(rule)
            provenance[rule.id] = (pair.peak.text, pair.rule_ids)
            added += 1
            log(f"iteration {iteration} pair {pair.peak.text}: {left.text} <> {right.text} "
                f"orient {rule.text} added {rule.id}")
            if len(current) > max_rules:
                return result(CompletionStatus.DIVERGED, iteration, f"more than {max_rules} rules")
        if interreduce:
            _interreduce(current, ordering, provenance, log, iteration)
        DEBUG(f"Completion iteration {iteration}: {len(current)} rules, {resident_memory_mb():.0f} MB")
        if not added:
            INFO(f"Completion finished after {iteration} iterations with {len(current)} rules")
            return result(CompletionStatus.COMPLETED, iteration)
    return result(CompletionStatus.DIVERGED, max_iters, f"no fixpoint within {max_iters} iterations")

def _interreduce(current: List[Rule], ordering, provenance, log, iteration: int) -> None:
    """Drop rules whose lhs another rule reduces (re-adding the equation if still needed); normalize rhs."""
    changed = True
    while changed:
        changed = False
        for rule in list(current):
            others = [r for r in current if r != rule]
            lhs = _pattern_state(rule, rule.lhs)
            if others and find_matches(lhs.payload, others):
                current.remove(rule)
                left = normal_form(lhs, current)
                right = normal_form(_pattern_state(rule, rule.rhs), current)
                log(f"iteration {iteration} interreduce: removed {rule.id}")
                if left != right:
                    replacement = _oriented_rule(left, right, ordering)
                    if replacement is not None and replacement not in current:
                        current.append(replacement)
                        provenance[replacement.id] = (lhs.text, (rule.id, rule.id))
                        log(f"iteration {iteration} interreduce: added {replacement.id}")
                changed = True
                break
            rhs = _pattern_state(rule, rule.rhs)
            reduced = normal_form(rhs, current)
            if reduced != rhs:
                module = substrate_module(rule.substrate)
                replacement = make_rule(rule.substrate, rule.lhs, module.payload_pattern(reduced.payload))
                current[current.index(rule)] = replacement
                provenance.setdefault(replacement.id, provenance.get(rule.id, (lhs.text, (rule.id, rule.id))))
                log(f"iteration {iteration} interreduce: {rule.id} becomes {replacement.id}")
                changed = True
                break

# ============================================================================
@dataclass( frozen = True )
class ObserverReport:
    before: Tuple[Tuple[int, int], ...]
    after: Tuple[Tuple[int, int], ...]
    completion: CompletionResult

    def dict(self) -> Dict:
        return {
            'before':     [list(x) for x in self.before],
            'after':      [list(x) for x in self.after],
            'completion': self.completion.dict(),
        }

def observer_report(initial: State,
                    rules: Iterable[Rule],
                    ordering: TermOrdering,
                    steps: int,
                    ancestor_depth: int = 1,
                    **completion_args,
                    ) -> ObserverReport:
    """Branchial (states, edges) per slice under the original rules and under their completion."""
    rules = list(rules)
    completion = knuth_bendix(rules, ordering, **completion_args)
    before = branchial_sizes(evolve(initial, rules, steps), ancestor_depth=ancestor_depth)
    if completion.status == CompletionStatus.COMPLETED:
        after = branchial_sizes(evolve(initial, completion.rules, steps), ancestor_depth=ancestor_depth)
    else:
        WARN(f"Completion {completion.status.value}, no post-completion evolution")
        after = []
    return ObserverReport(before=tuple(before), after=tuple(after), completion=completion)
