"""
mwaycore.py

Substrate-agnostic half of the rewriting engine. States, rules, matches, events and
rule towers live here, together with the successor function that strings,
hypergraphs and terms all plug into.

Substrate modules (mwaystrings, mwayhypergraphs, mwayterms) are imported lazily by
substrate_module() and provide the same set of module-level functions:
    canonical_form, format_payload, parse_payload, token_ids, with_tokens, atom_count,
    parse_pattern, format_pattern, pattern_payload, payload_pattern, normalize_patterns,
    validate_rule, reverse_patterns, enumerate_matches, matched_tokens, apply_binding
"""

import importlib
from enum import Enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from simpleLogger import CHATTY, DEBUG, INFO, WARN, ERROR  # noqa: F401
from mwaymisc import stable_digest

# ============================================================================
class Substrate(str, Enum):
    STRING     = "string"
    HYPERGRAPH = "hypergraph"
    TERM       = "term"

_substrate_modules = {
    Substrate.STRING:     "mwaystrings",
    Substrate.HYPERGRAPH: "mwayhypergraphs",
    Substrate.TERM:       "mwayterms",
}

def substrate_module(substrate: Substrate):
    return importlib.import_module(_substrate_modules[Substrate(substrate)])

# ============================================================================
# Errors. Everything the library raises derives from RewriteError.
class RewriteError(Exception):
    pass

class SubstrateMismatch(RewriteError):
    pass

class SubstrateUnsupported(RewriteError):
    pass

class NonInvertibleRule(RewriteError):
    pass

class StaleMatch(RewriteError):
    pass

class EmptyLhs(RewriteError):
    pass

class BareVariableLhs(RewriteError):
    pass

class ArityError(RewriteError):
    pass

class Incomparable(RewriteError):
    pass

class FrontierLimitExceeded(RewriteError):
    pass

class CyclicGraph(RewriteError):
    pass

class KeyNotFound(RewriteError):
    pass

class InvalidFoliation(RewriteError):
    pass

class DuplicateTokenProduction(RewriteError):
    pass

class LengthMismatch(RewriteError):
    pass

class EndpointMismatch(RewriteError):
    pass

class LocatedError(RewriteError):
    """Error tied to a position in a rule file. Lines and columns count from 1."""
    def __init__(self, message: str, line: int = 0, column: int = 0, expected: Optional[str] = None):
        self.message  = message
        self.line     = line
        self.column   = column
        self.expected = expected
        super().__init__(str(self))

    def __str__(self) -> str:
        text = f"line {self.line}, column {self.column}: {self.message}"
        if self.expected:
            text += f" (expected {self.expected})"
        return text

class ParseError(LocatedError):
    pass

class SemanticError(LocatedError):
    pass

# ============================================================================
@dataclass( frozen = True )
class State:
    """A canonical state. Equality and hashing go through canonical_key only."""
    substrate: Substrate
    payload: Any = field(compare=False, repr=False)
    canonical_key: bytes = b""

    # ------------------------------------------------
    @classmethod
    def of(cls, payload) -> "State":
        module = substrate_module(payload.substrate)
        canonical, key = module.canonical_form(payload)
        return cls(substrate=payload.substrate, payload=canonical, canonical_key=key)

    # ------------------------------------------------
    @property
    def text(self) -> str:
        return substrate_module(self.substrate).format_payload(self.payload)

    @property
    def tokens(self) -> Tuple[str, ...]:
        return tuple(substrate_module(self.substrate).token_ids(self.payload))

    def __str__(self) -> str:
        return self.text

# ============================================================================
def initial_tokens(prefix: str, count: int) -> Tuple[str, ...]:
    return tuple(f"{prefix}.{k}" for k in range(count))

def parse_state(substrate: Substrate, text: str, index: int = 0, **header) -> State:
    """Parse state text and stamp it with initial tokens i<index>.<k>."""
    return State.of(parse_payload(substrate, text, index, **header))

def parse_payload(substrate: Substrate, text: str, index: int = 0, **header):
    """Like parse_state, but keeps the payload exactly as written (no relabeling)."""
    module = substrate_module(substrate)
    payload = module.parse_payload(text, **header)
    return module.with_tokens(payload, initial_tokens(f"i{index}", module.atom_count(payload)))

# ============================================================================
@dataclass( frozen = True )
class Rule:
    id: str
    substrate: Substrate
    lhs: Any
    rhs: Any
    level: int = 0
    anchored: bool = False
    injective: bool = False
    # term rules only: what a bare lhs variable or an rhs-only variable ranges over
    constants: Tuple[str, ...] = ()

    # ------------------------------------------------
    @property
    def text(self) -> str:
        module = substrate_module(self.substrate)
        return f"{module.format_pattern(self.lhs)} -> {module.format_pattern(self.rhs)}"

    def __str__(self) -> str:
        return self.text if not self.level else f"{self.text} @level {self.level}"

    # ------------------------------------------------
    def reverse(self) -> "Rule":
        module = substrate_module(self.substrate)
        lhs, rhs = module.reverse_patterns(self.lhs, self.rhs)
        if self.id == default_rule_id(self.substrate, self.lhs, self.rhs, self.level):
            rid = default_rule_id(self.substrate, lhs, rhs, self.level)
        elif self.id.endswith('~'):
            rid = self.id[:-1]
        else:
            rid = self.id + '~'
        reversed_rule = Rule(id=rid, substrate=self.substrate, lhs=lhs, rhs=rhs,
                             level=self.level, anchored=self.anchored, injective=self.injective,
                             constants=self.constants)
        try:
            module.validate_rule(reversed_rule)
        except (RewriteError, ValueError) as exc:
            raise NonInvertibleRule(f"Rule '{self.id}' has no valid reverse: {exc}") from exc
        return reversed_rule

# ============================================================================
def default_rule_id(substrate: Substrate, lhs, rhs, level: int = 0) -> str:
    module = substrate_module(substrate)
    rid = f"{module.format_pattern(lhs)}->{module.format_pattern(rhs)}".replace(' ', '')
    return rid if not level else f"{rid}@{level}"

def make_rule(substrate: Substrate,
              lhs,
              rhs,
              level: int = 0,
              anchored: Optional[bool] = None,
              variables: Iterable[str] = (),
              injective: bool = False,
              rule_id: Optional[str] = None,
              constants: Iterable[str] = (),
              ) -> Rule:
    """
    Build and validate a rule. lhs/rhs may be text (parsed by the substrate) or patterns.
    Homotopy levels (k >= 1) default to anchored whole-state matching.
    constants (terms only): the ground constants a bare lhs variable or an rhs-only
    variable ranges over, e.g. a' in e -> g[a', inv[a']].
    """
    substrate = Substrate(substrate)
    constants = tuple(sorted(set(constants)))
    if constants and substrate != Substrate.TERM:
        raise ValueError(f"Constant ranges are defined for term rules only, not {substrate.value} rules")
    module = substrate_module(substrate)
    variables = frozenset(variables)
    if isinstance(lhs, str):
        lhs = module.parse_pattern(lhs, variables)
    if isinstance(rhs, str):
        rhs = module.parse_pattern(rhs, variables)
    if level < 0:
        raise ValueError(f"Rule level must be non-negative, got {level}")
    if anchored is None:
        anchored = level >= 1
    lhs, rhs = module.normalize_patterns(lhs, rhs)
    rule = Rule(id=rule_id or default_rule_id(substrate, lhs, rhs, level),
                substrate=substrate, lhs=lhs, rhs=rhs, level=level,
                anchored=anchored, injective=injective, constants=constants)
    module.validate_rule(rule)
    return rule

def whole_state_rule(source: State, target: State, level: int, anchored: bool = True) -> Rule:
    """The rule source -> target over entire states, as produced by homotopy synthesis."""
    if source.substrate != target.substrate:
        raise SubstrateMismatch(f"Cannot pair a {source.substrate.value} state with a {target.substrate.value} state")
    module = substrate_module(source.substrate)
    return make_rule(source.substrate,
                     module.payload_pattern(source.payload),
                     module.payload_pattern(target.payload),
                     level=level, anchored=anchored)

@lru_cache(maxsize=4096)
def anchor_key(rule: Rule) -> bytes:
    module = substrate_module(rule.substrate)
    return module.canonical_form(module.pattern_payload(rule.lhs))[1]

# ============================================================================
@dataclass( frozen = True )
class Match:
    rule: Rule
    binding: Tuple
    label: str = ""

    @property
    def rule_id(self) -> str:
        return self.rule.id

@dataclass( frozen = True )
class Event:
    id: str
    rule_id: str
    level: int
    source_state_key: bytes
    target_state_key: bytes
    consumed_tokens: frozenset
    produced_tokens: frozenset
    generation: int
    binding: str = ""

    def with_produced(self, produced: Iterable[str]) -> "Event":
        return Event(id=self.id, rule_id=self.rule_id, level=self.level,
                     source_state_key=self.source_state_key, target_state_key=self.target_state_key,
                     consumed_tokens=self.consumed_tokens, produced_tokens=frozenset(produced),
                     generation=self.generation, binding=self.binding)

# ============================================================================
def _check_substrate(substrate: Substrate, rules: Iterable[Rule]) -> None:
    for rule in rules:
        if rule.substrate != substrate:
            raise SubstrateMismatch(
                f"Rule '{rule.id}' is a {rule.substrate.value} rule, state is {Substrate(substrate).value}")

def find_matches(payload, rules: Sequence[Rule]) -> List[Match]:
    """All matches of all rules on a (possibly non-canonical) payload, rules in id order."""
    module = substrate_module(payload.substrate)
    _check_substrate(payload.substrate, rules)
    matches = []
    key = None
    for rule in sorted(rules, key=lambda r: r.id):
        if rule.anchored:
            if key is None:
                key = module.canonical_form(payload)[1]
            if key == anchor_key(rule):
                matches.append(Match(rule=rule, binding=(), label="whole"))
        else:
            matches.extend(module.enumerate_matches(payload, rule))
    return matches

def enumerate_matches(state: State, rule: Rule) -> List[Match]:
    return find_matches(state.payload, [rule])

# ----------------------------------------------------------------------------
def event_id_for(source_key: bytes, rule_id: str, binding: str, consumed: Sequence[str]) -> str:
    return "e" + stable_digest(source_key, rule_id, binding, tuple(sorted(consumed)))

def rewrite(payload, match: Match, generation: int = 0, source_key: Optional[bytes] = None):
    """
    Apply one match. Returns (raw result payload, Event, canonical target State).
    The raw payload keeps the host's labels and token order so callers can keep rewriting it.
    """
    module = substrate_module(payload.substrate)
    rule = match.rule
    if source_key is None:
        source_key = module.canonical_form(payload)[1]
    if rule.anchored:
        if module.canonical_form(payload)[1] != anchor_key(rule):
            raise StaleMatch(f"Anchored rule '{rule.id}' no longer matches the whole state")
        consumed = tuple(module.token_ids(payload))
        event_id = event_id_for(source_key, rule.id, match.label, consumed)
        result = module.pattern_payload(rule.rhs)
        produced = tuple(f"{event_id}.{k}" for k in range(module.atom_count(result)))
        result = module.with_tokens(result, produced)
    else:
        consumed = module.matched_tokens(payload, match)
        event_id = event_id_for(source_key, rule.id, match.label, consumed)
        result, produced = module.apply_binding(payload, match, event_id)

    target = State.of(result)
    event = Event(id=event_id, rule_id=rule.id, level=rule.level,
                  source_state_key=source_key, target_state_key=target.canonical_key,
                  consumed_tokens=frozenset(consumed), produced_tokens=frozenset(produced),
                  generation=generation, binding=match.label)
    CHATTY(f"{event.id}: {rule.id} at {match.label} -> {target.text}")
    return result, event, target

# ============================================================================
def successors(state: State, rules: Iterable[Rule], generation: int = 1) -> List[Tuple[Event, State]]:
    """One (Event, State) per match of any rule in state. Pure: safe from any thread."""
    rules = list(rules)
    _check_substrate(state.substrate, rules)
    found = []
    for match in find_matches(state.payload, rules):
        _, event, target = rewrite(state.payload, match, generation, state.canonical_key)
        found.append((event, target))
    return found

def add_inverses(rules: Iterable[Rule]) -> Set[Rule]:
    rules = set(rules)
    return rules | {rule.reverse() for rule in rules}

# ============================================================================
@dataclass( frozen = True )
class RuleTower:
    """Rule sets R0 ... Rn; levels[k] holds exactly the rules of level k."""
    levels: Tuple[Tuple[Rule, ...], ...]

    def __post_init__(self):
        if not self.levels or not self.levels[0]:
            raise ValueError("A rule tower needs a nonempty level 0")
        substrate = self.levels[0][0].substrate
        for k, level in enumerate(self.levels):
            for rule in level:
                if rule.level != k:
                    raise ValueError(f"Rule '{rule.id}' has level {rule.level} but sits in level {k}")
                if rule.substrate != substrate:
                    raise SubstrateMismatch(f"Rule '{rule.id}' mixes substrates within one tower")

    # ------------------------------------------------
    @classmethod
    def from_rules(cls, rules: Iterable[Rule]) -> "RuleTower":
        rules = list(rules)
        height = max((r.level for r in rules), default=0)
        levels: List[List[Rule]] = [[] for _ in range(height + 1)]
        for rule in rules:
            if rule not in levels[rule.level]:
                levels[rule.level].append(rule)
        return cls(levels=tuple(tuple(level) for level in levels))

    # ------------------------------------------------
    @property
    def height(self) -> int:
        return len(self.levels) - 1

    @property
    def substrate(self) -> Substrate:
        return self.levels[0][0].substrate

    def rules_up_to(self, max_level: Optional[int] = None) -> Tuple[Rule, ...]:
        top = self.height if max_level is None else min(max_level, self.height)
        return tuple(rule for level in self.levels[:top + 1] for rule in level)

    def all_rules(self) -> Tuple[Rule, ...]:
        return self.rules_up_to()

    def with_rules(self, rules: Iterable[Rule]) -> "RuleTower":
        return RuleTower.from_rules(list(self.all_rules()) + list(rules))

    def with_inverses(self) -> "RuleTower":
        return RuleTower.from_rules(sorted(add_inverses(self.all_rules()), key=lambda r: (r.level, r.id)))

def as_tower(rules) -> RuleTower:
    if isinstance(rules, RuleTower):
        return rules
    return RuleTower.from_rules(rules)
