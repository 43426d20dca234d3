"""
mwaystrings.py

String substrate. A string rule fires at every start position where its lhs occurs
(every split of the host into prefix, lhs, suffix); each occurrence is a separate match.
Every character carries its own token id.
"""

from dataclasses import dataclass, field
from typing import ClassVar, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from simpleLogger import CHATTY, DEBUG, INFO, WARN, ERROR  # noqa: F401
from mwaycore import Substrate, Match, Event, EmptyLhs, StaleMatch, Incomparable, State, find_matches, rewrite

# ============================================================================
@dataclass( frozen = True )
class StringState:
    symbols: Tuple[str, ...]
    token_ids: Tuple[str, ...] = field(default=(), compare=False)
    alphabet: Optional[FrozenSet[str]] = field(default=None, compare=False, repr=False)
    substrate: ClassVar[Substrate] = Substrate.STRING

    def __post_init__(self):
        if self.token_ids and len(self.token_ids) != len(self.symbols):
            raise ValueError(f"{len(self.symbols)} symbols but {len(self.token_ids)} tokens")
        if self.alphabet is not None:
            stray = sorted(set(self.symbols) - self.alphabet)
            if stray:
                raise ValueError(f"Symbols {stray} are not in the declared alphabet")

    @property
    def text(self) -> str:
        return "".join(self.symbols)

# ============================================================================
# Substrate protocol, see mwaycore
def canonical_form(payload: StringState) -> Tuple[StringState, bytes]:
    return payload, payload.text.encode('utf-8')

def format_payload(payload: StringState) -> str:
    return payload.text

def parse_payload(text: str, alphabet: Optional[Iterable[str]] = None, **_) -> StringState:
    text = text.strip()
    if any(c.isspace() for c in text):
        raise ValueError(f"Whitespace inside string state '{text}'")
    return StringState(symbols=tuple(text), alphabet=frozenset(alphabet) if alphabet else None)

def token_ids(payload: StringState) -> Tuple[str, ...]:
    return payload.token_ids

def atom_count(payload: StringState) -> int:
    return len(payload.symbols)

def with_tokens(payload: StringState, tokens: Sequence[str]) -> StringState:
    return StringState(symbols=payload.symbols, token_ids=tuple(tokens), alphabet=payload.alphabet)

def parse_pattern(text: str, variables=()) -> Tuple[str, ...]:
    return tuple(text.strip())

def format_pattern(pattern: Sequence[str]) -> str:
    return "".join(pattern)

def pattern_payload(pattern: Sequence[str]) -> StringState:
    return StringState(symbols=tuple(pattern))

def payload_pattern(payload: StringState) -> Tuple[str, ...]:
    return payload.symbols

def normalize_patterns(lhs, rhs):
    return tuple(lhs), tuple(rhs)

def reverse_patterns(lhs, rhs):
    return rhs, lhs

def validate_rule(rule) -> None:
    if not rule.lhs and not rule.anchored:
        raise EmptyLhs(f"Rule '{rule.id}' has an empty lhs, which matches everywhere")

# ============================================================================
def enumerate_matches(s: StringState, rule) -> List[Match]:
    """Matches in increasing start position."""
    if rule.anchored:
        return find_matches(s, [rule])
    lhs = rule.lhs
    if not lhs:
        raise EmptyLhs(f"Rule '{rule.id}' has an empty lhs")
    n = len(lhs)
    symbols = s.symbols
    return [Match(rule=rule, binding=(p,), label=f"p={p}")
            for p in range(len(symbols) - n + 1)
            if symbols[p:p + n] == lhs]

def matched_tokens(s: StringState, match: Match) -> Tuple[str, ...]:
    (p,) = match.binding
    n = len(match.rule.lhs)
    if s.symbols[p:p + n] != match.rule.lhs:
        raise StaleMatch(f"'{format_pattern(match.rule.lhs)}' is not at position {p} of '{s.text}'")
    return s.token_ids[p:p + n]

def apply_binding(s: StringState, match: Match, event_id: str) -> Tuple[StringState, Tuple[str, ...]]:
    (p,) = match.binding
    n = len(match.rule.lhs)
    rhs = match.rule.rhs
    produced = tuple(f"{event_id}.{k}" for k in range(len(rhs)))
    result = StringState(symbols=s.symbols[:p] + tuple(rhs) + s.symbols[p + n:],
                         token_ids=s.token_ids[:p] + produced + s.token_ids[p + n:],
                         alphabet=s.alphabet)
    return result, produced

def apply_match(s, m: Match, generation: int = 0) -> Tuple[StringState, Event]:
    payload = s.payload if isinstance(s, State) else s
    result, event, _ = rewrite(payload, m, generation)
    return result, event

# ============================================================================
def compare(u: Sequence[str], v: Sequence[str], ordering) -> int:
    """Shortlex on symbol sequences: -1, 0 or 1. Ranks come from the ordering's precedence."""
    if ordering.kind.value != "shortlex":
        raise Incomparable(f"Strings are only ordered by shortlex, not {ordering.kind.value}")
    if len(u) != len(v):
        return -1 if len(u) < len(v) else 1
    for a, b in zip(u, v):
        if a != b:
            return -1 if ordering.rank(a) < ordering.rank(b) else 1
    return 0
