"""
mwayterms.py

First-order term substrate: ground terms as states, terms with variable leaves as
rule patterns, one-way matching at every subterm position (pre-order), syntactic
unification, and the reduction orderings used by completion.

Text form: g[x, g[y, z]]; constants are bare identifiers; which identifiers are
variables is decided by the caller (rule-file header).
"""

import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from itertools import product
from typing import ClassVar, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from simpleLogger import CHATTY, DEBUG, INFO, WARN, ERROR  # noqa: F401
from mwaycore import (Substrate, Match, Event, State, StaleMatch, BareVariableLhs, ArityError, Incomparable,
                      ParseError, find_matches, rewrite)

# ============================================================================
@dataclass( frozen = True )
class Var:
    name: str
    token: str = field(default="", compare=False)
    substrate: ClassVar[Substrate] = Substrate.TERM

    def __str__(self) -> str:
        return self.name

@dataclass( frozen = True )
class Term:
    head: str
    args: Tuple[Union["Term", Var], ...] = ()
    token: str = field(default="", compare=False)
    substrate: ClassVar[Substrate] = Substrate.TERM

    def __str__(self) -> str:
        return format_payload(self)

TermLike = Union[Term, Var]
Position = Tuple[int, ...]

# ============================================================================
def size(t: TermLike) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)

def subterms(t: TermLike, pos: Position = ()) -> Iterator[Tuple[Position, TermLike]]:
    """Pre-order."""
    yield pos, t
    if isinstance(t, Term):
        for i, a in enumerate(t.args):
            yield from subterms(a, pos + (i,))

def subterm_at(t: TermLike, pos: Position) -> TermLike:
    for i in pos:
        t = t.args[i]
    return t

def replace_at(t: TermLike, pos: Position, new: TermLike) -> TermLike:
    if not pos:
        return new
    i = pos[0]
    args = t.args[:i] + (replace_at(t.args[i], pos[1:], new),) + t.args[i + 1:]
    return Term(head=t.head, args=args, token=t.token)

def variables_of(t: TermLike) -> Counter:
    return Counter(node.name for _, node in subterms(t) if isinstance(node, Var))

def is_ground(t: TermLike) -> bool:
    return not variables_of(t)

def check_arities(terms: Iterable[TermLike]) -> Dict[str, int]:
    """Symbol -> arity over all terms; ArityError when one symbol is used two ways."""
    arities: Dict[str, int] = {}
    for t in terms:
        for _, node in subterms(t):
            if isinstance(node, Var):
                continue
            known = arities.setdefault(node.head, len(node.args))
            if known != len(node.args):
                raise ArityError(f"Symbol '{node.head}' used with arity {known} and {len(node.args)}")
    return arities

# ============================================================================
_token_re = re.compile(r"\s*(?:([A-Za-z0-9_']+)|(\[)|(\])|(,))")

def parse_term(text: str, variables: Iterable[str] = ()) -> TermLike:
    variables = frozenset(variables)
    pos = 0

    def next_token():
        nonlocal pos
        m = _token_re.match(text, pos)
        if not m:
            return None, pos
        return m, m.end()

    def term() -> TermLike:
        nonlocal pos
        m, end = next_token()
        if m is None or not m.group(1):
            raise ParseError("expected a symbol", 1, pos + 1, expected="identifier")
        name = m.group(1)
        pos = end
        m2, end2 = next_token()
        if m2 is not None and m2.group(2):
            if name in variables:
                raise ParseError(f"variable '{name}' used as a function symbol", 1, pos + 1)
            pos = end2
            args = [term()]
            while True:
                m3, end3 = next_token()
                if m3 is not None and m3.group(4):
                    pos = end3
                    args.append(term())
                    continue
                if m3 is not None and m3.group(3):
                    pos = end3
                    break
                raise ParseError("unclosed argument list", 1, pos + 1, expected="',' or ']'")
            return Term(head=name, args=tuple(args))
        if name in variables:
            return Var(name=name)
        return Term(head=name)

    result = term()
    if text[pos:].strip():
        raise ParseError(f"trailing text {text[pos:].strip()!r}", 1, pos + 1, expected="end of term")
    return result

# ============================================================================
# Substrate protocol, see mwaycore
def format_payload(t: TermLike) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.head
    return f"{t.head}[{', '.join(format_payload(a) for a in t.args)}]"

def canonical_form(t: TermLike) -> Tuple[TermLike, bytes]:
    return t, format_payload(t).encode('utf-8')

def parse_payload(text: str, variables: Iterable[str] = (), **_) -> Term:
    t = parse_term(text, variables)
    if not is_ground(t):
        raise ValueError(f"State term '{text.strip()}' contains variables {sorted(variables_of(t))}")
    return t

def token_ids(t: TermLike) -> Tuple[str, ...]:
    return tuple(node.token for _, node in subterms(t))

def atom_count(t: TermLike) -> int:
    return size(t)

def with_tokens(t: TermLike, tokens: Sequence[str]) -> TermLike:
    it = iter(tokens)

    def stamp(node: TermLike) -> TermLike:
        token = next(it)
        if isinstance(node, Var):
            return Var(name=node.name, token=token)
        return Term(head=node.head, args=tuple(stamp(a) for a in node.args), token=token)

    return stamp(t)

def parse_pattern(text: str, variables=()) -> TermLike:
    return parse_term(text, variables)

def format_pattern(t: TermLike) -> str:
    return format_payload(t)

def pattern_payload(t: TermLike) -> TermLike:
    return t

def payload_pattern(t: TermLike) -> TermLike:
    return t

def normalize_patterns(lhs, rhs):
    return lhs, rhs

def reverse_patterns(lhs, rhs):
    return rhs, lhs

def ranged_variables(rule) -> Tuple[str, ...]:
    """Variables bound by enumeration over rule.constants: a bare lhs variable and rhs-only variables."""
    names = set(variables_of(rule.rhs)) - set(variables_of(rule.lhs))
    if isinstance(rule.lhs, Var):
        names.add(rule.lhs.name)
    return tuple(sorted(names))

def validate_rule(rule) -> None:
    if isinstance(rule.lhs, Var) and not rule.anchored and not rule.constants:
        raise BareVariableLhs(f"Rule '{rule.id}' has a bare variable lhs and no constants to range over")
    unbound = sorted(set(variables_of(rule.rhs)) - set(variables_of(rule.lhs)))
    if unbound and not rule.constants:
        raise ValueError(f"Rule '{rule.id}': rhs variables {unbound} do not occur in the lhs "
                         "and no constants are declared")
    check_arities([rule.lhs, rule.rhs] + [Term(head=c) for c in rule.constants])

# ============================================================================
def match_term(pattern: TermLike, t: TermLike, subst: Optional[Dict[str, TermLike]] = None) -> Optional[Dict[str, TermLike]]:
    """One-way matching; repeated variables must bind equal subterms."""
    subst = dict(subst or {})

    def walk(p: TermLike, u: TermLike) -> bool:
        if isinstance(p, Var):
            if p.name in subst:
                return subst[p.name] == u
            subst[p.name] = u
            return True
        if isinstance(u, Var) or p.head != u.head or len(p.args) != len(u.args):
            return False
        return all(walk(pa, ua) for pa, ua in zip(p.args, u.args))

    return subst if walk(pattern, t) else None

def substitute(t: TermLike, subst: Dict[str, TermLike]) -> TermLike:
    if isinstance(t, Var):
        return subst.get(t.name, t)
    return Term(head=t.head, args=tuple(substitute(a, subst) for a in t.args))

def rename_variables(t: TermLike, suffix: str) -> TermLike:
    if isinstance(t, Var):
        return Var(name=t.name + suffix)
    return Term(head=t.head, args=tuple(rename_variables(a, suffix) for a in t.args))

def unify(s: TermLike, t: TermLike) -> Optional[Dict[str, TermLike]]:
    """Most general unifier with occurs check, as a fully resolved substitution."""
    subst: Dict[str, TermLike] = {}

    def resolve(u: TermLike) -> TermLike:
        while isinstance(u, Var) and u.name in subst:
            u = subst[u.name]
        return u

    def occurs(name: str, u: TermLike) -> bool:
        u = resolve(u)
        if isinstance(u, Var):
            return u.name == name
        return any(occurs(name, a) for a in u.args)

    todo = [(s, t)]
    while todo:
        a, b = todo.pop()
        a, b = resolve(a), resolve(b)
        if isinstance(a, Var) and isinstance(b, Var) and a.name == b.name:
            continue
        if isinstance(a, Var):
            if occurs(a.name, b):
                return None
            subst[a.name] = b
        elif isinstance(b, Var):
            if occurs(b.name, a):
                return None
            subst[b.name] = a
        elif a.head != b.head or len(a.args) != len(b.args):
            return None
        else:
            todo.extend(zip(a.args, b.args))

    def full(u: TermLike) -> TermLike:
        u = resolve(u)
        if isinstance(u, Var):
            return u
        return Term(head=u.head, args=tuple(full(a) for a in u.args))

    return {name: full(value) for name, value in subst.items()}

# ============================================================================
def _lhs_binding(rule, sub: TermLike) -> Optional[Dict[str, TermLike]]:
    subst = match_term(rule.lhs, sub)
    if subst is not None and isinstance(rule.lhs, Var):
        if not (isinstance(sub, Term) and not sub.args and sub.head in rule.constants):
            return None
    return subst

def enumerate_matches(t: TermLike, rule) -> List[Match]:
    """
    One match per subterm position the lhs matches, in pre-order. A bare variable lhs
    matches the declared constants only; rhs-only variables multiply each match by
    every assignment of constants, in sorted order.
    """
    if rule.anchored:
        return find_matches(t, [rule])
    if isinstance(rule.lhs, Var) and not rule.constants:
        raise BareVariableLhs(f"Rule '{rule.id}' has a bare variable lhs")
    fresh = sorted(set(variables_of(rule.rhs)) - set(variables_of(rule.lhs)))
    choices = list(product([Term(head=c) for c in rule.constants], repeat=len(fresh)))
    matches = []
    for pos, sub in subterms(t):
        subst = _lhs_binding(rule, sub)
        if subst is None:
            continue
        for values in choices:
            items = tuple(sorted({**subst, **dict(zip(fresh, values))}.items(), key=lambda kv: kv[0]))
            label = f"at={list(pos)}"
            if items:
                label += " " + ",".join(f"{k}={format_payload(v)}" for k, v in items)
            matches.append(Match(rule=rule, binding=(pos, items), label=label))
    return matches

def matched_tokens(t: TermLike, match: Match) -> Tuple[str, ...]:
    pos, items = match.binding
    try:
        sub = subterm_at(t, pos)
    except (IndexError, AttributeError):
        raise StaleMatch(f"Position {list(pos)} does not exist in {format_payload(t)}")
    bound = {k: v for k, v in items if k in variables_of(match.rule.lhs)}
    if _lhs_binding(match.rule, sub) != bound:
        raise StaleMatch(f"Subterm at {list(pos)} of {format_payload(t)} no longer matches '{match.rule.id}'")
    return token_ids(sub)

def apply_binding(t: TermLike, match: Match, event_id: str) -> Tuple[TermLike, Tuple[str, ...]]:
    pos, items = match.binding
    instance = substitute(match.rule.rhs, dict(items))
    produced = tuple(f"{event_id}.{k}" for k in range(size(instance)))
    return replace_at(t, pos, with_tokens(instance, produced)), produced

def apply_match(t, m: Match, generation: int = 0) -> Tuple[TermLike, Event]:
    payload = t.payload if isinstance(t, State) else t
    result, event, _ = rewrite(payload, m, generation)
    return result, event

# ============================================================================
# Reduction orderings
class OrderingKind(str, Enum):
    SHORTLEX = "shortlex"
    LPO      = "lpo"

class Comparison(IntEnum):
    LESS    = -1
    EQUAL   = 0
    GREATER = 1

@dataclass( frozen = True )
class TermOrdering:
    kind: OrderingKind = OrderingKind.LPO
    precedence: Tuple[str, ...] = ()   # highest first

    # ------------------------------------------------
    @classmethod
    def from_chain(cls, kind, chain: str = "") -> "TermOrdering":
        """'g > inv > a > e' or 'a < b'; symbols may also be separated by spaces or commas."""
        chain = chain.strip()
        if '<' in chain and '>' in chain:
            raise ValueError(f"Precedence chain mixes '<' and '>': {chain}")
        symbols = [s for s in re.split(r"[<>,\s]+", chain) if s]
        if '<' in chain:
            symbols.reverse()
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"Precedence chain repeats a symbol: {chain}")
        return cls(kind=OrderingKind(kind), precedence=tuple(symbols))

    def rank(self, symbol: str) -> Tuple[int, object]:
        if symbol in self.precedence:
            return (1, len(self.precedence) - self.precedence.index(symbol))
        return (0, symbol)

    def chain(self) -> str:
        return " > ".join(self.precedence)

# ----------------------------------------------------------------------------
def _lpo_greater(s: TermLike, t: TermLike, order: TermOrdering) -> bool:
    if isinstance(s, Var):
        return False
    if isinstance(t, Var):
        return t.name in variables_of(s)
    if any(si == t or _lpo_greater(si, t, order) for si in s.args):
        return True
    rs, rt = order.rank(s.head), order.rank(t.head)
    if rs > rt:
        return all(_lpo_greater(s, tj, order) for tj in t.args)
    if s.head == t.head and len(s.args) == len(t.args):
        if not all(_lpo_greater(s, tj, order) for tj in t.args):
            return False
        for si, ti in zip(s.args, t.args):
            if si != ti:
                return _lpo_greater(si, ti, order)
    return False

def _symbol_sequence(t: TermLike, order: TermOrdering) -> List:
    return [order.rank(node.head) for _, node in subterms(t)]

def compare(t1: TermLike, t2: TermLike, order: TermOrdering) -> Comparison:
    if t1 == t2:
        return Comparison.EQUAL
    if order.kind == OrderingKind.LPO:
        if _lpo_greater(t1, t2, order):
            return Comparison.GREATER
        if _lpo_greater(t2, t1, order):
            return Comparison.LESS
        raise Incomparable(f"{format_payload(t1)} and {format_payload(t2)} are incomparable under lpo")

    v1, v2 = variables_of(t1), variables_of(t2)
    if not v1 and not v2:
        n1, n2 = size(t1), size(t2)
        if n1 != n2:
            return Comparison.GREATER if n1 > n2 else Comparison.LESS
        return Comparison.GREATER if _symbol_sequence(t1, order) > _symbol_sequence(t2, order) else Comparison.LESS
    # Open terms: size alone, and only when the variable counts allow it
    n1, n2 = size(t1), size(t2)
    if n1 > n2 and all(v1[x] >= c for x, c in v2.items()):
        return Comparison.GREATER
    if n2 > n1 and all(v2[x] >= c for x, c in v1.items()):
        return Comparison.LESS
    raise Incomparable(f"{format_payload(t1)} and {format_payload(t2)} are incomparable under shortlex")
