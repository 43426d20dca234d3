"""
mwayhypergraphs.py

Ordered-hypergraph substrate. States are edge multisets over natural-number vertices,
patterns are edge lists over variables. Matching binds pattern edges to distinct host
edges (vertex bindings may collapse), rewriting removes the matched edges and appends
the instantiated rhs. State equivalence is exact isomorphism via canonical labeling.
"""

import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import ClassVar, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from simpleLogger import CHATTY, DEBUG, INFO, WARN, ERROR  # noqa: F401
from mwaycore import (Substrate, Match, Event, State, EmptyLhs, StaleMatch, ArityError, ParseError,
                      find_matches, rewrite, make_rule)

Edge = Tuple[int, ...]

# ============================================================================
@dataclass( frozen = True )
class Hypergraph:
    edges: Tuple[Edge, ...]
    token_ids: Tuple[str, ...] = field(default=(), compare=False)
    substrate: ClassVar[Substrate] = Substrate.HYPERGRAPH

    def __post_init__(self):
        for edge in self.edges:
            if len(edge) < 1:
                raise ArityError("Hyperedges need arity >= 1")
        if self.token_ids and len(self.token_ids) != len(self.edges):
            raise ValueError(f"{len(self.edges)} edges but {len(self.token_ids)} tokens")

    def vertices(self) -> List[int]:
        return sorted({v for edge in self.edges for v in edge})

    @property
    def text(self) -> str:
        return format_payload(self)

@dataclass( frozen = True )
class HPattern:
    edges: Tuple[Tuple[str, ...], ...]
    fresh_vars: FrozenSet[str] = frozenset()

    def __post_init__(self):
        for edge in self.edges:
            if len(edge) < 1:
                raise ArityError("Pattern edges need arity >= 1")

    def variables(self) -> List[str]:
        """In order of first appearance."""
        seen: Dict[str, None] = {}
        for edge in self.edges:
            for label in edge:
                seen.setdefault(label, None)
        return list(seen)

@dataclass( frozen = True )
class CanonicalForm:
    edges: Tuple[Edge, ...]
    certificate: bytes
    relabeling: Dict[int, int] = field(default_factory=dict, compare=False)
    # original edge index for each canonical position
    edge_order: Tuple[int, ...] = field(default=(), compare=False)

# ============================================================================
# Text form: {{1,2,3},{3,4,5}}; {} is the empty hypergraph
_label_re = re.compile(r"[A-Za-z0-9_']+")

def _parse_edges(text: str) -> List[List[str]]:
    pos = 0
    n = len(text)

    def skip():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def expect(ch: str):
        nonlocal pos
        skip()
        if pos >= n or text[pos] != ch:
            found = text[pos] if pos < n else "end of input"
            raise ParseError(f"unexpected {found!r}", 1, pos + 1, expected=repr(ch))
        pos += 1

    def peek() -> str:
        skip()
        return text[pos] if pos < n else ""

    edges: List[List[str]] = []
    expect('{')
    if peek() == '}':
        pos += 1
    else:
        while True:
            expect('{')
            edge = []
            while True:
                skip()
                m = _label_re.match(text, pos)
                if not m:
                    raise ParseError("missing vertex label", 1, pos + 1, expected="label")
                edge.append(m.group(0))
                pos = m.end()
                if peek() == ',':
                    pos += 1
                    continue
                expect('}')
                break
            edges.append(edge)
            if peek() == ',':
                pos += 1
                continue
            expect('}')
            break
    skip()
    if pos != n:
        raise ParseError(f"trailing text {text[pos:]!r}", 1, pos + 1, expected="end of hypergraph")
    return edges

def _format_edges(edges: Iterable[Iterable]) -> str:
    return "{" + ",".join("{" + ",".join(str(v) for v in edge) + "}" for edge in edges) + "}"

# ============================================================================
# Canonical labeling: color refinement on the vertex/edge incidence structure,
# then individualize-and-refine over the first non-singleton cell. The canonical
# code is the lexicographically smallest sorted edge list over all leaves.
def _rank(values: Sequence) -> List[int]:
    order = {value: i for i, value in enumerate(sorted(set(values)))}
    return [order[value] for value in values]

def _refine(edges: List[Edge], incidence: List[List[Tuple[int, int]]], colors: List[int]) -> List[int]:
    while True:
        signatures = [
            (colors[v], tuple(sorted((len(edges[ei]), pos, tuple(colors[w] for w in edges[ei]))
                                     for ei, pos in incidence[v])))
            for v in range(len(colors))
        ]
        refined = _rank(signatures)
        if len(set(refined)) == len(set(colors)):
            return refined
        colors = refined

class _SearchState:
    def __init__(self):
        self.best_code: Optional[Tuple[Edge, ...]] = None
        self.best_leaf: Optional[List[int]] = None
        self.automorphisms: List[List[int]] = []

def _visit_leaf(edges: List[Edge], leaf: List[int], state: _SearchState) -> None:
    code = tuple(sorted(tuple(leaf[v] for v in edge) for edge in edges))
    if state.best_code is None or code < state.best_code:
        state.best_code, state.best_leaf = code, leaf
    elif code == state.best_code:
        inverse = {label: v for v, label in enumerate(state.best_leaf)}
        sigma = [inverse[leaf[u]] for u in range(len(leaf))]
        if any(sigma[u] != u for u in range(len(sigma))):
            state.automorphisms.append(sigma)

def _in_explored_orbit(v: int, explored: List[int], generators: List[List[int]]) -> bool:
    if not generators:
        return False
    orbit, todo = {v}, [v]
    while todo:
        u = todo.pop()
        for g in generators:
            w = g[u]
            if w not in orbit:
                orbit.add(w)
                todo.append(w)
    return any(x in orbit for x in explored)

def _search(edges, incidence, colors: List[int], prefix: List[int], state: _SearchState) -> None:
    cells: Dict[int, List[int]] = defaultdict(list)
    for v, c in enumerate(colors):
        cells[c].append(v)
    target = min((c for c, members in cells.items() if len(members) > 1), default=None)
    if target is None:
        _visit_leaf(edges, colors, state)
        return
    explored: List[int] = []
    for v in cells[target]:
        generators = [g for g in state.automorphisms if all(g[p] == p for p in prefix)]
        if explored and _in_explored_orbit(v, explored, generators):
            continue
        explored.append(v)
        split = _rank([(c, 0 if u == v else 1) for u, c in enumerate(colors)])
        _search(edges, incidence, _refine(edges, incidence, split), prefix + [v], state)

@lru_cache(maxsize=65536)
def _canonical_code(raw_edges: Tuple[Edge, ...]) -> Tuple[Tuple[Edge, ...], Tuple[Tuple[int, int], ...]]:
    vertices = sorted({v for edge in raw_edges for v in edge})
    if not vertices:
        return (), ()
    index = {v: i for i, v in enumerate(vertices)}
    edges = [tuple(index[v] for v in edge) for edge in raw_edges]
    incidence: List[List[Tuple[int, int]]] = [[] for _ in vertices]
    for ei, edge in enumerate(edges):
        for pos, v in enumerate(edge):
            incidence[v].append((ei, pos))
    state = _SearchState()
    _search(edges, incidence, _refine(edges, incidence, [0] * len(vertices)), [], state)
    relabeling = tuple((vertices[i], state.best_leaf[i]) for i in range(len(vertices)))
    return state.best_code, relabeling

def canonicalize(h: Hypergraph) -> CanonicalForm:
    """Exact canonical form: isomorphic hypergraphs, and only those, share a certificate."""
    code, relabeling = _canonical_code(tuple(h.edges))
    mapping = dict(relabeling)
    relabeled = [tuple(mapping[v] for v in edge) for edge in h.edges]
    order = tuple(sorted(range(len(relabeled)), key=lambda i: (relabeled[i], i)))
    return CanonicalForm(edges=code, certificate=_format_edges(code).encode('utf-8'),
                         relabeling=mapping, edge_order=order)

def isomorphic(h1: Hypergraph, h2: Hypergraph) -> bool:
    return canonicalize(h1).certificate == canonicalize(h2).certificate

# ============================================================================
# Substrate protocol, see mwaycore
def canonical_form(payload: Hypergraph) -> Tuple[Hypergraph, bytes]:
    form = canonicalize(payload)
    tokens = tuple(payload.token_ids[i] for i in form.edge_order) if payload.token_ids else ()
    return Hypergraph(edges=form.edges, token_ids=tokens), form.certificate

def format_payload(payload: Hypergraph) -> str:
    return _format_edges(payload.edges)

def parse_payload(text: str, **_) -> Hypergraph:
    edges = []
    for edge in _parse_edges(text):
        if not all(label.isdigit() for label in edge):
            raise ParseError(f"vertex labels of a state must be natural numbers, got {edge}", 1, 1)
        edges.append(tuple(int(label) for label in edge))
    return Hypergraph(edges=tuple(edges))

def token_ids(payload: Hypergraph) -> Tuple[str, ...]:
    return payload.token_ids

def atom_count(payload: Hypergraph) -> int:
    return len(payload.edges)

def with_tokens(payload: Hypergraph, tokens: Sequence[str]) -> Hypergraph:
    return Hypergraph(edges=payload.edges, token_ids=tuple(tokens))

def parse_pattern(text: str, variables=()) -> HPattern:
    return HPattern(edges=tuple(tuple(edge) for edge in _parse_edges(text)))

def format_pattern(pattern: HPattern) -> str:
    return _format_edges(pattern.edges)

def pattern_payload(pattern: HPattern) -> Hypergraph:
    labels = pattern.variables()
    if all(label.isdigit() for label in labels):
        mapping = {label: int(label) for label in labels}
    else:
        mapping = {label: i for i, label in enumerate(labels)}
    return Hypergraph(edges=tuple(tuple(mapping[label] for label in edge) for edge in pattern.edges))

def payload_pattern(payload: Hypergraph) -> HPattern:
    return HPattern(edges=tuple(tuple(str(v) for v in edge) for edge in payload.edges))

def normalize_patterns(lhs: HPattern, rhs: HPattern) -> Tuple[HPattern, HPattern]:
    bound = set(lhs.variables())
    fresh = frozenset(v for v in rhs.variables() if v not in bound)
    return HPattern(edges=lhs.edges), HPattern(edges=rhs.edges, fresh_vars=fresh)

def reverse_patterns(lhs: HPattern, rhs: HPattern) -> Tuple[HPattern, HPattern]:
    return normalize_patterns(HPattern(edges=rhs.edges), HPattern(edges=lhs.edges))

def validate_rule(rule) -> None:
    if not rule.lhs.edges and not rule.anchored:
        raise EmptyLhs(f"Rule '{rule.id}' has no lhs edges")
    bound = set(rule.lhs.variables())
    unbound = [v for v in rule.rhs.variables() if v not in bound and v not in rule.rhs.fresh_vars]
    if unbound:
        raise ValueError(f"Rule '{rule.id}': rhs variables {unbound} are neither bound nor fresh")

# ============================================================================
def enumerate_matches(h: Hypergraph, rule) -> List[Match]:
    """Matches ordered by the tuple of host edge indices."""
    if rule.anchored:
        return find_matches(h, [rule])
    pattern = rule.lhs.edges
    matches: List[Match] = []

    def extend(i: int, chosen: Tuple[int, ...], binding: Dict[str, int]):
        if i == len(pattern):
            items = tuple(sorted(binding.items()))
            label = "edges=" + ",".join(map(str, chosen)) + " " + ",".join(f"{k}={v}" for k, v in items)
            matches.append(Match(rule=rule, binding=(chosen, items), label=label))
            return
        wanted = pattern[i]
        for ei, edge in enumerate(h.edges):
            if ei in chosen or len(edge) != len(wanted):
                continue
            extended = dict(binding)
            for var, vertex in zip(wanted, edge):
                if var in extended:
                    if extended[var] != vertex:
                        break
                elif rule.injective and vertex in extended.values():
                    break
                else:
                    extended[var] = vertex
            else:
                extend(i + 1, chosen + (ei,), extended)

    extend(0, (), {})
    return matches

def matched_tokens(h: Hypergraph, match: Match) -> Tuple[str, ...]:
    chosen, items = match.binding
    binding = dict(items)
    for ei, wanted in zip(chosen, match.rule.lhs.edges):
        if ei >= len(h.edges) or h.edges[ei] != tuple(binding[v] for v in wanted):
            raise StaleMatch(f"Edge {ei} of {h.text} no longer matches rule '{match.rule.id}'")
    return tuple(h.token_ids[ei] for ei in chosen)

def apply_binding(h: Hypergraph, match: Match, event_id: str) -> Tuple[Hypergraph, Tuple[str, ...]]:
    chosen, items = match.binding
    binding = dict(items)
    rhs = match.rule.rhs
    # Fresh vertices count up from the largest label in the host
    next_label = max((v for edge in h.edges for v in edge), default=-1) + 1
    for var in rhs.variables():
        if var not in binding:
            binding[var] = next_label
            next_label += 1
    kept = [i for i in range(len(h.edges)) if i not in chosen]
    new_edges = tuple(tuple(binding[v] for v in edge) for edge in rhs.edges)
    produced = tuple(f"{event_id}.{k}" for k in range(len(new_edges)))
    result = Hypergraph(edges=tuple(h.edges[i] for i in kept) + new_edges,
                        token_ids=tuple(h.token_ids[i] for i in kept) + produced)
    return result, produced

def apply_match(h, m: Match, generation: int = 0) -> Tuple[Hypergraph, Event]:
    payload = h.payload if isinstance(h, State) else h
    result, event, _ = rewrite(payload, m, generation)
    return result, event

# ============================================================================
# Closure presets: transitivity + reflexivity (category), plus symmetry (groupoid)
def _check_binary(h: Hypergraph) -> None:
    for edge in h.edges:
        if len(edge) > 2:
            raise ArityError(f"Closure presets need unary or binary edges, got {edge}")

def _close(h: Hypergraph, symmetric: bool) -> Hypergraph:
    _check_binary(h)
    edges = list(h.edges)
    present = set(edges)
    while True:
        binary = sorted(e for e in present if len(e) == 2)
        added = []
        if symmetric:
            added += [(b, a) for (a, b) in binary if (b, a) not in present]
        successors: Dict[int, List[int]] = defaultdict(list)
        for a, b in binary:
            successors[a].append(b)
        for a, b in binary:
            for c in successors[b]:
                if (a, c) not in present:
                    added.append((a, c))
        added = sorted(set(added))
        if not added:
            break
        edges += added
        present.update(added)
    loops = [(v, v) for v in h.vertices() if (v, v) not in present]
    return Hypergraph(edges=tuple(edges + loops))

def categorify(h: Hypergraph) -> Hypergraph:
    """Least transitive and reflexive superset. Input edges come first, in input order."""
    return _close(h, symmetric=False)

def groupoidify(h: Hypergraph) -> Hypergraph:
    """categorify, additionally closed under reversing binary edges."""
    return _close(h, symmetric=True)

# ----------------------------------------------------------------------------
_closure_rule_text = {
    "transitivity": ("{{a,b},{b,c}}", "{{a,b},{b,c},{a,c}}"),
    "reflexivity":  ("{{a}}",         "{{a,a}}"),
    "symmetry":     ("{{a,b}}",       "{{a,b},{b,a}}"),
}

def closure_rules(kind: str = "category") -> List:
    """The closure presets as ordinary set substitution rules ('category' or 'groupoid')."""
    names = {"category": ["transitivity", "reflexivity"],
             "groupoid": ["transitivity", "reflexivity", "symmetry"]}
    if kind not in names:
        raise ValueError(f"Unknown closure kind '{kind}', expected one of {sorted(names)}")
    return [make_rule(Substrate.HYPERGRAPH, *_closure_rule_text[name], rule_id=name) for name in names[kind]]
