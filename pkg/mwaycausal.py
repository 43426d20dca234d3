"""
mwaycausal.py

Causal networks built from token dependencies, the causal overlay on a multiway graph,
and the depth-bounded causal invariance check over single-way histories.
"""

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from simpleLogger import CHATTY, DEBUG, INFO, WARN, ERROR  # noqa: F401
from mwaycore import Event, Rule, RuleTower, State, as_tower, find_matches, rewrite, DuplicateTokenProduction
from mwayevolution import MultiwayGraph
from mwayhypergraphs import Hypergraph, canonicalize
from mwaymisc import human_count, resident_memory_mb

# ============================================================================
@dataclass( frozen = True )
class CausalNetwork:
    event_ids: Tuple[str, ...]
    rule_ids: Dict[str, str] = field(compare=False)
    # (a, b) -> tokens produced by a and consumed by b
    edges: Dict[Tuple[str, str], FrozenSet[str]] = field(compare=False)

    # ------------------------------------------------
    def __len__(self) -> int:
        return len(self.event_ids)

    def to_networkx(self) -> nx.DiGraph:
        G = nx.DiGraph()
        for eid in self.event_ids:
            G.add_node(eid, rule_id=self.rule_ids[eid])
        for (a, b), witness in sorted(self.edges.items()):
            G.add_edge(a, b, witness=sorted(witness))
        return G

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.to_networkx())

    def transitive_reduction(self) -> nx.DiGraph:
        G = self.to_networkx()
        R = nx.transitive_reduction(G)
        R.add_nodes_from(G.nodes(data=True))
        R.add_edges_from((a, b, G.edges[a, b]) for a, b in R.edges)
        return R

    # ------------------------------------------------
    def certificate(self, labeled: bool = True) -> str:
        """
        Isomorphism certificate of the event DAG. The DAG is encoded as a hypergraph:
        a unary edge per event, a binary edge per causal edge and, when labeled, an edge
        of arity rank+3 per event marking its rule id.
        """
        index = {eid: i for i, eid in enumerate(self.event_ids)}
        rule_names = sorted(self.rule_ids[eid] for eid in self.event_ids)
        rank = {name: r for r, name in enumerate(sorted(set(rule_names)))}
        edges: List[Tuple[int, ...]] = [(i,) for i in range(len(self.event_ids))]
        edges += [(index[a], index[b]) for a, b in sorted(self.edges)]
        if labeled:
            edges += [(index[eid],) * (rank[self.rule_ids[eid]] + 3) for eid in self.event_ids]
        shape = canonicalize(Hypergraph(edges=tuple(edges))).certificate.decode('utf-8')
        prefix = ",".join(rule_names) if labeled else str(len(self.event_ids))
        return f"{prefix}|{shape}"

# ============================================================================
def build_causal_network(events: Sequence[Event]) -> CausalNetwork:
    """Edge a -> b iff b consumes a token that a produced."""
    producer: Dict[str, str] = {}
    for event in events:
        for token in event.produced_tokens:
            if producer.setdefault(token, event.id) != event.id:
                raise DuplicateTokenProduction(
                    f"Token {token} is produced by both {producer[token]} and {event.id}")
    witness: Dict[Tuple[str, str], set] = defaultdict(set)
    for event in events:
        for token in event.consumed_tokens:
            source = producer.get(token)
            if source is not None and source != event.id:
                witness[(source, event.id)].add(token)
    return CausalNetwork(event_ids=tuple(e.id for e in events),
                         rule_ids={e.id: e.rule_id for e in events},
                         edges={pair: frozenset(tokens) for pair, tokens in witness.items()})

# ============================================================================
def multiway_causal_graph(g: MultiwayGraph) -> nx.MultiDiGraph:
    """
    State nodes ("state", key), event nodes ("event", id); evolution edges run
    state -> event -> state, causal edges run event -> event.
    """
    G = nx.MultiDiGraph()
    for key in sorted(g.states):
        G.add_node(("state", key), kind="state", text=g.text(key))
    producers: Dict[str, List[str]] = defaultdict(list)
    for eid in sorted(g.events):
        event = g.events[eid]
        G.add_node(("event", eid), kind="event", rule_id=event.rule_id, level=event.level)
        G.add_edge(("state", event.source_state_key), ("event", eid), kind="evolution")
        G.add_edge(("event", eid), ("state", event.target_state_key), kind="evolution")
        for token in event.produced_tokens:
            producers[token].append(eid)
    for eid in sorted(g.events):
        witness: Dict[str, set] = defaultdict(set)
        for token in g.events[eid].consumed_tokens:
            for source in producers.get(token, ()):
                if source != eid:
                    witness[source].add(token)
        for source in sorted(witness):
            G.add_edge(("event", source), ("event", eid), kind="causal", witness=sorted(witness[source]))
    return G

# ============================================================================
class VerdictStatus(str, Enum):
    INVARIANT     = "Invariant"
    NOT_INVARIANT = "NotInvariant"
    INCONCLUSIVE  = "Inconclusive"

@dataclass( frozen = True )
class CausalInvarianceReport:
    status: VerdictStatus
    depth: int
    paths: int
    labeled: bool
    certificates: Tuple[str, ...] = ()
    witness: Optional[Tuple[int, int]] = None

    @property
    def isomorphic(self) -> bool:
        return self.status == VerdictStatus.INVARIANT

    def dict(self) -> Dict:
        return {
            'status':       self.status.value,
            'depth':        self.depth,
            'paths':        self.paths,
            'labeled':      self.labeled,
            'certificates': list(self.certificates),
            'witness':      list(self.witness) if self.witness else None,
        }

class _PathCapHit(Exception):
    pass

def _histories(initial: State, rules: Sequence[Rule], depth: int, path_cap: int) -> List[List[Event]]:
    """Every maximal sequence of match choices up to depth, depth first in match order."""
    histories: List[List[Event]] = []

    def walk(payload, events: List[Event]) -> None:
        matches = find_matches(payload, rules) if len(events) < depth else []
        if not matches:
            if len(histories) >= path_cap:
                raise _PathCapHit()
            histories.append(events)
            return
        for match in matches:
            result, event, _ = rewrite(payload, match, len(events) + 1)
            walk(result, events + [event])

    walk(initial.payload, [])
    return histories

def causal_invariance_verdict(initial: State,
                              rules: Union[RuleTower, Iterable[Rule]],
                              depth: int,
                              path_cap: int = 1000,
                              labeled: bool = True,
                              workers: int = 1,
                              ) -> CausalInvarianceReport:
    """
    Compare the causal networks of all single-way histories to `depth`. Equal
    certificates mean invariant at this depth only; a capped enumeration is Inconclusive.
    """
    if depth < 1:
        raise ValueError(f"depth must be at least 1, got {depth}")
    rules = list(as_tower(rules).all_rules())
    try:
        histories = _histories(initial, rules, depth, path_cap)
    except _PathCapHit:
        WARN(f"More than {path_cap} histories at depth {depth}, verdict is inconclusive")
        return CausalInvarianceReport(status=VerdictStatus.INCONCLUSIVE, depth=depth, paths=path_cap, labeled=labeled)
    DEBUG(f"{human_count(len(histories))} histories at depth {depth}, {resident_memory_mb():.0f} MB")

    certify = lambda events: build_causal_network(events).certificate(labeled)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            certificates = list(executor.map(certify, histories))
    else:
        certificates = [certify(events) for events in histories]

    distinct = tuple(sorted(set(certificates)))
    witness = next(((0, j) for j, c in enumerate(certificates) if c != certificates[0]), None)
    status = VerdictStatus.INVARIANT if len(distinct) == 1 else VerdictStatus.NOT_INVARIANT
    INFO(f"Causal invariance at depth {depth}: {status.value} over {len(histories)} histories")
    return CausalInvarianceReport(status=status, depth=depth, paths=len(histories), labeled=labeled,
                                  certificates=distinct, witness=witness)

# ============================================================================
def _within(g: MultiwayGraph, key: bytes, depth: int) -> set:
    reached = {key}
    layer = {key}
    for _ in range(depth):
        layer = {t for k in layer for t in g.children(k)} - reached
        reached |= layer
    return reached

def divergent_branches(g: MultiwayGraph, depth: int) -> List[Tuple[bytes, bytes, bytes]]:
    """
    Same-source branch pairs whose targets reach no common state within `depth` further
    steps. Sources too close to the evolution horizon to be decided are skipped.
    """
    divergent = []
    for source in sorted(g.states):
        if g.steps and g.states[source].first_generation + depth + 1 > g.steps:
            continue
        targets = g.children(source)
        for i, t1 in enumerate(targets):
            reach1 = _within(g, t1, depth)
            for t2 in targets[i + 1:]:
                if not reach1 & _within(g, t2, depth):
                    divergent.append((source, t1, t2))
    return divergent
