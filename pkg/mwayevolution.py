"""
mwayevolution.py

The multiway evolution graph: breadth-first closure of a rule tower from a set of
initial states with canonical-form merging, plus single-way evolution strategies,
foliations, branchial graphs and proof-path enumeration.
"""

import random
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from simpleLogger import CHATTY, DEBUG, INFO, WARN, ERROR  # noqa: F401
from mwaycore import (Substrate, State, Event, Rule, RuleTower, Match, as_tower, successors, find_matches, rewrite,
                      substrate_module, parse_state, SubstrateMismatch, FrontierLimitExceeded, CyclicGraph,
                      KeyNotFound, InvalidFoliation)
from mwaymisc import human_count, resident_memory_mb, stable_digest

# ============================================================================
@dataclass
class StateRecord:
    state: State
    first_generation: int

# ============================================================================
@dataclass
class MultiwayGraph:
    """
    States are stored once per canonical key. Events are kept in insertion order,
    which evolve() makes deterministic. Back edges (cycles) are recorded, never expanded twice.
    """
    substrate: Substrate
    states:       Dict[bytes, StateRecord]          = field(default_factory=dict)
    events:       Dict[str, Event]                  = field(default_factory=dict)
    edges:        List[Tuple[bytes, str, bytes]]    = field(default_factory=list)
    initial_keys: Set[bytes]                        = field(default_factory=set)
    tower:        Optional[RuleTower]               = None
    steps:        int                               = 0
    max_level:    Optional[int]                     = None

    _out: Dict[bytes, List[Tuple[str, bytes]]] = field(default_factory=lambda: defaultdict(list), repr=False)
    _in:  Dict[bytes, List[Tuple[str, bytes]]] = field(default_factory=lambda: defaultdict(list), repr=False)

    # ------------------------------------------------
    def add_state(self, state: State, generation: int) -> bool:
        if state.substrate != self.substrate:
            raise SubstrateMismatch(f"Cannot store a {state.substrate.value} state in a {self.substrate.value} graph")
        if state.canonical_key in self.states:
            return False
        self.states[state.canonical_key] = StateRecord(state=state, first_generation=generation)
        return True

    def add_event(self, event: Event) -> bool:
        if event.id in self.events:
            return False
        self.events[event.id] = event
        self.edges.append((event.source_state_key, event.id, event.target_state_key))
        self._out[event.source_state_key].append((event.id, event.target_state_key))
        self._in[event.target_state_key].append((event.id, event.source_state_key))
        return True

    # ------------------------------------------------
    def link(self, source: State, target: State, rule_id: str, level: int = 0) -> Event:
        """Add a token-free edge by hand. Used for constructed fixtures."""
        generation = self.states[source.canonical_key].first_generation + 1 if source.canonical_key in self.states else 1
        if self.add_state(source, generation - 1) and not self.initial_keys:
            self.initial_keys.add(source.canonical_key)
        self.add_state(target, generation)
        event = Event(id="e" + stable_digest(source.canonical_key, target.canonical_key, rule_id, level),
                      rule_id=rule_id, level=level,
                      source_state_key=source.canonical_key, target_state_key=target.canonical_key,
                      consumed_tokens=frozenset(), produced_tokens=frozenset(), generation=generation)
        self.add_event(event)
        return event

    # ------------------------------------------------
    def key(self, text: str) -> bytes:
        """Canonical key of a state given as text."""
        return parse_state(self.substrate, text).canonical_key

    def state(self, key: bytes) -> State:
        if key not in self.states:
            raise KeyNotFound(f"State {key!r} is not in the graph")
        return self.states[key].state

    def text(self, key: bytes) -> str:
        return self.state(key).text

    def out_edges(self, key: bytes, level: Optional[int] = None) -> List[Tuple[str, bytes]]:
        return sorted((eid, tgt) for eid, tgt in self._out.get(key, ())
                      if level is None or self.events[eid].level == level)

    def in_edges(self, key: bytes, level: Optional[int] = None) -> List[Tuple[str, bytes]]:
        return sorted((eid, src) for eid, src in self._in.get(key, ())
                      if level is None or self.events[eid].level == level)

    def parents(self, key: bytes, level: Optional[int] = None) -> List[bytes]:
        return sorted({src for _, src in self.in_edges(key, level)})

    def children(self, key: bytes, level: Optional[int] = None) -> List[bytes]:
        return sorted({tgt for _, tgt in self.out_edges(key, level)})

    def has_edge(self, source: bytes, target: bytes, level: Optional[int] = None) -> bool:
        return any(tgt == target for _, tgt in self.out_edges(source, level))

    def edges_at_level(self, level: int) -> List[Tuple[bytes, str, bytes]]:
        return sorted((s, eid, t) for s, eid, t in self.edges if self.events[eid].level == level)

    def levels(self) -> List[int]:
        return sorted({event.level for event in self.events.values()})

    # ------------------------------------------------
    def state_counts_by_generation(self) -> List[int]:
        if not self.states:
            return []
        counts = [0] * (max(r.first_generation for r in self.states.values()) + 1)
        for record in self.states.values():
            counts[record.first_generation] += 1
        return counts

    def generation(self, n: int) -> List[bytes]:
        return sorted(k for k, r in self.states.items() if r.first_generation == n)

    # ------------------------------------------------
    def to_networkx(self, level: Optional[int] = None) -> nx.MultiDiGraph:
        G = nx.MultiDiGraph()
        for key in sorted(self.states):
            record = self.states[key]
            G.add_node(key, text=record.state.text, generation=record.first_generation)
        for source, eid, target in sorted(self.edges, key=lambda e: e[1]):
            event = self.events[eid]
            if level is None or event.level == level:
                G.add_edge(source, target, key=eid, rule_id=event.rule_id, level=event.level)
        return G

# ============================================================================
def _as_state_list(initial) -> List[State]:
    if isinstance(initial, State):
        return [initial]
    states = list(initial)
    if not states:
        raise ValueError("Evolution needs at least one initial state")
    return states

def _rebase(event: Event, target: State, stored: State) -> Event:
    """Translate produced tokens onto the stored representative, position by position."""
    translation = dict(zip(target.tokens, stored.tokens))
    return event.with_produced(translation.get(t, t) for t in event.produced_tokens)

def evolve(initial: Union[State, Sequence[State]],
           rules: Union[RuleTower, Iterable[Rule]],
           steps: int,
           max_level: Optional[int] = None,
           max_states: Optional[int] = None,
           workers: int = 1,
           ) -> MultiwayGraph:
    """
    Breadth-first closure to depth `steps` with every rule of level <= max_level.
    Output is independent of worker count: successor lists are computed in parallel
    but inserted in sorted frontier order.
    """
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    states = _as_state_list(initial)
    tower = as_tower(rules)
    substrate = states[0].substrate
    for state in states:
        if state.substrate != substrate:
            raise SubstrateMismatch("Initial states mix substrates")
    if tower.substrate != substrate:
        raise SubstrateMismatch(f"Rules are {tower.substrate.value} rules, initial states are {substrate.value}")
    active = tower.rules_up_to(max_level)

    g = MultiwayGraph(substrate=substrate, tower=tower, steps=steps, max_level=max_level)
    for state in states:
        g.add_state(state, 0)
        g.initial_keys.add(state.canonical_key)
    frontier = sorted(g.initial_keys)

    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for generation in range(1, steps + 1):
            if not frontier:
                break
            expand = lambda key: successors(g.states[key].state, active, generation)  # noqa: E731
            found = list(executor.map(expand, frontier)) if executor else [expand(key) for key in frontier]
            next_frontier = []
            for pairs in found:
                for event, target in pairs:
                    if event.id in g.events:
                        continue
                    key = target.canonical_key
                    if key in g.states:
                        event = _rebase(event, target, g.states[key].state)
                    else:
                        if max_states is not None and len(g.states) >= max_states:
                            raise FrontierLimitExceeded(
                                f"State cap {max_states} reached at generation {generation}")
                        g.add_state(target, generation)
                        next_frontier.append(key)
                    g.add_event(event)
            frontier = sorted(next_frontier)
            DEBUG(f"Generation {generation}: {human_count(len(frontier))} new states, "
                  f"{human_count(len(g.states))} states and {human_count(len(g.events))} events in total, "
                  f"{resident_memory_mb():.0f} MB")
    finally:
        if executor:
            executor.shutdown()
    return g

# ============================================================================
class Strategy(str, Enum):
    FIRST_MATCH         = "first"
    ALL_NON_OVERLAPPING = "nonoverlapping"

def _consumed(payload, match: Match) -> Tuple[str, ...]:
    module = substrate_module(payload.substrate)
    if match.rule.anchored:
        return tuple(module.token_ids(payload))
    return tuple(module.matched_tokens(payload, match))

def singleway_evolve(initial: State,
                     rules: Iterable[Rule],
                     steps: int,
                     strategy: Union[Strategy, str] = Strategy.FIRST_MATCH,
                     seed: int = 0,
                     ) -> List[Tuple[State, List[Event]]]:
    """
    One deterministic history: [(initial, []), (state_1, events_1), ...].
    Stops early when nothing matches. The raw payload is rewritten throughout so labels
    and token identities carry over from step to step.
    """
    strategy = Strategy(strategy)
    rules = list(as_tower(rules).all_rules()) if isinstance(rules, RuleTower) else list(rules)
    rng = random.Random(seed)
    payload = initial.payload
    history: List[Tuple[State, List[Event]]] = [(initial, [])]
    for step in range(1, steps + 1):
        matches = find_matches(payload, rules)
        if not matches:
            DEBUG(f"No match at step {step}, evolution halts")
            break
        if strategy == Strategy.FIRST_MATCH:
            chosen = [(matches[0], frozenset(_consumed(payload, matches[0])))]
        else:
            order = list(matches)
            rng.shuffle(order)
            chosen, used = [], set()
            for match in order:
                tokens = frozenset(_consumed(payload, match))
                if tokens & used:
                    continue
                used |= tokens
                chosen.append((match, tokens))

        events = []
        for match, tokens in chosen:
            # Earlier rewrites may have shifted positions; find the same redex by its tokens
            current = next(m for m in find_matches(payload, [match.rule])
                           if frozenset(_consumed(payload, m)) == tokens)
            payload, event, _ = rewrite(payload, current, step)
            events.append(event)
        state = State.of(payload)
        CHATTY(f"Step {step}: {len(events)} events -> {state.text}")
        history.append((state, events))
    return history

# ============================================================================
@dataclass( frozen = True )
class Foliation:
    time_function: Dict[bytes, int]
    slices: Tuple[Tuple[bytes, ...], ...]

    def __len__(self) -> int:
        return len(self.slices)

    def time(self, key: bytes) -> int:
        return self.time_function[key]

def _slices(time_function: Dict[bytes, int]) -> Tuple[Tuple[bytes, ...], ...]:
    if not time_function:
        return ()
    buckets: List[List[bytes]] = [[] for _ in range(max(time_function.values()) + 1)]
    for key, t in time_function.items():
        buckets[t].append(key)
    return tuple(tuple(sorted(bucket)) for bucket in buckets)

def foliate(g: MultiwayGraph) -> Foliation:
    """Generational foliation: time is the longest path length from the initial states."""
    G = nx.DiGraph()
    G.add_nodes_from(g.states)
    G.add_edges_from((s, t) for s, _, t in g.edges)
    if not nx.is_directed_acyclic_graph(G):
        raise CyclicGraph("The multiway graph has cycles, it admits no foliation by longest path")
    time: Dict[bytes, int] = {}
    for key in nx.topological_sort(G):
        time[key] = max((time[p] + 1 for p in G.predecessors(key)), default=0)
    return Foliation(time_function=time, slices=_slices(time))

def foliation_from_time_function(g: MultiwayGraph, time_function: Dict[bytes, int]) -> Foliation:
    missing = [k for k in g.states if k not in time_function]
    if missing:
        raise InvalidFoliation(f"Time function misses {len(missing)} states, e.g. {g.text(missing[0])}")
    for key, t in time_function.items():
        if key not in g.states:
            raise InvalidFoliation(f"Time function names an unknown state {key!r}")
        if not isinstance(t, int) or t < 0:
            raise InvalidFoliation(f"Time of {g.text(key)} must be a non-negative integer, got {t!r}")
    for source, eid, target in g.edges:
        if time_function[source] >= time_function[target]:
            raise InvalidFoliation(f"Edge {g.text(source)} -> {g.text(target)} ({eid}) does not increase time")
    return Foliation(time_function=dict(time_function), slices=_slices(time_function))

# ============================================================================
def _ancestors(g: MultiwayGraph, key: bytes, depth: int) -> Set[bytes]:
    found: Set[bytes] = set()
    layer = {key}
    for _ in range(depth):
        layer = {p for k in layer for p in g.parents(k)} - found
        if not layer:
            break
        found |= layer
    return found

def branchial_graph(g: MultiwayGraph, foliation: Foliation, slice_index: int, ancestor_depth: int = 1) -> nx.Graph:
    """Undirected graph on one slice; edge weight = number of shared ancestors within ancestor_depth."""
    members = foliation.slices[slice_index]
    ancestry = {key: _ancestors(g, key, ancestor_depth) for key in members}
    B = nx.Graph()
    for key in members:
        B.add_node(key, text=g.text(key))
    for i, u in enumerate(members):
        for v in members[i + 1:]:
            weight = len(ancestry[u] & ancestry[v])
            if weight >= 1:
                B.add_edge(u, v, weight=weight)
    return B

def branchial_sizes(g: MultiwayGraph, foliation: Optional[Foliation] = None, ancestor_depth: int = 1) -> List[Tuple[int, int]]:
    """(states, branchial edges) for every slice."""
    foliation = foliation or foliate(g)
    sizes = []
    for i in range(len(foliation)):
        B = branchial_graph(g, foliation, i, ancestor_depth)
        sizes.append((B.number_of_nodes(), B.number_of_edges()))
    return sizes

# ============================================================================
def paths_between(g: MultiwayGraph,
                  a_key: bytes,
                  b_key: bytes,
                  max_paths: int = 1000,
                  max_len: Optional[int] = None,
                  level: Optional[int] = None,
                  ) -> List[List[bytes]]:
    """
    Simple directed paths a -> ... -> b as key sequences, in lexicographic order of
    their event-id sequences. Parallel events giving the same key sequence count once.
    """
    for key in (a_key, b_key):
        if key not in g.states:
            raise KeyNotFound(f"State {key!r} is not in the graph")
    if a_key == b_key:
        return [[a_key]]
    found: List[List[bytes]] = []
    seen: Set[Tuple[bytes, ...]] = set()

    def dfs(path: List[bytes]) -> None:
        if len(found) >= max_paths:
            return
        if max_len is not None and len(path) - 1 >= max_len:
            return
        for _, target in g.out_edges(path[-1], level):
            if target in path:
                continue
            if target == b_key:
                candidate = tuple(path + [target])
                if candidate not in seen and len(found) < max_paths:
                    seen.add(candidate)
                    found.append(list(candidate))
                continue
            dfs(path + [target])

    dfs([a_key])
    DEBUG(f"{len(found)} paths from {g.text(a_key)} to {g.text(b_key)}")
    return found
