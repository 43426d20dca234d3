"""
mwayhomotopy.py

Homotopy structure on multiway graphs. Rules pairing corresponding states of two proof
paths are added as a new tower level, the system is re-evolved, and the resulting
level-typed edges are scanned for squares (2-cells) and cubes (3-cells).

Squares are thin: parallel composites with equal endpoints count as equal, so a square
is determined by its corners and the levels of its sides.
"""

from collections import defaultdict
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from simpleLogger import CHATTY, DEBUG, INFO, WARN, ERROR  # noqa: F401
from mwaycore import (Rule, RuleTower, State, whole_state_rule, LengthMismatch,  # noqa: F401
                      EndpointMismatch)
from mwayevolution import MultiwayGraph, evolve

Key = bytes
PathLike = Sequence[Union[State, Key, str]]

# ============================================================================
def _resolve(item, graph: Optional[MultiwayGraph]) -> State:
    if isinstance(item, State):
        return item
    if graph is None:
        raise ValueError("Paths given as keys or text need the graph they came from")
    if isinstance(item, str):
        item = graph.key(item)
    return graph.state(item)

def synthesize_homotopy_rules(p1: PathLike,
                              p2: PathLike,
                              level: int = 1,
                              graph: Optional[MultiwayGraph] = None,
                              anchored: bool = True,
                              ) -> List[Rule]:
    """
    One whole-state rule p1[i] -> p2[i] for every interior index where the paths differ,
    in path order.
    """
    if level < 1:
        raise ValueError(f"Homotopy rules live on level >= 1, got {level}")
    s1 = [_resolve(x, graph) for x in p1]
    s2 = [_resolve(x, graph) for x in p2]
    if len(s1) != len(s2):
        raise LengthMismatch(f"Paths have {len(s1)} and {len(s2)} states")
    if not s1:
        return []
    if s1[0] != s2[0] or s1[-1] != s2[-1]:
        raise EndpointMismatch(f"Paths run {s1[0]} -> {s1[-1]} and {s2[0]} -> {s2[-1]}")
    rules: List[Rule] = []
    for u, v in zip(s1[1:-1], s2[1:-1]):
        if u == v:
            continue
        rule = whole_state_rule(u, v, level, anchored=anchored)
        if rule not in rules:
            rules.append(rule)
    DEBUG(f"Synthesized {len(rules)} level {level} rules")
    return rules

# ----------------------------------------------------------------------------
def induce(g: MultiwayGraph,
           new_rules: Iterable[Rule],
           steps: Optional[int] = None,
           max_states: Optional[int] = None,
           workers: int = 1,
           ) -> MultiwayGraph:
    """Re-evolve g's initial states under g's tower extended by one level of new rules."""
    new_rules = list(new_rules)
    if not new_rules:
        return g
    levels = {rule.level for rule in new_rules}
    if len(levels) != 1 or min(levels) < 1:
        raise ValueError(f"Induced rules must share one level >= 1, got levels {sorted(levels)}")
    if g.tower is None:
        raise ValueError("The graph carries no rule tower to extend")
    tower = g.tower.with_rules(new_rules)
    initial = [g.states[key].state for key in sorted(g.initial_keys)]
    INFO(f"Inducing {len(new_rules)} level {levels.pop()} rules, tower height {tower.height}")
    return evolve(initial, tower, g.steps if steps is None else steps,
                  max_states=max_states, workers=workers)

# ============================================================================
@dataclass( frozen = True )
class Square:
    """
    a --v--> b
    |        |
    h        h
    v        v
    c --v--> d
    Vertical sides a->b, c->d sit on vertical_level, horizontal sides a->c, b->d on
    horizontal_level. An edge id of None marks an identity side.
    """
    a: Key
    b: Key
    c: Key
    d: Key
    vertical_level: int = 0
    horizontal_level: int = 1
    # event ids of a->b, c->d, a->c, b->d
    edge_ids: Tuple[Optional[str], ...] = (None, None, None, None)

    @property
    def corners(self) -> Tuple[Key, Key, Key, Key]:
        return (self.a, self.b, self.c, self.d)

    @property
    def degenerate(self) -> bool:
        return None in self.edge_ids

@dataclass( frozen = True )
class Cube:
    """Corners indexed by (i, j, k): i moves along level 0, j along level 1, k along level 2."""
    corners: Tuple[Tuple[Tuple[int, int, int], Key], ...]
    faces: Tuple[Square, ...]

    def corner(self, i: int, j: int, k: int) -> Key:
        return dict(self.corners)[(i, j, k)]

@dataclass( frozen = True )
class TwoCell:
    """The composite 2-cell between two full paths, with its pasting decomposition."""
    p1: Tuple[Key, ...]
    p2: Tuple[Key, ...]
    squares: Tuple[Square, ...]

# ============================================================================
def _adjacency(g: MultiwayGraph, level: int) -> Dict[Key, Dict[Key, str]]:
    """source -> target -> smallest event id at that level."""
    adjacency: Dict[Key, Dict[Key, str]] = defaultdict(dict)
    for source, eid, target in g.edges_at_level(level):
        adjacency[source].setdefault(target, eid)
    return adjacency

def _reverse(adjacency: Dict[Key, Dict[Key, str]]) -> Dict[Key, Dict[Key, str]]:
    reverse: Dict[Key, Dict[Key, str]] = defaultdict(dict)
    for source, targets in adjacency.items():
        for target, eid in targets.items():
            reverse[target][source] = eid
    return reverse

def find_squares(g: MultiwayGraph, vertical_level: int = 0, horizontal_level: int = 1) -> List[Square]:
    """
    Every square with both sides present, plus degenerate squares with exactly one
    identity side (the triangles at the ends of a strip).
    """
    V = _adjacency(g, vertical_level)
    H = _adjacency(g, horizontal_level)
    Vin = _reverse(V)
    found: Dict[Tuple[Key, Key, Key, Key], Square] = {}

    def add(a, b, c, d, ids):
        found.setdefault((a, b, c, d), Square(a=a, b=b, c=c, d=d, vertical_level=vertical_level,
                                              horizontal_level=horizontal_level, edge_ids=ids))

    for a in sorted(V):
        for b, ab in sorted(V[a].items()):
            for c, ac in sorted(H.get(a, {}).items()):
                for d, cd in sorted(V.get(c, {}).items()):
                    if d in H.get(b, {}):
                        add(a, b, c, d, (ab, cd, ac, H[b][d]))
    for b in sorted(H):
        for d, bd in sorted(H[b].items()):
            if b == d:
                continue
            # a == c
            for a in sorted(set(Vin.get(b, {})) & set(Vin.get(d, {}))):
                add(a, b, a, d, (V[a][b], V[a][d], None, bd))
    for a in sorted(H):
        for c, ac in sorted(H[a].items()):
            if a == c:
                continue
            # b == d
            for b in sorted(set(V.get(a, {})) & set(V.get(c, {}))):
                add(a, b, c, b, (V[a][b], V[c][b], ac, None))
            # a == b
            for d, cd in sorted(V.get(c, {}).items()):
                if d != c and d in H[a]:
                    add(a, a, c, d, (None, cd, ac, H[a][d]))
    for a in sorted(V):
        for b, ab in sorted(V[a].items()):
            if a == b:
                continue
            # c == d
            for c in sorted(set(H.get(a, {})) & set(H.get(b, {}))):
                add(a, b, c, c, (ab, None, H[a][c], H[b][c]))
    squares = [found[k] for k in sorted(found)]
    DEBUG(f"{len(squares)} squares of type ({vertical_level},{horizontal_level})")
    return squares

# ----------------------------------------------------------------------------
def find_cubes(g: MultiwayGraph) -> List[Cube]:
    """
    Cubes whose bottom and top faces are (0,1) squares without identity sides, joined
    corner by corner with level-2 edges. The four side faces are then (0,2) and (1,2)
    squares by construction.
    """
    if max(g.levels(), default=0) < 2:
        return []
    base = [s for s in find_squares(g, 0, 1) if not s.degenerate]
    index = {s.corners: s for s in base}
    L2 = _adjacency(g, 2)
    cubes = []
    for bottom in base:
        options = [sorted(L2.get(x, {})) for x in bottom.corners]
        for top_corners in product(*options):
            top = index.get(tuple(top_corners))
            if top is None:
                continue
            a, b, c, d = bottom.corners
            a2, b2, c2, d2 = top.corners
            faces = (
                bottom,
                top,
                Square(a=a, b=b, c=a2, d=b2, vertical_level=0, horizontal_level=2,
                       edge_ids=(bottom.edge_ids[0], top.edge_ids[0], L2[a][a2], L2[b][b2])),
                Square(a=c, b=d, c=c2, d=d2, vertical_level=0, horizontal_level=2,
                       edge_ids=(bottom.edge_ids[1], top.edge_ids[1], L2[c][c2], L2[d][d2])),
                Square(a=a, b=c, c=a2, d=c2, vertical_level=1, horizontal_level=2,
                       edge_ids=(bottom.edge_ids[2], top.edge_ids[2], L2[a][a2], L2[c][c2])),
                Square(a=b, b=d, c=b2, d=d2, vertical_level=1, horizontal_level=2,
                       edge_ids=(bottom.edge_ids[3], top.edge_ids[3], L2[b][b2], L2[d][d2])),
            )
            corners = (((0, 0, 0), a), ((1, 0, 0), b), ((0, 1, 0), c), ((1, 1, 0), d),
                       ((0, 0, 1), a2), ((1, 0, 1), b2), ((0, 1, 1), c2), ((1, 1, 1), d2))
            cubes.append(Cube(corners=corners, faces=faces))
    DEBUG(f"{len(cubes)} cubes")
    return cubes

# ============================================================================
def synthesize_cell_rules(g: MultiwayGraph, s1: Square, s2: Square, level: int = 2) -> List[Rule]:
    """Whole-state rules pairing corresponding corners of two 2-cells, one level up."""
    rules: List[Rule] = []
    for u, v in zip(s1.corners, s2.corners):
        if u == v:
            continue
        rule = whole_state_rule(g.state(u), g.state(v), level)
        if rule not in rules:
            rules.append(rule)
    return rules

def two_cell_between(g: MultiwayGraph, p1: PathLike, p2: PathLike) -> Optional[TwoCell]:
    """The 2-cell filling the region between two paths, or None when a square is missing."""
    k1 = [_resolve(x, g).canonical_key for x in p1]
    k2 = [_resolve(x, g).canonical_key for x in p2]
    if len(k1) != len(k2):
        raise LengthMismatch(f"Paths have {len(k1)} and {len(k2)} states")
    if k1[0] != k2[0] or k1[-1] != k2[-1]:
        raise EndpointMismatch("Paths do not share their endpoints")
    index = {s.corners: s for s in find_squares(g)}
    pasted = []
    for i in range(len(k1) - 1):
        square = index.get((k1[i], k1[i + 1], k2[i], k2[i + 1]))
        if square is None:
            DEBUG(f"No square between {g.text(k1[i])} -> {g.text(k1[i + 1])} and {g.text(k2[i])} -> {g.text(k2[i + 1])}")
            return None
        pasted.append(square)
    return TwoCell(p1=tuple(k1), p2=tuple(k2), squares=tuple(pasted))

@dataclass( frozen = True )
class ThreeCell:
    """
    Level-2 arrows carrying the lower 2-cell onto the upper one. checkpoints pair path
    indices (lower, upper) joined by level-2 edges on both rails; consecutive checkpoints
    bound one block, a cube whose level-0 sides may be composites.
    """
    lower: TwoCell
    upper: TwoCell
    checkpoints: Tuple[Tuple[int, int], ...]
    # (1,2) square at each checkpoint: lower rung, upper rung and the two level-2 edges
    rungs: Tuple[Square, ...]

    @property
    def blocks(self) -> Tuple[Cube, ...]:
        found = []
        for n, ((i, j), (i2, j2)) in enumerate(zip(self.checkpoints, self.checkpoints[1:])):
            corners = (((0, 0, 0), self.lower.p1[i]), ((1, 0, 0), self.lower.p1[i2]),
                       ((0, 1, 0), self.lower.p2[i]), ((1, 1, 0), self.lower.p2[i2]),
                       ((0, 0, 1), self.upper.p1[j]), ((1, 0, 1), self.upper.p1[j2]),
                       ((0, 1, 1), self.upper.p2[j]), ((1, 1, 1), self.upper.p2[j2]))
            faces = self.lower.squares[i:i2] + self.upper.squares[j:j2]
            found.append(Cube(corners=corners, faces=faces + self.rungs[n:n + 2]))
        return tuple(found)

def three_cell_between(g: MultiwayGraph,
                       lower: Tuple[PathLike, PathLike],
                       upper: Tuple[PathLike, PathLike],
                       ) -> Optional[ThreeCell]:
    """
    The 3-cell between the 2-cell of two lower paths and the 2-cell of two upper paths.
    Both 2-cells must exist, the paths start and end on level-2 edges, and level-2 edges
    met in between are taken as checkpoints in path order.
    """
    low = two_cell_between(g, *lower)
    high = two_cell_between(g, *upper)
    if low is None or high is None:
        return None
    L1 = _adjacency(g, 1)
    L2 = _adjacency(g, 2)

    def rung(i: int, j: int) -> Optional[Square]:
        a, b, c, d = low.p1[i], low.p2[i], high.p1[j], high.p2[j]
        if c not in L2.get(a, {}) or d not in L2.get(b, {}):
            return None
        ids = [L1.get(a, {}).get(b) if a != b else None, L1.get(c, {}).get(d) if c != d else None]
        if (a != b and ids[0] is None) or (c != d and ids[1] is None):
            return None
        return Square(a=a, b=b, c=c, d=d, vertical_level=1, horizontal_level=2,
                      edge_ids=(ids[0], ids[1], L2[a][c], L2[b][d]))

    last = (len(low.p1) - 1, len(high.p1) - 1)
    rungs = {(i, j): rung(i, j) for i in range(last[0] + 1) for j in range(last[1] + 1)}
    rungs = {ij: square for ij, square in rungs.items() if square is not None}
    if (0, 0) not in rungs or last not in rungs:
        DEBUG(f"No level-2 edges at the ends: {sorted(rungs)}")
        return None
    checkpoints = [(0, 0)]
    while checkpoints[-1] != last:
        i, j = checkpoints[-1]
        # a checkpoint on one final index but not the other cannot reach the far end
        ahead = [ij for ij in rungs if ij == last or (i < ij[0] < last[0] and j < ij[1] < last[1])]
        checkpoints.append(min(ahead))
    DEBUG(f"3-cell with checkpoints {checkpoints}")
    return ThreeCell(lower=low, upper=high, checkpoints=tuple(checkpoints),
                     rungs=tuple(rungs[ij] for ij in checkpoints))

def ladder_subgraph(g: MultiwayGraph, p1: PathLike, p2: PathLike, level: int = 1) -> nx.DiGraph:
    """The two paths as level-0 rails plus the level-k edges running between their states."""
    k1 = [_resolve(x, g).canonical_key for x in p1]
    k2 = [_resolve(x, g).canonical_key for x in p2]
    members = set(k1) | set(k2)
    L = nx.DiGraph()
    for key in sorted(members):
        L.add_node(key, text=g.text(key))
    for path in (k1, k2):
        for u, v in zip(path, path[1:]):
            L.add_edge(u, v, level=0)
    for source, _, target in g.edges_at_level(level):
        if source in members and target in members:
            L.add_edge(source, target, level=level)
    return L

# ============================================================================
@dataclass( frozen = True )
class ClosureReport:
    dimension: int
    cells_checked: int
    violations: Tuple[Tuple, ...] = ()

    @property
    def closed(self) -> bool:
        return not self.violations

    def dict(self, g: Optional[MultiwayGraph] = None) -> Dict:
        def show(item):
            if isinstance(item, bytes):
                return g.text(item) if g is not None else item.decode('utf-8', 'replace')
            return [show(x) for x in item]
        return {
            'dimension':     self.dimension,
            'cells_checked': self.cells_checked,
            'closed':        self.closed,
            'violations':    [show(v) for v in self.violations],
        }

def _lockstep(start: Tuple, rail: Dict[Key, Dict[Key, str]], allowed: Optional[Set[Tuple]]) -> Set[Tuple]:
    """Tuples reachable by advancing every component one rail step at a time."""
    reached: Set[Tuple] = set()
    layer = {start}
    while layer:
        following = set()
        for item in layer:
            for nxt in product(*(sorted(rail.get(x, {})) for x in item)):
                if nxt in reached or (allowed is not None and nxt not in allowed):
                    continue
                following.add(nxt)
        reached |= following
        layer = following
    return reached

def _ladder_violations(rungs: Iterable[Tuple], rail, allowed: Set[Tuple]) -> List[Tuple]:
    rungs = sorted(set(rungs))
    rung_set = set(rungs)
    violations = []
    for r1 in rungs:
        free = _lockstep(r1, rail, None) & rung_set
        constrained = _lockstep(r1, rail, allowed) & rung_set
        for r2 in sorted(free - constrained):
            violations.append((r1, r2))
    return violations

def _base_generations(g: MultiwayGraph) -> Dict[Key, int]:
    depth = {key: 0 for key in g.initial_keys}
    layer = sorted(g.initial_keys)
    while layer:
        following = []
        for key in layer:
            for target in g.children(key, level=0):
                if target not in depth:
                    depth[target] = depth[key] + 1
                    following.append(target)
        layer = following
    return depth

def check_composition_closure(g: MultiwayGraph, dimension: int) -> ClosureReport:
    """
    1: every level-1 edge joins states at the same level-0 distance from the start.
    2: level-1 rungs linked by lockstep level-0 rails are linked by a ladder of rungs.
    3: the same with (0,1) squares as rungs and level-2 edges as rails.
    """
    if dimension == 1:
        base = _base_generations(g)
        edges = g.edges_at_level(1)
        violations = tuple((s, t) for s, _, t in edges if s not in base or base.get(s) != base.get(t))
        return ClosureReport(dimension=1, cells_checked=len(edges), violations=violations)
    if dimension == 2:
        rail = _adjacency(g, 0)
        rungs = {(s, t) for s, _, t in g.edges_at_level(1) if s != t}
        allowed = rungs | {(k, k) for k in g.states}
        violations = _ladder_violations(rungs, rail, allowed)
        return ClosureReport(dimension=2, cells_checked=len(rungs), violations=tuple(violations))
    if dimension == 3:
        rail = _adjacency(g, 2)
        squares = find_squares(g, 0, 1)
        rungs = {s.corners for s in squares if not s.degenerate}
        violations = _ladder_violations(rungs, rail, {s.corners for s in squares})
        return ClosureReport(dimension=3, cells_checked=len(rungs), violations=tuple(violations))
    raise ValueError(f"Composition closure is checked for dimensions 1 to 3, got {dimension}")
