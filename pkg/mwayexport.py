"""
mwayexport.py

DOT and JSON output for multiway graphs, causal overlays, branchial graphs and causal
networks, and JSON import. Node and edge order is sorted everywhere so repeated runs
give byte-identical text.
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import networkx as nx
import pydot  # noqa: F401  (backend of nx.nx_pydot)

from simpleLogger import CHATTY, DEBUG, INFO, WARN, ERROR  # noqa: F401
from mwaycore import Substrate, Event, parse_state
from mwayconfig import EngineConfig
from mwayevolution import MultiwayGraph
from mwaycausal import CausalNetwork
from mwayhomotopy import Square, Cube, TwoCell

SCHEMA_VERSION = 1

# ============================================================================
def _quoted(text: str) -> str:
    return '"' + str(text).replace('\\', '\\\\').replace('"', '\\"') + '"'

def _to_dot(G: nx.Graph) -> str:
    return nx.nx_pydot.to_pydot(G).to_string()

def _multiway_dot(g: MultiwayGraph, config: EngineConfig) -> nx.MultiDiGraph:
    G = nx.MultiDiGraph()
    G.graph['node'] = {'shape': 'box'}
    names = {key: f"s{i}" for i, key in enumerate(sorted(g.states))}
    for key, name in names.items():
        G.add_node(name, label=_quoted(g.text(key)))
    for i, (source, eid, target) in enumerate(sorted(g.edges, key=lambda e: e[1])):
        event = g.events[eid]
        G.add_edge(names[source], names[target], key=i, color=config.color('evolution', event.level),
                   tooltip=_quoted(event.rule_id))
    return G

def _overlay_dot(overlay: nx.MultiDiGraph, config: EngineConfig) -> nx.MultiDiGraph:
    G = nx.MultiDiGraph()
    states = sorted(n for n in overlay.nodes if n[0] == "state")
    events = sorted(n for n in overlay.nodes if n[0] == "event")
    names = {n: f"s{i}" for i, n in enumerate(states)}
    names.update({n: f"e{i}" for i, n in enumerate(events)})
    for n in states:
        G.add_node(names[n], label=_quoted(overlay.nodes[n]['text']), shape='box')
    for n in events:
        G.add_node(names[n], label=_quoted(overlay.nodes[n]['rule_id']), shape='ellipse')
    edges = sorted((names[u], names[v], data['kind']) for u, v, data in overlay.edges(data=True))
    for i, (u, v, kind) in enumerate(edges):
        G.add_edge(u, v, key=i, color=config.color(kind))
    return G

def _branchial_dot(B: nx.Graph, config: EngineConfig) -> nx.Graph:
    G = nx.Graph()
    names = {key: f"s{i}" for i, key in enumerate(sorted(B.nodes))}
    for key, name in names.items():
        G.add_node(name, label=_quoted(B.nodes[key].get('text', key)))
    edges = sorted((*sorted((names[a], names[b])), data.get('weight', 1)) for a, b, data in B.edges(data=True))
    for u, v, weight in edges:
        G.add_edge(u, v, color=config.color('branchial'), label=str(weight))
    return G

def _causal_dot(network: CausalNetwork, config: EngineConfig, reduce: bool) -> nx.DiGraph:
    source = network.transitive_reduction() if reduce else network.to_networkx()
    G = nx.DiGraph()
    names = {eid: f"e{i}" for i, eid in enumerate(network.event_ids)}
    for eid in network.event_ids:
        G.add_node(names[eid], label=_quoted(network.rule_ids[eid]))
    for a, b in sorted((names[a], names[b]) for a, b in source.edges):
        G.add_edge(a, b, color=config.color('causal'))
    return G

def export_dot(artifact, config: Optional[EngineConfig] = None, reduce: bool = False) -> str:
    """
    DOT text for a MultiwayGraph, a causal overlay (multiway_causal_graph), a branchial
    graph or a CausalNetwork. Edge colors come from the configured palette.
    """
    config = config or EngineConfig()
    if isinstance(artifact, MultiwayGraph):
        G = _multiway_dot(artifact, config)
    elif isinstance(artifact, CausalNetwork):
        G = _causal_dot(artifact, config, reduce)
    elif isinstance(artifact, nx.MultiDiGraph):
        G = _overlay_dot(artifact, config)
    elif isinstance(artifact, nx.Graph) and not artifact.is_directed():
        G = _branchial_dot(artifact, config)
    else:
        raise TypeError(f"Cannot export {type(artifact).__name__} as DOT")
    return _to_dot(G)

# ============================================================================
def _text(key: bytes) -> str:
    return key.decode('utf-8')

def _square_json(square: Square) -> Dict[str, Any]:
    return {
        'kind':     'square',
        'corners':  [_text(k) for k in square.corners],
        'levels':   [square.vertical_level, square.horizontal_level],
        'edge_ids': list(square.edge_ids),
    }

def _cell_json(cell) -> Dict[str, Any]:
    if isinstance(cell, Square):
        return _square_json(cell)
    if isinstance(cell, Cube):
        return {
            'kind':    'cube',
            'corners': [[list(index), _text(key)] for index, key in cell.corners],
            'faces':   [_square_json(face) for face in cell.faces],
        }
    if isinstance(cell, TwoCell):
        return {
            'kind':    'two_cell',
            'p1':      [_text(k) for k in cell.p1],
            'p2':      [_text(k) for k in cell.p2],
            'squares': [_square_json(s) for s in cell.squares],
        }
    raise TypeError(f"Unknown cell type {type(cell).__name__}")

def export_json(g: Optional[MultiwayGraph] = None,
                cells: Iterable = (),
                reports: Optional[Dict[str, Any]] = None,
                substrate: Optional[Substrate] = None,
                ) -> str:
    """One schema for all substrates; canonical keys are written as their UTF-8 text."""
    states, events, edges = [], [], []
    if g is not None:
        substrate = g.substrate
        for key in sorted(g.states):
            record = g.states[key]
            states.append({
                'key':        _text(key),
                'text':       record.state.text,
                'generation': record.first_generation,
                'initial':    key in g.initial_keys,
            })
        for eid in sorted(g.events):
            event = g.events[eid]
            events.append({
                'id':         event.id,
                'rule_id':    event.rule_id,
                'level':      event.level,
                'source':     _text(event.source_state_key),
                'target':     _text(event.target_state_key),
                'consumed':   sorted(event.consumed_tokens),
                'produced':   sorted(event.produced_tokens),
                'generation': event.generation,
                'binding':    event.binding,
            })
        edges = [[_text(s), eid, _text(t)] for s, eid, t in sorted(g.edges, key=lambda e: e[1])]
    document = {
        'schema_version': SCHEMA_VERSION,
        'substrate':      Substrate(substrate).value if substrate is not None else None,
        'states':         states,
        'events':         events,
        'edges':          edges,
        'cells':          [_cell_json(c) for c in cells],
        'reports':        reports or {},
    }
    return json.dumps(document, sort_keys=True, indent=2) + "\n"

# ============================================================================
@dataclass
class ExportBundle:
    graph: Optional[MultiwayGraph]
    cells: List = field(default_factory=list)
    reports: Dict[str, Any] = field(default_factory=dict)

def _square_from(data: Dict) -> Square:
    a, b, c, d = (k.encode('utf-8') for k in data['corners'])
    return Square(a=a, b=b, c=c, d=d, vertical_level=data['levels'][0], horizontal_level=data['levels'][1],
                  edge_ids=tuple(data['edge_ids']))

def import_json(text: str) -> ExportBundle:
    """Inverse of export_json. States are re-parsed and must reproduce their canonical keys."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"Not a JSON export: {exc}")
    version = document.get('schema_version')
    if version != SCHEMA_VERSION:
        raise ValueError(f"Unsupported schema version {version!r}, expected {SCHEMA_VERSION}")

    graph = None
    if document.get('substrate') is not None:
        substrate = Substrate(document['substrate'])
        graph = MultiwayGraph(substrate=substrate)
        for entry in document['states']:
            state = parse_state(substrate, entry['text'])
            if state.canonical_key != entry['key'].encode('utf-8'):
                raise ValueError(f"State {entry['text']} does not reproduce its key {entry['key']}")
            graph.add_state(state, entry['generation'])
            if entry['initial']:
                graph.initial_keys.add(state.canonical_key)
        for entry in document['events']:
            graph.add_event(Event(id=entry['id'], rule_id=entry['rule_id'], level=entry['level'],
                                  source_state_key=entry['source'].encode('utf-8'),
                                  target_state_key=entry['target'].encode('utf-8'),
                                  consumed_tokens=frozenset(entry['consumed']),
                                  produced_tokens=frozenset(entry['produced']),
                                  generation=entry['generation'], binding=entry.get('binding', "")))
        graph.steps = max((r.first_generation for r in graph.states.values()), default=0)

    cells: List = []
    for data in document.get('cells', []):
        if data['kind'] == 'square':
            cells.append(_square_from(data))
        elif data['kind'] == 'cube':
            cells.append(Cube(corners=tuple((tuple(index), key.encode('utf-8')) for index, key in data['corners']),
                              faces=tuple(_square_from(face) for face in data['faces'])))
        elif data['kind'] == 'two_cell':
            cells.append(TwoCell(p1=tuple(k.encode('utf-8') for k in data['p1']),
                                 p2=tuple(k.encode('utf-8') for k in data['p2']),
                                 squares=tuple(_square_from(s) for s in data['squares'])))
        else:
            raise ValueError(f"Unknown cell kind {data['kind']!r}")
    return ExportBundle(graph=graph, cells=cells, reports=document.get('reports', {}))
