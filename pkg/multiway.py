#!/usr/bin/env python

import cProfile
import dataclasses
import pstats
import sys
from pathlib import Path
from typing import Dict, List

from argparsing import multiway_args
from mwaymisc import setup_rot_handler, resident_memory_mb
from simpleLogger import slogger, set_level, CHATTY, DEBUG, INFO, WARN, ERROR, CRITICAL  # noqa: F401
from mwaycore import Substrate, RewriteError, RuleTower, parse_payload, parse_state, State
from mwayconfig import EngineConfig
from mwayrulefile import RuleFile, parse_rule_file, print_rule_file, format_rule, unanchor
from mwayevolution import MultiwayGraph, evolve, singleway_evolve, foliate, branchial_graph, branchial_sizes
from mwaycausal import (VerdictStatus, causal_invariance_verdict, build_causal_network,
                        multiway_causal_graph)
from mwayhomotopy import (synthesize_homotopy_rules, induce, find_squares, find_cubes, two_cell_between,
                          check_composition_closure)
from mwaycompletion import CompletionStatus, knuth_bendix, observer_report
from mwayhypergraphs import categorify, groupoidify
from mwayexport import export_dot, export_json, import_json
from mwayplots import plot_branchial_sizes

# Exit codes, documented in README.md
EXIT_OK           = 0
EXIT_ERROR        = 1
EXIT_INCONCLUSIVE = 2
EXIT_CONFIG       = 3
EXIT_NO_INPUT     = 10

# First entry is the default
FORMATS = {
    'evolve':    ['dot', 'json', 'text'],
    'singleway': ['text', 'json', 'dot'],
    'causal':    ['json', 'text', 'dot'],
    'branchial': ['dot', 'json', 'text'],
    'synth':     ['text', 'json'],
    'induce':    ['dot', 'json', 'text'],
    'cells':     ['json', 'text', 'dot'],
    'complete':  ['text', 'json'],
    'closure':   ['text', 'json', 'dot'],
    'export':    ['dot', 'json'],
}

# CLI cell detection stops at cubes
MAX_CLI_HEIGHT = 3

# ============================================================================================
class UsageError(Exception):
    pass

def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as stream:
        return stream.read()

def _load_rulefile(path: str, config: EngineConfig) -> RuleFile:
    rf = parse_rule_file(_read(path))
    if not rf.initial:
        raise UsageError(f"{path} declares no 'init:' state")
    if config.unanchored:
        rf = dataclasses.replace(rf, tower=unanchor(rf.tower))
    INFO(f"Loaded {len(rf.rules)} {rf.substrate.value} rules from {path}")
    return rf

def _emit(text: str, args) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        INFO(f"Wrote {args.output}")
    else:
        sys.stdout.write(text)

def _path(rf: RuleFile, text: str) -> List[State]:
    """States separated by ';' (commas belong to hypergraph and term syntax)."""
    items = [t.strip() for t in text.split(';') if t.strip()]
    return [parse_state(rf.substrate, item, variables=rf.variables) for item in items]

def _evolve(rf: RuleFile, tower: RuleTower, args, config: EngineConfig, max_level=None) -> MultiwayGraph:
    g = evolve(list(rf.initial), tower, args.steps, max_level=max_level,
               max_states=config.max_states, workers=config.workers)
    INFO(f"{len(g.states)} states, {len(g.events)} events after {args.steps} steps, {resident_memory_mb():.0f} MB")
    return g

# ============================================================================================
def cmd_evolve(args, config: EngineConfig, fmt: str) -> int:
    rf = _load_rulefile(args.rulefile, config)
    g = _evolve(rf, rf.tower, args, config, max_level=args.max_level)
    if fmt == 'dot':
        _emit(export_dot(multiway_causal_graph(g) if args.causal else g, config), args)
    elif fmt == 'json':
        _emit(export_json(g, reports={'counts': g.state_counts_by_generation()}), args)
    else:
        lines = [f"{n}: {' '.join(g.text(k) for k in g.generation(n))}" for n in range(len(g.state_counts_by_generation()))]
        _emit("\n".join(lines) + "\n", args)
    return EXIT_OK

def cmd_singleway(args, config: EngineConfig, fmt: str) -> int:
    rf = _load_rulefile(args.rulefile, config)
    history = singleway_evolve(rf.initial[0], rf.tower.rules_up_to(0), args.steps, args.strategy, seed=config.seed)
    if fmt == 'dot':
        g = MultiwayGraph(substrate=rf.substrate)
        g.add_state(history[0][0], 0)
        g.initial_keys.add(history[0][0].canonical_key)
        for (before, _), (after, events) in zip(history, history[1:]):
            g.link(before, after, ",".join(e.rule_id for e in events))
        _emit(export_dot(g, config), args)
    elif fmt == 'json':
        steps = [{'state': state.text, 'rule_ids': [e.rule_id for e in events]} for state, events in history]
        _emit(export_json(substrate=rf.substrate, reports={'singleway': {'strategy': args.strategy, 'steps': steps}}), args)
    else:
        lines = [f"{i}: {state.text}" + (f"  [{', '.join(e.rule_id for e in events)}]" if events else "")
                 for i, (state, events) in enumerate(history)]
        _emit("\n".join(lines) + "\n", args)
    return EXIT_OK

def cmd_causal(args, config: EngineConfig, fmt: str) -> int:
    rf = _load_rulefile(args.rulefile, config)
    base = rf.tower.rules_up_to(0)
    if fmt == 'dot':
        history = singleway_evolve(rf.initial[0], base, args.depth)
        network = build_causal_network([e for _, events in history for e in events])
        _emit(export_dot(network, config, reduce=args.reduce), args)
        return EXIT_OK
    report = causal_invariance_verdict(rf.initial[0], base, args.depth, path_cap=config.path_cap,
                                       labeled=not args.unlabeled, workers=config.workers)
    if fmt == 'json':
        _emit(export_json(substrate=rf.substrate, reports={'causal': report.dict()}), args)
    else:
        _emit(f"{report.status.value} at depth {report.depth} over {report.paths} histories\n", args)
    return EXIT_INCONCLUSIVE if report.status == VerdictStatus.INCONCLUSIVE else EXIT_OK

def cmd_branchial(args, config: EngineConfig, fmt: str) -> int:
    rf = _load_rulefile(args.rulefile, config)
    g = _evolve(rf, rf.tower, args, config, max_level=0)
    foliation = foliate(g)
    index = len(foliation) - 1 if args.slice is None else args.slice
    if not 0 <= index < len(foliation):
        raise UsageError(f"Slice {index} out of range, the foliation has {len(foliation)} slices")
    depth = args.ancestor_depth or config.ancestor_depth
    if fmt == 'dot':
        _emit(export_dot(branchial_graph(g, foliation, index, depth), config), args)
    else:
        sizes = branchial_sizes(g, foliation, depth)
        if fmt == 'json':
            report = {'slice': index, 'ancestor_depth': depth, 'sizes': [list(s) for s in sizes]}
            _emit(export_json(g, reports={'branchial': report}), args)
        else:
            _emit("".join(f"{i}: {s} states, {e} edges\n" for i, (s, e) in enumerate(sizes)), args)
    return EXIT_OK

# ============================================================================================
def cmd_synth(args, config: EngineConfig, fmt: str) -> int:
    rf = _load_rulefile(args.rulefile, config)
    rules = synthesize_homotopy_rules(_path(rf, args.path1), _path(rf, args.path2), level=args.level,
                                      anchored=not config.unanchored)
    if fmt == 'json':
        _emit(export_json(substrate=rf.substrate, reports={'homotopy_rules': [r.text for r in rules]}), args)
    else:
        _emit("".join(format_rule(r) + "\n" for r in rules), args)
    return EXIT_OK

def _upper_levels(tower: RuleTower) -> List[List]:
    return [list(level) for level in tower.levels[1:] if level]

def cmd_induce(args, config: EngineConfig, fmt: str) -> int:
    rf = _load_rulefile(args.rulefile, config)
    levels = _upper_levels(rf.tower)
    if args.extra:
        extra = _load_rulefile(args.extra, config)
        if extra.substrate != rf.substrate:
            raise UsageError(f"{args.extra} holds {extra.substrate.value} rules, {args.rulefile} {rf.substrate.value} rules")
        levels += _upper_levels(extra.tower)
    g = _evolve(rf, RuleTower.from_rules(rf.tower.rules_up_to(0)), args, config)
    for rules in levels:
        g = induce(g, rules, max_states=config.max_states, workers=config.workers)
    if fmt == 'dot':
        _emit(export_dot(g, config), args)
    elif fmt == 'json':
        _emit(export_json(g, reports={'levels': g.levels()}), args)
    else:
        _emit("".join(f"level {k}: {len(g.edges_at_level(k))} edges\n" for k in g.levels()), args)
    return EXIT_OK

def cmd_cells(args, config: EngineConfig, fmt: str) -> int:
    rf = _load_rulefile(args.rulefile, config)
    if rf.tower.height > MAX_CLI_HEIGHT:
        raise UsageError(f"Tower height {rf.tower.height}, cells are detected up to height {MAX_CLI_HEIGHT}")
    g = _evolve(rf, rf.tower, args, config)
    squares = find_squares(g) if rf.tower.height >= 1 else []
    cubes = find_cubes(g) if rf.tower.height >= 2 else []
    cells: List = list(squares) + list(cubes)
    if args.path1 and args.path2:
        cell = two_cell_between(g, [s.canonical_key for s in _path(rf, args.path1)],
                                [s.canonical_key for s in _path(rf, args.path2)])
        if cell is None:
            WARN("No 2-cell between the two paths")
        else:
            cells.append(cell)
    closure: Dict[str, Dict] = {}
    for dimension in range(1, min(rf.tower.height + 1, MAX_CLI_HEIGHT) + 1):
        closure[str(dimension)] = check_composition_closure(g, dimension).dict(g)
    if fmt == 'dot':
        _emit(export_dot(g, config), args)
    elif fmt == 'json':
        reports = {'squares': len(squares), 'cubes': len(cubes), 'closure': closure}
        _emit(export_json(g, cells=cells, reports=reports), args)
    else:
        lines = [f"squares: {len(squares)}", f"cubes: {len(cubes)}"]
        lines += [f"closure {d}: {'closed' if r['closed'] else str(len(r['violations'])) + ' violations'}"
                  for d, r in closure.items()]
        _emit("\n".join(lines) + "\n", args)
    return EXIT_OK

# ============================================================================================
def cmd_complete(args, config: EngineConfig, fmt: str) -> int:
    rf = _load_rulefile(args.rulefile, config)
    rules = rf.tower.rules_up_to(0)
    ordering = rf.term_ordering()
    completion_args = {'max_rules': config.max_rules, 'max_iters': config.max_iters, 'interreduce': config.interreduce}
    reports = {}
    if args.observe:
        observed = observer_report(rf.initial[0], rules, ordering, args.steps, config.ancestor_depth, **completion_args)
        result = observed.completion
        reports['observer'] = {'before': [list(x) for x in observed.before], 'after': [list(x) for x in observed.after]}
        if args.plot:
            plot_branchial_sizes(observed.before, observed.after, args.plot, title=Path(args.rulefile).name)
    else:
        result = knuth_bendix(rules, ordering, **completion_args)
    reports['completion'] = result.dict()

    if result.status == CompletionStatus.ORDER_FAILURE:
        ERROR(f"Completion failed: {result.reason}")
    elif result.status == CompletionStatus.DIVERGED:
        WARN(f"Completion diverged: {result.reason}")
    if fmt == 'json':
        _emit(export_json(substrate=rf.substrate, reports=reports), args)
    elif result.status == CompletionStatus.COMPLETED:
        _emit(print_rule_file(dataclasses.replace(rf, tower=RuleTower.from_rules(result.rules))), args)

    if result.status == CompletionStatus.ORDER_FAILURE:
        return EXIT_ERROR
    if result.status == CompletionStatus.DIVERGED:
        return EXIT_INCONCLUSIVE
    return EXIT_OK

def cmd_closure(args, config: EngineConfig, fmt: str) -> int:
    source = parse_payload(Substrate.HYPERGRAPH, args.hypergraph)
    closed = categorify(source) if args.kind == 'categorify' else groupoidify(source)
    if fmt == 'text':
        _emit(closed.text + "\n", args)
        return EXIT_OK
    g = MultiwayGraph(substrate=Substrate.HYPERGRAPH)
    g.link(State.of(source), State.of(closed), args.kind)
    _emit(export_dot(g, config) if fmt == 'dot' else export_json(g), args)
    return EXIT_OK

def cmd_export(args, config: EngineConfig, fmt: str) -> int:
    bundle = import_json(_read(args.jsonfile))
    if fmt == 'json':
        substrate = bundle.graph.substrate if bundle.graph is not None else None
        _emit(export_json(bundle.graph, cells=bundle.cells, reports=bundle.reports, substrate=substrate), args)
        return EXIT_OK
    if bundle.graph is None:
        raise UsageError(f"{args.jsonfile} holds no graph to draw")
    _emit(export_dot(bundle.graph, config), args)
    return EXIT_OK

COMMANDS = {
    'evolve':    cmd_evolve,
    'singleway': cmd_singleway,
    'causal':    cmd_causal,
    'branchial': cmd_branchial,
    'synth':     cmd_synth,
    'induce':    cmd_induce,
    'cells':     cmd_cells,
    'complete':  cmd_complete,
    'closure':   cmd_closure,
    'export':    cmd_export,
}

# ============================================================================================
def run(args) -> int:
    name = args.action if args.command == 'homotopy' else args.command
    fmt = args.format or FORMATS[name][0]
    if fmt not in FORMATS[name]:
        ERROR(f"'{name}' writes {', '.join(FORMATS[name])}, not {fmt}")
        return EXIT_CONFIG
    if args.steps < 0 or args.depth < 1:
        ERROR(f"--steps must be >= 0 and --depth >= 1, got {args.steps} and {args.depth}")
        return EXIT_CONFIG

    param_overrides = {k: getattr(args, k, None) for k in
                       ("max_states", "workers", "seed", "unanchored", "path_cap", "max_rules", "max_iters", "interreduce")}
    CHATTY(f"Engine overrides: {param_overrides}")
    try:
        config = EngineConfig.from_yaml_file(args.config, param_overrides=param_overrides)
    except FileNotFoundError as e:
        ERROR(f"Error: {e}")
        return EXIT_NO_INPUT
    except (ValueError, TypeError) as e:
        ERROR(f"Bad configuration: {e}")
        return EXIT_CONFIG

    try:
        return COMMANDS[name](args, config, fmt)
    except FileNotFoundError as e:
        ERROR(f"Input not found: {e.filename or e}")
        return EXIT_NO_INPUT
    except UsageError as e:
        ERROR(str(e))
        return EXIT_CONFIG
    except (RewriteError, ValueError) as e:
        ERROR(f"{type(e).__name__}: {e}")
        return EXIT_ERROR

def main(argv=None):
    ### digest arguments
    args = multiway_args(argv)

    # Set up logging before going any further
    try:
        set_level(args.loglevel)
    except ValueError as e:
        ERROR(str(e))
        sys.exit(EXIT_CONFIG)
    if args.logdir:
        sublogdir = setup_rot_handler(args.logdir)
        INFO(f"Logging to {sublogdir}, level {args.loglevel}")
    DEBUG(f"Arguments: {vars(args)}")

    if args.profile:
        DEBUG( "Profiling is ENABLED.")
        profiler = cProfile.Profile()
        profiler.enable()

    code = run(args)

    if args.profile:
        profiler.disable()
        DEBUG("Profiling finished. Printing stats...")
        stats = pstats.Stats(profiler, stream=sys.stderr)
        stats.strip_dirs().sort_stats('time').print_stats(10)

    if code != EXIT_OK:
        sys.exit(code)

# ============================================================================================

if __name__ == '__main__':
    main()
    exit(0)
