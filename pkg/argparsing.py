import argparse
import sys

# Bad arguments share the exit code of a bad configuration file
EXIT_BAD_ARGUMENTS = 3

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_BAD_ARGUMENTS)

def parse_and_set_loglevel(parser, argv=None) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.verbose == 1:
        args.loglevel = 'INFO'
    if args.debug or args.verbose == 2:
        args.loglevel = 'DEBUG'
    if args.chatty or args.verbose >= 3:
        args.loglevel = 'CHATTY'

    return args


def _base_arguments(parser):
    """Add common arguments to the parser."""
    # General arguments
    parser.add_argument('--config', dest='config', default=None,
                        help="YAML file with 'engine' and 'palette' blocks (see multiway.yaml)")
    parser.add_argument('--profile', help="Enable profiling", action="store_true")
    parser.add_argument('--logdir', dest='logdir', default=None,
                        help="Also log to a rotating daily file under this directory")
    parser.add_argument('-o', '--output', dest='output', default=None,
                        help="Write the result here instead of stdout")
    parser.add_argument('--format', dest='format', default=None, choices=['dot', 'json', 'text'],
                        help="Output format. Each command has its own default")

    vgroup = parser.add_argument_group('Logging level')
    exclusive_vgroup = vgroup.add_mutually_exclusive_group()
    exclusive_vgroup.add_argument('-v', '--verbose', help="Prints more information per repetition", action='count', default=0)
    exclusive_vgroup.add_argument('-d', '--debug', help="Prints even more information", action="store_true")
    exclusive_vgroup.add_argument('-c', '--chatty', help="Prints the most information", action="store_true")
    exclusive_vgroup.add_argument('--loglevel', dest='loglevel', default='WARN',
                                  help="Specific logging level (CHATTY, DEBUG, INFO, WARN, ERROR, CRITICAL)")

    # Engine limits. None means "take it from the configuration"
    egroup = parser.add_argument_group('Engine')
    egroup.add_argument('--steps', dest='steps', default=3, type=int, help="Evolution depth (default: 3)")
    egroup.add_argument('--depth', dest='depth', default=3, type=int,
                        help="Depth of the causal invariance check and of joinability searches (default: 3)")
    egroup.add_argument('--max-states', dest='max_states', default=None, type=int,
                        help="Abort once this many states are stored (overrides MULTIWAY_MAX_STATES)")
    egroup.add_argument('--workers', dest='workers', default=None, type=int,
                        help="Threads used to expand each generation")
    egroup.add_argument('--seed', dest='seed', default=None, type=int,
                        help="Seed for randomized single-way strategies")
    egroup.add_argument('--unanchored', dest='unanchored', action='store_true', default=None,
                        help="Let level >= 1 rules match inside states instead of against the whole state")

    return parser

def _with_rulefile(parser):
    parser.add_argument('rulefile', help="Rule file (see rules/ for examples)")
    return parser

# ============================================================================================
def multiway_args(argv=None):
    """Handle command line tedium for the multiway tool."""
    common = _base_arguments(_Parser(add_help=False))
    parser = _Parser(prog='multiway.py',
                     description='Multiway rewriting of strings, hypergraphs and terms: evolution graphs, causal '
                                 'networks, branchial graphs, homotopy cells and completion.')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    p = _with_rulefile(commands.add_parser('evolve', parents=[common], help="Multiway evolution graph"))
    p.add_argument('--max-level', dest='max_level', default=None, type=int,
                   help="Use only rules up to this tower level (default: all)")
    p.add_argument('--causal', dest='causal', action='store_true',
                   help="DOT output overlays events and causal edges")

    p = _with_rulefile(commands.add_parser('singleway', parents=[common], help="One deterministic history"))
    p.add_argument('--strategy', dest='strategy', default='first', choices=['first', 'nonoverlapping'],
                   help="first: leftmost match each step; nonoverlapping: a random maximal set of disjoint matches")

    p = _with_rulefile(commands.add_parser('causal', parents=[common], help="Causal invariance verdict"))
    p.add_argument('--path-cap', dest='path_cap', default=None, type=int,
                   help="Histories enumerated before the verdict becomes inconclusive")
    p.add_argument('--unlabeled', dest='unlabeled', action='store_true',
                   help="Compare causal networks without rule labels")
    p.add_argument('--reduce', dest='reduce', action='store_true',
                   help="DOT output is the transitive reduction of the first history's causal network")

    p = _with_rulefile(commands.add_parser('branchial', parents=[common], help="Branchial graph of one slice"))
    p.add_argument('--slice', dest='slice', default=None, type=int, help="Slice index (default: the last)")
    p.add_argument('--ancestor-depth', dest='ancestor_depth', default=None, type=int,
                   help="Link states sharing an ancestor this many steps back")

    p = commands.add_parser('homotopy', help="Homotopy rule synthesis and cell detection")
    actions = p.add_subparsers(dest='action', required=True, parser_class=_Parser)
    s = _with_rulefile(actions.add_parser('synth', parents=[common],
                                          help="Rules pairing the states of two paths, as rule-file lines"))
    s.add_argument('--path1', dest='path1', required=True, help="States separated by semicolons, e.g. 'AA;AAB;AABB'")
    s.add_argument('--path2', dest='path2', required=True, help="States of a second path of the same length")
    s.add_argument('--level', dest='level', default=1, type=int, help="Level of the synthesized rules (default: 1)")
    s = _with_rulefile(actions.add_parser('induce', parents=[common],
                                          help="Evolve the level 0 rules, then induce each higher level in turn"))
    s.add_argument('--with', dest='extra', default=None,
                   help="Another rule file whose level >= 1 rules are induced as well")
    s = _with_rulefile(actions.add_parser('cells', parents=[common],
                                          help="Squares, cubes and composition closure of the full tower"))
    s.add_argument('--path1', dest='path1', default=None, help="With --path2, also report the 2-cell between them")
    s.add_argument('--path2', dest='path2', default=None)

    p = _with_rulefile(commands.add_parser('complete', parents=[common], help="Knuth-Bendix completion"))
    p.add_argument('--max-rules', dest='max_rules', default=None, type=int)
    p.add_argument('--max-iters', dest='max_iters', default=None, type=int)
    p.add_argument('--no-interreduce', dest='interreduce', action='store_false', default=None)
    p.add_argument('--observe', dest='observe', action='store_true',
                   help="Report branchial sizes per slice (--steps deep) before and after completion")
    p.add_argument('--plot', dest='plot', default=None, help="With --observe, save a branchial size plot here")

    p = commands.add_parser('closure', parents=[common], help="Transitive (and symmetric) closure of a hypergraph")
    p.add_argument('kind', choices=['categorify', 'groupoidify'])
    p.add_argument('hypergraph', help="Binary hypergraph, e.g. '{{1,2},{2,3}}'")

    p = commands.add_parser('export', parents=[common], help="Convert a JSON export to DOT (or normalized JSON)")
    p.add_argument('jsonfile', help="File written by --format json")

    return parse_and_set_loglevel(parser, argv)

# ============================================================================================
