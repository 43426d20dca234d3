"""
mwayrulefile.py

The rule-file format:

    # comment
    substrate: string | hypergraph | term
    alphabet: A B            (symbols; for terms, the function symbols)
    variables: x y z         (term variables)
    constants: a b e         (what a bare lhs or rhs-only term variable ranges over)
    precedence: g > inv > a > e
    ordering: lpo | shortlex
    init: AA                 (repeatable)
    A -> AB
    AAB -> ABA @level 1 @anchored @injective @id name

Header lines and rule lines may be interleaved; every line reports errors with its
line and column, counting from 1.
"""

import dataclasses
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from simpleLogger import CHATTY, DEBUG, INFO, WARN, ERROR  # noqa: F401
from mwaycore import (Substrate, State, Rule, RuleTower, RewriteError, ParseError, SemanticError, LocatedError,
                      make_rule, parse_state, substrate_module, default_rule_id)
from mwayterms import TermOrdering, OrderingKind, check_arities, subterms, Var

HEADER_KEYS = ("substrate", "alphabet", "variables", "constants", "precedence", "ordering", "init")

# ============================================================================
@dataclass( frozen = True )
class RuleFile:
    substrate: Substrate
    tower: RuleTower
    initial: Tuple[State, ...] = ()
    alphabet: Optional[Tuple[str, ...]] = None
    variables: Tuple[str, ...] = ()
    constants: Tuple[str, ...] = ()
    precedence: Tuple[str, ...] = ()   # highest first
    ordering: Optional[str] = None

    # ------------------------------------------------
    @property
    def rules(self) -> Tuple[Rule, ...]:
        return self.tower.all_rules()

    def term_ordering(self) -> TermOrdering:
        """The declared ordering; lpo for terms and shortlex for strings when none is given."""
        kind = self.ordering or ("lpo" if self.substrate == Substrate.TERM else "shortlex")
        return TermOrdering(kind=OrderingKind(kind), precedence=self.precedence)

    def header(self) -> Dict[str, str]:
        return {
            'substrate':  self.substrate.value,
            'alphabet':   " ".join(self.alphabet) if self.alphabet is not None else None,
            'variables':  " ".join(self.variables) or None,
            'constants':  " ".join(self.constants) or None,
            'precedence': " > ".join(self.precedence) or None,
            'ordering':   self.ordering,
        }

# ============================================================================
def _relocate(exc: LocatedError, line_no: int, offset: int) -> LocatedError:
    """Move an error raised on a fragment to its place in the file."""
    return type(exc)(exc.message, line_no, exc.column + offset, exc.expected)

def _words(value: str) -> Tuple[str, ...]:
    return tuple(s for s in re.split(r"[\s,]+", value.strip()) if s)

def _symbols(value: str) -> Tuple[str, ...]:
    """String alphabets may be written "A B" or "AB"."""
    items = list(_words(value))
    if len(items) == 1 and len(items[0]) > 1:
        items = list(items[0])
    return tuple(items)

_annotation_re = re.compile(r"@(\w+)(?:\s+([^\s@]+))?")

def _annotations(text: str, line_no: int, col: int) -> Dict[str, object]:
    found: Dict[str, object] = {}
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _annotation_re.match(text, pos)
        if not m:
            raise ParseError("unexpected text after rule", line_no, col + pos, expected="@annotation")
        name, arg = m.group(1), m.group(2)
        if name in ("level", "id"):
            if arg is None:
                raise ParseError(f"@{name} needs a value", line_no, col + m.end(), expected=name)
            if name == "level":
                if not arg.isdigit():
                    raise ParseError(f"bad level '{arg}'", line_no, col + m.start(2), expected="non-negative integer")
                found["level"] = int(arg)
            else:
                found["id"] = arg
            pos = m.end()
        elif name in ("anchored", "unanchored", "injective"):
            if name == "injective":
                found["injective"] = True
            else:
                found["anchored"] = name == "anchored"
            pos = m.end(1)
        else:
            raise ParseError(f"unknown annotation @{name}", line_no, col + pos,
                             expected="@level, @anchored, @unanchored, @injective or @id")
    return found

# ----------------------------------------------------------------------------
def _check_string_symbols(text: str, alphabet, line_no: int, col: int) -> None:
    for i, ch in enumerate(text):
        if ch.isspace():
            raise ParseError("whitespace inside a string pattern", line_no, col + i, expected="symbol")
        if alphabet is not None and ch not in alphabet:
            raise SemanticError(f"undeclared symbol '{ch}'", line_no, col + i, expected="a symbol from the alphabet")

def _check_term_symbols(term, alphabet, line_no: int, col: int) -> None:
    if alphabet is None:
        return
    for _, node in subterms(term):
        if not isinstance(node, Var) and node.head not in alphabet:
            raise SemanticError(f"undeclared symbol '{node.head}'", line_no, col, expected="a declared symbol")

# ============================================================================
def parse_rule_file(text: str) -> RuleFile:
    lines = text.splitlines()
    header: Dict[str, object] = {}
    inits: List[Tuple[int, int, str]] = []
    rule_lines: List[Tuple[int, str]] = []

    for line_no, raw in enumerate(lines, start=1):
        line = raw.split('#', 1)[0].rstrip()
        if not line.strip():
            continue
        if '->' in line:
            rule_lines.append((line_no, line))
            continue
        m = re.match(r"\s*([A-Za-z_]+)\s*:(.*)$", line)
        if not m:
            raise ParseError("expected a header line or a rule", line_no, len(line) - len(line.lstrip()) + 1,
                             expected="'key: value' or 'lhs -> rhs'")
        key, value = m.group(1), m.group(2).strip()
        if key not in HEADER_KEYS:
            raise ParseError(f"unknown header key '{key}'", line_no, m.start(1) + 1, expected=", ".join(HEADER_KEYS))
        if key == "init":
            inits.append((line_no, m.start(2) + 1 + (len(m.group(2)) - len(m.group(2).lstrip())), value))
            continue
        if key in header:
            raise SemanticError(f"duplicate header key '{key}'", line_no, m.start(1) + 1)
        header[key] = (line_no, value)

    if "substrate" not in header:
        raise SemanticError("missing substrate declaration", 1, 1, expected="substrate: string|hypergraph|term")
    line_no, value = header["substrate"]
    try:
        substrate = Substrate(value)
    except ValueError:
        raise ParseError(f"unknown substrate '{value}'", line_no, 1, expected="string, hypergraph or term")

    alphabet = None
    if "alphabet" in header:
        value = header["alphabet"][1]
        alphabet = frozenset(_symbols(value) if substrate == Substrate.STRING else _words(value))
    variables = _words(header["variables"][1]) if "variables" in header else ()
    constants: Tuple[str, ...] = ()
    if "constants" in header:
        line_no, value = header["constants"]
        if substrate != Substrate.TERM:
            raise SemanticError("constants are declared for term rules only", line_no, 1)
        constants = tuple(sorted(set(_words(value))))
        undeclared = [c for c in constants if alphabet is not None and c not in alphabet]
        if undeclared:
            raise SemanticError(f"undeclared constant '{undeclared[0]}'", line_no, 1, expected="a declared symbol")
    precedence: Tuple[str, ...] = ()
    if "precedence" in header:
        try:
            precedence = TermOrdering.from_chain("lpo", header["precedence"][1]).precedence
        except ValueError as exc:
            raise SemanticError(str(exc), header["precedence"][0], 1)
    ordering = None
    if "ordering" in header:
        ordering = header["ordering"][1]
        if ordering not in [k.value for k in OrderingKind]:
            raise ParseError(f"unknown ordering '{ordering}'", header["ordering"][0], 1, expected="lpo or shortlex")

    module = substrate_module(substrate)
    rules: List[Rule] = []
    for line_no, line in rule_lines:
        arrow = line.index('->')
        lhs_text = line[:arrow]
        rest = line[arrow + 2:]
        rhs_end = rest.find('@')
        rhs_text = rest if rhs_end < 0 else rest[:rhs_end]
        notes_text = "" if rhs_end < 0 else rest[rhs_end:]
        lhs_col = len(lhs_text) - len(lhs_text.lstrip()) + 1
        rhs_col = arrow + 3 + len(rhs_text) - len(rhs_text.lstrip())
        if not lhs_text.strip():
            raise ParseError("empty left-hand side", line_no, lhs_col, expected="left-hand side")
        if not rhs_text.strip():
            raise ParseError("empty right-hand side", line_no, rhs_col, expected="right-hand side")
        notes = _annotations(notes_text, line_no, arrow + 3 + (rhs_end if rhs_end >= 0 else 0))

        patterns = []
        for part, col in ((lhs_text.strip(), lhs_col), (rhs_text.strip(), rhs_col)):
            if substrate == Substrate.STRING:
                _check_string_symbols(part, alphabet, line_no, col)
            try:
                pattern = module.parse_pattern(part, variables)
            except LocatedError as exc:
                raise _relocate(exc, line_no, col - 1)
            if substrate == Substrate.TERM:
                _check_term_symbols(pattern, alphabet, line_no, col)
            patterns.append(pattern)
        try:
            rule = make_rule(substrate, patterns[0], patterns[1], level=notes.get("level", 0),
                             anchored=notes.get("anchored"), injective=notes.get("injective", False),
                             rule_id=notes.get("id"), constants=constants)
        except (RewriteError, ValueError) as exc:
            raise SemanticError(str(exc), line_no, lhs_col)
        rules.append(rule)

    initial: List[State] = []
    for index, (line_no, col, value) in enumerate(inits):
        if substrate == Substrate.STRING:
            _check_string_symbols(value, alphabet, line_no, col)
        try:
            state = parse_state(substrate, value, index, variables=variables)
        except LocatedError as exc:
            raise _relocate(exc, line_no, col - 1)
        except (RewriteError, ValueError) as exc:
            raise SemanticError(str(exc), line_no, col)
        if substrate == Substrate.TERM:
            _check_term_symbols(state.payload, alphabet, line_no, col)
        initial.append(state)

    if substrate == Substrate.TERM:
        try:
            check_arities([p for r in rules for p in (r.lhs, r.rhs)] + [s.payload for s in initial])
        except RewriteError as exc:
            raise SemanticError(f"arity clash: {exc}", rule_lines[0][0] if rule_lines else 1, 1)

    if not any(rule.level == 0 for rule in rules):
        raise SemanticError("no level 0 rules", len(lines) or 1, 1, expected="at least one 'lhs -> rhs' line")
    tower = RuleTower.from_rules(rules)
    DEBUG(f"Parsed {len(rules)} {substrate.value} rules, tower height {tower.height}, {len(initial)} initial states")
    return RuleFile(substrate=substrate, tower=tower, initial=tuple(initial),
                    alphabet=tuple(sorted(alphabet)) if alphabet is not None else None,
                    variables=variables, constants=constants, precedence=precedence, ordering=ordering)

# ============================================================================
def format_rule(rule: Rule) -> str:
    notes = []
    if rule.level:
        notes.append(f"@level {rule.level}")
    if rule.anchored != (rule.level >= 1):
        notes.append("@anchored" if rule.anchored else "@unanchored")
    if rule.injective:
        notes.append("@injective")
    if rule.id != default_rule_id(rule.substrate, rule.lhs, rule.rhs, rule.level):
        notes.append(f"@id {rule.id}")
    return " ".join([rule.text] + notes)

def print_rule_file(rf: RuleFile) -> str:
    """Text that parse_rule_file reads back into an equal RuleFile."""
    out = []
    for key, value in rf.header().items():
        if value is not None:
            out.append(f"{key}: {value}")
    for state in rf.initial:
        out.append(f"init: {state.text}")
    out += [format_rule(rule) for rule in rf.rules]
    return "\n".join(out) + "\n"

# ----------------------------------------------------------------------------
def unanchor(tower: RuleTower) -> RuleTower:
    """Level >= 1 rules matching anywhere instead of against the whole state."""
    levels = []
    for level in tower.levels:
        levels.append(tuple(dataclasses.replace(rule, anchored=False) if rule.level >= 1 else rule for rule in level))
    return RuleTower(levels=tuple(levels))
