import logging
import re
from typing import Dict, List, Optional, Sequence

from lark import Lark, Token, Transformer, Tree
from lark.exceptions import UnexpectedInput, VisitError

from automaton import Automaton, build_automaton
from bool_engine import BoolEngine, BoolFn
from errors import HoaSyntaxError, UnsupportedAutomaton, UsageError

logger = logging.getLogger(__name__)

HOA_GRAMMAR = r"""
start: header_item+ "--BODY--" state* "--END--"

header_item: HEADER_NAME header_value*
?header_value: INT | ESCAPED_STRING | IDENT | ACC_PUNCT

state: "State:" INT ESCAPED_STRING? acc_sig? edge*
edge: label? INT acc_sig?
acc_sig: "{" INT* "}"

label: "[" label_or "]"
?label_or: label_and ("|" label_and)*
?label_and: label_not ("&" label_not)*
?label_not: "!" label_not -> neg
          | label_atom
?label_atom: "t" -> const_true
           | "f" -> const_false
           | INT -> ap
           | "(" label_or ")"

HEADER_NAME.2: /[A-Za-z@_][A-Za-z0-9_-]*:/
IDENT: /[A-Za-z_][A-Za-z0-9_.-]*/
ACC_PUNCT: /[()&|!]/
COMMENT: /\/\*[\s\S]*?\*\//

%import common.INT
%import common.ESCAPED_STRING
%import common.WS
%ignore WS
%ignore COMMENT
"""

_parser = Lark(HOA_GRAMMAR, parser="lalr")


class _LabelBuilder(Transformer):
    """Turns a label parse tree into a BoolFn of the engine."""

    def __init__(self, engine: BoolEngine, aps: Sequence[BoolFn]):
        super().__init__()
        self.engine = engine
        self.aps = aps

    def label(self, children):
        return children[0]

    def label_or(self, children):
        return self.engine.disj(*children)

    def label_and(self, children):
        return self.engine.conj(*children)

    def neg(self, children):
        return self.engine.neg(children[0])

    def const_true(self, _):
        return self.engine.true

    def const_false(self, _):
        return self.engine.false

    def ap(self, children):
        index = int(children[0])
        if index >= len(self.aps):
            raise UsageError(f"label refers to AP {index} but only {len(self.aps)} are declared")
        return self.aps[index]


def _unquote(token: str) -> str:
    if not token.startswith('"'):
        return token
    return re.sub(r'\\(.)', r'\1', token[1:-1])


def _collect_headers(tree: Tree) -> Dict[str, List[List[str]]]:
    headers: Dict[str, List[List[str]]] = {}
    for item in tree.children:
        if not isinstance(item, Tree) or item.data != "header_item":
            continue
        name = str(item.children[0])[:-1]
        values = [str(v) for v in item.children[1:]]
        headers.setdefault(name, []).append(values)
    return headers


def _header_int(name: str, values: List[str], position: int = 0) -> int:
    if len(values) <= position:
        raise HoaSyntaxError(f"{name} header is missing a value")
    try:
        return int(values[position])
    except ValueError:
        raise HoaSyntaxError(f"{name} expects an integer, got '{values[position]}'") from None


def _buchi_kind(headers: Dict[str, List[List[str]]]) -> str:
    """Classify the acceptance condition as 'buchi', 'all' or 'none'."""
    if "Acceptance" not in headers:
        if headers.get("acc-name", [[]])[0] == ["Buchi"]:
            return "buchi"
        raise UnsupportedAutomaton("missing Acceptance header")
    tokens = headers["Acceptance"][0]
    condition = "".join(tokens[1:])
    if condition == "Inf(0)" and tokens[0] == "1":
        return "buchi"
    if condition == "t":
        return "all"
    if condition == "f":
        return "none"
    acc_name = headers.get("acc-name", [[None]])[0]
    raise UnsupportedAutomaton(
        f"only Büchi acceptance is supported, got '{' '.join(tokens)}'"
        + (f" ({' '.join(acc_name)})" if acc_name[0] else "")
    )


def parse_hoa(text, outputs: Optional[Sequence[str]] = None) -> Automaton:
    """Parse a single automaton in the HOA v1 subset.

    Args:
        text: HOA source, as str or bytes
        outputs: AP names owned by the controller; overrides the
            controllable-AP header when given

    Returns:
        The automaton, with a fresh BoolEngine declaring the non-controllable
        APs as inputs and the controllable ones as outputs
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise HoaSyntaxError(f"input is not valid UTF-8 (byte {e.start})") from None
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as e:
        raise HoaSyntaxError(str(e).strip().splitlines()[0], e.line, e.column) from None

    headers = _collect_headers(tree)
    if headers.get("HOA", [[None]])[0][:1] != ["v1"]:
        raise UnsupportedAutomaton("expected 'HOA: v1'")

    ap_values = headers.get("AP", [["0"]])[0]
    ap_names = [_unquote(v) for v in ap_values[1:]]
    if _header_int("AP", ap_values) != len(ap_names):
        raise HoaSyntaxError(f"AP header announces {ap_values[0]} propositions but lists {len(ap_names)}")

    if outputs is not None:
        unknown = set(outputs) - set(ap_names)
        if unknown:
            raise UsageError(f"--outs names unknown propositions: {', '.join(sorted(unknown))}")
        controllable = set(outputs)
    elif "controllable-AP" in headers:
        controllable = set()
        values = headers["controllable-AP"][0]
        for position in range(len(values)):
            index = _header_int("controllable-AP", values, position)
            if index >= len(ap_names):
                raise HoaSyntaxError(f"controllable-AP index {index} out of range")
            controllable.add(ap_names[index])
    else:
        raise UsageError(
            "no controllable-AP header; pass the output propositions with --outs name,name"
        )

    starts = headers.get("Start", [])
    if len(starts) != 1 or len(starts[0]) != 1:
        raise UnsupportedAutomaton("exactly one initial state is required")
    initial = _header_int("Start", starts[0])

    kind = _buchi_kind(headers)

    engine = BoolEngine(
        inputs=[n for n in ap_names if n not in controllable],
        outputs=[n for n in ap_names if n in controllable],
    )
    builder = _LabelBuilder(engine, [engine.mk_var(n) for n in ap_names])

    edges = []
    buchi = set()
    names: Dict[int, str] = {}
    state_ids = []
    for item in tree.children:
        if not isinstance(item, Tree) or item.data != "state":
            continue
        sid = int(item.children[0])
        state_ids.append(sid)
        for child in item.children[1:]:
            if isinstance(child, Token) and child.type == "ESCAPED_STRING":
                names[sid] = _unquote(child)
            elif isinstance(child, Tree) and child.data == "acc_sig":
                if child.children:
                    buchi.add(sid)
            elif isinstance(child, Tree) and child.data == "edge":
                label_tree = child.children[0]
                if not isinstance(label_tree, Tree):
                    raise UnsupportedAutomaton(
                        f"state {sid} has an unlabeled edge; implicit labels are not supported"
                    )
                dst = int(child.children[1])
                if len(child.children) > 2 and child.children[2].children:
                    raise UnsupportedAutomaton(
                        f"transition-based acceptance on edge {sid} -> {dst} is not supported"
                    )
                try:
                    label = builder.transform(label_tree)
                except VisitError as e:
                    raise e.orig_exc from None
                edges.append((sid, label, dst))

    if "States" in headers:
        num_states = _header_int("States", headers["States"][0])
    else:
        num_states = max(state_ids + [initial]) + 1
    if kind == "all":
        buchi = set(range(num_states))
    elif kind == "none":
        buchi = set()

    for src, _, dst in edges:
        if src >= num_states or dst >= num_states:
            raise HoaSyntaxError(f"edge {src} -> {dst} exceeds the {num_states} declared states")

    state_names = None
    if names:
        state_names = [names.get(q, str(q)) for q in range(num_states)]
    automaton = build_automaton(engine, num_states, initial, edges, buchi, state_names=state_names)
    logger.debug("Parsed HOA: %d states, %d transitions, %d inputs, %d outputs",
                 automaton.num_states, len(automaton.transitions),
                 len(automaton.inputs), len(automaton.outputs))
    return automaton


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def print_hoa(automaton: Automaton, name: str = None, pending: Sequence[str] = None) -> str:
    """Emit the automaton in the subset parse_hoa reads.

    APs follow the engine's declaration order; controllable-AP lists the
    automaton's output role, so a role-swapped automaton round-trips with
    its swapped roles. `pending` annotates each state in a comment block.
    """
    engine = automaton.engine
    declared = engine.inputs + engine.outputs
    index = {v.name: str(i) for i, v in enumerate(declared)}
    lines = ["HOA: v1"]
    if name:
        lines.append(f"name: {_quote(name)}")
    if pending:
        lines.append("/* pending outputs:")
        for q, formula in enumerate(pending):
            lines.append(f"   {q}: {formula}")
        lines.append("*/")
    lines.append(f"States: {automaton.num_states}")
    lines.append(f"Start: {automaton.initial}")
    lines.append(f"AP: {len(declared)}" + "".join(" " + _quote(v.name) for v in declared))
    lines.append("acc-name: Buchi")
    lines.append("Acceptance: 1 Inf(0)")
    lines.append("properties: trans-labels explicit-labels state-acc")
    lines.append("controllable-AP:" + "".join(" " + index[v.name] for v in automaton.outputs))
    lines.append("--BODY--")
    for q in automaton.states:
        header = f"State: {q}"
        if automaton.state_names:
            header += " " + _quote(automaton.state_names[q])
        if q in automaton.buchi:
            header += " {0}"
        lines.append(header)
        for t in automaton.transitions:
            if t.src == q:
                lines.append(f"[{engine.to_formula(t.label, index)}] {t.dst}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"


def read_hoa_file(path: str, outputs: Optional[Sequence[str]] = None) -> Automaton:
    with open(path, "rb") as f:
        return parse_hoa(f.read(), outputs)


_OUTS_SPLIT = re.compile(r"\s*,\s*")


def parse_outs(value: Optional[str]) -> Optional[List[str]]:
    """Split a `--outs a,b,c` value; None and the empty string mean no override."""
    if not value:
        return None
    return [name for name in _OUTS_SPLIT.split(value.strip()) if name]
