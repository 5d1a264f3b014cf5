from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence

from dd import autoref as _bdd

from errors import NoCubeError, UsageError

# Canonical node handle of the underlying BDD manager. Semantically equal
# functions are the same node, so == is constant time.
BoolFn = _bdd.Function

# A pure assignment over some variable subset.
Cube = Dict["VarId", bool]


class VarKind(str, Enum):
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True, order=True)
class VarId:
    name: str
    kind: VarKind


class BoolEngine:
    def __init__(self, inputs: Sequence[str] = (), outputs: Sequence[str] = ()):
        """Create a BDD manager over a fixed variable universe.

        The variable order is the declaration order with every input placed
        before every output; it never changes afterwards.

        Args:
            inputs: Names of the environment-controlled propositions
            outputs: Names of the controller-owned propositions
        """
        names = list(inputs) + list(outputs)
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate variable names in {names}")

        self.bdd = _bdd.BDD()
        self.bdd.configure(reordering=False)
        if names:
            self.bdd.declare(*names)

        self.inputs: List[VarId] = [VarId(n, VarKind.INPUT) for n in inputs]
        self.outputs: List[VarId] = [VarId(n, VarKind.OUTPUT) for n in outputs]
        self._by_name: Dict[str, VarId] = {v.name: v for v in self.inputs + self.outputs}
        self._level: Dict[str, int] = {n: i for i, n in enumerate(names)}

    # -- construction ---------------------------------------------------

    @property
    def true(self) -> BoolFn:
        return self.bdd.true

    @property
    def false(self) -> BoolFn:
        return self.bdd.false

    def mk_const(self, value: bool) -> BoolFn:
        return self.bdd.true if value else self.bdd.false

    def lookup(self, name: str) -> VarId:
        try:
            return self._by_name[name]
        except KeyError:
            raise UsageError(f"undeclared variable '{name}'") from None

    def mk_var(self, v) -> BoolFn:
        """Function of a single declared variable (a VarId or its name)."""
        name = v.name if isinstance(v, VarId) else v
        if name not in self._by_name:
            raise UsageError(f"undeclared variable '{name}'")
        return self.bdd.var(name)

    def conj(self, *fns: BoolFn) -> BoolFn:
        return reduce(lambda a, b: a & b, fns, self.bdd.true)

    def disj(self, *fns: BoolFn) -> BoolFn:
        return reduce(lambda a, b: a | b, fns, self.bdd.false)

    def neg(self, f: BoolFn) -> BoolFn:
        return ~f

    def cube_fn(self, cube: Mapping[VarId, bool]) -> BoolFn:
        """Conjunction of the literals of a cube."""
        literals = []
        for var, value in cube.items():
            x = self.mk_var(var)
            literals.append(x if value else ~x)
        return self.conj(*literals)

    # -- queries --------------------------------------------------------

    def is_false(self, f: BoolFn) -> bool:
        return f == self.bdd.false

    def compatible(self, x: BoolFn, y: BoolFn) -> bool:
        return (x & y) != self.bdd.false

    def exists(self, f: BoolFn, variables: Iterable[VarId]) -> BoolFn:
        names = {v.name for v in variables}
        if not names:
            return f
        return self.bdd.exist(names, f)

    def evaluate(self, f: BoolFn, assignment: Mapping[str, bool]) -> bool:
        """Truth value of f under a total assignment of its support."""
        return self.bdd.let(dict(assignment), f) == self.bdd.true

    def fingerprint(self, f: BoolFn) -> int:
        """Hashable identity of f, unique within this engine."""
        return int(f)

    def ordered(self, variables: Iterable[VarId]) -> List[VarId]:
        return sorted(variables, key=lambda v: self._level[v.name])

    def some_pure(self, f: BoolFn, variables: Iterable[VarId]) -> Cube:
        """Least cube over `variables` compatible with f.

        Variables are fixed in engine order, trying false before true.
        """
        if f == self.bdd.false:
            raise NoCubeError("no pure assignment is compatible with false")
        cube: Cube = {}
        g = f
        for var in self.ordered(variables):
            x = self.bdd.var(var.name)
            low = g & ~x
            if low != self.bdd.false:
                cube[var] = False
                g = low
            else:
                cube[var] = True
                g = g & x
        return cube

    def enumerate_pure(self, f: BoolFn, variables: Iterable[VarId]) -> Iterator[Cube]:
        """All cubes over `variables` compatible with f, false branch first."""
        order = self.ordered(variables)

        def walk(g: BoolFn, depth: int, prefix: Cube) -> Iterator[Cube]:
            if g == self.bdd.false:
                return
            if depth == len(order):
                yield dict(prefix)
                return
            var = order[depth]
            x = self.bdd.var(var.name)
            for value, branch in ((False, g & ~x), (True, g & x)):
                prefix[var] = value
                yield from walk(branch, depth + 1, prefix)
                del prefix[var]

        yield from walk(f, 0, {})

    # -- printing -------------------------------------------------------

    def to_formula(self, f: BoolFn, names: Optional[Mapping[str, str]] = None) -> str:
        """Render f with `&`, `|`, `!`, `t`, `f` by Shannon expansion.

        `names` maps variable names to the tokens to print (HOA emission
        uses AP indices); variables are printed by name otherwise. The output
        contains no whitespace.
        """
        names = names or {}

        def render(g: BoolFn) -> str:
            if g == self.bdd.true:
                return "t"
            if g == self.bdd.false:
                return "f"
            top = min(self.bdd.support(g), key=self._level.__getitem__)
            token = names.get(top, top)
            high = self.bdd.let({top: True}, g)
            low = self.bdd.let({top: False}, g)
            parts = []
            for literal, branch in ((token, high), ("!" + token, low)):
                if branch == self.bdd.false:
                    continue
                if branch == self.bdd.true:
                    parts.append(literal)
                else:
                    parts.append(f"{literal}&{_wrap(render(branch))}")
            return "|".join(parts)

        return render(f)


def _wrap(text: str) -> str:
    return f"({text})" if "|" in text else text
