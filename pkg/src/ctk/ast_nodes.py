"""AST node types for the module language, composition expressions and
CSL properties.

All nodes are immutable dataclasses; structural equality is the round-trip
contract used by the parser/serializer tests. Expressions share one node
set for guards, rates, update right-hand sides and property atoms.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .errors import ModelError

# ---------------------------------------------------------------------------
# expressions

ARITH_OPS = ("+", "-", "*")
CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")
BOOL_OPS = ("&", "|")


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class NotOp:
    operand: "Expr"


Expr = Union[IntLit, BoolLit, VarRef, BinOp, NotOp]

_CMP = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def eval_expr(expr: Expr, state: Mapping[str, int]):
    """Evaluate an expression in a state (variable name -> level)."""
    if isinstance(expr, IntLit):
        return expr.value
    if isinstance(expr, BoolLit):
        return expr.value
    if isinstance(expr, VarRef):
        try:
            return state[expr.name]
        except KeyError:
            raise ModelError(f"unknown identifier '{expr.name}'") from None
    if isinstance(expr, NotOp):
        return not eval_expr(expr.operand, state)
    if isinstance(expr, BinOp):
        a = eval_expr(expr.left, state)
        b = eval_expr(expr.right, state)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        if expr.op == "&":
            return bool(a) and bool(b)
        if expr.op == "|":
            return bool(a) or bool(b)
        if expr.op in _CMP:
            return _CMP[expr.op](a, b)
    raise ModelError(f"cannot evaluate expression node {expr!r}")


def expr_variables(expr: Expr) -> frozenset[str]:
    """All variable names referenced by an expression."""
    if isinstance(expr, VarRef):
        return frozenset((expr.name,))
    if isinstance(expr, NotOp):
        return expr_variables(expr.operand)
    if isinstance(expr, BinOp):
        return expr_variables(expr.left) | expr_variables(expr.right)
    return frozenset()


# ---------------------------------------------------------------------------
# modules

@dataclass(frozen=True)
class VarDecl:
    """Bounded integer variable: name : [lower..upper] init value."""

    name: str
    lower: int
    upper: int
    init: int


@dataclass(frozen=True)
class Update:
    var: str
    value: Expr


@dataclass(frozen=True)
class Command:
    """[label] guard -> rate:(v' = e) & ... ; an empty label interleaves."""

    label: str
    guard: Expr
    rate: Expr
    updates: tuple[Update, ...]


@dataclass(frozen=True)
class ModuleDef:
    name: str
    variables: tuple[VarDecl, ...]
    commands: tuple[Command, ...]

    def variable_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def labels(self) -> frozenset[str]:
        return frozenset(c.label for c in self.commands if c.label)


@dataclass(frozen=True)
class RoleAnnotation:
    """Machine-readable role of a labelled reaction within a module kind."""

    label: str
    role: str
    module_kind: str


ROLES = frozenset({
    "catalysis", "inhibition", "alternative-activation", "degradation",
    "ligand-production", "expression", "binding", "activation",
})

MODULE_KINDS = frozenset({
    "receptor", "cascade", "protein-activation", "translocation",
    "protein-binding", "gene-expression",
})


# ---------------------------------------------------------------------------
# composition expressions

@dataclass(frozen=True)
class Instance:
    generic: str
    index: int


@dataclass(frozen=True)
class Rename:
    child: "CompositionExpr"
    mapping: tuple[tuple[str, str], ...]  # (old, new), applied simultaneously


@dataclass(frozen=True)
class Hide:
    child: "CompositionExpr"
    labels: tuple[str, ...]


@dataclass(frozen=True)
class Par:
    """Synchronising parallel composition over an explicit label set."""

    left: "CompositionExpr"
    right: "CompositionExpr"
    sync: tuple[str, ...]


@dataclass(frozen=True)
class ParAuto:
    """`||`: synchronise on the intersection of the children's alphabets."""

    left: "CompositionExpr"
    right: "CompositionExpr"


CompositionExpr = Union[Instance, Rename, Hide, Par, ParAuto]


@dataclass(frozen=True)
class NamedComposition:
    name: str
    kind: str  # "pathway" or "system"
    expr: CompositionExpr


# ---------------------------------------------------------------------------
# CSL formulas

@dataclass(frozen=True)
class Atomic:
    var: str
    op: str
    value: int


@dataclass(frozen=True)
class FBool:
    value: bool


@dataclass(frozen=True)
class FNot:
    operand: "StateFormula"


@dataclass(frozen=True)
class FAnd:
    left: "StateFormula"
    right: "StateFormula"


@dataclass(frozen=True)
class FOr:
    left: "StateFormula"
    right: "StateFormula"


@dataclass(frozen=True)
class Bound:
    """Probability bound of a P operator: '=?' query or comparison with p."""

    op: str  # one of '=?', '<=', '<', '>=', '>'
    value: Optional[float] = None

    def is_query(self) -> bool:
        return self.op == "=?"

    def is_qualitative(self) -> bool:
        return (self.op in ("<=", ">") and self.value == 0.0) or (
            self.op in (">=", "<") and self.value == 1.0)


@dataclass(frozen=True)
class Eventually:
    target: "StateFormula"


@dataclass(frozen=True)
class BoundedEventually:
    target: "StateFormula"
    time: float


@dataclass(frozen=True)
class Until:
    lhs: "StateFormula"
    rhs: "StateFormula"


@dataclass(frozen=True)
class BoundedUntil:
    lhs: "StateFormula"
    rhs: "StateFormula"
    time: float


PathFormula = Union[Eventually, BoundedEventually, Until, BoundedUntil]


@dataclass(frozen=True)
class Prob:
    bound: Bound
    path: PathFormula
    filter: Optional["StateFormula"] = None


StateFormula = Union[Atomic, FBool, FNot, FAnd, FOr, Prob]

# A property is a state formula; the common case is a top-level Prob node.
CslFormula = StateFormula


def formula_variables(f: CslFormula) -> frozenset[str]:
    if isinstance(f, Atomic):
        return frozenset((f.var,))
    if isinstance(f, FBool):
        return frozenset()
    if isinstance(f, FNot):
        return formula_variables(f.operand)
    if isinstance(f, (FAnd, FOr)):
        return formula_variables(f.left) | formula_variables(f.right)
    if isinstance(f, Prob):
        names = _path_variables(f.path)
        if f.filter is not None:
            names |= formula_variables(f.filter)
        return names
    raise ModelError(f"unknown formula node {f!r}")


def _path_variables(p: PathFormula) -> frozenset[str]:
    if isinstance(p, (Eventually, BoundedEventually)):
        return formula_variables(p.target)
    return formula_variables(p.lhs) | formula_variables(p.rhs)


# ---------------------------------------------------------------------------
# whole model file

@dataclass
class Model:
    """Parsed `.ctk` file: generic modules, annotations and named
    compositions, in declaration order. Immutable after parsing."""

    modules: dict[str, ModuleDef] = dataclasses.field(default_factory=dict)
    annotations: dict[str, tuple[RoleAnnotation, ...]] = dataclasses.field(default_factory=dict)
    compositions: dict[str, NamedComposition] = dataclasses.field(default_factory=dict)
    warnings: list[str] = dataclasses.field(default_factory=list)

    def module(self, name: str) -> ModuleDef:
        try:
            return self.modules[name]
        except KeyError:
            raise ModelError(f"unknown module name '{name}'") from None

    def composition(self, name: str) -> NamedComposition:
        try:
            return self.compositions[name]
        except KeyError:
            raise ModelError(f"unknown composition '{name}'") from None

    def systems(self) -> list[NamedComposition]:
        return [c for c in self.compositions.values() if c.kind == "system"]

    def declared_variables(self) -> frozenset[str]:
        names: set[str] = set()
        for mod in self.modules.values():
            names.update(mod.variable_names())
        return frozenset(names)
