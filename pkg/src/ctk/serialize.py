"""Text rendering of models, compositions and properties.

The output reparses to a structurally identical AST; named pathway
references are inlined by the parser, so compositions print fully
expanded.
"""

from __future__ import annotations

from .ast_nodes import (
    Atomic,
    BinOp,
    BoolLit,
    BoundedEventually,
    BoundedUntil,
    Command,
    CompositionExpr,
    CslFormula,
    Eventually,
    Expr,
    FAnd,
    FBool,
    FNot,
    FOr,
    Hide,
    Instance,
    IntLit,
    Model,
    ModuleDef,
    NotOp,
    Par,
    ParAuto,
    PathFormula,
    Prob,
    Rename,
    RoleAnnotation,
    Until,
    VarRef,
)
from .errors import ModelError

_PRECEDENCE = {"|": 1, "&": 2, "=": 3, "!=": 3, "<": 3, "<=": 3, ">": 3,
               ">=": 3, "+": 4, "-": 4, "*": 5}


def serialize_expr(expr: Expr, parent_prec: int = 0) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, VarRef):
        return expr.name
    if isinstance(expr, NotOp):
        return f"!{serialize_expr(expr.operand, 6)}"
    if isinstance(expr, BinOp):
        prec = _PRECEDENCE[expr.op]
        text = (f"{serialize_expr(expr.left, prec)} {expr.op} "
                f"{serialize_expr(expr.right, prec + 1)}")
        if prec < parent_prec:
            return f"({text})"
        return text
    raise ModelError(f"cannot serialize expression {expr!r}")


def serialize_command(cmd: Command) -> str:
    updates = " & ".join(f"({u.var}' = {serialize_expr(u.value)})"
                         for u in cmd.updates) or "true"
    return (f"[{cmd.label}] {serialize_expr(cmd.guard)} -> "
            f"{serialize_expr(cmd.rate)}:{updates};")


def serialize_module(module: ModuleDef) -> str:
    lines = [f"module {module.name}"]
    for v in module.variables:
        lines.append(f"   {v.name} : [{v.lower}..{v.upper}] init {v.init};")
    if module.variables and module.commands:
        lines.append("")
    for cmd in module.commands:
        lines.append(f"   {serialize_command(cmd)}")
    lines.append("endmodule")
    return "\n".join(lines)


def serialize_annotations(module_name: str,
                          annotations: tuple[RoleAnnotation, ...]) -> str:
    if not annotations:
        return ""
    kind = annotations[0].module_kind
    lines = [f"annotations {module_name}", f"   kind {kind};"]
    for anno in annotations:
        lines.append(f"   {anno.label} : {anno.role};")
    lines.append("endannotations")
    return "\n".join(lines)


def serialize_composition(expr: CompositionExpr) -> str:
    if isinstance(expr, Instance):
        return f"{expr.generic}_{expr.index}"
    if isinstance(expr, Rename):
        pairs = ", ".join(f"{old} <- {new}" for old, new in expr.mapping)
        return f"{_child(expr.child)} {{{pairs}}}"
    if isinstance(expr, Hide):
        return f"{_child(expr.child)} / {{{', '.join(expr.labels)}}}"
    if isinstance(expr, Par):
        return (f"{_side(expr.left)} |[{', '.join(expr.sync)}]| "
                f"{_par_right(expr.right)}")
    if isinstance(expr, ParAuto):
        return f"{_side(expr.left)} || {_par_right(expr.right)}"
    raise ModelError(f"cannot serialize composition {expr!r}")


def _child(expr: CompositionExpr) -> str:
    # postfix operators bind tighter than parallel
    if isinstance(expr, (Par, ParAuto)):
        return f"({serialize_composition(expr)})"
    return serialize_composition(expr)


def _side(expr: CompositionExpr) -> str:
    return serialize_composition(expr)


def _par_right(expr: CompositionExpr) -> str:
    # parallel is left-associative; a parallel right child needs parentheses
    if isinstance(expr, (Par, ParAuto)):
        return f"({serialize_composition(expr)})"
    return serialize_composition(expr)


def serialize_model(model: Model) -> str:
    chunks: list[str] = []
    for name, module in model.modules.items():
        chunks.append(serialize_module(module))
        if name in model.annotations:
            chunks.append(serialize_annotations(name, model.annotations[name]))
    for comp in model.compositions.values():
        chunks.append(f"{comp.kind} {comp.name} = "
                      f"{serialize_composition(comp.expr)};")
    return "\n\n".join(chunks) + "\n"


# ---------------------------------------------------------------------------
# properties

def _num(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return repr(value)


def serialize_property(formula: CslFormula, parent_prec: int = 0) -> str:
    if isinstance(formula, Atomic):
        return f"{formula.var} {formula.op} {formula.value}"
    if isinstance(formula, FBool):
        return "true" if formula.value else "false"
    if isinstance(formula, FNot):
        return f"!({serialize_property(formula.operand)})"
    if isinstance(formula, FAnd):
        text = (f"{serialize_property(formula.left, 2)} & "
                f"{serialize_property(formula.right, 3)}")
        return f"({text})" if parent_prec > 2 else text
    if isinstance(formula, FOr):
        text = (f"{serialize_property(formula.left, 1)} | "
                f"{serialize_property(formula.right, 2)}")
        return f"({text})" if parent_prec > 1 else text
    if isinstance(formula, Prob):
        bound = formula.bound
        head = "P=?" if bound.is_query() else f"P{bound.op}{_num(bound.value)}"
        body = _serialize_path(formula.path)
        if formula.filter is not None:
            body += f" {{{serialize_property(formula.filter)}}}"
        return f"{head} [ {body} ]"
    raise ModelError(f"cannot serialize formula {formula!r}")


def _atom_text(formula: CslFormula) -> str:
    # operands of temporal operators are always parenthesised for clarity
    return f"({serialize_property(formula)})"


def _serialize_path(path: PathFormula) -> str:
    if isinstance(path, Eventually):
        return f"F {_atom_text(path.target)}"
    if isinstance(path, BoundedEventually):
        return f"F<={_num(path.time)} {_atom_text(path.target)}"
    if isinstance(path, Until):
        return f"{_atom_text(path.lhs)} U {_atom_text(path.rhs)}"
    if isinstance(path, BoundedUntil):
        return f"{_atom_text(path.lhs)} U<={_num(path.time)} {_atom_text(path.rhs)}"
    raise ModelError(f"cannot serialize path formula {path!r}")
