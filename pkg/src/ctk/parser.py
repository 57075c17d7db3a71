"""Recursive-descent parser for `.ctk` model files.

A file holds guarded-command module definitions, per-module annotation
blocks and named composition expressions:

    module Receptor ... endmodule
    annotations Receptor kind receptor; e1_1 : catalysis; ... endannotations
    pathway P1 = Receptor_1 / {i1_1} {e1_1 <- e5_1} |[e5_1]| Cascade3_1 ...;
    system Independent = P1 |[e2_1, ...]| P2;

Composition operator precedence: hide and rename are postfix and bind
tighter than parallel; parallel is left-associative. Named pathways are
inlined at parse time, so composition trees contain only the five node
kinds (instance, rename, hide, synchronising and auto parallel).
"""

from __future__ import annotations

from .ast_nodes import (
    BinOp,
    BoolLit,
    Command,
    CompositionExpr,
    Expr,
    Hide,
    Instance,
    IntLit,
    Model,
    ModuleDef,
    NamedComposition,
    NotOp,
    Par,
    ParAuto,
    Rename,
    RoleAnnotation,
    Update,
    VarDecl,
    VarRef,
    expr_variables,
    MODULE_KINDS,
    ROLES,
)
from .errors import ModelError, ParseError
from .lexer import Token, TokenKind, TokenStream, tokenize

RESERVED = frozenset({
    "module", "endmodule", "init", "annotations", "endannotations",
    "pathway", "system", "true", "false",
})


# ---------------------------------------------------------------------------
# expressions (guards, rates, update right-hand sides)

def _parse_expr(ts: TokenStream) -> Expr:
    return _parse_or(ts)


def _parse_or(ts: TokenStream) -> Expr:
    left = _parse_and(ts)
    while ts.accept(TokenKind.PIPE):
        right = _parse_and(ts)
        left = BinOp("|", left, right)
    return left


def _parse_and(ts: TokenStream) -> Expr:
    left = _parse_not(ts)
    while ts.accept(TokenKind.AMP):
        right = _parse_not(ts)
        left = BinOp("&", left, right)
    return left


def _parse_not(ts: TokenStream) -> Expr:
    if ts.accept(TokenKind.BANG):
        return NotOp(_parse_not(ts))
    return _parse_cmp(ts)


_CMP_TOKENS = {
    TokenKind.EQ: "=",
    TokenKind.NE: "!=",
    TokenKind.LT: "<",
    TokenKind.LE: "<=",
    TokenKind.GT: ">",
    TokenKind.GE: ">=",
}


def _parse_cmp(ts: TokenStream) -> Expr:
    left = _parse_arith(ts)
    for kind, op in _CMP_TOKENS.items():
        if ts.accept(kind):
            right = _parse_arith(ts)
            return BinOp(op, left, right)
    return left


def _parse_arith(ts: TokenStream) -> Expr:
    left = _parse_term(ts)
    while True:
        if ts.accept(TokenKind.PLUS):
            left = BinOp("+", left, _parse_term(ts))
        elif ts.accept(TokenKind.MINUS):
            left = BinOp("-", left, _parse_term(ts))
        else:
            return left


def _parse_term(ts: TokenStream) -> Expr:
    left = _parse_primary(ts)
    while ts.accept(TokenKind.STAR):
        left = BinOp("*", left, _parse_primary(ts))
    return left


def _parse_primary(ts: TokenStream) -> Expr:
    if ts.at(TokenKind.INT):
        return IntLit(int(ts.advance().text))
    if ts.at(TokenKind.IDENT, "true"):
        ts.advance()
        return BoolLit(True)
    if ts.at(TokenKind.IDENT, "false"):
        ts.advance()
        return BoolLit(False)
    if ts.at(TokenKind.IDENT):
        return VarRef(ts.advance().text)
    if ts.accept(TokenKind.LPAREN):
        inner = _parse_expr(ts)
        ts.expect(TokenKind.RPAREN)
        return inner
    raise ts.error(f"expected expression, got '{ts.current.text or 'end of input'}'")


# ---------------------------------------------------------------------------
# modules

def _parse_var_decl(ts: TokenStream) -> VarDecl:
    name_tok = ts.expect(TokenKind.IDENT)
    _check_name(name_tok)
    ts.expect(TokenKind.COLON)
    ts.expect(TokenKind.LBRACKET)
    lower = int(ts.expect(TokenKind.INT).text)
    ts.expect(TokenKind.DOTDOT)
    upper = int(ts.expect(TokenKind.INT).text)
    ts.expect(TokenKind.RBRACKET)
    ts.expect(TokenKind.IDENT, "init")
    init = int(ts.expect(TokenKind.INT).text)
    ts.expect(TokenKind.SEMI)
    if not lower <= init <= upper:
        raise ParseError(
            f"initial value {init} of '{name_tok.text}' outside [{lower}..{upper}]",
            name_tok.line, name_tok.column)
    return VarDecl(name_tok.text, lower, upper, init)


def _parse_command(ts: TokenStream) -> Command:
    ts.expect(TokenKind.LBRACKET)
    label = ""
    if ts.at(TokenKind.IDENT):
        tok = ts.advance()
        _check_name(tok)
        label = tok.text
    ts.expect(TokenKind.RBRACKET)
    guard = _parse_expr(ts)
    ts.expect(TokenKind.ARROW)
    rate = _parse_expr(ts)
    ts.expect(TokenKind.COLON)
    updates = _parse_updates(ts)
    ts.expect(TokenKind.SEMI)
    return Command(label, guard, rate, updates)


def _parse_updates(ts: TokenStream) -> tuple[Update, ...]:
    if ts.accept(TokenKind.IDENT, "true"):
        return ()
    updates = [_parse_update(ts)]
    while ts.accept(TokenKind.AMP):
        updates.append(_parse_update(ts))
    return tuple(updates)


def _parse_update(ts: TokenStream) -> Update:
    ts.expect(TokenKind.LPAREN)
    var = ts.expect(TokenKind.IDENT).text
    ts.expect(TokenKind.PRIME)
    ts.expect(TokenKind.EQ)
    value = _parse_expr(ts)
    ts.expect(TokenKind.RPAREN)
    return Update(var, value)


def _parse_module(ts: TokenStream) -> ModuleDef:
    ts.expect(TokenKind.IDENT, "module")
    name_tok = ts.expect(TokenKind.IDENT)
    _check_name(name_tok)
    variables: list[VarDecl] = []
    commands: list[Command] = []
    seen: set[str] = set()
    while not ts.at(TokenKind.IDENT, "endmodule"):
        if ts.at(TokenKind.LBRACKET):
            commands.append(_parse_command(ts))
        elif ts.at(TokenKind.IDENT):
            decl = _parse_var_decl(ts)
            if decl.name in seen:
                raise ModelError(
                    f"duplicate variable '{decl.name}' in module '{name_tok.text}'")
            seen.add(decl.name)
            variables.append(decl)
        else:
            raise ts.error("expected variable declaration, command, or 'endmodule'")
    ts.expect(TokenKind.IDENT, "endmodule")
    return ModuleDef(name_tok.text, tuple(variables), tuple(commands))


def _check_name(tok: Token) -> None:
    if tok.text in RESERVED:
        raise ParseError(f"'{tok.text}' is a reserved word", tok.line, tok.column)


# ---------------------------------------------------------------------------
# annotation blocks

def _parse_hyphen_ident(ts: TokenStream) -> str:
    parts = [ts.expect(TokenKind.IDENT).text]
    while ts.accept(TokenKind.MINUS):
        parts.append(ts.expect(TokenKind.IDENT).text)
    return "-".join(parts)


def _parse_annotations(ts: TokenStream) -> tuple[str, tuple[RoleAnnotation, ...]]:
    ts.expect(TokenKind.IDENT, "annotations")
    module_name = ts.expect(TokenKind.IDENT).text
    ts.expect(TokenKind.IDENT, "kind")
    kind_tok = ts.current
    kind = _parse_hyphen_ident(ts)
    if kind not in MODULE_KINDS:
        raise ParseError(f"unknown module kind '{kind}'", kind_tok.line, kind_tok.column)
    ts.expect(TokenKind.SEMI)
    annotations: list[RoleAnnotation] = []
    seen: set[str] = set()
    while not ts.at(TokenKind.IDENT, "endannotations"):
        label = ts.expect(TokenKind.IDENT).text
        ts.expect(TokenKind.COLON)
        role_tok = ts.current
        role = _parse_hyphen_ident(ts)
        if role not in ROLES:
            raise ParseError(f"unknown role '{role}'", role_tok.line, role_tok.column)
        ts.expect(TokenKind.SEMI)
        if label in seen:
            raise ModelError(
                f"label '{label}' annotated twice for module '{module_name}'")
        seen.add(label)
        annotations.append(RoleAnnotation(label, role, kind))
    ts.expect(TokenKind.IDENT, "endannotations")
    return module_name, tuple(annotations)


# ---------------------------------------------------------------------------
# composition expressions

def _parse_label_list(ts: TokenStream, closing: TokenKind) -> tuple[str, ...]:
    labels: list[str] = []
    while not ts.at(closing):
        labels.append(ts.expect(TokenKind.IDENT).text)
        if not ts.accept(TokenKind.COMMA):
            break
    ts.expect(closing)
    return tuple(labels)


def _parse_rename_map(ts: TokenStream) -> tuple[tuple[str, str], ...]:
    pairs: list[tuple[str, str]] = []
    while not ts.at(TokenKind.RBRACE):
        old = ts.expect(TokenKind.IDENT).text
        ts.expect(TokenKind.LARROW)
        new = ts.expect(TokenKind.IDENT).text
        pairs.append((old, new))
        if not ts.accept(TokenKind.COMMA):
            break
    ts.expect(TokenKind.RBRACE)
    return tuple(pairs)


def _parse_comp_primary(ts: TokenStream, model: Model) -> CompositionExpr:
    if ts.accept(TokenKind.LPAREN):
        inner = _parse_comp_expr(ts, model)
        ts.expect(TokenKind.RPAREN)
        return inner
    tok = ts.expect(TokenKind.IDENT)
    name = tok.text
    if name in model.compositions:
        return model.compositions[name].expr
    if "_" in name:
        stem, _, suffix = name.rpartition("_")
        if suffix.isdigit() and stem in model.modules:
            return Instance(stem, int(suffix))
    raise ParseError(f"unknown module name '{name}'", tok.line, tok.column)


def _parse_comp_postfix(ts: TokenStream, model: Model) -> CompositionExpr:
    expr = _parse_comp_primary(ts, model)
    while True:
        if ts.accept(TokenKind.SLASH):
            ts.expect(TokenKind.LBRACE)
            labels = _parse_label_list(ts, TokenKind.RBRACE)
            expr = Hide(expr, labels)
        elif ts.at(TokenKind.LBRACE):
            ts.advance()
            expr = Rename(expr, _parse_rename_map(ts))
        else:
            return expr


def _parse_comp_expr(ts: TokenStream, model: Model) -> CompositionExpr:
    expr = _parse_comp_postfix(ts, model)
    while True:
        if ts.accept(TokenKind.PARL):
            sync = _parse_label_list(ts, TokenKind.PARR)
            right = _parse_comp_postfix(ts, model)
            expr = Par(expr, right, sync)
        elif ts.accept(TokenKind.PARPAR):
            right = _parse_comp_postfix(ts, model)
            expr = ParAuto(expr, right)
        else:
            return expr


def parse_composition(text: str, model: Model) -> CompositionExpr:
    """Parse a standalone composition expression against a loaded model."""
    ts = TokenStream(tokenize(text))
    expr = _parse_comp_expr(ts, model)
    ts.expect(TokenKind.EOF)
    _validate_composition(expr, model, "<expression>", model.warnings)
    return expr


# ---------------------------------------------------------------------------
# model files

def parse_model(text: str) -> Model:
    """Parse a `.ctk` file into modules, annotations and compositions."""
    ts = TokenStream(tokenize(text))
    model = Model()
    while not ts.at(TokenKind.EOF):
        if ts.at(TokenKind.IDENT, "module"):
            mod = _parse_module(ts)
            if mod.name in model.modules:
                raise ModelError(f"module '{mod.name}' defined twice")
            model.modules[mod.name] = mod
        elif ts.at(TokenKind.IDENT, "annotations"):
            name, annos = _parse_annotations(ts)
            if name not in model.modules:
                raise ModelError(f"annotations for unknown module '{name}'")
            labels = model.modules[name].labels()
            for anno in annos:
                if anno.label not in labels:
                    raise ModelError(
                        f"annotation for unknown label '{anno.label}' "
                        f"in module '{name}'")
            model.annotations[name] = model.annotations.get(name, ()) + annos
        elif ts.at(TokenKind.IDENT, "pathway") or ts.at(TokenKind.IDENT, "system"):
            kind = ts.advance().text
            name_tok = ts.expect(TokenKind.IDENT)
            if name_tok.text in model.compositions:
                raise ModelError(f"composition '{name_tok.text}' defined twice")
            ts.expect(TokenKind.EQ)
            expr = _parse_comp_expr(ts, model)
            ts.expect(TokenKind.SEMI)
            _validate_composition(expr, model, name_tok.text, model.warnings)
            model.compositions[name_tok.text] = NamedComposition(name_tok.text, kind, expr)
        else:
            raise ts.error(
                "expected 'module', 'annotations', 'pathway' or 'system'")
    _validate_model(model)
    return model


def parse_model_file(path) -> Model:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_model(handle.read())


# ---------------------------------------------------------------------------
# validation

def _validate_model(model: Model) -> None:
    declared = model.declared_variables()
    for mod in model.modules.values():
        local = set(mod.variable_names())
        for cmd in mod.commands:
            used = expr_variables(cmd.guard) | expr_variables(cmd.rate)
            for upd in cmd.updates:
                if upd.var not in local:
                    raise ModelError(
                        f"module '{mod.name}' assigns to foreign variable "
                        f"'{upd.var}'")
                used |= expr_variables(upd.value)
            unknown = used - declared
            if unknown:
                raise ModelError(
                    f"module '{mod.name}' references undeclared identifier "
                    f"'{sorted(unknown)[0]}'")


def _validate_composition(expr: CompositionExpr, model: Model, name: str,
                          warnings: list[str]) -> None:
    from .algebra import alphabet  # deferred: algebra imports ast_nodes only

    def walk(node: CompositionExpr) -> frozenset[str]:
        if isinstance(node, Instance):
            model.module(node.generic)
            return alphabet(node, model)
        if isinstance(node, Rename):
            child = walk(node.child)
            for old, _ in node.mapping:
                if old not in child:
                    raise ModelError(
                        f"composition '{name}': rename of undeclared label "
                        f"'{old}'")
            image = {dict(node.mapping).get(l, l) for l in child}
            if len(image) < len(child):
                raise ModelError(
                    f"composition '{name}': rename map is not injective on "
                    f"the child's alphabet")
            return frozenset(image)
        if isinstance(node, Hide):
            child = walk(node.child)
            for label in node.labels:
                if label not in child:
                    warnings.append(
                        f"composition '{name}': hidden label '{label}' does "
                        f"not occur in the child's alphabet")
            return child - frozenset(node.labels)
        if isinstance(node, Par):
            left = walk(node.left)
            right = walk(node.right)
            for label in node.sync:
                if label not in left and label not in right:
                    warnings.append(
                        f"composition '{name}': sync label '{label}' occurs "
                        f"in neither alphabet and blocks nothing")
            return left | right
        if isinstance(node, ParAuto):
            return walk(node.left) | walk(node.right)
        raise ModelError(f"unknown composition node {node!r}")

    walk(expr)
