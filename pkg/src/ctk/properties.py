"""Parser for CSL properties.

Grammar sketch (ASCII, whitespace-insensitive):

    formula  := state
    state    := state '|' state | state '&' state | '!' state
              | 'true' | 'false' | ident cmp int | prob | '(' state ')'
    prob     := 'P' bound '[' path [ '{' state '}' ] ']'
    bound    := '=?' | ('<='|'<'|'>='|'>') number
    path     := raw        (normalised, see below)

Inside `[...]` the body is parsed with `F` prefix, `U` binding tighter
than `&`, and `&` tighter than `|` (the usual temporal-logic convention,
so `s & p U q` reads `s & (p U q)`), then normalised into core CSL:

  * `F a | F b`            becomes `F (a | b)`;
  * `s & path`             becomes the state formula `s & P~[path]`,
    inheriting the enclosing bound;
  * an until whose right operand is itself a path formula is rewritten the
    same way, so `(a) U ((b) & (c) U (d))` nests a probability operator.

The filter clause `{s}` attaches to the probability operator whose
brackets enclose it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .ast_nodes import (
    Atomic,
    Bound,
    BoundedEventually,
    BoundedUntil,
    CslFormula,
    Eventually,
    FAnd,
    FBool,
    FNot,
    FOr,
    PathFormula,
    Prob,
    StateFormula,
    Until,
)
from .errors import ParseError
from .lexer import TokenKind, TokenStream, tokenize

_CMP_TOKENS = {
    TokenKind.EQ: "=",
    TokenKind.NE: "!=",
    TokenKind.LT: "<",
    TokenKind.LE: "<=",
    TokenKind.GT: ">",
    TokenKind.GE: ">=",
}


# ---------------------------------------------------------------------------
# raw path nodes (pre-normalisation)

@dataclass(frozen=True)
class _RawF:
    operand: "_Raw"
    time: Optional[float]


@dataclass(frozen=True)
class _RawU:
    lhs: "_Raw"
    rhs: "_Raw"
    time: Optional[float]


@dataclass(frozen=True)
class _RawNot:
    operand: "_Raw"


@dataclass(frozen=True)
class _RawAnd:
    left: "_Raw"
    right: "_Raw"


@dataclass(frozen=True)
class _RawOr:
    left: "_Raw"
    right: "_Raw"


_Raw = Union[_RawF, _RawU, _RawNot, _RawAnd, _RawOr, StateFormula]


def _is_state(node: _Raw) -> bool:
    if isinstance(node, (_RawF, _RawU)):
        return False
    if isinstance(node, _RawNot):
        return _is_state(node.operand)
    if isinstance(node, (_RawAnd, _RawOr)):
        return _is_state(node.left) and _is_state(node.right)
    return True


def _as_state(node: _Raw) -> StateFormula:
    if isinstance(node, _RawNot):
        return FNot(_as_state(node.operand))
    if isinstance(node, _RawAnd):
        return FAnd(_as_state(node.left), _as_state(node.right))
    if isinstance(node, _RawOr):
        return FOr(_as_state(node.left), _as_state(node.right))
    if isinstance(node, (_RawF, _RawU)):
        raise ParseError("temporal operator in state-formula position", 0, 0)
    return node


# ---------------------------------------------------------------------------
# parsing

class _PropertyParser:
    def __init__(self, ts: TokenStream) -> None:
        self.ts = ts

    # state formulas ------------------------------------------------------

    def state(self) -> StateFormula:
        left = self.state_and()
        while self.ts.accept(TokenKind.PIPE):
            left = FOr(left, self.state_and())
        return left

    def state_and(self) -> StateFormula:
        left = self.state_not()
        while self.ts.accept(TokenKind.AMP):
            left = FAnd(left, self.state_not())
        return left

    def state_not(self) -> StateFormula:
        if self.ts.accept(TokenKind.BANG):
            return FNot(self.state_not())
        return self.state_primary()

    def state_primary(self) -> StateFormula:
        ts = self.ts
        if ts.accept(TokenKind.LPAREN):
            inner = self.state()
            ts.expect(TokenKind.RPAREN)
            return inner
        if ts.at(TokenKind.IDENT, "true"):
            ts.advance()
            return FBool(True)
        if ts.at(TokenKind.IDENT, "false"):
            ts.advance()
            return FBool(False)
        if ts.at(TokenKind.IDENT, "P"):
            return self.prob()
        if ts.at(TokenKind.IDENT):
            return self.atomic()
        raise ts.error(f"expected state formula, got '{ts.current.text or 'end of input'}'")

    def atomic(self) -> Atomic:
        ts = self.ts
        var = ts.expect(TokenKind.IDENT).text
        for kind, op in _CMP_TOKENS.items():
            if ts.accept(kind):
                value = int(ts.expect(TokenKind.INT).text)
                return Atomic(var, op, value)
        raise ts.error(f"expected comparison operator after '{var}'")

    # probability operator --------------------------------------------------

    def prob(self) -> StateFormula:
        ts = self.ts
        ts.expect(TokenKind.IDENT, "P")
        bound = self.bound()
        ts.expect(TokenKind.LBRACKET)
        raw = self.raw_path()
        filt: Optional[StateFormula] = None
        if ts.accept(TokenKind.LBRACE):
            filt = self.state()
            ts.expect(TokenKind.RBRACE)
        ts.expect(TokenKind.RBRACKET)
        return _normalise(raw, bound, filt, ts)

    def bound(self) -> Bound:
        ts = self.ts
        if ts.accept(TokenKind.QUERY):
            return Bound("=?")
        for kind in (TokenKind.LE, TokenKind.GE, TokenKind.LT, TokenKind.GT):
            if ts.at(kind):
                op = ts.advance().text
                tok = ts.current
                value = self.number()
                if not 0.0 <= value <= 1.0:
                    raise ParseError(
                        f"probability bound {value} outside [0,1]",
                        tok.line, tok.column)
                return Bound(op, value)
        raise ts.error("expected probability bound ('=?', '<=p', '<p', '>=p', '>p')")

    def number(self) -> float:
        ts = self.ts
        if ts.at(TokenKind.INT) or ts.at(TokenKind.FLOAT):
            return float(ts.advance().text)
        raise ts.error("expected a number")

    def time_bound(self) -> Optional[float]:
        ts = self.ts
        if ts.accept(TokenKind.LE):
            tok = ts.current
            value = self.number()
            if value < 0:
                raise ParseError(f"negative time bound {value}", tok.line, tok.column)
            return value
        return None

    # raw path formulas ------------------------------------------------------

    def raw_path(self) -> _Raw:
        left = self.raw_and()
        while self.ts.accept(TokenKind.PIPE):
            left = _RawOr(left, self.raw_and())
        return left

    def raw_and(self) -> _Raw:
        left = self.raw_until()
        while self.ts.accept(TokenKind.AMP):
            left = _RawAnd(left, self.raw_until())
        return left

    def raw_until(self) -> _Raw:
        left = self.raw_unary()
        if self.ts.at(TokenKind.IDENT, "U"):
            self.ts.advance()
            time = self.time_bound()
            right = self.raw_until()
            return _RawU(left, right, time)
        return left

    def raw_unary(self) -> _Raw:
        ts = self.ts
        if ts.accept(TokenKind.BANG):
            return _RawNot(self.raw_unary())
        if ts.at(TokenKind.IDENT, "F"):
            ts.advance()
            time = self.time_bound()
            return _RawF(self.raw_unary(), time)
        if ts.accept(TokenKind.LPAREN):
            inner = self.raw_path()
            ts.expect(TokenKind.RPAREN)
            return inner
        if ts.at(TokenKind.IDENT, "true"):
            ts.advance()
            return FBool(True)
        if ts.at(TokenKind.IDENT, "false"):
            ts.advance()
            return FBool(False)
        if ts.at(TokenKind.IDENT, "P"):
            return self.prob()
        if ts.at(TokenKind.IDENT):
            return self.atomic()
        raise ts.error(f"expected path formula, got '{ts.current.text or 'end of input'}'")


# ---------------------------------------------------------------------------
# normalisation of raw bodies into core CSL

def _normalise(raw: _Raw, bound: Bound, filt: Optional[StateFormula],
               ts: TokenStream) -> StateFormula:
    if _is_state(raw):
        raise ts.error("probability operator needs a path formula (F or U)")
    if isinstance(raw, _RawAnd) and _is_state(raw.left) != _is_state(raw.right):
        # `s & path` holds in states satisfying s whose paths satisfy the bound
        state_part, path_part = ((raw.left, raw.right)
                                 if _is_state(raw.left) else (raw.right, raw.left))
        prob = Prob(bound, _to_path(path_part, bound, ts), filt)
        return FAnd(_as_state(state_part), prob)
    return Prob(bound, _to_path(raw, bound, ts), filt)


def _to_path(raw: _Raw, bound: Bound, ts: TokenStream) -> PathFormula:
    if isinstance(raw, _RawF):
        target = _to_state(raw.operand, bound, ts)
        if raw.time is None:
            return Eventually(target)
        return BoundedEventually(target, raw.time)
    if isinstance(raw, _RawU):
        lhs = _to_state(raw.lhs, bound, ts)
        rhs = _to_state(raw.rhs, bound, ts)
        if raw.time is None:
            return Until(lhs, rhs)
        return BoundedUntil(lhs, rhs, raw.time)
    if isinstance(raw, _RawOr):
        # F a | F b == F (a | b); only eventualities distribute like this
        left = _to_path(raw.left, bound, ts)
        right = _to_path(raw.right, bound, ts)
        if isinstance(left, Eventually) and isinstance(right, Eventually):
            return Eventually(FOr(left.target, right.target))
        if (isinstance(left, BoundedEventually)
                and isinstance(right, BoundedEventually)
                and left.time == right.time):
            return BoundedEventually(FOr(left.target, right.target), left.time)
        raise ts.error("disjunction of path formulas is only supported "
                       "between eventualities with equal time bounds")
    raise ts.error("unsupported path formula shape")


def _to_state(raw: _Raw, bound: Bound, ts: TokenStream) -> StateFormula:
    if _is_state(raw):
        return _as_state(raw)
    if isinstance(raw, _RawAnd) and _is_state(raw.left) != _is_state(raw.right):
        state_part, path_part = ((raw.left, raw.right)
                                 if _is_state(raw.left) else (raw.right, raw.left))
        nested_bound = bound if not bound.is_query() else Bound(">", 0.0)
        return FAnd(_as_state(state_part),
                    Prob(nested_bound, _to_path(path_part, nested_bound, ts)))
    if isinstance(raw, (_RawF, _RawU)):
        nested_bound = bound if not bound.is_query() else Bound(">", 0.0)
        return Prob(nested_bound, _to_path(raw, nested_bound, ts))
    raise ts.error("cannot interpret path formula in state position")


# ---------------------------------------------------------------------------
# public entry points

def parse_property(text: str) -> CslFormula:
    """Parse a single CSL property."""
    ts = TokenStream(tokenize(text))
    formula = _PropertyParser(ts).state()
    ts.expect(TokenKind.EOF)
    return formula


def parse_property_file(text: str) -> dict[str, CslFormula]:
    """Parse a `.csl` file: one `name : formula` per line, `//` comments."""
    out: dict[str, CslFormula] = {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("//", 1)[0].strip()
        if not line:
            continue
        name, sep, body = line.partition(":")
        name = name.strip()
        if not sep or not name.isidentifier():
            raise ParseError("expected 'name : formula'", lineno, 1)
        if name in out:
            raise ParseError(f"property '{name}' defined twice", lineno, 1)
        try:
            out[name] = parse_property(body)
        except ParseError as exc:
            raise ParseError(f"in property '{name}': {exc.message}",
                             lineno, exc.column) from None
    return out
