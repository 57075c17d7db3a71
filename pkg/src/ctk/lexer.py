"""Tokenizer shared by the model, composition and property parsers.

Whitespace-insensitive; `//` starts a line comment. Multi-character
operators are lexed greedily, so `|[`, `]|`, `||`, `->`, `<-`, `<=`, `>=`,
`!=`, `=?` and `..` are single tokens.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ParseError


class TokenKind(enum.Enum):
    IDENT = "IDENT"
    INT = "INT"
    FLOAT = "FLOAT"
    LBRACKET = "["
    RBRACKET = "]"
    LPAREN = "("
    RPAREN = ")"
    LBRACE = "{"
    RBRACE = "}"
    SEMI = ";"
    COLON = ":"
    COMMA = ","
    PRIME = "'"
    ARROW = "->"
    LARROW = "<-"
    DOTDOT = ".."
    LE = "<="
    GE = ">="
    NE = "!="
    EQ = "="
    LT = "<"
    GT = ">"
    AMP = "&"
    PIPE = "|"
    BANG = "!"
    PLUS = "+"
    MINUS = "-"
    STAR = "*"
    SLASH = "/"
    PARL = "|["
    PARR = "]|"
    PARPAR = "||"
    QUERY = "=?"
    EOF = "EOF"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    column: int


_MULTI = [
    ("|[", TokenKind.PARL),
    ("]|", TokenKind.PARR),
    ("||", TokenKind.PARPAR),
    ("->", TokenKind.ARROW),
    ("<-", TokenKind.LARROW),
    ("<=", TokenKind.LE),
    (">=", TokenKind.GE),
    ("!=", TokenKind.NE),
    ("=?", TokenKind.QUERY),
    ("..", TokenKind.DOTDOT),
]

_SINGLE = {
    "[": TokenKind.LBRACKET,
    "]": TokenKind.RBRACKET,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    "{": TokenKind.LBRACE,
    "}": TokenKind.RBRACE,
    ";": TokenKind.SEMI,
    ":": TokenKind.COLON,
    ",": TokenKind.COMMA,
    "'": TokenKind.PRIME,
    "=": TokenKind.EQ,
    "<": TokenKind.LT,
    ">": TokenKind.GT,
    "&": TokenKind.AMP,
    "|": TokenKind.PIPE,
    "!": TokenKind.BANG,
    "+": TokenKind.PLUS,
    "-": TokenKind.MINUS,
    "*": TokenKind.STAR,
    "/": TokenKind.SLASH,
}


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        matched = False
        for lit, kind in _MULTI:
            if text.startswith(lit, i):
                tokens.append(Token(kind, lit, line, col))
                i += len(lit)
                col += len(lit)
                matched = True
                break
        if matched:
            continue
        if ch.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            # a '.' followed by a digit is a decimal point; '..' is a range
            if i < n and text[i] == "." and not text.startswith("..", i):
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
                tok = Token(TokenKind.FLOAT, text[start:i], line, col)
            else:
                tok = Token(TokenKind.INT, text[start:i], line, col)
            tokens.append(tok)
            col += i - start
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(Token(TokenKind.IDENT, text[start:i], line, col))
            col += i - start
            continue
        if ch in _SINGLE:
            tokens.append(Token(_SINGLE[ch], ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token(TokenKind.EOF, "", line, col))
    return tokens


class TokenStream:
    """Cursor over a token list with one-token lookahead helpers."""

    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        idx = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[idx]

    def at(self, kind: TokenKind, text: str | None = None) -> bool:
        tok = self.current
        return tok.kind == kind and (text is None or tok.text == text)

    def advance(self) -> Token:
        tok = self.current
        if self.pos < len(self.tokens) - 1:
            self.pos += 1
        return tok

    def accept(self, kind: TokenKind, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.advance()
        return None

    def expect(self, kind: TokenKind, text: str | None = None) -> Token:
        if self.at(kind, text):
            return self.advance()
        tok = self.current
        want = text if text is not None else kind.value
        got = tok.text if tok.text else "end of input"
        raise ParseError(f"expected '{want}', got '{got}'", tok.line, tok.column)

    def error(self, message: str) -> ParseError:
        tok = self.current
        return ParseError(message, tok.line, tok.column)
