"""Tokenizer basics: multi-character operators, positions, errors."""

import pytest

from ctk.errors import ParseError
from ctk.lexer import TokenKind, tokenize


def kinds(text):
    return [t.kind for t in tokenize(text)][:-1]  # drop EOF


def test_parallel_operators_lex_greedily():
    assert kinds("A |[x]| B") == [
        TokenKind.IDENT, TokenKind.PARL, TokenKind.IDENT, TokenKind.PARR,
        TokenKind.IDENT]
    assert kinds("A || B") == [TokenKind.IDENT, TokenKind.PARPAR, TokenKind.IDENT]


def test_arrow_and_rename_tokens():
    assert TokenKind.ARROW in kinds("x -> y")
    assert TokenKind.LARROW in kinds("{a <- b}")
    assert TokenKind.QUERY in kinds("P=? [ ]")


def test_range_and_decimal_disambiguation():
    assert kinds("[0..2]") == [
        TokenKind.LBRACKET, TokenKind.INT, TokenKind.DOTDOT, TokenKind.INT,
        TokenKind.RBRACKET]
    tokens = tokenize("2.5")
    assert tokens[0].kind == TokenKind.FLOAT and tokens[0].text == "2.5"


def test_comments_are_skipped():
    assert kinds("a // comment with / and |\nb") == [
        TokenKind.IDENT, TokenKind.IDENT]


def test_positions_track_lines_and_columns():
    tokens = tokenize("a\n  b")
    assert (tokens[0].line, tokens[0].column) == (1, 1)
    assert (tokens[1].line, tokens[1].column) == (2, 3)


def test_unexpected_character_is_located():
    with pytest.raises(ParseError) as err:
        tokenize("a\n@")
    assert err.value.line == 2
