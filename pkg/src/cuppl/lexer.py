"""Tokenizer.

Identifiers may contain interior hyphens and a single trailing star, so
`uniform-discrete` and `sample*` are single names. The cost of that choice is
that binary minus between identifiers needs surrounding whitespace: `a - b`
subtracts, `a-b` is one identifier. A hyphen continues an identifier only when
the character after it could start an identifier character; a star ends one
only when what follows could not continue a name.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import SourceSpan
from .errors import LexError

KEYWORDS = frozenset({
    "function", "if", "else", "case", "type", "shift", "reset", "true", "false",
})

_PUNCT = [
    ("<-", "ARROW"), ("=>", "FATARROW"), ("==", "EQEQ"), ("!=", "NEQ"),
    ("<=", "LE"), (">=", "GE"), ("&&", "ANDAND"), ("||", "OROR"),
    ("(", "LPAREN"), (")", "RPAREN"), ("{", "LBRACE"), ("}", "RBRACE"),
    ("[", "LBRACKET"), ("]", "RBRACKET"), (",", "COMMA"), (";", "SEMI"),
    (":", "COLON"), ("+", "PLUS"), ("-", "MINUS"), ("*", "STAR"),
    ("/", "SLASH"), ("%", "PERCENT"), ("<", "LT"), (">", "GT"),
    ("=", "EQUALS"), ("!", "BANG"), ("~", "TILDE"),
]


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    span: SourceSpan
    value: object = None

    def __repr__(self):
        return f"{self.kind}({self.lexeme!r})"


def _ident_start(c):
    return c.isalpha() or c == "_"


def _ident_cont(c):
    return c.isalnum() or c == "_"


def tokenize(source, file="<input>"):
    """Tokenize `source`, returning a list of Tokens (without an EOF marker)."""
    tokens = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def span(sl, sc, el, ec):
        return SourceSpan(file, sl, sc, el, ec)

    def advance(k):
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = source[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if c == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                advance(1)
            continue
        sl, sc = line, col
        if c == '"':
            j = i + 1
            chunks = []
            while True:
                if j >= n or source[j] == "\n":
                    raise LexError("unterminated string literal",
                                   span(sl, sc, line, col))
                ch = source[j]
                if ch == '"':
                    break
                if ch == "\\":
                    if j + 1 >= n:
                        raise LexError("unterminated string literal",
                                       span(sl, sc, line, col))
                    esc = source[j + 1]
                    chunks.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc))
                    if chunks[-1] is None:
                        raise LexError(f"unknown escape \\{esc}", span(sl, sc, sl, sc))
                    j += 2
                else:
                    chunks.append(ch)
                    j += 1
            lexeme = source[i:j + 1]
            advance(j + 1 - i)
            tokens.append(Token("STRING", lexeme, span(sl, sc, line, col - 1),
                                "".join(chunks)))
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            is_real = False
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                is_real = True
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    is_real = True
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            lexeme = source[i:j]
            advance(j - i)
            sp = span(sl, sc, line, col - 1)
            if is_real:
                tokens.append(Token("REAL", lexeme, sp, float(lexeme)))
            else:
                tokens.append(Token("INT", lexeme, sp, int(lexeme)))
            continue
        if c == "'" and i + 1 < n and _ident_start(source[i + 1]):
            j = i + 1
            while j < n and _ident_cont(source[j]):
                j += 1
            lexeme = source[i:j]
            advance(j - i)
            tokens.append(Token("TYVAR", lexeme, span(sl, sc, line, col - 1),
                                lexeme[1:]))
            continue
        if _ident_start(c):
            j = i
            while j < n:
                ch = source[j]
                if _ident_cont(ch):
                    j += 1
                elif ch == "-" and j + 1 < n and _ident_cont(source[j + 1]):
                    j += 1
                else:
                    break
            if j < n and source[j] == "*" and (j + 1 >= n or not _ident_cont(source[j + 1])):
                j += 1
            lexeme = source[i:j]
            advance(j - i)
            sp = span(sl, sc, line, col - 1)
            if lexeme in KEYWORDS:
                tokens.append(Token(lexeme.upper(), lexeme, sp))
            else:
                tokens.append(Token("IDENT", lexeme, sp, lexeme))
            continue
        for text, kind in _PUNCT:
            if source.startswith(text, i):
                advance(len(text))
                tokens.append(Token(kind, text, span(sl, sc, line, col - 1)))
                break
        else:
            raise LexError(f"illegal character {c!r}", span(sl, sc, sl, sc))
    return tokens
