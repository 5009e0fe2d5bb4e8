"""Tokenizer for the modelling language."""

from __future__ import annotations

import re
from dataclasses import dataclass

from gtnmc.errors import ParseError

KEYWORDS = {
    "var", "if", "else", "case", "default", "Skip", "Stop", "true", "false",
    "reaches", "with", "deadlockfree",
}

# order matters: longest operators first
_OPERATORS = [
    "#define", "#assert", "[]", "<>", "->", "|=", "&&", "||", "==", "!=", "<=", ">=",
    "+=", "-=", "*=", "/=", "%=", "..",
    "<", ">", "=", "+", "-", "*", "/", "%", "^", "!", "(", ")", "[", "]", "{", "}",
    ";", ",", ":", "@", ".",
]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<block>/\*.*?\*/)
  | (?P<dec>\d+\.\d+)
  | (?P<int>\d+)
  | (?P<id>[^\W\d]\w*)
  | (?P<op>""" + "|".join(re.escape(o) for o in _OPERATORS) + r""")
    """,
    re.VERBOSE | re.DOTALL | re.UNICODE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'int', 'dec', 'id', 'kw', 'op', 'eof'
    text: str
    line: int
    col: int


def tokenize(source: str, filename: str = "<model>") -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line, line_start = 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1,
                             filename=filename)
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "block":
            line += text.count("\n")
            if "\n" in text:
                line_start = pos + text.rindex("\n") + 1
        elif kind in ("ws", "comment"):
            pass
        elif kind == "dec" and tokens and tokens[-1].text == "." and tokens[-1].kind == "op":
            # "a.0.1" is a label with two indices, not a decimal
            whole, frac = text.split(".")
            tokens.append(Token("int", whole, line, col))
            tokens.append(Token("op", ".", line, col + len(whole)))
            tokens.append(Token("int", frac, line, col + len(whole) + 1))
        elif kind == "id":
            tokens.append(Token("kw" if text in KEYWORDS else "id", text, line, col))
        else:
            tokens.append(Token(kind, text, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens
