"""On-demand ES5 tokenizer.

The parser pulls one token at a time; a ``/`` seen where an expression may
start is re-scanned as a regular expression literal via ``rescan_regex``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..jsvalues import WHITESPACE, to_code_units

LINE_TERMINATORS = "\n\r\u2028\u2029"
KEYWORDS = frozenset(
    "break case catch continue debugger default delete do else finally for function if in "
    "instanceof new return switch this throw try typeof var void while with null true false".split()
)
# Reserved in ES5 and only meaningful to later editions: rejected outright.
UNSUPPORTED_WORDS = frozenset("class const enum export extends import super".split())

PUNCTUATORS = sorted(
    """{ } ( ) [ ] . ; , < > <= >= == != === !== + - * % ++ -- << >> >>> & | ^ ! ~ && || ? :
    = += -= *= %= <<= >>= >>>= &= |= ^= / /= => ... **""".split(),
    key=len, reverse=True,
)
_PUNCT_BY_CHAR: dict = {}
for _p in PUNCTUATORS:
    _PUNCT_BY_CHAR.setdefault(_p[0], []).append(_p)

_SIMPLE_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "v": "\v"}
_HEX = "0123456789abcdefABCDEF"


class LexError(Exception):
    def __init__(self, message, pos):
        super().__init__(message)
        self.message = message
        self.pos = pos


@dataclass
class Token:
    kind: str  # ident, keyword, punct, num, str, regex, eof
    value: object
    start: int
    end: int
    nl_before: bool
    raw: str = ""


def is_id_start(ch: str) -> bool:
    return ch == "$" or ch == "_" or ("a" <= ch <= "z") or ("A" <= ch <= "Z") or (
        ch > "\x7f" and ch.isidentifier())


def is_id_part(ch: str) -> bool:
    return (is_id_start(ch) or "0" <= ch <= "9" or ch in "\u200c\u200d"
            or (ch > "\x7f" and ("a" + ch).isidentifier()))


class Lexer:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0
        self.n = len(src)

    # -- trivia ---------------------------------------------------------------

    def _skip_trivia(self) -> bool:
        """Skip whitespace and comments; report whether a line break was crossed."""
        src, n = self.src, self.n
        nl = False
        at_line_start = self.pos == 0
        while self.pos < n:
            c = src[self.pos]
            if c in LINE_TERMINATORS:
                nl = True
                at_line_start = True
                self.pos += 1
            elif c in WHITESPACE:
                self.pos += 1
            elif c == "/" and src.startswith("//", self.pos):
                self._skip_line()
            elif c == "/" and src.startswith("/*", self.pos):
                end = src.find("*/", self.pos + 2)
                if end < 0:
                    raise LexError("unterminated comment", self.pos)
                if any(t in src[self.pos:end] for t in LINE_TERMINATORS):
                    nl = True
                    at_line_start = True
                self.pos = end + 2
            elif c == "<" and src.startswith("<!--", self.pos):
                self._skip_line()
            elif c == "-" and (nl or at_line_start) and src.startswith("-->", self.pos):
                self._skip_line()
            else:
                break
        return nl

    def _skip_line(self):
        src, n = self.src, self.n
        while self.pos < n and src[self.pos] not in LINE_TERMINATORS:
            self.pos += 1

    # -- tokens ---------------------------------------------------------------

    def next(self) -> Token:
        nl = self._skip_trivia()
        start = self.pos
        if start >= self.n:
            return Token("eof", None, start, start, nl)
        c = self.src[start]
        if is_id_start(c) or c == "\\":
            name = self._identifier()
            kind = "keyword" if name in KEYWORDS and "\\" not in self.src[start:self.pos] else "ident"
            return Token(kind, name, start, self.pos, nl, self.src[start:self.pos])
        if "0" <= c <= "9" or (c == "." and self.src[start + 1:start + 2].isdigit()
                               and "0" <= self.src[start + 1] <= "9"):
            value = self._number()
            return Token("num", value, start, self.pos, nl, self.src[start:self.pos])
        if c in "'\"":
            value = self._string(c)
            return Token("str", value, start, self.pos, nl, self.src[start:self.pos])
        if c == "`":
            raise LexError("unsupported construct: template literal", start)
        for p in _PUNCT_BY_CHAR.get(c, ()):
            if self.src.startswith(p, start):
                self.pos = start + len(p)
                return Token("punct", p, start, self.pos, nl, p)
        raise LexError(f"unexpected character {c!r}", start)

    def _identifier(self) -> str:
        src = self.src
        out = []
        first = True
        while self.pos < self.n:
            c = src[self.pos]
            if c == "\\":
                if src[self.pos + 1:self.pos + 2] != "u":
                    raise LexError("invalid escape in identifier", self.pos)
                code = src[self.pos + 2:self.pos + 6]
                if len(code) != 4 or not all(h in _HEX for h in code):
                    raise LexError("invalid escape in identifier", self.pos)
                ch = chr(int(code, 16))
                if not (is_id_start(ch) if first else is_id_part(ch)):
                    raise LexError("invalid escape in identifier", self.pos)
                out.append(ch)
                self.pos += 6
            elif is_id_start(c) if first else is_id_part(c):
                out.append(c)
                self.pos += 1
            else:
                break
            first = False
        return "".join(out)

    def _number(self) -> float:
        src, start = self.src, self.pos
        if src[start] == "0" and src[start + 1:start + 2] in ("x", "X"):
            i = start + 2
            while i < self.n and src[i] in _HEX:
                i += 1
            if i == start + 2:
                raise LexError("invalid hex literal", start)
            self.pos = i
            value = float(int(src[start + 2:i], 16))
        elif src[start] == "0" and src[start + 1:start + 2] in ("b", "B", "o", "O"):
            raise LexError("unsupported construct: binary/octal literal", start)
        elif src[start] == "0" and "0" <= src[start + 1:start + 2] <= "9" and src[start + 1:start + 2]:
            i = start + 1
            while i < self.n and "0" <= src[i] <= "9":
                i += 1
            digits = src[start + 1:i]
            self.pos = i
            if all(d < "8" for d in digits):
                value = float(int(digits, 8))
            else:
                value = float(digits)
        else:
            i = start
            while i < self.n and "0" <= src[i] <= "9":
                i += 1
            if i < self.n and src[i] == ".":
                i += 1
                while i < self.n and "0" <= src[i] <= "9":
                    i += 1
            if i < self.n and src[i] in "eE":
                j = i + 1
                if j < self.n and src[j] in "+-":
                    j += 1
                if j < self.n and "0" <= src[j] <= "9":
                    while j < self.n and "0" <= src[j] <= "9":
                        j += 1
                    i = j
                else:
                    raise LexError("invalid exponent", i)
            self.pos = i
            value = float(src[start:i])
        if self.pos < self.n and (is_id_start(src[self.pos]) or "0" <= src[self.pos] <= "9"):
            raise LexError("identifier directly after number", self.pos)
        return value

    def _string(self, quote: str) -> str:
        src = self.src
        i = self.pos + 1
        out = []
        while True:
            if i >= self.n:
                raise LexError("unterminated string literal", self.pos)
            c = src[i]
            if c == quote:
                i += 1
                break
            if c in "\n\r":
                raise LexError("unterminated string literal", self.pos)
            if c != "\\":
                out.append(c)
                i += 1
                continue
            i += 1
            if i >= self.n:
                raise LexError("unterminated string literal", self.pos)
            e = src[i]
            if e in _SIMPLE_ESCAPES:
                out.append(_SIMPLE_ESCAPES[e])
                i += 1
            elif e == "x":
                h = src[i + 1:i + 3]
                if len(h) != 2 or not all(x in _HEX for x in h):
                    raise LexError("invalid \\x escape", i - 1)
                out.append(chr(int(h, 16)))
                i += 3
            elif e == "u":
                if src[i + 1:i + 2] == "{":
                    raise LexError("unsupported construct: code point escape", i - 1)
                h = src[i + 1:i + 5]
                if len(h) != 4 or not all(x in _HEX for x in h):
                    raise LexError("invalid \\u escape", i - 1)
                out.append(chr(int(h, 16)))
                i += 5
            elif "0" <= e <= "7":
                # legacy octal escape (\0 included), at most three digits, value <= 0o377
                j = i
                limit = 3 if e <= "3" else 2
                while j < self.n and j - i < limit and "0" <= src[j] <= "7":
                    j += 1
                out.append(chr(int(src[i:j], 8)))
                i = j
            elif e == "\r":
                i += 2 if src[i + 1:i + 2] == "\n" else 1
            elif e in "\n\u2028\u2029":
                i += 1
            else:
                out.append(e)
                i += 1
        self.pos = i
        return to_code_units("".join(out))

    def rescan_regex(self, tok: Token) -> Token:
        """Re-read ``tok`` (a ``/`` or ``/=``) as the start of a regex literal."""
        src = self.src
        i = tok.start + 1
        in_class = False
        while True:
            if i >= self.n or src[i] in LINE_TERMINATORS:
                raise LexError("unterminated regular expression", tok.start)
            c = src[i]
            if c == "\\":
                i += 2
                continue
            if c == "[":
                in_class = True
            elif c == "]":
                in_class = False
            elif c == "/" and not in_class:
                break
            i += 1
        pattern = src[tok.start + 1:i]
        i += 1
        j = i
        while j < self.n and is_id_part(src[j]):
            j += 1
        flags = src[i:j]
        self.pos = j
        return Token("regex", (pattern, flags), tok.start, j, tok.nl_before, src[tok.start:j])


def line_col(src: str, pos: int):
    """1-based line, 0-based column of offset ``pos``."""
    line, col = 1, 0
    i = 0
    while i < pos:
        c = src[i]
        if c in LINE_TERMINATORS:
            if c == "\r" and src[i + 1:i + 2] == "\n":
                i += 1
            line += 1
            col = 0
        else:
            col += 1
        i += 1
    return line, col
