"""ECMAScript abstract operations over primitive values.

Strings are sequences of UTF-16 code units (see ``nodes``).  Everything here
is pure and engine-independent; callers treat ``NotFoldable`` as "leave the
expression alone".
"""

from __future__ import annotations

import math
import re
from decimal import Decimal

from .nodes import UNDEFINED, LitValue

WHITESPACE = frozenset(
    "\t\n\v\f\r \xa0\u1680\u2000\u2001\u2002\u2003\u2004\u2005\u2006"
    "\u2007\u2008\u2009\u200a\u2028\u2029\u202f\u205f\u3000\ufeff"
)

_DECIMAL = re.compile(r"[+-]?(?:Infinity|(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)\Z")
_DECIMAL_PREFIX = re.compile(r"[+-]?(?:Infinity|(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)")
_RADIX_PREFIXED = re.compile(r"0([xXoObB])([0-9a-zA-Z]+)\Z")
_RADIX = {"x": 16, "o": 8, "b": 2}


class NotFoldable(Exception):
    pass


def type_of(v: LitValue) -> str:
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, float):
        return "number"
    if isinstance(v, str):
        return "string"
    if v is None:
        return "object"
    return "undefined"


def js_trim(s: str) -> str:
    i, j = 0, len(s)
    while i < j and s[i] in WHITESPACE:
        i += 1
    while j > i and s[j - 1] in WHITESPACE:
        j -= 1
    return s[i:j]


def js_trim_left(s: str) -> str:
    i = 0
    while i < len(s) and s[i] in WHITESPACE:
        i += 1
    return s[i:]


# -- conversions -------------------------------------------------------------


def to_boolean(v: LitValue) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, float):
        return not (v == 0 or v != v)
    if isinstance(v, str):
        return len(v) > 0
    return False


def string_to_number(s: str) -> float:
    s = js_trim(s)
    if not s:
        return 0.0
    if _DECIMAL.match(s):
        return float(s)
    m = _RADIX_PREFIXED.match(s)
    if m:
        radix = _RADIX[m.group(1).lower()]
        try:
            return float(int(m.group(2), radix))
        except (ValueError, OverflowError):
            return math.inf if _all_digits(m.group(2), radix) else math.nan
    return math.nan


def _all_digits(s: str, radix: int) -> bool:
    try:
        int(s, radix)
        return True
    except ValueError:
        return False


def to_number(v: LitValue) -> float:
    if isinstance(v, bool):
        return 1.0 if v else 0.0
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        return string_to_number(v)
    if v is None:
        return 0.0
    return math.nan


def to_integer(v: LitValue) -> float:
    n = to_number(v)
    if n != n:
        return 0.0
    if math.isinf(n) or n == 0:
        return n
    return float(math.trunc(n))


def to_int32(v: LitValue) -> int:
    n = to_number(v)
    if n != n or math.isinf(n):
        return 0
    i = math.trunc(n) % 2**32
    return i - 2**32 if i >= 2**31 else i


def to_uint32(v: LitValue) -> int:
    n = to_number(v)
    if n != n or math.isinf(n):
        return 0
    return math.trunc(n) % 2**32


def to_uint16(v: LitValue) -> int:
    n = to_number(v)
    if n != n or math.isinf(n):
        return 0
    return math.trunc(n) % 2**16


def number_to_string(x: float) -> str:
    """Number::toString: shortest round-trip digits, ECMAScript layout."""
    if x != x:
        return "NaN"
    if x == 0:
        return "0"
    if x < 0:
        return "-" + number_to_string(-x)
    if math.isinf(x):
        return "Infinity"
    _, digits, exp = Decimal(repr(x)).as_tuple()
    s = "".join(map(str, digits))
    n = len(s) + exp
    s = s.rstrip("0")
    k = len(s)
    if k <= n <= 21:
        return s + "0" * (n - k)
    if 0 < n <= 21:
        return s[:n] + "." + s[n:]
    if -6 < n <= 0:
        return "0." + "0" * (-n) + s
    e = n - 1
    mant = s if k == 1 else s[0] + "." + s[1:]
    return f"{mant}e{'+' if e >= 0 else '-'}{abs(e)}"


def to_string(v: LitValue) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return number_to_string(v)
    if isinstance(v, str):
        return v
    if v is None:
        return "null"
    return "undefined"


def same_value(a: LitValue, b: LitValue) -> bool:
    from .nodes import lit_key
    return lit_key(a) == lit_key(b)


# -- operators ---------------------------------------------------------------


def strict_equals(a: LitValue, b: LitValue) -> bool:
    ta, tb = type_of(a), type_of(b)
    if ta != tb:
        return False
    if ta == "number":
        return a == b  # NaN != NaN, 0 == -0
    if a is None or a is UNDEFINED:
        return a is b
    return a == b


def loose_equals(a: LitValue, b: LitValue) -> bool:
    ta, tb = type_of(a), type_of(b)
    if ta == tb:
        return strict_equals(a, b)
    nullish = (None, UNDEFINED)
    if a in nullish or b in nullish:
        return a in nullish and b in nullish
    if isinstance(a, bool):
        return loose_equals(to_number(a), b)
    if isinstance(b, bool):
        return loose_equals(a, to_number(b))
    # remaining mixes are number/string
    return to_number(a) == to_number(b)


def _less_than(a: LitValue, b: LitValue):
    """Abstract relational comparison; None stands for undefined (NaN)."""
    if isinstance(a, str) and isinstance(b, str):
        return a < b
    x, y = to_number(a), to_number(b)
    if x != x or y != y:
        return None
    return x < y


def _div(x: float, y: float) -> float:
    if y == 0:
        if x == 0 or x != x:
            return math.nan
        neg = (math.copysign(1.0, x) < 0) != (math.copysign(1.0, y) < 0)
        return -math.inf if neg else math.inf
    return x / y


def _mod(x: float, y: float) -> float:
    if x != x or y != y or math.isinf(x) or y == 0:
        return math.nan
    if math.isinf(y):
        return x
    if x == 0:
        return x
    return math.fmod(x, y)


def _int32(i: int) -> float:
    i %= 2**32
    return float(i - 2**32 if i >= 2**31 else i)


def _add(a: LitValue, b: LitValue) -> LitValue:
    if isinstance(a, str) or isinstance(b, str):
        return to_string(a) + to_string(b)
    return to_number(a) + to_number(b)


def _lt(a, b):
    r = _less_than(a, b)
    return bool(r)


def _gt(a, b):
    r = _less_than(b, a)
    return bool(r)


def _le(a, b):
    r = _less_than(b, a)
    return r is False


def _ge(a, b):
    r = _less_than(a, b)
    return r is False


BINARY_OPS = {
    "+": _add,
    "-": lambda a, b: to_number(a) - to_number(b),
    "*": lambda a, b: to_number(a) * to_number(b),
    "/": lambda a, b: _div(to_number(a), to_number(b)),
    "%": lambda a, b: _mod(to_number(a), to_number(b)),
    "<<": lambda a, b: _int32(to_int32(a) << (to_uint32(b) & 31)),
    ">>": lambda a, b: float(to_int32(a) >> (to_uint32(b) & 31)),
    ">>>": lambda a, b: float(to_uint32(a) >> (to_uint32(b) & 31)),
    "&": lambda a, b: _int32(to_int32(a) & to_int32(b)),
    "|": lambda a, b: _int32(to_int32(a) | to_int32(b)),
    "^": lambda a, b: _int32(to_int32(a) ^ to_int32(b)),
    "<": _lt,
    ">": _gt,
    "<=": _le,
    ">=": _ge,
    "==": loose_equals,
    "!=": lambda a, b: not loose_equals(a, b),
    "===": strict_equals,
    "!==": lambda a, b: not strict_equals(a, b),
    "&&": lambda a, b: b if to_boolean(a) else a,
    "||": lambda a, b: a if to_boolean(a) else b,
}

UNARY_OPS = {
    "-": lambda v: -to_number(v),
    "+": to_number,
    "!": lambda v: not to_boolean(v),
    "~": lambda v: float(~to_int32(v)),
    "typeof": type_of,
    "void": lambda v: UNDEFINED,
}

# Compound assignment operator -> binary operator.
COMPOUND_OPS = {op + "=": op for op in ("+", "-", "*", "/", "%", "<<", ">>", ">>>", "&", "|", "^")}


def binary(op: str, a: LitValue, b: LitValue) -> LitValue:
    try:
        fn = BINARY_OPS[op]
    except KeyError:
        raise NotFoldable(op) from None
    return fn(a, b)


def unary(op: str, v: LitValue) -> LitValue:
    try:
        fn = UNARY_OPS[op]
    except KeyError:
        raise NotFoldable(op) from None
    return fn(v)


# -- global functions --------------------------------------------------------


def parse_int(arg: LitValue, radix: LitValue = UNDEFINED) -> float:
    s = js_trim_left(to_string(arg))
    sign = 1
    if s[:1] in ("+", "-"):
        if s[0] == "-":
            sign = -1
        s = s[1:]
    r = to_int32(radix)
    strip_prefix = True
    if r != 0:
        if r < 2 or r > 36:
            return math.nan
        if r != 16:
            strip_prefix = False
    else:
        r = 10
    if strip_prefix and s[:2] in ("0x", "0X"):
        s = s[2:]
        r = 16
    end = 0
    while end < len(s) and _digit_value(s[end]) < r:
        end += 1
    if end == 0:
        return math.nan
    try:
        value = float(int(s[:end], r))
    except OverflowError:
        value = math.inf
    return -value if sign < 0 else value


def _digit_value(ch: str) -> int:
    o = ord(ch)
    if 48 <= o <= 57:
        return o - 48
    if 97 <= o <= 122:
        return o - 87
    if 65 <= o <= 90:
        return o - 55
    return 99


def parse_float(arg: LitValue) -> float:
    s = js_trim_left(to_string(arg))
    m = _DECIMAL_PREFIX.match(s)
    if not m:
        return math.nan
    return float(m.group(0))


def from_char_code(args) -> str:
    return "".join(chr(to_uint16(a)) for a in args)


def _hex4(s: str, i: int):
    chunk = s[i:i + 4]
    if len(chunk) == 4 and all(c in "0123456789abcdefABCDEF" for c in chunk):
        return int(chunk, 16)
    return None


def unescape(s: str) -> str:
    out = []
    i, n = 0, len(s)
    while i < n:
        c = s[i]
        if c == "%":
            if s[i + 1:i + 2] == "u":
                v = _hex4(s, i + 2)
                if v is not None:
                    out.append(chr(v))
                    i += 6
                    continue
            chunk = s[i + 1:i + 3]
            if len(chunk) == 2 and all(ch in "0123456789abcdefABCDEF" for ch in chunk):
                out.append(chr(int(chunk, 16)))
                i += 3
                continue
        out.append(c)
        i += 1
    return "".join(out)


def to_code_units(s: str) -> str:
    """Split astral code points into surrogate pairs."""
    if all(ord(c) < 0x10000 for c in s):
        return s
    out = []
    for c in s:
        o = ord(c)
        if o >= 0x10000:
            o -= 0x10000
            out.append(chr(0xD800 + (o >> 10)))
            out.append(chr(0xDC00 + (o & 0x3FF)))
        else:
            out.append(c)
    return "".join(out)


def decode_uri_component(s: str) -> str:
    """ECMAScript decodeURIComponent; raises NotFoldable where JS throws URIError."""
    out = []
    i, n = 0, len(s)
    while i < n:
        c = s[i]
        if c != "%":
            out.append(c)
            i += 1
            continue
        raw = bytearray()
        b = _pct_byte(s, i)
        raw.append(b)
        i += 3
        if b >= 0x80:
            if b & 0xE0 == 0xC0:
                extra = 1
            elif b & 0xF0 == 0xE0:
                extra = 2
            elif b & 0xF8 == 0xF0:
                extra = 3
            else:
                raise NotFoldable("malformed URI")
            for _ in range(extra):
                if i >= n or s[i] != "%":
                    raise NotFoldable("malformed URI")
                raw.append(_pct_byte(s, i))
                i += 3
        try:
            out.append(to_code_units(raw.decode("utf-8")))
        except UnicodeDecodeError:
            raise NotFoldable("malformed URI") from None
    return "".join(out)


def _pct_byte(s: str, i: int) -> int:
    chunk = s[i + 1:i + 3]
    if len(chunk) != 2 or not all(ch in "0123456789abcdefABCDEF" for ch in chunk):
        raise NotFoldable("malformed URI")
    return int(chunk, 16)
