"""ECMAScript value semantics, checked against values frozen from node v20 and a live node run."""

from __future__ import annotations

import math
import random
import struct

import pytest
from hypothesis import given, strategies as st

import jsref
from jsdeob import jsvalues as J
from jsdeob.nodes import UNDEFINED

# (number, String(number)) as printed by node
NUMBER_TO_STRING = [
    (0.0, "0"), (-0.0, "0"), (1.0, "1"), (-1.0, "-1"), (0.1, "0.1"),
    (1 / 3, "0.3333333333333333"), (1e21, "1e+21"), (1e-7, "1e-7"),
    (123456789012345680000.0, "123456789012345680000"), (5e-324, "5e-324"),
    (1.7976931348623157e308, "1.7976931348623157e+308"), (math.nan, "NaN"),
    (math.inf, "Infinity"), (-math.inf, "-Infinity"), (0.000001, "0.000001"),
    (2.0 ** 53, "9007199254740992"), (4294967295.5, "4294967295.5"), (-1.5e-10, "-1.5e-10"),
]

# (string, hex bits of Number(string))
STRING_TO_NUMBER = [
    ("", "0000000000000000"), (" 12 ", "4028000000000000"), ("0x1F", "403f000000000000"),
    ("0b101", "4014000000000000"), ("0o17", "402e000000000000"), ("1e3", "408f400000000000"),
    (".5", "3fe0000000000000"), ("5.", "4014000000000000"), ("+Infinity", "7ff0000000000000"),
    ("-0", "8000000000000000"), ("abc", "7ff8000000000000"), ("  7 ﻿", "401c000000000000"),
    ("12px", "7ff8000000000000"), ("0x", "7ff8000000000000"), ("1_000", "7ff8000000000000"),
    ("-0x10", "7ff8000000000000"), ("Infinity", "7ff0000000000000"),
    ("infinity", "7ff8000000000000"), (" \n", "0000000000000000"),
]


def bits(x: float) -> str:
    return "7ff8000000000000" if math.isnan(x) else struct.pack(">d", x).hex()


@pytest.mark.parametrize("value,text", NUMBER_TO_STRING)
def test_number_to_string(value, text):
    assert J.number_to_string(value) == text


@pytest.mark.parametrize("text,expected", STRING_TO_NUMBER)
def test_string_to_number(text, expected):
    assert bits(J.to_number(text)) == expected


@pytest.mark.parametrize("fn,arg,expected", [
    (J.parse_int, "0x1f", 31.0), (J.parse_int, "  -12.9e3", -12.0),
    (J.parse_float, "3.5e2xyz", 350.0), (J.parse_float, "-Infinityx", -math.inf),
])
def test_parse_number_prefixes(fn, arg, expected):
    assert fn(arg) == expected


@pytest.mark.parametrize("fn,arg", [(J.parse_int, "abc"), (J.parse_float, ".e1")])
def test_parse_number_nan(fn, arg):
    assert math.isnan(fn(arg))


def test_unescape_and_decode_uri_component():
    assert J.unescape("%u0041%41%zz%") == "AA%zz%"
    assert J.decode_uri_component("%E2%82%AC%41") == "€A"
    with pytest.raises(J.NotFoldable):
        J.decode_uri_component("%E2%82")


@pytest.mark.parametrize("op,a,b,text", [
    ("%", -7.0, 3.0, "-1"), ("%", 7.0, -3.0, "1"), ("%", -0.0, 5.0, "0"), ("%", 5.5, 2.0, "1.5"),
    ("<<", 1.0, 31.0, "-2147483648"), (">>>", -1.0, 0.0, "4294967295"),
    (">>>", -1.0, 28.0, "15"), ("|", 2.0 ** 32 + 5, 0.0, "5"), ("*", "3", "4", "12"),
    ("+", None, 1.0, "1"), ("+", UNDEFINED, 1.0, "NaN"), ("+", True, True, "2"),
    ("+", "b", None, "bnull"), ("==", None, 0.0, "false"), (">=", None, 0.0, "true"),
    ("!=", math.nan, math.nan, "true"), ("==", "1", 1.0, "true"), ("==", " ", 0.0, "true"),
])
def test_binary_against_frozen(op, a, b, text):
    assert J.to_string(J.binary(op, a, b)) == text


def test_negative_zero_is_distinct():
    assert J.same_value(-0.0, -0.0)
    assert not J.same_value(-0.0, 0.0)
    assert J.strict_equals(-0.0, 0.0)
    assert math.copysign(1, J.unary("-", 0.0)) < 0


@given(st.floats(allow_nan=True, allow_infinity=True))
def test_number_string_round_trip(x):
    back = J.to_number(J.number_to_string(x))
    assert bits(back) == bits(0.0 if x == 0 else x)


@given(st.integers(min_value=-(2 ** 40), max_value=2 ** 40))
def test_to_int32_wraps(i):
    assert J.to_int32(float(i)) == ((i + 2 ** 31) % 2 ** 32) - 2 ** 31


def _js(v) -> str:
    if isinstance(v, str):
        return "'" + "".join(f"\\u{ord(c):04x}" for c in v) + "'"
    if v is UNDEFINED:
        return "undefined"
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return "(-0)" if v == 0 and math.copysign(1, v) < 0 else f"({v!r})"


def test_operators_match_node_live():
    if not jsref.available():
        pytest.skip("node not available")
    rng = random.Random(2024)
    pool = [0.0, -0.0, 1.0, -1.5, 3.0, 2.0 ** 31, 1e21, math.nan, math.inf, -math.inf, "", "0",
            " 4 ", "abc", "0x10", "1e2", True, False, None, UNDEFINED, "-0", "é"]
    cases = []
    for _ in range(3000):
        a, b = rng.choice(pool), rng.choice(pool)
        if rng.random() < 0.8:
            op = rng.choice(sorted(J.BINARY_OPS))
            cases.append((J.binary, op, (a, b), f"{_js(a)} {op} {_js(b)}"))
        else:
            op = rng.choice(sorted(J.UNARY_OPS))
            sep = " " if op.isalpha() else ""
            cases.append((J.unary, op, (a,), f"{op}{sep}{_js(a)}"))
    ref = jsref.eval_expressions([c[3] for c in cases])
    bad = []
    for (fn, op, args, src), (status, want) in zip(cases, ref):
        assert status == "ok", src
        try:
            got = fn(op, *args)
        except J.NotFoldable:
            continue
        if isinstance(got, int) and not isinstance(got, bool):
            got = float(got)
        if not jsref.same_value(got, want):
            bad.append((src, got, want))
    assert not bad, bad[:5]
