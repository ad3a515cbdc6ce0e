"""Random JavaScript generators for differential testing against node."""

from __future__ import annotations

import random

NUMBERS = ["0", "1", "2", "3", "7", "10", "255", "65", "0.5", "2.5", "1e21", "1e-7", "0x1f",
           "4294967296", "2147483647", "NaN", "Infinity", "123456789", "0.1", "99"]
STRINGS = ["''", "'a'", "'abc'", "'10'", "' 12 '", "'0x1f'", "'3.5e2'", "'-0'", "'true'",
           "'\\u00e9t\\u00e9'", "'Infinity'", "'ab,cd'", "'\\ud83d\\ude00'", "'null'", "'%41%42'",
           "'%u0041x'", "'%E2%82%AC'", "' '", "'1,2'", "'ABC'"]
OTHERS = ["true", "false", "null", "undefined", "void 0", "[]", "[1, 2]", "['a', 'b']"]
BINARY = ["+", "+", "-", "*", "/", "%", "<<", ">>", ">>>", "&", "|", "^", "==", "!=", "===",
          "!==", "<", ">", "<=", ">=", "&&", "||"]
UNARY = ["-", "+", "!", "~", "typeof ", "void "]
METHODS = [".length", ".charAt(1)", ".charCodeAt(0)", ".indexOf('b')", ".substring(1, 3)",
           ".substr(-2)", ".slice(1)", ".toUpperCase()", ".toLowerCase()", ".split(',')",
           ".concat('z')", ".replace('a', 'q')", ".lastIndexOf('a')"]
GLOBALS = ["String.fromCharCode({0})", "String.fromCharCode({0}, 66)", "parseInt({0})",
           "parseInt({0}, 16)", "parseFloat({0})", "unescape({0})", "isNaN({0})",
           "isFinite({0})"]


def leaf(rng: random.Random) -> str:
    r = rng.random()
    if r < 0.45:
        return rng.choice(NUMBERS)
    if r < 0.85:
        return rng.choice(STRINGS)
    return rng.choice(OTHERS)


def literal_expr(rng: random.Random, depth: int = 4) -> str:
    """A random expression built only from literals, operators and foldable builtins."""
    if depth <= 0 or rng.random() < 0.2:
        return leaf(rng)
    r = rng.random()
    sub = lambda: literal_expr(rng, depth - 1)  # noqa: E731
    if r < 0.55:
        return f"({sub()} {rng.choice(BINARY)} {sub()})"
    if r < 0.7:
        return f"({rng.choice(UNARY)}{sub()})"
    if r < 0.8:
        return f"({sub()} ? {sub()} : {sub()})"
    if r < 0.9:
        recv = f"('' + {sub()})" if rng.random() < 0.5 else rng.choice(STRINGS)
        return f"{recv}{rng.choice(METHODS)}"
    return rng.choice(GLOBALS).format(sub())


class _Prog:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.vars = [f"v{i}" for i in range(rng.randint(2, 5))]
        self.lines = []
        self.funcs = []

    def expr(self, depth=2) -> str:
        rng = self.rng
        r = rng.random()
        if depth <= 0 or r < 0.25:
            return rng.choice(self.vars) if rng.random() < 0.5 else leaf(rng)
        if r < 0.6:
            return f"({self.expr(depth - 1)} {rng.choice(BINARY)} {self.expr(depth - 1)})"
        if r < 0.7:
            return f"String.fromCharCode({rng.randint(40, 70) * 7} / 7 + {rng.randint(0, 20)})"
        if r < 0.78:
            return f"({self.expr(depth - 1)} ? {self.expr(depth - 1)} : {self.expr(depth - 1)})"
        if r < 0.85:
            return f"({rng.choice(UNARY)}{self.expr(depth - 1)})"
        if self.funcs:
            name, arity = rng.choice(self.funcs)
            return f"{name}({', '.join(self.expr(depth - 1) for _ in range(arity))})"
        return literal_expr(rng, 2)

    def cond(self) -> str:
        rng = self.rng
        if rng.random() < 0.7:  # foldable
            return rng.choice(["'ab' + 'c' == 'abc'", "3 > 9", "typeof 'q' == 'string'",
                               "7 * 6 === 42", "!1", "null == undefined", "'x'.length - 1",
                               literal_expr(rng, 2)])
        return self.expr(2)

    def stmts(self, depth, n) -> list:
        return [s for _ in range(n) for s in self.stmt(depth)]

    def stmt(self, depth) -> list:
        rng = self.rng
        v = rng.choice(self.vars)
        r = rng.random()
        if depth <= 0 or r < 0.35:
            return [f"{v} = {self.expr()};"]
        if r < 0.5:
            return [f"{v} {rng.choice(['+=', '-=', '*=', '|='])} {self.expr(1)};"]
        if r < 0.55:
            return [f"{v}++;"]
        if r < 0.68:
            out = [f"if ({self.cond()}) {{"] + self.stmts(depth - 1, 2) + ["}"]
            if rng.random() < 0.5:
                out[-1] = "} else {"
                out += self.stmts(depth - 1, 2) + ["}"]
            return out
        if r < 0.78:
            out = [f"switch ({rng.choice(['2', '1 + 1', repr('b'), self.expr(1)])}) {{"]
            for test in rng.sample(["1", "2", "3", "'b'", "'a' + 'b'"], 3):
                out.append(f"case {test}:")
                out += self.stmts(depth - 1, 1)
                if rng.random() < 0.7:
                    out.append("break;")
            if rng.random() < 0.5:
                out.append("default:")
                out += self.stmts(depth - 1, 1)
            return out + ["}"]
        if r < 0.85:
            k = f"k{rng.randint(0, 9)}"
            return [f"for (var {k} = 0; {k} < {rng.randint(0, 3)}; {k}++) {{",
                    f"{v} += {k};"] + self.stmts(depth - 1, 1) + ["}"]
        if r < 0.9:
            return [f"while ({rng.choice(['false', '0', '3 > 9', repr('')])}) {{"] + \
                self.stmts(depth - 1, 1) + ["}"]
        if r < 0.95 and self.funcs:
            name, arity = rng.choice(self.funcs)
            return [f"{name}({', '.join(self.expr(1) for _ in range(arity))});"]
        return [f"{v} = {self.expr()};"]

    def function(self, i):
        rng = self.rng
        name = f"f{i}"
        kind = rng.randrange(5)
        if kind == 0:
            src, arity = f"function {name}() {{ return {literal_expr(rng, 2)}; }}", 0
        elif kind == 1:
            src, arity = f"function {name}(a, b) {{ return b; }}", 2
        elif kind == 2:
            src, arity = f"function {name}(a) {{ }}", 1
        elif kind == 3:
            src, arity = f"function {name}(a) {{ var t = a + {leaf(rng)}; return t; }}", 1
        else:
            g = rng.choice(self.vars)
            src, arity = f"function {name}(a) {{ {g} = {g} + a; return {g}; }}", 1
        self.lines.append(src)
        self.funcs.append((name, arity))

    def build(self) -> str:
        rng = self.rng
        for i in range(rng.randint(0, 3)):
            self.function(i)
        for v in self.vars:
            self.lines.append(f"var {v} = {self.expr(1)};")
        self.lines += self.stmts(2, rng.randint(3, 8))
        self.lines.append(f"log({', '.join(self.vars)});")
        return "\n".join(self.lines) + "\n"


def program(rng: random.Random) -> str:
    """A random terminating program whose only observable effect is the final `log`."""
    return _Prog(rng).build()
