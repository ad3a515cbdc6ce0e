"""Deterministic pretty-printer: AST back to JavaScript source.

Output is ASCII, 2-space indented, one statement per line, braces on every
compound statement and semicolons everywhere.  Parentheses appear only where
precedence or associativity demands them, so ``parse(print(s))`` reproduces
``s`` exactly.
"""

from __future__ import annotations

import math
import re

from . import nodes as N
from .jsvalues import number_to_string
from .stack import deep_recursion

INDENT = "  "

BINARY_PREC = {
    "||": 4, "&&": 5, "|": 6, "^": 7, "&": 8,
    "==": 9, "!=": 9, "===": 9, "!==": 9,
    "<": 10, ">": 10, "<=": 10, ">=": 10, "in": 10, "instanceof": 10,
    "<<": 11, ">>": 11, ">>>": 11,
    "+": 12, "-": 12,
    "*": 13, "/": 13, "%": 13,
}
P_SEQ, P_ASSIGN, P_COND, P_UNARY, P_POSTFIX, P_CALL, P_PRIMARY = 1, 2, 3, 14, 15, 16, 18

_NAMED_ESCAPES = {"\\": "\\\\", "'": "\\'", "\n": "\\n", "\r": "\\r", "\t": "\\t",
                  "\b": "\\b", "\f": "\\f", "\v": "\\v"}
_ASCII_IDENT = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*\Z")
_STARTS_FUNCTION = re.compile(r"function\b")
_LITERAL_NAMES = ("undefined", "NaN", "Infinity")


def quote(s: str) -> str:
    out = ["'"]
    for ch in s:
        e = _NAMED_ESCAPES.get(ch)
        if e is not None:
            out.append(e)
            continue
        c = ord(ch)
        if c < 0x20 or 0x7F <= c <= 0xFF:
            out.append("\\x%02x" % c)
        elif c > 0xFF:
            out.append("\\u%04x" % c)
        else:
            out.append(ch)
    out.append("'")
    return "".join(out)


def ident(name: str) -> str:
    if name.isascii():
        return name
    return "".join(ch if ch.isascii() else "\\u%04x" % ord(ch) for ch in name)


def _is_negative_number(v) -> bool:
    return isinstance(v, float) and not isinstance(v, bool) and (
        v < 0 or (v == 0 and math.copysign(1.0, v) < 0))


def bound_literal_names(script) -> frozenset:
    """Literal-looking globals (undefined, NaN, Infinity) the script rebinds."""
    found = set()
    for n in N.walk_body(script.body):
        cand = []
        if isinstance(n, (N.VarDecl, N.FunDecl)):
            cand.append(n.name)
        if isinstance(n, N.FUNCTION_NODES):
            cand.extend(n.params)
            if n.name:
                cand.append(n.name)
        if isinstance(n, N.Try) and n.param:
            cand.append(n.param)
        if isinstance(n, (N.Assign, N.Update)) and isinstance(n.target, N.VarRef):
            cand.append(n.target.name)
        if isinstance(n, N.ForIn) and isinstance(n.left, N.VarRef):
            cand.append(n.left.name)
        found.update(c for c in cand if c in _LITERAL_NAMES)
    return frozenset(found)


class Printer:
    def __init__(self, rebound=frozenset()):
        self.rebound = rebound
        self.lines: list = []
        self.level = 0

    # -- literals -------------------------------------------------------------

    def lit_text(self, v) -> str:
        if v is N.UNDEFINED:
            return "void 0" if "undefined" in self.rebound else "undefined"
        if v is None:
            return "null"
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, str):
            return quote(v)
        if math.isnan(v):
            return "(0 / 0)" if "NaN" in self.rebound else "NaN"
        if math.isinf(v):
            if "Infinity" in self.rebound:
                return "(1 / 0)" if v > 0 else "(-1 / 0)"
            return "Infinity" if v > 0 else "-Infinity"
        if v == 0:
            return "-0" if math.copysign(1.0, v) < 0 else "0"
        if v < 0:
            return "-" + number_to_string(-v)
        return number_to_string(v)

    def prec(self, e) -> int:
        t = type(e)
        if t is N.Infix:
            return BINARY_PREC[e.op]
        if t is N.Lit:
            v = e.value
            if v is N.UNDEFINED and "undefined" in self.rebound:
                return P_UNARY
            if _is_negative_number(v) and not (math.isinf(v) and "Infinity" in self.rebound):
                return P_UNARY
            return P_PRIMARY
        if t is N.Sequence:
            return P_SEQ
        if t is N.Assign:
            return P_ASSIGN
        if t is N.Cond:
            return P_COND
        if t is N.Prefix:
            return P_UNARY
        if t is N.Update:
            return P_UNARY if e.prefix else P_POSTFIX
        if t in (N.FunApp, N.New, N.Member):
            return P_CALL
        return P_PRIMARY

    # -- expressions ----------------------------------------------------------

    def expr_text(self, e, min_prec=P_SEQ) -> str:
        out: list = []
        self.expr(e, min_prec, out)
        return "".join(out)

    def expr(self, e, min_prec, out):
        if self.prec(e) < min_prec:
            out.append("(")
            self._expr(e, out)
            out.append(")")
        else:
            self._expr(e, out)

    def _expr(self, e, out):
        t = type(e)
        if t is N.Lit:
            out.append(self.lit_text(e.value))
        elif t is N.VarRef:
            out.append(ident(e.name))
        elif t is N.Infix:
            p = BINARY_PREC[e.op]
            self.expr(e.left, p, out)
            out.append(f" {e.op} ")
            self.expr(e.right, p + 1, out)
        elif t is N.Member:
            obj = e.obj
            if type(obj) is N.Lit and isinstance(obj.value, float) and self.prec(obj) == P_PRIMARY:
                out.append("(")
                self._expr(obj, out)
                out.append(")")
            else:
                self.expr(obj, P_CALL, out)
            if e.computed:
                out.append("[")
                self.expr(e.prop, P_SEQ, out)
                out.append("]")
            else:
                out.append("." + ident(e.prop.value))
        elif t is N.FunApp:
            self.expr(e.callee, P_CALL, out)
            self.args(e.args, out)
        elif t is N.New:
            out.append("new ")
            if _has_call(e.callee):
                out.append("(")
                self._expr(e.callee, out)
                out.append(")")
            else:
                self.expr(e.callee, P_CALL, out)
            self.args(e.args, out)
        elif t is N.Prefix:
            op = e.op
            operand = self.expr_text(e.operand, P_UNARY)
            if op == "-" and type(e.operand) is N.Lit and isinstance(e.operand.value, float) \
                    and self.prec(e.operand) == P_PRIMARY and not math.isnan(e.operand.value):
                operand = "(" + operand + ")"  # keep `-(5)` distinct from the literal -5
            if op.isalpha():
                out.append(op + " " + operand)
            elif op in "+-" and operand.startswith(op):
                out.append(op + " " + operand)
            else:
                out.append(op + operand)
        elif t is N.Update:
            if e.prefix:
                out.append(e.op)
                self.expr(e.target, P_CALL, out)
            else:
                self.expr(e.target, P_CALL, out)
                out.append(e.op)
        elif t is N.Assign:
            self.expr(e.target, P_CALL, out)
            out.append(f" {e.op} ")
            self.expr(e.value, P_ASSIGN, out)
        elif t is N.Cond:
            self.expr(e.test, P_COND + 1, out)
            out.append(" ? ")
            self.expr(e.then, P_ASSIGN, out)
            out.append(" : ")
            self.expr(e.else_, P_ASSIGN, out)
        elif t is N.Sequence:
            for i, x in enumerate(e.exprs):
                if i:
                    out.append(", ")
                self.expr(x, P_ASSIGN, out)
        elif t is N.ArrayLit:
            out.append("[")
            for i, x in enumerate(e.elements):
                if i:
                    out.append(", ")
                if x is not None:
                    self.expr(x, P_ASSIGN, out)
            if e.elements and e.elements[-1] is None:
                out.append(",")
            out.append("]")
        elif t is N.ObjectLit:
            if not e.props:
                out.append("{}")
                return
            out.append("{")
            for i, p in enumerate(e.props):
                out.append(", " if i else "")
                out.append(self.prop_key(p.key) + ": ")
                self.expr(p.value, P_ASSIGN, out)
            out.append("}")
        elif t is N.This:
            out.append("this")
        elif t is N.RegExpLit:
            out.append(f"/{e.pattern}/{e.flags}")
        elif t is N.FunExpr:
            name = " " + ident(e.name) if e.name else ""
            out.append(f"function{name}({', '.join(ident(p) for p in e.params)}) ")
            out.append(self.inline_block(e.body))
        else:
            raise TypeError(f"not an expression: {e!r}")

    def args(self, args, out):
        out.append("(")
        for i, a in enumerate(args):
            if i:
                out.append(", ")
            self.expr(a, P_ASSIGN, out)
        out.append(")")

    def prop_key(self, key: N.Lit) -> str:
        v = key.value
        if isinstance(v, str):
            return v if _ASCII_IDENT.match(v) else quote(v)
        return self.lit_text(v)

    def inline_block(self, body) -> str:
        """A `{ ... }` block inside an expression, indented one level deeper."""
        if not body:
            return "{}"
        sub = Printer(self.rebound)
        sub.level = self.level + 1
        sub.stmts(body)
        return "{\n" + "\n".join(sub.lines) + "\n" + INDENT * self.level + "}"

    # -- statements -----------------------------------------------------------

    def emit(self, text: str):
        self.lines.append(INDENT * self.level + text)

    def stmts(self, body):
        for s in body:
            self.stmt(s)

    def block(self, head: str, body, tail: str = ""):
        """Emit `head {` body `}tail`; an empty body prints as `head {}tail`."""
        if not body:
            self.emit(head + "{}" + tail)
            return
        self.emit(head + "{")
        self.level += 1
        self.stmts(body)
        self.level -= 1
        self.emit("}" + tail)

    def stmt(self, s):
        t = type(s)
        if t is N.ExprStmt:
            text = self.expr_text(s.expr)
            if text.startswith("{") or _STARTS_FUNCTION.match(text):
                text = "(" + text + ")"
            self.emit(text + ";")
        elif t is N.VarDecl:
            init = "" if s.init is None else " = " + self.expr_text(s.init, P_ASSIGN)
            self.emit(f"var {ident(s.name)}{init};" + _comment(s.original_name))
        elif t is N.FunDecl:
            head = f"function {ident(s.name)}({', '.join(ident(p) for p in s.params)}) "
            if s.original_name is None:
                self.block(head, s.body)
            else:
                self.emit(head + "{" + _comment(s.original_name))
                self.level += 1
                self.stmts(s.body)
                self.level -= 1
                self.emit("}")
        elif t is N.Return:
            self.emit("return;" if s.value is None else f"return {self.expr_text(s.value)};")
        elif t is N.If:
            self.if_chain(s, "")
        elif t is N.While:
            self.block(f"while ({self.expr_text(s.test)}) ", s.body)
        elif t is N.DoWhile:
            self.block("do ", s.body, f" while ({self.expr_text(s.test)});")
        elif t is N.For:
            self.block(f"for ({self.for_head(s)}) ", s.body)
        elif t is N.ForIn:
            if isinstance(s.left, N.VarDecl):
                left = "var " + ident(s.left.name)
            else:
                left = self.expr_text(s.left, P_CALL)
            self.block(f"for ({left} in {self.expr_text(s.obj)}) ", s.body)
        elif t is N.Block:
            self.block("", s.body)
        elif t is N.Switch:
            self.emit(f"switch ({self.expr_text(s.scrutinee)}) {{")
            self.level += 1
            for c in s.cases:
                self.emit("default:" if c.test is None else f"case {self.expr_text(c.test)}:")
                self.level += 1
                self.stmts(c.body)
                self.level -= 1
            self.level -= 1
            self.emit("}")
        elif t is N.Try:
            self.block("try ", s.block)
            if s.handler is not None:
                self._continue(f" catch ({ident(s.param)}) ", s.handler)
            if s.finalizer is not None:
                self._continue(" finally ", s.finalizer)
        elif t is N.With:
            self.block(f"with ({self.expr_text(s.obj)}) ", s.body)
        elif t is N.Throw:
            self.emit(f"throw {self.expr_text(s.expr)};")
        elif t is N.Break:
            self.emit("break;" if s.label is None else f"break {s.label};")
        elif t is N.Continue:
            self.emit("continue;" if s.label is None else f"continue {s.label};")
        elif t is N.Labeled:
            if len(s.body) == 1 and type(s.body[0]) is not N.Block:
                mark = len(self.lines)
                self.stmt(s.body[0])
                first = self.lines[mark]
                stripped = first.lstrip(" ")
                self.lines[mark] = first[:len(first) - len(stripped)] + f"{s.label}: " + stripped
            else:
                self.block(f"{s.label}: ", s.body)
        elif t is N.Debugger:
            self.emit("debugger;")
        elif t is N.Empty:
            self.emit(";")
        else:
            raise TypeError(f"not a statement: {s!r}")

    def _continue(self, head, body):
        """Append `head {` to the previous closing brace line and emit ``body``."""
        last = self.lines.pop()
        if not body:
            self.lines.append(last + head + "{}")
            return
        self.lines.append(last + head + "{")
        self.level += 1
        self.stmts(body)
        self.level -= 1
        self.emit("}")

    def if_chain(self, s, prefix):
        head = f"{prefix}if ({self.expr_text(s.test)}) "
        if prefix:
            self._continue(head, s.then)
        else:
            self.block(head, s.then)
        e = s.else_
        if e is None:
            return
        if len(e) == 1 and type(e[0]) is N.If:
            self.if_chain(e[0], " else ")
        else:
            self._continue(" else ", e)

    def for_head(self, s) -> str:
        if s.init is None:
            init = ""
        elif isinstance(s.init, tuple):
            parts = []
            for d in s.init:
                parts.append(ident(d.name) if d.init is None
                             else f"{ident(d.name)} = {self.expr_text(d.init, P_ASSIGN)}")
            init = "var " + ", ".join(parts)
            if any(_contains_in(d.init) for d in s.init if d.init is not None):
                init = "var " + ", ".join(
                    ident(d.name) if d.init is None else f"{ident(d.name)} = ({self.expr_text(d.init, P_ASSIGN)})"
                    for d in s.init)
        else:
            init = self.expr_text(s.init)
            if _contains_in(s.init):
                init = "(" + init + ")"
        test = "" if s.test is None else " " + self.expr_text(s.test)
        update = "" if s.update is None else " " + self.expr_text(s.update)
        return f"{init};{test};{update}"


def _comment(original) -> str:
    if original is None:
        return ""
    return " // " + "".join(ch if ch.isascii() and ch >= " " else "\\u%04x" % ord(ch)
                            for ch in original)


def _has_call(e) -> bool:
    """True when a `new` callee must be parenthesized to keep a call inside it."""
    while True:
        if isinstance(e, N.FunApp):
            return True
        if isinstance(e, N.Member):
            e = e.obj
        else:
            return False


def _contains_in(e) -> bool:
    for n in N.walk(e):
        if isinstance(n, N.Infix) and n.op == "in":
            return True
    return False


@deep_recursion
def print_script(script: N.Script) -> str:
    """Render ``script`` as JavaScript source; empty scripts render as ''."""
    p = Printer(bound_literal_names(script))
    p.stmts(script.body)
    if not p.lines:
        return ""
    return "\n".join(p.lines) + "\n"


def print_expr(e: N.Expr) -> str:
    return print_script(N.Script((N.ExprStmt(e),))).rstrip("\n").rstrip(";")
