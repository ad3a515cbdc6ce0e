"""Recursive-descent parser for the ES5 subset used by the deobfuscator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

from .. import nodes as N
from ..nodes import UNDEFINED
from ..stack import deep_recursion
from .lexer import LINE_TERMINATORS, UNSUPPORTED_WORDS, LexError, Lexer, Token, line_col

MAX_NESTING = 10_000

ASSIGN_OPS = frozenset("= += -= *= /= %= <<= >>= >>>= &= |= ^=".split())
BINARY_PRECEDENCE = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6, "===": 6, "!==": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7, "instanceof": 7, "in": 7,
    "<<": 8, ">>": 8, ">>>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}
UNARY_OPS = frozenset(["delete", "void", "typeof", "+", "-", "~", "!"])
# Identifiers read as literals unless the script rebinds them.
LITERAL_GLOBALS = {"undefined": UNDEFINED, "NaN": math.nan, "Infinity": math.inf}


@dataclass(frozen=True)
class ParseDiagnostic:
    message: str
    line: int
    column: int
    severity: str = "error"

    def __str__(self):
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ParseError(Exception):
    """Raised with the list of diagnostics when a source cannot be parsed."""

    def __init__(self, diagnostics: List[ParseDiagnostic], source_name: str = "<input>"):
        self.diagnostics = diagnostics
        self.source_name = source_name
        super().__init__("; ".join(f"{source_name}:{d}" for d in diagnostics))


class _Fail(Exception):
    def __init__(self, message, pos):
        self.message = message
        self.pos = pos


class Parser:
    def __init__(self, src: str, literal_globals=frozenset(LITERAL_GLOBALS)):
        self.src = src
        self.lexer = Lexer(src)
        self.literal_globals = literal_globals
        self.bound = set()  # names declared or assigned anywhere
        self.depth = 0
        self.in_function = 0
        self.in_with = 0
        self.labels: list = []
        self.tok = self._lex()
        self.prev_end = 0

    # -- token helpers --------------------------------------------------------

    def _lex(self) -> Token:
        try:
            return self.lexer.next()
        except LexError as e:
            raise _Fail(e.message, e.pos) from None

    def advance(self) -> Token:
        t = self.tok
        self.prev_end = t.end
        self.tok = self._lex()
        return t

    def fail(self, message, tok: Optional[Token] = None):
        raise _Fail(message, (tok or self.tok).start)

    def at(self, value) -> bool:
        t = self.tok
        return t.kind in ("punct", "keyword") and t.value == value

    def at_ident(self, name=None) -> bool:
        return self.tok.kind == "ident" and (name is None or self.tok.value == name)

    def eat(self, value) -> bool:
        if self.at(value):
            self.advance()
            return True
        return False

    def expect(self, value) -> Token:
        if not self.at(value):
            self.unexpected()
        return self.advance()

    def unexpected(self, tok: Optional[Token] = None):
        t = tok or self.tok
        if t.kind == "eof":
            self.fail("unexpected end of input", t)
        if t.kind == "ident" and t.value in UNSUPPORTED_WORDS:
            self.fail(f"unsupported construct: {t.value}", t)
        if t.kind == "punct" and t.value == "=>":
            self.fail("unsupported construct: arrow function", t)
        if t.kind == "punct" and t.value == "...":
            self.fail("unsupported construct: spread", t)
        if t.kind == "punct" and t.value == "**":
            self.fail("unsupported construct: exponent operator", t)
        self.fail(f"unexpected token {t.raw or t.value!r}", t)

    def identifier(self) -> str:
        t = self.tok
        if t.kind != "ident":
            self.unexpected()
        if t.value in UNSUPPORTED_WORDS:
            self.fail(f"unsupported construct: {t.value}")
        self.advance()
        return t.value

    def binding_name(self) -> str:
        name = self.identifier()
        self.bound.add(name)
        return name

    def semicolon(self):
        if self.eat(";"):
            return
        if self.at("}") or self.tok.kind == "eof" or self.tok.nl_before:
            return
        self.unexpected()

    def enter(self):
        self.depth += 1
        if self.depth > MAX_NESTING:
            self.fail("nesting too deep")

    def leave(self):
        self.depth -= 1

    # -- program --------------------------------------------------------------

    def parse_script(self, name: str) -> N.Script:
        body = []
        while self.tok.kind != "eof":
            body.extend(self.statement())
        return N.Script(tuple(body), name)

    # -- statements -----------------------------------------------------------

    def statement(self) -> list:
        self.enter()
        try:
            return self._statement()
        finally:
            self.leave()

    def _statement(self) -> list:
        t = self.tok
        if t.kind == "punct":
            if t.value == "{":
                return [N.Block(self.block())]
            if t.value == ";":
                self.advance()
                return [N.Empty()]
        elif t.kind == "keyword":
            handler = getattr(self, "stmt_" + t.value, None)
            if handler is not None:
                return handler()
        elif t.kind == "ident":
            if t.value in UNSUPPORTED_WORDS:
                self.fail(f"unsupported construct: {t.value}")
            if t.value == "let":
                saved = (self.lexer.pos, self.tok)
                self.advance()
                if self.tok.kind == "ident" or self.at("[") or self.at("{"):
                    self.fail("unsupported construct: let", t)
                self.lexer.pos, self.tok = saved
        expr = self.expression()
        if isinstance(expr, N.VarRef) and self.at(":") and t.kind == "ident":
            self.advance()
            self.labels.append(expr.name)
            try:
                body = self.statement()
            finally:
                self.labels.pop()
            if len(body) == 1 and isinstance(body[0], N.Block):
                body = list(body[0].body)
            return [N.Labeled(expr.name, tuple(body))]
        self.semicolon()
        return [N.ExprStmt(expr)]

    def block(self) -> tuple:
        self.expect("{")
        body = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.unexpected()
            body.extend(self.statement())
        self.advance()
        return tuple(body)

    def sub_body(self) -> tuple:
        """Body of if/loop/with: a block's statements or a single statement."""
        stmts = self.statement()
        if len(stmts) == 1 and isinstance(stmts[0], N.Block):
            return stmts[0].body
        return tuple(stmts)

    def var_declarations(self, no_in=False) -> list:
        decls = []
        while True:
            name = self.binding_name()
            init = None
            if self.eat("="):
                init = self.assignment(no_in)
            decls.append(N.VarDecl(name, init))
            if not self.eat(","):
                return decls

    def stmt_var(self):
        self.advance()
        decls = self.var_declarations()
        self.semicolon()
        return decls

    def stmt_function(self):
        start = self.tok
        self.advance()
        if self.in_with:
            self.fail("unsupported construct: function inside with", start)
        name = self.binding_name()
        params, body = self.function_rest()
        return [N.FunDecl(name, params, body)]

    def function_rest(self):
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                params.append(self.binding_name())
                if self.at("="):
                    self.fail("unsupported construct: default parameter")
                if not self.eat(","):
                    break
        self.expect(")")
        saved_labels, self.labels = self.labels, []
        self.in_function += 1
        try:
            body = self.block()
        finally:
            self.in_function -= 1
            self.labels = saved_labels
        return tuple(params), body

    def stmt_if(self):
        self.advance()
        self.expect("(")
        test = self.expression()
        self.expect(")")
        then = self.sub_body()
        else_ = None
        if self.eat("else"):
            else_ = self.sub_body()
        return [N.If(test, then, else_)]

    def stmt_while(self):
        self.advance()
        self.expect("(")
        test = self.expression()
        self.expect(")")
        return [N.While(test, self.sub_body())]

    def stmt_do(self):
        self.advance()
        body = self.sub_body()
        self.expect("while")
        self.expect("(")
        test = self.expression()
        self.expect(")")
        self.eat(";")
        return [N.DoWhile(body, test)]

    def stmt_for(self):
        self.advance()
        if self.at_ident("each"):
            self.fail("unsupported construct: for each")
        self.expect("(")
        init = None
        if self.at("var"):
            self.advance()
            decls = self.var_declarations(no_in=True)
            if self.at("in") and len(decls) == 1:
                if decls[0].init is not None:
                    self.fail("unsupported construct: for-in initializer")
                self.advance()
                obj = self.expression()
                self.expect(")")
                return [N.ForIn(decls[0], obj, self.sub_body())]
            if self.at_ident("of"):
                self.fail("unsupported construct: for-of")
            init = tuple(decls)
        elif not self.at(";"):
            target_tok = self.tok
            init = self.expression(no_in=True)
            if self.at("in"):
                if not isinstance(init, (N.VarRef, N.Member)):
                    self.fail("invalid for-in target", target_tok)
                self.note_assigned(init)
                self.advance()
                obj = self.expression()
                self.expect(")")
                return [N.ForIn(init, obj, self.sub_body())]
            if self.at_ident("of"):
                self.fail("unsupported construct: for-of")
        self.expect(";")
        test = None if self.at(";") else self.expression()
        self.expect(";")
        update = None if self.at(")") else self.expression()
        self.expect(")")
        return [N.For(init, test, update, self.sub_body())]

    def stmt_continue(self):
        t = self.advance()
        label = None
        if self.tok.kind == "ident" and not self.tok.nl_before:
            label = self.identifier()
            if label not in self.labels:
                self.fail(f"undefined label {label!r}", t)
        self.semicolon()
        return [N.Continue(label)]

    def stmt_break(self):
        t = self.advance()
        label = None
        if self.tok.kind == "ident" and not self.tok.nl_before:
            label = self.identifier()
            if label not in self.labels:
                self.fail(f"undefined label {label!r}", t)
        self.semicolon()
        return [N.Break(label)]

    def stmt_return(self):
        t = self.advance()
        if not self.in_function:
            self.fail("return outside function", t)
        value = None
        if not (self.at(";") or self.at("}") or self.tok.kind == "eof" or self.tok.nl_before):
            value = self.expression()
        self.semicolon()
        return [N.Return(value)]

    def stmt_with(self):
        self.advance()
        self.expect("(")
        obj = self.expression()
        self.expect(")")
        self.in_with += 1
        try:
            body = self.sub_body()
        finally:
            self.in_with -= 1
        return [N.With(obj, body)]

    def stmt_switch(self):
        self.advance()
        self.expect("(")
        scrutinee = self.expression()
        self.expect(")")
        self.expect("{")
        cases = []
        seen_default = False
        while not self.eat("}"):
            if self.eat("case"):
                test = self.expression()
            elif self.at("default"):
                if seen_default:
                    self.fail("duplicate default clause")
                seen_default = True
                self.advance()
                test = None
            else:
                self.unexpected()
            self.expect(":")
            body = []
            while not (self.at("case") or self.at("default") or self.at("}")):
                if self.tok.kind == "eof":
                    self.unexpected()
                body.extend(self.statement())
            cases.append(N.Case(test, tuple(body)))
        return [N.Switch(scrutinee, tuple(cases))]

    def stmt_throw(self):
        t = self.advance()
        if self.tok.nl_before:
            self.fail("illegal newline after throw", t)
        expr = self.expression()
        self.semicolon()
        return [N.Throw(expr)]

    def stmt_try(self):
        self.advance()
        block = self.block()
        param = handler = finalizer = None
        if self.eat("catch"):
            self.expect("(")
            param = self.binding_name()
            self.expect(")")
            handler = self.block()
        if self.eat("finally"):
            finalizer = self.block()
        if handler is None and finalizer is None:
            self.fail("missing catch or finally after try")
        return [N.Try(block, param, handler, finalizer)]

    def stmt_debugger(self):
        self.advance()
        self.semicolon()
        return [N.Debugger()]

    # -- expressions ----------------------------------------------------------

    def expression(self, no_in=False) -> N.Expr:
        first = self.assignment(no_in)
        if not self.at(","):
            return first
        exprs = [first]
        while self.eat(","):
            exprs.append(self.assignment(no_in))
        return N.Sequence(tuple(exprs))

    def note_assigned(self, target):
        if isinstance(target, N.VarRef):
            self.bound.add(target.name)

    def assignment(self, no_in=False) -> N.Expr:
        self.enter()
        try:
            start = self.tok
            left = self.conditional(no_in)
            if self.tok.kind == "punct" and self.tok.value in ASSIGN_OPS:
                if not isinstance(left, (N.VarRef, N.Member)):
                    if isinstance(left, N.Lit) and start.kind == "ident":
                        self.fail(f"cannot assign to {start.value}", start)
                    self.fail("invalid assignment target", start)
                op = self.advance().value
                self.note_assigned(left)
                value = self.assignment(no_in)
                return N.Assign(left, op, value)
            if self.at("=>"):
                self.unexpected()
            return left
        finally:
            self.leave()

    def conditional(self, no_in) -> N.Expr:
        test = self.binary(0, no_in)
        if not self.eat("?"):
            return test
        then = self.assignment(False)
        self.expect(":")
        else_ = self.assignment(no_in)
        return N.Cond(test, then, else_)

    def _binary_op(self, no_in):
        t = self.tok
        if t.kind == "punct" and t.value in BINARY_PRECEDENCE:
            return t.value
        if t.kind == "keyword" and t.value in ("instanceof", "in"):
            if t.value == "in" and no_in:
                return None
            return t.value
        return None

    def binary(self, min_prec, no_in) -> N.Expr:
        left = self.unary()
        while True:
            op = self._binary_op(no_in)
            if op is None:
                return left
            prec = BINARY_PRECEDENCE[op]
            if prec <= min_prec:
                return left
            self.advance()
            self.enter()
            try:
                right = self.binary(prec, no_in)
            finally:
                self.leave()
            left = N.Infix(left, op, right)

    def unary(self) -> N.Expr:
        t = self.tok
        if (t.kind == "punct" or t.kind == "keyword") and t.value in UNARY_OPS:
            self.advance()
            self.enter()
            try:
                if t.value == "-" and (self.tok.kind == "num" or (
                        self.at_ident("Infinity") and "Infinity" in self.literal_globals)):
                    lexer_state = self.tok
                    operand = self.unary()
                    # `-<numeric literal>` is a negative literal (round-trips with the printer)
                    if (isinstance(operand, N.Lit) and self.prev_end == lexer_state.end
                            and isinstance(operand.value, float)):
                        return N.Lit(-operand.value)
                    return N.Prefix("-", operand)
                operand = self.unary()
            finally:
                self.leave()
            return N.Prefix(t.value, operand)
        if t.kind == "punct" and t.value in ("++", "--"):
            self.advance()
            target_tok = self.tok
            target = self.unary()
            if not isinstance(target, (N.VarRef, N.Member)):
                self.fail("invalid update target", target_tok)
            self.note_assigned(target)
            return N.Update(t.value, True, target)
        expr = self.postfix()
        return expr

    def postfix(self) -> N.Expr:
        start = self.tok
        expr = self.lhs()
        t = self.tok
        if t.kind == "punct" and t.value in ("++", "--") and not t.nl_before:
            if not isinstance(expr, (N.VarRef, N.Member)):
                self.fail("invalid update target", start)
            self.advance()
            self.note_assigned(expr)
            return N.Update(t.value, False, expr)
        return expr

    def lhs(self) -> N.Expr:
        if self.at("new"):
            expr = self.new_expression()
        else:
            expr = self.primary()
        return self.suffixes(expr, allow_call=True)

    def new_expression(self) -> N.Expr:
        self.advance()
        self.enter()
        try:
            if self.at("new"):
                callee = self.new_expression()
            else:
                callee = self.primary()
            callee = self.suffixes(callee, allow_call=False)
            args = self.arguments() if self.at("(") else ()
            return N.New(callee, args)
        finally:
            self.leave()

    def suffixes(self, expr, allow_call) -> N.Expr:
        while True:
            t = self.tok
            if t.kind != "punct":
                return expr
            if t.value == ".":
                self.advance()
                name_tok = self.tok
                if name_tok.kind not in ("ident", "keyword"):
                    self.unexpected()
                self.advance()
                expr = N.Member(expr, N.Lit(name_tok.value), False)
            elif t.value == "[":
                self.advance()
                prop = self.expression()
                self.expect("]")
                expr = N.Member(expr, prop, True)
            elif t.value == "(" and allow_call:
                expr = N.FunApp(expr, self.arguments())
            else:
                return expr

    def arguments(self) -> tuple:
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                if self.at("..."):
                    self.unexpected()
                args.append(self.assignment())
                if not self.eat(","):
                    break
        self.expect(")")
        return tuple(args)

    def primary(self) -> N.Expr:
        t = self.tok
        k = t.kind
        if k == "ident":
            if t.value in UNSUPPORTED_WORDS:
                self.fail(f"unsupported construct: {t.value}")
            self.advance()
            if self.at("=>"):
                self.unexpected()
            if t.value in self.literal_globals:
                return N.Lit(LITERAL_GLOBALS[t.value])
            return N.VarRef(t.value)
        if k == "num":
            self.advance()
            return N.Lit(t.value)
        if k == "str":
            self.advance()
            return N.Lit(t.value)
        if k == "keyword":
            v = t.value
            if v == "this":
                self.advance()
                return N.This()
            if v in ("true", "false"):
                self.advance()
                return N.Lit(v == "true")
            if v == "null":
                self.advance()
                return N.Lit(None)
            if v == "function":
                return self.function_expression()
        if k == "punct":
            v = t.value
            if v == "(":
                self.advance()
                self.enter()
                try:
                    if self.at(")"):
                        self.unexpected()
                    expr = self.expression()
                finally:
                    self.leave()
                self.expect(")")
                if self.at("=>"):
                    self.unexpected()
                return expr
            if v == "[":
                return self.array_literal()
            if v == "{":
                return self.object_literal()
            if v in ("/", "/="):
                try:
                    rt = self.lexer.rescan_regex(t)
                except LexError as e:
                    raise _Fail(e.message, e.pos) from None
                self.tok = rt
                self.advance()
                return N.RegExpLit(*rt.value)
        self.unexpected()

    def function_expression(self) -> N.FunExpr:
        start = self.advance()
        if self.in_with:
            self.fail("unsupported construct: function inside with", start)
        if self.at("*"):
            self.fail("unsupported construct: generator")
        name = None
        if self.tok.kind == "ident":
            name = self.binding_name()
        params, body = self.function_rest()
        return N.FunExpr(name, params, body)

    def array_literal(self) -> N.ArrayLit:
        self.expect("[")
        elements = []
        while not self.at("]"):
            if self.at(","):
                self.advance()
                elements.append(None)
                continue
            if self.at("..."):
                self.unexpected()
            elements.append(self.assignment())
            if not self.at("]"):
                self.expect(",")
        self.advance()
        return N.ArrayLit(tuple(elements))

    def object_literal(self) -> N.ObjectLit:
        self.expect("{")
        props = []
        while not self.at("}"):
            t = self.tok
            if t.kind in ("ident", "keyword"):
                key = N.Lit(t.value)
                self.advance()
                if t.kind == "ident" and t.value in ("get", "set") and not (self.at(":")):
                    if self.tok.kind in ("ident", "keyword", "str", "num"):
                        self.fail("unsupported construct: accessor property", t)
            elif t.kind == "str":
                key = N.Lit(t.value)
                self.advance()
            elif t.kind == "num":
                key = N.Lit(t.value)
                self.advance()
            elif t.kind == "punct" and t.value == "[":
                self.fail("unsupported construct: computed property")
            else:
                self.unexpected()
            if not self.at(":"):
                if self.at("(") or self.at(",") or self.at("}"):
                    self.fail("unsupported construct: shorthand property", t)
                self.unexpected()
            self.advance()
            props.append(N.Prop(key, self.assignment()))
            if not self.at("}"):
                self.expect(",")
        self.advance()
        return N.ObjectLit(tuple(props))


def _decode(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as e:
            prefix = bytes(source)[:e.start].decode("utf-8", "replace")
            line, col = line_col(prefix, len(prefix))
            raise ParseError([ParseDiagnostic("invalid UTF-8 sequence", line, col)]) from None
    if source.startswith("\ufeff"):
        source = source[1:]
    return source


def _run(src: str, name: str, literal_globals) -> "tuple":
    p = Parser(src, literal_globals)
    try:
        return p.parse_script(name), p.bound
    except _Fail as f:
        line, col = line_col(src, min(f.pos, len(src)))
        raise ParseError([ParseDiagnostic(f.message, line, col)], name) from None


@deep_recursion
def parse(source, name: str = "<input>") -> N.Script:
    """Parse JavaScript source into a Script; raises ParseError with diagnostics."""
    try:
        src = _decode(source)
    except ParseError as e:
        raise ParseError(e.diagnostics, name) from None
    literal_globals = frozenset(LITERAL_GLOBALS)
    script, bound = _run(src, name, literal_globals)
    rebound = literal_globals & bound
    if rebound:
        script, _ = _run(src, name, literal_globals - rebound)
    return script


def parse_expression(source: str) -> N.Expr:
    """Parse a single expression (test helper and REPL convenience)."""
    script = parse(f"({source});")
    (stmt,) = script.body
    return stmt.expr


__all__ = ["parse", "parse_expression", "ParseError", "ParseDiagnostic", "LINE_TERMINATORS"]
