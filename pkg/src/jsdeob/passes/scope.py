"""Lexical scope analysis: bindings, references and the facts passes rely on.

Scopes are the script, every function, and every `catch` clause (which binds
only its parameter).  Identifiers that resolve nowhere become bindings of a
pseudo-scope for implicit globals.  All lookup tables are keyed by node
identity, so an analysis is only valid for the exact tree it was built from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .. import jsvalues as jsv
from .. import nodes as N
from ..stack import deep_recursion

# Globals through which a string can be compiled and run as code.
EVAL_FAMILY = frozenset(["eval", "Function", "setTimeout", "setInterval", "execScript"])

READ, CALL, WRITE, READWRITE, DELETE = "read", "call", "write", "readwrite", "delete"

# When one name is declared several ways in a scope, the strongest kind wins.
_PRIORITY = {"fname": 0, "var": 1, "param": 2, "function": 3}


@dataclass(eq=False)
class Ref:
    node: N.VarRef
    mode: str
    scope: "Scope"
    stmt_level: bool = False  # statement-level `x op= e` / `x++`: the self-read is unused

    @property
    def is_real_read(self) -> bool:
        if self.mode in (READ, CALL):
            return True
        return self.mode == READWRITE and not self.stmt_level

    @property
    def is_write(self) -> bool:
        return self.mode in (WRITE, READWRITE, DELETE)


@dataclass(eq=False)
class Binding:
    name: str
    kind: str  # var, function, param, catch, fname, arguments, global
    scope: "Scope"
    decls: list = field(default_factory=list)
    refs: list = field(default_factory=list)

    def __repr__(self):
        return f"Binding({self.name!r}, {self.kind}, {self.scope.kind})"

    @property
    def real_reads(self) -> int:
        return sum(1 for r in self.refs if r.is_real_read)

    @property
    def writes(self) -> list:
        return [r for r in self.refs if r.is_write]

    def _foreign(self, r) -> bool:
        return r.scope.home() is not self.scope.home()

    @property
    def captured_read(self) -> bool:
        return any(self._foreign(r) and (r.is_real_read or r.mode == READWRITE) for r in self.refs)

    @property
    def captured_write(self) -> bool:
        return any(self._foreign(r) and r.is_write for r in self.refs)

    @property
    def is_script_level(self) -> bool:
        return self.scope.kind in ("script", "global")


@dataclass(eq=False)
class Scope:
    kind: str  # script, function, catch, global
    node: object
    parent: Optional["Scope"]
    bindings: dict = field(default_factory=dict)
    children: list = field(default_factory=list)
    dynamic: bool = False  # a direct eval can see this scope
    uses_arguments: bool = False

    def __repr__(self):
        return f"Scope({self.kind}, {sorted(self.bindings)})"

    def home(self) -> "Scope":
        s = self
        while s.kind == "catch":
            s = s.parent
        return s

    def declare(self, name, kind, decl=None) -> Binding:
        b = self.bindings.get(name)
        if b is None:
            b = self.bindings[name] = Binding(name, kind, self)
        elif _PRIORITY.get(kind, -1) > _PRIORITY.get(b.kind, 99):
            b.kind = kind
        if decl is not None:
            b.decls.append(decl)
        return b

    def lookup(self, name) -> Binding:
        s = self
        while True:
            b = s.bindings.get(name)
            if b is not None:
                return b
            if name == "arguments" and s.kind == "function":
                s.uses_arguments = True
                return s.declare("arguments", "arguments")
            if s.parent is None:
                return s.declare(name, "global")
            s = s.parent


@dataclass(eq=False)
class ScopeInfo:
    script: N.Script
    global_scope: Scope
    script_scope: Scope
    scopes: list  # pre-order, script first
    binding_of: dict  # id(VarRef) -> Binding
    scope_of: dict  # id(function node | Try node) -> Scope
    decl_binding: dict  # id(VarDecl | FunDecl) -> Binding
    eval_exposed: bool  # code unknown until run time may touch any global
    eval_names: frozenset = frozenset()  # names mentioned by code strings known statically

    def eval_visible(self, b: Binding) -> bool:
        """True when code compiled at run time could read or write ``b``."""
        return (self.eval_exposed and b.is_script_level) or b.name in self.eval_names

    def binding(self, ref: N.VarRef) -> Binding:
        return self.binding_of[id(ref)]

    def free_names(self) -> set:
        return set(self.global_scope.bindings)

    def all_names(self) -> set:
        out = set()
        for s in [self.global_scope] + self.scopes:
            out.update(s.bindings)
        return out

    def bound_anywhere(self, name: str) -> bool:
        """True when some scope of the script declares ``name`` (shadowing the global)."""
        return any(name in s.bindings for s in self.scopes)


def _declare_region(scope: Scope, body, decl_binding):
    """Declare the var/function names of one function region (nested functions excluded)."""
    stack = list(reversed(body))
    while stack:
        n = stack.pop()
        if isinstance(n, N.FunDecl):
            decl_binding[id(n)] = scope.declare(n.name, "function", n)
            continue
        if isinstance(n, N.FunExpr):
            continue
        if isinstance(n, N.VarDecl):
            decl_binding[id(n)] = scope.declare(n.name, "var", n)
        stack.extend(reversed(list(N.children(n))))


class _Analyzer:
    def __init__(self, script):
        self.global_scope = Scope("global", None, None)
        self.scopes: list = []
        self.binding_of: dict = {}
        self.scope_of: dict = {}
        self.decl_binding: dict = {}
        self.calls: dict = {}  # id(callee VarRef) -> call node
        self.alias_of: dict = {}  # id(VarRef on the right of `x = name`) -> target VarRef
        self.direct_evals: list = []

    def new_scope(self, kind, node, parent) -> Scope:
        s = Scope(kind, node, parent)
        if parent is not None:
            parent.children.append(s)
        self.scopes.append(s)
        if node is not None:
            self.scope_of[id(node)] = s
        return s

    def function(self, fn, parent):
        s = self.new_scope("function", fn, parent)
        if isinstance(fn, N.FunExpr) and fn.name:
            s.declare(fn.name, "fname")
        for p in fn.params:
            s.declare(p, "param", p)
        _declare_region(s, fn.body, self.decl_binding)
        self.stmts(fn.body, s)

    def ref(self, node, mode, scope, stmt_level=False):
        b = scope.lookup(node.name)
        self.binding_of[id(node)] = b
        b.refs.append(Ref(node, mode, scope, stmt_level))
        return b

    # -- statements -----------------------------------------------------------

    def stmts(self, body, scope):
        for s in body:
            self.stmt(s, scope)

    def stmt(self, s, scope):
        t = type(s)
        if t is N.FunDecl:
            self.function(s, scope)
        elif t is N.ExprStmt:
            e = s.expr
            if isinstance(e, N.Assign) and e.op != "=" and isinstance(e.target, N.VarRef):
                self.expr(e.value, scope)
                self.ref(e.target, READWRITE, scope, stmt_level=True)
            elif isinstance(e, N.Update) and isinstance(e.target, N.VarRef):
                self.ref(e.target, READWRITE, scope, stmt_level=True)
            else:
                self.expr(e, scope)
        elif t is N.VarDecl:
            if s.init is not None:
                self.expr(s.init, scope)
                b = scope.lookup(s.name)
                b.refs.append(Ref(N.VarRef(s.name), WRITE, scope))
        elif t is N.Try:
            self.stmts(s.block, scope)
            if s.handler is not None:
                cs = self.new_scope("catch", s, scope)
                if s.param:
                    cs.declare(s.param, "catch", s.param)
                self.stmts(s.handler, cs)
            if s.finalizer is not None:
                self.stmts(s.finalizer, scope)
        elif t is N.ForIn:
            if isinstance(s.left, N.VarRef):
                self.ref(s.left, WRITE, scope)
            elif isinstance(s.left, N.VarDecl):
                b = scope.lookup(s.left.name)
                b.refs.append(Ref(N.VarRef(s.left.name), WRITE, scope))
            else:
                self.expr(s.left, scope)
            self.expr(s.obj, scope)
            self.stmts(s.body, scope)
        elif t is N.For:
            if isinstance(s.init, tuple):
                for d in s.init:
                    self.stmt(d, scope)
            elif s.init is not None:
                self.expr(s.init, scope)
            if s.test is not None:
                self.expr(s.test, scope)
            u = s.update
            if isinstance(u, N.Update) and isinstance(u.target, N.VarRef):
                self.ref(u.target, READWRITE, scope, stmt_level=True)
            elif isinstance(u, N.Assign) and u.op != "=" and isinstance(u.target, N.VarRef):
                self.expr(u.value, scope)
                self.ref(u.target, READWRITE, scope, stmt_level=True)
            elif u is not None:
                self.expr(u, scope)
            self.stmts(s.body, scope)
        elif t is N.Switch:
            self.expr(s.scrutinee, scope)
            for c in s.cases:
                if c.test is not None:
                    self.expr(c.test, scope)
                self.stmts(c.body, scope)
        else:
            for name in N._child_fields(t):
                v = getattr(s, name)
                if isinstance(v, tuple):
                    self.stmts(v, scope)
                elif isinstance(v, N.Expr):
                    self.expr(v, scope)

    # -- expressions ----------------------------------------------------------

    def expr(self, e, scope):
        t = type(e)
        if t is N.VarRef:
            self.ref(e, READ, scope)
        elif t is N.Lit or t is N.This or t is N.RegExpLit:
            return
        elif t is N.Assign:
            if isinstance(e.target, N.VarRef):
                if e.op == "=" and isinstance(e.value, N.VarRef):
                    self.alias_of[id(e.value)] = e.target
                self.expr(e.value, scope)
                self.ref(e.target, WRITE if e.op == "=" else READWRITE, scope)
            else:
                self.expr(e.target, scope)
                self.expr(e.value, scope)
        elif t is N.Update:
            if isinstance(e.target, N.VarRef):
                self.ref(e.target, READWRITE, scope)
            else:
                self.expr(e.target, scope)
        elif t is N.FunApp:
            callee = e.callee
            if isinstance(callee, N.VarRef):
                b = self.ref(callee, CALL, scope)
                self.calls[id(callee)] = e
                if b.kind == "global" and callee.name == "eval":
                    self.direct_evals.append((scope, e))
            else:
                self.expr(callee, scope)
            for a in e.args:
                self.expr(a, scope)
        elif t is N.Prefix and e.op == "delete" and isinstance(e.operand, N.VarRef):
            self.ref(e.operand, DELETE, scope)
        elif t is N.FunExpr:
            self.function(e, scope)
        elif t is N.New and isinstance(e.callee, N.VarRef):
            self.ref(e.callee, READ, scope)
            self.calls[id(e.callee)] = e
            for a in e.args:
                self.expr(a, scope)
        else:
            for c in N.children(e):
                if isinstance(c, N.Prop):
                    self.expr(c.value, scope)
                else:
                    self.expr(c, scope)


def _code_names(name: str, call):
    """Names that the code compiled by ``name(args)`` may touch, or None if unknowable.

    Returns an empty set when the call compiles no code at all (a non-string
    argument to `eval`, a function passed to `setTimeout`, a syntax error).
    """
    args = call.args
    if name == "Function":
        if not all(isinstance(a, N.Lit) for a in args):
            return None
        parts = [jsv.to_string(a.value) for a in args]
        code = "(function(" + ",".join(parts[:-1]) + "){\n" + (parts[-1] if parts else "") + "\n})"
    else:
        if not args:
            return set()
        first = args[0]
        if name in ("setTimeout", "setInterval") and isinstance(first, N.FunExpr):
            return set()
        if not isinstance(first, N.Lit):
            return None
        if not isinstance(first.value, str):
            return set() if name == "eval" else None
        code = first.value
    from ..frontend import ParseError, parse
    try:
        inner = parse(code, "<eval>")
    except ParseError as err:
        if any(d.message.startswith("unsupported") for d in err.diagnostics):
            return None  # valid in newer engines; contents unknown to us
        return set()  # the engine throws SyntaxError before running anything
    sub = analyze_scopes(inner)
    if sub.eval_exposed:
        return None
    names = set(sub.eval_names)
    for n in N.walk_body(inner.body):
        if isinstance(n, N.This):
            return None  # the global object, with all its properties
        if isinstance(n, N.VarRef):
            names.add(n.name)
        elif isinstance(n, (N.VarDecl, N.FunDecl)):
            names.add(n.name)
    if names & _GLOBAL_OBJECT_NAMES:
        return None
    return names


_GLOBAL_OBJECT_NAMES = frozenset(["window", "self", "globalThis", "top", "parent", "frames"])


def _never_read(a: "_Analyzer", b: Binding, seen: set) -> bool:
    """True when every read of ``b`` only copies it into other never-read variables."""
    if b in seen:
        return True
    seen.add(b)
    for r in b.refs:
        if not r.is_real_read:
            continue
        target = a.alias_of.get(id(r.node))
        if target is None or not _never_read(a, a.binding_of[id(target)], seen):
            return False
    return True


def _exposure(a: "_Analyzer", global_scope: Scope):
    """Decide whether run-time code can reach arbitrary globals, and which names it mentions."""
    exposed = False
    names: set = set()
    unknown_calls = set()
    for name in EVAL_FAMILY:
        b = global_scope.bindings.get(name)
        if b is None or b.kind != "global":
            continue
        for r in b.refs:
            call = a.calls.get(id(r.node))
            if call is not None:
                found = _code_names(name, call)
                if found is None:
                    exposed = True
                    unknown_calls.add(id(call))
                else:
                    names |= found
                continue
            target = a.alias_of.get(id(r.node))
            if target is not None and _never_read(a, a.binding_of[id(target)], set()):
                continue  # stored into variables nobody reads: never invoked
            exposed = True
    for scope, call in a.direct_evals:
        if id(call) in unknown_calls:
            s = scope
            while s is not None:
                s.dynamic = True
                s = s.parent
    return exposed, frozenset(names)


@deep_recursion
def analyze_scopes(script: N.Script) -> ScopeInfo:
    a = _Analyzer(script)
    top = a.new_scope("script", None, a.global_scope)
    _declare_region(top, script.body, a.decl_binding)
    a.stmts(script.body, top)
    exposed, names = _exposure(a, a.global_scope)
    return ScopeInfo(script, a.global_scope, top, a.scopes, a.binding_of, a.scope_of,
                     a.decl_binding, exposed, names)
