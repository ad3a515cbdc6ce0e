"""Eliminate `with` statements by an explicit `in`-guarded desugaring.

    with (o) { x = 1; }

becomes

    var __with_0;
    __with_0 = o;
    ('x' in __with_0) ? (__with_0.x = 1) : (x = 1);

Only names that no enclosing scope declares are guarded.  Nested `with`
statements are rewritten innermost first, so an outer guard wraps the
fallback branch of an inner one.
"""

from __future__ import annotations

from dataclasses import fields, replace

from .. import nodes as N
from ..stack import deep_recursion
from .hoist import BODY_FIELDS

TEMP_PREFIX = "__with_"


def _scope_names(params, body, fname=None, is_function=False) -> set:
    names = set(params)
    if fname:
        names.add(fname)
    if is_function:
        names.add("arguments")
    for s in body:
        if isinstance(s, (N.VarDecl, N.FunDecl)):
            names.add(s.name)
    # hoisted form keeps declarations at the head, but stay robust to stragglers
    for n in N.walk_body(body):
        if isinstance(n, N.FUNCTION_NODES):
            continue
        if isinstance(n, N.VarDecl):
            names.add(n.name)
    return names


def _all_names(script) -> set:
    out = set()
    for n in N.walk_body(script.body):
        name = getattr(n, "name", None)
        if isinstance(name, str):
            out.add(name)
        if isinstance(n, N.FUNCTION_NODES):
            out.update(n.params)
        if isinstance(n, N.Try) and n.param:
            out.add(n.param)
    return out


class _Rewriter:
    def __init__(self, script):
        used = _all_names(script)
        self.temps: dict = {}  # id(With) -> temp name, pre-order
        k = 0
        for n in N.walk_body(script.body):
            if isinstance(n, N.With):
                while TEMP_PREFIX + str(k) in used:
                    k += 1
                self.temps[id(n)] = TEMP_PREFIX + str(k)
                k += 1

    # -- scopes ---------------------------------------------------------------

    def scope(self, body, declared: frozenset) -> tuple:
        """Rewrite one function/script body; returns the new body."""
        new_temps: list = []
        out = self.stmts(body, declared, new_temps)
        if not new_temps:
            return tuple(out)
        head = 0
        while head < len(out) and isinstance(out[head], (N.FunDecl, N.VarDecl)):
            head += 1
        decls = [N.VarDecl(t) for t in new_temps]
        return tuple(out[:head]) + tuple(decls) + tuple(out[head:])

    def function(self, fn, declared):
        inner = declared | _scope_names(fn.params, fn.body, getattr(fn, "name", None), True)
        return replace(fn, body=self.scope(fn.body, frozenset(inner)))

    # -- statements -----------------------------------------------------------

    def stmts(self, body, declared, temps) -> list:
        out = []
        for s in body:
            out.extend(self.stmt(s, declared, temps))
        return out

    def stmt(self, s, declared, temps) -> list:
        if isinstance(s, N.FunDecl):
            return [self.function(s, declared)]
        updates = {}
        for f in fields(s):
            v = getattr(s, f.name)
            if f.name == "handler" and v is not None:
                inner = declared | {s.param} if s.param else declared
                updates[f.name] = tuple(self.stmts(v, frozenset(inner), temps))
            elif f.name in BODY_FIELDS and isinstance(v, tuple):
                updates[f.name] = tuple(self.stmts(v, declared, temps))
            elif f.name == "cases":
                updates[f.name] = tuple(
                    N.Case(None if c.test is None else self.expr(c.test, declared),
                           tuple(self.stmts(c.body, declared, temps)))
                    for c in v)
            elif isinstance(v, N.Expr):
                updates[f.name] = self.expr(v, declared)
        orig = s
        if updates:
            s = replace(s, **updates)
        if not isinstance(s, N.With):
            return [s]
        temp = self.temps[id(orig)]
        temps.append(temp)
        guard = _Guard(temp, declared | {temp})
        body = [guard.stmt(b) for b in s.body]
        return [N.ExprStmt(N.Assign(N.VarRef(temp), "=", s.obj))] + body

    def expr(self, e, declared):
        if isinstance(e, N.FunExpr):
            return self.function(e, declared)
        return N.map_children(e, lambda c, _f: self.expr(c, declared))


class _Guard:
    """Rewrite free identifiers of one (already with-free) body against ``temp``."""

    def __init__(self, temp, declared):
        self.w = N.VarRef(temp)
        self.declared = declared

    def free(self, node) -> bool:
        return isinstance(node, N.VarRef) and node.name not in self.declared

    def test(self, name):
        return N.Infix(N.Lit(name), "in", self.w)

    def member(self, name):
        return N.Member(self.w, N.Lit(name), False)

    def split(self, name, build):
        return N.Cond(self.test(name), build(self.member(name)), build(N.VarRef(name)))

    def stmt(self, s):
        if isinstance(s, N.Try) and s.param:
            inner = _Guard(self.w.name, self.declared | {s.param})
            return replace(s, block=tuple(self.stmt(x) for x in s.block),
                           handler=tuple(inner.stmt(x) for x in s.handler),
                           finalizer=None if s.finalizer is None
                           else tuple(self.stmt(x) for x in s.finalizer))
        if isinstance(s, N.ForIn) and isinstance(s.left, N.VarRef):
            # the loop target stays as written; only the object and body are guarded
            return replace(s, obj=self.expr(s.obj), body=tuple(self.stmt(x) for x in s.body))
        updates = {}
        for f in fields(s):
            v = getattr(s, f.name)
            if f.name in BODY_FIELDS and isinstance(v, tuple):
                updates[f.name] = tuple(self.stmt(x) for x in v)
            elif f.name == "cases":
                updates[f.name] = tuple(
                    N.Case(None if c.test is None else self.expr(c.test),
                           tuple(self.stmt(x) for x in c.body)) for c in v)
            elif isinstance(v, N.Expr):
                updates[f.name] = self.expr(v)
        return replace(s, **updates) if updates else s

    def expr(self, e):
        if self.free(e):
            return self.split(e.name, lambda t: t)
        if isinstance(e, N.Assign) and self.free(e.target):
            value = self.expr(e.value)
            return self.split(e.target.name, lambda t: N.Assign(t, e.op, value))
        if isinstance(e, N.Update) and self.free(e.target):
            return self.split(e.target.name, lambda t: N.Update(e.op, e.prefix, t))
        if isinstance(e, N.FunApp) and self.free(e.callee):
            args = tuple(self.expr(a) for a in e.args)
            return self.split(e.callee.name, lambda t: N.FunApp(t, args))
        if isinstance(e, N.Prefix) and e.op in ("typeof", "delete") and self.free(e.operand):
            return self.split(e.operand.name, lambda t: N.Prefix(e.op, t))
        if isinstance(e, N.Member) and not e.computed:
            return replace(e, obj=self.expr(e.obj))
        return N.map_children(e, lambda c, _f: self.expr(c))


@deep_recursion
def rewrite_with(script: N.Script) -> N.Script:
    """Return ``script`` with every `with` statement desugared away."""
    if not any(isinstance(n, N.With) for n in N.walk_body(script.body)):
        return script
    rw = _Rewriter(script)
    declared = frozenset(_scope_names((), script.body))
    return N.Script(rw.scope(script.body, declared), script.source_name)
