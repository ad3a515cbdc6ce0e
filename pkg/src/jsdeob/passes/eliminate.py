"""Removal of redundant writes and declarations.

Three rules, applied on a fresh scope analysis each:

* writes to a variable that is never read are dropped (their right-hand
  side is kept when it has effects);
* a statement-level store that is overwritten later in the same statement
  list before any possible read is dropped;
* a `var` declaration whose name is no longer referenced is dropped.

Anything a direct `eval`, the `arguments` object, the global object, or a
host page could observe is left alone.
"""

from __future__ import annotations

from .. import nodes as N
from ..stack import deep_recursion
from .effects import is_pure
from .scope import ScopeInfo, analyze_scopes

# Globals a host environment reads or reacts to when assigned.
HOST_NAMES = frozenset([
    "location", "onload", "onunload", "onerror", "onbeforeunload", "onresize", "onclick",
    "document", "window", "name", "status", "defaultStatus", "navigator", "history", "screen",
    "opener", "event", "external", "frames", "self", "top", "parent", "globalThis",
    "WScript", "ActiveXObject", "exports", "module",
])
# References through which script code can read globals as properties.
GLOBAL_OBJECT_NAMES = frozenset(["window", "self", "globalThis", "top", "parent", "frames"])

_TRIVIAL = (N.Empty, N.FunDecl)


class _Eliminator:
    def __init__(self, info: ScopeInfo):
        self.info = info
        self.changed = False
        self.global_aliasing = self._global_object_visible()

    def _global_object_visible(self) -> bool:
        if any(n in self.info.global_scope.bindings for n in GLOBAL_OBJECT_NAMES):
            return True
        # top-level `this` is the global object
        stack = list(self.info.script.body)
        while stack:
            n = stack.pop()
            if isinstance(n, N.This):
                return True
            if not isinstance(n, N.FUNCTION_NODES):
                stack.extend(N.children(n))
        return False

    def binding(self, ref):
        return self.info.binding_of.get(id(ref))

    def protected(self, b) -> bool:
        if b is None or b.kind not in ("var", "param", "catch", "global"):
            return True
        home = b.scope.home()
        if home.dynamic:
            return True
        if b.kind == "param" and home.uses_arguments:
            return True
        if self.info.eval_visible(b):
            return True
        return b.kind == "global" and (b.name in HOST_NAMES or self.global_aliasing)

    def unread(self, b) -> bool:
        return not self.protected(b) and b.real_reads == 0

    # -- overwritten stores ---------------------------------------------------

    def overwritten(self, b, rest, in_try) -> bool:
        """True when ``rest`` plainly overwrites ``b`` before anything can read it."""
        if self.protected(b) or b.captured_read or b.kind == "global":
            return False
        for t in rest:
            if isinstance(t, N.ExprStmt) and isinstance(t.expr, N.Assign) \
                    and t.expr.op == "=" and isinstance(t.expr.target, N.VarRef) \
                    and self.binding(t.expr.target) is b:
                return not self.mentions(t.expr.value, b)
            if self.mentions(t, b) or _jumps(t):
                return False
            if in_try and not isinstance(t, _TRIVIAL) and not (isinstance(t, N.VarDecl)
                                                               and t.init is None):
                return False
        return False

    def mentions(self, node, b) -> bool:
        for n in N.walk(node):
            if isinstance(n, N.VarRef) and self.binding(n) is b:
                return True
            if isinstance(n, N.VarDecl) and self.info.decl_binding.get(id(n)) is b:
                return True
        return False

    # -- rewriting ------------------------------------------------------------

    def body(self, stmts, in_try=False) -> tuple:
        out = []
        for i, s in enumerate(stmts):
            out.extend(self.stmt(s, stmts[i + 1:], in_try))
        if len(out) == len(stmts) and all(a is b for a, b in zip(out, stmts)):
            return stmts
        return tuple(out)

    def drop_store(self, value):
        self.changed = True
        value = self.expr(value)
        return [] if is_pure(value) else [N.ExprStmt(value)]

    def stmt(self, s, rest, in_try):
        t = type(s)
        if t is N.ExprStmt:
            e = s.expr
            if isinstance(e, N.Assign) and isinstance(e.target, N.VarRef):
                b = self.binding(e.target)
                if b is not None and (self.unread(b) or self.overwritten(b, rest, in_try)):
                    return self.drop_store(e.value)
            elif isinstance(e, N.Update) and isinstance(e.target, N.VarRef):
                if self.unread(self.binding(e.target)):
                    self.changed = True
                    return []
            return [_rebuild(s, expr=self.expr(e))]
        if t is N.VarDecl:
            b = self.info.decl_binding.get(id(s))
            if s.init is not None:
                if b is not None and self.unread(b):
                    return [N.VarDecl(s.name, None, s.original_name)] + self.drop_store(s.init)
                return [_rebuild(s, init=self.expr(s.init))]
            if b is not None and b.kind == "var" and not b.refs and not self.protected(b):
                self.changed = True
                return []
            return [s]
        if t is N.FunDecl:
            return [_rebuild(s, body=self.body(s.body))]
        if t is N.For:
            init = s.init
            if isinstance(init, N.Expr):
                init = self.expr(init)
                if is_pure(init) and init is not s.init:
                    init = None
            update = s.update
            if isinstance(update, (N.Assign, N.Update)) and isinstance(update.target, N.VarRef) \
                    and self.unread(self.binding(update.target)):
                self.changed = True
                update = None if isinstance(update, N.Update) else self.expr(update.value)
                if update is not None and is_pure(update):
                    update = None
            elif update is not None:
                update = self.expr(update)
            test = None if s.test is None else self.expr(s.test)
            return [_rebuild(s, init=init, test=test, update=update,
                             body=self.body(s.body, in_try))]
        if t is N.Try:
            block = self.body(s.block, True)
            handler = None if s.handler is None else self.body(s.handler, s.finalizer is not None
                                                              or in_try)
            finalizer = None if s.finalizer is None else self.body(s.finalizer, in_try)
            return [_rebuild(s, block=block, handler=handler, finalizer=finalizer)]
        updates = {}
        for name in N._child_fields(t):
            v = getattr(s, name)
            if isinstance(v, tuple) and v and isinstance(v[0], N.Case):
                nv = tuple(_rebuild(c, test=None if c.test is None else self.expr(c.test),
                                    body=self.body(c.body, in_try)) for c in v)
                if all(a is b for a, b in zip(nv, v)):
                    nv = v
            elif isinstance(v, tuple):
                nv = self.body(v, in_try)
            elif isinstance(v, N.Expr):
                nv = self.expr(v)
            else:
                nv = v
            updates[name] = nv
        return [_rebuild(s, **updates)]

    def expr(self, e):
        if isinstance(e, N.FunExpr):
            return _rebuild(e, body=self.body(e.body))
        if isinstance(e, N.Assign) and e.op == "=" and isinstance(e.target, N.VarRef) \
                and self.unread(self.binding(e.target)):
            self.changed = True
            return self.expr(e.value)
        if isinstance(e, N.Prop):
            return _rebuild(e, value=self.expr(e.value))
        return N.map_children(e, lambda c, f: self.expr(c))


def _rebuild(node, **fields):
    if all(getattr(node, k) is v for k, v in fields.items()):
        return node
    from dataclasses import replace
    return replace(node, **fields)


def _jumps(node) -> bool:
    """Break, continue or a label within ``node`` (nested functions excluded)."""
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, (N.Break, N.Continue, N.Labeled)):
            return True
        if not isinstance(n, N.FUNCTION_NODES):
            stack.extend(N.children(n))
    return False


@deep_recursion
def eliminate_redundant(script: N.Script) -> N.PassOutcome:
    changed = False
    for _ in range(2):  # drop writes, then the declarations they leave unreferenced
        e = _Eliminator(analyze_scopes(script))
        body = e.body(script.body)
        if not e.changed:
            break
        changed = True
        script = N.Script(body, script.source_name)
    return N.PassOutcome(script, changed)
