"""Removal of branches whose condition is a known literal."""

from __future__ import annotations

from dataclasses import replace

from .. import jsvalues as J
from .. import nodes as N
from ..stack import deep_recursion
from .effects import is_pure


def _declarations(stmts) -> list:
    """`var` names and function declarations inside discarded code, kept for hoisting."""
    out = []
    stack = list(reversed(stmts))
    while stack:
        n = stack.pop()
        if isinstance(n, N.FunDecl):
            out.append(n)
            continue
        if isinstance(n, N.FunExpr):
            continue
        if isinstance(n, N.VarDecl):
            out.append(N.VarDecl(n.name, None, n.original_name))
        elif isinstance(n, N.Stmt) or isinstance(n, N.Case):
            stack.extend(reversed([c for c in N.children(n) if isinstance(c, (N.Stmt, N.Case))]))
    return out


def _breaks_out(stmts) -> bool:
    """True when ``stmts`` hold a `break`/`continue` that could leave the enclosing construct."""
    stack = [(s, False) for s in stmts]
    while stack:
        n, in_loop = stack.pop()
        if isinstance(n, N.FUNCTION_NODES):
            continue
        if isinstance(n, N.Break) and (n.label is not None or not in_loop):
            return True
        if isinstance(n, N.Continue) and (n.label is not None or not in_loop):
            return True
        inner = in_loop or isinstance(n, N.LOOP_NODES) or isinstance(n, N.Switch)
        for c in N.children(n):
            stack.append((c, inner))
    return False


class _Pruner:
    def __init__(self):
        self.changed = False

    def body(self, stmts) -> tuple:
        out = []
        dirty = False
        for s in stmts:
            r = self.stmt(s)
            if len(r) != 1 or r[0] is not s:
                dirty = True
            out.extend(r)
        return tuple(out) if dirty else stmts

    def stmt(self, s) -> list:
        t = type(s)
        if t is N.If:
            if isinstance(s.test, N.Lit):
                self.changed = True
                keep, drop = (s.then, s.else_) if J.to_boolean(s.test.value) else (s.else_, s.then)
                return _declarations(drop or ()) + list(self.body(keep or ()))
            then = self.body(s.then)
            else_ = None if s.else_ is None else self.body(s.else_)
            if else_ == ():
                else_ = None
            return [_rebuild(s, test=self.expr(s.test), then=then, else_=else_)]
        if t is N.Block:
            self.changed = True
            return list(self.body(s.body))
        if t is N.ExprStmt and isinstance(s.expr, N.Lit) and not isinstance(s.expr.value, str):
            self.changed = True
            return []
        if t is N.Switch:
            r = self.switch(s)
            if r is not None:
                self.changed = True
                return r
        if t in (N.While, N.For) and isinstance(s.test, N.Lit) and not J.to_boolean(s.test.value):
            self.changed = True
            out = []
            if t is N.For and isinstance(s.init, N.Expr) and not is_pure(s.init):
                out.append(N.ExprStmt(self.expr(s.init)))
            elif t is N.For and isinstance(s.init, tuple):
                out.extend(s.init)
            return _declarations(s.body) + out
        if t is N.DoWhile and isinstance(s.test, N.Lit) and not J.to_boolean(s.test.value) \
                and not _breaks_out(s.body):
            self.changed = True
            return list(self.body(s.body))
        return [self.generic(s)]

    def generic(self, s):
        updates = {}
        for name in N._child_fields(type(s)):
            v = getattr(s, name)
            if isinstance(v, tuple) and v and isinstance(v[0], N.Case):
                nv = tuple(_rebuild(c, test=None if c.test is None else self.expr(c.test),
                                    body=self.body(c.body)) for c in v)
                if all(a is b for a, b in zip(nv, v)):
                    nv = v
            elif isinstance(v, tuple) and (not v or isinstance(v[0], N.Stmt)):
                nv = self.body(v)
            elif isinstance(v, N.Expr):
                nv = self.expr(v)
            else:
                nv = v
            updates[name] = nv
        return _rebuild(s, **updates)

    def switch(self, s):
        """Statements a switch on a literal executes, or None when it cannot be decided."""
        if not isinstance(s.scrutinee, N.Lit):
            return None
        if not all(c.test is None or isinstance(c.test, N.Lit) for c in s.cases):
            return None
        start = None
        for i, c in enumerate(s.cases):
            if c.test is not None and J.strict_equals(s.scrutinee.value, c.test.value):
                start = i
                break
        if start is None:
            start = next((i for i, c in enumerate(s.cases) if c.test is None), None)
        taken = []
        if start is not None:
            done = False
            for c in s.cases[start:]:
                for st in c.body:
                    if isinstance(st, N.Break) and st.label is None:
                        done = True
                        break
                    taken.append(st)
                if done:
                    break
        if _unlabelled_break(taken):
            return None  # a nested break leaves the switch part-way
        kept = {id(x) for x in taken}
        dropped = [st for c in s.cases for st in c.body if id(st) not in kept]
        return _declarations(dropped) + list(self.body(tuple(taken)))

    def expr(self, e, slot=None):
        if isinstance(e, N.FunExpr):
            return _rebuild(e, body=self.body(e.body))
        if isinstance(e, N.Prop):
            return _rebuild(e, value=self.expr(e.value))
        is_call = isinstance(e, (N.FunApp, N.New))
        protect = isinstance(e, N.Prefix) and e.op == "delete"
        e = N.map_children(e, lambda c, f: self.expr(
            c, "delete" if protect else ("callee" if is_call and f == "callee" else None)))
        if isinstance(e, N.Cond) and isinstance(e.test, N.Lit):
            out = e.then if J.to_boolean(e.test.value) else e.else_
            if slot == "delete" or (slot == "callee" and (isinstance(out, N.Member)
                                                          or out == N.VarRef("eval"))):
                return e  # would change the `this` value, direct-eval status or delete target
            self.changed = True
            return out
        return e


def _unlabelled_break(stmts) -> bool:
    """An unlabelled `break` not nested in an inner loop or switch."""
    stack = [(s, False) for s in stmts]
    while stack:
        n, inner = stack.pop()
        if isinstance(n, N.FUNCTION_NODES):
            continue
        if isinstance(n, N.Break) and n.label is None and not inner:
            return True
        nested = inner or isinstance(n, N.LOOP_NODES) or isinstance(n, N.Switch)
        stack.extend((c, nested) for c in N.children(n))
    return False


def _rebuild(node, **fields):
    if all(getattr(node, k) is v for k, v in fields.items()):
        return node
    return replace(node, **fields)


@deep_recursion
def run_dead_branch(script: N.Script, *, limit: int = N.DEFAULT_RECURSION_LIMIT) -> N.PassOutcome:
    p = _Pruner()
    body = p.body(script.body)
    if not p.changed:
        return N.PassOutcome(script, False)
    return N.PassOutcome(N.Script(body, script.source_name), True)
