"""Variable hoisting: lift declarations to the head of each scope.

Every function body (and the script body) ends up as

    [function declarations] [var declarations] [everything else]

with `var x = e` split into a bare declaration plus `x = e` left in place.
"""

from __future__ import annotations

from dataclasses import fields, replace

from .. import nodes as N
from ..stack import deep_recursion

BODY_FIELDS = frozenset(["body", "then", "else_", "block", "handler", "finalizer"])


class _Acc:
    def __init__(self):
        self.funs: list = []
        self.vars: dict = {}  # name -> original_name, first occurrence order

    def var(self, decl: N.VarDecl):
        if decl.name not in self.vars:
            self.vars[decl.name] = decl.original_name


def hoist_scope(body) -> tuple:
    acc = _Acc()
    rest = _stmts(body, acc)
    decls = [N.VarDecl(name, None, orig) for name, orig in acc.vars.items()]
    return tuple(acc.funs) + tuple(decls) + tuple(rest)


def _stmts(body, acc) -> list:
    out = []
    for s in body:
        out.extend(_stmt(s, acc))
    return out


def _assign(decl: N.VarDecl):
    return N.Assign(N.VarRef(decl.name), "=", _expr(decl.init))


def _stmt(s, acc) -> list:
    if isinstance(s, N.VarDecl):
        acc.var(s)
        return [] if s.init is None else [N.ExprStmt(_assign(s))]
    if isinstance(s, N.FunDecl):
        acc.funs.append(replace(s, body=hoist_scope(s.body)))
        return []
    if isinstance(s, N.For) and isinstance(s.init, tuple):
        for d in s.init:
            acc.var(d)
        inits = [_assign(d) for d in s.init if d.init is not None]
        init = None if not inits else inits[0] if len(inits) == 1 else N.Sequence(tuple(inits))
        s = replace(s, init=init)
    if isinstance(s, N.ForIn) and isinstance(s.left, N.VarDecl):
        acc.var(s.left)
        s = replace(s, left=N.VarRef(s.left.name))
    updates = {}
    for f in fields(s):
        v = getattr(s, f.name)
        if f.name in BODY_FIELDS and isinstance(v, tuple):
            updates[f.name] = tuple(_stmts(v, acc))
        elif f.name == "cases":
            updates[f.name] = tuple(
                N.Case(None if c.test is None else _expr(c.test), tuple(_stmts(c.body, acc)))
                for c in v)
        elif isinstance(v, N.Expr):
            updates[f.name] = _expr(v)
    return [replace(s, **updates) if updates else s]


def _expr(e):
    if isinstance(e, N.FunExpr):
        return replace(e, body=hoist_scope(e.body))
    return N.map_children(e, lambda c, _f: _expr(c))


@deep_recursion
def hoist(script: N.Script) -> N.Script:
    """Return ``script`` with declarations lifted to the head of every scope."""
    return N.Script(hoist_scope(script.body), script.source_name)
