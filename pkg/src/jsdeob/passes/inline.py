"""Inlining of trivial declared functions.

A function qualifies when its body is a single `return` of a literal (an
array of literals counts), an empty `return`/empty body, or a `return` of
one of its parameters, and its name is only ever used as a callee.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .. import nodes as N
from ..nodes import UNDEFINED
from ..stack import deep_recursion
from .effects import is_pure
from .scope import CALL, ScopeInfo, analyze_scopes


@dataclass(frozen=True)
class ReturnsLiteral:
    value: N.Expr  # Lit, or ArrayLit of Lits


@dataclass(frozen=True)
class ReturnsNothing:
    pass


@dataclass(frozen=True)
class ReturnsParam:
    index: int


InlineTemplate = Union[ReturnsLiteral, ReturnsNothing, ReturnsParam]


def _is_literal(e) -> bool:
    if isinstance(e, N.Lit):
        return True
    return isinstance(e, N.ArrayLit) and all(isinstance(x, N.Lit) for x in e.elements)


def template_of(fn: N.FunDecl):
    """The inline template matching the body of ``fn``, or None."""
    body = fn.body
    if not body:
        return ReturnsNothing()
    if len(body) != 1 or not isinstance(body[0], N.Return):
        return None
    v = body[0].value
    if v is None:
        return ReturnsNothing()
    if _is_literal(v):
        return ReturnsLiteral(v)
    if isinstance(v, N.VarRef) and v.name in fn.params:
        # with duplicate parameter names the last one is bound
        return ReturnsParam(len(fn.params) - 1 - fn.params[::-1].index(v.name))
    return None


def find_inlinable(script: N.Script, info: ScopeInfo = None) -> dict:
    """Map from binding to (FunDecl, template) for every qualifying function."""
    info = info or analyze_scopes(script)
    out = {}
    for fn, b in _fundecls(info):
        if b is None or b.kind != "function" or len(b.decls) != 1 or b.name == "eval":
            continue
        if b.scope.home().dynamic or any(r.mode != CALL for r in b.refs):
            continue
        t = template_of(fn)
        if t is not None:
            out[b] = (fn, t)
    return out


def _fundecls(info):
    for n in N.walk_body(info.script.body):
        if isinstance(n, N.FunDecl):
            yield n, info.decl_binding.get(id(n))


def _expand(t, args):
    """Replacement for a call with ``args``, or None when an argument might have effects."""
    if isinstance(t, ReturnsParam):
        if not all(is_pure(a) for i, a in enumerate(args) if i != t.index):
            return None
        return args[t.index] if t.index < len(args) else N.Lit(UNDEFINED)
    if not all(is_pure(a) for a in args):
        return None
    if isinstance(t, ReturnsNothing):
        return N.Lit(UNDEFINED)
    return t.value


class _Inliner:
    def __init__(self, info, templates):
        self.info = info
        self.templates = templates
        self.replaced: dict = {}
        self.decl_of: dict = {}  # id(rewritten FunDecl) -> binding
        self.changed = False

    def visit(self, node):
        if isinstance(node, N.FunApp) and isinstance(node.callee, N.VarRef):
            b = self.info.binding_of.get(id(node.callee))
            entry = self.templates.get(b)
            if entry is not None:
                args = tuple(self.visit(a) for a in node.args)
                out = _expand(entry[1], args)
                if out is not None:
                    self.changed = True
                    self.replaced[b] = self.replaced.get(b, 0) + 1
                    return out
                return N.FunApp(node.callee, args) if args != node.args else node
        if isinstance(node, N.ExprStmt) and isinstance(node.expr, N.FunApp):
            new = self.visit(node.expr)
            if isinstance(new, N.Lit) and new.value is UNDEFINED:
                return None  # a call of a function returning nothing, as a statement
            return node if new is node.expr else N.ExprStmt(new)
        if isinstance(node, N.FUNCTION_NODES + (N.Case,)) or _has_body(node):
            return self.rebuild_with_bodies(node)
        return N.map_children(node, lambda c, f: self.visit(c))

    def rebuild_with_bodies(self, node):
        from dataclasses import replace
        updates = {}
        for name in N._child_fields(type(node)):
            v = getattr(node, name)
            if isinstance(v, tuple) and (not v or isinstance(v[0], N.Stmt)):
                nv = self.body(v)
            elif isinstance(v, tuple):
                nv = tuple(self.visit(x) for x in v)
                if all(a is b for a, b in zip(nv, v)):
                    nv = v
            elif isinstance(v, N.Node):
                nv = self.visit(v)
            else:
                continue
            if nv is not v:
                updates[name] = nv
        new = replace(node, **updates) if updates else node
        if isinstance(node, N.FunDecl):
            b = self.info.decl_binding.get(id(node))
            if b is not None:
                self.decl_of[id(new)] = b
        return new

    def body(self, stmts) -> tuple:
        out = []
        for s in stmts:
            ns = self.visit(s)
            if ns is not None:
                out.append(ns)
        if len(out) == len(stmts) and all(a is b for a, b in zip(out, stmts)):
            return stmts
        return tuple(out)


def _has_body(node) -> bool:
    return isinstance(node, N.Stmt) and any(
        isinstance(getattr(node, f), tuple) for f in N._child_fields(type(node)))


def _observable(info, b) -> bool:
    return b.scope.home().dynamic or info.eval_visible(b)


def _remove(body, doomed) -> tuple:
    """Drop the FunDecls whose identity is in ``doomed``, at any depth."""
    from dataclasses import replace

    def fix(stmts):
        out = []
        for s in stmts:
            if isinstance(s, N.FunDecl) and id(s) in doomed:
                continue
            out.append(rec(s))
        if len(out) == len(stmts) and all(a is b for a, b in zip(out, stmts)):
            return stmts
        return tuple(out)

    def rec(node):
        updates = {}
        for name in N._child_fields(type(node)):
            v = getattr(node, name)
            if isinstance(v, tuple) and (not v or isinstance(v[0], N.Stmt)):
                nv = fix(v)
            elif isinstance(v, tuple):
                nv = tuple(rec(x) if isinstance(x, N.Node) else x for x in v)
                if all(a is b for a, b in zip(nv, v)):
                    nv = v
            elif isinstance(v, N.Node):
                nv = rec(v)
            else:
                continue
            if nv is not v:
                updates[name] = nv
        return replace(node, **updates) if updates else node

    return fix(body)


@deep_recursion
def run_inline(script: N.Script, templates: dict = None, *,
               limit: int = N.DEFAULT_RECURSION_LIMIT) -> N.PassOutcome:
    """Replace calls of trivial functions by their result and drop the functions left unused."""
    info = analyze_scopes(script)
    if templates is None:
        templates = find_inlinable(script, info)
    if not templates:
        return N.PassOutcome(script, False)
    inl = _Inliner(info, templates)
    body = inl.body(script.body)
    doomed = {new_id for new_id, b in inl.decl_of.items()
              if b in templates and inl.replaced.get(b, 0) == len(b.refs)
              and not _observable(info, b)}
    # declarations that were not rebuilt keep their identity
    for b, (fn, _) in templates.items():
        if inl.replaced.get(b, 0) == len(b.refs) and not _observable(info, b):
            doomed.add(id(fn))
    if doomed:
        new_body = _remove(body, doomed)
        if new_body is not body:
            inl.changed = True
            body = new_body
    if not inl.changed:
        return N.PassOutcome(script, False)
    return N.PassOutcome(N.Script(body, script.source_name), True)
