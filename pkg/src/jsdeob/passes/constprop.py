"""Flow-sensitive constant propagation over the Bottom / Const / Top lattice.

One walker serves both the analysis and the substitution: it interprets each
function body forward, keeping an abstract environment from bindings to
lattice values, and (when substituting) replaces reads of known constants by
literals on the way.

Beyond literals, ``KnownGlobal`` tracks aliases of a small set of host
functions (`w = eval; w(s)`), substituted back only in callee position.

Loops, labelled blocks, switches and the handler of a `try` are entered with
every binding they may assign forced to Top (one-pass kill-set widening).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .. import jsvalues as J
from .. import nodes as N
from ..nodes import UNDEFINED, lit_key
from ..stack import deep_recursion
from .scope import EVAL_FAMILY, ScopeInfo, analyze_scopes


# -- lattice -----------------------------------------------------------------


class _Bottom:
    __slots__ = ()

    def __repr__(self):
        return "BOTTOM"


class _Top:
    __slots__ = ()

    def __repr__(self):
        return "TOP"


BOTTOM = _Bottom()
TOP = _Top()


@dataclass(frozen=True, eq=False)
class Const:
    value: N.LitValue

    def __eq__(self, other):
        return isinstance(other, Const) and lit_key(self.value) == lit_key(other.value)

    def __hash__(self):
        return hash(lit_key(self.value))


@dataclass(frozen=True)
class KnownGlobal:
    name: str


def join(a, b):
    if a is BOTTOM:
        return b
    if b is BOTTOM:
        return a
    if a == b:
        return a
    return TOP


def leq(a, b) -> bool:
    return join(a, b) == b


# Host functions whose aliases are tracked; the first group has no effect on script state.
PURE_KNOWN = frozenset(["String.fromCharCode", "unescape", "decodeURIComponent", "parseInt",
                        "parseFloat"])
KNOWN_GLOBALS = PURE_KNOWN | {"eval", "WScript", "ActiveXObject"}


def _env_join(a: Optional[dict], b: Optional[dict]) -> Optional[dict]:
    """Pointwise join; None is the unreachable environment; missing keys are Top."""
    if a is None:
        return None if b is None else dict(b)
    if b is None:
        return dict(a)
    out = {}
    for k, v in a.items():
        w = b.get(k)
        if w is not None:
            j = join(v, w)
            if j is not TOP:
                out[k] = j
    return out


def _resolves_global(scope, name) -> bool:
    s = scope
    while s is not None and s.kind != "global":
        if name in s.bindings:
            return False
        s = s.parent
    return True


# -- walker ------------------------------------------------------------------


class _Walker:
    def __init__(self, info: ScopeInfo, substitute: bool, record: bool = False):
        self.info = info
        self.substitute = substitute
        self.record = record
        self.facts: dict = {}
        self.env: Optional[dict] = {}
        self.scope = info.script_scope
        self.changed = False

    # -- bindings -------------------------------------------------------------

    def pinned(self, b) -> bool:
        if b.kind not in ("var", "param", "catch", "global"):
            return True
        home = b.scope.home()
        if home.dynamic:
            return True
        return b.kind == "param" and home.uses_arguments

    def volatile(self, b) -> bool:
        """Bindings that code outside the current function may change (during a call)."""
        return b.captured_write or b.scope.home() is not self.scope.home() \
            or self.info.eval_visible(b)

    def read(self, b):
        if b is None:
            return TOP
        if b.kind == "global" and b.name in KNOWN_GLOBALS | {"String"} and not b.writes:
            return KnownGlobal(b.name)
        if self.pinned(b) or self.env is None:
            return TOP
        return self.env.get(b, TOP)

    def write(self, b, value):
        if b is None or self.env is None or self.pinned(b):
            return
        if value is TOP or value is BOTTOM:
            self.env.pop(b, None)
        else:
            self.env[b] = value

    def kill(self, bindings):
        if self.env is not None:
            for b in bindings:
                self.env.pop(b, None)

    def binding(self, ref):
        return self.info.binding_of.get(id(ref))

    # -- call effects ---------------------------------------------------------

    def is_eval_call(self, callee, value) -> bool:
        if value == KnownGlobal("eval"):
            return True
        return (isinstance(callee, N.VarRef) and callee.name in EVAL_FAMILY
                and _resolves_global(self.scope, callee.name))

    def call_effect(self, callee, value):
        if self.env is None:
            return
        if self.is_eval_call(callee, value):
            self.env.clear()
        elif not (isinstance(value, KnownGlobal) and value.name in PURE_KNOWN):
            self.kill_volatile()

    def kill_volatile(self):
        if self.env is not None:
            for b in [b for b in self.env if self.volatile(b)]:
                del self.env[b]

    # -- expressions ----------------------------------------------------------

    def ev(self, e, ctx=None):
        """Evaluate ``e``; returns (rewritten node, abstract value)."""
        t = type(e)
        if t is N.Lit:
            return e, Const(e.value)
        if t is N.VarRef:
            return self.ev_ref(e, ctx)
        if t is N.Infix:
            return self.ev_infix(e)
        if t is N.Assign:
            return self.ev_assign(e)
        if t is N.FunApp or t is N.New:
            return self.ev_call(e)
        if t is N.Member:
            return self.ev_member(e, ctx)
        if t is N.Prefix:
            return self.ev_prefix(e)
        if t is N.Update:
            return self.ev_update(e)
        if t is N.Cond:
            test, tv = self.ev(e.test)
            saved = None if self.env is None else dict(self.env)
            then, v1 = self.ev(e.then)
            env_then = self.env
            self.env = saved
            else_, v2 = self.ev(e.else_)
            self.env = _env_join(env_then, self.env)
            if isinstance(tv, Const):
                value = v1 if J.to_boolean(tv.value) else v2
            else:
                value = join(v1, v2)
            return self._rebuild(e, test=test, then=then, else_=else_), value
        if t is N.Sequence:
            out, v = [], TOP
            for x in e.exprs:
                nx, v = self.ev(x)
                out.append(nx)
            return self._rebuild(e, exprs=tuple(out)), v
        if t is N.FunExpr:
            return self.function(e), TOP
        if t is N.ArrayLit:
            els = tuple(None if x is None else self.ev(x)[0] for x in e.elements)
            return self._rebuild(e, elements=els), TOP
        if t is N.ObjectLit:
            props = tuple(N.Prop(p.key, self.ev(p.value)[0]) for p in e.props)
            if all(a.value is b.value for a, b in zip(props, e.props)):
                props = e.props
            return self._rebuild(e, props=props), TOP
        return e, TOP  # This, RegExpLit

    @staticmethod
    def _rebuild(e, **fields):
        for k, v in fields.items():
            if getattr(e, k) is not v:
                break
        else:
            return e
        from dataclasses import replace
        return replace(e, **fields)

    def ev_ref(self, e, ctx):
        b = self.binding(e)
        v = self.read(b)
        if not self.substitute or self.env is None:
            return e, v
        if isinstance(v, Const) and ctx != "callee":
            self.changed = True
            return N.Lit(v.value), v
        if isinstance(v, KnownGlobal) and ctx == "callee" and v.name in KNOWN_GLOBALS:
            repl = _known_global_node(v.name)
            if repl != e and _resolves_global(self.scope, v.name.split(".")[0]):
                self.changed = True
                return repl, v
        if isinstance(v, KnownGlobal) and ctx == "callee_obj" and v.name in KNOWN_GLOBALS \
                and "." not in v.name:
            repl = N.VarRef(v.name)
            if repl != e and _resolves_global(self.scope, v.name):
                self.changed = True
                return repl, v
        return e, v

    def ev_member(self, e, ctx):
        obj, ov = self.ev(e.obj, "callee_obj" if ctx == "callee" else None)
        prop = self.ev(e.prop)[0] if e.computed else e.prop
        value = TOP
        if ov == KnownGlobal("String") and isinstance(prop, N.Lit) and prop.value == "fromCharCode":
            value = KnownGlobal("String.fromCharCode")
        return self._rebuild(e, obj=obj, prop=prop), value

    def ev_infix(self, e):
        left, lv = self.ev(e.left)
        if e.op in ("&&", "||"):
            saved = None if self.env is None else dict(self.env)
            right, rv = self.ev(e.right)
            self.env = _env_join(saved, self.env)
            value = TOP
            if isinstance(lv, Const):
                truthy = J.to_boolean(lv.value)
                value = rv if (e.op == "&&") == truthy else lv
            return self._rebuild(e, left=left, right=right), value
        right, rv = self.ev(e.right)
        value = TOP
        if isinstance(lv, Const) and isinstance(rv, Const) and e.op in J.BINARY_OPS:
            try:
                value = Const(_num(J.binary(e.op, lv.value, rv.value)))
            except J.NotFoldable:
                pass
        return self._rebuild(e, left=left, right=right), value

    def ev_prefix(self, e):
        if e.op == "delete":
            if isinstance(e.operand, N.VarRef):
                self.write(self.binding(e.operand), TOP)
                return e, TOP
            operand = self.ev_target(e.operand)
            return self._rebuild(e, operand=operand), TOP
        operand, v = self.ev(e.operand)
        value = TOP
        if isinstance(v, Const) and e.op in J.UNARY_OPS:
            value = Const(_num(J.unary(e.op, v.value)))
        return self._rebuild(e, operand=operand), value

    def ev_target(self, target):
        """Evaluate the sub-expressions of a member target (not the read itself)."""
        if isinstance(target, N.Member):
            obj = self.ev(target.obj)[0]
            prop = self.ev(target.prop)[0] if target.computed else target.prop
            return self._rebuild(target, obj=obj, prop=prop)
        return self.ev(target)[0]

    def ev_assign(self, e):
        if not isinstance(e.target, N.VarRef):
            target = self.ev_target(e.target)
            value, v = self.ev(e.value)
            return self._rebuild(e, target=target, value=value), (v if e.op == "=" else TOP)
        b = self.binding(e.target)
        value, v = self.ev(e.value)
        if e.op == "=":
            self.write(b, v)
            return self._rebuild(e, value=value), v
        old = self.read(b)
        new = TOP
        if isinstance(old, Const) and isinstance(v, Const):
            try:
                new = Const(_num(J.binary(J.COMPOUND_OPS[e.op], old.value, v.value)))
            except J.NotFoldable:
                new = TOP
        self.write(b, new)
        if self.substitute and isinstance(new, Const) and isinstance(value, N.Lit) \
                and self.env is not None and not self.pinned(b):
            self.changed = True
            return N.Assign(e.target, "=", N.Lit(new.value)), new
        return self._rebuild(e, value=value), new

    def ev_update(self, e):
        if not isinstance(e.target, N.VarRef):
            return self._rebuild(e, target=self.ev_target(e.target)), TOP
        b = self.binding(e.target)
        old = self.read(b)
        if isinstance(old, Const):
            n = J.to_number(old.value)
            new = n + 1 if e.op == "++" else n - 1
            self.write(b, Const(new))
            return e, Const(new if e.prefix else n)
        self.write(b, TOP)
        return e, TOP

    def ev_call(self, e):
        callee, cv = self.ev(e.callee, "callee")
        args = []
        for a in e.args:
            args.append(self.ev(a)[0])
        args = tuple(args)
        if all(x is y for x, y in zip(args, e.args)):
            args = e.args
        self.call_effect(e.callee, cv)
        return self._rebuild(e, callee=callee, args=args), TOP

    # -- statements -----------------------------------------------------------

    def body(self, stmts) -> tuple:
        out = []
        dirty = False
        for s in stmts:
            ns = self.stmt(s)
            dirty = dirty or ns is not s
            out.append(ns)
        return tuple(out) if dirty else stmts

    def stmt(self, s):
        if self.record:
            self.facts[id(s)] = None if self.env is None else dict(self.env)
        if self.env is None:
            # unreachable code: analyse with nothing known, then stay unreachable
            self.env = {}
            try:
                return self._stmt(s)
            finally:
                self.env = None
        return self._stmt(s)

    def _stmt(self, s):
        t = type(s)
        if t is N.ExprStmt:
            return self._rebuild(s, expr=self.ev(s.expr)[0])
        if t is N.VarDecl:
            if s.init is None:
                return s
            init, v = self.ev(s.init)
            self.write(self.info.decl_binding.get(id(s)) or self.scope.lookup(s.name), v)
            return self._rebuild(s, init=init)
        if t is N.FunDecl:
            return self.function(s)
        if t is N.Return:
            value = None if s.value is None else self.ev(s.value)[0]
            self.env = None
            return self._rebuild(s, value=value)
        if t is N.Throw:
            expr = self.ev(s.expr)[0]
            self.env = None
            return self._rebuild(s, expr=expr)
        if t is N.If:
            test = self.ev(s.test)[0]
            saved = None if self.env is None else dict(self.env)
            then = self.body(s.then)
            env_then = self.env
            self.env = saved
            else_ = None if s.else_ is None else self.body(s.else_)
            self.env = _env_join(env_then, self.env)
            return self._rebuild(s, test=test, then=then, else_=else_)
        if t in (N.While, N.DoWhile, N.For, N.ForIn):
            return self.loop(s)
        if t is N.Switch:
            scrutinee = self.ev(s.scrutinee)[0]
            self.widen(s)
            widened = dict(self.env)
            cases = []
            for c in s.cases:
                self.env = dict(widened)
                test = None if c.test is None else self.ev(c.test)[0]
                cases.append(self._rebuild(c, test=test, body=self.body(c.body)))
            self.env = widened
            return self._rebuild(s, scrutinee=scrutinee, cases=tuple(cases))
        if t is N.Labeled:
            self.widen(s)
            widened = dict(self.env)
            body = self.body(s.body)
            self.env = widened
            return self._rebuild(s, body=body)
        if t is N.Block:
            return self._rebuild(s, body=self.body(s.body))
        if t is N.Try:
            return self.try_(s)
        if t is N.With:
            self.env = {}
            obj = self.ev(s.obj)[0]
            body = self.body(s.body)
            self.env = {}
            return self._rebuild(s, obj=obj, body=body)
        if t in (N.Break, N.Continue):
            self.env = None
            return s
        return s  # Empty, Debugger

    def loop(self, s):
        t = type(s)
        init = s.init if t is N.For else None
        if t is N.For and init is not None and not isinstance(init, tuple):
            init = self.ev(init)[0]
        obj = self.ev(s.obj)[0] if t is N.ForIn else None
        self.widen(s)
        widened = dict(self.env)
        if t is N.DoWhile:
            body = self.body(s.body)
            self.env = dict(widened)
            test = self.ev(s.test)[0]
            self.env = widened
            return self._rebuild(s, body=body, test=test)
        test = None if getattr(s, "test", None) is None else self.ev(s.test)[0]
        body = self.body(s.body)
        update = None
        if t is N.For:
            self.env = dict(widened)
            update = None if s.update is None else self.ev(s.update)[0]
        self.env = widened
        if t is N.While:
            return self._rebuild(s, test=test, body=body)
        if t is N.For:
            return self._rebuild(s, init=init, test=test, update=update, body=body)
        return self._rebuild(s, obj=obj, body=body)

    def try_(self, s):
        entry = dict(self.env)
        block = self.body(s.block)
        after_block = self.env
        handler = None
        after_handler = None
        if s.handler is not None:
            self.env = dict(entry)
            self.widen_nodes(s.block)
            handler = self.body(s.handler)
            after_handler = self.env
        if s.finalizer is None:
            self.env = _env_join(after_block, after_handler) if s.handler is not None else after_block
            return self._rebuild(s, block=block, handler=handler)
        self.env = dict(entry)
        self.widen_nodes(s.block + (s.handler or ()))
        finalizer = self.body(s.finalizer)
        if after_block is None and (s.handler is None or after_handler is None):
            self.env = None
        return self._rebuild(s, block=block, handler=handler, finalizer=finalizer)

    def widen(self, node):
        self.widen_nodes((node,))

    def widen_nodes(self, nodes):
        """Force to Top everything the given statements may change."""
        assigned, clear_all, calls = _kills(nodes, self)
        if clear_all:
            self.env.clear()
            return
        self.kill(assigned)
        if calls:
            self.kill_volatile()

    # -- functions ------------------------------------------------------------

    def function(self, fn):
        scope = self.info.scope_of[id(fn)]
        saved_env, saved_scope = self.env, self.scope
        self.scope = scope
        self.env = {}
        for b in scope.bindings.values():
            if b.kind == "var" and not self.pinned(b):
                self.env[b] = Const(UNDEFINED)
        try:
            body = self.body(fn.body)
        finally:
            self.env, self.scope = saved_env, saved_scope
        return self._rebuild(fn, body=body)


def _kills(nodes, w: _Walker):
    """Bindings assigned within ``nodes`` (nested functions excluded) and call effects."""
    assigned = set()
    clear_all = False
    calls = False
    stack = list(nodes)
    info = w.info
    while stack:
        n = stack.pop()
        if isinstance(n, N.FUNCTION_NODES):
            continue
        if isinstance(n, (N.Assign, N.Update)) and isinstance(n.target, N.VarRef):
            b = info.binding_of.get(id(n.target))
            if b is not None:
                assigned.add(b)
        elif isinstance(n, N.ForIn) and isinstance(n.left, N.VarRef):
            b = info.binding_of.get(id(n.left))
            if b is not None:
                assigned.add(b)
        elif isinstance(n, N.Prefix) and n.op == "delete" and isinstance(n.operand, N.VarRef):
            b = info.binding_of.get(id(n.operand))
            if b is not None:
                assigned.add(b)
        elif isinstance(n, N.VarDecl) and n.init is not None:
            b = info.decl_binding.get(id(n))
            if b is not None:
                assigned.add(b)
        elif isinstance(n, N.Try) and n.param:
            cs = info.scope_of.get(id(n))
            if cs is not None and n.param in cs.bindings:
                assigned.add(cs.bindings[n.param])
        elif isinstance(n, (N.FunApp, N.New)):
            c = n.callee
            if isinstance(c, N.VarRef):
                b = info.binding_of.get(id(c))
                if (b is not None and b.kind == "global" and c.name in EVAL_FAMILY) or (
                        b is not None and not w.pinned(b) and w.env is not None
                        and w.env.get(b) == KnownGlobal("eval")):
                    clear_all = True
            calls = True
            if any(isinstance(v, KnownGlobal) and v.name == "eval"
                   for v in (w.env or {}).values()):
                # an eval alias may be invoked through any call in the region
                clear_all = clear_all or _calls_alias(n, w)
        if isinstance(n, N.With):
            clear_all = True
        stack.extend(N.children(n))
    return assigned, clear_all, calls


def _calls_alias(call, w) -> bool:
    c = call.callee
    if isinstance(c, N.VarRef):
        b = w.info.binding_of.get(id(c))
        return b is not None and w.env.get(b) == KnownGlobal("eval")
    return False


def _known_global_node(name):
    if name == "String.fromCharCode":
        return N.Member(N.VarRef("String"), N.Lit("fromCharCode"), False)
    return N.VarRef(name)


def _num(v):
    return float(v) if isinstance(v, int) and not isinstance(v, bool) else v


# -- public API --------------------------------------------------------------


AbstractEnv = dict  # name -> Const | KnownGlobal | TOP (absent: Bottom)


def _named(env: Optional[dict], bindings) -> AbstractEnv:
    if env is None:
        return {}
    out = {}
    for b in bindings:
        v = env.get(b, TOP)
        out[b.name] = v
    return out


@deep_recursion
def analyze(body, entry: Optional[AbstractEnv] = None):
    """Analyse a top-level statement list.

    Returns ``(exit, facts)``: the environment after the last statement, and a
    list of ``(statement, env)`` pairs giving the environment before each
    top-level statement.  Environments map names to ``Const``,
    ``KnownGlobal`` or ``TOP``; unreachable points map to ``{}``.
    """
    script = N.Script(tuple(body))
    info = analyze_scopes(script)
    w = _Walker(info, substitute=False, record=True)
    visible = list(info.script_scope.bindings.values()) + list(info.global_scope.bindings.values())
    if entry:
        for b in visible:
            if b.name in entry and entry[b.name] not in (TOP, BOTTOM) and not w.pinned(b):
                w.env[b] = entry[b.name]
    w.body(script.body)
    exit_env = _named(w.env, visible)
    if w.env is None:
        exit_env = {b.name: BOTTOM for b in visible}
    facts = [(s, _named(w.facts.get(id(s)), visible)) for s in script.body]
    return exit_env, facts


@deep_recursion
def substitute(script: N.Script, info: Optional[ScopeInfo] = None) -> N.PassOutcome:
    """Replace reads of known constants by literals (and eval-style aliases by the original)."""
    info = info or analyze_scopes(script)
    w = _Walker(info, substitute=True)
    body = w.body(script.body)
    if not w.changed or body is script.body:
        return N.PassOutcome(script, False)
    return N.PassOutcome(N.Script(body, script.source_name), True)


def run_propagate(script: N.Script, *, limit: int = N.DEFAULT_RECURSION_LIMIT) -> N.PassOutcome:
    from .eliminate import eliminate_redundant
    sub = substitute(script)
    elim = eliminate_redundant(sub.script)
    return N.PassOutcome(elim.script, sub.changed or elim.changed)
