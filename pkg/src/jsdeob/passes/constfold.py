"""Constant folding over literal operands.

Rules are small functions registered per node type; each returns a
replacement node or None.  Adding a rule is one decorated function.
"""

from __future__ import annotations

import math
import re
from typing import Callable, Optional

from .. import jsvalues as J
from .. import nodes as N
from ..nodes import UNDEFINED
from .effects import is_pure

Rule = Callable[[N.Node, "FoldContext"], Optional[N.Node]]
RULES: dict = {}


class FoldContext:
    """Names the script rebinds; rules touching those globals stand down."""

    def __init__(self, shadowed=frozenset()):
        self.shadowed = frozenset(shadowed)

    def global_name(self, node, name) -> bool:
        return isinstance(node, N.VarRef) and node.name == name and name not in self.shadowed


DEFAULT_CONTEXT = FoldContext()


def rule(*types):
    def register(fn):
        for t in types:
            RULES.setdefault(t, []).append(fn)
        return fn
    return register


def rule_count() -> int:
    return len({id(f) for fns in RULES.values() for f in fns}) + len(J.BINARY_OPS) + len(J.UNARY_OPS)


def fold_node(n: N.Node, ctx: FoldContext = DEFAULT_CONTEXT) -> Optional[N.Node]:
    for fn in RULES.get(type(n), ()):
        out = fn(n, ctx)
        if out is not None:
            return out
    return None


def fold_callee(n: N.Node, ctx: FoldContext = DEFAULT_CONTEXT) -> Optional[N.Node]:
    """Like ``fold_node`` for a node in callee position.

    A result that is a property access or bare `eval` would change the
    receiver (`this`) or turn an indirect eval into a direct one.
    """
    out = fold_node(n, ctx)
    if out is None:
        return None
    if isinstance(out, N.Member) or (isinstance(out, N.VarRef) and out.name == "eval"):
        return None
    return out


def _lit(v) -> N.Lit:
    return N.Lit(v)


def _float(v):
    return float(v) if isinstance(v, int) and not isinstance(v, bool) else v


# -- primitive views ---------------------------------------------------------

_NO = object()


def _array_string(a: N.ArrayLit):
    """ToPrimitive of an array literal whose elements are all literals."""
    parts = []
    for x in a.elements:
        if x is None:
            parts.append("")
        elif isinstance(x, N.Lit):
            v = x.value
            parts.append("" if v is None or v is UNDEFINED else J.to_string(v))
        else:
            return _NO
    return ",".join(parts)


def _primitive(node, allow_array: bool):
    if isinstance(node, N.Lit):
        return node.value
    if allow_array and isinstance(node, N.ArrayLit):
        return _array_string(node)
    return _NO


# Operators whose operands go through ToPrimitive, so an array literal may stand in.
_TO_PRIMITIVE_OPS = frozenset("+ - * / % << >> >>> & | ^ < > <= >=".split())


# -- operators ---------------------------------------------------------------


@rule(N.Infix)
def fold_infix(n: N.Infix, ctx):
    if n.op not in J.BINARY_OPS:
        return None
    arrays = n.op in _TO_PRIMITIVE_OPS
    a = _primitive(n.left, arrays)
    b = _primitive(n.right, arrays)
    if a is _NO or b is _NO:
        return None
    try:
        return _lit(_float(J.binary(n.op, a, b)))
    except J.NotFoldable:
        return None


@rule(N.Infix)
def fold_short_circuit(n: N.Infix, ctx):
    """`lit && e`, `lit || e`: the literal decides whether `e` is the result."""
    if n.op not in ("&&", "||") or not isinstance(n.left, N.Lit):
        return None
    truthy = J.to_boolean(n.left.value)
    if (n.op == "&&") == truthy:
        return n.right
    return n.left


@rule(N.Infix)
def fold_concat_chain(n: N.Infix, ctx):
    """`(e + 'a') + 'b'` -> `e + 'ab'`: the inner sum is already a string."""
    if n.op != "+" or not isinstance(n.right, N.Lit) or not isinstance(n.right.value, str):
        return None
    inner = n.left
    if not (isinstance(inner, N.Infix) and inner.op == "+" and isinstance(inner.right, N.Lit)
            and isinstance(inner.right.value, str)):
        return None
    return N.Infix(inner.left, "+", _lit(inner.right.value + n.right.value))


@rule(N.Prefix)
def fold_prefix(n: N.Prefix, ctx):
    if n.op not in J.UNARY_OPS:
        return None
    v = _primitive(n.operand, n.op in ("+", "-", "~"))
    if v is _NO:
        if isinstance(n.operand, (N.ArrayLit, N.ObjectLit, N.FunExpr)) and is_pure(n.operand):
            if n.op == "!":
                return _lit(False)
            if n.op == "typeof":
                return _lit("function" if isinstance(n.operand, N.FunExpr) else "object")
        return None
    try:
        return _lit(_float(J.unary(n.op, v)))
    except J.NotFoldable:
        return None


@rule(N.Cond)
def fold_cond(n: N.Cond, ctx):
    if isinstance(n.test, N.Lit):
        return n.then if J.to_boolean(n.test.value) else n.else_
    return None


@rule(N.Sequence)
def fold_sequence(n: N.Sequence, ctx):
    exprs = []
    for e in n.exprs:
        if isinstance(e, N.Sequence):
            exprs.extend(e.exprs)
        else:
            exprs.append(e)
    last = exprs[-1]
    kept = [e for e in exprs[:-1] if not is_pure(e)] + [last]
    if len(kept) == len(n.exprs) and len(exprs) == len(n.exprs):
        return None
    return kept[0] if len(kept) == 1 else N.Sequence(tuple(kept))


# -- property reads ----------------------------------------------------------


def _prop_name(n: N.Member):
    """The property key of a member read as a JS string, or None."""
    p = n.prop
    if not isinstance(p, N.Lit):
        return None
    return J.to_string(p.value)


def _array_index(key: str):
    """Canonical array index for a property key, or None."""
    if key == "0":
        return 0
    if key and key[0] != "0" and key.isdigit() and key.isascii():
        i = int(key)
        return i if i < 2**32 - 1 else None
    return None


@rule(N.Member)
def fold_member(n: N.Member, ctx):
    key = _prop_name(n)
    if key is None:
        return None
    obj = n.obj
    if isinstance(obj, N.Lit) and isinstance(obj.value, str):
        s = obj.value
        if key == "length":
            return _lit(float(len(s)))
        i = _array_index(key)
        if i is not None:
            return _lit(s[i]) if i < len(s) else _lit(UNDEFINED)
        return None
    if isinstance(obj, N.ArrayLit) and all(e is None or is_pure(e) for e in obj.elements):
        els = obj.elements
        if key == "length":
            return _lit(float(len(els)))
        i = _array_index(key)
        if i is not None:
            if i >= len(els) or els[i] is None:
                return _lit(UNDEFINED)
            return els[i]
    return None


# -- method and global calls -------------------------------------------------


def _lit_args(n: N.FunApp):
    if all(isinstance(a, N.Lit) for a in n.args):
        return [a.value for a in n.args]
    return None


def _arg(args, i):
    return args[i] if i < len(args) else UNDEFINED


def _clamp(v, lo, hi):
    return max(lo, min(hi, v))


def _rel(v, length):
    """Relative index as used by slice: negative counts from the end."""
    if v < 0:
        return int(max(length + v, 0))
    return int(min(v, length))


def _s_char_at(s, args):
    pos = J.to_integer(_arg(args, 0))
    return s[int(pos)] if 0 <= pos < len(s) else ""


def _s_char_code_at(s, args):
    pos = J.to_integer(_arg(args, 0))
    return float(ord(s[int(pos)])) if 0 <= pos < len(s) else math.nan


def _s_substring(s, args):
    n = len(s)
    start = _clamp(J.to_integer(_arg(args, 0)), 0, n)
    end_arg = _arg(args, 1)
    end = n if end_arg is UNDEFINED else _clamp(J.to_integer(end_arg), 0, n)
    lo, hi = int(min(start, end)), int(max(start, end))
    return s[lo:hi]


def _s_substr(s, args):
    n = len(s)
    start = J.to_integer(_arg(args, 0))
    length_arg = _arg(args, 1)
    length = math.inf if length_arg is UNDEFINED else J.to_integer(length_arg)
    if start < 0:
        start = max(n + start, 0)
    count = min(max(length, 0), n - start)
    if count <= 0:
        return ""
    start = int(start)
    return s[start:start + int(count)]


def _s_slice(s, args):
    n = len(s)
    start = _rel(J.to_integer(_arg(args, 0)), n)
    end_arg = _arg(args, 1)
    end = n if end_arg is UNDEFINED else _rel(J.to_integer(end_arg), n)
    return s[start:end] if start < end else ""


def _s_index_of(s, args):
    search = J.to_string(_arg(args, 0))
    start = int(_clamp(J.to_integer(_arg(args, 1)), 0, len(s)))
    return float(s.find(search, start))


def _s_last_index_of(s, args):
    search = J.to_string(_arg(args, 0))
    pos = J.to_number(_arg(args, 1))
    pos = math.inf if pos != pos else J.to_integer(pos)
    start = int(_clamp(pos, 0, len(s)))
    return float(s.rfind(search, 0, start + len(search)))


def _ascii_only(fn):
    def wrapped(s, args):
        if not s.isascii():
            raise J.NotFoldable("non-ASCII case mapping")
        return fn(s)
    return wrapped


def _s_split(s, args):
    sep = _arg(args, 0)
    limit_arg = _arg(args, 1)
    limit = 2**32 - 1 if limit_arg is UNDEFINED else J.to_uint32(limit_arg)
    if sep is UNDEFINED:
        parts = [s]
    else:
        sep = J.to_string(sep)
        parts = list(s) if sep == "" else s.split(sep)
    return N.ArrayLit(tuple(_lit(p) for p in parts[:limit]))


def _s_concat(s, args):
    return s + "".join(J.to_string(a) for a in args)


_DOLLAR_DIGIT = re.compile(r"\$[0-9]")


def _s_replace(s, args):
    pattern = J.to_string(_arg(args, 0))
    repl = J.to_string(_arg(args, 1))
    if _DOLLAR_DIGIT.search(repl):
        raise J.NotFoldable("capture reference with a string pattern")
    i = s.find(pattern)
    if i < 0:
        return s
    j = i + len(pattern)
    out = []
    k = 0
    while k < len(repl):
        c = repl[k]
        if c == "$" and k + 1 < len(repl):
            d = repl[k + 1]
            if d == "$":
                out.append("$")
                k += 2
                continue
            if d == "&":
                out.append(pattern)
                k += 2
                continue
            if d == "`":
                out.append(s[:i])
                k += 2
                continue
            if d == "'":
                out.append(s[j:])
                k += 2
                continue
        out.append(c)
        k += 1
    return s[:i] + "".join(out) + s[j:]


STRING_METHODS = {
    "charAt": _s_char_at,
    "charCodeAt": _s_char_code_at,
    "substring": _s_substring,
    "substr": _s_substr,
    "slice": _s_slice,
    "indexOf": _s_index_of,
    "lastIndexOf": _s_last_index_of,
    "toLowerCase": _ascii_only(str.lower),
    "toUpperCase": _ascii_only(str.upper),
    "trim": lambda s, args: J.js_trim(s),
    "split": _s_split,
    "concat": _s_concat,
    "replace": _s_replace,
    "toString": lambda s, args: s,
    "valueOf": lambda s, args: s,
}


def _array_join(elements, args):
    sep = _arg(args, 0)
    sep = "," if sep is UNDEFINED else J.to_string(sep)
    parts = []
    for x in elements:
        if x is None:
            parts.append("")
        else:
            v = x.value
            parts.append("" if v is None or v is UNDEFINED else J.to_string(v))
    return sep.join(parts)


GLOBAL_FUNCTIONS = {
    "parseInt": lambda args: J.parse_int(_arg(args, 0), _arg(args, 1)),
    "parseFloat": lambda args: J.parse_float(_arg(args, 0)),
    "String": lambda args: J.to_string(args[0]) if args else "",
    "Number": lambda args: J.to_number(args[0]) if args else 0.0,
    "Boolean": lambda args: J.to_boolean(_arg(args, 0)),
    "isNaN": lambda args: math.isnan(J.to_number(_arg(args, 0))),
    "isFinite": lambda args: math.isfinite(J.to_number(_arg(args, 0))),
}


def _wrap(v):
    return v if isinstance(v, N.Node) else _lit(_float(v))


@rule(N.FunApp)
def fold_string_method(n: N.FunApp, ctx):
    callee = n.callee
    if not isinstance(callee, N.Member) or not isinstance(callee.obj, N.Lit):
        return None
    recv = callee.obj.value
    if not isinstance(recv, str):
        return None
    name = _prop_name(callee)
    fn = STRING_METHODS.get(name)
    args = _lit_args(n)
    if fn is None or args is None:
        return None
    try:
        return _wrap(fn(recv, args))
    except J.NotFoldable:
        return None


@rule(N.FunApp)
def fold_array_method(n: N.FunApp, ctx):
    callee = n.callee
    if not isinstance(callee, N.Member) or not isinstance(callee.obj, N.ArrayLit):
        return None
    els = callee.obj.elements
    if not all(e is None or isinstance(e, N.Lit) for e in els):
        return None
    name = _prop_name(callee)
    args = _lit_args(n)
    if args is None:
        return None
    if name == "join":
        return _lit(_array_join(els, args))
    if name == "reverse" and not args and None not in els:
        return N.ArrayLit(tuple(reversed(els)))
    if name == "toString" and not args:
        return _lit(_array_join(els, []))
    return None


@rule(N.FunApp)
def fold_global_call(n: N.FunApp, ctx):
    callee = n.callee
    if not isinstance(callee, N.VarRef) or callee.name not in GLOBAL_FUNCTIONS:
        return None
    if not ctx.global_name(callee, callee.name):
        return None
    args = _lit_args(n)
    if args is None:
        return None
    try:
        return _lit(_float(GLOBAL_FUNCTIONS[callee.name](args)))
    except J.NotFoldable:
        return None


# -- pass --------------------------------------------------------------------


def shadowed_names(script: N.Script) -> frozenset:
    """Every name the script declares or assigns anywhere."""
    out = set()
    for n in N.walk_body(script.body):
        if isinstance(n, (N.VarDecl, N.FunDecl)):
            out.add(n.name)
        if isinstance(n, N.FUNCTION_NODES):
            out.update(n.params)
            if n.name:
                out.add(n.name)
        if isinstance(n, N.Try) and n.param:
            out.add(n.param)
        if isinstance(n, (N.Assign, N.Update)) and isinstance(n.target, N.VarRef):
            out.add(n.target.name)
        if isinstance(n, N.ForIn) and isinstance(n.left, N.VarRef):
            out.add(n.left.name)
    return frozenset(out)


def run_const_fold(script: N.Script, *, limit: int = N.DEFAULT_RECURSION_LIMIT) -> N.PassOutcome:
    ctx = FoldContext(shadowed_names(script))
    return N.rewrite_bottom_up(script, lambda n: fold_node(n, ctx), limit=limit,
                               callee_rule=lambda n: fold_callee(n, ctx))
