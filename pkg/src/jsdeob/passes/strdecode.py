"""Decoding of constant `String.fromCharCode`, `unescape` and `decodeURIComponent` calls.

Escape sequences inside string literals are already decoded by the lexer, so
only these call forms remain.  Aliases such as `f = String.fromCharCode;
f(72)` are turned back into the direct form by constant propagation.
"""

from __future__ import annotations

from .. import jsvalues as J
from .. import nodes as N
from .constfold import FoldContext, shadowed_names


def _literal_args(call) -> bool:
    return all(isinstance(a, N.Lit) for a in call.args)


def decode_call(node, ctx: FoldContext):
    """The literal a call evaluates to, or None when the call is not a constant decode."""
    if not isinstance(node, N.FunApp) or not _literal_args(node):
        return None
    c = node.callee
    args = [a.value for a in node.args]
    if isinstance(c, N.Member) and not c.computed and isinstance(c.prop, N.Lit) \
            and c.prop.value == "fromCharCode" and ctx.global_name(c.obj, "String"):
        return N.Lit(J.from_char_code(args))
    if ctx.global_name(c, "unescape"):
        return N.Lit(J.unescape(J.to_string(args[0] if args else N.UNDEFINED)))
    if ctx.global_name(c, "decodeURIComponent"):
        try:
            return N.Lit(J.decode_uri_component(J.to_string(args[0] if args else N.UNDEFINED)))
        except J.NotFoldable:
            return None  # a URIError at run time
    return None


def run_str_decode(script: N.Script, *, limit: int = N.DEFAULT_RECURSION_LIMIT) -> N.PassOutcome:
    ctx = FoldContext(shadowed_names(script))
    return N.rewrite_bottom_up(script, lambda n: decode_call(n, ctx), limit=limit)
