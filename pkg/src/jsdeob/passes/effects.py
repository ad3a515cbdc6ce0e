"""Side-effect classification of expressions."""

from __future__ import annotations

from .. import nodes as N

_PURE_LEAVES = (N.Lit, N.VarRef, N.This, N.FunExpr, N.RegExpLit)


def is_pure(e) -> bool:
    """True when evaluating ``e`` cannot write state or call user code.

    Literals, variable reads, operators over pure operands and property
    reads of pure objects count as pure; calls, `new`, assignments, updates
    and `delete` do not.
    """
    stack = [e]
    while stack:
        n = stack.pop()
        if n is None or isinstance(n, _PURE_LEAVES):
            continue
        t = type(n)
        if t is N.Infix:
            stack.append(n.left)
            stack.append(n.right)
        elif t is N.Prefix:
            if n.op == "delete":
                return False
            stack.append(n.operand)
        elif t is N.Cond:
            stack.extend((n.test, n.then, n.else_))
        elif t is N.Sequence:
            stack.extend(n.exprs)
        elif t is N.Member:
            stack.append(n.obj)
            stack.append(n.prop)
        elif t is N.ArrayLit:
            stack.extend(x for x in n.elements if x is not None)
        elif t is N.ObjectLit:
            stack.extend(p.value for p in n.props)
        else:
            return False
    return True


def contains_call(node) -> bool:
    """True when ``node`` (outside nested function bodies) contains a call or `new`."""
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, (N.FunApp, N.New)):
            return True
        if isinstance(n, N.FUNCTION_NODES) and n is not node:
            continue
        stack.extend(N.children(n))
    return False
