"""Hypothesis strategies for parser-canonical ASTs."""

from __future__ import annotations

from hypothesis import strategies as st

from jsdeob import nodes as N

NAMES = st.sampled_from(["a", "b", "x", "y", "_t", "$", "foo", "café", "s0"])
BIN_OPS = ["+", "-", "*", "/", "%", "<<", ">>", ">>>", "&", "|", "^", "==", "!=", "===", "!==",
           "<", ">", "<=", ">=", "&&", "||", "in", "instanceof"]
UN_OPS = ["!", "~", "typeof", "void", "-", "+", "delete"]

numbers = st.floats(allow_nan=True, allow_infinity=True)
strings = st.text(st.characters(min_codepoint=0, max_codepoint=0xFFFF), max_size=6)
lits = st.one_of(numbers, strings, st.booleans(), st.none(), st.just(N.UNDEFINED)).map(N.Lit)


def _prefix(op, operand):
    # the parser turns `-<number>` into a negative literal
    if op in ("-", "+") and isinstance(operand, N.Lit) and isinstance(operand.value, float):
        return N.Prefix("!", operand)
    if op == "delete" and not isinstance(operand, (N.VarRef, N.Member)):
        return N.Prefix("void", operand)
    return N.Prefix(op, operand)


def _extend(children):
    return st.one_of(
        st.builds(N.Infix, children, st.sampled_from(BIN_OPS), children),
        st.builds(_prefix, st.sampled_from(UN_OPS), children),
        st.builds(N.Cond, children, children, children),
        st.builds(lambda c, a: N.FunApp(c, tuple(a)), children, st.lists(children, max_size=3)),
        st.builds(lambda c, a: N.New(c, tuple(a)), NAMES.map(N.VarRef),
                  st.lists(children, max_size=2)),
        st.builds(lambda o, p: N.Member(o, N.Lit(p), False), children, NAMES),
        st.builds(lambda o, p: N.Member(o, p, True), children, children),
        st.builds(lambda e: N.ArrayLit(tuple(e)), st.lists(children, max_size=3)),
        st.builds(N.Assign, NAMES.map(N.VarRef), st.sampled_from(["=", "+=", "-=", "|="]),
                  children),
        st.builds(lambda a, b: N.Sequence((a, b)), children, children),
    )


exprs = st.recursive(st.one_of(lits, NAMES.map(N.VarRef), st.just(N.This())), _extend,
                     max_leaves=12)


def statement_strategy(in_function: bool):
    def extend(children):
        body = st.lists(children, max_size=3).map(tuple)
        options = [
            st.builds(N.If, exprs, body, st.one_of(st.none(), body)),
            st.builds(N.While, exprs, body),
            st.builds(N.Block, body),
        ]
        return st.one_of(*options)

    leaves = [exprs.map(N.ExprStmt), st.builds(N.Throw, exprs)]
    if in_function:
        leaves.append(st.builds(N.Return, st.one_of(st.none(), exprs)))
    return st.recursive(st.one_of(*leaves), extend, max_leaves=8)


def _fn(name, params, body):
    return N.FunDecl(name, tuple(params), tuple(body))


scripts = st.builds(
    lambda fns, body: N.Script(tuple(fns) + tuple(body), "<input>"),
    st.lists(st.builds(_fn, st.sampled_from(["f", "g"]), st.lists(NAMES, max_size=2, unique=True),
                       st.lists(statement_strategy(True), max_size=3)),
             max_size=2, unique_by=lambda f: f.name),
    st.lists(statement_strategy(False), max_size=4))
