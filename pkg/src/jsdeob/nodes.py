"""AST for the supported ES5 subset, plus the generic bottom-up rewrite engine.

Nodes are frozen dataclasses; passes never mutate a tree, they build a new one
and share every untouched subtree.  Statement bodies are always tuples of
statements.  Literal values use plain Python objects:

    str        JavaScript string, stored as UTF-16 code units (one char each)
    float      JavaScript number
    bool       JavaScript boolean
    None       null
    UNDEFINED  undefined
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, fields, replace
from typing import Callable, Optional, Tuple, Union

from .stack import deep_recursion

DEFAULT_RECURSION_LIMIT = 10_000


class RecursionLimitError(Exception):
    """Raised when a tree is nested deeper than the configured bound."""


class _Undefined:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDEFINED"

    def __reduce__(self):
        return (_Undefined, ())


UNDEFINED = _Undefined()

LitValue = Union[str, float, bool, None, _Undefined]


def lit_key(value: LitValue) -> tuple:
    """Identity key for a literal: NaN equals NaN, +0 and -0 differ."""
    if isinstance(value, bool):
        return ("b", value)
    if isinstance(value, float):
        if value != value:
            return ("n", "nan")
        return ("n", struct.pack(">d", value))
    if isinstance(value, str):
        return ("s", value)
    if value is None:
        return ("null",)
    return ("u",)


class Node:
    __slots__ = ()


class Expr(Node):
    __slots__ = ()


class Stmt(Node):
    __slots__ = ()


Body = Tuple[Stmt, ...]


@dataclass(frozen=True, eq=False, slots=True)
class Lit(Expr):
    value: LitValue

    def __post_init__(self):
        v = self.value
        if isinstance(v, int) and not isinstance(v, bool):
            object.__setattr__(self, "value", float(v))

    def __eq__(self, other):
        return isinstance(other, Lit) and lit_key(self.value) == lit_key(other.value)

    def __hash__(self):
        return hash(lit_key(self.value))


@dataclass(frozen=True, slots=True)
class VarRef(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class This(Expr):
    pass


@dataclass(frozen=True, slots=True)
class RegExpLit(Expr):
    pattern: str
    flags: str = ""


@dataclass(frozen=True, slots=True)
class Infix(Expr):
    left: Expr
    op: str
    right: Expr


@dataclass(frozen=True, slots=True)
class Prefix(Expr):
    op: str
    operand: Expr


@dataclass(frozen=True, slots=True)
class Update(Expr):
    op: str  # '++' or '--'
    prefix: bool
    target: Expr


@dataclass(frozen=True, slots=True)
class Assign(Expr):
    target: Expr  # VarRef or Member
    op: str
    value: Expr


@dataclass(frozen=True, slots=True)
class Cond(Expr):
    test: Expr
    then: Expr
    else_: Expr


@dataclass(frozen=True, slots=True)
class FunApp(Expr):
    callee: Expr
    args: Tuple[Expr, ...] = ()


@dataclass(frozen=True, slots=True)
class New(Expr):
    callee: Expr
    args: Tuple[Expr, ...] = ()


@dataclass(frozen=True, slots=True)
class Member(Expr):
    obj: Expr
    prop: Expr  # Lit(str) when not computed
    computed: bool = False


@dataclass(frozen=True, slots=True)
class ArrayLit(Expr):
    elements: Tuple[Optional[Expr], ...] = ()  # None is a hole


@dataclass(frozen=True, slots=True)
class Prop(Node):
    key: Lit  # str or number key
    value: Expr


@dataclass(frozen=True, slots=True)
class ObjectLit(Expr):
    props: Tuple[Prop, ...] = ()


@dataclass(frozen=True, slots=True)
class Sequence(Expr):
    exprs: Tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class FunExpr(Expr):
    name: Optional[str]
    params: Tuple[str, ...]
    body: Body


# -- statements --------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ExprStmt(Stmt):
    expr: Expr


@dataclass(frozen=True, slots=True)
class VarDecl(Stmt):
    name: str
    init: Optional[Expr] = None
    original_name: Optional[str] = None


@dataclass(frozen=True, slots=True)
class FunDecl(Stmt):
    name: str
    params: Tuple[str, ...]
    body: Body
    original_name: Optional[str] = None


@dataclass(frozen=True, slots=True)
class Return(Stmt):
    value: Optional[Expr] = None


@dataclass(frozen=True, slots=True)
class If(Stmt):
    test: Expr
    then: Body
    else_: Optional[Body] = None


@dataclass(frozen=True, slots=True)
class Case(Node):
    test: Optional[Expr]  # None is `default:`
    body: Body


@dataclass(frozen=True, slots=True)
class Switch(Stmt):
    scrutinee: Expr
    cases: Tuple[Case, ...]


@dataclass(frozen=True, slots=True)
class While(Stmt):
    test: Expr
    body: Body


@dataclass(frozen=True, slots=True)
class DoWhile(Stmt):
    body: Body
    test: Expr


@dataclass(frozen=True, slots=True)
class For(Stmt):
    # init is an expression, a tuple of VarDecls (before hoisting) or None
    init: Union[Expr, Tuple[VarDecl, ...], None]
    test: Optional[Expr]
    update: Optional[Expr]
    body: Body


@dataclass(frozen=True, slots=True)
class ForIn(Stmt):
    left: Union[Expr, VarDecl]
    obj: Expr
    body: Body


@dataclass(frozen=True, slots=True)
class Block(Stmt):
    body: Body


@dataclass(frozen=True, slots=True)
class With(Stmt):
    obj: Expr
    body: Body


@dataclass(frozen=True, slots=True)
class Try(Stmt):
    block: Body
    param: Optional[str] = None
    handler: Optional[Body] = None
    finalizer: Optional[Body] = None


@dataclass(frozen=True, slots=True)
class Throw(Stmt):
    expr: Expr


@dataclass(frozen=True, slots=True)
class Break(Stmt):
    label: Optional[str] = None


@dataclass(frozen=True, slots=True)
class Continue(Stmt):
    label: Optional[str] = None


@dataclass(frozen=True, slots=True)
class Labeled(Stmt):
    label: str
    body: Body


@dataclass(frozen=True, slots=True)
class Debugger(Stmt):
    pass


@dataclass(frozen=True, slots=True)
class Empty(Stmt):
    pass


@dataclass(frozen=True)
class Script:
    body: Body
    source_name: str = "<input>"


@dataclass(frozen=True)
class PassOutcome:
    script: Script
    changed: bool


FUNCTION_NODES = (FunDecl, FunExpr)
LOOP_NODES = (While, DoWhile, For, ForIn)

# -- generic traversal -------------------------------------------------------

# Field names holding child nodes, per class (scalars such as names/ops are skipped).
_CHILD_FIELDS: dict = {}


def _child_fields(cls) -> tuple:
    try:
        return _CHILD_FIELDS[cls]
    except KeyError:
        scalar = {"name", "op", "prefix", "computed", "pattern", "flags", "params",
                  "label", "param", "original_name", "value"}
        names = tuple(f.name for f in fields(cls) if f.name not in scalar
                      or (f.name == "value" and cls is not Lit))
        _CHILD_FIELDS[cls] = names
        return names


def children(node: Node):
    """Yield the direct child nodes of ``node`` in source order."""
    for name in _child_fields(type(node)):
        v = getattr(node, name)
        if isinstance(v, Node):
            yield v
        elif isinstance(v, tuple):
            for item in v:
                if isinstance(item, Node):
                    yield item


def map_children(node: Node, fn: Callable[[Node, str], Node]) -> Node:
    """Rebuild ``node`` with ``fn(child, field_name)`` applied to each child.

    Returns ``node`` itself when no child changed identity.
    """
    updates = {}
    for name in _child_fields(type(node)):
        v = getattr(node, name)
        if isinstance(v, Node):
            nv = fn(v, name)
            if nv is not v:
                updates[name] = nv
        elif isinstance(v, tuple):
            items = []
            dirty = False
            for item in v:
                if isinstance(item, Node):
                    ni = fn(item, name)
                    dirty = dirty or ni is not item
                    items.append(ni)
                else:
                    items.append(item)
            if dirty:
                updates[name] = tuple(items)
    if not updates:
        return node
    return replace(node, **updates)


def walk(node: Node):
    """Pre-order iteration over ``node`` and all of its descendants."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(list(children(n))))


def walk_body(body) -> "iter":
    for stmt in body:
        yield from walk(stmt)


def tree_depth(node: Node) -> int:
    depth = 0
    stack = [(node, 1)]
    while stack:
        n, d = stack.pop()
        if d > depth:
            depth = d
        for c in children(n):
            stack.append((c, d + 1))
    return depth


def node_count(node: Node) -> int:
    return sum(1 for _ in walk(node))


# -- rewrite engine ----------------------------------------------------------

Rule = Callable[[Node], Optional[Node]]


def _is_slot(parent, field_name) -> bool:
    """Reference positions (assignment targets, `delete` operands) are never rewritten whole."""
    t = type(parent)
    if t is Assign or t is Update:
        return field_name == "target"
    if t is ForIn:
        return field_name == "left"
    return t is Prefix and parent.op == "delete"


@deep_recursion
def rewrite_bottom_up(script: Script, rule: Rule, *, limit: int = DEFAULT_RECURSION_LIMIT,
                      callee_rule: Optional[Rule] = None) -> PassOutcome:
    """Apply ``rule`` at every node, children first, until it stops matching.

    ``rule`` returns a replacement node or None.  Nodes sitting in the callee
    slot of a call or ``new`` are offered to ``callee_rule`` instead when one
    is given, since rewriting a callee can change the ``this`` binding.
    Assignment targets and `delete` operands are left whole (their children
    are still visited).
    """
    changed = False

    def visit(node, depth, callee, slot=False):
        nonlocal changed
        if depth > limit:
            raise RecursionLimitError(f"AST nesting exceeds {limit}")
        is_call = isinstance(node, (FunApp, New))
        node = map_children(node, lambda c, f: visit(
            c, depth + 1, is_call and f == "callee", _is_slot(node, f)))
        if slot:
            return node
        r = callee_rule if (callee and callee_rule is not None) else rule
        while True:
            out = r(node)
            if out is None or out == node:
                return node
            changed = True
            node = out

    body = tuple(visit(s, 1, False) for s in script.body)
    if not changed:
        return PassOutcome(script, False)
    return PassOutcome(Script(body, script.source_name), True)


@deep_recursion
def structural_eq(a, b) -> bool:
    """Exact structural equality; NaN literals match, +0 and -0 do not."""
    return a == b


def is_lit(node) -> bool:
    return isinstance(node, Lit)


def num(value) -> Lit:
    return Lit(float(value))


def is_nan(v) -> bool:
    return isinstance(v, float) and math.isnan(v)
