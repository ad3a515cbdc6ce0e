"""Code complexity metrics: physical LOC, function count, cyclomatic complexity, Halstead length.

Halstead counting follows the escomplex conventions: operators are the
operator tokens plus keywords that act as operators (`var`, `if`, `new`,
`typeof`, `return`, ...), and operands are identifiers and literals.  Only
totals are kept (N1, N2), never distinct counts, so renaming cannot change
the length.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable, List

from . import nodes as N
from .codegen import print_script


@dataclass(frozen=True)
class MetricsReport:
    physical_loc: int
    function_count: int
    cyclomatic_per_function: List[int] = field(default_factory=list)
    mean_cyclomatic: float = 1.0
    halstead_length: int = 0
    operator_count: int = 0
    operand_count: int = 0

    def to_json(self) -> dict:
        d = asdict(self)
        return {
            "physicalLoc": d["physical_loc"],
            "functionCount": d["function_count"],
            "cyclomaticPerFunction": d["cyclomatic_per_function"],
            "meanCyclomatic": d["mean_cyclomatic"],
            "halsteadLength": d["halstead_length"],
            "operatorCount": d["operator_count"],
            "operandCount": d["operand_count"],
        }


# Operators contributed by each node, besides anything counted separately below.
_STMT_KEYWORDS = {
    N.Return: 1, N.Throw: 1, N.Break: 1, N.Continue: 1, N.Switch: 1, N.While: 1,
    N.DoWhile: 2, N.For: 1, N.ForIn: 2, N.With: 1, N.Debugger: 1, N.Try: 1, N.Labeled: 1,
}


def _counts(node, acc):
    """Add the operators/operands of ``node`` itself (not its children) to ``acc``."""
    t = type(node)
    if t is N.Lit or t is N.VarRef or t is N.This or t is N.RegExpLit:
        acc[1] += 1
    elif t in (N.Infix, N.Assign, N.Prefix, N.Update, N.Cond, N.FunApp, N.New):
        acc[0] += 1
    elif t is N.Member:
        acc[0] += 1  # a dotted property name is a Lit child, counted as an operand
    elif t is N.Sequence:
        acc[0] += max(len(node.exprs) - 1, 0)
    elif t is N.ArrayLit:
        acc[0] += 1
    elif t is N.ObjectLit:
        acc[0] += 1 + len(node.props)  # braces, one `:` per property
    elif t is N.FunDecl or t is N.FunExpr:
        acc[0] += 1
        acc[1] += len(node.params) + (1 if node.name else 0)
    elif t is N.VarDecl:
        acc[0] += 1 + (node.init is not None)
        acc[1] += 1
    elif t is N.If:
        acc[0] += 1 + (node.else_ is not None)
    elif t is N.Case:
        acc[0] += 1
    elif t is N.Try:
        acc[0] += 1 + (node.handler is not None) + (node.finalizer is not None)
        acc[1] += 1 if node.param else 0
    elif t in _STMT_KEYWORDS:
        acc[0] += _STMT_KEYWORDS[t]
        if t in (N.Break, N.Continue, N.Labeled) and node.label:
            acc[1] += 1


def _decision_points(node) -> int:
    t = type(node)
    if t in (N.If, N.Cond, N.While, N.DoWhile, N.For, N.ForIn):
        return 1
    if t is N.Case:
        return 1 if node.test is not None else 0
    if t is N.Try:
        return 1 if node.handler is not None else 0
    if t is N.Infix and node.op in ("&&", "||"):
        return 1
    return 0


def measure(script: N.Script) -> MetricsReport:
    text = print_script(script)
    loc = sum(1 for line in text.split("\n") if line.strip())
    acc = [0, 0]
    cyclomatic = [1]  # index 0: the top-level pseudo-function
    functions = 0
    stack = [(s, 0) for s in reversed(script.body)]
    while stack:
        n, fi = stack.pop()
        _counts(n, acc)
        if isinstance(n, N.FUNCTION_NODES):
            functions += 1
            cyclomatic.append(1)
            fi = len(cyclomatic) - 1
        else:
            cyclomatic[fi] += _decision_points(n)
        stack.extend((c, fi) for c in reversed(list(N.children(n))))
    return MetricsReport(
        physical_loc=loc,
        function_count=functions,
        cyclomatic_per_function=cyclomatic,
        mean_cyclomatic=sum(cyclomatic) / len(cyclomatic),
        halstead_length=acc[0] + acc[1],
        operator_count=acc[0],
        operand_count=acc[1],
    )


# -- comparison ----------------------------------------------------------------

COMPARED = ("physical_loc", "function_count", "mean_cyclomatic", "halstead_length")
TABLE_LABELS = {
    "physical_loc": "Total physical LOC",
    "function_count": "Total num. functions",
    "mean_cyclomatic": "Mean cyclomatic complexity",
    "halstead_length": "Mean Halstead length",
}


@dataclass(frozen=True)
class Delta:
    before: float
    after: float
    absolute: float
    percent: float
    undefined_percent: bool = False  # before was 0; percent reported as 0

    def to_json(self) -> dict:
        return {"before": self.before, "after": self.after, "absolute": self.absolute,
                "percentDecrease": self.percent, "zeroBaseline": self.undefined_percent}


def decrease(before: float, after: float) -> Delta:
    """Absolute and percentage decrease; increases come out negative."""
    if before == 0:
        return Delta(before, after, before - after, 0.0, True)
    return Delta(before, after, before - after, 100.0 * (before - after) / before)


def compare(before, after) -> dict:
    """Per-metric decrease between two reports (or aggregates exposing the same fields)."""
    return {m: decrease(getattr(before, m), getattr(after, m)) for m in COMPARED}


@dataclass(frozen=True)
class Aggregate:
    """Corpus totals and means in the same shape as a single report."""

    samples: int
    physical_loc: float
    function_count: float
    mean_cyclomatic: float
    halstead_length: float

    def to_json(self) -> dict:
        return {"samples": self.samples, **{TABLE_LABELS[m]: getattr(self, m) for m in COMPARED}}


def aggregate(reports: Iterable[MetricsReport]) -> Aggregate:
    """Total LOC and functions; per-sample mean of cyclomatic and Halstead length."""
    reports = list(reports)
    n = len(reports)
    if n == 0:
        return Aggregate(0, 0, 0, 0.0, 0.0)
    return Aggregate(
        samples=n,
        physical_loc=sum(r.physical_loc for r in reports),
        function_count=sum(r.function_count for r in reports),
        mean_cyclomatic=sum(r.mean_cyclomatic for r in reports) / n,
        halstead_length=sum(r.halstead_length for r in reports) / n,
    )
