from __future__ import annotations

import pytest

from jsdeob import metrics as M
from jsdeob.frontend import load


def measure(src):
    return M.measure(load(src))


def test_straight_line_function():
    r = measure("function f(a) { var b = a + 1; return b; }")
    assert r.function_count == 1
    assert r.cyclomatic_per_function == [1, 1]
    assert r.mean_cyclomatic == 1.0


def test_decision_points():
    r = measure("if (a && b) { c(); } else if (d) { e(); } for (;;) { x = y ? 1 : 2; }"
                " function g() { switch (q) { case 1: case 2: default: } while (c || d) {} }")
    assert r.cyclomatic_per_function == [6, 5]
    assert r.mean_cyclomatic == 5.5


def test_empty_script():
    r = measure("")
    assert (r.physical_loc, r.function_count, r.halstead_length) == (0, 0, 0)
    assert r.cyclomatic_per_function == [1]


def test_halstead_counts_operators_and_operands():
    # operators: function var = + return; operands: f a b b a 1 b
    r = measure("function f(a) { var b = a + 1; return b; }")
    assert (r.operator_count, r.operand_count, r.halstead_length) == (5, 7, 12)


def test_loc_counts_printed_lines():
    assert measure("a();b();c();").physical_loc == 3
    assert measure("function f() {\n\n\n a(); }").physical_loc == 3


@pytest.mark.parametrize("before,after,percent", [
    (475, 12, 97.47), (5994.62, 4297.03, 28.31), (100, 100, 0.0), (10, 20, -100.0),
])
def test_decrease(before, after, percent):
    d = M.decrease(before, after)
    assert d.percent == pytest.approx(percent, abs=0.01)
    assert d.absolute == pytest.approx(before - after)


def test_zero_baseline():
    d = M.decrease(0, 5)
    assert d.undefined_percent and d.percent == 0.0


def test_aggregate_totals_and_means():
    a = M.aggregate([measure("function f() {} x();"), measure("if (a) b(); if (c) d();")])
    assert a.samples == 2
    assert a.function_count == 1
    assert a.mean_cyclomatic == pytest.approx((1.0 + 3.0) / 2)
    cmp = M.compare(a, a)
    assert set(cmp) == set(M.COMPARED)
    assert all(d.percent == 0 for d in cmp.values())
    assert set(a.to_json()) == {"samples", *M.TABLE_LABELS.values()}


def test_report_json_names():
    j = measure("x = 1;").to_json()
    assert set(j) == {"physicalLoc", "functionCount", "cyclomaticPerFunction", "meanCyclomatic",
                      "halsteadLength", "operatorCount", "operandCount"}
