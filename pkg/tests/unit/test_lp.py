#!/usr/bin/env python3
# Copyright 2024 The leafpowers Authors.
# See LICENSE file for licensing details.

"""Test the exact linear feasibility solver."""

import operator
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from leafpowers.oracle.v0.lp import FeasibilitySystem, InfeasibleError, UnknownVariableError

SENSES = {
    "<=": operator.le,
    ">=": operator.ge,
    "==": operator.eq,
    "<": operator.lt,
    ">": operator.gt,
}


def _holds(coefficients, sense, rhs, values) -> bool:
    total = sum(Fraction(w) * values[v] for v, w in coefficients.items())
    return SENSES[sense](total, rhs)


@st.composite
def systems_around_a_point(draw):
    """Random constraints, each satisfied by a fixed non-negative point."""
    names = [f"v{i}" for i in range(draw(st.integers(1, 4)))]
    point = {v: Fraction(draw(st.integers(0, 8)), 4) for v in names}
    rows = []
    for _ in range(draw(st.integers(1, 6))):
        coefficients = {v: draw(st.integers(-3, 3)) for v in names}
        sense = draw(st.sampled_from(sorted(SENSES)))
        value = sum(w * point[v] for v, w in coefficients.items())
        slack = Fraction(draw(st.integers(1, 4)), 4)
        match sense:
            case "<=" | ">=" | "==":
                rhs = value
            case "<":
                rhs = value + slack
            case ">":
                rhs = value - slack
        rows.append((coefficients, sense, rhs))
    return names, rows


class TestFeasibilitySystem:
    def test_strict_system(self):
        system = FeasibilitySystem(["x", "y"])
        system.add_constraint({"x": 1, "y": 1}, "<=", 1)
        system.add_constraint({"x": 1, "y": -1}, ">", 0)
        values = system.solve()
        assert values is not None
        assert values["x"] + values["y"] <= 1
        assert values["x"] > values["y"]

    def test_equalities(self):
        system = FeasibilitySystem(["x", "y"])
        system.add_constraint({"x": 1, "y": 1}, "==", 3)
        system.add_constraint({"x": 1, "y": -1}, "==", 1)
        assert system.solve() == {"x": 2, "y": 1}

    @pytest.mark.parametrize(
        ("rows", "feasible"),
        [
            ([({"x": 1}, ">=", 1), ({"x": 1}, "<=", 1)], True),
            ([({"x": 1}, ">", 1), ({"x": 1}, "<=", 1)], False),
            ([({"x": 1}, ">=", 2), ({"x": 1}, "<=", 1)], False),
            ([({"x": 1}, "<", 0)], False),
            ([({"x": -1}, ">=", -5)], True),
        ],
    )
    def test_boundaries(self, rows, feasible):
        system = FeasibilitySystem(["x"])
        for row in rows:
            system.add_constraint(*row)
        assert (system.solve() is not None) is feasible

    def test_require(self):
        system = FeasibilitySystem(["x"])
        system.add_constraint({"x": 1}, ">=", 2)
        assert system.require()["x"] >= 2
        system.add_constraint({"x": 1}, "<", 2)
        with pytest.raises(InfeasibleError):
            system.require()

    def test_maximize(self):
        system = FeasibilitySystem(["x", "y"])
        system.add_constraint({"x": 1, "y": 1}, "<=", 4)
        system.add_constraint({"x": 1}, "<=", 3)
        best, values = system.maximize({"x": 2, "y": 1})
        assert best == 7
        assert values == {"x": 3, "y": 1}

    def test_unbounded(self):
        system = FeasibilitySystem(["x"])
        with pytest.raises(InfeasibleError):
            system.maximize({"x": 1})

    def test_declarations(self):
        system = FeasibilitySystem(["x"])
        assert system.add_variable("x") == "x"
        assert system.variables == ("x",)
        with pytest.raises(UnknownVariableError):
            system.add_constraint({"y": 1}, "<=", 1)
        with pytest.raises(UnknownVariableError):
            system.maximize({"y": 1})
        with pytest.raises(ValueError):
            system.add_constraint({"x": 1}, "=<", 1)
        assert len(system) == 0

    @given(systems_around_a_point())
    @settings(max_examples=200)
    def test_finds_a_solution_when_one_exists(self, system_rows):
        names, rows = system_rows
        system = FeasibilitySystem(names)
        for row in rows:
            system.add_constraint(*row)
        values = system.solve()
        assert values is not None
        assert all(v >= 0 for v in values.values())
        assert all(_holds(*row, values) for row in rows)
