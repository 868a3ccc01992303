# Copyright 2024 The leafpowers Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Exact linear feasibility over the rationals.

`FeasibilitySystem` collects linear constraints over non-negative variables with senses
`<=`, `>=`, `==`, `<` and `>`. Strict constraints get a shared margin variable `delta`
(`a.x + delta <= b` for `a.x < b`), bounded by 1 and maximized; the system is feasible iff
the optimal margin is positive. Without strict constraints only feasibility is checked.

The solver is a two-phase dictionary simplex with Bland's rule, run on `Fraction` entries so
that boundary cases are decided exactly.

### Example

```python
from leafpowers.oracle.v0.lp import FeasibilitySystem

system = FeasibilitySystem(["x", "y"])
system.add_constraint({"x": 1, "y": 1}, "<=", 1)
system.add_constraint({"x": 1, "y": -1}, ">", 0)
system.solve()   # {"x": Fraction(1, 1), "y": Fraction(0, 1)}
```
"""

import logging
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from leafpowers.graphs.v0.core import LeafPowerError

__all__ = [
    "UnknownVariableError",
    "InfeasibleError",
    "FeasibilitySystem",
]

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before publishing the library, or reset
# to 0 if you are raising the major API version
LIBPATCH = 1

_logger = logging.getLogger(__name__)

_SENSES = ("<=", ">=", "==", "<", ">")


class UnknownVariableError(LeafPowerError):
    """Exception raised when a constraint uses an undeclared variable."""


class InfeasibleError(LeafPowerError):
    """Exception raised when a system that must be feasible is not."""


class _Dictionary:
    """Simplex dictionary `x_B = b - A x_N`, objective `z = z0 + c x_N`."""

    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], objective: list[Fraction]):
        self.a = [list(r) for r in rows]
        self.b = list(rhs)
        self.c = list(objective)
        self.z = Fraction(0)
        n, m = len(objective), len(rows)
        self.nonbasic = list(range(n))
        self.basic = list(range(n, n + m))

    def pivot(self, i: int, j: int) -> None:
        a, b, c = self.a, self.b, self.c
        piv = a[i][j]
        row = [v / piv for v in a[i]]
        row[j] = 1 / piv
        b[i] /= piv
        a[i] = row
        for k, other in enumerate(a):
            if k == i or not (f := other[j]):
                continue
            a[k] = [v - f * r for v, r in zip(other, row)]
            a[k][j] = -f / piv
            b[k] -= f * b[i]
        if f := c[j]:
            self.z += f * b[i]
            self.c = [v - f * r for v, r in zip(c, row)]
            self.c[j] = -f / piv
        self.nonbasic[j], self.basic[i] = self.basic[i], self.nonbasic[j]

    def optimize(self) -> bool:
        """Run Bland's rule to optimality; False when the objective is unbounded."""
        while True:
            entering = [(v, j) for j, v in enumerate(self.nonbasic) if self.c[j] > 0]
            if not entering:
                return True
            _, j = min(entering)
            leaving = [
                (self.b[i] / row[j], self.basic[i], i)
                for i, row in enumerate(self.a)
                if row[j] > 0
            ]
            if not leaving:
                return False
            *_, i = min(leaving)
            self.pivot(i, j)

    def value(self, var: int) -> Fraction:
        if var in self.basic:
            return self.b[self.basic.index(var)]
        return Fraction(0)


def _maximize(
    rows: list[list[Fraction]], rhs: list[Fraction], objective: list[Fraction]
) -> Optional[tuple[Fraction, list[Fraction]]]:
    """Maximize `c.x` subject to `A x <= b`, `x >= 0`; None when infeasible."""
    n = len(objective)
    if all(v >= 0 for v in rhs):
        table = _Dictionary(rows, rhs, objective)
    else:
        aux = n
        table = _Dictionary(
            [r + [Fraction(-1)] for r in rows], rhs, [Fraction(0)] * n + [Fraction(-1)]
        )
        worst = min(range(len(rhs)), key=lambda i: rhs[i])
        table.pivot(worst, aux)
        table.optimize()
        if table.z < 0:
            return None
        if aux in table.basic:
            i = table.basic.index(aux)
            j = next((j for j, v in enumerate(table.a[i]) if v and table.nonbasic[j] != aux), None)
            if j is None:
                del table.a[i], table.b[i], table.basic[i]
            else:
                table.pivot(i, j)
        drop = table.nonbasic.index(aux)
        for row in table.a:
            del row[drop]
        del table.nonbasic[drop]

        table.z, table.c = Fraction(0), [Fraction(0)] * n
        for var, weight in enumerate(objective):
            if not weight:
                continue
            if var in table.basic:
                i = table.basic.index(var)
                table.z += weight * table.b[i]
                table.c = [v - weight * r for v, r in zip(table.c, table.a[i])]
            else:
                table.c[table.nonbasic.index(var)] += weight

    if not table.optimize():
        raise InfeasibleError("objective is unbounded")
    return table.z, [table.value(v) for v in range(n)]


class FeasibilitySystem:
    """Linear constraints over non-negative rational variables."""

    def __init__(self, variables: Iterable[str] = ()):
        self._variables: list[str] = []
        self._rows: list[tuple[dict[str, Fraction], str, Fraction]] = []
        for name in variables:
            self.add_variable(name)

    @property
    def variables(self) -> tuple[str, ...]:
        """Declared variables in declaration order."""
        return tuple(self._variables)

    def __len__(self) -> int:
        return len(self._rows)

    def add_variable(self, name: str) -> str:
        """Declare a non-negative variable."""
        if name not in self._variables:
            self._variables.append(name)
        return name

    def add_constraint(
        self, coefficients: Mapping[str, Fraction | int], sense: str, rhs: Fraction | int
    ) -> None:
        """Add `sum(coefficients[v] * v) <sense> rhs`.

        Raises:
            UnknownVariableError: if a coefficient names an undeclared variable.
        """
        if sense not in _SENSES:
            raise ValueError(f"unknown constraint sense `{sense}`")
        if unknown := [v for v in coefficients if v not in self._variables]:
            raise UnknownVariableError(f"variables `{unknown}` are not declared")
        self._rows.append(
            ({v: Fraction(w) for v, w in coefficients.items() if w}, sense, Fraction(rhs))
        )

    def _standard_form(
        self, margin: bool, relax: bool = False
    ) -> tuple[list[list[Fraction]], list[Fraction]]:
        index = {v: k for k, v in enumerate(self._variables)}
        width = len(self._variables) + (1 if margin else 0)
        rows, rhs = [], []

        def emit(coefficients: dict[str, Fraction], bound: Fraction, delta: int) -> None:
            row = [Fraction(0)] * width
            for v, w in coefficients.items():
                row[index[v]] = w
            if margin:
                row[-1] = Fraction(delta)
            rows.append(row)
            rhs.append(bound)

        for coefficients, sense, bound in self._rows:
            negated = {v: -w for v, w in coefficients.items()}
            if relax and sense in ("<", ">"):
                sense += "="
            match sense:
                case "<=":
                    emit(coefficients, bound, 0)
                case "<":
                    emit(coefficients, bound, 1)
                case ">=":
                    emit(negated, -bound, 0)
                case ">":
                    emit(negated, -bound, 1)
                case "==":
                    emit(coefficients, bound, 0)
                    emit(negated, -bound, 0)
        if margin:
            rows.append([Fraction(0)] * (width - 1) + [Fraction(1)])
            rhs.append(Fraction(1))
        return rows, rhs

    def maximize(
        self, objective: Mapping[str, Fraction | int]
    ) -> Optional[tuple[Fraction, dict[str, Fraction]]]:
        """Maximize a linear objective over the non-strict constraints.

        Strict constraints are treated as non-strict here.

        Returns:
            The optimum and an optimal assignment, or None when infeasible.
        """
        if unknown := [v for v in objective if v not in self._variables]:
            raise UnknownVariableError(f"variables `{unknown}` are not declared")
        rows, rhs = self._standard_form(margin=False, relax=True)
        result = _maximize(rows, rhs, [Fraction(objective.get(v, 0)) for v in self._variables])
        if result is None:
            return None
        best, values = result
        return best, dict(zip(self._variables, values))

    def solve(self) -> Optional[dict[str, Fraction]]:
        """Find an assignment satisfying every constraint, or None if there is none."""
        strict = any(sense in ("<", ">") for _, sense, _ in self._rows)
        rows, rhs = self._standard_form(margin=strict)
        width = len(self._variables) + (1 if strict else 0)
        objective = [Fraction(0)] * width
        if strict:
            objective[-1] = Fraction(1)

        result = _maximize(rows, rhs, objective)
        if result is None:
            return None
        best, values = result
        if strict and best <= 0:
            _logger.debug(f"solve: strict constraints leave no room, margin `{best}`")
            return None
        return dict(zip(self._variables, values))

    def require(self) -> dict[str, Fraction]:
        """Like `solve`, but raise when the system is infeasible.

        Raises:
            InfeasibleError: if no assignment satisfies every constraint.
        """
        if (values := self.solve()) is None:
            raise InfeasibleError(f"system of {len(self)} constraints is infeasible")
        return values
