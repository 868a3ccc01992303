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

"""Library for chordal and interval graph recognition.

## Chordality

`recognize_chordal` runs Maximum Cardinality Search and checks that the reverse visit order is
a perfect elimination order. On failure it returns a chordless cycle of length at least four
as the witness. `maximal_cliques` reads the maximal cliques off the elimination order.

## Interval graphs

`recognize_interval` looks for a clique path: an ordering of the maximal cliques in which
the cliques holding any given vertex are consecutive. This is a consecutive-ones problem on
the clique/vertex incidence structure, solved by arranging every overlap component of the
vertex rows incrementally and nesting the components into each other.

`is_x_interval` asks for a clique path that ends in a given maximal clique X. It adds two
vertices `u`, `v` with N(u) = {v} and N(v) = {u} + X and tests the resulting graph for
intervalness; a clique path of that graph always has `{u, v}` next to `X + v`, which lets the
path be read back with X last.

### Example

```python
from leafpowers.graphs.v0.chordal import is_x_interval, recognize_interval
from leafpowers.graphs.v0.core import Graph

path = Graph(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d")])
recognize_interval(path).cliques   # ({a, b}, {b, c}, {c, d})
is_x_interval(path, {"a", "b"})    # path ending in {a, b}
```
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from leafpowers.graphs.v0.core import (
    Graph,
    LeafPowerError,
    VertexSet,
    bits,
    is_maximal_clique,
)

__all__ = [
    "NotChordalError",
    "NotMaximalCliqueError",
    "EliminationOrder",
    "ChordlessCycle",
    "CliquePath",
    "recognize_chordal",
    "is_chordless_cycle",
    "maximal_cliques",
    "consecutive_order",
    "recognize_interval",
    "verify_clique_path",
    "x_interval_gadget",
    "is_x_interval",
]

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before publishing the library, or reset
# to 0 if you are raising the major API version
LIBPATCH = 1

_logger = logging.getLogger(__name__)


class NotChordalError(LeafPowerError):
    """Exception raised when an operation requires a chordal graph."""


class NotMaximalCliqueError(LeafPowerError):
    """Exception raised when a vertex set is expected to be a maximal clique."""


@dataclass(frozen=True)
class EliminationOrder:
    """Perfect elimination order of a chordal graph."""

    order: tuple[str, ...]


@dataclass(frozen=True)
class ChordlessCycle:
    """Induced cycle of length at least four, witnessing non-chordality."""

    cycle: tuple[str, ...]


@dataclass(frozen=True)
class CliquePath:
    """Ordered maximal cliques where every vertex occurs in a consecutive run."""

    cliques: tuple[VertexSet, ...]

    def __len__(self) -> int:
        return len(self.cliques)

    def __iter__(self) -> Iterator[VertexSet]:
        return iter(self.cliques)

    def to_json(self) -> list[list[str]]:
        """Serialize as an ordered list of sorted vertex lists."""
        return [sorted(clique) for clique in self.cliques]


def _mcs(g: Graph) -> list[int]:
    """Maximum Cardinality Search visit order, ties broken by the smallest index."""
    n = len(g)
    weight = [0] * n
    buckets: list[set[int]] = [set() for _ in range(n + 1)]
    buckets[0].update(range(n))
    unvisited = g.full_mask
    top = 0
    visit = []
    for _ in range(n):
        while not buckets[top]:
            top -= 1
        v = min(buckets[top])
        buckets[top].remove(v)
        unvisited &= ~(1 << v)
        visit.append(v)
        for u in bits(g.adjacency(v) & unvisited):
            buckets[weight[u]].remove(u)
            weight[u] += 1
            buckets[weight[u]].add(u)
            top = max(top, weight[u])
    return visit


def _peo_violation(g: Graph, visit: list[int]) -> Optional[tuple[int, int, int]]:
    """Find `(v, p, w)` where the later neighbors `p`, `w` of `v` are non-adjacent.

    The elimination order is the reverse of `visit`, so the later neighbors of a vertex are
    its neighbors visited before it; `p` is the one eliminated first among them.
    """
    position = [0] * len(g)
    before = 0
    for step, v in enumerate(visit):
        later = g.adjacency(v) & before
        if later:
            parent = max(bits(later), key=position.__getitem__)
            if rest := later & ~(1 << parent) & ~g.adjacency(parent):
                return v, parent, next(bits(rest))
        position[v] = step
        before |= 1 << v
    return None


def _cycle_through(g: Graph, v: int, u: int, w: int) -> Optional[list[int]]:
    """Chordless cycle `v, u, ..., w` avoiding every other neighbor of `v`, if any."""
    blocked = (g.adjacency(v) | 1 << v) & ~(1 << u | 1 << w)
    allowed = g.full_mask & ~blocked
    parent: dict[int, Optional[int]] = {u: None}
    queue = deque([u])
    while queue and w not in parent:
        a = queue.popleft()
        for b in bits(g.adjacency(a) & allowed):
            if b not in parent:
                parent[b] = a
                queue.append(b)
    if w not in parent:
        return None
    path = []
    node: Optional[int] = w
    while node is not None:
        path.append(node)
        node = parent[node]
    return [v] + path[::-1]


def _find_chordless_cycle(g: Graph, hint: tuple[int, int, int]) -> list[int]:
    if cycle := _cycle_through(g, *hint):
        return cycle
    _logger.debug("recognize_chordal: elimination hint gave no cycle, searching all vertices")
    for v in range(len(g)):
        around = list(bits(g.adjacency(v)))
        for k, u in enumerate(around):
            for w in around[k + 1 :]:
                if not g.adjacency(u) >> w & 1 and (cycle := _cycle_through(g, v, u, w)):
                    return cycle
    raise NotChordalError("elimination order failed but no chordless cycle was found")


def recognize_chordal(g: Graph) -> EliminationOrder | ChordlessCycle:
    """Decide chordality.

    Returns:
        EliminationOrder | ChordlessCycle: a perfect elimination order of `g`, or an induced
        cycle of length at least four.
    """
    visit = _mcs(g)
    if violation := _peo_violation(g, visit):
        cycle = _find_chordless_cycle(g, violation)
        _logger.debug(f"recognize_chordal: chordless cycle `{[g.vertices[i] for i in cycle]}`")
        return ChordlessCycle(tuple(g.vertices[i] for i in cycle))
    return EliminationOrder(tuple(g.vertices[i] for i in reversed(visit)))


def is_chordless_cycle(g: Graph, cycle: Iterable[str]) -> bool:
    """Check that `cycle` is an induced cycle of `g` of length at least four."""
    cycle = list(cycle)
    if len(cycle) < 4 or len(set(cycle)) != len(cycle):
        return False
    k = len(cycle)
    for i, u in enumerate(cycle):
        for j in range(i + 1, k):
            consecutive = j == i + 1 or (i == 0 and j == k - 1)
            if g.adjacent(u, cycle[j]) != consecutive:
                return False
    return True


def _clique_masks(g: Graph) -> Optional[list[int]]:
    """Maximal cliques as bitsets, or None if `g` is not chordal."""
    if len(g) == 0:
        return [0]
    visit = _mcs(g)
    if _peo_violation(g, visit) is not None:
        return None
    before = 0
    candidates = []
    for v in visit:
        candidates.append((g.adjacency(v) & before) | 1 << v)
        before |= 1 << v
    kept: list[tuple[int, int]] = []
    by_size = sorted(enumerate(candidates), key=lambda item: -item[1].bit_count())
    for at, clique in by_size:
        if not any(clique & other == clique for _, other in kept):
            kept.append((at, clique))
    return [clique for _, clique in sorted(kept)]


def maximal_cliques(g: Graph) -> list[VertexSet]:
    """Maximal cliques of a chordal graph, each listed once.

    Raises:
        NotChordalError: if `g` is not chordal.
    """
    masks = _clique_masks(g)
    if masks is None:
        raise NotChordalError("maximal clique enumeration requires a chordal graph")
    return [g.members(mask) for mask in masks]


def _overlap(r: int, s: int) -> bool:
    return bool(r & s and r & ~s and s & ~r)


def _split(section: int, row: int, row_last: bool) -> list[int]:
    outside, inside = section & ~row, section & row
    parts = [outside, inside] if row_last else [inside, outside]
    return [part for part in parts if part]


def _place(sections: list[int], placed: int, row: int) -> Optional[list[int]]:
    """Insert a row overlapping an already placed row into the section sequence."""
    hit = [i for i, section in enumerate(sections) if section & row]
    if not hit:
        return None
    a, b = hit[0], hit[-1]
    if b - a + 1 != len(hit) or any(sections[i] & ~row for i in range(a + 1, b)):
        return None

    fresh = row & ~placed
    if not fresh:
        if a == b:
            return sections[:a] + _split(sections[a], row, True) + sections[a + 1 :]
        return (
            sections[:a]
            + _split(sections[a], row, True)
            + sections[a + 1 : b]
            + _split(sections[b], row, False)
            + sections[b + 1 :]
        )
    if b == len(sections) - 1 and (a == b or not sections[b] & ~row):
        return sections[:a] + _split(sections[a], row, True) + sections[a + 1 :] + [fresh]
    if a == 0 and (a == b or not sections[a] & ~row):
        return [fresh] + sections[:b] + _split(sections[b], row, False) + sections[b + 1 :]
    return None


def _overlap_components(rows: list[int]) -> list[list[int]]:
    """Overlap components, each listed so every row overlaps an earlier one."""
    seen = [False] * len(rows)
    components = []
    for start in range(len(rows)):
        if seen[start]:
            continue
        seen[start] = True
        found = [start]
        queue = deque([start])
        while queue:
            a = queue.popleft()
            for j, other in enumerate(rows):
                if not seen[j] and _overlap(rows[a], other):
                    seen[j] = True
                    found.append(j)
                    queue.append(j)
        components.append([rows[j] for j in found])
    return components


def _assemble(columns: int, components: list[tuple[int, list[int]]]) -> list[int]:
    tops = [
        c for c in components if not any(d[0] != c[0] and c[0] & d[0] == c[0] for d in components)
    ]
    order = []
    covered = 0
    for union, atoms in sorted(tops, key=lambda c: c[0] & -c[0]):
        inner = [d for d in components if d[0] != union and d[0] & union == d[0]]
        for atom in atoms:
            order += _assemble(atom, [d for d in inner if d[0] & atom == d[0]])
        covered |= union
    return order + list(bits(columns & ~covered))


def _consecutive(position: dict[int, int], row: int) -> bool:
    places = [position[c] for c in bits(row)]
    return max(places) - min(places) + 1 == len(places)


def consecutive_order(k: int, rows: Iterable[int]) -> Optional[list[int]]:
    """Order the columns `0..k-1` so that every row (a bitset of columns) is consecutive.

    Returns:
        Optional[list[int]]: the column order, or None if no such order exists.
    """
    everything = (1 << k) - 1
    distinct = sorted({r for r in rows if r & (r - 1) and r != everything})

    arranged = []
    for component in _overlap_components(distinct):
        sections = [component[0]]
        placed = component[0]
        for row in component[1:]:
            sections = _place(sections, placed, row)
            if sections is None:
                return None
            placed |= row
        arranged.append((placed, sections, len(component) > 1))

    # A lone row equal to the span of a larger component is consecutive once that component is.
    spans = {span for span, _, multiple in arranged if multiple}
    components = [
        (span, atoms) for span, atoms, multiple in arranged if multiple or span not in spans
    ]
    order = _assemble(everything, components)

    position = {c: i for i, c in enumerate(order)}
    if not all(_consecutive(position, row) for row in distinct):
        return None
    return order


def recognize_interval(g: Graph) -> Optional[CliquePath]:
    """Find a clique path of `g`, or None if `g` is not an interval graph."""
    cliques = _clique_masks(g)
    if cliques is None:
        return None
    rows = []
    for v in range(len(g)):
        row = 0
        for c, clique in enumerate(cliques):
            if clique >> v & 1:
                row |= 1 << c
        rows.append(row)
    order = consecutive_order(len(cliques), rows)
    if order is None:
        _logger.debug(f"recognize_interval: no consecutive arrangement of {len(cliques)} cliques")
        return None
    return CliquePath(tuple(g.members(cliques[c]) for c in order))


def verify_clique_path(
    g: Graph, path: CliquePath | Iterable[Iterable[str]], last: Optional[Iterable[str]] = None
) -> bool:
    """Check a clique path independently of how it was computed.

    Every clique must be a distinct maximal clique, every vertex and edge must be covered and
    every vertex must occur in a consecutive run. Together with the Helly property of runs
    this forces every maximal clique of `g` to appear.

    Args:
        g: host graph.
        path: cliques in order.
        last: if given, the clique that must close the path.
    """
    cliques = [frozenset(c) for c in path]
    if len(set(cliques)) != len(cliques):
        return False
    if last is not None and (not cliques or cliques[-1] != frozenset(last)):
        return False
    if len(g) == 0:
        return cliques in ([], [frozenset()])
    if not all(c and is_maximal_clique(g, c) for c in cliques):
        return False

    runs: dict[str, list[int]] = {v: [] for v in g.vertices}
    for i, clique in enumerate(cliques):
        for v in clique:
            runs[v].append(i)
    if not all(run and run[-1] - run[0] + 1 == len(run) for run in runs.values()):
        return False
    return all(set(runs[u]) & set(runs[v]) for u, v in g.edges)


def _fresh(g: Graph, base: str) -> str:
    name = base
    while name in g:
        name = f"_{name}"
    return name


def x_interval_gadget(g: Graph, x: Iterable[str]) -> tuple[Graph, str, str]:
    """Build the graph G' with N(u) = {v} and N(v) = {u} + X.

    Returns:
        tuple[Graph, str, str]: the graph G' and the names of `u` and `v`.
    """
    u, v = _fresh(g, "gadget-u"), _fresh(g, "gadget-v")
    return g.with_vertex(v, x).with_vertex(u, [v]), u, v


def is_x_interval(g: Graph, x: Iterable[str]) -> Optional[CliquePath]:
    """Find a clique path of `g` whose last clique is `x`.

    Raises:
        NotMaximalCliqueError: if `x` is not a maximal clique of `g`.
    """
    x = frozenset(x)
    if not is_maximal_clique(g, x):
        raise NotMaximalCliqueError(f"`{sorted(x)}` is not a maximal clique")
    if len(g) == 0:
        return CliquePath((x,))

    gadget, u, v = x_interval_gadget(g, x)
    path = recognize_interval(gadget)
    if path is None:
        return None

    cliques = list(path.cliques)
    at = cliques.index(frozenset((u, v)))
    if at + 1 < len(cliques) and v in cliques[at + 1]:
        ordered = cliques[:at] + cliques[at + 1 :][::-1]
    else:
        ordered = cliques[at + 1 :] + cliques[:at]
    return CliquePath(tuple(clique - {v} for clique in ordered))
