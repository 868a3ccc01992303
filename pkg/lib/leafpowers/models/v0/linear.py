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

"""Library for linear leaf powers and blue-red interval models.

A graph is a linear leaf power iff it has a leaf root whose tree is a caterpillar, and iff it
is a blue-red interval graph. This library holds both certificate kinds, the conversions
between them and their verifiers. All arithmetic uses `fractions.Fraction`.

## Blue-red interval models

Every vertex gets a closed rational interval and a color. Two blue vertices are adjacent iff
their intervals intersect, a red and a blue vertex are adjacent iff the red interval lies
inside the blue one, and two red vertices are never adjacent. With midpoints `m` and lengths
`l`, intervals intersect iff `|m1 - m2| <= (l1 + l2) / 2` and `I2` lies inside `I1` iff
`|m1 - m2| <= (l1 - l2) / 2`.

## Linear leaf roots

A weighted caterpillar: spine nodes `u_1..u_k` joined by spine edges of weight `e_i`, each
spine node carrying at most one leg of weight `f_i` to its leaf. Spine nodes without a leaf
(`None` in `spine_order`) join connected components. The distance between the leaves of
`u_i` and `u_j` is `f_i + e_i + ... + e_{j-1} + f_j`, and two leaves are adjacent iff that
distance is at most 1.

### Example

```python
from fractions import Fraction
from leafpowers.models.v0.linear import (
    BlueRedModel, RatInterval, bluered_to_linear_leafroot, verify_linear_leafroot,
)

model = BlueRedModel(
    blue={"a", "b"}, red=set(),
    intervals={"a": RatInterval(0, 1), "b": RatInterval(Fraction(1, 2), Fraction(3, 2))},
)
root = bluered_to_linear_leafroot(graph, model)
assert verify_linear_leafroot(graph, root)
```
"""

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from leafpowers.graphs.v0.core import (
    Graph,
    LeafPowerError,
    Verification,
    VertexSet,
    compare_adjacency,
    connected_components,
)

__all__ = [
    "ModelError",
    "RatInterval",
    "BlueRedModel",
    "LinearLeafRoot",
    "GeneralLeafRoot",
    "intervals_intersect",
    "interval_contains",
    "bluered_adjacent",
    "bluered_graph",
    "verify_bluered_model",
    "normalize_bluered",
    "bluered_to_linear_leafroot",
    "linear_leafroot_to_bluered",
    "linear_root_graph",
    "verify_linear_leafroot",
    "linear_root_to_general",
    "verify_general_leafroot",
]

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before publishing the library, or reset
# to 0 if you are raising the major API version
LIBPATCH = 1

_logger = logging.getLogger(__name__)

_HALF = Fraction(1, 2)


class ModelError(LeafPowerError):
    """Exception raised when a model is malformed or does not fit an operation."""


@dataclass(init=False, frozen=True)
class RatInterval:
    """Closed interval with rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __init__(self, lo: Fraction | int | str, hi: Fraction | int | str):
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ModelError(f"interval `[{lo}, {hi}]` has its endpoints swapped")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def midpoint(self) -> Fraction:
        """Midpoint `(lo + hi) / 2`."""
        return (self.lo + self.hi) / 2

    @property
    def length(self) -> Fraction:
        """Length `hi - lo`."""
        return self.hi - self.lo

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


@dataclass(init=False, frozen=True)
class BlueRedModel:
    """Blue-red interval model: a color and an interval per vertex."""

    blue: VertexSet
    red: VertexSet
    intervals: Mapping[str, RatInterval]

    def __init__(
        self,
        blue: Iterable[str],
        red: Iterable[str],
        intervals: Mapping[str, RatInterval | tuple],
    ):
        blue, red = frozenset(blue), frozenset(red)
        if both := blue & red:
            raise ModelError(f"vertices `{sorted(both)}` are both blue and red")
        object.__setattr__(self, "blue", blue)
        object.__setattr__(self, "red", red)
        object.__setattr__(
            self,
            "intervals",
            {
                str(v): i if isinstance(i, RatInterval) else RatInterval(*i)
                for v, i in intervals.items()
            },
        )

    @property
    def vertices(self) -> VertexSet:
        """Colored vertices."""
        return self.blue | self.red

    def color(self, v: str) -> str:
        """Get `blue` or `red`."""
        return "red" if v in self.red else "blue"


@dataclass(init=False, frozen=True)
class LinearLeafRoot:
    """Weighted caterpillar leaf root.

    Notes:
        `spine_order[i]` is the leaf hanging off spine node `u_{i+1}`, or None for a spine node
        without a leaf. `leg_weights` is aligned with `spine_order` and is None exactly where
        `spine_order` is.
    """

    spine_order: tuple[Optional[str], ...]
    spine_weights: tuple[Fraction, ...]
    leg_weights: tuple[Optional[Fraction], ...]

    def __init__(
        self,
        spine_order: Iterable[Optional[str]],
        spine_weights: Iterable[Fraction | int | str],
        leg_weights: Iterable[Optional[Fraction | int | str]],
    ):
        spine = tuple(None if v is None else str(v) for v in spine_order)
        edges = tuple(Fraction(w) for w in spine_weights)
        legs = tuple(None if w is None else Fraction(w) for w in leg_weights)

        if len(edges) != max(len(spine) - 1, 0) or len(legs) != len(spine):
            raise ModelError(
                f"caterpillar with {len(spine)} spine nodes needs {max(len(spine) - 1, 0)} "
                f"spine weights and {len(spine)} leg weights"
            )
        if any((v is None) != (w is None) for v, w in zip(spine, legs)):
            raise ModelError("leg weights must be given exactly for spine nodes with a leaf")
        leaves = [v for v in spine if v is not None]
        if len(set(leaves)) != len(leaves):
            raise ModelError("a vertex hangs off more than one spine node")
        for w in edges + tuple(w for w in legs if w is not None):
            if not 0 <= w <= 1:
                raise ModelError(f"weight `{w}` is outside [0, 1]")

        object.__setattr__(self, "spine_order", spine)
        object.__setattr__(self, "spine_weights", edges)
        object.__setattr__(self, "leg_weights", legs)

    @property
    def leaves(self) -> tuple[str, ...]:
        """Leaves in spine order."""
        return tuple(v for v in self.spine_order if v is not None)

    def positions(self) -> dict[str, Fraction]:
        """Spine distance from `u_1` to the spine node of every leaf."""
        result = {}
        at = Fraction(0)
        for i, v in enumerate(self.spine_order):
            if i:
                at += self.spine_weights[i - 1]
            if v is not None:
                result[v] = at
        return result

    def legs(self) -> dict[str, Fraction]:
        """Leg weight of every leaf."""
        return {v: w for v, w in zip(self.spine_order, self.leg_weights) if v is not None}


@dataclass(init=False, frozen=True)
class GeneralLeafRoot:
    """Leaf root on an arbitrary weighted tree."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, Fraction], ...]
    leaf_map: Mapping[str, str]
    """Vertex of the graph to the tree leaf representing it."""

    def __init__(
        self,
        nodes: Iterable[str],
        edges: Iterable[tuple[str, str, Fraction | int | str]],
        leaf_map: Mapping[str, str],
    ):
        nodes = tuple(str(n) for n in nodes)
        edges = tuple((str(a), str(b), Fraction(w)) for a, b, w in edges)
        known = set(nodes)
        degree = {n: 0 for n in nodes}
        for a, b, w in edges:
            if a not in known or b not in known:
                raise ModelError(f"tree edge `{a} {b}` references an unknown node")
            if not 0 <= w <= 1:
                raise ModelError(f"weight `{w}` is outside [0, 1]")
            degree[a] += 1
            degree[b] += 1
        if nodes and (len(edges) != len(nodes) - 1 or not _connected(nodes, edges)):
            raise ModelError("leaf root is not a tree")
        targets = list(leaf_map.values())
        if len(set(targets)) != len(targets):
            raise ModelError("two vertices share a leaf")
        if bad := [t for t in targets if degree.get(t, 2) > 1]:
            raise ModelError(f"nodes `{bad}` are not leaves of the tree")

        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "leaf_map", {str(k): str(t) for k, t in leaf_map.items()})

    def distances_from(self, node: str) -> dict[str, Fraction]:
        """Weighted distances from `node` to every node."""
        around: dict[str, list[tuple[str, Fraction]]] = {n: [] for n in self.nodes}
        for a, b, w in self.edges:
            around[a].append((b, w))
            around[b].append((a, w))
        dist = {node: Fraction(0)}
        queue = deque([node])
        while queue:
            a = queue.popleft()
            for b, w in around[a]:
                if b not in dist:
                    dist[b] = dist[a] + w
                    queue.append(b)
        return dist


def _connected(nodes: tuple[str, ...], edges: tuple[tuple[str, str, Fraction], ...]) -> bool:
    parent = {n: n for n in nodes}

    def find(n: str) -> str:
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    for a, b, _ in edges:
        parent[find(a)] = find(b)
    return len({find(n) for n in nodes}) == 1


def intervals_intersect(i1: RatInterval, i2: RatInterval) -> bool:
    """Check whether two intervals share a point."""
    return abs(i1.midpoint - i2.midpoint) <= (i1.length + i2.length) / 2


def interval_contains(outer: RatInterval, inner: RatInterval) -> bool:
    """Check whether `inner` lies inside `outer`."""
    return abs(outer.midpoint - inner.midpoint) <= (outer.length - inner.length) / 2


def bluered_adjacent(m: BlueRedModel, u: str, v: str) -> bool:
    """Adjacency of `u` and `v` under the blue-red semantics."""
    iu, iv = m.intervals[u], m.intervals[v]
    red_u, red_v = u in m.red, v in m.red
    if red_u and red_v:
        return False
    if not red_u and not red_v:
        return intervals_intersect(iu, iv)
    return interval_contains(iv, iu) if red_u else interval_contains(iu, iv)


def _check_cover(g: Graph, m: BlueRedModel) -> None:
    if missing := [v for v in g.vertices if v not in m.intervals]:
        raise ModelError(f"vertices `{missing}` have no interval")
    if uncolored := [v for v in g.vertices if v not in m.blue and v not in m.red]:
        raise ModelError(f"vertices `{uncolored}` have no color")


def bluered_graph(m: BlueRedModel) -> Graph:
    """Graph represented by a blue-red model."""
    vertices = list(m.intervals)
    edges = [
        (u, v)
        for i, u in enumerate(vertices)
        for v in vertices[i + 1 :]
        if bluered_adjacent(m, u, v)
    ]
    return Graph(vertices, edges)


def verify_bluered_model(g: Graph, m: BlueRedModel) -> Verification:
    """Check that the blue-red model represents exactly the edges of `g`.

    Raises:
        ModelError: if a vertex of `g` has no interval or no color.
    """
    _check_cover(g, m)
    return compare_adjacency(
        g,
        lambda u, v: bluered_adjacent(m, u, v),
        lambda u, v: (
            f"{m.color(u)} `{u}` {m.intervals[u]} and {m.color(v)} `{v}` {m.intervals[v]}"
        ),
    )


def _same_semantics(a: BlueRedModel, b: BlueRedModel) -> bool:
    vertices = list(a.intervals)
    return all(
        bluered_adjacent(a, u, v) == bluered_adjacent(b, u, v)
        for i, u in enumerate(vertices)
        for v in vertices[i + 1 :]
    )


def _rescaled(m: BlueRedModel, intervals: dict[str, RatInterval]) -> BlueRedModel:
    top = max((i.length for i in intervals.values()), default=Fraction(0))
    if top > 0:
        intervals = {v: RatInterval(i.lo / top, i.hi / top) for v, i in intervals.items()}
    return BlueRedModel(m.blue, m.red, intervals)


def normalize_bluered(m: BlueRedModel) -> BlueRedModel:
    """Rescale a model so that every interval length lies in (0, 1].

    Intervals are divided by the largest length, then every zero-length interval `[p, p]`
    becomes `[p, p + eps]` where `eps` is a quarter of the smallest positive gap between two
    model endpoints. When that extension would change an adjacency (a red point on the right
    end of a blue interval), blue intervals are widened by `eps` and red ones by `eps / 2` on
    both sides instead, and the result is rescaled again.
    """
    scaled = _rescaled(m, dict(m.intervals))
    if all(i.length > 0 for i in scaled.intervals.values()):
        return scaled

    points = sorted({p for i in scaled.intervals.values() for p in (i.lo, i.hi)})
    gaps = [b - a for a, b in zip(points, points[1:])]
    eps = min(min(gaps, default=Fraction(4)) / 4, Fraction(1))
    _logger.debug(f"normalize_bluered: extending zero-length intervals by `{eps}`")

    extended = BlueRedModel(
        m.blue,
        m.red,
        {
            v: RatInterval(i.lo, i.lo + eps) if i.length == 0 else i
            for v, i in scaled.intervals.items()
        },
    )
    if _same_semantics(scaled, extended):
        return extended

    _logger.debug("normalize_bluered: right extension changes adjacency, widening instead")
    widened = _rescaled(
        m,
        {
            v: RatInterval(i.lo - eps / 2, i.hi + eps / 2)
            if v in m.red
            else RatInterval(i.lo - eps, i.hi + eps)
            for v, i in scaled.intervals.items()
        },
    )
    if not _same_semantics(scaled, widened):
        raise ModelError("could not normalize the model without changing its graph")
    return widened


def bluered_to_linear_leafroot(g: Graph, m: BlueRedModel) -> LinearLeafRoot:
    """Build a caterpillar leaf root from a verified, normalized blue-red model.

    Inside every connected component the leaves follow the interval midpoints, spine weights
    are midpoint differences and the leg of `v` weighs `(1 - l(v)) / 2` when blue and
    `(1 + l(v)) / 2` when red. Components are chained through a leafless spine node with two
    spine edges of weight 1.

    Raises:
        ModelError: if the model does not cover `g` or is not normalized.
    """
    _check_cover(g, m)
    if bad := [v for v in g.vertices if not 0 < m.intervals[v].length <= 1]:
        raise ModelError(f"model is not normalized, see vertices `{bad}`")

    spine: list[Optional[str]] = []
    edges: list[Fraction] = []
    legs: list[Optional[Fraction]] = []
    for block in connected_components(g):
        members = sorted(block, key=lambda v: (m.intervals[v].midpoint, g.index(v)))
        if spine:
            spine.append(None)
            legs.append(None)
            edges += [Fraction(1), Fraction(1)]
        for k, v in enumerate(members):
            interval = m.intervals[v]
            if k:
                edges.append(interval.midpoint - m.intervals[members[k - 1]].midpoint)
            spine.append(v)
            sign = 1 if v in m.red else -1
            legs.append((1 + sign * interval.length) / 2)

    _logger.debug(f"bluered_to_linear_leafroot: caterpillar with {len(spine)} spine nodes")
    return LinearLeafRoot(spine, edges, legs)


def linear_leafroot_to_bluered(g: Graph, r: LinearLeafRoot) -> BlueRedModel:
    """Build a blue-red model from a caterpillar leaf root.

    The midpoint of `v` is the spine distance from `u_1` to its spine node. A leg `w <= 1/2`
    gives a blue interval of length `1 - 2w`, a heavier leg a red one of length `2w - 1`.
    Isolated vertices of `g` get disjoint zero-length blue intervals past every other
    interval.

    Raises:
        ModelError: if the leaves do not match the vertices of `g`.
    """
    if set(r.leaves) != set(g.vertices):
        raise ModelError("leaves of the caterpillar do not match the vertices of the graph")
    positions, legs = r.positions(), r.legs()

    blue, red = [], []
    intervals: dict[str, RatInterval] = {}
    isolated = [v for v in g.vertices if g.degree(v) == 0]
    for v in r.leaves:
        if v in isolated:
            continue
        w, at = legs[v], positions[v]
        if w > 1:
            raise ModelError(f"leg of `{v}` weighs `{w}` > 1")
        if w <= _HALF:
            blue.append(v)
            half = (1 - 2 * w) / 2
        else:
            red.append(v)
            half = (2 * w - 1) / 2
        intervals[v] = RatInterval(at - half, at + half)

    far = max((i.hi for i in intervals.values()), default=Fraction(0)) + 2
    for k, v in enumerate(isolated):
        blue.append(v)
        intervals[v] = RatInterval(far + 2 * k, far + 2 * k)
    return BlueRedModel(blue, red, intervals)


def _leaf_distance(
    positions: dict[str, Fraction], legs: dict[str, Fraction], u: str, v: str
) -> Fraction:
    return legs[u] + abs(positions[u] - positions[v]) + legs[v]


def linear_root_graph(r: LinearLeafRoot) -> Graph:
    """Graph represented by a caterpillar leaf root."""
    positions, legs = r.positions(), r.legs()
    leaves = r.leaves
    edges = [
        (u, v)
        for i, u in enumerate(leaves)
        for v in leaves[i + 1 :]
        if _leaf_distance(positions, legs, u, v) <= 1
    ]
    return Graph(leaves, edges)


def verify_linear_leafroot(g: Graph, r: LinearLeafRoot) -> Verification:
    """Check that leaves are adjacent in `g` exactly when their distance is at most 1.

    Raises:
        ModelError: if the leaves do not match the vertices of `g`.
    """
    if set(r.leaves) != set(g.vertices):
        raise ModelError("leaves of the caterpillar do not match the vertices of the graph")
    positions, legs = r.positions(), r.legs()
    return compare_adjacency(
        g,
        lambda u, v: _leaf_distance(positions, legs, u, v) <= 1,
        lambda u, v: f"tree distance {_leaf_distance(positions, legs, u, v)}",
    )


def linear_root_to_general(r: LinearLeafRoot) -> GeneralLeafRoot:
    """View a caterpillar as a general leaf root."""
    nodes = [f"spine-{i}" for i in range(len(r.spine_order))]
    edges = [(nodes[i], nodes[i + 1], w) for i, w in enumerate(r.spine_weights)]
    leaf_map = {}
    for i, (v, w) in enumerate(zip(r.spine_order, r.leg_weights)):
        if v is not None:
            leaf_map[v] = f"leaf-{v}"
            nodes.append(leaf_map[v])
            edges.append((nodes[i], leaf_map[v], w))
    return GeneralLeafRoot(nodes, edges, leaf_map)


def verify_general_leafroot(g: Graph, r: GeneralLeafRoot) -> Verification:
    """Check a leaf root on an arbitrary tree against `g`.

    Raises:
        ModelError: if the leaf map does not cover exactly the vertices of `g`.
    """
    if set(r.leaf_map) != set(g.vertices):
        raise ModelError("leaf map does not match the vertices of the graph")
    dist = {v: r.distances_from(r.leaf_map[v]) for v in g.vertices}
    return compare_adjacency(
        g,
        lambda u, v: dist[u][r.leaf_map[v]] <= 1,
        lambda u, v: f"tree distance {dist[u][r.leaf_map[v]]}",
    )
