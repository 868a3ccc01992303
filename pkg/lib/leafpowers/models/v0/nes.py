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

"""Library for neighborhood subtree (NeS) models on embedded trees.

An embedded tree is a tree whose edges are line segments of positive rational length. Every
point of a segment is a point of the tree, and the distance between two points is the length
of the unique path joining them. A NeS model gives every vertex a ball of that metric: a
center point and a radius. Two vertices are adjacent iff their balls intersect, which in a
tree happens iff the distance between the centers is at most the sum of the radii.

## Points

Points are either a node or an `(edge, offset)` pair strictly inside an edge, with the
offset measured from the first endpoint of the edge as stored in the tree. Use
`EmbeddedTree.point` to build them: offsets landing on an endpoint collapse to the node, so
equal points compare equal.

## Closure rules

`add_universal`, `add_pendant`, `add_simplicial_max_clique` and `add_min_separator` extend a
model of `G - u` into a model of `G` when `u` is universal, has a single neighbor, has a
neighborhood forming a maximal clique of `G - u`, or has a neighborhood forming a minimal
separator of `G - u`. `merge_at_cut_vertex` glues models of the blocks around a cut vertex.

### Example

```python
from leafpowers.models.v0.nes import Ball, EmbeddedTree, NesModel, add_pendant

tree = EmbeddedTree(["a", "b"], [("a", "b", 2)])
k2 = NesModel(tree, {"x": Ball(tree.point(node="a"), 1), "y": Ball(tree.point(node="b"), 1)})
p3 = add_pendant(k2, graph, "z", "y")
```
"""

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence

from leafpowers.graphs.v0.chordal import CliquePath
from leafpowers.graphs.v0.core import (
    Graph,
    LeafPowerError,
    UnknownVertexError,
    Verification,
    compare_adjacency,
    connected_components,
    is_maximal_clique,
    is_minimal_separator,
)
from leafpowers.models.v0.linear import ModelError

__all__ = [
    "PreconditionError",
    "TreePoint",
    "EmbeddedTree",
    "Ball",
    "NesModel",
    "point_distance",
    "point_along",
    "balls_intersect",
    "balls_intersection",
    "nes_graph",
    "verify_nes_model",
    "scale_model",
    "isolate",
    "add_universal",
    "add_pendant",
    "add_simplicial_max_clique",
    "add_min_separator",
    "merge_at_cut_vertex",
    "interval_nes_model",
]

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before publishing the library, or reset
# to 0 if you are raising the major API version
LIBPATCH = 1

_logger = logging.getLogger(__name__)


class PreconditionError(LeafPowerError):
    """Exception raised when the structural condition of a construction does not hold."""


@dataclass(frozen=True)
class TreePoint:
    """A point of an embedded tree: a node, or an offset strictly inside an edge."""

    node: Optional[str] = None
    edge: Optional[tuple[str, str]] = None
    offset: Fraction = Fraction(0)

    def __str__(self) -> str:
        if self.node is not None:
            return self.node
        return f"{self.edge[0]}-{self.edge[1]}@{self.offset}"


class EmbeddedTree:
    """Tree whose edges are segments of positive rational length."""

    __slots__ = ("_nodes", "_lengths", "_around", "_distances")

    def __init__(self, nodes: Iterable[str], edges: Iterable[tuple[str, str, Fraction | int]]):
        nodes = tuple(str(n) for n in nodes)
        if not nodes:
            raise ModelError("an embedding tree needs at least one node")
        if len(set(nodes)) != len(nodes):
            raise ModelError("tree nodes must be unique")

        self._nodes = nodes
        self._around: dict[str, dict[str, Fraction]] = {n: {} for n in nodes}
        self._lengths: dict[tuple[str, str], Fraction] = {}
        self._distances: dict[str, dict[str, Fraction]] = {}
        for a, b, length in edges:
            a, b, length = str(a), str(b), Fraction(length)
            if a not in self._around or b not in self._around:
                raise ModelError(f"tree edge `{a} {b}` references an unknown node")
            if a == b or b in self._around[a]:
                raise ModelError(f"tree edge `{a} {b}` is a loop or appears twice")
            if length <= 0:
                raise ModelError(f"tree edge `{a} {b}` has non-positive length `{length}`")
            self._lengths[(a, b)] = length
            self._around[a][b] = length
            self._around[b][a] = length

        if len(self._lengths) != len(nodes) - 1 or len(self.distances_from(nodes[0])) != len(
            nodes
        ):
            raise ModelError("embedding graph is not a tree")

    @property
    def nodes(self) -> tuple[str, ...]:
        """Nodes in insertion order."""
        return self._nodes

    @property
    def edges(self) -> tuple[tuple[str, str, Fraction], ...]:
        """Edges with their stored orientation and length."""
        return tuple((a, b, length) for (a, b), length in self._lengths.items())

    @property
    def total_length(self) -> Fraction:
        """Sum of all edge lengths."""
        return sum(self._lengths.values(), Fraction(0))

    def __contains__(self, node: object) -> bool:
        return node in self._around

    def __repr__(self) -> str:
        return f"EmbeddedTree(nodes={len(self._nodes)}, edges={len(self._lengths)})"

    def length(self, a: str, b: str) -> Fraction:
        """Length of the edge joining `a` and `b`."""
        try:
            return self._around[a][b]
        except KeyError:
            raise ModelError(f"`{a} {b}` is not an edge of the tree")

    def neighbors(self, node: str) -> tuple[str, ...]:
        """Nodes joined to `node` by an edge."""
        return tuple(self._around[node])

    def distances_from(self, node: str) -> dict[str, Fraction]:
        """Distances from `node` to every node."""
        if (cached := self._distances.get(node)) is not None:
            return cached
        dist = {node: Fraction(0)}
        queue = deque([node])
        while queue:
            a = queue.popleft()
            for b, length in self._around[a].items():
                if b not in dist:
                    dist[b] = dist[a] + length
                    queue.append(b)
        self._distances[node] = dist
        return dist

    def path(self, a: str, b: str) -> list[str]:
        """Nodes on the path from `a` to `b`, both included."""
        dist = self.distances_from(b)
        walk = [a]
        while walk[-1] != b:
            here = walk[-1]
            walk.append(
                next(n for n, step in self._around[here].items() if dist[n] + step == dist[here])
            )
        return walk

    def point(
        self,
        node: Optional[str] = None,
        edge: Optional[tuple[str, str]] = None,
        offset: Fraction | int | str = 0,
    ) -> TreePoint:
        """Build the canonical point for a node or an offset along an edge.

        Raises:
            ModelError: if the node or edge is not in the tree or the offset is out of range.
        """
        if node is not None:
            if node not in self._around:
                raise ModelError(f"`{node}` is not a node of the tree")
            return TreePoint(node=node)

        a, b = edge
        offset = Fraction(offset)
        length = self.length(a, b)
        if (a, b) not in self._lengths:
            a, b, offset = b, a, length - offset
        if not 0 <= offset <= length:
            raise ModelError(f"offset `{offset}` lies outside edge `{a} {b}`")
        if offset == 0:
            return TreePoint(node=a)
        if offset == length:
            return TreePoint(node=b)
        return TreePoint(edge=(a, b), offset=offset)

    def check(self, p: TreePoint) -> None:
        """Raise ModelError unless `p` is a canonical point of this tree."""
        if p.node is not None:
            self.point(node=p.node)
        elif p.edge not in self._lengths or not 0 < p.offset < self._lengths[p.edge]:
            raise ModelError(f"`{p}` is not a point of the tree")

    def anchors(self, p: TreePoint) -> list[tuple[str, Fraction]]:
        """Nodes through which every path leaving `p` passes, with their distance from `p`."""
        if p.node is not None:
            return [(p.node, Fraction(0))]
        a, b = p.edge
        return [(a, p.offset), (b, self._lengths[p.edge] - p.offset)]

    def fresh(self, base: str) -> str:
        """Node name starting with `base` that the tree does not use."""
        name, k = base, 1
        while name in self._around:
            name, k = f"{base}-{k}", k + 1
        return name

    def subdivide(self, edge: tuple[str, str], offset: Fraction, name: str) -> "EmbeddedTree":
        """Split `edge` by a new node `name` at `offset` from its first endpoint."""
        a, b = edge
        length = self._lengths[edge]
        edges = [e for e in self.edges if (e[0], e[1]) != edge]
        edges += [(a, name, offset), (name, b, length - offset)]
        return EmbeddedTree(self._nodes + (name,), edges)

    def with_leaf(self, node: str, name: str, length: Fraction) -> "EmbeddedTree":
        """Attach a new leaf `name` to `node` by an edge of the given length."""
        return EmbeddedTree(self._nodes + (name,), self.edges + ((node, name, length),))

    def relabeled(self, rename: Callable[[str], str], factor: Fraction = Fraction(1)):
        """Copy with renamed nodes and every length multiplied by `factor`."""
        return EmbeddedTree(
            [rename(n) for n in self._nodes],
            [(rename(a), rename(b), length * factor) for a, b, length in self.edges],
        )


@dataclass(init=False, frozen=True)
class Ball:
    """Neighborhood subtree: the points within `radius` of `center`."""

    center: TreePoint
    radius: Fraction

    def __init__(self, center: TreePoint, radius: Fraction | int | str):
        radius = Fraction(radius)
        if radius < 0:
            raise ModelError(f"radius `{radius}` is negative")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", radius)


@dataclass(init=False, frozen=True)
class NesModel:
    """Embedded tree plus one ball per vertex."""

    tree: EmbeddedTree
    subtrees: Mapping[str, Ball]

    def __init__(self, tree: EmbeddedTree, subtrees: Mapping[str, Ball]):
        for ball in subtrees.values():
            tree.check(ball.center)
        object.__setattr__(self, "tree", tree)
        object.__setattr__(self, "subtrees", {str(v): b for v, b in subtrees.items()})


def point_distance(t: EmbeddedTree, p: TreePoint, q: TreePoint) -> Fraction:
    """Length of the path joining `p` and `q`."""
    if p.edge is not None and p.edge == q.edge:
        return abs(p.offset - q.offset)
    return min(
        dp + t.distances_from(a)[b] + dq for a, dp in t.anchors(p) for b, dq in t.anchors(q)
    )


def point_along(t: EmbeddedTree, p: TreePoint, q: TreePoint, s: Fraction) -> TreePoint:
    """Point at distance `s` from `p` on the path towards `q`.

    Notes:
        `s` is clamped to the length of the path.
    """
    s = min(max(Fraction(s), Fraction(0)), point_distance(t, p, q))
    if p.edge is not None and p.edge == q.edge:
        step = s if q.offset >= p.offset else -s
        return t.point(edge=p.edge, offset=p.offset + step)

    _, (a, dp), (b, dq) = min(
        (dp + t.distances_from(a)[b] + dq, (a, dp), (b, dq))
        for a, dp in t.anchors(p)
        for b, dq in t.anchors(q)
    )
    if s <= dp:
        if p.node is not None:
            return p
        first, _ = p.edge
        return t.point(edge=p.edge, offset=p.offset - s if a == first else p.offset + s)

    rest = s - dp
    nodes = t.path(a, b)
    for here, there in zip(nodes, nodes[1:]):
        length = t.length(here, there)
        if rest <= length:
            return t.point(edge=(here, there), offset=rest)
        rest -= length
    if q.node is not None:
        return q
    first, second = q.edge
    return t.point(edge=(b, second if b == first else first), offset=rest)


def balls_intersect(t: EmbeddedTree, b1: Ball, b2: Ball) -> bool:
    """Check whether two balls share a point."""
    return point_distance(t, b1.center, b2.center) <= b1.radius + b2.radius


def balls_intersection(t: EmbeddedTree, b1: Ball, b2: Ball) -> Optional[Ball]:
    """Intersection of two balls, itself a ball, or None when they are disjoint."""
    d = point_distance(t, b1.center, b2.center)
    if d > b1.radius + b2.radius:
        return None
    if d <= abs(b1.radius - b2.radius):
        return b1 if b1.radius <= b2.radius else b2
    center = point_along(t, b1.center, b2.center, (d + b1.radius - b2.radius) / 2)
    return Ball(center, (b1.radius + b2.radius - d) / 2)


def _fold_intersection(m: NesModel, vertices: Iterable[str]) -> Optional[Ball]:
    balls = [m.subtrees[v] for v in vertices]
    if not balls:
        return None
    common = balls[0]
    for ball in balls[1:]:
        if (common := balls_intersection(m.tree, common, ball)) is None:
            return None
    return common


def nes_graph(m: NesModel) -> Graph:
    """Graph represented by a NeS model."""
    vertices = list(m.subtrees)
    edges = [
        (u, v)
        for i, u in enumerate(vertices)
        for v in vertices[i + 1 :]
        if balls_intersect(m.tree, m.subtrees[u], m.subtrees[v])
    ]
    return Graph(vertices, edges)


def verify_nes_model(g: Graph, m: NesModel) -> Verification:
    """Check that the balls of `m` intersect exactly along the edges of `g`.

    Raises:
        ModelError: if a vertex of `g` has no ball.
    """
    if missing := [v for v in g.vertices if v not in m.subtrees]:
        raise ModelError(f"vertices `{missing}` have no neighborhood subtree")
    t, balls = m.tree, m.subtrees
    return compare_adjacency(
        g,
        lambda u, v: balls_intersect(t, balls[u], balls[v]),
        lambda u, v: (
            f"centers {point_distance(t, balls[u].center, balls[v].center)} apart, "
            f"radii {balls[u].radius} and {balls[v].radius}"
        ),
    )


def _transformed(p: TreePoint, rename: Callable[[str], str], factor: Fraction) -> TreePoint:
    if p.node is not None:
        return TreePoint(node=rename(p.node))
    return TreePoint(edge=(rename(p.edge[0]), rename(p.edge[1])), offset=p.offset * factor)


def _relabeled(m: NesModel, rename: Callable[[str], str], factor: Fraction) -> NesModel:
    return NesModel(
        m.tree.relabeled(rename, factor),
        {
            v: Ball(_transformed(b.center, rename, factor), b.radius * factor)
            for v, b in m.subtrees.items()
        },
    )


def scale_model(m: NesModel, factor: Fraction | int | str) -> NesModel:
    """Multiply every edge length and radius by a positive factor."""
    factor = Fraction(factor)
    if factor <= 0:
        raise ModelError(f"scale factor `{factor}` must be positive")
    return _relabeled(m, lambda n: n, factor)


def _relocated(p: TreePoint, edge: tuple[str, str], name: str, cut: Fraction) -> TreePoint:
    if p.edge != edge:
        return p
    if p.offset < cut:
        return TreePoint(edge=(edge[0], name), offset=p.offset)
    if p.offset == cut:
        return TreePoint(node=name)
    return TreePoint(edge=(name, edge[1]), offset=p.offset - cut)


def _reach(m: NesModel) -> Fraction:
    """Length of a line whose tip no ball of `m` reaches from the line's base."""
    top = max((b.radius for b in m.subtrees.values()), default=Fraction(0))
    return m.tree.total_length + top + 1


def isolate(m: NesModel, x: str) -> NesModel:
    """Move the center of `x` to the tip of a new line so that no other ball contains it.

    The center of `x` becomes a node (splitting its edge if needed), a line longer than any
    radius is attached there, and the ball of `x` is re-centered at the tip with its radius
    increased by the length of the line. Every intersection is preserved.

    Raises:
        UnknownVertexError: if `x` has no ball in `m`.
    """
    if x not in m.subtrees:
        raise UnknownVertexError(f"vertex `{x}` has no neighborhood subtree")
    t, balls = m.tree, dict(m.subtrees)
    ball, reach = balls[x], _reach(m)

    if (base := ball.center.node) is None:
        base = t.fresh(f"split-{x}")
        edge, cut = ball.center.edge, ball.center.offset
        t = t.subdivide(edge, cut, base)
        balls = {
            v: Ball(_relocated(b.center, edge, base, cut), b.radius) for v, b in balls.items()
        }

    tip = t.fresh(f"iso-{x}")
    t = t.with_leaf(base, tip, reach)
    balls[x] = Ball(TreePoint(node=tip), ball.radius + reach)
    _logger.debug(f"isolate: moved `{x}` to `{tip}`, radius now `{balls[x].radius}`")
    return NesModel(t, balls)


def _check_extension(m: NesModel, g: Graph, u: str) -> Graph:
    if u not in g:
        raise UnknownVertexError(f"vertex `{u}` is not in the graph")
    rest = g.without_vertex(u)
    if set(m.subtrees) != set(rest.vertices):
        raise PreconditionError(f"model does not cover exactly the vertices of G - `{u}`")
    return rest


def add_universal(m: NesModel, g: Graph, u: str) -> NesModel:
    """Extend a model of `g - u` by a universal vertex `u`.

    Raises:
        PreconditionError: if `u` is not adjacent to every other vertex of `g`.
    """
    _check_extension(m, g, u)
    if g.degree(u) != len(g) - 1:
        raise PreconditionError(f"universal case: `{u}` misses some vertex")
    return NesModel(m.tree, {**m.subtrees, u: Ball(TreePoint(node=m.tree.nodes[0]), _reach(m))})


def add_pendant(m: NesModel, g: Graph, u: str, x: str) -> NesModel:
    """Extend a model of `g - u` by a vertex `u` whose only neighbor is `x`.

    Raises:
        PreconditionError: if `x` is not the single neighbor of `u`.
    """
    _check_extension(m, g, u)
    if g.neighbors(u) != {x}:
        raise PreconditionError(f"pendant case: `{u}` is not attached to `{x}` alone")
    isolated = isolate(m, x)
    center = isolated.subtrees[x].center
    return NesModel(isolated.tree, {**isolated.subtrees, u: Ball(center, 0)})


def add_simplicial_max_clique(m: NesModel, g: Graph, u: str) -> NesModel:
    """Extend a model of `g - u` by `u` whose neighborhood is a maximal clique of `g - u`.

    `u` becomes the center of the common intersection of its neighbors' balls, which no other
    ball meets.

    Raises:
        PreconditionError: if `N(u)` is not a maximal clique of `g - u`.
    """
    rest = _check_extension(m, g, u)
    around = g.neighbors(u)
    if not is_maximal_clique(rest, around):
        raise PreconditionError(f"maximal clique case: N(`{u}`) is not a maximal clique of G - u")
    if (common := _fold_intersection(m, rest.ordered(around))) is None:
        if around:
            raise ModelError(f"balls of N(`{u}`) have no common point")
        common = Ball(TreePoint(node=m.tree.nodes[0]), 0)
    return NesModel(m.tree, {**m.subtrees, u: Ball(common.center, 0)})


def add_min_separator(m: NesModel, g: Graph, u: str) -> NesModel:
    """Extend a model of `g - u` by `u` whose neighborhood is a minimal separator of `g - u`.

    A new line leaves the center of the common intersection `T` of the neighbors' balls, and
    `u` becomes the point of that line at distance `radius(T)` from its base.

    Raises:
        PreconditionError: if `N(u)` is not a minimal separator of `g - u`.
    """
    rest = _check_extension(m, g, u)
    around = g.neighbors(u)
    if not is_minimal_separator(rest, around):
        raise PreconditionError(
            f"minimal separator case: N(`{u}`) is not a minimal separator of G - u"
        )

    t, balls, reach = m.tree, dict(m.subtrees), _reach(m)
    if (common := _fold_intersection(m, rest.ordered(around))) is None:
        if around:
            raise ModelError(f"balls of N(`{u}`) have no common point")
        tip = t.fresh(f"line-{u}")
        t = t.with_leaf(t.nodes[0], tip, reach)
        balls[u] = Ball(TreePoint(node=tip), 0)
        return NesModel(t, balls)

    if (base := common.center.node) is None:
        base = t.fresh(f"split-{u}")
        edge, cut = common.center.edge, common.center.offset
        t = t.subdivide(edge, cut, base)
        balls = {
            v: Ball(_relocated(b.center, edge, base, cut), b.radius) for v, b in balls.items()
        }
    tip = t.fresh(f"line-{u}")
    t = t.with_leaf(base, tip, reach)
    balls[u] = Ball(t.point(edge=(base, tip), offset=common.radius), 0)
    return NesModel(t, balls)


def merge_at_cut_vertex(models: Sequence[NesModel], u: str, g: Graph) -> NesModel:
    """Glue models of the blocks `G[C + u]` around `u` into a model of `g`.

    Each model is isolated at `u`, scaled so the ball of `u` has radius 1 and renamed apart;
    the tips carrying the centers of `u` are then identified.

    Raises:
        PreconditionError: if the models do not match the components of `g - u` one to one.
    """
    components = list(connected_components(g.without_vertex(u)))
    if len(models) != len(components):
        raise PreconditionError(
            f"cut vertex case: {len(components)} components around `{u}` "
            f"but {len(models)} models"
        )
    remaining = list(models)
    nodes, edges, balls = ["cut"], [], {u: Ball(TreePoint(node="cut"), 1)}
    for i, component in enumerate(components):
        model = next((m for m in remaining if set(m.subtrees) == component | {u}), None)
        if model is None:
            raise PreconditionError(
                f"cut vertex case: no model covers component `{sorted(component)}` plus `{u}`"
            )
        remaining.remove(model)

        isolated = isolate(model, u)
        tip = isolated.subtrees[u].center.node

        def rename(n: str, i: int = i, tip: str = tip) -> str:
            return "cut" if n == tip else f"{i}/{n}"

        part = _relabeled(isolated, rename, 1 / isolated.subtrees[u].radius)
        nodes += [n for n in part.tree.nodes if n != "cut"]
        edges += part.tree.edges
        balls.update({v: b for v, b in part.subtrees.items() if v != u})

    _logger.debug(f"merge_at_cut_vertex: glued {len(components)} models at `{u}`")
    return NesModel(EmbeddedTree(nodes, edges), balls)


def interval_nes_model(g: Graph, path: CliquePath) -> NesModel:
    """Single-edge model of an interval graph built from one of its clique paths.

    Vertex `v` spanning cliques `i..j` (1-based) gets the interval `[i, j]` on an edge of
    length `k + 1`, where `k` is the number of cliques.
    """
    k = len(path)
    tree = EmbeddedTree(["left", "right"], [("left", "right", k + 1)])
    span: dict[str, list[int]] = {}
    for i, clique in enumerate(path, start=1):
        for v in clique:
            span.setdefault(v, []).append(i)
    if missing := [v for v in g.vertices if v not in span]:
        raise ModelError(f"vertices `{missing}` appear in no clique of the path")
    return NesModel(
        tree,
        {
            v: Ball(
                tree.point(
                    edge=("left", "right"), offset=Fraction(min(span[v]) + max(span[v]), 2)
                ),
                Fraction(max(span[v]) - min(span[v]), 2),
            )
            for v in g.vertices
        },
    )
