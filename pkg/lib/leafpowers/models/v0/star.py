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

"""Library for star NeS models and their recognition through good partitions.

A star NeS model is a NeS model whose embedding tree is a star: rays `L_1..L_beta` of
rational length leaving a common center `c`. The vertices whose subtree contains `c` form a
clique X, and every other vertex lives on a single ray as an interval `[s, t]` of distances
from the center.

## Good partitions

A good partition `(X, B)` of a graph is a maximal clique X together with a partition B of the
remaining vertices such that

1. every connected component of `G - X` lies inside one block,
2. every `G[X + block]` has a clique path ending in X,
3. X has an elimination order `x_1..x_t` where every `x_i` is removable from
   `{x_i..x_t}`: its neighborhood is minimal for that set in all blocks but at most one.

A graph has a good partition iff it has a star NeS model. `find_good_partition` searches one
in polynomial time, `synthesize_star_model` turns it into a model and `verify_star_model`
checks a model against a graph.

### Example

```python
from leafpowers.graphs.v0.core import Graph
from leafpowers.models.v0.star import (
    find_good_partition, synthesize_star_model, verify_star_model,
)

graph = Graph(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d")])
partition = find_good_partition(graph)
model = synthesize_star_model(graph, partition)
assert verify_star_model(graph, model)
```
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import groupby
from typing import Iterable, Mapping, Optional

from leafpowers.graphs.v0.chordal import (
    ChordlessCycle,
    NotMaximalCliqueError,
    is_x_interval,
    maximal_cliques,
    recognize_chordal,
)
from leafpowers.graphs.v0.core import (
    Graph,
    Partition,
    Verification,
    VertexSet,
    compare_adjacency,
    connected_components,
    induced_subgraph,
    is_maximal_clique,
    refines,
)
from leafpowers.models.v0.linear import ModelError
from leafpowers.models.v0.nes import Ball, EmbeddedTree, NesModel, PreconditionError, TreePoint

__all__ = [
    "BlockPlacement",
    "StarNesModel",
    "GoodPartition",
    "GoodPartitionFailure",
    "CliqueAttempt",
    "StarSearchReport",
    "notmin",
    "is_removable",
    "x_max_cap",
    "x_min_cap",
    "leq_x",
    "validate_good_partition",
    "good_partition_for_clique",
    "recognize_star",
    "find_good_partition",
    "synthesize_star_model",
    "length_condition_violations",
    "star_graph",
    "verify_star_model",
    "star_to_nes",
]

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before publishing the library, or reset
# to 0 if you are raising the major API version
LIBPATCH = 1

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlockPlacement:
    """Interval `[s, t]` of center distances on one ray."""

    ray: int
    """0-based ray index."""

    s: Fraction
    t: Fraction


@dataclass(init=False, frozen=True)
class StarNesModel:
    """NeS model on a star with rays measured from the center.

    Notes:
        `central[x][j]` is how far the subtree of `x` reaches along ray `j`. All rays of a
        central vertex but at most one share a common value, and the odd one out is larger.
    """

    ray_lengths: tuple[Fraction, ...]
    central: Mapping[str, tuple[Fraction, ...]]
    blocks: Mapping[str, BlockPlacement]

    def __init__(
        self,
        ray_lengths: Iterable[Fraction | int | str],
        central: Mapping[str, Iterable[Fraction | int | str]],
        blocks: Mapping[str, BlockPlacement],
    ):
        rays = tuple(Fraction(r) for r in ray_lengths)
        if not rays or any(r <= 0 for r in rays):
            raise ModelError("a star needs at least one ray and every ray a positive length")

        reach = {str(x): tuple(Fraction(v) for v in values) for x, values in central.items()}
        for x, values in reach.items():
            if len(values) != len(rays):
                raise ModelError(f"central `{x}` has {len(values)} lengths for {len(rays)} rays")
            if any(not 0 <= v <= r for v, r in zip(values, rays)):
                raise ModelError(f"central `{x}` reaches outside its rays")
            if len([v for v in values if v != min(values)]) > 1:
                raise ModelError(f"central `{x}` extends beyond its common length on two rays")

        placed = {}
        for b, spot in blocks.items():
            spot = BlockPlacement(spot.ray, Fraction(spot.s), Fraction(spot.t))
            if not 0 <= spot.ray < len(rays):
                raise ModelError(f"block vertex `{b}` sits on unknown ray `{spot.ray}`")
            if not 0 < spot.s <= spot.t <= rays[spot.ray]:
                raise ModelError(f"block vertex `{b}` has invalid extent `[{spot.s}, {spot.t}]`")
            placed[str(b)] = spot
        if both := reach.keys() & placed.keys():
            raise ModelError(f"vertices `{sorted(both)}` are both central and on a ray")

        object.__setattr__(self, "ray_lengths", rays)
        object.__setattr__(self, "central", reach)
        object.__setattr__(self, "blocks", placed)

    @property
    def ray_count(self) -> int:
        """Number of rays."""
        return len(self.ray_lengths)

    @property
    def vertices(self) -> tuple[str, ...]:
        """Central vertices followed by ray vertices."""
        return tuple(self.central) + tuple(self.blocks)


@dataclass(frozen=True)
class GoodPartition:
    """Central clique, partition of the other vertices and a good permutation."""

    central_clique: VertexSet
    blocks: Partition
    permutation: tuple[str, ...]


@dataclass(frozen=True)
class GoodPartitionFailure:
    """Why a candidate pair is not a good partition."""

    stage: str
    """One of `maximal-clique`, `partition`, `refinement`, `x-interval` or `elimination`."""

    reason: str
    witness: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class CliqueAttempt:
    """Outcome of the search for one candidate central clique."""

    clique: tuple[str, ...]
    stage: Optional[str] = None
    """`component-check` or `elimination` on failure, None on success."""

    witness: tuple[str, ...] = ()
    partition: Optional[GoodPartition] = None


@dataclass(frozen=True)
class StarSearchReport:
    """Full trace of a star recognition run."""

    partition: Optional[GoodPartition] = None
    cycle: Optional[ChordlessCycle] = None
    """Chordless cycle when the graph is not chordal."""

    attempts: tuple[CliqueAttempt, ...] = field(default=())

    @property
    def accepted(self) -> bool:
        """Check whether a good partition was found."""
        return self.partition is not None


def _non_minimal(g: Graph, x: str, w: Iterable[str], blocks: Iterable[VertexSet]):
    nx = g.neighbor_mask(x)
    others = [g.neighbor_mask(y) for y in w]
    for block in blocks:
        trace = nx & g.mask(block)
        if any(trace & ~ny for ny in others):
            yield block


def notmin(g: Graph, x: str, w: Iterable[str], a: Partition) -> VertexSet:
    """Union of the blocks of `a` where `N(x)` is not minimal for `w`.

    Raises:
        PreconditionError: if `x` is not in `w`.
    """
    w = frozenset(w)
    if x not in w:
        raise PreconditionError(f"`{x}` is not in `{sorted(w)}`")
    return frozenset().union(*_non_minimal(g, x, w, a))


def is_removable(g: Graph, x: str, y: Iterable[str], b: Partition) -> bool:
    """Check whether `N(x)` is minimal for `y` in all blocks of `b` but at most one."""
    misses = 0
    for _ in _non_minimal(g, x, y, b):
        misses += 1
        if misses > 1:
            return False
    return True


def x_max_cap(g: Graph, x: Iterable[str], a: Iterable[str]) -> VertexSet:
    """Vertices of `x` adjacent to some vertex of `a`."""
    reached = 0
    for v in a:
        reached |= g.neighbor_mask(v)
    return g.members(reached & g.mask(x))


def x_min_cap(g: Graph, x: Iterable[str], a: Iterable[str]) -> VertexSet:
    """Vertices of `x` adjacent to every vertex of `a`."""
    common = g.mask(x)
    for v in a:
        common &= g.neighbor_mask(v)
    return g.members(common)


def leq_x(g: Graph, x: Iterable[str], a1: Iterable[str], a2: Iterable[str]) -> bool:
    """Check whether every neighbor of `a1` in `x` is adjacent to all of `a2`."""
    x = frozenset(x)
    return x_max_cap(g, x, a1) <= x_min_cap(g, x, a2)


def _nested_traces(g: Graph, x: VertexSet, block: VertexSet) -> bool:
    mask = g.mask(block)
    traces = sorted({g.neighbor_mask(v) & mask for v in x}, key=int.bit_count)
    return all(a & ~b == 0 for a, b in zip(traces, traces[1:]))


class _XIntervalCache:
    """Memoized X-interval test for unions of blocks around a fixed clique."""

    def __init__(self, g: Graph, x: VertexSet):
        self._g, self._x = g, x
        self._known: dict[VertexSet, bool] = {}

    def __call__(self, block: VertexSet) -> bool:
        if (known := self._known.get(block)) is not None:
            return known
        if not _nested_traces(self._g, self._x, block):
            result = False
        else:
            result = is_x_interval(induced_subgraph(self._g, self._x | block), self._x) is not None
        self._known[block] = result
        return result


def _components_outside(g: Graph, x: VertexSet) -> Partition:
    rest = induced_subgraph(g, frozenset(g.vertices) - x)
    return Partition(connected_components(rest), order=g.vertices)


def validate_good_partition(
    g: Graph, x: Iterable[str], b: Partition
) -> GoodPartition | GoodPartitionFailure:
    """Check the three good-partition properties and find a good permutation.

    The permutation is built greedily, always removing the removable vertex of smallest
    index. Removability only gets easier as the remaining set shrinks, so the greedy search
    fails only when no good permutation exists.
    """
    x = frozenset(x)
    if not is_maximal_clique(g, x):
        return GoodPartitionFailure(
            "maximal-clique", "X is not a maximal clique", tuple(g.ordered(x))
        )
    if b.ground != frozenset(g.vertices) - x:
        return GoodPartitionFailure("partition", "blocks do not partition V - X")

    components = _components_outside(g, x)
    if not refines(components, b):
        spread = next(c for c in components if not any(c <= block for block in b))
        return GoodPartitionFailure(
            "refinement", "a component of G - X spans several blocks", tuple(g.ordered(spread))
        )

    x_interval = _XIntervalCache(g, x)
    for block in b:
        if not x_interval(block):
            return GoodPartitionFailure(
                "x-interval",
                "G[X + block] has no clique path ending in X",
                tuple(g.ordered(block)),
            )

    remaining, order = g.ordered(x), []
    while remaining:
        w = next((w for w in remaining if is_removable(g, w, remaining, b)), None)
        if w is None:
            return GoodPartitionFailure(
                "elimination", "no remaining vertex of X is removable", tuple(remaining)
            )
        order.append(w)
        remaining.remove(w)
    return GoodPartition(x, b, tuple(order))


def good_partition_for_clique(g: Graph, x: Iterable[str]) -> CliqueAttempt:
    """Try to build a good partition with central clique `x`.

    Starts from the components of `G - X` and repeatedly removes the smallest-index vertex
    `w` whose blocks of non-minimality form an X-interval union with X, merging those blocks.

    Raises:
        NotMaximalCliqueError: if `x` is not a maximal clique of `g`.
    """
    x = frozenset(x)
    if not is_maximal_clique(g, x):
        raise NotMaximalCliqueError(f"`{sorted(x)}` is not a maximal clique")
    clique = tuple(g.ordered(x))
    x_interval = _XIntervalCache(g, x)

    a = _components_outside(g, x)
    for component in a:
        if not x_interval(component):
            _logger.debug(
                f"good_partition_for_clique: `{list(clique)}` fails on component "
                f"`{g.ordered(component)}`"
            )
            return CliqueAttempt(clique, "component-check", tuple(g.ordered(component)))

    remaining, order = list(clique), []
    while remaining:
        for w in remaining:
            merged = notmin(g, w, remaining, a)
            if not merged or x_interval(merged):
                break
        else:
            _logger.debug(
                f"good_partition_for_clique: `{list(clique)}` stuck with `{remaining}` left"
            )
            return CliqueAttempt(clique, "elimination", tuple(remaining))
        a = a.merge(block for block in a if block <= merged)
        order.append(w)
        remaining.remove(w)

    return CliqueAttempt(clique, partition=GoodPartition(x, a, tuple(order)))


def recognize_star(g: Graph) -> StarSearchReport:
    """Decide whether `g` has a star NeS model, keeping the trace of every attempt."""
    if isinstance(result := recognize_chordal(g), ChordlessCycle):
        _logger.info(f"recognize_star: not chordal, cycle `{list(result.cycle)}`")
        return StarSearchReport(cycle=result)

    attempts = []
    for x in maximal_cliques(g):
        attempt = good_partition_for_clique(g, x)
        attempts.append(attempt)
        if attempt.partition is not None:
            _logger.info(f"recognize_star: accepted with central clique `{list(attempt.clique)}`")
            return StarSearchReport(attempt.partition, attempts=tuple(attempts))
    return StarSearchReport(attempts=tuple(attempts))


def find_good_partition(g: Graph) -> Optional[GoodPartition]:
    """Find a good partition of `g`, or None if it has no star NeS model."""
    return recognize_star(g).partition


def _traces(g: Graph, gp: GoodPartition) -> list[dict[str, int]]:
    masks = [g.mask(block) for block in gp.blocks]
    return [{x: g.neighbor_mask(x) & mask for x in gp.central_clique} for mask in masks]


def _minimal_in(trace: dict[str, int], x: str, remaining: Iterable[str]) -> bool:
    return all(trace[x] & ~trace[y] == 0 for y in remaining)


def _central_lengths(g: Graph, gp: GoodPartition, beta: int) -> dict[str, list[Fraction]]:
    perm, traces = gp.permutation, _traces(g, gp)
    t = len(perm)
    lengths: dict[str, list[Fraction]] = {}
    for i in range(t, 0, -1):
        x, remaining, later = perm[i - 1], perm[i - 1 :], perm[i:]
        lengths[x] = [Fraction(i)] * beta
        if i == t or not traces:
            continue

        j = next((j for j, trace in enumerate(traces) if not _minimal_in(trace, x, remaining)), 0)
        if _minimal_in(traces[j], x, remaining):
            continue
        mine = traces[j]
        if all(mine[y] & ~mine[x] == 0 for y in remaining):
            lengths[x][j] = 1 + max(lengths[y][j] for y in later)
        else:
            lo = max(lengths[y][j] for y in later if mine[y] != mine[x] and not mine[y] & ~mine[x])
            hi = min(lengths[y][j] for y in later if mine[y] != mine[x] and not mine[x] & ~mine[y])
            lengths[x][j] = (lo + hi) / 2
    return lengths


def _check_permutation(g: Graph, gp: GoodPartition) -> None:
    perm = list(gp.permutation)
    if set(perm) != gp.central_clique or len(perm) != len(gp.central_clique):
        raise ModelError("permutation does not list the central clique")
    for i, x in enumerate(perm):
        if not is_removable(g, x, perm[i:], gp.blocks):
            raise ModelError(f"`{x}` is not removable at position {i + 1} of the permutation")


def synthesize_star_model(g: Graph, gp: GoodPartition) -> StarNesModel:
    """Build a star NeS model from a good partition.

    Every block gets a ray of length `2t + 1`. The reach of `x_i` on ray `j` is `i`, except
    on the one ray where `N(x_i)` may fail minimality, where it is placed strictly between
    the reaches of the central vertices with smaller and larger traces. Block vertices are
    placed between points read off the clique path of `G[X + block]`.

    Raises:
        ModelError: if `gp` is not a good partition of `g` with a good permutation.
    """
    if not (checked := validate_good_partition(g, gp.central_clique, gp.blocks)):
        raise ModelError(f"not a good partition: {checked.reason}")
    _check_permutation(g, gp)

    x, blocks = gp.central_clique, list(gp.blocks)
    t, beta = len(gp.permutation), max(1, len(blocks))
    ray = Fraction(2 * t + 1)
    lengths = _central_lengths(g, gp, beta)

    placements = {}
    for j, block in enumerate(blocks):
        path = is_x_interval(induced_subgraph(g, x | block), x)
        outward = list(reversed(path.cliques[:-1]))
        points: list[Fraction] = []
        for cap, run in groupby(outward, key=lambda k: k & x):
            count = len(list(run))
            lo = max((lengths[v][j] for v in x - cap), default=Fraction(0))
            hi = min((lengths[v][j] for v in cap), default=ray)
            points += [lo + (hi - lo) * r / count for r in range(1, count + 1)]
        for b in block:
            spans = [i for i, k in enumerate(outward) if b in k]
            placements[b] = BlockPlacement(j, points[spans[0]], points[spans[-1]])

    _logger.debug(f"synthesize_star_model: {beta} rays of length {ray}")
    return StarNesModel(
        [ray] * beta, {v: tuple(lengths[v]) for v in gp.permutation}, placements
    )


def length_condition_violations(g: Graph, gp: GoodPartition, m: StarNesModel) -> list[str]:
    """List breaches of the two conditions a synthesized model's central reaches satisfy.

    On every ray `j`, `x_i` reaches at least `i`, and a central vertex whose trace on block
    `j` is strictly inside another's reaches strictly less far on ray `j`.
    """
    found = []
    traces = _traces(g, gp)
    for i, x in enumerate(gp.permutation, start=1):
        found += [
            f"`{x}` reaches {v} < {i} on ray {j}" for j, v in enumerate(m.central[x]) if v < i
        ]
    for j, mine in enumerate(traces):
        for x in gp.permutation:
            for y in gp.permutation:
                strictly_inside = mine[x] != mine[y] and mine[x] & ~mine[y] == 0
                if strictly_inside and not m.central[x][j] < m.central[y][j]:
                    found.append(f"`{x}` does not reach less than `{y}` on ray {j}")
    return found


def _star_adjacent(m: StarNesModel, u: str, v: str) -> bool:
    cu, cv = m.central.get(u), m.central.get(v)
    if cu is not None and cv is not None:
        return True
    if cu is not None or cv is not None:
        reach, spot = (cu, m.blocks[v]) if cu is not None else (cv, m.blocks[u])
        return reach[spot.ray] >= spot.s
    pu, pv = m.blocks[u], m.blocks[v]
    return pu.ray == pv.ray and pu.s <= pv.t and pv.s <= pu.t


def star_graph(m: StarNesModel) -> Graph:
    """Graph represented by a star NeS model."""
    vertices = m.vertices
    edges = [
        (u, v)
        for i, u in enumerate(vertices)
        for v in vertices[i + 1 :]
        if _star_adjacent(m, u, v)
    ]
    return Graph(vertices, edges)


def verify_star_model(g: Graph, m: StarNesModel) -> Verification:
    """Check a star NeS model against `g`.

    Raises:
        ModelError: if a vertex of `g` is neither central nor placed on a ray.
    """
    if missing := [v for v in g.vertices if v not in m.central and v not in m.blocks]:
        raise ModelError(f"vertices `{missing}` are not in the model")

    def describe(u: str, v: str) -> str:
        return f"`{u}` {_extent(m, u)} and `{v}` {_extent(m, v)}"

    return compare_adjacency(g, lambda u, v: _star_adjacent(m, u, v), describe)


def _extent(m: StarNesModel, v: str) -> str:
    if v in m.central:
        return f"central {[str(r) for r in m.central[v]]}"
    spot = m.blocks[v]
    return f"on ray {spot.ray} [{spot.s}, {spot.t}]"


def star_to_nes(m: StarNesModel) -> NesModel:
    """View a star NeS model as a general NeS model.

    The tree has a center `c` and one leaf `r<j>` per ray. A central vertex with common reach
    `l` and a longer reach `h` on ray `j` becomes the ball of radius `(h + l) / 2` centered
    `(h - l) / 2` along ray `j`; a ray interval `[s, t]` becomes the ball of radius
    `(t - s) / 2` centered at `(s + t) / 2`.
    """
    rays = [f"r{j}" for j in range(m.ray_count)]
    tree = EmbeddedTree(["c"] + rays, [("c", r, length) for r, length in zip(rays, m.ray_lengths)])
    balls = {}
    for x, reach in m.central.items():
        common = min(reach)
        longer = next((j for j, v in enumerate(reach) if v > common), None)
        if longer is None:
            balls[x] = Ball(TreePoint(node="c"), common)
        else:
            h = reach[longer]
            center = tree.point(edge=("c", rays[longer]), offset=(h - common) / 2)
            balls[x] = Ball(center, (h + common) / 2)
    for b, spot in m.blocks.items():
        center = tree.point(edge=("c", rays[spot.ray]), offset=(spot.s + spot.t) / 2)
        balls[b] = Ball(center, (spot.t - spot.s) / 2)
    return NesModel(tree, balls)
