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

"""Brute-force deciders used to cross-check the polynomial algorithms on small graphs.

The deciders here share as little code as possible with the algorithms they check: graph
structure goes through `networkx`, maximal cliques come from Bron-Kerbosch instead of the
elimination order, and clique paths come from a pruned search over clique orderings.

- `bruteforce_linear_leafpower` tries every spine order of every component and asks an exact
  linear program for leg weights and spine positions.
- `bruteforce_good_partition` enumerates central cliques, coarsenings of the components
  around them and permutations of the clique.
- `atlas_chordal_graphs` and `random_chordal_graph` produce the instances, and
  `shrink_counterexample` minimizes a failing one.
"""

import logging
import random
from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterator, Optional

import networkx

from leafpowers.graphs.v0.chordal import CliquePath
from leafpowers.graphs.v0.core import (
    Graph,
    LeafPowerError,
    Partition,
    VertexSet,
    connected_components,
    induced_subgraph,
)
from leafpowers.models.v0.linear import LinearLeafRoot
from leafpowers.models.v0.star import GoodPartition
from leafpowers.oracle.v0.lp import FeasibilitySystem

__all__ = [
    "OracleLimitError",
    "to_networkx",
    "from_networkx",
    "bruteforce_maximal_cliques",
    "bruteforce_clique_path",
    "bruteforce_linear_leafpower",
    "bruteforce_good_partition",
    "atlas_chordal_graphs",
    "random_chordal_graph",
    "shrink_counterexample",
]

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before publishing the library, or reset
# to 0 if you are raising the major API version
LIBPATCH = 1

_logger = logging.getLogger(__name__)

DEFAULT_LIMIT = 8
ATLAS_LIMIT = 7


class OracleLimitError(LeafPowerError):
    """Exception raised when an instance is too large for exhaustive search."""


def _check_limit(g: Graph, limit: int) -> None:
    if len(g) > limit:
        raise OracleLimitError(f"graph has {len(g)} vertices, exhaustive search stops at {limit}")


def to_networkx(g: Graph) -> networkx.Graph:
    """Copy `g` into a networkx graph."""
    h = networkx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(g.edges)
    return h


def from_networkx(h: networkx.Graph, prefix: str = "") -> Graph:
    """Copy a networkx graph, naming vertices `prefix + str(node)`."""
    return Graph(
        [f"{prefix}{v}" for v in h.nodes],
        [(f"{prefix}{u}", f"{prefix}{v}") for u, v in h.edges],
    )


def bruteforce_maximal_cliques(g: Graph) -> list[VertexSet]:
    """Maximal cliques by Bron-Kerbosch with pivoting, in discovery order."""
    if len(g) == 0:
        return [frozenset()]
    around = {v: set(g.neighbors(v)) for v in g.vertices}
    found: list[VertexSet] = []

    def expand(r: set[str], p: set[str], x: set[str]) -> None:
        if not p and not x:
            found.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda u: len(around[u] & p))
        for v in sorted(p - around[pivot], key=g.index):
            expand(r | {v}, p & around[v], x & around[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(g.vertices), set())
    return found


def _contiguous_append(seen: set[str], previous: VertexSet, clique: VertexSet) -> bool:
    return all(v not in seen or v in previous for v in clique)


def bruteforce_clique_path(g: Graph, last: Optional[VertexSet] = None) -> Optional[CliquePath]:
    """Search all orderings of the maximal cliques for a clique path.

    Args:
        g: the graph.
        last: if given, only clique paths ending in this clique are accepted.
    """
    cliques = bruteforce_maximal_cliques(g)
    if last is not None:
        last = frozenset(last)
        if last not in cliques:
            return None
        cliques.remove(last)

    def extend(path: list[VertexSet], seen: set[str], left: list[VertexSet]):
        if not left:
            if last is None:
                return path
            if path and not _contiguous_append(seen, path[-1], last):
                return None
            return path + [last]
        for k, clique in enumerate(left):
            if path and not _contiguous_append(seen, path[-1], clique):
                continue
            if found := extend(path + [clique], seen | clique, left[:k] + left[k + 1 :]):
                return found
        return None

    if (path := extend([], set(), cliques)) is None:
        return None
    return CliquePath(tuple(path))


def _component_spine(g: Graph, order: list[str]) -> Optional[dict[str, Fraction]]:
    system = FeasibilitySystem()
    for k in range(len(order)):
        system.add_variable(f"m{k}")
        system.add_variable(f"a{k}")
        system.add_constraint({f"a{k}": 1}, "<=", 1)
    system.add_constraint({"m0": 1}, "==", 0)
    for k in range(len(order) - 1):
        system.add_constraint({f"m{k + 1}": 1, f"m{k}": -1}, ">=", 0)
        system.add_constraint({f"m{k + 1}": 1, f"m{k}": -1}, "<=", 1)
    for i, u in enumerate(order):
        for j in range(i + 1, len(order)):
            distance = {f"a{i}": 1, f"a{j}": 1, f"m{j}": 1, f"m{i}": -1}
            if g.adjacent(u, order[j]):
                system.add_constraint(distance, "<=", 1)
            else:
                system.add_constraint(distance, ">", 1)
    return system.solve()


def _search_spine(g: Graph, prefix: list[str], left: list[str]):
    if not left and len(prefix) > 1 and g.index(prefix[0]) > g.index(prefix[-1]):
        # reversed orders are solved from the other end
        return None
    if len(prefix) >= 3 or not left:
        if (values := _component_spine(g, prefix)) is None:
            return None
        if not left:
            return prefix, values
    for k, v in enumerate(left):
        if found := _search_spine(g, prefix + [v], left[:k] + left[k + 1 :]):
            return found
    return None


def bruteforce_linear_leafpower(g: Graph, limit: int = DEFAULT_LIMIT) -> Optional[LinearLeafRoot]:
    """Decide whether `g` is a linear leaf power by trying every spine order.

    Each component is solved on its own: for a spine order `v_1..v_k`, positions
    `0 = m_1 <= ... <= m_k` with steps at most 1 and legs `a_i` in [0, 1] must satisfy
    `a_i + a_j + m_j - m_i <= 1` on edges and `> 1` on non-edges. Prefixes are pruned as soon
    as their own system is infeasible. Components are chained through leafless spine nodes.

    Raises:
        OracleLimitError: if `g` has more than `limit` vertices.
    """
    _check_limit(g, limit)
    spine: list[Optional[str]] = []
    edges: list[Fraction] = []
    legs: list[Optional[Fraction]] = []
    for component in connected_components(g):
        h = induced_subgraph(g, component)
        found = _search_spine(h, [], list(h.vertices))
        if found is None:
            _logger.debug(f"bruteforce_linear_leafpower: component `{h.vertices}` has no spine")
            return None
        order, values = found
        if spine:
            spine.append(None)
            legs.append(None)
            edges += [Fraction(1), Fraction(1)]
        for k, v in enumerate(order):
            if k:
                edges.append(values[f"m{k}"] - values[f"m{k - 1}"])
            spine.append(v)
            legs.append(values[f"a{k}"])
    return LinearLeafRoot(spine, edges, legs)


def _set_partitions(items: list[VertexSet]) -> Iterator[list[VertexSet]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        yield [first] + partition
        for k in range(len(partition)):
            yield partition[:k] + [first | partition[k]] + partition[k + 1 :]


def _good_permutation(
    h: networkx.Graph, x: VertexSet, blocks: list[VertexSet]
) -> Optional[tuple[str, ...]]:
    for perm in permutations(sorted(x)):
        for i, v in enumerate(perm):
            later = perm[i:]
            misses = sum(
                1
                for block in blocks
                if any(not (set(h[v]) & block) <= set(h[y]) for y in later)
            )
            if misses > 1:
                break
        else:
            return perm
    return None


def bruteforce_good_partition(g: Graph, limit: int = DEFAULT_LIMIT) -> Optional[GoodPartition]:
    """Search good partitions exhaustively.

    Every maximal clique X, every grouping of the components of `G - X` into blocks whose
    union with X has a clique path ending in X, and every permutation of X is tried.

    Raises:
        OracleLimitError: if `g` has more than `limit` vertices.
    """
    _check_limit(g, limit)
    h = to_networkx(g)
    if not networkx.is_chordal(h):
        return None

    for x in bruteforce_maximal_cliques(g):
        rest = h.subgraph(set(h.nodes) - x)
        components = [frozenset(c) for c in networkx.connected_components(rest)]
        for blocks in _set_partitions(components):
            if not all(
                bruteforce_clique_path(induced_subgraph(g, x | block), last=x) for block in blocks
            ):
                continue
            if (perm := _good_permutation(h, x, blocks)) is not None:
                return GoodPartition(x, Partition(blocks, order=g.vertices), perm)
    return None


def atlas_chordal_graphs(max_n: int, connected: bool = True) -> Iterator[Graph]:
    """All chordal graphs with 1 to `max_n` vertices, one per isomorphism class.

    Raises:
        OracleLimitError: if `max_n` exceeds the size of the networkx graph atlas.
    """
    if max_n > ATLAS_LIMIT:
        raise OracleLimitError(f"the graph atlas stops at {ATLAS_LIMIT} vertices")
    for h in networkx.graph_atlas_g():
        if not 1 <= len(h) <= max_n:
            continue
        if connected and not networkx.is_connected(h):
            continue
        if networkx.is_chordal(h):
            yield from_networkx(h, prefix="v")


def random_chordal_graph(seed: int, n: int, connected: bool = True) -> Graph:
    """Random chordal graph grown by adding simplicial vertices.

    Each new vertex is attached to a random subset of a random maximal clique of the graph
    built so far, which keeps the graph chordal. The subset is non-empty when `connected`.
    """
    rng = random.Random(seed)
    vertices = [f"v{i}" for i in range(n)]
    edges: list[tuple[str, str]] = []
    cliques: list[frozenset[str]] = [frozenset(vertices[:1])] if n else []
    for v in vertices[1:]:
        k = rng.randrange(len(cliques))
        members = sorted(cliques[k])
        low = 1 if connected else 0
        chosen = frozenset(rng.sample(members, rng.randint(low, len(members))))
        edges += [(u, v) for u in sorted(chosen)]
        if chosen == cliques[k]:
            cliques[k] = chosen | {v}
        else:
            cliques.append(chosen | {v})
    return Graph(vertices, edges)


def shrink_counterexample(g: Graph, fails: Callable[[Graph], bool]) -> Graph:
    """Delete vertices from a failing instance for as long as it keeps failing."""
    shrinking = True
    while shrinking:
        shrinking = False
        for v in g.vertices:
            smaller = g.without_vertex(v)
            if fails(smaller):
                _logger.debug(f"shrink_counterexample: dropped `{v}`, {len(smaller)} left")
                g, shrinking = smaller, True
                break
    return g
