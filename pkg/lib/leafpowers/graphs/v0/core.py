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

"""Library with the graph representation shared by every leaf power library.

This library contains the immutable `Graph` and `Partition` values, the verification result
types returned by every model verifier, and the two graph file formats.

## Graph

Vertices are opaque string identifiers. Internally each vertex gets a dense index (its
position in `Graph.vertices`) and vertex sets are handled as integer bitsets over those
indices. The public API speaks in `VertexSet`s (frozensets of identifiers); the `mask`,
`members` and `component_masks` methods expose the bitset view to the other libraries.

Graphs are values: every "mutation" (`with_vertex`, `without_vertex`, `induced_subgraph`)
returns a new graph.

### Example

```python
from leafpowers.graphs.v0.core import Graph, connected_components, induced_subgraph

sun = Graph(
    ["x", "y", "z", "a", "b", "c"],
    [("x", "y"), ("y", "z"), ("x", "z"), ("a", "x"), ("a", "y"),
     ("b", "x"), ("b", "z"), ("c", "y"), ("c", "z")],
)
triangle = induced_subgraph(sun, {"x", "y", "z"})
connected_components(sun.without_vertex("x"))
```

## Partition

A partition of a ground set into non-empty disjoint blocks. Blocks are kept in a canonical
order (by the rank of their smallest member, either in a given vertex order or by name) and
equality is structural, so two partitions with the same blocks compare equal regardless of
how they were built.

## File formats

Graph JSON: `{"vertices": ["a", "b"], "edges": [["a", "b"]]}`, validated with a JSON schema.
Edge lists: one `u v` pair per line, `#` starts a comment, and a line with a single token
declares a (possibly isolated) vertex. Both parsers reject duplicate edges and self-loops.
"""

import json
import logging
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence

from jsonschema import ValidationError, validate

__all__ = [
    "LeafPowerError",
    "ParseError",
    "UnknownVertexError",
    "IncomparablePartitionsError",
    "PartitionError",
    "VertexSet",
    "Graph",
    "Partition",
    "Discrepancy",
    "Verification",
    "bits",
    "connected_components",
    "refines",
    "induced_subgraph",
    "is_clique",
    "is_maximal_clique",
    "is_minimal_separator",
    "compare_adjacency",
    "graph_from_json",
    "graph_to_json",
    "parse_edge_list",
    "format_edge_list",
    "GRAPH_SCHEMA",
]

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before publishing the library, or reset
# to 0 if you are raising the major API version
LIBPATCH = 1

_logger = logging.getLogger(__name__)

VertexSet = frozenset[str]

GRAPH_SCHEMA = {
    "$schema": "http://json-schema.org/draft-04/schema#",
    "type": "object",
    "required": ["vertices", "edges"],
    "properties": {
        "vertices": {"type": "array", "items": {"type": "string"}},
        "edges": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "string"},
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
}


class LeafPowerError(Exception):
    """Base exception of the leaf power libraries."""

    @property
    def name(self):
        """Get a string representation of the error plus class name."""
        return f"<{type(self).__module__}.{type(self).__name__}>"

    @property
    def message(self):
        """Return the message passed as an argument."""
        return self.args[0]

    def __repr__(self):
        """Return the string representation of the error."""
        return f"<{type(self).__module__}.{type(self).__name__} {self.args}>"


class ParseError(LeafPowerError):
    """Exception raised when a graph cannot be built from its serialized form."""


class UnknownVertexError(LeafPowerError):
    """Exception raised when a vertex does not belong to the host graph."""


class IncomparablePartitionsError(LeafPowerError):
    """Exception raised when comparing partitions of different ground sets."""


class PartitionError(LeafPowerError):
    """Exception raised when a collection of blocks is not a partition."""


def bits(mask: int) -> Iterator[int]:
    """Iterate over the indices set in `mask`, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Undirected simple graph with named vertices."""

    __slots__ = ("_vertices", "_index", "_adj")

    def __init__(self, vertices: Iterable[str] = (), edges: Iterable[Iterable[str]] = ()):
        names = tuple(str(v) for v in vertices)
        index: dict[str, int] = {}
        for i, v in enumerate(names):
            if v in index:
                raise ParseError(f"duplicate vertex `{v}`")
            index[v] = i

        adj = [0] * len(names)
        for edge in edges:
            try:
                u, v = (str(end) for end in edge)
            except ValueError:
                raise ParseError(f"edge `{edge}` must have exactly two endpoints")
            if u == v:
                raise ParseError(f"self-loop on vertex `{u}`")
            for end in (u, v):
                if end not in index:
                    raise UnknownVertexError(f"edge `{u} {v}` references unknown vertex `{end}`")
            i, j = index[u], index[v]
            adj[i] |= 1 << j
            adj[j] |= 1 << i

        self._vertices = names
        self._index = index
        self._adj = tuple(adj)

    @classmethod
    def _from_adjacency(cls, vertices: tuple[str, ...], adj: Sequence[int]) -> "Graph":
        graph = cls.__new__(cls)
        graph._vertices = vertices
        graph._index = {v: i for i, v in enumerate(vertices)}
        graph._adj = tuple(adj)
        return graph

    @property
    def vertices(self) -> tuple[str, ...]:
        """Vertex identifiers in index order."""
        return self._vertices

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        """Edges as pairs `(u, v)` with `u` before `v` in index order."""
        return tuple(
            (self._vertices[i], self._vertices[j])
            for i in range(len(self._vertices))
            for j in bits(self._adj[i] >> (i + 1) << (i + 1))
        )

    @property
    def full_mask(self) -> int:
        """Bitset holding every vertex."""
        return (1 << len(self._vertices)) - 1

    def __len__(self) -> int:
        return len(self._vertices)

    def __iter__(self) -> Iterator[str]:
        return iter(self._vertices)

    def __contains__(self, v: object) -> bool:
        return v in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            frozenset(self._vertices) == frozenset(other._vertices)
            and self._edge_set() == other._edge_set()
        )

    def __hash__(self) -> int:
        return hash((frozenset(self._vertices), self._edge_set()))

    def __repr__(self) -> str:
        return f"Graph(vertices={list(self._vertices)}, edges={[list(e) for e in self.edges]})"

    def _edge_set(self) -> frozenset[frozenset[str]]:
        return frozenset(frozenset(e) for e in self.edges)

    def index(self, v: str) -> int:
        """Get the dense index of a vertex.

        Raises:
            UnknownVertexError: if `v` is not a vertex of the graph.
        """
        try:
            return self._index[v]
        except KeyError:
            raise UnknownVertexError(f"unknown vertex `{v}`")

    def mask(self, vs: Iterable[str]) -> int:
        """Convert a collection of vertices into a bitset."""
        result = 0
        for v in vs:
            result |= 1 << self.index(v)
        return result

    def members(self, mask: int) -> VertexSet:
        """Convert a bitset into the set of vertex identifiers it holds."""
        return frozenset(self._vertices[i] for i in bits(mask))

    def ordered(self, vs: Iterable[str] | int) -> list[str]:
        """List vertices (a collection or a bitset) in index order."""
        mask = vs if isinstance(vs, int) else self.mask(vs)
        return [self._vertices[i] for i in bits(mask)]

    def neighbor_mask(self, v: str) -> int:
        """Bitset of the neighbors of `v`."""
        return self._adj[self.index(v)]

    def adjacency(self, i: int) -> int:
        """Bitset of the neighbors of the vertex with index `i`."""
        return self._adj[i]

    def neighbors(self, v: str) -> VertexSet:
        """Neighborhood N(v)."""
        return self.members(self.neighbor_mask(v))

    def adjacent(self, u: str, v: str) -> bool:
        """Check whether `uv` is an edge."""
        return bool(self.neighbor_mask(u) >> self.index(v) & 1)

    def degree(self, v: str) -> int:
        """Number of neighbors of `v`."""
        return self.neighbor_mask(v).bit_count()

    def component_masks(self, within: Optional[int] = None) -> list[int]:
        """Connected components of the subgraph induced by `within`, as bitsets.

        Components are listed by their lowest index.
        """
        remaining = self.full_mask if within is None else within
        components = []
        while remaining:
            component = remaining & -remaining
            frontier = component
            while frontier:
                reached = 0
                for i in bits(frontier):
                    reached |= self._adj[i]
                frontier = reached & remaining & ~component
                component |= frontier
            components.append(component)
            remaining &= ~component
        return components

    def with_vertex(self, v: str, neighbors: Iterable[str] = ()) -> "Graph":
        """Return a new graph with the vertex `v` joined to `neighbors`."""
        if v in self._index:
            raise ParseError(f"duplicate vertex `{v}`")
        edges = list(self.edges) + [(v, u) for u in neighbors]
        return Graph(self._vertices + (v,), edges)

    def without_vertex(self, v: str) -> "Graph":
        """Return the graph G - v."""
        return induced_subgraph(self, frozenset(self._vertices) - {self._vertices[self.index(v)]})


class Partition:
    """Partition of a ground set into non-empty, pairwise disjoint blocks."""

    __slots__ = ("_blocks", "_ground", "_order", "_rank")

    def __init__(
        self,
        blocks: Iterable[Iterable[str]],
        ground: Optional[Iterable[str]] = None,
        order: Optional[Sequence[str]] = None,
    ):
        collected = [frozenset(str(v) for v in block) for block in blocks]
        seen: set[str] = set()
        for block in collected:
            if not block:
                raise PartitionError("blocks of a partition cannot be empty")
            if overlap := seen & block:
                raise PartitionError(f"blocks overlap on `{sorted(overlap)}`")
            seen |= block

        union = frozenset(seen)
        if ground is not None and frozenset(str(v) for v in ground) != union:
            raise PartitionError("blocks do not cover the ground set exactly")

        self._order = tuple(order) if order is not None else None
        self._rank = {v: i for i, v in enumerate(order)} if order is not None else None
        if self._rank is not None and (missing := union - self._rank.keys()):
            raise PartitionError(f"vertices `{sorted(missing)}` are missing from the order")
        self._ground = union
        self._blocks = tuple(sorted(collected, key=self._key))

    def _key(self, block: VertexSet) -> Any:
        if self._rank is None:
            return min(block)
        return min(self._rank[v] for v in block)

    @classmethod
    def singletons(cls, ground: Iterable[str], order: Optional[Sequence[str]] = None):
        """Finest partition of `ground`."""
        return cls([[v] for v in ground], order=order)

    @property
    def blocks(self) -> tuple[VertexSet, ...]:
        """Blocks in canonical order."""
        return self._blocks

    @property
    def ground(self) -> VertexSet:
        """Union of the blocks."""
        return self._ground

    def __len__(self) -> int:
        return len(self._blocks)

    def __iter__(self) -> Iterator[VertexSet]:
        return iter(self._blocks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self._ground == other._ground and frozenset(self._blocks) == frozenset(
            other._blocks
        )

    def __hash__(self) -> int:
        return hash(frozenset(self._blocks))

    def __repr__(self) -> str:
        return f"Partition({[sorted(b) for b in self._blocks]})"

    def block_of(self, v: str) -> VertexSet:
        """Get the block holding `v`."""
        for block in self._blocks:
            if v in block:
                return block
        raise UnknownVertexError(f"vertex `{v}` is not in the ground set")

    def merge(self, blocks: Iterable[VertexSet]) -> "Partition":
        """Return the partition where the given blocks are replaced by their union."""
        chosen = set(blocks)
        if not chosen:
            return self
        if unknown := chosen - set(self._blocks):
            raise PartitionError(f"`{[sorted(b) for b in unknown]}` are not blocks")
        merged = frozenset().union(*chosen)
        kept = [b for b in self._blocks if b not in chosen]
        return Partition(kept + [merged], order=self._order)


@dataclass(frozen=True)
class Discrepancy:
    """A vertex pair on which a model and a graph disagree."""

    u: str
    v: str
    expected: bool
    """Whether `uv` is an edge of the graph."""

    reason: str


@dataclass(frozen=True)
class Verification:
    """Result of checking a model against a graph.

    Notes:
        The value is truthy iff no discrepancy was found.
    """

    discrepancies: tuple[Discrepancy, ...] = ()

    @property
    def ok(self) -> bool:
        """Check whether the model represents the graph exactly."""
        return not self.discrepancies

    def __bool__(self) -> bool:
        return self.ok


def compare_adjacency(
    g: Graph, model_adjacent: Callable[[str, str], bool], describe: Callable[[str, str], str]
) -> Verification:
    """Compare a model's adjacency predicate against the edges of `g` on every vertex pair.

    Args:
        g: graph the model claims to represent.
        model_adjacent: adjacency decided by the model semantics.
        describe: explanation attached to a discrepancy on the pair.
    """
    found = []
    vertices = g.vertices
    for i, u in enumerate(vertices):
        for v in vertices[i + 1 :]:
            expected = g.adjacent(u, v)
            if model_adjacent(u, v) != expected:
                found.append(Discrepancy(u, v, expected, describe(u, v)))
    return Verification(tuple(found))


def connected_components(g: Graph) -> Partition:
    """Partition of `g` into its connected components."""
    return Partition(
        [g.members(c) for c in g.component_masks()], ground=g.vertices, order=g.vertices
    )


def refines(a: Partition, b: Partition) -> bool:
    """Check whether every block of `a` is included in a block of `b`.

    Raises:
        IncomparablePartitionsError: if the partitions have different ground sets.
    """
    if a.ground != b.ground:
        raise IncomparablePartitionsError("partitions of different ground sets are incomparable")
    return all(block <= b.block_of(next(iter(block))) for block in a)


def induced_subgraph(g: Graph, s: Iterable[str]) -> Graph:
    """Graph induced by `s`, keeping the vertex order of `g`.

    Raises:
        UnknownVertexError: if `s` holds a vertex outside `g`.
    """
    keep = g.mask(s)
    kept = list(bits(keep))
    position = {old: new for new, old in enumerate(kept)}
    adj = []
    for old in kept:
        row = 0
        for j in bits(g.adjacency(old) & keep):
            row |= 1 << position[j]
        adj.append(row)
    return Graph._from_adjacency(tuple(g.vertices[i] for i in kept), adj)


def _common_neighbors(g: Graph, mask: int) -> int:
    common = g.full_mask & ~mask
    for i in bits(mask):
        common &= g.adjacency(i)
    return common


def is_clique(g: Graph, s: Iterable[str]) -> bool:
    """Check whether `s` is pairwise adjacent."""
    mask = g.mask(s)
    return all((g.adjacency(i) | 1 << i) & mask == mask for i in bits(mask))


def is_maximal_clique(g: Graph, s: Iterable[str]) -> bool:
    """Check whether `s` is a clique that no outside vertex extends."""
    mask = g.mask(s)
    if not is_clique(g, s):
        return False
    return _common_neighbors(g, mask) == 0


def is_minimal_separator(g: Graph, s: Iterable[str]) -> bool:
    """Check whether `s` is a minimal separator of `g`.

    A set is a minimal separator iff at least two components of `g - s` are full, i.e. have
    every vertex of `s` as a neighbor.
    """
    mask = g.mask(s)
    full = 0
    for component in g.component_masks(g.full_mask & ~mask):
        reached = 0
        for i in bits(component):
            reached |= g.adjacency(i)
        if reached & mask == mask:
            full += 1
    return full >= 2


def _build(vertices: list[str], edges: list[tuple[str, str]], source: str) -> Graph:
    seen = set()
    for u, v in edges:
        if u == v:
            raise ParseError(f"self-loop on vertex `{u}` in {source}")
        key = frozenset((u, v))
        if key in seen:
            raise ParseError(f"duplicate edge `{u} {v}` in {source}")
        seen.add(key)
    return Graph(vertices, edges)


def graph_from_json(data: str | dict) -> Graph:
    """Build a graph from Graph JSON (a string or an already decoded object).

    Raises:
        ParseError: if the document is not valid Graph JSON.
    """
    try:
        obj = json.loads(data) if isinstance(data, str) else data
        validate(obj, GRAPH_SCHEMA)
    except (json.JSONDecodeError, ValidationError) as e:
        raise ParseError(f"invalid graph JSON. Reason: {getattr(e, 'message', e)}")
    _logger.debug(f"graph_from_json: {len(obj['vertices'])} vertices, {len(obj['edges'])} edges")
    return _build(obj["vertices"], [(u, v) for u, v in obj["edges"]], "graph JSON")


def graph_to_json(g: Graph) -> dict:
    """Serialize a graph into Graph JSON."""
    return {"vertices": list(g.vertices), "edges": [list(e) for e in g.edges]}


def parse_edge_list(text: str) -> Graph:
    """Build a graph from the edge-list text format.

    Raises:
        ParseError: on lines with more than two tokens, duplicate edges or self-loops.
    """
    vertices: dict[str, None] = {}
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split("#", 1)[0].split()
        if len(tokens) > 2:
            raise ParseError(f"line {lineno}: expected `u v`, got `{line.strip()}`")
        for token in tokens:
            vertices.setdefault(token)
        if len(tokens) == 2:
            edges.append((tokens[0], tokens[1]))
    return _build(list(vertices), edges, "edge list")


def format_edge_list(g: Graph) -> str:
    """Serialize a graph into the edge-list text format."""
    lines = [v for v in g.vertices if g.degree(v) == 0]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"
