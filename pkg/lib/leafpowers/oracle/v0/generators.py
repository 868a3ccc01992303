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

"""Seeded random models and the graphs they represent.

Every generator draws a model with rational parameters on a quarter grid, builds the graph
the model's semantics induce and returns both, so the pair always verifies. The same seed
always yields the same pair. Vertices are named `v0`, `v1`, ...
"""

import logging
import random
from fractions import Fraction

from leafpowers.graphs.v0.core import Graph
from leafpowers.models.v0.linear import (
    BlueRedModel,
    LinearLeafRoot,
    RatInterval,
    bluered_graph,
    linear_root_graph,
)
from leafpowers.models.v0.nes import Ball, EmbeddedTree, NesModel, nes_graph
from leafpowers.models.v0.star import BlockPlacement, StarNesModel, star_graph

__all__ = [
    "gen_bluered",
    "gen_linear_root",
    "gen_star_model",
    "gen_nes_model",
]

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before publishing the library, or reset
# to 0 if you are raising the major API version
LIBPATCH = 1

_logger = logging.getLogger(__name__)

STAR_RAY_LENGTH = Fraction(10)


def _quarter(rng: random.Random, low: int, high: int) -> Fraction:
    """Uniform multiple of 1/4 in `[low / 4, high / 4]`."""
    return Fraction(rng.randint(low, high), 4)


def _names(n: int) -> list[str]:
    return [f"v{i}" for i in range(n)]


def gen_bluered(seed: int, n: int, normalized: bool = True) -> tuple[Graph, BlueRedModel]:
    """Random blue-red interval model; about a third of the vertices are red.

    Args:
        seed: random seed.
        n: number of vertices.
        normalized: keep every length in (0, 1]; otherwise lengths range over [0, 2].
    """
    rng = random.Random(seed)
    blue, red, intervals = [], [], {}
    for v in _names(n):
        (red if rng.random() < 1 / 3 else blue).append(v)
        lo = _quarter(rng, 0, 2 * n)
        length = _quarter(rng, 1, 4) if normalized else _quarter(rng, 0, 8)
        intervals[v] = RatInterval(lo, lo + length)
    model = BlueRedModel(blue, red, intervals)
    return bluered_graph(model), model


def gen_linear_root(seed: int, n: int, isolated: bool = True) -> tuple[Graph, LinearLeafRoot]:
    """Random caterpillar leaf root with one leaf per spine node.

    Args:
        seed: random seed.
        n: number of vertices.
        isolated: allow isolated vertices. When False, every isolated leaf is pulled towards
            a spine neighbor until the two become adjacent; this needs `n >= 2`.
    """
    rng = random.Random(seed)
    spine = _names(n)
    rng.shuffle(spine)
    edges = [_quarter(rng, 0, 4) for _ in range(max(n - 1, 0))]
    legs = [_quarter(rng, 0, 4) for _ in range(n)]
    root = LinearLeafRoot(spine, edges, legs)

    if not isolated and n >= 2:
        graph = linear_root_graph(root)
        # shortening legs never removes an edge
        for i, v in enumerate(spine):
            if graph.degree(v):
                continue
            j = i + 1 if i + 1 < n else i - 1
            legs[j] = Fraction(0)
            legs[i] = min(legs[i], 1 - edges[min(i, j)])
        root = LinearLeafRoot(spine, edges, legs)
    return linear_root_graph(root), root


def gen_star_model(seed: int, n: int, beta: int) -> tuple[Graph, StarNesModel]:
    """Random star NeS model with `beta` rays of length 10.

    Between one and `max(1, n // 3)` vertices are central; each central vertex reaches a
    common distance on every ray and, half of the time, further along one ray.
    """
    rng = random.Random(seed)
    names = _names(n)
    t = min(n, rng.randint(1, max(1, n // 3)))
    top = int(STAR_RAY_LENGTH * 4)

    central = {}
    for x in names[:t]:
        common = _quarter(rng, 0, top)
        reach = [common] * beta
        if rng.random() < 1 / 2:
            reach[rng.randrange(beta)] = _quarter(rng, int(common * 4), top)
        central[x] = reach

    blocks = {}
    for b in names[t:]:
        s = _quarter(rng, 1, top)
        blocks[b] = BlockPlacement(rng.randrange(beta), s, _quarter(rng, int(s * 4), top))

    model = StarNesModel([STAR_RAY_LENGTH] * beta, central, blocks)
    return star_graph(model), model


def gen_nes_model(seed: int, n: int) -> tuple[Graph, NesModel]:
    """Random NeS model on a random embedded tree with up to `n + 1` nodes."""
    rng = random.Random(seed)
    nodes = [f"t{i}" for i in range(rng.randint(1, n + 1))]
    tree = EmbeddedTree(
        nodes,
        [(nodes[rng.randrange(i)], nodes[i], _quarter(rng, 1, 8)) for i in range(1, len(nodes))],
    )

    balls = {}
    for v in _names(n):
        if not tree.edges or rng.random() < 1 / 3:
            center = tree.point(node=rng.choice(nodes))
        else:
            a, b, length = rng.choice(tree.edges)
            center = tree.point(edge=(a, b), offset=length * Fraction(rng.randint(0, 4), 4))
        balls[v] = Ball(center, _quarter(rng, 0, 8))
    model = NesModel(tree, balls)
    _logger.debug(f"gen_nes_model: {len(nodes)} nodes, {n} balls")
    return nes_graph(model), model
