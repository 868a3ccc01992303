# Copyright 2024 The leafpowers Authors.
# See LICENSE file for licensing details.

"""DOT export of certificates.

The output can be laid out with graphviz, for example:

    leafpowers export-dot root.json --output root.gv
    dot -Tpng -O root.gv
"""

import logging
from fractions import Fraction
from typing import Optional

from leafpowers.graphs.v0.core import Graph
from leafpowers.models.v0.linear import BlueRedModel, LinearLeafRoot, bluered_graph
from leafpowers.models.v0.nes import NesModel
from leafpowers.models.v0.star import GoodPartition, StarNesModel

from utils.certificates import Certificate

_logger = logging.getLogger(__name__)


def quote(name: str) -> str:
    """Quote an identifier or label as a DOT string."""
    escaped = name.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def _attributes(**attrs: str) -> str:
    if not attrs:
        return ""
    return " [" + ", ".join(f"{key}={quote(value)}" for key, value in attrs.items()) + "]"


class _Writer:
    """Accumulates the lines of one undirected DOT graph."""

    def __init__(self, name: str):
        self.lines = [f"graph {quote(name)} {{"]

    def node(self, name: str, **attrs: str) -> None:
        self.lines.append(f"    {quote(name)}{_attributes(**attrs)};")

    def edge(self, a: str, b: str, **attrs: str) -> None:
        self.lines.append(f"    {quote(a)} -- {quote(b)}{_attributes(**attrs)};")

    def cluster(self, name: str, label: str, members: list[str]) -> None:
        self.lines.append(f"    subgraph {quote('cluster_' + name)} {{")
        self.lines.append(f"        label={quote(label)};")
        self.lines += [f"        {quote(v)};" for v in members]
        self.lines.append("    }")

    def render(self) -> str:
        return "\n".join(self.lines + ["}"]) + "\n"


def _bluered(m: BlueRedModel) -> _Writer:
    out = _Writer("bluered")
    for v, interval in m.intervals.items():
        out.node(v, label=f"{v}\n{interval}", color=m.color(v))
    for u, v in bluered_graph(m).edges:
        out.edge(u, v)
    return out


def _caterpillar(r: LinearLeafRoot) -> _Writer:
    out = _Writer("linear-leafroot")
    spine = [f"tree/spine-{i}" for i in range(len(r.spine_order))]
    for node in spine:
        out.node(node, shape="point")
    for i, w in enumerate(r.spine_weights):
        out.edge(spine[i], spine[i + 1], label=str(w))
    for node, v, w in zip(spine, r.spine_order, r.leg_weights):
        if v is not None:
            out.node(v, shape="box")
            out.edge(node, v, label=str(w))
    return out


def _star(m: StarNesModel) -> _Writer:
    out = _Writer("star-nes")
    out.node("tree/c", shape="point")
    for j, length in enumerate(m.ray_lengths):
        out.node(f"tree/r{j}", shape="point")
        out.edge("tree/c", f"tree/r{j}", label=str(length))
    for x, reach in m.central.items():
        out.node(x, shape="box", label=f"{x}\n{', '.join(str(v) for v in reach)}")
        out.edge("tree/c", x, style="dashed")
    for b, spot in m.blocks.items():
        out.node(b, shape="box", label=f"{b}\n[{spot.s}, {spot.t}]")
        out.edge(f"tree/r{spot.ray}", b, style="dashed")
    return out


def _nes(m: NesModel) -> _Writer:
    out = _Writer("nes-model")
    for node in m.tree.nodes:
        out.node(f"tree/{node}", shape="point", xlabel=node)
    for a, b, length in m.tree.edges:
        out.edge(f"tree/{a}", f"tree/{b}", label=str(length))
    for v, ball in m.subtrees.items():
        out.node(v, shape="box", label=f"{v}\nr={ball.radius}")
        anchor, offset = m.tree.anchors(ball.center)[0]
        attach = "" if offset == Fraction(0) else f"+{offset}"
        out.edge(f"tree/{anchor}", v, style="dashed", label=attach)
    return out


def _partition(gp: GoodPartition, g: Optional[Graph]) -> _Writer:
    out = _Writer("good-partition")
    rank = {x: i for i, x in enumerate(gp.permutation, start=1)}
    for x in gp.permutation:
        out.node(x, label=f"{x} ({rank[x]})")
    out.cluster("X", "X", list(gp.permutation))
    for k, block in enumerate(gp.blocks):
        out.cluster(f"B{k}", f"B{k}", sorted(block))
    if g is not None:
        for u, v in g.edges:
            out.edge(u, v)
    return out


def to_dot(certificate: Certificate, g: Optional[Graph] = None) -> str:
    """Render a certificate as an undirected DOT graph.

    Args:
        certificate: the certificate to draw.
        g: graph whose edges are drawn over a good partition; ignored for other kinds.
    """
    match certificate.model:
        case BlueRedModel():
            out = _bluered(certificate.model)
        case LinearLeafRoot():
            out = _caterpillar(certificate.model)
        case StarNesModel():
            out = _star(certificate.model)
        case NesModel():
            out = _nes(certificate.model)
        case _:
            out = _partition(certificate.model, g)
    _logger.debug(f"to_dot: {len(out.lines) + 1} lines for `{certificate.kind}`")
    return out.render()
