#!/usr/bin/env python3
# Copyright 2024 The leafpowers Authors.
# See LICENSE file for licensing details.

"""Test the DOT export of certificates."""

from fractions import Fraction

import pytest
from leafpowers.graphs.v0.core import Graph, Partition
from leafpowers.models.v0.linear import BlueRedModel, LinearLeafRoot
from leafpowers.models.v0.nes import Ball, EmbeddedTree, NesModel
from leafpowers.models.v0.star import BlockPlacement, GoodPartition, StarNesModel

from utils.certificates import wrap
from utils.dot import quote, to_dot

EDGE = EmbeddedTree(["a", "b"], [("a", "b", 2)])


class TestQuote:
    @pytest.mark.parametrize(
        ("name", "quoted"),
        [
            ("v", '"v"'),
            ('say "hi"', '"say \\"hi\\""'),
            ("two\nlines", '"two\\nlines"'),
            ("back\\slash", '"back\\\\slash"'),
        ],
    )
    def test_quote(self, name, quoted):
        assert quote(name) == quoted


class TestToDot:
    def test_bluered(self):
        model = BlueRedModel(["a", "b"], ["r"], {"a": (0, 1), "b": (1, 2), "r": (3, 3)})
        dot = to_dot(wrap(model))
        assert dot.startswith('graph "bluered" {\n')
        assert dot.endswith("}\n")
        assert '    "a" [label="a\\n[0, 1]", color="blue"];' in dot
        assert '    "r" [label="r\\n[3, 3]", color="red"];' in dot
        assert '    "a" -- "b";' in dot

    def test_caterpillar(self):
        root = LinearLeafRoot(["a", None, "b"], [1, Fraction(1, 2)], [0, None, Fraction(1, 4)])
        dot = to_dot(wrap(root))
        assert '    "tree/spine-0" -- "tree/spine-1" [label="1"];' in dot
        assert '    "tree/spine-1" -- "tree/spine-2" [label="1/2"];' in dot
        assert '    "tree/spine-2" -- "b" [label="1/4"];' in dot

    def test_star(self):
        model = StarNesModel(
            [3, 3], {"x": [1, 2]}, {"b": BlockPlacement(1, Fraction(1), Fraction(2))}
        )
        dot = to_dot(wrap(model))
        assert '    "tree/c" -- "tree/r0" [label="3"];' in dot
        assert '    "x" [shape="box", label="x\\n1, 2"];' in dot
        assert '    "tree/r1" -- "b" [style="dashed"];' in dot

    def test_nes(self):
        model = NesModel(
            EDGE,
            {
                "x": Ball(EDGE.point(node="a"), 1),
                "y": Ball(EDGE.point(edge=("a", "b"), offset=Fraction(1, 2)), 1),
            },
        )
        dot = to_dot(wrap(model))
        assert '    "tree/a" [shape="point", xlabel="a"];' in dot
        assert '    "tree/a" -- "tree/b" [label="2"];' in dot
        assert '    "tree/a" -- "x" [style="dashed", label=""];' in dot
        assert '    "tree/a" -- "y" [style="dashed", label="+1/2"];' in dot

    def test_good_partition(self):
        g = Graph(["x", "y", "a"], [("x", "y"), ("a", "x")])
        gp = GoodPartition(frozenset("xy"), Partition([["a"]]), ("y", "x"))
        dot = to_dot(wrap(gp), g)
        assert '    "y" [label="y (1)"];' in dot
        cluster = (
            '    subgraph "cluster_X" {\n'
            '        label="X";\n        "y";\n        "x";\n    }'
        )
        assert cluster in dot
        assert '    subgraph "cluster_B0" {' in dot
        assert '    "x" -- "a";' in dot
        assert " -- " not in to_dot(wrap(gp))
