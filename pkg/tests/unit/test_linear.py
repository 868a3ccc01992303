#!/usr/bin/env python3
# Copyright 2024 The leafpowers Authors.
# See LICENSE file for licensing details.

"""Test the linear leaf power library."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from leafpowers.graphs.v0.core import Graph
from leafpowers.models.v0.linear import (
    BlueRedModel,
    GeneralLeafRoot,
    LinearLeafRoot,
    ModelError,
    RatInterval,
    bluered_graph,
    bluered_to_linear_leafroot,
    interval_contains,
    intervals_intersect,
    linear_leafroot_to_bluered,
    linear_root_graph,
    linear_root_to_general,
    normalize_bluered,
    verify_bluered_model,
    verify_general_leafroot,
    verify_linear_leafroot,
)
from leafpowers.oracle.v0.generators import gen_bluered, gen_linear_root

HALF = Fraction(1, 2)
P3 = Graph(["a", "b", "c"], [("a", "b"), ("b", "c")])
CHAIN = BlueRedModel(
    ["a", "b", "c"], [], {"a": (0, 1), "b": (1, 2), "c": (2, 3)}
)
# a red point on the right end of a blue interval, next to a second blue interval
POINT_ON_END = BlueRedModel(["b", "c"], ["r"], {"b": (0, 1), "r": (1, 1), "c": (2, 3)})


class TestIntervals:
    @pytest.mark.parametrize(
        ("i1", "i2", "expected"),
        [
            (RatInterval(0, 1), RatInterval(1, 2), True),
            (RatInterval(0, 1), RatInterval(Fraction(3, 2), 2), False),
            (RatInterval(0, 2), RatInterval(HALF, 1), True),
            (RatInterval(3, 3), RatInterval(3, 3), True),
        ],
    )
    def test_intersect(self, i1, i2, expected):
        assert intervals_intersect(i1, i2) is expected
        assert intervals_intersect(i2, i1) is expected

    @pytest.mark.parametrize(
        ("outer", "inner", "expected"),
        [
            (RatInterval(0, 2), RatInterval(HALF, 1), True),
            (RatInterval(0, 1), RatInterval(0, 1), True),
            (RatInterval(0, 1), RatInterval(HALF, Fraction(3, 2)), False),
            (RatInterval(HALF, 1), RatInterval(0, 2), False),
            (RatInterval(0, 1), RatInterval(1, 1), True),
        ],
    )
    def test_contains(self, outer, inner, expected):
        assert interval_contains(outer, inner) is expected

    def test_reversed_interval(self):
        with pytest.raises(ModelError):
            RatInterval(2, 1)

    def test_rendering(self):
        assert str(RatInterval(HALF, 2)) == "[1/2, 2]"
        assert RatInterval("1/4", "3/4").midpoint == HALF


class TestBlueRedModel:
    def test_colors_must_be_disjoint(self):
        with pytest.raises(ModelError):
            BlueRedModel(["a"], ["a"], {"a": (0, 1)})

    def test_chain(self):
        assert verify_bluered_model(P3, CHAIN)
        assert bluered_graph(CHAIN) == P3

    def test_red_vertices(self):
        g = bluered_graph(POINT_ON_END)
        assert g.neighbors("r") == {"b"}
        assert not g.adjacent("b", "c")
        reds = BlueRedModel([], ["r", "s"], {"r": (0, 1), "s": (0, 1)})
        assert bluered_graph(reds).edges == ()

    def test_discrepancies(self):
        result = verify_bluered_model(Graph(["a", "b", "c"], [("a", "b")]), CHAIN)
        assert not result
        assert [(d.u, d.v, d.expected) for d in result.discrepancies] == [("b", "c", False)]

    def test_missing_vertex(self):
        with pytest.raises(ModelError):
            verify_bluered_model(P3.with_vertex("d"), CHAIN)


class TestNormalize:
    def test_rescales_long_intervals(self):
        model = BlueRedModel(["a", "b"], [], {"a": (0, 2), "b": (1, 3)})
        normalized = normalize_bluered(model)
        assert normalized.intervals["a"] == RatInterval(0, 1)
        assert normalized.intervals["b"] == RatInterval(HALF, Fraction(3, 2))

    def test_extends_points(self):
        model = BlueRedModel(["a", "b"], [], {"a": (0, 1), "b": (5, 5)})
        normalized = normalize_bluered(model)
        assert all(0 < i.length <= 1 for i in normalized.intervals.values())
        assert bluered_graph(normalized) == bluered_graph(model)

    def test_widens_when_extension_breaks_containment(self):
        normalized = normalize_bluered(POINT_ON_END)
        assert all(0 < i.length <= 1 for i in normalized.intervals.values())
        assert bluered_graph(normalized) == bluered_graph(POINT_ON_END)

    @given(st.integers(0, 10_000), st.integers(1, 20))
    @settings(max_examples=100)
    def test_keeps_the_graph(self, seed, n):
        g, model = gen_bluered(seed, n, normalized=False)
        normalized = normalize_bluered(model)
        assert all(0 < i.length <= 1 for i in normalized.intervals.values())
        assert verify_bluered_model(g, normalized)


class TestLinearLeafRoot:
    @pytest.mark.parametrize(
        ("spine", "edges", "legs"),
        [
            (["a", "b"], [], [0, 0]),
            (["a", "b"], [1], [0]),
            (["a", None], [1], [0, 0]),
            (["a", "a"], [1], [0, 0]),
            (["a", "b"], [2], [0, 0]),
            (["a", "b"], [1], [0, -1]),
        ],
    )
    def test_invalid(self, spine, edges, legs):
        with pytest.raises(ModelError):
            LinearLeafRoot(spine, edges, legs)

    def test_positions_skip_dummy_nodes(self):
        root = LinearLeafRoot(["a", None, "b"], [HALF, 1], [0, None, 0])
        assert root.leaves == ("a", "b")
        assert root.positions() == {"a": 0, "b": Fraction(3, 2)}

    def test_path(self):
        root = LinearLeafRoot(["a", "b", "c"], [HALF, HALF], [HALF, 0, HALF])
        assert verify_linear_leafroot(P3, root)
        assert linear_root_graph(root) == P3

    def test_leaves_must_match(self):
        root = LinearLeafRoot(["a", "b"], [0], [0, 0])
        with pytest.raises(ModelError):
            verify_linear_leafroot(P3, root)


class TestConversions:
    def test_chain_to_caterpillar(self):
        root = bluered_to_linear_leafroot(P3, CHAIN)
        assert root.spine_order == ("a", "b", "c")
        assert root.spine_weights == (1, 1)
        assert root.leg_weights == (0, 0, 0)
        assert verify_linear_leafroot(P3, root)

    def test_components_are_chained(self):
        g = Graph(["a", "b", "c"], [("a", "b")])
        model = BlueRedModel(["a", "b", "c"], [], {"a": (0, 1), "b": (1, 2), "c": (9, 10)})
        root = bluered_to_linear_leafroot(g, model)
        assert root.spine_order == ("a", "b", None, "c")
        assert root.spine_weights[1:] == (1, 1)
        assert verify_linear_leafroot(g, root)

    def test_requires_normalized_model(self):
        model = BlueRedModel(["a"], [], {"a": (0, 2)})
        with pytest.raises(ModelError):
            bluered_to_linear_leafroot(Graph(["a"]), model)

    def test_caterpillar_to_bluered(self):
        quarter = Fraction(1, 4)
        root = LinearLeafRoot(["a", "b", "c"], [quarter, quarter], [0, Fraction(3, 4), 0])
        g = linear_root_graph(root)
        model = linear_leafroot_to_bluered(g, root)
        assert len(g.edges) == 3
        assert model.red == {"b"}
        assert model.intervals["a"] == RatInterval(-HALF, HALF)
        assert model.intervals["b"] == RatInterval(0, HALF)
        assert verify_bluered_model(g, model)

    def test_isolated_vertices_move_away(self):
        root = LinearLeafRoot(["a", "b"], [1], [1, 1])
        g = linear_root_graph(root)
        model = linear_leafroot_to_bluered(g, root)
        assert g.edges == ()
        assert model.blue == {"a", "b"}
        assert verify_bluered_model(g, model)

    @given(st.integers(0, 10_000), st.integers(1, 30))
    @settings(max_examples=100)
    def test_bluered_round_trip(self, seed, n):
        g, model = gen_bluered(seed, n)
        root = bluered_to_linear_leafroot(g, model)
        assert verify_linear_leafroot(g, root)
        assert verify_bluered_model(g, linear_leafroot_to_bluered(g, root))

    @given(st.integers(0, 10_000), st.integers(2, 30), st.booleans())
    @settings(max_examples=100)
    def test_caterpillar_round_trip(self, seed, n, isolated):
        g, root = gen_linear_root(seed, n, isolated=isolated)
        if not isolated:
            assert all(g.degree(v) for v in g.vertices)
        model = linear_leafroot_to_bluered(g, root)
        assert verify_bluered_model(g, model)
        assert verify_linear_leafroot(g, bluered_to_linear_leafroot(g, normalize_bluered(model)))


class TestGeneralLeafRoot:
    def test_from_caterpillar(self):
        root = LinearLeafRoot(["a", None, "b", "c"], [1, 1, HALF], [0, None, HALF, 0])
        g = linear_root_graph(root)
        general = linear_root_to_general(root)
        assert general.leaf_map == {"a": "leaf-a", "b": "leaf-b", "c": "leaf-c"}
        assert verify_general_leafroot(g, general)

    def test_star(self):
        root = GeneralLeafRoot(
            ["o", "p", "q", "r"], [("o", "p", HALF), ("o", "q", HALF), ("o", "r", 1)], {
                "a": "p", "b": "q", "c": "r"
            }
        )
        g = Graph(["a", "b", "c"], [("a", "b")])
        assert verify_general_leafroot(g, root)

    @pytest.mark.parametrize(
        ("nodes", "edges", "leaf_map"),
        [
            (["o", "p"], [], {"a": "p"}),
            (["o", "p", "q"], [("o", "p", 1), ("p", "q", 1)], {"a": "p"}),
            (["o", "p"], [("o", "p", 2)], {"a": "p"}),
            (["o", "p", "q"], [("o", "p", 1), ("o", "q", 1)], {"a": "p", "b": "p"}),
        ],
    )
    def test_invalid(self, nodes, edges, leaf_map):
        with pytest.raises(ModelError):
            GeneralLeafRoot(nodes, edges, leaf_map)
