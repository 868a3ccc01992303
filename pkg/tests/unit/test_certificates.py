#!/usr/bin/env python3
# Copyright 2024 The leafpowers Authors.
# See LICENSE file for licensing details.

"""Test certificate encoding, checking and conversion."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from leafpowers.graphs.v0.core import Graph, Partition
from leafpowers.models.v0.linear import BlueRedModel
from leafpowers.models.v0.star import GoodPartition, validate_good_partition
from leafpowers.oracle.v0.generators import (
    gen_bluered,
    gen_linear_root,
    gen_nes_model,
    gen_star_model,
)

from utils.certificates import (
    CertificateError,
    check,
    convert,
    decode,
    dumps,
    encode,
    represented_graph,
    wrap,
)

TRIANGLE = [("x", "y"), ("y", "z"), ("x", "z")]
X = frozenset("xyz")
P3 = Graph(["a", "b", "c"], [("a", "b"), ("b", "c")])
CHAIN = BlueRedModel(["a", "b", "c"], [], {"a": (0, 1), "b": (1, 2), "c": ("5/2", 3)})
STAR1 = Graph(
    ["x", "y", "z", "a", "b", "c", "d"],
    TRIANGLE + [("a", "x"), ("b", "x"), ("b", "y"), ("c", "y"), ("d", "x"), ("d", "y")],
)
SUN = Graph(
    ["x", "y", "z", "a", "b", "c"],
    TRIANGLE + [("a", "x"), ("a", "y"), ("b", "x"), ("b", "z"), ("c", "y"), ("c", "z")],
)


def _partition(g: Graph, permutation: tuple[str, ...]) -> GoodPartition:
    blocks = Partition.singletons([v for v in g.vertices if v not in X])
    return GoodPartition(X, blocks, permutation)


GENERATED = {
    "bluered": lambda seed, n: gen_bluered(seed, n),
    "linear-leafroot": lambda seed, n: gen_linear_root(seed, n),
    "star-nes": lambda seed, n: gen_star_model(seed, n, 2),
    "nes-model": lambda seed, n: gen_nes_model(seed, n),
}


class TestEncoding:
    def test_bluered_document(self):
        doc = encode(CHAIN)
        assert doc == {
            "kind": "bluered",
            "blue": ["a", "b", "c"],
            "red": [],
            "intervals": {"a": [0, 1, 1, 1], "b": [1, 1, 2, 1], "c": [5, 2, 3, 1]},
        }

    def test_text_form(self):
        text = dumps(wrap(CHAIN))
        assert text.endswith("}\n")
        assert decode(text).kind == "bluered"
        assert represented_graph(decode(text)) == Graph(["a", "b", "c"], [("a", "b")])

    def test_good_partition_document(self):
        gp = validate_good_partition(STAR1, X, _partition(STAR1, ()).blocks)
        doc = encode(gp)
        assert doc["X"] == ["x", "y", "z"]
        assert doc["permutation"] == ["z", "x", "y"]
        assert sorted(doc["blocks"]) == [["a"], ["b"], ["c"], ["d"]]
        assert decode(doc).model == gp
        assert represented_graph(decode(doc)) is None

    @given(st.sampled_from(sorted(GENERATED)), st.integers(0, 10_000), st.integers(1, 10))
    @settings(max_examples=100)
    def test_documents_are_stable(self, kind, seed, n):
        g, model = GENERATED[kind](seed, n)
        text = dumps(wrap(model))
        certificate = decode(text)
        assert certificate.kind == kind
        assert dumps(certificate) == text
        assert represented_graph(certificate) == g


class TestDecodeErrors:
    @pytest.mark.parametrize(
        ("document", "reason"),
        [
            ("{", "invalid certificate JSON"),
            ("[]", "certificate kind must be one of"),
            ('{"kind": "tree"}', "certificate kind must be one of"),
            ('{"kind": "bluered", "blue": ["a"], "intervals": {}}', "invalid `bluered`"),
            (
                '{"kind": "bluered", "blue": ["a"], "red": [], "intervals": {"a": [0, 1, 1]}}',
                "invalid `bluered`",
            ),
            (
                '{"kind": "bluered", "blue": ["a"], "red": [], "intervals": {"a": [0, 0, 1, 1]}}',
                "positive denominator",
            ),
            (
                '{"kind": "bluered", "blue": ["a"], "red": ["a"], '
                '"intervals": {"a": [0, 1, 1, 1]}}',
                "inconsistent `bluered`",
            ),
            (
                '{"kind": "star-nes", "rays": [[1, 1]], "central": {}, '
                '"blocks": {"b": {"ray": 3, "s": [1, 2], "t": [1, 1]}}}',
                "inconsistent `star-nes`",
            ),
            (
                '{"kind": "nes-model", "nodes": ["a"], "edges": [], '
                '"balls": {"v": {"node": "a", "edge": ["a", "a"], "radius": [1, 1]}}}',
                "invalid `nes-model`",
            ),
            (
                '{"kind": "good-partition", "X": ["x"], "blocks": [[]], "permutation": ["x"]}',
                "inconsistent `good-partition`",
            ),
        ],
    )
    def test_rejected(self, document, reason):
        with pytest.raises(CertificateError) as e:
            decode(document)
        assert reason in e.value.message


class TestCheck:
    def test_valid(self):
        assert check(Graph(["a", "b", "c"], [("a", "b")]), wrap(CHAIN)) == []

    def test_wrong_graph(self):
        problems = check(P3, wrap(CHAIN))
        assert len(problems) == 1
        assert problems[0].startswith("`b` `c`: graph has an edge, model ")

    def test_missing_vertex(self):
        assert len(check(P3.with_vertex("d"), wrap(CHAIN))) == 1

    def test_good_partition(self):
        gp = validate_good_partition(STAR1, X, _partition(STAR1, ()).blocks)
        assert check(STAR1, wrap(gp)) == []

    def test_bad_permutation(self):
        problems = check(STAR1, wrap(_partition(STAR1, ("x", "y", "z"))))
        assert problems == [
            "permutation: `x` is not removable at position 1",
            "permutation: `y` is not removable at position 2",
        ]
        assert check(STAR1, wrap(_partition(STAR1, ("x", "y")))) == [
            "permutation: does not list the central clique exactly once"
        ]

    def test_failed_property(self):
        assert check(SUN, wrap(_partition(SUN, ("x", "y", "z")))) == [
            "elimination: no remaining vertex of X is removable `['x', 'y', 'z']`"
        ]

    def test_unknown_vertices(self):
        triangle = Graph(["x", "y", "z"], TRIANGLE)
        problems = check(triangle, wrap(_partition(SUN, ("x", "y", "z"))))
        assert problems == ["partition: vertices `['a', 'b', 'c']` are not in the graph"]


class TestConvert:
    @pytest.mark.parametrize(
        ("kind", "to"),
        [
            ("bluered", "linear-leafroot"),
            ("linear-leafroot", "bluered"),
            ("star-nes", "nes-model"),
        ],
    )
    @pytest.mark.parametrize("seed", range(5))
    def test_conversions(self, kind, to, seed):
        g, model = GENERATED[kind](seed, 12)
        converted = convert(wrap(model), to)
        assert converted.kind == to
        assert check(g, converted) == []

    def test_good_partition_needs_the_graph(self):
        gp = validate_good_partition(STAR1, X, _partition(STAR1, ()).blocks)
        with pytest.raises(CertificateError):
            convert(wrap(gp), "star-nes")
        star = convert(wrap(gp), "star-nes", STAR1)
        assert check(STAR1, star) == []
        assert check(STAR1, convert(star, "nes-model")) == []

    def test_unsupported(self):
        with pytest.raises(CertificateError) as e:
            convert(wrap(CHAIN), "nes-model")
        assert e.value.message == "cannot convert `bluered` into `nes-model`"

    def test_json_document_input(self):
        certificate = decode(json.loads(dumps(wrap(CHAIN))))
        assert convert(certificate, "linear-leafroot").kind == "linear-leafroot"
