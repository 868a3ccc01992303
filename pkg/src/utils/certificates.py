# Copyright 2024 The leafpowers Authors.
# See LICENSE file for licensing details.

"""Certificate files: every model the libraries produce, as one tagged JSON document.

Rationals are written as `[num, den]` with `den > 0`. Vertex sets are written sorted so that
the same model always serializes to the same bytes.
"""

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from jsonschema import ValidationError, validate
from leafpowers.graphs.v0.core import Graph, LeafPowerError, ParseError, Partition
from leafpowers.models.v0.linear import (
    BlueRedModel,
    LinearLeafRoot,
    ModelError,
    RatInterval,
    bluered_graph,
    bluered_to_linear_leafroot,
    linear_leafroot_to_bluered,
    linear_root_graph,
    normalize_bluered,
    verify_bluered_model,
    verify_linear_leafroot,
)
from leafpowers.models.v0.nes import Ball, EmbeddedTree, NesModel, nes_graph, verify_nes_model
from leafpowers.models.v0.star import (
    BlockPlacement,
    GoodPartition,
    StarNesModel,
    is_removable,
    star_graph,
    star_to_nes,
    synthesize_star_model,
    validate_good_partition,
    verify_star_model,
)

_logger = logging.getLogger(__name__)

Model = BlueRedModel | LinearLeafRoot | StarNesModel | NesModel | GoodPartition

KINDS = ("bluered", "linear-leafroot", "star-nes", "nes-model", "good-partition")

CONVERSIONS = {
    ("bluered", "linear-leafroot"),
    ("linear-leafroot", "bluered"),
    ("good-partition", "star-nes"),
    ("star-nes", "nes-model"),
}

_RATIONAL = {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}
_NAMES = {"type": "array", "items": {"type": "string"}}


def _document(kind: str, properties: dict) -> dict:
    return {
        "$schema": "http://json-schema.org/draft-04/schema#",
        "type": "object",
        "required": ["kind", *properties],
        "properties": {"kind": {"enum": [kind]}, **properties},
    }


CERTIFICATE_SCHEMAS = {
    "bluered": _document(
        "bluered",
        {
            "blue": _NAMES,
            "red": _NAMES,
            "intervals": {
                "type": "object",
                "additionalProperties": {
                    "type": "array",
                    "items": {"type": "integer"},
                    "minItems": 4,
                    "maxItems": 4,
                },
            },
        },
    ),
    "linear-leafroot": _document(
        "linear-leafroot",
        {
            "spine": {"type": "array", "items": {"type": ["string", "null"]}},
            "e": {"type": "array", "items": _RATIONAL},
            "f": {"type": "array", "items": {"oneOf": [_RATIONAL, {"type": "null"}]}},
        },
    ),
    "star-nes": _document(
        "star-nes",
        {
            "rays": {"type": "array", "items": _RATIONAL, "minItems": 1},
            "central": {
                "type": "object",
                "additionalProperties": {"type": "array", "items": _RATIONAL},
            },
            "blocks": {
                "type": "object",
                "additionalProperties": {
                    "type": "object",
                    "required": ["ray", "s", "t"],
                    "properties": {
                        "ray": {"type": "integer", "minimum": 0},
                        "s": _RATIONAL,
                        "t": _RATIONAL,
                    },
                },
            },
        },
    ),
    "nes-model": _document(
        "nes-model",
        {
            "nodes": {**_NAMES, "minItems": 1},
            "edges": {
                "type": "array",
                "items": {
                    "type": "array",
                    "items": [{"type": "string"}, {"type": "string"}, _RATIONAL],
                    "minItems": 3,
                    "maxItems": 3,
                },
            },
            "balls": {
                "type": "object",
                "additionalProperties": {
                    "oneOf": [
                        {
                            "type": "object",
                            "required": ["node", "radius"],
                            "properties": {"node": {"type": "string"}, "radius": _RATIONAL},
                            "additionalProperties": False,
                        },
                        {
                            "type": "object",
                            "required": ["edge", "offset", "radius"],
                            "properties": {
                                "edge": {**_NAMES, "minItems": 2, "maxItems": 2},
                                "offset": _RATIONAL,
                                "radius": _RATIONAL,
                            },
                            "additionalProperties": False,
                        },
                    ]
                },
            },
        },
    ),
    "good-partition": _document(
        "good-partition",
        {
            "X": _NAMES,
            "blocks": {"type": "array", "items": _NAMES},
            "permutation": _NAMES,
        },
    ),
}


class CertificateError(ParseError):
    """Exception raised when a certificate is malformed or used with the wrong kind."""


@dataclass(frozen=True)
class Certificate:
    """A model tagged with its certificate kind."""

    kind: str
    model: Model


def _rational(pair: list[int]) -> Fraction:
    num, den = pair
    if den <= 0:
        raise CertificateError(f"rational `{pair}` needs a positive denominator")
    return Fraction(num, den)


def _pair(value: Fraction) -> list[int]:
    return [value.numerator, value.denominator]


def encode(model: Model) -> dict:
    """Serialize a model into its certificate document."""
    match model:
        case BlueRedModel():
            return {
                "kind": "bluered",
                "blue": sorted(model.blue),
                "red": sorted(model.red),
                "intervals": {
                    v: _pair(i.lo) + _pair(i.hi) for v, i in sorted(model.intervals.items())
                },
            }
        case LinearLeafRoot():
            return {
                "kind": "linear-leafroot",
                "spine": list(model.spine_order),
                "e": [_pair(w) for w in model.spine_weights],
                "f": [None if w is None else _pair(w) for w in model.leg_weights],
            }
        case StarNesModel():
            return {
                "kind": "star-nes",
                "rays": [_pair(r) for r in model.ray_lengths],
                "central": {x: [_pair(v) for v in reach] for x, reach in model.central.items()},
                "blocks": {
                    b: {"ray": spot.ray, "s": _pair(spot.s), "t": _pair(spot.t)}
                    for b, spot in model.blocks.items()
                },
            }
        case NesModel():
            balls = {}
            for v, ball in model.subtrees.items():
                if ball.center.node is not None:
                    balls[v] = {"node": ball.center.node, "radius": _pair(ball.radius)}
                else:
                    balls[v] = {
                        "edge": list(ball.center.edge),
                        "offset": _pair(ball.center.offset),
                        "radius": _pair(ball.radius),
                    }
            return {
                "kind": "nes-model",
                "nodes": list(model.tree.nodes),
                "edges": [[a, b, _pair(length)] for a, b, length in model.tree.edges],
                "balls": balls,
            }
        case GoodPartition():
            return {
                "kind": "good-partition",
                "X": sorted(model.central_clique),
                "blocks": [sorted(block) for block in model.blocks],
                "permutation": list(model.permutation),
            }
    raise CertificateError(f"no certificate kind for `{type(model).__name__}`")


def _decode_model(kind: str, obj: dict) -> Model:
    match kind:
        case "bluered":
            return BlueRedModel(
                obj["blue"],
                obj["red"],
                {
                    v: RatInterval(_rational(i[:2]), _rational(i[2:]))
                    for v, i in obj["intervals"].items()
                },
            )
        case "linear-leafroot":
            return LinearLeafRoot(
                obj["spine"],
                [_rational(w) for w in obj["e"]],
                [None if w is None else _rational(w) for w in obj["f"]],
            )
        case "star-nes":
            return StarNesModel(
                [_rational(r) for r in obj["rays"]],
                {x: [_rational(v) for v in reach] for x, reach in obj["central"].items()},
                {
                    b: BlockPlacement(spot["ray"], _rational(spot["s"]), _rational(spot["t"]))
                    for b, spot in obj["blocks"].items()
                },
            )
        case "nes-model":
            tree = EmbeddedTree(obj["nodes"], [(a, b, _rational(w)) for a, b, w in obj["edges"]])
            balls = {}
            for v, ball in obj["balls"].items():
                if "node" in ball:
                    center = tree.point(node=ball["node"])
                else:
                    center = tree.point(edge=tuple(ball["edge"]), offset=_rational(ball["offset"]))
                balls[v] = Ball(center, _rational(ball["radius"]))
            return NesModel(tree, balls)
        case "good-partition":
            return GoodPartition(
                frozenset(obj["X"]), Partition(obj["blocks"]), tuple(obj["permutation"])
            )
    raise CertificateError(f"unknown certificate kind `{kind}`")


def decode(data: str | dict) -> Certificate:
    """Build a certificate from its JSON document (a string or an already decoded object).

    Raises:
        CertificateError: if the document is not valid JSON, fails the schema of its kind or
            describes an inconsistent model.
    """
    try:
        obj = json.loads(data) if isinstance(data, str) else data
    except json.JSONDecodeError as e:
        raise CertificateError(f"invalid certificate JSON. Reason: {e}")
    if not isinstance(obj, dict) or (kind := obj.get("kind")) not in KINDS:
        raise CertificateError(f"certificate kind must be one of `{', '.join(KINDS)}`")
    try:
        validate(obj, CERTIFICATE_SCHEMAS[kind])
    except ValidationError as e:
        raise CertificateError(f"invalid `{kind}` certificate. Reason: {e.message}")

    try:
        model = _decode_model(kind, obj)
    except CertificateError:
        raise
    except (LeafPowerError, KeyError) as e:
        raise CertificateError(f"inconsistent `{kind}` certificate. Reason: {e}")
    _logger.debug(f"decode: read `{kind}` certificate")
    return Certificate(kind, model)


def dumps(certificate: Certificate) -> str:
    """Serialize a certificate into a JSON string with a trailing newline."""
    return json.dumps(encode(certificate.model), indent=2) + "\n"


def wrap(model: Model) -> Certificate:
    """Tag a model with its certificate kind."""
    return Certificate(encode(model)["kind"], model)


def represented_graph(certificate: Certificate) -> Optional[Graph]:
    """Graph a model represents, or None for good partitions, which need their graph."""
    match certificate.model:
        case BlueRedModel():
            return bluered_graph(certificate.model)
        case LinearLeafRoot():
            return linear_root_graph(certificate.model)
        case StarNesModel():
            return star_graph(certificate.model)
        case NesModel():
            return nes_graph(certificate.model)
    return None


def _describe(discrepancies) -> list[str]:
    return [
        f"`{d.u}` `{d.v}`: graph has {'an edge' if d.expected else 'no edge'}, model {d.reason}"
        for d in discrepancies
    ]


def check(g: Graph, certificate: Certificate) -> list[str]:
    """Verify a certificate against `g` and list every problem found.

    An empty list means the certificate is valid for `g`.
    """
    model = certificate.model
    try:
        match model:
            case BlueRedModel():
                return _describe(verify_bluered_model(g, model).discrepancies)
            case LinearLeafRoot():
                return _describe(verify_linear_leafroot(g, model).discrepancies)
            case StarNesModel():
                return _describe(verify_star_model(g, model).discrepancies)
            case NesModel():
                return _describe(verify_nes_model(g, model).discrepancies)
    except ModelError as e:
        return [e.message]

    if unknown := (model.central_clique | model.blocks.ground) - set(g.vertices):
        return [f"partition: vertices `{sorted(unknown)}` are not in the graph"]
    if not (checked := validate_good_partition(g, model.central_clique, model.blocks)):
        witness = f" `{list(checked.witness)}`" if checked.witness else ""
        return [f"{checked.stage}: {checked.reason}{witness}"]
    perm = list(model.permutation)
    if sorted(perm) != sorted(model.central_clique):
        return ["permutation: does not list the central clique exactly once"]
    return [
        f"permutation: `{x}` is not removable at position {i + 1}"
        for i, x in enumerate(perm)
        if not is_removable(g, x, perm[i:], model.blocks)
    ]


def convert(certificate: Certificate, to: str, g: Optional[Graph] = None) -> Certificate:
    """Turn a certificate into an equivalent certificate of another kind.

    Args:
        certificate: the certificate to convert.
        to: the target kind.
        g: the graph; required only to turn a good partition into a star NeS model.

    Raises:
        CertificateError: if the conversion is not supported or the graph is missing.
    """
    if (certificate.kind, to) not in CONVERSIONS:
        raise CertificateError(f"cannot convert `{certificate.kind}` into `{to}`")
    model = certificate.model
    _logger.info(f"convert: `{certificate.kind}` into `{to}`")
    match to:
        case "linear-leafroot":
            normalized = normalize_bluered(model)
            return Certificate(to, bluered_to_linear_leafroot(bluered_graph(model), normalized))
        case "bluered":
            return Certificate(to, linear_leafroot_to_bluered(linear_root_graph(model), model))
        case "star-nes":
            if g is None:
                raise CertificateError("converting a good partition needs its graph")
            return Certificate(to, synthesize_star_model(g, model))
        case _:
            return Certificate(to, star_to_nes(model))
