#!/usr/bin/env python3
# Copyright 2024 The leafpowers Authors.
# See LICENSE file for licensing details.

"""Command line front end: recognition, verification, conversion, generation and export.

Exit codes are 0 when every instance is accepted, 1 when one is rejected, 2 on an input
error and 3 when an instance is beyond what the exhaustive search handles. With several
instances the largest code wins.
"""

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any, Callable, Optional

from jsonschema import ValidationError, validate
from leafpowers.graphs.v0.chordal import ChordlessCycle, recognize_chordal
from leafpowers.graphs.v0.core import (
    Graph,
    LeafPowerError,
    graph_from_json,
    graph_to_json,
    parse_edge_list,
)
from leafpowers.models.v0.linear import linear_leafroot_to_bluered
from leafpowers.models.v0.star import recognize_star, synthesize_star_model
from leafpowers.oracle.v0.bruteforce import (
    DEFAULT_LIMIT,
    OracleLimitError,
    bruteforce_linear_leafpower,
)
from leafpowers.oracle.v0.generators import (
    gen_bluered,
    gen_linear_root,
    gen_nes_model,
    gen_star_model,
)

from utils.certificates import KINDS, Certificate, check, convert, decode, dumps, encode, wrap
from utils.dot import to_dot

logger = logging.getLogger(__name__)

EXIT_ACCEPT = 0
EXIT_REJECT = 1
EXIT_INPUT = 2
EXIT_LIMIT = 3

SETTINGS_SCHEMA = {
    "$schema": "http://json-schema.org/draft-04/schema#",
    "type": "object",
    "properties": {
        "seed": {"type": "integer"},
        "size": {"type": "integer", "minimum": 0},
        "rays": {"type": "integer", "minimum": 1},
        "max_oracle_n": {"type": "integer", "minimum": 0, "maximum": 12},
        "jobs": {"type": "integer", "minimum": 1},
    },
}

GENERATORS: dict[str, Callable[..., tuple[Graph, Any]]] = {
    "bluered": lambda seed, size, rays: gen_bluered(seed, size),
    "linear-leafroot": lambda seed, size, rays: gen_linear_root(seed, size),
    "star-nes": lambda seed, size, rays: gen_star_model(seed, size, rays),
    "nes-model": lambda seed, size, rays: gen_nes_model(seed, size),
}

Outcome = tuple[int, dict[str, Any]]


def read_graph(path: str) -> Graph:
    """Read Graph JSON from `*.json` files and the edge-list format from anything else."""
    text = Path(path).read_text()
    if path.endswith(".json"):
        return graph_from_json(text)
    return parse_edge_list(text)


def read_certificate(path: str) -> Certificate:
    """Read a certificate file."""
    return decode(Path(path).read_text())


def _input_error(source: str, e: Exception) -> Outcome:
    reason = e.message if isinstance(e, LeafPowerError) else str(e)
    logger.error(f"`{source}`: {reason}")
    return EXIT_INPUT, {"graph": source, "accepted": False, "stage": "input", "reason": reason}


def _rejected_at_chordality(source: str, cycle: ChordlessCycle) -> Outcome:
    return EXIT_REJECT, {
        "graph": source,
        "accepted": False,
        "stage": "chordality",
        "reason": "graph is not chordal",
        "witness": list(cycle.cycle),
    }


def _recognize_star(source: str) -> Outcome:
    try:
        g = read_graph(source)
        report = recognize_star(g)
        if report.cycle is not None:
            return _rejected_at_chordality(source, report.cycle)
        if not report.accepted:
            return EXIT_REJECT, {
                "graph": source,
                "accepted": False,
                "stage": "good-partition",
                "reason": "no maximal clique yields a good partition",
                "attempts": [
                    {"clique": list(a.clique), "stage": a.stage, "witness": list(a.witness)}
                    for a in report.attempts
                ],
            }
        model = synthesize_star_model(g, report.partition)
        if problems := check(g, wrap(model)):
            raise LeafPowerError(f"synthesized model does not verify: {problems[0]}")
    except (LeafPowerError, OSError) as e:
        return _input_error(source, e)

    return EXIT_ACCEPT, {
        "graph": source,
        "accepted": True,
        "stage": "certified",
        "certificates": {"good-partition": encode(report.partition), "star-nes": encode(model)},
    }


def _linear_from_model(source: str, g: Graph, model_path: str) -> Outcome:
    given = read_certificate(model_path)
    if given.kind not in ("bluered", "linear-leafroot"):
        raise LeafPowerError(f"`{given.kind}` is not a linear leaf power certificate")
    if problems := check(g, given):
        return EXIT_REJECT, {
            "graph": source,
            "accepted": False,
            "stage": "model",
            "reason": "the given model does not represent the graph",
            "discrepancies": problems,
        }
    other = convert(given, "linear-leafroot" if given.kind == "bluered" else "bluered")
    if problems := check(g, other):
        raise LeafPowerError(f"converted model does not verify: {problems[0]}")
    return EXIT_ACCEPT, {
        "graph": source,
        "accepted": True,
        "stage": "certified",
        "certificates": {given.kind: encode(given.model), other.kind: encode(other.model)},
    }


def _recognize_linear(source: str, max_oracle_n: int, model_path: Optional[str]) -> Outcome:
    try:
        g = read_graph(source)
        if isinstance(chordal := recognize_chordal(g), ChordlessCycle):
            return _rejected_at_chordality(source, chordal)
        if model_path is not None:
            return _linear_from_model(source, g, model_path)
        root = bruteforce_linear_leafpower(g, limit=max_oracle_n)
    except OracleLimitError as e:
        logger.error(f"`{source}`: {e.message}; pass a certificate with --model")
        return EXIT_LIMIT, {
            "graph": source,
            "accepted": False,
            "stage": "limit",
            "reason": f"model required: {e.message}",
        }
    except (LeafPowerError, OSError) as e:
        return _input_error(source, e)

    if root is None:
        return EXIT_REJECT, {
            "graph": source,
            "accepted": False,
            "stage": "oracle",
            "reason": "no caterpillar leaf root exists",
        }
    bluered = linear_leafroot_to_bluered(g, root)
    return EXIT_ACCEPT, {
        "graph": source,
        "accepted": True,
        "stage": "certified",
        "certificates": {"linear-leafroot": encode(root), "bluered": encode(bluered)},
    }


def _run_batch(work: Callable[[str], Outcome], sources: list[str], jobs: int) -> list[Outcome]:
    if jobs == 1 or len(sources) == 1:
        return [work(source) for source in sources]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(work, sources))


def _write(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _report(outcomes: list[Outcome], args: argparse.Namespace) -> int:
    for code, doc in outcomes:
        if args.output is not None and doc["accepted"]:
            folder = Path(args.output)
            folder.mkdir(parents=True, exist_ok=True)
            for kind, payload in doc["certificates"].items():
                target = folder / f"{Path(doc['graph']).stem}.{kind}.json"
                target.write_text(json.dumps(payload, indent=2) + "\n")
        if args.json:
            print(json.dumps(doc))
        elif doc["accepted"]:
            print(f"{doc['graph']}: accepted")
        else:
            print(f"{doc['graph']}: rejected at {doc['stage']}: {doc['reason']}")
    return max(code for code, _ in outcomes)


def cmd_recognize_star(args: argparse.Namespace) -> int:
    """Decide star NeS models for every graph file."""
    return _report(_run_batch(_recognize_star, args.graphs, args.jobs), args)


def cmd_recognize_linear(args: argparse.Namespace) -> int:
    """Decide linear leaf powers exactly, or check a given model on larger graphs."""
    if args.model is not None and len(args.graphs) > 1:
        logger.error("--model applies to a single graph")
        return EXIT_INPUT
    work = partial(_recognize_linear, max_oracle_n=args.max_oracle_n, model_path=args.model)
    return _report(_run_batch(work, args.graphs, args.jobs), args)


def cmd_verify(args: argparse.Namespace) -> int:
    """Verify a certificate against a graph."""
    g, certificate = read_graph(args.graph), read_certificate(args.certificate)
    problems = check(g, certificate)
    if args.json:
        print(
            json.dumps(
                {
                    "graph": args.graph,
                    "kind": certificate.kind,
                    "accepted": not problems,
                    "discrepancies": problems,
                }
            )
        )
    else:
        print("\n".join(problems) if problems else "ok")
    return EXIT_REJECT if problems else EXIT_ACCEPT


def cmd_convert(args: argparse.Namespace) -> int:
    """Convert a certificate into another kind."""
    certificate = read_certificate(args.certificate)
    g = read_graph(args.graph) if args.graph is not None else None
    _write(dumps(convert(certificate, args.to, g)), args.output)
    return EXIT_ACCEPT


def cmd_gen(args: argparse.Namespace) -> int:
    """Generate a random graph together with a model that represents it."""
    g, model = GENERATORS[args.kind](args.seed, args.size, args.rays)
    if args.output is None:
        print(json.dumps({"graph": graph_to_json(g), "certificate": encode(model)}))
        return EXIT_ACCEPT
    folder = Path(args.output)
    folder.mkdir(parents=True, exist_ok=True)
    stem = f"{args.kind}-{args.seed}-{args.size}"
    (folder / f"{stem}.graph.json").write_text(json.dumps(graph_to_json(g)) + "\n")
    (folder / f"{stem}.json").write_text(dumps(wrap(model)))
    logger.info(f"cmd_gen: wrote `{stem}` into `{folder}`")
    return EXIT_ACCEPT


def cmd_export_dot(args: argparse.Namespace) -> int:
    """Write a certificate as a DOT graph."""
    certificate = read_certificate(args.certificate)
    g = read_graph(args.graph) if args.graph is not None else None
    _write(to_dot(certificate, g), args.output)
    return EXIT_ACCEPT


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(prog="leafpowers", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="print machine-readable results")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    commands = parser.add_subparsers(dest="command", required=True)

    star = commands.add_parser("recognize-star", help="decide star NeS models")
    star.add_argument("graphs", nargs="+", help="graph files")
    star.add_argument("--jobs", type=int, default=1, help="worker processes")
    star.add_argument("--output", help="directory receiving the certificates")
    star.set_defaults(handler=cmd_recognize_star)

    linear = commands.add_parser("recognize-linear", help="decide linear leaf powers")
    linear.add_argument("graphs", nargs="+", help="graph files")
    linear.add_argument("--max-oracle-n", type=int, default=DEFAULT_LIMIT)
    linear.add_argument("--model", help="bluered or linear-leafroot certificate to check")
    linear.add_argument("--jobs", type=int, default=1, help="worker processes")
    linear.add_argument("--output", help="directory receiving the certificates")
    linear.set_defaults(handler=cmd_recognize_linear)

    verify = commands.add_parser("verify", help="verify a certificate against a graph")
    verify.add_argument("graph")
    verify.add_argument("certificate")
    verify.set_defaults(handler=cmd_verify)

    conv = commands.add_parser("convert", help="convert a certificate into another kind")
    conv.add_argument("certificate")
    conv.add_argument("--to", required=True, choices=KINDS)
    conv.add_argument("--graph", help="graph file, needed for good partitions")
    conv.add_argument("--output", help="output file, standard output by default")
    conv.set_defaults(handler=cmd_convert)

    gen = commands.add_parser(
        "gen", help="generate a graph with a certificate (the only seeded command)"
    )
    gen.add_argument("kind", choices=sorted(GENERATORS))
    gen.add_argument(
        "--seed", type=int, default=0, help="random seed; equal seeds give equal output"
    )
    gen.add_argument("--size", type=int, default=10)
    gen.add_argument("--rays", type=int, default=3)
    gen.add_argument("--output", help="directory receiving the graph and certificate")
    gen.set_defaults(handler=cmd_gen)

    dot = commands.add_parser("export-dot", help="write a certificate as DOT")
    dot.add_argument("certificate")
    dot.add_argument("--graph", help="graph file drawn over a good partition")
    dot.add_argument("--output", help="output file, standard output by default")
    dot.set_defaults(handler=cmd_export_dot)
    return parser


def settings(args: argparse.Namespace) -> dict[str, Any]:
    """Numeric options given to the command, validated against `SETTINGS_SCHEMA`.

    Raises:
        ValidationError: if an option is out of range.
    """
    chosen = {
        key: value
        for key in SETTINGS_SCHEMA["properties"]
        if (value := getattr(args, key, None)) is not None
    }
    validate(chosen, SETTINGS_SCHEMA)
    return chosen


def main(argv: Optional[list[str]] = None) -> int:
    """Run the command line and return its exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        settings(args)
    except ValidationError as e:
        option = e.path[0] if e.path else "?"
        logger.error(f"Invalid configuration for option `{option}`. Reason: {e.message}")
        return EXIT_INPUT

    try:
        return args.handler(args)
    except OracleLimitError as e:
        logger.error(e.message)
        return EXIT_LIMIT
    except (LeafPowerError, OSError) as e:
        logger.error(e.message if isinstance(e, LeafPowerError) else str(e))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
