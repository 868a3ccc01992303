#!/usr/bin/env python3
# Copyright 2024 The leafpowers Authors.
# See LICENSE file for licensing details.

"""Test the leafpowers command line end to end."""

import json
import logging
import os
import subprocess
import sys
from pathlib import Path

import pytest

import cli

logger = logging.getLogger(__name__)

ROOT = Path(__file__).parents[2]

GRAPHS = {
    "k3.txt": "a b\nb c\na c\n",
    "p4.txt": "a b\nb c\nc d\n",
    "c4.txt": "x y\ny z\nz w\nw x\n",
    "sun.txt": "x y\ny z\nx z\na x\na y\nb x\nb z\nc y\nc z\n",
    "broken.txt": "a b c\n",
}


@pytest.fixture(scope="module")
def corpus(tmp_path_factory) -> Path:
    folder = tmp_path_factory.mktemp("corpus")
    for name, text in GRAPHS.items():
        (folder / name).write_text(text)
    return folder


def _run(capsys, *argv: str) -> tuple[int, str]:
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def _json_lines(out: str) -> list[dict]:
    return [json.loads(line) for line in out.splitlines()]


@pytest.mark.order(1)
def test_gen(corpus, capsys):
    """Generate the instances the later tests recognize."""
    for kind in ("bluered", "linear-leafroot", "star-nes", "nes-model"):
        code, _ = _run(capsys, "gen", kind, "--seed", "3", "--size", "12", "--output", str(corpus))
        assert code == cli.EXIT_ACCEPT
        assert (corpus / f"{kind}-3-12.graph.json").exists()
        assert (corpus / f"{kind}-3-12.json").exists()

    code, out = _run(capsys, "gen", "star-nes", "--seed", "1", "--size", "6", "--rays", "2")
    assert code == cli.EXIT_ACCEPT
    doc = json.loads(out)
    assert len(doc["graph"]["vertices"]) == 6
    assert doc["certificate"]["kind"] == "star-nes"


@pytest.mark.order(2)
@pytest.mark.parametrize("kind", ["bluered", "linear-leafroot", "star-nes", "nes-model"])
def test_verify_generated(corpus, capsys, kind):
    graph = str(corpus / f"{kind}-3-12.graph.json")
    code, out = _run(capsys, "verify", graph, str(corpus / f"{kind}-3-12.json"))
    assert code == cli.EXIT_ACCEPT
    assert out == "ok\n"


@pytest.mark.order(2)
def test_verify_wrong_graph(corpus, capsys):
    code, out = _run(
        capsys, "--json", "verify", str(corpus / "k3.txt"), str(corpus / "bluered-3-12.json")
    )
    assert code == cli.EXIT_REJECT
    doc = json.loads(out)
    assert doc["kind"] == "bluered"
    assert doc["accepted"] is False
    assert doc["discrepancies"]


class TestRecognizeStar:
    def test_accepted(self, corpus, capsys):
        k3 = str(corpus / "k3.txt")
        code, out = _run(capsys, "recognize-star", k3)
        assert code == cli.EXIT_ACCEPT
        assert out == f"{k3}: accepted\n"

    def test_sun(self, corpus, capsys):
        code, out = _run(capsys, "--json", "recognize-star", str(corpus / "sun.txt"))
        assert code == cli.EXIT_REJECT
        (doc,) = _json_lines(out)
        assert doc["stage"] == "good-partition"
        assert len(doc["attempts"]) == 4
        assert {a["stage"] for a in doc["attempts"]} == {"component-check", "elimination"}

    def test_not_chordal(self, corpus, capsys):
        c4 = str(corpus / "c4.txt")
        code, out = _run(capsys, "recognize-star", c4)
        assert code == cli.EXIT_REJECT
        assert out == f"{c4}: rejected at chordality: graph is not chordal\n"

    def test_certificates_are_written(self, corpus, capsys, tmp_path):
        code, _ = _run(capsys, "recognize-star", str(corpus / "k3.txt"), "--output", str(tmp_path))
        assert code == cli.EXIT_ACCEPT
        assert sorted(p.name for p in tmp_path.iterdir()) == [
            "k3.good-partition.json",
            "k3.star-nes.json",
        ]
        certificate = str(tmp_path / "k3.star-nes.json")
        code, _ = _run(capsys, "verify", str(corpus / "k3.txt"), certificate)
        assert code == cli.EXIT_ACCEPT

    @pytest.mark.order(3)
    def test_generated(self, corpus, capsys):
        code, out = _run(
            capsys, "--json", "recognize-star", str(corpus / "star-nes-3-12.graph.json")
        )
        assert code == cli.EXIT_ACCEPT
        (doc,) = _json_lines(out)
        assert set(doc["certificates"]) == {"good-partition", "star-nes"}

    def test_batch_exit_code(self, corpus, capsys):
        graphs = [str(corpus / name) for name in ("k3.txt", "c4.txt", "broken.txt")]
        code, out = _run(capsys, "--json", "recognize-star", *graphs, "--jobs", "2")
        assert code == cli.EXIT_INPUT
        assert [doc["stage"] for doc in _json_lines(out)] == ["certified", "chordality", "input"]


class TestRecognizeLinear:
    def test_path(self, corpus, capsys):
        code, out = _run(capsys, "--json", "recognize-linear", str(corpus / "p4.txt"))
        assert code == cli.EXIT_ACCEPT
        (doc,) = _json_lines(out)
        assert set(doc["certificates"]) == {"linear-leafroot", "bluered"}

    @pytest.mark.parametrize(("name", "stage"), [("c4.txt", "chordality"), ("sun.txt", "oracle")])
    def test_rejected(self, corpus, capsys, name, stage):
        code, out = _run(capsys, "--json", "recognize-linear", str(corpus / name))
        assert code == cli.EXIT_REJECT
        (doc,) = _json_lines(out)
        assert doc["stage"] == stage

    @pytest.mark.order(3)
    def test_limit(self, corpus, capsys):
        graph = str(corpus / "linear-leafroot-3-12.graph.json")
        code, out = _run(capsys, "--json", "recognize-linear", graph)
        assert code == cli.EXIT_LIMIT
        (doc,) = _json_lines(out)
        assert doc["stage"] == "limit"
        assert doc["reason"].startswith("model required: ")

    @pytest.mark.order(3)
    @pytest.mark.parametrize("kind", ["bluered", "linear-leafroot"])
    def test_given_model(self, corpus, capsys, kind):
        graph = str(corpus / f"{kind}-3-12.graph.json")
        model = str(corpus / f"{kind}-3-12.json")
        code, out = _run(capsys, "--json", "recognize-linear", graph, "--model", model)
        assert code == cli.EXIT_ACCEPT
        (doc,) = _json_lines(out)
        assert set(doc["certificates"]) == {"linear-leafroot", "bluered"}

    @pytest.mark.order(3)
    def test_given_model_mismatch(self, corpus, capsys, tmp_path):
        doc = json.loads((corpus / "bluered-3-12.graph.json").read_text())
        doc["vertices"].append("extra")
        graph = tmp_path / "extra.json"
        graph.write_text(json.dumps(doc))
        model = str(corpus / "bluered-3-12.json")
        code, out = _run(capsys, "--json", "recognize-linear", str(graph), "--model", model)
        assert code == cli.EXIT_REJECT
        (doc,) = _json_lines(out)
        assert doc["stage"] == "model"
        assert doc["discrepancies"]

    @pytest.mark.order(3)
    def test_model_with_several_graphs(self, corpus, capsys):
        model = str(corpus / "bluered-3-12.json")
        graphs = [str(corpus / "k3.txt"), str(corpus / "p4.txt")]
        code, _ = _run(capsys, "recognize-linear", *graphs, "--model", model)
        assert code == cli.EXIT_INPUT


@pytest.mark.order(3)
class TestCertificateTools:
    def test_convert(self, corpus, capsys, tmp_path):
        target = tmp_path / "root.json"
        source = str(corpus / "bluered-3-12.json")
        argv = ["convert", source, "--to", "linear-leafroot", "--output", str(target)]
        code, _ = _run(capsys, *argv)
        assert code == cli.EXIT_ACCEPT
        assert json.loads(target.read_text())["kind"] == "linear-leafroot"
        code, _ = _run(capsys, "verify", str(corpus / "bluered-3-12.graph.json"), str(target))
        assert code == cli.EXIT_ACCEPT

    def test_convert_unsupported(self, corpus, capsys):
        code, _ = _run(capsys, "convert", str(corpus / "bluered-3-12.json"), "--to", "nes-model")
        assert code == cli.EXIT_INPUT

    def test_export_dot(self, corpus, capsys):
        code, out = _run(capsys, "export-dot", str(corpus / "star-nes-3-12.json"))
        assert code == cli.EXIT_ACCEPT
        assert out.startswith('graph "star-nes" {\n')
        assert out.endswith("}\n")


class TestInputErrors:
    @pytest.mark.parametrize(
        ("argv", "option"),
        [
            (["recognize-star", "--jobs", "0"], "jobs"),
            (["recognize-linear", "--max-oracle-n", "13"], "max_oracle_n"),
            (["gen", "bluered", "--size", "-1"], "size"),
            (["gen", "star-nes", "--rays", "0"], "rays"),
        ],
    )
    def test_settings(self, corpus, capsys, caplog, argv, option):
        graph = [str(corpus / "k3.txt")] if argv[0].startswith("recognize") else []
        code, _ = _run(capsys, *argv[:1], *graph, *argv[1:])
        assert code == cli.EXIT_INPUT
        assert f"Invalid configuration for option `{option}`" in caplog.text

    def test_missing_file(self, corpus, capsys):
        code, out = _run(capsys, "--json", "recognize-star", str(corpus / "missing.txt"))
        assert code == cli.EXIT_INPUT
        assert _json_lines(out)[0]["stage"] == "input"

    def test_malformed_certificate(self, corpus, capsys, tmp_path):
        certificate = tmp_path / "bad.json"
        certificate.write_text('{"kind": "tree"}')
        code, _ = _run(capsys, "verify", str(corpus / "k3.txt"), str(certificate))
        assert code == cli.EXIT_INPUT

    def test_seed_belongs_to_gen(self, corpus, capsys):
        with pytest.raises(SystemExit) as e:
            cli.main(["recognize-star", str(corpus / "k3.txt"), "--seed", "1"])
        assert e.value.code == 2
        capsys.readouterr()

        with pytest.raises(SystemExit):
            cli.main(["--help"])
        assert "the only seeded command" in " ".join(capsys.readouterr().out.split())

        runs = [_run(capsys, "gen", "nes-model", "--seed", "5", "--size", "7") for _ in range(2)]
        assert runs[0] == runs[1]
        assert runs[0][1] != _run(capsys, "gen", "nes-model", "--seed", "6", "--size", "7")[1]


def test_console_script(corpus):
    """Run the command line in a separate interpreter."""
    env = {**os.environ, "PYTHONPATH": os.pathsep.join([str(ROOT / "src"), str(ROOT / "lib")])}
    result = subprocess.run(
        [sys.executable, str(ROOT / "src" / "cli.py"), "recognize-star", str(corpus / "c4.txt")],
        capture_output=True,
        text=True,
        env=env,
    )
    logger.info(f"test_console_script: {result.stdout!r}")
    assert result.returncode == cli.EXIT_REJECT
    assert "rejected at chordality" in result.stdout
