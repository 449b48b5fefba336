#!/usr/bin/env python3
"""
Tests for the command layer, output rendering and the command-line exit codes.
"""

import json
import os
import sys

import pytest

# Add the parent directory to the path
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(parent_dir)

import config
from app.models.schemas import SessionConfig
from app.services import commands
from app.services.errors import DescriptionError, ExpectationMismatch
from app.services.loaders import resolve
from app.services.reporting import render
from scripts.derived_limits import main, parse_range


@pytest.fixture(autouse=True)
def log_to_tmp(tmp_path, monkeypatch):
    monkeypatch.setattr(config, "LOG_FILE", str(tmp_path / "derived_limits.log"))


@pytest.mark.parametrize("name", config.CANNED_EXAMPLES)
def test_canned_examples_match_their_stored_outcomes(name):
    report = commands.cmd_example(name)
    assert report.notes[-1] == "matches the stored outcome"


def test_example_mismatch_is_reported(tmp_path):
    expected = tmp_path / "expected.json"
    expected.write_text(json.dumps({"a1-cyclic": {"module_dim": 5}}))
    with pytest.raises(ExpectationMismatch) as e:
        commands.cmd_example("a1-cyclic", expected_path=str(expected))
    assert "module_dim" in e.value.differences[0]


def test_unknown_example():
    with pytest.raises(DescriptionError):
        commands.cmd_example("no-such-example")


def test_describe_module_and_tower():
    report = commands.cmd_describe(resolve(builtin="a1-self"))
    assert report.summary["total_dim"] == 8
    assert report.summary["associativity"] == "ok"

    report = commands.cmd_describe(resolve(builtin="constant-k"))
    assert report.summary["kind"] == "tower"
    assert report.summary["stable_degrees"] == [0]


def test_torsion_commands():
    report = commands.cmd_h0(resolve(builtin="a1-sq1"), "gen:Sq(1)")
    assert report.summary["total_dim"] == 3
    report = commands.cmd_H0(resolve(builtin="a1-sq1"), "gen:Sq(1)")
    assert report.summary["total_dim"] == 4


def test_rational_command():
    report = commands.cmd_rational(resolve(builtin="a1-self"), "dual-a1")
    assert report.summary["verdict"] == "true"
    assert report.status == "ok"


def test_tower_command_notes_a_missing_limit():
    report = commands.cmd_tower(resolve(builtin="zero-maps"))
    assert report.summary["mittag_leffler"] == "true"
    assert "limit_dims" not in report.summary
    assert report.notes


def test_render_formats():
    report = commands.cmd_steenrod_table(1, SessionConfig())
    data = json.loads(render(report, "json"))
    assert data["summary"]["total_dim"] == 8
    tsv = render(report, "tsv")
    assert tsv.startswith("# steenrod\tA(1)\tok")
    text = render(report, "text")
    assert "Sq(0,1)" in text
    with pytest.raises(ValueError):
        render(report, "xml")


def test_parse_range():
    assert parse_range("-2:1") == [-2, -1, 0, 1]
    assert parse_range("3,5") == [3, 5]


def test_exit_codes(capsys):
    assert main(["--format", "json", "steenrod", "1"]) == 0
    out = capsys.readouterr().out
    assert json.loads(out)["summary"]["top_degree"] == 6

    assert main(["example", "a1-annihilator"]) == 0
    assert main(["--prime", "3", "describe", "--builtin", "a1-self"]) == 2
    assert main(["describe", "--builtin", "no-such-thing"]) == 2
    assert main(["product", "--builtin", "constant-k"]) == 2
    assert main(["steenrod", "3"]) == 2
    assert main(["seqlim", "--builtin", "shift"]) == 1
    assert main(["tower", "--builtin", "shift"]) == 1


def test_examples_accept_alternative_names():
    report = commands.cmd_example("a1-section3")
    assert report.subject.startswith("a1-cyclic: ")
    assert report.notes[-1] == "matches the stored outcome"
    assert main(["example", "a1-remark"]) == 0
