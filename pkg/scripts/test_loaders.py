#!/usr/bin/env python3
"""
Tests for description files and builtin name resolution.
"""

import json
import os
import sys

import pytest

# Add the parent directory to the path
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(parent_dir)

from app.services.errors import DescriptionError, StructureError
from app.services.graded import GradedComodule, GradedModule
from app.services.loaders import as_module, load_description, load_file, resolve
from app.services.towers import ComoduleFamily, Tower


def a0_free_module():
    return {
        "kind": "module",
        "name": "A(0)",
        "algebra": "a0",
        "window": {"lo": 0, "hi": 1},
        "basis": {"0": ["x"], "1": ["y"]},
        "actions": [{"generator": "Sq(1)", "source": 0, "matrix": [[1]]}],
        "bounded_below_at": 0,
        "bounded_above_at": 1,
    }


def test_module_description():
    m = load_description(a0_free_module())
    assert isinstance(m, GradedModule)
    assert m.total_dim() == 2
    assert m.check_axioms() == []


def test_missing_field_names_its_path():
    data = a0_free_module()
    del data["algebra"]
    with pytest.raises(DescriptionError) as e:
        load_description(data)
    assert e.value.field == "algebra"


def test_inverted_window_is_a_description_error():
    data = a0_free_module()
    data["window"] = {"lo": 3, "hi": 1}
    with pytest.raises(DescriptionError) as e:
        load_description(data)
    assert e.value.field == "window"


def test_unknown_generator_and_bad_matrix():
    data = a0_free_module()
    data["actions"][0]["generator"] = "Sq(2)"
    with pytest.raises(DescriptionError) as e:
        load_description(data)
    assert e.value.field == "actions.0.generator"

    data = a0_free_module()
    data["actions"][0]["matrix"] = [[1, 0]]
    with pytest.raises(DescriptionError) as e:
        load_description(data)
    assert e.value.field == "actions.0.matrix"


def test_non_associative_action_is_rejected():
    data = a0_free_module()
    data["window"] = {"lo": 0, "hi": 2}
    data["basis"] = {"0": ["a"], "1": ["b"], "2": ["c"]}
    data["bounded_above_at"] = 2
    data["actions"] = [
        {"generator": "Sq(1)", "source": 0, "matrix": [[1]]},
        {"generator": "Sq(1)", "source": 1, "matrix": [[1]]},
    ]
    with pytest.raises(StructureError):
        load_description(data)


def test_unknown_kind():
    with pytest.raises(DescriptionError) as e:
        load_description({"kind": "sheaf"})
    assert e.value.field == "kind"


def test_files(tmp_path):
    good = tmp_path / "module.json"
    good.write_text(json.dumps(a0_free_module()))
    assert load_file(str(good)).total_dim() == 2

    broken = tmp_path / "broken.json"
    broken.write_text("{\"kind\": ")
    with pytest.raises(DescriptionError):
        load_file(str(broken))

    with pytest.raises(FileNotFoundError):
        load_file(str(tmp_path / "missing.json"))


def test_builtin_resolution():
    assert isinstance(resolve(builtin="kx-family"), ComoduleFamily)
    assert isinstance(resolve(builtin="constant-k"), Tower)
    assert isinstance(resolve(builtin="a1-self"), GradedModule)
    with pytest.raises(DescriptionError):
        resolve(builtin="no-such-thing")
    with pytest.raises(DescriptionError):
        resolve()


def test_builtin_alternative_names():
    assert resolve(builtin="a1-section3-example").total_dim() == resolve(builtin="a1-sq1").total_dim()
    assert isinstance(resolve(builtin="ex2-family"), ComoduleFamily)
    assert resolve(builtin="ex1-family").name == resolve(builtin="kx-family").name


def test_family_and_tower_descriptions():
    family = load_description({"kind": "family", "builtin": "kx-family", "horizon": 3})
    assert family.indices() == [0, 1, 2, 3]
    tower = load_description({"kind": "tower", "builtin": "zero-maps", "horizon": 4})
    assert tower.horizon == 4
    with pytest.raises(DescriptionError):
        load_description({"kind": "tower", "members": [], "builtin": "shift"})


def test_comodules_are_viewed_as_modules():
    gamma = resolve(builtin="a1-truncation").comodules[-1]
    assert isinstance(gamma, GradedComodule)
    assert as_module(gamma).total_dim() == gamma.total_dim()
