#!/usr/bin/env python3
"""
Tests for the HTTP routes.
"""

import os
import sys

import pytest
from fastapi.testclient import TestClient

# Add the parent directory to the path
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(parent_dir)

from app.main import app
from app.models.schemas import SessionConfig
from app.services import commands


@pytest.fixture
def client():
    return TestClient(app)


def test_root_lists_the_examples(client):
    response = client.get("/")
    assert response.status_code == 200
    assert "a1-cyclic" in response.json()["examples"]


def test_describe_builtin(client):
    response = client.post("/api/describe", json={"builtin": "a1-self"})
    assert response.status_code == 200
    assert response.json()["summary"]["total_dim"] == 8


def test_input_errors_are_422(client):
    assert client.post("/api/describe", json={"builtin": "no-such-thing"}).status_code == 422
    assert client.post("/api/describe", json={}).status_code == 422
    assert client.get("/api/steenrod/3").status_code == 422


def test_inline_description(client):
    description = {
        "kind": "module",
        "algebra": "a0",
        "window": {"lo": 0, "hi": 0},
        "basis": {"0": ["x"]},
        "bounded_below_at": 0,
        "bounded_above_at": 0,
    }
    response = client.post("/api/h0", json={"description": description, "ideal_set": "grad"})
    assert response.status_code == 200
    assert response.json()["summary"]["total_dim"] == 1


def test_ext_route(client):
    body = {"source": {"builtin": "k-a1"}, "target": {"builtin": "a1-self"}, "max_s": 1, "degrees": [5, 6]}
    response = client.post("/api/ext", json=body)
    assert response.status_code == 200
    assert response.json()["summary"]["nonzero_cells"] == [[0, 6, 1]]


def test_towers_are_not_modules(client):
    response = client.post("/api/localcoh", json={"builtin": "shift"})
    assert response.status_code == 422


def test_mismatch_is_409(client, monkeypatch):
    monkeypatch.setattr(commands, "load_expected", lambda path=None: {"a1-cyclic": {"module_dim": 5}})
    response = client.get("/api/examples/a1-cyclic")
    assert response.status_code == 409
    assert "module_dim" in response.json()["detail"]


def test_example_route(client):
    response = client.get("/api/examples/a1-annihilator")
    assert response.status_code == 200
    assert response.json()["summary"]["H0_contains_sq2sq1"] is True


def test_validation_errors_raised_inside_a_command_are_422(client, monkeypatch):
    monkeypatch.setattr(commands, "cmd_describe", lambda *args, **kwargs: SessionConfig(family_horizon=0))
    response = client.post("/api/describe", json={"builtin": "a1-self"})
    assert response.status_code == 422
    assert "family_horizon" in response.json()["detail"]


def test_example_route_accepts_alternative_names(client):
    response = client.get("/api/examples/a1-remark")
    assert response.status_code == 200
    assert response.json()["summary"]["h0_contains_sq2sq1"] is False
