#!/usr/bin/env python3
"""
Tests for minimal resolutions, Ext and local cohomology towers.
"""

import os
import sys

import numpy as np
import pytest

# Add the parent directory to the path
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(parent_dir)

from app.services import builtins
from app.services.errors import StructureError
from app.services.graded import algebra_as_module, conn
from app.services.homalg import (
    LocalCohomologyTower,
    connecting_class,
    dimension_shift,
    ext,
    hom_direct,
    local_cohomology,
    local_cohomology_general,
    minimal_resolution,
)
from app.services.idealsets import IdealSet


def test_resolution_of_k_over_a0():
    res = minimal_resolution(builtins.module("k-a0"), 3, 4)
    assert res.is_exact()
    assert res.is_minimal()
    for s in range(4):
        assert res.generator_degrees(s) == [s]


def test_ext_of_k_over_a0_is_polynomial():
    k = builtins.module("k-a0")
    degrees = list(range(-4, 1))
    table = ext(k, k, 3, degrees)
    for (s, t), d in table.dims(3, degrees).items():
        assert d == (1 if t == -s else 0)


def test_a1_is_self_injective():
    k, a1 = builtins.module("k-a1"), builtins.module("a1-self")
    degrees = list(range(-6, 7))
    rows = ext(k, a1, 4, degrees).rows(4, degrees)
    assert {t: d for s, t, d, _ in rows if s == 0 and d} == {6: 1}
    assert sum(d for s, _, d, _ in rows if s > 0) == 0


def test_hom_direct_matches_the_algebra():
    a1 = builtins.module("a1-self")
    assert hom_direct(a1, a1, 0) == 1
    assert hom_direct(a1, a1, 3) == 2
    assert hom_direct(builtins.module("k-a1"), a1, 6) == 1


def test_local_cohomology_of_finite_modules():
    k = builtins.module("k-a1")
    h_zero = local_cohomology(k, 0, degrees=[0])
    assert h_zero.value[0] == 1
    assert h_zero.stable_from[0] is not None

    h_one = local_cohomology(builtins.module("a1-self"), 1, degrees=[-2, 0, 3])
    for t in (-2, 0, 3):
        assert h_one.value[t] == 0


def test_dimension_shift_on_a_finite_module():
    report = dimension_shift(builtins.module("k-a1"), 1, degrees=[-1, 0, 1])
    assert report.holds


def test_connecting_class_of_the_unit():
    # 0 -> Sigma k -> A(0) -> k -> 0 does not split
    ambient = algebra_as_module(builtins.algebra("a0"), name="A(0)")
    top = conn(ambient, 1)
    table = ext(builtins.module("k-a0"), top, 1, [0])
    assert table.cell(1, 0).dim == 1
    cls = connecting_class(table, ambient, top, [np.array([1])], 0)
    assert cls.tolist() == [1]

    other = algebra_as_module(builtins.algebra("a0"), name="A(0)")
    with pytest.raises(StructureError):
        connecting_class(table, other, top, [np.array([1])], 0)


def test_general_ideal_set_agrees_with_grad():
    k = builtins.module("k-a1")
    general = local_cohomology_general(IdealSet.grad(k.algebra), k, 0, degrees=[0])
    assert general.value[0] == local_cohomology(k, 0, degrees=[0]).value[0] == 1


@pytest.mark.parametrize("i", [1, 2])
def test_dimension_shift_over_a0(i):
    # F = A(0) covers k with kernel Sigma k
    report = dimension_shift(builtins.module("k-a0"), i)
    certified = [r for r in report.rows if r.certified]
    assert certified
    assert report.holds
    assert all(r.syzygy == r.module == 0 for r in certified)


def test_dimension_shift_of_a_free_module():
    report = dimension_shift(builtins.module("a0-self"), 1)
    assert report.holds
    assert all(r.module == 0 for r in report.rows if r.certified)


def test_local_cohomology_tower_reduces_by_its_own_prime():
    tower = LocalCohomologyTower(0, [0], ["K_1", "K_2"], dims={0: [1, 1]},
                                 transitions={0: [np.array([[2]])]}, prime=3)
    assert tower.is_iso(0, 0)
    assert tower.composite(0, 0, 1).tolist() == [[2]]

    assert local_cohomology(builtins.module("k-a1"), 0, degrees=[0]).prime == 2
