#!/usr/bin/env python3
"""
Tests for the Milnor basis and the subalgebras A(n).
"""

import os
import sys

import pytest

# Add the parent directory to the path
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(parent_dir)

from app.services import steenrod
from app.services.errors import WindowError
from app.services.steenrod import MilnorElement


def test_milnor_products():
    sq = MilnorElement.sq
    assert sq(2) * sq(1) == MilnorElement(frozenset({(3,), (0, 1)}))
    assert sq(1) * sq(2) == sq(3)
    assert sq(2) * sq(2) == sq(1, 1)
    assert not (sq(1) * sq(1))
    assert MilnorElement.unit() * sq(0, 1) == sq(0, 1)


def test_milnor_basis_order():
    assert steenrod.milnor_basis(0) == [()]
    assert steenrod.milnor_basis(3) == [(3,), (0, 1)]
    assert len(steenrod.milnor_basis(7)) == 4


def test_subalgebra_dimensions():
    assert steenrod.build_A_n(0).total_dim() == 2
    a1 = steenrod.build_A_n(1)
    assert a1.total_dim() == 8
    assert a1.top == 6
    a2 = steenrod.build_A_n(2)
    assert a2.total_dim() == 64
    assert a2.top == 23


def test_a1_is_associative():
    a1 = steenrod.build_A_n(1)
    assert a1.check_associativity() == []
    assert a1.check_unit()


def test_unsupported_subalgebra():
    with pytest.raises(WindowError):
        steenrod.build_A_n(3)


def test_orientation_class():
    w = steenrod.omega(1)
    assert w.degree == -6
    assert w.label == "xi1^3xi2"


def test_basis_table_pairs_dual_labels():
    df = steenrod.basis_table(steenrod.build_A_n(1))
    assert list(df.columns) == ["degree", "index", "label", "dual_degree", "dual_label"]
    assert len(df) == 8
    row = df[df["label"] == "Sq(1)"].iloc[0]
    assert row["dual_label"] == "xi1"
    assert row["dual_degree"] == -1


def test_dual_labels():
    assert steenrod.dual_monomial_label((3, 1)) == "xi1^3xi2"
    assert steenrod.dual_monomial_label((0, 2)) == "xi2^2"
    assert steenrod.dual_monomial_label(()) == "1"


def test_dual_of_a1():
    gamma = steenrod.build_dual_A_n(1)
    assert gamma.labels[-1] == ["xi1"]
    assert gamma.labels[-3] == ["xi1^3", "xi2"]
    assert gamma.check_coassociativity() == []


def test_truncated_steenrod_algebra():
    algebra = steenrod.build_truncated_A(7)
    assert algebra.dim(7) == 4
    assert not algebra.finite
    with pytest.raises(WindowError):
        steenrod.build_truncated_A(0)


def test_annihilator_of_omega0_misses_sq1():
    ideal = steenrod.mitchell_ideal(0, 8)
    assert ideal.is_proper()
    assert ideal.dims()[1] == 0
    with pytest.raises(WindowError):
        steenrod.mitchell_ideal(1, 4)
