#!/usr/bin/env python3
"""
Tests for graded algebras, modules and comodules.
"""

import os
import sys

import numpy as np
import pytest

# Add the parent directory to the path
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(parent_dir)

from app.services import builtins
from app.services.errors import NotRationalError, WindowError
from app.services.graded import (
    DegreeWindow,
    GradedVectorSpace,
    ModuleMap,
    coaction_from_action,
    coalgebra_as_comodule,
    cyclic_quotient,
    direct_sum,
    dualize_algebra,
    dualize_coalgebra,
    extended_comodule,
    iota,
    polynomial_algebra,
    suspension,
    truncation_sequence,
)


def test_a1_acting_on_itself():
    m = builtins.module("a1-self")
    assert m.total_dim() == 8
    assert m.nonzero_degrees() == list(range(7))
    assert m.check_axioms() == []
    assert m.algebra.check_associativity() == []
    assert m.algebra.check_unit()


def test_dual_a1_is_a_coalgebra():
    c = builtins.coalgebra("dual-a1")
    assert c.check_coassociativity() == []
    assert c.check_counit()
    assert sum(c.dim(d) for d in range(-6, 1)) == 8


def test_dualizing_twice_returns_the_structure_constants():
    a = polynomial_algebra(2, {"x": 2}, 8)
    back = dualize_coalgebra(dualize_algebra(a))
    assert back.labels == a.labels
    for key, t in a.mult.items():
        assert np.array_equal(back.mult[key], t)


def test_truncated_polynomial_algebra_is_finite():
    a = polynomial_algebra(2, {"x": 2}, 6, nilpotence={"x": 3})
    assert a.finite
    assert a.total_dim() == 3
    assert a.check_associativity() == []


def test_cyclic_submodule_degrees():
    m = builtins.module("a1-sq1")
    assert m.total_dim() == 4
    assert m.nonzero_degrees() == [1, 3, 4, 6]
    assert m.check_axioms() == []


def test_truncation_sequence_is_exact():
    m = builtins.module("a1-self")
    for n in (1, 3, 5):
        assert truncation_sequence(m, n).is_exact()


def test_coalgebra_comodule_becomes_a_module():
    gamma = coalgebra_as_comodule(builtins.coalgebra("dual-a1"))
    assert gamma.check_axioms() == []
    m = iota(gamma)
    assert m.total_dim() == 8
    assert m.check_axioms() == []


def test_action_and_coaction_round_trip():
    m = builtins.module("a1-self")
    comodule = coaction_from_action(m, builtins.coalgebra("dual-a1"))
    assert comodule.check_axioms() == []
    back = iota(comodule)
    for t in range(7):
        for e in range(1, 7 - t):
            assert np.array_equal(back.action_tensor(e, t), m.action_tensor(e, t))


def test_algebra_on_itself_is_not_rational():
    m = builtins.module("steenrod-self-12")
    with pytest.raises(NotRationalError):
        coaction_from_action(m, builtins.coalgebra("dual-steenrod-12"))


def test_identity_map():
    m = builtins.module("a1-self")
    f = ModuleMap.identity(m)
    assert f.is_equivariant()
    assert f.kernel().total_dim() == 0
    assert f.image().total_dim() == 8


def test_suspension_and_sum():
    k = builtins.module("k-a1")
    assert suspension(k, 3).nonzero_degrees() == [3]
    a1 = builtins.module("a1-self")
    assert direct_sum([a1, a1]).total_dim() == 16


def test_inverted_window_is_rejected():
    with pytest.raises(WindowError):
        DegreeWindow(3, 1)


def test_extended_comodule_on_a_point_is_gamma():
    gamma = builtins.coalgebra("dual-a1")
    point = GradedVectorSpace(2, DegreeWindow(0, 0), {0: ["v"]}, 0, 0)
    extended = extended_comodule(point, gamma)
    assert extended.dims() == coalgebra_as_comodule(gamma).dims()
    assert extended.check_axioms() == []


def test_extended_comodule_needs_an_upper_bound():
    gamma = builtins.coalgebra("dual-a1")
    open_top = GradedVectorSpace(2, DegreeWindow(0, 2), {0: ["v"]}, 0, None)
    with pytest.raises(WindowError):
        extended_comodule(open_top, gamma)


def test_cyclic_quotient_by_sq1():
    a1 = builtins.algebra("a1")
    sq1 = builtins.ideal_set("gen:Sq(1)", a1).members()[0]
    quotient = cyclic_quotient(a1, sq1.components)
    assert quotient.total_dim() == 4
    assert quotient.dims()[1] == 0
    assert quotient.check_axioms() == []
