#!/usr/bin/env python3
"""
Tests for ideal sets, the torsion functors h0/H0 and rationality.
"""

import os
import sys

import numpy as np
import pytest

# Add the parent directory to the path
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(parent_dir)

from app.services import builtins, fplin, steenrod
from app.services.commands import cmd_localcoh
from app.services.errors import DescriptionError, StructureError
from app.services.graded import Truth
from app.services.homalg import local_cohomology, local_cohomology_general
from app.services.idealsets import (
    H0,
    IdealSet,
    ann_left,
    closedness_transfers,
    equivalent,
    filtered_closure,
    gamma_module,
    grad_ideal,
    h0,
    ideal_generated,
    is_closed_ideal_set,
    is_rational,
    preorder_leq,
    theta_rationality,
    trace,
)
from app.services.steenrod import MilnorElement, element_vector


@pytest.fixture
def a1():
    return builtins.algebra("a1")


@pytest.fixture
def sq1_set(a1):
    return builtins.ideal_set("gen:Sq(1)", a1)


def test_annihilator_of_sq1_is_the_ideal_it_generates(a1):
    m = builtins.module("a1-self")
    sq1 = element_vector(a1, MilnorElement.sq(1))
    ann = ann_left(m, sq1)
    generated = ideal_generated(a1, [sq1])
    assert ann.dims() == generated.dims()
    assert generated.dims() == {0: 0, 1: 1, 2: 0, 3: 1, 4: 1, 5: 0, 6: 1}
    assert generated.is_left_ideal()


def test_degree_zero_generator_is_rejected(a1):
    with pytest.raises(StructureError):
        ideal_generated(a1, [a1.element("1")])


def test_h0_is_smaller_than_H0(a1, sq1_set):
    m = builtins.module("a1-self")
    small, big = h0(sq1_set, m), H0(sq1_set, m)
    sq1 = element_vector(a1, MilnorElement.sq(1))
    sq2sq1 = element_vector(a1, MilnorElement.sq(2) * MilnorElement.sq(1))
    assert sq1 in small.subspace
    assert sq2sq1 not in small.subspace
    assert sq2sq1 in big.subspace
    assert big.subspace.contains(small.subspace)
    assert big.as_submodule().check_axioms() == []


def test_torsion_of_cyclic_submodules(sq1_set):
    m = builtins.module("a1-sq1")
    assert h0(sq1_set, m).subspace.total_dim() == 3
    assert H0(sq1_set, m).subspace.total_dim() == 4
    sub = builtins.module("a1-sq2sq1")
    assert sub.total_dim() == 3
    assert h0(sq1_set, sub).subspace.total_dim() == 2
    assert H0(sq1_set, sub).subspace.total_dim() == 2


def test_trivial_and_grad_sets_see_everything_in_a_finite_module(a1):
    m = builtins.module("a1-self")
    for ideals in (IdealSet.trivial(a1), IdealSet.grad(a1)):
        result = h0(ideals, m)
        assert result.subspace.total_dim() == 8
        assert result.is_certified()


def test_unknown_ideal_set_name(a1):
    with pytest.raises(DescriptionError):
        builtins.ideal_set("nonsense", a1)
    with pytest.raises(DescriptionError):
        builtins.ideal_set("gen:Sq(9)", a1)


def test_finite_module_is_rational():
    report = is_rational(builtins.module("a1-self"), builtins.coalgebra("dual-a1"))
    assert report.verdict == Truth.TRUE
    assert not report.discrepancy


def test_algebra_on_itself_fails_the_annihilator_test():
    report = is_rational(builtins.module("steenrod-self-12"), builtins.coalgebra("dual-steenrod-12"))
    assert report.annihilator_test == Truth.FALSE
    assert report.witness is not None
    assert report.witness.degree == 0
    assert report.verdict != Truth.TRUE


def test_preorder_against_the_zero_ideal(a1, sq1_set):
    trivial, grad = IdealSet.trivial(a1), IdealSet.grad(a1)
    up = preorder_leq(trivial, grad)
    assert up.truth == Truth.TRUE
    assert up.witness == {"(0)": "I_7"}
    assert preorder_leq(grad, trivial).truth == Truth.TRUE
    assert equivalent(grad, trivial) == Truth.TRUE

    assert preorder_leq(sq1_set, trivial).truth == Truth.TRUE
    down = preorder_leq(trivial, sq1_set)
    assert down.truth == Truth.FALSE
    assert down.failure == "(0)"


def test_filtered_closure_adds_the_intersection(a1):
    left = ideal_generated(a1, [element_vector(a1, MilnorElement.sq(1))], name="L1")
    right = ideal_generated(a1, [element_vector(a1, MilnorElement.sq(2))], name="L2")
    s = IdealSet.explicit(a1, [left, right])
    filtered, pair = s.is_filtered()
    assert filtered == Truth.FALSE
    assert pair == "L1, L2"

    closed = filtered_closure(s)
    assert len(closed.members()) == 3
    assert closed.is_filtered()[0] == Truth.TRUE
    assert preorder_leq(s, closed).truth == Truth.TRUE
    assert preorder_leq(closed, s).truth == Truth.FALSE


def test_closedness_on_a_small_corpus(a1, sq1_set):
    corpus = [builtins.module("a1-self"), builtins.module("a1-sq1"), builtins.module("k-a1")]
    assert is_closed_ideal_set(IdealSet.grad(a1), corpus).closed

    report = is_closed_ideal_set(sq1_set, corpus)
    assert not report.closed
    assert report.witness == corpus[0].name
    assert not report.per_module[corpus[0].name]

    equiv, agree = closedness_transfers(IdealSet.grad(a1), IdealSet.trivial(a1), corpus)
    assert equiv == Truth.TRUE
    assert agree


def test_trace_of_a_finite_module_is_everything():
    gamma = builtins.coalgebra("dual-a1")
    assert trace(builtins.module("a1-self"), gamma).total_dim() == 8
    assert trace(builtins.module("k-a1"), gamma).total_dim() == 1


def test_theta_rationality_over_gamma():
    theta = gamma_module(builtins.coalgebra("dual-a1"))
    verdict, witness = theta_rationality(builtins.module("a1-self"), theta)
    assert verdict == Truth.TRUE
    assert witness is None


def test_dist_sits_below_grad_one_degree_past_each_element():
    theta = gamma_module(builtins.coalgebra("dual-a1"))
    dist, grad = IdealSet.dist(theta), IdealSet.grad(theta.algebra)
    result = preorder_leq(dist, grad)
    assert result.truth == Truth.TRUE
    for x, member in zip(theta.basis_elements(), dist.members()):
        assert result.witness[member.name] == f"I_{-x.degree + 1}"


def test_ann_of_omega1_meets_a1_trivially():
    a8, a1 = builtins.algebra("steenrod-8"), steenrod.build_A_n(1)
    ann = steenrod.mitchell_ideal(1, 8)
    for d in range(1, a1.top + 1):
        inside = fplin.Subspace.span(a8.prime, a8.dim(d), [a8.element(label).array() for label in a1.labels[d]])
        assert ann.component(d).intersection(inside).dim == 0, d


def test_grad_sits_below_the_mitchell_set():
    a8 = builtins.algebra("steenrod-8")
    mit = builtins.mitchell_set(8)
    assert [k.name for k in mit.members()] == ["ann(omega_0)", "ann(omega_1)"]
    result = preorder_leq(IdealSet.grad(a8, horizon=4), mit)
    assert result.truth == Truth.TRUE
    assert result.witness == {"I_1": "ann(omega_0)", "I_2": "ann(omega_0)",
                              "I_3": "ann(omega_1)", "I_4": "ann(omega_1)"}


def test_grad_and_mitchell_chains_give_the_same_local_cohomology():
    m = builtins.module("dual-steenrod-8")
    degrees = [-2, -1, 0]
    by_grad = cmd_localcoh(m, 0, 8, degrees, ideal_spec="grad")
    by_mit = cmd_localcoh(m, 0, 8, degrees, ideal_spec="mitchell")
    assert by_mit.summary["ideal_set"] == "mitchell"
    for t in degrees:
        a, b = by_grad.summary["values"][str(t)], by_mit.summary["values"][str(t)]
        if a is not None and b is not None:
            assert a == b, t

    # ann(omega_0) is I_2, so the two towers agree stage for stage there
    mit = builtins.ideal_set("mitchell", m.algebra)
    assert mit.chain()[0] == grad_ideal(m.algebra, 2)
    grad_tower = local_cohomology(m, 0, 8, degrees)
    mit_tower = local_cohomology_general(mit, m, 0, degrees)
    for t in degrees:
        assert grad_tower.dims[t][1] == mit_tower.dims[t][0], t
