#!/usr/bin/env python3
"""
Tests for exact linear algebra over F_p.
"""

import os
import sys

import numpy as np
import pytest

# Add the parent directory to the path
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(parent_dir)

from app.services import fplin
from app.services.errors import PrimeMismatchError


def test_rank_depends_on_the_prime():
    m = [[1, 2], [2, 1]]
    assert fplin.rank(m, 3) == 1
    assert fplin.rank(m, 5) == 2
    assert fplin.rank(np.zeros((0, 3)), 2) == 0


def test_dense_and_sparse_paths_agree():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = rng.integers(0, 2, size=(12, 15)) * (rng.random((12, 15)) < 0.2)
        dense, dense_pivots = fplin._rref_dense(a, 2)
        sparse, sparse_pivots = fplin._rref_sparse(a, 2)
        assert dense_pivots == sparse_pivots
        assert np.array_equal(dense, sparse)


def test_kernel_basis_is_the_null_space():
    rng = np.random.default_rng(11)
    for p in (2, 3, 5):
        a = rng.integers(0, p, size=(4, 7))
        m = fplin.FpMatrix(p, a)
        kernel = fplin.kernel_basis(m)
        assert kernel.dim == 7 - m.rank()
        for v in kernel.basis:
            assert not np.mod(a @ v, p).any()


def test_solve_finds_a_solution_or_reports_inconsistency():
    m = fplin.FpMatrix(2, [[1, 1, 0], [0, 1, 1]])
    x = fplin.solve(m, [1, 0])
    assert x is not None
    assert np.array_equal(m.apply(x), np.array([1, 0]))

    singular = fplin.FpMatrix(2, [[1, 1], [1, 1]])
    assert fplin.solve(singular, [1, 0]) is None


def test_subspace_equality_ignores_the_spanning_set():
    a = fplin.Subspace.span(2, 3, [[1, 1, 0], [0, 1, 1]])
    b = fplin.Subspace.span(2, 3, [[1, 0, 1], [1, 1, 0], [0, 1, 1]])
    assert a == b
    assert a.dim == 2
    assert [1, 0, 1] in a
    assert [1, 0, 0] not in a


def test_intersection_and_sum():
    e = np.eye(3, dtype=np.int64)
    a = fplin.Subspace.span(2, 3, [e[0], e[1]])
    b = fplin.Subspace.span(2, 3, [e[1], e[2]])
    assert a.intersection(b) == fplin.Subspace.span(2, 3, [e[1]])
    assert (a + b) == fplin.Subspace.full(2, 3)


def test_quotient_map_has_the_subspace_as_kernel():
    sub = fplin.Subspace.span(3, 4, [[1, 2, 0, 0], [0, 0, 1, 1]])
    q = fplin.quotient_map(4, sub)
    assert q.shape == (2, 4)
    assert fplin.kernel_basis(q) == sub
    section = fplin.quotient_section(4, sub)
    assert np.array_equal(fplin.matmul(q.data, section, 3), np.eye(2, dtype=np.int64))


def test_complement_basis_extends_to_the_larger_space():
    small = fplin.Subspace.span(2, 3, [[1, 0, 0]])
    big = fplin.Subspace.full(2, 3)
    extra = small.complement_basis(big)
    assert extra.shape[0] == 2
    assert (small + fplin.Subspace.span(2, 3, extra)) == big


def test_mixing_primes_is_rejected():
    with pytest.raises(PrimeMismatchError):
        fplin.FpMatrix(2, [[1]]) @ fplin.FpMatrix(3, [[1]])
    with pytest.raises(PrimeMismatchError):
        fplin.Subspace.full(2, 2) + fplin.Subspace.full(3, 2)
