#!/usr/bin/env python3
"""
Randomized checks: local cohomology and rationality of bounded-above modules,
and left exactness of the torsion functors on short exact sequences.
"""

import os
import sys

import numpy as np
import pytest

# Add the parent directory to the path
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(parent_dir)

from app.services import builtins
from app.services.graded import (
    HomogeneousElement,
    ShortExactSequence,
    Truth,
    generated_subspace,
    quotient_module,
    submodule,
)
from app.services.homalg import local_cohomology
from app.services.idealsets import H0, IdealSet, gamma_module, h0, is_rational

SAMPLES = 50


@pytest.fixture(scope="module")
def rational_ambients():
    """iota(Gamma) for the dual of A(1) and for a truncation of the dual Steenrod algebra."""
    a1 = builtins.coalgebra("dual-a1")
    steenrod = builtins.coalgebra("dual-steenrod-6")
    return [
        (gamma_module(a1), a1, IdealSet.dist(gamma_module(a1))),
        (builtins.module("dual-steenrod-6"), steenrod, IdealSet.dist(builtins.module("dual-steenrod-6"))),
    ]


@pytest.fixture(scope="module")
def steenrod_on_itself():
    m = builtins.module("steenrod-self-6")
    return m, IdealSet.dist(builtins.module("dual-steenrod-6"))


def random_elements(rng, m, count):
    degrees = m.nonzero_degrees()
    out = []
    for _ in range(count):
        t = int(rng.choice(degrees))
        v = rng.integers(0, 2, size=m.dim(t))
        if not v.any():
            v[rng.integers(m.dim(t))] = 1
        out.append(HomogeneousElement.of(t, v))
    return out


def random_sequence(rng, ambient):
    """0 -> A -> ambient -> ambient/A -> 0 for A generated by one or two random elements."""
    sub = generated_subspace(ambient, random_elements(rng, ambient, int(rng.integers(1, 3))))
    a = submodule(ambient, sub, name="A")
    c = quotient_module(ambient, sub, name="C")
    return ShortExactSequence(a.inclusion, c.projection)


def random_bounded_above(rng, ambient):
    seq = random_sequence(rng, ambient)
    return seq.f.source if rng.integers(2) else seq.g.target


@pytest.mark.parametrize("seed", range(SAMPLES))
def test_bounded_above_modules_are_rational_with_no_higher_local_cohomology(seed, rational_ambients):
    rng = np.random.default_rng(seed)
    ambient, coalgebra, _ = rational_ambients[seed % len(rational_ambients)]
    m = random_bounded_above(rng, ambient)
    assert m.bounded_above_at is not None

    report = is_rational(m, coalgebra)
    assert not report.discrepancy
    assert report.annihilator_test == Truth.TRUE
    assert report.torsion_test == Truth.TRUE
    assert report.verdict == Truth.TRUE

    for n in (1, 2):
        lc = local_cohomology(m, n, j_max=8)
        for t in lc.degrees:
            if lc.stable_from[t] is not None:
                assert lc.value[t] == 0, (n, t)


def test_some_local_cohomology_degrees_are_certified(rational_ambients):
    rng = np.random.default_rng(0)
    ambient, _, _ = rational_ambients[0]
    lc = local_cohomology(random_bounded_above(rng, ambient), 1, j_max=8)
    assert any(lc.stable_from[t] is not None for t in lc.degrees)


def _kernel_images(seq, torsion):
    """Per degree: f(torsion(A)) and torsion(B) ∩ ker g, both inside B."""
    small, big = torsion(seq.f.source), torsion(seq.f.target)
    ker_g = seq.g.kernel()
    for t in seq.f.target.window.degrees():
        yield t, small.subspace[t].image(seq.f.matrix(t)), big.subspace[t].intersection(ker_g[t])


@pytest.mark.parametrize("seed", range(SAMPLES))
def test_torsion_preserves_kernels(seed, rational_ambients, steenrod_on_itself):
    rng = np.random.default_rng(1000 + seed)
    if seed % 2 == 0:
        ambient, _, dist = rational_ambients[(seed // 2) % len(rational_ambients)]
        seq = random_sequence(rng, ambient)
        assert seq.is_exact()
        for t, image, kernel in _kernel_images(seq, lambda m: H0(dist, m)):
            assert image == kernel, t
        return

    # the algebra acting on itself is not rational; h0 is computed elementwise
    ambient, dist = steenrod_on_itself
    seq = random_sequence(rng, ambient)
    assert seq.is_exact()
    for t, image, kernel in _kernel_images(seq, lambda m: h0(dist, m)):
        assert image == kernel, t
    for t, image, kernel in _kernel_images(seq, lambda m: H0(dist, m)):
        assert kernel.contains_subspace(image), t

    # H0 is a functor: g carries H0(B) into H0(C)
    big, quotient = H0(dist, seq.g.source), H0(dist, seq.g.target)
    for t in seq.g.target.window.degrees():
        assert quotient.subspace[t].contains_subspace(big.subspace[t].image(seq.g.matrix(t))), t
