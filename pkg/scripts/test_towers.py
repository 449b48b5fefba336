#!/usr/bin/env python3
"""
Tests for towers, families and derived limits.
"""

import os
import sys

import numpy as np
import pytest

# Add the parent directory to the path
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(parent_dir)

from app.services import builtins
from app.services.errors import CertificateError, DescriptionError, HypothesisRefusal, StructureError
from app.services.graded import ComoduleMap, DegreeWindow, GradedComodule, Truth, trivial_comodule
from app.services.idealsets import ann_left, grad_ideal
from app.services.towers import (
    ClassDescriptor,
    ComoduleFamily,
    Tower,
    Verdict,
    derived_product,
    derived_sequential_limit,
    lim1_vanishes,
    lim_module,
    localization_oracle,
    milnor_les_check,
    mittag_leffler,
    moore_complex,
)


def test_shift_tower_is_refused():
    tower = builtins.tower("shift")
    assert mittag_leffler(tower).verdict != Truth.TRUE
    with pytest.raises(HypothesisRefusal):
        derived_sequential_limit(tower, 0)
    with pytest.raises(CertificateError):
        moore_complex(tower)


def test_zero_maps_have_no_limit_and_no_lim1():
    tower = builtins.tower("zero-maps")
    assert mittag_leffler(tower).verdict == Truth.TRUE
    assert tower.stability([0]).missing == [0]
    with pytest.raises(CertificateError):
        lim_module(tower)
    with pytest.raises(CertificateError):
        moore_complex(tower)


def test_constant_tower():
    tower = builtins.tower("constant-k")
    assert tower.check_maps() == []
    assert mittag_leffler(tower).verdict == Truth.TRUE
    assert lim_module(tower).total_dim() == 1
    assert moore_complex(tower).h[0] == (1, 0, 0)

    report = derived_sequential_limit(tower, 0, degrees=[0])
    assert report.verdict(0) == Verdict.NONZERO
    assert report.verdicts[0].dimension == 1
    assert milnor_les_check(tower, 1).exact


def test_truncations_of_gamma_are_mittag_leffler():
    tower = builtins.tower("gamma-truncation")
    assert tower.check_maps() == []
    assert mittag_leffler(tower).verdict == Truth.TRUE
    assert lim_module(tower).total_dim() == 7


def test_tower_needs_one_map_per_step():
    k = trivial_comodule(builtins.coalgebra("dual-a1"))
    with pytest.raises(StructureError):
        Tower([k, k], [])


def test_finite_family_products_are_exact():
    report = derived_product(builtins.family("a1-family"), 1, degrees=[0])
    assert report.verdict(0) == Verdict.ZERO


def test_family_needs_members_or_a_generator():
    c = builtins.coalgebra("dual-a1")
    with pytest.raises(DescriptionError):
        ComoduleFamily(c)
    with pytest.raises(DescriptionError):
        ComoduleFamily(c, members=[trivial_comodule(c)], generator=lambda i: trivial_comodule(c))


def test_localization_oracle():
    family = builtins.kx_family(horizon=6)
    assert localization_oracle(family, ClassDescriptor({}, (0,))).verdict == Verdict.NONZERO

    zero = localization_oracle(family, ClassDescriptor({}, ()))
    assert zero.verdict == Verdict.ZERO
    assert zero.bound == 0

    one_component = localization_oracle(family, ClassDescriptor({0: (0,)}, ()))
    assert one_component.verdict == Verdict.ZERO
    assert one_component.bound == 1


def test_kx_family_members():
    family = builtins.kx_family(horizon=3)
    assert family.tail_mismatches() == []
    for i in family.indices():
        assert family.module(i).nonzero_degrees() == list(range(0, 2 * i + 1, 2))


def test_lim1_vanishing_follows_mittag_leffler():
    assert lim1_vanishes(builtins.tower("constant-k")) == Truth.TRUE
    assert lim1_vanishes(builtins.tower("gamma-truncation")) == Truth.TRUE
    assert lim1_vanishes(builtins.tower("shift")) != Truth.TRUE


def _degree_zero_tower(widths, matrices, name):
    """Members k^w concentrated in degree 0 over the dual of A(1), with the given structure maps."""
    c = builtins.coalgebra("dual-a1")
    members = [GradedComodule(c, DegreeWindow(0, 0), {0: [f"e{k}" for k in range(w)]}, {}, 0, 0, name=f"V{i}")
               for i, w in enumerate(widths)]
    maps = [ComoduleMap(members[i + 1], members[i], {0: np.asarray(m, dtype=np.int64)}, name=f"f{i}")
            for i, m in enumerate(matrices)]
    return Tower(members, maps, name=name)


def _projection_tower(widths, name):
    return _degree_zero_tower(widths, [np.eye(widths[i], widths[i + 1]) for i in range(len(widths) - 1)], name)


def test_growing_tower_has_no_moore_complex():
    # k^(i+2) -> k^(i+1): every map is onto and none is an isomorphism
    tower = _projection_tower([i + 1 for i in range(9)], "growing")
    assert mittag_leffler(tower).verdict == Truth.TRUE
    assert tower.stability([0]).missing == [0]
    with pytest.raises(CertificateError):
        moore_complex(tower)
    with pytest.raises(CertificateError, match=r"degrees \[0\]"):
        moore_complex(tower, degrees=[0])
    with pytest.raises(CertificateError):
        lim_module(tower)


def test_moore_complex_reads_the_stable_member():
    tower = _projection_tower([1, 2, 3, 3, 3, 3, 3, 3, 3], "settling")
    assert tower.stability([0]).stable_from[0] == 2
    moore = moore_complex(tower)
    assert moore.h[0] == (3, 0, 0)
    assert moore.length[0] == 3
    assert lim_module(tower).dim(0) == 3


def _tower_corpus():
    corpus = {name: builtins.tower(name) for name in builtins.TOWER_NAMES}
    corpus["growing"] = _projection_tower([i + 1 for i in range(9)], "growing")
    corpus["settling"] = _projection_tower([1, 2, 3, 3, 3, 3, 3, 3, 3], "settling")
    corpus["zero-then-identity"] = _degree_zero_tower([1] * 9, [[[0]]] + [[[1]]] * 7, "zero-then-identity")
    return corpus


def test_moore_complex_against_the_limit_on_a_tower_corpus():
    corpus = _tower_corpus()
    assert len(corpus) == 10
    refused = []
    for name, tower in corpus.items():
        try:
            limit = lim_module(tower)
        except CertificateError:
            with pytest.raises(CertificateError):
                moore_complex(tower)
            refused.append(name)
            continue
        moore = moore_complex(tower)
        ml = mittag_leffler(tower)
        assert moore.degrees == list(limit.window.degrees()), name
        for t in moore.degrees:
            assert moore.h[t][0] == limit.dim(t), (name, t)
            assert (moore.h[t][1] == 0) == (ml.per_degree[t] == Truth.TRUE), (name, t)
    assert sorted(refused) == ["growing", "shift", "zero-maps"]


@pytest.mark.parametrize("name, degrees", [("gamma-truncation", [-1, 0]), ("steenrod-self-truncation", [0, 1])])
def test_milnor_sequence_of_truncation_towers(name, degrees):
    report = milnor_les_check(builtins.tower(name), 1, j_max=8, degrees=degrees)
    assert report.cells
    assert report.exact


def test_a1_truncation_is_certified_with_the_default_horizon():
    tower = builtins.tower("a1-truncation")
    assert tower.horizon == 6 + 3
    limit = lim_module(tower)
    assert (limit.window.lo, limit.window.hi) == (-6, 0)
    assert limit.bounded_above_at == 0
    assert limit.total_dim() == 8


def test_derived_functors_over_the_dual_of_a1_vanish_in_positive_degrees():
    for name in ("a1-truncation", "constant-k", "constant-gamma"):
        tower = builtins.tower(name)
        for n in (1, 2):
            report = derived_sequential_limit(tower, n)
            assert report.verdicts, name
            assert all(v.verdict == Verdict.ZERO for v in report.verdicts.values()), (name, n)
    family = builtins.family("a1-family")
    for n in (1, 2):
        report = derived_product(family, n, degrees=list(range(-6, 1)))
        assert all(v.verdict == Verdict.ZERO for v in report.verdicts.values()), n


def test_kx_survival_orders_need_twice_as_many_stages():
    family = builtins.kx_family(horizon=20)
    full = derived_product(family, 1, j_max=44, degrees=[-2])
    assert [c.order for c in full.verdicts[-2].survival] == list(range(1, 22))
    assert full.verdict(-2) == Verdict.NONZERO

    short = derived_product(family, 1, j_max=24, degrees=[-2])
    orders = [c.order for c in short.verdicts[-2].survival]
    assert orders[:11] == list(range(1, 12))
    assert max(orders) == 12


def test_xi_survival_orders_match_direct_annihilation():
    gamma = builtins.module("dual-steenrod-16")
    direct = []
    for i in (1, 2, 3):
        x = gamma.element(f"xi{i}")
        ann = ann_left(gamma, x)
        # the last I_j that still moves xi_i
        direct.append(max(j for j in range(1, 17) if ann.contains(grad_ideal(gamma.algebra, j)) == Truth.FALSE))
    assert direct == [1, 3, 7]

    report = derived_product(builtins.xi_family(horizon=3), 1, j_max=8, degrees=[-1])
    assert [c.order for c in report.verdicts[-1].survival] == direct
