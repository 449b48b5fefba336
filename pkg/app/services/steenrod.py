"""
The mod 2 Steenrod algebra in the Milnor basis.

Builds degree-truncated structure constants for the whole algebra, the finite
subalgebras A(n), their duals labelled by xi-monomials, the orientation classes
omega_n and the left annihilators that generate the Mitchell ideal set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Tuple

import numpy as np
import pandas as pd

import config
from app.services import graded
from app.services.errors import StructureError, WindowError
from app.services.graded import GradedAlgebra, GradedCoalgebra, HomogeneousElement

logger = logging.getLogger(__name__)

PRIME = 2

Monomial = Tuple[int, ...]


def normalize(r: Iterable[int]) -> Monomial:
    r = list(r)
    while r and r[-1] == 0:
        r.pop()
    return tuple(r)


def monomial_degree(r: Monomial) -> int:
    return sum(ri * ((1 << i) - 1) for i, ri in enumerate(r, start=1))


def monomial_label(r: Monomial) -> str:
    return "Sq(" + ",".join(str(x) for x in r) + ")" if r else "1"


def dual_monomial_label(r: Monomial) -> str:
    """Label of the xi-monomial dual to Sq(r), e.g. (3, 1) -> 'xi1^3xi2'."""
    parts = []
    for i, ri in enumerate(r, start=1):
        if ri == 1:
            parts.append(f"xi{i}")
        elif ri > 1:
            parts.append(f"xi{i}^{ri}")
    return "".join(parts) if parts else "1"


@dataclass(frozen=True)
class MilnorElement:
    """A homogeneous or inhomogeneous F_2-sum of Milnor basis monomials."""
    terms: FrozenSet[Monomial] = frozenset()

    @classmethod
    def sq(cls, *r: int) -> "MilnorElement":
        return cls(frozenset([normalize(r)]))

    @classmethod
    def unit(cls) -> "MilnorElement":
        return cls(frozenset([()]))

    @classmethod
    def zero(cls) -> "MilnorElement":
        return cls()

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "MilnorElement") -> "MilnorElement":
        return MilnorElement(self.terms ^ other.terms)

    def __mul__(self, other: "MilnorElement") -> "MilnorElement":
        return milnor_product(self, other)

    @property
    def degrees(self) -> FrozenSet[int]:
        return frozenset(monomial_degree(r) for r in self.terms)

    @property
    def degree(self) -> int:
        degs = self.degrees
        if len(degs) != 1:
            raise StructureError(f"{self} is not homogeneous")
        return next(iter(degs))

    def sorted_terms(self) -> List[Monomial]:
        return sorted(self.terms, key=lambda r: (monomial_degree(r), len(r), r))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(monomial_label(r) for r in self.sorted_terms())


def _allowable_matrices(r: Monomial, s: Monomial) -> Iterator[Dict[Tuple[int, int], int]]:
    """
    Matrices x with sum_j 2^j x_ij = r_i (rows i >= 1) and sum_i x_ij = s_j (columns j >= 1).

    Yields the full matrix including row 0 and column 0.
    """
    rows, cols = len(r), len(s)
    cells = [(i, j) for i in range(1, rows + 1) for j in range(1, cols + 1)]
    row_left = list(r)
    col_left = list(s)
    x: Dict[Tuple[int, int], int] = {}

    def rec(k: int):
        if k == len(cells):
            full = dict(x)
            for i in range(1, rows + 1):
                full[(i, 0)] = row_left[i - 1]
            for j in range(1, cols + 1):
                full[(0, j)] = col_left[j - 1]
            yield full
            return
        i, j = cells[k]
        limit = min(row_left[i - 1] >> j, col_left[j - 1])
        for v in range(limit + 1):
            x[(i, j)] = v
            row_left[i - 1] -= v << j
            col_left[j - 1] -= v
            yield from rec(k + 1)
            row_left[i - 1] += v << j
            col_left[j - 1] += v
        del x[(i, j)]

    yield from rec(0)


@lru_cache(maxsize=None)
def _monomial_product(r: Monomial, s: Monomial) -> FrozenSet[Monomial]:
    result = set()
    length = len(r) + len(s)
    for x in _allowable_matrices(r, s):
        t = []
        ok = True
        for n in range(1, length + 1):
            seen = 0
            total = 0
            for i in range(0, n + 1):
                v = x.get((i, n - i), 0)
                # the multinomial coefficient is odd iff the binary digits do not overlap
                if seen & v:
                    ok = False
                    break
                seen |= v
                total += v
            if not ok:
                break
            t.append(total)
        if ok:
            result ^= {normalize(t)}
    return frozenset(result)


def milnor_product(a: MilnorElement, b: MilnorElement) -> MilnorElement:
    """Product in the Milnor basis via allowable matrices, coefficients mod 2."""
    terms = set()
    for r in a.terms:
        for s in b.terms:
            terms ^= _monomial_product(r, s)
    return MilnorElement(frozenset(terms))


def _partitions(degree: int, index: int) -> Iterator[List[int]]:
    """Sequences (r_1..r_index) with sum r_i (2^i - 1) = degree."""
    if index == 0:
        if degree == 0:
            yield []
        return
    weight = (1 << index) - 1
    for ri in range(degree // weight + 1):
        for rest in _partitions(degree - ri * weight, index - 1):
            yield rest + [ri]


def milnor_basis(degree: int) -> List[Monomial]:
    """Milnor basis monomials of a degree, ordered by length then lexicographically."""
    if degree < 0:
        return []
    if degree == 0:
        return [()]
    top_index = 1
    while (1 << (top_index + 1)) - 1 <= degree:
        top_index += 1
    found = {normalize(r) for r in _partitions(degree, top_index)}
    return sorted(found, key=lambda r: (len(r), r))


def profile_bounds(n: int) -> List[int]:
    """Exclusive upper bounds on r_i for A(n): r_i < 2^(n+2-i)."""
    return [1 << (n + 2 - i) for i in range(1, n + 2)]


def in_profile(r: Monomial, n: int) -> bool:
    bounds = profile_bounds(n)
    if len(r) > len(bounds):
        return False
    return all(ri < b for ri, b in zip(r, bounds))


def top_monomial(n: int) -> Monomial:
    return tuple(b - 1 for b in profile_bounds(n))


def top_degree(n: int) -> int:
    return monomial_degree(top_monomial(n))


def _algebra_from_basis(name: str, basis: Dict[int, List[Monomial]], top: int, finite: bool) -> GradedAlgebra:
    index = {r: (d, i) for d, rs in basis.items() for i, r in enumerate(rs)}
    mult = {}
    for m in range(top + 1):
        for n in range(top + 1 - m):
            tensor = np.zeros((len(basis[m]), len(basis[n]), len(basis[m + n])), dtype=np.int64)
            for i, r in enumerate(basis[m]):
                for j, s in enumerate(basis[n]):
                    for w in _monomial_product(r, s):
                        if w not in index:
                            raise StructureError(f"{name}: product {monomial_label(r)}*{monomial_label(s)} "
                                                 f"leaves the basis at {monomial_label(w)}")
                        tensor[i, j, index[w][1]] ^= 1
            mult[(m, n)] = tensor
    labels = {d: [monomial_label(r) for r in basis[d]] for d in basis}
    generators = []
    k = 0
    while (1 << k) <= top:
        g = (1 << k,)
        if g in index:
            generators.append(index[g])
        k += 1
    algebra = GradedAlgebra(PRIME, name, labels, mult, generators, top, finite=finite)
    algebra.monomials = basis
    return algebra


@lru_cache(maxsize=None)
def build_A_n(n: int) -> GradedAlgebra:
    """
    The finite subalgebra A(n), generated by Sq(1), Sq(2), ..., Sq(2^n).

    Args:
        n: index, at most config.MAX_STEENROD_N

    Returns:
        finite GradedAlgebra on the profile basis
    """
    if n < 0 or n > config.MAX_STEENROD_N:
        raise WindowError(f"A({n}) is outside the supported range 0..{config.MAX_STEENROD_N}")
    top = top_degree(n)
    basis = {d: [r for r in milnor_basis(d) if in_profile(r, n)] for d in range(top + 1)}
    algebra = _algebra_from_basis(f"A({n})", basis, top, finite=True)
    logger.info(f"Built A({n}): dimension {algebra.total_dim()}, top degree {top}")
    return algebra


@lru_cache(maxsize=None)
def build_dual_A_n(n: int) -> GradedCoalgebra:
    algebra = build_A_n(n)
    return _dual_with_xi_labels(algebra, mitchell=True)


@lru_cache(maxsize=None)
def build_truncated_A(window_top: int) -> GradedAlgebra:
    """All Milnor basis elements through `window_top`, products recorded up to that degree."""
    if window_top < 1:
        raise WindowError("the truncated Steenrod algebra needs window_top >= 1")
    basis = {d: milnor_basis(d) for d in range(window_top + 1)}
    algebra = _algebra_from_basis(f"A[<={window_top}]", basis, window_top, finite=False)
    logger.info(f"Built the Steenrod algebra through degree {window_top}: dimension {algebra.total_dim()}")
    return algebra


@lru_cache(maxsize=None)
def build_dual_steenrod(window_top: int) -> GradedCoalgebra:
    """The dual Steenrod algebra on [-window_top, 0], labelled by xi-monomials."""
    return _dual_with_xi_labels(build_truncated_A(window_top), mitchell=True)


def _dual_with_xi_labels(algebra: GradedAlgebra, mitchell: bool) -> GradedCoalgebra:
    labels = {-d: [dual_monomial_label(r) for r in algebra.monomials[d]] for d in algebra.monomials}
    coalgebra = graded.dualize_algebra(algebra, labels=labels, mitchell=mitchell)
    algebra._dual = coalgebra
    return coalgebra


def element_vector(algebra: GradedAlgebra, element: MilnorElement) -> HomogeneousElement:
    """Coordinates of a homogeneous Milnor element in a Steenrod-type algebra's basis."""
    if not element:
        raise ValueError("zero has no well-defined degree")
    d = element.degree
    if not algebra.knows(d) or d > algebra.top:
        raise WindowError(f"{element} has degree {d}, beyond {algebra.name}")
    vec = np.zeros(algebra.dim(d), dtype=np.int64)
    for r in element.terms:
        try:
            vec[algebra.monomials[d].index(r)] ^= 1
        except ValueError:
            raise StructureError(f"{monomial_label(r)} is not a basis element of {algebra.name}")
    return HomogeneousElement.of(d, vec)


def subalgebra_embedding(n: int, algebra: GradedAlgebra, degree: int) -> np.ndarray:
    """Matrix (dim A^degree x dim A(n)^degree) sending A(n)'s basis to the ambient Milnor basis."""
    small = build_A_n(n)
    cols = []
    for r in small.monomials.get(degree, []):
        v = np.zeros(algebra.dim(degree), dtype=np.int64)
        v[algebra.monomials[degree].index(r)] = 1
        cols.append(v)
    if not cols:
        return np.zeros((algebra.dim(degree), 0), dtype=np.int64)
    return np.array(cols, dtype=np.int64).T


@dataclass(frozen=True)
class OrientationClass:
    """The element of the dual of A(n) pairing to 1 with A(n)'s top Milnor monomial."""
    n: int
    degree: int
    monomial: Monomial

    @property
    def label(self) -> str:
        return dual_monomial_label(self.monomial)

    def in_dual_steenrod(self, coalgebra: GradedCoalgebra) -> HomogeneousElement:
        if self.degree < -coalgebra.depth:
            raise WindowError(f"omega_{self.n} lives in degree {self.degree}, beyond {coalgebra.name}")
        labels = coalgebra.labels[self.degree]
        if self.label not in labels:
            raise StructureError(f"{coalgebra.name} has no basis element {self.label}")
        vec = np.zeros(len(labels), dtype=np.int64)
        vec[labels.index(self.label)] = 1
        return HomogeneousElement.of(self.degree, vec)


def omega(n: int) -> OrientationClass:
    if n < 0 or n > config.MAX_STEENROD_N:
        raise WindowError(f"omega_{n} is outside the supported range 0..{config.MAX_STEENROD_N}")
    r = top_monomial(n)
    return OrientationClass(n, -monomial_degree(r), r)


def orientation_pairing(n: int, degree: int) -> np.ndarray:
    """Matrix of (a, b) -> <a*b, omega_n> on A(n)^degree x A(n)^(top - degree)."""
    a = build_A_n(n)
    top = a.top
    top_index = a.monomials[top].index(top_monomial(n))
    return a.table(degree, top - degree)[:, :, top_index]


def dual_steenrod_module(window_top: int) -> graded.GradedModule:
    """iota of the truncated dual Steenrod algebra coacting on itself."""
    coalgebra = build_dual_steenrod(window_top)
    return graded.iota(graded.coalgebra_as_comodule(coalgebra, name="Gamma"))


def mitchell_ideal(n: int, window_top: int):
    """
    The left annihilator of omega_n inside iota(Gamma) for the truncated dual
    Steenrod algebra, certified through window_top.
    """
    from app.services import idealsets

    cls = omega(n)
    if -cls.degree > window_top:
        raise WindowError(f"omega_{n} needs the Steenrod algebra through degree {-cls.degree}, window stops at {window_top}")
    module = dual_steenrod_module(window_top)
    x = cls.in_dual_steenrod(module.algebra.dual())
    ideal = idealsets.ann_left(module, x, name=f"ann(omega_{n})")
    logger.debug(f"ann(omega_{n}) dims: {ideal.dims()}")
    return ideal


def basis_table(algebra: GradedAlgebra) -> pd.DataFrame:
    """Degree / index / label / dual label for every basis element (TSV dump)."""
    dual = algebra.dual()
    rows = []
    for d, i, label in algebra.basis():
        rows.append({
            "degree": d,
            "index": i,
            "label": label,
            "dual_degree": -d,
            "dual_label": dual.labels[-d][i],
        })
    return pd.DataFrame(rows, columns=["degree", "index", "label", "dual_degree", "dual_label"])
