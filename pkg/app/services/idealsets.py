"""
Ideal sets in a connected graded algebra and the torsion functors they define.

An ideal set is handled through a cofinal chain of its members:
    explicit lists  -> running intersections in list order
    grad            -> the distinct ideals among I_1, I_2, ..., I_horizon
    dist(Theta)     -> D_h = intersection of ann(x) over basis elements x of Theta
                       within h degrees of Theta's top
Every answer that a degree window can leave open is three-valued.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

import config
from app.services import fplin
from app.services.errors import PrimeMismatchError, StructureError, WindowError
from app.services.graded import (
    GradedAlgebra,
    GradedCoalgebra,
    GradedModule,
    GradedSubspace,
    HomogeneousElement,
    Truth,
    annihilation_degree,
    coalgebra_as_comodule,
    generated_subspace,
    iota,
    same_algebra,
    submodule,
)

logger = logging.getLogger(__name__)


class HomogeneousLeftIdeal:
    """
    A homogeneous left ideal, recorded degreewise through `certified_through`.

    `full_from` and `zero_from` describe the ideal beyond the recorded range when
    that is known: every degree >= full_from is the whole algebra degree, every
    degree >= zero_from is zero.
    """

    def __init__(self, algebra: GradedAlgebra, components: Dict[int, fplin.Subspace], certified_through: int,
                 full_from: Optional[int] = None, zero_from: Optional[int] = None, name: str = "I"):
        self.algebra = algebra
        self.prime = algebra.prime
        self.name = name
        self.certified_through = min(certified_through, algebra.top)
        if algebra.finite:
            zero_from = algebra.top + 1 if zero_from is None else min(zero_from, algebra.top + 1)
        self.full_from = full_from
        self.zero_from = zero_from
        self.components = {}
        for d in range(0, self.certified_through + 1):
            sub = components.get(d)
            if sub is None:
                if full_from is not None and d >= full_from:
                    sub = fplin.Subspace.full(self.prime, algebra.dim(d))
                else:
                    sub = fplin.Subspace.zero(self.prime, algebra.dim(d))
            self.components[d] = sub

    def component(self, d: int) -> Optional[fplin.Subspace]:
        """Degree-d component, or None when it is unknown."""
        if d < 0:
            return fplin.Subspace.zero(self.prime, 0)
        if d <= self.certified_through:
            return self.components[d]
        if self.zero_from is not None and d >= self.zero_from:
            return fplin.Subspace.zero(self.prime, self.algebra.dim(d) if self.algebra.knows(d) else 0)
        if self.full_from is not None and d >= self.full_from and self.algebra.knows(d):
            return fplin.Subspace.full(self.prime, self.algebra.dim(d))
        return None

    def dims(self) -> Dict[int, int]:
        return {d: s.dim for d, s in self.components.items()}

    def is_proper(self) -> bool:
        return self.components[0].dim == 0

    def is_zero(self) -> Truth:
        if any(s.dim for s in self.components.values()):
            return Truth.FALSE
        if self.zero_from is not None and self.zero_from <= self.certified_through + 1:
            return Truth.TRUE
        if self.full_from is not None:
            return Truth.FALSE
        return Truth.UNKNOWN

    def lowest_nonzero(self) -> Optional[int]:
        for d in range(0, self.certified_through + 1):
            if self.components[d].dim:
                return d
        return self.full_from

    def closure_defect(self) -> Optional[Tuple[int, int]]:
        """First (e, d) with A^e * I^d not inside I^(d+e) on the recorded range."""
        for d in range(0, self.certified_through + 1):
            comp = self.components[d]
            if comp.dim == 0:
                continue
            for e in range(1, self.certified_through - d + 1):
                table = self.algebra.table(e, d)
                target = self.components[d + e]
                products = np.mod(np.einsum("ajk,ij->aik", table, comp.basis), self.prime)
                for row in products.reshape(-1, table.shape[2]):
                    if row not in target:
                        return (e, d)
        return None

    def is_left_ideal(self) -> bool:
        return self.closure_defect() is None

    def contains(self, other: "HomogeneousLeftIdeal") -> Truth:
        """
        Whether self contains other.

        Compared on the common recorded range; beyond it the answer is decided by
        the known tails, and otherwise counts as TRUE relative to the window when
        other has recorded content, UNKNOWN when it has none.
        """
        _check_same(self, other)
        c = min(self.certified_through, other.certified_through)
        for d in range(0, c + 1):
            if not self.components[d].contains_subspace(other.components[d]):
                return Truth.FALSE
        if other.zero_from is not None and other.zero_from <= c + 1:
            return Truth.TRUE
        if self.full_from is not None and self.full_from <= c + 1:
            return Truth.TRUE
        if any(other.components[d].dim for d in range(0, c + 1)):
            return Truth.TRUE
        return Truth.UNKNOWN

    def intersection(self, other: "HomogeneousLeftIdeal", name: Optional[str] = None) -> "HomogeneousLeftIdeal":
        _check_same(self, other)
        c = min(self.certified_through, other.certified_through)
        comps = {d: self.components[d].intersection(other.components[d]) for d in range(0, c + 1)}
        full = max(self.full_from, other.full_from) if self.full_from is not None and other.full_from is not None else None
        zeros = [z for z in (self.zero_from, other.zero_from) if z is not None]
        return HomogeneousLeftIdeal(self.algebra, comps, c, full, min(zeros) if zeros else None,
                                    name=name or f"{self.name}∩{other.name}")

    def _tail(self) -> Tuple:
        """What the ideal is beyond the recorded range; full and zero tails starting inside it are normalized."""
        edge = self.certified_through + 1
        if self.zero_from is not None and self.zero_from <= edge:
            return ("zero",)
        if self.full_from is not None and self.full_from <= edge:
            return ("full",)
        return (self.full_from, self.zero_from)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomogeneousLeftIdeal):
            return NotImplemented
        if not same_algebra(self.algebra, other.algebra) or self.certified_through != other.certified_through:
            return False
        return (self._tail() == other._tail()
                and all(self.components[d] == other.components[d] for d in self.components))

    def __hash__(self):
        return hash((self.algebra.key, self.certified_through, self._tail(),
                     tuple(self.components[d] for d in sorted(self.components))))

    def basis_rows(self) -> List[Tuple[int, str]]:
        rows = []
        for d, comp in self.components.items():
            for v in comp.basis:
                rows.append((d, self.algebra.describe(d, v)))
        return rows

    def __repr__(self):
        return f"HomogeneousLeftIdeal({self.name}, dims={self.dims()}, full_from={self.full_from})"


def _check_same(a: HomogeneousLeftIdeal, b: HomogeneousLeftIdeal):
    if a.prime != b.prime:
        raise PrimeMismatchError(f"ideals over F_{a.prime} and F_{b.prime}")
    if not same_algebra(a.algebra, b.algebra):
        raise StructureError(f"{a.name} and {b.name} live in different algebras")


def zero_ideal(algebra: GradedAlgebra) -> HomogeneousLeftIdeal:
    return HomogeneousLeftIdeal(algebra, {}, algebra.top, zero_from=0, name="(0)")


def grad_ideal(algebra: GradedAlgebra, j: int) -> HomogeneousLeftIdeal:
    """I_j: everything of degree >= j."""
    if j < 1:
        raise ValueError(f"grad ideals are indexed from 1, got {j}")
    return HomogeneousLeftIdeal(algebra, {}, algebra.top, full_from=j, name=f"I_{j}")


def ideal_generated(algebra: GradedAlgebra, elements: Iterable[HomogeneousElement], name: str = "I") -> HomogeneousLeftIdeal:
    """The left ideal A * elements, recorded through the algebra's top degree."""
    gens: Dict[int, List[np.ndarray]] = {}
    for x in elements:
        if x.degree < 1:
            raise StructureError("a generator of degree 0 would make the ideal improper")
        gens.setdefault(x.degree, []).append(x.array())
    comps = {}
    for d in range(0, algebra.top + 1):
        vectors = []
        for e, vs in gens.items():
            if e > d:
                continue
            left = algebra.table(d - e, e)
            for v in vs:
                vectors.extend(np.mod(np.einsum("bjk,j->bk", left, v), algebra.prime))
        comps[d] = fplin.Subspace.span(algebra.prime, algebra.dim(d), vectors)
    return HomogeneousLeftIdeal(algebra, comps, algebra.top, name=name)


def ann_left(m: GradedModule, x: HomogeneousElement, name: Optional[str] = None) -> HomogeneousLeftIdeal:
    """
    Left annihilator {a : a x = 0} of a homogeneous element.

    Args:
        m: module containing x
        x: nonzero homogeneous element
        name: label for reports

    Returns:
        HomogeneousLeftIdeal certified as far as the window shows the action on x
    """
    if x.is_zero():
        raise ValueError("the annihilator of zero is the whole algebra, not a proper ideal")
    algebra = m.algebra
    t = x.degree
    vec = x.array()
    bounded = m.bounded_above_at is not None
    visible = (m.bounded_above_at if bounded else m.window.hi) - t
    comps = {0: fplin.Subspace.zero(algebra.prime, 1)}
    certified = 0
    for e in range(1, algebra.top + 1):
        if e > visible:
            if bounded:
                comps[e] = fplin.Subspace.full(algebra.prime, algebra.dim(e))
                certified = e
                continue
            break
        try:
            tensor = m.action_tensor(e, t)
        except WindowError:
            break
        # column a of images is a * x
        images = np.mod(np.tensordot(tensor, vec, axes=(2, 0)), algebra.prime)
        comps[e] = fplin.kernel_basis(fplin.FpMatrix(algebra.prime, images.T.reshape(-1, algebra.dim(e))))
        certified = e
    full_from = visible + 1 if bounded else None
    label = name or f"ann({m.describe(t, vec)})"
    return HomogeneousLeftIdeal(algebra, comps, certified, full_from=full_from, name=label)


# ---------------------------------------------------------------------------
# ideal sets
# ---------------------------------------------------------------------------

class IdealSet:
    """An explicit finite ideal set, or one of the lazy families grad and dist(Theta)."""

    EXPLICIT = "explicit"
    GRAD = "grad"
    DIST = "dist"

    def __init__(self, kind: str, algebra: GradedAlgebra, members: Optional[List[HomogeneousLeftIdeal]] = None,
                 horizon: Optional[int] = None, theta: Optional[GradedModule] = None, name: Optional[str] = None):
        self.kind = kind
        self.algebra = algebra
        self.members_list = list(members or [])
        self.horizon = horizon
        self.theta = theta
        self.name = name or kind
        self._chain: Optional[List[HomogeneousLeftIdeal]] = None
        self._members: Optional[List[HomogeneousLeftIdeal]] = None
        for member in self.members_list:
            if not same_algebra(member.algebra, algebra):
                raise StructureError(f"{member.name} does not live in {algebra.name}")
            if not member.is_proper():
                raise StructureError(f"{member.name} contains 1; ideal sets hold proper ideals only")

    @classmethod
    def explicit(cls, algebra: GradedAlgebra, members: Sequence[HomogeneousLeftIdeal], name: str = "S") -> "IdealSet":
        if not members:
            raise ValueError("an explicit ideal set needs at least one member")
        return cls(cls.EXPLICIT, algebra, list(members), name=name)

    @classmethod
    def grad(cls, algebra: GradedAlgebra, horizon: Optional[int] = None) -> "IdealSet":
        if horizon is None:
            horizon = max(config.IDEAL_HORIZON, algebra.top + 1)
        return cls(cls.GRAD, algebra, horizon=horizon, name="grad")

    @classmethod
    def dist(cls, theta: GradedModule) -> "IdealSet":
        return cls(cls.DIST, theta.algebra, theta=theta, name=f"dist({theta.name})")

    @classmethod
    def trivial(cls, algebra: GradedAlgebra) -> "IdealSet":
        """The ideal set {(0)}."""
        return cls.explicit(algebra, [zero_ideal(algebra)], name="{(0)}")

    def members(self) -> List[HomogeneousLeftIdeal]:
        """The enumerated members (lazy families are cut at their horizon)."""
        if self._members is None:
            if self.kind == self.EXPLICIT:
                self._members = list(self.members_list)
            elif self.kind == self.GRAD:
                self._members = [grad_ideal(self.algebra, j) for j in range(1, self.horizon + 1)]
            else:
                self._members = [ann_left(self.theta, x) for x in self.theta.basis_elements()]
        return self._members

    def chain(self) -> List[HomogeneousLeftIdeal]:
        """A descending cofinal chain of members, without repeats."""
        if self._chain is not None:
            return self._chain
        chain: List[HomogeneousLeftIdeal] = []
        if self.kind == self.EXPLICIT:
            current = None
            for member in self.members_list:
                current = member if current is None else current.intersection(member)
                if not chain or chain[-1] != current:
                    chain.append(current)
        elif self.kind == self.GRAD:
            for j in range(1, self.horizon + 1):
                ideal = grad_ideal(self.algebra, j)
                if chain and chain[-1].is_zero() == Truth.TRUE:
                    break
                if not chain or chain[-1] != ideal:
                    chain.append(ideal)
                if self.algebra.finite and j > self.algebra.top:
                    break
        else:
            top = self.theta.top
            elements = list(self.theta.basis_elements())
            current = None
            for h in range(0, top - self.theta.window.lo + 1):
                layer = [x for x in elements if x.degree == top - h]
                for x in layer:
                    ann = ann_left(self.theta, x)
                    current = ann if current is None else current.intersection(ann)
                if current is not None and (not chain or chain[-1] != current):
                    current.name = f"D_{h}"
                    chain.append(current)
            if not chain:
                chain.append(zero_ideal(self.algebra))
        self._chain = chain
        return chain

    def is_complete(self) -> bool:
        """Whether the chain reaches the family's least member."""
        if self.kind == self.EXPLICIT:
            return True
        if self.kind == self.GRAD:
            return self.chain()[-1].is_zero() == Truth.TRUE
        return self.theta.bounded_below_at is not None and all(
            self.theta.knows_action(e, t)
            for t in self.theta.window.degrees() for e in range(1, self.theta.top - t + 1)
            if self.algebra.knows(e))

    def is_filtered(self) -> Tuple[Truth, Optional[str]]:
        """Whether every pair of members contains a common member; returns a failing pair when not."""
        if self.kind != self.EXPLICIT:
            return Truth.TRUE, None
        members = self.members()
        verdict = Truth.TRUE
        for a, b in itertools.combinations(members, 2):
            both = a.intersection(b)
            answer = Truth.any(both.contains(k) for k in members)
            if answer == Truth.FALSE:
                return Truth.FALSE, f"{a.name}, {b.name}"
            if answer == Truth.UNKNOWN:
                verdict = Truth.UNKNOWN
        return verdict, None

    def __repr__(self):
        return f"IdealSet({self.name}, kind={self.kind})"


def filtered_closure(s: IdealSet) -> IdealSet:
    """All finite intersections of members of an explicit ideal set."""
    if s.kind != IdealSet.EXPLICIT:
        return s
    closed: List[HomogeneousLeftIdeal] = []
    for member in s.members():
        if member not in closed:
            closed.append(member)
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(closed), 2):
            both = a.intersection(b, name=f"{a.name}∩{b.name}")
            if both not in closed:
                closed.append(both)
                changed = True
    return IdealSet.explicit(s.algebra, closed, name=f"closure({s.name})")


@dataclass
class PreorderResult:
    truth: Truth
    witness: Dict[str, str] = field(default_factory=dict)
    failure: Optional[str] = None


def preorder_leq(s: IdealSet, t: IdealSet) -> PreorderResult:
    """s <= t: every member of s contains some member of t."""
    if not same_algebra(s.algebra, t.algebra):
        raise StructureError(f"{s.name} and {t.name} live in different algebras")
    verdict = Truth.TRUE
    witness: Dict[str, str] = {}
    candidates = t.members()
    for member in s.members():
        found = Truth.FALSE
        for candidate in candidates:
            answer = member.contains(candidate)
            if answer == Truth.TRUE:
                witness[member.name] = candidate.name
                found = Truth.TRUE
                break
            if answer == Truth.UNKNOWN:
                found = Truth.UNKNOWN
        if found == Truth.FALSE:
            return PreorderResult(Truth.FALSE, witness, failure=member.name)
        if found == Truth.UNKNOWN:
            verdict = Truth.UNKNOWN
    return PreorderResult(verdict, witness)


def equivalent(s: IdealSet, t: IdealSet) -> Truth:
    return Truth.all([preorder_leq(s, t).truth, preorder_leq(t, s).truth])


# ---------------------------------------------------------------------------
# torsion functors
# ---------------------------------------------------------------------------

@dataclass
class TorsionResult:
    """A graded subspace of a module with a per-degree certification flag."""
    module: GradedModule
    subspace: GradedSubspace
    certified: Dict[int, bool]
    label: str = "h0"

    def dims(self) -> Dict[int, int]:
        return self.subspace.dims()

    def is_certified(self) -> bool:
        return all(self.certified.values())

    def as_submodule(self) -> GradedModule:
        return submodule(self.module, self.subspace, name=f"{self.label}({self.module.name})")

    def rows(self) -> List[Tuple[int, int, bool, str]]:
        out = []
        for t in self.module.window.degrees():
            comp = self.subspace[t]
            for v in comp.basis:
                out.append((t, comp.dim, self.certified[t], self.module.describe(t, v)))
            if comp.dim == 0:
                out.append((t, 0, self.certified[t], ""))
        return out


def _kill_set(m: GradedModule, ideal: HomogeneousLeftIdeal, t: int) -> Tuple[fplin.Subspace, bool]:
    """{x in M^t : ideal * x = 0} and whether every needed constraint was visible."""
    n = m.dim(t)
    p = m.prime
    if n == 0:
        return fplin.Subspace.zero(p, 0), True
    if ideal.components[0].dim:
        return fplin.Subspace.zero(p, n), True
    bounded = m.bounded_above_at is not None
    visible = (m.bounded_above_at if bounded else m.window.hi) - t
    certified = True
    constraints = []
    for e in range(1, visible + 1):
        comp = ideal.component(e)
        if comp is None:
            certified = False
            continue
        if comp.dim == 0 or m.dim(t + e) == 0:
            continue
        try:
            tensor = m.action_tensor(e, t)
        except WindowError:
            certified = False
            continue
        block = np.einsum("ia,avx->ivx", comp.basis, tensor).reshape(-1, n)
        constraints.append(np.mod(block, p))
    if not bounded:
        # degrees the window cannot show still constrain x unless the ideal is known to vanish there
        if ideal.zero_from is None or ideal.zero_from > visible + 1:
            certified = False
    if not constraints:
        return fplin.Subspace.full(p, n), certified
    return fplin.kernel_basis(fplin.FpMatrix(p, np.vstack(constraints))), certified


def _member_for_degree(chain: List[HomogeneousLeftIdeal], m: GradedModule, t: int) -> HomogeneousLeftIdeal:
    """The deepest chain member whose content the window can see from degree t."""
    if m.bounded_above_at is not None:
        return chain[-1]
    visible = m.window.hi - t
    chosen = chain[0]
    for member in chain:
        low = member.lowest_nonzero()
        if low is None or low <= visible:
            chosen = member
    return chosen


def h0(s: IdealSet, m: GradedModule) -> TorsionResult:
    """
    Elements killed by some member of s, degree by degree.

    Non-filtered explicit sets are replaced by their filtered closure first.
    """
    if not same_algebra(s.algebra, m.algebra):
        raise StructureError(f"{s.name} and {m.name} use different algebras")
    if s.kind == IdealSet.EXPLICIT:
        filtered, _ = s.is_filtered()
        if filtered != Truth.TRUE:
            logger.warning(f"{s.name} is not filtered; using its filtered closure")
    chain = s.chain()
    complete = s.is_complete()
    comps: Dict[int, fplin.Subspace] = {}
    certified: Dict[int, bool] = {}
    for t in m.window.degrees():
        member = _member_for_degree(chain, m, t)
        kill, visible_ok = _kill_set(m, member, t)
        saturated = kill.dim == m.dim(t)
        comps[t] = kill
        certified[t] = visible_ok and (saturated or (member is chain[-1] and complete))
        if not certified[t]:
            logger.debug(f"h0 of {m.name} in degree {t} is only certified on the window")
    return TorsionResult(m, GradedSubspace(m, comps), certified, label="h0")


def H0(s: IdealSet, m: GradedModule) -> TorsionResult:
    """The submodule generated by h0(s, m)."""
    small = h0(s, m)
    gens = [HomogeneousElement.of(t, v) for t in m.window.degrees() for v in small.subspace[t].basis]
    sub = generated_subspace(m, gens)
    certified = {}
    running = True
    for t in m.window.degrees():
        running = running and small.certified[t]
        certified[t] = running or sub[t].dim == m.dim(t)
    return TorsionResult(m, sub, certified, label="H0")


def trace(m: GradedModule, coalgebra: GradedCoalgebra) -> GradedModule:
    """The largest rational submodule: H0 for the distinguished ideal set of iota(Gamma)."""
    theta = gamma_module(coalgebra)
    return H0(IdealSet.dist(theta), m).as_submodule()


def gamma_module(coalgebra: GradedCoalgebra) -> GradedModule:
    return iota(coalgebra_as_comodule(coalgebra, name="Gamma"))


@dataclass
class RationalityReport:
    verdict: Truth
    annihilator_test: Truth
    torsion_test: Truth
    witness: Optional[HomogeneousElement] = None
    witness_label: Optional[str] = None
    caveat: Optional[str] = None
    discrepancy: bool = False


def is_rational(m: GradedModule, coalgebra: GradedCoalgebra) -> RationalityReport:
    """
    Decide rationality twice: once through annihilation degrees of basis elements,
    once by comparing H0(dist, m) with m.
    """
    if not same_algebra(m.algebra, coalgebra.dual()):
        raise StructureError(f"{m.name} is not a module over the dual of {coalgebra.name}")
    witness = None
    answers = []
    for x in m.basis_elements():
        result = annihilation_degree(m, x)
        answers.append(result.truth)
        if result.truth == Truth.FALSE and witness is None:
            witness = x
    test_a = Truth.all(answers)

    torsion = H0(IdealSet.dist(gamma_module(coalgebra)), m)
    missing = [t for t in m.window.degrees() if torsion.subspace[t].dim != m.dim(t)]
    if missing:
        test_b = Truth.FALSE
        if witness is None:
            t = missing[0]
            outside = torsion.subspace[t].complement_basis(fplin.Subspace.full(m.prime, m.dim(t)))
            witness = HomogeneousElement.of(t, outside[0])
    elif torsion.is_certified():
        test_b = Truth.TRUE
    else:
        test_b = Truth.TRUE if m.bounded_above_at is not None else Truth.UNKNOWN

    definite = {v for v in (test_a, test_b) if v != Truth.UNKNOWN}
    discrepancy = len(definite) > 1
    if discrepancy:
        logger.error(f"Rationality tests disagree on {m.name}: annihilators say {test_a.value}, H0 says {test_b.value}")
        verdict = Truth.UNKNOWN
    elif definite:
        verdict = definite.pop()
    else:
        verdict = Truth.UNKNOWN
    caveat = None
    if not (coalgebra.mitchell or coalgebra.finite):
        caveat = "grad and dist may differ for this coalgebra; the annihilator test is only sufficient"
    label = m.describe(witness.degree, witness.array()) if witness is not None else None
    return RationalityReport(verdict, test_a, test_b, witness, label, caveat, discrepancy)


def theta_rationality(m: GradedModule, theta: GradedModule) -> Tuple[Truth, Optional[HomogeneousElement]]:
    """Whether every annihilator of a basis element of m contains some member of dist(theta)."""
    chain = IdealSet.dist(theta).chain()
    verdict = Truth.TRUE
    for x in m.basis_elements():
        ann = ann_left(m, x)
        answer = Truth.any(ann.contains(d) for d in chain)
        if answer == Truth.FALSE:
            return Truth.FALSE, x
        if answer == Truth.UNKNOWN:
            verdict = Truth.UNKNOWN
    return verdict, None


@dataclass
class ClosednessReport:
    closed: bool
    per_module: Dict[str, bool]
    witness: Optional[str] = None


def is_closed_ideal_set(s: IdealSet, corpus: Sequence[GradedModule]) -> ClosednessReport:
    """Closed on the corpus: h0 is already a submodule (h0 == H0) for every module."""
    per_module = {}
    witness = None
    for m in corpus:
        equal = h0(s, m).subspace == H0(s, m).subspace
        per_module[m.name] = equal
        if not equal and witness is None:
            witness = m.name
    return ClosednessReport(witness is None, per_module, witness)


def closedness_transfers(s: IdealSet, t: IdealSet, corpus: Sequence[GradedModule]) -> Tuple[Truth, bool]:
    """Equivalence of s and t, and whether their closedness verdicts agree on the corpus."""
    equiv = equivalent(s, t)
    agree = is_closed_ideal_set(s, corpus).closed == is_closed_ideal_set(t, corpus).closed
    return equiv, agree
