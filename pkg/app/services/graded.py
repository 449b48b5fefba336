"""
Graded vector spaces, connected graded algebras, dual coalgebras, and graded
modules and comodules over a finite degree window.

Gradings are cohomological: algebras live in degrees >= 0, coalgebras in
degrees <= 0, and an algebra element of degree e sends degree t to degree t + e.
Data outside a window is unknown unless a boundedness flag says it is zero.

Structure constants are numpy arrays:
    GradedAlgebra.mult[(m, n)][a, b, c]       coefficient of basis c of A^(m+n) in a*b
    GradedCoalgebra.delta[(d1, d2)][c, a, b]  coefficient of a (x) b in Delta(c)
    GradedModule.action[(e, t)][a, v, x]      coefficient of v in M^(t+e) in a*x
    GradedComodule.coaction[(t, s)][v, g, x]  coefficient of v (x) g in psi(x), v in M^(t-s), g in Gamma^s
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from app.services import fplin
from app.services.errors import PrimeMismatchError, StructureError, WindowError, NotRationalError

logger = logging.getLogger(__name__)


class Truth(str, Enum):
    """Three-valued answer for questions that truncation can leave open."""
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, value: bool) -> "Truth":
        return cls.TRUE if value else cls.FALSE

    @classmethod
    def all(cls, values: Iterable["Truth"]) -> "Truth":
        result = cls.TRUE
        for v in values:
            if v == cls.FALSE:
                return cls.FALSE
            if v == cls.UNKNOWN:
                result = cls.UNKNOWN
        return result

    @classmethod
    def any(cls, values: Iterable["Truth"]) -> "Truth":
        result = cls.FALSE
        for v in values:
            if v == cls.TRUE:
                return cls.TRUE
            if v == cls.UNKNOWN:
                result = cls.UNKNOWN
        return result


@dataclass(frozen=True)
class DegreeWindow:
    """Closed integer interval [lo, hi] of degrees on which data is recorded."""
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise WindowError(f"empty window [{self.lo}, {self.hi}]")

    def __contains__(self, degree: int) -> bool:
        return self.lo <= degree <= self.hi

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def shift(self, n: int) -> "DegreeWindow":
        return DegreeWindow(self.lo + n, self.hi + n)

    @property
    def span(self) -> int:
        return self.hi - self.lo

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class HomogeneousElement:
    """A homogeneous element: a degree plus a coordinate vector in that degree's basis."""
    degree: int
    vector: Tuple[int, ...]

    @classmethod
    def of(cls, degree: int, vector) -> "HomogeneousElement":
        return cls(degree, tuple(int(v) for v in np.asarray(vector).ravel()))

    def array(self) -> np.ndarray:
        return np.asarray(self.vector, dtype=np.int64)

    def is_zero(self) -> bool:
        return not any(self.vector)


def _zero_tensor(*shape) -> np.ndarray:
    return np.zeros(shape, dtype=np.int64)


def _describe(labels: Sequence[str], vector, prime: int) -> str:
    terms = []
    for i, c in enumerate(np.asarray(vector).ravel()):
        c = int(c) % prime
        if c == 0:
            continue
        terms.append(labels[i] if c == 1 else f"{c}*{labels[i]}")
    return " + ".join(terms) if terms else "0"


class GradedVectorSpace:
    """Degreewise finite vector space with basis labels on a window."""

    def __init__(self, prime: int, window: DegreeWindow, labels: Mapping[int, Sequence[str]],
                 bounded_below_at: Optional[int] = None, bounded_above_at: Optional[int] = None):
        self.prime = prime
        self.window = window
        self.labels = {t: list(labels.get(t, [])) for t in window.degrees()}
        self.bounded_below_at = bounded_below_at
        self.bounded_above_at = bounded_above_at
        _check_bounds(window, bounded_below_at, bounded_above_at, self.labels)

    def dim(self, t: int) -> int:
        return _dim_with_bounds(t, self.window, self.labels, self.bounded_below_at, self.bounded_above_at)

    def dims(self) -> Dict[int, int]:
        return {t: len(self.labels[t]) for t in self.window.degrees()}


def _check_bounds(window: DegreeWindow, below: Optional[int], above: Optional[int], labels: Mapping[int, list]):
    if above is not None:
        if above > window.hi:
            raise WindowError(f"bounded above at {above} but the window stops at {window.hi}")
        if any(labels.get(t) for t in window.degrees() if t > above):
            raise StructureError(f"nonzero degrees above the declared bound {above}")
    if below is not None:
        if below < window.lo:
            raise WindowError(f"bounded below at {below} but the window starts at {window.lo}")
        if any(labels.get(t) for t in window.degrees() if t < below):
            raise StructureError(f"nonzero degrees below the declared bound {below}")


def _dim_with_bounds(t: int, window: DegreeWindow, labels, below: Optional[int], above: Optional[int]) -> int:
    if t in window:
        return len(labels[t])
    if above is not None and t > above:
        return 0
    if below is not None and t < below:
        return 0
    raise WindowError(f"degree {t} lies outside the window {window} and no bound covers it")


class GradedAlgebra:
    """
    Connected, finite-type graded algebra over F_p recorded through degree `top`.

    A finite algebra is zero above `top`; otherwise degrees above `top` are unknown.
    """

    def __init__(self, prime: int, name: str, labels: Mapping[int, Sequence[str]],
                 mult: Mapping[Tuple[int, int], np.ndarray], generators: Sequence[Tuple[int, int]],
                 top: int, finite: bool = False):
        self.prime = prime
        self.name = name
        self.top = top
        self.finite = finite
        self.labels = {d: list(labels.get(d, [])) for d in range(0, top + 1)}
        if len(self.labels[0]) != 1:
            raise StructureError(f"{name}: a connected algebra is one-dimensional in degree 0")
        self.mult = {k: np.mod(np.asarray(v, dtype=np.int64), prime) for k, v in mult.items()}
        self.generators = list(generators)
        # monomial exponents behind each basis label, when the basis is a monomial basis
        self.monomials: Optional[Dict[int, list]] = None
        self._dual = None

    @property
    def key(self) -> Tuple[str, int, int]:
        return (self.name, self.prime, self.top)

    @property
    def window(self) -> DegreeWindow:
        return DegreeWindow(0, self.top)

    def dim(self, d: int) -> int:
        if d < 0:
            return 0
        if d <= self.top:
            return len(self.labels[d])
        if self.finite:
            return 0
        raise WindowError(f"{self.name} is only known through degree {self.top}, asked for {d}")

    def knows(self, d: int) -> bool:
        return d <= self.top or self.finite

    def total_dim(self) -> int:
        return sum(len(v) for v in self.labels.values())

    def basis(self) -> Iterable[Tuple[int, int, str]]:
        for d in range(self.top + 1):
            for i, label in enumerate(self.labels[d]):
                yield d, i, label

    def basis_vector(self, d: int, i: int) -> np.ndarray:
        v = np.zeros(self.dim(d), dtype=np.int64)
        v[i] = 1
        return v

    def unit(self) -> np.ndarray:
        return np.ones(1, dtype=np.int64)

    def index_of(self, label: str) -> Tuple[int, int]:
        for d, i, l in self.basis():
            if l == label:
                return d, i
        raise KeyError(f"{self.name} has no basis element {label!r}")

    def element(self, label: str) -> HomogeneousElement:
        d, i = self.index_of(label)
        return HomogeneousElement.of(d, self.basis_vector(d, i))

    def table(self, m: int, n: int) -> np.ndarray:
        """Multiplication tensor A^m x A^n -> A^(m+n)."""
        if m < 0 or n < 0:
            raise ValueError("negative algebra degree")
        if (m, n) in self.mult:
            return self.mult[(m, n)]
        dm, dn = self.dim(m), self.dim(n)
        if dm == 0 or dn == 0 or self.dim(m + n) == 0:
            return _zero_tensor(dm, dn, self.dim(m + n))
        raise WindowError(f"{self.name}: product of degrees {m} and {n} is not recorded")

    def multiply(self, m: int, a, n: int, b) -> np.ndarray:
        t = self.table(m, n)
        return np.mod(np.einsum("i,j,ijk->k", np.asarray(a), np.asarray(b), t), self.prime)

    def left_matrix(self, e: int, a, d: int) -> np.ndarray:
        """Matrix of x -> a*x from A^d to A^(d+e)."""
        t = self.table(e, d)
        return np.mod(np.einsum("i,ijk->kj", np.asarray(a), t), self.prime)

    def describe(self, d: int, vector) -> str:
        return _describe(self.labels[d] if d <= self.top else [], vector, self.prime)

    def check_associativity(self) -> List[Tuple[int, int, int]]:
        """Return the degree triples (a, b, c) where (xy)z != x(yz) on the recorded range."""
        failures = []
        for a in range(1, self.top + 1):
            for b in range(1, self.top + 1 - a):
                for c in range(1, self.top + 1 - a - b):
                    ab = self.table(a, b)
                    lhs = np.einsum("ijk,klm->ijlm", ab, self.table(a + b, c))
                    rhs = np.einsum("jlk,ikm->ijlm", self.table(b, c), self.table(a, b + c))
                    if np.mod(lhs - rhs, self.prime).any():
                        failures.append((a, b, c))
        return failures

    def check_unit(self) -> bool:
        for d in range(self.top + 1):
            n = self.dim(d)
            left = self.table(0, d)[0]
            right = self.table(d, 0)[:, 0, :]
            if not (np.array_equal(left, np.eye(n, dtype=np.int64)) and np.array_equal(right, np.eye(n, dtype=np.int64))):
                return False
        return True

    def dual(self) -> "GradedCoalgebra":
        if self._dual is None:
            self._dual = dualize_algebra(self)
        return self._dual

    def __repr__(self):
        return f"GradedAlgebra({self.name}, top={self.top}, finite={self.finite})"


def same_algebra(a: GradedAlgebra, b: GradedAlgebra) -> bool:
    return a is b or a.key == b.key


class GradedCoalgebra:
    """
    Graded coalgebra concentrated in degrees [-depth, 0], dual to a connected algebra.

    `mitchell` marks coalgebras for which grad and dist are known to be equivalent.
    """

    def __init__(self, prime: int, name: str, labels: Mapping[int, Sequence[str]],
                 delta: Mapping[Tuple[int, int], np.ndarray], depth: int,
                 finite: bool = False, mitchell: bool = False):
        self.prime = prime
        self.name = name
        self.depth = depth
        self.finite = finite
        self.mitchell = mitchell
        self.labels = {d: list(labels.get(d, [])) for d in range(-depth, 1)}
        if len(self.labels[0]) != 1:
            raise StructureError(f"{name}: coalgebra must be one-dimensional in degree 0")
        self.delta = {k: np.mod(np.asarray(v, dtype=np.int64), prime) for k, v in delta.items()}
        self._dual = None

    @property
    def key(self) -> Tuple[str, int, int]:
        return (self.name, self.prime, self.depth)

    @property
    def window(self) -> DegreeWindow:
        return DegreeWindow(-self.depth, 0)

    def dim(self, d: int) -> int:
        if d > 0:
            return 0
        if d >= -self.depth:
            return len(self.labels[d])
        if self.finite:
            return 0
        raise WindowError(f"{self.name} is only known down to degree {-self.depth}, asked for {d}")

    def knows(self, d: int) -> bool:
        return d >= -self.depth or self.finite

    def table(self, d1: int, d2: int) -> np.ndarray:
        """Comultiplication tensor Gamma^(d1+d2) -> Gamma^d1 (x) Gamma^d2."""
        if (d1, d2) in self.delta:
            return self.delta[(d1, d2)]
        n, a, b = self.dim(d1 + d2), self.dim(d1), self.dim(d2)
        if n == 0 or a == 0 or b == 0:
            return _zero_tensor(n, a, b)
        raise WindowError(f"{self.name}: coproduct component ({d1}, {d2}) is not recorded")

    def check_coassociativity(self) -> List[Tuple[int, int, int]]:
        failures = []
        for a in range(-self.depth, 0):
            for b in range(-self.depth - a, 0):
                for c in range(-self.depth - a - b, 0):
                    if a + b + c < -self.depth:
                        continue
                    lhs = np.einsum("nkc,kab->nabc", self.table(a + b, c), self.table(a, b))
                    rhs = np.einsum("nak,kbc->nabc", self.table(a, b + c), self.table(b, c))
                    if np.mod(lhs - rhs, self.prime).any():
                        failures.append((a, b, c))
        return failures

    def check_counit(self) -> bool:
        for d in range(-self.depth, 1):
            n = self.dim(d)
            left = self.table(0, d)[:, 0, :]
            right = self.table(d, 0)[:, :, 0]
            if not (np.array_equal(left, np.eye(n, dtype=np.int64)) and np.array_equal(right, np.eye(n, dtype=np.int64))):
                return False
        return True

    def dual(self) -> GradedAlgebra:
        if self._dual is None:
            self._dual = dualize_coalgebra(self)
        return self._dual

    def describe(self, d: int, vector) -> str:
        return _describe(self.labels[d], vector, self.prime)

    def __repr__(self):
        return f"GradedCoalgebra({self.name}, depth={self.depth}, finite={self.finite})"


def dualize_algebra(a: GradedAlgebra, labels: Optional[Mapping[int, Sequence[str]]] = None,
                    mitchell: bool = False) -> GradedCoalgebra:
    """
    Dual coalgebra of a finite-type algebra on the mirrored window [-top, 0].

    Delta is the transpose of the multiplication: <xy, g> = sum <x, g'><y, g''>.
    Dual basis labels default to the algebra labels with a trailing '*'.
    """
    if labels is None:
        labels = {-d: [f"{l}*" if d else "1" for l in a.labels[d]] for d in range(a.top + 1)}
    delta = {}
    for (m, n), t in a.mult.items():
        delta[(-m, -n)] = np.transpose(t, (2, 0, 1))
    c = GradedCoalgebra(a.prime, f"{a.name}_*", labels, delta, a.top, finite=a.finite, mitchell=mitchell or a.finite)
    c._dual = a
    logger.debug(f"Dualized {a.name} to a coalgebra of depth {a.top}")
    return c


def dualize_coalgebra(c: GradedCoalgebra) -> GradedAlgebra:
    """Dual algebra of a finite-type coalgebra; inverse of dualize_algebra on structure constants."""
    name = c.name[:-2] if c.name.endswith("_*") else f"{c.name}^*"
    labels = {-d: [l[:-1] if l.endswith("*") else (l if d == 0 else f"{l}^") for l in c.labels[d]]
              for d in range(-c.depth, 1)}
    mult = {}
    for (d1, d2), t in c.delta.items():
        mult[(-d1, -d2)] = np.transpose(t, (1, 2, 0))
    generators = _indecomposable_generators(c.prime, labels, mult, c.depth)
    a = GradedAlgebra(c.prime, name, labels, mult, generators, c.depth, finite=c.finite)
    a._dual = c
    return a


def _indecomposable_generators(prime: int, labels, mult, top: int) -> List[Tuple[int, int]]:
    """Basis elements completing the decomposables in each positive degree."""
    generators = []
    for e in range(1, top + 1):
        n = len(labels[e])
        if n == 0:
            continue
        products = []
        for m in range(1, e):
            t = mult.get((m, e - m))
            if t is not None and t.size:
                products.extend(t.reshape(-1, n))
        decomposables = fplin.Subspace.span(prime, n, products)
        full = fplin.Subspace.full(prime, n)
        for v in decomposables.complement_basis(full):
            generators.append((e, int(np.nonzero(v)[0][0])))
    return generators


def polynomial_algebra(prime: int, generators: Mapping[str, int], top: int,
                       nilpotence: Optional[Mapping[str, int]] = None, name: Optional[str] = None) -> GradedAlgebra:
    """
    Commutative monomial algebra k[x, y, ...]/(x^a, ...) recorded through degree `top`.

    Args:
        prime: field characteristic
        generators: generator name -> positive degree
        top: highest recorded degree
        nilpotence: optional generator name -> exponent n with x^n = 0
        name: algebra name (defaults to a description of the generators)

    Returns:
        GradedAlgebra with monomial basis; finite when every generator is nilpotent
        and `top` reaches the top monomial
    """
    names = list(generators)
    degs = [generators[g] for g in names]
    if any(d <= 0 for d in degs):
        raise ValueError("polynomial generators need positive degrees")
    nil = dict(nilpotence or {})
    bounds = [nil.get(g, top // generators[g] + 1) for g in names]

    monomials: Dict[int, List[Tuple[int, ...]]] = {d: [] for d in range(top + 1)}
    for exps in itertools.product(*[range(b) for b in bounds]):
        d = sum(e * g for e, g in zip(exps, degs))
        if d <= top:
            monomials[d].append(exps)
    for d in monomials:
        monomials[d].sort(reverse=True)

    def label(exps):
        parts = []
        for g, e in zip(names, exps):
            if e == 1:
                parts.append(g)
            elif e > 1:
                parts.append(f"{g}^{e}")
        return "".join(parts) if parts else "1"

    index = {m: (d, i) for d, ms in monomials.items() for i, m in enumerate(ms)}
    mult = {}
    for m in range(top + 1):
        for n in range(top + 1 - m):
            t = _zero_tensor(len(monomials[m]), len(monomials[n]), len(monomials[m + n]))
            for i, u in enumerate(monomials[m]):
                for j, v in enumerate(monomials[n]):
                    w = tuple(a + b for a, b in zip(u, v))
                    if all(e < b for e, b in zip(w, bounds)):
                        t[i, j, index[w][1]] = 1
            mult[(m, n)] = t
    labels = {d: [label(m) for m in monomials[d]] for d in monomials}
    gens = [index[tuple(1 if k == i else 0 for k in range(len(names)))] for i in range(len(names))
            if bounds[i] > 1 and degs[i] <= top]
    max_monomial = sum((b - 1) * g for b, g in zip(bounds, degs))
    finite = len(nil) == len(names) and max_monomial <= top
    if name is None:
        name = "k[" + ",".join(f"{g}" for g in names) + "]"
        if nil:
            name += "/(" + ",".join(f"{g}^{nil[g]}" for g in names if g in nil) + ")"
    algebra = GradedAlgebra(prime, name, labels, mult, gens, top, finite=finite)
    algebra.monomials = monomials
    return algebra


class GradedModule:
    """
    Graded left module over a GradedAlgebra, recorded on a degree window.

    `action[(e, t)]` holds the action of every basis element of A^e (e >= 1) on
    M^t for t and t + e inside the window; the unit acts as the identity.
    """

    def __init__(self, algebra: GradedAlgebra, window: DegreeWindow, labels: Mapping[int, Sequence[str]],
                 action: Mapping[Tuple[int, int], np.ndarray], bounded_below_at: Optional[int] = None,
                 bounded_above_at: Optional[int] = None, name: str = "M"):
        self.algebra = algebra
        self.prime = algebra.prime
        self.window = window
        self.name = name
        self.labels = {t: list(labels.get(t, [])) for t in window.degrees()}
        _check_bounds(window, bounded_below_at, bounded_above_at, self.labels)
        self.bounded_below_at = bounded_below_at
        self.bounded_above_at = bounded_above_at
        self.action: Dict[Tuple[int, int], np.ndarray] = {}
        for (e, t), arr in action.items():
            arr = np.mod(np.asarray(arr, dtype=np.int64), self.prime)
            expected = (algebra.dim(e), self.dim(t + e), self.dim(t))
            if arr.shape != expected:
                raise StructureError(f"{name}: action ({e}, {t}) has shape {arr.shape}, expected {expected}")
            self.action[(e, t)] = arr
        self.inclusion: Optional["ModuleMap"] = None
        self.projection: Optional["ModuleMap"] = None

    def dim(self, t: int) -> int:
        return _dim_with_bounds(t, self.window, self.labels, self.bounded_below_at, self.bounded_above_at)

    def dims(self) -> Dict[int, int]:
        return {t: len(self.labels[t]) for t in self.window.degrees()}

    def total_dim(self) -> int:
        return sum(self.dims().values())

    def is_zero(self) -> bool:
        return self.total_dim() == 0

    @property
    def top(self) -> int:
        """Highest degree with known content: the upper bound if declared, else the window top."""
        return self.bounded_above_at if self.bounded_above_at is not None else self.window.hi

    def nonzero_degrees(self) -> List[int]:
        return [t for t in self.window.degrees() if self.labels[t]]

    def knows_action(self, e: int, t: int) -> bool:
        try:
            self.action_tensor(e, t)
            return True
        except WindowError:
            return False

    def action_tensor(self, e: int, t: int) -> np.ndarray:
        """Action of all of A^e on M^t as an array (dim A^e, dim M^(t+e), dim M^t)."""
        if e == 0:
            n = self.dim(t)
            return np.eye(n, dtype=np.int64).reshape(1, n, n)
        if (e, t) in self.action:
            return self.action[(e, t)]
        source = self.dim(t)
        target = self.dim(t + e)
        if not self.algebra.knows(e):
            if source == 0 or target == 0:
                raise WindowError(f"{self.name}: algebra degree {e} is beyond {self.algebra.name}'s range")
            raise WindowError(f"{self.name}: action of degree {e} on degree {t} is unknown")
        if source == 0 or target == 0 or self.algebra.dim(e) == 0:
            return _zero_tensor(self.algebra.dim(e), target, source)
        raise WindowError(f"{self.name}: action of degree {e} on degree {t} is outside the window {self.window}")

    def action_matrix(self, e: int, a, t: int) -> np.ndarray:
        """Matrix of x -> a*x from M^t to M^(t+e) for an algebra vector a of degree e."""
        tensor = self.action_tensor(e, t)
        return np.mod(np.tensordot(np.asarray(a, dtype=np.int64), tensor, axes=(0, 0)), self.prime)

    def act(self, e: int, a, t: int, x) -> np.ndarray:
        return np.mod(self.action_matrix(e, a, t) @ np.asarray(x, dtype=np.int64), self.prime)

    def act_on(self, a: HomogeneousElement, x: HomogeneousElement) -> HomogeneousElement:
        return HomogeneousElement.of(x.degree + a.degree, self.act(a.degree, a.array(), x.degree, x.array()))

    def stacked_action(self, e: int, t: int) -> np.ndarray:
        """All of A^e acting on M^t stacked into one (dim A^e * dim M^(t+e), dim M^t) matrix."""
        tensor = self.action_tensor(e, t)
        return tensor.reshape(-1, tensor.shape[2])

    def basis_vector(self, t: int, i: int) -> np.ndarray:
        v = np.zeros(self.dim(t), dtype=np.int64)
        v[i] = 1
        return v

    def element(self, label: str) -> HomogeneousElement:
        for t in self.window.degrees():
            if label in self.labels[t]:
                return HomogeneousElement.of(t, self.basis_vector(t, self.labels[t].index(label)))
        raise KeyError(f"{self.name} has no basis element {label!r}")

    def basis_elements(self) -> Iterable[HomogeneousElement]:
        for t in self.window.degrees():
            for i in range(len(self.labels[t])):
                yield HomogeneousElement.of(t, self.basis_vector(t, i))

    def describe(self, t: int, vector) -> str:
        return _describe(self.labels[t], vector, self.prime)

    def underlying(self) -> GradedVectorSpace:
        return GradedVectorSpace(self.prime, self.window, self.labels, self.bounded_below_at, self.bounded_above_at)

    def check_axioms(self) -> List[Tuple[int, int, int]]:
        """Return (e1, e2, t) triples where a(bx) != (ab)x on the recorded range."""
        failures = []
        for t in self.window.degrees():
            for e2 in range(1, self.window.hi - t + 1):
                for e1 in range(1, self.window.hi - t - e2 + 1):
                    if not (self.algebra.knows(e1 + e2) and self.knows_action(e1 + e2, t)
                            and self.knows_action(e2, t) and self.knows_action(e1, t + e2)):
                        continue
                    if self.dim(t) == 0 or self.dim(t + e1 + e2) == 0:
                        continue
                    ab = self.algebra.table(e1, e2)
                    lhs = np.einsum("abk,kvx->abvx", ab, self.action_tensor(e1 + e2, t))
                    rhs = np.einsum("avu,bux->abvx", self.action_tensor(e1, t + e2), self.action_tensor(e2, t))
                    if np.mod(lhs - rhs, self.prime).any():
                        failures.append((e1, e2, t))
        return failures

    def __repr__(self):
        return f"GradedModule({self.name} over {self.algebra.name}, window={self.window}, dims={self.dims()})"


def _require_same_algebra(*modules: GradedModule):
    first = modules[0].algebra
    for m in modules[1:]:
        if m.prime != first.prime:
            raise PrimeMismatchError(f"{m.name} is over F_{m.prime}, expected F_{first.prime}")
        if not same_algebra(first, m.algebra):
            raise StructureError(f"{m.name} is a module over {m.algebra.name}, expected {first.name}")


def from_generator_action(algebra: GradedAlgebra, window: DegreeWindow, labels: Mapping[int, Sequence[str]],
                          generator_action: Mapping[Tuple[int, int, int], np.ndarray],
                          bounded_below_at: Optional[int] = None, bounded_above_at: Optional[int] = None,
                          name: str = "M") -> GradedModule:
    """
    Build a module from the action of the algebra generators only.

    Args:
        algebra: the acting algebra; its `generators` list fixes what may be given
        window: degree window of the module
        labels: basis labels per degree
        generator_action: (generator degree, generator index, source degree) -> matrix
            from M^t to M^(t + generator degree); missing entries act as zero
        bounded_below_at: optional lower bound
        bounded_above_at: optional upper bound
        name: module name

    Returns:
        GradedModule whose full action table is generated by the given matrices
    """
    p = algebra.prime
    shell = GradedModule(algebra, window, labels, {}, bounded_below_at, bounded_above_at, name)
    dims = shell.dims()

    def gen_matrix(g_deg, g_idx, t):
        key = (g_deg, g_idx, t)
        src = shell.dim(t)
        tgt = shell.dim(t + g_deg)
        if key in generator_action:
            mat = np.mod(np.asarray(generator_action[key], dtype=np.int64).reshape(tgt, src), p)
            return mat
        return np.zeros((tgt, src), dtype=np.int64)

    action: Dict[Tuple[int, int], np.ndarray] = {}
    max_e = window.span
    for e in range(1, max_e + 1):
        if not algebra.knows(e):
            logger.warning(f"{name}: {algebra.name} is unknown in degree {e}; action recorded through degree {e - 1}")
            break
        n = algebra.dim(e)
        if n == 0:
            continue
        # express every basis element of A^e through products g * b
        columns, terms = [], []
        for (g_deg, g_idx) in algebra.generators:
            if g_deg > e:
                continue
            rest = e - g_deg
            for b in range(algebra.dim(rest)):
                if rest == 0:
                    vec = algebra.basis_vector(e, g_idx)
                else:
                    vec = algebra.multiply(g_deg, algebra.basis_vector(g_deg, g_idx), rest, algebra.basis_vector(rest, b))
                columns.append(vec)
                terms.append((g_deg, g_idx, rest, b))
        if not columns:
            raise StructureError(f"{algebra.name}: no generators reach degree {e}")
        system = fplin.FpMatrix(p, np.array(columns, dtype=np.int64).T)
        expansions = []
        for a in range(n):
            coeffs = fplin.solve(system, algebra.basis_vector(e, a))
            if coeffs is None:
                raise StructureError(f"{algebra.name}: generators do not span degree {e}")
            expansions.append([(int(c), term) for c, term in zip(coeffs, terms) if c])
        for t in window.degrees():
            if t + e > window.hi or dims[t] == 0 or dims[t + e] == 0:
                continue
            tensor = _zero_tensor(n, dims[t + e], dims[t])
            for a, expansion in enumerate(expansions):
                for c, (g_deg, g_idx, rest, b) in expansion:
                    if rest == 0:
                        inner = np.eye(dims[t], dtype=np.int64)
                    elif (rest, t) in action:
                        inner = action[(rest, t)][b]
                    else:
                        # b lands in a zero degree
                        continue
                    tensor[a] += c * (gen_matrix(g_deg, g_idx, t + rest) @ inner)
            action[(e, t)] = np.mod(tensor, p)
    return GradedModule(algebra, window, labels, action, bounded_below_at, bounded_above_at, name)


def algebra_as_module(algebra: GradedAlgebra, top: Optional[int] = None, name: Optional[str] = None) -> GradedModule:
    """The algebra acting on itself by left multiplication, on the window [0, top]."""
    top = algebra.top if top is None else min(top, algebra.top)
    window = DegreeWindow(0, top)
    action = {}
    for e in range(1, top + 1):
        for t in range(0, top + 1 - e):
            action[(e, t)] = np.transpose(algebra.table(e, t), (0, 2, 1))
    above = top if algebra.finite and top == algebra.top else None
    return GradedModule(algebra, window, {d: algebra.labels[d] for d in window.degrees()}, action,
                        bounded_below_at=0, bounded_above_at=above, name=name or algebra.name)


def trivial_module(algebra: GradedAlgebra, degree: int = 0, name: str = "k") -> GradedModule:
    """The ground field concentrated in one degree; positive-degree elements act as zero."""
    window = DegreeWindow(degree, degree)
    return GradedModule(algebra, window, {degree: ["1" if degree == 0 else f"1[{degree}]"]}, {},
                        bounded_below_at=degree, bounded_above_at=degree, name=name)


def zero_module(algebra: GradedAlgebra, window: Optional[DegreeWindow] = None) -> GradedModule:
    window = window or DegreeWindow(0, 0)
    return GradedModule(algebra, window, {}, {}, bounded_below_at=window.lo, bounded_above_at=window.hi, name="0")


def free_module(algebra: GradedAlgebra, generator_degrees: Sequence[int], name: str = "F") -> GradedModule:
    """
    Free module on generators in the given degrees.

    Over a truncated algebra the window stops where the lowest generator's
    summand runs out of known degrees.
    """
    if not generator_degrees:
        return zero_module(algebra)
    lo = min(generator_degrees)
    hi = lo + algebra.top if not algebra.finite else max(generator_degrees) + algebra.top
    window = DegreeWindow(lo, hi)
    summands = []
    for d in generator_degrees:
        shifted = suspension(algebra_as_module(algebra), d)
        summands.append(restrict_window(shifted, DegreeWindow(max(lo, shifted.window.lo), min(hi, shifted.window.hi))))
    result = direct_sum(summands, name=name) if len(summands) > 1 else summands[0]
    return restrict_window(result, window) if result.window != window else result


def cyclic_quotient(algebra: GradedAlgebra, ideal_components: Mapping[int, fplin.Subspace],
                    name: Optional[str] = None) -> GradedModule:
    """R / I for a left ideal I given by its degreewise components."""
    r = algebra_as_module(algebra)
    return quotient_module(r, GradedSubspace(r, ideal_components), name or f"{algebra.name}/I")


class GradedSubspace:
    """A degreewise subspace of a module's underlying graded vector space."""

    def __init__(self, module: GradedModule, components: Mapping[int, fplin.Subspace]):
        self.module = module
        self.components = {}
        for t in module.window.degrees():
            sub = components.get(t)
            if sub is None:
                sub = fplin.Subspace.zero(module.prime, module.dim(t))
            self.components[t] = sub

    @classmethod
    def zero(cls, module: GradedModule) -> "GradedSubspace":
        return cls(module, {})

    @classmethod
    def full(cls, module: GradedModule) -> "GradedSubspace":
        return cls(module, {t: fplin.Subspace.full(module.prime, module.dim(t)) for t in module.window.degrees()})

    def __getitem__(self, t: int) -> fplin.Subspace:
        if t in self.components:
            return self.components[t]
        return fplin.Subspace.zero(self.module.prime, self.module.dim(t))

    def dim(self, t: int) -> int:
        return self[t].dim

    def dims(self) -> Dict[int, int]:
        return {t: s.dim for t, s in self.components.items()}

    def total_dim(self) -> int:
        return sum(self.dims().values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedSubspace):
            return NotImplemented
        return all(self[t] == other[t] for t in self.module.window.degrees())

    def __contains__(self, element: HomogeneousElement) -> bool:
        if element.degree not in self.module.window:
            return element.is_zero()
        return element.array() in self[element.degree]

    def contains(self, other: "GradedSubspace") -> bool:
        return all(self[t].contains_subspace(other[t]) for t in self.module.window.degrees())

    def __add__(self, other: "GradedSubspace") -> "GradedSubspace":
        return GradedSubspace(self.module, {t: self[t] + other[t] for t in self.module.window.degrees()})

    def intersection(self, other: "GradedSubspace") -> "GradedSubspace":
        return GradedSubspace(self.module, {t: self[t].intersection(other[t]) for t in self.module.window.degrees()})

    def closure_defect(self) -> Optional[Tuple[int, int, int]]:
        """First (e, t, basis index) where the action leaves the subspace, or None if closed."""
        m = self.module
        for t in m.window.degrees():
            sub = self[t]
            if sub.dim == 0:
                continue
            for e in range(1, m.window.hi - t + 1):
                if not m.algebra.knows(e):
                    break
                if m.dim(t + e) == 0 or m.algebra.dim(e) == 0 or not m.knows_action(e, t):
                    continue
                tensor = m.action_tensor(e, t)
                for a in range(tensor.shape[0]):
                    images = np.mod(sub.basis @ tensor[a].T, m.prime)
                    for row in images:
                        if row not in self[t + e]:
                            return (e, t, a)
        return None

    def is_submodule(self) -> bool:
        return self.closure_defect() is None

    def basis_table(self) -> List[Tuple[int, str]]:
        rows = []
        for t in self.module.window.degrees():
            for v in self[t].basis:
                rows.append((t, self.module.describe(t, v)))
        return rows


def generated_subspace(m: GradedModule, elements: Iterable[HomogeneousElement]) -> GradedSubspace:
    """Degreewise span of A * elements; degrees are processed upward so one pass suffices."""
    gens: Dict[int, List[np.ndarray]] = {}
    for x in elements:
        if x.degree not in m.window:
            raise WindowError(f"{m.name}: element of degree {x.degree} lies outside {m.window}")
        gens.setdefault(x.degree, []).append(x.array())
    components: Dict[int, fplin.Subspace] = {}
    for t in m.window.degrees():
        vectors = list(gens.get(t, []))
        for s in range(m.window.lo, t):
            below = components.get(s)
            if below is None or below.dim == 0:
                continue
            tensor = m.action_tensor(t - s, s)
            for a in range(tensor.shape[0]):
                vectors.extend(np.mod(below.basis @ tensor[a].T, m.prime))
        components[t] = fplin.Subspace.span(m.prime, m.dim(t), vectors)
    return GradedSubspace(m, components)


class ModuleMap:
    """Degree-preserving module homomorphism given by one matrix per degree."""

    def __init__(self, source: GradedModule, target: GradedModule, matrices: Mapping[int, np.ndarray], name: str = "f"):
        _require_same_algebra(source, target)
        self.source = source
        self.target = target
        self.name = name
        self.prime = source.prime
        self.matrices = {}
        for t in source.window.degrees():
            shape = (_dim_or_zero(target, t), source.dim(t))
            mat = matrices.get(t)
            if mat is None:
                mat = np.zeros(shape, dtype=np.int64)
            mat = np.mod(np.asarray(mat, dtype=np.int64).reshape(shape), self.prime)
            self.matrices[t] = mat

    def matrix(self, t: int) -> np.ndarray:
        if t in self.matrices:
            return self.matrices[t]
        return np.zeros((_dim_or_zero(self.target, t), _dim_or_zero(self.source, t)), dtype=np.int64)

    def apply(self, x: HomogeneousElement) -> HomogeneousElement:
        return HomogeneousElement.of(x.degree, np.mod(self.matrix(x.degree) @ x.array(), self.prime))

    def equivariance_defects(self) -> List[Tuple[int, int]]:
        defects = []
        for t in self.source.window.degrees():
            for e in range(1, self.source.window.hi - t + 1):
                if not (self.source.knows_action(e, t) and _target_knows(self.target, e, t)):
                    continue
                s_act = self.source.action_tensor(e, t)
                t_act = self.target.action_tensor(e, t) if self.target.dim(t) and self.target.dim(t + e) else None
                for a in range(s_act.shape[0]):
                    lhs = self.matrix(t + e) @ s_act[a]
                    rhs = (t_act[a] @ self.matrix(t)) if t_act is not None else np.zeros_like(lhs)
                    if np.mod(lhs - rhs, self.prime).any():
                        defects.append((e, t))
                        break
        return defects

    def is_equivariant(self) -> bool:
        return not self.equivariance_defects()

    def kernel(self) -> GradedSubspace:
        return GradedSubspace(self.source, {
            t: fplin.kernel_basis(fplin.FpMatrix(self.prime, self.matrix(t))) if self.source.dim(t)
            else fplin.Subspace.zero(self.prime, 0)
            for t in self.source.window.degrees()})

    def image(self) -> GradedSubspace:
        comps = {}
        for t in self.target.window.degrees():
            if t in self.source.window and self.source.dim(t):
                comps[t] = fplin.Subspace.full(self.prime, self.source.dim(t)).image(self.matrix(t))
        return GradedSubspace(self.target, comps)

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self after other."""
        return ModuleMap(other.source, self.target,
                         {t: fplin.matmul(self.matrix(t), other.matrix(t), self.prime) for t in other.source.window.degrees()},
                         name=f"{self.name}.{other.name}")

    @classmethod
    def identity(cls, m: GradedModule) -> "ModuleMap":
        return cls(m, m, {t: np.eye(m.dim(t), dtype=np.int64) for t in m.window.degrees()}, name="id")

    @classmethod
    def zero(cls, source: GradedModule, target: GradedModule) -> "ModuleMap":
        return cls(source, target, {}, name="0")


def _dim_or_zero(m: GradedModule, t: int) -> int:
    try:
        return m.dim(t)
    except WindowError:
        return 0


def _target_knows(m: GradedModule, e: int, t: int) -> bool:
    try:
        m.dim(t)
        m.dim(t + e)
    except WindowError:
        return False
    return m.knows_action(e, t) if (m.dim(t) and m.dim(t + e)) else True


@dataclass
class ShortExactSequence:
    """0 -> A --f--> B --g--> C -> 0 with an exactness check."""
    f: ModuleMap
    g: ModuleMap

    def exactness_defects(self) -> List[str]:
        problems = []
        ker_f, im_f = self.f.kernel(), self.f.image()
        ker_g, im_g = self.g.kernel(), self.g.image()
        for t in self.f.source.window.degrees():
            if ker_f[t].dim:
                problems.append(f"degree {t}: first map not injective")
        for t in self.g.source.window.degrees():
            if im_f[t] != ker_g[t]:
                problems.append(f"degree {t}: image of first map differs from kernel of second")
        for t in self.g.target.window.degrees():
            if im_g[t].dim != self.g.target.dim(t):
                problems.append(f"degree {t}: second map not surjective")
        return problems

    def is_exact(self) -> bool:
        return not self.exactness_defects()


def submodule(m: GradedModule, sub: GradedSubspace, name: Optional[str] = None) -> GradedModule:
    """The submodule carried by an action-closed graded subspace; `inclusion` maps it into m."""
    defect = sub.closure_defect()
    if defect is not None:
        e, t, a = defect
        raise StructureError(f"{m.name}: subspace not closed under {m.algebra.labels[e][a]} acting on degree {t}")
    labels, action, incl = {}, {}, {}
    for t in m.window.degrees():
        basis = sub[t].basis
        labels[t] = [m.describe(t, v) for v in basis]
        incl[t] = basis.T.copy()
    for t in m.window.degrees():
        src = sub[t]
        if src.dim == 0:
            continue
        for e in range(1, m.window.hi - t + 1):
            tgt = sub[t + e]
            if tgt.dim == 0 or not m.knows_action(e, t):
                continue
            tensor = m.action_tensor(e, t)
            out = _zero_tensor(tensor.shape[0], tgt.dim, src.dim)
            for a in range(tensor.shape[0]):
                images = np.mod(src.basis @ tensor[a].T, m.prime)
                for j, img in enumerate(images):
                    out[a, :, j] = tgt.coordinates(img)
            action[(e, t)] = out
    below = m.bounded_below_at
    above = m.bounded_above_at
    result = GradedModule(m.algebra, m.window, labels, action, below, above, name or f"sub({m.name})")
    result.inclusion = ModuleMap(result, m, incl, name="incl")
    return result


def submodule_generated(m: GradedModule, elements: Iterable[HomogeneousElement], name: Optional[str] = None) -> GradedModule:
    """Submodule generated by homogeneous elements."""
    return submodule(m, generated_subspace(m, elements), name)


def quotient_module(m: GradedModule, sub: GradedSubspace, name: Optional[str] = None) -> GradedModule:
    """M / sub for an action-closed sub; `projection` maps m onto the result."""
    defect = sub.closure_defect()
    if defect is not None:
        e, t, a = defect
        raise StructureError(f"{m.name}: cannot divide by a subspace not closed under {m.algebra.labels[e][a]} on degree {t}")
    q, s, labels = {}, {}, {}
    for t in m.window.degrees():
        q[t] = fplin.quotient_map(m.dim(t), sub[t]).data
        s[t] = fplin.quotient_section(m.dim(t), sub[t])
        labels[t] = [f"[{m.describe(t, col)}]" for col in s[t].T]
    action = {}
    for (e, t), tensor in m.action.items():
        if t + e not in m.window:
            continue
        action[(e, t)] = np.mod(np.einsum("vu,aux,xy->avy", q[t + e], tensor, s[t]), m.prime)
    above = m.bounded_above_at
    below = m.bounded_below_at
    result = GradedModule(m.algebra, m.window, labels, action, below, above, name or f"{m.name}/sub")
    result.projection = ModuleMap(m, result, q, name="proj")
    return result


def suspension(m: GradedModule, n: int) -> GradedModule:
    """(Sigma^n M)^t = M^(t-n)."""
    if n == 0:
        return m
    labels = {t + n: m.labels[t] for t in m.window.degrees()}
    action = {(e, t + n): arr for (e, t), arr in m.action.items()}
    below = None if m.bounded_below_at is None else m.bounded_below_at + n
    above = None if m.bounded_above_at is None else m.bounded_above_at + n
    return GradedModule(m.algebra, m.window.shift(n), labels, action, below, above, name=f"S^{n}{m.name}")


def direct_sum(ms: Sequence[GradedModule], name: str = "sum") -> GradedModule:
    """Direct sum on the union of the summands' windows; each summand must be bounded where it is missing."""
    if not ms:
        raise ValueError("direct sum of no modules")
    _require_same_algebra(*ms)
    window = DegreeWindow(min(m.window.lo for m in ms), max(m.window.hi for m in ms))
    dims = {t: [m.dim(t) for m in ms] for t in window.degrees()}
    labels = {t: [f"{l}[{i}]" if len(ms) > 1 else l
                  for i, m in enumerate(ms) for l in (m.labels[t] if t in m.window else [])]
              for t in window.degrees()}
    action = {}
    algebra = ms[0].algebra
    for t in window.degrees():
        for e in range(1, window.hi - t + 1):
            if not algebra.knows(e):
                break
            total_src, total_tgt = sum(dims[t]), sum(dims[t + e])
            if total_src == 0 or total_tgt == 0:
                continue
            blocks = _zero_tensor(algebra.dim(e), total_tgt, total_src)
            r0 = c0 = 0
            complete = True
            for i, m in enumerate(ms):
                ds, dt = dims[t][i], dims[t + e][i]
                if ds and dt:
                    try:
                        blocks[:, r0:r0 + dt, c0:c0 + ds] = m.action_tensor(e, t)
                    except WindowError:
                        complete = False
                r0 += dt
                c0 += ds
            if complete:
                action[(e, t)] = blocks
    above = max(m.bounded_above_at for m in ms) if all(m.bounded_above_at is not None for m in ms) else None
    below = min(m.bounded_below_at for m in ms) if all(m.bounded_below_at is not None for m in ms) else None
    return GradedModule(algebra, window, labels, action, below, above, name)


def restrict_window(m: GradedModule, window: DegreeWindow) -> GradedModule:
    """Forget data outside a smaller window (bounds are kept only if they still fit)."""
    labels = {t: m.labels[t] for t in window.degrees() if t in m.window}
    action = {(e, t): arr for (e, t), arr in m.action.items() if t in window and t + e in window}
    below = m.bounded_below_at if m.bounded_below_at is not None and m.bounded_below_at >= window.lo else None
    above = m.bounded_above_at if m.bounded_above_at is not None and m.bounded_above_at <= window.hi else None
    return GradedModule(m.algebra, window, labels, action, below, above, m.name)


def conn(m: GradedModule, n: int) -> GradedModule:
    """conn_n(M): the submodule generated by all elements of degree >= n."""
    gens = [x for x in m.basis_elements() if x.degree >= n]
    result = submodule(m, generated_subspace(m, gens), name=f"conn_{n}({m.name})")
    if n > m.window.lo:
        result.bounded_below_at = max(n, m.bounded_below_at) if m.bounded_below_at is not None else n
        result.bounded_below_at = min(result.bounded_below_at, m.window.hi)
    return result


def comod(m: GradedModule, n: int) -> GradedModule:
    """comod_n(M) = M / conn_n(M), trivial in degrees >= n."""
    gens = [x for x in m.basis_elements() if x.degree >= n]
    result = quotient_module(m, generated_subspace(m, gens), name=f"comod_{n}({m.name})")
    # degrees between the window top and n stay unknown unless M itself is bounded there
    above = max(n - 1, m.window.lo) if n - 1 <= m.window.hi else None
    if m.bounded_above_at is not None:
        above = m.bounded_above_at if above is None else min(above, m.bounded_above_at)
        above = max(above, m.window.lo)
    result.bounded_above_at = above
    return result


def truncation_sequence(m: GradedModule, n: int) -> ShortExactSequence:
    """0 -> conn_n(M) -> M -> comod_n(M) -> 0."""
    c = conn(m, n)
    q = comod(m, n)
    return ShortExactSequence(c.inclusion, q.projection)


def conn_map(f: ModuleMap, n: int) -> ModuleMap:
    """The map conn_n(source) -> conn_n(target) induced by f."""
    cs, ct = conn(f.source, n), conn(f.target, n)
    mats = {}
    for t in cs.window.degrees():
        if cs.dim(t) == 0:
            continue
        images = np.mod(f.matrix(t) @ cs.inclusion.matrix(t), f.prime)
        columns = [_coords(ct, t, col) for col in images.T]
        mats[t] = np.array(columns, dtype=np.int64).reshape(len(columns), ct.dim(t)).T
    return ModuleMap(cs, ct, mats, name=f"conn_{n}({f.name})")


def _coords(sub: GradedModule, t: int, vector) -> np.ndarray:
    """Coordinates of an ambient vector in a submodule's degree-t basis."""
    basis = sub.inclusion.matrix(t).T
    return fplin.Subspace(sub.prime, basis.shape[1], basis).coordinates(vector)


def comod_map(f: ModuleMap, n: int) -> ModuleMap:
    """The map comod_n(source) -> comod_n(target) induced by f."""
    qs, qt = comod(f.source, n), comod(f.target, n)
    mats = {}
    for t in qs.window.degrees():
        if qs.dim(t) == 0:
            continue
        section = fplin.quotient_section(f.source.dim(t), generated_subspace(
            f.source, [x for x in f.source.basis_elements() if x.degree >= n])[t])
        mats[t] = np.mod(qt.projection.matrix(t) @ f.matrix(t) @ section, f.prime)
    return ModuleMap(qs, qt, mats, name=f"comod_{n}({f.name})")


# ---------------------------------------------------------------------------
# comodules
# ---------------------------------------------------------------------------

class GradedComodule:
    """
    Graded right comodule over a GradedCoalgebra, bounded above.

    `coaction[(t, s)]` (s < 0) holds the component of psi from M^t into
    M^(t-s) (x) Gamma^s; the s = 0 component is x -> x (x) 1.
    """

    def __init__(self, coalgebra: GradedCoalgebra, window: DegreeWindow, labels: Mapping[int, Sequence[str]],
                 coaction: Mapping[Tuple[int, int], np.ndarray], bounded_above_at: int,
                 bounded_below_at: Optional[int] = None, name: str = "M"):
        if bounded_above_at is None:
            raise WindowError(f"{name}: comodules must declare an upper bound")
        self.coalgebra = coalgebra
        self.prime = coalgebra.prime
        self.window = window
        self.name = name
        self.labels = {t: list(labels.get(t, [])) for t in window.degrees()}
        _check_bounds(window, bounded_below_at, bounded_above_at, self.labels)
        self.bounded_above_at = bounded_above_at
        self.bounded_below_at = bounded_below_at
        self.coaction: Dict[Tuple[int, int], np.ndarray] = {}
        for (t, s), arr in coaction.items():
            arr = np.mod(np.asarray(arr, dtype=np.int64), self.prime)
            expected = (self.dim(t - s), coalgebra.dim(s), self.dim(t))
            if arr.shape != expected:
                raise StructureError(f"{name}: coaction ({t}, {s}) has shape {arr.shape}, expected {expected}")
            self.coaction[(t, s)] = arr

    def dim(self, t: int) -> int:
        return _dim_with_bounds(t, self.window, self.labels, self.bounded_below_at, self.bounded_above_at)

    def dims(self) -> Dict[int, int]:
        return {t: len(self.labels[t]) for t in self.window.degrees()}

    def total_dim(self) -> int:
        return sum(self.dims().values())

    def coaction_tensor(self, t: int, s: int) -> np.ndarray:
        if s == 0:
            n = self.dim(t)
            return np.eye(n, dtype=np.int64).reshape(n, 1, n)
        if (t, s) in self.coaction:
            return self.coaction[(t, s)]
        src = self.dim(t)
        tgt = self.dim(t - s)
        if src == 0 or tgt == 0:
            return _zero_tensor(tgt, self.coalgebra.dim(s) if self.coalgebra.knows(s) else 0, src)
        if not self.coalgebra.knows(s):
            raise WindowError(f"{self.name}: coaction into Gamma^{s} is beyond {self.coalgebra.name}'s range")
        if self.coalgebra.dim(s) == 0:
            return _zero_tensor(tgt, 0, src)
        raise WindowError(f"{self.name}: coaction component ({t}, {s}) is not recorded")

    def coaction_matrix(self, t: int) -> np.ndarray:
        """psi on M^t as one matrix into the sum over s of M^(t-s) (x) Gamma^s."""
        blocks = []
        for s in range(0, t - self.top - 1, -1):
            tensor = self.coaction_tensor(t, s)
            blocks.append(tensor.reshape(-1, tensor.shape[2]))
        return np.vstack(blocks) if blocks else np.zeros((0, self.dim(t)), dtype=np.int64)

    @property
    def top(self) -> int:
        return self.bounded_above_at

    def check_axioms(self) -> List[Tuple[int, int, int]]:
        """Return (t, s1, s2) where coassociativity fails on the recorded range."""
        failures = []
        for t in self.window.degrees():
            if self.dim(t) == 0:
                continue
            for s2 in range(-1, t - self.top - 1, -1):
                for s1 in range(-1, t - s2 - self.top - 1, -1):
                    if not self.coalgebra.knows(s1 + s2):
                        continue
                    try:
                        first = self.coaction_tensor(t, s2)
                        second = self.coaction_tensor(t - s2, s1)
                        whole = self.coaction_tensor(t, s1 + s2)
                        split = self.coalgebra.table(s1, s2)
                    except WindowError:
                        continue
                    lhs = np.einsum("vgu,uhx->vghx", second, first)
                    rhs = np.einsum("vkx,kgh->vghx", whole, split)
                    if np.mod(lhs - rhs, self.prime).any():
                        failures.append((t, s1, s2))
        return failures

    def describe(self, t: int, vector) -> str:
        return _describe(self.labels[t], vector, self.prime)

    def underlying(self) -> GradedVectorSpace:
        return GradedVectorSpace(self.prime, self.window, self.labels, self.bounded_below_at, self.bounded_above_at)

    def __repr__(self):
        return f"GradedComodule({self.name} over {self.coalgebra.name}, window={self.window}, dims={self.dims()})"


def iota(m: GradedComodule) -> GradedModule:
    """
    The comodule as a module over the dual algebra: f * x = sum x_(0) <f, x_(1)>.

    Actions of degree beyond the coalgebra's recorded depth stay unknown.
    """
    algebra = m.coalgebra.dual()
    action = {}
    for t in m.window.degrees():
        if m.dim(t) == 0:
            continue
        for e in range(1, m.top - t + 1):
            if not m.coalgebra.knows(-e):
                break
            if t + e not in m.window or m.dim(t + e) == 0:
                continue
            action[(e, t)] = np.transpose(m.coaction_tensor(t, -e), (1, 0, 2))
    return GradedModule(algebra, m.window, m.labels, action, m.bounded_below_at, m.bounded_above_at, name=f"i({m.name})")


@dataclass(frozen=True)
class Annihilation:
    """Smallest j with I_j * x = 0, as far as the window can tell."""
    truth: Truth
    threshold: Optional[int]


def annihilation_degree(m: GradedModule, x: HomogeneousElement) -> Annihilation:
    """
    Decide whether some I_j (everything of degree >= j) annihilates x.

    Bounded-above modules always answer TRUE with j = (top - |x|) + 1 or smaller.
    Otherwise the answer is relative to the window: FALSE when the highest degree
    the window can see still acts nontrivially, UNKNOWN when nothing is visible.
    """
    t = x.degree
    vec = x.array()
    bounded = m.bounded_above_at is not None
    limit = (m.bounded_above_at if bounded else m.window.hi) - t
    last_nonzero = 0
    visible = 0
    for e in range(1, limit + 1):
        try:
            tensor = m.action_tensor(e, t)
        except WindowError:
            if bounded:
                raise
            break
        visible = e
        if tensor.size and np.mod(np.tensordot(tensor, vec, axes=(2, 0)), m.prime).any():
            last_nonzero = e
    threshold = last_nonzero + 1
    if bounded:
        return Annihilation(Truth.TRUE, threshold)
    if visible < 1:
        return Annihilation(Truth.UNKNOWN, None)
    if threshold <= visible:
        return Annihilation(Truth.TRUE, threshold)
    return Annihilation(Truth.FALSE, None)


def first_non_annihilated(m: GradedModule) -> Optional[HomogeneousElement]:
    """A basis element whose annihilator contains no I_j on the window, if any."""
    for x in m.basis_elements():
        if annihilation_degree(m, x).truth == Truth.FALSE:
            return x
    return None


def coaction_from_action(m: GradedModule, coalgebra: GradedCoalgebra) -> GradedComodule:
    """
    Reconstruct the coaction of a bounded-above rational module by pairing
    against dual bases: psi(x) = sum_f f*x (x) f^dual.
    """
    if not same_algebra(m.algebra, coalgebra.dual()):
        raise StructureError(f"{m.name} is over {m.algebra.name}, not the dual of {coalgebra.name}")
    witness = first_non_annihilated(m)
    if witness is not None:
        raise NotRationalError(
            f"{m.name}: annihilator of {m.describe(witness.degree, witness.array())} in degree {witness.degree} "
            f"contains no I_j on the window", witness.degree, witness.vector)
    if m.bounded_above_at is None:
        raise WindowError(f"{m.name}: a coaction can only be reconstructed for bounded-above modules")
    coaction = {}
    for t in m.window.degrees():
        if m.dim(t) == 0:
            continue
        for e in range(1, m.top - t + 1):
            if m.dim(t + e) == 0:
                continue
            if not coalgebra.knows(-e):
                raise WindowError(f"{m.name}: coaction of degree {t} needs {coalgebra.name} down to {-e}")
            coaction[(t, -e)] = np.transpose(m.action_tensor(e, t), (1, 0, 2))
    return GradedComodule(coalgebra, m.window, m.labels, coaction, m.bounded_above_at,
                          m.bounded_below_at, name=m.name[2:-1] if m.name.startswith("i(") else m.name)


def coalgebra_as_comodule(c: GradedCoalgebra, name: Optional[str] = None) -> GradedComodule:
    """Gamma coacting on itself through Delta, on the window [-depth, 0]."""
    window = c.window
    coaction = {}
    for t in window.degrees():
        for s in range(-1, t - 1, -1):
            if t - s > 0 or s < -c.depth:
                continue
            # Delta(x) component in Gamma^(t-s) (x) Gamma^s
            coaction[(t, s)] = np.transpose(c.table(t - s, s), (1, 2, 0))
    below = -c.depth if c.finite else None
    return GradedComodule(c, window, c.labels, coaction, 0, below, name=name or c.name)


def trivial_comodule(c: GradedCoalgebra, degree: int = 0) -> GradedComodule:
    window = DegreeWindow(degree, degree)
    return GradedComodule(c, window, {degree: ["1"]}, {}, degree, degree, name="k")


def comodule_conn(m: GradedComodule, n: int) -> GradedComodule:
    """The subcomodule of elements in degrees >= n."""
    lo = min(max(n, m.window.lo), m.window.hi)
    window = DegreeWindow(lo, m.window.hi)
    labels = {t: m.labels[t] for t in window.degrees()} if n <= m.window.hi else {}
    coaction = {(t, s): arr for (t, s), arr in m.coaction.items() if t >= n and t in window}
    return GradedComodule(m.coalgebra, window, labels, coaction, m.bounded_above_at,
                          max(lo, n) if n <= m.window.hi else lo, name=f"{m.name}^>={n}")


def comodule_comod(m: GradedComodule, n: int) -> GradedComodule:
    """The quotient comodule M / M^(>=n), concentrated in degrees < n."""
    hi = max(min(n - 1, m.window.hi), m.window.lo)
    window = DegreeWindow(m.window.lo, hi)
    labels = {t: m.labels[t] for t in window.degrees() if t < n}
    coaction = {(t, s): arr for (t, s), arr in m.coaction.items() if t - s < n and t in window}
    above = min(hi, m.bounded_above_at)
    return GradedComodule(m.coalgebra, window, labels, coaction, above, m.bounded_below_at, name=f"{m.name}^<{n}")


def suspend_comodule(m: GradedComodule, n: int) -> GradedComodule:
    if n == 0:
        return m
    labels = {t + n: m.labels[t] for t in m.window.degrees()}
    coaction = {(t + n, s): arr for (t, s), arr in m.coaction.items()}
    below = None if m.bounded_below_at is None else m.bounded_below_at + n
    return GradedComodule(m.coalgebra, m.window.shift(n), labels, coaction, m.bounded_above_at + n, below,
                          name=f"S^{n}{m.name}")


def extended_comodule(v: GradedVectorSpace, c: GradedCoalgebra, name: str = "V(x)Gamma") -> GradedComodule:
    """
    The extended comodule V (x) Gamma with coaction V (x) Delta.

    Degree t collects V^s (x) Gamma^(t-s) for s >= t; the window is cut where the
    coalgebra's recorded depth runs out.
    """
    if v.bounded_above_at is None:
        raise WindowError("extended comodules need a bounded-above vector space")
    b = v.bounded_above_at
    lo = v.window.lo if c.finite else max(v.window.lo, b - c.depth)
    if v.bounded_below_at is not None and c.finite:
        lo = v.bounded_below_at - c.depth
    lo = min(lo, b)
    window = DegreeWindow(lo, b)

    def vdim(s):
        try:
            return v.dim(s)
        except WindowError:
            return 0

    # basis of degree t: (s, i, g) with v_i in V^s and g in Gamma^(t-s)
    bases: Dict[int, List[Tuple[int, int, int]]] = {}
    labels: Dict[int, List[str]] = {}
    for t in window.degrees():
        bases[t], labels[t] = [], []
        for s in range(t, b + 1):
            if not c.knows(t - s):
                continue
            for i in range(vdim(s)):
                for g in range(c.dim(t - s)):
                    bases[t].append((s, i, g))
                    vl = v.labels[s][i] if s in v.window else f"v{s}_{i}"
                    labels[t].append(f"{vl}⊗{c.labels[t - s][g]}")
    index = {t: {key: k for k, key in enumerate(bases[t])} for t in window.degrees()}
    coaction = {}
    for t in window.degrees():
        for u in range(-1, t - b - 1, -1):
            if not c.knows(u) or c.dim(u) == 0 or t - u not in window:
                continue
            tensor = _zero_tensor(len(bases[t - u]), c.dim(u), len(bases[t]))
            for x, (s, i, g) in enumerate(bases[t]):
                # Delta(gamma) component Gamma^(t-s-u) (x) Gamma^u
                d1 = t - s - u
                if d1 > 0 or not c.knows(d1):
                    continue
                split = c.table(d1, u)
                for g1 in range(split.shape[1]):
                    for g2 in range(split.shape[2]):
                        coeff = split[g, g1, g2]
                        if coeff:
                            tensor[index[t - u][(s, i, g1)], g2, x] += coeff
            coaction[(t, u)] = tensor
    below = lo if c.finite and v.bounded_below_at is not None else None
    return GradedComodule(c, window, labels, coaction, b, below, name=name)


class ComoduleMap:
    """Degree-preserving comodule map given by one matrix per degree."""

    def __init__(self, source: GradedComodule, target: GradedComodule, matrices: Mapping[int, np.ndarray], name: str = "f"):
        if source.prime != target.prime:
            raise PrimeMismatchError("comodule map between different primes")
        self.source = source
        self.target = target
        self.name = name
        self.prime = source.prime
        self.matrices = {}
        for t in source.window.degrees():
            tgt = target.dim(t) if t in target.window or target.bounded_above_at < t else 0
            mat = matrices.get(t)
            if mat is None:
                mat = np.zeros((tgt, source.dim(t)), dtype=np.int64)
            self.matrices[t] = np.mod(np.asarray(mat, dtype=np.int64).reshape(tgt, source.dim(t)), self.prime)

    def matrix(self, t: int) -> np.ndarray:
        if t in self.matrices:
            return self.matrices[t]
        return np.zeros((_comod_dim_or_zero(self.target, t), _comod_dim_or_zero(self.source, t)), dtype=np.int64)

    def compatibility_defects(self) -> List[Tuple[int, int]]:
        """Degrees (t, s) where psi f != (f (x) 1) psi."""
        defects = []
        for t in self.source.window.degrees():
            for s in range(-1, t - self.source.top - 1, -1):
                try:
                    src = self.source.coaction_tensor(t, s)
                    tgt = self.target.coaction_tensor(t, s) if t in self.target.window else None
                except WindowError:
                    continue
                lhs = np.einsum("vu,ugx->vgx", self.matrix(t - s), src)
                if tgt is None:
                    rhs = np.zeros_like(lhs)
                else:
                    rhs = np.einsum("vgu,ux->vgx", tgt, self.matrix(t))
                if lhs.shape == rhs.shape and np.mod(lhs - rhs, self.prime).any():
                    defects.append((t, s))
        return defects

    def is_comodule_map(self) -> bool:
        return not self.compatibility_defects()


def _comod_dim_or_zero(m: GradedComodule, t: int) -> int:
    try:
        return m.dim(t)
    except WindowError:
        return 0


def iota_map(f: ComoduleMap, source: Optional[GradedModule] = None, target: Optional[GradedModule] = None) -> ModuleMap:
    source = source or iota(f.source)
    target = target or iota(f.target)
    return ModuleMap(source, target, f.matrices, name=f"i({f.name})")
