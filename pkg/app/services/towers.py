"""
Families and inverse sequences of comodules, their limits, and the right
derived functors of product and sequential limit computed as local
cohomology of the associated modules.

Infinite products are never built. A family is evaluated component by
component up to its horizon; a class in the colimit over ideal stages of the
product is tracked by how long each component of it survives.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, ClassVar, Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from app.services import fplin
from app.services.errors import CertificateError, DescriptionError, HypothesisRefusal, StructureError, WindowError
from app.services.graded import (
    ComoduleMap,
    DegreeWindow,
    GradedCoalgebra,
    GradedComodule,
    GradedModule,
    ModuleMap,
    Truth,
    coaction_from_action,
    comod,
    comodule_comod,
    direct_sum,
    iota,
    iota_map,
    restrict_window,
    zero_module,
)
from app.services.homalg import LocalCohomologyTower, QuotientTower, ext_map, local_cohomology, tower_over_chain
from app.services.idealsets import IdealSet

logger = logging.getLogger(__name__)

LIM1_HYPOTHESIS = "R^1 lim vanishes on the sequence"


class Verdict(str, Enum):
    ZERO = "zero"
    NONZERO = "nonzero-with-certificate"
    INDETERMINATE = "indeterminate"


def _dim(m, t: int) -> Optional[int]:
    try:
        return m.dim(t)
    except WindowError:
        return None


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndexFormula:
    """An integer sequence in the member index: affine a*i + b or exponential a*base^i + b."""
    kind: str
    coefficient: int = 1
    offset: int = 0
    base: int = 2

    AFFINE: ClassVar[str] = "affine"
    EXPONENTIAL: ClassVar[str] = "exponential"

    def __post_init__(self):
        if self.kind not in (self.AFFINE, self.EXPONENTIAL):
            raise DescriptionError(f"unsupported index formula {self.kind!r}", "tail.formula.kind")

    def __call__(self, i: int) -> int:
        if self.kind == self.AFFINE:
            return self.coefficient * i + self.offset
        return self.coefficient * self.base ** i + self.offset

    def is_increasing(self) -> bool:
        return self.coefficient > 0 and (self.kind == self.AFFINE or self.base > 1)

    def __str__(self):
        if self.kind == self.AFFINE:
            return f"{self.coefficient}*i{self.offset:+d}"
        return f"{self.coefficient}*{self.base}^i{self.offset:+d}"


@dataclass(frozen=True)
class TailDescriptor:
    """How members beyond the horizon look."""
    kind: str
    shift: Optional[IndexFormula] = None
    cut: Optional[IndexFormula] = None

    ZERO: ClassVar[str] = "zero"
    CONSTANT: ClassVar[str] = "constant"
    SHIFTED_TRUNCATION: ClassVar[str] = "shifted_truncation"

    def __post_init__(self):
        if self.kind not in (self.ZERO, self.CONSTANT, self.SHIFTED_TRUNCATION):
            raise DescriptionError(f"unsupported tail descriptor {self.kind!r}", "tail.kind")
        if self.kind == self.SHIFTED_TRUNCATION and (self.shift is None or self.cut is None):
            raise DescriptionError("a shifted truncation tail needs both shift and cut formulas", "tail")

    def expected_dims(self, i: int, coalgebra: GradedCoalgebra, reference: Optional[GradedComodule] = None) -> Dict[int, int]:
        """Nonzero dimensions of member i as the descriptor predicts them."""
        if self.kind == self.ZERO:
            return {}
        if self.kind == self.CONSTANT:
            if reference is None:
                raise ValueError("a constant tail is read off a reference member")
            return {t: n for t, n in reference.dims().items() if n}
        d, c = self.shift(i), self.cut(i)
        dims = {}
        for u in range(-c, 1):
            n = coalgebra.dim(u)
            if n:
                dims[u + d] = n
        return dims

    def grows(self) -> bool:
        return self.kind == self.SHIFTED_TRUNCATION and self.cut.is_increasing()

    def __str__(self):
        if self.kind == self.SHIFTED_TRUNCATION:
            return f"S^({self.shift}) Gamma^(>= -({self.cut}))"
        return self.kind


class ComoduleFamily:
    """
    An explicit finite list of comodules, or a uniform family i -> M_i
    evaluated for start <= i <= horizon with a descriptor for the rest.
    """

    def __init__(self, coalgebra: GradedCoalgebra, members: Optional[Sequence[GradedComodule]] = None,
                 generator: Optional[Callable[[int], GradedComodule]] = None, horizon: Optional[int] = None,
                 tail: Optional[TailDescriptor] = None, start: int = 0, name: str = "family"):
        if (members is None) == (generator is None):
            raise DescriptionError("a family is either an explicit member list or a generator", "family")
        self.coalgebra = coalgebra
        self.name = name
        self.start = start
        self.tail = tail
        self.generator = generator
        self.horizon = horizon if horizon is not None else config.FAMILY_HORIZON
        self._members: Dict[int, GradedComodule] = {}
        self._modules: Dict[int, GradedModule] = {}
        if members is not None:
            if not members:
                raise DescriptionError("an explicit family needs at least one member", "family.members")
            self._members = {start + k: m for k, m in enumerate(members)}
            self.horizon = start + len(members) - 1
        if generator is not None and tail is None:
            raise DescriptionError("a uniform family needs a tail descriptor", "family.tail")

    @property
    def is_finite(self) -> bool:
        return self.generator is None

    def indices(self) -> List[int]:
        return list(range(self.start, self.horizon + 1))

    def member(self, i: int) -> GradedComodule:
        if i not in self._members:
            if self.generator is None:
                raise IndexError(f"{self.name} has no member {i}")
            m = self.generator(i)
            if m.coalgebra.key != self.coalgebra.key:
                raise StructureError(f"member {i} of {self.name} is over {m.coalgebra.name}")
            self._members[i] = m
        return self._members[i]

    def module(self, i: int) -> GradedModule:
        if i not in self._modules:
            self._modules[i] = iota(self.member(i))
        return self._modules[i]

    def tail_mismatches(self) -> List[int]:
        """Evaluated members whose dimensions disagree with the tail descriptor."""
        if self.is_finite or self.tail is None:
            return []
        reference = self.member(self.horizon)
        bad = []
        for i in self.indices():
            actual = {t: n for t, n in self.member(i).dims().items() if n}
            if actual != self.tail.expected_dims(i, self.coalgebra, reference):
                bad.append(i)
        return bad

    def __repr__(self):
        kind = "explicit" if self.is_finite else f"uniform, tail {self.tail}"
        return f"ComoduleFamily({self.name}, {kind}, indices {self.start}..{self.horizon})"


# ---------------------------------------------------------------------------
# towers
# ---------------------------------------------------------------------------

@dataclass
class StabilityCertificate:
    """Per degree, the index from which every structure map is an isomorphism (None when not found)."""
    degrees: List[int]
    stable_from: Dict[int, Optional[int]]
    run: int

    @property
    def missing(self) -> List[int]:
        return [t for t in self.degrees if self.stable_from[t] is None]

    @property
    def complete(self) -> bool:
        return not self.missing


class Tower:
    """M_0 <- M_1 <- ... <- M_K with comodule maps maps[i]: M_(i+1) -> M_i."""

    def __init__(self, comodules: Sequence[GradedComodule], maps: Sequence[ComoduleMap], name: str = "tower"):
        if len(comodules) < 1 or len(maps) != len(comodules) - 1:
            raise StructureError(f"{name}: {len(comodules)} members need {len(comodules) - 1} maps, got {len(maps)}")
        self.name = name
        self.comodules = list(comodules)
        self.maps = list(maps)
        self.coalgebra = comodules[0].coalgebra
        for i, f in enumerate(self.maps):
            if f.source is not self.comodules[i + 1] or f.target is not self.comodules[i]:
                raise StructureError(f"{name}: map {i} does not go from member {i + 1} to member {i}")
        self.modules = [iota(m) for m in self.comodules]
        self.module_maps = [iota_map(f, self.modules[i + 1], self.modules[i]) for i, f in enumerate(self.maps)]

    @property
    def horizon(self) -> int:
        return len(self.comodules) - 1

    @property
    def window(self) -> DegreeWindow:
        return DegreeWindow(min(m.window.lo for m in self.comodules), max(m.window.hi for m in self.comodules))

    def degrees(self) -> List[int]:
        return list(self.window.degrees())

    def check_maps(self) -> List[int]:
        """Indices of structure maps that do not commute with the coactions."""
        return [i for i, f in enumerate(self.maps) if not f.is_comodule_map()]

    def dim(self, i: int, t: int) -> Optional[int]:
        return _dim(self.comodules[i], t)

    def map_matrix(self, i: int, t: int) -> np.ndarray:
        return self.maps[i].matrix(t).reshape(self.dim(i, t) or 0, self.dim(i + 1, t) or 0)

    def composite(self, i: int, j: int, t: int) -> np.ndarray:
        """M_j^t -> M_i^t for j >= i."""
        out = np.eye(self.dim(j, t) or 0, dtype=np.int64)
        for k in range(j - 1, i - 1, -1):
            out = fplin.matmul(self.map_matrix(k, t), out, self.coalgebra.prime)
        return out

    def is_iso(self, i: int, t: int) -> bool:
        a, b = self.dim(i, t), self.dim(i + 1, t)
        if a is None or b is None or a != b:
            return False
        return a == 0 or fplin.rank(self.map_matrix(i, t), self.coalgebra.prime) == a

    def stability(self, degrees: Optional[Sequence[int]] = None, run: Optional[int] = None) -> StabilityCertificate:
        run = run if run is not None else config.STABILIZATION_RUN
        degrees = list(degrees) if degrees is not None else self.degrees()
        stable: Dict[int, Optional[int]] = {}
        for t in degrees:
            stable[t] = None
            if any(self.dim(i, t) is None for i in range(self.horizon + 1)):
                continue
            i0 = self.horizon
            while i0 > 0 and self.is_iso(i0 - 1, t):
                i0 -= 1
            if self.horizon - i0 >= run:
                stable[t] = i0
        return StabilityCertificate(degrees, stable, run)

    def __repr__(self):
        return f"Tower({self.name}, horizon={self.horizon})"


def constant_tower(m: GradedComodule, horizon: Optional[int] = None) -> Tower:
    horizon = horizon if horizon is not None else config.TOWER_HORIZON
    members = [m] * (horizon + 1)
    identity = ComoduleMap(m, m, {t: np.eye(m.dim(t), dtype=np.int64) for t in m.window.degrees()}, name="id")
    return Tower(members, [identity] * horizon, name=f"const({m.name})")


def _truncation_horizon(window: DegreeWindow, horizon: Optional[int]) -> int:
    """Enough members for the top degree to appear and then repeat for a full stabilization run."""
    if horizon is not None:
        return horizon
    return max(config.TOWER_HORIZON, window.hi - window.lo + config.STABILIZATION_RUN)


def truncation_tower(m: GradedComodule, horizon: Optional[int] = None) -> Tower:
    """comod_(lo+i)(M) for i = 0..K with the quotient maps; every map is onto."""
    horizon = _truncation_horizon(m.window, horizon)
    lo = m.window.lo
    members = [comodule_comod(m, lo + i + 1) for i in range(horizon + 1)]
    maps = []
    for i in range(horizon):
        src, tgt = members[i + 1], members[i]
        mats = {t: np.eye(src.dim(t), dtype=np.int64) if t < lo + i + 1 else np.zeros((0, src.dim(t)), dtype=np.int64)
                for t in src.window.degrees()}
        maps.append(ComoduleMap(src, tgt, mats, name=f"q{i}"))
    return Tower(members, maps, name=f"trunc({m.name})")


def module_truncation_tower(m: GradedModule, coalgebra: GradedCoalgebra, horizon: Optional[int] = None) -> Tower:
    """
    The quotients comod_(lo+i)(M) of a module, each turned into a comodule.

    Every quotient is bounded above; the limit is M on the window even when M
    itself is not rational.
    """
    horizon = _truncation_horizon(m.window, horizon)
    lo = m.window.lo
    members = [coaction_from_action(comod(m, lo + i + 1), coalgebra) for i in range(horizon + 1)]
    maps = []
    for i in range(horizon):
        src, tgt = members[i + 1], members[i]
        mats = {t: np.eye(src.dim(t), dtype=np.int64) if t < lo + i + 1 else np.zeros((tgt.dim(t), src.dim(t)), dtype=np.int64)
                for t in src.window.degrees()}
        maps.append(ComoduleMap(src, tgt, mats, name=f"q{i}"))
    return Tower(members, maps, name=f"trunc({m.name})")


def _degree_zero_comodule(coalgebra: GradedCoalgebra, width: int, name: str) -> GradedComodule:
    window = DegreeWindow(0, 0)
    return GradedComodule(coalgebra, window, {0: [f"e{k}" for k in range(width)]}, {}, 0, 0, name=name)


def zero_map_tower(coalgebra: GradedCoalgebra, horizon: Optional[int] = None) -> Tower:
    """k <-0- k <-0- k ..."""
    horizon = horizon if horizon is not None else config.TOWER_HORIZON
    members = [_degree_zero_comodule(coalgebra, 1, f"k{i}") for i in range(horizon + 1)]
    maps = [ComoduleMap(members[i + 1], members[i], {0: np.zeros((1, 1), dtype=np.int64)}, name="0")
            for i in range(horizon)]
    return Tower(members, maps, name="zero-maps")


def shift_tower(coalgebra: GradedCoalgebra, horizon: Optional[int] = None, width: Optional[int] = None) -> Tower:
    """
    k^w <- k^w <- ... in degree 0 with the nilpotent shift as every map.

    Image chains keep shrinking for w steps, so with w > K they never settle
    inside the horizon.
    """
    horizon = horizon if horizon is not None else config.TOWER_HORIZON
    width = width if width is not None else horizon + 1
    shift = np.eye(width, k=1, dtype=np.int64)
    members = [_degree_zero_comodule(coalgebra, width, f"V{i}") for i in range(horizon + 1)]
    maps = [ComoduleMap(members[i + 1], members[i], {0: shift}, name="shift") for i in range(horizon)]
    return Tower(members, maps, name=f"shift({width})")


def _certified(tower: Tower, degrees: Optional[Sequence[int]] = None, run: Optional[int] = None) -> StabilityCertificate:
    """
    The stability certificate on the requested degrees.

    Without explicit degrees the window is the first contiguous run of
    certified degrees.

    Raises:
        CertificateError: some requested degree has no stability certificate
    """
    cert = tower.stability(degrees, run)
    if degrees is None:
        stretch = []
        for t in cert.degrees:
            if cert.stable_from[t] is not None:
                stretch.append(t)
            elif stretch:
                break
        if not stretch:
            raise CertificateError(f"{tower.name}: no degree of the window is stable within the horizon")
        cert = StabilityCertificate(stretch, {t: cert.stable_from[t] for t in stretch}, cert.run)
    if not cert.complete:
        raise CertificateError(f"{tower.name}: no degreewise-stability certificate in degrees {cert.missing}")
    return cert


def lim_module(tower: Tower, degrees: Optional[Sequence[int]] = None, run: Optional[int] = None) -> GradedModule:
    """
    The limit of the tower of modules on a window where it is degreewise stable.

    Raises:
        CertificateError: some requested degree has no stability certificate
    """
    cert = _certified(tower, degrees, run)
    last = max(cert.stable_from[t] for t in cert.degrees)
    window = DegreeWindow(min(cert.degrees), max(cert.degrees))
    result = restrict_window(tower.modules[last], window)
    # the bound survives only when the members have stopped growing
    tops = {m.bounded_above_at for m in tower.comodules[last:]}
    if len(tops) != 1:
        result.bounded_above_at = None
    result.name = f"lim({tower.name})"
    logger.info(f"{result.name}: read off member {last} on {window}, dims {result.dims()}")
    return result


# ---------------------------------------------------------------------------
# Mittag-Leffler and the Moore complex
# ---------------------------------------------------------------------------

@dataclass
class MittagLefflerReport:
    verdict: Truth
    per_degree: Dict[int, Truth]
    image_dims: Dict[int, List[List[int]]] = field(default_factory=dict)


def _image_dims(tower: Tower, i: int, t: int) -> List[int]:
    return [fplin.rank(tower.composite(i, j, t), tower.coalgebra.prime) for j in range(i, tower.horizon + 1)]


def _settles(dims: List[int], run: int) -> Optional[int]:
    """First offset from which `run` consecutive image dimensions agree."""
    for k in range(0, len(dims) - run + 1):
        if len(set(dims[k:k + run])) == 1:
            return k
    return None


def mittag_leffler(tower: Tower, degrees: Optional[Sequence[int]] = None, run: Optional[int] = None) -> MittagLefflerReport:
    """
    Degreewise image-chain stabilization within the horizon.

    Indices within `run` of the horizon cannot be judged and are skipped; a
    degree with no judgeable index, or an image chain that never settles, is
    UNKNOWN.
    """
    run = run if run is not None else config.STABILIZATION_RUN
    degrees = list(degrees) if degrees is not None else tower.degrees()
    per_degree, image_dims = {}, {}
    for t in degrees:
        if any(tower.dim(i, t) is None for i in range(tower.horizon + 1)):
            per_degree[t] = Truth.UNKNOWN
            continue
        if all(tower.dim(i, t) == 0 for i in range(tower.horizon + 1)):
            per_degree[t] = Truth.TRUE
            continue
        chains = [_image_dims(tower, i, t) for i in range(tower.horizon + 1)]
        image_dims[t] = chains
        if all(fplin.rank(tower.map_matrix(i, t), tower.coalgebra.prime) == tower.dim(i, t) for i in range(tower.horizon)):
            per_degree[t] = Truth.TRUE
            continue
        judged = [chains[i] for i in range(0, tower.horizon - run + 1)]
        if judged and all(_settles(c, run) is not None for c in judged):
            per_degree[t] = Truth.TRUE
        else:
            per_degree[t] = Truth.UNKNOWN
            logger.debug(f"{tower.name}: image chains in degree {t} do not settle within the horizon")
    return MittagLefflerReport(Truth.all(per_degree.values()), per_degree, image_dims)


def lim1_vanishes(tower: Tower, degrees: Optional[Sequence[int]] = None) -> Truth:
    return mittag_leffler(tower, degrees).verdict


@dataclass
class MooreCohomology:
    """Dimensions of H^0, H^1, H^2 of the alternating-sum complex, per degree."""
    degrees: List[int]
    h: Dict[int, Tuple[int, int, int]]
    length: Dict[int, int]

    def rows(self) -> List[Tuple[int, int, int, int, int]]:
        return [(t, self.length[t], *self.h[t]) for t in self.degrees]


def moore_complex(tower: Tower, degrees: Optional[Sequence[int]] = None, run: Optional[int] = None) -> MooreCohomology:
    """
    Cohomology of prod M_i -> prod M_i, x -> (x_i - f_i(x_(i+1)))_i, degree by degree.

    Only degrees with a stability certificate are computed, on the same
    window lim_module reads. In degree t the products are cut at the member
    s from which every map is an isomorphism; the tail beyond s is the
    constant tower on M_s^t and adds nothing to either group.

    Raises:
        CertificateError: some requested degree has no stability certificate
    """
    cert = _certified(tower, degrees, run)
    p = tower.coalgebra.prime
    h, length = {}, {}
    for t in cert.degrees:
        s = cert.stable_from[t]
        dims = [tower.dim(i, t) for i in range(s + 1)]
        offsets = np.cumsum([0] + dims)
        c0, c1 = int(offsets[-1]), int(offsets[-2])
        d = np.zeros((c1, c0), dtype=np.int64)
        for i in range(s):
            r0 = offsets[i]
            d[r0:r0 + dims[i], offsets[i]:offsets[i + 1]] = np.eye(dims[i], dtype=np.int64)
            d[r0:r0 + dims[i], offsets[i + 1]:offsets[i + 2]] = np.mod(-tower.map_matrix(i, t), p)
        r = fplin.rank(d, p) if d.size else 0
        h[t] = (c0 - r, c1 - r, 0)
        length[t] = s + 1
        logger.debug(f"{tower.name}: Moore complex in degree {t} cut at member {s}, H = {h[t]}")
    return MooreCohomology(cert.degrees, h, length)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class ComponentSurvival:
    index: int
    order: int
    alive: bool
    certified: bool
    representative: str = ""


@dataclass
class DegreeVerdict:
    t: int
    verdict: Verdict
    dimension: Optional[int] = None
    survival: List[ComponentSurvival] = field(default_factory=list)
    witness: List[int] = field(default_factory=list)
    note: str = ""


@dataclass
class DerivedLimitReport:
    n: int
    kind: str
    subject: str
    stages: List[str]
    verdicts: Dict[int, DegreeVerdict]
    horizon_bounded: bool = True
    limit_dims: Dict[int, int] = field(default_factory=dict)

    def verdict(self, t: int) -> Verdict:
        return self.verdicts[t].verdict

    def rows(self) -> List[Tuple[int, str, Optional[int], str, str]]:
        return [(t, v.verdict.value, v.dimension, ",".join(str(i) for i in v.witness), v.note)
                for t, v in sorted(self.verdicts.items())]

    def survival_rows(self) -> List[Tuple[int, int, int, bool, bool, str]]:
        out = []
        for t, v in sorted(self.verdicts.items()):
            for c in v.survival:
                out.append((t, c.index, c.order, c.alive, c.certified, c.representative))
        return out


def survival_order(tower: LocalCohomologyTower, t: int) -> Tuple[int, bool]:
    """
    Last stage (counted from 1) at which some class born at an earlier stage is
    still nonzero, and whether a class is alive at the final stage.
    """
    dims = tower.dims[t]
    count = len(dims)
    best = 0
    for birth in range(count):
        if dims[birth] == 0:
            continue
        m = np.eye(dims[birth], dtype=np.int64)
        last = birth
        for j in range(birth, count - 1):
            m = np.mod(tower.transitions[t][j] @ m, tower.prime)
            if not m.any():
                break
            last = j + 1
        best = max(best, last + 1)
    return best, best == count and dims[-1] > 0


def _representative(tower: LocalCohomologyTower, t: int) -> str:
    for j, d in enumerate(tower.dims[t]):
        if d:
            table = tower.tables[j]
            return f"stage {j + 1}: {table.describe(tower.n, t, table.cell(tower.n, t).basis[0])}"
    return ""


def _increasing_witness(orders: List[Tuple[int, int]]) -> List[int]:
    """Component indices where the survival order sets a new record."""
    witness, record = [], 0
    for i, order in orders:
        if order > record:
            witness.append(i)
            record = order
    return witness


def derived_product(family: ComoduleFamily, n: int, j_max: Optional[int] = None,
                    degrees: Optional[Sequence[int]] = None, threads: Optional[int] = None) -> DerivedLimitReport:
    """
    R^n of the comodule product of a family, as local cohomology of the product
    of the associated modules, one component at a time.

    Args:
        family: explicit or uniform family of bounded-above comodules
        n: cohomological degree
        j_max: grad horizon (stages are the distinct ideals among I_1..I_(j_max))
        degrees: internal degrees to evaluate
        threads: worker threads for the per-component computations

    Returns:
        DerivedLimitReport with one verdict per degree
    """
    threads = threads if threads is not None else config.THREADS
    j_max = j_max if j_max is not None else config.IDEAL_HORIZON
    indices = family.indices()
    modules = {i: family.module(i) for i in indices}
    if degrees is None:
        lo = min(m.window.lo for m in modules.values())
        degrees = list(range(lo - 2, lo + 3))
    degrees = list(degrees)

    if family.is_finite:
        if n > 0:
            verdicts = {t: DegreeVerdict(t, Verdict.ZERO, 0, note="finite products are exact") for t in degrees}
            return DerivedLimitReport(n, "product", family.name, [], verdicts, horizon_bounded=False)
        product = direct_sum([modules[i] for i in indices], name=f"prod({family.name})")
        lc = local_cohomology(product, 0, j_max, degrees)
        verdicts = {}
        for t in degrees:
            value = lc.value[t]
            if value is None:
                verdicts[t] = DegreeVerdict(t, Verdict.INDETERMINATE, note="tower did not stabilize")
            else:
                verdicts[t] = DegreeVerdict(t, Verdict.ZERO if value == 0 else Verdict.NONZERO, value,
                                            note="finite product")
        return DerivedLimitReport(n, "product", family.name, lc.stage_names, verdicts, horizon_bounded=False)

    mismatches = family.tail_mismatches()
    if mismatches:
        raise DescriptionError(f"{family.name}: members {mismatches} disagree with the tail {family.tail}", "family.tail")
    algebra = family.coalgebra.dual()
    chain = IdealSet.grad(algebra, horizon=j_max).chain()
    reach = max((m.bounded_above_at - min(degrees)) for m in modules.values())
    if not algebra.finite:
        reach = min(reach, algebra.top)
    quotients = QuotientTower(chain, n + 1, reach).warm()
    logger.info(f"{family.name}: {len(indices)} components over {len(chain)} stages, n={n}, threads={threads}")

    def run_component(i: int) -> LocalCohomologyTower:
        return tower_over_chain(chain, modules[i], n, degrees, quotients=quotients)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        towers = dict(zip(indices, pool.map(run_component, indices)))

    complete = chain[-1].is_zero() == Truth.TRUE
    verdicts = {}
    for t in degrees:
        survival = []
        for i in indices:
            order, alive = survival_order(towers[i], t)
            certified = all(towers[i].certified[t])
            survival.append(ComponentSurvival(i, order, alive, certified, _representative(towers[i], t) if order else ""))
        verdicts[t] = _judge(t, survival, family, complete, towers)
        logger.info(f"{family.name}: degree {t} -> {verdicts[t].verdict.value} {verdicts[t].note}")
    return DerivedLimitReport(n, "product", family.name, [k.name for k in chain], verdicts,
                              horizon_bounded=not complete)


def _judge(t: int, survival: List[ComponentSurvival], family: ComoduleFamily, complete: bool,
           towers: Dict[int, LocalCohomologyTower]) -> DegreeVerdict:
    if not all(c.certified for c in survival):
        missing = [c.index for c in survival if not c.certified]
        return DegreeVerdict(t, Verdict.INDETERMINATE, survival=survival, note=f"uncertified components {missing}")
    if complete:
        terminal = [towers[c.index].dims[t][-1] for c in survival]
        if not any(terminal):
            return DegreeVerdict(t, Verdict.ZERO, 0, survival, note="stage chain reaches (0)")
    if any(c.alive for c in survival):
        alive = [c.index for c in survival if c.alive]
        return DegreeVerdict(t, Verdict.INDETERMINATE, survival=survival, note=f"classes alive at the last stage in {alive}")
    if all(c.order == 0 for c in survival):
        return DegreeVerdict(t, Verdict.ZERO, 0, survival, note="no classes at any stage")
    witness = _increasing_witness([(c.index, c.order) for c in survival])
    if len(witness) >= 3 and family.tail is not None and family.tail.grows():
        return DegreeVerdict(t, Verdict.NONZERO, None, survival, witness,
                             note=f"survival orders unbounded along {witness}, tail {family.tail}; horizon-bounded")
    if family.tail is None or family.tail.kind in (TailDescriptor.ZERO, TailDescriptor.CONSTANT):
        return DegreeVerdict(t, Verdict.ZERO, 0, survival, note="survival orders bounded and the tail repeats")
    return DegreeVerdict(t, Verdict.INDETERMINATE, survival=survival, witness=witness, note="pattern not conclusive")


def _certified_limit(tower: Tower, degrees: Optional[Sequence[int]]) -> Tuple[GradedModule, int, List[int]]:
    """The limit on the certified window, the member it is read off, and the degrees to evaluate."""
    ml = mittag_leffler(tower)
    if ml.verdict != Truth.TRUE:
        bad = [t for t, v in ml.per_degree.items() if v != Truth.TRUE]
        raise HypothesisRefusal(LIM1_HYPOTHESIS, f"{tower.name} is not Mittag-Leffler within the horizon in degrees {bad}")
    limit = lim_module(tower)
    window_degrees = list(limit.window.degrees())
    cert = tower.stability(window_degrees)
    last = max(cert.stable_from[t] for t in window_degrees)
    wanted = list(degrees) if degrees is not None else window_degrees
    outside = [t for t in wanted if t not in limit.window]
    if outside:
        raise CertificateError(f"{tower.name}: degrees {outside} lie outside the certified window {limit.window}")
    return limit, last, wanted


def derived_sequential_limit(tower: Tower, n: int, j_max: Optional[int] = None,
                             degrees: Optional[Sequence[int]] = None) -> DerivedLimitReport:
    """
    R^n of the comodule limit of a tower as local cohomology of the module limit.

    Raises:
        HypothesisRefusal: lim^1 of the module tower is not known to vanish
        CertificateError: the tower has no degreewise-stability certificate
    """
    limit, _, lc_degrees = _certified_limit(tower, degrees)
    lc = local_cohomology(limit, n, j_max, lc_degrees)
    verdicts = {}
    limit_dims = {t: _dim(limit, t) or 0 for t in lc_degrees}
    for t in lc_degrees:
        value = lc.value[t]
        if value is None:
            verdicts[t] = DegreeVerdict(t, Verdict.INDETERMINATE, note="tower of Ext groups did not stabilize")
        elif value == 0:
            verdicts[t] = DegreeVerdict(t, Verdict.ZERO, 0, note=f"stable from stage {lc.stable_from[t] + 1}")
        else:
            note = f"stable from stage {lc.stable_from[t] + 1}"
            if n == 0 and value < limit_dims[t]:
                note += f"; smaller than the limit ({limit_dims[t]})"
            verdicts[t] = DegreeVerdict(t, Verdict.NONZERO, value, note=note)
    return DerivedLimitReport(n, "sequential-limit", tower.name, lc.stage_names, verdicts,
                              horizon_bounded=False, limit_dims=limit_dims)


# ---------------------------------------------------------------------------
# Milnor sequence
# ---------------------------------------------------------------------------

@dataclass
class LesCell:
    s: int
    t: int
    dims: Tuple[int, int, int]
    ranks: Tuple[int, int]
    exact: bool
    detail: str = ""


@dataclass
class MilnorLesReport:
    tower: str
    cells: List[LesCell]

    @property
    def exact(self) -> bool:
        return all(c.exact for c in self.cells)

    def rows(self) -> List[Tuple[int, int, int, int, int, int, int, bool, str]]:
        return [(c.s, c.t, *c.dims, *c.ranks, c.exact, c.detail) for c in self.cells]


def _product_maps(tower: Tower, last: int, limit: GradedModule) -> Tuple[GradedModule, GradedModule, ModuleMap, ModuleMap]:
    """P0 = M_0 + ... + M_L, P1 = M_0 + ... + M_(L-1), the diagonal lim -> P0 and P0 -> P1."""
    window = limit.window
    parts0 = [restrict_window(tower.modules[i], window) for i in range(last + 1)]
    p0 = direct_sum(parts0, name="P0") if len(parts0) > 1 else parts0[0]
    if last > 0:
        parts1 = [restrict_window(tower.modules[i], window) for i in range(last)]
        p1 = direct_sum(parts1, name="P1") if len(parts1) > 1 else parts1[0]
    else:
        p1 = zero_module(limit.algebra, window)
    prime = tower.coalgebra.prime
    diag, diff = {}, {}
    for t in window.degrees():
        dims = [tower.dim(i, t) for i in range(last + 1)]
        diag[t] = np.vstack([tower.composite(i, last, t) for i in range(last + 1)]).reshape(sum(dims), dims[last])
        if last == 0:
            diff[t] = np.zeros((p1.dim(t), sum(dims)), dtype=np.int64)
            continue
        block = np.zeros((sum(dims[:last]), sum(dims)), dtype=np.int64)
        offs = np.cumsum([0] + dims)
        for i in range(last):
            block[offs[i]:offs[i + 1], offs[i]:offs[i + 1]] = np.eye(dims[i], dtype=np.int64)
            block[offs[i]:offs[i + 1], offs[i + 1]:offs[i + 2]] = np.mod(-tower.map_matrix(i, t), prime)
        diff[t] = block
    return p0, p1, ModuleMap(limit, p0, diag, name="diag"), ModuleMap(p0, p1, diff, name="1-T")


def milnor_les_check(tower: Tower, n_max: int, j_max: Optional[int] = None,
                     degrees: Optional[Sequence[int]] = None) -> MilnorLesReport:
    """
    Verify the long exact sequence of local cohomology attached to
    0 -> lim M_i -> prod M_i -> prod M_i -> 0 at every certified cell.

    At each (s, t) the check is that H^s(lim) -> H^s(P0) -> H^s(P1) is exact
    in the middle, the first map is injective for s = 0, and the ranks left
    for the connecting map H^s(P1) -> H^(s+1)(lim) agree from both sides.
    """
    limit, last, degrees = _certified_limit(tower, degrees)
    p0, p1, alpha, beta = _product_maps(tower, last, limit)
    algebra = limit.algebra
    j_max = j_max if j_max is not None else config.IDEAL_HORIZON
    if algebra.finite:
        j_max = min(j_max, algebra.top + 1)
    chain = IdealSet.grad(algebra, horizon=j_max).chain()
    tops = [m.bounded_above_at if m.bounded_above_at is not None else m.window.hi for m in (limit, p0, p1)]
    reach = max(tops) - min(degrees)
    if not algebra.finite:
        reach = min(reach, algebra.top)
    quotients = QuotientTower(chain, n_max + 1, reach).warm()
    cells = []
    groups = {}
    for s in range(n_max + 1):
        groups[s] = [tower_over_chain(chain, m, s, degrees, quotients=quotients) for m in (limit, p0, p1)]
    p = tower.coalgebra.prime
    for s in range(n_max + 1):
        a_lc, b_lc, c_lc = groups[s]
        for t in degrees:
            stable = [lc.stable_from[t] for lc in (a_lc, b_lc, c_lc)]
            if any(x is None for x in stable):
                cells.append(LesCell(s, t, (-1, -1, -1), (-1, -1), True, "not certified; skipped"))
                continue
            j = max(stable)
            dims = (a_lc.dims[t][j], b_lc.dims[t][j], c_lc.dims[t][j])
            f = ext_map(a_lc.tables[j], b_lc.tables[j], alpha, s, t)
            g = ext_map(b_lc.tables[j], c_lc.tables[j], beta, s, t)
            ra, rb = fplin.rank(f, p), fplin.rank(g, p)
            problems = []
            if f.size and g.size and fplin.matmul(g, f, p).any():
                problems.append("composite nonzero")
            if ra + rb != dims[1]:
                problems.append("not exact at the product")
            if s == 0 and ra != dims[0]:
                problems.append("limit does not inject")
            if s < n_max:
                nxt = groups[s + 1]
                nstable = [lc.stable_from[t] for lc in nxt[:2]]
                if all(x is not None for x in nstable):
                    jn = max(nstable)
                    fn = ext_map(nxt[0].tables[jn], nxt[1].tables[jn], alpha, s + 1, t)
                    if dims[2] - rb != nxt[0].dims[t][jn] - fplin.rank(fn, p):
                        problems.append("connecting ranks disagree")
            cells.append(LesCell(s, t, dims, (ra, rb), not problems, "; ".join(problems)))
    report = MilnorLesReport(tower.name, cells)
    logger.info(f"Milnor sequence for {tower.name}: {'exact' if report.exact else 'NOT exact'} on {len(cells)} cells")
    return report


# ---------------------------------------------------------------------------
# localization oracle over k[x]
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassDescriptor:
    """Components of an element of prod k[x]/x^(l_i): explicit ones plus an eventual polynomial (exponent lists)."""
    explicit: Dict[int, Tuple[int, ...]]
    tail: Tuple[int, ...] = ()

    def component(self, i: int) -> Tuple[int, ...]:
        return self.explicit.get(i, self.tail)


@dataclass
class OracleVerdict:
    verdict: Verdict
    failures: Dict[int, int]
    bound: Optional[int] = None


def _cyclic_length(m: GradedModule, step: int) -> int:
    """l with m = k[x]/x^l generated in its bottom degree; anything else is rejected."""
    degrees = m.nonzero_degrees()
    if not degrees:
        return 0
    lo = degrees[0]
    expected = list(range(lo, lo + step * len(degrees), step))
    if degrees != expected or any(m.dim(t) != 1 for t in degrees):
        raise DescriptionError(f"{m.name} is not a cyclic k[x]-module k[x]/x^l", "family")
    for t in degrees[:-1]:
        if not m.action_matrix(step, np.array([1]), t).any():
            raise DescriptionError(f"{m.name}: x acts as zero below the top, not k[x]/x^l", "family")
    return len(degrees)


def _divides(length: int, n: int, exponents: Tuple[int, ...], prime: int) -> bool:
    """Whether x^(n+1) p = x^n c has a solution p in k[x]/x^length."""
    if length == 0:
        return True
    rhs = np.zeros(length, dtype=np.int64)
    for e in exponents:
        if n + e < length:
            rhs[n + e] = (rhs[n + e] + 1) % prime
    mult = np.zeros((length, length), dtype=np.int64)
    for k in range(length):
        if k + n + 1 < length:
            mult[k + n + 1, k] = 1
    return fplin.solve(fplin.FpMatrix(prime, mult), rhs) is not None


def localization_oracle(family: ComoduleFamily, cls: ClassDescriptor, n_max: Optional[int] = None) -> OracleVerdict:
    """
    Decide whether x^(-1) * cls lies in the image of prod M_i in x^(-1) prod M_i,
    by plain division in each component, with no Ext computation.

    For every exponent bound N <= n_max, records a component where
    x^(N+1) p_i = x^N c_i has no solution; a bound with no failing component
    puts the class in the image.
    """
    algebra = family.coalgebra.dual()
    if algebra.monomials is None or len(algebra.generators) != 1:
        raise DescriptionError("the localization oracle needs a one-generator polynomial algebra", "family")
    step = algebra.generators[0][0]
    indices = family.indices()
    n_max = n_max if n_max is not None else indices[-1]
    if n_max > indices[-1]:
        raise DescriptionError(f"exponent bound {n_max} exceeds the evaluated components (up to {indices[-1]})", "n_max")
    lengths = {i: _cyclic_length(family.module(i), step) for i in indices}
    failures = {}
    for bound in range(0, n_max + 1):
        failing = next((i for i in indices if not _divides(lengths[i], bound, cls.component(i), algebra.prime)), None)
        if failing is None:
            logger.info(f"Oracle: x^{bound} clears every denominator; the class is in the image")
            return OracleVerdict(Verdict.ZERO, failures, bound)
        failures[bound] = failing
    logger.info(f"Oracle: no exponent bound up to {n_max} works; failing components {failures}")
    return OracleVerdict(Verdict.NONZERO, failures)
