"""
Minimal free resolutions, Ext, and graded local cohomology as a colimit of
Ext over the quotients of a descending chain of ideals.

Internal degree convention: Hom^t(N, M) consists of module maps raising degree
by t, so a generator of degree g of a free module F_s pairs with M^(g + t).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from app.services import fplin
from app.services.errors import StructureError, WindowError
from app.services.graded import (
    GradedAlgebra,
    GradedModule,
    GradedSubspace,
    ModuleMap,
    Truth,
    algebra_as_module,
    conn,
    free_module,
    quotient_module,
    same_algebra,
    submodule,
)
from app.services.idealsets import HomogeneousLeftIdeal, IdealSet, grad_ideal

logger = logging.getLogger(__name__)


class FreeModule:
    """Free module on generators of given degrees; basis of F^u is (generator, algebra basis of A^(u-g))."""

    def __init__(self, algebra: GradedAlgebra, degrees: Optional[Sequence[int]] = None):
        self.algebra = algebra
        self.prime = algebra.prime
        self.gens: List[int] = list(degrees or [])
        self._act: Dict[Tuple[int, int, int], np.ndarray] = {}

    def add_generator(self, degree: int) -> int:
        self.gens.append(degree)
        return len(self.gens) - 1

    def blocks(self, u: int) -> List[Tuple[int, int, int]]:
        """(generator, offset, size) for every generator contributing to degree u."""
        out = []
        offset = 0
        for k, g in enumerate(self.gens):
            if g > u:
                continue
            size = self.algebra.dim(u - g)
            if size:
                out.append((k, offset, size))
                offset += size
        return out

    def dim(self, u: int) -> int:
        return sum(size for _, _, size in self.blocks(u))

    def generator_vector(self, k: int) -> np.ndarray:
        g = self.gens[k]
        v = np.zeros(self.dim(g), dtype=np.int64)
        for kk, offset, _ in self.blocks(g):
            if kk == k:
                v[offset] = 1
        return v

    def split(self, y: np.ndarray, u: int) -> Dict[int, np.ndarray]:
        """Per-generator algebra coefficients of an element of F^u."""
        return {k: y[offset:offset + size] for k, offset, size in self.blocks(u)}

    def act_tensor(self, e: int, u: int) -> np.ndarray:
        """Left action of A^e on F^u as an array (dim A^e, dim F^(u+e), dim F^u)."""
        key = (e, u, len(self.gens))
        if key not in self._act:
            self._act[key] = self._act_tensor(e, u)
        return self._act[key]

    def _act_tensor(self, e: int, u: int) -> np.ndarray:
        source = self.blocks(u)
        target = {k: (offset, size) for k, offset, size in self.blocks(u + e)}
        out = np.zeros((self.algebra.dim(e), self.dim(u + e), self.dim(u)), dtype=np.int64)
        for k, offset, size in source:
            if k not in target:
                continue
            t_off, t_size = target[k]
            table = self.algebra.table(e, u - self.gens[k])
            out[:, t_off:t_off + t_size, offset:offset + size] = np.transpose(table, (0, 2, 1))
        return out

    def act(self, e: int, a: np.ndarray, u: int, y: np.ndarray) -> np.ndarray:
        tensor = self.act_tensor(e, u)
        return np.mod(np.einsum("a,avx,x->v", a, tensor, y), self.prime)


class MinimalFreeResolution:
    """
    F_s -> ... -> F_0 -> M, built one internal degree at a time, lowest first.

    `images[s][k]` is d(g_k) for the k-th generator of F_s, a vector of
    F_(s-1)^(g_k) (of M^(g_k) when s = 0).
    """

    def __init__(self, m: GradedModule, max_s: int, max_t: int):
        if m.bounded_below_at is None:
            raise WindowError(f"{m.name}: minimal resolutions need a bounded-below module")
        self.module = m
        self.algebra = m.algebra
        self.prime = m.prime
        self.lo = m.bounded_below_at
        if not self.algebra.finite and max_t > self.lo + self.algebra.top:
            logger.warning(f"Resolution of {m.name} capped at degree {self.lo + self.algebra.top} "
                           f"by {self.algebra.name}'s range")
            max_t = self.lo + self.algebra.top
        self.max_s = max_s
        self.max_t = max_t
        self.free: List[FreeModule] = [FreeModule(self.algebra) for _ in range(max_s + 1)]
        self.images: List[List[np.ndarray]] = [[] for _ in range(max_s + 1)]
        self._cache: Dict[Tuple[int, int], np.ndarray] = {}
        self._build()

    def _target_tensor(self, s: int, e: int, u: int) -> np.ndarray:
        if s == 0:
            return self.module.action_tensor(e, u)
        return self.free[s - 1].act_tensor(e, u)

    def _target_dim(self, s: int, u: int) -> int:
        return self.module.dim(u) if s == 0 else self.free[s - 1].dim(u)

    def _d_matrix(self, s: int, t: int) -> np.ndarray:
        free = self.free[s]
        rows = self._target_dim(s, t)
        columns = []
        for k, offset, size in free.blocks(t):
            g = free.gens[k]
            image = self.images[s][k]
            tensor = self._target_tensor(s, t - g, g)
            columns.append(np.mod(np.tensordot(tensor, image, axes=(2, 0)), self.prime).T)
        if not columns:
            return np.zeros((rows, 0), dtype=np.int64)
        return np.hstack(columns)

    def d_matrix(self, s: int, t: int) -> np.ndarray:
        """The differential F_s^t -> F_(s-1)^t (the augmentation onto M^t for s = 0)."""
        key = (s, t)
        if key not in self._cache:
            self._cache[key] = self._d_matrix(s, t)
        return self._cache[key]

    def _build(self):
        p = self.prime
        for t in range(self.lo, self.max_t + 1):
            for s in range(0, self.max_s + 1):
                if s == 0:
                    n = self.module.dim(t)
                    kernel = fplin.Subspace.full(p, n)
                else:
                    prev = self.d_matrix(s - 1, t)
                    kernel = fplin.kernel_basis(fplin.FpMatrix(p, prev)) if prev.shape[1] else fplin.Subspace.zero(p, 0)
                    n = prev.shape[1]
                current = self._d_matrix(s, t)
                image = fplin.Subspace.full(p, current.shape[1]).image(current) if current.shape[1] else fplin.Subspace.zero(p, n)
                new = image.complement_basis(kernel)
                for v in new:
                    self.free[s].add_generator(t)
                    self.images[s].append(v.copy())
            logger.debug(f"Resolution of {self.module.name} through degree {t}: "
                         f"{[sum(1 for g in f.gens if g == t) for f in self.free]} new generators")
        self._cache.clear()
        logger.info(f"Resolved {self.module.name} through (s={self.max_s}, t={self.max_t}): "
                    f"generator counts {[len(f.gens) for f in self.free]}")

    def generator_degrees(self, s: int) -> List[int]:
        return list(self.free[s].gens)

    def is_exact(self) -> bool:
        """Recheck exactness and surjectivity on the built range."""
        p = self.prime
        for t in range(self.lo, self.max_t + 1):
            eps = self.d_matrix(0, t)
            if fplin.rank(eps, p) != self.module.dim(t):
                return False
            for s in range(1, self.max_s + 1):
                prev = self.d_matrix(s - 1, t)
                cur = self.d_matrix(s, t)
                if prev.shape[1] == 0:
                    continue
                kernel_dim = prev.shape[1] - fplin.rank(prev, p)
                if cur.shape[1] and fplin.matmul(prev, cur, p).any():
                    return False
                if s < self.max_s and fplin.rank(cur, p) != kernel_dim:
                    return False
        return True

    def is_minimal(self) -> bool:
        """Every generator image lies in the augmentation ideal times the previous stage."""
        for s in range(1, self.max_s + 1):
            prev = self.free[s - 1]
            for k, g in enumerate(self.free[s].gens):
                parts = prev.split(self.images[s][k], g)
                for kk, alpha in parts.items():
                    if prev.gens[kk] == g and alpha.any():
                        return False
        return True


def minimal_resolution(m: GradedModule, max_s: int, max_t: int) -> MinimalFreeResolution:
    return MinimalFreeResolution(m, max_s, max_t)


# ---------------------------------------------------------------------------
# cochains and Ext
# ---------------------------------------------------------------------------

@dataclass
class CochainLayout:
    """Column layout of Hom^t(F_s, M): one block M^(g_k + t) per generator k whose target is known."""
    blocks: List[Tuple[int, int, int]]
    size: int
    complete: bool


def _target_dim(target: GradedModule, u: int) -> Optional[int]:
    try:
        return target.dim(u)
    except WindowError:
        return None


def cochain_layout(free: FreeModule, target: GradedModule, t: int) -> CochainLayout:
    blocks, offset, complete = [], 0, True
    for k, g in enumerate(free.gens):
        n = _target_dim(target, g + t)
        if n is None:
            complete = False
            continue
        if n:
            blocks.append((k, offset, n))
            offset += n
    return CochainLayout(blocks, offset, complete)


def evaluation_matrix(rows: FreeModule, row_images: List[np.ndarray], row_layout: CochainLayout,
                      cols: FreeModule, col_layout: CochainLayout, target: GradedModule, t: int) -> Tuple[np.ndarray, bool]:
    """
    Matrix of phi -> (h -> phi(y_h)) from Hom^t(cols, M) to Hom^t(rows, M),
    where y_h = row_images[h] lies in cols^(g_h).
    """
    p = target.prime
    out = np.zeros((row_layout.size, col_layout.size), dtype=np.int64)
    col_index = {k: (offset, size) for k, offset, size in col_layout.blocks}
    known = True
    for h, r_off, r_size in row_layout.blocks:
        g_h = rows.gens[h]
        parts = cols.split(row_images[h], g_h)
        for k, alpha in parts.items():
            if not alpha.any():
                continue
            if k not in col_index:
                if _target_dim(target, cols.gens[k] + t) is None:
                    known = False
                continue
            c_off, c_size = col_index[k]
            try:
                block = target.action_matrix(g_h - cols.gens[k], alpha, cols.gens[k] + t)
            except WindowError:
                known = False
                continue
            out[r_off:r_off + r_size, c_off:c_off + c_size] = np.mod(
                out[r_off:r_off + r_size, c_off:c_off + c_size] + block, p)
    return out, known


@dataclass
class ExtCell:
    s: int
    t: int
    dim: int
    layout: CochainLayout
    basis: np.ndarray
    boundaries: fplin.Subspace
    certified: bool

    def classify(self, cocycle: np.ndarray) -> np.ndarray:
        """Coordinates of a cocycle's class in this cell's basis."""
        p = self.boundaries.prime
        if self.dim == 0:
            return np.zeros(0, dtype=np.int64)
        system = np.vstack([self.basis, self.boundaries.basis]) if self.boundaries.dim else self.basis
        coeffs = fplin.solve(fplin.FpMatrix(p, system.T), cocycle)
        if coeffs is None:
            raise StructureError(f"vector is not a cocycle in Ext^({self.s},{self.t})")
        return coeffs[:self.dim]


class ExtTable:
    """Ext^(s,t)(source, target) from a minimal resolution of the source."""

    def __init__(self, resolution: MinimalFreeResolution, target: GradedModule):
        if not same_algebra(resolution.algebra, target.algebra):
            raise StructureError(f"{resolution.module.name} and {target.name} are over different algebras")
        self.resolution = resolution
        self.target = target
        self.prime = target.prime
        self.cells: Dict[Tuple[int, int], ExtCell] = {}

    def _reach_ok(self, s: int, t: int) -> bool:
        """Whether every generator of F_s, F_(s+1) that can pair with the target was computed."""
        res = self.resolution
        if self.target.bounded_above_at is not None:
            return self.target.bounded_above_at - t <= res.max_t
        source_top = res.module.bounded_above_at
        return s == 0 and source_top is not None and source_top <= res.max_t

    def delta(self, s: int, t: int) -> Tuple[np.ndarray, bool]:
        """Coboundary Hom^t(F_s, M) -> Hom^t(F_(s+1), M)."""
        res = self.resolution
        cols = cochain_layout(res.free[s], self.target, t)
        if s + 1 > res.max_s:
            raise WindowError(f"Ext^{s} needs the resolution through stage {s + 1}")
        rows = cochain_layout(res.free[s + 1], self.target, t)
        matrix, known = evaluation_matrix(res.free[s + 1], res.images[s + 1], rows, res.free[s], cols, self.target, t)
        return matrix, known and rows.complete

    def cell(self, s: int, t: int) -> ExtCell:
        key = (s, t)
        if key in self.cells:
            return self.cells[key]
        p = self.prime
        layout = cochain_layout(self.resolution.free[s], self.target, t)
        d_out, known_out = self.delta(s, t)
        cocycles = fplin.kernel_basis(fplin.FpMatrix(p, d_out)) if layout.size else fplin.Subspace.zero(p, 0)
        if layout.size and d_out.shape[0] == 0:
            cocycles = fplin.Subspace.full(p, layout.size)
        known_in = True
        if s > 0 and layout.size:
            d_in, known_in = self.delta(s - 1, t)
            boundaries = fplin.Subspace.full(p, d_in.shape[1]).image(d_in) if d_in.shape[1] else fplin.Subspace.zero(p, layout.size)
        else:
            boundaries = fplin.Subspace.zero(p, layout.size)
        basis = boundaries.complement_basis(cocycles)
        dim = basis.shape[0]
        certified = self._reach_ok(s, t) and layout.complete and known_out and known_in
        if self.target.bounded_above_at is None:
            # without an upper bound only a vanishing Hom is conclusive
            certified = s == 0 and dim == 0 and layout.complete and self._reach_ok(s, t)
        cell = ExtCell(s, t, dim, layout, basis, boundaries, certified)
        self.cells[key] = cell
        return cell

    def describe(self, s: int, t: int, vector) -> str:
        """A cochain as generator -> value pairs, e.g. 'g0[2] -> Sq(1)'."""
        layout = self.cell(s, t).layout
        gens = self.resolution.free[s].gens
        parts = []
        for k, offset, size in layout.blocks:
            block = np.asarray(vector)[offset:offset + size]
            if np.mod(block, self.prime).any():
                parts.append(f"g{k}[{gens[k]}] -> {self.target.describe(gens[k] + t, block)}")
        return ", ".join(parts) or "0"

    def dims(self, max_s: int, degrees: Sequence[int]) -> Dict[Tuple[int, int], int]:
        return {(s, t): self.cell(s, t).dim for s in range(max_s + 1) for t in degrees}

    def rows(self, max_s: int, degrees: Sequence[int]) -> List[Tuple[int, int, int, bool]]:
        out = []
        for s in range(max_s + 1):
            for t in degrees:
                c = self.cell(s, t)
                out.append((s, t, c.dim, c.certified))
        return out


def ext_map(source: ExtTable, target: ExtTable, f: ModuleMap, s: int, t: int) -> np.ndarray:
    """Matrix of f_*: Ext^(s,t)(N, A) -> Ext^(s,t)(N, B) for f: A -> B, both tables over one resolution of N."""
    if source.resolution is not target.resolution:
        raise StructureError("induced maps need both Ext tables to share a resolution")
    a, b = source.cell(s, t), target.cell(s, t)
    if a.dim == 0 or b.dim == 0:
        return np.zeros((b.dim, a.dim), dtype=np.int64)
    free = source.resolution.free[s]
    b_blocks = {k: (offset, size) for k, offset, size in b.layout.blocks}
    columns = []
    for v in a.basis:
        image = np.zeros(b.layout.size, dtype=np.int64)
        for k, offset, size in a.layout.blocks:
            if k not in b_blocks:
                continue
            b_off, b_size = b_blocks[k]
            image[b_off:b_off + b_size] = f.matrix(free.gens[k] + t) @ v[offset:offset + size]
        columns.append(b.classify(np.mod(image, f.prime)))
    return np.array(columns, dtype=np.int64).T.reshape(b.dim, a.dim)


def _default_reach(source: GradedModule, target: GradedModule, degrees: Sequence[int]) -> int:
    top = target.bounded_above_at if target.bounded_above_at is not None else target.window.hi
    return top - min(degrees)


def ext(source: GradedModule, target: GradedModule, max_s: int, degrees: Sequence[int],
        max_t: Optional[int] = None) -> ExtTable:
    """
    Ext^(s,t)(source, target) for s <= max_s and t in degrees.

    Args:
        source: bounded-below module to resolve
        target: any module over the same algebra
        max_s: highest homological degree
        degrees: internal degrees t of interest
        max_t: resolution degree bound (derived from the target's range when omitted)

    Returns:
        ExtTable with every requested cell evaluated
    """
    reach = max_t if max_t is not None else _default_reach(source, target, degrees)
    resolution = minimal_resolution(source, max_s + 1, reach)
    table = ExtTable(resolution, target)
    for s in range(max_s + 1):
        for t in degrees:
            table.cell(s, t)
    return table


def hom_direct(source: GradedModule, target: GradedModule, t: int) -> int:
    """
    Dimension of Hom^t(source, target) by solving the equivariance equations
    for the algebra generators directly.
    """
    p = source.prime
    algebra = source.algebra
    degrees = [u for u in source.window.degrees() if source.dim(u)]
    offsets, total = {}, 0
    for u in degrees:
        n = _target_dim(target, u + t)
        if n is None:
            raise WindowError(f"{target.name} is unknown in degree {u + t}")
        offsets[u] = (total, n, source.dim(u))
        total += n * source.dim(u)
    if total == 0:
        return 0
    equations = []
    for g_deg, g_idx in algebra.generators:
        a = algebra.basis_vector(g_deg, g_idx)
        for u in degrees:
            v = u + g_deg
            n_tv = _target_dim(target, v + t)
            if not n_tv:
                continue
            block = np.zeros((n_tv * source.dim(u), total), dtype=np.int64)
            # f_v S_g  (row-major vec: kron(I, S_g^T))
            if v in offsets:
                s_g = source.action_matrix(g_deg, a, u)
                o, n, d = offsets[v]
                block[:, o:o + n * d] += np.kron(np.eye(n, dtype=np.int64), s_g.T)
            # - T_g f_u
            t_g = target.action_matrix(g_deg, a, u + t)
            o, n, d = offsets[u]
            block[:, o:o + n * d] -= np.kron(t_g, np.eye(d, dtype=np.int64))
            equations.append(np.mod(block, p))
    if not equations:
        return total
    system = np.vstack(equations)
    return total - fplin.rank(system, p)


# ---------------------------------------------------------------------------
# quotient towers and local cohomology
# ---------------------------------------------------------------------------

def quotient_by_ideal(ideal: HomogeneousLeftIdeal) -> GradedModule:
    """Gamma*/K as a cyclic module, on the window [0, top of the algebra]."""
    algebra = ideal.algebra
    r = algebra_as_module(algebra)
    comps = {}
    for d in r.window.degrees():
        comp = ideal.component(d)
        if comp is None:
            raise WindowError(f"{ideal.name} is unknown in degree {d}")
        comps[d] = comp
    q = quotient_module(r, GradedSubspace(r, comps), name=f"{algebra.name}/{ideal.name}")
    nonzero = q.nonzero_degrees()
    if ideal.full_from is not None and ideal.full_from - 1 <= r.window.hi:
        q.bounded_above_at = max(ideal.full_from - 1, r.window.lo)
    elif algebra.finite:
        q.bounded_above_at = max(nonzero) if nonzero else r.window.lo
    return q


class QuotientTower:
    """The quotients Gamma*/K_0 <- Gamma*/K_1 <- ... of a descending chain, with resolutions and lifted maps."""

    def __init__(self, chain: Sequence[HomogeneousLeftIdeal], max_s: int, max_t: int):
        if not chain:
            raise ValueError("a quotient tower needs at least one ideal")
        self.chain = list(chain)
        self.algebra = chain[0].algebra
        self.max_s = max_s
        self.max_t = max_t
        self.quotients = [quotient_by_ideal(k) for k in self.chain]
        self._resolutions: Dict[int, MinimalFreeResolution] = {}
        self._lifts: Dict[int, List[List[np.ndarray]]] = {}
        self.descending = [k_prev.contains(k_next) for k_prev, k_next in zip(self.chain, self.chain[1:])]

    def resolution(self, j: int) -> MinimalFreeResolution:
        if j not in self._resolutions:
            logger.info(f"Resolving stage {j}: {self.quotients[j].name}")
            self._resolutions[j] = minimal_resolution(self.quotients[j], self.max_s, self.max_t)
        return self._resolutions[j]

    def projection(self, j: int, u: int) -> np.ndarray:
        """Matrix of Gamma*/K_(j+1) -> Gamma*/K_j in degree u."""
        big, small = self.quotients[j + 1], self.quotients[j]
        if big.dim(u) == 0 or small.dim(u) == 0:
            return np.zeros((small.dim(u), big.dim(u)), dtype=np.int64)
        section = fplin.quotient_section(self.algebra.dim(u), _ideal_space(self.chain[j + 1], u))
        proj = fplin.quotient_map(self.algebra.dim(u), _ideal_space(self.chain[j], u)).data
        return np.mod(proj @ section, self.algebra.prime)

    def lift(self, j: int) -> List[List[np.ndarray]]:
        """Chain map from the resolution of stage j+1 to that of stage j covering the projection."""
        if j in self._lifts:
            return self._lifts[j]
        src, tgt = self.resolution(j + 1), self.resolution(j)
        p = self.algebra.prime
        phi: List[List[np.ndarray]] = []
        for s in range(self.max_s + 1):
            images = []
            for h, g in enumerate(src.free[s].gens):
                if s == 0:
                    want = np.mod(self.projection(j, g) @ src.images[0][h], p)
                else:
                    want = _apply_chain_map(src.free[s - 1], tgt.free[s - 1], phi[s - 1], src.images[s][h], g, p)
                x = fplin.solve(fplin.FpMatrix(p, tgt.d_matrix(s, g)), want)
                if x is None:
                    raise StructureError(f"chain map lift failed at stage {j}, s={s}, degree {g}")
                images.append(x)
            phi.append(images)
        self._lifts[j] = phi
        return phi

    def warm(self):
        """Build every resolution and chain map up front so later reads are lock-free."""
        for j in range(len(self.chain)):
            self.resolution(j)
        for j in range(len(self.chain) - 1):
            self.lift(j)
        return self

    def transition(self, j: int, cells: Tuple[ExtCell, ExtCell], target: GradedModule, n: int, t: int) -> np.ndarray:
        """Matrix of Ext^(n,t)(stage j) -> Ext^(n,t)(stage j+1) in the cells' bases."""
        small, big = cells
        if small.dim == 0 or big.dim == 0:
            return np.zeros((big.dim, small.dim), dtype=np.int64)
        src, tgt = self.resolution(j + 1), self.resolution(j)
        phi = self.lift(j)
        pull, _ = evaluation_matrix(src.free[n], phi[n], big.layout, tgt.free[n], small.layout, target, t)
        columns = [big.classify(np.mod(pull @ v, target.prime)) for v in small.basis]
        return np.array(columns, dtype=np.int64).T.reshape(big.dim, small.dim)


def _ideal_space(ideal: HomogeneousLeftIdeal, u: int) -> fplin.Subspace:
    comp = ideal.component(u)
    if comp is None:
        raise WindowError(f"{ideal.name} is unknown in degree {u}")
    return comp


def _apply_chain_map(src: FreeModule, tgt: FreeModule, images: List[np.ndarray], y: np.ndarray, u: int, p: int) -> np.ndarray:
    """phi(y) for y in src^u, phi given on generators."""
    out = np.zeros(tgt.dim(u), dtype=np.int64)
    for k, alpha in src.split(y, u).items():
        if not alpha.any():
            continue
        g = src.gens[k]
        tensor = tgt.act_tensor(u - g, g)
        out = np.mod(out + np.einsum("a,avx,x->v", alpha, tensor, images[k]), p)
    return out


@dataclass
class LocalCohomologyTower:
    """Ext^n(Gamma*/K_j, M) across the stages j, with transitions and a stabilization verdict per degree."""
    n: int
    degrees: List[int]
    stage_names: List[str]
    dims: Dict[int, List[int]] = field(default_factory=dict)
    certified: Dict[int, List[bool]] = field(default_factory=dict)
    transitions: Dict[int, List[np.ndarray]] = field(default_factory=dict)
    stable_from: Dict[int, Optional[int]] = field(default_factory=dict)
    value: Dict[int, Optional[int]] = field(default_factory=dict)
    cofinal: Truth = Truth.TRUE
    tables: List["ExtTable"] = field(default_factory=list, repr=False)
    prime: int = config.PRIME

    def is_iso(self, t: int, j: int) -> bool:
        m = self.transitions[t][j]
        a, b = self.dims[t][j], self.dims[t][j + 1]
        return a == b and (a == 0 or fplin.rank(m, self.prime) == a)

    def composite(self, t: int, start: int, stop: int) -> np.ndarray:
        """Transition from stage start to stage stop."""
        m = np.eye(self.dims[t][start], dtype=np.int64)
        for j in range(start, stop):
            m = np.mod(self.transitions[t][j] @ m, self.prime)
        return m

    def rows(self) -> List[Tuple[int, int, str, int, bool]]:
        out = []
        for t in self.degrees:
            for j, name in enumerate(self.stage_names):
                out.append((t, j, name, self.dims[t][j], self.certified[t][j]))
        return out


def _stage_threshold(ideal: HomogeneousLeftIdeal) -> Optional[int]:
    """Lowest degree where the ideal may be nonzero."""
    return ideal.lowest_nonzero()


def tower_over_chain(chain: Sequence[HomogeneousLeftIdeal], m: GradedModule, n: int, degrees: Sequence[int],
                     max_t: Optional[int] = None, quotients: Optional["QuotientTower"] = None) -> LocalCohomologyTower:
    if not chain:
        raise ValueError("empty chain")
    if not same_algebra(chain[0].algebra, m.algebra):
        raise StructureError(f"{m.name} is not a module over {chain[0].algebra.name}")
    degrees = list(degrees)
    reach = max_t if max_t is not None else _default_reach(m, m, degrees)
    if not m.algebra.finite:
        reach = min(reach, m.algebra.top)
    tower = quotients if quotients is not None else QuotientTower(chain, n + 1, reach)
    result = LocalCohomologyTower(n, degrees, [k.name for k in chain], prime=m.algebra.prime)
    if any(d == Truth.FALSE for d in tower.descending):
        logger.warning("Chain is not descending; the colimit is not certified")
        result.cofinal = Truth.UNKNOWN
    tables = [ExtTable(tower.resolution(j), m) for j in range(len(chain))]
    result.tables = tables
    run = config.STABILIZATION_RUN
    bounded_top = m.bounded_above_at
    for t in degrees:
        cells = [tables[j].cell(n, t) for j in range(len(chain))]
        result.dims[t] = [c.dim for c in cells]
        result.certified[t] = [c.certified for c in cells]
        result.transitions[t] = [tower.transition(j, (cells[j], cells[j + 1]), m, n, t) for j in range(len(chain) - 1)]
        result.stable_from[t] = None
        result.value[t] = None
        if result.cofinal != Truth.TRUE:
            continue
        for j in range(len(chain)):
            if not all(result.certified[t][j:]):
                continue
            # the last stage of a chain ending in (0) is its colimit
            terminal = j == len(chain) - 1 and chain[-1].is_zero() == Truth.TRUE
            if not terminal and bounded_top is not None:
                low = _stage_threshold(chain[j])
                if low is None or low <= bounded_top - t + 1:
                    continue
            window = range(j, min(j + run, len(chain) - 1))
            isos = len(window) == run and all(result.is_iso(t, i) for i in window)
            if isos or terminal:
                result.stable_from[t] = j
                result.value[t] = result.dims[t][j]
                break
        if result.stable_from[t] is None:
            logger.warning(f"Ext^{n} tower of {m.name} in degree {t} did not stabilize within {len(chain)} stages")
    return result


def local_cohomology(m: GradedModule, n: int, j_max: Optional[int] = None,
                     degrees: Optional[Sequence[int]] = None) -> LocalCohomologyTower:
    """
    colim_j Ext^n(Gamma*/I_j, M) with stages I_1, ..., I_(j_max).

    Repeated ideals stay as separate stages with identity transitions.
    """
    algebra = m.algebra
    if j_max is None:
        j_max = config.IDEAL_HORIZON
    if algebra.finite:
        j_max = min(j_max, algebra.top + 1)
    chain = [grad_ideal(algebra, j) for j in range(1, j_max + 1)]
    return tower_over_chain(chain, m, n, degrees if degrees is not None else default_degrees(m, n))


def local_cohomology_general(s: IdealSet, m: GradedModule, n: int,
                             degrees: Optional[Sequence[int]] = None) -> LocalCohomologyTower:
    """colim of Ext^n over the cofinal chain of a filtered ideal set."""
    filtered, _ = s.is_filtered()
    if filtered != Truth.TRUE:
        logger.warning(f"{s.name} is not filtered; the chain of running intersections is used")
    return tower_over_chain(s.chain(), m, n, degrees if degrees is not None else default_degrees(m, n))


def default_degrees(m: GradedModule, n: int) -> List[int]:
    top = m.bounded_above_at if m.bounded_above_at is not None else m.window.hi
    lo = m.window.lo - n - 1
    return list(range(lo, top - n + 1))


@dataclass
class DimensionShiftRow:
    t: int
    syzygy: Optional[int]
    module: Optional[int]
    certified: bool

    @property
    def equal(self) -> bool:
        return self.syzygy == self.module


@dataclass
class DimensionShiftReport:
    i: int
    rows: List[DimensionShiftRow]

    @property
    def holds(self) -> bool:
        return all(r.equal for r in self.rows if r.certified)


def free_cover(m: GradedModule) -> Tuple[GradedModule, ModuleMap]:
    """A free module F with a surjection onto m, from the first stage of a minimal resolution."""
    top = m.bounded_above_at if m.bounded_above_at is not None else m.window.hi
    res = minimal_resolution(m, 0, top)
    degrees = res.generator_degrees(0)
    f = free_module(m.algebra, degrees, name=f"F({m.name})")
    mats = {u: res.d_matrix(0, u) for u in f.window.degrees()
            if f.dim(u) and u <= res.max_t and _target_dim(m, u)}
    return f, ModuleMap(f, m, mats, name="eps")


def dimension_shift(m: GradedModule, i: int, degrees: Optional[Sequence[int]] = None) -> DimensionShiftReport:
    """
    Compare H^(i+1) of the kernel of a free cover with H^i of conn_0(m), degree by degree.
    """
    if i < 1:
        raise ValueError("the dimension shift compares H^(i+1) and H^i for i >= 1")
    if m.bounded_below_at is None or m.bounded_below_at < 0:
        raise WindowError(f"{m.name} must be connective (bounded below at a degree >= 0)")
    connective = conn(m, 0)
    f, eps = free_cover(connective)
    syzygy = submodule(f, eps.kernel(), name=f"ker({eps.name})")
    degrees = list(degrees) if degrees is not None else default_degrees(connective, i)
    left = local_cohomology(syzygy, i + 1, degrees=degrees)
    right = local_cohomology(connective, i, degrees=degrees)
    rows = []
    for t in degrees:
        certified = left.stable_from[t] is not None and right.stable_from[t] is not None
        rows.append(DimensionShiftRow(t, left.value[t], right.value[t], certified))
    return DimensionShiftReport(i, rows)


def connecting_class(table: ExtTable, ambient: GradedModule, sub: GradedModule,
                     lifts: Sequence[np.ndarray], t: int) -> np.ndarray:
    """
    Ext^1 class of a map into ambient/sub, given lifts of its values on the
    generators of F_0 to the ambient module.

    Args:
        table: Ext table whose resolution resolves the source and whose target is sub
        ambient: module containing sub (sub.inclusion maps into it)
        sub: the submodule; its inclusion must be set
        lifts: for each generator k of F_0, a vector of ambient^(g_k + t)
        t: internal degree

    Returns:
        coordinates of the class in the Ext^(1,t) cell basis
    """
    if table.target is not sub or sub.inclusion is None or sub.inclusion.target is not ambient:
        raise StructureError(f"{sub.name} is not recorded as a submodule of {ambient.name}")
    res = table.resolution
    p = ambient.prime
    cell = table.cell(1, t)
    cocycle = np.zeros(cell.layout.size, dtype=np.int64)
    offsets = {h: (o, size) for h, o, size in cell.layout.blocks}
    f0 = res.free[0]
    for h, g_h in enumerate(res.free[1].gens):
        value = np.zeros(ambient.dim(g_h + t), dtype=np.int64)
        for k, alpha in f0.split(res.images[1][h], g_h).items():
            if alpha.any():
                value = np.mod(value + ambient.action_matrix(g_h - f0.gens[k], alpha, f0.gens[k] + t) @ lifts[k], p)
        if h not in offsets:
            if value.any():
                raise StructureError(f"relation {h} does not vanish on the chosen element")
            continue
        coords = fplin.solve(fplin.FpMatrix(p, sub.inclusion.matrix(g_h + t)), value)
        if coords is None:
            raise StructureError(f"relation {h} sends the element outside {sub.name}")
        o, size = offsets[h]
        cocycle[o:o + size] = coords
    return cell.classify(cocycle)
