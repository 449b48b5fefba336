"""
Exact linear algebra over the prime field F_p.

Matrices are numpy int64 arrays reduced mod p. Row reduction has a dense path
(vectorized numpy row operations) and a sparse path (dict-of-rows elimination)
used for large matrices whose density falls below the configured threshold.
Both paths return the same canonical reduced row echelon form.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

import config
from app.services.errors import PrimeMismatchError

logger = logging.getLogger(__name__)


def _as_array(entries, prime: int) -> np.ndarray:
    arr = np.asarray(entries, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
    return np.mod(arr, prime)


@dataclass(frozen=True, eq=False)
class FpMatrix:
    """A matrix over F_p; immutable once built."""
    prime: int
    data: np.ndarray

    def __post_init__(self):
        if self.prime < 2:
            raise ValueError(f"prime must be at least 2, got {self.prime}")
        arr = _as_array(self.data, self.prime)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_rows(cls, prime: int, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "FpMatrix":
        if len(rows) == 0:
            return cls.zeros(prime, 0, cols or 0)
        return cls(prime, np.array(rows, dtype=np.int64))

    @classmethod
    def zeros(cls, prime: int, rows: int, cols: int) -> "FpMatrix":
        return cls(prime, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, prime: int, n: int) -> "FpMatrix":
        return cls(prime, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    def _check(self, other: "FpMatrix"):
        if self.prime != other.prime:
            raise PrimeMismatchError(f"cannot combine F_{self.prime} and F_{other.prime} matrices")

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        self._check(other)
        return FpMatrix(self.prime, matmul(self.data, other.data, self.prime))

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        self._check(other)
        return FpMatrix(self.prime, self.data + other.data)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        self._check(other)
        return FpMatrix(self.prime, self.data - other.data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return (self.prime == other.prime and self.shape == other.shape
                and bool(np.array_equal(self.data, other.data)))

    def __hash__(self):
        return hash((self.prime, self.shape, self.data.tobytes()))

    def apply(self, vector: Sequence[int]) -> np.ndarray:
        v = np.asarray(vector, dtype=np.int64)
        if v.shape[0] != self.cols:
            raise ValueError(f"vector of length {v.shape[0]} does not fit a {self.rows}x{self.cols} matrix")
        return np.mod(self.data @ v, self.prime)

    def rank(self) -> int:
        return len(rref_with_pivots(self.data, self.prime)[1])

    def transpose(self) -> "FpMatrix":
        return FpMatrix(self.prime, self.data.T)

    def tolist(self) -> List[List[int]]:
        return self.data.tolist()


def matmul(a: np.ndarray, b: np.ndarray, prime: int) -> np.ndarray:
    """Multiply two integer arrays and reduce mod p."""
    if a.shape[-1] == 0 or (b.ndim > 1 and b.shape[0] == 0):
        out_shape = a.shape[:-1] + b.shape[1:]
        return np.zeros(out_shape, dtype=np.int64)
    return np.mod(np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64), prime)


def _use_sparse(a: np.ndarray) -> bool:
    if a.size < config.SPARSE_MIN_ENTRIES:
        return False
    density = np.count_nonzero(a) / a.size
    return density < config.SPARSE_DENSITY_THRESHOLD


def _rref_dense(a: np.ndarray, prime: int) -> Tuple[np.ndarray, List[int]]:
    a = np.mod(np.array(a, dtype=np.int64, copy=True), prime)
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), -1, prime)
        a[r] = np.mod(a[r] * inv, prime)
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        if others.size:
            a[others] = np.mod(a[others] - np.outer(a[others, c], a[r]), prime)
        pivots.append(c)
        r += 1
    return a, pivots


def _rref_sparse(a: np.ndarray, prime: int) -> Tuple[np.ndarray, List[int]]:
    rows, cols = a.shape
    pending: List[Dict[int, int]] = []
    for i in range(rows):
        nz = np.nonzero(a[i])[0]
        row = {int(c): int(a[i, c]) % prime for c in nz if int(a[i, c]) % prime}
        if row:
            pending.append(row)

    # reduced rows keyed by pivot column
    reduced: Dict[int, Dict[int, int]] = {}
    for row in pending:
        row = dict(row)
        # reduced rows vanish on each other's pivots, so one pass clears every pivot column
        for c in [c for c in row if c in reduced]:
            factor = row.get(c)
            if not factor:
                continue
            for cc, v in reduced[c].items():
                nv = (row.get(cc, 0) - factor * v) % prime
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
        if not row:
            continue
        lead = min(row)
        inv = pow(row[lead], -1, prime)
        row = {c: (v * inv) % prime for c, v in row.items()}
        # clear the new pivot column from existing rows
        for other in reduced.values():
            factor = other.get(lead)
            if factor:
                for c, v in row.items():
                    nv = (other.get(c, 0) - factor * v) % prime
                    if nv:
                        other[c] = nv
                    else:
                        other.pop(c, None)
        reduced[lead] = row

    pivots = sorted(reduced)
    out = np.zeros((rows, cols), dtype=np.int64)
    for r, p in enumerate(pivots):
        for c, v in reduced[p].items():
            out[r, c] = v
    return out, pivots


def rref_with_pivots(a, prime: int) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form of an integer array over F_p.

    Args:
        a: 2-D integer array
        prime: the field characteristic

    Returns:
        Tuple of (reduced array with the same shape, list of pivot columns)
    """
    arr = np.asarray(a, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
    if arr.size == 0:
        return np.zeros(arr.shape, dtype=np.int64), []
    if _use_sparse(arr):
        logger.debug(f"Sparse row reduction of a {arr.shape[0]}x{arr.shape[1]} matrix")
        return _rref_sparse(arr, prime)
    return _rref_dense(arr, prime)


def rref(m: FpMatrix) -> FpMatrix:
    """Return the unique reduced row echelon form of m (zero rows kept at the bottom)."""
    reduced, _ = rref_with_pivots(m.data, m.prime)
    return FpMatrix(m.prime, reduced)


@dataclass(frozen=True, eq=False)
class Subspace:
    """
    A subspace of F_p^n stored by its reduced echelon basis.

    Equal subspaces have identical bases, so equality is array equality.
    """
    prime: int
    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.int64)
        if b.size == 0:
            b = np.zeros((0, self.ambient_dim), dtype=np.int64)
        if b.ndim == 1:
            b = b.reshape(1, -1)
        if b.shape[1] != self.ambient_dim:
            raise ValueError(f"basis vectors have length {b.shape[1]}, ambient dimension is {self.ambient_dim}")
        reduced, pivots = rref_with_pivots(b, self.prime) if b.shape[0] else (b, [])
        reduced = reduced[: len(pivots)]
        reduced.setflags(write=False)
        object.__setattr__(self, "basis", reduced)
        object.__setattr__(self, "_pivots", tuple(pivots))

    @classmethod
    def span(cls, prime: int, ambient_dim: int, vectors: Iterable[Sequence[int]]) -> "Subspace":
        vecs = [np.asarray(v, dtype=np.int64) for v in vectors]
        if not vecs:
            return cls.zero(prime, ambient_dim)
        return cls(prime, ambient_dim, np.vstack(vecs))

    @classmethod
    def zero(cls, prime: int, ambient_dim: int) -> "Subspace":
        return cls(prime, ambient_dim, np.zeros((0, ambient_dim), dtype=np.int64))

    @classmethod
    def full(cls, prime: int, ambient_dim: int) -> "Subspace":
        return cls(prime, ambient_dim, np.eye(ambient_dim, dtype=np.int64))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def pivots(self) -> Tuple[int, ...]:
        return self._pivots

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.prime == other.prime and self.ambient_dim == other.ambient_dim
                and bool(np.array_equal(self.basis, other.basis)))

    def __hash__(self):
        return hash((self.prime, self.ambient_dim, self.basis.tobytes()))

    def __contains__(self, vector) -> bool:
        v = np.mod(np.asarray(vector, dtype=np.int64), self.prime)
        if self.dim == 0:
            return not v.any()
        # subtract the pivot-coordinate combination; what remains must vanish
        residual = np.mod(v - v[list(self._pivots)] @ self.basis, self.prime)
        return not residual.any()

    def coordinates(self, vector) -> np.ndarray:
        """Coordinates of a vector of this subspace in the echelon basis."""
        v = np.mod(np.asarray(vector, dtype=np.int64), self.prime)
        if v not in self:
            raise ValueError("vector does not lie in the subspace")
        return v[list(self._pivots)].copy()

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(row in self for row in other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        _same_space(self, other)
        return Subspace(self.prime, self.ambient_dim, np.vstack([self.basis, other.basis]))

    def intersection(self, other: "Subspace") -> "Subspace":
        _same_space(self, other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.prime, self.ambient_dim)
        # x = a.B1 = b.B2  <=>  [a | b] lies in the kernel of [B1 ; -B2]^T
        stacked = np.vstack([self.basis, np.mod(-other.basis, self.prime)]).T
        kernel = kernel_basis(FpMatrix(self.prime, stacked))
        vectors = [matmul(k[: self.dim], self.basis, self.prime) for k in kernel.basis]
        return Subspace.span(self.prime, self.ambient_dim, vectors)

    def image(self, matrix: np.ndarray) -> "Subspace":
        """Image of this subspace under a linear map given as a (target x ambient) array."""
        target = matrix.shape[0]
        if self.dim == 0:
            return Subspace.zero(self.prime, target)
        return Subspace(self.prime, target, matmul(self.basis, np.asarray(matrix).T, self.prime))

    def complement_basis(self, within: "Subspace") -> np.ndarray:
        """Vectors of `within` extending a basis of self ∩ within to a basis of within."""
        rows = []
        current = Subspace(self.prime, self.ambient_dim, self.basis)
        for v in within.basis:
            if v not in current:
                rows.append(v)
                current = Subspace(self.prime, self.ambient_dim, np.vstack([current.basis, v]))
        if not rows:
            return np.zeros((0, self.ambient_dim), dtype=np.int64)
        return np.vstack(rows)


def _same_space(a: Subspace, b: Subspace):
    if a.prime != b.prime:
        raise PrimeMismatchError(f"cannot combine F_{a.prime} and F_{b.prime} subspaces")
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


def kernel_basis(m: FpMatrix) -> Subspace:
    """
    Basis of {v : m v = 0}.

    Args:
        m: matrix over F_p

    Returns:
        Subspace of F_p^cols in reduced echelon form
    """
    p = m.prime
    rows, cols = m.shape
    if cols == 0:
        return Subspace.zero(p, 0)
    reduced, pivots = rref_with_pivots(m.data, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    vectors = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for r, pc in enumerate(pivots):
            v[pc] = (-reduced[r, f]) % p
        vectors.append(v)
    return Subspace.span(p, cols, vectors)


def solve(m: FpMatrix, b: Sequence[int]) -> Optional[np.ndarray]:
    """
    Find some x with m x = b.

    Args:
        m: coefficient matrix
        b: right-hand side of length m.rows

    Returns:
        A solution vector, or None when the system is inconsistent
    """
    p = m.prime
    rhs = np.mod(np.asarray(b, dtype=np.int64), p)
    if rhs.ndim != 1 or rhs.shape[0] != m.rows:
        raise ValueError(f"right-hand side has length {rhs.shape[0] if rhs.ndim else 0}, expected {m.rows}")
    if m.cols == 0:
        return np.zeros(0, dtype=np.int64) if not rhs.any() else None
    augmented = np.hstack([m.data, rhs.reshape(-1, 1)])
    reduced, pivots = rref_with_pivots(augmented, p)
    if m.cols in pivots:
        return None
    x = np.zeros(m.cols, dtype=np.int64)
    for r, pc in enumerate(pivots):
        x[pc] = reduced[r, m.cols]
    return x


def quotient_map(ambient_dim: int, sub: Subspace) -> FpMatrix:
    """
    A surjection F_p^ambient -> F_p^(ambient - dim sub) whose kernel is exactly sub.

    The codomain coordinates are the non-pivot coordinates of sub's echelon basis,
    so the standard basis vectors at those coordinates give a section.
    """
    if sub.ambient_dim != ambient_dim:
        raise ValueError(f"subspace lives in dimension {sub.ambient_dim}, not {ambient_dim}")
    p = sub.prime
    pivots = list(sub.pivots)
    free = [c for c in range(ambient_dim) if c not in set(pivots)]
    q = np.zeros((len(free), ambient_dim), dtype=np.int64)
    for i, c in enumerate(free):
        q[i, c] = 1
    for k, pc in enumerate(pivots):
        q[:, pc] = np.mod(-sub.basis[k, free], p)
    return FpMatrix(p, q)


def quotient_section(ambient_dim: int, sub: Subspace) -> np.ndarray:
    """Section of quotient_map: an (ambient x quotient) array s with q s = identity."""
    free = [c for c in range(ambient_dim) if c not in set(sub.pivots)]
    s = np.zeros((ambient_dim, len(free)), dtype=np.int64)
    for i, c in enumerate(free):
        s[c, i] = 1
    return s


def rank(a, prime: int) -> int:
    arr = np.asarray(a, dtype=np.int64)
    if arr.size == 0:
        return 0
    return len(rref_with_pivots(arr, prime)[1])
