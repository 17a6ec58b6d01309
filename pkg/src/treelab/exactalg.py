"""Exact linear algebra over the rings Z/p^e.

Everything in this package reduces to row-space computations over Z/p^e
(e = 1 gives the prime field F_p).  The canonical representative of a
row space is its Howell form: an echelon form with p-power pivots,
entries above each pivot reduced modulo the pivot, and the span closed
under the annihilator rows (N/g) * row.  Two submodules of (Z/p^e)^n are
equal iff their Howell forms are identical arrays, which is what makes
submodule equality, membership and quotient bookkeeping bit-exact.

Vectors are rows throughout; a linear map is a matrix acting by right
multiplication, so `kernel` and `solve` are left-sided (x @ A = 0 and
x @ A = b).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional, Sequence

import numpy as np

SUPPORTED_PRIMES = (2, 3, 5, 7)


class VerificationBug(AssertionError):
    """An identity the underlying theory guarantees failed to hold."""


@dataclass(frozen=True)
class RingSpec:
    """The coefficient ring Z/p^e.

    e = 1 identifies the ring with the residue field F_p; e > 1 keeps
    the full torsion structure (non-unit pivots, annihilators).
    """

    p: int
    e: int = 1

    def __post_init__(self) -> None:
        if self.p not in SUPPORTED_PRIMES:
            raise ValueError(f"unsupported prime {self.p}; supported: {SUPPORTED_PRIMES}")
        if self.e < 1:
            raise ValueError("exponent e must be >= 1")

    @property
    def modulus(self) -> int:
        return self.p**self.e

    @property
    def is_field(self) -> bool:
        return self.e == 1

    def reduce(self, a) -> np.ndarray:
        return np.asarray(a, dtype=np.int64) % self.modulus

    def inv_unit(self, a: int) -> int:
        """Inverse of a unit; raises ValueError if a is divisible by p."""
        return pow(int(a) % self.modulus, -1, self.modulus)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _pivot_normalize(v: np.ndarray, j: int, N: int) -> np.ndarray:
    """Scale row v by a unit so that v[j] becomes gcd(v[j], N), a p-power."""
    a = int(v[j])
    g = gcd(a, N)
    u = pow(a // g, -1, N)  # a//g is prime to p since N is a prime power
    return (v * u) % N


@dataclass(frozen=True, eq=False)
class Mat:
    """A matrix over a RingSpec with entries reduced to 0..p^e-1."""

    ring: RingSpec
    a: np.ndarray

    def __post_init__(self) -> None:
        arr = self.ring.reduce(self.a)
        if arr.ndim != 2:
            raise ValueError("Mat requires a 2-D array")
        object.__setattr__(self, "a", arr)

    @classmethod
    def from_rows(cls, ring: RingSpec, rows: Sequence[Sequence[int]]) -> "Mat":
        return cls(ring, np.array(rows, dtype=np.int64).reshape(len(rows), -1))

    @classmethod
    def identity(cls, ring: RingSpec, n: int) -> "Mat":
        return cls(ring, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, ring: RingSpec, rows: int, cols: int) -> "Mat":
        return cls(ring, np.zeros((rows, cols), dtype=np.int64))

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ring != other.ring:
            raise ValueError("ring mismatch")
        return Mat(self.ring, (self.a @ other.a) % self.ring.modulus)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Mat)
            and self.ring == other.ring
            and self.a.shape == other.a.shape
            and np.array_equal(self.a, other.a)
        )


@dataclass(frozen=True, eq=False)
class CanonicalBasis:
    """Howell-form basis of a row space in (Z/p^e)^ncols.

    pivots[i] = (column, value) of row i; pivot values are p-powers and
    strictly increase in column.  Bit-identical arrays <=> equal spans.
    """

    ring: RingSpec
    ncols: int
    mat: np.ndarray
    pivots: tuple[tuple[int, int], ...]

    @property
    def nrows(self) -> int:
        return self.mat.shape[0]

    @property
    def dim(self) -> int:
        """Rank of the span; only meaningful over a field (e = 1)."""
        if not self.ring.is_field:
            raise ValueError("dim is defined over the field case e = 1 only")
        return self.nrows

    def span_log_size(self) -> int:
        """log_p of the number of elements of the span."""
        total = 0
        for _, g in self.pivots:
            k = 0
            gg = g
            while gg > 1:
                gg //= self.ring.p
                k += 1
            total += self.ring.e - k
        return total

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CanonicalBasis)
            and self.ring == other.ring
            and self.ncols == other.ncols
            and self.mat.shape == other.mat.shape
            and np.array_equal(self.mat, other.mat)
        )

    def reduce_rows(self, X: np.ndarray) -> np.ndarray:
        """Canonical residues of the rows of X modulo the span."""
        N = self.ring.modulus
        X = np.atleast_2d(np.asarray(X, dtype=np.int64)) % N
        if self.nrows == 0 or X.size == 0:
            return X
        if self.ring.is_field:
            pivcols = [c for c, _ in self.pivots]
            return (X - (X[:, pivcols] @ self.mat)) % N
        X = X.copy()
        for i, (c, g) in enumerate(self.pivots):
            q = X[:, c] // g
            if np.any(q):
                X = (X - np.outer(q, self.mat[i])) % N
        return X

    def reduce(self, v: np.ndarray) -> np.ndarray:
        return self.reduce_rows(np.asarray(v, dtype=np.int64).reshape(1, -1))[0]

    def contains(self, v) -> bool:
        return not np.any(self.reduce(v))

    def contains_rows(self, X) -> bool:
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        if X.shape[0] == 0:
            return True
        return not np.any(self.reduce_rows(X))

    def is_subspace_of(self, other: "CanonicalBasis") -> bool:
        return other.contains_rows(self.mat)

    def coords(self, v) -> Optional[np.ndarray]:
        """Coefficients c with c @ mat = v, or None if v is not in the span.

        Deterministic: c is read off by the Howell back-substitution order.
        """
        N = self.ring.modulus
        v = np.asarray(v, dtype=np.int64).reshape(-1) % N
        c = np.zeros(self.nrows, dtype=np.int64)
        for i, (col, g) in enumerate(self.pivots):
            q = int(v[col]) // g
            if q:
                c[i] = q
                v = (v - q * self.mat[i]) % N
        if np.any(v):
            return None
        return c

    def coords_rows(self, X) -> Optional[np.ndarray]:
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        out = np.zeros((X.shape[0], self.nrows), dtype=np.int64)
        for i, row in enumerate(X):
            c = self.coords(row)
            if c is None:
                return None
            out[i] = c
        return out

    def section_cols(self) -> list[int]:
        """Columns without a pivot: a section basis of the quotient (e = 1)."""
        pivset = {c for c, _ in self.pivots}
        return [j for j in range(self.ncols) if j not in pivset]


def _empty_basis(ring: RingSpec, ncols: int) -> CanonicalBasis:
    return CanonicalBasis(ring, ncols, np.zeros((0, ncols), dtype=np.int64), ())


def _rref_field(p: int, A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Vectorized reduced row echelon form over F_p (dense fast path)."""
    A = (np.asarray(A, dtype=np.int64) % p).copy()
    m, n = A.shape
    pivcols: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            A[rows] = (A[rows] - np.outer(col[rows], A[r])) % p
        pivcols.append(c)
        r += 1
    return A[: len(pivcols)], pivcols


class _HowellBuilder:
    """Incremental Howell-form accumulator (any e)."""

    def __init__(self, ring: RingSpec, ncols: int):
        self.ring = ring
        self.N = ring.modulus
        self.ncols = ncols
        self.piv: dict[int, np.ndarray] = {}

    def add_row(self, v: np.ndarray) -> None:
        N = self.N
        queue = [np.asarray(v, dtype=np.int64) % N]
        while queue:
            v = queue.pop()
            nz = np.nonzero(v)[0]
            if nz.size == 0:
                continue
            j = int(nz[0])
            if j not in self.piv:
                v = _pivot_normalize(v, j, N)
                self.piv[j] = v
                g = int(v[j])
                if g > 1:
                    queue.append((N // g) * v % N)
                continue
            r = self.piv[j]
            a = int(r[j])
            b = int(v[j])
            if b % a == 0:
                queue.append((v - (b // a) * r) % N)
                continue
            d, s, t = _xgcd(a, b)
            new = (s * r + t * v) % N
            self.piv[j] = new
            queue.append((r - (a // d) * new) % N)
            queue.append((v - (b // d) * new) % N)
            if d > 1:
                queue.append((N // d) * new % N)

    def add_rows(self, X: np.ndarray) -> None:
        for row in np.atleast_2d(np.asarray(X, dtype=np.int64)):
            self.add_row(row)

    def finish(self) -> CanonicalBasis:
        N = self.N
        cols = sorted(self.piv)
        if not cols:
            return _empty_basis(self.ring, self.ncols)
        M = np.stack([self.piv[c] for c in cols]).astype(np.int64)
        for i, c in enumerate(cols):
            g = int(M[i, c])
            if i > 0:
                q = M[:i, c] // g
                if np.any(q):
                    M[:i] = (M[:i] - np.outer(q, M[i])) % N
        pivots = tuple((c, int(M[i, c])) for i, c in enumerate(cols))
        return CanonicalBasis(self.ring, self.ncols, M, pivots)


def howell_array(ring: RingSpec, A: np.ndarray) -> CanonicalBasis:
    """Canonical (Howell) basis of the row space of A."""
    A = np.atleast_2d(ring.reduce(A))
    ncols = A.shape[1]
    if A.shape[0] == 0:
        return _empty_basis(ring, ncols)
    if ring.is_field:
        R, pivcols = _rref_field(ring.p, A)
        pivots = tuple((c, 1) for c in pivcols)
        return CanonicalBasis(ring, ncols, R.astype(np.int64), pivots)
    builder = _HowellBuilder(ring, ncols)
    builder.add_rows(A)
    return builder.finish()


def howell_array_sparse(ring: RingSpec, A: np.ndarray) -> CanonicalBasis:
    """Howell form computed on a dict-of-columns row layout.

    Independent of the dense path; must produce identical canonical
    forms.  Used to cross-check the dense implementation.
    """
    N = ring.modulus
    A = np.atleast_2d(ring.reduce(A))
    ncols = A.shape[1]
    piv: dict[int, dict[int, int]] = {}

    def lead(row: dict[int, int]) -> int:
        return min(row)

    queue = []
    for r in A:
        row = {int(j): int(r[j]) for j in np.nonzero(r)[0]}
        if row:
            queue.append(row)
    while queue:
        row = queue.pop()
        row = {j: x % N for j, x in row.items() if x % N}
        if not row:
            continue
        j = lead(row)
        if j not in piv:
            a = row[j]
            g = gcd(a, N)
            u = pow(a // g, -1, N)
            row = {c: (x * u) % N for c, x in row.items() if (x * u) % N}
            piv[j] = row
            if g > 1:
                k = N // g
                queue.append({c: (x * k) % N for c, x in row.items()})
            continue
        r0 = piv[j]
        a, b = r0[j], row[j]
        if b % a == 0:
            q = b // a
            merged = dict(row)
            for c, x in r0.items():
                merged[c] = (merged.get(c, 0) - q * x) % N
            queue.append(merged)
            continue
        d, s, t = _xgcd(a, b)
        new: dict[int, int] = {}
        for c in set(r0) | set(row):
            new[c] = (s * r0.get(c, 0) + t * row.get(c, 0)) % N
        new = {c: x for c, x in new.items() if x}
        piv[j] = new
        for old, coeff in ((r0, a // d), (row, b // d)):
            rem = dict(old)
            for c, x in new.items():
                rem[c] = (rem.get(c, 0) - coeff * x) % N
            queue.append(rem)
        if d > 1:
            k = N // d
            queue.append({c: (x * k) % N for c, x in new.items()})
    cols = sorted(piv)
    if not cols:
        return _empty_basis(ring, ncols)
    M = np.zeros((len(cols), ncols), dtype=np.int64)
    for i, c in enumerate(cols):
        for cc, x in piv[c].items():
            M[i, cc] = x
    for i, c in enumerate(cols):
        g = int(M[i, c])
        if i > 0:
            q = M[:i, c] // g
            if np.any(q):
                M[:i] = (M[:i] - np.outer(q, M[i])) % N
    pivots = tuple((c, int(M[i, c])) for i, c in enumerate(cols))
    return CanonicalBasis(ring, ncols, M, pivots)


def howell_form(M: Mat, method: str = "dense") -> CanonicalBasis:
    """Canonical generating set of the row span of M.

    Idempotent and span-preserving; `method="sparse"` selects the
    independent dict-based path (identical output required).
    """
    if method == "dense":
        return howell_array(M.ring, M.a)
    if method == "sparse":
        return howell_array_sparse(M.ring, M.a)
    raise ValueError(f"unknown method {method!r}")


def span_sum(ring: RingSpec, parts: Iterable[np.ndarray]) -> CanonicalBasis:
    """Howell basis of the sum of the row spaces of the given arrays."""
    mats = [np.atleast_2d(np.asarray(p, dtype=np.int64)) for p in parts]
    if not mats:
        raise ValueError("span_sum of no parts: ambient dimension unknown")
    ncols = mats[0].shape[1]
    filled = [m for m in mats if m.shape[0]]
    if not filled:
        return _empty_basis(ring, ncols)
    return howell_array(ring, np.concatenate(filled, axis=0))


def kernel_array(ring: RingSpec, A: np.ndarray) -> CanonicalBasis:
    """Left kernel {x : x @ A = 0} as a canonical basis."""
    A = np.atleast_2d(ring.reduce(A))
    m, n = A.shape
    if m == 0:
        return _empty_basis(ring, 0)
    if ring.is_field:
        # right kernel of A^T, extracted from its RREF
        R, pivcols = _rref_field(ring.p, A.T)
        pivset = set(pivcols)
        free = [j for j in range(m) if j not in pivset]
        if not free:
            return _empty_basis(ring, m)
        K = np.zeros((len(free), m), dtype=np.int64)
        for idx, f in enumerate(free):
            K[idx, f] = 1
            for i, c in enumerate(pivcols):
                K[idx, c] = (-int(R[i, f])) % ring.p
        return howell_array(ring, K)
    aug = np.concatenate([A, np.eye(m, dtype=np.int64)], axis=1)
    H = howell_array(ring, aug)
    keep = [i for i in range(H.nrows) if not np.any(H.mat[i, :n])]
    if not keep:
        return _empty_basis(ring, m)
    return howell_array(ring, H.mat[keep, n:])


def kernel(M: Mat) -> CanonicalBasis:
    return kernel_array(M.ring, M.a)


def rank_array(ring: RingSpec, A: np.ndarray) -> int:
    """Number of Howell rows (= rank when e = 1)."""
    return howell_array(ring, A).nrows


class RowSolver:
    """Prepared solver for repeated x @ A = b queries against a fixed A.

    Built once from the Howell form of [A | I]; each solve is a single
    back-substitution pass.  The returned x is the deterministic choice
    of the Howell-form reduction order.
    """

    def __init__(self, ring: RingSpec, A: np.ndarray):
        self.ring = ring
        A = np.atleast_2d(ring.reduce(A))
        self.m, self.n = A.shape
        aug = np.concatenate([A, np.eye(self.m, dtype=np.int64)], axis=1)
        H = howell_array(ring, aug)
        lead = [i for i in range(H.nrows) if np.any(H.mat[i, : self.n])]
        self.hmat = H.mat[lead, : self.n]
        self.umat = H.mat[lead, self.n :]
        self.pivots = [
            (int(np.nonzero(self.hmat[i])[0][0]), int(self.hmat[i][np.nonzero(self.hmat[i])[0][0]]))
            for i in range(len(lead))
        ]
        self._unit = all(g == 1 for _, g in self.pivots)
        self._pivcols = [c for c, _ in self.pivots]

    def solve(self, b) -> Optional[np.ndarray]:
        N = self.ring.modulus
        b = np.asarray(b, dtype=np.int64).reshape(-1) % N
        if b.shape[0] != self.n:
            raise ValueError("dimension mismatch")
        if self._unit and self.ring.is_field:
            q = b[self._pivcols]
            rem = (b - q @ self.hmat) % N
            if np.any(rem):
                return None
            return (q @ self.umat) % N
        x = np.zeros(self.m, dtype=np.int64)
        for i, (c, g) in enumerate(self.pivots):
            q = int(b[c]) // g
            if q:
                b = (b - q * self.hmat[i]) % N
                x = (x + q * self.umat[i]) % N
        if np.any(b):
            return None
        return x

    def solve_rows(self, B: np.ndarray) -> Optional[np.ndarray]:
        B = np.atleast_2d(np.asarray(B, dtype=np.int64))
        out = np.zeros((B.shape[0], self.m), dtype=np.int64)
        for i, row in enumerate(B):
            x = self.solve(row)
            if x is None:
                return None
            out[i] = x
        return out


def solve_array(ring: RingSpec, A: np.ndarray, b) -> Optional[np.ndarray]:
    return RowSolver(ring, A).solve(b)


def solve(A: Mat, b) -> Optional[np.ndarray]:
    """Some x with x @ A = b iff b lies in the row span of A, else None."""
    return solve_array(A.ring, A.a, b)


def preimage_kernel(
    ring: RingSpec,
    blocks: Sequence[np.ndarray],
    rel: Optional[CanonicalBasis] = None,
) -> CanonicalBasis:
    """{x : x @ M_i in span(rel) for every block M_i}, as a canonical basis.

    With rel = None the conditions are x @ M_i = 0 (a joint kernel).
    """
    blocks = [np.atleast_2d(ring.reduce(B)) for B in blocks]
    if not blocks:
        raise ValueError("need at least one block")
    n = blocks[0].shape[0]
    wide = np.concatenate(blocks, axis=1)
    if rel is None or rel.nrows == 0:
        return kernel_array(ring, wide)
    r = rel.nrows
    k = len(blocks)
    stacked = np.zeros((n + k * r, wide.shape[1]), dtype=np.int64)
    stacked[:n] = wide
    off = 0
    for i, B in enumerate(blocks):
        w = B.shape[1]
        stacked[n + i * r : n + (i + 1) * r, off : off + w] = rel.mat
        off += w
    K = kernel_array(ring, stacked)
    if K.nrows == 0:
        return _empty_basis(ring, n)
    return howell_array(ring, K.mat[:, :n])


def split_test(
    pi: Mat,
    constraints: Sequence[tuple[Mat, Mat]] = (),
    target_relations: Optional[Mat] = None,
) -> Optional[Mat]:
    """Search for a section S of the surjection pi, as an exact linear system.

    pi is an (a x b) matrix, a map Lambda^a -> Lambda^b (rows act on the
    right); target_relations R presents the target as Lambda^b / span(R).
    A section is S (b x a) with S @ pi = I modulo the relations, killing
    the relations, and intertwining every constraint pair (L_i, R_i):
    L_i @ S = S @ R_i.  Returns the section or None; raises ValueError
    when pi is not surjective onto the presented target.
    """
    ring = pi.ring
    N = ring.modulus
    P = pi.a
    a, b = P.shape
    relmat = (
        np.zeros((0, b), dtype=np.int64)
        if target_relations is None
        else np.atleast_2d(ring.reduce(target_relations.a))
    )
    onto = howell_array(ring, np.concatenate([P, relmat], axis=0))
    if onto.span_log_size() != ring.e * b:
        raise ValueError("not a surjection")
    nun = b * a
    Ia = np.eye(a, dtype=np.int64)
    Ib = np.eye(b, dtype=np.int64)
    eq_blocks = []
    rhs_blocks = []
    # S @ P + Y @ relmat = I_b   (Y are auxiliary unknowns when relations exist)
    eq_blocks.append(np.kron(Ib, P))
    rhs_blocks.append(np.eye(b, dtype=np.int64).reshape(-1))
    for L, R in constraints:
        eq_blocks.append((np.kron(L.a.T, Ia) - np.kron(Ib, R.a)) % N)
        rhs_blocks.append(np.zeros(b * a, dtype=np.int64))
    r = relmat.shape[0]
    if r:
        eq_blocks.append(np.kron(relmat.T, Ia) % N)  # relmat @ S = 0
        rhs_blocks.append(np.zeros(r * a, dtype=np.int64))
    E = np.concatenate(eq_blocks, axis=1) % N
    rhs = np.concatenate(rhs_blocks)
    if r:
        # widen with the Y unknowns, touching only the first equation block
        Ey = np.zeros((r * b, E.shape[1]), dtype=np.int64)
        Ey[:, : b * b] = np.kron(Ib, relmat)
        E = np.concatenate([E, Ey], axis=0)
    x = solve_array(ring, E, rhs)
    if x is None:
        return None
    S = x[:nun].reshape(b, a) % N
    return Mat(ring, S)
