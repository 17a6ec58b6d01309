"""The finite Hecke algebra of GL2(F_p) and its module machinery.

The algebra is realized concretely as the equivariant endomorphisms of
the permutation module on cosets of the upper unipotent subgroup: one
basis operator per double coset, sending the marked coset indicator to
the indicator sum of its double coset.  The algebra product is operator
composition (apply the right factor first); module elements are rows,
so a right module multiplies coefficient vectors by its action matrices
in algebra order.

The tensor functor pairs a right module M with the permutation module:
K(M) = M (x) J over the algebra, presented as an explicit quotient with
the inherited group action.  Flatness of J over the algebra is decided
as a split-surjection problem: finitely generated flat = projective over
an Artinian algebra.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .exactalg import (
    CanonicalBasis,
    Mat,
    RingSpec,
    RowSolver,
    VerificationBug,
    howell_array,
    kernel_array,
    preimage_kernel,
    span_sum,
    split_test,
)
from .grouprep import GModule, build_group, invariants, jbar
from .report import FAIL, PASS, RECORDED, LemmaReport


@dataclass(frozen=True, eq=False)
class HeckeAlgebra:
    """Basis by double cosets, structure constants, and the J-realization."""

    ring: RingSpec
    p: int
    J: GModule
    basis_mats: list[np.ndarray]  # operator of each double coset on J
    double_cosets: list[list[int]]  # coset indices per double coset
    struct: np.ndarray  # struct[u, v, w]: coefficient of w in T_u * T_v
    unit: int
    base_coset_idx: int

    @property
    def dim(self) -> int:
        return len(self.basis_mats)

    def left_action(self, coeffs: np.ndarray) -> np.ndarray:
        """Operator on J of the algebra element with the given coefficients."""
        N = self.ring.modulus
        out = np.zeros_like(self.basis_mats[0])
        for w, cw in enumerate(np.asarray(coeffs, dtype=np.int64) % N):
            if cw:
                out = (out + cw * self.basis_mats[w]) % N
        return out

    def left_regular(self, u: int) -> np.ndarray:
        """Coefficient matrix of x -> T_u * x."""
        return self.struct[u] % self.ring.modulus

    def right_regular(self, u: int) -> np.ndarray:
        """Coefficient matrix of x -> x * T_u."""
        return self.struct[:, u, :] % self.ring.modulus

    def left_regular_combo(self, coeffs: np.ndarray) -> np.ndarray:
        N = self.ring.modulus
        return (np.tensordot(np.asarray(coeffs, dtype=np.int64) % N, self.struct, axes=(0, 0))) % N

    def _generated_subalgebra_full(self, gens: list[int]) -> bool:
        N = self.ring.modulus
        d = self.dim
        unit_vec = np.zeros((1, d), dtype=np.int64)
        unit_vec[0, self.unit] = 1
        span = howell_array(self.ring, unit_vec)
        while True:
            prods = []
            for g in gens:
                prods.append((span.mat @ self.left_regular(g)) % N)
                prods.append((span.mat @ self.right_regular(g)) % N)
            bigger = span_sum(self.ring, [span.mat] + prods)
            if bigger == span:
                return span.span_log_size() == self.ring.e * d
            span = bigger

    def algebra_generators(self) -> list[int]:
        """A small basis subset generating the unital algebra.

        Greedy growth followed by greedy pruning; the result is cached on
        the (immutable) instance.
        """
        cached = getattr(self, "_gen_cache", None)
        if cached is not None:
            return cached
        gens: list[int] = []
        for u in range(self.dim):
            if u == self.unit:
                continue
            gens.append(u)
            if self._generated_subalgebra_full(gens):
                break
        if not self._generated_subalgebra_full(gens):
            raise VerificationBug("generator search failed to fill the algebra")
        for u in list(gens):
            trial = [g for g in gens if g != u]
            if trial and self._generated_subalgebra_full(trial):
                gens = trial
        object.__setattr__(self, "_gen_cache", gens)
        return gens


@lru_cache(maxsize=None)
def build_hecke(p: int, e: int = 1) -> HeckeAlgebra:
    """Double-coset basis, structure constants, exhaustive associativity."""
    if p not in (2, 3, 5):
        raise ValueError("supported primes for the Hecke algebra: 2, 3, 5")
    ring = RingSpec(p, e)
    group = build_group("gl2", p)
    J = jbar(group, ring)
    reps = J.coset_reps  # type: ignore[attr-defined]
    of = J.coset_of  # type: ignore[attr-defined]
    n = len(reps)
    upper = group.upper_unipotent
    # orbits of right unipotent translation on cosets = double cosets
    seen = [False] * n
    double_cosets: list[list[int]] = []
    for i in range(n):
        if seen[i]:
            continue
        orbit = set()
        stack = [i]
        while stack:
            j = stack.pop()
            if j in orbit:
                continue
            orbit.add(j)
            for u in upper:
                k = of[mul2(reps[j], u, p)]
                if k not in orbit:
                    stack.append(k)
        for j in orbit:
            seen[j] = True
        double_cosets.append(sorted(orbit))
    double_cosets.sort(key=lambda o: o[0])
    d = len(double_cosets)
    if d != 2 * (p - 1) ** 2:
        raise VerificationBug(f"double coset count {d} != 2(p-1)^2")

    N = ring.modulus
    mats = []
    for orbit in double_cosets:
        m = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            for x in orbit:
                m[i, of[mul2(reps[x], reps[i], p)]] += 1
        mats.append(m % N)
    base_coset_idx = of[(1, 0, 0, 1)]
    unit = next(i for i, o in enumerate(double_cosets) if o == [base_coset_idx])

    # structure constants from the marked-vector image of each composite
    coset_to_dc = np.zeros(n, dtype=np.int64)
    for w, orbit in enumerate(double_cosets):
        for x in orbit:
            coset_to_dc[x] = w
    struct = np.zeros((d, d, d), dtype=np.int64)
    for u in range(d):
        for v in range(d):
            img = (mats[v] @ mats[u])[base_coset_idx] % N  # apply T_v first, then T_u
            coeffs = np.zeros(d, dtype=np.int64)
            for w, orbit in enumerate(double_cosets):
                coeffs[w] = img[orbit[0]]
            recon = np.zeros(n, dtype=np.int64)
            for w, orbit in enumerate(double_cosets):
                recon[orbit] = coeffs[w]
            if not np.array_equal(recon % N, img):
                raise VerificationBug("composite image is not double-coset invariant")
            struct[u, v] = coeffs
    alg = HeckeAlgebra(ring, p, J, mats, double_cosets, struct, unit, base_coset_idx)
    _verify_algebra(alg)
    return alg


def mul2(x, y, p):
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p)


def _verify_algebra(alg: HeckeAlgebra) -> None:
    N = alg.ring.modulus
    d = alg.dim
    # unit laws
    if not (np.array_equal(alg.struct[alg.unit], np.eye(d, dtype=np.int64) % N)
            and np.array_equal(alg.struct[:, alg.unit, :], np.eye(d, dtype=np.int64) % N)):
        raise VerificationBug("unit laws fail")
    # exhaustive associativity on the structure tensor
    left = np.einsum("uvx,xwy->uvwy", alg.struct, alg.struct) % N
    right = np.einsum("vwx,uxy->uvwy", alg.struct, alg.struct) % N
    if not np.array_equal(left, right):
        raise VerificationBug("associativity fails on a basis triple")
    # operators commute with the group action and compose per the tensor
    for g in alg.J.group.gens:
        A = alg.J.action(g)
        for m in alg.basis_mats:
            if not np.array_equal((m @ A) % N, (A @ m) % N):
                raise VerificationBug("basis operator is not equivariant")
    rng = np.random.default_rng(alg.p)
    for _ in range(20):
        u, v = int(rng.integers(0, d)), int(rng.integers(0, d))
        lhs = (alg.basis_mats[v] @ alg.basis_mats[u]) % N
        rhs = alg.left_action(alg.struct[u, v])
        if not np.array_equal(lhs, rhs):
            raise VerificationBug("structure constants disagree with composition")


@dataclass(frozen=True, eq=False)
class HeckeModule:
    """A right module over the algebra, by its basis action matrices.

    marked may carry a "cyclic" vector known to generate the module; the
    tensor machinery tries it before searching for generators.
    """

    alg: HeckeAlgebra
    rank: int
    action: list[np.ndarray]  # action[w]: m -> m @ action[w]
    name: str = ""
    marked: Optional[dict] = None

    def verify_axioms(self, exhaustive: bool = True, seed: int = 0) -> None:
        alg = self.alg
        N = alg.ring.modulus
        d = alg.dim
        if not np.array_equal(self.action[alg.unit] % N, np.eye(self.rank, dtype=np.int64) % N):
            raise VerificationBug("unit does not act as the identity")
        pairs = (
            [(u, v) for u in range(d) for v in range(d)]
            if exhaustive
            else [tuple(x) for x in np.random.default_rng(seed).integers(0, d, (50, 2))]
        )
        for u, v in pairs:
            lhs = (self.action[u] @ self.action[v]) % N
            rhs = np.zeros((self.rank, self.rank), dtype=np.int64)
            for w, cw in enumerate(alg.struct[u, v]):
                if cw:
                    rhs = (rhs + int(cw) % N * self.action[w]) % N
            if not np.array_equal(lhs, rhs):
                raise VerificationBug(f"right-module law fails at basis pair ({u}, {v})")


def free_module(alg: HeckeAlgebra, s: int = 1, name: str = "") -> HeckeModule:
    mats = []
    for w in range(alg.dim):
        r = alg.right_regular(w)
        big = np.zeros((s * alg.dim, s * alg.dim), dtype=np.int64)
        for k in range(s):
            big[k * alg.dim : (k + 1) * alg.dim, k * alg.dim : (k + 1) * alg.dim] = r
        mats.append(big)
    marked = None
    if s == 1:
        one = np.zeros(alg.dim, dtype=np.int64)
        one[alg.unit] = 1
        marked = {"cyclic": one}
    return HeckeModule(alg, s * alg.dim, mats, name or f"free^{s}", marked)


def right_stable_span(M: HeckeModule, vectors: np.ndarray) -> CanonicalBasis:
    ring = M.alg.ring
    span = howell_array(ring, np.atleast_2d(vectors))
    while True:
        images = [span.mat] + [(span.mat @ M.action[w]) % ring.modulus for w in range(M.alg.dim)]
        bigger = span_sum(ring, images)
        if bigger == span:
            return span
        span = bigger


def quotient_module(M: HeckeModule, rel: CanonicalBasis, name: str = "") -> HeckeModule:
    """Quotient by a right-stable span, in section coordinates (e = 1)."""
    ring = M.alg.ring
    if not ring.is_field:
        raise ValueError("coordinate quotients require e = 1")
    sec = rel.section_cols()
    mats = []
    for w in range(M.alg.dim):
        rows = rel.reduce_rows(M.action[w][sec, :])
        mats.append(rows[:, sec])
    marked = None
    if M.marked and "cyclic" in M.marked:
        marked = {"cyclic": rel.reduce(M.marked["cyclic"])[sec]}
    return HeckeModule(M.alg, len(sec), mats, name=name, marked=marked)


def random_modules_hecke(alg: HeckeAlgebra, seed: int, count: int):
    """Seeded right-module quotients of the free rank-1 module (e = 1)."""
    rng = np.random.default_rng(seed)
    free = free_module(alg, 1)
    full = alg.ring.e * alg.dim
    made = 0
    while made < count:
        k = int(rng.integers(1, 3))
        vecs = rng.integers(0, alg.ring.modulus, size=(k, alg.dim))
        span = right_stable_span(free, np.asarray(vecs, dtype=np.int64))
        if not 0 < span.span_log_size() < full:
            continue
        yield quotient_module(free, span, name=f"hq:s{seed}:{made}")
        made += 1


@dataclass(frozen=True, eq=False)
class TensorModule:
    """K(M) = M (x)_H J as an explicit quotient with its group action.

    ambient: coordinates of a free carrier (M (x) J for the balancing
    presentation, J^s for the generator presentation); rel: the relation
    span; base_pairing: the comparison map M -> K(M), row per M-basis vector.
    """

    alg: HeckeAlgebra
    ambient: int
    rel: CanonicalBasis
    action_gens: dict
    base_pairing: np.ndarray
    presentation: str

    def log_size(self) -> int:
        return self.alg.ring.e * self.ambient - self.rel.span_log_size()


def _module_generators(M: HeckeModule) -> tuple[list[np.ndarray], np.ndarray]:
    """Greedy module generators of M and the presentation matrix.

    A marked cyclic generator is tried first, then the basis vectors.
    Returns (generator vectors, P), where P maps the free module H^s
    onto M: row (k, w) is x_k @ action[w].
    """
    ring = M.alg.ring
    d = M.alg.dim
    candidates = []
    if M.marked and "cyclic" in M.marked:
        candidates.append(np.asarray(M.marked["cyclic"], dtype=np.int64) % ring.modulus)
    candidates.extend(np.eye(M.rank, dtype=np.int64))
    chosen: list[np.ndarray] = []
    span: Optional[CanonicalBasis] = None
    full = ring.e * M.rank
    for v in candidates:
        if not np.any(v) or (span is not None and span.contains(v)):
            continue
        chosen.append(v)
        rows = [(np.stack([v @ M.action[w] for w in range(d)]) % ring.modulus)]
        if span is not None:
            rows.append(span.mat)
        span = span_sum(ring, rows)
        if span.span_log_size() == full:
            break
    if M.rank == 0:
        return [], np.zeros((0, 0), dtype=np.int64)
    if span is None or span.span_log_size() != full:
        raise VerificationBug("module generator search failed")
    s = len(chosen)
    P = np.zeros((s * d, M.rank), dtype=np.int64)
    for k, v in enumerate(chosen):
        for w in range(d):
            P[k * d + w] = (v @ M.action[w]) % ring.modulus
    return chosen, P


def tensor_K(M: HeckeModule, presentation: str = "auto") -> TensorModule:
    """The tensor of M with J over the algebra.

    "balancing": ambient M (x) J, relations (m a) (x) x - m (x) (a x)
    for algebra generators a (sufficient: the relation span is bilinear
    in the module and vector slots, and generators reach every element).
    "generators": present M as a quotient of a free module and tensor
    the presentation; canonically the same module, far smaller to
    compute when rank(M) * rank(J) is large.
    """
    alg = M.alg
    ring = alg.ring
    n = alg.basis_mats[0].shape[0]
    if presentation == "auto":
        presentation = "balancing" if M.rank * n <= 256 else "generators"
    gens = alg.algebra_generators()
    if presentation == "balancing":
        r = M.rank
        eye_r = np.eye(r, dtype=np.int64)
        eye_n = np.eye(n, dtype=np.int64)
        rel_rows = []
        for u in gens:
            Ra = M.action[u]
            La = alg.basis_mats[u]
            rel_rows.append((np.kron(Ra, eye_n) - np.kron(eye_r, La)) % ring.modulus)
        rel = howell_array(ring, np.concatenate(rel_rows, axis=0))
        action = {}
        for g in alg.J.group.gens:
            action[g] = np.kron(eye_r, alg.J.action(g))
        base_pairing = np.zeros((r, r * n), dtype=np.int64)
        for i in range(r):
            base_pairing[i, i * n + alg.base_coset_idx] = 1
        return TensorModule(alg, r * n, rel, action, base_pairing, "balancing")
    if presentation != "generators":
        raise ValueError(f"unknown presentation {presentation!r}")
    if M.rank == 0:
        rel = howell_array(ring, np.zeros((0, 0), dtype=np.int64))
        return TensorModule(alg, 0, rel, {}, np.zeros((0, 0), dtype=np.int64), "generators")
    chosen, P = _module_generators(M)
    s = len(chosen)
    d = alg.dim
    Q = kernel_array(ring, P)
    rel_rows = []
    for q in Q.mat:
        block = np.zeros((n, s * n), dtype=np.int64)
        for k in range(s):
            coeffs = q[k * d : (k + 1) * d]
            if np.any(coeffs):
                block[:, k * n : (k + 1) * n] = alg.left_action(coeffs)
        rel_rows.append(block)
    rel = (
        howell_array(ring, np.concatenate(rel_rows, axis=0))
        if rel_rows
        else howell_array(ring, np.zeros((1, s * n), dtype=np.int64))
    )
    eye_s = np.eye(s, dtype=np.int64)
    action = {g: np.kron(eye_s, alg.J.action(g)) for g in alg.J.group.gens}
    solver = RowSolver(ring, P)
    base_pairing = np.zeros((M.rank, s * n), dtype=np.int64)
    for i in range(M.rank):
        v = np.zeros(M.rank, dtype=np.int64)
        v[i] = 1
        z = solver.solve(v)
        if z is None:
            raise VerificationBug("presentation does not reach a basis vector")
        for k in range(s):
            coeffs = z[k * d : (k + 1) * d]
            if np.any(coeffs):
                base_pairing[i, k * n : (k + 1) * n] = alg.left_action(coeffs)[alg.base_coset_idx]
    return TensorModule(alg, s * n, rel, action, base_pairing, "generators")


def check_vytastra(M: HeckeModule, presentation: str = "auto") -> LemmaReport:
    """Bijectivity of m -> m (x) indicator onto the unipotent invariants of K(M)."""
    t0 = time.monotonic()
    alg = M.alg
    ring = alg.ring
    desc = {"module": M.name or "anonymous", "p": alg.p, "e": ring.e, "rank": M.rank}
    K = tensor_K(M, presentation)
    upper_gen = alg.J.group.upper_gen
    A = K.action_gens[upper_gen] if upper_gen in K.action_gens else None
    if A is None:
        A = np.kron(np.eye(K.ambient // alg.basis_mats[0].shape[0], dtype=np.int64), alg.J.action(upper_gen))
    eye = np.eye(K.ambient, dtype=np.int64)
    inv_pre = preimage_kernel(ring, [(A - eye) % ring.modulus], K.rel)
    inv_pre = span_sum(ring, [inv_pre.mat, K.rel.mat])
    ker = preimage_kernel(ring, [K.base_pairing], K.rel)
    injective = ker.nrows == 0
    image = span_sum(ring, [K.base_pairing, K.rel.mat])
    onto = inv_pre.is_subspace_of(image)
    verdicts = {"injective": injective, "onto_invariants": onto, "bijective": injective and onto}
    dims = {
        "module_log": ring.e * M.rank,
        "invariants_log": inv_pre.span_log_size() - K.rel.span_log_size(),
        "tensor_log": K.log_size(),
    }
    status = PASS if all(verdicts.values()) else FAIL
    return LemmaReport(
        "vytastra", desc, status, verdicts, dims, {"presentation": K.presentation}, time.monotonic() - t0
    )


def check_flatness(p: int, e: int = 1, method: str = "auto") -> LemmaReport:
    """Split-test for the permutation module over the algebra.

    Finitely generated flat = projective over an Artinian algebra, so J
    is flat iff some (equivalently any) surjection H^r -> J splits as a
    module map.  Small instances go through the generic dense
    split_test; larger ones solve the equivalent generator-relation
    system, and any section found is re-verified by the exact section
    and intertwining identities.  `method` forces one route ("split_test"
    or "presentation"); the two must agree wherever both run.
    """
    t0 = time.monotonic()
    alg = build_hecke(p, e)
    ring = alg.ring
    n = alg.basis_mats[0].shape[0]
    d = alg.dim
    desc = {"p": p, "e": e, "dim_algebra": d, "dim_j": n}
    gens = alg.algebra_generators()

    # left-module generators of J over the algebra
    chosen: list[int] = []
    span: Optional[CanonicalBasis] = None
    full = ring.e * n
    for i in range(n):
        v = np.zeros(n, dtype=np.int64)
        v[i] = 1
        if span is not None and span.contains(v):
            continue
        chosen.append(i)
        orbit = np.stack([v @ m for m in alg.basis_mats]) % ring.modulus
        span = span_sum(ring, [orbit] if span is None else [orbit, span.mat])
        if span.span_log_size() == full:
            break
    if span is None or span.span_log_size() != full:
        raise VerificationBug("generator search over the algebra failed")
    r = len(chosen)
    P = np.zeros((r * d, n), dtype=np.int64)
    for k, i in enumerate(chosen):
        v = np.zeros(n, dtype=np.int64)
        v[i] = 1
        for w in range(d):
            P[k * d + w] = (v @ alg.basis_mats[w]) % ring.modulus

    def blockdiag(mat: np.ndarray) -> np.ndarray:
        big = np.zeros((r * d, r * d), dtype=np.int64)
        for k in range(r):
            big[k * d : (k + 1) * d, k * d : (k + 1) * d] = mat
        return big

    if method == "auto":
        method = "split_test" if n * r * d <= 4096 else "presentation"
    section: Optional[np.ndarray] = None
    if method == "split_test":
        constraints = [
            (Mat(ring, alg.basis_mats[u]), Mat(ring, blockdiag(alg.left_regular(u)))) for u in gens
        ]
        got = split_test(Mat(ring, P), constraints)
        section = None if got is None else got.a
    elif method == "presentation":
        section = _section_via_presentation(alg, chosen, P, gens)
    else:
        raise ValueError(f"unknown method {method!r}")

    verdict = section is not None
    if section is not None:
        N = ring.modulus
        if not np.array_equal((section @ P) % N, np.eye(n, dtype=np.int64)):
            raise VerificationBug("section identity fails")
        for u in gens:
            lhs = (alg.basis_mats[u] @ section) % N
            rhs = (section @ blockdiag(alg.left_regular(u))) % N
            if not np.array_equal(lhs, rhs):
                raise VerificationBug("section is not a module map")
    dims = {"generators": r, "dim_algebra": d, "dim_j": n}
    details: dict = {"method": method}
    if section is not None:
        details["section"] = [int(x) for x in section.reshape(-1)]
    return LemmaReport(
        "flatness",
        desc,
        PASS if verdict else FAIL,
        {"flat": verdict},
        dims,
        details,
        time.monotonic() - t0,
    )


def _section_via_presentation(
    alg: HeckeAlgebra, chosen: list[int], P: np.ndarray, gens: list[int]
) -> Optional[np.ndarray]:
    """Solve for a module-map section through the presentation of J.

    A module map out of J is pinned by its values y_k on the module
    generators, subject to killing every relation among them; adding the
    section equations y_k @ P = x_k turns existence into one small exact
    linear solve.  Unknowns: r vectors in the free module's coordinates.
    """
    ring = alg.ring
    N = ring.modulus
    n = alg.basis_mats[0].shape[0]
    d = alg.dim
    r = len(chosen)
    m = r * d  # free module coordinate count
    K = kernel_array(ring, P)

    def blockdiag_combo(coeffs: np.ndarray) -> np.ndarray:
        one = alg.left_regular_combo(coeffs)
        big = np.zeros((m, m), dtype=np.int64)
        for k in range(r):
            big[k * d : (k + 1) * d, k * d : (k + 1) * d] = one
        return big

    # unknown vector Y = [y_1 | ... | y_r], each y_k of length m
    blocks = []
    # relation compatibility: sum_k kappa_k . y_k = 0 for every kernel row
    for q in K.mat:
        E = np.zeros((r * m, m), dtype=np.int64)
        for k in range(r):
            coeffs = q[k * d : (k + 1) * d]
            if np.any(coeffs):
                E[k * m : (k + 1) * m] = blockdiag_combo(coeffs)
        blocks.append(E)
    # section equations: y_k @ P = x_k
    sect = np.zeros((r * m, r * n), dtype=np.int64)
    rhs_sect = np.zeros(r * n, dtype=np.int64)
    for k, i in enumerate(chosen):
        sect[k * m : (k + 1) * m, k * n : (k + 1) * n] = P
        rhs_sect[k * n + i] = 1
    wide = np.concatenate(blocks + [sect], axis=1) if blocks else sect
    rhs = np.concatenate([np.zeros(sum(b.shape[1] for b in blocks), dtype=np.int64), rhs_sect])
    y = RowSolver(ring, wide).solve(rhs)
    if y is None:
        return None
    ys = [y[k * m : (k + 1) * m] for k in range(r)]
    # assemble the full section matrix on J via deterministic preimages
    solver = RowSolver(ring, P)
    S = np.zeros((n, m), dtype=np.int64)
    for j in range(n):
        v = np.zeros(n, dtype=np.int64)
        v[j] = 1
        z = solver.solve(v)
        if z is None:
            raise VerificationBug("presentation does not reach a basis vector")
        row = np.zeros(m, dtype=np.int64)
        for k in range(r):
            coeffs = z[k * d : (k + 1) * d]
            if np.any(coeffs):
                row = (row + ys[k] @ blockdiag_combo(coeffs)) % N
        S[j] = row
    return S


def invariants_jbar_star(p: int, e: int = 1) -> LemmaReport:
    """dim of the unipotent invariants of J equals the algebra dimension."""
    t0 = time.monotonic()
    alg = build_hecke(p, e)
    ring = alg.ring
    inv = invariants(alg.J, [alg.J.group.upper_gen])
    lhs = inv.span_log_size()
    rhs = ring.e * alg.dim
    verdict = lhs == rhs
    return LemmaReport(
        "jbar_star_invariants",
        {"p": p, "e": e},
        PASS if verdict else FAIL,
        {"invariants_match_algebra_dim": verdict},
        {"invariants_log": lhs, "dim_algebra": alg.dim},
        {},
        time.monotonic() - t0,
    )


def hecke_module_from_free_quotient(alg: HeckeAlgebra, rel: CanonicalBasis, name: str = "") -> HeckeModule:
    return quotient_module(free_module(alg, 1), rel, name)


def check_dim(p: int, e: int = 1) -> LemmaReport:
    t0 = time.monotonic()
    alg = build_hecke(p, e)
    expect = 2 * (p - 1) ** 2
    verdict = alg.dim == expect
    return LemmaReport(
        "hecke_dim",
        {"p": p, "e": e},
        PASS if verdict else FAIL,
        {"dim_matches": verdict},
        {"dim": alg.dim, "expected": expect},
        {},
        time.monotonic() - t0,
    )


def check_assoc(p: int, e: int = 1) -> LemmaReport:
    """Exhaustive associativity and unit laws on the structure tensor."""
    t0 = time.monotonic()
    alg = build_hecke(p, e)
    N = alg.ring.modulus
    left = np.einsum("uvx,xwy->uvwy", alg.struct, alg.struct) % N
    right = np.einsum("vwx,uxy->uvwy", alg.struct, alg.struct) % N
    assoc = bool(np.array_equal(left, right))
    d = alg.dim
    unit_ok = bool(
        np.array_equal(alg.struct[alg.unit] % N, np.eye(d, dtype=np.int64) % N)
        and np.array_equal(alg.struct[:, alg.unit, :] % N, np.eye(d, dtype=np.int64) % N)
    )
    verdicts = {"associative": assoc, "unit_laws": unit_ok}
    return LemmaReport(
        "hecke_assoc",
        {"p": p, "e": e},
        PASS if all(verdicts.values()) else FAIL,
        verdicts,
        {"dim": d, "triples": d**3},
        {},
        time.monotonic() - t0,
    )


def _as_recorded(report: LemmaReport) -> LemmaReport:
    report.details["note"] = "open-question regime: verdict recorded, not asserted"
    report.status = RECORDED
    return report


def hecke_suite(
    p: int,
    e: int = 1,
    checks: tuple[str, ...] = ("dim", "assoc", "vytastra", "flatness"),
    seed: int = 0,
    n_random: int = 0,
) -> list[LemmaReport]:
    """The full algebra suite.

    For e = 1 every verdict is asserted; for e > 1 the flatness and
    comparison-map verdicts are recorded as data without assertion.
    """
    reports: list[LemmaReport] = []
    alg = build_hecke(p, e)
    if "dim" in checks:
        reports.append(check_dim(p, e))
        reports.append(invariants_jbar_star(p, e))
    if "assoc" in checks:
        reports.append(check_assoc(p, e))
    if "vytastra" in checks:
        rep = check_vytastra(free_module(alg, 1, name="free:1"))
        reports.append(rep if e == 1 else _as_recorded(rep))
        if e == 1:
            for M in random_modules_hecke(alg, seed, n_random):
                M.verify_axioms(exhaustive=False, seed=seed)
                reports.append(check_vytastra(M))
    if "flatness" in checks:
        rep = check_flatness(p, e)
        reports.append(rep if e == 1 else _as_recorded(rep))
    return reports
