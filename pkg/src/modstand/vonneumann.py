"""Finite-dimensional von Neumann algebras and their modular data.

A *-subalgebra of M_n(C) is stored through a Hilbert-Schmidt-orthonormal
basis.  With a cyclic separating vector the real span of hermitian elements
applied to it is a standard subspace whose modular objects realize the
algebra's modular theory: J conjugates the algebra onto its commutant and the
modular flow preserves the algebra.  The type-I model of all matrices acting
on Hilbert-Schmidt space by left multiplication comes with closed forms and
with the positive-matrix cone used for the polar split of cyclic separating
vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionOverflow,
    NotCyclicSeparating,
    NotInvertible,
    NotSubalgebra,
)
from .realified import (
    ANTILINEAR,
    COMPLEX_LINEAR,
    RLOperator,
    RealSubspace,
    complex_gaussian,
    matrix_from_json,
    matrix_to_json,
    operator_function,
    realify_antilinear,
    realify_linear,
    subspace_contains,
    subspace_distance,
)
from .standard import StandardSubspace, modular_objects


def _hs_orthonormalize(mats: list, rtol: float = 1e-9) -> np.ndarray:
    """Stack matrices as rows and orthonormalize w.r.t. the HS inner product."""
    if not mats:
        return np.zeros((0, 0), dtype=complex)
    rows = np.stack([np.asarray(m, dtype=complex).ravel() for m in mats])
    u, s, vt = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((0, rows.shape[1]), dtype=complex)
    return vt[s > rtol * s[0]]


@dataclass(frozen=True)
class StarAlgebra:
    """Unital *-closed subalgebra of M_n(C), HS-orthonormal basis rows."""

    n: int
    basis: np.ndarray  # (k, n*n) complex, orthonormal rows

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def matrices(self) -> list:
        return [self.basis[k].reshape(self.n, self.n) for k in range(self.dim)]

    def project(self, m: np.ndarray) -> np.ndarray:
        v = np.asarray(m, dtype=complex).ravel()
        return (self.basis.conj() @ v) @ self.basis

    def membership_residual(self, m: np.ndarray) -> float:
        v = np.asarray(m, dtype=complex).ravel()
        return float(np.linalg.norm(v - self.project(m)))

    def validate(self, tol: float = 1e-10):
        if self.membership_residual(np.eye(self.n)) > tol * np.sqrt(self.n):
            raise NotSubalgebra("identity is missing from the span")
        k, n = self.dim, self.n
        stack = self.basis.reshape(k, n, n)
        adjoints = np.conj(np.transpose(stack, (0, 2, 1))).reshape(k, n * n)
        if self._rows_residual(adjoints) > tol:
            raise NotSubalgebra("span is not *-closed")
        # all pairwise products, in row-chunks to bound memory
        chunk = max(1, 4096 // max(k, 1))
        for start in range(0, k, chunk):
            part = stack[start: start + chunk]
            prods = np.einsum("anm,bml->abnl", part, stack, optimize=True)
            if self._rows_residual(prods.reshape(-1, n * n)) > tol:
                raise NotSubalgebra("span is not closed under products")

    def _rows_residual(self, rows: np.ndarray) -> float:
        """Worst projection defect of vec'd matrices against the span."""
        coeff = rows @ self.basis.conj().T
        resid = rows - coeff @ self.basis
        return float(np.sqrt(np.max(np.sum(np.abs(resid) ** 2, axis=1))))

    def hermitian_basis(self) -> list:
        """Real basis of the hermitian part; its real dimension equals dim."""
        out = []
        for m in self.matrices():
            out.append(0.5 * (m + m.conj().T))
            out.append(0.5j * (m - m.conj().T))
        return _hermitian_orthonormalize(out)

    def contains_algebra(self, other: "StarAlgebra", tol: float = 1e-9) -> bool:
        return all(self.membership_residual(m) < tol for m in other.matrices())

    def equals(self, other: "StarAlgebra", tol: float = 1e-9) -> bool:
        return self.dim == other.dim and self.contains_algebra(other, tol)

    def projector(self) -> np.ndarray:
        """HS-orthogonal projection onto the span, acting on vec'd matrices."""
        return self.basis.T @ self.basis.conj()

    def distance(self, other: "StarAlgebra") -> float:
        """Operator-norm distance of the HS projections onto the two spans."""
        return float(np.linalg.norm(self.projector() - other.projector(), 2))

    def to_json(self):
        return {"n": self.n, "basis": [matrix_to_json(m) for m in self.matrices()]}

    @staticmethod
    def from_json(data) -> "StarAlgebra":
        mats = [matrix_from_json(m) for m in data["basis"]]
        return StarAlgebra(data["n"], _hs_orthonormalize(mats))


def _hermitian_orthonormalize(mats: list, rtol: float = 1e-9) -> list:
    """Orthonormalize hermitian matrices over the reals (HS inner product)."""
    if not mats:
        return []
    rows = np.stack([
        np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in mats
    ])
    u, s, vt = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return []
    keep = vt[s > rtol * s[0]]
    n = int(np.sqrt(rows.shape[1] // 2))
    return [row[: n * n].reshape(n, n) + 1j * row[n * n:].reshape(n, n)
            for row in keep]


def generate_algebra(n: int, generators: list, cap: int | None = None) -> StarAlgebra:
    """Smallest unital *-closed span containing the generators.

    Iterates left multiplication by the generators and their adjoints until
    the span stabilizes; a span containing 1 and stable under all of these
    consists exactly of the linear combinations of generator words, which is
    the generated algebra.  Raises DimensionOverflow beyond the cap
    (default n^2, always enough).
    """
    cap = n * n if cap is None else cap
    gens = []
    for g in generators:
        g = np.asarray(g, dtype=complex)
        gens.append(g)
        gens.append(g.conj().T)
    seed = [np.eye(n, dtype=complex)] + gens
    basis = _hs_orthonormalize(seed)
    gen_stack = np.stack(gens) if gens else np.zeros((0, n, n), dtype=complex)
    while True:
        stack = basis.reshape(-1, n, n)
        if gen_stack.shape[0]:
            prods = np.einsum("gnm,kml->gknl", gen_stack, stack,
                              optimize=True).reshape(-1, n * n)
            rows = np.vstack([basis, prods])
        else:
            rows = basis
        new_basis = _hs_orthonormalize(list(rows))
        if new_basis.shape[0] > cap:
            raise DimensionOverflow(f"algebra dimension exceeded cap {cap}")
        if new_basis.shape[0] == basis.shape[0]:
            return StarAlgebra(n, new_basis)
        basis = new_basis


def _commutant_of(n: int, mats: list) -> StarAlgebra:
    iden = np.eye(n)
    rows = [np.kron(m, iden) - np.kron(iden, m.T) for m in mats]
    stacked = np.vstack(rows) if rows else np.zeros((1, n * n), dtype=complex)
    if stacked.shape[0] < n * n:
        pad = np.zeros((n * n - stacked.shape[0], n * n), dtype=complex)
        stacked = np.vstack([stacked, pad])
    _, s, vt = np.linalg.svd(stacked, full_matrices=False)
    keep = s <= 1e-9 * max(s[0], 1e-300)
    return StarAlgebra(n, _hs_orthonormalize(list(vt[keep].conj())))


def commutant(algebra: StarAlgebra) -> StarAlgebra:
    """All matrices commuting with the algebra, via a complex kernel solve.

    For large spans the solve first runs against a handful of random
    hermitian combinations of the basis; the candidate is accepted only if
    it verifiably commutes with the whole basis, otherwise the full (slower)
    constraint system decides.
    """
    n = algebra.n
    mats = algebra.matrices()
    if algebra.dim > 2 * n:
        rng = np.random.default_rng(1405)
        stack = algebra.basis.reshape(-1, n, n)
        combos = []
        for _ in range(min(6, algebra.dim)):
            w = rng.standard_normal(algebra.dim) \
                + 1j * rng.standard_normal(algebra.dim)
            c = np.tensordot(w, stack, axes=(0, 0))
            c /= np.linalg.norm(c.ravel())
            combos.append(c)
            combos.append(c.conj().T)
        candidate = _commutant_of(n, combos)
        if candidate.dim:
            x = candidate.basis.reshape(-1, n, n)
            lhs = np.einsum("knm,bml->kbnl", x, stack, optimize=True)
            rhs = np.einsum("bnm,kml->kbnl", stack, x, optimize=True)
            if np.max(np.abs(lhs - rhs)) < 1e-9:
                return candidate
    return _commutant_of(n, mats)


def vector_status(algebra: StarAlgebra, omega: np.ndarray) -> dict:
    """Cyclicity and separation of a vector, with a commutant cross-check."""
    omega = np.asarray(omega, dtype=complex).ravel()
    n = algebra.n
    orbit = np.stack([m @ omega for m in algebra.matrices()])
    rank = int(np.linalg.matrix_rank(orbit, tol=1e-9))
    cyclic = rank == n
    separating = rank == algebra.dim
    comm_orbit = np.stack([m @ omega for m in commutant(algebra).matrices()])
    comm_rank = int(np.linalg.matrix_rank(comm_orbit, tol=1e-9))
    if separating != (comm_rank == n):
        raise NotSubalgebra("separating test disagrees with commutant cyclicity")
    return {"cyclic": cyclic, "separating": separating, "orbit_rank": rank}


@dataclass(frozen=True)
class ModularData:
    algebra: StarAlgebra
    omega: np.ndarray
    subspace: StandardSubspace
    triple: object

    def validate(self, tol: float = 1e-10):
        omega_r = np.concatenate([self.omega.real, self.omega.imag])
        if np.linalg.norm(self.triple.j.matrix @ omega_r - omega_r) > tol:
            raise NotCyclicSeparating("J does not fix the vector")
        if np.linalg.norm(self.triple.delta.matrix @ omega_r - omega_r) > tol:
            raise NotCyclicSeparating("Delta does not fix the vector")


def algebra_subspace(algebra: StarAlgebra, omega: np.ndarray) -> RealSubspace:
    """Real span of the hermitian part applied to the vector."""
    cols = np.stack([h @ omega for h in algebra.hermitian_basis()], axis=1)
    return RealSubspace.from_complex_spanning(cols)


def conjugated_algebra(j: RLOperator, algebra: StarAlgebra) -> StarAlgebra:
    """J M J for an antiunitary involution J, as a matrix-span algebra."""
    jm = j.matrix
    mats = []
    for m in algebra.matrices():
        rm = jm @ realify_linear(m) @ jm
        mats.append(RLOperator.projected(rm, COMPLEX_LINEAR).to_complex())
    return StarAlgebra(algebra.n, _hs_orthonormalize(mats))


def intersect_algebras(a: StarAlgebra, b: StarAlgebra) -> StarAlgebra:
    """Intersection of two matrix spans (a *-algebra when both are)."""
    w, q = np.linalg.eigh(a.projector() + b.projector())
    keep = w >= 2.0 - 1e-8
    mats = [q[:, k].reshape(a.n, a.n) for k in np.flatnonzero(keep)]
    if not mats:
        return StarAlgebra(a.n, np.zeros((0, a.n * a.n), dtype=complex))
    return StarAlgebra(a.n, _hs_orthonormalize(mats))


def tomita_modular(algebra: StarAlgebra, omega: np.ndarray, tol: float = 1e-8):
    """Modular data of (algebra, omega) plus a verification report.

    The report records: J algebra J = commutant (HS projection distance),
    invariance of the algebra under the modular flow tested infinitesimally
    through ad(log Delta), and J acting on central elements by the
    *-operation.  The fixed-vector identities are enforced on the data.
    """
    algebra.validate()
    status = vector_status(algebra, omega)
    if not (status["cyclic"] and status["separating"]):
        raise NotCyclicSeparating(f"vector status {status}")
    omega = np.asarray(omega, dtype=complex).ravel()
    omega = omega / np.linalg.norm(omega)

    v = StandardSubspace(algebra_subspace(algebra, omega))
    triple = modular_objects(v)
    data = ModularData(algebra, omega, v, triple)
    data.validate(1e-8)

    comm = commutant(algebra)
    commutant_distance = conjugated_algebra(triple.j, algebra).distance(comm)

    log_delta = operator_function(triple.delta, "log").to_complex()
    stack = algebra.basis.reshape(-1, algebra.n, algebra.n)
    brackets = log_delta[None] @ stack - stack @ log_delta[None]
    flow_residual = algebra._rows_residual(
        brackets.reshape(-1, algebra.n * algebra.n)
    )

    center = intersect_algebras(algebra, comm)
    center_residual = 0.0
    jm = triple.j.matrix
    for z in center.matrices():
        moved = RLOperator.projected(
            jm @ realify_linear(z) @ jm, COMPLEX_LINEAR
        ).to_complex()
        center_residual = max(
            center_residual, float(np.linalg.norm(moved - z.conj().T, 2))
        )

    report = {
        "commutant_distance": commutant_distance,
        "flow_invariance_residual": flow_residual,
        "center_star_residual": center_residual,
        "passed": bool(
            commutant_distance < tol
            and flow_residual < tol
            and center_residual < tol
        ),
    }
    return data, report


def subalgebra_standard_map(algebra: StarAlgebra, omega: np.ndarray,
                            subalgebras: list) -> dict:
    """V_N = real span of N_h omega for each subalgebra N, with checks.

    Requires omega separating for the ambient algebra.  Reports pairwise
    subspace distances (injectivity) and containment monotonicity.
    """
    status = vector_status(algebra, omega)
    if not status["separating"]:
        raise NotCyclicSeparating("vector must separate the ambient algebra")
    for sub in subalgebras:
        sub.validate()
        if not algebra.contains_algebra(sub):
            raise NotSubalgebra("listed algebra is not contained in the ambient one")
    spaces = [algebra_subspace(sub, omega) for sub in subalgebras]
    k = len(spaces)
    dist = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            dist[i, j] = dist[j, i] = subspace_distance(spaces[i], spaces[j])
    monotone = []
    for i in range(k):
        for j in range(k):
            if i != j and subalgebras[j].contains_algebra(subalgebras[i]):
                monotone.append(subspace_contains(spaces[j], spaces[i], tol=1e-8))
    return {
        "subspaces": spaces,
        "pairwise_distance": dist,
        "injective": bool(np.all(dist[np.triu_indices(k, 1)] > 1e-6)) if k > 1 else True,
        "monotone": all(monotone) if monotone else True,
    }


# ---------------------------------------------------------------------------
# the type-I Hilbert-Schmidt model
# ---------------------------------------------------------------------------

def _unit(k: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((k, k), dtype=complex)
    m[i, j] = 1.0
    return m


@dataclass(frozen=True)
class HilbertSchmidtModel:
    """All of M_k(C) acting on HS space C^(k*k) by left multiplication."""

    k: int

    @property
    def n(self) -> int:
        return self.k * self.k

    def left_algebra(self) -> StarAlgebra:
        mats = [np.kron(_unit(self.k, i, j), np.eye(self.k))
                for i in range(self.k) for j in range(self.k)]
        return StarAlgebra(self.n, _hs_orthonormalize(mats))

    def right_algebra(self) -> StarAlgebra:
        mats = [np.kron(np.eye(self.k), _unit(self.k, i, j).T)
                for i in range(self.k) for j in range(self.k)]
        return StarAlgebra(self.n, _hs_orthonormalize(mats))

    def vectorize(self, a: np.ndarray) -> np.ndarray:
        return np.asarray(a, dtype=complex).reshape(-1)

    def unvectorize(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v, dtype=complex).reshape(self.k, self.k)

    def state_vector(self, density: np.ndarray) -> np.ndarray:
        """Omega = vec(sqrt(D)) for a full-rank density matrix D."""
        d = np.asarray(density, dtype=complex)
        w, q = np.linalg.eigh(d)
        if w[0] <= 0:
            raise NotInvertible("density matrix must be full rank")
        root = (q * np.sqrt(w / w.sum())) @ q.conj().T
        return self.vectorize(root)

    def expected_delta(self, density: np.ndarray) -> RLOperator:
        """Closed form: Delta(A) = D A D^(-1) on HS space."""
        d = np.asarray(density, dtype=complex)
        d = d / np.trace(d).real
        return RLOperator.from_linear(np.kron(d, np.linalg.inv(d).T))

    def expected_j(self) -> RLOperator:
        """Closed form: J(A) = A^*."""
        k, n = self.k, self.n
        perm = np.zeros((n, n))
        for i in range(k):
            for j in range(k):
                perm[i * k + j, j * k + i] = 1.0
        # A -> A^H is the transpose permutation composed with conjugation
        return RLOperator(realify_antilinear(perm.astype(complex)), ANTILINEAR)


def cone_polar(model: HilbertSchmidtModel, xi: np.ndarray):
    """Polar split of a cyclic separating vector in the HS model.

    xi = vec(X) with X invertible splits as X = X_+ u with X_+ = (X X^*)^(1/2)
    in the natural cone (the positive matrices) and u unitary; the returned
    commutant unitary acts by right multiplication with u.
    """
    x = model.unvectorize(xi)
    sv = np.linalg.svd(x, compute_uv=False)
    if sv[-1] < 1e-12 * max(sv[0], 1.0):
        raise NotInvertible("vector is not separating (matrix not invertible)")
    w, q = np.linalg.eigh(x @ x.conj().T)
    x_plus = (q * np.sqrt(np.clip(w, 0, None))) @ q.conj().T
    u = np.linalg.solve(x_plus, x)
    right_u = RLOperator.from_linear(np.kron(np.eye(model.k), u.T))
    return right_u, model.vectorize(x_plus)


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------

def random_block_algebra(rng: np.random.Generator, block_sizes: list):
    """Algebra (+)_i M_(k_i) in standard form, conjugated by a random unitary.

    Acts on C^n with n = sum k_i^2 (each factor in its Hilbert-Schmidt
    representation), so cyclic separating vectors exist.  Returns the algebra
    together with a random cyclic separating unit vector.
    """
    from .realified import random_unitary

    n = sum(k * k for k in block_sizes)
    mats = []
    omega_parts = []
    offset = 0
    for k in block_sizes:
        model = HilbertSchmidtModel(k)
        for m in model.left_algebra().matrices():
            big = np.zeros((n, n), dtype=complex)
            big[offset: offset + k * k, offset: offset + k * k] = m
            mats.append(big)
        x = complex_gaussian(rng, (k, k)) + 2.0 * np.eye(k)
        omega_parts.append(model.vectorize(x))
        offset += k * k
    u = random_unitary(rng, n)
    omega = np.concatenate(omega_parts)
    omega = u @ (omega / np.linalg.norm(omega))
    algebra = StarAlgebra(n, _hs_orthonormalize(
        [u @ m @ u.conj().T for m in mats]
    ))
    return algebra, omega
