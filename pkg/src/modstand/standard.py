"""Standard subspaces of C^d and their modular objects.

A closed real subspace V with V cap iV = 0 and V + iV = C^d carries a canonical
antilinear involution S(x + iy) = x - iy (x, y in V).  The polar split
S = J Delta^(1/2) produces the modular operator Delta and the modular
conjugation J, and conversely V = Fix(J Delta^(1/2)).  This module implements
both directions, the symplectic complement, the skew-operator parametrization
of all V with a fixed conjugation, the reconstruction of V from an orthogonal
flow on it, and the splitting machinery for sub-subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    ConjugationMismatch,
    DimensionMismatch,
    ModularRelationViolated,
    NormBoundViolated,
    NotContained,
    NotStandard,
)
from .realified import (
    ANTILINEAR,
    COMPLEX_LINEAR,
    ComplexStructure,
    RANK_RTOL,
    RLOperator,
    RealSubspace,
    antilinear_polar,
    complex_gaussian,
    embed_columns,
    imaginary_power,
    matrix_from_json,
    matrix_to_json,
    multiply_i,
    operator_function,
    operator_from_json,
    operator_to_json,
    orthogonal_complement,
    orthonormal_columns,
    random_conjugation,
    random_positive,
    subspace_contains,
    subspace_distance,
    subspace_intersection,
    subspace_sum,
)

STANDARD_SMIN_TOL = 1e-9


@dataclass(frozen=True)
class StandardSubspace:
    """A standard real subspace, stored as an orthonormal (2d, d) basis."""

    space: RealSubspace

    def __post_init__(self):
        ok, diag = is_standard(self.space)
        if not ok:
            raise NotStandard(f"subspace is not standard: {diag}")

    @property
    def basis(self) -> np.ndarray:
        return self.space.basis

    @property
    def dim_c(self) -> int:
        return self.space.basis.shape[0] // 2

    @staticmethod
    def from_spanning(columns: np.ndarray) -> "StandardSubspace":
        return StandardSubspace(RealSubspace.from_spanning(columns))

    @staticmethod
    def from_complex_spanning(columns: np.ndarray) -> "StandardSubspace":
        return StandardSubspace(RealSubspace.from_complex_spanning(columns))

    @staticmethod
    def canonical_real_points(d: int) -> "StandardSubspace":
        return StandardSubspace.from_complex_spanning(np.eye(d))

    def to_json(self):
        return {"dim": self.dim_c, "basis": matrix_to_json(self.basis)}

    @staticmethod
    def from_json(data) -> "StandardSubspace":
        v = StandardSubspace(RealSubspace(matrix_from_json(data["basis"])))
        if v.dim_c != data["dim"]:
            raise DimensionMismatch("dim field does not match basis shape")
        return v


def is_standard(space: RealSubspace, tol: float = STANDARD_SMIN_TOL):
    """Decide standardness; total, returns (bool, diagnostics).

    V is standard iff dim V = d and [B | iB] is invertible, which is the
    finite-dimensional reading of V cap iV = 0 with V + iV dense.
    """
    b = space.basis
    d = b.shape[0] // 2
    diag = {"dim": b.shape[1], "dim_required": d}
    if b.shape[1] != d:
        diag["intersection_dim"] = None
        diag["smin"] = 0.0
        return False, diag
    jm = ComplexStructure(d).matrix
    full = np.hstack([b, jm @ b])
    sv = np.linalg.svd(full, compute_uv=False)
    smin = float(sv[-1])
    diag["smin"] = smin
    diag["condition"] = float(sv[0] / sv[-1]) if smin > 0 else np.inf
    diag["intersection_dim"] = int(np.sum(sv < tol * sv[0]))
    return smin > tol * sv[0], diag


@dataclass(frozen=True)
class ModularTriple:
    """The antilinear involution S with its polar parts (Delta, J)."""

    s: RLOperator
    delta: RLOperator
    j: RLOperator

    def __post_init__(self):
        n = self.s.matrix.shape[0]
        iden = np.eye(n)
        tol = 1e-8 * max(1.0, self.delta.norm())
        if np.linalg.norm(self.s.matrix @ self.s.matrix - iden, 2) > tol:
            raise ModularRelationViolated("S is not an involution")
        if np.linalg.norm(self.j.matrix @ self.j.matrix - iden, 2) > 1e-8:
            raise ModularRelationViolated("J is not an involution")
        jm, dm = self.j.matrix, self.delta.matrix
        if np.linalg.norm(jm @ dm @ jm @ dm - iden, 2) > tol:
            raise ModularRelationViolated("J Delta J Delta != 1")

    @property
    def dim_c(self) -> int:
        return self.s.dim_c

    def flow(self, t: float) -> RLOperator:
        """Delta^(it)."""
        return imaginary_power(self.delta, t)

    def evaluate(self, t: float, scaling: str = "inverse-2pi") -> RLOperator:
        """The antiunitary one-parameter family attached to the triple.

        scaling "inverse-2pi" sends e^s to Delta^(-is/2pi) and -1 to J;
        scaling "plain" sends e^s to Delta^(is).  Both satisfy the
        multiplicative homomorphism property; checks state which they use.
        """
        if t == 0.0:
            raise ValueError("evaluator is defined on nonzero reals")
        sgn, a = (1.0, t) if t > 0 else (-1.0, -t)
        if scaling == "inverse-2pi":
            u = self.flow(-np.log(a) / (2.0 * np.pi))
        elif scaling == "plain":
            u = self.flow(np.log(a))
        else:
            raise ValueError(f"unknown scaling {scaling!r}")
        return u if sgn > 0 else self.j @ u

    def spectrum(self) -> np.ndarray:
        """Eigenvalues of Delta on C^d (each complex eigenvalue once).

        Read off the singular values of S, which stay relatively accurate
        when Delta is badly conditioned.
        """
        sv = np.linalg.svd(self.s.matrix, compute_uv=False)
        return np.sort(sv ** 2)[::2]  # realified doubling

    def log_spectrum_inversion_residual(self) -> float:
        sv = np.linalg.svd(self.s.matrix, compute_uv=False)
        logs = np.sort(2.0 * np.log(sv))
        return float(np.max(np.abs(logs + logs[::-1])))

    def spectrum_inversion_symmetric(self, rtol: float = 1e-8) -> bool:
        sv = np.linalg.svd(self.s.matrix, compute_uv=False)
        logs = np.sort(2.0 * np.log(sv))
        resid = np.max(np.abs(logs + logs[::-1]))
        return bool(resid <= rtol * max(1.0, np.max(np.abs(logs))))

    def to_json(self):
        return {
            "S": operator_to_json(self.s),
            "Delta": operator_to_json(self.delta),
            "J": operator_to_json(self.j),
        }

    @staticmethod
    def from_json(data) -> "ModularTriple":
        return ModularTriple(
            operator_from_json(data["S"]),
            operator_from_json(data["Delta"]),
            operator_from_json(data["J"]),
        )


def involution_from_subspace(v: StandardSubspace) -> RLOperator:
    """S with S(x + iy) = x - iy for x, y in V, by exact basis change."""
    b = v.basis
    d = v.dim_c
    jm = ComplexStructure(d).matrix
    full = np.hstack([b, jm @ b])
    signs = np.concatenate([np.ones(d), -np.ones(d)])
    s = (full * signs) @ np.linalg.inv(full)
    return RLOperator.projected(s, ANTILINEAR)


def modular_objects(v: StandardSubspace) -> ModularTriple:
    s = involution_from_subspace(v)
    delta, j = antilinear_polar(s)
    return ModularTriple(s, delta, j)


def fixed_subspace(op: RLOperator) -> RealSubspace:
    """Fixed-point space of a real-linear involution."""
    n = op.matrix.shape[0]
    return RealSubspace(orthonormal_columns(op.matrix + np.eye(n)))


def conjugation_fixed_basis(j: RLOperator) -> np.ndarray:
    """Deterministic orthonormal basis of Fix(J) for an antiunitary involution J."""
    m = j.matrix
    n = m.shape[0]
    if np.linalg.norm(m @ m - np.eye(n), 2) > 1e-9 or not j.is_isometry(1e-9):
        raise ModularRelationViolated("not an antiunitary involution")
    w, q = np.linalg.eigh(0.5 * (m + m.T))
    return q[:, w > 0.5]


def from_modular(delta: RLOperator, j: RLOperator) -> StandardSubspace:
    """V = Delta^(-1/4) Fix(J); inverse of modular_objects."""
    n = delta.matrix.shape[0]
    dm, jm = delta.matrix, j.matrix
    if np.linalg.norm(jm @ dm @ jm @ dm - np.eye(n), 2) > 1e-8 * max(1.0, delta.norm()):
        raise ModularRelationViolated("J Delta J Delta != 1")
    f = conjugation_fixed_basis(j)
    quarter = operator_function(delta, "power", -0.25)
    return StandardSubspace.from_spanning(quarter.matrix @ f)


def symplectic_complement(v: StandardSubspace) -> StandardSubspace:
    """V' = i (V^perp); equals J V and swaps Delta with its inverse."""
    comp = orthogonal_complement(v.space)
    return StandardSubspace(multiply_i(comp))


# ---------------------------------------------------------------------------
# skew-operator parametrization with a fixed conjugation
# ---------------------------------------------------------------------------

def subspace_from_skew(j: RLOperator, c: np.ndarray) -> StandardSubspace:
    """V = (1 + iC) Fix(J) for real skew C on Fix(J) with ||C|| < 1."""
    c = np.asarray(c, dtype=float)
    if np.max(np.abs(c + c.T)) > 1e-10 * max(1.0, np.abs(c).max()):
        raise NormBoundViolated("parametrizing operator must be skew-symmetric")
    if c.size and np.linalg.norm(c, 2) >= 1.0:
        raise NormBoundViolated("parametrizing operator must have norm < 1")
    f = conjugation_fixed_basis(j)
    jm = ComplexStructure(f.shape[0] // 2).matrix
    return StandardSubspace.from_spanning(f + jm @ f @ c)


def skew_from_subspace(v: StandardSubspace, j: RLOperator, tol: float = 1e-8) -> np.ndarray:
    """C = i (Delta^(1/2) - 1)(Delta^(1/2) + 1)^(-1) restricted to Fix(J).

    Requires the modular conjugation of V to be J; round trips with
    subspace_from_skew through the deterministic Fix(J) basis.
    """
    triple = modular_objects(v)
    if np.linalg.norm(triple.j.matrix - j.matrix, 2) > tol:
        raise ConjugationMismatch("subspace has a different modular conjugation")
    n = 2 * v.dim_c
    root = operator_function(triple.delta, "power", 0.5).matrix
    cayley = np.linalg.solve((root + np.eye(n)).T, (root - np.eye(n)).T).T
    jm = ComplexStructure(v.dim_c).matrix
    f = conjugation_fixed_basis(j)
    return f.T @ jm @ cayley @ f


# ---------------------------------------------------------------------------
# reconstruction of the embedding from an orthogonal flow on V
# ---------------------------------------------------------------------------

def _skew_polar_apply(d: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Return D g(|D|) with g(x) = f(x)/x extended continuously to 0.

    Evaluates the odd matrix function f applied through the polar split
    D = I |D| of a real skew-symmetric D without forming I on ker D.
    """
    sq = -d @ d
    w, q = np.linalg.eigh(0.5 * (sq + sq.T))
    w = np.clip(w, 0.0, None)
    x = np.sqrt(w)
    g = np.empty_like(x)
    small = x < 1e-12
    g[~small] = f(x[~small]) / x[~small]
    if small.any():
        eps = 1e-6
        g[small] = f(np.full(small.sum(), eps)) / eps
    return d @ ((q * g) @ q.T)


def flow_embedding(d_gen: np.ndarray):
    """Embed R^m with flow e^(tD) as a standard subspace of C^m.

    The skew generator D determines a skew contraction
    C = I (1 - e^(-|D|)) (1 + e^(-|D|))^(-1), and C fixes the hermitian Gram
    form 1 + iC of the canonical real basis.  A triangular factorization of
    the Gram matrix maps R^m isometrically onto a standard V in C^m whose
    modular flow restricts to the given one: Delta^(it) iota(v) = iota(e^(tD) v).

    Returns (iota, V) where iota is the real (2m, m) embedding matrix.
    """
    d_gen = np.asarray(d_gen, dtype=float)
    m = d_gen.shape[0]
    if np.max(np.abs(d_gen + d_gen.T)) > 1e-10 * max(1.0, np.abs(d_gen).max()):
        raise NormBoundViolated("flow generator must be skew-symmetric")
    c = _skew_polar_apply(d_gen, lambda x: (1.0 - np.exp(-x)) / (1.0 + np.exp(-x)))
    gram = np.eye(m) + 1j * c
    low = np.linalg.cholesky(gram)
    iota = embed_columns(low.conj().T)
    v = StandardSubspace(RealSubspace(orthonormal_columns(iota)))
    return iota, v


def flow_generator(iota: np.ndarray, v: StandardSubspace) -> np.ndarray:
    """Recover D from the embedded subspace through the skew contraction.

    Uses the computed modular operator only: C = i (Delta - 1)(Delta + 1)^(-1)
    pulled back along iota, then D = I log((1 + |C|)/(1 - |C|)).
    """
    triple = modular_objects(v)
    n = 2 * v.dim_c
    dm = triple.delta.matrix
    cayley = np.linalg.solve((dm + np.eye(n)).T, (dm - np.eye(n)).T).T
    jm = ComplexStructure(v.dim_c).matrix
    c_small = iota.T @ jm @ cayley @ iota
    c_small = 0.5 * (c_small - c_small.T)
    return _skew_polar_apply(c_small, lambda x: np.log((1.0 + x) / (1.0 - x)))


# ---------------------------------------------------------------------------
# splitting
# ---------------------------------------------------------------------------

def complex_span_basis(space: RealSubspace) -> np.ndarray:
    """Orthonormal real basis (q1..qk, i q1..i qk) of the complex span."""
    jm = space.ambient.matrix
    span = orthonormal_columns(np.hstack([space.basis, jm @ space.basis]))
    k = span.shape[1]
    if k % 2:
        raise DimensionMismatch("complex span has odd real dimension")
    cols = []
    for _ in range(k // 2):
        if not cols:
            resid = span
        else:
            have = np.hstack(cols)
            resid = span - have @ (have.T @ span)
        u, s, _ = np.linalg.svd(resid, full_matrices=False)
        q = u[:, 0]
        cols.append(np.column_stack([q, jm @ q]))
    qs = np.hstack([c[:, :1] for c in cols])
    return np.hstack([qs, jm @ qs])


def restrict_to_complex_span(space: RealSubspace, inner: RealSubspace) -> StandardSubspace:
    """Express `inner` as a standard subspace of its own complex span."""
    frame = complex_span_basis(space)
    k = frame.shape[1] // 2
    coords = frame.T @ inner.basis
    d = space.ambient.dim_c
    # frame columns are (q_j, i q_j); coordinates in that frame realify to C^k
    re, im = coords[:k], coords[k:]
    return StandardSubspace.from_spanning(np.vstack([re, im]))


def factorial_split(v: StandardSubspace):
    """Split V = (V cap V') (+) V1 with V1 cap V1' = 0.

    Returns (fixed, v1) where fixed is the real subspace of vectors fixed by
    J and Delta and v1 is standard inside its own complex span (re-expressed
    in canonical coordinates for that summand); v1 is None when V = V cap V'.
    """
    vp = symplectic_complement(v)
    fixed = subspace_intersection(v.space, vp.space)
    if fixed.dim == v.space.dim:
        return fixed, None
    proj = fixed.projector()
    rest = RealSubspace.from_spanning(v.basis - proj @ v.basis)
    return fixed, restrict_to_complex_span(rest, rest)


def split_check(v: StandardSubspace, v1: RealSubspace, times=(0.35, 1.0), tol: float = 1e-8):
    """Evaluate the three equivalent splitting conditions for V1 <= V.

    (i) V decomposes as the direct sum of V1 and V cap V1^perp with both parts
    standard in their complex spans and the spans orthogonal, (ii) i V1 is
    g-orthogonal to V cap V1^perp, (iii) V1 is invariant under the modular
    flow of V.  Returns a dict with the three booleans; they must agree.
    """
    if not subspace_contains(v.space, v1, tol=1e-8):
        raise NotContained("V1 is not contained in V")
    jm = v.space.ambient.matrix
    v2 = subspace_intersection(v.space, orthogonal_complement(v1))

    # (ii) i V1 perp V2
    coupling = 0.0
    if v1.dim and v2.dim:
        coupling = float(np.linalg.norm(v2.basis.T @ (jm @ v1.basis), 2))
    cond_ii = coupling < tol

    # (i) direct sum of standard subspaces of orthogonal complex spans
    spans_orth = True
    if v1.dim and v2.dim:
        h1 = orthonormal_columns(np.hstack([v1.basis, jm @ v1.basis]))
        h2 = orthonormal_columns(np.hstack([v2.basis, jm @ v2.basis]))
        spans_orth = float(np.linalg.norm(h1.T @ h2, 2)) < tol
    rebuilt = subspace_sum(RealSubspace(v1.basis), v2)
    cond_i = spans_orth and subspace_distance(rebuilt, v.space) < tol
    if cond_i and v1.dim and v2.dim:
        try:
            restrict_to_complex_span(RealSubspace(v1.basis), RealSubspace(v1.basis))
            restrict_to_complex_span(v2, v2)
        except (NotStandard, DimensionMismatch):
            cond_i = False

    # (iii) flow invariance at sampled times
    triple = modular_objects(v)
    flow_resid = 0.0
    sub = RealSubspace(v1.basis)
    for t in times:
        moved = RealSubspace.from_spanning(triple.flow(t).matrix @ v1.basis)
        flow_resid = max(flow_resid, subspace_distance(moved, sub))
    cond_iii = flow_resid < tol

    return {
        "direct_sum": cond_i,
        "symplectic_orthogonal": cond_ii,
        "flow_invariant": cond_iii,
        "coupling": coupling,
        "flow_residual": flow_resid,
        "agree": cond_i == cond_ii == cond_iii,
    }


# ---------------------------------------------------------------------------
# random instances for verification suites
# ---------------------------------------------------------------------------

def random_standard_subspace(rng: np.random.Generator, d: int,
                             condition_cap: float = 1e2) -> StandardSubspace:
    """g . R^d for a random invertible complex-linear g.

    Draws are redrawn while the standardness condition number exceeds the
    cap; the modular spectrum scales like its square, so the cap keeps
    verification quantities well inside double precision.
    """
    while True:
        g = complex_gaussian(rng, (d, d)) + 1.5 * np.eye(d)
        v = StandardSubspace.from_complex_spanning(g)
        _, diag = is_standard(v.space)
        if diag["condition"] <= condition_cap:
            return v


def random_modular_pair(rng: np.random.Generator, d: int, spread: float = 1.0):
    """Random (Delta, J) with J Delta J = Delta^(-1), by symmetrization."""
    j = random_conjugation(rng, d)
    x = operator_function(random_positive(rng, d, spread), "log").matrix
    x = 0.5 * (x - j.matrix @ x @ j.matrix)
    delta = operator_function(RLOperator(0.5 * (x + x.T), COMPLEX_LINEAR), "exp")
    return delta, j
