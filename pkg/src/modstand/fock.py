"""Second quantization: exact fermionic Fock matrices and coherent vectors.

The fermionic Fock space over C^d is C^(2^d) with basis indexed by subsets
(bitmasks, ascending factor order).  Annihilators, creators, field operators
b(f) = c(f) + c*(f), the parity operator and the Klein twist are dense
matrices whose anticommutation relations hold to machine precision.  Standard
subspaces of C^d induce field algebras whose vacuum modular data are the
antisymmetric quantization of the one-particle modular objects, with the
twist correcting the conjugation; duality holds against the twisted
commutant.

The bosonic sector is represented on finite spans of exponential vectors
only: every identity checked here is a scalar identity in the labels, which
is the finite exact shadow of symmetric Fock space.  Full bosonic von Neumann
algebras are out of verification scope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionOverflow,
    NotCyclicSeparating,
    NotIsometric,
    NotStandard,
)
from .realified import (
    ANTILINEAR,
    COMPLEX_LINEAR,
    RLOperator,
    RealSubspace,
    orthogonal_complement,
    realify_antilinear,
    realify_linear,
    subspace_distance,
)
from .standard import StandardSubspace, modular_objects
from .vonneumann import (
    StarAlgebra,
    _hs_orthonormalize,
    commutant,
    generate_algebra,
    tomita_modular,
    vector_status,
)

FERMI_DIM_CAP = 6


# ---------------------------------------------------------------------------
# fermionic context
# ---------------------------------------------------------------------------

def _popcount_below(mask: int, k: int) -> int:
    return bin(mask & ((1 << k) - 1)).count("1")


@dataclass(frozen=True)
class FermiContext:
    """CAR matrices over C^d on the 2^d-dimensional subset-basis Fock space."""

    d: int

    def __post_init__(self):
        if self.d > FERMI_DIM_CAP:
            raise DimensionOverflow(f"fermionic modes capped at {FERMI_DIM_CAP}")

    @property
    def fock_dim(self) -> int:
        return 1 << self.d

    @property
    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.fock_dim, dtype=complex)
        v[0] = 1.0
        return v

    def annihilator(self, k: int) -> np.ndarray:
        """c_k in the subset basis, signs by counting occupied lower modes."""
        n = self.fock_dim
        m = np.zeros((n, n), dtype=complex)
        bit = 1 << k
        for mask in range(n):
            if mask & bit:
                sign = -1.0 if _popcount_below(mask, k) % 2 else 1.0
                m[mask ^ bit, mask] = sign
        return m

    def creator(self, k: int) -> np.ndarray:
        return self.annihilator(k).conj().T

    def annihilate(self, f: np.ndarray) -> np.ndarray:
        """c(f) = sum conj(f_k) c_k, antilinear in the argument."""
        f = np.asarray(f, dtype=complex).ravel()
        if f.size != self.d:
            raise DimensionMismatch("argument lives in the wrong one-particle space")
        out = np.zeros((self.fock_dim, self.fock_dim), dtype=complex)
        for k in range(self.d):
            if f[k] != 0:
                out += np.conj(f[k]) * self.annihilator(k)
        return out

    def create(self, f: np.ndarray) -> np.ndarray:
        return self.annihilate(f).conj().T

    def field(self, f: np.ndarray) -> np.ndarray:
        """b(f) = c(f) + c*(f); pairs anticommute to twice the real form."""
        a = self.annihilate(f)
        return a + a.conj().T

    def parity(self) -> np.ndarray:
        signs = np.array([(-1.0) ** bin(m).count("1") for m in range(self.fock_dim)])
        return np.diag(signs.astype(complex))

    def klein_twist(self) -> np.ndarray:
        """(1 + iZ)/(1 + i): identity on even, -i on odd parity."""
        z = np.diag(self.parity())
        return np.diag((1.0 + 1j * z) / (1.0 + 1j))

    def car_residual(self) -> float:
        """Worst anticommutator defect over all basis pairs."""
        n = self.fock_dim
        worst = 0.0
        ann = [self.annihilator(k) for k in range(self.d)]
        for i in range(self.d):
            for j in range(self.d):
                acc = ann[i] @ ann[j].conj().T + ann[j].conj().T @ ann[i]
                ref = np.eye(n) if i == j else np.zeros((n, n))
                worst = max(worst, float(np.linalg.norm(acc - ref, 2)))
                acc0 = ann[i] @ ann[j] + ann[j] @ ann[i]
                worst = max(worst, float(np.linalg.norm(acc0, 2)))
        return worst


def field_anticommutator_residual(ctx: FermiContext, f: np.ndarray, g: np.ndarray) -> float:
    bf, bg = ctx.field(f), ctx.field(g)
    ref = 2.0 * np.real(np.vdot(f, g)) * np.eye(ctx.fock_dim)
    return float(np.linalg.norm(bf @ bg + bg @ bf - ref, 2))


def fermi_algebra(ctx: FermiContext, v: RealSubspace) -> StarAlgebra:
    """Field algebra generated by b over a real basis of the subspace."""
    if v.basis.shape[0] != 2 * ctx.d:
        raise DimensionMismatch("subspace lives in the wrong one-particle space")
    from .realified import extract_columns

    gens = []
    for k in range(v.dim):
        col = v.basis[:, k]
        gens.append(ctx.field(extract_columns(col[:, None])[:, 0]))
    return generate_algebra(ctx.fock_dim, gens)


# ---------------------------------------------------------------------------
# second quantization on the antisymmetric space
# ---------------------------------------------------------------------------

def _wedge_matrix(ctx: FermiContext, a: np.ndarray) -> np.ndarray:
    """Lift of a complex one-particle matrix by minors: determinant blocks."""
    n = ctx.fock_dim
    out = np.zeros((n, n), dtype=complex)
    subsets = [[k for k in range(ctx.d) if mask & (1 << k)] for mask in range(n)]
    for col_mask in range(n):
        cols = subsets[col_mask]
        size = len(cols)
        for row_mask in range(n):
            rows = subsets[row_mask]
            if len(rows) != size:
                continue
            if size == 0:
                out[row_mask, col_mask] = 1.0
            else:
                out[row_mask, col_mask] = np.linalg.det(a[np.ix_(rows, cols)])
    return out


def second_quantize_minus(ctx: FermiContext, t: RLOperator) -> RLOperator:
    """Antisymmetric quantization of a unitary or antiunitary operator.

    Acts on wedge products factorwise; functorial and vacuum-preserving.
    Antilinear inputs produce antilinear outputs (composition with the
    subset-basis conjugation).
    """
    if t.dim_c != ctx.d:
        raise DimensionMismatch("operator lives in the wrong one-particle space")
    if not t.is_isometry(1e-9):
        raise NotIsometric("second quantization needs an isometric input")
    if t.linearity == COMPLEX_LINEAR:
        return RLOperator.from_linear(_wedge_matrix(ctx, t.to_complex()))
    if t.linearity == ANTILINEAR:
        return RLOperator.from_antilinear(_wedge_matrix(ctx, t.to_complex()))
    raise NotIsometric("general real-linear operators have no quantization here")


def second_quantize_positive_matrix(ctx: FermiContext, p: RLOperator) -> RLOperator:
    """Lift of a positive complex-linear operator (same minor formula)."""
    return RLOperator.from_linear(_wedge_matrix(ctx, p.to_complex()))


# ---------------------------------------------------------------------------
# duality and modular checks
# ---------------------------------------------------------------------------

def real_orthogonal_complement(ctx: FermiContext, v: RealSubspace) -> RealSubspace:
    """Complement w.r.t. the real part of the inner product."""
    return orthogonal_complement(v)


def _twisted_algebra(ctx: FermiContext, algebra: StarAlgebra) -> StarAlgebra:
    zt = ctx.klein_twist()
    zt_inv = np.conj(zt)  # unitary diagonal
    mats = [zt_inv @ m @ zt for m in algebra.matrices()]
    return StarAlgebra(algebra.n, _hs_orthonormalize(mats))


def _super_bracket_residual(ctx: FermiContext, a: np.ndarray, b_odd: np.ndarray) -> float:
    """Norm of the graded bracket of a (mixed) operator with an odd one."""
    z = ctx.parity()
    a_even = 0.5 * (a + z @ a @ z)
    a_odd = 0.5 * (a - z @ a @ z)
    comm = a_even @ b_odd - b_odd @ a_even
    anti = a_odd @ b_odd + b_odd @ a_odd
    return float(np.linalg.norm(comm + anti, 2))


def twisted_duality_check(ctx: FermiContext, v: RealSubspace, tol: float = 1e-8) -> dict:
    """Field algebra of the real-orthogonal complement vs twisted commutant.

    Reports the HS-projection distance between R(V^perp) and
    Zt^(-1) R(V)' Zt and the worst graded-bracket residual of the complement
    algebra against the generators b(v), v in V.
    """
    if ctx.d > 4:
        raise DimensionOverflow("duality checks are capped at 4 modes")
    alg_v = fermi_algebra(ctx, v)
    comp = real_orthogonal_complement(ctx, v)
    alg_comp = fermi_algebra(ctx, comp)
    twisted = _twisted_algebra(ctx, commutant(alg_v))
    distance = alg_comp.distance(twisted)

    from .realified import extract_columns

    bracket = 0.0
    for k in range(v.dim):
        bv = ctx.field(extract_columns(v.basis[:, k][:, None])[:, 0])
        for m in alg_comp.matrices():
            bracket = max(bracket, _super_bracket_residual(ctx, m, bv))
    return {
        "distance": distance,
        "super_bracket_residual": bracket,
        "passed": bool(distance < tol and bracket < tol),
    }


def fermi_modular_check(ctx: FermiContext, v: StandardSubspace, tol: float = 1e-8,
                        rotated_convention: bool = False) -> dict:
    """Vacuum modular data of the field algebra against quantized objects.

    Checks Delta_Fock = quantized Delta_V and J_Fock = Zt o quantized (i J_V),
    after confirming the vacuum is cyclic and separating for R(V).

    With `rotated_convention` the field algebra is built over the rotated
    subspace exp(i pi/4) V; the graded conjugation Zt J_Fock of that algebra
    then equals the plain quantization of J_V (an equivalent bookkeeping used
    in part of the literature, recorded here as a toggle, not a default).
    """
    if v.dim_c != ctx.d:
        raise NotStandard("subspace lives in the wrong one-particle space")
    if ctx.d > 4:
        raise DimensionOverflow("modular checks are capped at 4 modes")
    one_particle = modular_objects(v)
    if rotated_convention:
        zeta = np.exp(1j * np.pi / 4)
        rotated = StandardSubspace.from_spanning(
            realify_linear(zeta * np.eye(ctx.d)) @ v.basis
        )
        algebra = fermi_algebra(ctx, rotated.space)
    else:
        algebra = fermi_algebra(ctx, v.space)
    status = vector_status(algebra, ctx.vacuum)
    if not (status["cyclic"] and status["separating"]):
        raise NotCyclicSeparating(f"vacuum status {status}; impossible for standard V")
    data, report = tomita_modular(algebra, ctx.vacuum)

    delta_ref = second_quantize_positive_matrix(ctx, one_particle.delta)
    twist = RLOperator.from_linear(ctx.klein_twist())
    if rotated_convention:
        # graded conjugation Zt J_Fock = quantized J_V
        graded = twist @ data.triple.j
        j_ref = second_quantize_minus(ctx, one_particle.j)
        j_resid = float(np.linalg.norm(graded.matrix - j_ref.matrix, 2))
    else:
        i_j = RLOperator.multiplication_by_i(ctx.d) @ one_particle.j
        j_ref = twist @ second_quantize_minus(ctx, i_j)
        j_resid = float(np.linalg.norm(data.triple.j.matrix - j_ref.matrix, 2))

    delta_resid = float(np.linalg.norm(
        data.triple.delta.matrix - delta_ref.matrix, 2
    )) / max(1.0, delta_ref.norm())
    return {
        "tomita_report": report,
        "delta_residual": delta_resid,
        "j_residual": j_resid,
        "passed": bool(report["passed"] and delta_resid < tol and j_resid < tol),
    }


# ---------------------------------------------------------------------------
# coherent vectors
# ---------------------------------------------------------------------------

MERGE_TOL = 1e-10


@dataclass(frozen=True)
class CoherentVector:
    """Finite combination sum_k coeff_k Exp(label_k) of exponential vectors."""

    coeffs: np.ndarray  # (m,) complex
    labels: np.ndarray  # (m, d) complex

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        l = np.atleast_2d(np.asarray(self.labels, dtype=complex))
        if c.shape[0] != l.shape[0]:
            raise DimensionMismatch("coefficients and labels differ in length")
        c, l = _merge_close_labels(c, l)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "labels", l)

    @property
    def d(self) -> int:
        return self.labels.shape[1]

    @staticmethod
    def exponential(label: np.ndarray) -> "CoherentVector":
        label = np.asarray(label, dtype=complex).ravel()
        return CoherentVector(np.ones(1, dtype=complex), label[None, :])

    @staticmethod
    def vacuum(d: int) -> "CoherentVector":
        return CoherentVector.exponential(np.zeros(d))

    def scaled(self, z: complex) -> "CoherentVector":
        return CoherentVector(z * self.coeffs, self.labels)

    def plus(self, other: "CoherentVector") -> "CoherentVector":
        if self.d != other.d:
            raise DimensionMismatch("labels live in different spaces")
        return CoherentVector(
            np.concatenate([self.coeffs, other.coeffs]),
            np.vstack([self.labels, other.labels]),
        )

    def minus(self, other: "CoherentVector") -> "CoherentVector":
        return self.plus(other.scaled(-1.0))

    def gram_positive(self) -> bool:
        g = np.exp(self.labels.conj() @ self.labels.T)
        return bool(np.linalg.eigvalsh(0.5 * (g + g.conj().T))[0] > 0)


def _merge_close_labels(coeffs: np.ndarray, labels: np.ndarray):
    keep_c, keep_l = [], []
    for c, lab in zip(coeffs, labels):
        for idx, ref in enumerate(keep_l):
            if np.linalg.norm(lab - ref) < MERGE_TOL:
                keep_c[idx] += c
                break
        else:
            keep_c.append(c)
            keep_l.append(lab.copy())
    return np.asarray(keep_c, dtype=complex), np.asarray(keep_l, dtype=complex)


def coherent_inner(x: CoherentVector, y: CoherentVector) -> complex:
    """<x, y> with <Exp(v), Exp(w)> = exp(<v, w>), linear in the second slot."""
    if x.d != y.d:
        raise DimensionMismatch("labels live in different spaces")
    gram = np.exp(x.labels.conj() @ y.labels.T)
    return complex(x.coeffs.conj() @ gram @ y.coeffs)


def coherent_norm(x: CoherentVector) -> float:
    return float(np.sqrt(max(coherent_inner(x, x).real, 0.0)))


def weyl_translate(x: np.ndarray, xi: CoherentVector) -> CoherentVector:
    """U_x Exp(v) = exp(-<x, v> - |x|^2/2) Exp(v + x), termwise."""
    x = np.asarray(x, dtype=complex).ravel()
    if x.size != xi.d:
        raise DimensionMismatch("translation lives in the wrong space")
    phases = np.exp(-(np.conj(x) @ xi.labels.T) - 0.5 * np.vdot(x, x).real)
    return CoherentVector(xi.coeffs * phases, xi.labels + x[None, :])


def weyl_operator(v: np.ndarray, xi: CoherentVector) -> CoherentVector:
    """W(v) = U_(iv/sqrt 2)."""
    v = np.asarray(v, dtype=complex).ravel()
    return weyl_translate(1j * v / np.sqrt(2.0), xi)


def quantize_plus(t: RLOperator, xi: CoherentVector) -> CoherentVector:
    """Symmetric quantization on exponential vectors: labels transform.

    Defined by Exp(v) -> Exp(T v) for complex-linear T (conjugating the
    coefficients when T is antilinear); unitary on the coherent span exactly
    when T is isometric, but the label action also covers positive operators.
    """
    if t.linearity == COMPLEX_LINEAR:
        a = t.to_complex()
        return CoherentVector(xi.coeffs, xi.labels @ a.T)
    if t.linearity == ANTILINEAR:
        a = t.to_complex()
        return CoherentVector(xi.coeffs.conj(), xi.labels.conj() @ a.T)
    raise NotIsometric("general real-linear operators have no quantization here")


def weyl_relation_residual(x: np.ndarray, y: np.ndarray,
                           probes: list) -> float:
    """Residual of U_x U_y = exp(-i Im<x, y>) U_(x+y) against probe vectors."""
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    phase = np.exp(-1j * np.vdot(x, y).imag)
    worst = 0.0
    for xi in probes:
        lhs = weyl_translate(x, weyl_translate(y, xi))
        rhs = weyl_translate(x + y, xi).scaled(phase)
        diff = lhs.minus(rhs)
        worst = max(worst, coherent_norm(diff))
    return worst


def bose_checks(v: StandardSubspace, rng: np.random.Generator,
                samples: int = 10, tol: float = 1e-12) -> dict:
    """Scalar-level bosonic identities attached to a standard subspace.

    (1) the multiplicative relation of the translation operators on random
    pairs, (2) invariance (or conjugation) of inner products under symmetric
    quantization of unitaries and antiunitaries, (3) the modular identity
    on labels: quantized J and Delta^(1/2) send Exp(v) to Exp(S v), and
    (4) vanishing symplectic form between the subspace and its complement
    makes the commutation phase trivial.
    """
    from .realified import complex_gaussian, embed_vector, extract_vector
    from .standard import symplectic_complement
    from .realified import operator_function, random_unitary

    d = v.dim_c
    triple = modular_objects(v)
    probes = [CoherentVector.exponential(complex_gaussian(rng, d))
              for _ in range(3)]

    weyl_resid = 0.0
    for _ in range(samples):
        x = complex_gaussian(rng, d)
        y = complex_gaussian(rng, d)
        weyl_resid = max(weyl_resid, weyl_relation_residual(x, y, probes))

    quant_resid = 0.0
    u = RLOperator.from_linear(random_unitary(rng, d))
    ju = triple.j
    for _ in range(samples):
        a = CoherentVector.exponential(complex_gaussian(rng, d))
        b = CoherentVector.exponential(complex_gaussian(rng, d))
        ref = coherent_inner(a, b)
        got_u = coherent_inner(quantize_plus(u, a), quantize_plus(u, b))
        got_j = coherent_inner(quantize_plus(ju, a), quantize_plus(ju, b))
        quant_resid = max(quant_resid, abs(got_u - ref), abs(got_j - np.conj(ref)))

    half = operator_function(triple.delta, "power", 0.5)
    modular_resid = 0.0
    for _ in range(samples):
        z = complex_gaussian(rng, d)
        lifted = quantize_plus(triple.j, quantize_plus(half, CoherentVector.exponential(z)))
        s_z = extract_vector(triple.s.matrix @ embed_vector(z))
        diff = lifted.minus(CoherentVector.exponential(s_z))
        modular_resid = max(modular_resid, coherent_norm(diff))

    from .realified import symplectic_form

    vp = symplectic_complement(v)
    locality_resid = 0.0
    for _ in range(samples):
        a = v.basis @ rng.standard_normal(d)
        b = vp.basis @ rng.standard_normal(d)
        # commutation phase exp(-i Im<a, b>) is trivial across the complement
        locality_resid = max(
            locality_resid, abs(np.exp(-1j * symplectic_form(a, b)) - 1.0)
        )

    return {
        "weyl_residual": weyl_resid,
        "quantization_residual": quant_resid,
        "modular_label_residual": modular_resid,
        "locality_phase_residual": locality_resid,
        "passed": bool(max(weyl_resid, quant_resid, modular_resid,
                           locality_resid) < tol),
    }
