"""Real-linear operators on realified complex space.

C^d is modelled as R^(2d) with coordinates (Re x, Im x).  Multiplication by i
becomes the orthogonal matrix I2d = [[0, -1], [1, 0]] (block form), and every
bounded operator on C^d, linear or antilinear, becomes a real 2d x 2d matrix.
The hermitian form (linear in the second argument) is recovered as

    <v, w> = g(v, w) + i * g(I2d v, w)

with g the euclidean form.  In this representation the adjoint of a complex
linear *and* of an antilinear operator is the plain real transpose, so a
single code path covers unitary, antiunitary and modular operators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NotAntilinear,
    NotComplexLinear,
    NotPositive,
    Singular,
)

COMPLEX_LINEAR = "complex-linear"
ANTILINEAR = "antilinear"
GENERAL = "general"

# Singular values below RANK_RTOL * (largest) count as zero in subspace
# arithmetic; double precision with ambient dimension <= 16 in mind.
RANK_RTOL = 1e-9
LINEARITY_TOL = 1e-10


@dataclass(frozen=True)
class ComplexStructure:
    """Multiplication by i on the realified space R^(2d)."""

    dim_c: int

    @property
    def dim_r(self) -> int:
        return 2 * self.dim_c

    @property
    def matrix(self) -> np.ndarray:
        d = self.dim_c
        iden = np.eye(d)
        top = np.hstack([np.zeros((d, d)), -iden])
        bot = np.hstack([iden, np.zeros((d, d))])
        return np.vstack([top, bot])

    def apply(self, v: np.ndarray) -> np.ndarray:
        d = self.dim_c
        out = np.empty_like(v)
        out[:d] = -v[d:]
        out[d:] = v[:d]
        return out


def embed_vector(v: np.ndarray) -> np.ndarray:
    """Complex vector in C^d -> real vector in R^(2d)."""
    v = np.asarray(v, dtype=complex).ravel()
    return np.concatenate([v.real, v.imag])


def extract_vector(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    d = x.size // 2
    return x[:d] + 1j * x[d:]


def embed_columns(m: np.ndarray) -> np.ndarray:
    """Complex (d, k) array -> real (2d, k) array of realified columns."""
    m = np.asarray(m, dtype=complex)
    return np.vstack([m.real, m.imag])


def extract_columns(b: np.ndarray) -> np.ndarray:
    d = b.shape[0] // 2
    return b[:d] + 1j * b[d:]


def realify_linear(a: np.ndarray) -> np.ndarray:
    """Realify a complex-linear operator given by a complex matrix."""
    a = np.asarray(a, dtype=complex)
    return np.block([[a.real, -a.imag], [a.imag, a.real]])


def realify_antilinear(a: np.ndarray) -> np.ndarray:
    """Realify the antilinear operator v -> a @ conj(v)."""
    a = np.asarray(a, dtype=complex)
    return np.block([[a.real, a.imag], [a.imag, -a.real]])


def complexify_linear(r: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    d = r.shape[0] // 2
    a = r[:d, :d] + 1j * r[d:, :d]
    if np.max(np.abs(realify_linear(a) - r)) > tol * max(1.0, np.max(np.abs(r))):
        raise NotComplexLinear("matrix does not have complex-linear block form")
    return a


def complexify_antilinear(r: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    d = r.shape[0] // 2
    a = r[:d, :d] + 1j * r[d:, :d]
    if np.max(np.abs(realify_antilinear(a) - r)) > tol * max(1.0, np.max(np.abs(r))):
        raise NotAntilinear("matrix does not have antilinear block form")
    return a


def hermitian_form(v: np.ndarray, w: np.ndarray) -> complex:
    """<v, w> = g(v, w) + i g(I2d v, w), linear in the second argument."""
    if v.shape != w.shape:
        raise DimensionMismatch("vectors live in different spaces")
    d = v.size // 2
    struct = ComplexStructure(d)
    return float(v @ w) + 1j * float(struct.apply(v) @ w)


def symplectic_form(v: np.ndarray, w: np.ndarray) -> float:
    return hermitian_form(v, w).imag


def classify_linearity(matrix: np.ndarray, tol: float = LINEARITY_TOL) -> str:
    n = matrix.shape[0]
    if matrix.shape != (n, n) or n % 2:
        raise DimensionMismatch("realified operators are square of even size")
    jm = ComplexStructure(n // 2).matrix
    scale = max(1.0, float(np.linalg.norm(matrix, 2)))
    comm = np.linalg.norm(matrix @ jm - jm @ matrix, 2)
    anti = np.linalg.norm(matrix @ jm + jm @ matrix, 2)
    if comm < tol * scale:
        return COMPLEX_LINEAR
    if anti < tol * scale:
        return ANTILINEAR
    return GENERAL


@dataclass(frozen=True)
class RLOperator:
    """A real-linear operator on realified C^d with a linearity tag."""

    matrix: np.ndarray
    linearity: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if self.linearity not in (COMPLEX_LINEAR, ANTILINEAR, GENERAL):
            raise ValueError(f"unknown linearity tag {self.linearity!r}")
        n = m.shape[0]
        if m.shape != (n, n) or n % 2:
            raise DimensionMismatch("realified operators are square of even size")
        if self.linearity != GENERAL:
            jm = ComplexStructure(n // 2).matrix
            scale = max(1.0, float(np.linalg.norm(m, 2)))
            if self.linearity == COMPLEX_LINEAR:
                if np.linalg.norm(m @ jm - jm @ m, 2) > LINEARITY_TOL * scale:
                    raise NotComplexLinear("operator does not commute with i")
            else:
                if np.linalg.norm(m @ jm + jm @ m, 2) > LINEARITY_TOL * scale:
                    raise NotAntilinear("operator does not anticommute with i")

    @property
    def dim_c(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def structure(self) -> ComplexStructure:
        return ComplexStructure(self.dim_c)

    @staticmethod
    def from_linear(a: np.ndarray) -> "RLOperator":
        return RLOperator(realify_linear(a), COMPLEX_LINEAR)

    @staticmethod
    def from_antilinear(a: np.ndarray) -> "RLOperator":
        return RLOperator(realify_antilinear(a), ANTILINEAR)

    @staticmethod
    def identity(d: int) -> "RLOperator":
        return RLOperator(np.eye(2 * d), COMPLEX_LINEAR)

    @staticmethod
    def conjugation(d: int) -> "RLOperator":
        """Componentwise complex conjugation."""
        return RLOperator.from_antilinear(np.eye(d))

    @staticmethod
    def multiplication_by_i(d: int) -> "RLOperator":
        return RLOperator(ComplexStructure(d).matrix, COMPLEX_LINEAR)

    @staticmethod
    def classified(matrix: np.ndarray) -> "RLOperator":
        return RLOperator(np.asarray(matrix, float), classify_linearity(matrix))

    @staticmethod
    def projected(matrix: np.ndarray, linearity: str) -> "RLOperator":
        """Orthogonally project onto the declared linearity class.

        For a matrix that is (anti)linear up to rounding noise this removes
        the noise exactly: the complex-linear part of M is (M - I M I)/2 and
        the antilinear part is (M + I M I)/2.
        """
        m = np.asarray(matrix, dtype=float)
        jm = ComplexStructure(m.shape[0] // 2).matrix
        if linearity == COMPLEX_LINEAR:
            m = 0.5 * (m - jm @ m @ jm)
        elif linearity == ANTILINEAR:
            m = 0.5 * (m + jm @ m @ jm)
        return RLOperator(m, linearity)

    def __matmul__(self, other: "RLOperator") -> "RLOperator":
        if self.dim_c != other.dim_c:
            raise DimensionMismatch("operator dimensions differ")
        tags = (self.linearity, other.linearity)
        if GENERAL in tags:
            tag = GENERAL
        elif tags[0] == tags[1]:
            tag = COMPLEX_LINEAR
        else:
            tag = ANTILINEAR
        return RLOperator(self.matrix @ other.matrix, tag)

    def adjoint(self) -> "RLOperator":
        """The complex (anti)linear adjoint; equals the real transpose."""
        return RLOperator(self.matrix.T.copy(), self.linearity)

    def inverse(self) -> "RLOperator":
        return RLOperator(np.linalg.inv(self.matrix), self.linearity)

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def apply_complex(self, v: np.ndarray) -> np.ndarray:
        return extract_vector(self.matrix @ embed_vector(v))

    def to_complex(self) -> np.ndarray:
        """Complex matrix; for antilinear T the matrix A with T = A o conj."""
        if self.linearity == COMPLEX_LINEAR:
            return complexify_linear(self.matrix)
        if self.linearity == ANTILINEAR:
            return complexify_antilinear(self.matrix)
        raise NotComplexLinear("general operators have no complex matrix form")

    def is_isometry(self, tol: float = 1e-10) -> bool:
        n = self.matrix.shape[0]
        return bool(
            np.linalg.norm(self.matrix.T @ self.matrix - np.eye(n), 2) < tol
        )

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


# ---------------------------------------------------------------------------
# subspace arithmetic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RealSubspace:
    """A real subspace of realified C^d given by an orthonormal basis."""

    basis: np.ndarray  # (2d, k), orthonormal columns

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2 or b.shape[0] % 2:
            raise DimensionMismatch("basis must be a (2d, k) real array")
        k = b.shape[1]
        if k and np.max(np.abs(b.T @ b - np.eye(k))) > 1e-12:
            raise ValueError("basis columns are not orthonormal")
        object.__setattr__(self, "basis", b)

    @property
    def ambient(self) -> ComplexStructure:
        return ComplexStructure(self.basis.shape[0] // 2)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @staticmethod
    def from_spanning(columns: np.ndarray) -> "RealSubspace":
        return RealSubspace(orthonormal_columns(columns))

    @staticmethod
    def from_complex_spanning(columns: np.ndarray) -> "RealSubspace":
        return RealSubspace.from_spanning(embed_columns(columns))

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def contains(self, v: np.ndarray, tol: float = 1e-9) -> bool:
        r = v - self.basis @ (self.basis.T @ v)
        return bool(np.linalg.norm(r) <= tol * max(1.0, np.linalg.norm(v)))


def orthonormal_columns(a: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Rank-revealing orthonormal basis of the column span."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return a.reshape(a.shape[0], 0)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], 0))
    return u[:, s > rtol * s[0]]


def subspace_distance(v1: RealSubspace, v2: RealSubspace) -> float:
    """Operator norm of the difference of orthogonal projections."""
    if v1.basis.shape[0] != v2.basis.shape[0]:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    return float(np.linalg.norm(v1.projector() - v2.projector(), 2))


def subspace_sum(v1: RealSubspace, v2: RealSubspace) -> RealSubspace:
    if v1.basis.shape[0] != v2.basis.shape[0]:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    return RealSubspace.from_spanning(np.hstack([v1.basis, v2.basis]))


def subspace_intersection(
    v1: RealSubspace, v2: RealSubspace, rtol: float = RANK_RTOL
) -> RealSubspace:
    """Intersection via the spectrum of the sum of the two projectors."""
    if v1.basis.shape[0] != v2.basis.shape[0]:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    w, q = np.linalg.eigh(v1.projector() + v2.projector())
    keep = w >= 2.0 - 1e3 * rtol
    return RealSubspace(orthonormal_columns(q[:, keep])) if keep.any() else \
        RealSubspace(np.zeros((v1.basis.shape[0], 0)))


def orthogonal_complement(v: RealSubspace) -> RealSubspace:
    """g-orthogonal complement inside the full realified space."""
    n = v.basis.shape[0]
    w, q = np.linalg.eigh(v.projector())
    return RealSubspace(orthonormal_columns(q[:, w < 0.5])) if (w < 0.5).any() \
        else RealSubspace(np.zeros((n, 0)))


def subspace_contains(
    big: RealSubspace, small: RealSubspace, tol: float = 1e-9
) -> bool:
    if small.dim == 0:
        return True
    r = small.basis - big.basis @ (big.basis.T @ small.basis)
    return bool(np.linalg.norm(r, 2) <= tol)


def multiply_i(v: RealSubspace) -> RealSubspace:
    jm = v.ambient.matrix
    return RealSubspace.from_spanning(jm @ v.basis)


# ---------------------------------------------------------------------------
# polar decomposition and operator functions
# ---------------------------------------------------------------------------

def antilinear_polar(s: RLOperator, tol: float = 1e-10):
    """Split an invertible antilinear S into (Delta, J) with S = J Delta^(1/2).

    Delta = S^T S is positive and complex-linear, J is antiunitary.  When S
    is an involution the pair inherits J^2 = 1 and J Delta J = Delta^(-1).
    Both factors are read off one real SVD of S, which keeps the antiunitary
    part accurate even when Delta is badly conditioned.
    """
    if s.linearity != ANTILINEAR:
        raise NotAntilinear("polar input must be antilinear")
    sm = s.matrix
    u, sv, wt = np.linalg.svd(sm)
    if sv[-1] < 1e-13 * sv[0]:
        raise Singular("smallest singular value below threshold")
    delta = RLOperator.projected((wt.T * sv ** 2) @ wt, COMPLEX_LINEAR)
    j = RLOperator.projected(u @ wt, ANTILINEAR)
    return delta, j


def operator_function(p: RLOperator, kind: str, s: float | None = None) -> RLOperator:
    """Apply power/log/exp to a positive complex-linear operator.

    Computed by the real symmetric eigendecomposition of the realified matrix;
    the result commutes with the complex structure because it is a limit of
    polynomials in the input.
    """
    if p.linearity != COMPLEX_LINEAR:
        raise NotComplexLinear("operator functions need a complex-linear input")
    m = p.matrix
    scale = max(1.0, float(np.linalg.norm(m, 2)))
    if np.max(np.abs(m - m.T)) > 1e-10 * scale:
        raise NotPositive("matrix is not symmetric")
    w, q = np.linalg.eigh(0.5 * (m + m.T))
    if kind == "exp":
        fw = np.exp(w)
    else:
        if w[0] <= 0.0:
            raise NotPositive(f"eigenvalue {w[0]} is not positive")
        if kind == "power":
            if s is None:
                raise ValueError("power needs an exponent")
            fw = w ** s
        elif kind == "log":
            fw = np.log(w)
        else:
            raise ValueError(f"unknown operator function {kind!r}")
    return RLOperator.projected((q * fw) @ q.T, COMPLEX_LINEAR)


def imaginary_power(p: RLOperator, t: float) -> RLOperator:
    """P^(it) = cos(t log P) + I2d sin(t log P), a complex-linear unitary."""
    lg = operator_function(p, "log")
    w, q = np.linalg.eigh(lg.matrix)
    cos_m = (q * np.cos(t * w)) @ q.T
    sin_m = (q * np.sin(t * w)) @ q.T
    jm = p.structure.matrix
    return RLOperator.projected(cos_m + jm @ sin_m, COMPLEX_LINEAR)


# ---------------------------------------------------------------------------
# random generators (seeded, for verification suites)
# ---------------------------------------------------------------------------

def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(complex_gaussian(rng, (d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_positive(rng: np.random.Generator, d: int, spread: float = 1.0) -> RLOperator:
    """Random positive complex-linear operator with eigenvalues e^(+-spread)."""
    u = random_unitary(rng, d)
    w = np.exp(spread * rng.uniform(-1.0, 1.0, size=d))
    return RLOperator.from_linear((u * w) @ u.conj().T)


def random_conjugation(rng: np.random.Generator, d: int) -> RLOperator:
    """Random antiunitary involution u J0 u*."""
    u = RLOperator.from_linear(random_unitary(rng, d))
    return u @ RLOperator.conjugation(d) @ u.adjoint()


def random_antilinear(rng: np.random.Generator, d: int) -> RLOperator:
    """Random invertible antilinear operator A o conj."""
    a = complex_gaussian(rng, (d, d)) + 2.0 * np.eye(d)
    return RLOperator.from_antilinear(a)


# ---------------------------------------------------------------------------
# JSON encoding: row-major arrays, complex entries as [re, im] pairs
# ---------------------------------------------------------------------------

def matrix_to_json(m: np.ndarray):
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return [[[float(z.real), float(z.imag)] for z in row] for row in m]
    return [[float(x) for x in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 3:  # complex entries as [re, im] pairs
        return arr[..., 0] + 1j * arr[..., 1]
    return arr


def operator_to_json(op: RLOperator):
    return {"linearity": op.linearity, "matrix": matrix_to_json(op.matrix)}


def operator_from_json(data) -> RLOperator:
    return RLOperator(matrix_from_json(data["matrix"]), data["linearity"])
