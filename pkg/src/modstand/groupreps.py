"""Antiunitary representations of finite group pairs.

A group pair (G, G1) is a finite group with an index-2 subgroup and a chosen
element r outside it; conjugation by r induces the involution used throughout.
Representations send G1 to unitaries and the other coset to antiunitaries.
The module decides the real/complex/quaternionic trichotomy of irreducible
unitary representations of G1, constructs antiunitary extensions (on the same
space when possible, otherwise on the doubled space), computes commutants of
the full image as real algebras, and tests equivalence of representations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidRep,
    NotIrreducible,
)
from .realified import (
    ANTILINEAR,
    COMPLEX_LINEAR,
    ComplexStructure,
    RLOperator,
    matrix_from_json,
    matrix_to_json,
    realify_antilinear,
    realify_linear,
)

KERNEL_RTOL = 1e-9


# ---------------------------------------------------------------------------
# group pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupPair:
    """Finite group given by a multiplication table, with index-2 subgroup."""

    table: np.ndarray        # (n, n) ints, table[g, h] = g*h
    in_subgroup: np.ndarray  # (n,) bool mask for G1
    reflection: int          # distinguished element r outside G1

    def __post_init__(self):
        t = np.asarray(self.table, dtype=int)
        mask = np.asarray(self.in_subgroup, dtype=bool)
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "in_subgroup", mask)
        n = t.shape[0]
        if t.shape != (n, n) or mask.shape != (n,):
            raise InvalidRep("malformed multiplication table")
        for row in (t, t.T):
            if not all(sorted(r) == list(range(n)) for r in row):
                raise InvalidRep("table rows/columns are not permutations")
        e = self.identity
        if not (np.all(t[e] == np.arange(n)) and np.all(t[:, e] == np.arange(n))):
            raise InvalidRep("identity is not neutral")
        if mask.sum() * 2 != n:
            raise InvalidRep("subgroup does not have index 2")
        sub = np.flatnonzero(mask)
        if not mask[e]:
            raise InvalidRep("subgroup misses the identity")
        for g in sub:
            if not mask[t[g][sub]].all():
                raise InvalidRep("subgroup mask is not closed under products")
        if mask[self.reflection]:
            raise InvalidRep("reflection must lie outside the subgroup")
        r_inv = self.inverse(self.reflection)
        for g in sub:
            if not mask[t[t[self.reflection, g], r_inv]]:
                raise InvalidRep("conjugation by r does not preserve G1")

    @property
    def order(self) -> int:
        return self.table.shape[0]

    @property
    def identity(self) -> int:
        t = self.table
        for e in range(t.shape[0]):
            if np.all(t[e] == np.arange(t.shape[0])):
                return e
        raise InvalidRep("no identity element")

    def inverse(self, g: int) -> int:
        return int(np.flatnonzero(self.table[g] == self.identity)[0])

    def multiply(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def tau(self, g: int) -> int:
        """Conjugation by the distinguished reflection."""
        r = self.reflection
        return self.multiply(self.multiply(r, g), self.inverse(r))

    @property
    def subgroup_elements(self) -> np.ndarray:
        return np.flatnonzero(self.in_subgroup)

    @property
    def coset_elements(self) -> np.ndarray:
        return np.flatnonzero(~self.in_subgroup)

    @property
    def r_squared(self) -> int:
        return self.multiply(self.reflection, self.reflection)

    def to_json(self):
        return {
            "order": self.order,
            "table": self.table.tolist(),
            "subgroup_mask": [bool(x) for x in self.in_subgroup],
            "r_index": self.reflection,
        }

    @staticmethod
    def from_json(data) -> "GroupPair":
        return GroupPair(
            np.asarray(data["table"], dtype=int),
            np.asarray(data["subgroup_mask"], dtype=bool),
            int(data["r_index"]),
        )


def _direct_product_table(t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    n1, n2 = t1.shape[0], t2.shape[0]
    t = np.empty((n1 * n2, n1 * n2), dtype=int)
    for a in range(n1):
        for b in range(n2):
            for c in range(n1):
                for d in range(n2):
                    t[a * n2 + b, c * n2 + d] = t1[a, c] * n2 + t2[b, d]
    return t


def _cyclic_table(n: int) -> np.ndarray:
    idx = np.arange(n)
    return (idx[:, None] + idx[None, :]) % n


def _quaternion_table() -> np.ndarray:
    # elements 2*a + s: axis a in (1, i, j, k), sign s (0 -> +, 1 -> -)
    axis_mul = {
        (0, 0): (0, +1), (0, 1): (1, +1), (0, 2): (2, +1), (0, 3): (3, +1),
        (1, 0): (1, +1), (1, 1): (0, -1), (1, 2): (3, +1), (1, 3): (2, -1),
        (2, 0): (2, +1), (2, 1): (3, -1), (2, 2): (0, -1), (2, 3): (1, +1),
        (3, 0): (3, +1), (3, 1): (2, +1), (3, 2): (1, -1), (3, 3): (0, -1),
    }
    t = np.empty((8, 8), dtype=int)
    for a in range(4):
        for sa in range(2):
            for b in range(4):
                for sb in range(2):
                    c, sign = axis_mul[(a, b)]
                    s = (sa + sb + (0 if sign > 0 else 1)) % 2
                    t[2 * a + sa, 2 * b + sb] = 2 * c + s
    return t


def preset_pair(name: str) -> GroupPair:
    """Shipped group pairs, keyed by name.

    "z2": (Z2, {e});  "z4": (Z4, Z2);  "dihedral-N": (D_N, Z_N);
    "zN-z2": (Z_N x Z2, Z_N);  "q8-z2": (Q8 x Z2, Q8).
    """
    if name == "z2":
        return GroupPair(_cyclic_table(2), np.array([True, False]), 1)
    if name == "z4":
        return GroupPair(_cyclic_table(4), np.array([True, False, True, False]), 1)
    if name.startswith("dihedral-"):
        n = int(name.split("-")[1])
        order = 2 * n
        t = np.empty((order, order), dtype=int)
        # element k + n*eps acts as x -> (-1)^eps x + k on Z_n
        for k1 in range(n):
            for e1 in range(2):
                for k2 in range(n):
                    for e2 in range(2):
                        k = (k1 + (k2 if e1 == 0 else -k2)) % n
                        t[k1 + n * e1, k2 + n * e2] = k + n * ((e1 + e2) % 2)
        mask = np.arange(order) < n
        return GroupPair(t, mask, n)
    if name.endswith("-z2") and name.startswith("z") and name != "q8-z2":
        n = int(name[1:-3])
        t = _direct_product_table(_cyclic_table(n), _cyclic_table(2))
        mask = np.arange(2 * n) % 2 == 0
        return GroupPair(t, mask, 1)
    if name == "q8-z2":
        t = _direct_product_table(_quaternion_table(), _cyclic_table(2))
        mask = np.arange(16) % 2 == 0
        return GroupPair(t, mask, 1)
    raise ValueError(f"unknown preset {name!r}")


QUATERNION_2DIM = {
    # the 2-dimensional irreducible representation of Q8
    0: np.eye(2, dtype=complex),
    1: -np.eye(2, dtype=complex),
    2: np.array([[1j, 0], [0, -1j]]),
    3: np.array([[-1j, 0], [0, 1j]]),
    4: np.array([[0, 1], [-1, 0]], dtype=complex),
    5: np.array([[0, -1], [1, 0]], dtype=complex),
    6: np.array([[0, 1j], [1j, 0]]),
    7: np.array([[0, -1j], [-1j, 0]]),
}


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubgroupRep:
    """Unitary representation of G1, element index -> complex matrix."""

    pair: GroupPair
    matrices: dict

    @property
    def dim(self) -> int:
        return next(iter(self.matrices.values())).shape[0]

    def validate(self, tol: float = 1e-10):
        t = self.pair
        for g in t.subgroup_elements:
            m = self.matrices[int(g)]
            if np.linalg.norm(m @ m.conj().T - np.eye(self.dim), 2) > tol:
                raise InvalidRep(f"element {g} is not unitary")
            for h in t.subgroup_elements:
                prod = self.matrices[int(g)] @ self.matrices[int(h)]
                ref = self.matrices[t.multiply(int(g), int(h))]
                if np.linalg.norm(prod - ref, 2) > tol:
                    raise InvalidRep("multiplication table is not respected")


@dataclass(frozen=True)
class AntiunitaryRep:
    """Antiunitary representation of a pair, element index -> RLOperator."""

    pair: GroupPair
    operators: dict

    @property
    def dim(self) -> int:
        return self.operators[self.pair.identity].dim_c

    def homomorphism_residual(self) -> float:
        n = self.pair.order
        worst = 0.0
        for g in range(n):
            for h in range(n):
                prod = self.operators[g].matrix @ self.operators[h].matrix
                ref = self.operators[self.pair.multiply(g, h)].matrix
                worst = max(worst, float(np.linalg.norm(prod - ref, 2)))
        return worst

    def validate(self, tol: float = 1e-10):
        for g in range(self.pair.order):
            op = self.operators[g]
            expected = COMPLEX_LINEAR if self.pair.in_subgroup[g] else ANTILINEAR
            if op.linearity != expected:
                raise InvalidRep(f"element {g} has wrong linearity")
            if not op.is_isometry(tol):
                raise InvalidRep(f"element {g} is not isometric")
        if self.homomorphism_residual() > tol:
            raise InvalidRep("homomorphism residual too large")

    def restricted(self) -> SubgroupRep:
        mats = {
            int(g): self.operators[int(g)].to_complex()
            for g in self.pair.subgroup_elements
        }
        return SubgroupRep(self.pair, mats)

    def to_json(self):
        return {
            "group": self.pair.to_json(),
            "dimension": self.dim,
            "elements": [
                {
                    "linearity": self.operators[g].linearity,
                    "matrix": matrix_to_json(self.operators[g].to_complex()),
                }
                for g in range(self.pair.order)
            ],
        }

    @staticmethod
    def from_json(data) -> "AntiunitaryRep":
        pair = GroupPair.from_json(data["group"])
        ops = {}
        for g, item in enumerate(data["elements"]):
            m = matrix_from_json(item["matrix"])
            if item["linearity"] == COMPLEX_LINEAR:
                ops[g] = RLOperator.from_linear(m)
            else:
                ops[g] = RLOperator.from_antilinear(m)
        return AntiunitaryRep(pair, ops)


def rep_from_generator(pair: GroupPair, sub: SubgroupRep, r_op: RLOperator) -> AntiunitaryRep:
    """Assemble the full representation from U restricted to G1 and U_r."""
    ops = {int(g): RLOperator.from_linear(sub.matrices[int(g)])
           for g in pair.subgroup_elements}
    r_inv = pair.inverse(pair.reflection)
    for g in pair.coset_elements:
        h = pair.multiply(int(g), r_inv)  # g = h r with h in G1
        ops[int(g)] = ops[h] @ r_op
    return AntiunitaryRep(pair, ops)


# ---------------------------------------------------------------------------
# solvers for intertwiners and commutants
# ---------------------------------------------------------------------------

def _real_kernel(rows: list, n: int, rtol: float = KERNEL_RTOL) -> np.ndarray:
    """Orthonormal kernel basis of stacked real-linear constraints on n x n."""
    a = np.vstack(rows)
    if a.shape[0] < n * n:
        a = np.vstack([a, np.zeros((n * n - a.shape[0], n * n))])
    _, s, vt = np.linalg.svd(a, full_matrices=False)
    keep = s <= rtol * max(s[0], 1e-300)
    return vt.T[:, keep]


def _commuting_rows(u: np.ndarray, n: int) -> np.ndarray:
    """vec(X) -> vec(U X - X U) for real (n, n) matrices, row-major vec."""
    iden = np.eye(n)
    return np.kron(u, iden) - np.kron(iden, u.T)


def _intertwine_rows(u1: np.ndarray, u2: np.ndarray, n: int) -> np.ndarray:
    """vec(X) -> vec(X U1 - U2 X), row-major vec."""
    iden = np.eye(n)
    return np.kron(iden, u1.T) - np.kron(u2, iden)


def _structure_rows(n2: int, sign: float) -> np.ndarray:
    """Constraint X I - sign I X = 0 for the realified complex structure."""
    jm = ComplexStructure(n2 // 2).matrix
    iden = np.eye(n2)
    return np.kron(iden, jm.T) - sign * np.kron(jm, iden)


def linear_commutant_basis(mats: list, antimats: list, dim_c: int) -> list:
    """Real basis of complex-linear operators commuting with all given ops.

    Inputs and outputs are realified matrices.
    """
    n2 = 2 * dim_c
    rows = [_structure_rows(n2, 1.0)]
    for m in mats + antimats:
        rows.append(_commuting_rows(m, n2))
    cols = _real_kernel(rows, n2)
    return [cols[:, k].reshape(n2, n2) for k in range(cols.shape[1])]


def antilinear_intertwiner_basis(mats1: dict, mats2: dict, elements, dim_c: int) -> list:
    """Real basis of antilinear X with X U1_g = U2_g X for listed g."""
    n2 = 2 * dim_c
    rows = [_structure_rows(n2, -1.0)]
    for g in elements:
        rows.append(_intertwine_rows(
            realify_linear(mats1[int(g)]), realify_linear(mats2[int(g)]), n2
        ))
    cols = _real_kernel(rows, n2)
    return [cols[:, k].reshape(n2, n2) for k in range(cols.shape[1])]


def _polar_unitary(m: np.ndarray) -> np.ndarray:
    u, _, vt = np.linalg.svd(m)
    return u @ vt


# ---------------------------------------------------------------------------
# commutant classification
# ---------------------------------------------------------------------------

def commutant_classify(rep: AntiunitaryRep) -> dict:
    """Classify the real commutant of the full image.

    Returns the commutant basis, the label "R" / "C" / "H" / "reducible",
    and the complex dimension of the subgroup commutant, which must be the
    complexification of the full one.
    """
    rep.validate()
    pair = rep.pair
    unitaries = [rep.operators[int(g)].matrix for g in pair.subgroup_elements]
    antis = [rep.operators[int(g)].matrix for g in pair.coset_elements]
    full = linear_commutant_basis(unitaries, antis, rep.dim)
    sub = linear_commutant_basis(unitaries, [], rep.dim)

    dim_full = len(full)
    if len(sub) % 2:
        raise InvalidRep("subgroup commutant has odd real dimension")
    dim_sub_c = len(sub) // 2

    # symmetric elements of the commutant beyond multiples of 1 signal a
    # nontrivial orthogonal projection, hence reducibility
    sym = [0.5 * (b + b.T) for b in full]
    stack = np.stack([m.ravel() for m in sym]) if sym else np.zeros((0, 1))
    sym_rank = int(np.linalg.matrix_rank(stack, tol=1e-8)) if sym else 0

    labels = {1: "R", 2: "C", 4: "H"}
    if sym_rank == 1 and dim_full in labels:
        label = labels[dim_full]
    else:
        label = "reducible"
    return {
        "basis": full,
        "classification": label,
        "commutant_dim_real": dim_full,
        "subgroup_commutant_dim_complex": dim_sub_c,
        "complexification_consistent": dim_sub_c == dim_full,
    }


# ---------------------------------------------------------------------------
# type trichotomy
# ---------------------------------------------------------------------------

def _twisted_matrices(pair: GroupPair, sub: SubgroupRep) -> dict:
    return {int(g): sub.matrices[pair.tau(int(g))] for g in pair.subgroup_elements}


def is_irreducible(sub: SubgroupRep) -> bool:
    mats = [realify_linear(sub.matrices[int(g)]) for g in sub.pair.subgroup_elements]
    return len(linear_commutant_basis(mats, [], sub.dim)) == 2


def classify_type(pair: GroupPair, sub: SubgroupRep) -> tuple:
    """Real/complex/quaternionic type of an irreducible U with respect to tau.

    Solves the antilinear intertwiner equation Phi U_g = U_tau(g) Phi.  An
    empty solution space means complex type.  Otherwise Phi is isometrized
    and Phi^2 = +-U_(r^2) decides real versus quaternionic; the witness Phi
    is returned (for the real case it extends the representation by U_r = Phi).
    """
    sub.validate()
    if not is_irreducible(sub):
        raise NotIrreducible("input must be irreducible over the subgroup")
    twisted = _twisted_matrices(pair, sub)
    basis = antilinear_intertwiner_basis(
        sub.matrices, twisted, pair.subgroup_elements, sub.dim
    )
    if not basis:
        return "complex", None
    if len(basis) != 2:
        raise NotIrreducible(
            f"antilinear intertwiner space has real dimension {len(basis)}"
        )
    phi = RLOperator.projected(_polar_unitary(basis[0]), ANTILINEAR)
    # canonical phase: largest entry of the complex matrix real positive
    a = phi.to_complex()
    top = a.ravel()[np.argmax(np.abs(a))]
    phi = RLOperator.from_antilinear(a * (np.conj(top) / abs(top)))
    u_r2 = realify_linear(sub.matrices[pair.r_squared])
    sq = phi.matrix @ phi.matrix
    lam = float(np.trace(sq @ u_r2.T)) / sq.shape[0]
    resid = min(np.linalg.norm(sq - u_r2, 2), np.linalg.norm(sq + u_r2, 2))
    if resid > 1e-8 or abs(abs(lam) - 1.0) > 1e-8:
        raise InvalidRep(f"Phi^2 is not +-U_(r^2), residual {resid}")
    return ("real", phi) if lam > 0 else ("quaternionic", phi)


def fourth_root_conjugation(phi: RLOperator) -> RLOperator:
    """Normalize an antilinear intertwiner to J with J^4 = 1.

    Corrects Phi by the inverse principal unitary square root B of Phi^2
    away from ker(Phi^2 + 1); B commutes with Phi, so J = B^(-1) Phi still
    intertwines and satisfies J^4 = 1.
    """
    a = RLOperator.projected(phi.matrix @ phi.matrix, COMPLEX_LINEAR).to_complex()
    w, q = np.linalg.eig(a)
    theta = np.angle(w)
    on_cut = np.abs(np.abs(theta) - np.pi) < 1e-9
    root = np.where(on_cut, 1.0, np.exp(0.5j * theta))
    b = (q * root) @ np.linalg.inv(q)
    j = RLOperator.projected(
        np.linalg.inv(realify_linear(b)) @ phi.matrix, ANTILINEAR
    )
    return j


# ---------------------------------------------------------------------------
# decomposition into irreducibles and extension construction
# ---------------------------------------------------------------------------

def _invariant_blocks(sub: SubgroupRep, rng: np.random.Generator) -> list:
    """Isometries (complex (n, k) arrays) onto irreducible invariant subspaces."""
    mats = [realify_linear(sub.matrices[int(g)]) for g in sub.pair.subgroup_elements]
    comm = linear_commutant_basis(mats, [], sub.dim)
    if len(comm) == 2:
        return [np.eye(sub.dim, dtype=complex)]
    h = np.zeros((sub.dim, sub.dim), dtype=complex)
    for b in comm:
        bc = RLOperator.projected(b, COMPLEX_LINEAR).to_complex()
        h += rng.standard_normal() * (bc + bc.conj().T)
    w, q = np.linalg.eigh(h)
    blocks = []
    start = 0
    for k in range(1, sub.dim + 1):
        if k == sub.dim or w[k] - w[k - 1] > 1e-8 * max(1.0, abs(w[-1])):
            iso = q[:, start:k]
            inner = SubgroupRep(sub.pair, {
                int(g): iso.conj().T @ sub.matrices[int(g)] @ iso
                for g in sub.pair.subgroup_elements
            })
            blocks.extend(iso @ deeper for deeper in _invariant_blocks(inner, rng))
            start = k
    return blocks


def _complex_intertwiner(pair: GroupPair, m1: dict, m2: dict) -> Optional[np.ndarray]:
    """Unitary T with T m1_g = m2_g T over G1, or None."""
    n = next(iter(m1.values())).shape[0]
    if next(iter(m2.values())).shape[0] != n:
        return None
    n2 = 2 * n
    rows = [_structure_rows(n2, 1.0)]
    for g in pair.subgroup_elements:
        rows.append(_intertwine_rows(realify_linear(m1[int(g)]),
                                     realify_linear(m2[int(g)]), n2))
    cols = _real_kernel(rows, n2)
    if cols.shape[1] == 0:
        return None
    x = cols[:, 0].reshape(n2, n2)
    sv = np.linalg.svd(x, compute_uv=False)
    if sv[-1] < 1e-8 * sv[0]:
        return None
    t = RLOperator.projected(_polar_unitary(x), COMPLEX_LINEAR).to_complex()
    resid = max(
        np.linalg.norm(t @ m1[int(g)] - m2[int(g)] @ t, 2)
        for g in pair.subgroup_elements
    )
    return t if resid < 1e-8 else None


def _realify_isometry(iso: np.ndarray) -> np.ndarray:
    return np.vstack([np.hstack([iso.real, -iso.imag]),
                      np.hstack([iso.imag, iso.real])])


def extend_representation(pair: GroupPair, sub: SubgroupRep,
                          rng: Optional[np.random.Generator] = None) -> AntiunitaryRep:
    """Extend a unitary representation of G1 to an antiunitary one of G.

    Tries a same-space extension blockwise through the decomposition into
    irreducibles: real-type blocks receive their intertwining conjugation,
    complex-type blocks are swapped with a partner block carrying the
    conjugate-twisted class, and quaternionic blocks are paired up.  If any
    block cannot be matched, the doubling on H (+) H* is returned instead:
    the subgroup acts by U (+) (conj U o tau) and r by
    J(v, l) = (conj l, conj(U_(r^2) v)).
    """
    sub.validate()
    if rng is None:
        rng = np.random.default_rng(1810)
    blocks = _invariant_blocks(sub, rng)
    reps = [
        SubgroupRep(pair, {
            int(g): iso.conj().T @ sub.matrices[int(g)] @ iso
            for g in pair.subgroup_elements
        })
        for iso in blocks
    ]
    n = sub.dim
    j_total = np.zeros((2 * n, 2 * n))
    consumed = [False] * len(blocks)
    quaternionic_queue: dict = {}
    ok = True

    def embed_anti(iso_from, iso_to, anti_matrix):
        wf, wt = _realify_isometry(iso_from), _realify_isometry(iso_to)
        return wt @ anti_matrix @ wf.T

    for i, rep_i in enumerate(reps):
        if consumed[i]:
            continue
        kind, phi = classify_type(pair, rep_i)
        if kind == "real":
            j_total += embed_anti(blocks[i], blocks[i], phi.matrix)
            consumed[i] = True
        elif kind == "quaternionic":
            key = tuple(np.round([
                complex(np.trace(rep_i.matrices[int(g)]))
                for g in pair.subgroup_elements
            ], 6).tolist())
            partner = quaternionic_queue.pop(key, None)
            if partner is None:
                quaternionic_queue[key] = i
                continue
            t = _complex_intertwiner(pair, rep_i.matrices, reps[partner].matrices)
            if t is None:
                ok = False
                break
            iso_b = blocks[partner] @ t
            # Phi^2 = -U_(r^2) here, so the sign on the return leg restores
            # J^2 = V_(r^2)
            j_total += embed_anti(blocks[i], iso_b, phi.matrix)
            j_total += embed_anti(iso_b, blocks[i], -phi.matrix)
            consumed[i] = consumed[partner] = True
        else:
            # complex type: partner class equivalent to conj o tau
            target = {
                int(g): rep_i.matrices[pair.tau(int(g))].conj()
                for g in pair.subgroup_elements
            }
            partner, t = None, None
            for k in range(len(blocks)):
                if k == i or consumed[k]:
                    continue
                t = _complex_intertwiner(pair, target, reps[k].matrices)
                if t is not None:
                    partner = k
                    break
            if partner is None:
                ok = False
                break
            u_r2 = rep_i.matrices[pair.r_squared]
            conj_block = realify_antilinear(np.eye(rep_i.dim, dtype=complex))
            j_total += embed_anti(blocks[i], blocks[partner] @ t, conj_block)
            j_total += embed_anti(blocks[partner] @ t, blocks[i],
                                  realify_antilinear(u_r2))
            consumed[i] = consumed[partner] = True

    if ok and not quaternionic_queue and all(consumed):
        r_op = RLOperator.projected(j_total, ANTILINEAR)
        rep = rep_from_generator(pair, sub, r_op)
        rep.validate(1e-8)
        return rep

    # doubling on H (+) H*
    r2 = sub.matrices[pair.r_squared]
    doubled = {}
    for g in pair.subgroup_elements:
        m = sub.matrices[int(g)]
        mt = sub.matrices[pair.tau(int(g))].conj()
        doubled[int(g)] = np.block([[m, np.zeros_like(m)],
                                    [np.zeros_like(m), mt]])
    zero = np.zeros_like(r2)
    j_c = np.block([[zero, np.eye(n, dtype=complex)], [r2.conj(), zero]])
    r_op = RLOperator.from_antilinear(j_c)
    rep = rep_from_generator(pair, SubgroupRep(pair, doubled), r_op)
    rep.validate(1e-8)
    return rep


# ---------------------------------------------------------------------------
# equivalence
# ---------------------------------------------------------------------------

def are_equivalent(rep1: AntiunitaryRep, rep2: AntiunitaryRep) -> tuple:
    """Decide U1 ~ U2 over the full pair, with a unitary intertwiner.

    Also decides equivalence of the restrictions to G1 alone; the two
    answers must agree (extensions are unique up to equivalence), otherwise
    InvalidRep is raised.  Returns (bool, intertwiner RLOperator or None).
    """
    if not np.array_equal(rep1.pair.table, rep2.pair.table):
        raise DimensionMismatch("representations of different pairs")
    if rep1.dim != rep2.dim:
        raise DimensionMismatch("representations of different dimensions")
    pair = rep1.pair
    n2 = 2 * rep1.dim

    def unitary_solution(elements) -> Optional[np.ndarray]:
        rows = [_structure_rows(n2, 1.0)]
        for g in elements:
            rows.append(_intertwine_rows(rep1.operators[int(g)].matrix,
                                         rep2.operators[int(g)].matrix, n2))
        cols = _real_kernel(rows, n2)
        rng = np.random.default_rng(2025)
        for _ in range(8):
            if cols.shape[1] == 0:
                return None
            coef = rng.standard_normal(cols.shape[1])
            x = (cols @ coef).reshape(n2, n2)
            sv = np.linalg.svd(x, compute_uv=False)
            if sv[-1] < 1e-8 * sv[0]:
                continue
            psi = _polar_unitary(x)
            resid = max(
                np.linalg.norm(psi @ rep1.operators[int(g)].matrix
                               - rep2.operators[int(g)].matrix @ psi, 2)
                for g in elements
            )
            if resid < 1e-8:
                return psi
        return None

    full = unitary_solution(range(pair.order))
    restricted = unitary_solution(pair.subgroup_elements)
    if (full is None) != (restricted is None):
        raise InvalidRep(
            "full and restricted equivalence disagree; uniqueness violated"
        )
    if full is None:
        return False, None
    return True, RLOperator.projected(full, COMPLEX_LINEAR)


# ---------------------------------------------------------------------------
# handy constructions for suites
# ---------------------------------------------------------------------------

def cyclic_character(pair: GroupPair, power: int) -> SubgroupRep:
    """Character g -> exp(2 pi i power k / n) on a cyclic subgroup of order n."""
    sub = [int(g) for g in pair.subgroup_elements]
    n = len(sub)
    e = pair.identity
    gen = None
    for cand in sub:
        g, count = cand, 1
        while g != e and count <= n:
            g = pair.multiply(g, cand)
            count += 1
        if g == e and count == n:
            gen = cand
            break
    if gen is None:
        raise InvalidRep("subgroup is not cyclic")
    mats = {}
    g, k = e, 0
    for _ in range(n):
        mats[g] = np.array([[np.exp(2j * np.pi * power * k / n)]])
        g, k = pair.multiply(g, gen), k + 1
    return SubgroupRep(pair, mats)


def quaternion_rep(pair: GroupPair) -> SubgroupRep:
    """The 2-dimensional irreducible of Q8 inside the q8-z2 preset."""
    mats = {int(g): QUATERNION_2DIM[int(g) // 2] for g in pair.subgroup_elements}
    return SubgroupRep(pair, mats)


def random_conjugated(rep: AntiunitaryRep, rng: np.random.Generator) -> AntiunitaryRep:
    from .realified import random_unitary

    u = RLOperator.from_linear(random_unitary(rng, rep.dim))
    ops = {g: u @ rep.operators[g] @ u.adjoint() for g in range(rep.pair.order)}
    return AntiunitaryRep(rep.pair, ops)
