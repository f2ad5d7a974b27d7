import numpy as np
import pytest

from modstand import fock as fk
from modstand import realified as rl
from modstand import standard as st
from modstand.errors import DimensionOverflow, NotIsometric


class TestFermiContext:
    @pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
    def test_car_relations(self, d):
        assert fk.FermiContext(d).car_residual() < 1e-12

    def test_klein_twist_squares_to_parity(self):
        ctx = fk.FermiContext(3)
        zt = ctx.klein_twist()
        np.testing.assert_allclose(zt @ zt, ctx.parity(), atol=1e-14)

    def test_creator_from_vacuum(self):
        ctx = fk.FermiContext(3)
        f = np.array([0.3, -0.5j, 1.0])
        created = ctx.create(f) @ ctx.vacuum
        # one-particle sector holds the vector itself
        np.testing.assert_allclose(created[[1, 2, 4]], f, atol=1e-14)

    def test_dimension_cap(self):
        with pytest.raises(DimensionOverflow):
            fk.FermiContext(9)


class TestFieldOperator:
    def test_single_mode_squares_to_one(self):
        ctx = fk.FermiContext(1)
        b = ctx.field(np.array([1.0]))
        np.testing.assert_allclose(b @ b, np.eye(2), atol=1e-14)
        np.testing.assert_allclose(b, b.conj().T, atol=1e-14)

    def test_imaginary_partner_anticommutes(self):
        ctx = fk.FermiContext(2)
        e1 = np.array([1.0, 0.0])
        b1, bi = ctx.field(e1), ctx.field(1j * e1)
        np.testing.assert_allclose(b1 @ bi + bi @ b1, np.zeros((4, 4)), atol=1e-14)

    def test_random_anticommutators(self):
        rng = np.random.default_rng(60)
        for d in (2, 3, 4):
            ctx = fk.FermiContext(d)
            for _ in range(10):
                f = rl.complex_gaussian(rng, d)
                g = rl.complex_gaussian(rng, d)
                assert fk.field_anticommutator_residual(ctx, f, g) < 1e-12


class TestFermiAlgebra:
    def test_zero_subspace_gives_scalars(self):
        ctx = fk.FermiContext(2)
        v = rl.RealSubspace(np.zeros((4, 0)))
        assert fk.fermi_algebra(ctx, v).dim == 1

    def test_single_real_line(self):
        ctx = fk.FermiContext(1)
        v = rl.RealSubspace.from_complex_spanning(np.eye(1))
        a = fk.fermi_algebra(ctx, v)
        assert a.dim == 2  # span{1, b(e1)} since b^2 = 1

    @pytest.mark.parametrize("d", [1, 2])
    def test_full_space_generates_everything(self, d):
        ctx = fk.FermiContext(d)
        full = rl.RealSubspace(np.eye(2 * d))
        assert fk.fermi_algebra(ctx, full).dim == 4 ** d


class TestSecondQuantizeMinus:
    def test_identity(self):
        ctx = fk.FermiContext(3)
        out = fk.second_quantize_minus(ctx, rl.RLOperator.identity(3))
        np.testing.assert_allclose(out.matrix, np.eye(16), atol=1e-14)

    def test_single_mode_phase(self):
        ctx = fk.FermiContext(1)
        theta = 0.7
        u = rl.RLOperator.from_linear(np.array([[np.exp(1j * theta)]]))
        out = fk.second_quantize_minus(ctx, u)
        np.testing.assert_allclose(
            out.to_complex(), np.diag([1.0, np.exp(1j * theta)]), atol=1e-12
        )

    def test_conjugation_lifts_to_conjugation(self):
        ctx = fk.FermiContext(2)
        out = fk.second_quantize_minus(ctx, rl.RLOperator.conjugation(2))
        np.testing.assert_allclose(
            out.matrix, rl.RLOperator.conjugation(4).matrix, atol=1e-12
        )

    def test_functoriality(self):
        rng = np.random.default_rng(61)
        ctx = fk.FermiContext(3)
        for _ in range(25):
            u1 = rl.RLOperator.from_linear(rl.random_unitary(rng, 3))
            pick = rng.uniform()
            t2 = (rl.random_conjugation(rng, 3) if pick < 0.5
                  else rl.RLOperator.from_linear(rl.random_unitary(rng, 3)))
            lhs = fk.second_quantize_minus(ctx, u1 @ t2)
            rhs = fk.second_quantize_minus(ctx, u1) @ fk.second_quantize_minus(ctx, t2)
            assert np.linalg.norm(lhs.matrix - rhs.matrix, 2) < 1e-10

    def test_fixes_vacuum_and_matches_linearity(self):
        rng = np.random.default_rng(62)
        ctx = fk.FermiContext(2)
        j = rl.random_conjugation(rng, 2)
        out = fk.second_quantize_minus(ctx, j)
        assert out.linearity == rl.ANTILINEAR
        vac = rl.embed_vector(ctx.vacuum)
        np.testing.assert_allclose(out.matrix @ vac, vac, atol=1e-12)

    def test_rejects_nonisometric(self):
        ctx = fk.FermiContext(2)
        bad = rl.RLOperator.from_linear(2.0 * np.eye(2))
        with pytest.raises(NotIsometric):
            fk.second_quantize_minus(ctx, bad)


class TestTwistedDuality:
    def test_zero_subspace(self):
        ctx = fk.FermiContext(2)
        v = rl.RealSubspace(np.zeros((4, 0)))
        out = fk.twisted_duality_check(ctx, v)
        assert out["passed"]

    def test_one_mode_real_line(self):
        ctx = fk.FermiContext(1)
        v = rl.RealSubspace.from_complex_spanning(np.eye(1))
        comp = fk.real_orthogonal_complement(ctx, v)
        # the complement is the imaginary line
        want = rl.embed_columns((1j * np.eye(1)))
        assert rl.RealSubspace.from_spanning(want).contains(comp.basis[:, 0])
        out = fk.twisted_duality_check(ctx, v)
        assert out["passed"]

    @pytest.mark.parametrize("d", [2, 3])
    def test_random_standard_subspaces(self, d):
        rng = np.random.default_rng(63)
        ctx = fk.FermiContext(d)
        for _ in range(4):
            v = st.random_standard_subspace(rng, d)
            out = fk.twisted_duality_check(ctx, v.space)
            assert out["distance"] < 1e-8
            assert out["super_bracket_residual"] < 1e-8


class TestFermiModular:
    def test_one_mode_real_points(self):
        ctx = fk.FermiContext(1)
        v = st.StandardSubspace.canonical_real_points(1)
        out = fk.fermi_modular_check(ctx, v)
        assert out["passed"]

    def test_real_points_general_d(self):
        for d in (2, 3):
            ctx = fk.FermiContext(d)
            v = st.StandardSubspace.canonical_real_points(d)
            out = fk.fermi_modular_check(ctx, v)
            assert out["passed"]

    def test_half_skew_block_spectrum(self):
        # quantized spectrum is all products of one-particle eigenvalues
        # over subsets: {1, 9, 1/9, 1} for the half-skew example in C^2
        from tests.test_standard import half_skew_subspace

        ctx = fk.FermiContext(2)
        v = half_skew_subspace()
        out = fk.fermi_modular_check(ctx, v)
        assert out["passed"]
        algebra = fk.fermi_algebra(ctx, v.space)
        from modstand import vonneumann as vn

        data, _ = vn.tomita_modular(algebra, ctx.vacuum)
        np.testing.assert_allclose(
            data.triple.spectrum(), [1 / 9, 1.0, 1.0, 9.0], atol=1e-8
        )

    @pytest.mark.parametrize("d", [2, 3])
    def test_random_standard_subspaces(self, d):
        rng = np.random.default_rng(64)
        ctx = fk.FermiContext(d)
        for _ in range(3):
            v = st.random_standard_subspace(rng, d)
            out = fk.fermi_modular_check(ctx, v)
            assert out["delta_residual"] < 1e-8
            assert out["j_residual"] < 1e-8


class TestCoherent:
    def test_vacuum_inner_product(self):
        d = 3
        vac = fk.CoherentVector.vacuum(d)
        assert fk.coherent_inner(vac, vac) == pytest.approx(1.0)

    def test_exponential_norm(self):
        rng = np.random.default_rng(65)
        v = rl.complex_gaussian(rng, 4)
        e = fk.CoherentVector.exponential(v)
        got = fk.coherent_inner(e, e)
        np.testing.assert_allclose(got, np.exp(np.vdot(v, v).real), rtol=1e-12)

    def test_hermitian_and_cauchy_schwarz(self):
        rng = np.random.default_rng(66)
        for _ in range(100):
            x = fk.CoherentVector(
                rl.complex_gaussian(rng, 2), rl.complex_gaussian(rng, (2, 3))
            )
            y = fk.CoherentVector(
                rl.complex_gaussian(rng, 2), rl.complex_gaussian(rng, (2, 3))
            )
            ip = fk.coherent_inner(x, y)
            np.testing.assert_allclose(ip, np.conj(fk.coherent_inner(y, x)), atol=1e-10)
            assert abs(ip) <= fk.coherent_norm(x) * fk.coherent_norm(y) * (1 + 1e-10)

    def test_label_merging(self):
        v = np.array([[1.0, 2.0]], dtype=complex)
        x = fk.CoherentVector(np.array([1.0, 2.0]), np.vstack([v, v]))
        assert x.coeffs.shape == (1,)
        assert x.coeffs[0] == pytest.approx(3.0)


class TestWeyl:
    def test_zero_translation_is_identity(self):
        rng = np.random.default_rng(67)
        xi = fk.CoherentVector.exponential(rl.complex_gaussian(rng, 3))
        out = fk.weyl_translate(np.zeros(3), xi)
        assert fk.coherent_norm(out.minus(xi)) < 1e-14

    def test_vacuum_expectation_of_weyl(self):
        rng = np.random.default_rng(68)
        for _ in range(20):
            v = rl.complex_gaussian(rng, 3)
            vac = fk.CoherentVector.vacuum(3)
            got = fk.coherent_inner(vac, fk.weyl_operator(v, vac))
            ref = np.exp(-np.vdot(v, v).real / 4.0)
            np.testing.assert_allclose(got, ref, atol=1e-12)

    def test_translation_preserves_norm(self):
        rng = np.random.default_rng(69)
        for _ in range(20):
            xi = fk.CoherentVector(
                rl.complex_gaussian(rng, 3), rl.complex_gaussian(rng, (3, 2))
            )
            x = rl.complex_gaussian(rng, 2)
            got = fk.coherent_norm(fk.weyl_translate(x, xi))
            np.testing.assert_allclose(got, fk.coherent_norm(xi), rtol=1e-12)

    def test_translation_inverse(self):
        rng = np.random.default_rng(70)
        xi = fk.CoherentVector(
            rl.complex_gaussian(rng, 2), rl.complex_gaussian(rng, (2, 2))
        )
        x = rl.complex_gaussian(rng, 2)
        back = fk.weyl_translate(-x, fk.weyl_translate(x, xi))
        assert fk.coherent_norm(back.minus(xi)) < 1e-12

    def test_parallel_real_vectors_have_trivial_phase(self):
        x = np.array([1.0, 2.0])
        y = np.array([2.0, 4.0])
        assert abs(np.vdot(x, y).imag) == 0.0
        probes = [fk.CoherentVector.vacuum(2)]
        assert fk.weyl_relation_residual(x, y, probes) < 1e-12

    def test_weyl_relation_random(self):
        rng = np.random.default_rng(71)
        probes = [fk.CoherentVector.exponential(rl.complex_gaussian(rng, 3))
                  for _ in range(3)]
        for _ in range(30):
            x = rl.complex_gaussian(rng, 3)
            y = rl.complex_gaussian(rng, 3)
            assert fk.weyl_relation_residual(x, y, probes) < 1e-12


class TestBoseChecks:
    def test_real_points(self):
        rng = np.random.default_rng(72)
        v = st.StandardSubspace.canonical_real_points(2)
        out = fk.bose_checks(v, rng)
        assert out["passed"]

    def test_half_skew_subspace(self):
        from tests.test_standard import half_skew_subspace

        rng = np.random.default_rng(73)
        out = fk.bose_checks(half_skew_subspace(), rng)
        assert out["passed"]

    def test_fixed_labels_for_subspace_vectors(self):
        from tests.test_standard import half_skew_subspace

        v = half_skew_subspace()
        triple = st.modular_objects(v)
        rng = np.random.default_rng(74)
        # S fixes V pointwise, so the coherent identity reduces to equality
        vec = v.basis @ rng.standard_normal(2)
        z = rl.extract_vector(vec)
        half = rl.operator_function(triple.delta, "power", 0.5)
        lifted = fk.quantize_plus(
            triple.j, fk.quantize_plus(half, fk.CoherentVector.exponential(z))
        )
        assert np.linalg.norm(lifted.labels[0] - z) < 1e-10


def test_random_standard_bose_suite():
    rng = np.random.default_rng(75)
    for d in (1, 2, 3):
        v = st.random_standard_subspace(rng, d)
        out = fk.bose_checks(v, rng)
        assert out["weyl_residual"] < 1e-12
        assert out["modular_label_residual"] < 1e-10


def test_rotated_convention_toggle():
    from tests.test_standard import half_skew_subspace

    ctx = fk.FermiContext(2)
    v = half_skew_subspace()
    out = fk.fermi_modular_check(ctx, v, rotated_convention=True)
    assert out["passed"]
    assert out["delta_residual"] < 1e-8
    assert out["j_residual"] < 1e-8


def test_coherent_gram_positive_definite():
    rng = np.random.default_rng(76)
    for _ in range(10):
        x = fk.CoherentVector(
            rl.complex_gaussian(rng, 4), rl.complex_gaussian(rng, (4, 3))
        )
        assert x.gram_positive()
