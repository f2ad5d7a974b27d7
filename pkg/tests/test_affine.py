import numpy as np
import pytest

from modstand import affine as af
from modstand import realified as rl
from modstand import standard as st
from modstand.errors import InvalidGrid, InvalidParameters, NotDecaying


@pytest.fixture(scope="module")
def coarse():
    return af.build_rep(256, 4.0)


class TestGridBasics:
    def test_grid_validation(self):
        with pytest.raises(InvalidGrid):
            af.StripGrid(100, 4.0)  # not a power of two
        with pytest.raises(InvalidGrid):
            af.StripGrid(4, 4.0)
        with pytest.raises(InvalidGrid):
            af.StripGrid(64, -1.0)

    def test_mode_matrix_unitary(self):
        for n, L in [(16, 2.0), (64, 4.0)]:
            m = af.StripGrid(n, L).mode_matrix()
            assert np.linalg.norm(m.conj().T @ m - np.eye(n), 2) < 1e-13

    def test_frequencies_symmetric(self):
        mu = af.StripGrid(32, 4.0).frequencies
        np.testing.assert_allclose(mu + mu[::-1], 0.0, atol=0)

    def test_generator_positivity_exact(self, coarse):
        p = coarse.momentum
        assert np.all(p > 0)
        np.testing.assert_allclose(p.min(), np.exp(-4.0), rtol=1e-14)


class TestGridOperators:
    def test_identity_dilation(self, coarse):
        psi = af.gaussian_probe(coarse)
        np.testing.assert_allclose(coarse.dilation(0.0).apply(psi), psi, atol=1e-14)

    def test_translation_phases_add_exactly(self, coarse):
        psi = af.gaussian_probe(coarse)
        lhs = (coarse.translation(0.8) @ coarse.translation(-0.3)).apply(psi)
        rhs = coarse.translation(0.5).apply(psi)
        np.testing.assert_allclose(lhs, rhs, atol=1e-14)

    def test_dilation_at_grid_step_is_twisted_shift(self, coarse):
        psi = af.gaussian_probe(coarse)
        k = 7
        got = coarse.dilation(k * coarse.grid.h).apply(psi)
        manual = np.roll(psi, -k)
        manual[-k:] *= -1.0
        np.testing.assert_allclose(got, manual, atol=1e-12)

    def test_group_law_on_representable_elements(self, coarse):
        # wrap-exact identity: narrow bulk probe keeps the band mass at zero
        psi = af.gaussian_probe(coarse, width=0.4)
        h = coarse.grid.h
        g1 = coarse.group_element(0.4, np.exp(3 * h))
        g2 = coarse.group_element(-0.1, np.exp(5 * h))
        # (b1, a1)(b2, a2) = (b1 + a1 b2, a1 a2)
        prod = coarse.group_element(0.4 + np.exp(3 * h) * (-0.1), np.exp(8 * h))
        resid = np.linalg.norm((g1 @ g2).apply(psi) - prod.apply(psi))
        assert resid < 1e-12

    def test_conjugation_composition_rules(self, coarse):
        psi = af.gaussian_probe(coarse)
        j = coarse.conjugation()
        u = coarse.translation(1.0)
        # J U(b) J = U(-b)
        lhs = (j @ u @ j).apply(psi)
        rhs = coarse.translation(-1.0).apply(psi)
        np.testing.assert_allclose(lhs, rhs, atol=1e-13)
        # J commutes with dilations
        d = coarse.dilation(0.37)
        np.testing.assert_allclose(
            (j @ d @ j).apply(psi), d.apply(psi), atol=1e-13
        )

    def test_to_rl_round_trip_small(self):
        ctx = af.build_rep(8, 2.0)
        op = ctx.group_element(0.3, np.exp(ctx.grid.h))
        rlop = op.to_rl()
        psi = af.gaussian_probe(ctx)
        got = rlop.apply_complex(psi)
        np.testing.assert_allclose(got, op.apply(psi), atol=1e-12)
        assert rlop.is_isometry(1e-10)
        jop = (ctx.conjugation() @ op).to_rl()
        assert jop.linearity == rl.ANTILINEAR

    def test_rejects_zero_scale(self, coarse):
        with pytest.raises(InvalidParameters):
            coarse.group_element(0.0, 0.0)


class TestStandardFamily:
    def test_projector_idempotent_and_contractive(self, coarse):
        rng = np.random.default_rng(100)
        v0 = af.standard_family(coarse, 0.0)
        psi = rng.standard_normal(256) + 1j * rng.standard_normal(256)
        p1 = v0.project(psi)
        np.testing.assert_allclose(v0.project(p1), p1, atol=1e-12)
        assert np.linalg.norm(p1) <= np.linalg.norm(psi) + 1e-12

    def test_certificate(self, coarse):
        cert = af.standard_family(coarse, 0.0).certify()
        assert cert["passed"]
        assert cert["modular_pair_residual"] == 0.0
        assert cert["dim"] == 256

    def test_flow_invariance_of_reference(self, coarse):
        v0 = af.standard_family(coarse, 0.0)
        psi = v0.project(af.gaussian_probe(coarse))
        moved = coarse.dilation(0.61).apply(psi)
        assert v0.defect(moved) < 1e-12

    def test_index_zero_is_reference(self, coarse):
        v0 = af.standard_family(coarse, 0.0)
        psi = af.gaussian_probe(coarse, width=0.8)
        np.testing.assert_allclose(
            af.standard_family(coarse, 0.0).project(psi), v0.project(psi), atol=0
        )

    def test_translation_covariance_exact(self, coarse):
        vx = af.standard_family(coarse, 0.7)
        v0 = af.standard_family(coarse, 0.0)
        psi = af.gaussian_probe(coarse)
        lhs = vx.project(coarse.translation(0.7).apply(psi))
        rhs = coarse.translation(0.7).apply(
            v0.project(coarse.translation(-0.7).apply(
                coarse.translation(0.7).apply(psi)))
        )
        np.testing.assert_allclose(lhs, rhs, atol=1e-13)

    def test_small_grid_matches_dense_modular_theory(self):
        # on a tiny well-conditioned grid the pair construction agrees with
        # the dense polar-decomposition machinery
        ctx = af.build_rep(8, 16.0)
        v0 = af.standard_family(ctx, 0.0)
        basis = []
        mu = ctx.grid.frequencies
        modes = ctx.grid.mode_matrix()
        for m in np.flatnonzero(mu > 0):
            partner = ctx.grid.partner_index()[m]
            eps = np.exp(-np.pi * mu[m])
            vec = (modes[:, m] + eps * modes[:, partner]) / np.sqrt(1 + eps ** 2)
            basis.append(vec)
            basis.append((1j * modes[:, m] - 1j * eps * modes[:, partner])
                         / np.sqrt(1 + eps ** 2))
        v_dense = st.StandardSubspace.from_complex_spanning(np.stack(basis, axis=1))
        triple = st.modular_objects(v_dense)
        got = np.sort(np.log(triple.spectrum()))
        want = np.sort(-2 * np.pi * mu)
        np.testing.assert_allclose(got, want, atol=1e-8)
        # and the pair projector agrees with the dense projector
        rng = np.random.default_rng(101)
        psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        dense_p = v_dense.basis @ (v_dense.basis.T @ rl.embed_vector(psi))
        got_p = v0.project(psi)
        np.testing.assert_allclose(rl.embed_vector(got_p), dense_p, atol=1e-10)


class TestBorchers:
    def test_zero_translation_exact(self, coarse):
        out = af.borchers_check(coarse, 0.0, 32)
        assert out["max_residual"] < 1e-14

    def test_interior_probe_is_exact(self, coarse):
        # support strictly inside the unwrapped window: identity is exact
        probe = af.gaussian_probe(coarse, center=0.0, width=0.25)
        out = af.borchers_check(coarse, 1.0, 16, probes=[probe])
        assert out["max_residual"] < 1e-12

    def test_residual_bounded_by_wrap_mass(self, coarse):
        probe = af.gaussian_probe(coarse, width=1.0)
        out = af.borchers_check(coarse, 1.0, 32, probes=[probe])
        entry = out["per_probe"][0]
        assert entry["residual"] <= 2.1 * entry["wrap_mass"] + 1e-12


class TestInclusion:
    def test_zero_is_exact(self, coarse):
        assert af.inclusion_residual(coarse, 0.0) < 1e-13

    def test_positive_small_negative_large(self, coarse):
        pos = af.inclusion_residual(coarse, 1.0)
        neg = af.inclusion_residual(coarse, -1.0)
        assert pos < af.CALIBRATION[(256, 4.0)]["inclusion_pos"]
        assert neg > af.CALIBRATION[(256, 4.0)]["inclusion_neg_floor"]
        assert neg / pos > 1e2


class TestInnerFunction:
    @pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
    def test_bounded_and_symmetric(self, coarse, b):
        out = af.inner_function_check(coarse, b)
        assert out["max_modulus"] <= 1.0 + 1e-12
        assert out["boundary_symmetry_residual"] < 1e-12
        assert out["passed"]

    def test_trivial_multiplier(self, coarse):
        out = af.inner_function_check(coarse, 0.0)
        assert out["max_modulus"] == pytest.approx(1.0)
        assert out["endomorphism_defect"] < 1e-13

    def test_negative_rejected_with_witness(self, coarse):
        with pytest.raises(NotDecaying) as err:
            af.inner_function_check(coarse, -1.0)
        assert "|B|" in str(err.value)


class TestModularIntersection:
    def test_identical_subspaces_give_identity(self, coarse):
        out = af.modular_intersection_check(coarse, x=0.0)
        assert out["limit_residual"] < 1e-12
        assert out["mi2_residual"] < 1e-12

    def test_convergence_and_mi2(self, coarse):
        out = af.modular_intersection_check(coarse)
        assert out["converging"]
        assert out["limit_residual"] < af.CALIBRATION[(256, 4.0)]["mi_limit"]
        assert out["mi2_residual"] < af.CALIBRATION[(256, 4.0)]["mi2"]

    def test_scaling_parameter(self, coarse):
        plain = af.modular_intersection_check(coarse, scaling="plain")
        rescaled = af.modular_intersection_check(coarse, scaling="inverse-2pi")
        # the rescaled flow has barely moved at the same nominal times
        assert rescaled["limit_residual"] > plain["limit_residual"]


class TestHeisenberg:
    def test_trivial_phase(self, coarse):
        probe = af.gaussian_probe(coarse)
        w0 = af.GridOperator.position_diagonal(coarse.grid, np.ones(256, complex))
        np.testing.assert_allclose(w0.apply(probe), probe, atol=0)

    def test_relations(self, coarse):
        out = af.heisenberg_lift(coarse)
        assert out["relation_residual"] < 1e-12
        assert out["momentum_conjugation_residual"] == 0.0
        assert out["generator_min"] > 0


class TestTwoRay:
    def test_small_composite(self):
        ctx = af.TwoRayContext(af.build_rep(64, 4.0), af.build_rep(64, 4.0))
        out = af.two_ray_poincare(ctx)
        assert out["boost_covariance_plus"] < 1e-12
        assert out["boost_covariance_minus"] < 1e-12
        assert out["j_relation_residual"] < 1e-12
        assert out["inclusion_defect_forward"] < 1e-3
        assert (out["inclusion_defect_backward"]
                > 10 * out["inclusion_defect_forward"])

    def test_mismatched_grids_rejected(self):
        with pytest.raises(InvalidGrid):
            af.TwoRayContext(af.build_rep(64, 4.0), af.build_rep(32, 4.0))

    def test_wedge_projector_idempotent(self):
        ctx = af.TwoRayContext(af.build_rep(16, 2.0), af.build_rep(16, 2.0))
        rng = np.random.default_rng(102)
        psi = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        proj = ctx.wedge_projector()
        p1 = proj.project(psi)
        np.testing.assert_allclose(proj.project(p1), p1, atol=1e-12)
        assert np.linalg.norm(p1) <= np.linalg.norm(psi) + 1e-12


class TestLowestWeight:
    def test_diagonal_and_annihilation(self):
        out = af.sl2_lowest_weight(2, 8)
        np.testing.assert_allclose(out["report"]["l0_diagonal"], np.arange(2, 11))
        assert out["report"]["lowest_annihilated"] == 0.0

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_brackets_on_interior(self, m):
        out = af.sl2_lowest_weight(m, 12)
        rep = out["report"]
        assert max(rep["bracket_residuals"].values()) < 1e-12
        assert max(rep["conjugation_residuals"].values()) < 1e-12

    def test_norm_recursion_against_brackets(self):
        # independent recursion for the squared norms of the unnormalized
        # ladder basis; the matrix coefficients must match its ratios
        m, cutoff = 2, 9
        norms = [1.0]
        for k in range(cutoff):
            norms.append((k + 1) * (2 * m + k) * norms[-1])
        out = af.sl2_lowest_weight(m, cutoff)
        raising = out["raising"]
        for k in range(cutoff):
            np.testing.assert_allclose(
                raising[k + 1, k], np.sqrt(norms[k + 1] / norms[k]), rtol=1e-12
            )

    def test_skew_adjointness_of_real_generators(self):
        out = af.sl2_lowest_weight(1, 10)
        for key in ("e", "t", "s"):
            m = out[key]
            inner = m[:-1, :-1]
            np.testing.assert_allclose(
                inner, -inner.conj().T, atol=1e-12
            )

    def test_invalid_parameters(self):
        with pytest.raises(InvalidParameters):
            af.sl2_lowest_weight(0, 12)
        with pytest.raises(InvalidParameters):
            af.sl2_lowest_weight(1, 2)


@pytest.mark.slow
class TestConvergenceStudy:
    """The refinement (N, L) -> (4N, 2L) beats each coarse residual 10x."""

    def test_single_strip_quantities(self):
        results = {}
        for key in ((256, 4.0), (1024, 8.0)):
            ctx = af.build_rep(key[0], key[1])
            bor = af.borchers_check(
                ctx, 1.0, int(round(1.0 / ctx.grid.h))
            )["max_residual"]
            inc = af.inclusion_residual(ctx, 1.0)
            mi = af.modular_intersection_check(ctx)
            results[key] = {
                "borchers": bor,
                "inclusion_pos": inc,
                "mi_limit": mi["limit_residual"],
                "mi2": mi["mi2_residual"],
            }
            for name, value in results[key].items():
                assert value <= af.CALIBRATION[key][name], (key, name, value)
        for name in ("borchers", "inclusion_pos", "mi_limit", "mi2"):
            coarse_v = results[(256, 4.0)][name]
            fine_v = results[(1024, 8.0)][name]
            assert fine_v <= coarse_v / 10.0, (name, coarse_v, fine_v)

    def test_two_ray_j_relation(self):
        values = {}
        for key in ((256, 4.0), (1024, 8.0)):
            ctx = af.TwoRayContext(af.build_rep(*key_int(key)),
                                   af.build_rep(*key_int(key)))
            out = af.two_ray_poincare(ctx)
            values[key] = out["j_relation_vs_translation"]
            assert values[key] <= af.CALIBRATION[key]["j_rel"]
            assert out["inclusion_defect_forward"] <= \
                af.CALIBRATION[key]["two_ray_forward"]
        assert values[(1024, 8.0)] <= values[(256, 4.0)] / 10.0


def key_int(key):
    return int(key[0]), key[1]


def test_inner_function_user_boundary_data(coarse):
    # a genuine inner multiplier given only through its boundary values
    values = np.exp(1j * 1.0 * coarse.momentum)
    out = af.inner_function_check(coarse, boundary_values=values)
    assert out["passed"]
    assert out["unit_modulus_defect"] < 1e-12
    assert out["endomorphism_defect"] < af.CALIBRATION[(256, 4.0)]["inclusion_pos"]
    bad = af.inner_function_check(coarse, boundary_values=1.5 * values)
    assert not bad["passed"]
