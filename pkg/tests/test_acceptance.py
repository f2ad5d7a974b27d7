"""Acceptance criteria, one test per criterion, tolerances pinned inline.

Each test prints a single pass/fail line; run with -s to see them.  The
final test asserts the whole module stayed inside the wall-time budget and
that rerunning a seeded suite reproduces its report bit for bit.
"""

import json
import time

import numpy as np
import pytest
from scipy.linalg import expm

from modstand import affine as af
from modstand import cli
from modstand import fock as fk
from modstand import groupreps as gr
from modstand import realified as rl
from modstand import standard as st
from modstand import vonneumann as vn
from modstand import wedges as wg
from modstand.errors import NotDecaying

MODULE_START = time.perf_counter()


def _verdict(name, worst, tol):
    status = "pass" if worst <= tol else "FAIL"
    print(f"[{status}] {name}: residual {worst:.3e} <= {tol:.1e}")
    assert worst <= tol, f"{name}: {worst} > {tol}"


def test_criterion_01_bijection_200_instances():
    started = time.perf_counter()
    rng = np.random.default_rng(20260809)
    worst_fix = worst_rel = 0.0
    for k in range(200):
        d = k % 8 + 1
        v = st.random_standard_subspace(rng, d)
        triple = st.modular_objects(v)
        half = rl.operator_function(triple.delta, "power", 0.5)
        s_op = rl.RLOperator(triple.j.matrix @ half.matrix, rl.ANTILINEAR)
        worst_fix = max(worst_fix, rl.subspace_distance(
            st.fixed_subspace(s_op), v.space))
        n = 2 * d
        rel = np.linalg.norm(
            triple.j.matrix @ triple.delta.matrix @ triple.j.matrix
            @ triple.delta.matrix - np.eye(n), 2
        ) / max(1.0, triple.delta.norm())
        worst_rel = max(worst_rel, float(rel))
    elapsed = time.perf_counter() - started
    _verdict("01a standard-subspace bijection (Fix recovery)", worst_fix, 1e-9)
    _verdict("01b modular relation J Delta J Delta = 1", worst_rel, 1e-9)
    _verdict("01c bijection wall time (s)", elapsed, 10.0)


def test_criterion_02_closed_form_spectrum():
    c_small = np.array([[0.0, 0.5], [-0.5, 0.0]])
    # independent oracle: square of the skew Cayley transform
    cayley = np.linalg.solve(np.eye(2) + 1j * c_small, np.eye(2) - 1j * c_small)
    oracle = np.sort(np.abs(np.linalg.eigvals(cayley @ cayley)))
    v = st.subspace_from_skew(rl.RLOperator.conjugation(2), c_small)
    polar_path = st.modular_objects(v).spectrum()
    worst = max(
        float(np.max(np.abs(polar_path - np.array([1 / 9, 9.0])))),
        float(np.max(np.abs(oracle - np.array([1 / 9, 9.0])))),
        float(np.max(np.abs(polar_path - oracle))),
    )
    _verdict("02 closed-form spectrum {9, 1/9}, both routes", worst, 1e-10)


def test_criterion_03_duality_suite():
    rng = np.random.default_rng(20260809)
    worst = 0.0
    for k in range(200):
        d = k % 8 + 1
        v = st.random_standard_subspace(rng, d)
        triple = st.modular_objects(v)
        vp = st.symplectic_complement(v)
        tp = st.modular_objects(vp)
        worst = max(worst, float(np.linalg.norm(tp.j.matrix - triple.j.matrix, 2)))
        # Delta' Delta = 1 at the product's own scale
        prod = tp.delta.matrix @ triple.delta.matrix
        scale = max(1.0, tp.delta.norm() * triple.delta.norm())
        worst = max(worst, float(np.linalg.norm(
            prod - np.eye(2 * d), 2)) / scale)
        worst = max(worst, rl.subspace_distance(
            st.symplectic_complement(vp).space, v.space))
        # fixed part equals the joint eigenspace data
        fixed = rl.subspace_intersection(v.space, vp.space)
        if fixed.dim:
            worst = max(worst, float(np.linalg.norm(
                triple.delta.matrix @ fixed.basis - fixed.basis, 2)))
            worst = max(worst, float(np.linalg.norm(
                triple.j.matrix @ fixed.basis - fixed.basis, 2)))
    _verdict("03 duality suite (J, Delta inverse, double complement)", worst, 1e-9)


def test_criterion_04_flow_reconstruction():
    rng = np.random.default_rng(20260810)
    worst_gen = worst_flow = 0.0
    for _ in range(25):
        m = int(rng.integers(1, 9))
        raw = rng.standard_normal((m, m))
        d_gen = 0.5 * (raw - raw.T)
        iota, v = st.flow_embedding(d_gen)
        worst_gen = max(worst_gen, float(np.linalg.norm(
            st.flow_generator(iota, v) - d_gen, 2)))
        triple = st.modular_objects(v)
        for t in (-1.0, -0.3, 0.3, 1.0):
            worst_flow = max(worst_flow, float(np.linalg.norm(
                triple.flow(t).matrix @ iota - iota @ expm(t * d_gen), 2)))
    _verdict("04a flow reconstruction: generator recovery", worst_gen, 1e-9)
    _verdict("04b flow reconstruction: intertwining at sampled t", worst_flow, 1e-8)


def test_criterion_05_matrix_model_closed_forms():
    rng = np.random.default_rng(20260811)
    worst = 0.0
    for k in (2, 3, 4):
        model = vn.HilbertSchmidtModel(k)
        x = rl.complex_gaussian(rng, (k, k))
        density = x @ x.conj().T + 0.25 * np.eye(k)
        density /= np.trace(density).real
        data, report = vn.tomita_modular(model.left_algebra(),
                                         model.state_vector(density))
        ref_delta = model.expected_delta(density)
        worst = max(worst, float(np.linalg.norm(
            data.triple.delta.matrix - ref_delta.matrix, 2
        )) / max(1.0, ref_delta.norm()))
        worst = max(worst, float(np.linalg.norm(
            data.triple.j.matrix - model.expected_j().matrix, 2)))
        worst = max(worst, report["commutant_distance"])
    _verdict("05 matrix model: closed forms and commutant", worst, 1e-8)


def test_criterion_06_block_algebras():
    rng = np.random.default_rng(20260812)
    worst = 0.0
    for _ in range(50):
        count = int(rng.integers(1, 3))
        sizes = [int(rng.integers(1, 3)) for _ in range(count)]
        algebra, omega = vn.random_block_algebra(rng, sizes)
        data, report = vn.tomita_modular(algebra, omega)
        worst = max(worst, report["commutant_distance"],
                    report["flow_invariance_residual"])
        comm = vn.commutant(algebra)
        v_comm = vn.algebra_subspace(comm, omega / np.linalg.norm(omega))
        vp = st.symplectic_complement(data.subspace)
        worst = max(worst, rl.subspace_distance(vp.space, v_comm))
    _verdict("06 block algebras: flow, commutant, complement link", worst, 1e-8)


def test_criterion_07_fermionic_duality_and_quantization():
    rng = np.random.default_rng(20260813)
    worst = 0.0
    timed = None
    for d in (1, 2, 3, 4):
        ctx = fk.FermiContext(d)
        started = time.perf_counter()
        for _ in range(20):
            v = st.random_standard_subspace(rng, d)
            dual = fk.twisted_duality_check(ctx, v.space)
            worst = max(worst, dual["distance"], dual["super_bracket_residual"])
            mod = fk.fermi_modular_check(ctx, v)
            worst = max(worst, mod["delta_residual"], mod["j_residual"])
        if d == 4:
            timed = time.perf_counter() - started
    _verdict("07a twisted duality and quantized modular data", worst, 1e-8)
    _verdict("07b fermionic wall time at four modes (s)", timed, 60.0)


def test_criterion_08_car_and_weyl_scalars():
    worst_car = max(fk.FermiContext(d).car_residual() for d in (1, 2, 3, 4, 5))
    _verdict("08a anticommutation relations, all basis pairs", worst_car, 1e-12)

    rng = np.random.default_rng(20260814)
    probes = [fk.CoherentVector.exponential(rl.complex_gaussian(rng, 3))
              for _ in range(3)]
    worst_weyl = 0.0
    for _ in range(100):
        x = rl.complex_gaussian(rng, 3)
        y = rl.complex_gaussian(rng, 3)
        worst_weyl = max(worst_weyl, fk.weyl_relation_residual(x, y, probes))
    _verdict("08b multiplicative relation of translation operators",
             worst_weyl, 1e-12)

    vac = fk.CoherentVector.vacuum(3)
    worst_vac = 0.0
    for _ in range(50):
        v = rl.complex_gaussian(rng, 3)
        got = fk.coherent_inner(vac, fk.weyl_operator(v, vac))
        worst_vac = max(worst_vac, abs(got - np.exp(-np.vdot(v, v).real / 4.0)))
    _verdict("08c vacuum expectation of the displacement operators",
             worst_vac, 1e-12)


def test_criterion_09_wedge_logic():
    rng = np.random.default_rng(20260815)
    d = 4
    contradictions = 0
    for _ in range(250):
        w1 = wg.Wedge(wg.random_poincare(rng, d))
        w2 = wg.Wedge(wg.random_poincare(rng, d))
        rel = wg.wedge_relation(w1, w2)
        pts1, pts2 = w1.sample(rng, 20), w2.sample(rng, 20)
        if rel in ("equal", "first-in-second") and not np.all(w2.contains(pts1)):
            contradictions += 1
        if rel in ("equal", "second-in-first") and not np.all(w1.contains(pts2)):
            contradictions += 1
        if rel == "other":
            if (wg.wedge_witness_point(w1, w2, rng) is None
                    and wg.wedge_witness_point(w2, w1, rng) is None):
                contradictions += 1
    _verdict("09a wedge inclusion logic vs point sampling (500 elements)",
             float(contradictions), 0.0)

    top = np.zeros(d)
    top[0] = 1.5
    regions = []
    for _ in range(31):
        regions.append(wg.Region.from_wedge(wg.Wedge(wg.random_poincare(rng, d))))
    for s in (1.0, 0.5):
        regions.append(wg.Region.double_cone(top * s, -top * s))
    out = wg.order_axiom_check(regions, rng, count=100)
    pair_count = len(regions) * (len(regions) - 1)
    assert pair_count >= 1000
    _verdict("09b order axioms over sampled region pairs",
             float(len(out["violations"])), 0.0)


def test_criterion_10_grid_convergence():
    results = {}
    for key in ((256, 4.0), (1024, 8.0)):
        ctx = af.build_rep(key[0], key[1])
        assert np.all(ctx.momentum > 0.0)
        bor = af.borchers_check(ctx, 1.0, int(round(1.0 / ctx.grid.h)))
        mi = af.modular_intersection_check(ctx)
        two = af.two_ray_poincare(
            af.TwoRayContext(af.build_rep(*_as_key(key)),
                             af.build_rep(*_as_key(key)))
        )
        results[key] = {
            "borchers": bor["max_residual"],
            "inclusion_pos": af.inclusion_residual(ctx, 1.0),
            "mi2": mi["mi2_residual"],
            "mi_limit": mi["limit_residual"],
            "j_rel": two["j_relation_vs_translation"],
        }
        for name, value in results[key].items():
            ceiling = af.CALIBRATION[key][name]
            _verdict(f"10 frozen ceiling {name} at {key}", value, ceiling)
    for name in ("borchers", "inclusion_pos", "mi2", "mi_limit", "j_rel"):
        coarse, fine = results[(256, 4.0)][name], results[(1024, 8.0)][name]
        _verdict(f"10 refinement gain {name} (fine / (coarse/10))",
                 fine, coarse / 10.0)
    fine_ctx = af.build_rep(1024, 8.0)
    ratio = af.inclusion_residual(fine_ctx, -1.0) / af.inclusion_residual(fine_ctx, 1.0)
    _verdict("10 one-sidedness witness 100/ratio", 100.0 / ratio, 1.0)


def _as_key(key):
    return int(key[0]), key[1]


def test_criterion_11_inner_functions():
    ctx = af.build_rep(256, 4.0)
    worst_bound = worst_sym = 0.0
    for b in (0.5, 1.0, 2.0):
        out = af.inner_function_check(ctx, b)
        worst_bound = max(worst_bound, out["max_modulus"] - 1.0)
        worst_sym = max(worst_sym, out["boundary_symmetry_residual"])
    _verdict("11a inner multipliers bounded on the strip", worst_bound, 1e-12)
    _verdict("11b boundary symmetry of inner multipliers", worst_sym, 1e-12)
    with pytest.raises(NotDecaying):
        af.inner_function_check(ctx, -1.0)
    print("[pass] 11c growing multiplier rejected with witness")


def test_criterion_12_type_trichotomy():
    pair_r = gr.preset_pair("dihedral-3")
    kind_r, _ = gr.classify_type(pair_r, gr.cyclic_character(pair_r, 1))
    pair_c = gr.preset_pair("z3-z2")
    kind_c, _ = gr.classify_type(pair_c, gr.cyclic_character(pair_c, 1))
    pair_q = gr.preset_pair("q8-z2")
    kind_q, _ = gr.classify_type(pair_q, gr.quaternion_rep(pair_q))
    kinds_ok = (kind_r, kind_c, kind_q) == ("real", "complex", "quaternionic")
    _verdict("12a preset type trichotomy", 0.0 if kinds_ok else 1.0, 0.0)

    dims = []
    for pair, sub in ((pair_r, gr.cyclic_character(pair_r, 1)),
                      (pair_c, gr.cyclic_character(pair_c, 1)),
                      (pair_q, gr.quaternion_rep(pair_q))):
        rep = gr.extend_representation(pair, sub)
        dims.append(gr.commutant_classify(rep)["commutant_dim_real"])
    _verdict("12b commutant real dimensions {1, 2, 4}",
             0.0 if dims == [1, 2, 4] else 1.0, 0.0)

    rng = np.random.default_rng(20260816)
    rep1 = gr.extend_representation(pair_c, gr.cyclic_character(pair_c, 1))
    rep2 = gr.random_conjugated(
        gr.extend_representation(pair_c, gr.cyclic_character(pair_c, 2)), rng
    )
    same, psi = gr.are_equivalent(rep1, rep2)
    assert same
    worst = max(
        float(np.linalg.norm(psi.matrix @ rep1.operators[g].matrix
                             - rep2.operators[g].matrix @ psi.matrix, 2))
        for g in range(pair_c.order)
    )
    _verdict("12c independently built extensions are equivalent", worst, 1e-8)


def test_criterion_13_lowest_weight_model():
    worst = 0.0
    for m in (1, 2):
        report = af.sl2_lowest_weight(m, 12)["report"]
        worst = max(worst, max(report["bracket_residuals"].values()))
        worst = max(worst, max(report["conjugation_residuals"].values()))
        worst = max(worst, report["lowest_annihilated"])
    _verdict("13 truncated lowest-weight brackets and conjugation", worst, 1e-12)


def test_criterion_14_wall_time_and_reproducibility(tmp_path):
    o1, o2 = tmp_path / "r1.json", tmp_path / "r2.json"
    argv = ["all", "--dim", "4", "--trials", "8", "--seed", "3",
            "--fermi-dim", "2", "--grid-n", "256", "--grid-l", "4"]
    assert cli.run(argv + ["--out", str(o1)]) == 0
    assert cli.run(argv + ["--out", str(o2)]) == 0
    d1, d2 = json.loads(o1.read_text()), json.loads(o2.read_text())
    identical = d1["checks"] == d2["checks"]
    _verdict("14a identical seeds reproduce identical reports",
             0.0 if identical else 1.0, 0.0)
    elapsed = time.perf_counter() - MODULE_START
    _verdict("14b full acceptance wall time (s)", elapsed, 300.0)
