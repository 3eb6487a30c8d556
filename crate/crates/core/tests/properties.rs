use otoc_core::circuit::{
    outcome_distribution, sample, sample_distribution, simulate_density, simulate_pure, Circuit, Gate,
};
use otoc_core::dynamics::{
    build_xxz, exact_propagator, heisenberg_op, trotter_circuit_steps, TrotterOrder, XxzParams,
};
use otoc_core::oracle::{evaluate, size_identity_check, LocalOperator, OtocSpec};
use otoc_core::protocols::{
    ism_estimate, ism_sweep_exact, rtm_estimate, rtm_exact, wmm_build, wmm_estimate,
    wmm_exact, EvolutionMode, IsmConfig, RtmConfig, RunSettings, WmmConfig,
};
use otoc_core::qcore::{
    commutator, embed_local, herm_fn, max_abs, max_abs_diff, partial_trace, pauli_decompose, purified_distance, resum,
    uhlmann_fidelity, DensityMatrix, Pauli, PureState, QuantumState,
};
use otoc_core::stats::{fit_power_exponent, rng};
use otoc_core::thermal::{
    exact_gibbs, free_energy, register_a_populations, register_s_state, GibbsSpec, TfdAnsatz,
};
use otoc_core::{ComplexMatrix, ComplexVector, C64};
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn complex_matrix(dim: usize, vals: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |r, c| {
        let k = 2 * (r * dim + c);
        C64::new(vals[k], vals[k + 1])
    })
}

fn density(dim: usize, vals: &[f64]) -> DensityMatrix {
    let g = complex_matrix(dim, vals);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    DensityMatrix::new(m.scale(1.0 / t)).unwrap()
}

fn hermitian(dim: usize, vals: &[f64]) -> ComplexMatrix {
    let g = complex_matrix(dim, vals);
    (&g + g.adjoint()).scale(0.5)
}

fn entries(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2 * dim * dim)
}

fn pauli_of(k: usize) -> Pauli {
    [Pauli::X, Pauli::Y, Pauli::Z][k % 3]
}

/// Hermitian unitary `cos a · X + sin a · Z` on one site.
fn dichotomic(angle: f64, site: usize) -> LocalOperator {
    let m = Pauli::X.matrix().scale(angle.cos()) + Pauli::Z.matrix().scale(angle.sin());
    LocalOperator::new(m, vec![site]).unwrap()
}

fn random_spec() -> impl Strategy<Value = OtocSpec> {
    (
        2usize..=3,
        0.0..1.5f64,
        -0.5..0.5f64,
        prop::sample::select(vec![0.0, 1.0, 3.0]),
        0.0..2.5f64,
        (0.0..6.3f64, 0usize..3),
        (0usize..3, 0usize..3),
    )
        .prop_map(|(n, d, h, beta, tau, (wa, ws), (vk, vs))| {
            let ham = build_xxz(XxzParams::new(n, d, h).unwrap()).unwrap();
            OtocSpec::new(ham, beta, dichotomic(wa, ws % n), LocalOperator::pauli(pauli_of(vk), vs % n), tau).unwrap()
        })
}

fn exact_run() -> RunSettings {
    RunSettings {
        evolution: EvolutionMode::ExactGate,
        ..RunSettings::default()
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn pauli_round_trip(n in 1usize..=4, seed in any::<u64>()) {
        let dim = 1 << n;
        let mut r = rng(seed);
        let vals: Vec<f64> = (0..2 * dim * dim).map(|_| otoc_core::stats::uniform01(&mut r) - 0.5).collect();
        let op = complex_matrix(dim, &vals);
        let back = resum(&pauli_decompose(&op, n).unwrap(), n).unwrap();
        prop_assert!(max_abs_diff(&op, &back) < 1e-10);
    }

    #[test]
    fn partial_trace_composes(vals in entries(8)) {
        let rho = density(8, &vals);
        let step = partial_trace(&partial_trace(&rho, &[0, 2]).unwrap(), &[0]).unwrap();
        let direct = partial_trace(&rho, &[0]).unwrap();
        prop_assert!(max_abs_diff(step.matrix(), direct.matrix()) < 1e-12);
    }

    #[test]
    fn fidelity_is_bounded_and_detects_equality(a in entries(4), b in entries(4)) {
        let (r, s) = (density(4, &a), density(4, &b));
        let f = uhlmann_fidelity(&r, &s).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!((uhlmann_fidelity(&r, &r).unwrap() - 1.0).abs() < 1e-9);
        if max_abs_diff(r.matrix(), s.matrix()) > 1e-3 {
            prop_assert!(f < 1.0 - 1e-9);
        }
    }

    #[test]
    fn disjoint_embeddings_commute(a in entries(2), b in entries(4), n in 3usize..=4) {
        let x = embed_local(&complex_matrix(2, &a), &[0], n).unwrap();
        let y = embed_local(&complex_matrix(4, &b), &[n - 1, 1], n).unwrap();
        prop_assert!(max_abs(&commutator(&x, &y)) < 1e-12);
    }

    #[test]
    fn herm_fn_identity_is_identity(vals in entries(8)) {
        let h = hermitian(8, &vals);
        prop_assert!(max_abs_diff(&herm_fn(&h, |x| x).unwrap(), &h) < 1e-12);
    }

    #[test]
    fn xxz_conserves_magnetization(n in 2usize..=4, d in -2.0..2.0f64, h in -1.0..1.0f64) {
        let ham = build_xxz(XxzParams::new(n, d, h).unwrap()).unwrap();
        let mut mz = ComplexMatrix::zeros(1 << n, 1 << n);
        for i in 0..n {
            mz += embed_local(&Pauli::Z.matrix(), &[i], n).unwrap();
        }
        prop_assert!(max_abs(&commutator(ham.dense(), &mz)) < 1e-12);
    }

    #[test]
    fn propagator_is_on_unit_circle(n in 2usize..=4, d in 0.0..1.0f64, tau in -3.0..3.0f64) {
        let ham = build_xxz(XxzParams::with_linked_field(n, d).unwrap()).unwrap();
        let u = exact_propagator(&ham, tau).unwrap();
        let dim = 1 << n;
        let ev = ComplexMatrix::identity(dim, dim);
        prop_assert!(max_abs_diff(&(u.adjoint() * &u), &ev) < 1e-10);
        let tr = u.trace().norm();
        prop_assert!(tr <= dim as f64 + 1e-10);
    }

    #[test]
    fn heisenberg_preserves_normalized_trace(vals in entries(8), tau in 0.0..3.0f64) {
        let ham = build_xxz(XxzParams::new(3, 0.7, 0.2).unwrap()).unwrap();
        let w = complex_matrix(8, &vals);
        let wt = heisenberg_op(&w, &ham, tau).unwrap();
        prop_assert!((wt.trace() - w.trace()).norm() / 8.0 < 1e-12);
    }

    #[test]
    fn backend_agreement(vals in prop::collection::vec(-1.0..1.0f64, 48), weights in prop::collection::vec(0.01..1.0f64, 3), angle in 0.0..6.3f64) {
        let mut c = Circuit::new(3);
        c.push(Gate::hadamard(0)).unwrap();
        c.push(Gate::cnot(0, 2)).unwrap();
        c.push(Gate::ry(angle, 1)).unwrap();
        c.push(Gate::rz(0.5 * angle, 2)).unwrap();
        c.push(Gate::cnot(2, 1)).unwrap();
        let total: f64 = weights.iter().sum();
        let mut mixed = ComplexMatrix::zeros(8, 8);
        let mut evolved = ComplexMatrix::zeros(8, 8);
        for k in 0..3 {
            let amps = ComplexVector::from_fn(8, |i, _| C64::new(vals[16 * k + 2 * i], vals[16 * k + 2 * i + 1]));
            let psi = PureState::normalized(amps).unwrap();
            let p = weights[k] / total;
            mixed += psi.to_density().matrix().scale(p);
            evolved += simulate_pure(&c, &psi).unwrap().to_density().matrix().scale(p);
        }
        let out = simulate_density(&c, &DensityMatrix::new(mixed).unwrap()).unwrap();
        prop_assert!(max_abs_diff(out.matrix(), &evolved) < 1e-9);
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), angle in 0.0..3.1f64) {
        let mut c = Circuit::new(2);
        c.push(Gate::ry(angle, 0)).unwrap();
        c.push(Gate::cnot(0, 1)).unwrap();
        c.measure(0, otoc_core::circuit::Basis::Z).unwrap();
        c.measure(1, otoc_core::circuit::Basis::X).unwrap();
        let input = QuantumState::Pure(PureState::zero(2));
        let a = sample(&c, &input, 500, seed).unwrap();
        let b = sample(&c, &input, 500, seed).unwrap();
        prop_assert_eq!(a, b);
        let probs = outcome_distribution(&c, &input).unwrap();
        prop_assert_eq!(
            sample_distribution(&probs, 500, &mut rng(seed)),
            sample_distribution(&probs, 500, &mut rng(seed))
        );
    }

    #[test]
    fn coupling_gate_matrix(angle in 0.0..6.3f64, phi in 0.01..1.58f64) {
        let a = dichotomic(angle, 0);
        let g = Gate::coupling(a.matrix().clone(), Pauli::Y, phi / 2.0, 0, vec![1], "S").unwrap();
        let (s, c) = (phi / 2.0).sin_cos();
        let want = ComplexMatrix::identity(4, 4).scale(c)
            - otoc_core::qcore::kron(&Pauli::Y.matrix(), a.matrix()) * C64::new(0.0, s);
        prop_assert!(max_abs_diff(&g.unitary(), &want) < 1e-12);
    }
}

proptest! {
    #![proptest_config(cfg(50))]

    #[test]
    fn oracle_identity_chain(spec in random_spec()) {
        let v = evaluate(&spec).unwrap();
        prop_assert!((v.c - 2.0 * (1.0 - v.f.re)).abs() < 1e-10);
        prop_assert!((v.c - v.frobenius).abs() < 1e-10);
        prop_assert!(v.c >= -1e-12);
    }

    #[test]
    fn commuting_start_gives_zero(spec in random_spec()) {
        let same = OtocSpec::new(spec.h.clone(), spec.beta, spec.w.clone(), spec.w.clone(), 0.0).unwrap();
        prop_assert!(evaluate(&same).unwrap().c.abs() < 1e-12);
    }

    #[test]
    fn beta_continuity(spec in random_spec()) {
        let c0 = evaluate(&spec).unwrap().c;
        let nudged = OtocSpec { beta: spec.beta + 1e-7, ..spec.clone() };
        prop_assert!((evaluate(&nudged).unwrap().c - c0).abs() < 1e-5);
    }

    #[test]
    fn infinite_temperature_f_is_real(spec in random_spec()) {
        let hot = OtocSpec { beta: 0.0, ..spec };
        prop_assert!(evaluate(&hot).unwrap().f.im.abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(cfg(16))]

    #[test]
    fn size_identity_holds(n in 2usize..=3, d in 0.0..1.0f64, tau in 0.0..2.5f64, r in 0usize..3, k in 0usize..3) {
        let ham = build_xxz(XxzParams::with_linked_field(n, d).unwrap()).unwrap();
        let w = embed_local(&pauli_of(k).matrix(), &[0], n).unwrap();
        let (lhs, rhs) = size_identity_check(&w, &ham, tau, r % n).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn gibbs_commutes_with_hamiltonian(d in 0.0..1.5f64, h in -0.5..0.5f64, beta in 0.0..5.0f64) {
        let ham = build_xxz(XxzParams::new(3, d, h).unwrap()).unwrap();
        let rho = exact_gibbs(&GibbsSpec::new(ham.clone(), beta).unwrap());
        prop_assert!(max_abs(&commutator(rho.matrix(), ham.dense())) < 1e-10);
    }

    #[test]
    fn entropy_shortcut_identity(theta in prop::collection::vec(-3.2..3.2f64, 4), phi in prop::collection::vec(-3.2..3.2f64, 8)) {
        let a = TfdAnsatz::new(2, 2, 2, theta, phi).unwrap();
        let p = register_a_populations(&a).unwrap();
        let s_a = otoc_core::qcore::shannon_entropy(&p);
        let s_s = otoc_core::qcore::von_neumann_entropy(&register_s_state(&a).unwrap());
        prop_assert!((s_a - s_s).abs() < 1e-9);
    }

    #[test]
    fn wmm_strength_invariance(spec in random_spec(), phis in prop::array::uniform4(0.05..1.5707f64)) {
        let w = OtocSpec::new(spec.h.clone(), spec.beta, spec.w.clone(), dichotomic(0.3, 0), spec.tau).unwrap();
        let oracle = evaluate(&w).unwrap().c;
        let mut c = WmmConfig::new(w, exact_run()).unwrap();
        let projective = wmm_exact(&c).unwrap();
        c.phis = phis;
        prop_assert!((wmm_exact(&c).unwrap() - projective).abs() < 1e-9);
        prop_assert!((projective - oracle).abs() < 1e-8);
    }
}

#[test]
fn gibbs_variational_principle() {
    let mut r = rng(17);
    for (n, d, h, beta) in [(2, 0.5, 0.25, 1.0), (3, 0.1, 0.45, 0.5), (2, 1.0, 0.0, 3.0)] {
        let ham = build_xxz(XxzParams::new(n, d, h).unwrap()).unwrap();
        let spec = GibbsSpec::new(ham.clone(), beta).unwrap();
        let f_min = free_energy(&exact_gibbs(&spec), &ham, beta).unwrap();
        let dim = 1 << n;
        for _ in 0..100 {
            let vals: Vec<f64> = (0..2 * dim * dim).map(|_| 2.0 * otoc_core::stats::uniform01(&mut r) - 1.0).collect();
            let rho = density(dim, &vals);
            assert!(free_energy(&rho, &ham, beta).unwrap() - f_min >= -1e-9);
        }
    }
}

#[test]
fn protocols_agree_with_oracle_in_exact_mode() {
    for n in [2, 3] {
        let ham = build_xxz(XxzParams::new(n, 0.5, 0.25).unwrap()).unwrap();
        for tau in [0.3, 0.7, 1.4] {
            let spec = OtocSpec::sigma_x_pair(ham.clone(), 1.0, tau).unwrap();
            let oracle = evaluate(&spec).unwrap();
            let rtm = rtm_exact(&RtmConfig::new(spec.clone(), exact_run()).unwrap()).unwrap();
            assert!((2.0 * (1.0 - rtm.re) - oracle.c).abs() < 1e-8);
            let wmm = wmm_exact(&WmmConfig::new(spec.clone(), exact_run()).unwrap()).unwrap();
            assert!((wmm - oracle.c).abs() < 1e-8);
            let ism = IsmConfig::new(spec.clone(), exact_run()).unwrap();
            let (_, extrapolated) = ism_sweep_exact(&ism, &[0.2, 0.1, 0.05]).unwrap();
            assert!((extrapolated - oracle.c).abs() < 1e-6, "{extrapolated} vs {}", oracle.c);
            let finite = ism.estimator.apply(otoc_core::protocols::ism_exact_x(&ism, 0.4).unwrap(), 0.4);
            assert!((finite - oracle.c).abs() < 1e-8);
        }
    }
}

#[test]
fn ism_bias_is_quadratic() {
    let ham = build_xxz(XxzParams::new(2, 0.5, 0.25).unwrap()).unwrap();
    let spec = OtocSpec::sigma_x_pair(ham, 1.0, 0.7).unwrap();
    let oracle = evaluate(&spec).unwrap().c;
    let ism = IsmConfig::new(spec, exact_run()).unwrap();
    let thetas = [0.2, 0.1, 0.05];
    let (raw, _) = ism_sweep_exact(&ism, &thetas).unwrap();
    let bias: Vec<f64> = raw.iter().map(|r| (r - oracle).abs()).collect();
    let p = fit_power_exponent(&thetas, &bias);
    assert!((p - 2.0).abs() <= 0.3, "exponent {p}");
    for w in bias.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn trotter_error_slopes() {
    let ham = build_xxz(XxzParams::new(4, 0.5, 0.25).unwrap()).unwrap();
    let tau = 2.1;
    let exact = exact_propagator(&ham, tau).unwrap();
    for (order, want, tol) in [(TrotterOrder::First, 1.0, 0.2), (TrotterOrder::Second, 2.0, 0.3)] {
        let steps = [6usize, 12, 24, 60];
        let dts: Vec<f64> = steps.iter().map(|&s| tau / s as f64).collect();
        let errs: Vec<f64> = steps
            .iter()
            .map(|&s| max_abs_diff(&trotter_circuit_steps(&ham, tau, order, s).unwrap().unitary(), &exact))
            .collect();
        let p = fit_power_exponent(&dts, &errs);
        assert!((p - want).abs() <= tol, "order {:?}: slope {p}", order);
    }
}

#[test]
fn deferred_measurement_equivalence() {
    let ham = build_xxz(XxzParams::new(2, 0.5, 0.25).unwrap()).unwrap();
    let spec = OtocSpec::sigma_x_pair(ham, 1.0, 0.7).unwrap();
    let mut cfg = WmmConfig::new(spec, exact_run()).unwrap();
    cfg.phis = [0.4, 1.1, 0.9, 1.5];
    let circuit = wmm_build(&cfg).unwrap();
    let input = cfg.input.with_ancillas(4);
    let deferred = outcome_distribution(&circuit, &input).unwrap();

    // Sequential: dephase each probe in Z right after its coupling gate.
    let mut rho = input.to_density();
    let mut seg = Circuit::new(circuit.n_qubits());
    let mut probe = 0;
    for g in circuit.gates() {
        seg.push(g.clone()).unwrap();
        if g.label.starts_with("S_") {
            rho = simulate_density(&seg, &rho).unwrap();
            seg = Circuit::new(circuit.n_qubits());
            let z = embed_local(&Pauli::Z.matrix(), &[probe], circuit.n_qubits()).unwrap();
            let m = rho.matrix();
            rho = DensityMatrix::new((m + &z * m * &z).scale(0.5)).unwrap();
            probe += 1;
        }
    }
    assert_eq!(probe, 4);
    let probes = partial_trace(&rho, &[0, 1, 2, 3]).unwrap();
    for (k, p) in deferred.iter().enumerate() {
        assert!((probes.matrix()[(k, k)].re - p).abs() < 1e-10);
    }
}

#[test]
fn povm_identities_on_random_inputs() {
    use otoc_core::protocols::{completeness, weighted_decomposition, weighted_heisenberg_update, weighted_state_update, AlphaNormalization};
    use std::f64::consts::PI;
    let mut r = rng(5);
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        let a = p.matrix();
        for phi in [PI / 8.0, PI / 4.0, PI / 2.0] {
            assert!(max_abs_diff(&completeness(phi, &a), &ComplexMatrix::identity(2, 2)) < 1e-12);
            assert!(max_abs_diff(&weighted_decomposition(phi, &a, AlphaNormalization::SinPhi), &a) < 1e-12);
            for _ in 0..20 {
                let vals: Vec<f64> = (0..8).map(|_| 2.0 * otoc_core::stats::uniform01(&mut r) - 1.0).collect();
                let rho = density(2, &vals);
                let b = hermitian(2, &vals);
                let anti_r = (&a * rho.matrix() + rho.matrix() * &a).scale(0.5);
                let anti_b = (&b * &a + &a * &b).scale(0.5);
                let su = weighted_state_update(phi, &a, rho.matrix(), AlphaNormalization::SinPhi);
                let hu = weighted_heisenberg_update(phi, &a, &b, AlphaNormalization::SinPhi);
                assert!(max_abs_diff(&su, &anti_r) < 1e-12);
                assert!(max_abs_diff(&hu, &anti_b) < 1e-12);
            }
        }
    }
}

#[test]
fn estimates_are_deterministic() {
    let ham = build_xxz(XxzParams::new(2, 0.5, 0.25).unwrap()).unwrap();
    let spec = OtocSpec::sigma_x_pair(ham, 1.0, 0.7).unwrap();
    let run = RunSettings {
        shots: 200,
        reps: 4,
        seed: 99,
        ..RunSettings::default()
    };
    let r = RtmConfig::new(spec.clone(), run).unwrap();
    assert_eq!(rtm_estimate(&r).unwrap(), rtm_estimate(&r).unwrap());
    let w = WmmConfig::new(spec.clone(), run).unwrap();
    assert_eq!(wmm_estimate(&w).unwrap(), wmm_estimate(&w).unwrap());
    let i = IsmConfig::new(spec, run).unwrap();
    assert_eq!(ism_estimate(&i).unwrap(), ism_estimate(&i).unwrap());
}

#[test]
fn binomial_sampling_of_x_on_zero() {
    let mut c = Circuit::new(1);
    c.measure(0, otoc_core::circuit::Basis::X).unwrap();
    let res = sample(&c, &QuantumState::Pure(PureState::zero(1)), 100_000, 3).unwrap();
    let p0 = res.iter().find(|(s, _)| s == "0").map(|(_, n)| n).unwrap_or(0) as f64 / 1e5;
    assert!((p0 - 0.5).abs() < 0.01);
}

#[test]
fn purified_distance_vanishes_on_equal_states() {
    let rho = density(4, &[0.3; 32]);
    assert!(purified_distance(&rho, &rho).unwrap() < 1e-7);
}
