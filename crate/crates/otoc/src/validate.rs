//! Named acceptance checks with measured residuals.
//!
//! Each criterion runs a group of checks and records its wall time against a
//! runtime limit. `validate` runs the fast criteria; the full-scale sweep
//! criteria (6, 7, 10) are opt-in.

use std::f64::consts::PI;
use std::time::Instant;

use anyhow::Result;
use otoc_core::dynamics::{build_xxz, exact_propagator, trotter_circuit_steps, TrotterOrder, XxzParams};
use otoc_core::oracle::{evaluate, size_identity_check, LocalOperator, OtocSpec};
use otoc_core::protocols::{
    completeness, irreversibility_delta, ism_raw_exact, ism_sweep_exact, measurement_operator, plus_minus_ensemble,
    rtm_exact, weighted_decomposition, weighted_heisenberg_update, weighted_state_update, wmm_exact,
    AlphaNormalization, EvolutionMode, IsmConfig, IsmProcess, IsmRecovery, ProtocolKind, RtmConfig, RunSettings,
    WmmConfig,
};
use otoc_core::qcore::{embed_local, max_abs_diff, shannon_entropy, von_neumann_entropy, DensityMatrix, Pauli};
use otoc_core::stats::{extrapolate_to_zero, fit_power_exponent, rng, uniform01, SimRng};
use otoc_core::thermal::{
    exact_gibbs, free_energy, register_a_populations, register_s_state, GibbsSpec,
};
use otoc_core::{ComplexMatrix, C64};
use serde::Serialize;

use crate::config::{paper_default_config, ExperimentConfig};
use crate::output::csv_string;
use crate::sweep::{prepare_vqa, run_sweep, ResultTable};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    /// `"<"`, `"<="`, `">"` or `">="` against `limit`.
    pub relation: &'static str,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, measured: f64, relation: &'static str, limit: f64) -> Self {
        let passed = match relation {
            "<" => measured < limit,
            "<=" => measured <= limit,
            ">" => measured > limit,
            _ => measured >= limit,
        };
        Self {
            name: name.into(),
            measured,
            relation,
            limit,
            passed,
        }
    }

    fn below(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self::new(name, measured, "<", limit)
    }

    fn within(name: impl Into<String>, measured: f64, target: f64, tol: f64) -> Self {
        Self::new(format!("|{} - {target}|", name.into()), (measured - target).abs(), "<=", tol)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub title: String,
    pub checks: Vec<Check>,
    pub elapsed_s: f64,
    pub runtime_limit_s: Option<f64>,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.runtime_limit_s.is_none_or(|l| self.elapsed_s < l)
    }

    /// One-line summary naming the first failing check, if any.
    pub fn summary(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let detail = match self.checks.iter().find(|c| !c.passed) {
            Some(c) => format!("{}: {:.3e} not {} {:.3e}", c.name, c.measured, c.relation, c.limit),
            None => format!("{} checks", self.checks.len()),
        };
        let limit = self.runtime_limit_s.map_or(String::new(), |l| format!(" / limit {l:.0} s"));
        format!(
            "criterion {:>2} {status}  {}  ({detail}; {:.2} s{limit})",
            self.id, self.title, self.elapsed_s
        )
    }
}

fn timed(id: u8, title: &str, limit: Option<f64>, f: impl FnOnce() -> Result<Vec<Check>>) -> Criterion {
    let start = Instant::now();
    let checks = f().unwrap_or_else(|e| vec![Check::new(format!("error: {e}"), f64::NAN, "<", 0.0)]);
    Criterion {
        id,
        title: title.into(),
        checks,
        elapsed_s: start.elapsed().as_secs_f64(),
        runtime_limit_s: limit,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub criteria: Vec<Criterion>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(Criterion::passed)
    }
}

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    /// Normalization used by the POVM checks; a wrong one is the negative
    /// control.
    pub alpha: AlphaNormalization,
    /// Also run the full-scale sweep criteria.
    pub full: bool,
    pub sweep_config: ExperimentConfig,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            alpha: AlphaNormalization::SinPhi,
            full: false,
            sweep_config: paper_default_config(),
        }
    }
}

pub fn validate(opts: &ValidateOptions) -> Report {
    let mut criteria = vec![
        identity_suite(),
        povm_algebra(opts.alpha),
        protocol_agreement(),
        irreversibility_route(),
        size_identity(),
        gibbs_vqa(),
        trotter_order(),
    ];
    if opts.full {
        let sweeps = full_sweeps(&opts.sweep_config);
        criteria.push(shot_noise(&sweeps));
        criteria.push(ism_variance(&sweeps));
        criteria.push(determinism(&opts.sweep_config, &sweeps));
    }
    criteria.sort_by_key(|c| c.id);
    Report { criteria }
}

fn exact_run() -> RunSettings {
    RunSettings {
        evolution: EvolutionMode::ExactGate,
        ..RunSettings::default()
    }
}

fn u(r: &mut SimRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform01(r)
}

/// Hermitian unitary `cos a · X + sin a · Z` on one site.
fn dichotomic(angle: f64, site: usize) -> Result<LocalOperator> {
    let m = Pauli::X.matrix().scale(angle.cos()) + Pauli::Z.matrix().scale(angle.sin());
    Ok(LocalOperator::new(m, vec![site])?)
}

fn random_complex(r: &mut SimRng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| C64::new(u(r, -1.0, 1.0), u(r, -1.0, 1.0)))
}

fn random_density(r: &mut SimRng, dim: usize) -> Result<DensityMatrix> {
    let g = random_complex(r, dim);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    Ok(DensityMatrix::new(m.scale(1.0 / t))?)
}

/// Criterion 1: `C = 2(1 - Re F) = Frobenius form` on 50 random specs.
pub fn identity_suite() -> Criterion {
    timed(1, "OTOC identity chain on 50 random specs", Some(30.0), || {
        let mut r = rng(1);
        let (mut worst_f, mut worst_frob, mut min_c) = (0.0f64, 0.0f64, f64::INFINITY);
        for k in 0..50 {
            let n = 2 + k % 2;
            let beta = [0.0, 1.0, 3.0][k % 3];
            let h = build_xxz(XxzParams::new(n, u(&mut r, 0.0, 1.5), u(&mut r, -0.5, 0.5))?)?;
            let w = dichotomic(u(&mut r, 0.0, 2.0 * PI), (uniform01(&mut r) * n as f64) as usize)?;
            let p = [Pauli::X, Pauli::Y, Pauli::Z][(uniform01(&mut r) * 3.0) as usize];
            let v = LocalOperator::pauli(p, (uniform01(&mut r) * n as f64) as usize);
            let spec = OtocSpec::new(h, beta, w, v, u(&mut r, 0.0, 2.5))?;
            let o = evaluate(&spec)?;
            worst_f = worst_f.max((o.c - 2.0 * (1.0 - o.f.re)).abs());
            worst_frob = worst_frob.max((o.c - o.frobenius).abs());
            min_c = min_c.min(o.c);
        }
        Ok(vec![
            Check::below("max |C - 2(1 - Re F)|", worst_f, 1e-10),
            Check::below("max |C - Frobenius form|", worst_frob, 1e-10),
            Check::new("min C", min_c, ">=", -1e-12),
        ])
    })
}

/// Criterion 2: POVM completeness, weighted decomposition, anticommutator
/// identities, and the projective limit.
pub fn povm_algebra(alpha: AlphaNormalization) -> Criterion {
    timed(2, "weak-measurement POVM algebra", Some(5.0), || {
        let mut r = rng(2);
        let id = ComplexMatrix::identity(2, 2);
        let (mut comp, mut decomp, mut state, mut heis) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        let (mut proj, mut alpha_dev) = (0.0f64, 0.0f64);
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let a = p.matrix();
            for phi in [PI / 8.0, PI / 4.0, PI / 2.0] {
                comp = comp.max(max_abs_diff(&completeness(phi, &a), &id));
                decomp = decomp.max(max_abs_diff(&weighted_decomposition(phi, &a, alpha), &a));
                for _ in 0..20 {
                    let rho = random_density(&mut r, 2)?;
                    let g = random_complex(&mut r, 2);
                    let b = (&g + g.adjoint()).scale(0.5);
                    let anti_r = (&a * rho.matrix() + rho.matrix() * &a).scale(0.5);
                    let anti_b = (&b * &a + &a * &b).scale(0.5);
                    state = state.max(max_abs_diff(&weighted_state_update(phi, &a, rho.matrix(), alpha), &anti_r));
                    heis = heis.max(max_abs_diff(&weighted_heisenberg_update(phi, &a, &b, alpha), &anti_b));
                }
            }
            for (k, sign) in [(0u8, 1.0), (1u8, -1.0)] {
                let projector = (&id + a.scale(sign)).scale(0.5);
                proj = proj.max(max_abs_diff(&measurement_operator(k, PI / 2.0, &a), &projector));
                alpha_dev = alpha_dev.max((alpha.alpha(k, PI / 2.0) - sign).abs());
            }
        }
        Ok(vec![
            Check::below("completeness residual", comp, 1e-12),
            Check::below("weighted decomposition residual", decomp, 1e-12),
            Check::below("state anticommutator residual", state, 1e-12),
            Check::below("Heisenberg anticommutator residual", heis, 1e-12),
            Check::below("phi = pi/2 projector residual", proj, 1e-12),
            Check::below("phi = pi/2 |alpha - (+/-1)|", alpha_dev, 1e-12),
        ])
    })
}

/// Criterion 3: exact-expectation agreement of the three protocols with
/// the oracle on `n ∈ {2, 3}`.
pub fn protocol_agreement() -> Criterion {
    timed(3, "protocol-oracle agreement (exact mode)", Some(120.0), || {
        let thetas = [0.2, 0.1, 0.05];
        let (mut rtm, mut wmm, mut wmm_phi, mut ism) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        let mut exponents = Vec::new();
        for n in [2, 3] {
            let h = build_xxz(XxzParams::with_linked_field(n, 0.5)?)?;
            for tau in [0.3, 0.7, 1.4] {
                let spec = OtocSpec::sigma_x_pair(h.clone(), 1.0, tau)?;
                let c = evaluate(&spec)?.c;
                let f = rtm_exact(&RtmConfig::new(spec.clone(), exact_run())?)?;
                rtm = rtm.max((2.0 * (1.0 - f.re) - c).abs());
                let base = WmmConfig::new(spec.clone(), exact_run())?;
                let per_phi: Vec<f64> = [PI / 8.0, PI / 4.0, PI / 2.0]
                    .iter()
                    .map(|&phi| wmm_exact(&WmmConfig { phis: [phi; 4], ..base.clone() }))
                    .collect::<std::result::Result<_, _>>()?;
                for x in &per_phi {
                    wmm = wmm.max((x - c).abs());
                    wmm_phi = wmm_phi.max((x - per_phi[2]).abs());
                }
                let cfg = IsmConfig::new(spec, exact_run())?;
                let (raw, extrapolated) = ism_sweep_exact(&cfg, &thetas)?;
                ism = ism.max((extrapolated - c).abs());
                let bias: Vec<f64> = raw.iter().map(|x| (x - c).abs()).collect();
                exponents.push(fit_power_exponent(&thetas, &bias));
            }
        }
        let worst_exp = exponents.iter().map(|p| (p - 2.0).abs()).fold(0.0, f64::max);
        Ok(vec![
            Check::below("RTM |C - oracle|", rtm, 1e-8),
            Check::below("WMM |C - oracle|", wmm, 1e-8),
            Check::below("WMM phi spread", wmm_phi, 1e-9),
            Check::below("ISM extrapolated |C - oracle|", ism, 1e-6),
            Check::new("ISM bias exponent |p - 2|", worst_exp, "<=", 0.3),
        ])
    })
}

/// Criterion 4: `δ²/θ²` from the channel pair against the ancilla shortcut
/// and the oracle.
pub fn irreversibility_route() -> Criterion {
    timed(4, "irreversibility route to the OTOC", None, || {
        let h = build_xxz(XxzParams::with_linked_field(2, 0.5)?)?;
        let spec = OtocSpec::sigma_x_pair(h, 1.0, 0.7)?;
        let c = evaluate(&spec)?.c;
        let cfg = IsmConfig::new(spec.clone(), exact_run())?;
        let thetas = [0.2, 0.1, 0.05];
        let mut ratios = Vec::new();
        let mut shortcut = 0.0f64;
        for &t in &thetas {
            let d = irreversibility_delta(&IsmProcess::new(&spec, t)?, &IsmRecovery::new(&spec, t)?, &plus_minus_ensemble())?;
            let ratio = d * d / (t * t);
            shortcut = shortcut.max((ratio - ism_raw_exact(&cfg, t)?).abs());
            ratios.push(ratio);
        }
        let bias: Vec<f64> = ratios.iter().map(|x| (x - c).abs()).collect();
        let us: Vec<f64> = thetas.iter().map(|t| t * t).collect();
        Ok(vec![
            Check::below("max |delta^2/theta^2 - shortcut|", shortcut, 1e-9),
            Check::within("bias exponent", fit_power_exponent(&thetas, &bias), 2.0, 0.3),
            Check::below("extrapolated |delta^2/theta^2 - oracle|", (extrapolate_to_zero(&us, &ratios) - c).abs(), 1e-6),
        ])
    })
}

/// Criterion 5: operator-size identity on three sites.
pub fn size_identity() -> Criterion {
    timed(5, "operator-size identity", None, || {
        let h = build_xxz(XxzParams::with_linked_field(3, 0.5)?)?;
        let mut worst = 0.0f64;
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let w = embed_local(&p.matrix(), &[0], 3)?;
            for tau in [0.0, 0.5, 1.0] {
                for site in 0..3 {
                    let (lhs, rhs) = size_identity_check(&w, &h, tau, site)?;
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
        Ok(vec![Check::below("max |lhs - rhs|", worst, 1e-10)])
    })
}

/// Criterion 8: variational Gibbs preparation, the entropy shortcut, and
/// the Gibbs variational principle.
pub fn gibbs_vqa() -> Criterion {
    timed(8, "variational Gibbs preparation", Some(300.0), || {
        let cfg = ExperimentConfig {
            n: 2,
            deltas: vec![0.5],
            beta: 1.0,
            ..paper_default_config()
        };
        let (ansatz, result) = prepare_vqa(&cfg, 0.5, 0x5eed)?;
        let s_a = shannon_entropy(&register_a_populations(&ansatz)?);
        let s_s = von_neumann_entropy(&register_s_state(&ansatz)?);
        let monotone = result.cost_history.windows(2).all(|w| w[1] <= w[0]);

        let mut r = rng(8);
        let mut worst_gap = f64::INFINITY;
        for (n, delta, beta) in [(2, 0.5, 1.0), (2, 0.1, 3.0), (3, 0.9, 0.5)] {
            let h = build_xxz(XxzParams::with_linked_field(n, delta)?)?;
            let spec = GibbsSpec::new(h.clone(), beta)?;
            let f_min = free_energy(&exact_gibbs(&spec), &h, beta)?;
            for _ in 0..100 {
                let rho = random_density(&mut r, 1 << n)?;
                worst_gap = worst_gap.min(free_energy(&rho, &h, beta)? - f_min);
            }
        }
        Ok(vec![
            Check::new("fidelity to exact Gibbs", result.fidelity_to_exact, ">=", 0.99),
            Check::below("|S(rho_S) - S(rho_A)|", (s_a - s_s).abs(), 1e-9),
            Check::new("cost history monotone", f64::from(u8::from(monotone)), ">=", 1.0),
            Check::new("min F(rho) - F(gibbs)", worst_gap, ">=", -1e-9),
        ])
    })
}

/// Criterion 9: product-formula error slopes at `n = 4`, `Δ = 0.5`,
/// `τ = 2.1`.
pub fn trotter_order() -> Criterion {
    timed(9, "Trotter error order", None, || {
        let h = build_xxz(XxzParams::with_linked_field(4, 0.5)?)?;
        let tau = 2.1;
        let exact = exact_propagator(&h, tau)?;
        let steps = [6usize, 12, 24, 60];
        let dts: Vec<f64> = steps.iter().map(|&s| tau / s as f64).collect();
        let slope = |order| -> Result<f64> {
            let errs: Vec<f64> = steps
                .iter()
                .map(|&s| Ok(max_abs_diff(&trotter_circuit_steps(&h, tau, order, s)?.unitary(), &exact)))
                .collect::<Result<_>>()?;
            Ok(fit_power_exponent(&dts, &errs))
        };
        Ok(vec![
            Check::within("order-2 slope", slope(TrotterOrder::Second)?, 2.0, 0.3),
            Check::within("order-1 slope", slope(TrotterOrder::First)?, 1.0, 0.2),
        ])
    })
}

/// One full-scale sweep per protocol, with its wall time.
pub struct FullSweeps {
    pub tables: Vec<(ProtocolKind, Result<ResultTable, String>, f64)>,
}

pub fn full_sweeps(cfg: &ExperimentConfig) -> FullSweeps {
    let tables = ProtocolKind::ALL
        .iter()
        .map(|&p| {
            let one = ExperimentConfig {
                protocols: vec![p],
                ..cfg.clone()
            };
            let start = Instant::now();
            let t = run_sweep(&one).map_err(|e| e.to_string());
            (p, t, start.elapsed().as_secs_f64())
        })
        .collect();
    FullSweeps { tables }
}

fn table<'a>(s: &'a FullSweeps, p: ProtocolKind) -> Result<&'a ResultTable> {
    s.tables
        .iter()
        .find(|(q, _, _)| *q == p)
        .ok_or_else(|| anyhow::anyhow!("no sweep for {p}"))?
        .1
        .as_ref()
        .map_err(|e| anyhow::anyhow!("{p} sweep failed: {e}"))
}

/// Absolute slack added to the 3 SE window. At `τ = 0` every shot agrees,
/// the standard error is exactly zero and the oracle carries roundoff.
const ROUNDOFF_FLOOR: f64 = 1e-12;

/// Criterion 6: per-cell agreement within three standard errors for at
/// least 90% of cells, each protocol's sweep under ten minutes.
pub fn shot_noise(s: &FullSweeps) -> Criterion {
    let mut c = timed(6, "shot-noise agreement at full scale", None, || {
        let mut checks = Vec::new();
        for (p, _, secs) in &s.tables {
            let t = table(s, *p)?;
            let ok = t
                .rows
                .iter()
                .filter(|r| !r.is_error() && (r.mean_c - r.oracle_c).abs() <= 3.0 * r.standard_error() + ROUNDOFF_FLOOR)
                .count();
            checks.push(Check::new(format!("{p} cells within 3 SE"), ok as f64 / t.rows.len() as f64, ">=", 0.9));
            checks.push(Check::below(format!("{p} sweep seconds"), *secs, 600.0));
        }
        Ok(checks)
    });
    c.elapsed_s = s.tables.iter().map(|t| t.2).sum();
    c
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 0 {
        0.5 * (xs[m - 1] + xs[m])
    } else {
        xs[m]
    }
}

/// Criterion 7: ISM spread exceeds RTM spread on matched cells.
pub fn ism_variance(s: &FullSweeps) -> Criterion {
    timed(7, "ISM standard deviation exceeds RTM", None, || {
        let (ism, rtm) = (table(s, ProtocolKind::Ism)?, table(s, ProtocolKind::Rtm)?);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (x, y) in ism.rows.iter().zip(&rtm.rows) {
            if !x.is_error() && !y.is_error() && x.delta == y.delta && x.tau == y.tau {
                a.push(x.std_c);
                b.push(y.std_c);
            }
        }
        let (mi, mr) = (median(a), median(b));
        Ok(vec![Check::new("median std ISM - median std RTM", mi - mr, ">", 0.0)])
    })
}

/// Criterion 10: a repeated sweep reproduces the CSV byte for byte.
pub fn determinism(cfg: &ExperimentConfig, s: &FullSweeps) -> Criterion {
    timed(10, "byte-identical repeated sweep", None, || {
        let mut checks = Vec::new();
        for &p in &ProtocolKind::ALL {
            let first = csv_string(&table(s, p)?.rows)?;
            let again = run_sweep(&ExperimentConfig {
                protocols: vec![p],
                ..cfg.clone()
            })?;
            let same = first.as_bytes() == csv_string(&again.rows)?.as_bytes();
            checks.push(Check::new(format!("{p} CSV identical"), f64::from(u8::from(same)), ">=", 1.0));
        }
        Ok(checks)
    })
}
