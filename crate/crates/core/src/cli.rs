//! Commands behind the `e91-eve` binary: the guess/error tradeoff curve,
//! Monte Carlo reports, optimizer queries and the invariant checker.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::attack_model::{
    self, analyze, grid_search_max, marginal_guess_prob, marginal_guess_prob_zero_im,
    max_guess_prob, mutual_information, optimal_attack, optimal_x, summarize, AnalyticReport,
    EveSourceState, GridOptimum,
};
use crate::channel_attack::{
    alice_marginal, apply_channel_attack, random_channel_attack, remote_transpose_residual,
    unitary_remote_pair_gap, validate_unitarity,
};
use crate::protocol_sim::{run_protocol_sharded, Decision, ProtocolConfig, RunStats};
use crate::qmath::{
    inner, pair_basis_coefficients, rebase_coefficients, schmidt_coefficients, tensor, Basis,
    Complex, Ket, Operator, DEFAULT_TOL,
};
use crate::sampling;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TradeoffRow {
    pub epsilon: f64,
    pub p_correct: f64,
    pub mutual_info: f64,
}

pub const TRADEOFF_HEADER: &str = "epsilon,p_correct,mutual_info";

/// `steps` rows at uniform spacing over `[eps_min, eps_max]`.
pub fn tradeoff_rows(
    eps_min: f64,
    eps_max: f64,
    steps: usize,
) -> Result<Vec<TradeoffRow>, CliError> {
    if !(0.0..=0.5).contains(&eps_min) || !(0.0..=0.5).contains(&eps_max) || eps_min > eps_max {
        return Err(CliError::Usage(format!(
            "need 0 <= eps-min <= eps-max <= 0.5, got [{eps_min}, {eps_max}]"
        )));
    }
    if steps < 2 {
        return Err(CliError::Usage(format!("steps must be >= 2, got {steps}")));
    }
    if eps_min == eps_max {
        return Err(CliError::Usage(
            "eps-min must be below eps-max when steps >= 2".into(),
        ));
    }
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            let epsilon = if i + 1 == steps {
                eps_max
            } else {
                eps_min + (eps_max - eps_min) * i as f64 / last
            };
            let p_correct = max_guess_prob(epsilon)?;
            Ok(TradeoffRow {
                epsilon,
                p_correct,
                mutual_info: mutual_information(p_correct)?,
            })
        })
        .collect()
}

pub fn render_tradeoff_csv(rows: &[TradeoffRow]) -> String {
    let mut out = String::from(TRADEOFF_HEADER);
    out.push('\n');
    for r in rows {
        // `{}` on f64 is the shortest round-trip form with a '.' separator
        let _ = writeln!(out, "{},{},{}", r.epsilon, r.p_correct, r.mutual_info);
    }
    out
}

pub fn cmd_tradeoff(eps_min: f64, eps_max: f64, steps: usize, out: &Path) -> Result<(), CliError> {
    let rows = tradeoff_rows(eps_min, eps_max, steps)?;
    write_file(out, &render_tradeoff_csv(&rows))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationConfigEcho {
    pub eps: f64,
    pub pairs: u64,
    pub disclose: f64,
    pub threshold: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalBlock {
    pub qber_plus: Option<f64>,
    pub qber_times: Option<f64>,
    pub qber_pooled: Option<f64>,
    pub eve_success: Option<f64>,
    pub sifted: u64,
    pub disclosed_plus: u64,
    pub disclosed_times: u64,
    pub eve_guessed: u64,
    pub eve_correct: u64,
    pub decision: Decision,
}

/// `|empirical − analytic| / σ` with binomial σ; `None` when there is no
/// sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaDistances {
    pub qber_plus: Option<f64>,
    pub qber_times: Option<f64>,
    pub eve_success: Option<f64>,
}

impl SigmaDistances {
    pub fn max(&self) -> Option<f64> {
        [self.qber_plus, self.qber_times, self.eve_success]
            .into_iter()
            .flatten()
            .reduce(f64::max)
    }

    pub fn within(&self, limit: f64) -> bool {
        [self.qber_plus, self.qber_times, self.eve_success]
            .into_iter()
            .flatten()
            .all(|d| d <= limit)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: SimulationConfigEcho,
    pub analytic: AnalyticReport,
    pub empirical: EmpiricalBlock,
    pub sigma_distances: SigmaDistances,
    pub accept: bool,
}

/// Exit gate of `simulate`.
pub const SIGMA_GATE: f64 = 4.0;

/// Distance in binomial standard deviations between `count / n` and `p`.
///
/// For `p` at 0 or 1 the variance is taken at `1/n` from the boundary so
/// the distance stays finite.
pub fn sigma_distance(count: u64, n: u64, p: f64) -> Option<f64> {
    if n == 0 {
        return None;
    }
    let nf = n as f64;
    let floor = (1.0 / nf).min(0.5);
    let q = p.clamp(floor, 1.0 - floor);
    let sigma = (q * (1.0 - q) / nf).sqrt();
    Some((count as f64 / nf - p).abs() / sigma)
}

pub fn build_report(cfg: &ProtocolConfig, eps: f64, stats: &RunStats) -> SimulationReport {
    let analytic = analyze(&cfg.attack);
    let empirical = EmpiricalBlock {
        qber_plus: stats.qber.plus,
        qber_times: stats.qber.times,
        qber_pooled: stats.qber.pooled,
        eve_success: stats.eve_success_rate(),
        sifted: stats.sifted_count,
        disclosed_plus: stats.disclosed_per_basis[0],
        disclosed_times: stats.disclosed_per_basis[1],
        eve_guessed: stats.eve_guessed_count,
        eve_correct: stats.eve_correct_count,
        decision: stats.decision,
    };
    let sigma_distances = SigmaDistances {
        qber_plus: sigma_distance(
            stats.disagreements_disclosed[0],
            stats.disclosed_per_basis[0],
            analytic.eps_plus,
        ),
        qber_times: sigma_distance(
            stats.disagreements_disclosed[1],
            stats.disclosed_per_basis[1],
            analytic.eps_times,
        ),
        eve_success: sigma_distance(
            stats.eve_correct_count,
            stats.eve_guessed_count,
            analytic.p_marginal,
        ),
    };
    SimulationReport {
        config: SimulationConfigEcho {
            eps,
            pairs: cfg.n_pairs,
            disclose: cfg.disclose_fraction,
            threshold: cfg.qber_threshold,
            seed: cfg.seed,
        },
        analytic,
        empirical,
        sigma_distances,
        accept: stats.decision.accepted(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulateArgs {
    pub eps: f64,
    pub pairs: u64,
    pub disclose: f64,
    pub threshold: f64,
    pub seed: u64,
    pub shards: usize,
}

/// Runs the protocol against `optimal_attack(eps)`.
pub fn simulate(args: &SimulateArgs) -> Result<SimulationReport, CliError> {
    let cfg = ProtocolConfig {
        n_pairs: args.pairs,
        disclose_fraction: args.disclose,
        qber_threshold: args.threshold,
        seed: args.seed,
        attack: optimal_attack(args.eps)?,
    };
    let stats = run_protocol_sharded(&cfg, args.shards)?;
    Ok(build_report(&cfg, args.eps, &stats))
}

pub fn render_report(report: &SimulationReport) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// Writes the JSON report; returns whether every sigma distance passed the
/// gate.
pub fn cmd_simulate(args: &SimulateArgs, out: &Path) -> Result<(SimulationReport, bool), CliError> {
    let report = simulate(args)?;
    write_file(out, &render_report(&report)?)?;
    let ok = report.sigma_distances.within(SIGMA_GATE);
    Ok((report, ok))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizeReport {
    pub eps_bar: f64,
    pub x_star: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
    pub p_c_closed_form: f64,
    pub p_c_optimal_attack: f64,
    pub mutual_info: f64,
    pub grid: GridOptimum,
    pub grid_gap: f64,
}

pub fn cmd_optimize(eps: f64, n_grid: usize) -> Result<OptimizeReport, CliError> {
    let attack = optimal_attack(eps)?;
    let a = summarize(&attack);
    let p_c = max_guess_prob(eps)?;
    let grid = grid_search_max(eps, n_grid)?;
    Ok(OptimizeReport {
        eps_bar: eps,
        x_star: optimal_x(eps)?,
        x: a.x,
        y: a.y,
        z: a.z,
        t: a.t,
        p_c_closed_form: p_c,
        p_c_optimal_attack: marginal_guess_prob(&attack),
        mutual_info: mutual_information(p_c)?,
        grid,
        grid_gap: (grid.p_c - p_c).abs(),
    })
}

/// Outcome of one verification suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    /// Largest residual seen, or the relevant witness value.
    pub worst: f64,
    pub detail: String,
}

impl SuiteResult {
    fn from_worst(name: &'static str, worst: f64, tol: f64, detail: String) -> Self {
        Self {
            name,
            passed: worst <= tol,
            worst,
            detail,
        }
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!(
            "{tag} {:<28} worst={:e} {}",
            self.name, self.worst, self.detail
        )
    }
}

const VERIFY_SAMPLES: usize = 100;
const VERIFY_BOUND_SAMPLES: usize = 10_000;

/// Runs every invariant suite with residual tolerance `tol`.
pub fn run_verify(tol: f64, seed: u64) -> Result<Vec<SuiteResult>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::new();

    // remote transpose on arbitrary complex A
    let mut worst = 0.0f64;
    for _ in 0..VERIFY_SAMPLES {
        let a = sampling::random_operator(&mut rng, 2);
        worst = worst.max(remote_transpose_residual(&a)?);
    }
    results.push(SuiteResult::from_worst(
        "remote_transpose",
        worst,
        tol,
        format!("{VERIFY_SAMPLES} random A"),
    ));

    // channel attacks from random unitaries
    let mut worst_unitarity = 0.0f64;
    let mut worst_marginal = 0.0f64;
    let half_identity = Operator::diag(&[Complex::new(0.5, 0.0); 2]);
    for _ in 0..VERIFY_SAMPLES {
        let f = random_channel_attack(&mut rng);
        let check = validate_unitarity(&f, tol);
        worst_unitarity = check
            .residuals
            .iter()
            .copied()
            .fold(worst_unitarity, f64::max);
        let joint = apply_channel_attack(&f)?;
        let rho = alice_marginal(&joint)?;
        worst_marginal = worst_marginal.max(rho.max_abs_diff(&half_identity)?);
    }
    results.push(SuiteResult::from_worst(
        "channel_unitarity",
        worst_unitarity,
        tol,
        format!("{VERIFY_SAMPLES} random 4x4 unitaries"),
    ));

    // channel marginals are I/2, a source attack is not
    let witness = EveSourceState::new([
        Ket::basis(2, 0).scale_real(FRAC_1_SQRT_2),
        Ket::basis(2, 0).scale_real(FRAC_1_SQRT_2),
        Ket::zero(2),
        Ket::zero(2),
    ])?;
    let (witness_eig, _) = alice_marginal(&witness.joint())?.hermitian_2x2_eigenvalues()?;
    results.push(SuiteResult {
        name: "alice_marginal_witness",
        passed: worst_marginal <= tol && witness_eig >= 0.9,
        worst: worst_marginal,
        detail: format!("source witness top eigenvalue {witness_eig}"),
    });

    // bound never beaten; the bound is symmetric under ε̄ ↔ 1 − ε̄
    let mut worst_excess = f64::NEG_INFINITY;
    for k in 0..VERIFY_BOUND_SAMPLES {
        let s = if k % 2 == 0 {
            sampling::random_symmetric_state(&mut rng, 1 + k % 4)
        } else {
            sampling::random_orthogonal_state(&mut rng)
        };
        let (ep, et) = attack_model::error_rates(&s);
        let eps_bar = 0.5 * (ep + et);
        let bound = max_guess_prob(eps_bar.min(1.0 - eps_bar).clamp(0.0, 0.5))?;
        worst_excess = worst_excess.max(marginal_guess_prob(&s) - bound);
    }
    results.push(SuiteResult::from_worst(
        "bound_never_beaten",
        worst_excess,
        tol,
        format!("{VERIFY_BOUND_SAMPLES} random symmetric attacks"),
    ));

    // basis change conserves norm and is an involution
    let mut worst = 0.0f64;
    for k in 0..VERIFY_SAMPLES {
        let psi = sampling::random_ket(&mut rng, 4 * (1 + k % 4));
        let total = psi.norm_sqr();
        let plus = pair_basis_coefficients(&psi, Basis::Rectilinear)?;
        let times = pair_basis_coefficients(&psi, Basis::Diagonal)?;
        let sum = |c: &[Ket; 4]| c.iter().map(Ket::norm_sqr).sum::<f64>();
        worst = worst
            .max((sum(&plus) - total).abs())
            .max((sum(&times) - total).abs());
        let there = rebase_coefficients(&plus)?;
        let back = rebase_coefficients(&there)?;
        for i in 0..4 {
            worst = worst.max(there[i].distance(&times[i])?);
            worst = worst.max(back[i].distance(&plus[i])?);
        }
    }
    results.push(SuiteResult::from_worst(
        "basis_change_norm",
        worst,
        tol,
        format!("{VERIFY_SAMPLES} random joint kets"),
    ));

    // closed-form curve
    let mut worst = 0.0f64;
    for i in 0..=50 {
        let eps = 0.01 * i as f64;
        let got = marginal_guess_prob(&optimal_attack(eps)?);
        worst = worst.max((got - max_guess_prob(eps)?).abs());
    }
    results.push(SuiteResult::from_worst(
        "optimal_attack_curve",
        worst,
        tol,
        "eps in 0..=0.5 step 0.01".into(),
    ));

    // error rates: closed form vs projective measurement; weighted vs
    // square-root marginal on zero-overlap states
    let mut worst_rates = 0.0f64;
    let mut worst_marg = 0.0f64;
    for k in 0..VERIFY_SAMPLES {
        let s = if k % 2 == 0 {
            sampling::random_symmetric_state(&mut rng, 2)
        } else {
            sampling::random_orthogonal_state(&mut rng)
        };
        let (a, b) = attack_model::error_rates(&s);
        let (c, d) = attack_model::error_rates_by_projection(&s)?;
        worst_rates = worst_rates.max((a - c).abs()).max((b - d).abs());
        if k % 2 == 1 {
            let closed = marginal_guess_prob_zero_im(&summarize(&s));
            worst_marg = worst_marg.max((marginal_guess_prob(&s) - closed).abs());
        }
    }
    results.push(SuiteResult::from_worst(
        "error_rate_routes",
        worst_rates,
        tol,
        format!("{VERIFY_SAMPLES} random attacks"),
    ));
    results.push(SuiteResult::from_worst(
        "marginal_routes",
        worst_marg,
        tol,
        format!("{} orthogonal attacks", VERIFY_SAMPLES / 2),
    ));

    // local unitaries keep |B_0⟩ maximally entangled
    let mut worst = 0.0f64;
    let b0 = crate::qmath::bell_ket(0)?;
    for _ in 0..VERIFY_SAMPLES {
        let u = sampling::random_unitary(&mut rng, 2);
        let v = sampling::random_unitary(&mut rng, 2);
        let psi = u.kron(&v).apply(&b0)?;
        let (l0, l1) = schmidt_coefficients(&psi, DEFAULT_TOL)?;
        worst = worst
            .max((l0 - FRAC_1_SQRT_2).abs())
            .max((l1 - FRAC_1_SQRT_2).abs())
            .max(unitary_remote_pair_gap(&u, &v)?);
    }
    let a = Operator::diag(&[Complex::new(1.0, 0.0), Complex::new(0.5, 0.0)]);
    let gap = unitary_remote_pair_gap(&a, &Operator::identity(2))?;
    results.push(SuiteResult {
        name: "schmidt_invariance",
        passed: worst <= tol && gap > 1e-3,
        worst,
        detail: format!("gap for diag(1, 1/2) x I = {gap}"),
    });

    // conjugate symmetry of the inner product
    let mut worst = 0.0f64;
    for _ in 0..VERIFY_SAMPLES {
        let a = sampling::random_ket(&mut rng, 5);
        let b = sampling::random_ket(&mut rng, 5);
        worst = worst.max((inner(&a, &b)? - inner(&b, &a)?.conj()).norm());
        let n = tensor(&a, &b).norm() - a.norm() * b.norm();
        worst = worst.max(n.abs());
    }
    results.push(SuiteResult::from_worst(
        "inner_product",
        worst,
        tol,
        format!("{VERIFY_SAMPLES} random pairs"),
    ));

    Ok(results)
}
