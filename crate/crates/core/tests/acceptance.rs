//! Acceptance criteria. Each test prints one PASS/FAIL line; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

use std::process::Command;
use std::time::{Duration, Instant};

use e91_eve::attack_model::{
    error_rates, grid_search_max, helstrom_success, is_symmetric, marginal_guess_prob,
    max_guess_prob, mutual_information, optimal_attack, EveSourceState,
};
use e91_eve::channel_attack::{
    alice_marginal, apply_channel_attack, random_channel_attack, remote_transpose_residual,
    unitary_remote_pair_gap, validate_unitarity,
};
use e91_eve::protocol_sim::{
    eve_guess, run_protocol, run_protocol_sharded, ProtocolConfig, TrialStream,
};
use e91_eve::qmath::{Complex, Ket, Operator};
use e91_eve::sampling::{
    random_operator, random_orthogonal_state, random_symmetric_state, random_unitary,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, passed: bool, detail: String) {
    let tag = if passed { "PASS" } else { "FAIL" };
    println!("[{tag}] AC{id} {name}: {detail}");
    assert!(passed, "AC{id} {name} failed: {detail}");
}

/// Binomial distance in standard deviations; at p ∈ {0, 1} only an exact
/// match is within range.
fn sigmas(count: u64, n: u64, p: f64) -> f64 {
    let emp = count as f64 / n as f64;
    if p <= 0.0 || p >= 1.0 {
        return if emp == p { 0.0 } else { f64::INFINITY };
    }
    (emp - p).abs() / (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn ac1_closed_form_curve() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..=10 {
        let eps = 0.05 * i as f64;
        let got = marginal_guess_prob(&optimal_attack(eps).unwrap());
        let want = 0.5 + (eps * (1.0 - eps)).sqrt();
        worst = worst.max((got - want).abs());
    }
    let elapsed = start.elapsed();
    report(
        1,
        "closed-form curve",
        worst <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("max |P_c - bound| = {worst:e} (tol 1e-12), {elapsed:?} (< 1 s)"),
    );
}

#[test]
fn ac2_optimizer_location() {
    let start = Instant::now();
    let n = 2001;
    let mut ok = true;
    let mut detail = Vec::new();
    for eps in [0.05, 0.1, 0.25] {
        let g = grid_search_max(eps, n).unwrap();
        let closed = max_guess_prob(eps).unwrap();
        let eps_step = 2.0 * eps / (n - 1) as f64;
        let x_step = eps / (n - 1) as f64; // width of the x interval at ε_+ = ε_× = ε̄
        let x_star = (1.0 - eps) * (1.0 - eps);
        let here = (g.p_c - closed).abs() <= 1e-6
            && (g.eps_plus - eps).abs() <= eps_step * (1.0 + 1e-9)
            && (g.eps_times - eps).abs() <= eps_step * (1.0 + 1e-9)
            && (g.x - x_star).abs() <= x_step * (1.0 + 1e-9);
        ok &= here;
        detail.push(format!(
            "eps {eps}: gap {:e}, argmax ({}, {}, {})",
            (g.p_c - closed).abs(),
            g.eps_plus,
            g.eps_times,
            g.x
        ));
    }
    let elapsed = start.elapsed();
    detail.push(format!("{elapsed:?} (< 10 s)"));
    report(
        2,
        "optimizer location",
        ok && elapsed < Duration::from_secs(10),
        detail.join("; "),
    );
}

#[test]
fn ac3_monte_carlo_vs_analytic() {
    let start = Instant::now();
    let cfg = ProtocolConfig {
        n_pairs: 4_000_000,
        disclose_fraction: 0.1,
        qber_threshold: 0.11,
        seed: 42,
        attack: optimal_attack(0.1).unwrap(),
    };
    let stats = run_protocol(&cfg).unwrap();
    let elapsed = start.elapsed();
    let d_plus = sigmas(
        stats.disagreements_disclosed[0],
        stats.disclosed_per_basis[0],
        0.1,
    );
    let d_times = sigmas(
        stats.disagreements_disclosed[1],
        stats.disclosed_per_basis[1],
        0.1,
    );
    let d_eve = sigmas(stats.eve_correct_count, stats.eve_guessed_count, 0.8);
    report(
        3,
        "Monte Carlo vs analytic",
        d_plus <= 4.0 && d_times <= 4.0 && d_eve <= 4.0 && elapsed < Duration::from_secs(120),
        format!(
            "qber+ {:.5} ({d_plus:.2} sigma), qberx {:.5} ({d_times:.2} sigma), eve {:.5} ({d_eve:.2} sigma), {elapsed:?}",
            stats.qber.plus.unwrap(),
            stats.qber.times.unwrap(),
            stats.eve_success_rate().unwrap()
        ),
    );
}

#[test]
fn ac4_helstrom_oracle() {
    let eta = Ket::basis(2, 0);
    let n = 1_000_000u64;
    let mut ok = true;
    let mut detail = Vec::new();
    for (i, overlap) in [0.0f64, 0.5, 0.8, 1.0].into_iter().enumerate() {
        let chi = Ket::from_real(&[overlap, (1.0 - overlap * overlap).sqrt()]).unwrap();
        let want = helstrom_success(&eta, &chi).unwrap();
        let mut correct = 0u64;
        for t in 0..n {
            let mut rng = TrialStream::new(0xAC4 + i as u64, t);
            let alpha = (t & 1) as u8;
            let probe = if alpha == 0 { &eta } else { &chi };
            correct += u64::from(eve_guess(probe, &eta, &chi, &mut rng).unwrap() == alpha);
        }
        let d = sigmas(correct, n, want);
        ok &= d <= 4.0;
        detail.push(format!(
            "overlap {overlap}: {:.5} vs {want:.5} ({d:.2} sigma)",
            correct as f64 / n as f64
        ));
    }
    report(4, "Helstrom oracle", ok, detail.join("; "));
}

#[test]
fn ac5_channel_attack_constraints() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let half = Operator::diag(&[Complex::new(0.5, 0.0); 2]);
    let mut worst_u = 0.0f64;
    let mut worst_rho = 0.0f64;
    for _ in 0..100 {
        let f = random_channel_attack(&mut rng);
        worst_u = validate_unitarity(&f, 1e-12)
            .residuals
            .iter()
            .copied()
            .fold(worst_u, f64::max);
        let rho = alice_marginal(&apply_channel_attack(&f).unwrap()).unwrap();
        worst_rho = worst_rho.max(rho.max_abs_diff(&half).unwrap());
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let source = EveSourceState::new([
        Ket::basis(2, 0).scale_real(h),
        Ket::basis(2, 0).scale_real(h),
        Ket::zero(2),
        Ket::zero(2),
    ])
    .unwrap();
    let (top, _) = alice_marginal(&source.joint())
        .unwrap()
        .hermitian_2x2_eigenvalues()
        .unwrap();
    report(
        5,
        "channel-attack constraints",
        worst_u <= 1e-12 && worst_rho <= 1e-10 && top >= 0.9,
        format!("max unitarity residual {worst_u:e}, max |rho_A - I/2| {worst_rho:e}, source witness eigenvalue {top}"),
    );
}

#[test]
fn ac6_remote_transpose_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_residual = 0.0f64;
    let mut worst_unitary_gap = 0.0f64;
    for _ in 0..100 {
        let a = random_operator(&mut rng, 2);
        worst_residual = worst_residual.max(remote_transpose_residual(&a).unwrap());
        let u = random_unitary(&mut rng, 2);
        let v = random_unitary(&mut rng, 2);
        worst_unitary_gap = worst_unitary_gap.max(unitary_remote_pair_gap(&u, &v).unwrap());
    }
    let filter = Operator::diag(&[Complex::new(1.0, 0.0), Complex::new(0.5, 0.0)]);
    let gap = unitary_remote_pair_gap(&filter, &Operator::identity(2)).unwrap();
    report(
        6,
        "remote-transpose identity",
        worst_residual <= 1e-12 && gap > 1e-3 && worst_unitary_gap <= 1e-12,
        format!("max residual {worst_residual:e}, gap diag(1,1/2) {gap}, max unitary gap {worst_unitary_gap:e}"),
    );
}

#[test]
fn ac7_bound_supremacy_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    let mut all_symmetric = true;
    for k in 0..10_000 {
        let s = if k % 2 == 0 {
            random_symmetric_state(&mut rng, 1 + k % 4)
        } else {
            random_orthogonal_state(&mut rng)
        };
        all_symmetric &= is_symmetric(&s, 1e-10).is_symmetric();
        let (p, t) = error_rates(&s);
        let eps_bar = 0.5 * (p + t);
        // bound formula is invariant under ε̄ ↔ 1 − ε̄ (relabel x ↔ t)
        let bound = max_guess_prob(eps_bar.min(1.0 - eps_bar).clamp(0.0, 0.5)).unwrap();
        worst = worst.max(marginal_guess_prob(&s) - bound);
    }
    report(
        7,
        "bound supremacy sampling",
        all_symmetric && worst <= 1e-9,
        format!("10000 symmetric attacks, max excess over bound {worst:e} (tol 1e-9)"),
    );
}

#[test]
fn ac8_mutual_information_endpoints() {
    let i_half = mutual_information(0.5).unwrap();
    let i_one = mutual_information(1.0).unwrap();
    let i_08 = mutual_information(0.8).unwrap();
    report(
        8,
        "mutual information endpoints",
        i_half == 0.0 && i_one == 1.0 && (i_08 - 0.2780719051126377).abs() <= 1e-12,
        format!("I(0.5) = {i_half}, I(1) = {i_one}, I(0.8) = {i_08}"),
    );
}

#[test]
fn ac9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, shards: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_e91-eve"))
            .args([
                "simulate",
                "--eps",
                "0.1",
                "--pairs",
                "200000",
                "--disclose",
                "0.1",
                "--threshold",
                "0.11",
                "--seed",
                "42",
                "--shards",
                shards,
                "--out",
            ])
            .arg(&out)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "1");
    let c = run("c.json", "4");

    let cfg = ProtocolConfig {
        n_pairs: 200_000,
        disclose_fraction: 0.1,
        qber_threshold: 0.11,
        seed: 42,
        attack: optimal_attack(0.1).unwrap(),
    };
    let one = run_protocol_sharded(&cfg, 1).unwrap();
    let four = run_protocol_sharded(&cfg, 4).unwrap();
    report(
        9,
        "determinism",
        a == b && a == c && one == four,
        format!(
            "repeat identical: {}, 4-shard report identical: {}, 4-shard stats equal: {}",
            a == b,
            a == c,
            one == four
        ),
    );
}
