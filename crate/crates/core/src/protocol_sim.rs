//! Monte Carlo run of the E91 protocol with Eve as the pair source.
//!
//! Every trial draws its randomness from a stateless counter-based stream
//! keyed by `(seed, trial_index)`, so a run split into shards and merged
//! reproduces the unsharded run exactly.
//!
//! Eve is told the basis and whether Alice and Bob agree for every kept bit,
//! and guesses only on sifted bits that were not disclosed.

use std::ops::Range;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::Serialize;

use crate::attack_model::{candidates_from_coefficients, EveSourceState, ProbeCandidates};
use crate::error::{check_range, Error, Result};
use crate::qmath::{self, inner, Basis, Ket, PairOutcome};

/// Draw slots inside one trial's stream. Eve's measurement uses the slots
/// after [`SLOT_EVE`].
const SLOT_BASIS_A: u64 = 0;
const SLOT_BASIS_B: u64 = 1;
const SLOT_OUTCOME: u64 = 2;
const SLOT_DISCLOSE: u64 = 3;
const SLOT_EVE: u64 = 4;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const SEED_SALT: u64 = 0x243F_6A88_85A3_08D3;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random word for `(seed, trial, counter)`:
/// `mix64(mix64(mix64(seed ^ SALT) ^ trial) + counter·γ)` with γ the
/// golden-ratio increment.
pub fn stream_word(seed: u64, trial: u64, counter: u64) -> u64 {
    let key = mix64(mix64(seed ^ SEED_SALT) ^ trial);
    mix64(key.wrapping_add(counter.wrapping_mul(GOLDEN_GAMMA)))
}

/// Per-trial random stream; holds no state beyond its position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialStream {
    seed: u64,
    trial: u64,
    counter: u64,
}

impl TrialStream {
    pub fn new(seed: u64, trial: u64) -> Self {
        Self::at(seed, trial, 0)
    }

    pub fn at(seed: u64, trial: u64, counter: u64) -> Self {
        Self {
            seed,
            trial,
            counter,
        }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for TrialStream {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let w = stream_word(self.seed, self.trial, self.counter);
        self.counter += 1;
        w
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

/// Optimal equal-prior measurement for telling `eta` (α = 0) from `chi`
/// (α = 1).
///
/// With `chi` rephased so that `s = ⟨eta|chi⟩ ≥ 0`, the vectors
/// `u ∝ eta + chi` and `v ∝ eta − chi` are orthonormal, and the measurement
/// basis is `m0 = (u + v)/√2`, `m1 = (u − v)/√2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HelstromMeasurement {
    /// `None` when the candidates coincide up to phase.
    vectors: Option<[Ket; 2]>,
}

/// Overlap magnitude at or above which the candidates are indistinguishable.
pub const INDISTINGUISHABLE_OVERLAP: f64 = 1.0 - 1e-12;

impl HelstromMeasurement {
    pub fn new(eta: &Ket, chi: &Ket) -> Result<Self> {
        let s = inner(eta, chi)?;
        if s.norm() >= INDISTINGUISHABLE_OVERLAP {
            return Ok(Self { vectors: None });
        }
        let chi = if s.norm() > 0.0 {
            chi.scale(s.conj() / s.norm())
        } else {
            chi.clone()
        };
        let u = eta.add(&chi)?.normalized().ok_or(Error::ZeroVector)?;
        let v = eta.sub(&chi)?.normalized().ok_or(Error::ZeroVector)?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m0 = u.add(&v)?.scale_real(h);
        let m1 = u.sub(&v)?.scale_real(h);
        Ok(Self {
            vectors: Some([m0, m1]),
        })
    }

    /// Probability that the measurement on `probe` reports α = 0.
    pub fn prob_zero(&self, probe: &Ket) -> f64 {
        match &self.vectors {
            None => 0.5,
            Some([m0, m1]) => {
                let p0 = inner(m0, probe).map(|z| z.norm_sqr()).unwrap_or(0.0);
                let p1 = inner(m1, probe).map(|z| z.norm_sqr()).unwrap_or(0.0);
                if p0 + p1 > 0.0 {
                    p0 / (p0 + p1)
                } else {
                    0.5
                }
            }
        }
    }

    pub fn guess(&self, probe: &Ket, rng: &mut impl RngCore) -> u8 {
        match self.vectors {
            None => u8::from(rng.random::<bool>()),
            Some(_) => u8::from(rng.random::<f64>() >= self.prob_zero(probe)),
        }
    }
}

/// Eve's Helstrom guess of α for a probe known to be `eta` or `chi`.
pub fn eve_guess(probe: &Ket, eta: &Ket, chi: &Ket, rng: &mut impl RngCore) -> Result<u8> {
    Ok(HelstromMeasurement::new(eta, chi)?.guess(probe, rng))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub n_pairs: u64,
    pub disclose_fraction: f64,
    pub qber_threshold: f64,
    pub seed: u64,
    pub attack: EveSourceState,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_pairs == 0 {
            return Err(Error::InvalidConfig("n_pairs must be positive".into()));
        }
        if !(self.disclose_fraction > 0.0 && self.disclose_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "disclose_fraction must lie in (0, 1), got {}",
                self.disclose_fraction
            )));
        }
        check_range("qber_threshold", self.qber_threshold, 0.0, 0.5)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub basis_a: Basis,
    pub basis_b: Basis,
    pub alpha: u8,
    pub beta: u8,
    pub sifted: bool,
    pub disclosed: bool,
    pub eve_guess: Option<u8>,
    pub eve_correct: Option<bool>,
}

/// Everything that is fixed for a given attack: outcome distributions for
/// each basis choice, collapsed probes, and Eve's measurements.
#[derive(Clone, Debug)]
pub struct PreparedAttack {
    /// `[basis_a][basis_b]` → outcome probabilities in 00, 01, 10, 11 order.
    probs: [[[f64; 4]; 2]; 2],
    /// Collapsed probes for the sifted settings, `[basis][outcome]`.
    sifted_probes: [[Option<Ket>; 4]; 2],
    /// Eve's measurement per `[basis][agree ? 0 : 1]`.
    measurements: [[EveCell; 2]; 2],
}

#[derive(Clone, Debug)]
enum EveCell {
    Blind,
    Known(u8),
    Measure(HelstromMeasurement),
}

impl PreparedAttack {
    pub fn new(attack: &EveSourceState) -> Result<Self> {
        let psi = attack.joint();
        let mut probs = [[[0.0; 4]; 2]; 2];
        for ba in Basis::ALL {
            for bb in Basis::ALL {
                let coeffs = qmath::pair_coefficients(&psi, ba, bb)?;
                probs[ba.index()][bb.index()] = coeffs.each_ref().map(Ket::norm_sqr);
            }
        }
        let mut sifted_probes: [[Option<Ket>; 4]; 2] = Default::default();
        let mut measurements: [[EveCell; 2]; 2] =
            std::array::from_fn(|_| std::array::from_fn(|_| EveCell::Blind));
        for b in Basis::ALL {
            let coeffs = qmath::pair_basis_coefficients(&psi, b)?;
            sifted_probes[b.index()] = coeffs.each_ref().map(Ket::normalized);
            for (slot, agree) in [true, false].into_iter().enumerate() {
                measurements[b.index()][slot] = match candidates_from_coefficients(&coeffs, agree) {
                    ProbeCandidates::Absent => EveCell::Blind,
                    ProbeCandidates::OneSided { alpha, .. } => EveCell::Known(alpha),
                    ProbeCandidates::Pair(p) => {
                        EveCell::Measure(HelstromMeasurement::new(&p.eta, &p.chi)?)
                    }
                };
            }
        }
        Ok(Self {
            probs,
            sifted_probes,
            measurements,
        })
    }

    /// Outcome distribution when Alice measures in `ba` and Bob in `bb`.
    pub fn outcome_probs(&self, ba: Basis, bb: Basis) -> [f64; 4] {
        self.probs[ba.index()][bb.index()]
    }
}

fn basis_from_word(w: u64) -> Basis {
    if w >> 63 == 0 {
        Basis::Rectilinear
    } else {
        Basis::Diagonal
    }
}

/// Inverse-CDF draw over 00, 01, 10, 11.
fn sample_outcome(probs: &[f64; 4], u: f64) -> PairOutcome {
    let mut cum = 0.0;
    for (k, p) in probs.iter().enumerate() {
        cum += p;
        if u < cum {
            return PairOutcome::ALL[k];
        }
    }
    // u landed in the rounding gap above the total
    let last = probs.iter().rposition(|p| *p > 0.0).unwrap_or(3);
    PairOutcome::ALL[last]
}

/// Runs trial `index` of `cfg`.
pub fn simulate_trial(prepared: &PreparedAttack, cfg: &ProtocolConfig, index: u64) -> TrialRecord {
    let word = |slot| stream_word(cfg.seed, index, slot);
    let uniform = |slot| (word(slot) >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let basis_a = basis_from_word(word(SLOT_BASIS_A));
    let basis_b = basis_from_word(word(SLOT_BASIS_B));
    let outcome = sample_outcome(
        &prepared.outcome_probs(basis_a, basis_b),
        uniform(SLOT_OUTCOME),
    );
    let sifted = basis_a == basis_b;
    let disclosed = sifted && uniform(SLOT_DISCLOSE) < cfg.disclose_fraction;

    let mut eve_guess = None;
    if sifted && !disclosed {
        let b = basis_a.index();
        let slot = if outcome.agree() { 0 } else { 1 };
        let mut rng = TrialStream::at(cfg.seed, index, SLOT_EVE);
        let guess = match (
            &prepared.measurements[b][slot],
            &prepared.sifted_probes[b][outcome.index()],
        ) {
            (EveCell::Known(alpha), _) => *alpha,
            (EveCell::Measure(m), Some(probe)) => m.guess(probe, &mut rng),
            _ => u8::from(rng.random::<bool>()),
        };
        eve_guess = Some(guess);
    }
    TrialRecord {
        basis_a,
        basis_b,
        alpha: outcome.alice,
        beta: outcome.bob,
        sifted,
        disclosed,
        eve_guess,
        eve_correct: eve_guess.map(|g| g == outcome.alice),
    }
}

/// Counts for one (basis, agree) cell of sifted trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CellCounts {
    pub trials: u64,
    pub alice_zero: u64,
    pub disclosed: u64,
    pub eve_guessed: u64,
    pub eve_correct: u64,
}

impl CellCounts {
    fn add(&mut self, other: &CellCounts) {
        self.trials += other.trials;
        self.alice_zero += other.alice_zero;
        self.disclosed += other.disclosed;
        self.eve_guessed += other.eve_guessed;
        self.eve_correct += other.eve_correct;
    }
}

/// Raw counts of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tallies {
    pub trials: u64,
    /// `[basis_a][basis_b][outcome]`.
    pub outcome_counts: [[[u64; 4]; 2]; 2],
    /// `[basis][0 = agree, 1 = disagree]`, sifted trials only.
    pub cells: [[CellCounts; 2]; 2],
}

impl Tallies {
    pub fn record(&mut self, r: &TrialRecord) {
        self.trials += 1;
        let outcome = PairOutcome {
            alice: r.alpha,
            bob: r.beta,
        };
        self.outcome_counts[r.basis_a.index()][r.basis_b.index()][outcome.index()] += 1;
        if !r.sifted {
            return;
        }
        let cell = &mut self.cells[r.basis_a.index()][usize::from(r.alpha != r.beta)];
        cell.trials += 1;
        cell.alice_zero += u64::from(r.alpha == 0);
        cell.disclosed += u64::from(r.disclosed);
        cell.eve_guessed += u64::from(r.eve_guess.is_some());
        cell.eve_correct += u64::from(r.eve_correct == Some(true));
    }

    pub fn merge(&mut self, other: &Tallies) {
        self.trials += other.trials;
        for (a, b) in self
            .outcome_counts
            .iter_mut()
            .flatten()
            .flatten()
            .zip(other.outcome_counts.iter().flatten().flatten())
        {
            *a += b;
        }
        for (a, b) in self
            .cells
            .iter_mut()
            .flatten()
            .zip(other.cells.iter().flatten())
        {
            a.add(b);
        }
    }

    pub fn cell(&self, b: Basis, agree: bool) -> &CellCounts {
        &self.cells[b.index()][usize::from(!agree)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QberEstimate {
    pub plus: Option<f64>,
    pub times: Option<f64>,
    pub pooled: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
    InsufficientDisclosure,
}

impl Decision {
    pub fn accepted(self) -> bool {
        self == Decision::Accept
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunStats {
    pub tallies: Tallies,
    pub qber_threshold: f64,
    pub sifted_count: u64,
    pub disclosed_count: u64,
    /// Disclosed trials per basis, `[+, ×]`.
    pub disclosed_per_basis: [u64; 2],
    pub disagreements_disclosed: [u64; 2],
    pub eve_guessed_count: u64,
    pub eve_correct_count: u64,
    pub qber: QberEstimate,
    pub decision: Decision,
}

impl RunStats {
    pub fn empty(qber_threshold: f64) -> Self {
        Self::from_tallies(Tallies::default(), qber_threshold)
    }

    pub fn from_tallies(tallies: Tallies, qber_threshold: f64) -> Self {
        let mut disclosed_per_basis = [0; 2];
        let mut disagreements_disclosed = [0; 2];
        let mut sifted_count = 0;
        let mut eve_guessed_count = 0;
        let mut eve_correct_count = 0;
        for b in Basis::ALL {
            for agree in [true, false] {
                let c = tallies.cell(b, agree);
                sifted_count += c.trials;
                disclosed_per_basis[b.index()] += c.disclosed;
                if !agree {
                    disagreements_disclosed[b.index()] += c.disclosed;
                }
                eve_guessed_count += c.eve_guessed;
                eve_correct_count += c.eve_correct;
            }
        }
        let mut stats = Self {
            tallies,
            qber_threshold,
            sifted_count,
            disclosed_count: disclosed_per_basis.iter().sum(),
            disclosed_per_basis,
            disagreements_disclosed,
            eve_guessed_count,
            eve_correct_count,
            qber: QberEstimate {
                plus: None,
                times: None,
                pooled: None,
            },
            decision: Decision::InsufficientDisclosure,
        };
        stats.qber = estimate_qber(&stats);
        stats.decision = match stats.qber.pooled {
            Some(q) if decide_accept(q, qber_threshold) => Decision::Accept,
            Some(_) => Decision::Reject,
            None => Decision::InsufficientDisclosure,
        };
        stats
    }

    /// Fraction of Eve's guesses that were right, if she guessed at all.
    pub fn eve_success_rate(&self) -> Option<f64> {
        (self.eve_guessed_count > 0)
            .then(|| self.eve_correct_count as f64 / self.eve_guessed_count as f64)
    }
}

/// Per-basis disagreement fraction among disclosed sifted trials and the
/// disclosure-weighted pooled rate. Bases with no disclosures are absent.
pub fn estimate_qber(stats: &RunStats) -> QberEstimate {
    let per = |b: Basis| {
        let n = stats.disclosed_per_basis[b.index()];
        (n > 0).then(|| stats.disagreements_disclosed[b.index()] as f64 / n as f64)
    };
    let total: u64 = stats.disclosed_per_basis.iter().sum();
    let pooled = (total > 0)
        .then(|| stats.disagreements_disclosed.iter().sum::<u64>() as f64 / total as f64);
    QberEstimate {
        plus: per(Basis::Rectilinear),
        times: per(Basis::Diagonal),
        pooled,
    }
}

/// Inclusive threshold test.
pub fn decide_accept(pooled_qber: f64, threshold: f64) -> bool {
    pooled_qber <= threshold
}

/// Sums the counts of two runs over disjoint trial ranges of one config.
pub fn merge_stats(a: &RunStats, b: &RunStats) -> Result<RunStats> {
    if a.qber_threshold.to_bits() != b.qber_threshold.to_bits() {
        return Err(Error::IncompatibleStats(format!(
            "thresholds differ: {} vs {}",
            a.qber_threshold, b.qber_threshold
        )));
    }
    let mut tallies = a.tallies.clone();
    tallies.merge(&b.tallies);
    Ok(RunStats::from_tallies(tallies, a.qber_threshold))
}

/// Runs trials `range` of `cfg`.
pub fn run_protocol_range(cfg: &ProtocolConfig, range: Range<u64>) -> Result<RunStats> {
    cfg.validate()?;
    let prepared = PreparedAttack::new(&cfg.attack)?;
    let mut tallies = Tallies::default();
    for i in range {
        tallies.record(&simulate_trial(&prepared, cfg, i));
    }
    Ok(RunStats::from_tallies(tallies, cfg.qber_threshold))
}

pub fn run_protocol(cfg: &ProtocolConfig) -> Result<RunStats> {
    run_protocol_range(cfg, 0..cfg.n_pairs)
}

/// Splits the trials into `shards` contiguous ranges, runs them in parallel
/// and merges. The result does not depend on `shards`.
pub fn run_protocol_sharded(cfg: &ProtocolConfig, shards: usize) -> Result<RunStats> {
    cfg.validate()?;
    let shards = shards.max(1) as u64;
    let n = cfg.n_pairs;
    let parts: Vec<RunStats> = (0..shards)
        .into_par_iter()
        .map(|k| run_protocol_range(cfg, n * k / shards..n * (k + 1) / shards))
        .collect::<Result<_>>()?;
    parts
        .iter()
        .try_fold(RunStats::empty(cfg.qber_threshold), |acc, s| {
            merge_stats(&acc, s)
        })
}

/// Analytic distribution over `(basis_a, basis_b, outcome)` for one trial,
/// bases uniform and independent.
pub fn analytic_outcome_distribution(attack: &EveSourceState) -> Result<[[[f64; 4]; 2]; 2]> {
    let prepared = PreparedAttack::new(attack)?;
    let mut out = prepared.probs;
    out.iter_mut().flatten().flatten().for_each(|p| *p *= 0.25);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack_model::optimal_attack;
    use crate::qmath::Complex;

    fn cfg(attack: EveSourceState, n: u64, seed: u64) -> ProtocolConfig {
        ProtocolConfig {
            n_pairs: n,
            disclose_fraction: 0.1,
            qber_threshold: 0.11,
            seed,
            attack,
        }
    }

    #[test]
    fn stream_is_stateless() {
        let mut s = TrialStream::new(7, 3);
        let a = s.next_u64();
        let b = s.next_u64();
        assert_eq!(a, stream_word(7, 3, 0));
        assert_eq!(b, stream_word(7, 3, 1));
        assert_ne!(stream_word(7, 3, 0), stream_word(7, 4, 0));
        assert_ne!(stream_word(7, 3, 0), stream_word(8, 3, 0));
        let u = TrialStream::new(1, 1).uniform();
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn inverse_cdf_order() {
        let p = [0.25, 0.0, 0.5, 0.25];
        assert_eq!(sample_outcome(&p, 0.0), PairOutcome::ALL[0]);
        assert_eq!(sample_outcome(&p, 0.25), PairOutcome::ALL[2]);
        assert_eq!(sample_outcome(&p, 0.76), PairOutcome::ALL[3]);
        assert_eq!(
            sample_outcome(&[0.5, 0.5 - 1e-16, 0.0, 0.0], 0.9999999999999999),
            PairOutcome::ALL[1]
        );
    }

    #[test]
    fn orthogonal_candidates_are_identified() {
        let eta = Ket::basis(2, 0);
        let chi = Ket::basis(2, 1);
        let mut rng = TrialStream::new(1, 0);
        for _ in 0..100 {
            assert_eq!(eve_guess(&eta, &eta, &chi, &mut rng).unwrap(), 0);
            assert_eq!(eve_guess(&chi, &eta, &chi, &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn helstrom_measurement_probabilities() {
        // real overlap 0.8 with a complex phase on chi
        let eta = Ket::basis(2, 0);
        let chi = Ket::from_real(&[0.8, 0.6])
            .unwrap()
            .scale(Complex::from_polar(1.0, 0.7));
        let m = HelstromMeasurement::new(&eta, &chi).unwrap();
        assert!((m.prob_zero(&eta) - 0.8).abs() < 1e-14);
        assert!((m.prob_zero(&chi) - 0.2).abs() < 1e-14);
        let same = HelstromMeasurement::new(&eta, &eta).unwrap();
        assert_eq!(same.prob_zero(&eta), 0.5);
    }

    #[test]
    fn config_validation() {
        let good = cfg(optimal_attack(0.1).unwrap(), 10, 1);
        assert!(good.validate().is_ok());
        for bad in [
            ProtocolConfig {
                n_pairs: 0,
                ..good.clone()
            },
            ProtocolConfig {
                disclose_fraction: 0.0,
                ..good.clone()
            },
            ProtocolConfig {
                disclose_fraction: 1.0,
                ..good.clone()
            },
            ProtocolConfig {
                qber_threshold: 0.6,
                ..good.clone()
            },
        ] {
            assert!(run_protocol(&bad).is_err());
        }
    }

    #[test]
    fn perfect_source_run() {
        let attack = EveSourceState::perfect_epr(Ket::basis(1, 0)).unwrap();
        let stats = run_protocol(&cfg(attack, 20_000, 9)).unwrap();
        assert_eq!(stats.qber.pooled, Some(0.0));
        assert_eq!(stats.decision, Decision::Accept);
        let rate = stats.eve_success_rate().unwrap();
        let sigma = (0.25 / stats.eve_guessed_count as f64).sqrt();
        assert!((rate - 0.5).abs() < 4.0 * sigma, "{rate}");
    }

    #[test]
    fn record_invariants() {
        let c = cfg(optimal_attack(0.2).unwrap(), 2000, 5);
        let prepared = PreparedAttack::new(&c.attack).unwrap();
        for i in 0..c.n_pairs {
            let r = simulate_trial(&prepared, &c, i);
            assert_eq!(r.sifted, r.basis_a == r.basis_b);
            assert!(!r.disclosed || r.sifted);
            assert_eq!(r.eve_guess.is_some(), r.sifted && !r.disclosed);
            assert_eq!(r.eve_guess.is_some(), r.eve_correct.is_some());
        }
    }

    #[test]
    fn qber_estimates() {
        let mut t = Tallies::default();
        t.cells[0][0] = CellCounts {
            trials: 900,
            disclosed: 90,
            ..Default::default()
        };
        t.cells[0][1] = CellCounts {
            trials: 100,
            disclosed: 10,
            ..Default::default()
        };
        let stats = RunStats::from_tallies(t, 0.11);
        let q = estimate_qber(&stats);
        assert_eq!(q.plus, Some(0.1));
        assert_eq!(q.times, None);
        assert_eq!(q.pooled, Some(0.1));
        assert_eq!(stats.decision, Decision::Accept);

        let empty = RunStats::empty(0.11);
        assert_eq!(empty.qber.pooled, None);
        assert_eq!(empty.decision, Decision::InsufficientDisclosure);
    }

    #[test]
    fn threshold_is_inclusive() {
        assert!(decide_accept(0.05, 0.11));
        assert!(!decide_accept(0.15, 0.11));
        assert!(decide_accept(0.11, 0.11));
    }

    #[test]
    fn merge_identity_and_mismatch() {
        let c = cfg(optimal_attack(0.1).unwrap(), 500, 2);
        let s = run_protocol(&c).unwrap();
        assert_eq!(merge_stats(&s, &RunStats::empty(0.11)).unwrap(), s);
        assert!(merge_stats(&s, &RunStats::empty(0.2)).is_err());
    }
}
