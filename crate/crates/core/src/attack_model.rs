//! Eve's source attack: she prepares the photon pair together with a probe,
//! `|ψ⟩ = Σ_c |E_c⟩ ⊗ |B_c⟩`, and later guesses Alice's bit from her probe
//! once the basis and the agree/disagree status are public.
//!
//! Guess probabilities are computed from the actual probe overlaps. The
//! `*_zero_im` functions are the closed-form fast path, exact when the
//! constrained overlaps vanish entirely (imaginary parts included).

use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::qmath::{
    self, bell_ket, inner, tensor, Basis, Complex, Ket, PairOutcome, ABSENT_WEIGHT, DEFAULT_TOL,
};

/// Four probe kets attached to the Bell components of the pair.
#[derive(Clone, Debug, PartialEq)]
pub struct EveSourceState {
    probes: [Ket; 4],
}

impl EveSourceState {
    /// Validates `Σ_c ⟨E_c|E_c⟩ = 1` within [`DEFAULT_TOL`].
    pub fn new(probes: [Ket; 4]) -> Result<Self> {
        Self::with_tol(probes, DEFAULT_TOL)
    }

    pub fn with_tol(probes: [Ket; 4], tol: f64) -> Result<Self> {
        let d = probes[0].dim();
        for p in &probes[1..] {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: p.dim(),
                });
            }
        }
        let total: f64 = probes.iter().map(Ket::norm_sqr).sum();
        let deficit = 1.0 - total;
        if deficit.is_nan() || deficit.abs() > tol {
            return Err(Error::SourceNormalization { deficit });
        }
        Ok(Self { probes })
    }

    /// Noise-free EPR source: the pair is `|B_0⟩` and the probe is `probe`.
    pub fn perfect_epr(probe: Ket) -> Result<Self> {
        let d = probe.dim();
        Self::new([probe, Ket::zero(d), Ket::zero(d), Ket::zero(d)])
    }

    pub fn probe_dim(&self) -> usize {
        self.probes[0].dim()
    }

    pub fn probes(&self) -> &[Ket; 4] {
        &self.probes
    }

    pub fn probe(&self, c: usize) -> &Ket {
        &self.probes[c]
    }

    /// The joint ket `Σ_c |E_c⟩ ⊗ |B_c⟩` (probe-major layout).
    pub fn joint(&self) -> Ket {
        let mut amp = vec![Complex::new(0.0, 0.0); 4 * self.probe_dim()];
        for (c, e) in self.probes.iter().enumerate() {
            let term = tensor(e, &bell_ket(c).expect("c < 4"));
            for (a, t) in amp.iter_mut().zip(term.amplitudes()) {
                *a += t;
            }
        }
        Ket::new(amp).expect("probe_dim >= 1")
    }
}

/// Same as [`EveSourceState::new`].
pub fn make_source_state(probes: [Ket; 4]) -> Result<EveSourceState> {
    EveSourceState::new(probes)
}

/// Probe norms `x, y, z, t` and the pairwise overlaps `o_ij = ⟨E_i|E_j⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AttackSummary {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
    pub o01: Complex,
    pub o23: Complex,
    pub o02: Complex,
    pub o13: Complex,
    /// Not constrained by symmetry and not used by any formula.
    pub o03: Complex,
    pub o12: Complex,
}

impl AttackSummary {
    pub fn constrained_overlaps(&self) -> [(&'static str, Complex); 4] {
        [
            ("<E0|E1>", self.o01),
            ("<E2|E3>", self.o23),
            ("<E0|E2>", self.o02),
            ("<E1|E3>", self.o13),
        ]
    }
}

pub fn summarize(s: &EveSourceState) -> AttackSummary {
    let e = s.probes();
    let ov = |i: usize, j: usize| inner(&e[i], &e[j]).expect("equal probe dims");
    AttackSummary {
        x: e[0].norm_sqr(),
        y: e[1].norm_sqr(),
        z: e[2].norm_sqr(),
        t: e[3].norm_sqr(),
        o01: ov(0, 1),
        o23: ov(2, 3),
        o02: ov(0, 2),
        o13: ov(1, 3),
        o03: ov(0, 3),
        o12: ov(1, 2),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryViolation {
    pub term: &'static str,
    pub real_part: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SymmetryReport {
    pub violations: Vec<SymmetryViolation>,
}

impl SymmetryReport {
    pub fn is_symmetric(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Symmetric attacks have `Re⟨E0|E1⟩ = Re⟨E2|E3⟩ = Re⟨E0|E2⟩ = Re⟨E1|E3⟩ = 0`.
pub fn is_symmetric(s: &EveSourceState, tol: f64) -> SymmetryReport {
    let violations = summarize(s)
        .constrained_overlaps()
        .into_iter()
        .filter(|(_, o)| o.re.abs() > tol)
        .map(|(term, o)| SymmetryViolation {
            term,
            real_part: o.re,
        })
        .collect();
    SymmetryReport { violations }
}

/// `(ε_+, ε_×) = (z + t, y + t)`.
pub fn error_rates(s: &EveSourceState) -> (f64, f64) {
    let a = summarize(s);
    (a.z + a.t, a.y + a.t)
}

/// Error rates from the measurement route: the total probability of the two
/// disagreeing outcomes when both photons are measured in the same basis.
pub fn error_rates_by_projection(s: &EveSourceState) -> Result<(f64, f64)> {
    let psi = s.joint();
    let rate = |b: Basis| -> Result<f64> {
        let mut total = 0.0;
        for outcome in PairOutcome::ALL.into_iter().filter(|o| !o.agree()) {
            total += qmath::project_outcome(&psi, b, outcome)?.prob;
        }
        Ok(total)
    };
    Ok((rate(Basis::Rectilinear)?, rate(Basis::Diagonal)?))
}

/// The pair outcomes that carry Alice's bit 0 and 1 for a given agree status.
pub(crate) fn cell_outcomes(agree: bool) -> [PairOutcome; 2] {
    if agree {
        [PairOutcome::ALL[0], PairOutcome::ALL[3]]
    } else {
        [PairOutcome::ALL[1], PairOutcome::ALL[2]]
    }
}

/// Candidate probe states for `α = 0` (`eta`) and `α = 1` (`chi`).
#[derive(Clone, Debug, PartialEq)]
pub struct ProbePair {
    pub eta: Ket,
    pub chi: Ket,
    /// Probability of the conditioning event given the basis.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProbeCandidates {
    /// The event has probability at most [`ABSENT_WEIGHT`].
    Absent,
    /// Only one value of Alice's bit is possible in this event.
    OneSided {
        alpha: u8,
        weight: f64,
    },
    Pair(ProbePair),
}

impl ProbeCandidates {
    pub fn weight(&self) -> f64 {
        match self {
            ProbeCandidates::Absent => 0.0,
            ProbeCandidates::OneSided { weight, .. } => *weight,
            ProbeCandidates::Pair(p) => p.weight,
        }
    }

    /// Eve's optimal success in this event, treating both bits as equally
    /// likely; absent events count as 1/2.
    pub fn success(&self) -> f64 {
        match self {
            ProbeCandidates::Absent => 0.5,
            ProbeCandidates::OneSided { .. } => 1.0,
            ProbeCandidates::Pair(p) => helstrom_success(&p.eta, &p.chi).expect("normalized pair"),
        }
    }
}

pub(crate) fn candidates_from_coefficients(coeffs: &[Ket; 4], agree: bool) -> ProbeCandidates {
    let [o0, o1] = cell_outcomes(agree);
    let c0 = qmath::collapse_from(&coeffs[o0.index()]);
    let c1 = qmath::collapse_from(&coeffs[o1.index()]);
    let weight = c0.prob + c1.prob;
    if weight <= ABSENT_WEIGHT {
        return ProbeCandidates::Absent;
    }
    match (c0.probe, c1.probe) {
        (Some(eta), Some(chi)) => ProbeCandidates::Pair(ProbePair { eta, chi, weight }),
        (Some(_), None) => ProbeCandidates::OneSided { alpha: 0, weight },
        (None, Some(_)) => ProbeCandidates::OneSided { alpha: 1, weight },
        (None, None) => ProbeCandidates::Absent,
    }
}

/// Eve's two candidate probe states in the event (basis `b`, agree status).
pub fn conditional_probe_pair(s: &EveSourceState, b: Basis, agree: bool) -> ProbeCandidates {
    let coeffs = qmath::pair_basis_coefficients(&s.joint(), b).expect("joint dim is 4d");
    candidates_from_coefficients(&coeffs, agree)
}

/// Optimal success probability for telling apart two equally likely pure
/// states: `1/2 + 1/2·√(1 − |⟨η|χ⟩|²)`.
pub fn helstrom_success(eta: &Ket, chi: &Ket) -> Result<f64> {
    let overlap = inner(eta, chi)?.norm_sqr().min(1.0);
    Ok(0.5 + 0.5 * (1.0 - overlap).sqrt())
}

/// Eve's success in the four events (share/+, not share/+, share/×,
/// not share/×).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConditionalGuess {
    pub share_plus: f64,
    pub noshare_plus: f64,
    pub share_times: f64,
    pub noshare_times: f64,
}

impl ConditionalGuess {
    pub fn get(&self, b: Basis, agree: bool) -> f64 {
        match (b, agree) {
            (Basis::Rectilinear, true) => self.share_plus,
            (Basis::Rectilinear, false) => self.noshare_plus,
            (Basis::Diagonal, true) => self.share_times,
            (Basis::Diagonal, false) => self.noshare_times,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [
            self.share_plus,
            self.noshare_plus,
            self.share_times,
            self.noshare_times,
        ]
    }
}

/// All four events with their weights, in (+ share, + not share, × share,
/// × not share) order.
pub fn event_candidates(s: &EveSourceState) -> [(Basis, bool, ProbeCandidates); 4] {
    let psi = s.joint();
    let plus = qmath::pair_basis_coefficients(&psi, Basis::Rectilinear).expect("4d joint");
    let times = qmath::pair_basis_coefficients(&psi, Basis::Diagonal).expect("4d joint");
    [
        (
            Basis::Rectilinear,
            true,
            candidates_from_coefficients(&plus, true),
        ),
        (
            Basis::Rectilinear,
            false,
            candidates_from_coefficients(&plus, false),
        ),
        (
            Basis::Diagonal,
            true,
            candidates_from_coefficients(&times, true),
        ),
        (
            Basis::Diagonal,
            false,
            candidates_from_coefficients(&times, false),
        ),
    ]
}

pub fn conditional_guess_probs(s: &EveSourceState) -> ConditionalGuess {
    let [a, b, c, d] = event_candidates(s).map(|(_, _, cand)| cand.success());
    ConditionalGuess {
        share_plus: a,
        noshare_plus: b,
        share_times: c,
        noshare_times: d,
    }
}

fn ratio_success(p: f64, q: f64) -> f64 {
    let total = p + q;
    if total <= ABSENT_WEIGHT {
        return 0.5;
    }
    let r = (p - q) / total;
    0.5 + 0.5 * (1.0 - r * r).max(0.0).sqrt()
}

/// Closed-form conditional successes using the ratios `(x−y)/(x+y)`,
/// `(z−t)/(z+t)`, `(x−z)/(x+z)`, `(y−t)/(y+t)`.
pub fn conditional_guess_probs_zero_im(a: &AttackSummary) -> ConditionalGuess {
    ConditionalGuess {
        share_plus: ratio_success(a.x, a.y),
        noshare_plus: ratio_success(a.z, a.t),
        share_times: ratio_success(a.x, a.z),
        noshare_times: ratio_success(a.y, a.t),
    }
}

/// Marginal probability that Eve guesses Alice's bit: each event's success
/// weighted by its probability, bases equally likely.
pub fn marginal_guess_prob(s: &EveSourceState) -> f64 {
    event_candidates(s)
        .iter()
        .map(|(_, _, cand)| 0.5 * cand.weight() * cand.success())
        .sum::<f64>()
        .min(1.0)
}

/// `1/2 + (√(xy) + √(zt) + √(xz) + √(yt))/2`.
pub fn marginal_guess_prob_zero_im(a: &AttackSummary) -> f64 {
    let r = |u: f64, v: f64| (u.max(0.0) * v.max(0.0)).sqrt();
    0.5 + 0.5 * (r(a.x, a.y) + r(a.z, a.t) + r(a.x, a.z) + r(a.y, a.t))
}

fn check_eps_bar(eps_bar: f64) -> Result<()> {
    check_range("eps_bar", eps_bar, 0.0, 0.5)
}

/// Maximizing probe weight `x* = 1 − 2ε̄ + ε̄² = (1 − ε̄)²`.
pub fn optimal_x(eps_bar: f64) -> Result<f64> {
    check_eps_bar(eps_bar)?;
    Ok((1.0 - eps_bar) * (1.0 - eps_bar))
}

/// The attack reaching the bound at average error `eps_bar`: orthogonal
/// probe directions with weights `x = (1−ε̄)², y = z = ε̄(1−ε̄), t = ε̄²`.
pub fn optimal_attack(eps_bar: f64) -> Result<EveSourceState> {
    check_eps_bar(eps_bar)?;
    let cross = (eps_bar * (1.0 - eps_bar)).sqrt();
    let magnitudes = [1.0 - eps_bar, cross, cross, eps_bar];
    let probes = std::array::from_fn(|c| Ket::basis(4, c).scale_real(magnitudes[c]));
    EveSourceState::new(probes)
}

/// `1/2 + √(ε̄(1 − ε̄))`.
pub fn max_guess_prob(eps_bar: f64) -> Result<f64> {
    check_eps_bar(eps_bar)?;
    Ok(0.5 + (eps_bar * (1.0 - eps_bar)).sqrt())
}

/// Zero-overlap guess probability written in terms of the error rates and
/// `x`, using `y = 1 − ε_+ − x`, `z = 1 − ε_× − x`, `t = x + ε_+ + ε_× − 1`.
pub fn guess_prob_in_error_rates(eps_plus: f64, eps_times: f64, x: f64) -> f64 {
    let s = |v: f64| v.max(0.0).sqrt();
    0.5 + 0.5
        * (s(1.0 - eps_plus - x) + s(1.0 - eps_times - x))
        * (s(x) + s(x + eps_plus + eps_times - 1.0))
}

/// Admissible `x` range `[1 − ε_+ − ε_×, 1 − max(ε_+, ε_×)]`.
pub fn x_domain(eps_plus: f64, eps_times: f64) -> (f64, f64) {
    (1.0 - eps_plus - eps_times, 1.0 - eps_plus.max(eps_times))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridOptimum {
    pub eps_plus: f64,
    pub eps_times: f64,
    pub x: f64,
    pub p_c: f64,
}

pub const DEFAULT_GRID: usize = 2001;

/// Brute-force maximum of [`guess_prob_in_error_rates`] over
/// `ε_+ ∈ [0, 2ε̄]` (with `ε_× = 2ε̄ − ε_+`) and `x` over its admissible
/// interval, `n_grid` points per axis.
pub fn grid_search_max(eps_bar: f64, n_grid: usize) -> Result<GridOptimum> {
    check_eps_bar(eps_bar)?;
    if n_grid < 3 {
        return Err(Error::InvalidConfig(format!(
            "n_grid must be >= 3, got {n_grid}"
        )));
    }
    let steps = (n_grid - 1) as f64;
    let mut best = GridOptimum {
        eps_plus: eps_bar,
        eps_times: eps_bar,
        x: 1.0 - eps_bar,
        p_c: f64::NEG_INFINITY,
    };
    for i in 0..n_grid {
        let eps_plus = 2.0 * eps_bar * i as f64 / steps;
        let eps_times = 2.0 * eps_bar - eps_plus;
        let (lo, hi) = x_domain(eps_plus, eps_times);
        for j in 0..n_grid {
            let x = lo + (hi - lo) * j as f64 / steps;
            let p_c = guess_prob_in_error_rates(eps_plus, eps_times, x);
            if p_c > best.p_c {
                best = GridOptimum {
                    eps_plus,
                    eps_times,
                    x,
                    p_c,
                };
            }
        }
    }
    Ok(best)
}

/// Capacity of the binary symmetric channel with success `p_c`, in bits:
/// `1 + p log₂ p + (1−p) log₂(1−p)`.
pub fn mutual_information(p_c: f64) -> Result<f64> {
    check_range("p_c", p_c, 0.5, 1.0)?;
    if p_c == 0.5 {
        return Ok(0.0);
    }
    if p_c == 1.0 {
        return Ok(1.0);
    }
    let q = 1.0 - p_c;
    Ok(1.0 + p_c * p_c.log2() + q * q.log2())
}

/// Every analytic quantity for one source state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnalyticReport {
    pub eps_plus: f64,
    pub eps_times: f64,
    pub eps_bar: f64,
    pub p_share_plus: f64,
    pub p_noshare_plus: f64,
    pub p_share_times: f64,
    pub p_noshare_times: f64,
    pub p_marginal: f64,
    pub mutual_info: f64,
}

pub fn analyze(s: &EveSourceState) -> AnalyticReport {
    let (eps_plus, eps_times) = error_rates(s);
    let cond = conditional_guess_probs(s);
    let p_marginal = marginal_guess_prob(s);
    AnalyticReport {
        eps_plus,
        eps_times,
        eps_bar: 0.5 * (eps_plus + eps_times),
        p_share_plus: cond.share_plus,
        p_noshare_plus: cond.noshare_plus,
        p_share_times: cond.share_times,
        p_noshare_times: cond.noshare_times,
        p_marginal,
        mutual_info: mutual_information(p_marginal.clamp(0.5, 1.0)).expect("clamped"),
    }
}
