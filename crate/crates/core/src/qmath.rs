//! Small exact complex linear algebra: kets, operators, tensor products,
//! the two polarisation bases, the Bell basis, projective measurement of a
//! photon pair attached to a probe, and two-qubit Schmidt coefficients.
//!
//! Index conventions used throughout the crate:
//!
//! * a photon pair is a dim-4 ket indexed by `2 * alice_bit + bob_bit`;
//! * a joint probe/pair state is probe-major: `probe_index * 4 + pair_index`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Default tolerance for exact-algebra checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Probabilities (and squared norms) at or below this are treated as absent.
pub const ABSENT_WEIGHT: f64 = 1e-15;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// A finite-dimensional complex amplitude vector. Not necessarily normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amp: Vec<Complex>,
}

impl Ket {
    pub fn new(amp: Vec<Complex>) -> Result<Self> {
        if amp.is_empty() {
            return Err(Error::EmptyKet);
        }
        Ok(Self { amp })
    }

    pub fn from_real(amp: &[f64]) -> Result<Self> {
        Self::new(amp.iter().map(|&a| Complex::new(a, 0.0)).collect())
    }

    /// The zero vector of dimension `dim` (clamped to at least 1).
    pub fn zero(dim: usize) -> Self {
        Self {
            amp: vec![ZERO; dim.max(1)],
        }
    }

    /// Computational basis vector `|k⟩` of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut ket = Self::zero(dim);
        ket.amp[k] = ONE;
        ket
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn scale(&self, factor: Complex) -> Ket {
        Ket {
            amp: self.amp.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Ket {
        self.scale(Complex::new(factor, 0.0))
    }

    pub fn add(&self, other: &Ket) -> Result<Ket> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Ket) -> Result<Ket> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Ket, f: impl Fn(Complex, Complex) -> Complex) -> Result<Ket> {
        same_dim(self.dim(), other.dim())?;
        Ok(Ket {
            amp: self
                .amp
                .iter()
                .zip(&other.amp)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Unit vector along `self`, or `None` when the squared norm is at most
    /// [`ABSENT_WEIGHT`].
    pub fn normalized(&self) -> Option<Ket> {
        let n2 = self.norm_sqr();
        if n2 <= ABSENT_WEIGHT {
            return None;
        }
        Some(self.scale_real(1.0 / n2.sqrt()))
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &Ket) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }
}

fn same_dim(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner(a: &Ket, b: &Ket) -> Result<Complex> {
    same_dim(a.dim(), b.dim())?;
    Ok(a.amp.iter().zip(&b.amp).map(|(x, y)| x.conj() * y).sum())
}

/// Kronecker product; amplitude `(i, j)` lands at `i * b.dim() + j`.
pub fn tensor(a: &Ket, b: &Ket) -> Ket {
    let mut amp = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amp {
        for y in &b.amp {
            amp.push(x * y);
        }
    }
    Ket { amp }
}

/// A single-photon polarisation basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    /// `+`: the computational basis `{|0⟩, |1⟩}`.
    Rectilinear,
    /// `×`: the conjugate basis `{(|0⟩ ± |1⟩)/√2}`.
    Diagonal,
}

impl Basis {
    pub const ALL: [Basis; 2] = [Basis::Rectilinear, Basis::Diagonal];

    pub fn index(self) -> usize {
        match self {
            Basis::Rectilinear => 0,
            Basis::Diagonal => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Basis::Rectilinear => "+",
            Basis::Diagonal => "x",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

fn check_bit(bit: u8) -> Result<()> {
    if bit <= 1 {
        Ok(())
    } else {
        Err(Error::InvalidBit(bit))
    }
}

/// `|bit⟩_×`: `(|0⟩ + |1⟩)/√2` for 0, `(|0⟩ − |1⟩)/√2` for 1.
pub fn conjugate_basis_ket(bit: u8) -> Result<Ket> {
    basis_ket(Basis::Diagonal, bit)
}

pub fn basis_ket(basis: Basis, bit: u8) -> Result<Ket> {
    check_bit(bit)?;
    let amp = match (basis, bit) {
        (Basis::Rectilinear, 0) => [1.0, 0.0],
        (Basis::Rectilinear, _) => [0.0, 1.0],
        (Basis::Diagonal, 0) => [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        (Basis::Diagonal, _) => [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    };
    Ket::from_real(&amp)
}

/// Bell basis vector `|B_c⟩` in the rectilinear pair basis:
/// `B_0 = (|00⟩+|11⟩)/√2`, `B_1 = (|00⟩−|11⟩)/√2`,
/// `B_2 = (|01⟩+|10⟩)/√2`, `B_3 = (|01⟩−|10⟩)/√2`.
pub fn bell_ket(c: usize) -> Result<Ket> {
    let h = FRAC_1_SQRT_2;
    let amp = match c {
        0 => [h, 0.0, 0.0, h],
        1 => [h, 0.0, 0.0, -h],
        2 => [0.0, h, h, 0.0],
        3 => [0.0, h, -h, 0.0],
        _ => return Err(Error::InvalidBellIndex(c)),
    };
    Ket::from_real(&amp)
}

/// One measurement result on a photon pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairOutcome {
    pub alice: u8,
    pub bob: u8,
}

impl PairOutcome {
    /// Sampling order used everywhere: 00, 01, 10, 11.
    pub const ALL: [PairOutcome; 4] = [
        PairOutcome { alice: 0, bob: 0 },
        PairOutcome { alice: 0, bob: 1 },
        PairOutcome { alice: 1, bob: 0 },
        PairOutcome { alice: 1, bob: 1 },
    ];

    pub fn new(alice: u8, bob: u8) -> Result<Self> {
        check_bit(alice)?;
        check_bit(bob)?;
        Ok(Self { alice, bob })
    }

    pub fn index(self) -> usize {
        2 * self.alice as usize + self.bob as usize
    }

    pub fn agree(self) -> bool {
        self.alice == self.bob
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    rows: usize,
    cols: usize,
    entries: Vec<Complex>,
}

impl Operator {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != entries.len() {
            return Err(Error::OperatorShape {
                rows,
                cols,
                len: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            entries[i * n + i] = ONE;
        }
        Self {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn from_2x2(m: [[Complex; 2]; 2]) -> Self {
        Self {
            rows: 2,
            cols: 2,
            entries: vec![m[0][0], m[0][1], m[1][0], m[1][1]],
        }
    }

    pub fn diag(values: &[Complex]) -> Self {
        let n = values.len();
        let mut op = Self::identity(n);
        for (i, v) in values.iter().enumerate() {
            op.entries[i * n + i] = *v;
        }
        op
    }

    pub fn pauli_x() -> Self {
        Self::from_2x2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex {
        self.entries[r * self.cols + c]
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn transpose(&self) -> Operator {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c));
            }
        }
        Operator {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn dagger(&self) -> Operator {
        let mut t = self.transpose();
        t.entries.iter_mut().for_each(|z| *z = z.conj());
        t
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        same_dim(self.cols, other.rows)?;
        let mut entries = vec![ZERO; self.rows * other.cols];
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                for c in 0..other.cols {
                    entries[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        Operator::new(self.rows, other.cols, entries)
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        same_dim(self.cols, ket.dim())?;
        let amp = (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.get(r, c) * ket.amp[c])
                    .sum::<Complex>()
            })
            .collect();
        Ket::new(amp)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Operator) -> Operator {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut entries = vec![ZERO; rows * cols];
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.get(r1, c1);
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        let r = r1 * other.rows + r2;
                        let c = c1 * other.cols + c2;
                        entries[r * cols + c] = a * other.get(r2, c2);
                    }
                }
            }
        }
        Operator {
            rows,
            cols,
            entries,
        }
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        same_dim(self.rows, other.rows)?;
        same_dim(self.cols, other.cols)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> Result<f64> {
        let gram = self.dagger().matmul(self)?;
        gram.max_abs_diff(&Operator::identity(self.cols))
    }

    /// Eigenvalues of a 2×2 Hermitian matrix, largest first.
    pub fn hermitian_2x2_eigenvalues(&self) -> Result<(f64, f64)> {
        if self.rows != 2 || self.cols != 2 {
            return Err(Error::OperatorShape {
                rows: self.rows,
                cols: self.cols,
                len: self.entries.len(),
            });
        }
        let p = self.get(0, 0).re;
        let r = self.get(1, 1).re;
        let w = self.get(0, 1);
        let half_gap = (0.25 * (p - r) * (p - r) + w.norm_sqr()).sqrt();
        let mean = 0.5 * (p + r);
        Ok((mean + half_gap, mean - half_gap))
    }
}

fn probe_dim_of(psi: &Ket) -> Result<usize> {
    if !psi.dim().is_multiple_of(4) {
        return Err(Error::NotPairJoint(psi.dim()));
    }
    Ok(psi.dim() / 4)
}

/// Probe kets multiplying `|αβ⟩` when Alice's photon is expanded in
/// `alice` and Bob's in `bob`, in [`PairOutcome::ALL`] order.
pub fn pair_coefficients(psi: &Ket, alice: Basis, bob: Basis) -> Result<[Ket; 4]> {
    let d = probe_dim_of(psi)?;
    let mut out: [Ket; 4] = std::array::from_fn(|_| Ket::zero(d));
    for outcome in PairOutcome::ALL {
        let a = basis_ket(alice, outcome.alice)?;
        let b = basis_ket(bob, outcome.bob)?;
        let bra = tensor(&a, &b);
        let coeff = &mut out[outcome.index()];
        for p in 0..d {
            coeff.amp[p] = bra
                .amp
                .iter()
                .zip(&psi.amp[4 * p..4 * p + 4])
                .map(|(x, y)| x.conj() * y)
                .sum();
        }
    }
    Ok(out)
}

/// Probe kets multiplying `|00⟩_b, |01⟩_b, |10⟩_b, |11⟩_b` in `psi`.
pub fn pair_basis_coefficients(psi: &Ket, b: Basis) -> Result<[Ket; 4]> {
    pair_coefficients(psi, b, b)
}

/// Maps rectilinear pair coefficients to diagonal ones (and back: the map is
/// `H ⊗ H`, its own inverse).
pub fn rebase_coefficients(coeffs: &[Ket; 4]) -> Result<[Ket; 4]> {
    let d = coeffs[0].dim();
    for c in coeffs.iter() {
        same_dim(d, c.dim())?;
    }
    let sign = |bit_out: u8, bit_in: u8| if bit_out & bit_in == 1 { -1.0 } else { 1.0 };
    let mut out: [Ket; 4] = std::array::from_fn(|_| Ket::zero(d));
    for to in PairOutcome::ALL {
        let acc = &mut out[to.index()];
        for from in PairOutcome::ALL {
            let s = 0.5 * sign(to.alice, from.alice) * sign(to.bob, from.bob);
            for (a, c) in acc.amp.iter_mut().zip(&coeffs[from.index()].amp) {
                *a += c * s;
            }
        }
    }
    Ok(out)
}

/// Schmidt coefficients `(λ0, λ1)`, `λ0 ≥ λ1 ≥ 0`, of a normalized two-qubit
/// ket, from the closed-form singular values of its 2×2 amplitude matrix.
pub fn schmidt_coefficients(two_qubit: &Ket, tol: f64) -> Result<(f64, f64)> {
    same_dim(4, two_qubit.dim())?;
    let n2 = two_qubit.norm_sqr();
    if (n2 - 1.0).abs() > tol {
        return Err(Error::NotNormalized(n2));
    }
    let [a, b, c, d] = [
        two_qubit.amp[0],
        two_qubit.amp[1],
        two_qubit.amp[2],
        two_qubit.amp[3],
    ];
    // M†M = [[p, w], [w*, r]]; its eigenvalues are the squared singular values.
    let p = a.norm_sqr() + c.norm_sqr();
    let r = b.norm_sqr() + d.norm_sqr();
    let w = a.conj() * b + c.conj() * d;
    let half_gap = (0.25 * (p - r) * (p - r) + w.norm_sqr()).sqrt();
    let lambda0 = (0.5 * (p + r) + half_gap).sqrt();
    if lambda0 == 0.0 {
        return Err(Error::ZeroVector);
    }
    // |det M| / λ0 stays accurate both near product and near maximally
    // entangled states, unlike the difference of squares.
    let lambda1 = ((a * d - b * c).norm() / lambda0).min(lambda0);
    Ok((lambda0, lambda1))
}

/// Result of projecting the pair onto one outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Collapse {
    pub prob: f64,
    /// Normalized post-measurement probe; `None` when `prob ≤ ABSENT_WEIGHT`.
    pub probe: Option<Ket>,
}

/// Measures both photons in `b` and reports the probability of `outcome`
/// together with the collapsed probe.
pub fn project_outcome(psi: &Ket, b: Basis, outcome: PairOutcome) -> Result<Collapse> {
    project_outcome_in(psi, b, b, outcome)
}

/// Like [`project_outcome`] but with each photon measured in its own basis.
pub fn project_outcome_in(
    psi: &Ket,
    alice: Basis,
    bob: Basis,
    outcome: PairOutcome,
) -> Result<Collapse> {
    let coeffs = pair_coefficients(psi, alice, bob)?;
    Ok(collapse_from(&coeffs[outcome.index()]))
}

pub(crate) fn collapse_from(coeff: &Ket) -> Collapse {
    let prob = coeff.norm_sqr();
    Collapse {
        prob,
        probe: coeff.normalized(),
    }
}
