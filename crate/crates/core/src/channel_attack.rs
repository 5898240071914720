//! Channel-only eavesdropping: Eve couples a probe to Bob's photon after an
//! honest EPR source. This is the weaker attack class; the witnesses here
//! show why a source-controlling Eve is strictly more general.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;

use crate::error::{Error, Result};
use crate::qmath::{bell_ket, inner, schmidt_coefficients, Complex, Ket, Operator, DEFAULT_TOL};
use crate::sampling;

/// The four probe kets `|F_αβ⟩` of the map
/// `|F⟩|α⟩ ↦ |F_α0⟩|0⟩ + |F_α1⟩|1⟩` on Bob's photon.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelAttack {
    /// `[F_00, F_01, F_10, F_11]`.
    branches: [Ket; 4],
}

impl ChannelAttack {
    pub fn new(branches: [Ket; 4]) -> Result<Self> {
        let d = branches[0].dim();
        for b in &branches[1..] {
            if b.dim() != d {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: b.dim(),
                });
            }
        }
        Ok(Self { branches })
    }

    /// Decomposes a unitary on `probe ⊗ Bob` (probe-major, dim `2d`) with
    /// the probe starting in `initial`.
    pub fn from_unitary(unitary: &Operator, initial: &Ket) -> Result<Self> {
        let d = initial.dim();
        if unitary.rows() != 2 * d || unitary.cols() != 2 * d {
            return Err(Error::DimensionMismatch {
                left: unitary.rows(),
                right: 2 * d,
            });
        }
        let mut branches: [Ket; 4] = std::array::from_fn(|_| Ket::zero(d));
        for input in 0..2u8 {
            let photon = Ket::basis(2, input as usize);
            let out = unitary.apply(&crate::qmath::tensor(initial, &photon))?;
            for output in 0..2usize {
                let amp: Vec<Complex> = (0..d).map(|p| out.amplitudes()[2 * p + output]).collect();
                branches[2 * input as usize + output] = Ket::new(amp)?;
            }
        }
        Self::new(branches)
    }

    pub fn probe_dim(&self) -> usize {
        self.branches[0].dim()
    }

    pub fn branch(&self, input: u8, output: u8) -> &Ket {
        &self.branches[2 * input as usize + output as usize]
    }
}

/// Residuals of the three unitarity conditions
/// `⟨F00|F00⟩+⟨F01|F01⟩ = 1`, `⟨F10|F10⟩+⟨F11|F11⟩ = 1`,
/// `⟨F00|F10⟩+⟨F01|F11⟩ = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitarityCheck {
    pub residuals: [f64; 3],
    pub valid: bool,
}

pub fn validate_unitarity(f: &ChannelAttack, tol: f64) -> UnitarityCheck {
    let ip = |a: &Ket, b: &Ket| inner(a, b).expect("equal dims");
    let [f00, f01, f10, f11] = &f.branches;
    let residuals = [
        (f00.norm_sqr() + f01.norm_sqr() - 1.0).abs(),
        (f10.norm_sqr() + f11.norm_sqr() - 1.0).abs(),
        (ip(f00, f10) + ip(f01, f11)).norm(),
    ];
    UnitarityCheck {
        residuals,
        valid: residuals.iter().all(|r| *r <= tol),
    }
}

/// Joint probe ⊗ pair state `Σ_αβ |F_αβ⟩/√2 ⊗ |αβ⟩` after attacking Bob's
/// half of `|B_0⟩`.
pub fn apply_channel_attack(f: &ChannelAttack) -> Result<Ket> {
    let check = validate_unitarity(f, DEFAULT_TOL);
    if !check.valid {
        return Err(Error::NotUnitary(check.residuals));
    }
    let d = f.probe_dim();
    let mut amp = vec![Complex::new(0.0, 0.0); 4 * d];
    for (pair, branch) in f.branches.iter().enumerate() {
        for (p, a) in branch.amplitudes().iter().enumerate() {
            amp[4 * p + pair] = a * FRAC_1_SQRT_2;
        }
    }
    Ket::new(amp)
}

/// Alice's reduced density matrix, tracing out the probe and Bob.
pub fn alice_marginal(joint: &Ket) -> Result<Operator> {
    if !joint.dim().is_multiple_of(4) {
        return Err(Error::NotPairJoint(joint.dim()));
    }
    let amp = joint.amplitudes();
    let mut rho = [[Complex::new(0.0, 0.0); 2]; 2];
    for block in amp.chunks_exact(4) {
        for (a, row) in rho.iter_mut().enumerate() {
            for (a2, entry) in row.iter_mut().enumerate() {
                for b in 0..2 {
                    *entry += block[2 * a + b] * block[2 * a2 + b].conj();
                }
            }
        }
    }
    Ok(Operator::from_2x2(rho))
}

/// `‖(A ⊗ I)(|00⟩+|11⟩) − (I ⊗ Aᵀ)(|00⟩+|11⟩)‖`.
pub fn remote_transpose_residual(a: &Operator) -> Result<f64> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::OperatorShape {
            rows: a.rows(),
            cols: a.cols(),
            len: a.entries().len(),
        });
    }
    let phi = Ket::from_real(&[1.0, 0.0, 0.0, 1.0])?;
    let id = Operator::identity(2);
    let left = a.kron(&id).apply(&phi)?;
    let right = id.kron(&a.transpose()).apply(&phi)?;
    left.distance(&right)
}

/// How far the normalized `(A ⊗ B)|B_0⟩` is from maximally entangled,
/// `1/√2 − λ1`. Every `(I ⊗ C)|B_0⟩` with unitary `C` has gap 0, so a
/// positive gap means no unitary `C` reproduces the state.
pub fn unitary_remote_pair_gap(a: &Operator, b: &Operator) -> Result<f64> {
    let v = a.kron(b).apply(&bell_ket(0)?)?;
    let unit = v.normalized().ok_or(Error::ZeroVector)?;
    let (_, lambda1) = schmidt_coefficients(&unit, DEFAULT_TOL)?;
    Ok((FRAC_1_SQRT_2 - lambda1).max(0.0))
}

/// Channel attack from a random 4×4 unitary on a qubit probe and a random
/// initial probe state.
pub fn random_channel_attack(rng: &mut impl Rng) -> ChannelAttack {
    let u = sampling::random_unitary(rng, 4);
    let initial = sampling::random_unit_ket(rng, 2);
    ChannelAttack::from_unitary(&u, &initial).expect("dims match")
}
