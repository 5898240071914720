//! Random kets, unitaries and attacks for property checks.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::attack_model::EveSourceState;
use crate::qmath::{inner, Complex, Ket, Operator};

fn gaussian(rng: &mut impl Rng) -> Complex {
    Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Complex Gaussian ket, not normalized.
pub fn random_ket(rng: &mut impl Rng, dim: usize) -> Ket {
    Ket::new((0..dim.max(1)).map(|_| gaussian(rng)).collect()).expect("dim >= 1")
}

pub fn random_unit_ket(rng: &mut impl Rng, dim: usize) -> Ket {
    loop {
        if let Some(k) = random_ket(rng, dim).normalized() {
            return k;
        }
    }
}

/// Complex Gaussian matrix with entries of any size, not unitary.
pub fn random_operator(rng: &mut impl Rng, n: usize) -> Operator {
    Operator::new(n, n, (0..n * n).map(|_| gaussian(rng)).collect()).expect("square")
}

/// Unitary from Gram–Schmidt on Gaussian columns.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> Operator {
    let mut cols: Vec<Ket> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = random_ket(rng, n);
        for q in &cols {
            let proj = inner(q, &v).expect("same dim");
            v = v.sub(&q.scale(proj)).expect("same dim");
        }
        if let Some(q) = v.normalized() {
            cols.push(q);
        }
    }
    let mut entries = vec![Complex::new(0.0, 0.0); n * n];
    for (c, q) in cols.iter().enumerate() {
        for (r, a) in q.amplitudes().iter().enumerate() {
            entries[r * n + c] = *a;
        }
    }
    Operator::new(n, n, entries).expect("square")
}

fn real_inner(a: &Ket, b: &Ket) -> f64 {
    inner(a, b).expect("same dim").re
}

/// Multiplies `v` by the phase that makes `⟨anchor|v⟩` purely imaginary.
fn rotate_to_imaginary(anchor: &Ket, v: &Ket, rng: &mut impl Rng) -> Ket {
    let o = inner(anchor, v).expect("same dim");
    if o.norm() == 0.0 {
        return v.clone();
    }
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    // e^{iθ}·o = ±i|o|
    let phase = Complex::new(0.0, sign) * o.conj() / o.norm();
    v.scale(phase)
}

/// Removes from `v` its projection, under the real inner product
/// `Re⟨·|·⟩`, onto the real span of `basis`.
fn remove_real_span(v: &Ket, basis: &[&Ket]) -> Ket {
    let mut ortho: Vec<Ket> = Vec::new();
    for b in basis {
        let mut w = (*b).clone();
        for q in &ortho {
            w = w.sub(&q.scale_real(real_inner(q, &w))).expect("same dim");
        }
        let n = w.norm();
        if n > 1e-12 {
            ortho.push(w.scale_real(1.0 / n));
        }
    }
    let mut out = v.clone();
    for q in &ortho {
        out = out
            .sub(&q.scale_real(real_inner(q, &out)))
            .expect("same dim");
    }
    out
}

/// A random attack satisfying the four symmetry constraints
/// `Re⟨E0|E1⟩ = Re⟨E2|E3⟩ = Re⟨E0|E2⟩ = Re⟨E1|E3⟩ = 0`.
///
/// `E1` and `E2` are phase-rotated against `E0`, `E3` has its real-span
/// component along `E1, E2` removed, and the weights `x, y, z, t` are then
/// drawn from a flat Dirichlet before renormalizing.
pub fn random_symmetric_state(rng: &mut impl Rng, probe_dim: usize) -> EveSourceState {
    loop {
        let e0 = random_ket(rng, probe_dim);
        let e1 = rotate_to_imaginary(&e0, &random_ket(rng, probe_dim), rng);
        let e2 = rotate_to_imaginary(&e0, &random_ket(rng, probe_dim), rng);
        let e3 = remove_real_span(&random_ket(rng, probe_dim), &[&e1, &e2]);
        if let Some(s) = reweight([e0, e1, e2, e3], rng) {
            return s;
        }
    }
}

/// A random attack whose probe kets are mutually orthogonal, so every
/// overlap vanishes and the closed-form expressions are exact.
pub fn random_orthogonal_state(rng: &mut impl Rng) -> EveSourceState {
    let u = random_unitary(rng, 4);
    loop {
        let cols = std::array::from_fn(|c| u.apply(&Ket::basis(4, c)).expect("4x4"));
        if let Some(s) = reweight(cols, rng) {
            return s;
        }
    }
}

fn reweight(dirs: [Ket; 4], rng: &mut impl Rng) -> Option<EveSourceState> {
    let w: [f64; 4] = std::array::from_fn(|_| Exp1.sample(rng));
    let mut probes = dirs.clone();
    for (p, (d, wc)) in probes.iter_mut().zip(dirs.iter().zip(w)) {
        *p = match d.normalized() {
            Some(unit) => unit.scale_real(wc.sqrt()),
            None => Ket::zero(d.dim()),
        };
    }
    let total: f64 = probes.iter().map(Ket::norm_sqr).sum();
    if total <= 1e-12 {
        return None;
    }
    let probes = probes.map(|p| p.scale_real(1.0 / total.sqrt()));
    EveSourceState::new(probes).ok()
}
