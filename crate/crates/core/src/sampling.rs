//! Seeded random ensembles. Every randomized check draws from its own
//! ChaCha stream so results do not depend on the order checks are run in.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numeric::{c, cr, hermitian_part, CMatrix};

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stable 64-bit stream id for a check name (FNV-1a).
pub fn stream_id(name: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Ginibre matrix with entries of unit variance.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| c(s * normal(rng), s * normal(rng)))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<num_complex::Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DVector::from_fn(n, |_, _| c(s * normal(rng), s * normal(rng)))
}

/// GUE-type Hermitian matrix.
pub fn gue<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    hermitian_part(&gaussian_matrix(rng, n, n))
}

/// Haar unitary via QR of a Ginibre matrix with the diagonal phase fix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = gaussian_matrix(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { cr(1.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random positive semidefinite matrix; with probability 1/4 it has rank one
/// so cone extreme rays get exercised.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let k = if rng.random::<f64>() < 0.25 { 1 } else { n };
    let g = gaussian_matrix(rng, n, k);
    &g * g.adjoint()
}

/// Random element of the operator interval `[0, 1]`.
pub fn random_unit_interval<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let u = haar_unitary(rng, n);
    let d = CMatrix::from_diagonal(&DVector::from_fn(n, |_, _| cr(rng.random::<f64>())));
    &u * d * u.adjoint()
}

/// Random full-rank density matrix. Eigenvalues are bounded below by a
/// `floor` fraction of the mean so the state stays comfortably faithful.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize, floor: f64) -> CMatrix {
    let u = haar_unitary(rng, n);
    let mut w: Vec<f64> = (0..n).map(|_| floor + rng.random::<f64>()).collect();
    let s: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= s;
    }
    let d = CMatrix::from_diagonal(&DVector::from_iterator(n, w.into_iter().map(cr)));
    &u * d * u.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = rng_for(1, 3).random();
        let b: f64 = rng_for(1, 3).random();
        let d: f64 = rng_for(1, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, d);
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = rng_for(2, 0);
        let u = haar_unitary(&mut rng, 5);
        assert!((u.adjoint() * &u - CMatrix::identity(5, 5)).norm() < 1e-13);
    }

    #[test]
    fn density_is_normalized() {
        let mut rng = rng_for(2, 1);
        let r = random_density(&mut rng, 4, 0.1);
        assert!((r.trace() - cr(1.0)).norm() < 1e-14);
    }
}
