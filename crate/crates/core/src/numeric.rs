//! Dense complex linear algebra shared by every other module.
//!
//! Conventions frozen here:
//! - vectorization is column stacking, which is also nalgebra's storage order;
//! - `kron(a, b)[(p*nb + i, q*nb + j)] = a[(p,q)] * b[(i,j)]`;
//! - eigenvalues come back in ascending order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub tol_eig: f64,
    pub tol_psd: f64,
    pub tol_prop: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            tol_eig: 1e-12,
            tol_psd: 1e-10,
            tol_prop: 1e-8,
        }
    }
}

impl TolerancePolicy {
    pub fn new(tol_eig: f64, tol_psd: f64, tol_prop: f64) -> Result<Self> {
        if !(0.0 < tol_eig && tol_eig <= tol_psd && tol_psd <= tol_prop) {
            return Err(Error::Precondition(format!(
                "tolerances must satisfy 0 < tol_eig <= tol_psd <= tol_prop, got {tol_eig:e}, {tol_psd:e}, {tol_prop:e}"
            )));
        }
        Ok(TolerancePolicy {
            tol_eig,
            tol_psd,
            tol_prop,
        })
    }

    /// Override psd/prop tolerances, keeping the ordering invariant.
    pub fn with_overrides(self, tol_psd: Option<f64>, tol_prop: Option<f64>) -> Result<Self> {
        let psd = tol_psd.unwrap_or(self.tol_psd);
        let prop = tol_prop.unwrap_or(self.tol_prop).max(psd);
        TolerancePolicy::new(self.tol_eig.min(psd), psd, prop)
    }
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Largest absolute eigenvalue, i.e. the operator norm.
    pub fn norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// `U f(Λ) U*`. Fails if `f` is not finite somewhere on the spectrum.
    pub fn map<F: Fn(f64) -> Complex64>(&self, f: F) -> Result<CMatrix> {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            let v = f(lam);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::UndefinedOnSpectrum(lam));
            }
            for i in 0..n {
                scaled[(i, k)] *= v;
            }
        }
        Ok(scaled * self.vectors.adjoint())
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(cr).expect("identity is finite")
    }
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Relative anti-Hermitian residual `‖A − A*‖_F / ‖A‖_F` (0 for the zero matrix).
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    let n = a.norm();
    if n == 0.0 {
        return 0.0;
    }
    (a - a.adjoint()).norm() / n
}

/// Hermitian eigendecomposition, ascending. The input is symmetrized first.
pub fn herm_eig(a: &CMatrix) -> Result<HermEig> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "herm_eig needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if !is_finite(a) {
        return Err(Error::NonFinite("herm_eig input"));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(HermEig {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let h = hermitian_part(a);
    let eig = h
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(Error::NoConvergence(f64::NAN))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap()
            .then(i.cmp(&j))
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    if values.iter().any(|v| !v.is_finite()) {
        let res = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        return Err(Error::NoConvergence(res));
    }
    Ok(HermEig { values, vectors })
}

/// Eigenvalues only (still symmetrizes).
pub fn herm_eigvals(a: &CMatrix) -> Result<Vec<f64>> {
    Ok(herm_eig(a)?.values)
}

pub fn min_eig(a: &CMatrix) -> Result<f64> {
    Ok(herm_eig(a)?.min())
}

/// `U f(Λ) U*` for Hermitian `A`.
pub fn mat_fn<F: Fn(f64) -> Complex64>(a: &CMatrix, f: F) -> Result<CMatrix> {
    herm_eig(a)?.map(f)
}

/// Column stacking: `[[a,c],[b,d]] -> (a,b,c,d)`.
pub fn vectorize(x: &CMatrix) -> CVector {
    CVector::from_column_slice(x.as_slice())
}

pub fn devectorize(v: &[Complex64], rows: usize, cols: usize) -> Result<CMatrix> {
    if v.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "cannot reshape length {} into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(CMatrix::from_column_slice(rows, cols, v))
}

/// Hilbert–Schmidt inner product `Tr(X* Y)`.
pub fn hs_inner(x: &CMatrix, y: &CMatrix) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Superoperator of `X ↦ A X` for `X` with `cols` columns.
pub fn left_superop(a: &CMatrix, cols: usize) -> CMatrix {
    kron(&CMatrix::identity(cols, cols), a)
}

/// Superoperator of `X ↦ X B` for `X` with `rows` rows.
pub fn right_superop(b: &CMatrix, rows: usize) -> CMatrix {
    kron(&b.transpose(), &CMatrix::identity(rows, rows))
}

/// Largest singular value.
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |m, &s| m.max(s))
}

/// Exact complex power of a positive scalar, principal branch.
#[inline]
pub fn pos_pow(x: f64, z: Complex64) -> Complex64 {
    (z * x.ln()).exp()
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton iteration on
/// `P_q` from the Tricomi initial guesses. Nodes come out ascending.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; q];
    let mut w = vec![0.0; q];
    let nf = q as f64;
    for i in 0..q.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..q {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[q - 1 - i] = z;
        w[i] = wi;
        w[q - 1 - i] = wi;
    }
    if q % 2 == 1 {
        x[q / 2] = 0.0;
    }
    (x, w)
}
