//! Hilbert–Schmidt standard form of a block algebra with a faithful state.
//!
//! `L²(M, ω)` is realized as block matrices with `(ξ|η) = Σ Tr(ξ_k* η_k)`,
//! the cone `P` as blockwise positive matrices, `J ξ = ξ*` and
//! `ξ_ω = ρ^{1/2}`. Every modular quantity `ρ^a x ρ^b` is evaluated entrywise
//! in the eigenbasis of ρ, which keeps badly conditioned Gibbs states usable.

use num_complex::Complex64;

use crate::algebra::{AlgebraDescriptor, Element, State};
use crate::error::{Error, Result};
use crate::numeric::{c, cr, herm_eig, hermitian_part, kron, CMatrix, CVector};

/// A vector of `L²(M, ω)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StdVector(Element);

impl StdVector {
    pub fn from_element(x: Element) -> Self {
        StdVector(x)
    }

    pub fn from_vector(alg: &AlgebraDescriptor, v: &[Complex64]) -> Result<Self> {
        Ok(StdVector(Element::from_vector(alg, v)?))
    }

    pub fn zeros(alg: &AlgebraDescriptor) -> Self {
        StdVector(Element::zeros(alg))
    }

    pub fn as_element(&self) -> &Element {
        &self.0
    }

    pub fn into_element(self) -> Element {
        self.0
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        self.0.algebra()
    }

    pub fn blocks(&self) -> &[CMatrix] {
        self.0.blocks()
    }

    pub fn to_vector(&self) -> CVector {
        self.0.to_vector()
    }

    pub fn inner(&self, other: &StdVector) -> Complex64 {
        self.blocks()
            .iter()
            .zip(other.blocks())
            .map(|(a, b)| crate::numeric::hs_inner(a, b))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.hs_norm()
    }

    pub fn add(&self, other: &StdVector) -> StdVector {
        StdVector(self.0.add(&other.0).expect("same space"))
    }

    pub fn sub(&self, other: &StdVector) -> StdVector {
        StdVector(self.0.sub(&other.0).expect("same space"))
    }

    pub fn scale(&self, s: f64) -> StdVector {
        StdVector(self.0.scale(cr(s)))
    }

    /// Modular conjugation `J ξ = ξ*`.
    pub fn j(&self) -> StdVector {
        StdVector(self.0.adjoint())
    }

    /// Relative distance from the real subspace `{Jξ = ξ}`.
    pub fn j_real_residual(&self) -> f64 {
        self.0.hermiticity_residual()
    }

    /// Smallest block eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks()
            .iter()
            .map(|b| herm_eig(b).map(|e| e.min()).unwrap_or(f64::NAN))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `(M, L²(M,ω), P, J)` for a block algebra and a faithful state.
#[derive(Clone, Debug)]
pub struct StandardSpace {
    state: State,
    xi_omega: StdVector,
    log_lambda: Vec<Vec<f64>>,
    rho_quarter: Element,
    rho_mquarter: Element,
    rho_half: Element,
    rho_mhalf: Element,
}

pub fn gns(state: &State) -> Result<StandardSpace> {
    StandardSpace::new(state.clone())
}

impl StandardSpace {
    pub fn new(state: State) -> Result<Self> {
        let log_lambda: Vec<Vec<f64>> = state
            .spectra()
            .iter()
            .map(|e| e.values.iter().map(|v| v.ln()).collect())
            .collect();
        if log_lambda.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NotFaithful {
                min: state.min_eigenvalue(),
                max: state.max_eigenvalue(),
            });
        }
        let power = |a: f64| -> Result<Element> {
            let blocks = state
                .spectra()
                .iter()
                .map(|e| e.map(|x| cr(x.powf(a))))
                .collect::<Result<Vec<_>>>()?;
            Element::new(state.algebra(), blocks)
        };
        let rho_half = power(0.5)?;
        Ok(StandardSpace {
            xi_omega: StdVector(rho_half.clone()),
            rho_quarter: power(0.25)?,
            rho_mquarter: power(-0.25)?,
            rho_mhalf: power(-0.5)?,
            rho_half,
            log_lambda,
            state,
        })
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        self.state.algebra()
    }

    pub fn dim(&self) -> usize {
        self.algebra().total_dim()
    }

    pub fn xi_omega(&self) -> &StdVector {
        &self.xi_omega
    }

    pub fn rho_power_cached(&self, which: f64) -> Option<&Element> {
        match which {
            x if x == 0.25 => Some(&self.rho_quarter),
            x if x == -0.25 => Some(&self.rho_mquarter),
            x if x == 0.5 => Some(&self.rho_half),
            x if x == -0.5 => Some(&self.rho_mhalf),
            _ => None,
        }
    }

    /// `ln λ` per block, ascending.
    pub fn log_eigenvalues(&self) -> &[Vec<f64>] {
        &self.log_lambda
    }

    /// Condition number `λ_max/λ_min` of ρ.
    pub fn condition(&self) -> f64 {
        self.state.max_eigenvalue() / self.state.min_eigenvalue()
    }

    /// Rotate into the eigenbasis of ρ: `x ↦ U* x U` blockwise.
    pub fn to_eigenbasis(&self, x: &Element) -> Vec<CMatrix> {
        x.blocks()
            .iter()
            .zip(self.state.spectra())
            .map(|(b, e)| e.vectors.adjoint() * b * &e.vectors)
            .collect()
    }

    pub fn from_eigenbasis(&self, blocks: Vec<CMatrix>) -> Element {
        let out = blocks
            .into_iter()
            .zip(self.state.spectra())
            .map(|(b, e)| &e.vectors * b * e.vectors.adjoint())
            .collect();
        Element::new(self.algebra(), out).expect("shapes preserved")
    }

    /// Scale eigenbasis entries: `y_jk ↦ exp(a ln λ_j + b ln λ_k) y_jk`.
    pub fn scale_eigen(&self, blocks: &mut [CMatrix], a: Complex64, b: Complex64) {
        for (y, ll) in blocks.iter_mut().zip(&self.log_lambda) {
            let n = ll.len();
            for k in 0..n {
                for j in 0..n {
                    y[(j, k)] *= (a * ll[j] + b * ll[k]).exp();
                }
            }
        }
    }

    /// `ρ^a x ρ^b` for complex `a`, `b`.
    pub fn sandwich(&self, x: &Element, a: Complex64, b: Complex64) -> Element {
        if self.state.is_trace() {
            // ρ_k = w_k I: only a scalar per block
            let blocks = x
                .blocks()
                .iter()
                .zip(&self.log_lambda)
                .map(|(y, ll)| y * ((a + b) * ll[0]).exp())
                .collect();
            return Element::new(self.algebra(), blocks).expect("shapes preserved");
        }
        let mut y = self.to_eigenbasis(x);
        self.scale_eigen(&mut y, a, b);
        self.from_eigenbasis(y)
    }

    /// `Δ^α ξ = ρ^α ξ ρ^{−α}`.
    pub fn modular_power(&self, alpha: Complex64, xi: &StdVector) -> StdVector {
        StdVector(self.sandwich(&xi.0, alpha, -alpha))
    }

    /// `σ_z(x) = ρ^{iz} x ρ^{−iz}`, `z` complex.
    pub fn modular_flow(&self, z: Complex64, x: &Element) -> Element {
        let iz = c(0.0, 1.0) * z;
        self.sandwich(x, iz, -iz)
    }

    /// `ω(x)`.
    pub fn omega(&self, x: &Element) -> Complex64 {
        self.state.value(x).expect("same algebra")
    }

    /// `|ω(a σ_{−i}(b)) − ω(ba)|`, evaluated in the eigenbasis of ρ.
    pub fn kms_residual(&self, a: &Element, b: &Element) -> f64 {
        let ae = self.to_eigenbasis(a);
        let mut be = self.to_eigenbasis(b);
        let lhs_terms = {
            // σ_{−i}(b) = ρ b ρ^{−1}
            let mut s = be.clone();
            self.scale_eigen(&mut s, cr(1.0), cr(-1.0));
            weighted_trace(&self.log_lambda, &ae, &s)
        };
        let rhs_terms = weighted_trace(&self.log_lambda, &be, &ae);
        be.clear();
        (lhs_terms - rhs_terms).norm()
    }

    /// `x ξ`.
    pub fn left(&self, x: &Element, xi: &StdVector) -> StdVector {
        StdVector(x.mul(&xi.0).expect("same algebra"))
    }

    /// `ξ x`, which equals `J x* J ξ`.
    pub fn right(&self, xi: &StdVector, x: &Element) -> StdVector {
        StdVector(xi.0.mul(x).expect("same algebra"))
    }

    /// `x ξ_ω`.
    pub fn cyclic(&self, x: &Element) -> StdVector {
        self.left(x, &self.xi_omega)
    }

    /// `i_ω(x) = ρ^{1/4} x ρ^{1/4}`.
    pub fn embed_i(&self, x: &Element) -> StdVector {
        StdVector(self.sandwich(x, cr(0.25), cr(0.25)))
    }

    /// `ρ^{−1/4} ξ ρ^{−1/4}`.
    pub fn embed_inverse(&self, xi: &StdVector) -> Element {
        self.sandwich(&xi.0, cr(-0.25), cr(-0.25))
    }

    /// Split a J-real vector into orthogonal positive and negative parts.
    pub fn positive_parts(&self, xi: &StdVector) -> Result<(StdVector, StdVector)> {
        let res = xi.j_real_residual();
        if res > 1e-10 {
            return Err(Error::NotJReal(res));
        }
        let mut plus = Vec::with_capacity(xi.blocks().len());
        let mut minus = Vec::with_capacity(xi.blocks().len());
        for b in xi.blocks() {
            let e = herm_eig(b)?;
            plus.push(e.map(|x| cr(x.max(0.0)))?);
            minus.push(e.map(|x| cr((-x).max(0.0)))?);
        }
        Ok((
            StdVector(Element::new(self.algebra(), plus)?),
            StdVector(Element::new(self.algebra(), minus)?),
        ))
    }

    /// Projection of a J-real `ξ` onto `{ξ ≤ ξ_ω}`: `ξ_ω − (ξ_ω − ξ)_+`.
    pub fn wedge(&self, xi: &StdVector) -> Result<StdVector> {
        let d = self.xi_omega.sub(xi);
        let (dp, _) = self.positive_parts(&d)?;
        Ok(self.xi_omega.sub(&dp))
    }

    /// Relative cone defect: `max(0, −λ_min(ξ))/‖ξ‖` plus the non-Hermitian part.
    pub fn cone_defect(&self, xi: &StdVector) -> f64 {
        let n = xi.norm();
        if n == 0.0 {
            return 0.0;
        }
        let h = StdVector(xi.0.map_blocks(hermitian_part));
        let anti = xi.sub(&h).norm();
        (-h.min_eigenvalue()).max(0.0) / n + anti / n
    }

    /// Permutation `P` with `(J v)[i] = conj(v[P[i]])` in the vectorized basis.
    pub fn j_permutation(&self) -> Vec<usize> {
        let alg = self.algebra();
        let mut p = vec![0; alg.total_dim()];
        for (k, (&n, off)) in alg.block_dims().iter().zip(alg.block_offsets()).enumerate() {
            let _ = k;
            for i in 0..n {
                for j in 0..n {
                    p[off + j * n + i] = off + i * n + j;
                }
            }
        }
        p
    }

    /// `J M J` for a superoperator `M` in the vectorized basis.
    pub fn j_conjugate(&self, m: &CMatrix) -> CMatrix {
        let p = self.j_permutation();
        CMatrix::from_fn(m.nrows(), m.ncols(), |r, s| m[(p[r], p[s])].conj())
    }

    /// `W = ⊕_k (Ū_k ⊗ U_k)`: eigenbasis coordinates to original coordinates.
    pub fn eigen_unitary(&self) -> CMatrix {
        let d = self.dim();
        let mut w = CMatrix::zeros(d, d);
        for (e, off) in self.state.spectra().iter().zip(self.algebra().block_offsets()) {
            let n = e.dim();
            let blk = kron(&e.vectors.map(|z| z.conj()), &e.vectors);
            w.view_mut((off, off), (n * n, n * n)).copy_from(&blk);
        }
        w
    }

    /// Eigenbasis scaling `(λ_j λ_k)^{1/4}` of `i_ω` per vectorized index.
    pub fn embed_weights(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.dim());
        for ll in &self.log_lambda {
            let n = ll.len();
            for k in 0..n {
                for j in 0..n {
                    w.push((0.25 * (ll[j] + ll[k])).exp());
                }
            }
        }
        w
    }
}

/// `Σ_k Tr(ρ_k x_k y_k)` in eigen coordinates.
fn weighted_trace(log_lambda: &[Vec<f64>], x: &[CMatrix], y: &[CMatrix]) -> Complex64 {
    let mut acc = cr(0.0);
    for ((ll, xb), yb) in log_lambda.iter().zip(x).zip(y) {
        let n = ll.len();
        for j in 0..n {
            let lj = ll[j].exp();
            for k in 0..n {
                acc += lj * xb[(j, k)] * yb[(k, j)];
            }
        }
    }
    acc
}
