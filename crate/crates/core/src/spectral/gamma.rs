//! Numerical audit of the unitary-splitting argument that turns a uniform
//! bound on unitary orbits into a Poincaré inequality.

use rand::Rng;
use serde::Serialize;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::forms::FormOperator;
use crate::numeric::{cr, herm_eig, CMatrix};
use crate::sampling::haar_unitary;
use crate::standard_form::StdVector;

#[derive(Clone, Debug, Serialize)]
pub struct GammaReport {
    /// `max ‖u±*u± − 1‖`.
    pub unitary_residual: f64,
    /// `|E[u±ξ] − E[yξ] − E[√(1−y²)ξ]|`, relative to `max(1, E[u±ξ])`.
    pub splitting_residual: f64,
    pub energy_y: f64,
    pub energy_root: f64,
    /// `E[√(1−y²)ξ] ≤ E[yξ]` up to `tol`.
    pub contraction_holds: bool,
    pub variance: f64,
    pub epsilon: f64,
    /// `‖yξ − τ(y)ξ‖² ≤ 8ε⁻¹E[yξ]` up to `tol`.
    pub chain_holds: bool,
}

fn centered_sq(form: &FormOperator, x: &Element) -> f64 {
    let sp = form.space();
    let xi = sp.cyclic(x);
    let m = sp.xi_omega().inner(&xi);
    let c = xi.sub(&StdVector::from_element(sp.xi_omega().as_element().scale(m)));
    c.norm().powi(2)
}

fn unitary_energy_ratio(form: &FormOperator, u: &Element) -> Option<f64> {
    let v = centered_sq(form, u);
    (v > 1e-12).then(|| form.evaluate(&form.space().cyclic(u)) / v)
}

/// `inf E[uξ]/‖uξ − τ(u)ξ‖²` over Haar-sampled unitaries (an upper bound
/// for the true infimum).
pub fn unitary_orbit_epsilon<R: Rng + ?Sized>(form: &FormOperator, rng: &mut R, samples: usize) -> f64 {
    let alg = form.space().algebra();
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let blocks = alg.block_dims().iter().map(|&n| haar_unitary(rng, n)).collect();
        let u = Element::new(alg, blocks).expect("shapes");
        if let Some(r) = unitary_energy_ratio(form, &u) {
            best = best.min(r);
        }
    }
    best
}

pub fn gamma_identities(form: &FormOperator, y: &Element, epsilon: f64, tol: f64) -> Result<GammaReport> {
    let h = y.hermiticity_residual();
    if h > 1e-12 {
        return Err(Error::NotHermitian(h));
    }
    if y.norm() > std::f64::consts::FRAC_1_SQRT_2 * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("need ‖y‖ ≤ 1/√2, got {}", y.norm())));
    }
    let root_blocks = y
        .blocks()
        .iter()
        .map(|b| herm_eig(b)?.map(|x| cr((1.0 - x * x).max(0.0).sqrt())))
        .collect::<Result<Vec<CMatrix>>>()?;
    let root = Element::new(y.algebra(), root_blocks)?;
    let i_root = root.scale(num_complex::Complex64::i());
    let sp = form.space();
    let e = |x: &Element| form.evaluate(&sp.cyclic(x));
    let energy_y = e(y);
    let energy_root = e(&root);
    let one = Element::identity(y.algebra());
    let mut unitary_residual = 0.0f64;
    let mut splitting_residual = 0.0f64;
    for u in [y.add(&i_root)?, y.sub(&i_root)?] {
        let uu = u.adjoint().mul(&u)?.sub(&one)?;
        unitary_residual = unitary_residual.max(uu.norm());
        let eu = e(&u);
        splitting_residual = splitting_residual.max((eu - energy_y - energy_root).abs() / eu.max(1.0));
    }
    let scale = form.scale();
    let variance = centered_sq(form, y);
    Ok(GammaReport {
        unitary_residual,
        splitting_residual,
        energy_y,
        energy_root,
        contraction_holds: energy_root <= energy_y + tol * scale,
        variance,
        epsilon,
        chain_holds: epsilon > 0.0 && variance <= 8.0 / epsilon * energy_y + tol,
    })
}
