//! Derivation forms `E[ξ] = Σ ‖∂_k ξ‖²` built from inner derivations.

use serde::Serialize;
use serde_json::json;

use super::{commutator_op, left_op, right_op};
use crate::algebra::{AlgebraDescriptor, Element, ElementJson, State};
use crate::error::{Error, Result};
use crate::forms::{FormOperator, Provenance};
use crate::numeric::{c, cr, min_eig, CMatrix};
use crate::standard_form::StandardSpace;

/// One derivation `∂ξ = i(μ aξ − ν ξa)`.
#[derive(Clone, Debug)]
pub struct DerivationTerm {
    pub a: Element,
    pub mu: f64,
    pub nu: f64,
}

#[derive(Clone, Debug)]
pub struct DerivationSpec {
    terms: Vec<DerivationTerm>,
}

impl DerivationSpec {
    pub fn new(terms: Vec<DerivationTerm>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| !(t.mu > 0.0 && t.nu > 0.0)) {
            return Err(Error::Precondition(format!(
                "derivation weights must be positive, got mu={} nu={}",
                t.mu, t.nu
            )));
        }
        if let Some(first) = terms.first() {
            if terms.iter().any(|t| t.a.algebra() != first.a.algebra()) {
                return Err(Error::Dimension("derivation terms live in different algebras".into()));
            }
        }
        Ok(DerivationSpec { terms })
    }

    /// Single term with `μ = ν = 1`.
    pub fn inner(a: Element) -> Self {
        DerivationSpec {
            terms: vec![DerivationTerm { a, mu: 1.0, nu: 1.0 }],
        }
    }

    pub fn terms(&self) -> &[DerivationTerm] {
        &self.terms
    }

    /// Adds the partner `(a*, ν, μ)` of each term, which makes the form J-real.
    pub fn symmetrized(&self) -> Self {
        let mut terms = self.terms.clone();
        for t in &self.terms {
            terms.push(DerivationTerm {
                a: t.a.adjoint(),
                mu: t.nu,
                nu: t.mu,
            });
        }
        DerivationSpec { terms }
    }

    fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|t| json!({"a": ElementJson::from_element(&t.a), "mu": t.mu, "nu": t.nu}))
            .collect();
        json!({ "terms": terms })
    }
}

/// How far a derivation spec is from the conditions that make its form a
/// Dirichlet form for the given state.
#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    /// HS distance of `Σ μ²a*a − ν²aa*` from the centre.
    pub center_distance: f64,
    /// `‖Δ(aξ_ω) − (μ/ν)² aξ_ω‖` per term.
    pub eigen_residuals: Vec<f64>,
    /// `E[ξ_ω]`.
    pub energy_at_xi_omega: f64,
}

impl AdmissibilityReport {
    pub fn admissible(&self, tol: f64) -> bool {
        self.center_distance <= tol && self.eigen_residuals.iter().all(|&r| r <= tol)
    }
}

fn center_distance(z: &Element) -> f64 {
    z.blocks()
        .iter()
        .map(|b| {
            let n = b.nrows();
            let m = b.trace() / cr(n as f64);
            (b - CMatrix::identity(n, n) * m).norm_squared()
        })
        .sum::<f64>()
        .sqrt()
}

pub fn elementary_state_form(
    space: &StandardSpace,
    spec: &DerivationSpec,
) -> Result<(FormOperator, AdmissibilityReport)> {
    let alg = space.algebra().clone();
    let d = space.dim();
    let mut l = CMatrix::zeros(d, d);
    let mut z = Element::zeros(&alg);
    let mut residuals = Vec::with_capacity(spec.terms.len());
    for t in &spec.terms {
        if t.a.algebra() != &alg {
            return Err(Error::Dimension("derivation term outside the state's algebra".into()));
        }
        let m = (left_op(&t.a) * cr(t.mu) - right_op(&t.a) * cr(t.nu)) * c(0.0, 1.0);
        l += m.adjoint() * &m;
        let ad = t.a.adjoint();
        z = z.add(&ad.mul(&t.a)?.scale(cr(t.mu * t.mu)))?;
        z = z.sub(&t.a.mul(&ad)?.scale(cr(t.nu * t.nu)))?;
        let ratio = (t.mu / t.nu).powi(2);
        let delta_a = space.sandwich(&t.a, cr(1.0), cr(-0.5));
        let a_xi = space.sandwich(&t.a, cr(0.0), cr(0.5));
        residuals.push(delta_a.sub(&a_xi.scale(cr(ratio)))?.hs_norm());
    }
    let form = FormOperator::new(space.clone(), l, Provenance::new("elementary_state", spec.to_json()))?;
    let report = AdmissibilityReport {
        center_distance: center_distance(&z),
        eigen_residuals: residuals,
        energy_at_xi_omega: form.evaluate(space.xi_omega()),
    };
    Ok((form, report))
}

/// `F ∪ F*` with duplicates (including self-adjoint elements) removed.
pub fn symmetrize_set(f: &[Element]) -> Vec<Element> {
    let mut out: Vec<Element> = f.to_vec();
    for x in f {
        let xs = x.adjoint();
        let tol = 1e-14 * x.hs_norm().max(1.0);
        let dup = out
            .iter()
            .any(|y| xs.sub(y).map(|d| d.hs_norm() <= tol).unwrap_or(false));
        if !dup {
            out.push(xs);
        }
    }
    out
}

/// `E_F[ξ] = Σ_{x∈F∪F*} ‖xξ − ξx‖²` over the normalized trace.
pub fn elementary_trace_form(alg: &AlgebraDescriptor, f: &[Element]) -> Result<FormOperator> {
    if f.is_empty() {
        return Err(Error::Precondition("elementary form needs a non-empty set F".into()));
    }
    if f.iter().any(|x| x.algebra() != alg) {
        return Err(Error::Dimension("element of F outside the algebra".into()));
    }
    let space = StandardSpace::new(State::normalized_trace(alg))?;
    let d = space.dim();
    let mut l = CMatrix::zeros(d, d);
    let fs = symmetrize_set(f);
    for x in &fs {
        let ad = commutator_op(x);
        l += ad.adjoint() * ad;
    }
    let params: Vec<_> = f.iter().map(ElementJson::from_element).collect();
    FormOperator::new(space, l, Provenance::new("elementary_trace", json!({ "F": params })))
}

/// `E[a] = Σ ‖[a, m_i]‖² + ½(Tr(K a*a) + Tr(K aa*))` over the normalized
/// trace. A killing term `K` that is not positive is accepted but recorded
/// as `killing_psd: false` in the provenance.
pub fn derivation_trace_form(alg: &AlgebraDescriptor, m_list: &[Element], k: &Element) -> Result<FormOperator> {
    if m_list.iter().chain(std::iter::once(k)).any(|x| x.algebra() != alg) {
        return Err(Error::Dimension("derivation data outside the algebra".into()));
    }
    let h = k.hermiticity_residual();
    if h > 1e-12 {
        return Err(Error::NotHermitian(h));
    }
    let space = StandardSpace::new(State::normalized_trace(alg))?;
    let mut l = (left_op(k) + right_op(k)) * cr(0.5);
    for m in m_list {
        let ad = commutator_op(m);
        l += ad.adjoint() * ad;
    }
    let k_min = k
        .blocks()
        .iter()
        .map(min_eig)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let params = json!({
        "m": m_list.iter().map(ElementJson::from_element).collect::<Vec<_>>(),
        "K": ElementJson::from_element(k),
        "killing_min_eigenvalue": k_min,
        "killing_psd": k_min >= -1e-12 * k.norm().max(1.0),
    });
    FormOperator::new(space, l, Provenance::new("derivation_trace", params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{matrix_unit, paulis};
    use crate::forms::{Suite, VerifyConfig};
    use crate::numeric::herm_eigvals;

    fn m2(i: usize) -> Element {
        Element::from_matrix(paulis()[i].clone()).unwrap()
    }

    #[test]
    fn sigma_x_spectrum() {
        let f = elementary_trace_form(&AlgebraDescriptor::full(2), &[m2(1)]).unwrap();
        let ev = herm_eigvals(f.generator()).unwrap();
        for (a, b) in ev.iter().zip([0.0, 0.0, 4.0, 4.0]) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn all_paulis_give_projection() {
        let f = elementary_trace_form(&AlgebraDescriptor::full(2), &[m2(1), m2(2), m2(3)]).unwrap();
        let xi = f.space().xi_omega().to_vector();
        let target = (CMatrix::identity(4, 4) - &xi * xi.adjoint()) * cr(8.0);
        assert!((f.generator() - target).norm() < 1e-12);
    }

    #[test]
    fn identity_gives_zero() {
        let alg = AlgebraDescriptor::full(3);
        let f = elementary_trace_form(&alg, &[Element::identity(&alg)]).unwrap();
        assert!(f.generator().norm() < 1e-14);
        assert!(elementary_trace_form(&alg, &[]).is_err());
    }

    #[test]
    fn trace_state_reduces_to_trace_form() {
        let alg = AlgebraDescriptor::full(2);
        let a = Element::from_matrix(matrix_unit(2, 0, 1)).unwrap();
        let space = StandardSpace::new(State::normalized_trace(&alg)).unwrap();
        let (f, rep) = elementary_state_form(&space, &DerivationSpec::inner(a.clone()).symmetrized()).unwrap();
        let g = elementary_trace_form(&alg, &[a]).unwrap();
        assert!((f.generator() - g.generator()).norm() < 1e-13);
        assert!(rep.admissible(1e-12));
    }

    fn diag_state(l1: f64, l2: f64) -> StandardSpace {
        let rho = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![cr(l1), cr(l2)]));
        StandardSpace::new(State::from_density(Element::from_matrix(rho).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn matrix_unit_eigenvector_is_admissible() {
        let (l1, l2) = (0.7, 0.3);
        let space = diag_state(l1, l2);
        let a = Element::from_matrix(matrix_unit(2, 0, 1)).unwrap();
        let nu = 1.0;
        let mu = (l1 / l2).sqrt();
        let spec = DerivationSpec::new(vec![DerivationTerm { a, mu, nu }])
            .unwrap()
            .symmetrized();
        let (f, rep) = elementary_state_form(&space, &spec).unwrap();
        assert!(rep.eigen_residuals.iter().all(|&r| r < 1e-14), "{rep:?}");
        assert!(rep.energy_at_xi_omega < 1e-14);
        let cfg = VerifyConfig {
            n_samples: 40,
            ..Default::default()
        };
        let report = f.verify(Suite::Full, &cfg).unwrap();
        assert!(report.all_passed(), "{report:#?}");
    }

    #[test]
    fn wrong_ratio_fails_modular_symmetry() {
        let space = diag_state(0.7, 0.3);
        let a = Element::from_matrix(matrix_unit(2, 0, 1)).unwrap();
        let spec = DerivationSpec::new(vec![DerivationTerm { a, mu: 1.0, nu: 1.0 }]).unwrap();
        let (f, rep) = elementary_state_form(&space, &spec).unwrap();
        assert!(rep.energy_at_xi_omega > 1e-3);
        assert!(!rep.admissible(1e-10));
        let cfg = VerifyConfig {
            n_samples: 40,
            ..Default::default()
        };
        assert!(!f.check_modular_symmetry(&cfg).unwrap().passed());
    }

    #[test]
    fn killing_identity_is_identity() {
        let alg = AlgebraDescriptor::full(2);
        let f = derivation_trace_form(&alg, &[], &Element::identity(&alg)).unwrap();
        assert!((f.generator() - CMatrix::identity(4, 4)).norm() < 1e-14);
        let cfg = VerifyConfig::default();
        assert!(f.check_subunital(&cfg).unwrap().passed());
        let neg = derivation_trace_form(&alg, &[], &Element::identity(&alg).scale(cr(-1.0))).unwrap();
        assert_eq!(neg.provenance().params["killing_psd"], json!(false));
        assert!(!neg.check_subunital(&cfg).unwrap().passed());
    }

    #[test]
    fn zero_killing_matches_trace_form() {
        let alg = AlgebraDescriptor::full(2);
        let f = derivation_trace_form(&alg, &[m2(1)], &Element::zeros(&alg)).unwrap();
        let g = elementary_trace_form(&alg, &[m2(1)]).unwrap();
        assert!((f.generator() - g.generator()).norm() < 1e-14);
    }
}
