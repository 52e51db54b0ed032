//! Quantum Ornstein–Uhlenbeck form on a truncated oscillator.

use serde_json::json;

use super::{left_op, right_op};
use crate::algebra::{AlgebraDescriptor, Element, State};
use crate::error::{Error, Result};
use crate::forms::{FormOperator, Provenance};
use crate::numeric::{cr, CMatrix, HermEig};
use crate::standard_form::StandardSpace;

/// Truncated annihilator `a|n⟩ = √n |n−1⟩` on `N` levels.
pub fn truncated_annihilator(levels: usize) -> CMatrix {
    CMatrix::from_fn(
        levels,
        levels,
        |i, j| if j == i + 1 { cr((j as f64).sqrt()) } else { cr(0.0) },
    )
}

/// `ρ_ν ∝ Σ ν^n |n⟩⟨n|` on `N` levels, renormalized after truncation.
pub fn ou_state(levels: usize, nu: f64) -> Result<State> {
    let alg = AlgebraDescriptor::full(levels);
    let spectrum = HermEig {
        values: (0..levels).map(|n| nu.powi(n as i32)).collect(),
        vectors: CMatrix::identity(levels, levels),
    };
    State::from_spectra(&alg, vec![spectrum])
}

/// `E[ξ] = ‖μaξ − λξa‖² + ‖μaξ* − λξ*a‖²` with respect to `ρ_ν`, `ν = λ²/μ²`.
///
/// The operators are truncated before `ρ_ν` is renormalized, which keeps
/// `μν^{1/2} = λ` exact. With `μ = λ` the invariant state degenerates to
/// the trace, which is used instead (recorded in the provenance).
pub fn quantum_ou_form(levels: usize, mu: f64, lambda: f64) -> Result<FormOperator> {
    if levels < 2 {
        return Err(Error::Precondition(format!("need at least 2 levels, got {levels}")));
    }
    if !(lambda > 0.0 && mu >= lambda && mu.is_finite()) {
        return Err(Error::Precondition(format!(
            "OU parameters need mu >= lambda > 0, got mu={mu} lambda={lambda}"
        )));
    }
    let nu = (lambda / mu).powi(2);
    let trace_case = mu == lambda;
    let state = if trace_case {
        State::normalized_trace(&AlgebraDescriptor::full(levels))
    } else {
        ou_state(levels, nu)?
    };
    let space = StandardSpace::new(state)?;
    let a = Element::from_matrix(truncated_annihilator(levels))?;
    let m = left_op(&a) * cr(mu) - right_op(&a) * cr(lambda);
    let first = m.adjoint() * m;
    let second = space.j_conjugate(&first);
    let params = json!({
        "levels": levels,
        "mu": mu,
        "lambda": lambda,
        "nu": nu,
        "reference": if trace_case { "trace" } else { "gibbs" },
    });
    FormOperator::new(space, first + second, Provenance::new("quantum_ou", params))
}
