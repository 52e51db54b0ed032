//! Rational rotation algebra `M_q` generated by clock and shift.

use std::f64::consts::PI;

use serde_json::json;

use crate::algebra::{AlgebraDescriptor, State};
use crate::error::{Error, Result};
use crate::forms::{FormOperator, Provenance};
use crate::numeric::{c, cr, herm_eigvals, vectorize, CMatrix};
use crate::standard_form::StandardSpace;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Clock `U = diag(ζ^k)` and shift `V e_k = e_{k−1}`, so that `VU = ζUV`.
pub fn clock_shift(q: usize, p: i64) -> (CMatrix, CMatrix) {
    let zeta = |k: i64| {
        let ang = 2.0 * PI * (p * k).rem_euclid(q as i64) as f64 / q as f64;
        c(ang.cos(), ang.sin())
    };
    let u = CMatrix::from_fn(q, q, |i, j| if i == j { zeta(i as i64) } else { cr(0.0) });
    let v = CMatrix::from_fn(q, q, |i, j| if (i + 1) % q == j { cr(1.0) } else { cr(0.0) });
    (u, v)
}

/// Balanced residues `{−⌊q/2⌋, …, ⌈q/2⌉ − 1}`.
pub fn balanced_window(q: usize) -> Vec<i64> {
    let lo = -((q / 2) as i64);
    (0..q as i64).map(|k| lo + k).collect()
}

fn int_pow(m: &CMatrix, k: i64) -> CMatrix {
    let base = if k < 0 { m.adjoint() } else { m.clone() };
    let mut r = CMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..k.unsigned_abs() {
        r = &r * &base;
    }
    r
}

/// `U^m V^n`.
pub fn torus_monomial(u: &CMatrix, v: &CMatrix, m: i64, n: i64) -> CMatrix {
    int_pow(u, m) * int_pow(v, n)
}

/// `E[Σ c_{mn} U^mV^n] = Σ (m²+n²)|c_{mn}|²` on `M_q` with its trace, with
/// frequencies lifted to the balanced window.
///
/// For `q ≥ 4` the lifted symbol `m²` is not conditionally negative definite
/// on `Z_q`, so the semigroup fails to be completely positive at small `t`.
pub fn fuzzy_torus_form(q: usize, p: i64) -> Result<FormOperator> {
    if q < 2 {
        return Err(Error::Precondition(format!("torus needs q >= 2, got {q}")));
    }
    if gcd(p, q as i64) != 1 {
        return Err(Error::Precondition(format!("p={p} and q={q} are not coprime")));
    }
    let alg = AlgebraDescriptor::full(q);
    let space = StandardSpace::new(State::normalized_trace(&alg))?;
    let (u, v) = clock_shift(q, p);
    let d = q * q;
    let mut l = CMatrix::zeros(d, d);
    let s = cr(1.0 / q as f64);
    for &m in &balanced_window(q) {
        for &n in &balanced_window(q) {
            let e = vectorize(&torus_monomial(&u, &v, m, n));
            let w = (m * m + n * n) as f64;
            l += (&e * e.adjoint()) * (s * w);
        }
    }
    FormOperator::new(space, l, Provenance::new("fuzzy_torus", json!({"q": q, "p": p})))
}

/// `‖VU − ζUV‖`.
pub fn torus_relation_residual(q: usize, p: i64) -> f64 {
    let (u, v) = clock_shift(q, p);
    let ang = 2.0 * PI * p as f64 / q as f64;
    (&v * &u - (&u * &v) * c(ang.cos(), ang.sin())).norm()
}

/// Expected spectrum: `m² + n²` over the window, sorted.
pub fn torus_symbol_spectrum(q: usize) -> Vec<f64> {
    let w = balanced_window(q);
    let mut s: Vec<f64> = w
        .iter()
        .flat_map(|&m| w.iter().map(move |&n| (m * m + n * n) as f64))
        .collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Spectrum of `U + U* + V + V*`, the finite Hofstadter-type diagnostic.
pub fn hofstadter_spectrum(q: usize, p: i64) -> Result<Vec<f64>> {
    let (u, v) = clock_shift(q, p);
    herm_eigvals(&(&u + u.adjoint() + &v + v.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q2_spectrum() {
        let f = fuzzy_torus_form(2, 1).unwrap();
        let ev = herm_eigvals(f.generator()).unwrap();
        for (a, b) in ev.iter().zip([0.0, 1.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spectra_are_integers_from_window() {
        for (q, p) in [(3, 1), (5, 2), (4, 3)] {
            let f = fuzzy_torus_form(q, p).unwrap();
            let ev = herm_eigvals(f.generator()).unwrap();
            let want = torus_symbol_spectrum(q);
            for (a, b) in ev.iter().zip(&want) {
                assert!((a - b).abs() < 1e-9, "q={q}: {ev:?} vs {want:?}");
            }
            assert!(f.evaluate(f.space().xi_omega()).abs() < 1e-12);
        }
    }

    #[test]
    fn clock_shift_relation_and_trace() {
        for (q, p) in [(2, 1), (3, 2), (5, 3)] {
            assert!(torus_relation_residual(q, p) < 1e-13);
            let (u, v) = clock_shift(q, p);
            for m in balanced_window(q) {
                for n in balanced_window(q) {
                    let t = torus_monomial(&u, &v, m, n).trace() / cr(q as f64);
                    let want = if m == 0 && n == 0 { 1.0 } else { 0.0 };
                    assert!((t - cr(want)).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(fuzzy_torus_form(1, 1).is_err());
        assert!(fuzzy_torus_form(4, 2).is_err());
    }

    #[test]
    fn hofstadter_is_bounded_by_four() {
        let s = hofstadter_spectrum(5, 2).unwrap();
        assert!(s.iter().all(|x| x.abs() <= 4.0 + 1e-12));
    }
}
