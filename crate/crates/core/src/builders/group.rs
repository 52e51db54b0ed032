//! Translation-invariant forms on the group algebra of a finite group.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::algebra::{AlgebraDescriptor, Element, GroupTable, State};
use crate::error::{Error, Result};
use crate::forms::{FormOperator, Provenance};
use crate::numeric::{c, cr, herm_eig, min_eig, CMatrix, CVector};
use crate::sampling::{gaussian_vector, normal, rng_for, stream_id};
use crate::standard_form::StandardSpace;

/// A normalized, symmetric function `ℓ` on a finite group.
#[derive(Clone, Debug)]
pub struct CndFunction {
    group: GroupTable,
    values: Vec<Complex64>,
}

impl CndFunction {
    pub fn new(group: GroupTable, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::Dimension(format!(
                "ℓ has {} values for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("ℓ"));
        }
        let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
        if values[group.identity()].norm() > 1e-12 * scale {
            return Err(Error::Precondition("ℓ(e) must vanish".into()));
        }
        for s in 0..group.order() {
            if (values[group.inv(s)] - values[s].conj()).norm() > 1e-12 * scale {
                return Err(Error::Precondition(format!("ℓ(s⁻¹) ≠ conj ℓ(s) at s={s}")));
            }
        }
        Ok(CndFunction { group, values })
    }

    pub fn real(group: GroupTable, values: &[f64]) -> Result<Self> {
        CndFunction::new(group, values.iter().map(|&v| cr(v)).collect())
    }

    /// `ℓ(k) = |e^{2πik/N} − 1|²` on `Z_N`.
    pub fn cocycle_norm(n: usize) -> Result<Self> {
        let g = GroupTable::cyclic(n)?;
        let vals: Vec<f64> = (0..n)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                (c(a.cos(), a.sin()) - cr(1.0)).norm_sqr()
            })
            .collect();
        CndFunction::real(g, &vals)
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `[ℓ(s_j⁻¹ s_k)]`.
    pub fn kernel_matrix(&self) -> CMatrix {
        let g = &self.group;
        CMatrix::from_fn(g.order(), g.order(), |j, k| self.values[g.mul(g.inv(j), k)])
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CndReport {
    /// Largest value of `c̄ᵀ[ℓ(s_j⁻¹s_k)]c` over unit `c` with `Σc = 0`.
    pub max_quadratic: f64,
    /// Largest sampled value of the same quotient.
    pub sampled_max: f64,
    pub samples: usize,
    pub cnd: bool,
    /// Eigenvector attaining `max_quadratic` when CND fails.
    pub witness: Option<Vec<[f64; 2]>>,
    /// `(t, λ_min [e^{−tℓ(s_j⁻¹s_k)}])`.
    pub schoenberg: Vec<(f64, f64)>,
    pub schoenberg_psd: bool,
    /// Whether the two characterizations agree; disagreement means a bug.
    pub agree: bool,
}

pub const SCHOENBERG_GRID: [f64; 6] = [1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0];

pub fn check_cnd(ell: &CndFunction, seed: u64, n_samples: usize) -> Result<CndReport> {
    let n = ell.group.order();
    let a = ell.kernel_matrix();
    let scale = a.norm().max(1.0);
    let tol = 1e-12 * scale;
    let p = CMatrix::identity(n, n) - CMatrix::from_element(n, n, cr(1.0 / n as f64));
    let pap = &p * &a * &p;
    let e = herm_eig(&pap)?;
    let max_quadratic = e.max();
    let cnd = max_quadratic <= tol;
    let witness = if cnd {
        None
    } else {
        let v = e.vectors.column(n - 1);
        Some(v.iter().map(|z| [z.re, z.im]).collect())
    };
    let mut rng = rng_for(seed, stream_id("check_cnd"));
    let mut sampled_max = f64::NEG_INFINITY;
    if n > 1 {
        for _ in 0..n_samples {
            let mut v: CVector = gaussian_vector(&mut rng, n);
            let mean = v.sum() / cr(n as f64);
            v.add_scalar_mut(-mean);
            let nv = v.norm();
            if nv == 0.0 {
                continue;
            }
            let q = (v.adjoint() * &a * &v)[(0, 0)].re / (nv * nv);
            sampled_max = sampled_max.max(q);
        }
    }
    let mut schoenberg = Vec::new();
    for &t in &SCHOENBERG_GRID {
        let k = a.map(|z| (-z * t).exp());
        schoenberg.push((t, min_eig(&k)?));
    }
    let schoenberg_psd = schoenberg.iter().all(|&(_, m)| m >= -1e-12 * n as f64);
    Ok(CndReport {
        max_quadratic,
        sampled_max,
        samples: n_samples,
        cnd,
        witness,
        schoenberg,
        schoenberg_psd,
        agree: cnd == schoenberg_psd,
    })
}

/// Wedderburn decomposition `C[Γ] ≅ ⊕_π M_{d_π}` computed numerically from
/// the regular representation.
#[derive(Clone, Debug)]
pub struct GroupAlgebra {
    group: GroupTable,
    algebra: AlgebraDescriptor,
    /// `irreps[π][s] = π(s)`.
    irreps: Vec<Vec<CMatrix>>,
}

fn left_regular(g: &GroupTable, s: usize) -> CMatrix {
    let n = g.order();
    let mut m = CMatrix::zeros(n, n);
    for t in 0..n {
        m[(g.mul(s, t), t)] = cr(1.0);
    }
    m
}

fn right_regular(g: &GroupTable, s: usize) -> CMatrix {
    let n = g.order();
    let mut m = CMatrix::zeros(n, n);
    for t in 0..n {
        m[(g.mul(t, g.inv(s)), t)] = cr(1.0);
    }
    m
}

/// Groups consecutive sorted eigenvalues closer than `tol`.
fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

impl GroupAlgebra {
    pub fn new(group: &GroupTable) -> Result<Self> {
        let n = group.order();
        let mut rng = rng_for(0, stream_id("wedderburn"));
        // A generic central self-adjoint element separates the isotypic
        // components of the regular representation.
        let mut z = CMatrix::zeros(n, n);
        for cls in group.conjugacy_classes() {
            let mut sum = CMatrix::zeros(n, n);
            for &s in &cls {
                sum += left_regular(group, s);
            }
            let (a, b) = (normal(&mut rng), normal(&mut rng));
            z += (&sum + sum.adjoint()) * cr(a) + (&sum - sum.adjoint()) * c(0.0, b);
        }
        let ez = herm_eig(&z)?;
        let ztol = 1e-8 * ez.norm().max(1.0);
        // A generic self-adjoint element of the right regular algebra splits
        // each isotypic component into copies of the irreducible.
        let mut r = CMatrix::zeros(n, n);
        for s in 0..n {
            let si = group.inv(s);
            if si < s {
                continue;
            }
            let h = if si == s {
                cr(normal(&mut rng))
            } else {
                c(normal(&mut rng), normal(&mut rng))
            };
            r += right_regular(group, s) * h;
            if si != s {
                r += right_regular(group, si) * h.conj();
            }
        }
        let mut irreps: Vec<(usize, f64, Vec<CMatrix>)> = Vec::new();
        for range in clusters(&ez.values, ztol) {
            let m = range.len();
            let d = (m as f64).sqrt().round() as usize;
            if d * d != m {
                return Err(Error::InvalidGroup(format!(
                    "isotypic component of dimension {m} is not a square"
                )));
            }
            let q = ez.vectors.columns(range.start, m).into_owned();
            let rc = q.adjoint() * &r * &q;
            let er = herm_eig(&rc)?;
            let rtol = 1e-8 * er.norm().max(1.0);
            let first = &clusters(&er.values, rtol)[0];
            if first.len() != d {
                return Err(Error::NoConvergence(er.values[d.min(m - 1)] - er.values[0]));
            }
            let basis = &q * er.vectors.columns(0, d);
            let reps: Vec<CMatrix> = (0..n)
                .map(|s| basis.adjoint() * left_regular(group, s) * &basis)
                .collect();
            irreps.push((d, ez.values[range.start], reps));
        }
        irreps.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let algebra = AlgebraDescriptor::new(irreps.iter().map(|x| x.0).collect())?;
        let ga = GroupAlgebra {
            group: group.clone(),
            algebra,
            irreps: irreps.into_iter().map(|x| x.2).collect(),
        };
        let res = ga.homomorphism_residual();
        if res > 1e-9 {
            return Err(Error::NoConvergence(res));
        }
        Ok(ga)
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.algebra
    }

    pub fn irrep_dims(&self) -> &[usize] {
        self.algebra.block_dims()
    }

    /// `λ(s) = ⊕_π π(s)`.
    pub fn element(&self, s: usize) -> Element {
        let blocks = self.irreps.iter().map(|r| r[s].clone()).collect();
        Element::new(&self.algebra, blocks).expect("irrep blocks")
    }

    /// `max ‖π(st) − π(s)π(t)‖` and unitarity defects.
    pub fn homomorphism_residual(&self) -> f64 {
        let g = &self.group;
        let n = g.order();
        let mut worst = 0.0f64;
        for rep in &self.irreps {
            let d = rep[0].nrows();
            for s in 0..n {
                worst = worst.max((rep[s].adjoint() * &rep[s] - CMatrix::identity(d, d)).norm());
                for t in 0..n {
                    worst = worst.max((&rep[g.mul(s, t)] - &rep[s] * &rep[t]).norm());
                }
            }
        }
        worst
    }

    /// The canonical trace `τ(λ(s)) = δ_{s,e}`: block weights `d_π²/|Γ|`.
    pub fn trace_state(&self) -> Result<State> {
        let n = self.group.order() as f64;
        let w: Vec<f64> = self.irrep_dims().iter().map(|&d| (d * d) as f64 / n).collect();
        State::tracial(&self.algebra, &w)
    }

    /// Unitary whose column `s` is `λ(s)ξ_τ` in the vectorized standard space.
    pub fn basis_unitary(&self) -> CMatrix {
        let n = self.group.order();
        let d = self.algebra.total_dim();
        let mut w = CMatrix::zeros(d, n);
        for s in 0..n {
            let scaled: Vec<CMatrix> = self
                .irreps
                .iter()
                .map(|r| &r[s] * cr((r[s].nrows() as f64 / n as f64).sqrt()))
                .collect();
            let e = Element::new(&self.algebra, scaled).expect("irrep blocks");
            w.set_column(s, &e.to_vector());
        }
        w
    }
}

/// `E_ℓ[Σ a(s)λ(s)ξ_τ] = Σ ℓ(s)|a(s)|²`. Requires real `ℓ` that passes
/// `check_cnd`; a CND violation is returned with its witness.
pub fn group_form(ell: &CndFunction) -> Result<FormOperator> {
    if let Some(v) = ell.values.iter().find(|v| v.im.abs() > 1e-12 * v.norm().max(1.0)) {
        return Err(Error::Precondition(format!(
            "ℓ must be real for a self-adjoint generator, got {v}"
        )));
    }
    let rep = check_cnd(ell, 0, 0)?;
    if !rep.cnd {
        return Err(Error::NotMarkovian {
            reason: format!(
                "ℓ is not conditionally negative definite (c̄ℓc = {:e} on Σc = 0)",
                rep.max_quadratic
            ),
            witness: json!({ "c": rep.witness }),
        });
    }
    let ga = GroupAlgebra::new(&ell.group)?;
    let space = StandardSpace::new(ga.trace_state()?)?;
    let w = ga.basis_unitary();
    let diag = CMatrix::from_diagonal(&CVector::from_iterator(
        ell.values.len(),
        ell.values.iter().map(|v| cr(v.re)),
    ));
    let l = &w * diag * w.adjoint();
    let params = json!({
        "group": ell.group,
        "ell": ell.values.iter().map(|v| v.re).collect::<Vec<_>>(),
    });
    FormOperator::new(space, l, Provenance::new("group", params))
}

/// `max_s ‖T_t(λ(s)ξ_τ) − e^{−tℓ(s)}λ(s)ξ_τ‖`.
pub fn multiplier_residual(form: &FormOperator, ga: &GroupAlgebra, ell: &CndFunction, t: f64) -> Result<f64> {
    let tt = form.semigroup(t)?;
    let w = ga.basis_unitary();
    let mut worst = 0.0f64;
    for s in 0..ga.group().order() {
        let col = w.column(s).into_owned();
        let want = &col * cr((-t * ell.values[s].re).exp());
        worst = worst.max((&tt * &col - want).norm());
    }
    Ok(worst)
}
