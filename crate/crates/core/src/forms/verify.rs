//! Markovianity, complete positivity and modular symmetry checks.
//!
//! "For all ξ" statements are replaced by exact structural checks where they
//! exist (Choi matrices, the orbit of ξ_ω, kernels) and by seeded sampling
//! with the worst sample kept as a witness.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::FormOperator;
use crate::algebra::{Element, ElementJson};
use crate::error::Result;
use crate::numeric::{cr, herm_eig, CMatrix, TolerancePolicy};
use crate::sampling::{gaussian_matrix, gue, random_psd, random_unit_interval, rng_for, stream_id};
use crate::standard_form::{StandardSpace, StdVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Inconclusive,
    Fail,
    Skipped,
}

impl CheckStatus {
    /// Pass at `tol`, inconclusive up to `10·tol`, fail beyond.
    pub fn classify(residual: f64, tol: f64) -> CheckStatus {
        if residual.is_nan() {
            CheckStatus::Fail
        } else if residual <= tol {
            CheckStatus::Pass
        } else if residual <= 10.0 * tol {
            CheckStatus::Inconclusive
        } else {
            CheckStatus::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    /// Worst relative residual; 0 means no violation was observed.
    pub worst_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub t_grid: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub note: String,
}

impl CheckResult {
    pub fn new(name: &str, worst_residual: f64, tolerance: f64, samples: usize) -> Self {
        CheckResult {
            name: name.to_string(),
            status: CheckStatus::classify(worst_residual, tolerance),
            worst_residual,
            tolerance,
            samples,
            t_grid: vec![],
            witness: None,
            note: String::new(),
        }
    }

    pub fn skipped(name: &str, note: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            status: CheckStatus::Skipped,
            worst_residual: 0.0,
            tolerance: 0.0,
            samples: 0,
            t_grid: vec![],
            witness: None,
            note: note.to_string(),
        }
    }

    pub fn with_grid(mut self, grid: &[f64]) -> Self {
        self.t_grid = grid.to_vec();
        self
    }

    /// Attach the witness only when the check did not pass.
    pub fn with_witness(mut self, w: Option<serde_json::Value>) -> Self {
        if self.status != CheckStatus::Pass {
            self.witness = w;
        }
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, CheckStatus::Pass | CheckStatus::Skipped)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: super::Provenance,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn status(&self) -> CheckStatus {
        if self.checks.iter().any(|c| c.status == CheckStatus::Fail) {
            CheckStatus::Fail
        } else if self.checks.iter().any(|c| c.status == CheckStatus::Inconclusive) {
            CheckStatus::Inconclusive
        } else {
            CheckStatus::Pass
        }
    }

    pub fn all_passed(&self) -> bool {
        self.status() == CheckStatus::Pass
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// 0 all pass, 2 a failure with witness, 3 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self.status() {
            CheckStatus::Pass | CheckStatus::Skipped => 0,
            CheckStatus::Fail => 2,
            CheckStatus::Inconclusive => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Full,
    Markov,
    Kms,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub tol: TolerancePolicy,
    pub seed: u64,
    pub n_samples: usize,
    /// `None` means the form's default grid.
    pub t_grid: Option<Vec<f64>>,
    /// Largest `n` for the ampliation re-checks.
    pub ampliation_max: usize,
    /// Ampliations are skipped once `Σ n_k · n` exceeds this.
    pub ampliation_budget: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            tol: TolerancePolicy::default(),
            seed: 0,
            n_samples: 200,
            t_grid: None,
            ampliation_max: 3,
            ampliation_budget: 8,
        }
    }
}

fn witness(xi: &Element) -> serde_json::Value {
    serde_json::to_value(ElementJson::from_element(xi)).unwrap_or(serde_json::Value::Null)
}

fn worst(acc: &mut (f64, Option<serde_json::Value>), r: f64, w: impl FnOnce() -> serde_json::Value) {
    if r > acc.0 || (r.is_nan() && !acc.0.is_nan()) {
        *acc = (r, Some(w()));
    }
}

/// Norm of the part of `ξ` outside the cone: `max(0, −λ_min(ξ_h)) + ‖ξ − ξ_h‖`.
pub fn cone_violation(xi: &StdVector) -> f64 {
    let mut v = 0.0f64;
    for b in xi.blocks() {
        let h = crate::numeric::hermitian_part(b);
        let anti = (b - &h).norm();
        let m = herm_eig(&h).map(|e| e.min()).unwrap_or(f64::NAN);
        v = v.max((-m).max(0.0) + anti);
    }
    v
}

fn random_real_vector<R: Rng>(space: &StandardSpace, rng: &mut R) -> StdVector {
    let alg = space.algebra();
    let blocks = alg.block_dims().iter().map(|&n| gue(rng, n)).collect();
    let e = Element::new(alg, blocks).expect("shapes");
    let n = e.hs_norm().max(f64::MIN_POSITIVE);
    StdVector::from_element(e.scale(cr(1.0 / n)))
}

fn random_cone_vector<R: Rng>(space: &StandardSpace, rng: &mut R) -> StdVector {
    let alg = space.algebra();
    let blocks = alg.block_dims().iter().map(|&n| random_psd(rng, n)).collect();
    let e = Element::new(alg, blocks).expect("shapes");
    let n = e.hs_norm().max(f64::MIN_POSITIVE);
    StdVector::from_element(e.scale(cr(1.0 / n)))
}

/// A point of the order interval `[0, ξ_ω]`, as `i_ω(x)` with `0 ≤ x ≤ 1`.
fn random_interval_vector<R: Rng>(space: &StandardSpace, rng: &mut R) -> StdVector {
    let alg = space.algebra();
    let blocks = alg.block_dims().iter().map(|&n| random_unit_interval(rng, n)).collect();
    space.embed_i(&Element::new(alg, blocks).expect("shapes"))
}

/// Test vectors for the wedge: half are unit Gaussians, half are `ξ_ω`
/// perturbed so the constraint `ξ ≤ ξ_ω` is active.
fn random_wedge_vector<R: Rng>(space: &StandardSpace, rng: &mut R, k: usize) -> StdVector {
    let g = random_real_vector(space, rng);
    if k.is_multiple_of(2) {
        g.scale(0.5 + 2.0 * rng.random::<f64>())
    } else {
        space.xi_omega().add(&g.scale(0.1 + rng.random::<f64>()))
    }
}

impl FormOperator {
    fn grid(&self, cfg: &VerifyConfig) -> Vec<f64> {
        cfg.t_grid.clone().unwrap_or_else(|| self.default_t_grid())
    }

    /// `[L, J] = 0`.
    pub fn check_j_real(&self, cfg: &VerifyConfig) -> CheckResult {
        let jlj = self.space().j_conjugate(self.generator());
        let r = (&jlj - self.generator()).norm() / self.generator().norm().max(f64::MIN_POSITIVE);
        CheckResult::new("j_real", r, cfg.tol.tol_psd, 1)
    }

    /// `L ≥ 0`.
    pub fn check_nonnegative(&self, cfg: &VerifyConfig) -> CheckResult {
        let r = (-self.eig().min()).max(0.0) / self.scale();
        CheckResult::new("nonnegative", r, cfg.tol.tol_psd, 1)
            .with_witness(Some(serde_json::json!({"min_eigenvalue": self.eig().min()})))
    }

    /// `E[ξ_ω] = 0` (relative to ‖L‖).
    pub fn check_conservative(&self, cfg: &VerifyConfig) -> CheckResult {
        let v = self.apply(self.space().xi_omega()).norm() / self.scale();
        CheckResult::new("conservative", v, cfg.tol.tol_psd, 1)
    }

    /// `‖T_s T_t − T_{s+t}‖ ≤ tol_eig · ‖T_{s+t}‖` over grid pairs.
    pub fn check_semigroup_law(&self, cfg: &VerifyConfig) -> Result<CheckResult> {
        let grid = self.grid(cfg);
        let mats: Vec<CMatrix> = grid.iter().map(|&t| self.semigroup(t)).collect::<Result<_>>()?;
        let mut worst_r = 0.0f64;
        let mut n = 0;
        for (i, &s) in grid.iter().enumerate() {
            for (j, &t) in grid.iter().enumerate().skip(i) {
                let st = self.semigroup(s + t)?;
                let scale = st.norm().max(1.0);
                worst_r = worst_r.max((&mats[i] * &mats[j] - st).norm() / scale);
                n += 1;
            }
        }
        Ok(CheckResult::new("semigroup_law", worst_r, cfg.tol.tol_eig, n).with_grid(&grid))
    }

    /// `‖T_t‖ ≤ 1`.
    pub fn check_contractive(&self, cfg: &VerifyConfig) -> CheckResult {
        let grid = self.grid(cfg);
        let r = grid
            .iter()
            .map(|&t| ((-t * self.eig().min()).exp() - 1.0).max(0.0))
            .fold(0.0, f64::max);
        CheckResult::new("contractive", r, cfg.tol.tol_psd, grid.len()).with_grid(&grid)
    }

    /// `T_t ξ_ω ≤ ξ_ω`, and `T_t ξ ≤ ξ_ω` for sampled `0 ≤ ξ ≤ ξ_ω`.
    pub fn check_subunital(&self, cfg: &VerifyConfig) -> Result<CheckResult> {
        let grid = self.grid(cfg);
        let sp = self.space();
        let xo = sp.xi_omega();
        let mut rng = rng_for(cfg.seed, stream_id("subunital"));
        let samples: Vec<StdVector> = (0..cfg.n_samples)
            .map(|_| random_interval_vector(sp, &mut rng))
            .collect();
        let mut acc = (0.0f64, None);
        for &t in &grid {
            let tt = self.semigroup(t)?;
            let apply =
                |xi: &StdVector| StdVector::from_vector(sp.algebra(), (&tt * xi.to_vector()).as_slice()).unwrap();
            let r = cone_violation(&xo.sub(&apply(xo)));
            worst(&mut acc, r, || serde_json::json!({"t": t, "xi": "xi_omega"}));
            for xi in &samples {
                let r = cone_violation(&xo.sub(&apply(xi)));
                worst(
                    &mut acc,
                    r,
                    || serde_json::json!({"t": t, "xi": witness(xi.as_element())}),
                );
            }
        }
        Ok(CheckResult::new("subunital", acc.0, cfg.tol.tol_psd, samples.len() + 1)
            .with_grid(&grid)
            .with_witness(acc.1))
    }

    /// `T_t P ⊆ P` on sampled cone vectors (a quarter of them rank one).
    pub fn check_positivity_preserving(&self, cfg: &VerifyConfig) -> Result<CheckResult> {
        let grid = self.grid(cfg);
        let sp = self.space();
        let mut rng = rng_for(cfg.seed, stream_id("positivity_preserving"));
        let samples: Vec<StdVector> = (0..cfg.n_samples).map(|_| random_cone_vector(sp, &mut rng)).collect();
        let mut acc = (0.0f64, None);
        for &t in &grid {
            let tt = self.semigroup(t)?;
            for xi in &samples {
                let out = StdVector::from_vector(sp.algebra(), (&tt * xi.to_vector()).as_slice())?;
                let r = cone_violation(&out);
                worst(
                    &mut acc,
                    r,
                    || serde_json::json!({"t": t, "xi": witness(xi.as_element())}),
                );
            }
        }
        Ok(
            CheckResult::new("positivity_preserving", acc.0, cfg.tol.tol_psd, samples.len())
                .with_grid(&grid)
                .with_witness(acc.1),
        )
    }

    /// `E(ξ₊, ξ₋) ≤ 0` for sampled J-real `ξ`; needs `E[ξ_ω] = 0`.
    pub fn check_first_bd(&self, cfg: &VerifyConfig) -> Result<CheckResult> {
        let sp = self.space();
        let e0 = self.evaluate(sp.xi_omega()).abs() / self.scale();
        if e0 > cfg.tol.tol_prop {
            return Ok(CheckResult::skipped(
                "first_beurling_deny",
                &format!("E[xi_omega]/|L| = {e0:e} is not zero; criterion only applies to conservative forms"),
            ));
        }
        let mut rng = rng_for(cfg.seed, stream_id("first_beurling_deny"));
        let mut acc = (0.0f64, None);
        for _ in 0..cfg.n_samples {
            let xi = random_real_vector(sp, &mut rng);
            let (p, m) = sp.positive_parts(&xi)?;
            let v = self.bilinear(&p, &m).re;
            let scale = self.scale() * p.norm() * m.norm();
            let r = if scale > 0.0 { v.max(0.0) / scale } else { 0.0 };
            worst(&mut acc, r, || witness(xi.as_element()));
        }
        Ok(CheckResult::new("first_beurling_deny", acc.0, cfg.tol.tol_prop, cfg.n_samples).with_witness(acc.1))
    }

    /// `E[ξ ∧ ξ_ω] ≤ E[ξ]` for sampled J-real `ξ`.
    pub fn check_wedge_contraction(&self, cfg: &VerifyConfig) -> Result<CheckResult> {
        let sp = self.space();
        let mut rng = rng_for(cfg.seed, stream_id("wedge_contraction"));
        let mut acc = (0.0f64, None);
        for k in 0..cfg.n_samples {
            let xi = random_wedge_vector(sp, &mut rng, k);
            let w = sp.wedge(&xi)?;
            let diff = self.evaluate(&w) - self.evaluate(&xi);
            let r = diff.max(0.0) / (self.scale() * xi.norm() * xi.norm());
            worst(&mut acc, r, || witness(xi.as_element()));
        }
        Ok(CheckResult::new("wedge_contraction", acc.0, cfg.tol.tol_prop, cfg.n_samples).with_witness(acc.1))
    }

    /// Choi matrix of the lifted map `S_t` on the block-diagonal realization.
    pub fn choi_of_lift(&self, t: f64) -> Result<CMatrix> {
        Ok(self.choi_of_superop(&self.lifted_map_eigen(t)?))
    }

    /// Choi matrix of `T_t` read as a map on the block-diagonal matrices
    /// `ρ^{1/4} x ρ^{1/4}`. Since `i_ω` and its inverse are both completely
    /// positive, this is CP exactly when `S_t` is, without the `λ_j/λ_k`
    /// weights that make the lift ill-conditioned for nearly pure states.
    pub fn choi_of_semigroup(&self, t: f64) -> Result<CMatrix> {
        Ok(self.choi_of_superop(&self.to_eigen_coordinates(&self.semigroup(t)?)))
    }

    fn choi_of_superop(&self, s: &CMatrix) -> CMatrix {
        let alg = self.space().algebra();
        let offs = alg.block_offsets();
        let dims = alg.block_dims();
        let nn = alg.matrix_dim();
        // starting row of each block in the block-diagonal matrix
        let mut starts = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for &d in dims {
            starts.push(acc);
            acc += d;
        }
        let mut choi = CMatrix::zeros(nn * nn, nn * nn);
        for (k, &n) in dims.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let col = offs[k] + j * n + i;
                    let (gi, gj) = (starts[k] + i, starts[k] + j);
                    // Φ(e_ij) spread over every output block
                    for (k2, &n2) in dims.iter().enumerate() {
                        for q in 0..n2 {
                            for p in 0..n2 {
                                let row = offs[k2] + q * n2 + p;
                                let (gp, gq) = (starts[k2] + p, starts[k2] + q);
                                choi[(gi * nn + gp, gj * nn + gq)] = s[(row, col)];
                            }
                        }
                    }
                }
            }
        }
        choi
    }

    /// Choi criterion for complete positivity of `S_t` on the grid, applied
    /// to the equivalent map `T_t`.
    pub fn check_choi_cp(&self, cfg: &VerifyConfig) -> Result<CheckResult> {
        let grid = self.grid(cfg);
        let mut acc = (0.0f64, None);
        for &t in &grid {
            let choi = self.choi_of_semigroup(t)?;
            let e = herm_eig(&choi)?;
            let herm = crate::numeric::hermiticity_residual(&choi);
            let r = (-e.min()).max(0.0) / e.norm().max(f64::MIN_POSITIVE) + herm;
            worst(
                &mut acc,
                r,
                || serde_json::json!({"t": t, "min_choi_eigenvalue": e.min(), "choi_norm": e.norm()}),
            );
        }
        Ok(CheckResult::new("choi_cp", acc.0, cfg.tol.tol_psd, grid.len())
            .with_grid(&grid)
            .with_witness(acc.1))
    }

    /// `ω(y S_t(x)) = ω(σ_{i/2}(x) S_t(σ_{−i/2}(y)))` on sampled `x, y`.
    ///
    /// Both sides are evaluated as bilinear pairings in `L²`:
    /// `ω(y S_t x) = Tr(u·T_t v)` and the right side is `Tr(v·T_t u)` with
    /// `u = ρ^{3/4} y ρ^{−1/4}`, `v = i_ω(x)`; the exponents are combined in
    /// the eigenbasis of ρ before anything is multiplied out.
    pub fn check_modular_symmetry(&self, cfg: &VerifyConfig) -> Result<CheckResult> {
        let grid = self.grid(cfg);
        let sp = self.space();
        let alg = sp.algebra();
        let mut rng = rng_for(cfg.seed, stream_id("modular_symmetry"));
        let pairs: Vec<(Element, Element)> = (0..cfg.n_samples)
            .map(|_| {
                let gx = alg
                    .block_dims()
                    .iter()
                    .map(|&n| gaussian_matrix(&mut rng, n, n))
                    .collect();
                let gy = alg
                    .block_dims()
                    .iter()
                    .map(|&n| gaussian_matrix(&mut rng, n, n))
                    .collect();
                (Element::new(alg, gx).unwrap(), Element::new(alg, gy).unwrap())
            })
            .collect();
        let mut acc = (0.0f64, None);
        let pairing = |a: &Element, b: &StdVector| -> num_complex::Complex64 {
            a.blocks().iter().zip(b.blocks()).map(|(x, y)| (x * y).trace()).sum()
        };
        for &t in &grid {
            let tnorm = (-t * self.eig().min()).exp().max(1.0);
            for (x, y) in &pairs {
                // ρ^{3/4} σ_{i/2}(x) ρ^{−1/4} = ρ^{1/4} x ρ^{1/4}
                // i_ω(σ_{−i/2}(y)) = ρ^{3/4} y ρ^{−1/4}
                let u = sp.sandwich(y, cr(0.75), cr(-0.25));
                let v = sp.embed_i(x);
                let u2 = sp.sandwich(x, cr(0.25), cr(0.25));
                let v2 = StdVector::from_element(sp.sandwich(y, cr(0.75), cr(-0.25)));
                let lhs = pairing(&u, &self.apply_semigroup(t, &v)?);
                let rhs = pairing(&u2, &self.apply_semigroup(t, &v2)?);
                let scale = (u.hs_norm() * v.norm()).max(u2.hs_norm() * v2.norm()) * tnorm;
                let r = (lhs - rhs).norm() / scale.max(f64::MIN_POSITIVE);
                worst(
                    &mut acc,
                    r,
                    || serde_json::json!({"t": t, "x": witness(x), "y": witness(y)}),
                );
            }
        }
        let note = if self.state().is_trace() {
            "trace state: reduces to tau-symmetry of S_t"
        } else {
            ""
        };
        Ok(
            CheckResult::new("modular_symmetry", acc.0, cfg.tol.tol_prop, pairs.len())
                .with_grid(&grid)
                .with_witness(acc.1)
                .with_note(note),
        )
    }

    /// Sampled Dirichlet checks on `E^n` against `ω ⊗ τ_n` for `2 ≤ n ≤ n_max`.
    pub fn check_ampliations(&self, cfg: &VerifyConfig) -> Result<CheckResult> {
        let base = self.space().algebra().matrix_dim();
        let ns: Vec<usize> = (2..=cfg.ampliation_max)
            .filter(|&n| base * n <= cfg.ampliation_budget)
            .collect();
        if ns.is_empty() {
            return Ok(CheckResult::skipped(
                "ampliations",
                "ampliation exceeds the configured size budget; complete positivity rests on choi_cp",
            ));
        }
        let sub = VerifyConfig {
            n_samples: (cfg.n_samples / 4).max(10),
            ..cfg.clone()
        };
        let mut acc = (0.0f64, None);
        let mut total = 0;
        let mut tol = 0.0f64;
        for &n in &ns {
            let amp = self.ampliation_form(n)?;
            for c in [
                amp.check_first_bd(&sub)?,
                amp.check_wedge_contraction(&sub)?,
                amp.check_subunital(&sub)?,
            ] {
                total += c.samples;
                tol = tol.max(c.tolerance);
                let r = c.worst_residual / c.tolerance.max(f64::MIN_POSITIVE);
                worst(
                    &mut acc,
                    r,
                    || serde_json::json!({"n": n, "check": c.name, "witness": c.witness}),
                );
            }
        }
        // residual reported in units of the respective tolerance
        Ok(CheckResult::new("ampliations", acc.0, 1.0, total)
            .with_witness(acc.1)
            .with_note(format!("n in {ns:?}; residual is in units of each check's tolerance")))
    }

    /// Markovian ⟺ (positivity preserving ∧ subunital), as observed.
    pub fn check_equivalence(wedge: &CheckResult, pp: &CheckResult, sub: &CheckResult) -> CheckResult {
        let lhs = wedge.status == CheckStatus::Pass;
        let rhs = pp.status == CheckStatus::Pass && sub.status == CheckStatus::Pass;
        let agree = lhs == rhs;
        let mut c = CheckResult::new("markov_equivalence", if agree { 0.0 } else { 1.0 }, 0.5, 1);
        if !agree {
            // the two sides are equivalent, so a disagreement means one of the
            // sampled checks missed a witness the other found
            c.status = CheckStatus::Inconclusive;
            c = c.with_note(format!(
                "disagreement (a sampled check missed a witness): wedge={:?}, positivity={:?}, subunital={:?}",
                wedge.status, pp.status, sub.status
            ));
        }
        c
    }

    /// Run a named suite.
    pub fn verify(&self, suite: Suite, cfg: &VerifyConfig) -> Result<VerificationReport> {
        let mut checks = Vec::new();
        if matches!(suite, Suite::Full | Suite::Markov) {
            checks.push(self.check_j_real(cfg));
            checks.push(self.check_nonnegative(cfg));
            checks.push(self.check_semigroup_law(cfg)?);
            checks.push(self.check_contractive(cfg));
            let sub = self.check_subunital(cfg)?;
            let pp = self.check_positivity_preserving(cfg)?;
            checks.push(self.check_first_bd(cfg)?);
            let wedge = self.check_wedge_contraction(cfg)?;
            let eq = FormOperator::check_equivalence(&wedge, &pp, &sub);
            checks.push(sub);
            checks.push(pp);
            checks.push(wedge);
            checks.push(eq);
            checks.push(self.check_choi_cp(cfg)?);
            checks.push(self.check_ampliations(cfg)?);
        }
        if matches!(suite, Suite::Full | Suite::Kms) {
            checks.push(self.check_modular_symmetry(cfg)?);
        }
        Ok(VerificationReport {
            subject: self.provenance().clone(),
            seed: cfg.seed,
            checks,
        })
    }
}

/// Choi matrix `Σ e_ij ⊗ Φ(e_ij)` (row-major basis ordering) of a map on `M_n`.
pub fn choi_matrix<F: Fn(&CMatrix) -> CMatrix>(n: usize, phi: F) -> CMatrix {
    let mut c = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let out = phi(&crate::algebra::matrix_unit(n, i, j));
            c.view_mut((i * n, j * n), (n, n)).copy_from(&out);
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_bands() {
        assert_eq!(CheckStatus::classify(1e-11, 1e-10), CheckStatus::Pass);
        assert_eq!(CheckStatus::classify(5e-10, 1e-10), CheckStatus::Inconclusive);
        assert_eq!(CheckStatus::classify(2e-9, 1e-10), CheckStatus::Fail);
        assert_eq!(CheckStatus::classify(f64::NAN, 1e-10), CheckStatus::Fail);
    }

    #[test]
    fn choi_of_identity_and_transpose() {
        let id = choi_matrix(3, |x| x.clone());
        let e = herm_eig(&id).unwrap();
        assert!(e.min().abs() < 1e-14);
        assert!((e.max() - 3.0).abs() < 1e-14);
        let tr = choi_matrix(3, |x| x.transpose());
        let e = herm_eig(&tr).unwrap();
        assert!((e.min() + 1.0).abs() < 1e-14);
    }
}
