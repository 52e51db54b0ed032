//! Spectra with multiplicities, Poincaré gaps, growth counts and heat traces.

mod chebyshev;
mod gamma;

pub use chebyshev::*;
pub use gamma::*;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::FormOperator;
use crate::numeric::{herm_eigvals, CMatrix, TolerancePolicy};

/// Relative tolerance for grouping eigenvalues into levels.
pub const TOL_SPEC: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Level {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub dimension: usize,
    pub levels: Vec<Level>,
    /// Bottom of the spectrum on `{ξ_ω}^⊥`; absent for non-conservative forms.
    pub gap: Option<f64>,
    /// `β_n = #{eigenvalues ≤ n}` for `n = 0..=n_max`.
    pub beta_counts: Vec<usize>,
    /// `(t, Tr e^{−tL})`.
    pub heat_trace: Vec<(f64, f64)>,
}

/// Groups ascending eigenvalues whose neighbours differ by at most
/// `TOL_SPEC · max(1, max|λ|)`.
pub fn group_levels(values: &[f64]) -> Vec<Level> {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = TOL_SPEC * scale;
    let mut levels: Vec<(f64, usize)> = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for &v in values {
        match levels.last_mut() {
            Some((sum, n)) if v - prev <= tol => {
                *sum += v;
                *n += 1;
            }
            _ => levels.push((v, 1)),
        }
        prev = v;
    }
    levels
        .into_iter()
        .map(|(s, n)| Level {
            value: s / n as f64,
            multiplicity: n,
        })
        .collect()
}

pub fn beta_counts(levels: &[Level], n_max: usize) -> Vec<usize> {
    (0..=n_max)
        .map(|n| {
            levels
                .iter()
                .filter(|l| l.value <= n as f64 + TOL_SPEC * (n as f64).max(1.0))
                .map(|l| l.multiplicity)
                .sum()
        })
        .collect()
}

/// Default heat-trace grid `t ∈ {0.01, 0.1, 1, 10}`.
pub const HEAT_GRID: [f64; 4] = [0.01, 0.1, 1.0, 10.0];

pub fn spectrum(form: &FormOperator) -> SpectralReport {
    let levels = group_levels(&form.eig().values);
    let n_max = form.eig().max().max(0.0).ceil() as usize;
    let tol = TolerancePolicy::default();
    SpectralReport {
        dimension: form.space().dim(),
        beta_counts: beta_counts(&levels, n_max),
        heat_trace: heat_trace(form, &HEAT_GRID).expect("positive grid"),
        gap: poincare_gap(form, 0.0, &tol).ok().map(|g| g.gap),
        levels,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PoincareGap {
    pub gap: f64,
    pub threshold: f64,
    pub passes: bool,
}

/// Bottom of `L` restricted to `{ξ_ω}^⊥`, which is the best constant in
/// `c‖ξ − ⟨ξ_ω, ξ⟩ξ_ω‖² ≤ E[ξ]`.
pub fn poincare_gap(form: &FormOperator, threshold: f64, tol: &TolerancePolicy) -> Result<PoincareGap> {
    let xi = form.space().xi_omega().to_vector();
    let defect = (form.generator() * &xi).norm() / form.scale();
    if defect > tol.tol_psd {
        return Err(Error::NotConservative(form.evaluate(form.space().xi_omega())));
    }
    let d = xi.len();
    if d == 1 {
        return Ok(PoincareGap {
            gap: 0.0,
            threshold,
            passes: threshold <= 0.0,
        });
    }
    // Orthonormal basis of the complement: QR of [ξ_ω | I], first column dropped.
    let mut m = CMatrix::zeros(d, d + 1);
    m.set_column(0, &xi);
    m.view_mut((0, 1), (d, d)).fill_with_identity();
    let q = m.qr().q();
    let comp = q.columns(1, d - 1).into_owned();
    let restricted = comp.adjoint() * form.generator() * &comp;
    let gap = herm_eigvals(&restricted)?[0].max(0.0);
    Ok(PoincareGap {
        gap,
        threshold,
        passes: gap >= threshold,
    })
}

/// `Tr e^{−tL}` for each `t`; `t ≤ 0` is rejected.
pub fn heat_trace(form: &FormOperator, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(t) = t_grid.iter().find(|&&t| !(t > 0.0)) {
        return Err(Error::Precondition(format!("heat trace needs t > 0, got {t}")));
    }
    Ok(t_grid
        .iter()
        .map(|&t| (t, form.eig().values.iter().map(|l| (-t * l).exp()).sum()))
        .collect())
}

/// Raw growth data: counts, roots `β_n^{1/n}` and two tail fits. No limit is
/// claimed from finitely many terms.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    /// `β_n` as decimal strings (they can exceed `u64`).
    pub beta: Vec<String>,
    pub roots: Vec<Option<f64>>,
    /// Least-squares slope of `ln β_n` against `ln n` over the upper half.
    pub poly_exponent: Option<f64>,
    /// Least-squares slope of `ln β_n` against `n` over the upper half.
    pub exp_rate: Option<f64>,
    /// Whether the last roots are non-increasing, a hint that they tend to 1
    /// or to a finite limit.
    pub roots_decreasing_tail: bool,
}

fn slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Growth data from `ln β_n` (natural logs, `None` when `β_n = 0`).
pub fn growth_from_logs(beta: Vec<String>, ln_beta: &[Option<f64>]) -> GrowthReport {
    let roots: Vec<Option<f64>> = ln_beta
        .iter()
        .enumerate()
        .map(|(n, lb)| if n == 0 { None } else { lb.map(|l| (l / n as f64).exp()) })
        .collect();
    let start = (ln_beta.len() / 2).max(1);
    let tail: Vec<(f64, f64)> = ln_beta
        .iter()
        .enumerate()
        .skip(start)
        .filter_map(|(n, lb)| lb.map(|l| (n as f64, l)))
        .collect();
    let ns: Vec<f64> = tail.iter().map(|p| p.0).collect();
    let lns: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|p| p.1).collect();
    let last: Vec<f64> = roots.iter().rev().take(5).filter_map(|r| *r).collect();
    GrowthReport {
        beta,
        poly_exponent: slope(&lns, &ys),
        exp_rate: slope(&ns, &ys),
        roots_decreasing_tail: last.len() >= 2 && last.windows(2).all(|w| w[0] <= w[1] + 1e-15),
        roots,
    }
}

pub fn growth(form: &FormOperator, n_max: usize) -> GrowthReport {
    let levels = group_levels(&form.eig().values);
    let counts = beta_counts(&levels, n_max);
    let ln: Vec<Option<f64>> = counts.iter().map(|&b| (b > 0).then(|| (b as f64).ln())).collect();
    growth_from_logs(counts.iter().map(|b| b.to_string()).collect(), &ln)
}

/// `eigenvalue,multiplicity` rows.
pub fn levels_csv(levels: &[Level]) -> String {
    let mut s = String::from("eigenvalue,multiplicity\n");
    for l in levels {
        s.push_str(&format!("{},{}\n", l.value, l.multiplicity));
    }
    s
}

/// `n,beta_n,root` rows.
pub fn growth_csv(g: &GrowthReport) -> String {
    let mut s = String::from("n,beta_n,root\n");
    for (n, (b, r)) in g.beta.iter().zip(&g.roots).enumerate() {
        let r = r.map(|x| x.to_string()).unwrap_or_default();
        s.push_str(&format!("{n},{b},{r}\n"));
    }
    s
}

/// `t,heat_trace` rows.
pub fn heat_csv(h: &[(f64, f64)]) -> String {
    let mut s = String::from("t,heat_trace\n");
    for (t, v) in h {
        s.push_str(&format!("{t},{v}\n"));
    }
    s
}
