//! Spectral data of the free orthogonal quantum groups from the Chebyshev
//! recursion, in exact arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{growth_from_logs, GrowthReport};
use crate::error::{Error, Result};

/// `U_k(N)`, `U′_k(N)` for `k = 0..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebySpec {
    n: u32,
    u: Vec<BigInt>,
    du: Vec<BigInt>,
}

pub fn chebyshev(n: u32, n_max: usize) -> Result<ChebySpec> {
    if n < 2 {
        return Err(Error::Precondition(format!("Chebyshev data needs N >= 2, got {n}")));
    }
    let x = BigInt::from(n);
    let mut u = vec![BigInt::one(), x.clone()];
    let mut du = vec![BigInt::zero(), BigInt::one()];
    for k in 2..=n_max.max(1) {
        let next = &x * &u[k - 1] - &u[k - 2];
        let dnext = &u[k - 1] + &x * &du[k - 1] - &du[k - 2];
        u.push(next);
        du.push(dnext);
    }
    u.truncate(n_max + 1);
    du.truncate(n_max + 1);
    Ok(ChebySpec { n, u, du })
}

/// `ln` of a positive big integer without overflowing `f64`.
fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 60;
    (x >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

impl ChebySpec {
    pub fn big_n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn u(&self, k: usize) -> &BigInt {
        &self.u[k]
    }

    pub fn du(&self, k: usize) -> &BigInt {
        &self.du[k]
    }

    /// `λ_k = U′_k(N)/U_k(N)`.
    pub fn lambda(&self, k: usize) -> BigRational {
        BigRational::new(self.du[k].clone(), self.u[k].clone())
    }

    pub fn lambda_f64(&self, k: usize) -> f64 {
        self.lambda(k).to_f64().unwrap_or(f64::INFINITY)
    }

    /// `m_k = U_k(N)²`.
    pub fn multiplicity(&self, k: usize) -> BigInt {
        &self.u[k] * &self.u[k]
    }

    /// Whether both recursions hold exactly at every stored index.
    pub fn recursion_holds(&self) -> bool {
        let x = BigInt::from(self.n);
        let base = self.u[0] == BigInt::one()
            && self.du[0].is_zero()
            && (self.u.len() < 2 || (self.u[1] == x && self.du[1] == BigInt::one()));
        base && (2..self.u.len()).all(|k| {
            self.u[k] == &x * &self.u[k - 1] - &self.u[k - 2]
                && self.du[k] == &self.u[k - 1] + &x * &self.du[k - 1] - &self.du[k - 2]
        })
    }

    /// `k,U_k,lambda_k,m_k` rows with rationals as `p/q`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,U_k,lambda_k,m_k\n");
        for k in 0..self.len() {
            s.push_str(&format!(
                "{k},{},{},{}\n",
                self.u[k],
                self.lambda(k),
                self.multiplicity(k)
            ));
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = (0..self.len())
            .map(|k| {
                serde_json::json!({
                    "k": k,
                    "U": self.u[k].to_string(),
                    "lambda": self.lambda(k).to_string(),
                    "m": self.multiplicity(k).to_string(),
                })
            })
            .collect();
        serde_json::json!({ "N": self.n, "levels": rows })
    }
}

/// `β_n = Σ_{λ_k ≤ n} m_k` for `n = 0..=n_max`, exact. The `λ_k` are
/// increasing and unbounded, so the recursion is extended until
/// `λ_k > n_max`.
pub fn cheby_growth(n: u32, n_max: usize) -> Result<GrowthReport> {
    let mut spec = chebyshev(n, 16)?;
    let bound = BigRational::from_integer(BigInt::from(n_max));
    while spec.lambda(spec.len() - 1) <= bound {
        spec = chebyshev(n, 2 * spec.len())?;
    }
    let mut beta = Vec::with_capacity(n_max + 1);
    let mut ln = Vec::with_capacity(n_max + 1);
    let mut k = 0;
    let mut acc = BigInt::zero();
    for level in 0..=n_max {
        let lim = BigRational::from_integer(BigInt::from(level));
        while spec.lambda(k) <= lim {
            acc += spec.multiplicity(k);
            k += 1;
        }
        ln.push((!acc.is_zero()).then(|| ln_big(&acc)));
        beta.push(acc.to_string());
    }
    Ok(growth_from_logs(beta, &ln))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SeriesVerdict {
    /// `Σ_{k>K} a_k ≤ tail_bound`.
    Certified {
        tail_bound: f64,
    },
    /// Convergent, but the ratio bound only applies from `from_k` on.
    ConvergentUncertified {
        from_k: Option<usize>,
    },
    Divergent,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatSeries {
    pub t: f64,
    /// Last index `K` included in the partial sum.
    pub k_max: usize,
    pub partial_sum: f64,
    /// Limit of `a_{k+1}/a_k`.
    pub limiting_ratio: f64,
    pub verdict: SeriesVerdict,
}

/// Partial sum of `Σ m_k e^{−tλ_k}` through `k_max` with a rigorous tail
/// bound.
///
/// With `N = 2cosh θ`, `m_k = U_k²` and `U_{k+1}/U_k` decreases to `e^θ`,
/// while `λ_k = ((k+1)coth((k+1)θ) − coth θ)/(2 sinh θ)` has increasing
/// increments because `s coth(sθ)` is convex. So `r_k = a_{k+1}/a_k` is
/// non-increasing with limit `e^{2θ − t/(2 sinh θ)}` (zero when `N = 2`),
/// and `Σ_{k>K} a_k ≤ a_{K+1}/(1 − r_{K+1})` whenever `r_{K+1} < 1`.
pub fn cheby_heat_trace(n: u32, t: f64, k_max: usize) -> Result<HeatSeries> {
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("heat trace needs t > 0, got {t}")));
    }
    let spec = chebyshev(n, k_max + 2)?;
    let ln_a = |k: usize| 2.0 * ln_big(spec.u(k)) - t * spec.lambda_f64(k);
    let partial_sum: f64 = (0..=k_max).map(|k| ln_a(k).exp()).sum();
    let limiting_ratio = if n == 2 {
        0.0
    } else {
        let theta = (n as f64 / 2.0).acosh();
        (2.0 * theta - t / (2.0 * theta.sinh())).exp()
    };
    let r_next = (ln_a(k_max + 2) - ln_a(k_max + 1)).exp();
    let verdict = if limiting_ratio >= 1.0 {
        SeriesVerdict::Divergent
    } else if r_next < 1.0 {
        SeriesVerdict::Certified {
            tail_bound: ln_a(k_max + 1).exp() / (1.0 - r_next),
        }
    } else {
        let longer = chebyshev(n, k_max + 4096)?;
        let ln_b = |k: usize| 2.0 * ln_big(longer.u(k)) - t * longer.lambda_f64(k);
        let from_k = (k_max + 1..longer.len() - 1).find(|&k| ln_b(k + 1) < ln_b(k));
        SeriesVerdict::ConvergentUncertified { from_k }
    };
    Ok(HeatSeries {
        t,
        k_max,
        partial_sum,
        limiting_ratio,
        verdict,
    })
}
