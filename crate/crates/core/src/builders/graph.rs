//! Dirichlet forms on a finite set and the exact Beurling–Deny split of a
//! symmetric Markov generator into jump and killing parts.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::{AlgebraDescriptor, State};
use crate::error::{Error, Result};
use crate::forms::{FormOperator, Provenance};
use crate::numeric::{cr, CMatrix};
use crate::standard_form::StandardSpace;

pub type RationalMatrix = Vec<Vec<BigRational>>;

/// `E[u] = ½ Σ_{x≠y} |u(x) − u(y)|² J(x,y) + Σ_x |u(x)|² k(x)` on `L²(X, m)`.
///
/// The ½ makes each unordered edge count once, so two points joined by
/// `J = 1` give the graph Laplacian `[[1, −1], [−1, 1]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphFormSpec {
    m: Vec<BigRational>,
    jump: RationalMatrix,
    killing: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct GraphFormJson {
    m: Vec<String>,
    jump: Vec<Vec<String>>,
    killing: Vec<String>,
    #[serde(default)]
    diffusion: Option<String>,
}

fn parse_q(s: &str) -> Result<BigRational> {
    if let Ok(q) = BigRational::from_str(s.trim()) {
        return Ok(q);
    }
    let f: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a rational or decimal: {s:?}")))?;
    BigRational::from_float(f).ok_or(Error::NonFinite("graph weight"))
}

/// Exact rational as `"p/q"` (or `"p"`).
pub fn rational_string(q: &BigRational) -> String {
    q.to_string()
}

impl GraphFormSpec {
    pub fn new(m: Vec<BigRational>, jump: RationalMatrix, killing: Vec<BigRational>) -> Result<Self> {
        let n = m.len();
        if n == 0 || jump.len() != n || jump.iter().any(|r| r.len() != n) || killing.len() != n {
            return Err(Error::Dimension("graph data must be n, n x n and n".into()));
        }
        if m.iter().any(|x| !x.is_positive()) {
            return Err(Error::Precondition("measure m must be strictly positive".into()));
        }
        if killing.iter().any(|x| x.is_negative()) {
            return Err(Error::Precondition("killing weights must be nonnegative".into()));
        }
        for x in 0..n {
            if !jump[x][x].is_zero() {
                return Err(Error::Precondition(format!("jump weight J({x},{x}) must vanish")));
            }
            for y in 0..n {
                if jump[x][y].is_negative() || jump[x][y] != jump[y][x] {
                    return Err(Error::Precondition(format!(
                        "jump weights must be symmetric and nonnegative at ({x},{y})"
                    )));
                }
            }
        }
        Ok(GraphFormSpec { m, jump, killing })
    }

    /// Exact conversion of binary floating point weights.
    pub fn from_f64(m: &[f64], jump: &[Vec<f64>], killing: &[f64]) -> Result<Self> {
        let q = |x: f64| BigRational::from_float(x).ok_or(Error::NonFinite("graph weight"));
        GraphFormSpec::new(
            m.iter().map(|&x| q(x)).collect::<Result<_>>()?,
            jump.iter()
                .map(|r| r.iter().map(|&x| q(x)).collect::<Result<_>>())
                .collect::<Result<_>>()?,
            killing.iter().map(|&x| q(x)).collect::<Result<_>>()?,
        )
    }

    pub fn size(&self) -> usize {
        self.m.len()
    }

    pub fn measure(&self) -> &[BigRational] {
        &self.m
    }

    pub fn jump(&self) -> &RationalMatrix {
        &self.jump
    }

    pub fn killing(&self) -> &[BigRational] {
        &self.killing
    }

    /// There is no local part on a finite set.
    pub fn diffusion_part(&self) -> &'static str {
        "structurally zero"
    }

    /// Form matrix `Q` with `E[u] = ūᵀ Q u`.
    pub fn form_matrix(&self) -> RationalMatrix {
        let n = self.size();
        (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| {
                        if x == y {
                            self.jump[x].iter().fold(self.killing[x].clone(), |a, b| a + b)
                        } else {
                            -self.jump[x][y].clone()
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Markov generator `L = m⁻¹Q` acting on functions.
    pub fn generator_exact(&self) -> RationalMatrix {
        self.form_matrix()
            .into_iter()
            .zip(&self.m)
            .map(|(row, mx)| row.into_iter().map(|q| q / mx).collect())
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let s = |v: &[BigRational]| v.iter().map(rational_string).collect::<Vec<_>>();
        serde_json::to_value(GraphFormJson {
            m: s(&self.m),
            jump: self.jump.iter().map(|r| s(r)).collect(),
            killing: s(&self.killing),
            diffusion: Some(self.diffusion_part().into()),
        })
        .expect("plain strings")
    }

    /// Weights may be `"p/q"` strings, integers or decimals.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let norm = |v: &serde_json::Value| -> serde_json::Value {
            match v {
                serde_json::Value::Number(n) => serde_json::Value::String(n.to_string()),
                serde_json::Value::Array(a) => serde_json::Value::Array(
                    a.iter()
                        .map(|x| match x {
                            serde_json::Value::Number(n) => serde_json::Value::String(n.to_string()),
                            serde_json::Value::Array(b) => serde_json::Value::Array(
                                b.iter()
                                    .map(|y| match y {
                                        serde_json::Value::Number(n) => serde_json::Value::String(n.to_string()),
                                        o => o.clone(),
                                    })
                                    .collect(),
                            ),
                            o => o.clone(),
                        })
                        .collect(),
                ),
                o => o.clone(),
            }
        };
        let mut obj = v.clone();
        if let Some(map) = obj.as_object_mut() {
            for key in ["m", "jump", "killing"] {
                if let Some(x) = map.get(key).map(norm) {
                    map.insert(key.into(), x);
                }
            }
        }
        let j: GraphFormJson = serde_json::from_value(obj).map_err(|e| Error::Parse(e.to_string()))?;
        let p = |v: &[String]| v.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>();
        GraphFormSpec::new(
            p(&j.m)?,
            j.jump.iter().map(|r| p(r)).collect::<Result<_>>()?,
            p(&j.killing)?,
        )
    }
}

fn witness(x: usize, y: usize, what: &str, v: &BigRational) -> serde_json::Value {
    json!({"x": x, "y": y, "quantity": what, "value": rational_string(v)})
}

/// Recovers `J(x,y) = −m(x)L(x,y)` and `k(x) = m(x)Σ_y L(x,y)` exactly.
pub fn beurling_deny_extract(l: &RationalMatrix, m: &[BigRational]) -> Result<GraphFormSpec> {
    let n = m.len();
    if l.len() != n || l.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(
            "generator must be n x n for a measure of size n".into(),
        ));
    }
    if m.iter().any(|x| !x.is_positive()) {
        return Err(Error::Precondition("measure m must be strictly positive".into()));
    }
    for x in 0..n {
        for y in 0..x {
            if &m[x] * &l[x][y] != &m[y] * &l[y][x] {
                return Err(Error::Precondition(format!(
                    "generator is not symmetric with respect to m at ({x},{y})"
                )));
            }
        }
    }
    let mut jump = vec![vec![BigRational::zero(); n]; n];
    let mut killing = Vec::with_capacity(n);
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let ml = &m[x] * &l[x][y];
            if ml.is_positive() {
                return Err(Error::NotMarkovian {
                    reason: format!("m(x)L(x,y) > 0 off the diagonal at ({x},{y})"),
                    witness: witness(x, y, "m(x)L(x,y)", &ml),
                });
            }
            jump[x][y] = -ml;
        }
        let k = &m[x] * l[x].iter().fold(BigRational::zero(), |a, b| a + b);
        if k.is_negative() {
            return Err(Error::NotMarkovian {
                reason: format!("negative killing m(x)Σ_y L(x,y) at x={x}"),
                witness: witness(x, x, "killing", &k),
            });
        }
        killing.push(k);
    }
    GraphFormSpec::new(m.to_vec(), jump, killing)
}

/// The graph form on `ℂ^X` with the state `p = m/Σm`; the standard-space
/// generator is `M^{−1/2} Q M^{−1/2}`, isospectral with `L = m⁻¹Q`.
pub fn graph_form(spec: &GraphFormSpec) -> Result<FormOperator> {
    let n = spec.size();
    let total = spec.m.iter().fold(BigRational::zero(), |a, b| a + b);
    let p: Vec<f64> = spec
        .m
        .iter()
        .map(|x| (x / &total).to_f64().unwrap_or(f64::NAN))
        .collect();
    let alg = AlgebraDescriptor::new(vec![1; n])?;
    let space = StandardSpace::new(State::tracial(&alg, &p)?)?;
    let q = spec.form_matrix();
    let mf: Vec<f64> = spec.m.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let l = CMatrix::from_fn(n, n, |x, y| {
        cr(q[x][y].to_f64().unwrap_or(f64::NAN) / (mf[x] * mf[y]).sqrt())
    });
    FormOperator::new(space, l, Provenance::new("graph", spec.to_json()))
}

fn random_small_rational<R: Rng + ?Sized>(rng: &mut R, max_num: i64) -> BigRational {
    let num = rng.random_range(0..=max_num);
    let den = rng.random_range(1..=12i64);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Random graph data with sparse rational weights, used by round-trip tests.
pub fn random_graph_spec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> GraphFormSpec {
    let m: Vec<BigRational> = (0..n)
        .map(|_| random_small_rational(rng, 20) + BigRational::one())
        .collect();
    let mut jump = vec![vec![BigRational::zero(); n]; n];
    for x in 0..n {
        for y in 0..x {
            if rng.random::<f64>() < 0.7 {
                let w = random_small_rational(rng, 30);
                jump[x][y] = w.clone();
                jump[y][x] = w;
            }
        }
    }
    let killing = (0..n)
        .map(|_| {
            if rng.random::<f64>() < 0.5 {
                random_small_rational(rng, 10)
            } else {
                BigRational::zero()
            }
        })
        .collect();
    GraphFormSpec::new(m, jump, killing).expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{Suite, VerifyConfig};
    use crate::sampling::rng_for;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn two_points() {
        let spec = GraphFormSpec::new(
            vec![q(1), q(1)],
            vec![vec![q(0), q(1)], vec![q(1), q(0)]],
            vec![q(0), q(0)],
        )
        .unwrap();
        assert_eq!(spec.generator_exact(), vec![vec![q(1), q(-1)], vec![q(-1), q(1)]]);
        let killed = GraphFormSpec::new(spec.m.clone(), spec.jump.clone(), vec![q(1), q(0)]).unwrap();
        assert_eq!(killed.generator_exact(), vec![vec![q(2), q(-1)], vec![q(-1), q(1)]]);
        let f = graph_form(&spec).unwrap();
        assert!(
            (f.generator() - CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(-1.0), cr(-1.0), cr(1.0)])).norm() < 1e-15
        );
    }

    #[test]
    fn round_trip_is_exact() {
        let mut rng = rng_for(5, 0);
        for _ in 0..50 {
            let spec = random_graph_spec(&mut rng, 5);
            let l = spec.generator_exact();
            let back = beurling_deny_extract(&l, spec.measure()).unwrap();
            assert_eq!(back, spec);
            assert_eq!(back.generator_exact(), l);
        }
    }

    #[test]
    fn positive_off_diagonal_is_rejected() {
        let l = vec![vec![q(-1), q(1)], vec![q(1), q(-1)]];
        match beurling_deny_extract(&l, &[q(1), q(1)]) {
            Err(Error::NotMarkovian { witness, .. }) => assert_eq!(witness["value"], "1"),
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let mut rng = rng_for(6, 0);
        let spec = random_graph_spec(&mut rng, 4);
        let back = GraphFormSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        let j = json!({"m": [1, 2], "jump": [[0, "1/3"], ["1/3", 0]], "killing": [0, 0.5]});
        let s = GraphFormSpec::from_json(&j).unwrap();
        assert_eq!(s.jump()[0][1], BigRational::new(BigInt::from(1), BigInt::from(3)));
    }

    #[test]
    fn graph_forms_are_markov() {
        let mut rng = rng_for(7, 0);
        let spec = random_graph_spec(&mut rng, 4);
        let f = graph_form(&spec).unwrap();
        let cfg = VerifyConfig {
            n_samples: 40,
            ..Default::default()
        };
        let rep = f.verify(Suite::Markov, &cfg).unwrap();
        assert!(rep.all_passed(), "{rep:#?}");
    }
}
