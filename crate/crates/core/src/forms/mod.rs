//! Quadratic forms on `L²(M, ω)` given by their generator.

mod verify;

pub use verify::*;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraDescriptor, Element, MatrixJson, State};
use crate::error::{Error, Result};
use crate::numeric::{cr, herm_eig, hermitian_part, hermiticity_residual, CMatrix, CVector, HermEig};
use crate::standard_form::{StandardSpace, StdVector};

/// Which builder produced a form, and with what parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub builder: String,
    pub params: serde_json::Value,
}

impl Provenance {
    pub fn new(builder: &str, params: serde_json::Value) -> Self {
        Provenance {
            builder: builder.to_string(),
            params,
        }
    }
}

/// A quadratic form `E[ξ] = ⟨ξ, Lξ⟩` stored as its generator `L`.
#[derive(Clone, Debug)]
pub struct FormOperator {
    space: StandardSpace,
    generator: CMatrix,
    provenance: Provenance,
    eig: HermEig,
}

impl FormOperator {
    /// The generator is symmetrized; a visibly non-Hermitian input is an error.
    pub fn new(space: StandardSpace, generator: CMatrix, provenance: Provenance) -> Result<Self> {
        let d = space.dim();
        if generator.nrows() != d || generator.ncols() != d {
            return Err(Error::Dimension(format!(
                "generator is {}x{} but L² has dimension {d}",
                generator.nrows(),
                generator.ncols()
            )));
        }
        if !crate::numeric::is_finite(&generator) {
            return Err(Error::NonFinite("generator"));
        }
        let h = hermiticity_residual(&generator);
        if h > 1e-10 {
            return Err(Error::NotHermitian(h));
        }
        let generator = hermitian_part(&generator);
        let eig = herm_eig(&generator)?;
        Ok(FormOperator {
            space,
            generator,
            provenance,
            eig,
        })
    }

    pub fn space(&self) -> &StandardSpace {
        &self.space
    }

    pub fn state(&self) -> &State {
        self.space.state()
    }

    pub fn generator(&self) -> &CMatrix {
        &self.generator
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn eig(&self) -> &HermEig {
        &self.eig
    }

    /// Operator norm of `L`, or 1 for the zero form (used as a scale).
    pub fn scale(&self) -> f64 {
        let n = self.eig.norm();
        if n > 0.0 {
            n
        } else {
            1.0
        }
    }

    pub fn negated(&self) -> FormOperator {
        let mut p = self.provenance.clone();
        p.builder = format!("negated({})", p.builder);
        FormOperator::new(self.space.clone(), -self.generator.clone(), p).expect("still Hermitian")
    }

    /// `E[ξ] = ⟨ξ, Lξ⟩`.
    pub fn evaluate(&self, xi: &StdVector) -> f64 {
        let v = xi.to_vector();
        v.dotc(&(&self.generator * &v)).re
    }

    /// `E(ξ, η) = ⟨ξ, Lη⟩`.
    pub fn bilinear(&self, xi: &StdVector, eta: &StdVector) -> Complex64 {
        xi.to_vector().dotc(&(&self.generator * eta.to_vector()))
    }

    pub fn apply(&self, xi: &StdVector) -> StdVector {
        let v = &self.generator * xi.to_vector();
        StdVector::from_vector(self.space.algebra(), v.as_slice()).expect("same dimension")
    }

    /// `|⟨ξ,(I−T_t)ξ⟩/t − E[ξ]|` on each `t` of the grid.
    pub fn first_difference(&self, xi: &StdVector, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
        let e = self.evaluate(xi);
        let v = xi.to_vector();
        t_grid
            .iter()
            .map(|&t| {
                if t <= 0.0 {
                    return Err(Error::Precondition("first differences need t > 0".into()));
                }
                let tv = self.semigroup(t)? * &v;
                let q = (v.dotc(&v) - v.dotc(&tv)).re / t;
                Ok((t, (q - e).abs()))
            })
            .collect()
    }

    /// `T_t = e^{−tL}`.
    pub fn semigroup(&self, t: f64) -> Result<CMatrix> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::Precondition(format!("semigroup time must be >= 0, got {t}")));
        }
        if t == 0.0 {
            let d = self.space.dim();
            return Ok(CMatrix::identity(d, d));
        }
        self.eig.map(|x| cr((-t * x).exp()))
    }

    pub fn apply_semigroup(&self, t: f64, xi: &StdVector) -> Result<StdVector> {
        let v = self.semigroup(t)? * xi.to_vector();
        StdVector::from_vector(self.space.algebra(), v.as_slice())
    }

    /// `{10⁻³, 10⁻², 10⁻¹, 1, 10} / ‖L‖`.
    pub fn default_t_grid(&self) -> Vec<f64> {
        let s = self.scale();
        [1e-3, 1e-2, 1e-1, 1.0, 10.0].iter().map(|t| t / s).collect()
    }

    /// `S_t(x) = i_ω^{−1}(T_t i_ω(x))`.
    pub fn lift_to_algebra(&self, t: f64, x: &Element) -> Result<Element> {
        let ix = self.space.embed_i(x);
        let tx = self.apply_semigroup(t, &ix)?;
        Ok(self.space.embed_inverse(&tx))
    }

    /// `W* M W`: a superoperator in eigenbasis-of-ρ coordinates.
    pub fn to_eigen_coordinates(&self, m: &CMatrix) -> CMatrix {
        if self.state().is_trace() {
            return m.clone();
        }
        let w = self.space.eigen_unitary();
        w.adjoint() * m * w
    }

    /// Matrix of `S_t` in eigenbasis-of-ρ coordinates, where `i_ω` is diagonal.
    pub fn lifted_map_eigen(&self, t: f64) -> Result<CMatrix> {
        let tt = self.to_eigen_coordinates(&self.semigroup(t)?);
        let w = self.space.embed_weights();
        Ok(CMatrix::from_fn(tt.nrows(), tt.ncols(), |r, s| {
            tt[(r, s)] * (w[s] / w[r])
        }))
    }

    /// The form `E^n[[ξ_ij]] = Σ E[ξ_ij]` on `M ⊗ M_n` with state `ω ⊗ τ_n`.
    pub fn ampliation_form(&self, n: usize) -> Result<FormOperator> {
        if n == 0 {
            return Err(Error::Precondition("ampliation order must be >= 1".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let state = self.state().ampliate(n)?;
        let space = StandardSpace::new(state)?;
        let alg = self.space.algebra();
        let big = space.algebra();
        let d = space.dim();
        // index of (block k, entry (p,q) of ξ_ij) in both vectorizations
        let small_off = alg.block_offsets();
        let big_off = big.block_offsets();
        let mut coords: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(d);
        for (k, &nk) in alg.block_dims().iter().enumerate() {
            let bn = nk * n;
            for col in 0..bn {
                for row in 0..bn {
                    let (p, i) = (row / n, row % n);
                    let (q, j) = (col / n, col % n);
                    let small = small_off[k] + q * nk + p;
                    let big_idx = big_off[k] + col * bn + row;
                    coords.push((big_idx, small, i, j));
                }
            }
        }
        let mut g = CMatrix::zeros(d, d);
        for &(r, sr, ir, jr) in &coords {
            for &(s, ss, is, js) in &coords {
                if ir == is && jr == js {
                    g[(r, s)] = self.generator[(sr, ss)];
                }
            }
        }
        let prov = Provenance::new("ampliation", serde_json::json!({"n": n, "of": self.provenance}));
        FormOperator::new(space, g, prov)
    }

    /// The coarse-correspondence state built from `e^{−tL}`.
    pub fn coarse_state(&self, t: f64, tol: f64) -> Result<CoarseState> {
        let alg = self.space.algebra();
        if alg.n_blocks() != 1 {
            return Err(Error::Precondition("coarse_state needs a factor (single block)".into()));
        }
        let e0 = self.evaluate(self.space.xi_omega());
        if e0 > tol * self.scale() {
            return Err(Error::NotConservative(e0));
        }
        let n = alg.block_dims()[0];
        let d = n * n;
        let tt = self.semigroup(t)?;
        // i_ω of every matrix unit, vectorized
        let units: Vec<CVector> = (0..d)
            .map(|idx| {
                let (a, cidx) = (idx % n, idx / n);
                let e = crate::algebra::matrix_unit(n, a, cidx);
                self.space.embed_i(&Element::from_matrix(e).unwrap()).to_vector()
            })
            .collect();
        let t_units: Vec<CVector> = units.iter().map(|u| &tt * u).collect();
        // Σ[(c,d),(a,b)] = Φ_t(E_{(ab),(cd)}) = ⟨i(e_bd), T i(e_ac)⟩
        let vi = |i: usize, j: usize| j * n + i;
        let mut sigma = CMatrix::zeros(d, d);
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    for dd in 0..n {
                        let val = units[vi(b, dd)].dotc(&t_units[vi(a, cc)]);
                        sigma[(vi(cc, dd), vi(a, b))] = val;
                    }
                }
            }
        }
        let herm = hermiticity_residual(&sigma);
        let sigma = hermitian_part(&sigma);
        let eig = herm_eig(&sigma)?;
        let norm = eig.norm().max(f64::MIN_POSITIVE);
        if eig.min() < -tol * norm || herm > tol {
            return Err(Error::NotMarkovian {
                reason: format!(
                    "e^(-tL) is not in the standard cone of the coarse correspondence (min eigenvalue {:e})",
                    eig.min()
                ),
                witness: serde_json::json!({"t": t, "min_eigenvalue": eig.min()}),
            });
        }
        let tr: f64 = eig.values.iter().sum();
        let omega = eig.map(|x| cr(x.max(0.0).sqrt()))? / cr(tr.sqrt());
        Ok(CoarseState {
            t,
            omega,
            n,
            space: self.space.clone(),
            semigroup: tt,
        })
    }
}

/// `max |Φ_t(x,y) − ⟨ξ_ω, xξ_ωy⟩|` over sampled unit-norm pairs, per `t`.
#[derive(Clone, Debug, Serialize)]
pub struct CoarseConvergence {
    pub t: Vec<f64>,
    pub gap: Vec<f64>,
    /// Gaps are non-increasing in the order the `t`'s were given.
    pub monotone: bool,
    pub samples: usize,
}

impl CoarseConvergence {
    pub fn final_gap(&self) -> f64 {
        self.gap.last().copied().unwrap_or(f64::NAN)
    }
}

impl FormOperator {
    pub fn coarse_convergence(&self, ts: &[f64], seed: u64, samples: usize) -> Result<CoarseConvergence> {
        let alg = self.space.algebra();
        let mut rng = crate::sampling::rng_for(seed, crate::sampling::stream_id("coarse_demo"));
        let unit = |rng: &mut rand_chacha::ChaCha8Rng| {
            let blocks = alg
                .block_dims()
                .iter()
                .map(|&n| crate::sampling::gaussian_matrix(rng, n, n))
                .collect();
            let e = Element::new(alg, blocks).expect("shapes");
            let n = e.norm();
            e.scale(cr(1.0 / n))
        };
        let pairs: Vec<(Element, Element)> = (0..samples).map(|_| (unit(&mut rng), unit(&mut rng))).collect();
        let mut gap = Vec::with_capacity(ts.len());
        for &t in ts {
            let cs = self.coarse_state(t, 1e-10)?;
            let g = pairs
                .iter()
                .map(|(x, y)| (cs.phi(x, y) - cs.limit(x, y)).norm())
                .fold(0.0, f64::max);
            gap.push(g);
        }
        let monotone = gap.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-15);
        Ok(CoarseConvergence {
            t: ts.to_vec(),
            gap,
            monotone,
            samples,
        })
    }
}

/// Schema tag written into every serialized form.
pub const FORM_SCHEMA: &str = "ncdf-spec-v1";

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SpectrumJson {
    values: Vec<f64>,
    vectors: MatrixJson,
}

/// On-disk form: the state by its spectral data (re-diagonalizing `ρ` would
/// lose the small eigenvalues of a low-temperature state), the generator
/// and the provenance.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct FormFile {
    schema: String,
    block_dims: Vec<usize>,
    state: Vec<SpectrumJson>,
    generator: MatrixJson,
    provenance: Provenance,
}

impl FormOperator {
    pub fn to_json(&self) -> serde_json::Value {
        let file = FormFile {
            schema: FORM_SCHEMA.to_string(),
            block_dims: self.space.algebra().block_dims().to_vec(),
            state: self
                .state()
                .spectra()
                .iter()
                .map(|e| SpectrumJson {
                    values: e.values.clone(),
                    vectors: MatrixJson::from_matrix(&e.vectors),
                })
                .collect(),
            generator: MatrixJson::from_matrix(&self.generator),
            provenance: self.provenance.clone(),
        };
        serde_json::to_value(file).expect("form serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<FormOperator> {
        let file: FormFile = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        if file.schema != FORM_SCHEMA {
            return Err(Error::Parse(format!("unsupported schema {:?}", file.schema)));
        }
        let alg = AlgebraDescriptor::new(file.block_dims)?;
        let spectra = file
            .state
            .iter()
            .map(|s| {
                Ok(HermEig {
                    values: s.values.clone(),
                    vectors: s.vectors.to_matrix()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if spectra
            .iter()
            .zip(alg.block_dims())
            .any(|(e, &n)| e.values.len() != n || e.vectors.nrows() != n || e.vectors.ncols() != n)
        {
            return Err(Error::Parse("state spectrum does not match block_dims".into()));
        }
        let state = State::from_spectra(&alg, spectra)?;
        FormOperator::new(StandardSpace::new(state)?, file.generator.to_matrix()?, file.provenance)
    }
}

/// `Ω_t` as a positive Hilbert–Schmidt operator on `L²`, with `Φ_t`.
#[derive(Clone, Debug)]
pub struct CoarseState {
    pub t: f64,
    pub omega: CMatrix,
    n: usize,
    space: StandardSpace,
    semigroup: CMatrix,
}

impl CoarseState {
    /// `⟨Ω_t, (x ⊗ y°) Ω_t⟩` where `(x⊗y°)ξ = xξy`.
    pub fn phi(&self, x: &Element, y: &Element) -> Complex64 {
        let n = self.n;
        let m = crate::numeric::left_superop(x.block(0), n) * crate::numeric::right_superop(y.block(0), n);
        crate::numeric::hs_inner(&self.omega, &(m * &self.omega))
    }

    /// `(i_ω(y*) | e^{−tL} i_ω(x))`, the defining formula.
    pub fn phi_direct(&self, x: &Element, y: &Element) -> Complex64 {
        let ix = self.space.embed_i(x).to_vector();
        let iy = self.space.embed_i(&y.adjoint()).to_vector();
        iy.dotc(&(&self.semigroup * ix))
    }

    /// The `t → 0` target `⟨ξ_ω, x ξ_ω y⟩`.
    pub fn limit(&self, x: &Element, y: &Element) -> Complex64 {
        let xi = self.space.xi_omega();
        let v = self.space.right(&self.space.left(x, xi), y);
        xi.inner(&v)
    }

    /// Smallest eigenvalue of `Ω_t` (it is positive by construction).
    pub fn min_eigenvalue(&self) -> f64 {
        herm_eig(&self.omega).map(|e| e.min()).unwrap_or(f64::NAN)
    }
}
