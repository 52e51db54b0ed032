//! Heisenberg chains at finite volume, their Gibbs states and the
//! Dirichlet forms obtained by smearing the modular flow.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::{gibbs_state, paulis, AlgebraDescriptor, Element, State};
use crate::builders::elementary_trace_form;
use crate::error::{Error, Result};
use crate::forms::{FormOperator, Provenance};
use crate::numeric::{c, cr, gauss_legendre, herm_eig, kron, op_norm, CMatrix, TolerancePolicy};
use crate::sampling::{gaussian_matrix, rng_for, stream_id};
use crate::standard_form::StandardSpace;

/// Largest chain the dense code accepts by default.
pub const MAX_SITES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinChainSpec {
    pub sites: usize,
    /// `coupling[d − 1] = J(d)`; the range is the length of this list.
    pub coupling: Vec<f64>,
    pub field: f64,
    pub boundary: Boundary,
    /// Decay rate `λ` used by `phi_norm`.
    #[serde(default = "default_decay")]
    pub decay: f64,
}

fn default_decay() -> f64 {
    1.0
}

impl SpinChainSpec {
    /// Nearest-neighbour chain with coupling `j` and field `h`.
    pub fn heisenberg(sites: usize, j: f64, h: f64) -> Self {
        SpinChainSpec {
            sites,
            coupling: vec![j],
            field: h,
            boundary: Boundary::Open,
            decay: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites == 0 {
            return Err(Error::Precondition("chain needs at least one site".into()));
        }
        if self.sites > MAX_SITES {
            return Err(Error::Budget(format!(
                "2^{} dimensional Hilbert space exceeds the cap of {MAX_SITES} sites",
                self.sites
            )));
        }
        if !(self.decay > 0.0) {
            return Err(Error::Precondition("decay rate must be positive".into()));
        }
        if self.coupling.iter().chain([&self.field]).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("chain couplings"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// Lattice distance between two sites under the boundary condition.
    pub fn distance(&self, x: usize, y: usize) -> usize {
        let d = x.abs_diff(y);
        match self.boundary {
            Boundary::Open => d,
            Boundary::Periodic => d.min(self.sites - d),
        }
    }

    pub fn coupling_at(&self, d: usize) -> f64 {
        if d == 0 {
            0.0
        } else {
            self.coupling.get(d - 1).copied().unwrap_or(0.0)
        }
    }
}

/// `σ_j` acting on site `x` of an `L`-site chain (site 0 is the leftmost
/// tensor factor).
pub fn site_operator(sites: usize, x: usize, j: usize) -> CMatrix {
    let p = paulis();
    let left = CMatrix::identity(1 << x, 1 << x);
    let right_n = 1 << (sites - x - 1);
    kron(&kron(&left, &p[j]), &CMatrix::identity(right_n, right_n))
}

/// `H = Σ_x h σ₃^x + Σ_{x<y} J(d(x,y)) Σ_i σ_i^x σ_i^y`.
pub fn hamiltonian(spec: &SpinChainSpec) -> Result<Element> {
    spec.validate()?;
    let n = spec.sites;
    let mut h = CMatrix::zeros(spec.dim(), spec.dim());
    for x in 0..n {
        if spec.field != 0.0 {
            h += site_operator(n, x, 3) * cr(spec.field);
        }
        for y in x + 1..n {
            let j = spec.coupling_at(spec.distance(x, y));
            if j != 0.0 {
                for i in 1..=3 {
                    h += site_operator(n, x, i) * site_operator(n, y, i) * cr(j);
                }
            }
        }
    }
    Element::from_matrix(h)
}

#[derive(Clone, Debug, Serialize)]
pub struct KmsAudit {
    pub beta: f64,
    /// `max |ω(a α_{iβ}(b)) − ω(ba)| / (‖a‖‖b‖)`.
    pub kms_residual: f64,
    /// `max ‖σ_t(x) − α_{−βt}(x)‖ / ‖x‖` over `t ∈ [−2, 2]`.
    pub flow_residual: f64,
    pub samples: usize,
}

/// Gibbs state of the chain together with its KMS audit.
pub fn kms_state(spec: &SpinChainSpec, beta: f64, seed: u64, samples: usize) -> Result<(State, KmsAudit)> {
    if !(beta > 0.0) {
        return Err(Error::Precondition(format!("need beta > 0, got {beta}")));
    }
    let h = hamiltonian(spec)?;
    let state = gibbs_state(&h, beta)?;
    let eh = herm_eig(h.block(0))?;
    let u = &eh.vectors;
    let en = &eh.values;
    let dim = spec.dim();
    let p: Vec<f64> = {
        let e0 = en[0];
        let w: Vec<f64> = en.iter().map(|e| (-beta * (e - e0)).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    };
    let space = StandardSpace::new(state.clone())?;
    let mut rng = rng_for(seed, stream_id("kms_audit"));
    let mut kms = 0.0f64;
    let mut flow = 0.0f64;
    let grid: Vec<f64> = (0..=16).map(|k| -2.0 + 0.25 * k as f64).collect();
    for _ in 0..samples {
        let a = gaussian_matrix(&mut rng, dim, dim);
        let b = gaussian_matrix(&mut rng, dim, dim);
        let (ae, be) = (u.adjoint() * &a * u, u.adjoint() * &b * u);
        // ω(a α_{iβ}(b)) = Σ p_j a_jk e^{−β(E_k − E_j)} b_kj in the energy basis
        let mut lhs = cr(0.0);
        let mut rhs = cr(0.0);
        for j in 0..dim {
            for k in 0..dim {
                lhs += ae[(j, k)] * be[(k, j)] * (p[j] * (-beta * (en[k] - en[j])).exp());
                rhs += be[(j, k)] * ae[(k, j)] * p[j];
            }
        }
        kms = kms.max((lhs - rhs).norm() / (op_norm(&a) * op_norm(&b)));
        let x = Element::from_matrix(a.clone())?;
        for &t in &grid {
            let sigma = space.modular_flow(cr(t), &x);
            let alpha = CMatrix::from_fn(dim, dim, |j, k| {
                ae[(j, k)] * (c(0.0, -beta * t * (en[j] - en[k]))).exp()
            });
            let alpha = u * alpha * u.adjoint();
            flow = flow.max((sigma.block(0) - alpha).norm() / a.norm());
        }
    }
    Ok((
        state,
        KmsAudit {
            beta,
            kms_residual: kms,
            flow_residual: flow,
            samples,
        },
    ))
}

/// One smeared derivation `(x, j)` of the form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParkTerm {
    pub site: usize,
    pub pauli: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParkFormSpec {
    pub terms: Vec<ParkTerm>,
    /// Truncation `T` of the time integral.
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    /// Minimum number of Gauss–Legendre nodes.
    #[serde(default = "default_q")]
    pub q: usize,
}

fn default_t_max() -> f64 {
    3.0
}

fn default_q() -> usize {
    64
}

impl ParkFormSpec {
    /// All sites, Pauli indices `0..=3`.
    pub fn full(sites: usize) -> Self {
        Self::restricted(sites, &[0, 1, 2, 3])
    }

    pub fn restricted(sites: usize, paulis: &[usize]) -> Self {
        let terms = (0..sites)
            .flat_map(|site| paulis.iter().map(move |&pauli| ParkTerm { site, pauli }))
            .collect();
        ParkFormSpec {
            terms,
            t_max: default_t_max(),
            q: default_q(),
        }
    }

    pub fn validate(&self, sites: usize) -> Result<()> {
        if self.q < 8 || !(self.t_max > 0.0) {
            return Err(Error::Precondition(format!(
                "quadrature needs Q >= 8 and T > 0, got Q={} T={}",
                self.q, self.t_max
            )));
        }
        if let Some(t) = self.terms.iter().find(|t| t.site >= sites || t.pauli > 3) {
            return Err(Error::Precondition(format!("invalid term {t:?}")));
        }
        Ok(())
    }
}

/// `f₀(t) = 1/cosh(2πt)`.
pub fn smearing(t: f64) -> f64 {
    1.0 / (2.0 * PI * t).cosh()
}

/// `∫ f₀(t) e^{iωt} dt = 1/(2 cosh(ω/4))`.
pub fn smearing_fourier(omega: f64) -> f64 {
    0.5 / (omega / 4.0).cosh()
}

/// `∫_{|t|>T} f₀ ≤ 2e^{−2πT}/π`.
pub fn smearing_tail(t_max: f64) -> f64 {
    2.0 * (-2.0 * PI * t_max).exp() / PI
}

#[derive(Clone, Debug, Serialize)]
pub struct ParkReport {
    pub t_max: f64,
    /// Resolution-based starting node count.
    pub q0: usize,
    pub q_used: usize,
    /// Truncation bound relative to `‖L‖`.
    pub tail_bound: f64,
    /// `(Q, ‖L_{2Q} − L_Q‖/‖L‖)` for each doubling performed.
    pub refinements: Vec<(usize, f64)>,
}

/// Quadrature-independent pieces: the `t = 0` kernel `K = Σ M₀*M₀` and the
/// frequency `ω_r = ln λ_p − ln λ_q` of each eigen-coordinate index.
struct ParkKernel {
    k: CMatrix,
    omega: Vec<f64>,
    /// `‖Σ M(t)*M(t)‖`, independent of `t` since `M(t) = V_t M₀ V_t*`.
    k_norm: f64,
}

fn park_kernel(space: &StandardSpace, ops: &[CMatrix]) -> ParkKernel {
    let e = &space.state().spectra()[0];
    let ll = &space.log_eigenvalues()[0];
    let n = e.dim();
    let id = CMatrix::identity(n, n);
    let mut k = CMatrix::zeros(n * n, n * n);
    for a in ops {
        let ae = e.vectors.adjoint() * a * &e.vectors;
        // B₀ = ρ^{1/4} a ρ^{−1/4} in the eigenbasis
        let b0 = CMatrix::from_fn(n, n, |j, l| ae[(j, l)] * (0.25 * (ll[j] - ll[l])).exp());
        let m0 = kron(&id, &b0) - kron(&b0.map(|z| z.conj()), &id);
        k += m0.adjoint() * m0;
    }
    let omega = (0..n * n).map(|r| ll[r % n] - ll[r / n]).collect();
    let k_norm = op_norm(&k);
    ParkKernel { k, omega, k_norm }
}

/// `L'_Q = K ∘ G_Q(ω_r − ω_s)` with `G_Q` the `Q`-node Gauss–Legendre value
/// of `∫_{−T}^{T} f₀(t) e^{i(ω_r−ω_s)t} dt`. Applying the rule entrywise to
/// this scalar integral is the same linear functional as applying it node by
/// node to `f₀(t) M(t)*M(t)`, since `M(t) = V_t M₀ V_t*` with diagonal `V_t`.
fn park_quadrature(kern: &ParkKernel, t_max: f64, q: usize) -> CMatrix {
    let (x, w) = gauss_legendre(q);
    let nodes: Vec<(f64, f64)> = x
        .iter()
        .zip(&w)
        .map(|(x, w)| (t_max * x, t_max * w * smearing(t_max * x)))
        .collect();
    let d = kern.omega.len();
    CMatrix::from_fn(d, d, |r, s| {
        let k = kern.k[(r, s)];
        if k == Complex64::new(0.0, 0.0) {
            return k;
        }
        let delta = kern.omega[r] - kern.omega[s];
        // symmetric nodes: the sine parts cancel
        let g: f64 = nodes.iter().map(|(t, wf)| wf * (delta * t).cos()).sum();
        k * g
    })
}

/// Exact closed form `L' = K ∘ F(ω_r − ω_s)` with `F(ω) = 1/(2cosh(ω/4))`,
/// in eigen coordinates. Used as an independent oracle for the quadrature.
pub fn park_generator_exact(space: &StandardSpace, ops: &[CMatrix]) -> CMatrix {
    let kern = park_kernel(space, ops);
    let d = kern.omega.len();
    let l = CMatrix::from_fn(d, d, |r, s| {
        kern.k[(r, s)] * smearing_fourier(kern.omega[r] - kern.omega[s])
    });
    let w = space.eigen_unitary();
    &w * l * w.adjoint()
}

/// Smallest `64·2^k` whose Bernstein-ellipse rate resolves the largest
/// frequency: `2Q ln ρ ≥ ω_max/4 + 1`, with `ρ = a + √(1+a²)`, `a = 1/(4T)`.
pub fn resolution_nodes(omega_max: f64, t_max: f64) -> usize {
    let a = 0.25 / t_max;
    let ln_rho = (a + (1.0 + a * a).sqrt()).ln();
    let mut q = 64;
    while 2.0 * q as f64 * ln_rho < omega_max / 4.0 + 1.0 {
        q *= 2;
    }
    q
}

const MAX_NODES: usize = 1 << 15;

fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Park's form `Σ_{(x,j)} ∫ f₀(t) ‖(σ_{t−i/4}(a) − j(σ_{t−i/4}(a)))ξ‖² dt`
/// on a faithful state of a full matrix algebra, for Hermitian `a`'s.
///
/// The node count starts at `max(Q, Q₀)` and doubles until successive
/// generators agree to `1e−10` relative, or stop improving at the rounding
/// floor below `tol_prop`.
pub fn park_form_for_state(
    space: &StandardSpace,
    ops: &[CMatrix],
    t_max: f64,
    q_min: usize,
    tol: &TolerancePolicy,
    provenance: Provenance,
) -> Result<(FormOperator, ParkReport)> {
    if space.algebra().n_blocks() != 1 {
        return Err(Error::Precondition(
            "smeared modular derivations need a full matrix algebra".into(),
        ));
    }
    let kern = park_kernel(space, ops);
    let omega_max = {
        let (lo, hi) = kern
            .omega
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &w| {
                (lo.min(w), hi.max(w))
            });
        hi - lo
    };
    let q0 = resolution_nodes(omega_max, t_max);
    let mut q = q_min.max(q0);
    let mut cur = park_quadrature(&kern, t_max, q);
    let mut refinements = Vec::new();
    loop {
        let next = park_quadrature(&kern, t_max, 2 * q);
        let d = rel_diff(&cur, &next);
        refinements.push((q, d));
        cur = next;
        q *= 2;
        if d <= 1e-10 {
            break;
        }
        let stalled = refinements.len() >= 2 && d > 0.5 * refinements[refinements.len() - 2].1;
        if stalled && d <= tol.tol_prop {
            break;
        }
        if q > MAX_NODES {
            return Err(Error::NoConvergence(d));
        }
    }
    let norm = op_norm(&cur);
    let tail_bound = smearing_tail(t_max) * kern.k_norm / norm.max(f64::MIN_POSITIVE);
    if norm > 0.0 && tail_bound > tol.tol_prop {
        // smallest half-integer T with the bound under tolerance
        let need = (2.0 * kern.k_norm / (PI * tol.tol_prop * norm)).ln() / (2.0 * PI);
        return Err(Error::QuadratureTail {
            bound: tail_bound,
            suggested_t: (2.0 * need).ceil() / 2.0,
        });
    }
    let w = space.eigen_unitary();
    let l = &w * cur * w.adjoint();
    let form = FormOperator::new(space.clone(), l, provenance)?;
    Ok((
        form,
        ParkReport {
            t_max,
            q0,
            q_used: q,
            tail_bound,
            refinements,
        },
    ))
}

fn term_ops(chain: &SpinChainSpec, spec: &ParkFormSpec) -> Vec<CMatrix> {
    spec.terms
        .iter()
        .filter(|t| t.pauli != 0)
        .map(|t| site_operator(chain.sites, t.site, t.pauli))
        .collect()
}

/// Park's form for the Gibbs state of `chain` at inverse temperature `beta`.
pub fn park_form(
    chain: &SpinChainSpec,
    beta: f64,
    spec: &ParkFormSpec,
    tol: &TolerancePolicy,
) -> Result<(FormOperator, ParkReport)> {
    spec.validate(chain.sites)?;
    if !(beta > 0.0) {
        return Err(Error::Precondition(format!("need beta > 0, got {beta}")));
    }
    let h = hamiltonian(chain)?;
    let space = StandardSpace::new(gibbs_state(&h, beta)?)?;
    let prov = Provenance::new("park", json!({"chain": chain, "beta": beta, "spec": spec}));
    park_form_for_state(&space, &term_ops(chain, spec), spec.t_max, spec.q, tol, prov)
}

/// Quadrature convergence table: `(Q, ‖L_{2Q} − L_Q‖/‖L‖)` for `Q = Q₀·2^k`,
/// `k < doublings`, and the ratios between consecutive differences down to
/// the rounding floor.
#[derive(Clone, Debug, Serialize)]
pub struct QuadratureConvergence {
    pub q0: usize,
    pub differences: Vec<(usize, f64)>,
    pub ratios: Vec<f64>,
    pub floor: f64,
}

pub fn park_quadrature_convergence(
    chain: &SpinChainSpec,
    beta: f64,
    spec: &ParkFormSpec,
    doublings: usize,
) -> Result<QuadratureConvergence> {
    spec.validate(chain.sites)?;
    let h = hamiltonian(chain)?;
    let space = StandardSpace::new(gibbs_state(&h, beta)?)?;
    let kern = park_kernel(&space, &term_ops(chain, spec));
    let omega_max = kern.omega.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - kern.omega.iter().cloned().fold(f64::INFINITY, f64::min);
    let q0 = resolution_nodes(omega_max, spec.t_max);
    let mats: Vec<CMatrix> = (0..=doublings)
        .map(|k| park_quadrature(&kern, spec.t_max, q0 << k))
        .collect();
    let differences: Vec<(usize, f64)> = mats
        .windows(2)
        .enumerate()
        .map(|(k, m)| (q0 << k, rel_diff(&m[0], &m[1])))
        .collect();
    // observed rounding noise in L/‖L‖ is around 1e-15; the floor sits above it
    let floor = 64.0 * f64::EPSILON;
    // a difference already under the floor only bounds the ratio from below
    let ratios = differences
        .windows(2)
        .take_while(|w| w[0].1 > floor)
        .map(|w| w[0].1 / w[1].1.max(floor))
        .collect();
    Ok(QuadratureConvergence {
        q0,
        differences,
        ratios,
        floor,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ErgodicityReport {
    pub kernel_dim: usize,
    pub threshold: f64,
    /// Smallest few eigenvalues of `L`.
    pub bottom: Vec<f64>,
    pub ergodic: bool,
}

/// `dim ker L`, counting eigenvalues below `1e−9·‖L‖`.
pub fn ergodicity_check(form: &FormOperator) -> ErgodicityReport {
    let threshold = 1e-9 * form.scale();
    let ev = &form.eig().values;
    let kernel_dim = ev.iter().filter(|&&v| v <= threshold).count();
    ErgodicityReport {
        kernel_dim,
        threshold,
        bottom: ev.iter().take(4).cloned().collect(),
        ergodic: kernel_dim == 1,
    }
}

/// `sup_x Σ_{X∋x} |X| 4^{|X|} e^{λD(X)} ‖Φ_X‖` over the singletons and
/// pairs of the finite chain.
pub fn phi_norm(chain: &SpinChainSpec, lambda: f64) -> f64 {
    (0..chain.sites)
        .map(|x| {
            let single = 4.0 * chain.field.abs();
            let pairs: f64 = (0..chain.sites)
                .filter(|&y| y != x)
                .map(|y| {
                    let d = chain.distance(x, y);
                    2.0 * 16.0 * (lambda * d as f64).exp() * 3.0 * chain.coupling_at(d).abs()
                })
                .sum();
            single + pairs
        })
        .fold(0.0, f64::max)
}

/// `λ/‖Φ‖_λ`; infinite for the zero interaction.
pub fn beta_threshold(chain: &SpinChainSpec, lambda: f64) -> f64 {
    let n = phi_norm(chain, lambda);
    if n == 0.0 {
        f64::INFINITY
    } else {
        lambda / n
    }
}

/// `‖L_park(β) − ½L_F‖ / ‖L_F‖` for each `β`, with `F` the same site
/// operators as commutator derivations over the trace.
pub fn beta_zero_limit(chain: &SpinChainSpec, spec: &ParkFormSpec, betas: &[f64]) -> Result<Vec<(f64, f64)>> {
    let alg = AlgebraDescriptor::full(chain.dim());
    let f: Vec<Element> = term_ops(chain, spec)
        .into_iter()
        .map(Element::from_matrix)
        .collect::<Result<_>>()?;
    let elem = elementary_trace_form(&alg, &f)?;
    let half = elem.generator() * cr(0.5);
    let tol = TolerancePolicy::default();
    betas
        .iter()
        .map(|&b| {
            let (p, _) = park_form(chain, b, spec, &tol)?;
            Ok((b, (p.generator() - &half).norm() / half.norm()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::herm_eigvals;

    #[test]
    fn two_site_heisenberg_spectrum() {
        let h = hamiltonian(&SpinChainSpec::heisenberg(2, 1.0, 0.0)).unwrap();
        let ev = herm_eigvals(h.block(0)).unwrap();
        for (a, b) in ev.iter().zip([-3.0, 1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(h.hermiticity_residual(), 0.0);
        let one = hamiltonian(&SpinChainSpec::heisenberg(1, 1.0, 0.7)).unwrap();
        assert!((one.block(0) - &paulis()[3] * cr(0.7)).norm() < 1e-15);
        assert!(matches!(
            hamiltonian(&SpinChainSpec::heisenberg(11, 1.0, 0.0)),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn periodic_counts_each_pair_once() {
        let mut s = SpinChainSpec::heisenberg(2, 1.0, 0.0);
        s.boundary = Boundary::Periodic;
        let a = hamiltonian(&s).unwrap();
        let b = hamiltonian(&SpinChainSpec::heisenberg(2, 1.0, 0.0)).unwrap();
        assert!(a.sub(&b).unwrap().norm() < 1e-15);
        s.sites = 4;
        assert_eq!(s.distance(0, 3), 1);
    }

    #[test]
    fn kms_audit_is_tight() {
        let (st, audit) = kms_state(&SpinChainSpec::heisenberg(2, 1.0, 0.3), 1.0, 1, 10).unwrap();
        assert!(audit.kms_residual < 1e-12 && audit.flow_residual < 1e-12, "{audit:?}");
        assert!(!st.is_trace());
        let (st, _) = kms_state(&SpinChainSpec::heisenberg(2, 1.0, 0.3), 1e-9, 1, 1).unwrap();
        assert!((st.max_eigenvalue() - 0.25).abs() < 1e-8);
    }

    #[test]
    fn fourier_oracle_matches_smearing() {
        let (x, w) = gauss_legendre(400);
        for om in [0.0, 1.0, 7.5] {
            let v: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| 6.0 * w * smearing(6.0 * x) * (om * 6.0 * x).cos())
                .sum();
            assert!((v - smearing_fourier(om)).abs() < 1e-13, "{om}");
        }
    }

    #[test]
    fn park_matches_closed_form() {
        let chain = SpinChainSpec::heisenberg(2, 1.0, 0.4);
        let tol = TolerancePolicy::default();
        let spec = ParkFormSpec::full(2);
        let (f, rep) = park_form(&chain, 1.0, &spec, &tol).unwrap();
        let exact = park_generator_exact(f.space(), &term_ops(&chain, &spec));
        // the only gap left is the truncated tail of the time integral
        let gap = op_norm(&(f.generator() - &exact)) / op_norm(f.generator());
        assert!(gap <= rep.tail_bound + 1e-12, "{gap} {rep:?}");
        assert!(gap > 1e-12);
        assert!(f.evaluate(f.space().xi_omega()) < 1e-12);
    }

    #[test]
    fn ergodicity() {
        let tol = TolerancePolicy::default();
        let chain = SpinChainSpec::heisenberg(1, 1.0, 0.5);
        let (f, _) = park_form(&chain, 1.0, &ParkFormSpec::full(1), &tol).unwrap();
        assert_eq!(ergodicity_check(&f).kernel_dim, 1);
        let chain = SpinChainSpec::heisenberg(2, 1.0, 0.5);
        let (f, _) = park_form(&chain, 1.0, &ParkFormSpec::full(2), &tol).unwrap();
        assert!(ergodicity_check(&f).ergodic);
        let (f, _) = park_form(&chain, 1.0, &ParkFormSpec::restricted(2, &[3]), &tol).unwrap();
        assert!(ergodicity_check(&f).kernel_dim > 1);
    }

    #[test]
    fn phi_norm_examples() {
        let mut s = SpinChainSpec::heisenberg(3, 0.0, -0.5);
        assert!((phi_norm(&s, 1.0) - 2.0).abs() < 1e-15);
        s.field = 0.0;
        s.coupling = vec![0.25];
        let want = 2.0 * (2.0 * 16.0 * 1f64.exp() * 3.0 * 0.25);
        assert!((phi_norm(&s, 1.0) - want).abs() < 1e-12);
        assert!(beta_threshold(&s, 0.5) > 0.0);
        s.coupling = vec![];
        assert!(beta_threshold(&s, 0.5).is_infinite());
    }

    #[test]
    fn quadrature_tail_is_enforced() {
        let chain = SpinChainSpec::heisenberg(2, 1.0, 0.0);
        let mut spec = ParkFormSpec::full(2);
        spec.t_max = 1.0;
        match park_form(&chain, 1.0, &spec, &TolerancePolicy::default()) {
            Err(Error::QuadratureTail { suggested_t, .. }) => assert!(suggested_t > 1.0),
            other => panic!("expected tail refusal, got {:?}", other.map(|x| x.1)),
        }
    }

    #[test]
    fn quadrature_converges_spectrally() {
        let chain = SpinChainSpec::heisenberg(2, 1.0, 0.0);
        let conv = park_quadrature_convergence(&chain, 1.0, &ParkFormSpec::full(2), 3).unwrap();
        assert!(!conv.ratios.is_empty());
        assert!(conv.ratios.iter().all(|&r| r > 10.0), "{conv:?}");
    }

    #[test]
    fn high_temperature_limit_is_half_the_commutator_form() {
        let chain = SpinChainSpec::heisenberg(2, 1.0, 0.0);
        let r = beta_zero_limit(&chain, &ParkFormSpec::full(2), &[1e-1, 1e-2, 1e-3]).unwrap();
        for w in r.windows(2) {
            let rate = w[0].1 / w[1].1;
            assert!(rate > 8.0 && rate < 12.5, "{r:?}");
        }
        assert!(r[2].1 < 1e-3);
    }
}
