//! Clifford algebra with its trace, the Fock space of `n` fermionic modes and
//! the number form `Σ ∂_k*∂_k` built from graded derivations.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::{left_op, right_op};
use crate::algebra::{AlgebraDescriptor, Element, State};
use crate::error::Result;
use crate::forms::{FormOperator, Provenance};
use crate::numeric::{c, cr, kron, CMatrix, CVector};
use crate::sampling::{gaussian_matrix, normal};
use crate::standard_form::StandardSpace;

fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
}

fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0)])
}

fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)])
}

/// `a ⊗ b ⊗ …`; the empty product is `[1]`.
fn kron_all(fs: &[CMatrix]) -> CMatrix {
    fs.iter().fold(CMatrix::identity(1, 1), |acc, f| kron(&acc, f))
}

/// Mode `k` (0-based) acts as `Z^{⊗k} ⊗ σ₋ ⊗ I^{⊗(n−k−1)}` with
/// `σ₋ = |0⟩⟨1|`, so the vacuum is `|0…0⟩`.
pub fn jordan_wigner(n: usize) -> Vec<CMatrix> {
    let sm = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)]);
    (0..n)
        .map(|k| {
            let fs: Vec<CMatrix> = (0..n)
                .map(|j| match j.cmp(&k) {
                    std::cmp::Ordering::Less => pauli_z(),
                    std::cmp::Ordering::Equal => sm.clone(),
                    std::cmp::Ordering::Greater => CMatrix::identity(2, 2),
                })
                .collect();
            kron_all(&fs)
        })
        .collect()
}

/// Everything needed to compare the Clifford picture with the Fock picture.
#[derive(Clone, Debug)]
pub struct CliffordModel {
    n: usize,
    algebra: AlgebraDescriptor,
    /// Generators `b_k` of `Cl_n` in block form.
    majoranas: Vec<Element>,
    /// Annihilators on Fock space.
    fock_a: Vec<CMatrix>,
    /// Columns `b^F_S Ω`, indexed like `monomials`.
    segal: CMatrix,
    /// Superoperator of the grading on `L²(Cl_n, τ)`.
    grading: CMatrix,
    /// Ordered monomials `b_S`, `S` encoded as a bit mask.
    monomials: Vec<Element>,
    xi_basis: CMatrix,
}

fn majorana_blocks(n: usize) -> (AlgebraDescriptor, Vec<Element>) {
    let m = n / 2;
    let dim = 1usize << m;
    let odd = n % 2 == 1;
    let alg = if odd {
        AlgebraDescriptor::new(vec![dim, dim]).expect("dims")
    } else {
        AlgebraDescriptor::full(dim)
    };
    let mut mats = Vec::with_capacity(n);
    for k in 0..m {
        for p in [pauli_x(), pauli_y()] {
            let fs: Vec<CMatrix> = (0..m)
                .map(|j| match j.cmp(&k) {
                    std::cmp::Ordering::Less => pauli_z(),
                    std::cmp::Ordering::Equal => p.clone(),
                    std::cmp::Ordering::Greater => CMatrix::identity(2, 2),
                })
                .collect();
            mats.push(kron_all(&fs));
        }
    }
    let parity = kron_all(&vec![pauli_z(); m]);
    let mut out: Vec<Element> = mats
        .into_iter()
        .map(|g| {
            let blocks = if odd { vec![g.clone(), g] } else { vec![g] };
            Element::new(&alg, blocks).expect("block shapes")
        })
        .collect();
    if odd {
        out.push(Element::new(&alg, vec![parity.clone(), -parity]).expect("block shapes"));
    }
    (alg, out)
}

impl CliffordModel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(crate::Error::Precondition("Clifford model needs n >= 1".into()));
        }
        let (algebra, majoranas) = majorana_blocks(n);
        let fock_a = jordan_wigner(n);
        let fdim = 1usize << n;
        let fock_b: Vec<CMatrix> = fock_a.iter().map(|a| a + a.adjoint()).collect();
        let mut vac = CVector::zeros(fdim);
        vac[0] = cr(1.0);
        let mut monomials = Vec::with_capacity(fdim);
        let mut segal = CMatrix::zeros(fdim, fdim);
        for mask in 0..fdim {
            let mut x = Element::identity(&algebra);
            let mut v = CMatrix::identity(fdim, fdim);
            for (k, (b, bf)) in majoranas.iter().zip(&fock_b).enumerate() {
                if mask >> k & 1 == 1 {
                    x = x.mul(b)?;
                    v *= bf;
                }
            }
            segal.set_column(mask, &(v * &vac));
            monomials.push(x);
        }
        let scale = cr(1.0 / (algebra.matrix_dim() as f64).sqrt());
        let d = algebra.total_dim();
        let mut xi_basis = CMatrix::zeros(d, fdim);
        for (s, x) in monomials.iter().enumerate() {
            xi_basis.set_column(s, &(x.to_vector() * scale));
        }
        let mut model = CliffordModel {
            n,
            algebra,
            majoranas,
            fock_a,
            segal,
            grading: CMatrix::zeros(d, d),
            monomials,
            xi_basis,
        };
        let mut g = CMatrix::zeros(d, d);
        for col in 0..d {
            let mut e = vec![cr(0.0); d];
            e[col] = cr(1.0);
            let x = Element::from_vector(&model.algebra, &e)?;
            g.set_column(col, &model.grade(&x).to_vector());
        }
        model.grading = g;
        Ok(model)
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.algebra
    }

    pub fn majoranas(&self) -> &[Element] {
        &self.majoranas
    }

    pub fn annihilators(&self) -> &[CMatrix] {
        &self.fock_a
    }

    pub fn monomials(&self) -> &[Element] {
        &self.monomials
    }

    /// Grading automorphism `b_k ↦ −b_k`.
    pub fn grade(&self, x: &Element) -> Element {
        let m = self.n / 2;
        let parity = kron_all(&vec![pauli_z(); m]);
        let b = x.blocks();
        let blocks = if self.n % 2 == 1 {
            vec![&parity * &b[1] * &parity, &parity * &b[0] * &parity]
        } else {
            vec![&parity * &b[0] * &parity]
        };
        Element::new(&self.algebra, blocks).expect("block shapes")
    }

    /// `∂_k x = (i/2)(b_k x − γ(x) b_k)`.
    pub fn derivation(&self, k: usize, x: &Element) -> Element {
        let b = &self.majoranas[k];
        let d = b
            .mul(x)
            .expect("same algebra")
            .sub(&self.grade(x).mul(b).expect("same algebra"))
            .expect("same algebra");
        d.scale(c(0.0, 0.5))
    }

    fn derivation_superop(&self, k: usize) -> CMatrix {
        let b = &self.majoranas[k];
        (left_op(b) - right_op(b) * &self.grading) * c(0.0, 0.5)
    }

    /// Segal unitary `D: b_S ξ_τ ↦ b_S Ω` as a matrix on the vectorized space.
    pub fn segal_unitary(&self) -> CMatrix {
        &self.segal * self.xi_basis.adjoint()
    }

    pub fn number_operator(&self) -> CMatrix {
        let fdim = 1usize << self.n;
        self.fock_a
            .iter()
            .fold(CMatrix::zeros(fdim, fdim), |acc, a| acc + a.adjoint() * a)
    }

    /// Largest CAR defect `‖{a_j, a_k*} − δ_jk‖`, `‖{a_j, a_k}‖`.
    pub fn car_residual(&self) -> f64 {
        let fdim = 1usize << self.n;
        let id = CMatrix::identity(fdim, fdim);
        let mut worst = 0.0f64;
        for (j, aj) in self.fock_a.iter().enumerate() {
            for (k, ak) in self.fock_a.iter().enumerate() {
                let akd = ak.adjoint();
                let mut anti = aj * &akd + &akd * aj;
                if j == k {
                    anti -= &id;
                }
                worst = worst.max(anti.norm()).max((aj * ak + ak * aj).norm());
            }
        }
        worst
    }

    /// `‖D*D − I‖`.
    pub fn segal_residual(&self) -> f64 {
        let d = self.segal_unitary();
        let n = d.ncols();
        (d.adjoint() * &d - CMatrix::identity(n, n)).norm()
    }

    /// `‖D L D* − N‖` for the number form.
    pub fn segal_equivalence_residual(&self, form: &FormOperator) -> f64 {
        let d = self.segal_unitary();
        (&d * form.generator() * d.adjoint() - self.number_operator()).norm()
    }

    fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        let blocks = self
            .algebra
            .block_dims()
            .iter()
            .map(|&n| gaussian_matrix(rng, n, n))
            .collect();
        Element::new(&self.algebra, blocks).expect("block shapes")
    }

    fn random_fock_clifford<R: Rng + ?Sized>(&self, rng: &mut R) -> CMatrix {
        let fdim = 1usize << self.n;
        let fock_b: Vec<CMatrix> = self.fock_a.iter().map(|a| a + a.adjoint()).collect();
        let mut out = CMatrix::zeros(fdim, fdim);
        for mask in 0..fdim {
            let mut v = CMatrix::identity(fdim, fdim);
            for (k, bf) in fock_b.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    v *= bf;
                }
            }
            out += v * c(normal(rng), normal(rng));
        }
        out
    }

    /// `max |τ₀(AB) − τ₀(BA)|` for the vacuum state on random Clifford elements.
    pub fn vacuum_trace_residual<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> f64 {
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let a = self.random_fock_clifford(rng);
            let b = self.random_fock_clifford(rng);
            let ab = &a * &b;
            let ba = &b * &a;
            let scale = a.norm() * b.norm();
            worst = worst.max((ab[(0, 0)] - ba[(0, 0)]).norm() / scale);
        }
        worst
    }

    /// Relative residual of `∂_k(ab) = ∂_k(a)b + γ(a)∂_k(b)` on random pairs.
    pub fn leibniz_residual<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> f64 {
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let a = self.random_element(rng);
            let b = self.random_element(rng);
            let k = rng.random_range(0..self.n);
            let lhs = self.derivation(k, &a.mul(&b).expect("same"));
            let rhs = self
                .derivation(k, &a)
                .mul(&b)
                .and_then(|x| x.add(&self.grade(&a).mul(&self.derivation(k, &b))?))
                .expect("same");
            worst = worst.max(lhs.sub(&rhs).expect("same").norm() / (a.norm() * b.norm()));
        }
        worst
    }

    /// Relative residual of `∂_k(a*) = −γ((∂_k a)*)` on random elements.
    pub fn graded_adjoint_residual<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> f64 {
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let a = self.random_element(rng);
            let k = rng.random_range(0..self.n);
            let lhs = self.derivation(k, &a.adjoint());
            let rhs = self.grade(&self.derivation(k, &a).adjoint()).scale(cr(-1.0));
            worst = worst.max(lhs.sub(&rhs).expect("same").norm() / a.norm());
        }
        worst
    }

    fn lp_norm(&self, state: &State, x: &Element, p: u32) -> f64 {
        // τ(|x|^p) for p = 2 or 4 via powers of x*x.
        let xx = x.adjoint().mul(x).expect("same");
        let v = match p {
            2 => state.value(&xx).expect("same").re,
            4 => state.value(&xx.mul(&xx).expect("same")).expect("same").re,
            _ => unreachable!("only p = 2, 4"),
        };
        v.max(0.0).powf(1.0 / p as f64)
    }

    /// Largest sampled `‖e^{−tN}x‖₄ / ‖x‖₂`.
    pub fn hypercontractivity<R: Rng + ?Sized>(
        &self,
        form: &FormOperator,
        t: f64,
        rng: &mut R,
        samples: usize,
    ) -> Result<HypercontractivityReport> {
        let state = form.state();
        let mut best = (f64::NEG_INFINITY, None);
        for i in 0..samples {
            let mut coeffs: Vec<Complex64> = self.monomials.iter().map(|_| c(normal(rng), normal(rng))).collect();
            if i % 2 == 0 {
                // Perturbations of 1 probe the sharp direction.
                let eps = 10f64.powf(-2.0 * rng.random::<f64>());
                for z in coeffs.iter_mut() {
                    *z *= eps;
                }
                coeffs[0] += cr(1.0);
            }
            let mut x = Element::zeros(&self.algebra);
            for (m, z) in self.monomials.iter().zip(&coeffs) {
                x = x.add(&m.scale(*z))?;
            }
            let y = form.lift_to_algebra(t, &x)?;
            let r = self.lp_norm(state, &y, 4) / self.lp_norm(state, &x, 2);
            if r > best.0 {
                best = (r, Some(coeffs));
            }
        }
        let witness = best
            .1
            .filter(|_| best.0 > 1.0 + 1e-10)
            .map(|cs| cs.iter().map(|z| [z.re, z.im]).collect());
        Ok(HypercontractivityReport {
            t,
            max_ratio: best.0,
            samples,
            witness,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HypercontractivityReport {
    pub t: f64,
    pub max_ratio: f64,
    pub samples: usize,
    /// Coefficients on the ordered monomials `b_S` of the worst sample, kept
    /// only when it violates `‖e^{−tN}x‖₄ ≤ ‖x‖₂`.
    pub witness: Option<Vec<[f64; 2]>>,
}

/// The number form `Σ ∂_k*∂_k` on `L²(Cl_n, τ)` and the model it came from.
pub fn clifford_number_form(n: usize) -> Result<(FormOperator, CliffordModel)> {
    let model = CliffordModel::new(n)?;
    let space = StandardSpace::new(State::normalized_trace(&model.algebra))?;
    let d = space.dim();
    let mut l = CMatrix::zeros(d, d);
    for k in 0..n {
        let m = model.derivation_superop(k);
        l += m.adjoint() * m;
    }
    let form = FormOperator::new(space, l, Provenance::new("clifford_number", json!({ "n": n })))?;
    Ok((form, model))
}
