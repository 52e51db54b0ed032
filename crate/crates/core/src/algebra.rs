//! Finite-dimensional *-algebras as direct sums of full matrix blocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{cr, herm_eig, hermiticity_residual, kron, op_norm, CMatrix, CVector, HermEig};

/// Relative eigenvalue floor below which a density matrix is treated as
/// non-faithful. Modular quantities are evaluated in the eigenbasis of ρ, so
/// ratios well below the default psd tolerance stay usable.
pub const FAITHFUL_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraDescriptor {
    block_dims: Vec<usize>,
}

impl AlgebraDescriptor {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::Precondition(format!(
                "an algebra needs at least one block and positive block sizes, got {block_dims:?}"
            )));
        }
        Ok(AlgebraDescriptor { block_dims })
    }

    /// The full matrix algebra `M_n`.
    pub fn full(n: usize) -> Self {
        AlgebraDescriptor::new(vec![n]).expect("n >= 1")
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn n_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// `D = Σ n_k²`, the dimension of the Hilbert–Schmidt space.
    pub fn total_dim(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    /// `Σ n_k`, the size of the block-diagonal matrix realization.
    pub fn matrix_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    /// Offsets of each block inside a vectorized element.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.block_dims.len());
        let mut acc = 0;
        for n in &self.block_dims {
            off.push(acc);
            acc += n * n;
        }
        off
    }

    /// Index of the matrix unit `e_ij` of block `k` in the vectorized basis.
    pub fn vec_index(&self, k: usize, i: usize, j: usize) -> usize {
        let n = self.block_dims[k];
        self.block_offsets()[k] + j * n + i
    }

    pub fn is_commutative(&self) -> bool {
        self.block_dims.iter().all(|&n| n == 1)
    }

    pub fn ampliate(&self, n: usize) -> Self {
        AlgebraDescriptor {
            block_dims: self.block_dims.iter().map(|d| d * n).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    alg: AlgebraDescriptor,
    blocks: Vec<CMatrix>,
}

impl Element {
    pub fn new(alg: &AlgebraDescriptor, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != alg.n_blocks() {
            return Err(Error::Dimension(format!(
                "expected {} blocks, got {}",
                alg.n_blocks(),
                blocks.len()
            )));
        }
        for (b, &n) in blocks.iter().zip(alg.block_dims()) {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::Dimension(format!(
                    "block of shape {}x{} where {n}x{n} was expected",
                    b.nrows(),
                    b.ncols()
                )));
            }
            if !crate::numeric::is_finite(b) {
                return Err(Error::NonFinite("element block"));
            }
        }
        Ok(Element {
            alg: alg.clone(),
            blocks,
        })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension("element must be square".into()));
        }
        let alg = AlgebraDescriptor::full(m.nrows());
        Element::new(&alg, vec![m])
    }

    pub fn zeros(alg: &AlgebraDescriptor) -> Self {
        Element {
            alg: alg.clone(),
            blocks: alg.block_dims().iter().map(|&n| CMatrix::zeros(n, n)).collect(),
        }
    }

    pub fn identity(alg: &AlgebraDescriptor) -> Self {
        Element {
            alg: alg.clone(),
            blocks: alg.block_dims().iter().map(|&n| CMatrix::identity(n, n)).collect(),
        }
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.alg
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMatrix {
        &self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if self.alg != other.alg {
            return Err(Error::Dimension(format!(
                "algebra mismatch: {:?} vs {:?}",
                self.alg.block_dims(),
                other.alg.block_dims()
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Element, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Element> {
        self.check_same(other)?;
        Ok(Element {
            alg: self.alg.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn map_blocks(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Element {
        Element {
            alg: self.alg.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: num_complex::Complex64) -> Element {
        self.map_blocks(|a| a * s)
    }

    pub fn adjoint(&self) -> Element {
        self.map_blocks(|a| a.adjoint())
    }

    /// Operator (C*) norm: the largest block operator norm.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(op_norm).fold(0.0, f64::max)
    }

    pub fn hs_norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    /// Unnormalized trace `Σ_k Tr x_k`.
    pub fn trace(&self) -> num_complex::Complex64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.hs_norm();
        if n == 0.0 {
            return 0.0;
        }
        self.blocks
            .iter()
            .map(|b| (b - b.adjoint()).norm_squared())
            .sum::<f64>()
            .sqrt()
            / n
    }

    /// Concatenation of the column-stacked blocks.
    pub fn to_vector(&self) -> CVector {
        let mut v = Vec::with_capacity(self.alg.total_dim());
        for b in &self.blocks {
            v.extend_from_slice(b.as_slice());
        }
        CVector::from_vec(v)
    }

    pub fn from_vector(alg: &AlgebraDescriptor, v: &[num_complex::Complex64]) -> Result<Element> {
        if v.len() != alg.total_dim() {
            return Err(Error::Dimension(format!(
                "vector of length {} for algebra of dimension {}",
                v.len(),
                alg.total_dim()
            )));
        }
        let mut blocks = Vec::with_capacity(alg.n_blocks());
        let mut off = 0;
        for &n in alg.block_dims() {
            blocks.push(CMatrix::from_column_slice(n, n, &v[off..off + n * n]));
            off += n * n;
        }
        Ok(Element {
            alg: alg.clone(),
            blocks,
        })
    }

    /// Block-diagonal matrix realization in `M_{Σ n_k}`.
    pub fn to_block_diagonal(&self) -> CMatrix {
        let n = self.alg.matrix_dim();
        let mut m = CMatrix::zeros(n, n);
        let mut off = 0;
        for b in &self.blocks {
            let d = b.nrows();
            m.view_mut((off, off), (d, d)).copy_from(b);
            off += d;
        }
        m
    }

    pub fn block_eigs(&self) -> Result<Vec<HermEig>> {
        self.blocks.iter().map(herm_eig).collect()
    }
}

/// `true` iff `a` is Hermitian within `tol` and every block eigenvalue is at
/// least `−tol·‖a‖`.
pub fn is_positive(a: &Element, tol: f64) -> bool {
    positivity_defect(a, tol).is_none()
}

/// `None` when positive; otherwise a short diagnostic.
pub fn positivity_defect(a: &Element, tol: f64) -> Option<String> {
    let herm = a.hermiticity_residual();
    if herm > tol {
        return Some(format!("not Hermitian: relative residual {herm:e}"));
    }
    let eigs = match a.block_eigs() {
        Ok(e) => e,
        Err(e) => return Some(e.to_string()),
    };
    let scale = eigs.iter().map(|e| e.norm()).fold(0.0, f64::max);
    for (k, e) in eigs.iter().enumerate() {
        if e.min() < -tol * scale {
            return Some(format!("block {k} has eigenvalue {:e}", e.min()));
        }
    }
    None
}

/// `a ⊗ I_n` blockwise.
pub fn ampliate(a: &Element, n: usize) -> Element {
    let alg = a.algebra().ampliate(n);
    let id = CMatrix::identity(n, n);
    Element {
        alg,
        blocks: a.blocks().iter().map(|b| kron(b, &id)).collect(),
    }
}

/// A faithful state stored as a block density matrix together with its
/// per-block spectral decomposition.
#[derive(Clone, Debug)]
pub struct State {
    rho: Element,
    is_trace: bool,
    spectra: Vec<HermEig>,
}

impl State {
    /// Validate a density matrix: Hermitian, unit trace, faithful.
    pub fn from_density(rho: Element) -> Result<State> {
        let herm = rho.hermiticity_residual();
        if herm > 1e-12 {
            return Err(Error::NotHermitian(herm));
        }
        let rho = rho.map_blocks(crate::numeric::hermitian_part);
        let spectra = rho.block_eigs()?;
        State::assemble(rho, spectra)
    }

    /// Build from a known spectral decomposition per block (values need not
    /// be normalized; they are rescaled to unit total trace).
    pub fn from_spectra(alg: &AlgebraDescriptor, mut spectra: Vec<HermEig>) -> Result<State> {
        if spectra.len() != alg.n_blocks() {
            return Err(Error::Dimension("one spectral decomposition per block".into()));
        }
        let total: f64 = spectra.iter().flat_map(|e| e.values.iter()).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::NotNormalized(total));
        }
        for e in spectra.iter_mut() {
            for v in e.values.iter_mut() {
                *v /= total;
            }
            // HermEig keeps eigenvalues ascending
            let mut order: Vec<usize> = (0..e.values.len()).collect();
            order.sort_by(|&i, &j| e.values[i].total_cmp(&e.values[j]));
            e.values = order.iter().map(|&i| e.values[i]).collect();
            e.vectors = CMatrix::from_columns(&order.iter().map(|&i| e.vectors.column(i)).collect::<Vec<_>>());
        }
        let blocks = spectra.iter().map(|e| e.reconstruct()).collect();
        let rho = Element::new(alg, blocks)?;
        State::assemble(rho, spectra)
    }

    fn assemble(rho: Element, spectra: Vec<HermEig>) -> Result<State> {
        let tr: f64 = spectra.iter().flat_map(|e| e.values.iter()).sum();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(tr));
        }
        let min = spectra.iter().map(|e| e.min()).fold(f64::INFINITY, f64::min);
        let max = spectra.iter().map(|e| e.max()).fold(0.0, f64::max);
        if !(min > FAITHFUL_FLOOR * max) {
            return Err(Error::NotFaithful { min, max });
        }
        let is_trace = spectra.iter().all(|e| (e.max() - e.min()) <= 1e-12 * max);
        Ok(State { rho, is_trace, spectra })
    }

    /// Tracial state with total weight `w_k` on block `k`: `ρ_k = w_k I/n_k`.
    pub fn tracial(alg: &AlgebraDescriptor, weights: &[f64]) -> Result<State> {
        if weights.len() != alg.n_blocks() || weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::Precondition("one positive weight per block".into()));
        }
        let spectra = alg
            .block_dims()
            .iter()
            .zip(weights)
            .map(|(&n, &w)| HermEig {
                values: vec![w / n as f64; n],
                vectors: CMatrix::identity(n, n),
            })
            .collect();
        State::from_spectra(alg, spectra)
    }

    /// The normalized total trace `x ↦ Σ_k Tr x_k / Σ_k n_k`.
    pub fn normalized_trace(alg: &AlgebraDescriptor) -> State {
        let w: Vec<f64> = alg.block_dims().iter().map(|&n| n as f64).collect();
        State::tracial(alg, &w).expect("positive weights")
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        self.rho.algebra()
    }

    pub fn rho(&self) -> &Element {
        &self.rho
    }

    pub fn is_trace(&self) -> bool {
        self.is_trace
    }

    pub fn spectra(&self) -> &[HermEig] {
        &self.spectra
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectra.iter().map(|e| e.min()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.spectra.iter().map(|e| e.max()).fold(0.0, f64::max)
    }

    /// `ω(x) = Σ_k Tr(ρ_k x_k)`.
    pub fn value(&self, x: &Element) -> Result<num_complex::Complex64> {
        if x.algebra() != self.algebra() {
            return Err(Error::Dimension("state and element live on different algebras".into()));
        }
        Ok(self
            .rho
            .blocks()
            .iter()
            .zip(x.blocks())
            .map(|(r, b)| crate::numeric::hs_inner(r, b))
            .sum())
    }

    /// `ω ⊗ τ_n`, density `ρ ⊗ I/n`.
    pub fn ampliate(&self, n: usize) -> Result<State> {
        let alg = self.algebra().ampliate(n);
        let id = CMatrix::identity(n, n);
        let spectra = self
            .spectra
            .iter()
            .map(|e| {
                let mut values = Vec::with_capacity(e.dim() * n);
                for &v in &e.values {
                    values.extend(std::iter::repeat_n(v / n as f64, n));
                }
                let vectors = kron(&e.vectors, &id);
                // kron keeps the (eigen, copy) ordering; re-sort ascending
                sort_spectrum(values, vectors)
            })
            .collect();
        State::from_spectra(&alg, spectra)
    }
}

fn sort_spectrum(values: Vec<f64>, vectors: CMatrix) -> HermEig {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap().then(i.cmp(&j)));
    let mut v = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        v.set_column(k, &vectors.column(i));
    }
    HermEig {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: v,
    }
}

/// `ρ = e^{−βH}/Tr e^{−βH}` blockwise, shifted by the global minimum
/// eigenvalue of `H` before exponentiating.
pub fn gibbs_state(h: &Element, beta: f64) -> Result<State> {
    if !beta.is_finite() {
        return Err(Error::Precondition("beta must be finite".into()));
    }
    let herm = h.hermiticity_residual();
    if herm > 1e-12 {
        return Err(Error::NotHermitian(herm));
    }
    let eigs = h.block_eigs()?;
    let shift = if beta >= 0.0 {
        eigs.iter().map(|e| e.min()).fold(f64::INFINITY, f64::min)
    } else {
        eigs.iter().map(|e| e.max()).fold(f64::NEG_INFINITY, f64::max)
    };
    let spectra = eigs
        .into_iter()
        .map(|e| HermEig {
            values: e.values.iter().map(|&x| (-beta * (x - shift)).exp()).collect(),
            vectors: e.vectors,
        })
        .map(|e| {
            // for β < 0 the ordering flips
            sort_spectrum(e.values, e.vectors)
        })
        .collect();
    State::from_spectra(h.algebra(), spectra)
}

/// A finite group given by its Cayley table, validated on construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupTableJson", into = "GroupTableJson")]
pub struct GroupTable {
    order: usize,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity: usize,
    name: String,
}

#[derive(Serialize, Deserialize)]
struct GroupTableJson {
    #[serde(default)]
    name: String,
    table: Vec<Vec<usize>>,
}

impl TryFrom<GroupTableJson> for GroupTable {
    type Error = Error;
    fn try_from(j: GroupTableJson) -> Result<Self> {
        GroupTable::from_table(&j.name, j.table)
    }
}

impl From<GroupTable> for GroupTableJson {
    fn from(g: GroupTable) -> Self {
        GroupTableJson {
            name: g.name,
            table: g.table,
        }
    }
}

impl GroupTable {
    pub fn from_table(name: &str, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidGroup("table must be n x n with entries < n".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|s| table[e][s] == s && table[s][e] == s))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    if table[table[a][b]][cc] != table[a][table[b][cc]] {
                        return Err(Error::InvalidGroup(format!("associativity fails at ({a},{b},{cc})")));
                    }
                }
            }
        }
        let mut inverse = vec![0; n];
        for (s, inv) in inverse.iter_mut().enumerate() {
            *inv = (0..n)
                .find(|&t| table[s][t] == identity && table[t][s] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {s} has no inverse")))?;
        }
        Ok(GroupTable {
            order: n,
            table,
            inverse,
            identity,
            name: name.to_string(),
        })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("Z_0".into()));
        }
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        GroupTable::from_table(&format!("Z{n}"), table)
    }

    /// Dihedral group of order `2n`; element `k + n·e` stands for `r^k s^e`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGroup("dihedral group needs n >= 2".into()));
        }
        let decode = |x: usize| (x % n, x / n);
        let table = (0..2 * n)
            .map(|a| {
                (0..2 * n)
                    .map(|b| {
                        let (k1, e1) = decode(a);
                        let (k2, e2) = decode(b);
                        // r^k1 s^e1 r^k2 s^e2 = r^{k1 ± k2} s^{e1+e2}
                        let k = if e1 == 0 { (k1 + k2) % n } else { (k1 + n - k2) % n };
                        k + n * ((e1 + e2) % 2)
                    })
                    .collect()
            })
            .collect();
        GroupTable::from_table(&format!("D{n}"), table)
    }

    /// `"Z<n>"` or `"D<n>"`.
    pub fn by_name(name: &str) -> Result<Self> {
        let (kind, rest) = name.split_at(1.min(name.len()));
        let n: usize = rest
            .parse()
            .map_err(|_| Error::InvalidGroup(format!("unknown group name {name:?}")))?;
        match kind {
            "Z" => GroupTable::cyclic(n),
            "D" => GroupTable::dihedral(n),
            _ => Err(Error::InvalidGroup(format!("unknown group name {name:?}"))),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Conjugacy classes in order of their smallest member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for s in 0..self.order {
            if seen[s] {
                continue;
            }
            let mut cls: Vec<usize> = (0..self.order).map(|g| self.mul(self.mul(g, s), self.inv(g))).collect();
            cls.sort_unstable();
            cls.dedup();
            for &x in &cls {
                seen[x] = true;
            }
            classes.push(cls);
        }
        classes
    }
}

/// JSON form of a matrix: separate real and imaginary row-major arrays.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        MatrixJson {
            re: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, |r| r.len());
        if self.re.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("ragged real part".into()));
        }
        let im_present = !self.im.is_empty();
        if im_present && (self.im.len() != rows || self.im.iter().any(|r| r.len() != cols)) {
            return Err(Error::Parse("imaginary part shape differs from real part".into()));
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| {
            let im = if im_present { self.im[i][j] } else { 0.0 };
            num_complex::Complex64::new(self.re[i][j], im)
        }))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementJson {
    pub block_dims: Vec<usize>,
    pub blocks: Vec<MatrixJson>,
}

impl ElementJson {
    pub fn from_element(e: &Element) -> Self {
        ElementJson {
            block_dims: e.algebra().block_dims().to_vec(),
            blocks: e.blocks().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_element(&self) -> Result<Element> {
        let alg = AlgebraDescriptor::new(self.block_dims.clone())?;
        let blocks = self.blocks.iter().map(|b| b.to_matrix()).collect::<Result<Vec<_>>>()?;
        Element::new(&alg, blocks)
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementJson::from_element(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ElementJson::deserialize(d)?
            .to_element()
            .map_err(serde::de::Error::custom)
    }
}

/// JSON form of a state: its density matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub rho: Element,
}

impl StateJson {
    pub fn to_state(&self) -> Result<State> {
        State::from_density(self.rho.clone())
    }
}

/// Convenience: Pauli matrices `[I, σx, σy, σz]`.
pub fn paulis() -> [CMatrix; 4] {
    use crate::numeric::c;
    let z = cr(0.0);
    let o = cr(1.0);
    [
        CMatrix::identity(2, 2),
        CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        CMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// Matrix unit `e_ij` in `M_n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = cr(1.0);
    m
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    hermiticity_residual(m) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c;
    use crate::sampling::{gaussian_matrix, random_psd, rng_for};

    fn m(n: usize) -> AlgebraDescriptor {
        AlgebraDescriptor::full(n)
    }

    #[test]
    fn descriptor_validation() {
        assert!(AlgebraDescriptor::new(vec![]).is_err());
        assert!(AlgebraDescriptor::new(vec![2, 0]).is_err());
        let a = AlgebraDescriptor::new(vec![2, 3]).unwrap();
        assert_eq!(a.total_dim(), 13);
        assert_eq!(a.block_offsets(), vec![0, 4]);
        assert_eq!(a.vec_index(1, 2, 1), 4 + 3 + 2);
    }

    #[test]
    fn involution_and_identity() {
        let mut rng = rng_for(1, 0);
        let a = Element::from_matrix(gaussian_matrix(&mut rng, 3, 3)).unwrap();
        assert_eq!(a.adjoint().adjoint(), a);
        assert_eq!(Element::identity(&m(3)).mul(&a).unwrap(), a);
    }

    #[test]
    fn c_star_identity_against_singular_values() {
        let mut rng = rng_for(2, 0);
        let g = gaussian_matrix(&mut rng, 3, 3);
        let a = Element::from_matrix(g.clone()).unwrap();
        let smax = g.svd(false, false).singular_values.max();
        let lhs = a.adjoint().mul(&a).unwrap().norm();
        assert!((lhs - smax * smax).abs() < 1e-12 * lhs);
        assert!((a.norm() - smax).abs() < 1e-12 * smax);
    }

    #[test]
    fn mismatched_algebras_rejected() {
        let a = Element::identity(&m(2));
        let b = Element::identity(&m(3));
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn positivity_examples() {
        let mut rng = rng_for(3, 0);
        let g = gaussian_matrix(&mut rng, 3, 3);
        assert!(is_positive(&Element::from_matrix(g.adjoint() * &g).unwrap(), 1e-10));
        let sz = Element::from_matrix(paulis()[3].clone()).unwrap();
        assert!(!is_positive(&sz, 1e-10));
        let tiny = Element::from_matrix(CMatrix::from_diagonal(&CVector::from_vec(vec![cr(1e-14), cr(1.0)]))).unwrap();
        assert!(is_positive(&tiny, 1e-10));
        let nonherm = Element::from_matrix(gaussian_matrix(&mut rng, 2, 2)).unwrap();
        assert!(positivity_defect(&nonherm, 1e-10).unwrap().contains("Hermitian"));
    }

    #[test]
    fn gibbs_examples() {
        let h = Element::from_matrix(paulis()[3].clone()).unwrap();
        let st = gibbs_state(&h, 0.0).unwrap();
        assert!(st.is_trace());
        let st = gibbs_state(&h, 1.0).unwrap();
        let z = (-1f64).exp() + 1f64.exp();
        let r = st.rho().block(0);
        assert!((r[(0, 0)].re - (-1f64).exp() / z).abs() < 1e-15);
        assert!((r[(1, 1)].re - 1f64.exp() / z).abs() < 1e-15);
        assert!(!st.is_trace());
        let comm = r * h.block(0) - h.block(0) * r;
        assert!(comm.norm() < 1e-15);
    }

    #[test]
    fn gibbs_overflow_guard() {
        let h = Element::from_matrix(CMatrix::from_diagonal(&CVector::from_vec(vec![cr(1000.0), cr(1001.0)]))).unwrap();
        let st = gibbs_state(&h, 1.0).unwrap();
        let e = 1.0 / (1.0 + (-1f64).exp());
        assert!((st.rho().block(0)[(0, 0)].re - e).abs() < 1e-14);
    }

    #[test]
    fn non_faithful_rejected() {
        let rho = Element::from_matrix(CMatrix::from_diagonal(&CVector::from_vec(vec![cr(1.0), cr(0.0)]))).unwrap();
        assert!(matches!(State::from_density(rho), Err(Error::NotFaithful { .. })));
    }

    #[test]
    fn ampliation_examples() {
        let mut rng = rng_for(4, 0);
        let a = Element::from_matrix(gaussian_matrix(&mut rng, 2, 2)).unwrap();
        assert_eq!(ampliate(&a, 1), a);
        assert_eq!(ampliate(&a, 3).algebra().block_dims(), &[6]);
        let p = Element::from_matrix(random_psd(&mut rng, 2)).unwrap();
        assert!(is_positive(&ampliate(&p, 3), 1e-12));
        let b = Element::from_matrix(gaussian_matrix(&mut rng, 2, 2)).unwrap();
        let lhs = ampliate(&a.mul(&b).unwrap(), 2);
        let rhs = ampliate(&a, 2).mul(&ampliate(&b, 2)).unwrap();
        assert!(lhs.sub(&rhs).unwrap().hs_norm() < 1e-13);
    }

    #[test]
    fn state_ampliation_is_product_with_trace() {
        let h = Element::from_matrix(paulis()[3].clone()).unwrap();
        let st = gibbs_state(&h, 0.7).unwrap();
        let amp = st.ampliate(2).unwrap();
        let expected = kron(st.rho().block(0), &(CMatrix::identity(2, 2) * cr(0.5)));
        assert!((amp.rho().block(0) - expected).norm() < 1e-15);
    }

    #[test]
    fn group_tables() {
        let z5 = GroupTable::cyclic(5).unwrap();
        assert_eq!(z5.inv(2), 3);
        let d3 = GroupTable::dihedral(3).unwrap();
        assert_eq!(d3.order(), 6);
        assert_eq!(d3.conjugacy_classes().len(), 3);
        assert!(GroupTable::from_table("bad", vec![vec![0, 1], vec![0, 1]]).is_err());
        assert_eq!(GroupTable::by_name("Z4").unwrap().order(), 4);
        assert!(GroupTable::by_name("Q8").is_err());
    }

    #[test]
    fn element_json_round_trip() {
        let alg = AlgebraDescriptor::new(vec![1, 2]).unwrap();
        let e = Element::new(
            &alg,
            vec![
                CMatrix::from_element(1, 1, c(0.5, -1.0)),
                CMatrix::from_row_slice(2, 2, &[c(1., 2.), c(3., 4.), c(5., 6.), c(7., 8.)]),
            ],
        )
        .unwrap();
        let s = serde_json::to_string(&e).unwrap();
        let back: Element = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn group_json_is_validated() {
        let bad = r#"{"name":"x","table":[[0,1],[0,1]]}"#;
        assert!(serde_json::from_str::<GroupTable>(bad).is_err());
        let good = serde_json::to_string(&GroupTable::cyclic(3).unwrap()).unwrap();
        assert_eq!(serde_json::from_str::<GroupTable>(&good).unwrap().order(), 3);
    }

    #[test]
    fn unsorted_spectra_are_sorted() {
        let alg = AlgebraDescriptor::full(3);
        let e = HermEig {
            values: vec![4.0, 2.0, 1.0],
            vectors: CMatrix::identity(3, 3),
        };
        let st = State::from_spectra(&alg, vec![e]).unwrap();
        assert!(!st.is_trace());
        assert_eq!(st.spectra()[0].values, vec![1.0 / 7.0, 2.0 / 7.0, 4.0 / 7.0]);
        assert!((st.rho().block(0)[(0, 0)] - cr(4.0 / 7.0)).norm() < 1e-15);
    }
}
