//! Constructors for the concrete forms: derivation forms, group and torus
//! multipliers, the fermionic number form, the quantum OU form and graph
//! forms on finite sets.

mod clifford;
mod elementary;
mod graph;
mod group;
mod ou;
mod torus;

pub use clifford::*;
pub use elementary::*;
pub use graph::*;
pub use group::*;
pub use ou::*;
pub use torus::*;

use crate::algebra::Element;
use crate::numeric::{left_superop, right_superop, CMatrix};

fn block_superop(x: &Element, f: impl Fn(&CMatrix, usize) -> CMatrix) -> CMatrix {
    let alg = x.algebra();
    let d = alg.total_dim();
    let mut m = CMatrix::zeros(d, d);
    for ((b, &n), off) in x.blocks().iter().zip(alg.block_dims()).zip(alg.block_offsets()) {
        m.view_mut((off, off), (n * n, n * n)).copy_from(&f(b, n));
    }
    m
}

/// Superoperator of `ξ ↦ xξ` on the vectorized standard space.
pub fn left_op(x: &Element) -> CMatrix {
    block_superop(x, left_superop)
}

/// Superoperator of `ξ ↦ ξx` on the vectorized standard space.
pub fn right_op(x: &Element) -> CMatrix {
    block_superop(x, right_superop)
}

/// Superoperator of `ad_x = [x, ·]`.
pub fn commutator_op(x: &Element) -> CMatrix {
    left_op(x) - right_op(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraDescriptor;
    use crate::numeric::c;

    #[test]
    fn superops_act_blockwise() {
        let alg = AlgebraDescriptor::new(vec![1, 2]).unwrap();
        let x = Element::new(
            &alg,
            vec![
                CMatrix::from_element(1, 1, c(2.0, 0.0)),
                CMatrix::from_fn(2, 2, |i, j| c(i as f64, j as f64)),
            ],
        )
        .unwrap();
        let y = Element::new(
            &alg,
            vec![
                CMatrix::from_element(1, 1, c(0.5, 1.0)),
                CMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 1.0)),
            ],
        )
        .unwrap();
        let lhs = left_op(&x) * y.to_vector();
        assert!((lhs - x.mul(&y).unwrap().to_vector()).norm() < 1e-14);
        let rhs = right_op(&x) * y.to_vector();
        assert!((rhs - y.mul(&x).unwrap().to_vector()).norm() < 1e-14);
    }
}
