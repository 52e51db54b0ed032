//! Finite-dimensional noncommutative Dirichlet forms.
//!
//! A Dirichlet form here is a positive self-adjoint generator `L` acting on
//! the Hilbert–Schmidt standard space of a block matrix algebra with a faithful
//! state. The crate builds such generators for a number of classical
//! constructions and checks Markovianity, complete positivity and modular
//! symmetry numerically.

// `!(x > 0.0)` is used on purpose so that NaN fails the guard
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod builders;
pub mod error;
pub mod forms;
pub mod numeric;
pub mod sampling;
pub mod spectral;
pub mod spin;
pub mod standard_form;

pub use error::{Error, Result};
