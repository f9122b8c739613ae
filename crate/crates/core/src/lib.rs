//! Casimir-Polder interaction between two ground-state atoms above an
//! infinite, perfectly conducting plate.
//!
//! Three independent routes are provided and cross-checked: the far-zone
//! closed form, the field-correlation single integral (regularized either by
//! contour rotation or by an exponential cutoff), and the far-zone dressed-state
//! double integral. Vacuum field-correlation densities near the plate are
//! available as well. All quantities are in reduced units, `hbar = c = 1`.

#![allow(clippy::needless_range_loop)]
// `!(x > 0.0)` style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atom;
pub mod checks;
pub mod cli;
pub mod correlation;
mod dd;
pub mod error;
pub mod exec;
pub mod extrapolate;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod output;
pub mod potential;
pub mod quadrature;
pub mod tensor;

pub use error::{Error, Result};
