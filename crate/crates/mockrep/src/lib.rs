//! Mock metaplectic representations of semidirect products ℝⁿ ⋊ H.
//!
//! A [`system::SemidirectSystem`] describes the two actions of H, the intertwining
//! map Φ and the orbit data of Y = Φ(X). On top of it the crate provides the
//! representation U_g, fiber measures, orbit disintegrations, the voice transform
//! on quadrature grids, and admissibility checks. Five built-in systems live in
//! [`systems`].

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admissibility;
pub mod cli;
pub mod coarea;
pub mod error;
pub mod field;
pub mod orbit;
pub mod quadrature;
pub mod representation;
pub mod system;
pub mod systems;
pub mod transform;

pub use error::{Error, Result};
pub use field::Field;
pub use system::{GroupElement, SemidirectSystem, SystemRef};
