//! Hermite and Smith normal forms of modules over the ring of integers of a
//! number field, with the supporting ideal, lattice and multi-modular
//! machinery.
//!
//! Matrices follow the row convention throughout: a pseudo-matrix row `A_i`
//! together with its coefficient ideal `a_i` contributes `a_i * A_i` to the
//! module. Elements are coefficient vectors over a fixed integral basis whose
//! first element is 1.

pub mod arith;
pub mod determinant;
pub mod error;
pub mod exact_linalg;
pub mod ideal;
pub mod lattice;
pub mod number_field;
pub mod par;
pub mod pseudo_hnf;
pub mod pseudo_snf;
pub mod redux;
pub mod residue_crt;
pub mod verify;

pub use error::{Error, Result};
pub use exact_linalg::{IntMatrix, RatMatrix};
pub use ideal::FractionalIdeal;
pub use number_field::{FieldElement, NumberField};
pub use pseudo_hnf::PseudoMatrix;
pub use pseudo_snf::BiPseudoMatrix;
