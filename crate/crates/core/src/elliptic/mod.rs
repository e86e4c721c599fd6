//! Weierstrass functions over an arbitrary lattice and the elliptic Newton-map
//! construction from principal-part data.

mod lattice;
mod newton_map;

pub use lattice::Lattice;
pub use newton_map::{fit_field_constant, EllipticNewtonMap, EllipticPrincipalPart};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EllipticError {
    #[error("lattice generators are collinear")]
    DegenerateLattice,
    #[error("principal parts do not sum to zero residue: not an elliptic principal-part system")]
    ResidueSumNonzero,
    #[error("pole order {0} exceeds the supported maximum of 8")]
    PoleOrderTooHigh(usize),
    #[error("empty principal part")]
    EmptyPrincipalPart,
}
