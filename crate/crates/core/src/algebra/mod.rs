//! Complex polynomial and rational-function arithmetic: Euclid division,
//! simultaneous root finding, and partial-fraction decomposition.

mod partial;
mod poly;
mod rational;
mod roots;

pub use partial::{partial_fractions, PartialFractions, PoleTerm};
pub use poly::Polynomial;
pub use rational::{classify_point, At, ClassifyMode, PointClass, RationalFunction};
pub use roots::{poly_roots, CLUSTER_RADIUS};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("root finding requires degree >= 1")]
    RootsOfConstant,
    #[error("root iteration did not converge for {poly}")]
    RootsDiverged { poly: String },
    #[error("linear system is singular to working precision")]
    SingularSystem,
}
