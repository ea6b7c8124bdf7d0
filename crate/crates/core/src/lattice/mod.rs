//! Periodic lattice domains, lattice functions, difference operators and
//! discrete norms.

mod deformation;
mod domain;
mod function;
mod invariance;
pub mod io;

pub use deformation::DeformationField;
pub use domain::LatticeDomain;
pub(crate) use function::check_exponent;
pub use function::LatticeFunction;
pub use invariance::{
    translation_defect, DiscreteGradientNorm, ForwardDifference, TranslationInvariant,
};
