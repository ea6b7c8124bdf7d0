//! Continuous fields `ū`, `ũ` built from lattice coefficients, their
//! evaluation with derivatives, and `L^p` / `W^{k,p}` norms over the unit
//! cells `ξ + [0,1)^d` of the periodic box.

mod field;
mod norms;
mod sample;
mod sampler;

pub use field::{FieldBasis, FieldKind, InterpolantField};
pub use norms::{
    cell_norms, default_quadrature, lp_error, lp_norm_field, lp_norm_on, quadrature_is_exact,
    quadrature_with_degree, sobolev_norm, NormPlan, NormReport,
};
pub use sample::{rescale_factor, sample_to_lattice, FnFunction, SmoothFunction};
pub use sampler::CellSet;
