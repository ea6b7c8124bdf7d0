//! Experiment harness for the `latinterp` interpolants: convergence-rate
//! ladders, norm-equivalence constants, polynomial reproduction, the
//! extended-hat counterexample and a smoothness measure, with JSON/CSV
//! reports. The `latinterp` binary exposes all of them.

pub mod catalog;
pub mod convergence;
pub mod counterexample;
pub mod ensemble;
pub mod equivalence;
mod error;
pub mod report;
pub mod reproduction;
pub mod smoothness;

use std::fmt;
use std::str::FromStr;

use latinterp::basis::NodalBasis;
use serde::Serialize;

pub use catalog::{CatalogFunction, CatalogName};
pub use convergence::{run_convergence, ConvergenceReport, ConvergenceStudy, InterpolantKind};
pub use counterexample::{run_counterexample, CounterexampleReport};
pub use equivalence::{run_equivalence, EquivalenceReport, EquivalenceStudy};
pub use error::{Result, StudyError};
pub use reproduction::{run_reproduction, ReproductionReport};
pub use smoothness::{run_smoothness_measure, SmoothnessInput, SmoothnessReport};

/// The shipped nodal bases, by CLI name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisChoice {
    Q1,
    /// P1 on the standard partition for the dimension.
    P1,
    /// The 1D extended hat (fails the nodal property).
    Exthat,
}

impl FromStr for BasisChoice {
    type Err = StudyError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q1" => Ok(Self::Q1),
            "p1" => Ok(Self::P1),
            "exthat" | "extended-hat" => Ok(Self::Exthat),
            other => Err(StudyError::Config(format!(
                "unknown basis '{other}' (q1, p1, exthat)"
            ))),
        }
    }
}

impl fmt::Display for BasisChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Q1 => "q1",
            Self::P1 => "p1",
            Self::Exthat => "exthat",
        })
    }
}

impl BasisChoice {
    pub fn nodal(self, dim: usize) -> Result<NodalBasis<f64>> {
        Ok(match self {
            Self::Q1 => NodalBasis::q1(dim)?,
            Self::P1 => NodalBasis::p1_standard(dim)?,
            Self::Exthat if dim == 1 => NodalBasis::extended_hat(),
            Self::Exthat => {
                return Err(StudyError::Config(
                    "the extended hat is one-dimensional".into(),
                ))
            }
        })
    }
}
