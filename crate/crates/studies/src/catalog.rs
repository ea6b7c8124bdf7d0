//! Named reference functions for convergence studies.
//!
//! The trigonometric and bump functions are 1-periodic in every variable,
//! so sampling them on `N` sites at spacing `h = 1/N` gives seam-free
//! periodic data. The cubic is not periodic and is only measured on an
//! interior window.

use std::f64::consts::PI;
use std::str::FromStr;

use latinterp::interp::SmoothFunction;
use latinterp::quasi::Polynomial;
use serde::Serialize;

use crate::error::{Result, StudyError};

const TAU: f64 = 2.0 * PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogName {
    /// `Π sin(2πx_i)`.
    Trig,
    /// `Π exp(cos 2πx_i)`.
    Bump,
    /// `x₁³ − 2x₁x_d + 0.5`, not periodic.
    Cubic,
}

impl FromStr for CatalogName {
    type Err = StudyError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trig" | "sin" => Ok(Self::Trig),
            "bump" => Ok(Self::Bump),
            "cubic" | "polynomial" => Ok(Self::Cubic),
            other => Err(StudyError::Config(format!(
                "unknown test function '{other}'"
            ))),
        }
    }
}

impl CatalogName {
    pub fn label(self) -> &'static str {
        match self {
            Self::Trig => "trig",
            Self::Bump => "bump",
            Self::Cubic => "cubic",
        }
    }

    pub fn is_periodic(self) -> bool {
        !matches!(self, Self::Cubic)
    }
}

/// A catalog function in `d` variables with derivatives up to order 3.
#[derive(Clone, Debug)]
pub struct CatalogFunction {
    name: CatalogName,
    dim: usize,
    cubic: Option<Polynomial<f64>>,
}

impl CatalogFunction {
    pub fn new(name: CatalogName, dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(StudyError::Config(format!("dimension {dim} not in 1..=3")));
        }
        let cubic = match name {
            CatalogName::Cubic => {
                let mut mixed = vec![0; dim];
                mixed[0] += 1;
                mixed[dim - 1] += 1;
                let mut x3 = vec![0; dim];
                x3[0] = 3;
                Some(Polynomial::new(
                    dim,
                    vec![(x3, 1.0), (mixed, -2.0), (vec![0; dim], 0.5)],
                )?)
            }
            _ => None,
        };
        Ok(Self { name, dim, cubic })
    }

    pub fn name(&self) -> CatalogName {
        self.name
    }

    /// `k`-th derivative of the one-variable factor at `t`.
    fn factor(&self, t: f64, k: u32) -> f64 {
        let (s, c) = (TAU * t).sin_cos();
        match self.name {
            CatalogName::Trig => {
                let w = TAU.powi(k as i32);
                match k % 4 {
                    0 => w * s,
                    1 => w * c,
                    2 => -w * s,
                    _ => -w * c,
                }
            }
            CatalogName::Bump => {
                let f = c.exp();
                match k {
                    0 => f,
                    1 => -TAU * s * f,
                    2 => TAU * TAU * (s * s - c) * f,
                    _ => TAU.powi(3) * s * (3.0 * c + 1.0 - s * s) * f,
                }
            }
            CatalogName::Cubic => unreachable!("cubic is not a product"),
        }
    }
}

impl SmoothFunction<f64> for CatalogFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn max_order(&self) -> usize {
        3
    }

    fn derivative(&self, x: &[f64], order: usize, out: &mut [f64]) -> latinterp::Result<()> {
        if order > 3 {
            return Err(latinterp::Error::UnsupportedOrder {
                requested: order,
                max: 3,
            });
        }
        if let Some(p) = &self.cubic {
            return p.derivative(x, order, out);
        }
        let d = self.dim;
        for (flat, o) in out.iter_mut().enumerate() {
            let mut counts = [0u32; 3];
            let mut rest = flat;
            for _ in 0..order {
                counts[rest % d] += 1;
                rest /= d;
            }
            *o = (0..d).map(|i| self.factor(x[i], counts[i])).product();
        }
        Ok(())
    }
}
