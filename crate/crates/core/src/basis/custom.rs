//! User-supplied nodal bases loaded from a declarative JSON file.
//!
//! Two kinds are understood:
//!
//! ```json
//! { "format": "latinterp-basis", "version": 1,
//!   "kind": "piecewise_polynomial_1d",
//!   "breakpoints": [-1.0, 0.0, 1.0],
//!   "coefficients": [[1.0, 1.0], [1.0, -1.0]] }
//! ```
//!
//! On cell `[b_i, b_{i+1}]` the function is `Σ_k c_{i,k} (x - b_i)^k`; it is
//! zero outside `[b_0, b_n]`.
//!
//! ```json
//! { "format": "latinterp-basis", "version": 1,
//!   "kind": "simplicial_linear", "dim": 2,
//!   "simplices": [ { "vertices": [[0,0],[1,0],[0,1]], "coefficients": [1,-1,-1] } ] }
//! ```
//!
//! On each simplex the function is `c_0 + c_1 x_1 + … + c_d x_d`; it is zero
//! outside the union of the simplices. Where simplices overlap on a shared
//! face the first one listed wins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::simplex_volume;
use crate::scalar::Scalar;

use super::polytope::{solve_small, Polytope};

pub const BASIS_FORMAT: &str = "latinterp-basis";
pub const BASIS_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisFile {
    pub format: String,
    pub version: u32,
    #[serde(flatten)]
    pub spec: CustomBasisSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CustomBasisSpec {
    #[serde(rename = "piecewise_polynomial_1d")]
    PiecewisePolynomial1d {
        breakpoints: Vec<f64>,
        coefficients: Vec<Vec<f64>>,
    },
    SimplicialLinear {
        dim: usize,
        simplices: Vec<LinearSimplex>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearSimplex {
    pub vertices: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
}

impl BasisFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: BasisFile = serde_json::from_str(text)?;
        if file.format != BASIS_FORMAT {
            return Err(Error::Parse(format!(
                "unknown basis format {:?}",
                file.format
            )));
        }
        if file.version != BASIS_VERSION {
            return Err(Error::Parse(format!(
                "unsupported basis version {}",
                file.version
            )));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Clone, Debug)]
pub(crate) enum CustomBasis<T> {
    Piecewise1d {
        breakpoints: Vec<T>,
        coefficients: Vec<Vec<T>>,
    },
    Simplicial {
        dim: usize,
        simplices: Vec<Vec<Vec<T>>>,
        coefficients: Vec<Vec<T>>,
        /// Per simplex: rows of the inverse edge matrix and base vertex.
        barycentric: Vec<Vec<Vec<T>>>,
    },
}

impl<T: Scalar> CustomBasis<T> {
    pub fn from_spec(spec: &CustomBasisSpec) -> Result<Self> {
        match spec {
            CustomBasisSpec::PiecewisePolynomial1d {
                breakpoints,
                coefficients,
            } => {
                if breakpoints.len() < 2 || coefficients.len() != breakpoints.len() - 1 {
                    return Err(Error::Parse(format!(
                        "{} breakpoints need {} coefficient rows, got {}",
                        breakpoints.len(),
                        breakpoints.len().saturating_sub(1),
                        coefficients.len()
                    )));
                }
                if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Parse(
                        "breakpoints must be strictly increasing".into(),
                    ));
                }
                if breakpoints
                    .iter()
                    .chain(coefficients.iter().flatten())
                    .any(|v| !v.is_finite())
                {
                    return Err(Error::Parse("non-finite basis data".into()));
                }
                Ok(Self::Piecewise1d {
                    breakpoints: breakpoints.iter().map(|&v| T::of(v)).collect(),
                    coefficients: coefficients
                        .iter()
                        .map(|row| row.iter().map(|&v| T::of(v)).collect())
                        .collect(),
                })
            }
            CustomBasisSpec::SimplicialLinear { dim, simplices } => {
                let d = *dim;
                if !(1..=3).contains(&d) || simplices.is_empty() {
                    return Err(Error::Parse(format!("bad simplicial basis, dim {d}")));
                }
                let mut verts = Vec::new();
                let mut coefs = Vec::new();
                let mut bary = Vec::new();
                for (index, s) in simplices.iter().enumerate() {
                    if s.vertices.len() != d + 1
                        || s.vertices.iter().any(|v| v.len() != d)
                        || s.coefficients.len() != d + 1
                    {
                        return Err(Error::Parse(format!("simplex #{index} has wrong shape")));
                    }
                    let v: Vec<Vec<T>> = s
                        .vertices
                        .iter()
                        .map(|p| p.iter().map(|&x| T::of(x)).collect())
                        .collect();
                    let vol = simplex_volume(&v);
                    if vol.abs() <= T::geom_eps() {
                        return Err(Error::DegenerateSimplex {
                            index,
                            volume: vol.to_f64_lossy(),
                        });
                    }
                    let e: Vec<Vec<T>> = (0..d)
                        .map(|r| (0..d).map(|c| v[c + 1][r] - v[0][r]).collect())
                        .collect();
                    let mut rows = vec![vec![T::zero(); d]; d];
                    for col in 0..d {
                        let mut unit = vec![T::zero(); d];
                        unit[col] = T::one();
                        let x = solve_small(e.clone(), unit).ok_or(Error::DegenerateSimplex {
                            index,
                            volume: vol.to_f64_lossy(),
                        })?;
                        for (r, &xv) in x.iter().enumerate() {
                            rows[r][col] = xv;
                        }
                    }
                    verts.push(v);
                    coefs.push(s.coefficients.iter().map(|&c| T::of(c)).collect());
                    bary.push(rows);
                }
                Ok(Self::Simplicial {
                    dim: d,
                    simplices: verts,
                    coefficients: coefs,
                    barycentric: bary,
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Piecewise1d { .. } => 1,
            Self::Simplicial { dim, .. } => *dim,
        }
    }

    pub fn support_radius(&self) -> T {
        match self {
            Self::Piecewise1d { breakpoints, .. } => breakpoints[0]
                .abs()
                .max(breakpoints[breakpoints.len() - 1].abs()),
            Self::Simplicial { simplices, .. } => simplices
                .iter()
                .flatten()
                .flatten()
                .fold(T::zero(), |m, &v| m.max(v.abs())),
        }
    }

    /// Index of the piece used at `x` under the left-limit tie-break, if any.
    fn locate(&self, x: &[T]) -> Option<usize> {
        match self {
            Self::Piecewise1d { breakpoints, .. } => {
                let t = x[0];
                let n = breakpoints.len();
                if t <= breakpoints[0] || t > breakpoints[n - 1] {
                    return None;
                }
                // Cell i with b_i < t <= b_{i+1}.
                (0..n - 1).find(|&i| t > breakpoints[i] && t <= breakpoints[i + 1])
            }
            Self::Simplicial {
                simplices,
                barycentric,
                ..
            } => {
                let tol = T::geom_eps();
                (0..simplices.len()).find(|&s| {
                    bary_coords(&simplices[s][0], &barycentric[s], x)
                        .iter()
                        .all(|&l| l >= -tol)
                })
            }
        }
    }

    pub fn value(&self, x: &[T]) -> T {
        match self {
            Self::Piecewise1d {
                breakpoints,
                coefficients,
            } => {
                // Value is continuous for a Lipschitz basis; the closed left
                // end is included here so that ζ(b_0) is taken from cell 0.
                let t = x[0];
                let n = breakpoints.len();
                if t < breakpoints[0] || t > breakpoints[n - 1] {
                    return T::zero();
                }
                let i = self.locate(x).unwrap_or(0);
                horner(&coefficients[i], t - breakpoints[i])
            }
            Self::Simplicial { coefficients, .. } => match self.locate(x) {
                Some(s) => linear(&coefficients[s], x),
                None => T::zero(),
            },
        }
    }

    pub fn gradient(&self, x: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|v| *v = T::zero());
        let Some(i) = self.locate(x) else { return };
        match self {
            Self::Piecewise1d {
                breakpoints,
                coefficients,
            } => {
                let t = x[0] - breakpoints[i];
                let c = &coefficients[i];
                let mut acc = T::zero();
                for k in (1..c.len()).rev() {
                    acc = acc * t + c[k] * T::of_usize(k);
                }
                out[0] = acc;
            }
            Self::Simplicial { coefficients, .. } => {
                for (o, &c) in out.iter_mut().zip(&coefficients[i][1..]) {
                    *o = c;
                }
            }
        }
    }

    pub fn pieces(&self) -> Vec<Polytope<T>> {
        match self {
            Self::Piecewise1d { breakpoints, .. } => breakpoints
                .windows(2)
                .map(|w| Polytope::from_box(vec![w[0]], vec![w[1]]))
                .collect(),
            Self::Simplicial { simplices, .. } => simplices
                .iter()
                .filter_map(|s| Polytope::from_simplex(s))
                .collect(),
        }
    }

    pub fn piece_degree(&self) -> usize {
        match self {
            Self::Piecewise1d { coefficients, .. } => coefficients
                .iter()
                .map(|c| c.len().saturating_sub(1))
                .max()
                .unwrap_or(0),
            Self::Simplicial { .. } => 1,
        }
    }

    /// Upper bound on `|∇ζ|`.
    pub fn lipschitz_bound(&self) -> T {
        match self {
            Self::Piecewise1d {
                breakpoints,
                coefficients,
            } => breakpoints
                .windows(2)
                .zip(coefficients)
                .map(|(w, c)| {
                    let len = w[1] - w[0];
                    (1..c.len()).fold(T::zero(), |acc, k| {
                        acc + c[k].abs() * T::of_usize(k) * len.powi(k as i32 - 1)
                    })
                })
                .fold(T::zero(), T::max),
            Self::Simplicial { coefficients, .. } => coefficients
                .iter()
                .map(|c| c[1..].iter().fold(T::zero(), |a, &g| a + g * g).sqrt())
                .fold(T::zero(), T::max),
        }
    }
}

fn horner<T: Scalar>(c: &[T], t: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &ck| acc * t + ck)
}

fn linear<T: Scalar>(c: &[T], x: &[T]) -> T {
    x.iter()
        .zip(&c[1..])
        .fold(c[0], |acc, (&xi, &g)| acc + xi * g)
}

fn bary_coords<T: Scalar>(v0: &[T], rows: &[Vec<T>], x: &[T]) -> Vec<T> {
    let mut rest = T::one();
    let mut out = vec![T::zero()];
    for row in rows {
        let l = row
            .iter()
            .zip(x.iter().zip(v0))
            .fold(T::zero(), |a, (&r, (&xi, &vi))| a + r * (xi - vi));
        rest = rest - l;
        out.push(l);
    }
    out[0] = rest;
    out
}
