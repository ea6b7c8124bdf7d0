use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{halton_points, SmoothedBasis};
use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, LatticeFunction};
use crate::scalar::Scalar;

use super::polynomial::{monomial_exponents, DegreeKind, Polynomial};

/// `ζ̃(x − ξ)` for every lattice `ξ` within reach of `x`, as `(ξ, value)`.
fn translates_at<T: Scalar>(sb: &SmoothedBasis<T>, x: &[T]) -> Vec<(Vec<i64>, T)> {
    let d = x.len();
    let r = sb.support_cells();
    let side = (2 * r + 2) as usize;
    let base: Vec<i64> = x.iter().map(|&t| t.floor().to_i64().unwrap_or(0)).collect();
    let mut out = Vec::new();
    for mut flat in 0..side.pow(d as u32) {
        let mut xi = vec![0i64; d];
        for i in (0..d).rev() {
            xi[i] = base[i] - r + (flat % side) as i64;
            flat /= side;
        }
        let y: Vec<T> = x.iter().zip(&xi).map(|(&a, &b)| a - T::of_i64(b)).collect();
        if y.iter().any(|v| v.abs() >= T::of_i64(r)) {
            continue;
        }
        let v = sb.value(&y);
        if v != T::zero() {
            out.push((xi, v));
        }
    }
    out
}

fn monomial_at(e: &[u32], x: &[f64]) -> f64 {
    e.iter()
        .zip(x)
        .fold(1.0, |p, (&k, &v)| p * v.powi(k as i32))
}

/// The map `S : q ↦ Σ_ξ q(ξ) ζ̃(· − ξ)` on polynomials of degree ≤ 3.
///
/// `S` sends polynomials of degree ≤ 3 to polynomials of the same degree:
/// it preserves affine functions, and any two bases differ by an affine
/// correction, so it is unitriangular on the monomials. It is tabulated by
/// sampling each monomial's image at points of the unit cell and fitting it
/// in the monomial basis; a poor fit is reported as an error. Tabulation is
/// the expensive part, so a map built once serves many right-hand sides.
///
/// Total degree ≤ 3 works for every basis; per-variable degree ≤ 3
/// (multi-cubics) additionally needs a tensor-product analytic backend.
pub struct PreimageMap {
    dim: usize,
    kind: DegreeKind,
    exps: Vec<Vec<u32>>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    fit_residual: f64,
}

impl PreimageMap {
    pub fn new<T: Scalar>(sb: &SmoothedBasis<T>, kind: DegreeKind) -> Result<Self> {
        let d = sb.dim();
        if kind == DegreeKind::PerVariable
            && sb.backend() != crate::basis::Backend::AnalyticTensorCubic
        {
            return Err(Error::InvalidParameter(
                "multi-cubic preimages need a tensor-product smoothed basis".into(),
            ));
        }
        let exps = monomial_exponents(d, 3, kind);
        let n = exps.len();
        let points = halton_points(d, (4 * n).max(24));
        let samples: Vec<Vec<(Vec<i64>, f64)>> = points
            .par_iter()
            .map(|x| {
                let xt: Vec<T> = x.iter().map(|&v| T::of(v)).collect();
                translates_at(sb, &xt)
                    .into_iter()
                    .map(|(xi, v)| (xi, v.to_f64_lossy()))
                    .collect()
            })
            .collect();
        let vander = DMatrix::from_fn(points.len(), n, |k, b| monomial_at(&exps[b], &points[k]));
        let svd = vander.clone().svd(true, true);
        let mut s = DMatrix::<f64>::zeros(n, n);
        let mut fit_residual = 0.0f64;
        for (a, e) in exps.iter().enumerate() {
            let image = DVector::from_iterator(
                points.len(),
                samples.iter().map(|row| {
                    row.iter()
                        .map(|(xi, v)| {
                            v * monomial_at(e, &xi.iter().map(|&c| c as f64).collect::<Vec<_>>())
                        })
                        .sum::<f64>()
                }),
            );
            let coeffs = svd
                .solve(&image, 1e-14)
                .map_err(|e| Error::InvalidParameter(format!("monomial fit failed: {e}")))?;
            fit_residual = fit_residual.max((&vander * &coeffs - &image).amax());
            s.set_column(a, &coeffs);
        }
        // Bound scaled by the largest sampled monomial image; values are O(10).
        if fit_residual > 1e-8 {
            return Err(Error::InvalidParameter(format!(
                "translates do not map cubics to cubics (fit residual {fit_residual:.3e})"
            )));
        }
        Ok(Self {
            dim: d,
            kind,
            exps,
            lu: s.lu(),
            fit_residual,
        })
    }

    pub fn fit_residual(&self) -> f64 {
        self.fit_residual
    }

    /// `w` with `S w = p`.
    pub fn solve<T: Scalar>(&self, p: &Polynomial<T>) -> Result<Polynomial<T>> {
        if p.dim() != self.dim {
            return Err(Error::InvalidParameter(
                "polynomial and basis dimensions differ".into(),
            ));
        }
        let per_var = p
            .terms()
            .iter()
            .map(|(e, _)| *e.iter().max().unwrap_or(&0))
            .max()
            .unwrap_or(0);
        let fits = match self.kind {
            DegreeKind::Total => p.degree() <= 3,
            DegreeKind::PerVariable => per_var <= 3,
        };
        if !fits {
            return Err(Error::DegreeTooHigh {
                degree: p.degree() as usize,
                max: 3,
            });
        }
        let target = DVector::from_iterator(
            self.exps.len(),
            self.exps.iter().map(|e| p.coefficient(e).to_f64_lossy()),
        );
        let c = self
            .lu
            .solve(&target)
            .ok_or_else(|| Error::InvalidParameter("monomial image matrix is singular".into()))?;
        Polynomial::new(
            self.dim,
            self.exps
                .iter()
                .cloned()
                .zip(c.iter().map(|&v| T::of(v)))
                .collect(),
        )
    }
}

/// `w` with `Σ_η w(η) ζ̃(x − η) = p(x)` for all `x`, as a polynomial; see
/// [`PreimageMap`].
pub fn cubic_preimage_polynomial<T: Scalar>(
    p: &Polynomial<T>,
    sb: &SmoothedBasis<T>,
) -> Result<Polynomial<T>> {
    if p.dim() != sb.dim() {
        return Err(Error::InvalidParameter(
            "polynomial and basis dimensions differ".into(),
        ));
    }
    let per_var = p
        .terms()
        .iter()
        .map(|(e, _)| *e.iter().max().unwrap_or(&0))
        .max()
        .unwrap_or(0);
    let kind = if p.degree() <= 3 {
        DegreeKind::Total
    } else if per_var <= 3 && sb.backend() == crate::basis::Backend::AnalyticTensorCubic {
        DegreeKind::PerVariable
    } else {
        return Err(Error::DegreeTooHigh {
            degree: p.degree() as usize,
            max: 3,
        });
    };
    PreimageMap::new(sb, kind)?.solve(p)
}

/// Lattice coefficients `w(ξ)` (literal site coordinates) whose Tilde field
/// equals `p` away from the periodic seam.
pub fn cubic_preimage<T: Scalar>(
    p: &Polynomial<T>,
    sb: &SmoothedBasis<T>,
    domain: &LatticeDomain,
) -> Result<LatticeFunction<T>> {
    let w = cubic_preimage_polynomial(p, sb)?;
    LatticeFunction::from_scalar_fn(domain.clone(), |s| {
        let x: Vec<T> = s.iter().map(|&c| T::of_i64(c)).collect();
        w.eval(&x)
    })
}

/// A rectangular grid of sample points `lo + (hi − lo)·k/(n − 1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleWindow {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub points_per_axis: usize,
}

impl SampleWindow {
    pub fn points(&self) -> Vec<Vec<f64>> {
        let d = self.lo.len();
        let n = self.points_per_axis.max(2);
        (0..n.pow(d as u32))
            .map(|mut flat| {
                let mut x = vec![0.0; d];
                for i in (0..d).rev() {
                    let k = flat % n;
                    flat /= n;
                    x[i] = self.lo[i] + (self.hi[i] - self.lo[i]) * k as f64 / (n - 1) as f64;
                }
                x
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DifferenceReport {
    /// Largest deviation of `F` from its least-squares affine fit.
    pub residual: f64,
    /// Fitted `a + b·x` as `[a, b_1, …, b_d]`.
    pub affine: Vec<f64>,
    pub max_abs: f64,
    pub samples: usize,
}

/// Evaluate `F(x) = Σ_ξ p(ξ) (ζ̃₂ − ζ̃₁)(x − ξ)` on the window (sums over the
/// whole lattice, no periodicity) and measure how far it is from affine.
pub fn two_basis_difference_check<T: Scalar>(
    b1: &SmoothedBasis<T>,
    b2: &SmoothedBasis<T>,
    p: &Polynomial<T>,
    window: &SampleWindow,
) -> Result<DifferenceReport> {
    let d = b1.dim();
    if b2.dim() != d || p.dim() != d || window.lo.len() != d || window.hi.len() != d {
        return Err(Error::InvalidParameter(
            "dimension mismatch in difference check".into(),
        ));
    }
    let points = window.points();
    let f: Vec<f64> = points
        .par_iter()
        .map(|x| {
            let xt: Vec<T> = x.iter().map(|&v| T::of(v)).collect();
            let side = |b: &SmoothedBasis<T>| -> f64 {
                translates_at(b, &xt)
                    .into_iter()
                    .map(|(xi, v)| {
                        let xi_t: Vec<T> = xi.iter().map(|&c| T::of_i64(c)).collect();
                        (p.eval(&xi_t) * v).to_f64_lossy()
                    })
                    .sum()
            };
            side(b2) - side(b1)
        })
        .collect();
    let design = DMatrix::from_fn(points.len(), d + 1, |k, j| {
        if j == 0 {
            1.0
        } else {
            points[k][j - 1]
        }
    });
    let rhs = DVector::from_column_slice(&f);
    let coef = design
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::InvalidParameter(format!("affine fit failed: {e}")))?;
    let residual = (&design * &coef - &rhs).amax();
    Ok(DifferenceReport {
        residual,
        affine: coef.iter().copied().collect(),
        max_abs: f.iter().fold(0.0, |a, v| a.max(v.abs())),
        samples: points.len(),
    })
}
