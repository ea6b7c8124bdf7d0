use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{Backend, SmoothedBasis};
use crate::error::{Error, Result};
use crate::interp::{CellSet, InterpolantField, SmoothFunction};
use crate::lattice::{LatticeDomain, LatticeFunction};
use crate::quadrature::CellQuadrature;
use crate::scalar::Scalar;

/// Gram matrices with a larger 2-norm condition number are rejected.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// Nodes and weights of a tensor Gauss rule on `[−R, R]^d`, cell by cell.
fn box_rule<T: Scalar>(dim: usize, half_width: i64, order: usize) -> Result<(Vec<Vec<T>>, Vec<T>)> {
    let cell = CellQuadrature::<T>::tensor(dim, order)?;
    let side = (2 * half_width) as usize;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for mut flat in 0..side.pow(dim as u32) {
        let mut c = vec![0i64; dim];
        for slot in c.iter_mut().rev() {
            *slot = (flat % side) as i64 - half_width;
            flat /= side;
        }
        for (t, &w) in cell.nodes().iter().zip(cell.weights()) {
            nodes.push(
                t.iter()
                    .zip(&c)
                    .map(|(&ti, &ci)| ti + T::of_i64(ci))
                    .collect(),
            );
            weights.push(w);
        }
    }
    Ok((nodes, weights))
}

/// The bi-orthogonal dual function
/// `ζ̃*(x) = Σ_{ξ∈X} a_ξ ζ̃(x − ξ)` on `ω̃_0 = [−R, R]^d`, zero outside,
/// with `∫ ζ̃*(x) ζ̃(x − ξ) dx = δ_{ξ,0}` for every `ξ ∈ X`.
#[derive(Clone, Debug)]
pub struct DualBasis<T: Scalar> {
    smoothed: Arc<SmoothedBasis<T>>,
    half_width: i64,
    index: Vec<Vec<i64>>,
    coefficients: Vec<T>,
    gram_condition: f64,
}

/// Summary for reports.
#[derive(Clone, Debug, Serialize)]
pub struct DualSummary {
    pub dim: usize,
    pub functionals: usize,
    pub gram_condition: f64,
    pub coefficients: Vec<(Vec<i64>, f64)>,
    pub max_biorthogonality_residual: f64,
}

/// Build `ζ̃*` for a smoothed basis with the analytic backend.
///
/// `X = { ξ : |ω̃_ξ ∩ ω̃_0| > 0 } = { |ξ|_∞ ≤ 2R − 1 }`. The restricted Gram
/// matrix over `X × X` is integrated exactly (per-cell Gauss order 4, exact
/// to degree 7 per axis) and solved with an SVD; the build fails with
/// `SingularGram` when its condition number exceeds [`MAX_GRAM_CONDITION`].
pub fn build_dual<T: Scalar>(sb: impl Into<Arc<SmoothedBasis<T>>>) -> Result<DualBasis<T>> {
    let smoothed: Arc<SmoothedBasis<T>> = sb.into();
    if smoothed.backend() != Backend::AnalyticTensorCubic {
        return Err(Error::InvalidParameter(
            "the dual basis needs piecewise-polynomial integration, available for the Q1 (analytic) backend only".into(),
        ));
    }
    let d = smoothed.dim();
    let r = smoothed.support_cells();
    let reach = 2 * r - 1;
    let side = (2 * reach + 1) as usize;
    let index: Vec<Vec<i64>> = (0..side.pow(d as u32))
        .map(|mut flat| {
            let mut xi = vec![0i64; d];
            for slot in xi.iter_mut().rev() {
                *slot = (flat % side) as i64 - reach;
                flat /= side;
            }
            xi
        })
        .collect();
    let (nodes, weights) = box_rule::<T>(d, r, 4)?;
    let n = index.len();
    // Basis values at the nodes, node-major.
    let values: Vec<Vec<f64>> = nodes
        .par_iter()
        .map(|x| {
            index
                .iter()
                .map(|xi| {
                    let y: Vec<T> = x.iter().zip(xi).map(|(&a, &b)| a - T::of_i64(b)).collect();
                    smoothed.value(&y).to_f64_lossy()
                })
                .collect()
        })
        .collect();
    let mut gram = DMatrix::<f64>::zeros(n, n);
    for (row, &w) in values.iter().zip(&weights) {
        let w = w.to_f64_lossy();
        for i in 0..n {
            if row[i] == 0.0 {
                continue;
            }
            let wi = w * row[i];
            for j in i..n {
                gram[(i, j)] += wi * row[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            gram[(i, j)] = gram[(j, i)];
        }
    }
    let svd = gram.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if condition > MAX_GRAM_CONDITION {
        return Err(Error::SingularGram { condition });
    }
    let centre = index
        .iter()
        .position(|xi| xi.iter().all(|&c| c == 0))
        .expect("origin in X");
    let mut rhs = DVector::<f64>::zeros(n);
    rhs[centre] = 1.0;
    let a = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::InvalidParameter(format!("Gram solve failed: {e}")))?;
    Ok(DualBasis {
        smoothed,
        half_width: r,
        index,
        coefficients: a.iter().map(|&v| T::of(v)).collect(),
        gram_condition: condition,
    })
}

impl<T: Scalar> DualBasis<T> {
    pub fn dim(&self) -> usize {
        self.smoothed.dim()
    }

    pub fn smoothed(&self) -> &Arc<SmoothedBasis<T>> {
        &self.smoothed
    }

    /// `R` with `supp ζ̃* = [−R, R]^d`.
    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    /// The index set `X`.
    pub fn index(&self) -> &[Vec<i64>] {
        &self.index
    }

    /// `a_ξ` in the order of [`Self::index`].
    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn coefficient(&self, xi: &[i64]) -> T {
        self.index
            .iter()
            .position(|x| x.as_slice() == xi)
            .map_or(T::zero(), |i| self.coefficients[i])
    }

    pub fn gram_condition(&self) -> f64 {
        self.gram_condition
    }

    pub fn value(&self, x: &[T]) -> T {
        let r = T::of_i64(self.half_width);
        if x.iter().any(|v| v.abs() > r) {
            return T::zero();
        }
        let mut y = vec![T::zero(); x.len()];
        self.index
            .iter()
            .zip(&self.coefficients)
            .fold(T::zero(), |acc, (xi, &a)| {
                for i in 0..x.len() {
                    y[i] = x[i] - T::of_i64(xi[i]);
                }
                acc + a * self.smoothed.value(&y)
            })
    }

    /// `|∫ ζ̃* ζ̃(· − ξ) − δ_{ξ,0}|` for every `ξ ∈ X`, integrated with a
    /// per-cell Gauss rule of the given order.
    pub fn biorthogonality_residuals(&self, order: usize) -> Result<Vec<f64>> {
        let d = self.dim();
        let (nodes, weights) = box_rule::<T>(d, self.half_width, order)?;
        let duals: Vec<T> = nodes.par_iter().map(|x| self.value(x)).collect();
        Ok(self
            .index
            .par_iter()
            .map(|xi| {
                let mut y = vec![T::zero(); d];
                let mut acc = 0.0f64;
                for ((x, &w), &z) in nodes.iter().zip(&weights).zip(&duals) {
                    for i in 0..d {
                        y[i] = x[i] - T::of_i64(xi[i]);
                    }
                    acc += (w * z * self.smoothed.value(&y)).to_f64_lossy();
                }
                let target = if xi.iter().all(|&c| c == 0) { 1.0 } else { 0.0 };
                (acc - target).abs()
            })
            .collect())
    }

    /// `‖ζ̃*‖_{L^q}` (Gauss order 6 per cell; `q = ∞` samples the nodes).
    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        let (nodes, weights) = box_rule::<T>(self.dim(), self.half_width, 6)?;
        let vals: Vec<f64> = nodes
            .par_iter()
            .map(|x| self.value(x).to_f64_lossy().abs())
            .collect();
        if q.is_infinite() {
            return Ok(vals.into_iter().fold(0.0, f64::max));
        }
        let s: f64 = vals
            .iter()
            .zip(&weights)
            .map(|(v, w)| w.to_f64_lossy() * v.powf(q))
            .sum();
        Ok(s.powf(1.0 / q))
    }

    pub fn summary(&self) -> Result<DualSummary> {
        let res = self.biorthogonality_residuals(5)?;
        Ok(DualSummary {
            dim: self.dim(),
            functionals: self.index.len(),
            gram_condition: self.gram_condition,
            coefficients: self
                .index
                .iter()
                .cloned()
                .zip(self.coefficients.iter().map(|a| a.to_f64_lossy()))
                .collect(),
            max_biorthogonality_residual: res.into_iter().fold(0.0, f64::max),
        })
    }
}

/// The quasi-interpolant `J̃v = Σ_ξ (ζ̃* ∗ v)(ξ) ζ̃(· − ξ)`, with the moment
/// functionals `c(ξ) = ∫ ζ̃*(y) v(ξ + y) dy` discretized by a fixed
/// per-cell Gauss rule on `[−R, R]^d` (weights premultiplied by `ζ̃*`).
#[derive(Clone, Debug)]
pub struct QuasiInterpolant<T: Scalar> {
    dual: Arc<DualBasis<T>>,
    offsets: Vec<Vec<T>>,
    weights: Vec<T>,
    degree: usize,
}

impl<T: Scalar> QuasiInterpolant<T> {
    /// Gauss order 5 per axis: exact for `v` of degree ≤ 6 per axis.
    pub fn new(dual: impl Into<Arc<DualBasis<T>>>) -> Result<Self> {
        Self::with_order(dual, 5)
    }

    pub fn with_order(dual: impl Into<Arc<DualBasis<T>>>, order: usize) -> Result<Self> {
        let dual: Arc<DualBasis<T>> = dual.into();
        let (nodes, w) = box_rule::<T>(dual.dim(), dual.half_width(), order)?;
        let weights: Vec<T> = nodes
            .par_iter()
            .zip(&w)
            .map(|(y, &wk)| wk * dual.value(y))
            .collect();
        let keep: Vec<usize> = (0..nodes.len())
            .filter(|&k| weights[k] != T::zero())
            .collect();
        Ok(Self {
            offsets: keep.iter().map(|&k| nodes[k].clone()).collect(),
            weights: keep.iter().map(|&k| weights[k]).collect(),
            dual,
            degree: 2 * order - 1,
        })
    }

    pub fn dual(&self) -> &Arc<DualBasis<T>> {
        &self.dual
    }

    /// Per-axis polynomial degree integrated exactly against `ζ̃*`'s pieces.
    pub fn quadrature_degree(&self) -> usize {
        self.degree
    }

    /// `c(ξ)` for the function `x ↦ v(h·x)` at the (unscaled) point `xi`.
    pub fn coefficient<V: SmoothFunction<T> + ?Sized>(
        &self,
        v: &V,
        xi: &[T],
        h: T,
    ) -> Result<Vec<T>> {
        let m = v.components();
        let mut acc = vec![T::zero(); m];
        let mut x = vec![T::zero(); xi.len()];
        let mut val = vec![T::zero(); m];
        for (y, &w) in self.offsets.iter().zip(&self.weights) {
            for i in 0..xi.len() {
                x[i] = h * (xi[i] + y[i]);
            }
            v.derivative(&x, 0, &mut val)?;
            for (a, &vv) in acc.iter_mut().zip(&val) {
                *a = *a + w * vv;
            }
        }
        Ok(acc)
    }
}

/// `J̃v` on `domain`: coefficients `c(ξ)` at every site (literal coordinates
/// `0..N_i`) for the rescaled function `x ↦ v(h·x)`, as a Tilde field.
pub fn apply_quasi<T: Scalar, V: SmoothFunction<T> + ?Sized>(
    q: &QuasiInterpolant<T>,
    v: &V,
    domain: &LatticeDomain,
    h: T,
) -> Result<InterpolantField<T>> {
    apply_quasi_on(q, v, domain, h, &CellSet::All)
}

/// [`apply_quasi`] with coefficients computed only on `sites` (zero
/// elsewhere); the field is then `J̃v` wherever every translate reaching
/// the point sits in `sites`.
pub fn apply_quasi_on<T: Scalar, V: SmoothFunction<T> + ?Sized>(
    q: &QuasiInterpolant<T>,
    v: &V,
    domain: &LatticeDomain,
    h: T,
    sites: &CellSet,
) -> Result<InterpolantField<T>> {
    if v.dim() != domain.dim() || domain.dim() != q.dual.dim() {
        return Err(Error::InvalidParameter(
            "dimension mismatch in apply_quasi".into(),
        ));
    }
    let m = v.components();
    let list = sites.cells(domain)?;
    let blocks = list
        .par_iter()
        .map(|s| {
            let xi: Vec<T> = s.iter().map(|&c| T::of_i64(c)).collect();
            q.coefficient(v, &xi, h)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut values = vec![T::zero(); domain.len() * m];
    for (s, b) in list.iter().zip(blocks) {
        let i = domain.index(s);
        values[i * m..(i + 1) * m].copy_from_slice(&b);
    }
    let coeffs = LatticeFunction::new(domain.clone(), m, values)?;
    InterpolantField::tilde(coeffs, q.dual.smoothed().clone())
}
