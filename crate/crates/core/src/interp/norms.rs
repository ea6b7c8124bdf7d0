use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::basis::{Flavor, NodalBasis};
use crate::error::{Error, Result};
use crate::lattice::{check_exponent, LatticeFunction};
use crate::quadrature::{gauss_order_for_degree, CellQuadrature};
use crate::scalar::Scalar;

use super::field::{FieldBasis, FieldKind, InterpolantField};
use super::sample::SmoothFunction;
use super::sampler::{CellSampler, CellSet};

fn serialize_exponent<S: Serializer>(p: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if p.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*p)
    }
}

/// One norm evaluation; serialized as a JSON line
/// `{"kind", "p", "k", "value", "quad_degree", "cells", "domain"}` with
/// `p = "inf"` for the max norm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub kind: String,
    #[serde(serialize_with = "serialize_exponent")]
    pub p: f64,
    pub k: usize,
    pub value: f64,
    pub quad_degree: usize,
    pub cells: usize,
    pub domain: Vec<usize>,
}

impl NormReport {
    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

fn kind_label(kind: FieldKind) -> &'static str {
    match kind {
        FieldKind::Bar => "bar",
        FieldKind::Tilde => "tilde",
    }
}

/// Default cell rule for `‖∇^k f‖_{L^p}`.
///
/// Bar fields on a P1 basis integrate simplex by simplex (the field is
/// linear on each simplex). Everything else uses a tensor Gauss rule:
/// order 4 for `p = 2` (exact for the degree-6-per-axis integrand of Q1
/// Tilde fields), order 6 otherwise, where `|·|^p` is not a polynomial.
pub fn default_quadrature<T: Scalar>(basis: &FieldBasis<T>, p: f64) -> Result<CellQuadrature<T>> {
    check_exponent(p)?;
    let d = basis.dim();
    if let (FieldKind::Bar, Some(part)) = (basis.kind(), basis.nodal().partition()) {
        let degree = if p == 2.0 { 2 } else { 10 };
        return CellQuadrature::on_simplices(d, part.simplices(), degree);
    }
    CellQuadrature::tensor(d, if p == 2.0 { 4 } else { 6 })
}

/// Cell rule of (at least) the requested polynomial degree.
pub fn quadrature_with_degree<T: Scalar>(
    basis: &FieldBasis<T>,
    degree: usize,
) -> Result<CellQuadrature<T>> {
    let d = basis.dim();
    if let (FieldKind::Bar, Some(part)) = (basis.kind(), basis.nodal().partition()) {
        return CellQuadrature::on_simplices(d, part.simplices(), degree);
    }
    CellQuadrature::tensor(d, gauss_order_for_degree(degree))
}

/// Per-cell `Σ_q w_q |g(x_q)|^p` (or `max |g|` for `p = ∞`), where
/// `g = ∇^k f − reference` and `reference` is optional.
fn cell_contributions<T: Scalar>(
    f: &InterpolantField<T>,
    k: usize,
    p: f64,
    quad: &CellQuadrature<T>,
    cells: &[Vec<i64>],
    reference: Option<&(dyn Fn(&[T], &mut [T]) -> Result<()> + Sync)>,
) -> Result<Vec<T>> {
    check_exponent(p)?;
    let sampler = CellSampler::new(f.basis(), k, quad, p.is_infinite())?;
    contributions_with(&sampler, f, p, cells, reference)
}

fn contributions_with<T: Scalar>(
    sampler: &CellSampler<T>,
    f: &InterpolantField<T>,
    p: f64,
    cells: &[Vec<i64>],
    reference: Option<&(dyn Fn(&[T], &mut [T]) -> Result<()> + Sync)>,
) -> Result<Vec<T>> {
    let inf = p.is_infinite();
    let m = f.components();
    let size = m * sampler.block();
    let u = f.coefficients();
    let pt = T::of(p);
    cells
        .par_iter()
        .map(|cell| -> Result<T> {
            let mut tensor = vec![T::zero(); size];
            let mut reference_vals = vec![T::zero(); size];
            let mut x = vec![T::zero(); cell.len()];
            let mut acc = T::zero();
            for q in 0..sampler.len() {
                let w = sampler.weight(q);
                if !inf && w == T::zero() {
                    continue;
                }
                sampler.eval(u, cell, q, &mut tensor);
                if let Some(r) = reference {
                    for (i, xi) in x.iter_mut().enumerate() {
                        *xi = T::of_i64(cell[i]) + sampler.point(q)[i];
                    }
                    r(&x, &mut reference_vals)?;
                    for (t, &rv) in tensor.iter_mut().zip(&reference_vals) {
                        *t = *t - rv;
                    }
                }
                let mag = tensor.iter().fold(T::zero(), |s, &v| s + v * v).sqrt();
                acc = if inf {
                    acc.max(mag)
                } else {
                    acc + w * mag.powf(pt)
                };
            }
            Ok(acc)
        })
        .collect()
}

fn combine<T: Scalar>(parts: &[T], p: f64) -> T {
    if p.is_infinite() {
        parts.iter().copied().fold(T::zero(), T::max)
    } else {
        // Sequential sum: reproducible regardless of thread count.
        let s: T = parts.iter().copied().sum();
        s.powf(T::one() / T::of(p))
    }
}

/// `‖∇^k f‖_{L^p}` over the whole periodic box.
///
/// For `p = ∞` the maximum is taken over the quadrature nodes and all cell
/// corners, so it is a lower bound for the true supremum; for piecewise
/// multilinear or piecewise linear Bar fields, whose maxima sit at cell
/// vertices, it is attained.
pub fn lp_norm_field<T: Scalar>(
    f: &InterpolantField<T>,
    p: f64,
    k: usize,
    quad: &CellQuadrature<T>,
) -> Result<NormReport> {
    let dom = f.coefficients().domain();
    let cells: Vec<Vec<i64>> = dom.sites().collect();
    let value = combine(&cell_contributions(f, k, p, quad, &cells, None)?, p);
    Ok(NormReport {
        kind: kind_label(f.kind()).into(),
        p,
        k,
        value: value.to_f64_lossy(),
        quad_degree: quad.degree(),
        cells: cells.len(),
        domain: dom.extent().to_vec(),
    })
}

/// `‖∇^k f‖_{L^p}` over the whole box for many fields on one basis.
///
/// Tabulating the basis at the quadrature nodes dominates the cost of a
/// single norm when the smoothed basis is expensive to evaluate (P1 in
/// d ≥ 2); a plan does it once.
pub struct NormPlan<T> {
    kind: FieldKind,
    dim: usize,
    k: usize,
    p: f64,
    sampler: CellSampler<T>,
}

impl<T: Scalar> NormPlan<T> {
    pub fn new(basis: &FieldBasis<T>, p: f64, k: usize, quad: &CellQuadrature<T>) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self {
            kind: basis.kind(),
            dim: basis.dim(),
            k,
            p,
            sampler: CellSampler::new(basis, k, quad, p.is_infinite())?,
        })
    }

    /// Uses the plan's table; `f` must live on the basis the plan was built
    /// from (kind and dimension are checked, the rest is the caller's word).
    pub fn norm(&self, f: &InterpolantField<T>) -> Result<T> {
        if f.kind() != self.kind || f.dim() != self.dim {
            return Err(Error::InvalidParameter(
                "field does not match the norm plan's basis".into(),
            ));
        }
        let cells: Vec<Vec<i64>> = f.coefficients().domain().sites().collect();
        Ok(combine(
            &contributions_with(&self.sampler, f, self.p, &cells, None)?,
            self.p,
        ))
    }

    pub fn order(&self) -> usize {
        self.k
    }
}

/// `‖∇^k f‖_{L^p}` over a set of cells, in the field's scalar type.
pub fn lp_norm_on<T: Scalar>(
    f: &InterpolantField<T>,
    p: f64,
    k: usize,
    quad: &CellQuadrature<T>,
    cells: &CellSet,
) -> Result<T> {
    let list = cells.cells(f.coefficients().domain())?;
    Ok(combine(&cell_contributions(f, k, p, quad, &list, None)?, p))
}

/// `‖∇^k f‖_{L^p(Q)}` for each cell `Q` of the box, in storage order.
pub fn cell_norms<T: Scalar>(
    f: &InterpolantField<T>,
    p: f64,
    k: usize,
    quad: &CellQuadrature<T>,
) -> Result<Vec<T>> {
    let cells: Vec<Vec<i64>> = f.coefficients().domain().sites().collect();
    let parts = cell_contributions(f, k, p, quad, &cells, None)?;
    Ok(parts.into_iter().map(|v| combine(&[v], p)).collect())
}

/// `‖ū‖_{W^{1,p}} = (‖ū‖_{L^p}^p + ‖∇ū‖_{L^p}^p)^{1/p}` (max for `p = ∞`).
pub fn sobolev_norm<T: Scalar>(
    u: &LatticeFunction<T>,
    basis: &NodalBasis<T>,
    p: f64,
) -> Result<NormReport> {
    let field = InterpolantField::bar(u.clone(), basis.clone())?;
    let quad = default_quadrature(field.basis(), p)?;
    let v0 = lp_norm_field(&field, p, 0, &quad)?;
    let v1 = lp_norm_field(&field, p, 1, &quad)?;
    let value = if p.is_infinite() {
        v0.value.max(v1.value)
    } else {
        (v0.value.powf(p) + v1.value.powf(p)).powf(1.0 / p)
    };
    Ok(NormReport {
        kind: "bar-w1p".into(),
        k: 1,
        value,
        ..v0
    })
}

/// Physical-domain error `‖∇^j(I_h v − v)‖_{L^p}` at spacing `h`.
///
/// `f` lives on the unit lattice with coefficients built from samples
/// `v(h·ξ)`; its `j`-th derivative is compared with `h^j (∇^j v)(h·x)` over
/// `cells` and the result is scaled by `h^{d/p − j}`.
pub fn lp_error<T: Scalar, V: SmoothFunction<T> + ?Sized>(
    f: &InterpolantField<T>,
    v: &V,
    j: usize,
    p: f64,
    h: T,
    quad: &CellQuadrature<T>,
    cells: &CellSet,
) -> Result<T> {
    if v.max_order() < j {
        return Err(Error::UnsupportedOrder {
            requested: j,
            max: v.max_order(),
        });
    }
    if v.components() != f.components() || v.dim() != f.dim() {
        return Err(Error::InvalidParameter(
            "reference function shape differs from field".into(),
        ));
    }
    let hj = h.powi(j as i32);
    let d = f.dim();
    let reference = move |x: &[T], out: &mut [T]| -> Result<()> {
        let hx: Vec<T> = x.iter().map(|&t| h * t).collect();
        v.derivative(&hx, j, out)?;
        out.iter_mut().for_each(|o| *o = *o * hj);
        Ok(())
    };
    let list = cells.cells(f.coefficients().domain())?;
    let parts = cell_contributions(f, j, p, quad, &list, Some(&reference))?;
    Ok(combine(&parts, p) * super::rescale_factor(h, d, p, j))
}

/// True when the default rule integrates `|∇^k f|^p` exactly (up to
/// round-off): `p = 2` with piecewise-polynomial fields on cell-aligned
/// pieces.
pub fn quadrature_is_exact<T: Scalar>(basis: &FieldBasis<T>, p: f64) -> bool {
    p == 2.0
        && match basis.nodal().flavor() {
            Flavor::Q1 => true,
            Flavor::P1 | Flavor::ExtendedHat1D => basis.kind() == FieldKind::Bar,
            Flavor::Custom => false,
        }
}
