//! `‖∇^k Ĩu‖_{L^p}` as a measure of the smoothness of lattice data, for
//! plain lattice functions and for deformations `y = A·ξ + u`, where
//! `Ĩy = y_A + Ĩu` and so `∇Ĩy − A = ∇Ĩu`.

use latinterp::convop::{smooth_nodal_interpolant, ConvolutionOperator};
use latinterp::interp::{cell_norms, default_quadrature, lp_norm_field, quadrature_with_degree};
use latinterp::lattice::{DeformationField, LatticeFunction};
use serde::Serialize;

use crate::error::{Result, StudyError};
use crate::report::serialize_exponent;
use crate::BasisChoice;

#[derive(Clone, Debug)]
pub enum SmoothnessInput {
    Lattice(LatticeFunction<f64>),
    Deformation(DeformationField<f64>),
}

impl SmoothnessInput {
    fn displacement(&self) -> &LatticeFunction<f64> {
        match self {
            Self::Lattice(u) => u,
            Self::Deformation(y) => y.displacement(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothnessReport {
    pub basis: BasisChoice,
    pub k: usize,
    #[serde(serialize_with = "serialize_exponent")]
    pub p: f64,
    pub quad_degree: usize,
    pub domain: Vec<usize>,
    /// `‖∇^k Ĩu‖_{L^p}` over the periodic box.
    pub norm: f64,
    /// For deformations: `‖∇Ĩy − A‖_{L^p}`.
    pub deformation_residual: Option<f64>,
    /// Cell `c + [0,1)^d` with the largest local norm.
    pub peak_cell: Vec<i64>,
    pub peak_value: f64,
    /// Share of `‖∇^k Ĩu‖_{L^p}^p` (or of the maximum, for `p = ∞`) on cells
    /// within two sites of `focus`, if one was given.
    pub focus_fraction: Option<f64>,
}

/// Periodic `ℓ^∞` distance between a cell and a site, per axis.
fn near(cell: &[i64], focus: &[i64], extent: &[usize], radius: i64) -> bool {
    cell.iter().zip(focus).zip(extent).all(|((&c, &f), &n)| {
        let n = n as i64;
        let d = (c - f).rem_euclid(n);
        // Cell c covers [c, c+1]: sites f with c − radius < f ≤ c + radius.
        d.min(n - d) <= radius
    })
}

pub fn run_smoothness_measure(
    input: &SmoothnessInput,
    basis: BasisChoice,
    k: usize,
    p: f64,
    quad_degree: Option<usize>,
    focus: Option<&[i64]>,
) -> Result<SmoothnessReport> {
    if k > 3 {
        return Err(StudyError::Config(format!("derivative order {k} > 3")));
    }
    let u = input.displacement();
    let dom = u.domain().clone();
    let nodal = basis.nodal(dom.dim())?;
    let op = ConvolutionOperator::new(&nodal, dom.clone())?;
    let field = smooth_nodal_interpolant(&op, u)?;
    let quad = match quad_degree {
        Some(deg) => quadrature_with_degree(field.basis(), deg)?,
        None => default_quadrature(field.basis(), p)?,
    };
    let norm = lp_norm_field(&field, p, k, &quad)?.value;
    let deformation_residual = match input {
        SmoothnessInput::Lattice(_) => None,
        SmoothnessInput::Deformation(_) if k == 1 => Some(norm),
        SmoothnessInput::Deformation(_) => Some(lp_norm_field(&field, p, 1, &quad)?.value),
    };
    let cells = cell_norms(&field, p, k, &quad)?;
    let (peak_index, peak_value) =
        cells
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
    let focus_fraction = focus.map(|f| {
        let (mut inside, mut total) = (0.0f64, 0.0f64);
        for (i, &v) in cells.iter().enumerate() {
            let w = if p.is_infinite() { v } else { v.powf(p) };
            let hit = near(&dom.site(i), f, dom.extent(), 2);
            if p.is_infinite() {
                total = total.max(w);
                if hit {
                    inside = inside.max(w);
                }
            } else {
                total += w;
                if hit {
                    inside += w;
                }
            }
        }
        if total > 0.0 {
            inside / total
        } else {
            0.0
        }
    });
    Ok(SmoothnessReport {
        basis,
        k,
        p,
        quad_degree: quad.degree(),
        domain: dom.extent().to_vec(),
        norm,
        deformation_residual,
        peak_cell: dom.site(peak_index),
        peak_value,
        focus_fraction,
    })
}
