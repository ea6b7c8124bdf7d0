//! The extended hat: a basis satisfying locality, Lipschitz continuity and
//! affine reproduction, but not the nodal property, whose interpolant
//! annihilates the non-zero lattice function `u = (−1, 0, 1)` (3-periodic).

use latinterp::basis::{verify_assumptions, AssumptionReport, NodalBasis};
use latinterp::convop::{ConvolutionOperator, MIN_MULTIPLIER_TOL};
use latinterp::interp::InterpolantField;
use latinterp::lattice::{LatticeDomain, LatticeFunction};
use serde::Serialize;

use crate::error::Result;

/// Bound on the sampled `max |ū|` for the annihilated field.
pub const ANNIHILATION_TOL: f64 = 1e-12;

pub const SAMPLE_POINTS: usize = 1000;

/// Extent of the box the extended-hat operator is built on: a multiple of
/// 3, so the DFT grid contains the frequency `1/3` of `u`.
pub const OPERATOR_EXTENT: usize = 12;

#[derive(Clone, Debug, Serialize)]
pub struct ZeroMode {
    pub frequency: usize,
    pub multiplier: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub field: Vec<f64>,
    pub samples: usize,
    /// `max |ū|` at the sample points under the extended hat.
    pub extended_hat_max: f64,
    /// `max |ū|` at the same points under Q1 (attains 1 at the sites).
    pub q1_max: f64,
    pub operator_extent: usize,
    pub multiplier: Vec<f64>,
    pub min_multiplier: f64,
    /// DFT frequencies with `|m̂| ≤` the non-invertibility tolerance.
    pub zero_modes: Vec<ZeroMode>,
    /// The error reported when solving with the degenerate operator.
    pub solve_error: Option<String>,
    pub audit: AssumptionReport,
    pub passed: bool,
}

fn sample_points() -> Vec<f64> {
    // Equispaced on [−6, 6) with an irrational offset, so every cell
    // position and the lattice sites' neighbourhoods are all hit.
    (0..SAMPLE_POINTS)
        .map(|k| -6.0 + 12.0 * (k as f64 + 0.381_966_011_250_105) / SAMPLE_POINTS as f64)
        .collect()
}

fn max_abs(f: &InterpolantField<f64>, points: &[f64]) -> Result<f64> {
    points
        .iter()
        .try_fold(0.0f64, |m, &x| Ok(m.max(f.evaluate(&[x], 0)?[0].abs())))
}

pub fn run_counterexample() -> Result<CounterexampleReport> {
    let dom = LatticeDomain::new(vec![3])?;
    let u = LatticeFunction::new(dom.clone(), 1, vec![-1.0, 0.0, 1.0])?;
    let points = sample_points();

    let exthat = NodalBasis::<f64>::extended_hat();
    let bar = InterpolantField::bar(u.clone(), exthat.clone())?;
    let extended_hat_max = max_abs(&bar, &points)?;

    let q1 = InterpolantField::bar(u.clone(), NodalBasis::q1(1)?)?;
    // Sites are included explicitly: the Q1 maximum sits exactly on them.
    let mut q1_points = points.clone();
    q1_points.extend((-6..6).map(f64::from));
    let q1_max = max_abs(&q1, &q1_points)?;

    let big = LatticeDomain::new(vec![OPERATOR_EXTENT])?;
    let op = ConvolutionOperator::new(&exthat, big.clone())?;
    let multiplier = op.multiplier().to_vec();
    let zero_modes = multiplier
        .iter()
        .enumerate()
        .filter(|(_, m)| m.abs() <= MIN_MULTIPLIER_TOL)
        .map(|(frequency, &multiplier)| ZeroMode {
            frequency,
            multiplier,
        })
        .collect::<Vec<_>>();
    let periodic_u =
        LatticeFunction::from_scalar_fn(big, |s| [-1.0, 0.0, 1.0][s[0].rem_euclid(3) as usize])?;
    let solve_error = op.solve(&periodic_u).err().map(|e| e.to_string());

    let audit = verify_assumptions(&exthat, 200, 1e-12, 1)?;
    let passed = extended_hat_max <= ANNIHILATION_TOL
        && (q1_max - 1.0).abs() <= 1e-15
        && !zero_modes.is_empty()
        && solve_error.is_some()
        && audit.z1_lipschitz.passed
        && audit.z2_locality.passed
        && audit.z3_affine.passed
        && !audit.z4_nodal.passed;
    Ok(CounterexampleReport {
        field: u.values().to_vec(),
        samples: points.len(),
        extended_hat_max,
        q1_max,
        operator_extent: OPERATOR_EXTENT,
        min_multiplier: op.min_multiplier(),
        multiplier,
        zero_modes,
        solve_error,
        audit,
        passed,
    })
}
