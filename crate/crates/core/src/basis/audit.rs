//! Sampled verification of the standing assumptions on a nodal basis:
//! (Z1) Lipschitz, (Z2) compact support, (Z3) reproduction of affine
//! functions, (Z4) the nodal property.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::nodal::NodalBasis;

#[derive(Clone, Debug, Serialize)]
pub struct AssumptionCheck {
    pub passed: bool,
    /// Worst observed residual (for (Z1): largest difference quotient).
    pub residual: f64,
    /// Threshold the residual was compared against.
    pub threshold: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssumptionReport {
    pub basis: String,
    pub z1_lipschitz: AssumptionCheck,
    pub z2_locality: AssumptionCheck,
    pub z3_affine: AssumptionCheck,
    pub z4_nodal: AssumptionCheck,
    /// `ζ̄` at every lattice point of the support box, as `(site, value)`.
    pub lattice_values: Vec<(Vec<i64>, f64)>,
    /// Set for bases that are known to violate (Z4).
    pub flagged_non_nodal: bool,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.z1_lipschitz.passed
            && self.z2_locality.passed
            && self.z3_affine.passed
            && self.z4_nodal.passed
    }
}

/// Check (Z1)–(Z4) with `samples` random probes per assumption.
///
/// (Z3) sums over the whole lattice (no periodic seam): at each probe `x`
/// every site within the support radius contributes, and random affine
/// data `a + b·ξ` must be reproduced to `tol`. The nodal property is judged
/// at `1e-14`.
pub fn verify_assumptions<T: Scalar>(
    b: &NodalBasis<T>,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<AssumptionReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let d = b.dim();
    let r = b.support_radius().to_f64_lossy();
    let cells = b.support_cells();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let to_t = |v: &[f64]| -> Vec<T> { v.iter().map(|&x| T::of(x)).collect() };

    // (Z1): difference quotients at short random separations.
    let lip = b.lipschitz_bound().to_f64_lossy();
    let mut worst_q = 0.0f64;
    for _ in 0..samples {
        let x: Vec<f64> = (0..d)
            .map(|_| rng.random_range(-r - 0.5..r + 0.5))
            .collect();
        let step: Vec<f64> = (0..d).map(|_| rng.random_range(-1e-3..1e-3)).collect();
        let y: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + s).collect();
        let dist = step.iter().map(|s| s * s).sum::<f64>().sqrt();
        if dist == 0.0 {
            continue;
        }
        let diff = (b.value(&to_t(&x)) - b.value(&to_t(&y)))
            .to_f64_lossy()
            .abs();
        worst_q = worst_q.max(diff / dist);
    }
    // Round-off in the two evaluations is amplified by 1/dist ≤ 1e6·√d… keep slack relative.
    let z1_threshold = lip * (1.0 + 1e-6) + tol;
    let z1 = AssumptionCheck {
        passed: worst_q <= z1_threshold,
        residual: worst_q,
        threshold: z1_threshold,
    };

    // (Z2): exact zero outside the support box.
    let mut worst_out = 0.0f64;
    for _ in 0..samples {
        let mut x: Vec<f64> = (0..d)
            .map(|_| rng.random_range(-r - 2.0..r + 2.0))
            .collect();
        let axis = rng.random_range(0..d);
        let mag = rng.random_range(r..r + 2.0);
        x[axis] = if rng.random_bool(0.5) { mag } else { -mag };
        if x[axis].abs() <= r {
            continue;
        }
        worst_out = worst_out.max(b.value(&to_t(&x)).to_f64_lossy().abs());
    }
    let z2 = AssumptionCheck {
        passed: worst_out == 0.0,
        residual: worst_out,
        threshold: 0.0,
    };

    // (Z3): Σ_ξ ζ̄(x − ξ)(a + b·ξ) = a + b·x.
    let window = cells + 1;
    let sites = lattice_box(d, window);
    let mut worst_aff = 0.0f64;
    for _ in 0..samples {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
        let a: f64 = rng.random_range(-2.0..2.0);
        let slope: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let xt = to_t(&x);
        let mut shifted = vec![T::zero(); d];
        let mut sum = T::zero();
        for xi in &sites {
            for i in 0..d {
                shifted[i] = xt[i] - T::of_i64(xi[i]);
            }
            let w = b.value(&shifted);
            if w == T::zero() {
                continue;
            }
            let data = a + xi
                .iter()
                .zip(&slope)
                .map(|(&s, &c)| s as f64 * c)
                .sum::<f64>();
            sum = sum + w * T::of(data);
        }
        let exact = a + x.iter().zip(&slope).map(|(xv, c)| xv * c).sum::<f64>();
        worst_aff = worst_aff.max((sum.to_f64_lossy() - exact).abs());
    }
    let z3 = AssumptionCheck {
        passed: worst_aff <= tol,
        residual: worst_aff,
        threshold: tol,
    };

    // (Z4): Kronecker delta on the lattice.
    let mut lattice_values = Vec::new();
    let mut worst_nodal = 0.0f64;
    for xi in lattice_box(d, cells) {
        let x: Vec<T> = xi.iter().map(|&v| T::of_i64(v)).collect();
        let v = b.value(&x).to_f64_lossy();
        let target = if xi.iter().all(|&c| c == 0) { 1.0 } else { 0.0 };
        worst_nodal = worst_nodal.max((v - target).abs());
        lattice_values.push((xi, v));
    }
    let z4 = AssumptionCheck {
        passed: worst_nodal <= 1e-14,
        residual: worst_nodal,
        threshold: 1e-14,
    };

    Ok(AssumptionReport {
        basis: b.label(),
        z1_lipschitz: z1,
        z2_locality: z2,
        z3_affine: z3,
        z4_nodal: z4,
        lattice_values,
        flagged_non_nodal: !b.is_nodal_by_construction(),
    })
}

/// All integer points of `[−w, w]^d`.
pub(crate) fn lattice_box(d: usize, w: i64) -> Vec<Vec<i64>> {
    let side = (2 * w + 1) as usize;
    (0..side.pow(d as u32))
        .map(|mut flat| {
            let mut p = vec![0i64; d];
            for slot in p.iter_mut().rev() {
                *slot = (flat % side) as i64 - w;
                flat /= side;
            }
            p
        })
        .collect()
}
