//! Random and adversarial lattice fields for the norm-equivalence studies.
//!
//! Each draw is seeded independently from `(seed, index)`, so draw `i` is
//! the same whether it is generated alone, in a batch of `n`, or in a
//! doubled batch of `2n` — the property the sample-doubling checks rely on.

use std::f64::consts::PI;

use latinterp::lattice::{LatticeDomain, LatticeFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldFamily {
    /// iid standard normal per site.
    Gaussian,
    /// A few random low-frequency Fourier modes.
    Smooth,
    /// `(−1)^{ξ_1}`: the Nyquist mode along the first axis.
    Nyquist,
    /// `(−1)^{ξ_1 + … + ξ_d}`, the mode minimizing the Q1 multiplier.
    Checkerboard,
    Constant,
    /// `a + b·ξ` on the canonical sites; periodic data with one seam.
    Affine,
}

/// The cycle of families: mostly random, with every adversarial mode
/// appearing early and periodically.
const CYCLE: [FieldFamily; 8] = [
    FieldFamily::Nyquist,
    FieldFamily::Checkerboard,
    FieldFamily::Constant,
    FieldFamily::Affine,
    FieldFamily::Gaussian,
    FieldFamily::Smooth,
    FieldFamily::Gaussian,
    FieldFamily::Smooth,
];

pub fn family_of(index: usize) -> FieldFamily {
    CYCLE[index % CYCLE.len()]
}

fn rng_for(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Draw number `index` of the ensemble with base `seed`.
pub fn draw(
    domain: &LatticeDomain,
    seed: u64,
    index: usize,
) -> Result<(FieldFamily, LatticeFunction<f64>)> {
    let family = family_of(index);
    let mut rng = rng_for(seed, index);
    let d = domain.dim();
    let scale: f64 = rng.random_range(0.5..2.0);
    let u = match family {
        FieldFamily::Gaussian => LatticeFunction::from_scalar_fn(domain.clone(), |_| {
            scale * rng.sample::<f64, _>(StandardNormal)
        })?,
        FieldFamily::Smooth => {
            let modes: Vec<(Vec<f64>, f64, f64)> = (0..4)
                .map(|_| {
                    let k: Vec<f64> = (0..d)
                        .map(|i| {
                            rng.random_range(0..=2) as f64 * TWO_PI / domain.extent()[i] as f64
                        })
                        .collect();
                    (
                        k,
                        rng.sample::<f64, _>(StandardNormal),
                        rng.random_range(0.0..TWO_PI),
                    )
                })
                .collect();
            LatticeFunction::from_scalar_fn(domain.clone(), |s| {
                modes
                    .iter()
                    .map(|(k, a, phase)| {
                        let arg: f64 = k.iter().zip(s).map(|(k, &x)| k * x as f64).sum();
                        scale * a * (arg + phase).cos()
                    })
                    .sum()
            })?
        }
        FieldFamily::Nyquist => LatticeFunction::from_scalar_fn(domain.clone(), |s| {
            if s[0] % 2 == 0 {
                scale
            } else {
                -scale
            }
        })?,
        FieldFamily::Checkerboard => LatticeFunction::from_scalar_fn(domain.clone(), |s| {
            if s.iter().sum::<i64>() % 2 == 0 {
                scale
            } else {
                -scale
            }
        })?,
        FieldFamily::Constant => LatticeFunction::constant(domain.clone(), &[scale]),
        FieldFamily::Affine => {
            let b: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            LatticeFunction::affine_sample(domain.clone(), &b, &[scale])?
        }
    };
    Ok((family, u))
}

const TWO_PI: f64 = 2.0 * PI;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible_and_independent_of_batch() {
        let dom = LatticeDomain::cube(2, 6).unwrap();
        for i in 0..16 {
            let (fa, a) = draw(&dom, 7, i).unwrap();
            let (fb, b) = draw(&dom, 7, i).unwrap();
            assert_eq!(fa, fb);
            assert_eq!(a, b);
        }
        let (_, a) = draw(&dom, 7, 4).unwrap();
        let (_, b) = draw(&dom, 8, 4).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn checkerboard_alternates() {
        let dom = LatticeDomain::cube(2, 4).unwrap();
        let (fam, u) = draw(&dom, 1, 1).unwrap();
        assert_eq!(fam, FieldFamily::Checkerboard);
        assert_eq!(u.get(&[0, 0])[0], -u.get(&[0, 1])[0]);
        assert_eq!(u.get(&[0, 0])[0], u.get(&[1, 1])[0]);
    }
}
