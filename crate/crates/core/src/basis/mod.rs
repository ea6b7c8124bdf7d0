//! Nodal basis functions `ζ̄`, the smoothed basis `ζ̃ = ζ̄ ∗ ζ̄`, simplicial
//! partitions of the unit cell and assumption checks.

mod audit;
mod custom;
mod nodal;
mod partition;
mod polytope;
mod smoothed;
mod spline;

pub use audit::{verify_assumptions, AssumptionCheck, AssumptionReport};
pub use custom::{BasisFile, CustomBasisSpec, LinearSimplex};
pub use nodal::{Flavor, NodalBasis};
pub(crate) use partition::halton_points;
pub use partition::{PartitionReport, SimplicialPartition};
pub use smoothed::{Backend, SmoothedBasis};
pub use spline::cubic_bspline;

use serde::Serialize;

use crate::scalar::Scalar;

/// Axis-aligned box `[lo, hi]` (closed).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportBox<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Scalar> SupportBox<T> {
    pub fn contains(&self, x: &[T]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&v, (&l, &h))| v >= l && v <= h)
    }
}

/// Anything with a support box `[−r, r]^d` about the origin.
pub trait Supported<T> {
    fn dim(&self) -> usize;
    fn support_radius(&self) -> T;
}

impl<T: Scalar> Supported<T> for NodalBasis<T> {
    fn dim(&self) -> usize {
        NodalBasis::dim(self)
    }
    fn support_radius(&self) -> T {
        NodalBasis::support_radius(self)
    }
}

impl<T: Scalar> Supported<T> for SmoothedBasis<T> {
    fn dim(&self) -> usize {
        SmoothedBasis::dim(self)
    }
    fn support_radius(&self) -> T {
        SmoothedBasis::support_radius(self)
    }
}

/// Bounding box `ξ + [−r, r]^d` of the support of the translate centered at `ξ`.
pub fn support_set<T: Scalar, B: Supported<T>>(b: &B, xi: &[i64]) -> SupportBox<T> {
    let r = b.support_radius();
    debug_assert_eq!(xi.len(), b.dim());
    SupportBox {
        lo: xi.iter().map(|&v| T::of_i64(v) - r).collect(),
        hi: xi.iter().map(|&v| T::of_i64(v) + r).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_boxes() {
        let q = NodalBasis::<f64>::q1(2).unwrap();
        assert_eq!(
            support_set(&q, &[0, 0]),
            SupportBox {
                lo: vec![-1.0, -1.0],
                hi: vec![1.0, 1.0]
            }
        );
        let s = SmoothedBasis::new(q.clone());
        assert_eq!(
            support_set(&s, &[0, 0]),
            SupportBox {
                lo: vec![-2.0, -2.0],
                hi: vec![2.0, 2.0]
            }
        );
        assert_eq!(
            support_set(&q, &[5, 0]),
            SupportBox {
                lo: vec![4.0, -1.0],
                hi: vec![6.0, 1.0]
            }
        );
    }
}
