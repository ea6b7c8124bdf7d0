use crate::error::{Error, Result};
use crate::lattice::LatticeFunction;
use crate::quadrature::determinant;
use crate::scalar::Scalar;

/// A lattice deformation `y(ξ) = A ξ + u(ξ)`: a homogeneous far-field
/// gradient `A` plus a displacement.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationField<T> {
    gradient: Vec<T>,
    displacement: LatticeFunction<T>,
}

impl<T: Scalar> DeformationField<T> {
    /// `gradient` is `d × d`, row-major; the displacement must have `m = d`.
    pub fn new(gradient: Vec<T>, displacement: LatticeFunction<T>) -> Result<Self> {
        let d = displacement.domain().dim();
        if displacement.components() != d {
            return Err(Error::InvalidParameter(format!(
                "displacement has {} components, expected {d}",
                displacement.components()
            )));
        }
        if gradient.len() != d * d {
            return Err(Error::InvalidParameter(format!(
                "far-field gradient has {} entries, expected {}",
                gradient.len(),
                d * d
            )));
        }
        if gradient.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "far-field gradient is not finite".into(),
            ));
        }
        Ok(Self {
            gradient,
            displacement,
        })
    }

    /// Like [`DeformationField::new`] but additionally requires `det A > 0`.
    pub fn admissible(gradient: Vec<T>, displacement: LatticeFunction<T>) -> Result<Self> {
        let field = Self::new(gradient, displacement)?;
        let det = field.gradient_determinant();
        if det <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "far-field gradient has det A = {det} <= 0"
            )));
        }
        Ok(field)
    }

    pub fn gradient(&self) -> &[T] {
        &self.gradient
    }

    pub fn displacement(&self) -> &LatticeFunction<T> {
        &self.displacement
    }

    pub fn gradient_determinant(&self) -> T {
        let d = self.displacement.domain().dim();
        let rows = (0..d)
            .map(|r| self.gradient[r * d..(r + 1) * d].to_vec())
            .collect();
        determinant(rows)
    }

    /// `A ξ + u(ξ)`, with `ξ` taken as given (not wrapped) in the affine part.
    pub fn evaluate(&self, site: &[i64]) -> Vec<T> {
        let d = site.len();
        let u = self.displacement.get(site);
        (0..d)
            .map(|r| {
                site.iter().enumerate().fold(u[r], |acc, (c, &s)| {
                    acc + self.gradient[r * d + c] * T::of_i64(s)
                })
            })
            .collect()
    }
}
