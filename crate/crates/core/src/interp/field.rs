use std::sync::Arc;

use serde::Serialize;

use crate::basis::{NodalBasis, SmoothedBasis};
use crate::error::{Error, Result};
use crate::lattice::LatticeFunction;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// `ū(x) = Σ u(ξ) ζ̄(x − ξ)`.
    Bar,
    /// `ũ(x) = Σ u(ξ) ζ̃(x − ξ)`.
    Tilde,
}

/// The basis a field is expanded in.
#[derive(Clone, Debug)]
pub enum FieldBasis<T> {
    Bar(Arc<NodalBasis<T>>),
    Tilde(Arc<SmoothedBasis<T>>),
}

impl<T: Scalar> FieldBasis<T> {
    pub fn kind(&self) -> FieldKind {
        match self {
            FieldBasis::Bar(_) => FieldKind::Bar,
            FieldBasis::Tilde(_) => FieldKind::Tilde,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FieldBasis::Bar(b) => b.dim(),
            FieldBasis::Tilde(s) => s.dim(),
        }
    }

    /// Highest derivative order available.
    pub fn max_order(&self) -> usize {
        match self {
            FieldBasis::Bar(_) => 1,
            FieldBasis::Tilde(s) => s.max_order(),
        }
    }

    /// Integer radius `R`: the basis vanishes for `|x|_∞ ≥ R`.
    pub fn support_cells(&self) -> i64 {
        match self {
            FieldBasis::Bar(b) => b.support_cells(),
            FieldBasis::Tilde(s) => s.support_cells(),
        }
    }

    /// The nodal parent (`ζ̄` itself for Bar fields).
    pub fn nodal(&self) -> &NodalBasis<T> {
        match self {
            FieldBasis::Bar(b) => b,
            FieldBasis::Tilde(s) => s.parent(),
        }
    }

    /// `∇^order` of the basis function at `x`, `d^order` entries.
    pub fn derivative(&self, x: &[T], order: usize, out: &mut [T]) -> Result<()> {
        match self {
            FieldBasis::Bar(b) => b.derivative(x, order, out),
            FieldBasis::Tilde(s) => s.derivative(x, order, out),
        }
    }

    pub fn check_order(&self, order: usize) -> Result<()> {
        if order > self.max_order() {
            return Err(Error::UnsupportedOrder {
                requested: order,
                max: self.max_order(),
            });
        }
        Ok(())
    }
}

/// A continuous field expanded in integer translates of a basis function,
/// with lattice coefficients taken periodically.
///
/// Derivative tensors are returned component-major: entry `(c, i_1…i_k)`
/// sits at `c·d^k + flat(i_1…i_k)` with the multi-index flattened row-major.
#[derive(Clone, Debug)]
pub struct InterpolantField<T> {
    coefficients: LatticeFunction<T>,
    basis: FieldBasis<T>,
}

impl<T: Scalar> InterpolantField<T> {
    pub fn new(coefficients: LatticeFunction<T>, basis: FieldBasis<T>) -> Result<Self> {
        if coefficients.domain().dim() != basis.dim() {
            return Err(Error::InvalidParameter(format!(
                "coefficients live in {} dimensions, basis in {}",
                coefficients.domain().dim(),
                basis.dim()
            )));
        }
        Ok(Self {
            coefficients,
            basis,
        })
    }

    /// `ū` for the given coefficients.
    pub fn bar(
        coefficients: LatticeFunction<T>,
        basis: impl Into<Arc<NodalBasis<T>>>,
    ) -> Result<Self> {
        Self::new(coefficients, FieldBasis::Bar(basis.into()))
    }

    /// `ũ` for the given coefficients.
    pub fn tilde(
        coefficients: LatticeFunction<T>,
        basis: impl Into<Arc<SmoothedBasis<T>>>,
    ) -> Result<Self> {
        Self::new(coefficients, FieldBasis::Tilde(basis.into()))
    }

    pub fn coefficients(&self) -> &LatticeFunction<T> {
        &self.coefficients
    }

    pub fn basis(&self) -> &FieldBasis<T> {
        &self.basis
    }

    pub fn kind(&self) -> FieldKind {
        self.basis.kind()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn components(&self) -> usize {
        self.coefficients.components()
    }

    /// Same basis, new coefficients on the same domain shape.
    pub fn with_coefficients(&self, coefficients: LatticeFunction<T>) -> Result<Self> {
        Self::new(coefficients, self.basis.clone())
    }

    /// `∇^order f(x)` as an `m·d^order` tensor.
    pub fn evaluate(&self, x: &[T], order: usize) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.components() * self.dim().pow(order as u32)];
        self.evaluate_into(x, order, &mut out)?;
        Ok(out)
    }

    pub fn evaluate_into(&self, x: &[T], order: usize, out: &mut [T]) -> Result<()> {
        let d = self.dim();
        if x.len() != d {
            return Err(Error::InvalidParameter(format!(
                "point has {} coordinates, expected {d}",
                x.len()
            )));
        }
        self.basis.check_order(order)?;
        let block = d.pow(order as u32);
        let m = self.components();
        out.iter_mut().for_each(|v| *v = T::zero());
        let r = self.basis.support_cells();
        let base: Vec<i64> = x.iter().map(|&t| t.floor().to_i64().unwrap_or(0)).collect();
        let side = (2 * r + 2) as usize;
        let mut shift = vec![T::zero(); d];
        let mut site = vec![0i64; d];
        let mut tensor = vec![T::zero(); block];
        for flat in 0..side.pow(d as u32) {
            let mut rest = flat;
            for i in (0..d).rev() {
                site[i] = base[i] - r + (rest % side) as i64;
                rest /= side;
            }
            for i in 0..d {
                shift[i] = x[i] - T::of_i64(site[i]);
            }
            if shift.iter().any(|&s| s.abs() >= T::of_i64(r)) {
                continue;
            }
            self.basis.derivative(&shift, order, &mut tensor)?;
            let u = self.coefficients.get(&site);
            for c in 0..m {
                if u[c] == T::zero() {
                    continue;
                }
                for (e, &t) in tensor.iter().enumerate() {
                    out[c * block + e] = out[c * block + e] + u[c] * t;
                }
            }
        }
        Ok(())
    }

    /// Field values at every lattice site.
    pub fn lattice_values(&self) -> Result<LatticeFunction<T>> {
        let dom = self.coefficients.domain().clone();
        let m = self.components();
        let mut values = Vec::with_capacity(dom.len() * m);
        for site in dom.sites() {
            let x: Vec<T> = site.iter().map(|&v| T::of_i64(v)).collect();
            values.extend(self.evaluate(&x, 0)?);
        }
        LatticeFunction::new(dom, m, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeDomain;

    #[test]
    fn bar_field_is_nodal_and_linear_between_sites() {
        let dom = LatticeDomain::new(vec![8]).unwrap();
        let u = LatticeFunction::from_scalar_fn(dom, |s| (s[0] * s[0]) as f64).unwrap();
        let f = InterpolantField::bar(u.clone(), NodalBasis::q1(1).unwrap()).unwrap();
        assert_eq!(f.lattice_values().unwrap(), u);
        assert_eq!(f.evaluate(&[2.5], 0).unwrap(), vec![6.5]);
        assert_eq!(f.evaluate(&[2.5], 1).unwrap(), vec![5.0]);
    }

    #[test]
    fn tilde_site_values_apply_the_stencil() {
        let dom = LatticeDomain::new(vec![8]).unwrap();
        let u =
            LatticeFunction::from_scalar_fn(dom, |s| if s[0] == 3 { 1.0f64 } else { 0.0 }).unwrap();
        let f = InterpolantField::tilde(u, SmoothedBasis::new(NodalBasis::q1(1).unwrap())).unwrap();
        let v = f.lattice_values().unwrap();
        assert!((v.get(&[3])[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((v.get(&[2])[0] - 1.0 / 6.0).abs() < 1e-15);
        assert!((v.get(&[4])[0] - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(v.get(&[5])[0], 0.0);
    }

    #[test]
    fn periodic_wrap_and_order_checks() {
        let dom = LatticeDomain::new(vec![4]).unwrap();
        let u = LatticeFunction::from_scalar_fn(dom, |s| s[0] as f64).unwrap();
        let f = InterpolantField::bar(u, NodalBasis::q1(1).unwrap()).unwrap();
        // Between site 3 and site 4 ≡ 0.
        assert_eq!(f.evaluate(&[3.5], 0).unwrap(), vec![1.5]);
        assert_eq!(f.evaluate(&[-0.5], 0).unwrap(), vec![1.5]);
        assert!(matches!(
            f.evaluate(&[0.2], 2),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn vector_valued_gradient_layout() {
        let dom = LatticeDomain::new(vec![6, 6]).unwrap();
        let a = [1.0f64, 2.0, 3.0, 4.0];
        let u = LatticeFunction::affine_sample(dom, &a, &[0.5, -0.5]).unwrap();
        let f = InterpolantField::bar(u, NodalBasis::q1(2).unwrap()).unwrap();
        let g = f.evaluate(&[2.3, 2.6], 1).unwrap();
        for (got, want) in g.iter().zip(a) {
            assert!((got - want).abs() < 1e-13);
        }
    }
}
