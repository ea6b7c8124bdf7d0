use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, LatticeFunction};
use crate::scalar::Scalar;

/// A smooth reference function `v : R^d → R^m` with derivatives, used for
/// sampling and for measuring interpolation errors.
pub trait SmoothFunction<T: Scalar>: Sync {
    fn dim(&self) -> usize;

    fn components(&self) -> usize {
        1
    }

    /// Highest derivative order `derivative` accepts.
    fn max_order(&self) -> usize;

    /// `∇^order v(x)`, component-major, `m·d^order` entries.
    fn derivative(&self, x: &[T], order: usize, out: &mut [T]) -> Result<()>;

    fn value(&self, x: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.components()];
        self.derivative(x, 0, &mut out)?;
        Ok(out)
    }
}

/// Value-only adapter for a closure `f(x, out)`.
pub struct FnFunction<F> {
    dim: usize,
    components: usize,
    f: F,
}

impl<F> FnFunction<F> {
    pub fn new(dim: usize, components: usize, f: F) -> Self {
        Self { dim, components, f }
    }
}

impl<T: Scalar, F: Fn(&[T], &mut [T]) + Sync> SmoothFunction<T> for FnFunction<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn components(&self) -> usize {
        self.components
    }

    fn max_order(&self) -> usize {
        0
    }

    fn derivative(&self, x: &[T], order: usize, out: &mut [T]) -> Result<()> {
        if order > 0 {
            return Err(Error::UnsupportedOrder {
                requested: order,
                max: 0,
            });
        }
        (self.f)(x, out);
        Ok(())
    }
}

/// `u(ξ) = v(h·ξ)` on the sites of `domain` (site coordinates `0..N_i`).
pub fn sample_to_lattice<T: Scalar, V: SmoothFunction<T> + ?Sized>(
    v: &V,
    domain: &LatticeDomain,
    h: T,
) -> Result<LatticeFunction<T>> {
    if v.dim() != domain.dim() {
        return Err(Error::InvalidParameter(format!(
            "function of {} variables sampled on a {}-dimensional lattice",
            v.dim(),
            domain.dim()
        )));
    }
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "spacing h = {h} must be positive"
        )));
    }
    let m = v.components();
    let mut values = Vec::with_capacity(domain.len() * m);
    let mut x = vec![T::zero(); domain.dim()];
    let mut out = vec![T::zero(); m];
    for site in domain.sites() {
        for (xi, &s) in x.iter_mut().zip(&site) {
            *xi = h * T::of_i64(s);
        }
        v.derivative(&x, 0, &mut out)?;
        if out.iter().any(|o| !o.is_finite()) {
            return Err(Error::NonFinite {
                site: domain.index(&site),
            });
        }
        values.extend_from_slice(&out);
    }
    LatticeFunction::new(domain.clone(), m, values)
}

/// `h^{d/p − j}`: turns a unit-lattice `W^{j,p}` quantity into the physical
/// one at spacing `h` (`p = ∞` gives `h^{−j}`).
pub fn rescale_factor<T: Scalar>(h: T, dim: usize, p: f64, j: usize) -> T {
    let value_part = if p.is_infinite() { 0.0 } else { dim as f64 / p };
    h.powf(T::of(value_part - j as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_sine_samples() {
        let dom = LatticeDomain::new(vec![8]).unwrap();
        let one = FnFunction::new(1, 1, |_: &[f64], o: &mut [f64]| o[0] = 1.0);
        let u = sample_to_lattice(&one, &dom, 0.125).unwrap();
        assert!(u.values().iter().all(|&v| v == 1.0));

        let h = 0.125;
        let sine = FnFunction::new(1, 1, |x: &[f64], o: &mut [f64]| {
            o[0] = (2.0 * std::f64::consts::PI * x[0] / (h * 8.0)).sin()
        });
        let u = sample_to_lattice(&sine, &dom, h).unwrap();
        for (i, &v) in u.values().iter().enumerate() {
            let expect = (2.0 * std::f64::consts::PI * i as f64 / 8.0).sin();
            assert!((v - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn non_finite_sample_is_an_error() {
        let dom = LatticeDomain::new(vec![4]).unwrap();
        let bad = FnFunction::new(1, 1, |x: &[f64], o: &mut [f64]| o[0] = 1.0 / x[0]);
        assert!(matches!(
            sample_to_lattice(&bad, &dom, 1.0),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn rescale_bookkeeping() {
        assert!((rescale_factor(0.5f64, 2, 2.0, 0) - 0.5).abs() < 1e-15);
        assert!((rescale_factor(0.5f64, 1, 2.0, 1) - 2f64.sqrt()).abs() < 1e-15);
        assert!((rescale_factor(0.25f64, 3, f64::INFINITY, 2) - 16.0).abs() < 1e-12);
    }
}
