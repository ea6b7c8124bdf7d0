use crate::error::{Error, Result};
use crate::lattice::LatticeDomain;
use crate::scalar::Scalar;

/// A vector-valued lattice function `u : Z^d → R^m` on a periodic box.
///
/// Values are stored densely, one block of `m` components per site, sites in
/// the domain's storage order. Construction rejects non-finite values, so
/// every `LatticeFunction` is finite.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeFunction<T> {
    domain: LatticeDomain,
    components: usize,
    values: Vec<T>,
}

impl<T: Scalar> LatticeFunction<T> {
    pub fn new(domain: LatticeDomain, components: usize, values: Vec<T>) -> Result<Self> {
        if components == 0 {
            return Err(Error::InvalidParameter("zero components".into()));
        }
        if values.len() != domain.len() * components {
            return Err(Error::InvalidParameter(format!(
                "expected {} values ({} sites x {} components), got {}",
                domain.len() * components,
                domain.len(),
                components,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                site: pos / components,
            });
        }
        Ok(Self {
            domain,
            components,
            values,
        })
    }

    pub fn zeros(domain: LatticeDomain, components: usize) -> Self {
        let values = vec![T::zero(); domain.len() * components];
        Self {
            domain,
            components: components.max(1),
            values,
        }
    }

    pub fn constant(domain: LatticeDomain, value: &[T]) -> Self {
        let values = (0..domain.len())
            .flat_map(|_| value.iter().copied())
            .collect();
        Self {
            domain,
            components: value.len(),
            values,
        }
    }

    /// Build from a closure of the canonical site.
    pub fn from_fn<F>(domain: LatticeDomain, components: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[i64]) -> Vec<T>,
    {
        let mut values = Vec::with_capacity(domain.len() * components);
        for site in domain.sites() {
            let v = f(&site);
            if v.len() != components {
                return Err(Error::InvalidParameter(format!(
                    "closure returned {} components, expected {components}",
                    v.len()
                )));
            }
            values.extend(v);
        }
        Self::new(domain, components, values)
    }

    /// Scalar field from a closure.
    pub fn from_scalar_fn<F>(domain: LatticeDomain, mut f: F) -> Result<Self>
    where
        F: FnMut(&[i64]) -> T,
    {
        Self::from_fn(domain, 1, |s| vec![f(s)])
    }

    /// `u(ξ) = A ξ + b` with `ξ` the canonical (unwrapped) site in `[0, N)`.
    ///
    /// `a` is `m × d` row-major, `b` has length `m`.
    pub fn affine_sample(domain: LatticeDomain, a: &[T], b: &[T]) -> Result<Self> {
        let d = domain.dim();
        let m = b.len();
        if m == 0 || a.len() != m * d {
            return Err(Error::InvalidParameter(format!(
                "affine map shape mismatch: A has {} entries, expected {}x{}",
                a.len(),
                m,
                d
            )));
        }
        Self::from_fn(domain, m, |site| {
            (0..m)
                .map(|r| {
                    site.iter()
                        .enumerate()
                        .fold(b[r], |acc, (c, &s)| acc + a[r * d + c] * T::of_i64(s))
                })
                .collect()
        })
    }

    pub fn domain(&self) -> &LatticeDomain {
        &self.domain
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Value block at a storage slot.
    #[inline]
    pub fn at(&self, index: usize) -> &[T] {
        &self.values[index * self.components..(index + 1) * self.components]
    }

    /// Value block at an arbitrary (wrapped) site.
    #[inline]
    pub fn get(&self, site: &[i64]) -> &[T] {
        self.at(self.domain.index(site))
    }

    /// Extract one component as a scalar field.
    pub fn component(&self, c: usize) -> LatticeFunction<T> {
        let values = self
            .values
            .iter()
            .skip(c)
            .step_by(self.components)
            .copied()
            .collect();
        LatticeFunction {
            domain: self.domain.clone(),
            components: 1,
            values,
        }
    }

    /// Reassemble from scalar fields on a common domain.
    pub fn from_components(parts: &[LatticeFunction<T>]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("no components".into()))?;
        let n = first.domain.len();
        let m = parts.len();
        let mut values = vec![T::zero(); n * m];
        for (c, p) in parts.iter().enumerate() {
            first.domain.ensure_same(&p.domain)?;
            if p.components != 1 {
                return Err(Error::InvalidParameter("parts must be scalar".into()));
            }
            for (i, &v) in p.values.iter().enumerate() {
                values[i * m + c] = v;
            }
        }
        Ok(Self {
            domain: first.domain.clone(),
            components: m,
            values,
        })
    }

    /// Apply `f` to every value, keeping shape. Errors if the result is not finite.
    pub fn map<F: FnMut(T) -> T>(&self, f: F) -> Result<Self> {
        Self::new(
            self.domain.clone(),
            self.components,
            self.values.iter().copied().map(f).collect(),
        )
    }

    pub fn scale(&self, c: T) -> Result<Self> {
        self.map(|v| v * c)
    }

    fn zip_with<F: Fn(T, T) -> T>(&self, other: &Self, f: F) -> Result<Self> {
        self.domain.ensure_same(&other.domain)?;
        if self.components != other.components {
            return Err(Error::InvalidParameter(format!(
                "component mismatch: {} vs {}",
                self.components, other.components
            )));
        }
        Self::new(
            self.domain.clone(),
            self.components,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Add a constant vector `t ∈ R^m` at every site.
    pub fn translate(&self, t: &[T]) -> Result<Self> {
        if t.len() != self.components {
            return Err(Error::InvalidParameter(
                "translation has wrong length".into(),
            ));
        }
        let m = self.components;
        Self::new(
            self.domain.clone(),
            m,
            self.values
                .iter()
                .enumerate()
                .map(|(i, &v)| v + t[i % m])
                .collect(),
        )
    }

    /// `ℓ²` inner product `Σ_ξ u(ξ)·v(ξ)`.
    pub fn dot(&self, other: &Self) -> Result<T> {
        self.domain.ensure_same(&other.domain)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b))
    }

    /// `ℓ^p` norm with the Euclidean norm on `R^m`; `p = ∞` is a max.
    pub fn lp_norm(&self, p: f64) -> Result<T> {
        check_exponent(p)?;
        let m = self.components;
        let site_norm = |i: usize| -> T {
            let block = &self.values[i * m..(i + 1) * m];
            block.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
        };
        let n = self.domain.len();
        if p.is_infinite() {
            return Ok((0..n).map(site_norm).fold(T::zero(), T::max));
        }
        let pt = T::of(p);
        // Scale by the max entry so large p does not overflow.
        let scale = (0..n).map(site_norm).fold(T::zero(), T::max);
        if scale == T::zero() {
            return Ok(T::zero());
        }
        let sum: T = (0..n).map(|i| (site_norm(i) / scale).powf(pt)).sum();
        Ok(scale * sum.powf(T::one() / pt))
    }

    /// Periodic forward difference `D_k u(ξ) = u(ξ + e_k) − u(ξ)`.
    pub fn forward_difference(&self, axis: usize) -> Result<Self> {
        if axis >= self.domain.dim() {
            return Err(Error::InvalidParameter(format!(
                "axis {axis} out of range for dimension {}",
                self.domain.dim()
            )));
        }
        let m = self.components;
        let mut values = Vec::with_capacity(self.values.len());
        for (i, site) in self.domain.sites().enumerate() {
            let mut next = site;
            next[axis] += 1;
            let j = self.domain.index(&next);
            for c in 0..m {
                values.push(self.values[j * m + c] - self.values[i * m + c]);
            }
        }
        Self::new(self.domain.clone(), m, values)
    }

    /// Largest absolute entry difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.domain.ensure_same(&other.domain)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs())))
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "norm exponent p = {p} must be >= 1"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dom(ext: &[usize]) -> LatticeDomain {
        LatticeDomain::new(ext.to_vec()).unwrap()
    }

    #[test]
    fn lp_norm_examples() {
        let z = LatticeFunction::<f64>::zeros(dom(&[8]), 1);
        assert_eq!(z.lp_norm(2.0).unwrap(), 0.0);

        let mut v = vec![0.0f64; 16];
        v[6] = 3.0;
        v[7] = 4.0;
        let spike = LatticeFunction::new(dom(&[8]), 2, v).unwrap();
        assert!((spike.lp_norm(2.0).unwrap() - 5.0).abs() < 1e-15);
        assert!((spike.lp_norm(1.0).unwrap() - 5.0).abs() < 1e-15);
        assert!((spike.lp_norm(f64::INFINITY).unwrap() - 5.0).abs() < 1e-15);

        // Direct summation: sqrt(Σ 1) over 8 sites.
        let ones = LatticeFunction::constant(dom(&[8]), &[1.0]);
        let oracle = (0..8).map(|_| 1.0f64).sum::<f64>().sqrt();
        assert!((ones.lp_norm(2.0).unwrap() - oracle).abs() < 1e-15);
        assert!((oracle - 2.8284).abs() < 1e-4);
    }

    #[test]
    fn lp_norm_rejects_small_p() {
        let u = LatticeFunction::constant(dom(&[4]), &[1.0f64]);
        assert!(matches!(u.lp_norm(0.5), Err(Error::InvalidParameter(_))));
        assert!(u.lp_norm(f64::NAN).is_err());
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let r = LatticeFunction::new(dom(&[3]), 1, vec![0.0, f64::NAN, 1.0]);
        assert!(matches!(r, Err(Error::NonFinite { site: 1 })));
    }

    #[test]
    fn forward_difference_of_coordinate() {
        let n = 6;
        let u = LatticeFunction::<f64>::from_scalar_fn(dom(&[n]), |s| s[0] as f64).unwrap();
        let du = u.forward_difference(0).unwrap();
        for (i, &v) in du.values().iter().enumerate() {
            let expect = if i == n - 1 { -((n - 1) as f64) } else { 1.0 };
            assert_eq!(v, expect);
        }
        assert!(u.forward_difference(1).is_err());
    }

    #[test]
    fn mixed_difference_of_bilinear_monomial() {
        // D_1 D_2 (ξ_1 ξ_2) = 1 away from the wrap seam.
        let u =
            LatticeFunction::<f64>::from_scalar_fn(dom(&[7, 7]), |s| (s[0] * s[1]) as f64).unwrap();
        let dd = u
            .forward_difference(0)
            .unwrap()
            .forward_difference(1)
            .unwrap();
        for site in dd.domain().sites() {
            if site[0] < 5 && site[1] < 5 {
                assert_eq!(dd.get(&site)[0], 1.0);
            }
        }
    }

    #[test]
    fn affine_sample_examples() {
        let c = LatticeFunction::<f64>::affine_sample(dom(&[5, 5]), &[0.0; 2], &[2.5]).unwrap();
        assert!(c.values().iter().all(|&v| v == 2.5));

        let id = LatticeFunction::<f64>::affine_sample(dom(&[5]), &[1.0], &[0.0]).unwrap();
        assert_eq!(id.values(), &[0.0, 1.0, 2.0, 3.0, 4.0]);

        let shift =
            LatticeFunction::<f64>::affine_sample(dom(&[3, 4]), &[1.0, 0.0, 0.0, 1.0], &[1.0, 1.0])
                .unwrap();
        for site in shift.domain().sites() {
            assert_eq!(
                shift.get(&site),
                &[site[0] as f64 + 1.0, site[1] as f64 + 1.0]
            );
        }
        assert!(LatticeFunction::<f64>::affine_sample(dom(&[3]), &[1.0, 2.0], &[0.0]).is_err());
    }

    #[test]
    fn mismatched_domains_do_not_compose() {
        let a = LatticeFunction::constant(dom(&[4]), &[1.0f64]);
        let b = LatticeFunction::constant(dom(&[5]), &[1.0f64]);
        assert!(matches!(a.add(&b), Err(Error::DomainMismatch { .. })));
    }

    #[test]
    fn components_round_trip() {
        let u =
            LatticeFunction::<f64>::from_fn(dom(&[3, 2]), 2, |s| vec![s[0] as f64, -(s[1] as f64)])
                .unwrap();
        let parts = [u.component(0), u.component(1)];
        assert_eq!(LatticeFunction::from_components(&parts).unwrap(), u);
    }

    fn field(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, len)
    }

    proptest! {
        #[test]
        fn lp_norm_is_absolutely_homogeneous(vals in field(24), c in -5.0f64..5.0) {
            let u = LatticeFunction::new(dom(&[4, 3]), 2, vals).unwrap();
            let cu = u.scale(c).unwrap();
            for p in [1.0, 2.0, 3.5, f64::INFINITY] {
                let lhs = cu.lp_norm(p).unwrap();
                let rhs = c.abs() * u.lp_norm(p).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
            }
        }

        #[test]
        fn lp_norms_decrease_in_p(vals in field(16)) {
            let u = LatticeFunction::new(dom(&[16]), 1, vals).unwrap();
            let ps = [1.0, 1.5, 2.0, 4.0, 10.0, f64::INFINITY];
            for w in ps.windows(2) {
                let (q, p) = (w[0], w[1]);
                prop_assert!(u.lp_norm(p).unwrap() <= u.lp_norm(q).unwrap() * (1.0 + 1e-14));
            }
        }

        #[test]
        fn forward_difference_annihilates_constants(c in -100.0f64..100.0, axis in 0usize..3) {
            let u = LatticeFunction::constant(dom(&[3, 4, 5]), &[c, -c]);
            let du = u.forward_difference(axis).unwrap();
            prop_assert!(du.values().iter().all(|&v| v == 0.0));
        }
    }
}
