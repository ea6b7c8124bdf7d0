use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::SmoothFunction;
use crate::scalar::Scalar;

/// A real polynomial in `d` variables, stored as `(exponents, coefficient)`
/// terms with distinct exponent vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial<T> {
    dim: usize,
    terms: Vec<(Vec<u32>, T)>,
}

/// Which monomials count as "degree ≤ n" in several variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeKind {
    /// `Σ α_i ≤ n`.
    Total,
    /// `max α_i ≤ n`.
    PerVariable,
}

/// All exponent vectors of degree `≤ n`, ordered by total degree, then
/// lexicographically.
pub fn monomial_exponents(dim: usize, n: u32, kind: DegreeKind) -> Vec<Vec<u32>> {
    let side = n + 1;
    let mut out: Vec<Vec<u32>> = (0..side.pow(dim as u32))
        .map(|mut flat| {
            let mut e = vec![0u32; dim];
            for slot in e.iter_mut().rev() {
                *slot = flat % side;
                flat /= side;
            }
            e
        })
        .filter(|e| match kind {
            DegreeKind::Total => e.iter().sum::<u32>() <= n,
            DegreeKind::PerVariable => true,
        })
        .collect();
    out.sort_by(|a, b| {
        a.iter()
            .sum::<u32>()
            .cmp(&b.iter().sum::<u32>())
            .then_with(|| b.cmp(a))
    });
    out
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(dim: usize, terms: Vec<(Vec<u32>, T)>) -> Result<Self> {
        if terms.iter().any(|(e, _)| e.len() != dim) {
            return Err(Error::InvalidParameter(format!(
                "exponent vector length differs from {dim}"
            )));
        }
        let mut merged: Vec<(Vec<u32>, T)> = Vec::new();
        for (e, c) in terms {
            match merged.iter_mut().find(|(f, _)| *f == e) {
                Some(slot) => slot.1 = slot.1 + c,
                None => merged.push((e, c)),
            }
        }
        merged.retain(|(_, c)| *c != T::zero());
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Self { dim, terms: merged })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn monomial(exponents: Vec<u32>) -> Self {
        Self {
            dim: exponents.len(),
            terms: vec![(exponents, T::one())],
        }
    }

    /// `a + b·x`.
    pub fn affine(a: T, b: &[T]) -> Self {
        let d = b.len();
        let mut terms = vec![(vec![0; d], a)];
        for (i, &bi) in b.iter().enumerate() {
            let mut e = vec![0; d];
            e[i] = 1;
            terms.push((e, bi));
        }
        Self::new(d, terms).expect("consistent dimensions")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Vec<u32>, T)] {
        &self.terms
    }

    /// Total degree (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn coefficient(&self, exponents: &[u32]) -> T {
        self.terms
            .iter()
            .find(|(e, _)| e.as_slice() == exponents)
            .map_or(T::zero(), |(_, c)| *c)
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.terms.iter().fold(T::zero(), |acc, (e, c)| {
            acc + *c
                * e.iter()
                    .zip(x)
                    .fold(T::one(), |p, (&k, &xi)| p * xi.powi(k as i32))
        })
    }

    /// Mixed partial derivative with `counts[i]` derivatives in variable `i`.
    pub fn partial(&self, counts: &[u32]) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().zip(counts).all(|(&k, &c)| k >= c))
            .map(|(e, c)| {
                let mut coeff = *c;
                let mut ne = e.clone();
                for (k, &cnt) in ne.iter_mut().zip(counts) {
                    for j in 0..cnt {
                        coeff = coeff * T::of((*k - j) as f64);
                    }
                    *k -= cnt;
                }
                (ne, coeff)
            })
            .collect();
        Self::new(self.dim, terms).expect("consistent dimensions")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::InvalidParameter(
                "polynomials in different dimensions".into(),
            ));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(self.dim, terms)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(
            self.dim,
            self.terms
                .iter()
                .map(|(e, c)| (e.clone(), *c * s))
                .collect(),
        )
        .expect("consistent dimensions")
    }
}

impl<T: Scalar> SmoothFunction<T> for Polynomial<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn max_order(&self) -> usize {
        usize::MAX
    }

    fn derivative(&self, x: &[T], order: usize, out: &mut [T]) -> Result<()> {
        let d = self.dim;
        for (flat, o) in out.iter_mut().enumerate() {
            let mut counts = vec![0u32; d];
            let mut rest = flat;
            for _ in 0..order {
                counts[rest % d] += 1;
                rest /= d;
            }
            *o = self.partial(&counts).eval(x);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_partials_and_degree() {
        // 2 + x y² − 3 x³
        let p = Polynomial::new(
            2,
            vec![(vec![0, 0], 2.0), (vec![1, 2], 1.0), (vec![3, 0], -3.0)],
        )
        .unwrap();
        assert_eq!(p.degree(), 3);
        assert_eq!(p.eval(&[2.0, 1.0]), 2.0 + 2.0 - 24.0);
        let dxy = p.partial(&[1, 1]);
        assert_eq!(dxy.eval(&[5.0, 3.0]), 6.0);
        let mut hess = [0.0; 4];
        p.derivative(&[1.0, 2.0], 2, &mut hess).unwrap();
        assert_eq!(hess, [-18.0, 4.0, 4.0, 2.0]);
    }

    #[test]
    fn merging_and_monomial_counts() {
        let p = Polynomial::new(1, vec![(vec![1], 1.0), (vec![1], -1.0)]).unwrap();
        assert!(p.terms().is_empty());
        assert_eq!(monomial_exponents(1, 3, DegreeKind::Total).len(), 4);
        assert_eq!(monomial_exponents(2, 3, DegreeKind::Total).len(), 10);
        assert_eq!(monomial_exponents(3, 3, DegreeKind::Total).len(), 20);
        assert_eq!(monomial_exponents(2, 3, DegreeKind::PerVariable).len(), 16);
        let e = monomial_exponents(2, 1, DegreeKind::Total);
        assert_eq!(e, vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
    }
}
