use crate::error::{Error, Result};
use crate::quadrature::{simplex_volume, SimplexRule};
use crate::scalar::Scalar;

use super::nodal::{Flavor, NodalBasis};
use super::polytope::Polytope;
use super::spline::cubic_bspline;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Tensor product of the centered cubic B-spline (Q1 parents only).
    AnalyticTensorCubic,
    /// `ζ̄ ∗ ζ̄` integrated piece by piece.
    ConvolutionQuadrature,
}

/// Piecewise integration of `∫ f(x − y) g(y) dy` where `f`, `g` are
/// derivatives of the parent basis.
///
/// On every pair (piece `P` for `y`, piece `R` for `x − y`) the integrand is
/// one polynomial, so `P ∩ (x − R)` is split into simplices and integrated
/// with a collapsed Gauss rule exact for the product degree. The only error
/// is round-off in the intersection geometry.
#[derive(Clone, Debug)]
struct ConvolutionEngine<T> {
    pieces: Vec<Polytope<T>>,
    rule: SimplexRule<T>,
}

impl<T: Scalar> ConvolutionEngine<T> {
    fn new(parent: &NodalBasis<T>) -> Self {
        Self {
            pieces: parent.pieces(),
            rule: SimplexRule::new(parent.dim(), 2 * parent.piece_degree()),
        }
    }

    /// Entries of value, gradient and Hessian (up to `max_order`), flattened.
    fn jet(&self, parent: &NodalBasis<T>, x: &[T], max_order: usize) -> Vec<T> {
        let d = x.len();
        let n = (0..=max_order).map(|k| d.pow(k as u32)).sum();
        let mut acc = vec![T::zero(); n];
        let eps = T::geom_eps();
        let mut ga = vec![T::zero(); d];
        let mut gb = vec![T::zero(); d];
        let mut xy = vec![T::zero(); d];
        for r in &self.pieces {
            let reflected = r.reflected_about(x);
            for p in &self.pieces {
                if !p.bbox_overlaps(&reflected, eps) {
                    continue;
                }
                for simplex in p.intersection_simplices(&reflected) {
                    let vol = simplex_volume(&simplex).abs();
                    if vol <= eps * eps {
                        continue;
                    }
                    self.rule.for_each_node(&simplex, vol, |y, w| {
                        for i in 0..d {
                            xy[i] = x[i] - y[i];
                        }
                        let b = parent.value(y);
                        acc[0] = acc[0] + w * parent.value(&xy) * b;
                        if max_order >= 1 {
                            parent.gradient(&xy, &mut ga);
                            for i in 0..d {
                                acc[1 + i] = acc[1 + i] + w * ga[i] * b;
                            }
                        }
                        if max_order >= 2 {
                            parent.gradient(y, &mut gb);
                            for i in 0..d {
                                for j in 0..d {
                                    let k = 1 + d + i * d + j;
                                    acc[k] = acc[k] + w * ga[i] * gb[j];
                                }
                            }
                        }
                    });
                }
            }
        }
        acc
    }
}

/// The smoothed basis `ζ̃ = ζ̄ ∗ ζ̄`, generating `ũ(x) = Σ_ξ u(ξ) ζ̃(x − ξ)`.
///
/// Derivative tensors of order `k` are stored row-major over the multi-index
/// `(i_1, …, i_k)`, so the Hessian entry `∂_i ∂_j` sits at `i·d + j`.
#[derive(Clone, Debug)]
pub struct SmoothedBasis<T> {
    parent: NodalBasis<T>,
    backend: Backend,
    engine: Option<ConvolutionEngine<T>>,
}

impl<T: Scalar> SmoothedBasis<T> {
    /// Analytic for Q1, piecewise quadrature otherwise.
    pub fn new(parent: NodalBasis<T>) -> Self {
        let backend = if parent.flavor() == Flavor::Q1 {
            Backend::AnalyticTensorCubic
        } else {
            Backend::ConvolutionQuadrature
        };
        Self::with_backend(parent, backend).expect("backend matches flavor")
    }

    /// Force a backend, e.g. quadrature for a Q1 parent to cross-validate.
    pub fn with_backend(parent: NodalBasis<T>, backend: Backend) -> Result<Self> {
        let engine = match backend {
            Backend::AnalyticTensorCubic => {
                if parent.flavor() != Flavor::Q1 {
                    return Err(Error::InvalidParameter(format!(
                        "analytic backend needs a Q1 parent, got {}",
                        parent.label()
                    )));
                }
                None
            }
            Backend::ConvolutionQuadrature => Some(ConvolutionEngine::new(&parent)),
        };
        Ok(Self {
            parent,
            backend,
            engine,
        })
    }

    pub fn parent(&self) -> &NodalBasis<T> {
        &self.parent
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn dim(&self) -> usize {
        self.parent.dim()
    }

    pub fn support_radius(&self) -> T {
        self.parent.support_radius() * T::of(2.0)
    }

    pub fn support_cells(&self) -> i64 {
        self.support_radius().ceil().to_i64().unwrap_or(0)
    }

    /// Highest derivative order the backend provides.
    pub fn max_order(&self) -> usize {
        match self.backend {
            Backend::AnalyticTensorCubic => 3,
            Backend::ConvolutionQuadrature => 2,
        }
    }

    /// Declared pointwise accuracy of values and derivatives.
    pub fn tolerance(&self) -> T {
        match self.backend {
            Backend::AnalyticTensorCubic => T::epsilon() * T::of(64.0),
            Backend::ConvolutionQuadrature => T::of(1e-10).max(T::epsilon() * T::of(1e3)),
        }
    }

    pub fn value(&self, x: &[T]) -> T {
        match &self.engine {
            None => x.iter().fold(T::one(), |acc, &t| acc * cubic_bspline(t, 0)),
            Some(engine) => {
                if self.outside(x) {
                    T::zero()
                } else {
                    engine.jet(&self.parent, x, 0)[0]
                }
            }
        }
    }

    /// All derivative tensors of order `0..=max_order`, outer index = order.
    pub fn jet(&self, x: &[T], max_order: usize) -> Result<Vec<Vec<T>>> {
        if max_order > self.max_order() {
            return Err(Error::UnsupportedOrder {
                requested: max_order,
                max: self.max_order(),
            });
        }
        let d = self.dim();
        let sizes: Vec<usize> = (0..=max_order).map(|k| d.pow(k as u32)).collect();
        match &self.engine {
            None => Ok(sizes
                .iter()
                .enumerate()
                .map(|(k, &n)| (0..n).map(|flat| analytic_entry(x, k, flat)).collect())
                .collect()),
            Some(engine) => {
                if self.outside(x) {
                    return Ok(sizes.iter().map(|&n| vec![T::zero(); n]).collect());
                }
                let flat = engine.jet(&self.parent, x, max_order);
                let mut out = Vec::with_capacity(sizes.len());
                let mut start = 0;
                for n in sizes {
                    out.push(flat[start..start + n].to_vec());
                    start += n;
                }
                Ok(out)
            }
        }
    }

    /// `∇^order ζ̃(x)` written into `out` (length `d^order`).
    pub fn derivative(&self, x: &[T], order: usize, out: &mut [T]) -> Result<()> {
        if order > self.max_order() {
            return Err(Error::UnsupportedOrder {
                requested: order,
                max: self.max_order(),
            });
        }
        match &self.engine {
            None => {
                for (flat, o) in out.iter_mut().enumerate() {
                    *o = analytic_entry(x, order, flat);
                }
            }
            Some(_) => {
                let jet = self.jet(x, order)?;
                out.copy_from_slice(&jet[order]);
            }
        }
        Ok(())
    }

    fn outside(&self, x: &[T]) -> bool {
        let r = self.support_radius();
        x.iter().any(|&t| t.abs() >= r)
    }
}

/// Entry `flat` of the order-`k` derivative tensor of `Π B(x_i)`.
fn analytic_entry<T: Scalar>(x: &[T], k: usize, flat: usize) -> T {
    let d = x.len();
    let mut counts = [0usize; 3];
    let mut rest = flat;
    for _ in 0..k {
        counts[rest % d] += 1;
        rest /= d;
    }
    x.iter()
        .enumerate()
        .fold(T::one(), |acc, (i, &t)| acc * cubic_bspline(t, counts[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent 1D oracle: composite midpoint rule for `∫ f(x − y) g(y) dy`.
    fn midpoint_conv(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, x: f64) -> f64 {
        let n = 200_000;
        let (a, b) = (-3.0, 3.0);
        let h = (b - a) / n as f64;
        (0..n)
            .map(|i| {
                let y = a + (i as f64 + 0.5) * h;
                f(x - y) * g(y)
            })
            .sum::<f64>()
            * h
    }

    fn hat(t: f64) -> f64 {
        (1.0 - t.abs()).max(0.0)
    }

    #[test]
    fn q1_knot_values_match_convolution_oracle() {
        let s = SmoothedBasis::new(NodalBasis::<f64>::q1(1).unwrap());
        assert_eq!(s.backend(), Backend::AnalyticTensorCubic);
        for x in [0.0, 1.0, -1.0, 0.3, 1.7] {
            let oracle = midpoint_conv(hat, hat, x);
            assert!((s.value(&[x]) - oracle).abs() < 1e-9, "x={x}");
        }
        assert!((s.value(&[0.0]) - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.value(&[1.0]) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(s.value(&[2.0]), 0.0);
        assert_eq!(s.value(&[-2.4]), 0.0);
        assert_eq!(s.support_radius(), 2.0);
    }

    #[test]
    fn q1_partition_of_unity() {
        let s = SmoothedBasis::new(NodalBasis::<f64>::q1(1).unwrap());
        let sum: f64 = (-3..=3).map(|k| s.value(&[0.3 - k as f64])).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn backends_agree_for_q1() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in 1..=2 {
            let analytic = SmoothedBasis::new(NodalBasis::<f64>::q1(dim).unwrap());
            let quad = SmoothedBasis::with_backend(
                NodalBasis::<f64>::q1(dim).unwrap(),
                Backend::ConvolutionQuadrature,
            )
            .unwrap();
            let tol = quad.tolerance();
            for _ in 0..60 {
                let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.2..2.2)).collect();
                let a = analytic.jet(&x, 2).unwrap();
                let q = quad.jet(&x, 2).unwrap();
                for (ao, qo) in a.iter().zip(&q) {
                    for (u, v) in ao.iter().zip(qo) {
                        assert!((u - v).abs() < tol, "x={x:?} {u} vs {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn extended_hat_smoothed_against_oracle() {
        let parent = NodalBasis::<f64>::extended_hat();
        let s = SmoothedBasis::new(parent.clone());
        assert_eq!(s.support_radius(), 4.0);
        // ∫ ζ̄² = 2/9 + 2/27.
        assert!((s.value(&[0.0]) - 8.0 / 27.0).abs() < 1e-13);
        for x in [0.4, 1.3, 2.9, -3.5] {
            let oracle = midpoint_conv(|t| parent.value(&[t]), |t| parent.value(&[t]), x);
            assert!((s.value(&[x]) - oracle).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let s = SmoothedBasis::new(NodalBasis::<f64>::q1(1).unwrap());
        let h = 1e-5;
        for x in [0.25, 0.6, 1.4, -0.8, -1.7] {
            let mut gp = [0.0];
            let mut gm = [0.0];
            let mut hess = [0.0];
            s.derivative(&[x + h], 1, &mut gp).unwrap();
            s.derivative(&[x - h], 1, &mut gm).unwrap();
            s.derivative(&[x], 2, &mut hess).unwrap();
            assert!(((gp[0] - gm[0]) / (2.0 * h) - hess[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn p1_smoothed_is_even_and_sums_to_one() {
        let s = SmoothedBasis::new(NodalBasis::<f64>::p1_standard(2).unwrap());
        assert_eq!(s.backend(), Backend::ConvolutionQuadrature);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let x = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
            let mut sum = 0.0;
            for i in -3..=3 {
                for j in -3..=3 {
                    sum += s.value(&[x[0] - i as f64, x[1] - j as f64]);
                }
            }
            assert!((sum - 1.0).abs() < 1e-10, "{sum}");
            let v = s.value(&x);
            assert!((v - s.value(&[-x[0], -x[1]])).abs() < 1e-12);
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn third_order_only_on_analytic_backend() {
        let q = SmoothedBasis::new(NodalBasis::<f64>::p1_standard(1).unwrap());
        let mut out = [0.0];
        assert!(matches!(
            q.derivative(&[0.2], 3, &mut out),
            Err(Error::UnsupportedOrder {
                requested: 3,
                max: 2
            })
        ));
        let a = SmoothedBasis::new(NodalBasis::<f64>::q1(1).unwrap());
        a.derivative(&[0.2], 3, &mut out).unwrap();
        assert_eq!(out[0], 3.0);
        let a2 = SmoothedBasis::new(NodalBasis::<f64>::q1(2).unwrap());
        let mut t = [0.0; 8];
        a2.derivative(&[0.2, 0.5], 3, &mut t).unwrap();
        // Multi-index (1,0,0) -> flat 4: two x-derivatives and one y-derivative.
        let expect = cubic_bspline(0.2, 2) * cubic_bspline(0.5, 1);
        assert!((t[4] - expect).abs() < 1e-15);
    }
}
