//! The convolution operator `𝒞 : u ↦ ũ|_{Z^d}`, its Fourier multiplier,
//! spectral inversion on periodic boxes, the inverse kernel and the smooth
//! nodal interpolant `Ĩu = (𝒞⁻¹u)~`.

mod fft;
mod kernel;
mod operator;

pub use kernel::{inverse_kernel, InverseKernel};
pub use operator::{smooth_nodal_interpolant, ConvolutionOperator, MIN_MULTIPLIER_TOL};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::NodalBasis;
    use crate::lattice::{LatticeDomain, LatticeFunction};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(dom: &LatticeDomain, seed: u64) -> LatticeFunction<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        LatticeFunction::from_scalar_fn(dom.clone(), |_| rng.random_range(-1.0..1.0)).unwrap()
    }

    /// Independent oracle: midpoint rule for `∫ hat(x) hat(x − δ) dx`.
    fn hat_overlap(delta: f64) -> f64 {
        let n = 100_000;
        let h = 4.0 / n as f64;
        (0..n)
            .map(|i| {
                let x = -2.0 + (i as f64 + 0.5) * h;
                (1.0 - x.abs()).max(0.0) * (1.0 - (x - delta).abs()).max(0.0)
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn q1_stencil_and_multiplier() {
        let op = ConvolutionOperator::new(
            &NodalBasis::<f64>::q1(1).unwrap(),
            LatticeDomain::new(vec![16]).unwrap(),
        )
        .unwrap();
        for delta in -1..=1 {
            assert!((op.stencil_at(&[delta]) - hat_overlap(delta as f64)).abs() < 1e-9);
        }
        assert!((op.stencil_at(&[0]) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(op.stencil_at(&[2]), 0.0);
        assert_eq!(op.stencil_radius(), 1);
        for (k, &m) in op.multiplier().iter().enumerate() {
            let closed = 2.0 / 3.0 + (2.0 * std::f64::consts::PI * k as f64 / 16.0).cos() / 3.0;
            assert!((m - closed).abs() < 1e-12);
        }
        assert!((op.min_multiplier() - 1.0 / 3.0).abs() < 1e-12);
        assert!((op.multiplier()[8] - 1.0 / 3.0).abs() < 1e-12);

        let op2 = ConvolutionOperator::new(
            &NodalBasis::<f64>::q1(2).unwrap(),
            LatticeDomain::new(vec![8, 8]).unwrap(),
        )
        .unwrap();
        assert!((op2.stencil_at(&[0, 0]) - 4.0 / 9.0).abs() < 1e-15);
        let total: f64 = op2.stencil().iter().map(|(_, v)| v).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nyquist_eigenvector() {
        let dom = LatticeDomain::new(vec![10]).unwrap();
        let op = ConvolutionOperator::new(&NodalBasis::<f64>::q1(1).unwrap(), dom.clone()).unwrap();
        let alt = LatticeFunction::from_scalar_fn(dom, |s| if s[0] % 2 == 0 { 1.0 } else { -1.0 })
            .unwrap();
        let cu = op.apply(&alt).unwrap();
        assert!(cu.max_abs_diff(&alt.scale(1.0 / 3.0).unwrap()).unwrap() < 1e-15);
        let inv = op.solve(&alt).unwrap();
        assert!(inv.max_abs_diff(&alt.scale(3.0).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn round_trip_and_spectral_apply_agree() {
        for (ext, basis) in [
            (vec![16], NodalBasis::<f64>::q1(1).unwrap()),
            (vec![6, 7], NodalBasis::<f64>::q1(2).unwrap()),
            (vec![6, 6], NodalBasis::<f64>::p1_standard(2).unwrap()),
        ] {
            let dom = LatticeDomain::new(ext).unwrap();
            let op = ConvolutionOperator::new(&basis, dom.clone()).unwrap();
            let u = random(&dom, 5);
            let cu = op.apply(&u).unwrap();
            assert!(cu.max_abs_diff(&op.apply_spectral(&u).unwrap()).unwrap() < 1e-13);
            assert!(op.solve(&cu).unwrap().max_abs_diff(&u).unwrap() < 1e-12);
        }
    }

    #[test]
    fn too_small_domain_and_zero_modes() {
        let exthat = NodalBasis::<f64>::extended_hat();
        assert!(matches!(
            ConvolutionOperator::new(&exthat, LatticeDomain::new(vec![6]).unwrap()),
            Err(crate::Error::DomainTooSmall { .. })
        ));
        // The extended hat's multiplier vanishes at frequency 1/3.
        let op = ConvolutionOperator::new(&exthat, LatticeDomain::new(vec![12]).unwrap()).unwrap();
        assert!(op.min_multiplier().abs() < 1e-14);
        let f = LatticeFunction::constant(op.domain().clone(), &[1.0]);
        assert!(matches!(
            op.solve(&f),
            Err(crate::Error::NonInvertible { .. })
        ));
    }

    #[test]
    fn q1_inverse_kernel_closed_form() {
        let op = ConvolutionOperator::new(
            &NodalBasis::<f64>::q1(1).unwrap(),
            LatticeDomain::new(vec![16]).unwrap(),
        )
        .unwrap();
        let g = inverse_kernel(&op, 12).unwrap();
        let r = 3f64.sqrt() - 2.0;
        for xi in -12i64..=12 {
            let closed = 3f64.sqrt() * r.powi(xi.abs() as i32);
            assert!((g.get(&[xi]) - closed).abs() < 1e-12, "ξ={xi}");
        }
        assert!((g.sum - 1.0).abs() < 1e-12);
        assert!(g.envelope_is_monotone(1));
        let g2 = inverse_kernel(&op, 14).unwrap();
        assert!(g2.tail_bound <= 0.5 * g.tail_bound);
    }
}
