//! The bi-orthogonal dual basis `ζ̃*`, the quasi-interpolant `J̃`, and
//! polynomial reproduction by translates of `ζ̃`.

mod dual;
mod polynomial;
mod reproduce;

pub use dual::{
    apply_quasi, apply_quasi_on, build_dual, DualBasis, DualSummary, QuasiInterpolant,
    MAX_GRAM_CONDITION,
};
pub use polynomial::{monomial_exponents, DegreeKind, Polynomial};
pub use reproduce::{
    cubic_preimage, cubic_preimage_polynomial, two_basis_difference_check, DifferenceReport,
    PreimageMap, SampleWindow,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{NodalBasis, SmoothedBasis};
    use crate::interp::InterpolantField;
    use crate::lattice::LatticeDomain;

    fn q1s(d: usize) -> SmoothedBasis<f64> {
        SmoothedBasis::new(NodalBasis::q1(d).unwrap())
    }

    #[test]
    fn dual_in_one_dimension() {
        let dual = build_dual(q1s(1)).unwrap();
        assert_eq!(dual.index().len(), 7);
        for xi in 1..=3 {
            assert!((dual.coefficient(&[xi]) - dual.coefficient(&[-xi])).abs() < 1e-9);
        }
        let res = dual.biorthogonality_residuals(6).unwrap();
        assert!(res.iter().all(|&r| r < 1e-10), "{res:?}");
        assert!(dual.gram_condition() < 1e6);
    }

    #[test]
    fn quadrature_backend_is_rejected() {
        let sb = SmoothedBasis::new(NodalBasis::<f64>::p1_standard(2).unwrap());
        assert!(build_dual(sb).is_err());
    }

    #[test]
    fn preimages_of_low_degree_monomials() {
        let sb = q1s(1);
        let x2 = cubic_preimage_polynomial(&Polynomial::monomial(vec![2]), &sb).unwrap();
        assert!((x2.coefficient(&[2]) - 1.0).abs() < 1e-10);
        assert!((x2.coefficient(&[0]) + 1.0 / 3.0).abs() < 1e-10);
        let x3 = cubic_preimage_polynomial(&Polynomial::monomial(vec![3]), &sb).unwrap();
        assert!((x3.coefficient(&[3]) - 1.0).abs() < 1e-10);
        assert!((x3.coefficient(&[1]) + 1.0).abs() < 1e-10);
        let aff = Polynomial::affine(0.5, &[2.0]);
        let w = cubic_preimage_polynomial(&aff, &sb).unwrap();
        assert!(
            (w.coefficient(&[0]) - 0.5).abs() < 1e-12 && (w.coefficient(&[1]) - 2.0).abs() < 1e-12
        );
        assert!(matches!(
            cubic_preimage_polynomial(&Polynomial::monomial(vec![4]), &sb),
            Err(crate::Error::DegreeTooHigh { degree: 4, max: 3 })
        ));
    }

    #[test]
    fn preimage_field_reproduces_cubic_in_2d() {
        let sb = q1s(2);
        let p = Polynomial::new(
            2,
            vec![(vec![2, 1], 1.0), (vec![0, 3], -0.5), (vec![1, 0], 2.0)],
        )
        .unwrap();
        let dom = LatticeDomain::new(vec![12, 12]).unwrap();
        let w = cubic_preimage(&p, &sb, &dom).unwrap();
        let f = InterpolantField::tilde(w, sb).unwrap();
        for x in [[5.3, 6.1], [4.0, 4.5], [7.7, 5.2]] {
            let v = f.evaluate(&x, 0).unwrap()[0];
            assert!((v - p.eval(&x)).abs() < 1e-10, "{x:?}");
        }
    }

    #[test]
    fn identical_bases_have_zero_difference() {
        let sb = q1s(1);
        let w = SampleWindow {
            lo: vec![0.0],
            hi: vec![1.0],
            points_per_axis: 9,
        };
        let rep = two_basis_difference_check(&sb, &sb, &Polynomial::monomial(vec![3]), &w).unwrap();
        assert_eq!(rep.max_abs, 0.0);
        assert_eq!(rep.residual, 0.0);
    }
}
