use latinterp::basis::{NodalBasis, SmoothedBasis};
use latinterp::interp::{FnFunction, InterpolantField, SmoothFunction};
use latinterp::lattice::{LatticeDomain, LatticeFunction};
use latinterp::quasi::{
    apply_quasi, build_dual, cubic_preimage, monomial_exponents, two_basis_difference_check,
    DegreeKind, Polynomial, QuasiInterpolant, SampleWindow,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q1s(d: usize) -> SmoothedBasis<f64> {
    SmoothedBasis::new(NodalBasis::q1(d).unwrap())
}

/// Independent Gram assembly for 1D: composite Simpson on a fine grid.
fn simpson_gram_1d(sb: &SmoothedBasis<f64>) -> DMatrix<f64> {
    let n = 4000;
    let h = 4.0 / n as f64;
    DMatrix::from_fn(7, 7, |i, j| {
        let (a, b) = (i as f64 - 3.0, j as f64 - 3.0);
        (0..=n)
            .map(|k| {
                let x = -2.0 + k as f64 * h;
                let w = if k == 0 || k == n {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * sb.value(&[x - a]) * sb.value(&[x - b])
            })
            .sum::<f64>()
            * h
            / 3.0
    })
}

#[test]
fn gram_is_spd_and_dual_is_biorthogonal() {
    let sb = q1s(1);
    let gram = simpson_gram_1d(&sb);
    assert!(gram.clone().cholesky().is_some(), "Gram must be SPD");
    let dual = build_dual(sb.clone()).unwrap();
    // a solves the independently assembled system too.
    let a = nalgebra::DVector::from_iterator(7, (-3..=3).map(|xi| dual.coefficient(&[xi])));
    let mut e0 = nalgebra::DVector::zeros(7);
    e0[3] = 1.0;
    assert!((&gram * &a - e0).amax() < 1e-9);
    let res = dual.biorthogonality_residuals(7).unwrap();
    assert_eq!(res.len(), 7);
    assert!(res.iter().all(|&r| r <= 1e-9));
}

#[test]
fn dual_in_two_dimensions_is_separable() {
    let d1 = build_dual(q1s(1)).unwrap();
    let d2 = build_dual(q1s(2)).unwrap();
    assert_eq!(d2.index().len(), 49);
    for i in -3..=3 {
        for j in -3..=3 {
            let expect = d1.coefficient(&[i]) * d1.coefficient(&[j]);
            assert!(
                (d2.coefficient(&[i, j]) - expect).abs() <= 1e-10 * expect.abs().max(1.0),
                "{i} {j} {} {expect}",
                d2.coefficient(&[i, j])
            );
        }
    }
    assert!(d2
        .biorthogonality_residuals(5)
        .unwrap()
        .iter()
        .all(|&r| r < 1e-9));
}

#[test]
fn quasi_interpolant_is_a_projector() {
    let sb = q1s(1);
    let q = QuasiInterpolant::new(build_dual(sb.clone()).unwrap()).unwrap();
    let dom = LatticeDomain::new(vec![24]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let w =
            LatticeFunction::from_scalar_fn(dom.clone(), |_| rng.random_range(-1.0..1.0)).unwrap();
        let field = InterpolantField::tilde(w.clone(), sb.clone()).unwrap();
        // Periodic field: evaluate with wrap-around, so every site is interior.
        let v = FnFunction::new(1, 1, |x: &[f64], o: &mut [f64]| {
            o[0] = field.evaluate(x, 0).unwrap()[0]
        });
        let back = apply_quasi(&q, &v, &dom, 1.0).unwrap();
        assert!(back.coefficients().max_abs_diff(&w).unwrap() <= 1e-9);
    }
}

#[test]
fn constants_and_cubics_are_reproduced_quartics_are_not() {
    let sb = q1s(1);
    let q = QuasiInterpolant::new(build_dual(sb).unwrap()).unwrap();
    let dom = LatticeDomain::new(vec![20]).unwrap();
    let one = Polynomial::new(1, vec![(vec![0], 1.0)]).unwrap();
    let c = apply_quasi(&q, &one, &dom, 1.0).unwrap();
    assert!(c
        .coefficients()
        .values()
        .iter()
        .all(|v| (v - 1.0).abs() < 1e-12));

    let cubic = Polynomial::new(
        1,
        vec![
            (vec![3], 0.1),
            (vec![2], -0.4),
            (vec![1], 1.0),
            (vec![0], 2.0),
        ],
    )
    .unwrap();
    let f = apply_quasi(&q, &cubic, &dom, 1.0).unwrap();
    for i in 0..40 {
        let x = 6.0 + 8.0 * i as f64 / 40.0;
        assert!((f.evaluate(&[x], 0).unwrap()[0] - cubic.eval(&[x])).abs() <= 1e-9);
    }
    let quartic = Polynomial::monomial(vec![4]);
    let f4 = apply_quasi(&q, &quartic, &dom, 1.0).unwrap();
    let worst = (0..40)
        .map(|i| {
            let x = 6.0 + 8.0 * i as f64 / 40.0;
            (f4.evaluate(&[x], 0).unwrap()[0] - quartic.eval(&[x])).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst >= 1e-3, "quartic residual {worst}");
}

#[test]
fn two_dimensional_total_degree_cubics_are_reproduced() {
    let sb = q1s(2);
    let q = QuasiInterpolant::new(build_dual(sb).unwrap()).unwrap();
    let dom = LatticeDomain::new(vec![14, 14]).unwrap();
    for e in monomial_exponents(2, 3, DegreeKind::Total) {
        let p = Polynomial::monomial(e.clone());
        let f = apply_quasi(&q, &p, &dom, 1.0).unwrap();
        for x in [[6.2, 7.1], [5.5, 8.0], [7.9, 6.4]] {
            let got = f.evaluate(&x, 0).unwrap()[0];
            assert!((got - p.eval(&x)).abs() <= 1e-9, "{e:?} at {x:?}");
        }
    }
}

#[test]
fn coefficients_are_local() {
    let q = QuasiInterpolant::new(build_dual(q1s(1)).unwrap()).unwrap();
    let base = FnFunction::new(1, 1, |x: &[f64], o: &mut [f64]| o[0] = x[0].sin());
    let bumped = FnFunction::new(1, 1, |x: &[f64], o: &mut [f64]| {
        o[0] = x[0].sin() + if (x[0] - 5.0).abs() > 2.0 { 100.0 } else { 0.0 }
    });
    let a = q.coefficient(&base, &[5.0], 1.0).unwrap()[0];
    let b = q.coefficient(&bumped, &[5.0], 1.0).unwrap()[0];
    assert!((a - b).abs() <= 1e-14);
}

#[test]
fn q1_and_crisscross_differ_by_an_affine_function() {
    let b1 = q1s(2);
    let b2 = SmoothedBasis::new(NodalBasis::p1_standard(2).unwrap());
    let window = SampleWindow {
        lo: vec![0.0, 0.0],
        hi: vec![1.0, 1.0],
        points_per_axis: 6,
    };
    let cube = Polynomial::monomial(vec![3, 0]);
    let rep = two_basis_difference_check(&b1, &b2, &cube, &window).unwrap();
    assert!(rep.residual <= 1e-6, "{rep:?}");
    // Affine data: the difference itself vanishes.
    let aff = Polynomial::affine(1.0, &[0.5, -2.0]);
    let rep = two_basis_difference_check(&b1, &b2, &aff, &window).unwrap();
    assert!(rep.max_abs <= 1e-9, "{rep:?}");
}

#[test]
fn crisscross_preimage_reproduces_cubic() {
    let sb = SmoothedBasis::<f64>::new(NodalBasis::p1_standard(2).unwrap());
    let p = Polynomial::<f64>::monomial(vec![3, 0]);
    let dom = LatticeDomain::new(vec![10, 10]).unwrap();
    let w = cubic_preimage(&p, &sb, &dom).unwrap();
    let f = InterpolantField::tilde(w, sb).unwrap();
    for x in [[4.3, 5.1], [5.0, 4.5]] {
        assert!((f.evaluate(&x, 0).unwrap()[0] - p.value(&x).unwrap()[0]).abs() < 1e-8);
    }
}
