use latinterp::basis::{support_set, verify_assumptions, Backend, NodalBasis, SmoothedBasis};
use proptest::prelude::*;

fn lattice_sum(b: &NodalBasis<f64>, x: &[f64], weight: impl Fn(&[i64]) -> f64) -> f64 {
    let d = x.len();
    let r = b.support_cells();
    let side = (2 * r + 2) as usize;
    let mut acc = 0.0;
    for mut flat in 0..side.pow(d as u32) {
        let mut xi = vec![0i64; d];
        for i in (0..d).rev() {
            xi[i] = x[i].floor() as i64 - r + (flat % side) as i64;
            flat /= side;
        }
        let y: Vec<f64> = x.iter().zip(&xi).map(|(a, &b)| a - b as f64).collect();
        acc += weight(&xi) * b.value(&y);
    }
    acc
}

fn smoothed_sum(b: &SmoothedBasis<f64>, x: &[f64]) -> f64 {
    let d = x.len();
    let r = b.support_cells();
    let side = (2 * r + 2) as usize;
    (0..side.pow(d as u32))
        .map(|mut flat| {
            let mut y = vec![0.0; d];
            for i in (0..d).rev() {
                let xi = x[i].floor() as i64 - r + (flat % side) as i64;
                flat /= side;
                y[i] = x[i] - xi as f64;
            }
            b.value(&y)
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q1_and_p1_partition_of_unity(x in prop::collection::vec(-5.0f64..5.0, 3)) {
        for d in 1..=3 {
            for b in [NodalBasis::q1(d).unwrap(), NodalBasis::p1_standard(d).unwrap()] {
                let s = lattice_sum(&b, &x[..d], |_| 1.0);
                prop_assert!((s - 1.0).abs() <= 1e-12, "{} d={d}: {s}", b.label());
            }
        }
    }

    #[test]
    fn p1_3d_reproduces_affine_data(
        x in prop::collection::vec(-4.0f64..4.0, 3),
        a in -2.0f64..2.0,
        g in prop::collection::vec(-2.0f64..2.0, 3),
    ) {
        let b = NodalBasis::p1_standard(3).unwrap();
        let s = lattice_sum(&b, &x, |xi| a + (0..3).map(|i| g[i] * xi[i] as f64).sum::<f64>());
        let exact = a + (0..3).map(|i| g[i] * x[i]).sum::<f64>();
        prop_assert!((s - exact).abs() <= 1e-12);
    }

    #[test]
    fn p1_is_even(x in prop::collection::vec(-1.5f64..1.5, 3)) {
        for d in 1..=3 {
            let b = NodalBasis::p1_standard(d).unwrap();
            let neg: Vec<f64> = x[..d].iter().map(|v| -v).collect();
            prop_assert!((b.value(&x[..d]) - b.value(&neg)).abs() <= 1e-14);
        }
    }

    #[test]
    fn p1_in_one_dimension_is_the_hat(x in -2.0f64..2.0) {
        let p = NodalBasis::p1_standard(1).unwrap();
        let q = NodalBasis::q1(1).unwrap();
        prop_assert!((p.value(&[x]) - q.value(&[x])).abs() <= 1e-14);
    }

    #[test]
    fn smoothed_partition_of_unity_and_evenness(x in prop::collection::vec(-3.0f64..3.0, 2)) {
        let s1 = SmoothedBasis::new(NodalBasis::q1(1).unwrap());
        prop_assert!((smoothed_sum(&s1, &x[..1]) - 1.0).abs() <= 1e-12);
        let s2 = SmoothedBasis::new(NodalBasis::p1_standard(2).unwrap());
        prop_assert!((smoothed_sum(&s2, &x) - 1.0).abs() <= s2.tolerance());
        let neg = [-x[0], -x[1]];
        prop_assert!((s2.value(&x) - s2.value(&neg)).abs() <= s2.tolerance());
    }

    #[test]
    fn backends_agree_for_q1(x in prop::collection::vec(-2.2f64..2.2, 2)) {
        for d in 1..=2 {
            let a = SmoothedBasis::new(NodalBasis::q1(d).unwrap());
            let q = SmoothedBasis::with_backend(NodalBasis::q1(d).unwrap(), Backend::ConvolutionQuadrature).unwrap();
            let y = &x[..d];
            prop_assert!((a.value(y) - q.value(y)).abs() <= q.tolerance());
            let (mut ga, mut gq) = (vec![0.0; d], vec![0.0; d]);
            a.derivative(y, 1, &mut ga).unwrap();
            q.derivative(y, 1, &mut gq).unwrap();
            for i in 0..d {
                prop_assert!((ga[i] - gq[i]).abs() <= q.tolerance());
            }
        }
    }
}

#[test]
fn backends_agree_at_200_points_in_3d() {
    let a = SmoothedBasis::new(NodalBasis::q1(3).unwrap());
    let q = SmoothedBasis::with_backend(NodalBasis::q1(3).unwrap(), Backend::ConvolutionQuadrature)
        .unwrap();
    let pts = latinterp_test_points(200, 3);
    for x in pts {
        assert!((a.value(&x) - q.value(&x)).abs() <= q.tolerance(), "{x:?}");
    }
}

/// Deterministic quasi-random points in [−2.2, 2.2]^d (golden-ratio lattice).
fn latinterp_test_points(n: usize, d: usize) -> Vec<Vec<f64>> {
    let alphas = [
        0.754_877_666_246_692_8,
        0.569_840_290_998_053_3,
        0.412_199_803_444_301_4,
    ];
    (0..n)
        .map(|k| {
            (0..d)
                .map(|i| ((0.5 + k as f64 * alphas[i]).fract() - 0.5) * 4.4)
                .collect()
        })
        .collect()
}

#[test]
fn audits_match_the_expected_verdicts() {
    for d in 1..=3 {
        let q = verify_assumptions(&NodalBasis::<f64>::q1(d).unwrap(), 200, 1e-12, 3).unwrap();
        assert!(q.all_passed(), "{q:?}");
        let p =
            verify_assumptions(&NodalBasis::<f64>::p1_standard(d).unwrap(), 200, 1e-12, 3).unwrap();
        assert!(p.all_passed(), "{p:?}");
    }
    let e = verify_assumptions(&NodalBasis::<f64>::extended_hat(), 200, 1e-12, 3).unwrap();
    assert!(e.z1_lipschitz.passed && e.z2_locality.passed && e.z3_affine.passed);
    assert!(!e.z4_nodal.passed);
}

#[test]
fn support_boxes() {
    let q = NodalBasis::<f64>::q1(2).unwrap();
    let b = support_set(&q, &[0, 0]);
    assert_eq!(
        (b.lo.clone(), b.hi.clone()),
        (vec![-1.0, -1.0], vec![1.0, 1.0])
    );
    let s = SmoothedBasis::new(q.clone());
    let b = support_set(&s, &[5, 0]);
    assert_eq!((b.lo, b.hi), (vec![3.0, -2.0], vec![7.0, 2.0]));
}

#[test]
fn smoothed_values_and_third_derivative_jumps() {
    let s = SmoothedBasis::new(NodalBasis::<f64>::q1(1).unwrap());
    assert!((s.value(&[0.0]) - 2.0 / 3.0).abs() < 1e-15);
    assert!((s.value(&[1.0]) - 1.0 / 6.0).abs() < 1e-15);
    assert_eq!(s.value(&[2.0]), 0.0);
    assert_eq!(s.value(&[-2.5]), 0.0);
    // Hessian against centered differences of the gradient.
    let step = 1e-5;
    for x in [-1.7, -1.2, -0.6, -0.3, 0.25, 0.55, 1.4, 1.85] {
        let (mut gp, mut gm, mut hess) = ([0.0], [0.0], [0.0]);
        s.derivative(&[x + step], 1, &mut gp).unwrap();
        s.derivative(&[x - step], 1, &mut gm).unwrap();
        s.derivative(&[x], 2, &mut hess).unwrap();
        assert!((hess[0] - (gp[0] - gm[0]) / (2.0 * step)).abs() <= 1e-6);
    }
    // Third derivative: piecewise constant, bounded, jumps only at integers.
    let mut third = [0.0];
    let expected = [(-1.5, 1.0), (-0.5, -3.0), (0.5, 3.0), (1.5, -1.0)];
    for (x, v) in expected {
        s.derivative(&[x], 3, &mut third).unwrap();
        assert!((third[0] - v).abs() < 1e-12);
    }
}
