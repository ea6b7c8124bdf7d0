//! Acceptance suite: ten criteria, one PASS/FAIL line each.
//!
//! Every tolerance is pinned here. Run with
//! `cargo test -p latinterp-studies --test acceptance -- --nocapture`
//! to see the verdict lines.

use latinterp::basis::{verify_assumptions, NodalBasis, SmoothedBasis};
use latinterp::convop::{smooth_nodal_interpolant, ConvolutionOperator};
use latinterp::interp::{FnFunction, InterpolantField};
use latinterp::lattice::{LatticeDomain, LatticeFunction};
use latinterp::quasi::{
    apply_quasi, build_dual, two_basis_difference_check, DegreeKind, Polynomial, QuasiInterpolant,
    SampleWindow,
};
use latinterp_studies::{
    run_convergence, run_counterexample, run_equivalence, run_reproduction, BasisChoice,
    CatalogName, ConvergenceStudy, EquivalenceReport, EquivalenceStudy, InterpolantKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const AUDIT_TOL: f64 = 1e-12;
const AUDIT_SAMPLES: usize = 200;
const ANNIHILATION_TOL: f64 = 1e-12;
const STENCIL_TOL: f64 = 1e-12;
const MIN_MULTIPLIER_TOL: f64 = 1e-12;
const ROUND_TRIP_TOL: f64 = 1e-10;
const ROUND_TRIP_EXTENTS: [usize; 3] = [16, 64, 256];
const MIN_FIELDS: usize = 300;
const C0_TARGET: f64 = 1.0 / 3.0;
const C0_TOL: f64 = 1e-6;
const DOUBLING_TOL: f64 = 0.10;
const NODAL_TOL: f64 = 1e-10;
const NODAL_DRAWS: usize = 100;
const BIORTH_TOL: f64 = 1e-9;
const PROJECTOR_TOL: f64 = 1e-9;
const CUBIC_TOL: f64 = 1e-9;
const QUARTIC_MIN: f64 = 1e-3;
const DIFFERENCE_TOL: f64 = 1e-6;
const HESSIAN_FD_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-5;
const THIRD_DERIVATIVE_TOL: f64 = 1e-12;

/// `(interpolant, j, expected slope, tolerance)`, error in `L²`.
const SLOPES: [(InterpolantKind, usize, f64, f64); 8] = [
    (InterpolantKind::BarNodal, 0, 2.0, 0.1),
    (InterpolantKind::BarNodal, 1, 1.0, 0.1),
    (InterpolantKind::SmoothNodal, 0, 4.0, 0.3),
    (InterpolantKind::SmoothNodal, 1, 3.0, 0.3),
    (InterpolantKind::SmoothNodal, 2, 2.0, 0.2),
    (InterpolantKind::Quasi, 0, 4.0, 0.3),
    (InterpolantKind::Quasi, 1, 3.0, 0.3),
    (InterpolantKind::Quasi, 2, 2.0, 0.2),
];

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn q1(d: usize) -> NodalBasis<f64> {
    NodalBasis::q1(d).unwrap()
}

fn c1_audits() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for d in 1..=3 {
        for (name, b) in [("q1", q1(d)), ("p1", NodalBasis::p1_standard(d).unwrap())] {
            let r = verify_assumptions(&b, AUDIT_SAMPLES, AUDIT_TOL, 7).unwrap();
            if !r.all_passed() {
                ok = false;
                notes.push(format!("{name} d={d} failed"));
            }
        }
    }
    let e = verify_assumptions(
        &NodalBasis::<f64>::extended_hat(),
        AUDIT_SAMPLES,
        AUDIT_TOL,
        7,
    )
    .unwrap();
    let only_z4 =
        e.z1_lipschitz.passed && e.z2_locality.passed && e.z3_affine.passed && !e.z4_nodal.passed;
    ok &= only_z4;
    notes.push(format!(
        "extended hat fails only the nodal property: {only_z4}"
    ));
    verdict(ok, notes.join("; "))
}

fn c2_counterexample() -> Verdict {
    let r = run_counterexample().unwrap();
    verdict(
        r.extended_hat_max <= ANNIHILATION_TOL && r.q1_max >= 0.5,
        format!(
            "max |ū| = {:.2e} (tol {ANNIHILATION_TOL:e}), Q1 control {:.3}",
            r.extended_hat_max, r.q1_max
        ),
    )
}

fn c3_operator() -> Verdict {
    let op = ConvolutionOperator::new(&q1(1), LatticeDomain::cube(1, 16).unwrap()).unwrap();
    // ζ̃ = ζ̄ ∗ ζ̄ is the cubic B-spline centred at 0: values 1/6, 2/3, 1/6.
    let stencil_err = [(-1, 1.0 / 6.0), (0, 2.0 / 3.0), (1, 1.0 / 6.0), (2, 0.0)]
        .iter()
        .map(|&(k, v)| (op.stencil_at(&[k]) - v).abs())
        .fold(0.0, f64::max);
    let min_err = (op.min_multiplier() - 1.0 / 3.0).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = 0.0f64;
    for n in ROUND_TRIP_EXTENTS {
        let c = ConvolutionOperator::new(&q1(1), LatticeDomain::cube(1, n).unwrap()).unwrap();
        let u =
            LatticeFunction::from_scalar_fn(c.domain().clone(), |_| rng.random_range(-1.0..1.0))
                .unwrap();
        let back = c.solve(&c.apply(&u).unwrap()).unwrap();
        let again = c.apply(&c.solve(&u).unwrap()).unwrap();
        worst = worst
            .max(back.max_abs_diff(&u).unwrap())
            .max(again.max_abs_diff(&u).unwrap());
    }
    verdict(
        stencil_err <= STENCIL_TOL && min_err <= MIN_MULTIPLIER_TOL && worst <= ROUND_TRIP_TOL,
        format!(
            "stencil err {stencil_err:.1e}, |min m̂ − 1/3| {min_err:.1e}, round trip {worst:.1e}"
        ),
    )
}

fn equivalence(d: usize) -> EquivalenceReport {
    run_equivalence(&EquivalenceStudy::new(BasisChoice::Q1, d)).unwrap()
}

fn c4_upper_bounds(reports: &[EquivalenceReport]) -> Verdict {
    let fields_ok = reports.iter().all(|r| r.fields >= MIN_FIELDS);
    let violations: usize = reports.iter().map(|r| r.total_violations).sum();
    let c0 = reports[0]
        .exponent(2.0)
        .unwrap()
        .ratio("c0")
        .unwrap()
        .value_2n;
    let c0_ok = (c0 - C0_TARGET).abs() <= C0_TOL;
    verdict(
        fields_ok && violations == 0 && c0_ok,
        format!(
            "{} fields per dimension, {violations} violations over p ∈ {{1,2,4,∞}}, d ∈ {{1,2}}; 1D ℓ² c₀ = {c0:.9}",
            reports[0].fields
        ),
    )
}

fn c5_gradient(reports: &[EquivalenceReport]) -> Verdict {
    let mut violations = 0;
    let mut worst_change = 0.0f64;
    for r in reports {
        for e in &r.exponents {
            violations += e.bound("grad_tilde_le_grad_bar").unwrap().violations;
            worst_change = worst_change.max(e.ratio("c1_prime").unwrap().relative_change);
        }
    }
    verdict(
        violations == 0 && worst_change <= DOUBLING_TOL,
        format!("‖∇ũ‖ ≤ ‖∇ū‖ violations {violations}; c₁′ change under doubling {worst_change:.3}"),
    )
}

fn c6_smooth_nodal(reports: &[EquivalenceReport]) -> Verdict {
    let op = ConvolutionOperator::new(&q1(1), LatticeDomain::cube(1, 24).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut worst = 0.0f64;
    for _ in 0..NODAL_DRAWS {
        let u =
            LatticeFunction::from_scalar_fn(op.domain().clone(), |_| rng.random_range(-1.0..1.0))
                .unwrap();
        let f = smooth_nodal_interpolant(&op, &u).unwrap();
        for s in op.domain().sites() {
            worst = worst.max((f.evaluate(&[s[0] as f64], 0).unwrap()[0] - u.get(&s)[0]).abs());
        }
    }
    let worst_change = reports
        .iter()
        .flat_map(|r| &r.exponents)
        .map(|e| e.ratio("c_inverse").unwrap().relative_change)
        .fold(0.0, f64::max);
    verdict(
        worst <= NODAL_TOL && worst_change <= DOUBLING_TOL,
        format!("max |Ĩu(ξ) − u(ξ)| {worst:.1e}; C change under doubling {worst_change:.3}"),
    )
}

fn c7_dual() -> Verdict {
    let sb = SmoothedBasis::new(q1(1));
    let dual = build_dual(sb.clone()).unwrap();
    let biorth = dual
        .biorthogonality_residuals(7)
        .unwrap()
        .into_iter()
        .fold(0.0, f64::max);
    let q = QuasiInterpolant::new(dual).unwrap();
    let dom = LatticeDomain::cube(1, 24).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut projector = 0.0f64;
    for _ in 0..20 {
        let w =
            LatticeFunction::from_scalar_fn(dom.clone(), |_| rng.random_range(-1.0..1.0)).unwrap();
        let field = InterpolantField::tilde(w.clone(), sb.clone()).unwrap();
        let v = FnFunction::new(1, 1, |x: &[f64], o: &mut [f64]| {
            o[0] = field.evaluate(x, 0).unwrap()[0]
        });
        let back = apply_quasi(&q, &v, &dom, 1.0).unwrap();
        projector = projector.max(back.coefficients().max_abs_diff(&w).unwrap());
    }
    let mut cubic = 0.0f64;
    let mut quartic = f64::INFINITY;
    for d in [1, 2] {
        let r = run_reproduction(d, 4, DegreeKind::PerVariable).unwrap();
        for row in &r.rows {
            if row.expected_exact {
                cubic = cubic
                    .max(row.quasi_residual)
                    .max(row.preimage_residual.unwrap_or(0.0));
            } else {
                quartic = quartic.min(row.quasi_abs_residual);
            }
        }
    }
    verdict(
        biorth <= BIORTH_TOL && projector <= PROJECTOR_TOL && cubic <= CUBIC_TOL && quartic >= QUARTIC_MIN,
        format!("biorthogonality {biorth:.1e}, projector {projector:.1e}, cubics {cubic:.1e}, quartics ≥ {quartic:.1e}"),
    )
}

fn c8_convergence() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for d in [1, 2] {
        for (kind, j, expected, tol) in SLOPES {
            let study = ConvergenceStudy::new(kind, CatalogName::Trig, d, j, 2.0);
            let r = run_convergence(&study).unwrap();
            let slope = r.slope.unwrap_or(f64::NAN);
            let good = (slope - expected).abs() <= tol;
            ok &= good;
            if !good {
                notes.push(format!(
                    "{kind:?} j={j} d={d}: slope {slope:.3} vs {expected}±{tol}"
                ));
            }
        }
    }
    if ok {
        notes.push(format!("{} ladders within tolerance", 2 * SLOPES.len()));
    }
    verdict(ok, notes.join("; "))
}

fn c9_difference() -> Verdict {
    let b1 = SmoothedBasis::new(q1(2));
    let b2 = SmoothedBasis::new(NodalBasis::p1_standard(2).unwrap());
    let window = SampleWindow {
        lo: vec![0.0, 0.0],
        hi: vec![1.0, 1.0],
        points_per_axis: 6,
    };
    let worst = [vec![3, 0], vec![0, 3], vec![2, 1], vec![1, 1]]
        .into_iter()
        .map(|e| {
            two_basis_difference_check(&b1, &b2, &Polynomial::monomial(e), &window)
                .unwrap()
                .residual
        })
        .fold(0.0, f64::max);
    verdict(
        worst <= DIFFERENCE_TOL,
        format!("affine-fit residual {worst:.1e}"),
    )
}

fn c10_derivatives() -> Verdict {
    let mut fd = 0.0f64;
    let s1 = SmoothedBasis::new(q1(1));
    for x in [-1.7, -1.2, -0.6, -0.3, 0.25, 0.55, 1.4, 1.85] {
        let (mut gp, mut gm, mut h) = ([0.0], [0.0], [0.0]);
        s1.derivative(&[x + FD_STEP], 1, &mut gp).unwrap();
        s1.derivative(&[x - FD_STEP], 1, &mut gm).unwrap();
        s1.derivative(&[x], 2, &mut h).unwrap();
        fd = fd.max((h[0] - (gp[0] - gm[0]) / (2.0 * FD_STEP)).abs());
    }
    let s2 = SmoothedBasis::new(q1(2));
    for x in [[0.3, -0.7], [-1.4, 0.45], [1.1, 1.6]] {
        let mut h = [0.0; 4];
        s2.derivative(&x, 2, &mut h).unwrap();
        for i in 0..2 {
            let (mut gp, mut gm) = ([0.0; 2], [0.0; 2]);
            let mut xp = x;
            let mut xm = x;
            xp[i] += FD_STEP;
            xm[i] -= FD_STEP;
            s2.derivative(&xp, 1, &mut gp).unwrap();
            s2.derivative(&xm, 1, &mut gm).unwrap();
            for j in 0..2 {
                fd = fd.max((h[i * 2 + j] - (gp[j] - gm[j]) / (2.0 * FD_STEP)).abs());
            }
        }
    }
    // B''' of the cubic B-spline: 1, −3, 3, −1 on the four unit pieces,
    // sampled at several points per piece.
    let mut third = 0.0f64;
    for (k, v) in [1.0, -3.0, 3.0, -1.0].into_iter().enumerate() {
        for t in [0.1, 0.5, 0.9] {
            let mut out = [0.0];
            s1.derivative(&[-2.0 + k as f64 + t], 3, &mut out).unwrap();
            third = third.max((out[0] - v).abs());
        }
    }
    verdict(
        fd <= HESSIAN_FD_TOL && third <= THIRD_DERIVATIVE_TOL,
        format!("Hessian vs differences {fd:.1e}; third derivative {third:.1e}"),
    )
}

#[test]
fn acceptance() {
    let reports = [equivalence(1), equivalence(2)];
    let results = [
        ("1 basis audits", c1_audits()),
        ("2 extended-hat counterexample", c2_counterexample()),
        ("3 convolution operator", c3_operator()),
        ("4 norm-equivalence upper bounds", c4_upper_bounds(&reports)),
        ("5 gradient stability", c5_gradient(&reports)),
        ("6 smooth nodal interpolant", c6_smooth_nodal(&reports)),
        ("7 dual basis and reproduction", c7_dual()),
        ("8 convergence rates", c8_convergence()),
        ("9 two-basis difference", c9_difference()),
        ("10 smoothed-basis derivatives", c10_derivatives()),
    ];
    for (name, v) in &results {
        println!(
            "{} criterion {name}: {}",
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    let failed: Vec<&str> = results
        .iter()
        .filter(|(_, v)| !v.passed)
        .map(|(n, _)| *n)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
