use std::f64::consts::PI;

use proptest::prelude::*;
use weylhyp::acceptance::{gamma_residuals, l_cross_check, stirling_oracle};
use weylhyp::coxeter::NamedGroup;
use weylhyp::hypnum::*;
use weylhyp::Error;

fn c(re: f64, im: f64) -> CNum {
    CNum::new(re, im)
}

fn rel(a: CNum, b: CNum) -> f64 {
    (a - b).norm() / b.norm()
}

// Reference values below were computed with mpmath at 30 digits.

#[test]
fn gamma_reference_values() {
    let cases = [
        (c(1.0, 2.0), c(0.1519040026700361374482, 0.01980488016185498197191)),
        (c(-3.7, 0.2), c(0.1937597216115616781984, -0.01883666273346815957315)),
        (c(20.0, -15.0), c(-165203361969923.6373155, -582584951248381.5722165)),
        (c(0.1, -7.0), c(0.00001847258471388663252452, 0.000005625609535565904519573)),
    ];
    for (z, want) in cases {
        let got = lgamma(z).unwrap().exp();
        assert!(rel(got, want) < 1e-13, "Gamma({z}) = {got}, want {want}");
    }
    assert!((lgamma(c(1.0, 2.0)).unwrap().log_mag + 1.87607878643092934123).abs() < 1e-14);
    assert!((lgamma(c(20.0, -15.0)).unwrap().log_mag - 34.03716721539875053111).abs() < 1e-12);
}

#[test]
fn log_sin_far_from_axis() {
    let s = log_sin_pi(c(0.3, 40.0)).unwrap();
    assert!((s.log_mag - 124.9705589630317842291).abs() < 1e-12);
    let phase = (s.phase - 0.6283185307179586825712).rem_euclid(2.0 * PI);
    assert!(phase.min(2.0 * PI - phase) < 1e-12);
    assert!(matches!(log_sin_pi(c(3.02, 0.0)), Err(Error::NearInteger(_))));
    assert!(log_sin_pi_unchecked(c(3.02, 0.0)).is_ok());
}

#[test]
fn complex_pochhammer_reference() {
    let p = pochhammer_c(c(0.4, 0.3), c(2.5, -1.2)).unwrap();
    assert!(rel(p, c(0.9045377913340544969164, -0.1424560355642025562736)) < 1e-13);
}

#[test]
fn poles_are_reported() {
    assert!(matches!(lgamma(c(-4.0, 0.0)), Err(Error::Pole(_))));
    assert!(lgamma(c(f64::NAN, 0.0)).is_err());
}

const JPT: [(f64, f64); 6] = [(0.31, 0.12), (0.47, -0.2), (0.62, 0.05), (0.28, 0.1), (0.83, -0.07), (0.55, 0.22)];

fn j_point() -> PointV {
    PointV::new(JPT.map(|(a, b)| c(a, b)))
}

fn m_point() -> PointW {
    PointW::new([c(0.21, 0.1), c(0.57, -0.13), c(0.33, 0.2), c(0.44, 0.0), c(0.71, -0.25), c(0.15, 0.05), c(0.86, 0.11)])
}

#[test]
fn j_reference_value() {
    let e = j_value(j_point().coords(), &SeriesCtrl::default()).unwrap();
    assert!(rel(e.value, c(0.0130340678943445958878, 0.0467104053989149052620)) < 1e-11);
    assert!(!e.low_precision);
}

#[test]
fn l_reference_value() {
    let e = l_value(j_point().coords(), &SeriesCtrl::default()).unwrap();
    assert!(rel(e.value, c(0.118648220520984097285, 0.107899328055967413740)) < 1e-11);
}

#[test]
fn f43_reference_value() {
    let r = f43_star(*j_point().coords(), &SeriesCtrl::default()).unwrap();
    assert!(r.converged);
    assert!(rel(r.value, c(14.4141306348231989071, -1.82665005953315101407)) < 1e-11);
}

#[test]
fn m_reference_value() {
    let e = m_value(m_point().coords(), &SeriesCtrl::default()).unwrap();
    assert!(rel(e.value, c(0.00266532795661483714792, 0.0166554317481799105702)) < 1e-11);
}

#[test]
fn off_hyperplane_is_rejected() {
    let mut x = *j_point().coords();
    x[6] += 0.01;
    assert!(matches!(j_value(&x, &SeriesCtrl::default()), Err(Error::Precondition(_))));
    let mut w = *m_point().coords();
    w[7] += 0.01;
    assert!(matches!(m_value(&w, &SeriesCtrl::default()), Err(Error::Precondition(_))));
}

#[test]
fn near_pole_is_rejected() {
    let mut free = JPT.map(|(a, b)| c(a, b));
    free[0] = c(1.0 + 1e-3, 0.0);
    assert!(j_value(PointV::new(free).coords(), &SeriesCtrl::default()).is_err());
}

#[test]
fn seven_f_six_needs_re_f_minus_d_positive() {
    let mut free = JPT.map(|(a, b)| c(a, b));
    free[5] = c(0.2, 0.0);
    let p = PointV::new(free);
    assert!(matches!(l_value_7f6(p.coords(), &SeriesCtrl::default()), Err(Error::Precondition(_))));
}

#[test]
fn gamma_layer_on_seeded_points() {
    let [refl, rec, stir] = gamma_residuals(7, 1000).unwrap();
    assert!(refl <= 1e-12, "reflection {refl:e}");
    assert!(rec <= 1e-12, "recursion {rec:e}");
    assert!(stir <= 1e-10, "Stirling {stir:e}");
}

#[test]
fn stirling_oracle_at_moderate_size() {
    // Gamma(50) = 49!
    let want: f64 = (1..50).map(|k| (k as f64).ln()).sum();
    assert!((stirling_oracle(c(50.0, 0.0)).re - want).abs() < 1e-10);
}

#[test]
fn l_matches_7f6_form() {
    assert!(l_cross_check(7, 3, &SeriesCtrl::default()).unwrap() <= 1e-7);
    assert!(l_cross_check(21, 3, &SeriesCtrl::default()).unwrap() <= 1e-7);
}

#[test]
fn lower_tolerance_uses_fewer_terms() {
    let p = m_point();
    let tight = m_value(p.coords(), &SeriesCtrl::default()).unwrap();
    let loose = m_value(p.coords(), &SeriesCtrl { rel_tol: 1e-6, ..SeriesCtrl::default() }).unwrap();
    assert!(loose.terms_used <= tight.terms_used);
    assert!(rel(loose.value, tight.value) < 1e-5);
}

fn arr7(v: Vec<CNum>) -> [CNum; 7] {
    v.try_into().unwrap()
}

fn free6() -> impl Strategy<Value = [CNum; 6]> {
    prop::array::uniform6((0.1f64..0.9, -0.3f64..0.3)).prop_map(|a| a.map(|(x, y)| c(x, y)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn reflection(re in -25.0f64..25.0, im in -25.0f64..25.0) {
        let z = c(re, im);
        prop_assume!(int_distance(z) > SIN_MARGIN);
        let d = lgamma(z).unwrap().as_log() + lgamma(1.0 - z).unwrap().as_log()
            + log_sin_pi(z).unwrap().as_log() - PI.ln();
        prop_assert!((d.exp() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn recursion(re in -25.0f64..25.0, im in -25.0f64..25.0) {
        let z = c(re, im);
        prop_assume!(pole_distance(z) > 0.05);
        let d = lgamma(z + 1.0).unwrap().as_log() - lgamma(z).unwrap().as_log() - z.ln();
        prop_assert!((d.exp() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn conjugation(re in -25.0f64..25.0, im in -25.0f64..25.0) {
        let z = c(re, im);
        prop_assume!(pole_distance(z) > 0.05);
        let a = lgamma(z).unwrap().exp();
        let b = lgamma(z.conj()).unwrap().exp();
        prop_assert!((a.conj() - b).norm() <= 1e-13 * a.norm());
    }

    #[test]
    fn stirling_agreement(theta in -2.9f64..2.9, r in 1e3f64..1e4) {
        let z = CNum::from_polar(r, theta);
        let d = lgamma(z).unwrap().as_log() - stirling_oracle(z);
        prop_assert!((d.exp() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn logc_product(a in -5.0f64..5.0, b in -5.0f64..5.0, x in -5.0f64..5.0, y in -5.0f64..5.0) {
        let (z, w) = (c(a, b), c(x, y));
        prop_assume!(z.norm() > 1e-3 && w.norm() > 1e-3);
        let p = (LogC::of(z) * LogC::of(w)).exp();
        prop_assert!((p - z * w).norm() <= 1e-14 * (z * w).norm());
        let q = (LogC::of(z) / LogC::of(w)).exp();
        prop_assert!((q - z / w).norm() <= 1e-14 * (z / w).norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn j_real_symmetry(free in free6()) {
        let p = PointV::new(free);
        prop_assume!(j_margins(p.coords()).ok());
        let q = PointV::new(free.map(|z| z.conj()));
        let ctrl = SeriesCtrl::default();
        let a = j_value(p.coords(), &ctrl).unwrap().value;
        let b = j_value(q.coords(), &ctrl).unwrap().value;
        prop_assert!((a.conj() - b).norm() <= 1e-9 * a.norm());
    }

    #[test]
    fn j_invariance(free in free6(), k in 0usize..5) {
        let g = &NamedGroup::GJ.generators()[k];
        let p = PointV::new(free);
        let gp = arr7(g.apply_numeric(p.coords()));
        prop_assume!(j_margins(p.coords()).ok() && j_margins(&gp).ok());
        let ctrl = SeriesCtrl::default();
        let a = j_value(p.coords(), &ctrl).unwrap().value;
        let b = j_value(&gp, &ctrl).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-7 * a.norm());
    }

    #[test]
    fn l_invariance(free in free6(), k in 0usize..5) {
        let g = &NamedGroup::GL.generators()[k];
        let p = PointV::new(free);
        let gp = arr7(g.apply_numeric(p.coords()));
        prop_assume!(l_margins(p.coords()).ok() && l_margins(&gp).ok());
        let ctrl = SeriesCtrl::default();
        let a = l_value(p.coords(), &ctrl).unwrap().value;
        let b = l_value(&gp, &ctrl).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-7 * a.norm());
    }

    #[test]
    fn twiddle_points_satisfy_the_hyperplane(x in prop::array::uniform6((-0.4f64..0.4, -0.3f64..0.3))) {
        let y = twiddle_params(x.map(|(a, b)| c(a, b)));
        let r = y[4] + y[5] + y[6] - y[0] - y[1] - y[2] - y[3] - 1.0;
        prop_assert!(r.norm() < 1e-14);
    }
}
