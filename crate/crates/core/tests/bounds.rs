use proptest::prelude::*;
use sepkit::bounds::*;

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn ball(n: u64, m: f64, r: f64) -> BallBoundParams {
    BallBoundParams::new(n, m, r).unwrap()
}

#[test]
fn ball_single_known_values() {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let b = ball_single(&ball(100, 1000.0, r));
    // direct evaluation: 1 - 2^-50 - 0.5 * 999 * 2^-50
    let theta = 2f64.powi(-50) * (1.0 + 0.5 * 999.0);
    assert!(rel(b.complement(), theta) < 1e-12);

    let b = ball_single(&ball(2, 2.0, 0.9));
    let direct = 1.0 - 0.81 - 0.5 * (1.0 - 0.81);
    assert!((b.raw_bound() - direct).abs() < 1e-14);
    assert!(!b.vacuous);
}

#[test]
fn cube_simplified_known_values() {
    let b = cube_single_simplified(5000, 20000.0, 1.0 / 12.0).unwrap();
    let direct = 1.0 - 60000.0 * (-0.5 * 5000.0 / 144.0f64).exp();
    assert!((b.raw_bound() - direct).abs() < 1e-14);
    assert!((b.raw_bound() - 0.99827).abs() < 1e-5);
    assert!(cube_single_simplified(5000, 0.0, 1.0 / 12.0).unwrap().probability_lower_bound == 1.0);
}

#[test]
fn r_is_not_a_monotone_parameter() {
    // the r^n and rho^n terms trade off, so the bound peaks at an interior r
    let at = |r| ball_single(&ball(50, 1000.0, r)).raw_bound();
    assert!(at(0.5) < at(0.75));
    assert!(at(0.95) < at(0.75));
}

#[test]
fn max_m_examples() {
    let m = ball_max_m_single(100, std::f64::consts::FRAC_1_SQRT_2, 0.01).unwrap();
    assert!(rel(m.value, 2.0 * (0.01 - 2f64.powi(-50)) * 2f64.powi(50)) < 1e-12);
    assert!(matches!(
        ball_max_m_single(2, 0.9, 0.1),
        Err(sepkit::Error::NoFeasibleM { .. })
    ));
    let s = cube_max_m_single(5000, 1.0 / 12.0, 0.01).unwrap();
    assert!(rel(s.value, 0.01 / 3.0 * (2500.0f64 / 144.0).exp()) < 1e-12);
    assert_eq!(cube_max_m_pairwise(2, 0.01, 0.5).unwrap().floor, 0);
}

#[test]
fn invalid_inputs() {
    assert!(BallBoundParams::new(10, 10.0, 1.0).is_err());
    assert!(BallBoundParams::new(10, 0.5, 0.5).is_err());
    assert!(BallBoundParams::new(0, 10.0, 0.5).is_err());
    assert!(CubeBoundParams::at_variance_floor(100, 10.0, 0.9, 0.05).is_err());
    assert!(cube_single_simplified(10, 1.0, 0.3).is_err());
    assert!(hoeffding(10, -0.1, false).is_err());
    assert!(ball_max_m_simple(10, 0.5, 1.5).is_err());
}

#[test]
fn extreme_arguments_stay_finite() {
    let b = ball_single(&ball(1_000_000, 1e15, 0.5));
    assert_eq!(b.probability_lower_bound, 1.0);
    let m = ball_max_m_pairwise(1_000_000, 0.5, 0.01).unwrap();
    assert!(m.ln_value.is_finite() && m.floor == u64::MAX);
    let c = cube_single_simplified(10_000_000, 1e300, 0.25).unwrap();
    assert!(c.log_complement.is_finite());
}

#[test]
fn cascade_examples() {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!(cascade_bound(100, r, 2.74e6).unwrap().complement() < 5e-14);
    assert!(cascade_bound(100, r, 7e16).unwrap().complement() < 5e-9);
    assert!(cascade_bound(100, r, 100.0).is_err());
    // at M = n + 1 the tail factor is within one part in n! of 1
    let near = cascade_bound(100, r, 101.0).unwrap();
    let direct = r.powi(100) + 99.0 * 0.5 * 2f64.powi(-50);
    assert!(rel(near.complement(), direct) < 1e-6);
}

proptest! {
    #[test]
    fn ball_bounds_decrease_in_m(n in 1u64..2000, m in 1.0f64..1e9, k in 1.0f64..1e3, r in 0.01f64..0.99) {
        let a = ball(n, m, r);
        let b = ball(n, m * (1.0 + k), r);
        prop_assert!(ball_single(&b).log_complement >= ball_single(&a).log_complement);
        prop_assert!(ball_pairwise(&b).log_complement >= ball_pairwise(&a).log_complement);
        prop_assert!(ball_angle(&b).log_complement >= ball_angle(&a).log_complement);
        prop_assert!(ball_pairwise(&a).log_complement <= ball_angle(&a).log_complement);
    }

    #[test]
    fn ball_bounds_increase_in_n(n in 1u64..2000, m in 1.0f64..1e6, r in 0.01f64..0.99) {
        let a = ball(n, m, r);
        let b = ball(n + 1, m, r);
        prop_assert!(ball_single(&b).log_complement <= ball_single(&a).log_complement);
        prop_assert!(ball_pairwise(&b).log_complement <= ball_pairwise(&a).log_complement);
    }

    #[test]
    fn cube_bounds_monotone(n in 1u64..20_000, m in 0.0f64..1e8, delta in 0.01f64..0.66, s in 0.001f64..0.25) {
        let p = CubeBoundParams::at_variance_floor(n, m, delta, s).unwrap();
        let q = CubeBoundParams::at_variance_floor(n, m * 2.0 + 1.0, delta, s).unwrap();
        let wider = CubeBoundParams::at_variance_floor(n + 1, m, delta, s).unwrap();
        prop_assert!(cube_single(&q).log_complement >= cube_single(&p).log_complement);
        prop_assert!(cube_pairwise(&q).log_complement >= cube_pairwise(&p).log_complement);
        prop_assert!(cube_single(&wider).log_complement <= cube_single(&p).log_complement + 1e-12);
        let a = cube_single_simplified(n, m, s).unwrap();
        let b = cube_single_simplified(n, m * 2.0 + 1.0, s).unwrap();
        prop_assert!(b.log_complement >= a.log_complement);
    }

    #[test]
    fn log_space_matches_direct(n in 1u64..=30, m in 1.0f64..1e6, r in 0.05f64..0.95) {
        let rn = r.powi(n as i32);
        let rho_n = (1.0 - r * r).powf(n as f64 / 2.0);
        let single = 1.0 - rn - 0.5 * (m - 1.0) * rho_n;
        let pair = 1.0 - m * rn - 0.5 * m * (m - 1.0) * rho_n;
        let angle = 1.0 - m * rn - m * (m - 1.0) * rho_n;
        let p = ball(n, m, r);
        for (got, want) in [(ball_single(&p), single), (ball_pairwise(&p), pair), (ball_angle(&p), angle)] {
            prop_assert!(rel(got.complement(), 1.0 - want) < 1e-12, "{} vs {}", got.complement(), 1.0 - want);
            prop_assert!(got.probability_lower_bound == want.max(0.0) || (got.probability_lower_bound - want.max(0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn cube_log_space_matches_direct(n in 1u64..=300, m in 0.0f64..1e6, delta in 0.05f64..0.66, s in 0.01f64..0.25) {
        let r0 = n as f64 * s;
        let layer = (-2.0 * delta * delta * r0 * r0 / n as f64).exp();
        let cap = (-2.0 * r0 * r0 * (2.0 - 3.0 * delta).powi(2) / n as f64).exp();
        let single = 2.0 * m * layer + (m - 1.0).max(0.0) * cap;
        let pair = 2.0 * m * layer + m * (m - 1.0).max(0.0) * cap;
        let p = CubeBoundParams::at_variance_floor(n, m, delta, s).unwrap();
        prop_assert!(rel(cube_single(&p).complement(), single) < 1e-12);
        prop_assert!(rel(cube_pairwise(&p).complement(), pair) < 1e-12);
    }

    #[test]
    fn max_m_is_tight(n in 20u64..400, r in 0.3f64..0.9, theta in 0.001f64..0.5) {
        // the closed forms are conservative by one point: M in place of M - 1
        let rn = r.powf(n as f64);
        let rho_n = (1.0 - r * r).powf(n as f64 / 2.0);
        if let Ok(mm) = ball_max_m_single(n, r, theta) {
            if mm.value > 1.0 && mm.value < 1e12 {
                prop_assert!(ball_single(&ball(n, mm.value, r)).complement() <= theta * (1.0 + 1e-12));
                let shifted = ball_single(&ball(n, mm.value + 1.0, r)).complement();
                prop_assert!(rel(shifted, theta) < 1e-9);
            }
        }
        let pm = ball_max_m_pairwise(n, r, theta).unwrap();
        if pm.value > 1.0 && pm.value < 1e12 {
            prop_assert!(ball_pairwise(&ball(n, pm.value, r)).complement() <= theta * (1.0 + 1e-12));
            let m = pm.value;
            prop_assert!(rel(m * rn + 0.5 * m * m * rho_n, theta) < 1e-9);
        }
        let sm = ball_max_m_simple(n, r, theta).unwrap();
        if sm.value > 1.0 {
            prop_assert!(ball_pairwise(&ball(n, sm.value, r)).complement() <= theta * (1.0 + 1e-9));
        }
    }

    #[test]
    fn cube_pairwise_simplified_formula(n in 1u64..5000, m in 0.0f64..1e6, s in 0.01f64..0.25) {
        let x = 0.5 * n as f64 * s * s;
        let want = m * (m + 1.0) * (-x).exp();
        let got = cube_pairwise_simplified(n, m, s).unwrap().complement();
        prop_assert!(rel(got, want) < 1e-12);
        let p = CubeBoundParams::at_variance_floor(n, m, 0.5, s).unwrap();
        prop_assert!(rel(cube_pairwise(&p).complement(), want) < 1e-12);
    }

    #[test]
    fn hoeffding_matches_formula(n in 1u64..10_000, t in 0.0f64..1.0) {
        let one = hoeffding(n, t, false).unwrap();
        prop_assert!(rel(one, (-2.0 * n as f64 * t * t).exp()) < 1e-14);
        prop_assert!(hoeffding(n, t, true).unwrap() == (2.0 * one).min(1.0));
    }

    #[test]
    fn halving_theta_scales_simple_max_m(n in 10u64..2000, r in 0.1f64..0.95, theta in 1e-6f64..0.9) {
        let a = ball_max_m_simple(n, r, theta).unwrap();
        let b = ball_max_m_simple(n, r, theta / 2.0).unwrap();
        prop_assert!((a.ln_value - b.ln_value - 0.5 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn cascade_matches_direct(n in 2u64..=20, r in 0.3f64..0.95, extra in 1.0f64..1e4) {
        let m = n as f64 + extra;
        let rho_n = (1.0 - r * r).powf(n as f64 / 2.0);
        let a = 0.5 * rho_n;
        let lambda = 0.5 * (m - n as f64) * rho_n / (1.0 - a);
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let direct = (1.0 - r.powf(n as f64)) * (1.0 - a).powf(m - 1.0) * (1.0 - lambda.powf(n as f64) / fact) * lambda.exp();
        let got = cascade_bound(n, r, m).unwrap();
        if direct > 1e-3 {
            prop_assert!(rel(got.raw_bound(), direct) < 1e-9, "{} vs {}", got.raw_bound(), direct);
        }
        prop_assert!((0.0..=1.0).contains(&got.probability_lower_bound));
    }
}
