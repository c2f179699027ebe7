use halfspace_core::profiles::*;
use halfspace_core::{Error, GammaParam, Profile1D, ProfileKind};
use proptest::prelude::*;

const GAMMAS: [f64; 6] = [1.1, 1.5, 2.0, 3.0, 5.0, 10.0];

// independent oracle: the textbook formula, no log/Newton tricks
fn c_oracle(gamma: f64) -> f64 {
    ((gamma + 1.0).powi(2) / (2.0 * gamma - 2.0)).powf(1.0 / (gamma + 1.0))
}

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| a * (b / a).powf(k as f64 / (n - 1) as f64))
        .collect()
}

#[test]
fn c_gamma_defining_identity() {
    for gm in GAMMAS {
        let c = c_gamma(gm).unwrap();
        let lhs = c.powf(gm + 1.0) * (2.0 * gm - 2.0);
        let rhs = (gm + 1.0).powi(2);
        assert!(((lhs - rhs) / rhs).abs() < 1e-12, "gamma={gm}");
        assert!(((c - c_oracle(gm)) / c).abs() < 1e-13, "gamma={gm}");
    }
    assert!((c_gamma(3.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert!((c_gamma(2.0).unwrap() - 1.650_963_6).abs() < 1e-7);
}

#[test]
fn c_gamma_near_one() {
    let gm = 1.0 + 1e-6;
    let c = c_gamma(gm).unwrap();
    let lhs = ((gm + 1.0) * c.ln() + (2.0 * gm - 2.0).ln()).exp();
    assert!((lhs / (gm + 1.0).powi(2) - 1.0).abs() < 1e-12);
}

#[test]
fn gamma_out_of_range() {
    for bad in [1.0, 0.5, -2.0, f64::INFINITY, f64::NAN] {
        assert!(matches!(GammaParam::new(bad), Err(Error::GammaOutOfRange(_))));
    }
}

#[test]
fn power_solution_values() {
    let g = GammaParam::new(2.0).unwrap();
    let (v0, d0) = eval_power(g, 0.0);
    assert_eq!(v0, 0.0);
    assert!(d0.is_infinite() && d0 > 0.0);
    for gm in GAMMAS {
        let g = GammaParam::new(gm).unwrap();
        assert_eq!(eval_power(g, 1.0).0, g.c_gamma());
    }
    let v8 = eval_power(g, 8.0).0;
    assert!((v8 - 4.0 * 4.5f64.cbrt()).abs() < 1e-12);
    assert!((v8 - 6.603_854_5).abs() < 1e-7);
}

#[test]
fn power_solution_solves_the_ode() {
    // centered second differences against the source term
    for gm in [1.5, 2.0, 3.0] {
        let g = GammaParam::new(gm).unwrap();
        for t in log_grid(1e-2, 1e2, 40) {
            let h = 1e-3 * t;
            let p = |x: f64| eval_power(g, x).0;
            let d2 = (p(t + h) - 2.0 * p(t) + p(t - h)) / (h * h);
            let src = p(t).powf(-gm);
            assert!(((-d2 - src) / src).abs() < 1e-5, "gamma={gm} t={t}");
        }
    }
}

#[test]
fn supersolution_values_and_inequality() {
    let g = GammaParam::new(2.0).unwrap();
    assert_eq!(eval_supersolution_w(g, 0.0), 0.0);
    assert!((eval_supersolution_w(g, 1.0) - 2.0 * g.c_gamma()).abs() < 1e-15);
    for t in log_grid(1e-3, 1e3, 200) {
        let h = 1e-3 * t;
        let w = |x: f64| eval_supersolution_w(g, x);
        let d2 = (w(t + h) - 2.0 * w(t) + w(t - h)) / (h * h);
        assert!(-d2 - w(t).powf(-2.0) >= 0.0, "t={t}");
        assert!(eval_power(g, t).0 < w(t));
        let (ws, dws) = supersolution_w_state(g, t);
        assert!((ws - w(t)).abs() <= 4.0 * f64::EPSILON * ws);
        assert!(((w(t + h) - w(t - h)) / (2.0 * h) - dws).abs() < 1e-6 * dws);
    }
    // w' tends to C_γ
    let (_, d) = supersolution_w_state(g, 1e12);
    assert!((d - g.c_gamma()).abs() < 1e-3);
}

#[test]
fn barrier_family() {
    let g = GammaParam::new(2.0).unwrap();
    let id = BarrierSpec::default();
    for t in [0.0, 0.3, 1.0, 7.0] {
        assert_eq!(eval_barrier_w_beta(g, id, t), eval_power(g, t).0);
    }
    let two = BarrierSpec::new(2.0, 0.0).unwrap();
    for t in log_grid(1e-2, 1e2, 100) {
        let h = 1e-3 * t;
        let w = |x: f64| eval_barrier_w_beta(g, two, x);
        let d2 = (w(t + h) - 2.0 * w(t) + w(t - h)) / (h * h);
        assert!(-d2 - w(t).powf(-2.0) > 0.0, "t={t}");
    }
    let shifted = BarrierSpec::new(1.5, 0.5).unwrap();
    let at0 = eval_barrier_w_beta(g, shifted, 0.0);
    assert!(at0 > 0.0);
    assert_eq!(at0, 1.5 * eval_power(g, 0.5).0);
    let (v, dv) = barrier_state(g, shifted, 2.0);
    assert_eq!(v, eval_barrier_w_beta(g, shifted, 2.0));
    assert!(dv > 0.0 && dv.is_finite());
}

#[test]
fn first_integral_examples() {
    let g = GammaParam::new(2.0).unwrap();
    let c = g.c_gamma();
    assert!(first_integral(g, c, 2.0 / 3.0 * c).unwrap().abs() < 1e-12);
    assert!((first_integral(g, 10.0, 1.0).unwrap() - 0.4).abs() < 1e-15);
    assert!(first_integral(g, 0.0, 1.0).is_err());
    assert!(first_integral(g, -1.0, 1.0).is_err());
    for gm in GAMMAS {
        let g = GammaParam::new(gm).unwrap();
        for t in log_grid(1e-3, 1e3, 25) {
            let (v, dv) = eval_power(g, t);
            let e = first_integral(g, v, dv).unwrap();
            assert!(e.abs() < 1e-10 * dv * dv, "gamma={gm} t={t}");
        }
    }
}

#[test]
fn rescale_examples() {
    let g = GammaParam::new(2.0).unwrap();
    let p = Profile1D::power_uniform(g, 10.0, 101).unwrap();
    let same = rescale(&p, 1.0).unwrap();
    assert_eq!(same.grid(), p.grid());
    assert_eq!(same.values(), p.values());
    assert!(rescale(&p, 0.0).is_err());
    assert!(rescale(&p, -1.0).is_err());

    let q = rescale(&p, 3.7).unwrap();
    for (t, v) in q.grid().iter().zip(q.values()) {
        let exact = eval_power(g, *t).0;
        assert!((v - exact).abs() <= 4.0 * f64::EPSILON * exact.max(f64::MIN_POSITIVE), "t={t}");
    }

    let lin = p.clone().with_kind(ProfileKind::LinearGrowth).with_limit_slope(Some(1.0));
    let r = rescale(&lin, 8.0).unwrap();
    assert!((r.limit_slope().unwrap() - 2.0).abs() < 1e-14);
}

#[test]
fn scaling_map_for_slopes() {
    let g = GammaParam::new(2.0).unwrap();
    let m = ScalingMap::for_slopes(g, 1.0, 2.0).unwrap();
    assert!((m.lambda - 8.0).abs() < 1e-12);
    assert!((m.slope_factor() - 2.0).abs() < 1e-14);
    assert!(ScalingMap::for_slopes(g, 0.0, 1.0).is_err());
}

#[test]
fn profile_invariants_are_enforced() {
    let g = GammaParam::new(2.0).unwrap();
    let bad_order = Profile1D::new(vec![0.0, 2.0, 1.0], vec![0.0, 1.0, 1.0], vec![1.0; 3], g, ProfileKind::Raw, None);
    assert!(bad_order.is_err());
    let bad_origin = Profile1D::new(vec![0.0, 1.0], vec![0.1, 1.0], vec![1.0; 2], g, ProfileKind::Raw, None);
    assert!(bad_origin.is_err());
    let nonpositive = Profile1D::new(vec![0.5, 1.0], vec![0.0, 1.0], vec![1.0; 2], g, ProfileKind::Raw, None);
    assert!(nonpositive.is_err());
}

#[test]
fn csv_header_precision_and_roundtrip() {
    let g = GammaParam::new(3.0).unwrap();
    let p = Profile1D::power_uniform(g, 2.0, 9).unwrap();
    let s = p.to_csv_string();
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("t,v,dv"));
    assert_eq!(lines.next(), Some("0,0,inf"));
    let back = Profile1D::read_csv(s.as_bytes(), g, ProfileKind::Power).unwrap();
    for (a, b) in back.values().iter().zip(p.values()) {
        assert!((a - b).abs() <= 1e-14 * b.abs());
    }
    let err = Profile1D::read_csv("t,v,dv\n0,0,inf\n1,x,2\n".as_bytes(), g, ProfileKind::Raw).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
}

#[test]
fn json_envelope_fields() {
    let g = GammaParam::new(2.0).unwrap();
    let p = Profile1D::power_uniform(g, 4.0, 5).unwrap();
    let j = p.to_json();
    assert_eq!(j["gamma"], 2.0);
    assert_eq!(j["kind"], "power");
    assert_eq!(j["grid_meta"]["n"], p.len());
    assert!(j["dv"][0].is_null());
    let back = Profile1D::from_json(&j).unwrap();
    assert_eq!(back.grid(), p.grid());
    assert!(back.derivs()[0].is_infinite());
}

fn arb_gamma() -> impl Strategy<Value = f64> {
    1.05f64..8.0
}

proptest! {
    #[test]
    fn c_gamma_identity_holds(gm in arb_gamma()) {
        let c = c_gamma(gm).unwrap();
        let lhs = c.powf(gm + 1.0) * (2.0 * gm - 2.0);
        prop_assert!((lhs / (gm + 1.0).powi(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponents_are_ordered(gm in arb_gamma()) {
        let g = GammaParam::new(gm).unwrap();
        prop_assert!(g.alpha_pow() > 0.0 && g.alpha_pow() < 1.0);
        prop_assert!((g.grad_exp() - (g.alpha_pow() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn scaling_group_law(gm in arb_gamma(), l1 in 0.05f64..20.0, l2 in 0.05f64..20.0) {
        let g = GammaParam::new(gm).unwrap();
        let p = Profile1D::power_uniform(g, 5.0, 33)
            .unwrap()
            .with_kind(ProfileKind::LinearGrowth)
            .with_limit_slope(Some(1.3));
        let two = rescale(&rescale(&p, l1).unwrap(), l2).unwrap();
        let one = rescale(&p, l1 * l2).unwrap();
        for k in 0..p.len() {
            let (a, b) = (two.values()[k], one.values()[k]);
            prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300));
            prop_assert!((two.grid()[k] - one.grid()[k]).abs() <= 1e-12 * one.grid()[k]);
        }
        let (sa, sb) = (two.limit_slope().unwrap(), one.limit_slope().unwrap());
        prop_assert!((sa - sb).abs() <= 1e-12 * sb);
        let m = ScalingMap::new(g, l1).unwrap().then(ScalingMap::new(g, l2).unwrap());
        prop_assert_eq!(m.lambda, l1 * l2);
    }

    #[test]
    fn power_profile_is_scale_invariant(gm in arb_gamma(), lam in 0.01f64..100.0) {
        let g = GammaParam::new(gm).unwrap();
        let p = Profile1D::power_uniform(g, 3.0, 17).unwrap();
        let q = rescale(&p, lam).unwrap();
        for (t, v) in q.grid().iter().zip(q.values()).skip(1) {
            let exact = eval_power(g, *t).0;
            prop_assert!((v - exact).abs() <= 8.0 * f64::EPSILON * exact);
        }
    }

    #[test]
    fn power_below_supersolution(gm in arb_gamma(), t in 1e-6f64..1e6) {
        let g = GammaParam::new(gm).unwrap();
        let gap = eval_supersolution_w(g, t) - eval_power(g, t).0;
        prop_assert!(gap > 0.0);
        prop_assert!((gap - g.c_gamma() * t).abs() <= 1e-12 * eval_supersolution_w(g, t));
    }
}
