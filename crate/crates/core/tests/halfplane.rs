use std::sync::OnceLock;

use halfspace_core::bounds::check_lower_power;
use halfspace_core::halfplane::*;
use halfspace_core::ode::{solve_prescribed_slope, ShootSpec};
use halfspace_core::profiles::{eval_power, BarrierSpec};
use halfspace_core::{Error, GammaParam, Parallelism, Profile1D};

fn g2() -> GammaParam {
    GammaParam::new(2.0).unwrap()
}

fn m1() -> &'static Profile1D {
    static P: OnceLock<Profile1D> = OnceLock::new();
    P.get_or_init(|| solve_prescribed_slope(g2(), 1.0, &ShootSpec::default()).unwrap().0)
}

fn power_data(g: GammaParam, grid: &Grid2D) -> BoundaryData {
    let col: Vec<f64> = (0..=grid.nz).map(|j| eval_power(g, grid.z(j)).0).collect();
    BoundaryData::from_column(grid, &col, BoundaryMode::OnedProfile)
}

// plain five-point residual −Δ_h u − u^{−γ}, written out independently
fn five_point_residual(f: &Field2D, i: usize, j: usize) -> f64 {
    let h = f.grid().h;
    let lap = (4.0 * f.at(i, j) - f.at(i - 1, j) - f.at(i + 1, j) - f.at(i, j - 1) - f.at(i, j + 1)) / (h * h);
    lap - f.at(i, j).powf(-f.gamma().gamma())
}

#[test]
fn grid_examples() {
    let gr = build_grid(8.0, 4.0, 0.5).unwrap();
    assert_eq!((gr.nx, gr.nz), (16, 8));
    assert_eq!((gr.x(0), gr.z(0)), (-4.0, 0.0));
    assert_eq!(gr.x(16), 4.0);
    assert!(matches!(build_grid(8.0, 4.0, 0.3), Err(Error::NonCommensurate(_))));
    assert!(build_grid(8.0, 4.0, 1.0).is_err(), "fewer than 8 cells");
    assert!(build_grid(-8.0, 4.0, 0.5).is_err());
}

#[test]
fn bracket_is_ordered_and_signed() {
    let g = g2();
    let gr = build_grid(4.0, 2.0, 0.125).unwrap();
    let data = BoundaryData::from_profile(&gr, m1()).unwrap();
    let spec = SolverSpec {
        correction: Correction::Off,
        ..Default::default()
    };
    // β = 1 is too small for data above the power profile
    match initial_bracket(g, &gr, &data, BarrierSpec::default(), &spec) {
        Err(Error::BracketInverted { beta, min_beta }) => {
            assert_eq!(beta, 1.0);
            assert!(min_beta > 1.0);
            let ok = initial_bracket(g, &gr, &data, BarrierSpec::new(min_beta, 0.0).unwrap(), &spec).unwrap();
            check_bracket(&ok, &data, &gr);
            // three significant digits, rounded up
            let scaled = min_beta * 10f64.powi(2 - min_beta.log10().floor() as i32);
            assert!((scaled - scaled.round()).abs() < 1e-9);
        }
        other => panic!("expected an inverted bracket, got {other:?}"),
    }
}

fn check_bracket(b: &Bracket, data: &BoundaryData, gr: &Grid2D) {
    let g = b.sub.gamma();
    for j in 1..gr.nz {
        for i in 1..gr.nx {
            assert!(b.sup.at(i, j) - b.sub.at(i, j) > 0.0);
            assert!(b.sub.at(i, j) <= eval_power(g, gr.z(j)).0);
            assert!(five_point_residual(&b.sub, i, j) <= 0.0, "sub at ({i},{j})");
            assert!(five_point_residual(&b.sup, i, j) >= 0.0, "super at ({i},{j})");
        }
    }
    // super dominates the data row on top
    for i in 0..=gr.nx {
        assert!(b.sup.at(i, gr.nz) >= data.top[i]);
    }
    assert!(b.sub_fraction <= 0.5);
}

#[test]
fn power_data_is_reproduced_by_the_corrected_scheme() {
    // with the leading correction the sampled power solution solves the
    // discrete problem exactly
    let g = g2();
    let gr = build_grid(4.0, 2.0, 0.0625).unwrap();
    let spec = SolverSpec {
        correction: Correction::Leading,
        ..Default::default()
    };
    let (f, rep) = solve(g, &gr, &power_data(g, &gr), &spec).unwrap();
    for j in 1..gr.nz {
        let p = eval_power(g, gr.z(j)).0;
        for i in 1..gr.nx {
            assert!((f.at(i, j) / p - 1.0).abs() < 1e-10, "({i},{j})");
        }
    }
    assert!(rep.monotone && rep.ordered_between_barriers && rep.residual_monotone);
    assert_eq!(rep.projections, 0);
}

#[test]
fn uncorrected_scheme_loses_accuracy_at_the_boundary() {
    let g = g2();
    let gr = build_grid(4.0, 2.0, 0.0625).unwrap();
    let mut errs = Vec::new();
    for correction in [Correction::Off, Correction::Series] {
        let spec = SolverSpec {
            correction,
            ..Default::default()
        };
        let (f, _) = solve(g, &gr, &power_data(g, &gr), &spec).unwrap();
        let e = (1..gr.nz)
            .map(|j| (f.at(gr.nx / 2, j) / eval_power(g, gr.z(j)).0 - 1.0).abs())
            .fold(0.0, f64::max);
        errs.push(e);
    }
    assert!(errs[0] > 1e-3, "{errs:?}");
    // the series coefficient estimated from the discrete field is O(h²)
    assert!(errs[1] < 1e-4, "{errs:?}");
}

#[test]
fn consistent_data_gives_x_invariant_field() {
    let g = g2();
    let gr = build_grid(8.0, 4.0, 0.0625).unwrap();
    let spec = SolverSpec::default();
    let data = consistent_data(g, &gr, m1().eval(4.0).0, &spec).unwrap();
    let (f, rep) = solve(g, &gr, &data, &spec).unwrap();
    let sd = symmetry_deviation(&f);
    assert!(sd.max_dev <= 1e-10, "{:e}", sd.max_dev);
    assert!(sd.per_row.iter().all(|d| *d <= 1e-10));
    assert_eq!(sd.per_row[0], 0.0);
    assert!(rep.monotone && rep.residual_monotone);
}

#[test]
fn matches_one_dimensional_profile() {
    let g = g2();
    let p = m1();
    let mut errs = Vec::new();
    for h in [0.125, 0.0625] {
        let gr = build_grid(8.0, 4.0, h).unwrap();
        let data = BoundaryData::from_profile(&gr, p).unwrap();
        let (f, rep) = solve(g, &gr, &data, &SolverSpec::default()).unwrap();
        let mut e = 0.0f64;
        for j in 1..gr.nz {
            for i in 1..gr.nx {
                e = e.max((f.at(i, j) - p.eval(gr.z(j)).0).abs());
            }
        }
        // curvature scale of the profile is O(1) at height 1
        assert!(e <= 5.0 * h * h, "h={h}: {e:e}");
        assert!(rep.ordered_between_barriers && rep.monotone);
        assert!(rep.residual_history.iter().all(|r| r.is_finite()));
        errs.push(e);
    }
    let ratio = errs[0] / errs[1];
    assert!((3.0..5.0).contains(&ratio), "{ratio}");
}

#[test]
fn policies_are_bit_identical() {
    let g = g2();
    let gr = build_grid(4.0, 2.0, 0.0625).unwrap();
    let data = BoundaryData::from_profile(&gr, m1()).unwrap().perturbed(&gr, 0.2).unwrap();
    let run = |par| {
        let spec = SolverSpec {
            parallelism: par,
            ..Default::default()
        };
        solve(g, &gr, &data, &spec).unwrap()
    };
    let (a, ra) = run(Parallelism::Sequential);
    let (b, rb) = run(Parallelism::Rayon);
    assert_eq!(a.values(), b.values());
    assert_eq!(ra, rb);
}

#[test]
fn discrete_comparison() {
    let g = g2();
    let gr = build_grid(4.0, 2.0, 0.125).unwrap();
    let lo = BoundaryData::from_profile(&gr, m1()).unwrap();
    let hi = BoundaryData::custom(
        &gr,
        lo.top.iter().map(|v| 1.3 * v).collect(),
        lo.left.iter().map(|v| 1.1 * v).collect(),
        lo.right.iter().map(|v| 1.2 * v).collect(),
    )
    .unwrap();
    // a fixed source correction; the series correction depends on the data
    let spec = SolverSpec {
        correction: Correction::Leading,
        ..Default::default()
    };
    let (a, _) = solve(g, &gr, &lo, &spec).unwrap();
    let (b, _) = solve(g, &gr, &hi, &spec).unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!(x <= y);
    }
}

#[test]
fn perturbed_data_shapes() {
    let gr = build_grid(8.0, 4.0, 0.5).unwrap();
    let base = BoundaryData::from_profile(&gr, m1()).unwrap();
    let d = base.perturbed(&gr, 0.2).unwrap();
    assert_eq!(d.mode, BoundaryMode::Perturbed);
    assert!((d.left[3] / base.left[3] - 0.8).abs() < 1e-14);
    assert!((d.right[3] / base.right[3] - 1.2).abs() < 1e-14);
    assert_eq!(d.top[gr.nx / 2], base.top[gr.nx / 2]);
    assert!(base.perturbed(&gr, 1.0).is_err());
    assert!(BoundaryData::custom(&gr, vec![1.0; 3], vec![1.0; 9], vec![1.0; 9]).is_err());
}

#[test]
fn harnack_examples() {
    let g = g2();
    let gr = build_grid(8.0, 4.0, 0.0625).unwrap();
    let ones = Field2D::new(
        gr,
        (0..gr.n_nodes()).map(|k| if k < gr.row_len() { 0.0 } else { 1.0 }).collect(),
        g,
        BoundaryMode::Custom,
    )
    .unwrap();
    assert_eq!(harnack_ratio(&ones, (64, 32), 0.5).unwrap(), 1.0);

    let spec = SolverSpec {
        correction: Correction::Leading,
        ..Default::default()
    };
    let (pf, _) = solve(g, &gr, &power_data(g, &gr), &spec).unwrap();
    for jc in [16, 32, 48] {
        let z = gr.z(jc);
        let r = harnack_ratio(&pf, (64, jc), z / 4.0).unwrap();
        let expect = ((z + z / 4.0) / (z - z / 4.0)).powf(g.alpha_pow());
        assert!((r - expect).abs() < 1e-8, "z={z}: {r} vs {expect}");
    }

    let (f, _) = solve(g, &gr, &BoundaryData::from_profile(&gr, m1()).unwrap(), &SolverSpec::default()).unwrap();
    let ratios: Vec<f64> = [16, 32, 48]
        .iter()
        .map(|&jc| harnack_ratio(&f, (64, jc), gr.z(jc) / 4.0).unwrap())
        .collect();
    assert!(ratios.iter().all(|r| *r >= 1.0 && *r < 3.0), "{ratios:?}");

    assert!(harnack_ratio(&f, (64, 8), 1.0).is_err(), "reaches the bottom layer");
    assert!(harnack_ratio(&f, (2, 40), 1.0).is_err(), "leaves the side");
    assert!(harnack_ratio(&f, (64, 60), 1.0).is_err(), "leaves the top");
}

#[test]
fn field_certificates_match_profile() {
    let g = g2();
    let gr = build_grid(8.0, 4.0, 0.0625).unwrap();
    let (f, _) = solve(g, &gr, &BoundaryData::from_profile(&gr, m1()).unwrap(), &SolverSpec::default()).unwrap();
    let cf = check_lower_power(&f).unwrap();
    let p = m1();
    let grid: Vec<f64> = p.grid().iter().copied().filter(|&t| t <= 4.0).collect();
    let vals: Vec<f64> = grid.iter().map(|&t| p.eval(t).0).collect();
    let ders: Vec<f64> = grid.iter().map(|&t| p.eval(t).1).collect();
    let clipped = Profile1D::new(grid, vals, ders, g, p.kind(), p.limit_slope()).unwrap();
    let cp = check_lower_power(&clipped).unwrap();
    assert!(cf.empirical_constant > 0.0);
    assert!((cf.empirical_constant / cp.empirical_constant - 1.0).abs() <= 0.05);
}

#[test]
fn non_convergence_is_reported() {
    let g = g2();
    let gr = build_grid(4.0, 2.0, 0.125).unwrap();
    let spec = SolverSpec {
        max_newton: 1,
        correction: Correction::Off,
        ..Default::default()
    };
    let data = BoundaryData::from_profile(&gr, m1()).unwrap();
    assert!(matches!(solve(g, &gr, &data, &spec), Err(Error::NoConvergence { .. })));
    let bad = SolverSpec {
        tol: 0.0,
        ..Default::default()
    };
    assert!(solve(g, &gr, &data, &bad).is_err());
}

#[test]
fn field_and_report_serialization() {
    let g = g2();
    let gr = build_grid(4.0, 2.0, 0.25).unwrap();
    let (f, rep) = solve(g, &gr, &BoundaryData::from_profile(&gr, m1()).unwrap(), &SolverSpec::default()).unwrap();
    let mut csv = Vec::new();
    f.write_csv(&mut csv).unwrap();
    assert!(csv.starts_with(b"x,z,u\n"));
    let back = Field2D::read_csv(csv.as_slice(), g).unwrap();
    for (a, b) in back.values().iter().zip(f.values()) {
        assert!((a - b).abs() <= 1e-14 * b.abs());
    }
    let j = f.to_json();
    assert_eq!(Field2D::from_json(&j).unwrap().values(), f.values());
    let rj = serde_json::to_value(&rep).unwrap();
    for key in ["residual_history", "monotone", "ordered_between_barriers", "iterations", "final_change"] {
        assert!(rj.get(key).is_some(), "{key}");
    }
}

#[test]
fn symmetry_deviation_definition() {
    let g = g2();
    let gr = build_grid(4.0, 2.0, 0.25).unwrap();
    // u = (1 + x'/8) z on the interior: row deviation is known in closed form
    let vals: Vec<f64> = (0..=gr.nz)
        .flat_map(|j| (0..=gr.nx).map(move |i| (j, i)))
        .map(|(j, i)| (1.0 + gr.x(i) / 8.0) * gr.z(j))
        .collect();
    let f = Field2D::new(gr, vals, g, BoundaryMode::Custom).unwrap();
    let sd = symmetry_deviation(&f);
    // interior columns are symmetric about 0, so the mean is z
    let all = (gr.width / 2.0 - gr.h) / 8.0;
    let central = (gr.width / 4.0) / 8.0;
    for j in 1..=gr.nz {
        assert!((sd.per_row[j] - all).abs() < 1e-14);
    }
    assert!((sd.max_dev - central).abs() < 1e-14);
}
