mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::trig_poly;
use dp2c::characteristics::{
    advance_bundle, conservation_residual, interpolate, jacobian, seed_bundle, InterpolationMode,
};
use dp2c::grid::spectral_derivative;
use dp2c::solver::{evolve_with, RunOptions, RunResult};
use dp2c::{make_grid, Grid, RealField, SolverConfig, State, Termination};
use proptest::prelude::*;

fn smooth_state(g: &Arc<Grid>, rho: impl Fn(f64) -> f64) -> State {
    let u = RealField::from_fn(g, |x| 0.2 * x.sin() + 0.1 * (2.0 * x).cos());
    State::new(u, RealField::from_fn(g, rho), 1.0).unwrap()
}

fn tracked_run(s0: &State, t_max: f64, cfg: &SolverConfig) -> RunResult {
    let opts = RunOptions { markers: Some(s0.grid().n()), ..RunOptions::default() };
    evolve_with(s0, t_max, cfg, &opts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn spline_agrees_with_trigonometric_interpolant(p in trig_poly(8), pts in prop::collection::vec(-PI..PI, 1..40)) {
        let g = make_grid(1024, PI).unwrap();
        let f = p.damped(2.0).field(&g);
        let spline = interpolate(&f, &pts, InterpolationMode::Spline);
        let trig = interpolate(&f, &pts, InterpolationMode::Trigonometric);
        for (a, b) in spline.iter().zip(&trig) {
            prop_assert!((a - b).abs() <= 1e-7, "{a} {b}");
        }
    }

    #[test]
    fn jacobian_is_positive_for_frozen_fields(p in trig_poly(6), dt in 0.01..0.2f64, steps in 1usize..20) {
        let g = make_grid(128, PI).unwrap();
        let u = p.field(&g);
        let ux = spectral_derivative(&u, 1);
        let mut b = seed_bundle(&g, 32, &RealField::constant(&g, 1.0)).unwrap();
        for _ in 0..steps {
            b = advance_bundle(&b, &u, &ux, dt);
        }
        prop_assert!(jacobian(&b).iter().all(|&j| j > 0.0 && j.is_finite()));
    }
}

#[test]
fn cosine_interpolation_off_grid() {
    for n in [256, 1024] {
        let g = make_grid(n, PI).unwrap();
        let f = RealField::from_fn(&g, f64::cos);
        let v = interpolate(&f, &[0.3], InterpolationMode::Spline)[0];
        assert!((v - 0.3f64.cos()).abs() < 1e-8);
        let at_nodes = interpolate(&f, g.nodes(), InterpolationMode::Trigonometric);
        assert!(at_nodes.iter().zip(f.values()).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}

#[test]
fn jacobian_examples() {
    let g = make_grid(64, 2.0).unwrap();
    let b = seed_bundle(&g, 16, &RealField::constant(&g, 1.0)).unwrap();
    assert_eq!(jacobian(&b), vec![1.0; 16]);

    let (a, dt) = (-1.3, 0.07);
    let zero = RealField::zeros(&g);
    let mut moved = b.clone();
    for _ in 0..10 {
        moved = advance_bundle(&moved, &RealField::constant(&g, a), &zero, dt);
    }
    assert_eq!(jacobian(&moved), vec![1.0; 16]);
    for (p, l) in moved.positions.iter().zip(&b.labels) {
        assert!(g.periodic_offset(*p, l + 10.0 * a * dt).abs() < 1e-12);
    }
}

#[test]
fn markers_stay_ordered_on_smooth_runs() {
    let g = make_grid(128, PI).unwrap();
    let run = tracked_run(&smooth_state(&g, |x| 0.3 + 0.2 * x.cos()), 2.0, &SolverConfig::default());
    assert_eq!(run.termination, Termination::Completed);
    let log = run.tracking.unwrap();
    assert!(log.samples.iter().all(|s| s.order_preserving));
    assert!(log.bundle.is_order_preserving());
}

#[test]
fn markers_stay_ordered_until_blowup() {
    let g = make_grid(512, PI).unwrap();
    let u = RealField::from_fn(&g, |x| -3.0 * x.sin());
    let s0 = State::new(u, RealField::from_fn(&g, |x| 0.5 * x.cos()), 1.0).unwrap();
    let cfg = SolverConfig { slope_cap: 10.0, ..SolverConfig::default() };
    let run = tracked_run(&s0, 2.0, &cfg);
    assert_eq!(run.termination, Termination::BlowupDetected);
    assert!(run.tracking.unwrap().samples.iter().all(|s| s.order_preserving));
}

#[test]
fn jacobian_matches_marker_spacing() {
    let g = make_grid(256, PI).unwrap();
    let run = tracked_run(&smooth_state(&g, |x| 0.3 + 0.2 * x.cos()), 1.5, &SolverConfig::default());
    let b = run.tracking.unwrap().bundle;
    for (j, fd) in jacobian(&b).iter().zip(b.position_slope()) {
        assert!((j - fd).abs() <= 0.05 * fd, "{j} {fd}");
    }
}

#[test]
fn density_sign_follows_markers() {
    let g = make_grid(256, PI).unwrap();
    let rho0 = |x: f64| x.cos() + 0.3 * (2.0 * x).sin();
    let s0 = smooth_state(&g, rho0);
    let scale = s0.rho.max_abs();
    for t in [0.25, 0.5, 1.0] {
        let run = tracked_run(&s0, t, &SolverConfig::default());
        let b = run.tracking.unwrap().bundle;
        let rho = interpolate(&run.final_state.rho, &b.positions, InterpolationMode::Spline);
        let mut checked = 0;
        for (r, r0) in rho.iter().zip(&b.rho0) {
            // markers on the zero set carry no sign
            if r0.abs() > 1e-3 * scale {
                assert_eq!(r.signum(), r0.signum(), "t = {t}: {r} vs {r0}");
                checked += 1;
            }
        }
        assert!(checked > 200);
    }
}

#[test]
fn zero_density_has_zero_residual() {
    let g = make_grid(128, PI).unwrap();
    let run = tracked_run(&smooth_state(&g, |_| 0.0), 1.0, &SolverConfig::default());
    let log = run.tracking.unwrap();
    assert!(log.samples.len() > 2);
    assert!(log.samples.iter().all(|s| s.conservation_residual == 0.0));
}

#[test]
fn residual_is_zero_at_start_and_needs_matching_times() {
    let g = make_grid(64, PI).unwrap();
    let s0 = smooth_state(&g, |x| 1.0 + 0.5 * x.sin());
    let b = seed_bundle(&g, 64, &s0.rho).unwrap();
    assert_eq!(conservation_residual(&s0, &b).unwrap(), 0.0);
    let later = State::at_time(0.5, s0.u.clone(), s0.rho.clone(), 1.0).unwrap();
    assert!(conservation_residual(&later, &b).is_err());
}

#[test]
fn residual_shrinks_under_refinement() {
    let residual = |n: usize, cfl: f64| {
        let g = make_grid(n, PI).unwrap();
        let cfg = SolverConfig { cfl, ..SolverConfig::default() };
        let run = tracked_run(&smooth_state(&g, |x| 0.3 + 0.2 * x.cos()), 1.0, &cfg);
        run.tracking.unwrap().samples.last().unwrap().conservation_residual
    };
    let coarse = residual(32, 0.8);
    let fine = residual(64, 0.4);
    // dt and dx both halve; fourth order gives 16
    assert!(coarse / fine >= 8.0, "{coarse} {fine}");
}
