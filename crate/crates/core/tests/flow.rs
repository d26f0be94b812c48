mod common;

use bbm_core::flow::*;
use bbm_core::rng::stream_rng;
use bbm_core::spectral::{l2_norm, sobolev_norm};
use bbm_core::squeeze::sample_sphere_with;
use bbm_core::TrigState;
use common::*;
use rand::Rng;

fn small_data() -> TrigState {
    TrigState::from_sparse(32, &[(1, 0.1, 0.0), (2, 0.0, 0.1)]).unwrap()
}

/// Random state of `H^{1/2}` norm below 1 supported on modes `<= 16`.
fn ball_sample(seed: u64, i: u64, n: usize) -> TrigState {
    let mut g = stream_rng(seed, i);
    let radius: f64 = g.random();
    let u = sample_sphere_with(&mut g, 1.0, n, n.min(16)).unwrap();
    u.scaled(radius / sobolev_norm(&u, 0.5))
}

#[test]
fn integrators_agree_on_small_data() {
    let u = small_data();
    let run = |integrator| {
        let cfg = FlowConfig::new(32, 1e-3, integrator);
        integrate(&u, 1.0, &cfg).unwrap().final_state
    };
    let a = run(Integrator::Rk4);
    let b = run(Integrator::ImplicitMidpoint);
    let c = run(Integrator::Picard);
    assert!(l2_norm(&a.sub(&b)) < 1e-8, "rk4/midpoint {:e}", l2_norm(&a.sub(&b)));
    assert!(l2_norm(&a.sub(&c)) < 1e-8, "rk4/picard {:e}", l2_norm(&a.sub(&c)));
    assert!(l2_norm(&b.sub(&c)) < 1e-8, "midpoint/picard {:e}", l2_norm(&b.sub(&c)));
}

#[test]
fn backward_run_recovers_data() {
    let cfg = FlowConfig::rk4(32, 1e-3);
    for i in 0..3 {
        let u = ball_sample(11, i, 32);
        let fwd = integrate(&u, 1.0, &cfg).unwrap().final_state;
        let back = integrate(&fwd, -1.0, &cfg).unwrap().final_state;
        assert!(l2_norm(&back.sub(&u)) < 1e-7, "{:e}", l2_norm(&back.sub(&u)));
    }
}

#[test]
fn semigroup_property() {
    let cfg = FlowConfig::rk4(32, 1e-2);
    let u = ball_sample(12, 0, 32).scaled(2.0);
    let whole = integrate(&u, 1.5, &cfg).unwrap().final_state;
    let half = integrate(&u, 0.5, &cfg).unwrap().final_state;
    let split = integrate(&half, 1.0, &cfg).unwrap().final_state;
    assert!(whole.max_abs_diff(&split) < 1e-8);
}

#[test]
fn linear_flow_is_free_evolution() {
    let mut g = rng(13);
    let u = random_state(&mut g, 16, 1.0);
    for integrator in [Integrator::Rk4, Integrator::ImplicitMidpoint, Integrator::Picard] {
        let cfg = FlowConfig::new(16, 1e-3, integrator).linear();
        let v = integrate(&u, 2.0, &cfg).unwrap().final_state;
        let w = free_evolution(&u, 2.0).unwrap();
        assert!(v.max_abs_diff(&w) < 1e-7, "{integrator}: {:e}", v.max_abs_diff(&w));
    }
}

#[test]
fn mean_and_invariants_along_trace() {
    let mut cfg = FlowConfig::rk4(16, 1e-2);
    cfg.trace_every = 5;
    let u = ball_sample(14, 0, 16);
    let res = integrate(&u, 2.0, &cfg).unwrap();
    let trace = res.trace.unwrap();
    assert_eq!(trace.len(), 41);
    assert!(trace.windows(2).all(|w| w[0].t < w[1].t));
    assert!(res.steps as f64 * cfg.dt >= 2.0 - 1e-12);
    let first = trace[0].invariants;
    for p in &trace {
        assert_eq!(p.invariants.i1, 0.0);
        assert!(((p.invariants.i2 - first.i2) / first.i2).abs() < 1e-8);
        assert!(((p.invariants.h - first.h) / first.h).abs() < 1e-8);
    }
}

#[test]
fn picard_contracts_with_default_constant() {
    let cfg = FlowConfig::new(24, 0.5, Integrator::Picard);
    let u = ball_sample(15, 0, 24).scaled(1.5);
    let res = integrate(&u, 2.0, &cfg).unwrap();
    let stats = res.picard.unwrap();
    assert!(stats.max_ratio < 1.0);
    assert!(stats.max_step <= 0.5 + 1e-15);
    let reference = integrate(&u, 2.0, &FlowConfig::rk4(24, 1e-3)).unwrap().final_state;
    assert!(l2_norm(&res.final_state.sub(&reference)) < 1e-8);
}

#[test]
fn nonlinear_part_converges_under_refinement() {
    for i in 0..5 {
        let u = ball_sample(16, i, 64);
        let coarse = nonlinear_part(&u.resized(32), 1.0, &FlowConfig::rk4(32, 1e-3)).unwrap();
        let fine = nonlinear_part(&u, 1.0, &FlowConfig::rk4(64, 1e-3)).unwrap();
        let (a, b) = (sobolev_norm(&coarse, 1.5), sobolev_norm(&fine, 1.5));
        assert!(a.is_finite() && b.is_finite());
        assert!((a - b).abs() / b < 1e-4, "sample {i}: {a} vs {b}");
    }
}

#[test]
fn nonlinear_part_is_quadratic_at_small_data() {
    let cfg = FlowConfig::rk4(16, 1e-2);
    let u = ball_sample(17, 0, 16);
    let a = sobolev_norm(&nonlinear_part(&u.scaled(1e-2), 1.0, &cfg).unwrap(), 0.5);
    let b = sobolev_norm(&nonlinear_part(&u.scaled(5e-3), 1.0, &cfg).unwrap(), 0.5);
    assert!((a / b - 4.0).abs() < 0.05, "ratio {}", a / b);
}

#[test]
fn galerkin_defect_small_for_low_mode_data() {
    let u = ball_sample(18, 0, 8).resized(8);
    let cfg = FlowConfig::rk4(64, 1e-2);
    let d = galerkin_defect(&u, 0.1, 8, &cfg).unwrap();
    assert!(d <= 1e-3, "{d:e}");
    assert!(galerkin_defect(&u, 0.1, 64, &cfg).unwrap() <= 1e-12);
}

#[test]
fn ball_images_stay_bounded() {
    // sup over t <= T of ||Phi_t(u0)||_{H^1/2} for u0 in B_R; the bound R' is
    // an observed quantity, recorded here rather than predicted
    let cfg = FlowConfig::rk4(32, 1e-2);
    let times: Vec<f64> = (1..=32).map(|j| j as f64 / 32.0).collect();
    for big_r in [0.5, 1.0] {
        let mut r_prime: f64 = 0.0;
        for i in 0..200 {
            let u = ball_sample(19, i, 32).scaled(big_r);
            r_prime = r_prime.max(sobolev_norm(&u, 0.5));
            for v in integrate_sampled(&u, &times, &cfg).unwrap() {
                r_prime = r_prime.max(sobolev_norm(&v, 0.5));
            }
        }
        println!("R = {big_r}, T = 1: R' = {r_prime:.6}");
        assert!(r_prime.is_finite());
        assert!(r_prime < 2.0 * big_r, "R' = {r_prime}");
    }
}

#[test]
fn nonzero_mean_rejected() {
    let u = TrigState::new(0.5, vec![[0.1, 0.0]]).unwrap();
    assert!(integrate(&u, 1.0, &FlowConfig::rk4(4, 0.1)).is_err());
}
