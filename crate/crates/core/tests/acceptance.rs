//! Acceptance suite. Runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line each; exits nonzero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use bbm_core::cli::config::{self, GalerkinConfig, SqueezeFileConfig};
use bbm_core::estimates::*;
use bbm_core::flow::*;
use bbm_core::rng::stream_rng;
use bbm_core::spectral::{basis_vector, l2_norm, read_state_csv, sobolev_norm, Parity};
use bbm_core::squeeze::{maximize_image_radius, sample_sphere_with};
use bbm_core::{Result, TrigState};
use common::*;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

/// Random state of `H^{1/2}` norm `radius` on modes `<= 16` of a truncation-`n` state.
fn h_half_state(seed: u64, i: u64, n: usize, radius: f64) -> TrigState {
    let u = sample_sphere_with(&mut stream_rng(seed, i), 1.0, n, n.min(16)).unwrap();
    u.scaled(radius / sobolev_norm(&u, 0.5))
}

fn spectral_oracle() -> Result<Outcome> {
    let mut g = rng(101);
    let cfg = FlowConfig::rk4(32, 1e-3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u = random_state(&mut g, 32, 0.5);
        worst = worst.max(rhs(&u, &cfg)?.max_abs_diff(&rhs_oracle(&u)));
    }
    Ok(outcome(
        worst < 1e-12,
        format!("max |rhs - direct convolution| = {worst:.2e} over 100 states at N=32 (tol 1e-12)"),
    ))
}

fn worked_example() -> Result<Outcome> {
    let cos1 = TrigState::from_sparse(4, &[(1, 1.0, 0.0)])?;
    let f = rhs(&cos1, &FlowConfig::rk4(4, 1e-3))?;
    let mut expected = TrigState::zero(4);
    expected.set_mode(1, 0.0, 0.5)?;
    expected.set_mode(2, 0.0, 0.1)?;
    let err = f.max_abs_diff(&expected).max(f.mean().abs());
    Ok(outcome(
        err < 1e-14,
        format!("rhs(cos x) = {:.16} sin x + {:.16} sin 2x, max deviation {err:.1e} (tol 1e-14)", f.mode(1)[1], f.mode(2)[1]),
    ))
}

fn conservation() -> Result<Outcome> {
    let smooth = read_state_csv(std::fs::File::open(configs().join("smooth_u0.csv"))?)?.resized(64);
    let smooth = smooth.scaled(1.0 / sobolev_norm(&smooth, 1.0));
    let mut g = rng(103);
    let rough = random_state(&mut g, 64, 1.0);
    let rough = rough.scaled(0.9 / sobolev_norm(&rough, 1.0));
    let mut cfg = FlowConfig::rk4(64, 1e-3);
    cfg.trace_every = 100;
    let (mut d_i1, mut d_i2, mut d_h): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for u in [&smooth, &rough] {
        let trace = integrate(u, 10.0, &cfg)?.trace.unwrap();
        let first = trace[0].invariants;
        for p in &trace {
            d_i1 = d_i1.max((p.invariants.i1 - first.i1).abs());
            d_i2 = d_i2.max(((p.invariants.i2 - first.i2) / first.i2).abs());
            d_h = d_h.max(((p.invariants.h - first.h) / first.h).abs());
        }
    }
    Ok(outcome(
        d_i1 == 0.0 && d_i2 < 1e-8 && d_h < 1e-8,
        format!("T=10, N=64, dt=1e-3, two states with |u0|_H1 <= 1: I1 drift {d_i1:e}, I2 rel {d_i2:.2e}, H rel {d_h:.2e} (tol 1e-8)"),
    ))
}

fn symplecticity() -> Result<Outcome> {
    let cfg = FlowConfig::new(8, 1e-2, Integrator::ImplicitMidpoint);
    let u0 = sample_sphere_with(&mut stream_rng(104, 0), 1.0, 8, 8)?;
    let rep = flow_jacobian(&u0, 1.0, 8, 1e-4, &cfg)?;
    let zero = flow_jacobian(&TrigState::zero(8), 1.0, 8, 1e-4, &cfg)?;
    let (d, d0) = (symplectic_defect(&rep.matrix), symplectic_defect(&zero.matrix));
    let warn = rep.warning.as_deref().unwrap_or("no Richardson warning");
    Ok(outcome(
        d < 1e-5 && d0 < 1e-8,
        format!("8 mode pairs, T=1, h=1e-4: defect {d:.2e} (tol 1e-5), at u0=0 {d0:.2e} (tol 1e-8); {warn}"),
    ))
}

fn bilinear_constants(c_half: &mut f64) -> Result<Outcome> {
    let cases = [
        (Exponents::new(0.0, 0.0, 0.0), BilinearForm::Product),
        (Exponents::new(0.5, 0.5, 0.5), BilinearForm::Product),
        (Exponents::new(0.5, 0.5, 0.45), BilinearForm::Product),
        (Exponents::multiplier(0.0, 1.0), BilinearForm::Multiplier),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (exps, form)) in cases.into_iter().enumerate() {
        let rep = estimate_constant(exps, form, 10_000, &[16, 32, 64, 128], SamplerSpec::default(), 42)?;
        pass &= rep.growth < 0.10;
        if i == 1 {
            *c_half = rep.sweep.last().unwrap().max_ratio;
        }
        let tag = match form {
            BilinearForm::Product => format!("({},{},{})", exps.s, exps.r, exps.rprime),
            BilinearForm::Multiplier => format!("mult(s={},r={})", exps.s, exps.r),
        };
        parts.push(format!("{tag} max {:.4} growth {:+.1}%", rep.sweep.last().unwrap().max_ratio, 100.0 * rep.growth));
    }
    Ok(outcome(pass, format!("1e4 samples, N 64->128 growth < 10%: {}", parts.join("; "))))
}

fn squeeze_grid() -> Result<Outcome> {
    let file: SqueezeFileConfig = config::load(&configs().join("squeeze.toml"))?;
    let sec = &file.squeeze;
    let mut pass = true;
    let mut parts = Vec::new();
    for c in file.cells()? {
        let rep = maximize_image_radius(&c)?;
        let mut lin = c.clone();
        lin.flow = lin.flow.linear();
        let cal = maximize_image_radius(&lin)?;
        pass &= rep.achieved_radius >= 0.95 * c.r && (cal.achieved_radius - c.r).abs() <= 1e-9;
        parts.push(format!(
            "r={},n0={}: {:.6} r (linear {:+.1e})",
            c.r,
            c.n0,
            rep.ratio(),
            cal.achieved_radius - c.r
        ));
    }
    Ok(outcome(
        pass,
        format!("N={}, {} starts, >= 0.95 r and linear = r +- 1e-9: {}", file.flow.n_modes, sec.n_starts, parts.join("; ")),
    ))
}

fn galerkin() -> Result<Outcome> {
    let mut file: GalerkinConfig = config::load(&configs().join("galerkin.toml"))?;
    file.initial.anchor(&configs());
    let u0 = file.initial.load(file.flow.n_modes)?;
    let d: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| galerkin_defect(&u0, 1.0, n, &file.flow))
        .collect::<Result<_>>()?;
    Ok(outcome(
        d[0] > d[1] && d[1] > d[2] && d[2] < 0.1 * d[0],
        format!("ref N={}: defect(8) = {:.4e}, defect(16) = {:.4e}, defect(32) = {:.4e}", file.flow.n_modes, d[0], d[1], d[2]),
    ))
}

fn smoothing() -> Result<Outcome> {
    let eps = 1.0 / 24.0;
    let mut max = [0.0f64; 2];
    let mut finite = true;
    for (j, n) in [32usize, 64].into_iter().enumerate() {
        let cfg = FlowConfig::rk4(n, 1e-2);
        for i in 0..100u64 {
            let mut g = stream_rng(108, i);
            let (ru, rv): (f64, f64) = (g.random(), g.random());
            let u = h_half_state(109, 2 * i, n, ru);
            let v = h_half_state(109, 2 * i + 1, n, rv);
            let r = smoothing_ratio(&u, &v, 1.0, eps, &cfg)?;
            finite &= r.is_finite();
            max[j] = max[j].max(r);
        }
    }
    let rel = (max[0] - max[1]).abs() / max[1];
    let cfg = FlowConfig::rk4(32, 1e-2);
    let v0 = h_half_state(110, 0, 32, 0.8);
    let phi3 = basis_vector(3, Parity::Plus, 32)?;
    let a = smoothing_ratio(&v0.add_scaled(1e-6, &phi3), &v0, 1.0, eps, &cfg)?;
    let b = smoothing_ratio(&v0.add_scaled(5e-7, &phi3), &v0, 1.0, eps, &cfg)?;
    let change = (a / b).max(b / a);
    Ok(outcome(
        finite && rel < 0.10 && change < 2.0,
        format!(
            "eps=1/24, T=1, 100 pairs: max ratio {:.6} (N=32) vs {:.6} (N=64), rel diff {rel:.1e}; perturbation halving changes ratio by x{change:.4}",
            max[0], max[1]
        ),
    ))
}

fn orbits() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut min_period = f64::INFINITY;
    for fp in [0.1, 0.5, 1.0, 2.0, 3.0] {
        let rep = radial_orbit_period(fp, 2, 0.5)?;
        worst = worst.max((rep.period * fp - PI).abs());
        min_period = min_period.min(rep.period);
    }
    Ok(outcome(
        worst < 1e-5 && min_period > 1.0,
        format!("f' in {{0.1,0.5,1,2,3}}: max |period f' - pi| = {worst:.1e} (tol 1e-5), min period {min_period:.6}"),
    ))
}

fn picard(c_half: f64) -> Result<Outcome> {
    let mut worst_ratio: f64 = 0.0;
    let mut worst_dist: f64 = 0.0;
    let reference = FlowConfig::rk4(32, 1e-3);
    for i in 0..50u64 {
        let rho = 0.1 + 1.9 * i as f64 / 49.0;
        let u0 = h_half_state(111, i, 32, rho);
        let mut cfg = FlowConfig::new(32, 10.0, Integrator::Picard);
        cfg.picard_constant = c_half;
        let res = integrate(&u0, 1.0, &cfg)?;
        worst_ratio = worst_ratio.max(res.picard.unwrap().max_ratio);
        let rk = integrate(&u0, 1.0, &reference)?.final_state;
        worst_dist = worst_dist.max(l2_norm(&res.final_state.sub(&rk)));
    }
    Ok(outcome(
        worst_ratio < 1.0 && worst_dist < 1e-7,
        format!(
            "C = {c_half:.6}, 50 data with |u0|_H1/2 in [0.1, 2]: max contraction ratio {worst_ratio:.4}, max L2 distance to rk4 {worst_dist:.1e} (tol 1e-7)"
        ),
    ))
}

fn main() {
    let mut c_half = f64::NAN;
    let mut failed = 0;
    let mut run = |id: usize, name: &str, budget: Option<Duration>, f: &mut dyn FnMut() -> Result<Outcome>| {
        let clock = Instant::now();
        let result = f();
        let elapsed = clock.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_budget = budget.is_none_or(|b| elapsed < b);
        let budget_note = match budget {
            Some(b) => format!("{elapsed:.2?} of {b:?}"),
            None => format!("{elapsed:.2?}"),
        };
        let ok = pass && in_budget;
        if !ok {
            failed += 1;
        }
        println!("{} [{id:>2}] {name}: {detail} [{budget_note}]", if ok { "PASS" } else { "FAIL" });
    };
    let secs = Duration::from_secs;
    run(1, "spectral oracle", Some(secs(5)), &mut spectral_oracle);
    run(2, "worked example", None, &mut worked_example);
    run(3, "conservation", Some(secs(30)), &mut conservation);
    run(4, "symplecticity", Some(secs(60)), &mut symplecticity);
    run(5, "bilinear constants", Some(secs(300)), &mut || bilinear_constants(&mut c_half));
    run(6, "non-squeezing witness", Some(secs(900)), &mut squeeze_grid);
    run(7, "galerkin defect", None, &mut galerkin);
    run(8, "smoothing", None, &mut smoothing);
    run(9, "radial orbit periods", None, &mut orbits);
    run(10, "picard contraction", None, &mut || picard(c_half));
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
