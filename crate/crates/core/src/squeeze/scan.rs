use rayon::prelude::*;

use super::{cylinder_radius, sample_sphere_with, SqueezeConfig, SCAN_LABEL};
use crate::error::Result;
use crate::flow::integrate;
use crate::rng::{derive_seed, stream_rng};
use crate::spectral::TrigState;

/// Image radii of random points of the sphere, without optimization.
#[derive(Debug, Clone)]
pub struct ScanReport {
    /// Radii in sample order.
    pub radii: Vec<f64>,
    /// `(q, value)` for q in 0, 0.1, .., 1.
    pub quantiles: Vec<(f64, f64)>,
    /// Bin edges (`bins + 1` values) and counts.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl ScanReport {
    pub fn max(&self) -> f64 {
        self.radii.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / x.len() as f64 - j as f64 / y.len() as f64).abs());
    }
    d
}

/// Apply the flow to `n_samples` uniform points of the sphere and histogram the image radii.
/// Sample `i` always uses stream `i`, so doubling `n_samples` extends the sample set.
pub fn ball_image_scan(cfg: &SqueezeConfig, n_samples: usize, bins: usize) -> Result<ScanReport> {
    cfg.validate()?;
    let n = cfg.flow.n_modes;
    let n_active = cfg.active_modes();
    let center = cfg
        .center
        .as_ref()
        .map(|c| c.resized(n))
        .unwrap_or_else(|| TrigState::zero(n));
    let seed = derive_seed(cfg.seed, SCAN_LABEL);
    let radii: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let xi = sample_sphere_with(&mut stream_rng(seed, i), cfg.r, n, n_active)?;
            let end = integrate(&center.add(&xi), cfg.horizon, &cfg.flow)?.final_state;
            cylinder_radius(&end, cfg.n0, cfg.cyl_center)
        })
        .collect::<Result<_>>()?;

    let mut sorted = radii.clone();
    sorted.sort_by(f64::total_cmp);
    let quantiles = if sorted.is_empty() {
        vec![]
    } else {
        (0..=10)
            .map(|i| {
                let q = i as f64 / 10.0;
                (q, quantile(&sorted, q))
            })
            .collect()
    };
    let bins = bins.max(1);
    let hi = cfg.r.max(sorted.last().copied().unwrap_or(0.0));
    let edges: Vec<f64> = (0..=bins).map(|i| hi * i as f64 / bins as f64).collect();
    let mut counts = vec![0; bins];
    for &v in &radii {
        let b = ((v / hi) * bins as f64).floor() as usize;
        counts[b.min(bins - 1)] += 1;
    }
    Ok(ScanReport {
        radii,
        quantiles,
        edges,
        counts,
    })
}
