//! Empirical constants for the bilinear bounds
//! `||phi(D)(uv)||_{H^s} <= C ||u||_{H^r} ||v||_{H^r'}` (product form) and
//! `||phi(D)(uv)||_{H^{s+1}} <= C ||u||_{H^r} ||v||_{H^s}` (multiplier form).

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampler::{adversarial_pairs, sample_state, SamplerKind, SamplerSpec};
use crate::error::{LabError, Result};
use crate::rng::stream_rng;
use crate::spectral::{dealiased_product, fmt_f64, phi_multiplier, sobolev_norm, TrigState};

/// Which bilinear bound a ratio is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BilinearForm {
    /// Target `H^s`, factors in `H^r` and `H^r'`; needs `0 <= r, r' <= s`, `0 <= 2s - r - r' < 1/4`.
    Product,
    /// Target `H^{s+1}`, factors in `H^r` and `H^s`; needs `0 <= s <= r`, `r > 1/2`.
    Multiplier,
}

/// Exponent triple `(s, r, r')`. For [`BilinearForm::Multiplier`] `r'` is `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub s: f64,
    pub r: f64,
    pub rprime: f64,
}

impl Exponents {
    pub fn new(s: f64, r: f64, rprime: f64) -> Self {
        Self { s, r, rprime }
    }

    /// Triple for the multiplier bound: `u in H^r`, `v in H^s`.
    pub fn multiplier(s: f64, r: f64) -> Self {
        Self { s, r, rprime: s }
    }

    /// Sobolev index of the numerator norm.
    pub fn target(&self, form: BilinearForm) -> f64 {
        match form {
            BilinearForm::Product => self.s,
            BilinearForm::Multiplier => self.s + 1.0,
        }
    }

    pub fn check(&self, form: BilinearForm) -> Result<()> {
        let Exponents { s, r, rprime } = *self;
        let fail = |what: &str| Err(LabError::Inadmissible(what.to_string()));
        if ![s, r, rprime].iter().all(|x| x.is_finite()) {
            return fail("finite exponents");
        }
        match form {
            BilinearForm::Product => {
                if !(0.0 <= r && r <= s) {
                    return fail("0 ≤ r ≤ s");
                }
                if !(0.0 <= rprime && rprime <= s) {
                    return fail("0 ≤ r' ≤ s");
                }
                let gap = 2.0 * s - r - rprime;
                if gap < 0.0 {
                    return fail("0 ≤ 2s−r−r'");
                }
                if gap >= 0.25 {
                    return fail("2s−r−r' < 1/4");
                }
            }
            BilinearForm::Multiplier => {
                if !(0.0 <= s && s <= r) {
                    return fail("0 ≤ s ≤ r");
                }
                if r <= 0.5 {
                    return fail("r > 1/2");
                }
                if rprime != s {
                    return fail("r' = s");
                }
            }
        }
        Ok(())
    }
}

/// `||phi(D)(uv)||_{H^target} / (||u||_{H^r} ||v||_{H^r'})`, with the product
/// resolved on all of its `N_u + N_v` modes.
pub fn bilinear_ratio_target(
    u: &TrigState,
    v: &TrigState,
    target: f64,
    r: f64,
    rprime: f64,
) -> Result<f64> {
    u.require_mean_zero()?;
    v.require_mean_zero()?;
    let nu = sobolev_norm(u, r);
    let nv = sobolev_norm(v, rprime);
    if nu == 0.0 || nv == 0.0 {
        return Err(LabError::ZeroInput("bilinear ratio needs nonzero factors"));
    }
    let full = u.n() + v.n();
    let prod = dealiased_product(&u.resized(full), &v.resized(full), 1.5);
    Ok(sobolev_norm(&phi_multiplier(&prod), target) / (nu * nv))
}

/// Ratio for the product bound, numerator in `H^s`.
pub fn bilinear_ratio(u: &TrigState, v: &TrigState, s: f64, r: f64, rprime: f64) -> Result<f64> {
    bilinear_ratio_target(u, v, s, r, rprime)
}

/// One evaluated draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateSample {
    /// Stream index of the draw. Adversarial pairs are numbered after the random ones.
    pub seed: u64,
    pub exponents: Exponents,
    pub ratio: f64,
    pub norm_u: f64,
    pub norm_v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub n_samples: usize,
    pub max_ratio: f64,
    pub argmax_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub exponents: Exponents,
    pub form: BilinearForm,
    pub n_samples: usize,
    pub sweep: Vec<SweepRow>,
    /// Relative growth of the max ratio between the last two truncations.
    pub growth: f64,
    /// `growth < 0.10`.
    pub bounded: bool,
}

impl EstimateReport {
    /// Largest ratio over the whole sweep.
    pub fn max_ratio(&self) -> f64 {
        self.sweep.iter().map(|r| r.max_ratio).fold(0.0, f64::max)
    }
}

/// Evaluate all draws at truncation `n`. Draw `i` takes `u` from stream `2i`
/// and `v` from stream `2i + 1` of `seed`.
pub fn draw_samples(
    exps: Exponents,
    form: BilinearForm,
    n: usize,
    n_samples: usize,
    sampler: SamplerSpec,
    seed: u64,
) -> Result<Vec<EstimateSample>> {
    exps.check(form)?;
    let target = exps.target(form);
    let mut samples: Vec<EstimateSample> = Vec::new();
    if matches!(sampler.kind, SamplerKind::Random | SamplerKind::Mixed) {
        samples = (0..n_samples as u64)
            .into_par_iter()
            .map(|i| {
                let u = sample_state(&mut stream_rng(seed, 2 * i), n, exps.r, sampler.delta);
                let v = sample_state(&mut stream_rng(seed, 2 * i + 1), n, exps.rprime, sampler.delta);
                let ratio = bilinear_ratio_target(&u, &v, target, exps.r, exps.rprime)?;
                Ok(EstimateSample {
                    seed: i,
                    exponents: exps,
                    ratio,
                    norm_u: sobolev_norm(&u, exps.r),
                    norm_v: sobolev_norm(&v, exps.rprime),
                })
            })
            .collect::<Result<Vec<_>>>()?;
    }
    if matches!(sampler.kind, SamplerKind::Adversarial | SamplerKind::Mixed) {
        let offset = n_samples as u64;
        for (id, u, v) in adversarial_pairs(n) {
            let ratio = bilinear_ratio_target(&u, &v, target, exps.r, exps.rprime)?;
            samples.push(EstimateSample {
                seed: offset + id as u64,
                exponents: exps,
                ratio,
                norm_u: sobolev_norm(&u, exps.r),
                norm_v: sobolev_norm(&v, exps.rprime),
            });
        }
    }
    Ok(samples)
}

/// Running maximum of the ratios in sample order.
pub fn running_max(samples: &[EstimateSample]) -> Vec<f64> {
    samples
        .iter()
        .scan(0.0f64, |m, s| {
            *m = m.max(s.ratio);
            Some(*m)
        })
        .collect()
}

fn max_of(samples: &[EstimateSample]) -> (f64, u64) {
    // first occurrence wins, so the result does not depend on evaluation order
    samples.iter().fold((0.0, 0), |(best, id), s| {
        if s.ratio > best {
            (s.ratio, s.seed)
        } else {
            (best, id)
        }
    })
}

/// Supremum of the bilinear ratio over `n_samples` draws at each truncation in `n_list`.
pub fn estimate_constant(
    exps: Exponents,
    form: BilinearForm,
    n_samples: usize,
    n_list: &[usize],
    sampler: SamplerSpec,
    seed: u64,
) -> Result<EstimateReport> {
    exps.check(form)?;
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(LabError::InvalidConfig("N list must be non-empty and positive".into()));
    }
    let mut sweep = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let samples = draw_samples(exps, form, n, n_samples, sampler, seed)?;
        let (max_ratio, argmax_seed) = max_of(&samples);
        sweep.push(SweepRow {
            n,
            n_samples: samples.len(),
            max_ratio,
            argmax_seed,
        });
    }
    let growth = match sweep.as_slice() {
        [.., a, b] if a.max_ratio > 0.0 => (b.max_ratio - a.max_ratio) / a.max_ratio,
        _ => 0.0,
    };
    Ok(EstimateReport {
        exponents: exps,
        form,
        n_samples,
        sweep,
        growth,
        bounded: growth < 0.10,
    })
}

/// Report rows as CSV `s,r,rprime,N,n_samples,max_ratio,argmax_seed`.
pub fn write_report_csv<W: Write>(reports: &[EstimateReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["s", "r", "rprime", "N", "n_samples", "max_ratio", "argmax_seed"])?;
    for rep in reports {
        for row in &rep.sweep {
            w.write_record([
                fmt_f64(rep.exponents.s),
                fmt_f64(rep.exponents.r),
                fmt_f64(rep.exponents.rprime),
                row.n.to_string(),
                row.n_samples.to_string(),
                fmt_f64(row.max_ratio),
                row.argmax_seed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
