//! Pairwise correlation sampling and the Fisher-transform goodness-of-fit
//! check of the common-correlation hypothesis.
//!
//! Under a single common `rho`, the dispersion of sampled pair correlations
//! is pure sampling noise. The scaled transform
//! `Z = sqrt(n_obs - 3) atanh(r)` is then close to Normal with unit variance,
//! which [`ks_test_normal`] checks.

use log::warn;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::panel::ReturnsPanel;
use crate::rng;

/// `|r|` is clamped to this before the transform when sampling pairs.
pub const MAX_ABS_CORRELATION: f64 = 1.0 - 1e-12;

const KS_MAX_TERMS: usize = 100;
const KS_TERM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairSample {
    pub asset_a: usize,
    pub asset_b: usize,
    pub pearson_r: f64,
    pub fisher_z: f64,
    pub n_obs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub d_statistic: f64,
    pub p_value: f64,
}

/// Product-moment correlation of two equal-length series.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientObservations {
            need: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("zero-variance input".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// `0.5 ln((1 + r) / (1 - r))`, evaluated on `|r|` so it is exactly odd.
pub fn atanh(r: f64) -> Result<f64> {
    if !(r.abs() < 1.0) {
        return Err(Error::InfiniteTransform(r));
    }
    let a = r.abs();
    Ok(r.signum() * 0.5 * ((1.0 + a) / (1.0 - a)).ln())
}

/// `sqrt(n_obs - 3) atanh(r)`.
pub fn fisher_z(r: f64, n_obs: usize) -> Result<f64> {
    if n_obs < 4 {
        return Err(Error::InsufficientObservations {
            need: 4,
            got: n_obs,
        });
    }
    Ok(((n_obs - 3) as f64).sqrt() * atanh(r)?)
}

/// Draws `trials` random pairs of distinct assets (uniform per draw, with
/// replacement across draws) and measures each pair's correlation.
///
/// Draws come from one seeded stream; correlations may be evaluated in
/// parallel but the output is ordered by draw.
pub fn sample_pairs(panel: &ReturnsPanel, trials: usize, seed: u64) -> Result<Vec<PairSample>> {
    let n = panel.n_assets();
    if n < 2 {
        return Err(Error::InvalidDimension { min: 2, got: n });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let t = panel.n_periods();
    if t < 4 {
        return Err(Error::InsufficientObservations { need: 4, got: t });
    }
    let mut rng = rng::stream(seed, 0);
    let draws: Vec<(usize, usize)> = (0..trials)
        .map(|_| {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            (a.min(b), a.max(b))
        })
        .collect();

    let eval = |&(a, b): &(usize, usize)| -> Result<PairSample> {
        let r = pearson(panel.column(a), panel.column(b)).map_err(|e| match e {
            Error::UndefinedCorrelation(_) => Error::UndefinedCorrelation(format!(
                "pair ({}, {}) has a zero-variance series",
                panel.asset_ids()[a],
                panel.asset_ids()[b]
            )),
            other => other,
        })?;
        let clamped = if r.abs() > MAX_ABS_CORRELATION {
            warn!(
                "pair ({}, {}) has |r| = {r}; clamped for the Fisher transform",
                panel.asset_ids()[a],
                panel.asset_ids()[b]
            );
            r.signum() * MAX_ABS_CORRELATION
        } else {
            r
        };
        Ok(PairSample {
            asset_a: a,
            asset_b: b,
            pearson_r: r,
            fisher_z: fisher_z(clamped, t)?,
            n_obs: t,
        })
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        draws.par_iter().map(eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        draws.iter().map(eval).collect()
    }
}

pub fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    0.5 * libm::erfc(-(x - mean) / (sd * std::f64::consts::SQRT_2))
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
///
/// Uses `2 sum (-1)^(k-1) exp(-2 k^2 lambda^2)` for `lambda >= 1` and the
/// equivalent theta-function form below, where the alternating series
/// converges too slowly.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    if lambda < 1.0 {
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for k in 1..=KS_MAX_TERMS {
            let m = (2 * k - 1) as f64;
            let term = (-m * m * c).exp();
            cdf += term;
            if term < KS_TERM_TOL {
                break;
            }
        }
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * cdf;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=KS_MAX_TERMS {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < KS_TERM_TOL {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sided one-sample KS test against `Normal(mean, sd)` with the
/// asymptotic p-value `Q(sqrt(n) D)`.
pub fn ks_test_normal(samples: &[f64], mean: f64, sd: f64) -> Result<KsResult> {
    if samples.len() < 8 {
        return Err(Error::InsufficientObservations {
            need: 8,
            got: samples.len(),
        });
    }
    if !(sd > 0.0) || !sd.is_finite() || !mean.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "reference Normal needs finite mean and positive sd, got ({mean}, {sd})"
        )));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidParameter("NaN in KS samples".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x, mean, sd);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        d_statistic: d,
        p_value: kolmogorov_survival(n.sqrt() * d),
    })
}

/// Mean of the reference Normal used for the Fisher-Z comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceMean {
    /// Sample mean of the scaled Z values.
    #[default]
    Sample,
    /// `sqrt(n_obs - 3) atanh(mean r)`.
    Scaled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSummary {
    pub n_pairs: usize,
    pub n_obs: usize,
    pub mean_r: f64,
    pub sd_r: f64,
    pub min_r: f64,
    pub max_r: f64,
    /// `atanh(mean r)`, unscaled.
    pub atanh_mean_r: f64,
    pub mean_z: f64,
    pub sd_z: f64,
    pub reference_mean_kind: ReferenceMean,
    pub reference_mean: f64,
    pub reference_sd: f64,
    /// `None` with fewer than 8 pairs.
    pub ks: Option<KsResult>,
}

/// Summary statistics and the KS test of the scaled Z values against
/// `Normal(reference_mean, 1)`.
pub fn summarize_pairs(samples: &[PairSample], reference: ReferenceMean) -> Result<PairSummary> {
    let first = samples
        .first()
        .ok_or_else(|| Error::EmptyPanel("no pair samples".into()))?;
    let n_obs = first.n_obs;
    let r: Vec<f64> = samples.iter().map(|s| s.pearson_r).collect();
    let z: Vec<f64> = samples.iter().map(|s| s.fisher_z).collect();
    let mean_r = mean(&r);
    let mean_z = mean(&z);
    let atanh_mean_r = atanh(mean_r)?;
    let reference_mean = match reference {
        ReferenceMean::Sample => mean_z,
        ReferenceMean::Scaled => ((n_obs - 3) as f64).sqrt() * atanh_mean_r,
    };
    Ok(PairSummary {
        n_pairs: samples.len(),
        n_obs,
        mean_r,
        sd_r: sample_sd(&r),
        min_r: r.iter().copied().fold(f64::INFINITY, f64::min),
        max_r: r.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        atanh_mean_r,
        mean_z,
        sd_z: sample_sd(&z),
        reference_mean_kind: reference,
        reference_mean,
        reference_sd: 1.0,
        ks: if z.len() >= 8 {
            Some(ks_test_normal(&z, reference_mean, 1.0)?)
        } else {
            warn!("only {} pairs; KS test skipped", z.len());
            None
        },
    })
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sample_sd(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return f64::NAN;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: usize,
}

/// Equal-width histogram over `[lo, hi]`; the last bin is closed on the
/// right and values outside the range are ignored.
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Vec<HistogramBin>> {
    if bins == 0 || !(hi > lo) {
        return Err(Error::InvalidParameter(format!(
            "histogram needs bins > 0 and hi > lo, got {bins} bins over [{lo}, {hi}]"
        )));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        if v < lo || v > hi || v.is_nan() {
            continue;
        }
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            bin_left: lo + i as f64 * width,
            bin_right: if i + 1 == bins {
                hi
            } else {
                lo + (i + 1) as f64 * width
            },
            count,
        })
        .collect())
}

/// [`histogram`] over the observed range of `values`.
pub fn auto_histogram(values: &[f64], bins: usize) -> Result<Vec<HistogramBin>> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::EmptyPanel("no finite values to histogram".into()));
    }
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    };
    histogram(values, bins, lo, hi)
}
