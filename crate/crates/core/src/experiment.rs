//! The randomized `N*(N)` experiment: random sub-portfolios of a returns
//! panel, their effective degrees of freedom, a straight-line fit over the
//! large-N region and the isotropic-vs-factor verdict.

use log::{info, warn};
use rand::Rng;
use serde::Serialize;

use crate::cross_section::{decomposition_from_parts, rho_hat_from_nstar, VarianceDecomposition};
use crate::error::{Error, Result};
use crate::iso_algebra::check_feasible;
use crate::panel::ReturnsPanel;
use crate::rng;

/// Unbiased (`n - 1` denominator) sample variance, two-pass.
pub fn sample_variance(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::InsufficientObservations {
            need: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    Ok(x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DofTrial {
    pub index: usize,
    pub n: usize,
    /// Sorted column indices of the sampled assets.
    pub members: Vec<usize>,
    pub v_i: f64,
    pub v_p: f64,
    /// NaN when `degenerate`.
    pub n_star: f64,
    pub degenerate: bool,
}

/// Runs `trials` independent draws. Each draw picks `N` uniformly in
/// `1..=N_max`, then `N` distinct assets, and measures
/// `V_I = sum(var_i) / N^2`, `V_P = var(mean return)` and `N* = N V_I / V_P`.
///
/// Trial `i` uses its own random stream, so results do not depend on
/// scheduling.
pub fn run_dof_experiment(panel: &ReturnsPanel, trials: usize, seed: u64) -> Result<Vec<DofTrial>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let t = panel.n_periods();
    if t < 2 {
        return Err(Error::InsufficientObservations { need: 2, got: t });
    }
    let asset_var = panel
        .columns()
        .map(sample_variance)
        .collect::<Result<Vec<_>>>()?;
    let n_max = panel.n_assets();

    let run = |index: usize| -> Result<DofTrial> {
        let mut rng = rng::stream(seed, index as u64);
        let n = rng.random_range(1..=n_max);
        let mut members = rand::seq::index::sample(&mut rng, n_max, n).into_vec();
        members.sort_unstable();
        measure(panel, &asset_var, index, members)
    };

    #[cfg(feature = "parallel")]
    let out: Result<Vec<DofTrial>> = {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let out: Result<Vec<DofTrial>> = (0..trials).map(run).collect();

    let out = out?;
    let degenerate = out.iter().filter(|t| t.degenerate).count();
    if degenerate > 0 {
        warn!("{degenerate} of {trials} trials had a degenerate portfolio variance");
    }
    Ok(out)
}

fn measure(
    panel: &ReturnsPanel,
    asset_var: &[f64],
    index: usize,
    members: Vec<usize>,
) -> Result<DofTrial> {
    let n = members.len();
    let n2 = (n * n) as f64;
    let v_i = members.iter().map(|&m| asset_var[m]).sum::<f64>() / n2;
    let v_p = sample_variance(&panel.equal_weight_series(&members))?;
    let (n_star, degenerate) = match decomposition_from_parts(n, v_i, v_p) {
        Ok(d) => (d.n_star, false),
        Err(Error::DegenerateVariance(_)) => (f64::NAN, true),
        Err(e) => return Err(e),
    };
    Ok(DofTrial {
        index,
        n,
        members,
        v_i,
        v_p,
        n_star,
        degenerate,
    })
}

/// Decomposition of the single equal-weight portfolio over every asset.
pub fn terminal_nstar(panel: &ReturnsPanel) -> Result<VarianceDecomposition> {
    let n = panel.n_assets();
    let v_i = panel.columns().map(sample_variance).sum::<Result<f64>>()? / (n * n) as f64;
    let all: Vec<usize> = (0..n).collect();
    let v_p = sample_variance(&panel.equal_weight_series(&all))?;
    decomposition_from_parts(n, v_i, v_p)
}

/// `[ceil(0.6 N_max), N_max]`.
pub fn default_fit_window(n_max: usize) -> (usize, usize) {
    ((n_max * 3).div_ceil(5), n_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    pub r_squared: f64,
    /// `F(1, n_points - 2)`, equal to `t_slope^2`.
    pub f_statistic: f64,
    pub t_slope: f64,
    pub t_intercept: f64,
    pub n_points: usize,
    pub fit_range: (usize, usize),
}

/// OLS of `n_star` on `n` (with intercept) over the non-degenerate trials
/// whose `n` lies in `[n_min, n_max]`.
pub fn fit_large_n(trials: &[DofTrial], n_min: usize, n_max: usize) -> Result<OlsFit> {
    if n_min > n_max {
        return Err(Error::InvalidParameter(format!(
            "fit window [{n_min}, {n_max}] is empty"
        )));
    }
    let pts: Vec<(f64, f64)> = trials
        .iter()
        .filter(|t| !t.degenerate && t.n >= n_min && t.n <= n_max)
        .map(|t| (t.n as f64, t.n_star))
        .collect();
    let (slope, intercept, stats) = ols(&pts)?;
    Ok(OlsFit {
        slope,
        intercept,
        slope_se: stats.slope_se,
        intercept_se: stats.intercept_se,
        r_squared: stats.r_squared,
        f_statistic: stats.t_slope * stats.t_slope,
        t_slope: stats.t_slope,
        t_intercept: stats.t_intercept,
        n_points: pts.len(),
        fit_range: (n_min, n_max),
    })
}

struct OlsStats {
    slope_se: f64,
    intercept_se: f64,
    r_squared: f64,
    t_slope: f64,
    t_intercept: f64,
}

fn ols(pts: &[(f64, f64)]) -> Result<(f64, f64, OlsStats)> {
    let m = pts.len();
    if m < 3 {
        return Err(Error::InsufficientObservations { need: 3, got: m });
    }
    let mf = m as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / mf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / mf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "all fit points share the same N".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let s2 = sse / (mf - 2.0);
    let slope_se = (s2 / sxx).sqrt();
    let intercept_se = (s2 * (1.0 / mf + mx * mx / sxx)).sqrt();
    let r_squared = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok((
        slope,
        intercept,
        OlsStats {
            slope_se,
            intercept_se,
            r_squared,
            t_slope: slope / slope_se,
            t_intercept: intercept / intercept_se,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelCurves {
    pub n: Vec<usize>,
    /// `N / (1 + (N-1) rho_hat)`.
    pub iso: Vec<f64>,
    /// `N / K_hat`, unclamped.
    pub factor: Vec<f64>,
}

pub fn model_curves(rho_hat: f64, k_hat: f64, n_grid: &[usize]) -> Result<ModelCurves> {
    if let Some(&max) = n_grid.iter().max() {
        check_feasible(max, rho_hat)?;
    }
    if !(k_hat >= 1.0) || !k_hat.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "factor count estimate must be finite and at least 1, got {k_hat}"
        )));
    }
    if n_grid.contains(&0) {
        return Err(Error::InvalidDimension { min: 1, got: 0 });
    }
    Ok(ModelCurves {
        n: n_grid.to_vec(),
        iso: n_grid
            .iter()
            .map(|&n| n as f64 / (1.0 + (n as f64 - 1.0) * rho_hat))
            .collect(),
        factor: n_grid.iter().map(|&n| n as f64 / k_hat).collect(),
    })
}

/// Reading of the fitted intercept.
pub const INTERCEPT_BASIS: &str =
    "intercept read as the N -> infinity limit 1/rho of the isotropic curve";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelVerdict {
    pub n_max: usize,
    pub terminal_nstar: f64,
    /// `None` when the terminal `N*` falls outside `(0, n_max]`.
    pub rho_hat_terminal: Option<f64>,
    /// `1 / intercept`; `None` when the intercept is not positive.
    pub rho_hat_intercept: Option<f64>,
    pub intercept_basis: &'static str,
    /// `n_max / terminal N*`.
    pub k_hat_asymptote: f64,
    /// `1 / slope`; may be non-finite.
    pub k_hat_slope: f64,
    /// `|t_slope| >= 2`.
    pub k_hat_slope_reliable: bool,
    /// Slope not significantly different from zero (`|t_slope| < 2`).
    pub favours_isotropic: bool,
}

/// Interprets a large-N fit against the terminal (full-universe) `N*`.
pub fn verdict(fit: &OlsFit, terminal_nstar: f64, n_max: usize) -> Result<ModelVerdict> {
    if n_max < 2 {
        return Err(Error::InvalidDimension { min: 2, got: n_max });
    }
    if !terminal_nstar.is_finite() || terminal_nstar <= 0.0 {
        return Err(Error::NStarOutOfRange {
            n: n_max,
            n_star: terminal_nstar,
        });
    }
    let rho_hat_terminal = match rho_hat_from_nstar(n_max, terminal_nstar) {
        Ok(r) => Some(r),
        Err(Error::NStarOutOfRange { .. }) => {
            warn!("terminal N* {terminal_nstar} exceeds N = {n_max}; no terminal rho estimate");
            None
        }
        Err(e) => return Err(e),
    };
    let rho_hat_intercept = if fit.intercept > 0.0 {
        Some(1.0 / fit.intercept)
    } else {
        info!("fitted intercept {} is not positive", fit.intercept);
        None
    };
    let significant = fit.t_slope.abs() >= 2.0;
    Ok(ModelVerdict {
        n_max,
        terminal_nstar,
        rho_hat_terminal,
        rho_hat_intercept,
        intercept_basis: INTERCEPT_BASIS,
        k_hat_asymptote: n_max as f64 / terminal_nstar,
        k_hat_slope: 1.0 / fit.slope,
        k_hat_slope_reliable: significant,
        favours_isotropic: !significant,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DofAnalysis {
    pub trials: Vec<DofTrial>,
    pub terminal: VarianceDecomposition,
    /// `None` when the window holds too few usable trials.
    pub fit: Option<OlsFit>,
    pub verdict: Option<ModelVerdict>,
}

/// Experiment, terminal `N*`, fit and verdict in one call. `window`
/// defaults to [`default_fit_window`].
pub fn analyze_dof(
    panel: &ReturnsPanel,
    trials: usize,
    seed: u64,
    window: Option<(usize, usize)>,
) -> Result<DofAnalysis> {
    let n_max = panel.n_assets();
    let (lo, hi) = window.unwrap_or_else(|| default_fit_window(n_max));
    let records = run_dof_experiment(panel, trials, seed)?;
    let terminal = terminal_nstar(panel)?;
    let fit = match fit_large_n(&records, lo, hi) {
        Ok(f) => Some(f),
        Err(e @ (Error::InsufficientObservations { .. } | Error::InvalidParameter(_))) => {
            warn!("large-N fit skipped: {e}");
            None
        }
        Err(e) => return Err(e),
    };
    let verdict = match &fit {
        Some(f) if n_max >= 2 => Some(verdict(f, terminal.n_star, n_max)?),
        _ => None,
    };
    Ok(DofAnalysis {
        trials: records,
        terminal,
        fit,
        verdict,
    })
}
