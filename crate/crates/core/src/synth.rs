//! Seeded synthetic Gaussian return panels.

use chrono::{Days, NaiveDate};
use rand_distr::{Distribution, StandardNormal};

use crate::cross_section::{FactorModel, IsotropicModel};
use crate::error::{Error, Result};
use crate::panel::ReturnsPanel;
use crate::rng;

/// `A000`, `A001`, ... padded to a common width.
pub fn asset_ids(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len().max(3);
    (0..n).map(|i| format!("A{i:0width$}")).collect()
}

/// Consecutive calendar days from 2000-01-03.
pub fn period_stamps(t: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    (0..t as u64)
        .map(|d| start.checked_add_days(Days::new(d)).expect("date in range"))
        .collect()
}

/// Builds a panel period by period; period `t` draws from stream `t`.
fn generate(
    n: usize,
    t: usize,
    seed: u64,
    mut period: impl FnMut(&mut rng::StreamRng, &mut [f64]),
) -> Result<ReturnsPanel> {
    if n == 0 || t == 0 {
        return Err(Error::EmptyPanel(format!("{n} assets x {t} periods")));
    }
    let mut columns = vec![vec![0.0; t]; n];
    let mut row = vec![0.0; n];
    for s in 0..t {
        let mut r = rng::stream(seed, s as u64);
        period(&mut r, &mut row);
        for (col, v) in columns.iter_mut().zip(&row) {
            col[s] = *v;
        }
    }
    ReturnsPanel::from_columns(asset_ids(n), period_stamps(t), columns)
}

/// Zero-mean Gaussian returns with covariance `S G_N S`, generated as
/// `sigma_i (sqrt(rho) f_t + sqrt(1 - rho) e_it)`. Needs `0 <= rho < 1`.
pub fn isotropic_panel(model: &IsotropicModel, t: usize, seed: u64) -> Result<ReturnsPanel> {
    let rho = model.rho();
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!(
            "synthetic isotropic panels need 0 <= rho < 1, got {rho}"
        )));
    }
    let (a, b) = (rho.sqrt(), (1.0 - rho).sqrt());
    let sigmas = model.sigmas().to_vec();
    generate(model.n(), t, seed, |r, row| {
        let f: f64 = StandardNormal.sample(r);
        for (x, s) in row.iter_mut().zip(&sigmas) {
            let e: f64 = StandardNormal.sample(r);
            *x = s * (a * f + b * e);
        }
    })
}

/// Homoskedastic convenience wrapper around [`isotropic_panel`].
pub fn homoskedastic_panel(
    n: usize,
    t: usize,
    rho: f64,
    sigma: f64,
    seed: u64,
) -> Result<ReturnsPanel> {
    isotropic_panel(&IsotropicModel::homoskedastic(n, rho, sigma)?, t, seed)
}

/// Zero-mean Gaussian returns `B f_t + s e_t` with covariance
/// `B B^T + diag(idio_var)`.
pub fn factor_panel(fm: &FactorModel, t: usize, seed: u64) -> Result<ReturnsPanel> {
    let k = fm.k();
    let idio_sd: Vec<f64> = fm.idio_var().iter().map(|v| v.sqrt()).collect();
    let mut f = vec![0.0; k];
    generate(fm.n(), t, seed, |r, row| {
        for fk in f.iter_mut() {
            *fk = StandardNormal.sample(r);
        }
        for (i, x) in row.iter_mut().enumerate() {
            let common: f64 = fm.loadings_row(i).iter().zip(&f).map(|(b, f)| b * f).sum();
            let e: f64 = StandardNormal.sample(r);
            *x = common + idio_sd[i] * e;
        }
    })
}

/// [`factor_panel`] with every loading equal to `b` and idiosyncratic
/// standard deviation `s`.
pub fn uniform_factor_panel(
    n: usize,
    k: usize,
    b: f64,
    s: f64,
    t: usize,
    seed: u64,
) -> Result<ReturnsPanel> {
    factor_panel(&FactorModel::uniform(n, k, b, s * s)?, t, seed)
}
