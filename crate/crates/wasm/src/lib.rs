//! Browser bindings for the demo page in `www/`. Every export returns a JSON
//! string; failures come back as `{"error": "..."}` so the page can show
//! them next to the controls.

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use isocorr::allocator::{
    centering_factor, laplace_allocation, laplace_omega, mvo_isotropic, AlphaVector,
};
use isocorr::cross_section::{iso_nstar, risk_partition, IsotropicModel};
use isocorr::experiment::run_dof_experiment;
use isocorr::synth::homoskedastic_panel;

/// Largest panel the page may request; keeps a click under a second or so.
const MAX_CELLS: usize = 400_000;

fn respond<T: Serialize>(r: isocorr::Result<T>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e.to_string()),
    }
}

fn error_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

#[derive(Serialize)]
pub struct NStarDemo {
    pub n: Vec<usize>,
    pub iso: Vec<f64>,
    pub asymptote: Option<f64>,
    /// `(n, N*)` for each non-degenerate simulated trial.
    pub scatter: Vec<(usize, f64)>,
}

pub fn nstar_demo_data(
    n_max: usize,
    rho: f64,
    periods: usize,
    trials: usize,
    seed: u64,
) -> isocorr::Result<NStarDemo> {
    if n_max * periods > MAX_CELLS {
        return Err(isocorr::Error::InvalidParameter(format!(
            "panel of {n_max} x {periods} is too large for the demo (limit {MAX_CELLS} cells)"
        )));
    }
    let n: Vec<usize> = (1..=n_max).collect();
    let iso = n
        .iter()
        .map(|&k| iso_nstar(k, rho))
        .collect::<isocorr::Result<_>>()?;
    let panel = homoskedastic_panel(n_max, periods, rho, 0.01, seed)?;
    let scatter = run_dof_experiment(&panel, trials, seed)?
        .into_iter()
        .filter(|t| !t.degenerate)
        .map(|t| (t.n, t.n_star))
        .collect();
    Ok(NStarDemo {
        n,
        iso,
        asymptote: isocorr::cross_section::iso_nstar_asymptote(rho),
        scatter,
    })
}

/// Isotropic `N*(N)` curve plus a simulated scatter from a seeded panel.
#[wasm_bindgen]
pub fn nstar_demo(n_max: usize, rho: f64, periods: usize, trials: usize, seed: u32) -> String {
    respond(nstar_demo_data(n_max, rho, periods, trials, seed as u64))
}

#[derive(Serialize)]
pub struct RiskDemo {
    pub n: Vec<usize>,
    pub v_s: Vec<f64>,
    pub v_r: Vec<f64>,
    pub ratio: Vec<Option<f64>>,
    pub centering: Vec<f64>,
    pub asymptotic_ratio: Option<f64>,
}

pub fn risk_demo_data(rho: f64, n_max: usize) -> isocorr::Result<RiskDemo> {
    let n: Vec<usize> = (1..=n_max).collect();
    let parts = n
        .iter()
        .map(|&k| risk_partition(1.0, rho, k))
        .collect::<isocorr::Result<Vec<_>>>()?;
    Ok(RiskDemo {
        v_s: parts.iter().map(|p| p.v_s).collect(),
        v_r: parts.iter().map(|p| p.v_r).collect(),
        ratio: parts.iter().map(|p| p.ratio()).collect(),
        centering: n.iter().map(|&k| centering_factor(rho, k)).collect(),
        asymptotic_ratio: isocorr::cross_section::asymptotic_risk_ratio(rho),
        n,
    })
}

/// Residual/systematic risk split and the centering factor against `N`.
#[wasm_bindgen]
pub fn risk_demo(rho: f64, n_max: usize) -> String {
    respond(risk_demo_data(rho, n_max))
}

#[derive(Serialize)]
pub struct AllocationDemo {
    pub alpha: Vec<f64>,
    pub mvo: Vec<f64>,
    pub laplace: Vec<f64>,
    pub z_sq: f64,
    pub omega: f64,
    pub centering: f64,
    /// `(z^2, Omega)` on a log grid around the current `z^2`.
    pub omega_curve: Vec<(f64, f64)>,
}

pub fn allocation_demo_data(
    alphas: &[f64],
    rho: f64,
    lambda: f64,
) -> isocorr::Result<AllocationDemo> {
    let n = alphas.len();
    let model = IsotropicModel::homoskedastic(n, rho, 1.0)?;
    let alpha = AlphaVector::for_model(alphas.to_vec(), &model)?;
    let mvo = mvo_isotropic(&model, &alpha, lambda)?;
    let lap = laplace_allocation(&model, &alpha, lambda)?;
    let omega_curve = (0..=80)
        .map(|i| {
            let z = 10f64.powf(-4.0 + i as f64 * 0.1) * (n as f64 + 1.0);
            (z, laplace_omega(z, n))
        })
        .collect();
    Ok(AllocationDemo {
        alpha: alphas.to_vec(),
        mvo: mvo.weights,
        laplace: lap.weights,
        z_sq: lap.z_sq,
        omega: lap.omega,
        centering: lap.centering,
        omega_curve,
    })
}

/// Mean-variance against Laplace weights for unit-volatility assets.
/// `alphas` is a comma or whitespace separated list.
#[wasm_bindgen]
pub fn allocation_demo(alphas: &str, rho: f64, lambda: f64) -> String {
    let parsed: Result<Vec<f64>, _> = alphas
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::parse::<f64>)
        .collect();
    match parsed {
        Ok(a) if a.is_empty() => error_json("enter at least one alpha"),
        Ok(a) => respond(allocation_demo_data(&a, rho, lambda)),
        Err(e) => error_json(&format!("bad alpha list: {e}")),
    }
}
