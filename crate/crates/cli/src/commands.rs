use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use isocorr::allocator::{centering_factor, laplace_allocation, mvo_isotropic, AlphaVector};
use isocorr::corr_stats::{
    auto_histogram, sample_pairs, summarize_pairs, HistogramBin, ReferenceMean,
};
use isocorr::cross_section::{iso_nstar, risk_partition, IsotropicModel};
use isocorr::dense::DenseMatrix;
use isocorr::experiment::{analyze_dof, model_curves};
use isocorr::iso_algebra::{feasible_rho_range, orthogonal_eigenmatrix};
use isocorr::market_data::{
    drop_incomplete_assets, load_price_csv, load_returns_csv, save_price_csv, save_returns_csv,
    to_returns, PRICE_HEADER,
};
use isocorr::synth::{homoskedastic_panel, period_stamps, uniform_factor_panel};
use isocorr::{EquiCorrMatrix, Error, ReturnsPanel};

use crate::output::{num, opt, CliResult, RunDir};
use crate::{
    AllocateArgs, CurvesArgs, DenseArgs, IngestArgs, Model, NdofArgs, PairsArgs, RefMean,
    SynthArgs, SynthFormat,
};

pub fn ingest(args: &IngestArgs) -> CliResult<()> {
    let raw = load_price_csv(&args.input)?;
    let windowed = raw.window(args.from, args.to)?;
    let (clean, report) = drop_incomplete_assets(&windowed, args.min_coverage)?;
    let returns = to_returns(&clean)?;
    info!(
        "{} assets kept of {}, {} return periods",
        report.assets_loaded,
        report.assets_input,
        returns.n_periods()
    );
    let mut run = RunDir::create(&args.out)?;
    save_price_csv(&clean, run.path_for("prices_clean.csv"))?;
    save_returns_csv(&returns, run.path_for("returns.csv"))?;
    run.json("ingest_report.json", &report)?;
    run.finish("ingest", args, &[&args.input])
}

/// Loads a returns panel from either CSV contract, chosen by header.
fn load_panel(path: &Path) -> CliResult<ReturnsPanel> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut first = String::new();
    BufReader::new(file)
        .read_line(&mut first)
        .map_err(|e| Error::io(path, e))?;
    let header = first.trim_end_matches(['\r', '\n']);
    if header == PRICE_HEADER.join(",") {
        Ok(to_returns(&load_price_csv(path)?)?)
    } else {
        Ok(load_returns_csv(path)?)
    }
}

fn histogram_rows(bins: &[HistogramBin]) -> Vec<Vec<String>> {
    bins.iter()
        .map(|b| vec![num(b.bin_left), num(b.bin_right), b.count.to_string()])
        .collect()
}

pub fn pairs(args: &PairsArgs) -> CliResult<()> {
    let panel = load_panel(&args.input)?;
    let samples = sample_pairs(&panel, args.trials, args.seed)?;
    let reference = match args.ref_mean {
        RefMean::Sample => ReferenceMean::Sample,
        RefMean::Scaled => ReferenceMean::Scaled,
    };
    let summary = summarize_pairs(&samples, reference)?;
    let r: Vec<f64> = samples.iter().map(|s| s.pearson_r).collect();
    let z: Vec<f64> = samples.iter().map(|s| s.fisher_z).collect();
    let ids = panel.asset_ids();

    let mut run = RunDir::create(&args.out)?;
    run.csv(
        "pairs.csv",
        &["asset_a", "asset_b", "r", "z", "n_obs"],
        samples.iter().map(|s| {
            vec![
                ids[s.asset_a].clone(),
                ids[s.asset_b].clone(),
                num(s.pearson_r),
                num(s.fisher_z),
                s.n_obs.to_string(),
            ]
        }),
    )?;
    let header = ["bin_left", "bin_right", "count"];
    run.csv(
        "rho_histogram.csv",
        &header,
        histogram_rows(&auto_histogram(&r, args.bins)?),
    )?;
    run.csv(
        "fisher_histogram.csv",
        &header,
        histogram_rows(&auto_histogram(&z, args.bins)?),
    )?;
    run.json("pairs_summary.json", &summary)?;
    run.finish("pairs", args, &[&args.input])
}

pub fn ndof(args: &NdofArgs) -> CliResult<()> {
    let panel = load_panel(&args.input)?;
    let n_max = panel.n_assets();
    let window = match (args.fit_min, args.fit_max) {
        (None, None) => None,
        (lo, hi) => {
            let (dlo, dhi) = isocorr::experiment::default_fit_window(n_max);
            Some((lo.unwrap_or(dlo), hi.unwrap_or(dhi)))
        }
    };
    let analysis = analyze_dof(&panel, args.trials, args.seed, window)?;

    let mut run = RunDir::create(&args.out)?;
    run.csv(
        "ndof_trials.csv",
        &["trial", "n", "v_i", "v_p", "n_star", "degenerate"],
        analysis.trials.iter().map(|t| {
            vec![
                t.index.to_string(),
                t.n.to_string(),
                num(t.v_i),
                num(t.v_p),
                num(t.n_star),
                t.degenerate.to_string(),
            ]
        }),
    )?;

    #[derive(Serialize)]
    struct FitReport<'a> {
        n_max: usize,
        trials: usize,
        terminal: &'a isocorr::cross_section::VarianceDecomposition,
        fit: &'a Option<isocorr::experiment::OlsFit>,
        verdict: &'a Option<isocorr::experiment::ModelVerdict>,
    }
    run.json(
        "ndof_fit.json",
        &FitReport {
            n_max,
            trials: analysis.trials.len(),
            terminal: &analysis.terminal,
            fit: &analysis.fit,
            verdict: &analysis.verdict,
        },
    )?;

    let grid: Vec<usize> = (1..=n_max).collect();
    let (iso, factor) = match &analysis.verdict {
        Some(v) => {
            let iso = v
                .rho_hat_terminal
                .and_then(|rho| model_curves(rho, 1.0, &grid).ok())
                .map(|c| c.iso);
            let factor = (v.k_hat_asymptote >= 1.0)
                .then(|| model_curves(0.0, v.k_hat_asymptote, &grid).ok())
                .flatten()
                .map(|c| c.factor);
            (iso, factor)
        }
        None => (None, None),
    };
    let fit = analysis.fit;
    run.csv(
        "ndof_curves.csv",
        &["n", "n_star_iso", "n_star_factor", "n_star_ols"],
        grid.iter().enumerate().map(|(i, &n)| {
            vec![
                n.to_string(),
                opt(iso.as_ref().map(|c| c[i])),
                opt(factor.as_ref().map(|c| c[i])),
                opt(fit.map(|f| f.intercept + f.slope * n as f64)),
            ]
        }),
    )?;
    run.finish("ndof", args, &[&args.input])
}

#[derive(Deserialize)]
struct AlphaRow {
    asset_id: String,
    alpha: f64,
    sigma: f64,
}

fn read_alphas(path: &Path) -> CliResult<Vec<AlphaRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let header = rdr.headers()?;
    if header.iter().ne(["asset_id", "alpha", "sigma"]) {
        return Err(Error::MalformedRow {
            line: 1,
            msg: "expected header `asset_id,alpha,sigma`".into(),
        }
        .into());
    }
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<AlphaRow>() {
        let row = rec.map_err(|e| match e.position() {
            Some(p) if !e.is_io_error() => Error::MalformedRow {
                line: p.line(),
                msg: e.to_string(),
            },
            _ => Error::Csv(e),
        })?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyPanel("alpha file has no rows".into()).into());
    }
    Ok(rows)
}

pub fn allocate(args: &AllocateArgs) -> CliResult<()> {
    let rows = read_alphas(&args.input)?;
    let sigmas: Vec<f64> = rows.iter().map(|r| r.sigma).collect();
    let alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
    let model = IsotropicModel::new(args.rho, sigmas)?;
    let alpha = AlphaVector::for_model(alphas, &model)?;
    let result = match args.model {
        Model::Mvo => mvo_isotropic(&model, &alpha, args.lambda)?,
        Model::Laplace => laplace_allocation(&model, &alpha, args.lambda)?,
    };

    let mut run = RunDir::create(&args.out)?;
    run.csv(
        "weights.csv",
        &["asset_id", "weight"],
        rows.iter()
            .zip(&result.weights)
            .map(|(r, w)| vec![r.asset_id.clone(), num(*w)]),
    )?;

    #[derive(Serialize)]
    struct Diagnostics {
        model: Model,
        n: usize,
        rho: f64,
        lambda: f64,
        z_sq: f64,
        omega: f64,
        centering: f64,
    }
    run.json(
        "allocation.json",
        &Diagnostics {
            model: args.model,
            n: model.n(),
            rho: args.rho,
            lambda: result.lambda,
            z_sq: result.z_sq,
            omega: result.omega,
            centering: result.centering,
        },
    )?;
    run.finish("allocate", args, &[&args.input])
}

pub fn curves(args: &CurvesArgs) -> CliResult<()> {
    if args.n_max == 0 {
        return Err(Error::InvalidDimension { min: 1, got: 0 }.into());
    }
    if args.rho.is_empty() {
        return Err(Error::InvalidParameter("empty correlation grid".into()).into());
    }
    let (lo, hi) = feasible_rho_range(args.n_max)?;
    for &rho in &args.rho {
        if !(lo..=hi).contains(&rho) {
            return Err(Error::InfeasibleCorrelation {
                n: args.n_max,
                rho,
                min: lo,
                max: hi,
            }
            .into());
        }
    }
    let mut risk = Vec::new();
    let mut centering = Vec::new();
    let mut nstar = Vec::new();
    for &rho in &args.rho {
        for n in 1..=args.n_max {
            let p = risk_partition(args.sigma, rho, n)?;
            risk.push(vec![
                num(rho),
                n.to_string(),
                num(p.v_s),
                num(p.v_r),
                opt(p.ratio()),
            ]);
            centering.push(vec![num(rho), n.to_string(), num(centering_factor(rho, n))]);
            let ns = match iso_nstar(n, rho) {
                Ok(v) => num(v),
                Err(e) => {
                    warn!("N* undefined at n = {n}, rho = {rho}: {e}");
                    String::new()
                }
            };
            nstar.push(vec![num(rho), n.to_string(), ns]);
        }
    }
    let mut run = RunDir::create(&args.out)?;
    run.csv(
        "risk_curves.csv",
        &["rho", "n", "v_s", "v_r", "ratio"],
        risk,
    )?;
    run.csv("centering_curves.csv", &["rho", "n", "factor"], centering)?;
    run.csv("nstar_curves.csv", &["rho", "n", "n_star"], nstar)?;
    run.finish("curves", args, &[])
}

pub fn synth(args: &SynthArgs) -> CliResult<()> {
    let panel = match args.factors {
        Some(k) => uniform_factor_panel(args.n, k, args.loading, args.idio, args.t, args.seed)?,
        None => homoskedastic_panel(args.n, args.t, args.rho, args.sigma, args.seed)?,
    };
    let mut run = RunDir::create(&args.out)?;
    match args.format {
        SynthFormat::Returns => save_returns_csv(&panel, run.path_for("returns.csv"))?,
        SynthFormat::Prices => {
            // one extra leading date carries the base price of 100
            let dates = period_stamps(panel.n_periods() + 1);
            let mut level = vec![100.0; panel.n_assets()];
            let mut rows = Vec::with_capacity(dates.len() * panel.n_assets());
            for (d, date) in dates.iter().enumerate() {
                let date = date.format("%Y-%m-%d").to_string();
                for (a, id) in panel.asset_ids().iter().enumerate() {
                    if d > 0 {
                        level[a] *= 1.0 + panel.column(a)[d - 1];
                    }
                    if level[a] <= 0.0 {
                        return Err(Error::InvalidParameter(format!(
                            "synthetic price for {id} fell to {} on {date}; lower the volatility",
                            level[a]
                        ))
                        .into());
                    }
                    rows.push(vec![date.clone(), id.clone(), num(level[a])]);
                }
            }
            run.csv("prices.csv", &PRICE_HEADER, rows)?;
        }
    }
    run.finish("synth", args, &[])
}

fn dense_rows(m: &DenseMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| num(m[(i, j)])).collect())
        .collect()
}

pub fn dense(args: &DenseArgs) -> CliResult<()> {
    let g = EquiCorrMatrix::new(args.n, args.rho)?;
    let q = orthogonal_eigenmatrix(args.n)?;
    let header: Vec<String> = (0..args.n).map(|j| format!("c{j}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut run = RunDir::create(&args.out)?;
    run.csv("g.csv", &header, dense_rows(&g.to_dense()))?;
    run.csv("q.csv", &header, dense_rows(&q))?;
    match g.inverse() {
        Ok(inv) => run.csv("g_inv.csv", &header, dense_rows(&inv.to_dense()))?,
        Err(e @ Error::Singular { .. }) => warn!("{e}; g_inv.csv not written"),
        Err(e) => return Err(e.into()),
    }
    run.finish("dense", args, &[])
}
