//! Subcommand dispatch.

use std::path::PathBuf;

use msm_core::analysis::{
    estimate_pointwise_exponent, estimate_uniform_exponent_with, figure_reproduction, uniform_grid,
    AnalysisReport, EstimateRecord, FigureConfig, Method, TangentSetup,
};
use msm_core::hurst::HurstFunction;
use msm_core::kernel::{quad_exponent_swap_norm, quad_kernel_diff_alpha_norm, Region};
use msm_core::simulate::{auto_window, simulate_ensemble, truncation_error_bound, TruncationWindow};
use msm_core::stable_random::{sample_pareto, sample_sas, RngStream, StableSpec};
use msm_core::stats::{median, ols, tail_slope};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, FieldError, RunConfig, VerifySettings, WindowSpec};
use crate::output::{OutputWriter, WriteError};

/// Atom budget used when the window is resolved automatically.
pub const AUTO_ATOM_BUDGET: f64 = 1e6;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration ({} problem(s))", .0.len())]
    Config(Vec<FieldError>),
    #[error(transparent)]
    Core(#[from] msm_core::Error),
    #[error(transparent)]
    Write(#[from] WriteError),
    #[error("acceptance checks failed: {0}")]
    ChecksFailed(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(errs) => {
                if errs.iter().any(|e| e.kind == crate::config::ErrorKind::ResourceCap) {
                    3
                } else {
                    2
                }
            }
            RunError::Core(msm_core::Error::ResourceCap { .. }) => 3,
            RunError::Core(msm_core::Error::Numerical { .. }) => 4,
            RunError::Core(_) => 2,
            RunError::Write(_) => 1,
            RunError::ChecksFailed(_) => 5,
        }
    }

    /// Machine-readable form for standard error.
    pub fn to_json(&self) -> Value {
        match self {
            RunError::Config(errs) => json!({ "error": "config", "problems": errs }),
            RunError::Core(e) => {
                let kind = match e {
                    msm_core::Error::ResourceCap { .. } => "resource_cap",
                    msm_core::Error::Numerical { .. } => "numerical",
                    _ => "input",
                };
                json!({ "error": kind, "message": e.to_string() })
            }
            RunError::Write(e) => json!({ "error": "io", "message": e.to_string() }),
            RunError::ChecksFailed(m) => json!({ "error": "checks_failed", "message": m }),
        }
    }
}

/// Runs a validated configuration; returns the manifest path.
pub fn run(cfg: &RunConfig) -> Result<PathBuf, RunError> {
    let mut out = OutputWriter::create(&cfg.raw.output_dir)?;
    let (resolved, verdict) = match cfg.command() {
        Command::Simulate => (simulate(cfg, &mut out)?, None),
        Command::Estimate => (estimate(cfg, &mut out)?, None),
        Command::Tangent => (tangent(cfg, &mut out)?, None),
        Command::Verify => verify(cfg, &mut out)?,
        Command::Figures => (figures(cfg, &mut out)?, None),
    };
    let config = serde_json::to_value(&cfg.raw).expect("config serialises");
    let name = serde_json::to_value(cfg.command()).expect("command serialises");
    let manifest = out.finish(name.as_str().unwrap_or_default(), config, resolved)?;
    match verdict {
        Some(failed) => Err(RunError::ChecksFailed(failed)),
        None => Ok(manifest),
    }
}

fn grid_of(cfg: &RunConfig) -> Vec<f64> {
    let g = cfg.raw.grid;
    uniform_grid(g.start, g.end, g.n_points)
}

fn resolve_window(cfg: &RunConfig, grid: &[f64]) -> Result<(TruncationWindow, Value), RunError> {
    let alpha = cfg.raw.alpha;
    match cfg.raw.window {
        WindowSpec::Explicit(w) => {
            w.check_cap(alpha, cfg.raw.atom_cap)?;
            let t = grid[grid.len() - 1];
            let bound = if t > 0.0 {
                serde_json::to_value(truncation_error_bound(&w, t, &cfg.hurst, alpha)?).ok()
            } else {
                None
            };
            Ok((w, json!({ "window": w, "auto": false, "truncation_bound": bound })))
        }
        WindowSpec::Auto(_) => {
            let a = auto_window(grid, &cfg.hurst, alpha, AUTO_ATOM_BUDGET.min(cfg.raw.atom_cap))?;
            Ok((a.window, json!({ "window": a.window, "auto": true, "auto_window": a })))
        }
    }
}

fn simulate(cfg: &RunConfig, out: &mut OutputWriter) -> Result<Value, RunError> {
    let grid = grid_of(cfg);
    let (window, resolved) = resolve_window(cfg, &grid)?;
    let paths = simulate_ensemble(
        &window,
        &cfg.hurst,
        cfg.raw.alpha,
        &grid,
        cfg.raw.mode,
        cfg.raw.seed,
        0,
        cfg.raw.replicates,
    )?;
    for p in &paths {
        out.series(&format!("path_{}.csv", p.provenance.stream_id), &p.grid, &p.values)?;
    }
    Ok(resolved)
}

fn estimate(cfg: &RunConfig, out: &mut OutputWriter) -> Result<Value, RunError> {
    let settings = cfg.raw.estimate.clone().expect("validated");
    let grid = grid_of(cfg);
    let (window, resolved) = resolve_window(cfg, &grid)?;
    let paths = simulate_ensemble(
        &window,
        &cfg.hurst,
        cfg.raw.alpha,
        &grid,
        cfg.raw.mode,
        cfg.raw.seed,
        0,
        cfg.raw.replicates,
    )?;
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        let e = estimate_uniform_exponent_with(p, settings.interval, settings.levels)?;
        for &(scale, stat) in &e.diagnostics {
            let fitted = e.fit_range.contains(&scale);
            rows.push(vec![i as f64, scale, stat, if fitted { 1.0 } else { 0.0 }]);
        }
        values.push(e.estimate);
        records.push(EstimateRecord {
            location: e.location,
            value: e.estimate,
            stderr: e.stderr,
        });
    }
    let (a, b) = settings.interval;
    let target = cfg.hurst.min_over(a, b) - 1.0 / cfg.raw.alpha;
    let med = median(&values);
    let mut diagnostics = json!({ "median_estimate": med, "target": target });
    if let Some(t0) = settings.pointwise_t0 {
        let pw = estimate_pointwise_exponent(&paths, t0)?;
        for &(lag, stat) in &pw.diagnostics {
            rows.push(vec![-1.0, lag, stat, 1.0]);
        }
        diagnostics["pointwise"] = serde_json::to_value(&pw).expect("estimate serialises");
        diagnostics["pointwise_target"] = json!(cfg.hurst.at(t0) - 1.0 / cfg.raw.alpha);
    }
    let report = AnalysisReport {
        method: Method::DyadicOscillation,
        parameters: json!({
            "interval": settings.interval,
            "levels": settings.levels,
            "alpha": cfg.raw.alpha,
            "replicates": cfg.raw.replicates,
        }),
        estimates: records,
        fit_diagnostics: diagnostics,
        pass: (med - target).abs() <= settings.tolerance,
        tolerance: settings.tolerance,
    };
    out.json("report.json", &report)?;
    out.table("scales.csv", &["replicate", "scale", "statistic", "fitted"], rows)?;
    Ok(resolved)
}

fn tangent(cfg: &RunConfig, out: &mut OutputWriter) -> Result<Value, RunError> {
    let t = cfg.raw.tangent.clone().expect("validated");
    let setup = TangentSetup {
        hurst: cfg.hurst.clone(),
        alpha: cfg.raw.alpha,
        mode: cfg.raw.mode,
        t0: t.t0,
        window_start: t.window_start,
        gamma: t.gamma,
        seed: cfg.raw.seed,
    };
    let report =
        msm_core::analysis::tangent_process_check(&setup, &t.h_values, &t.r_grid, cfg.raw.replicates)?;
    out.json("tangent.json", &report)?;
    Ok(json!({ "median_decreasing": report.median_decreasing() }))
}

fn figures(cfg: &RunConfig, out: &mut OutputWriter) -> Result<Value, RunError> {
    let f = cfg.raw.figures.clone().expect("validated");
    let grid = grid_of(cfg);
    let (window, resolved) = resolve_window(cfg, &grid)?;
    let g = cfg.raw.grid;
    let fc = FigureConfig {
        hurst: cfg.hurst.clone(),
        alpha: cfg.raw.alpha,
        window,
        grid_start: g.start,
        grid_end: g.end,
        n_points: g.n_points,
        interval: f.interval,
        replicates: cfg.raw.replicates,
        seed: cfg.raw.seed,
    };
    let fig = figure_reproduction(&fc, f.margin)?;
    let (ht, hv): (Vec<f64>, Vec<f64>) = fig.hurst_samples.iter().copied().unzip();
    out.series("hurst.csv", &ht, &hv)?;
    out.series("x_path.csv", &fig.x_path.grid, &fig.x_path.values)?;
    out.series("y_path.csv", &fig.y_path.grid, &fig.y_path.values)?;
    out.json("figures.json", &fig.report)?;
    Ok(resolved)
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeCheck {
    pub name: String,
    pub h: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SwapCheck {
    pub delta: f64,
    pub h: Vec<f64>,
    /// `norm / (Δ^α h^{αH} |ln h|^α)`.
    pub ratios: Vec<f64>,
    pub zero_at_equal_exponents: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplerCheck {
    pub name: String,
    pub statistic: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub alpha: f64,
    pub h: f64,
    pub kernel_slopes: Vec<SlopeCheck>,
    pub swap: Vec<SwapCheck>,
    pub sampler: Vec<SamplerCheck>,
    pub pass: bool,
}

/// Log-log slopes of the three kernel-difference regions in `h`.
pub fn kernel_slopes(
    hurst: &HurstFunction,
    alpha: f64,
    eps: f64,
    exponents: (i32, i32),
    tolerance: f64,
) -> msm_core::Result<Vec<SlopeCheck>> {
    let h0 = hurst.constant_value().unwrap_or(hurst.h_lo());
    let hs: Vec<f64> = (exponents.0..=exponents.1).map(|k| 2f64.powi(-k)).collect();
    let regions = [
        ("far_past", Region::FarPast { eps }, alpha),
        ("near_past", Region::NearPast { eps }, alpha * h0),
        ("new_mass", Region::NewMass, alpha * h0),
    ];
    regions
        .iter()
        .map(|&(name, region, target)| {
            let values = hs
                .iter()
                .map(|&h| quad_kernel_diff_alpha_norm(0.0, h, region, hurst, alpha))
                .collect::<msm_core::Result<Vec<f64>>>()?;
            let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
            let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
            let slope = ols(&xs, &ys)?.slope;
            Ok(SlopeCheck {
                name: name.into(),
                h: hs.clone(),
                values,
                slope,
                target,
                tolerance,
                pass: (slope - target).abs() <= tolerance,
            })
        })
        .collect()
}

/// Normalised exponent-swap norms between `H` and `H + Δ`.
///
/// Passes when every ratio is finite and the largest ratio over the finer
/// half of the `h` grid does not exceed the largest over the coarser half.
pub fn swap_ratios(h0: f64, alpha: f64, delta: f64, exponents: (i32, i32)) -> msm_core::Result<SwapCheck> {
    let a = HurstFunction::constant(h0)?;
    let b = HurstFunction::constant(h0 + delta)?;
    let hs: Vec<f64> = (exponents.0..=exponents.1).map(|k| 2f64.powi(-k)).collect();
    let mut ratios = Vec::with_capacity(hs.len());
    let mut zero = true;
    for &h in &hs {
        let norm = quad_exponent_swap_norm(h, &a, &b, alpha)?;
        let scale = delta.powf(alpha) * h.powf(alpha * h0) * h.ln().abs().powf(alpha);
        ratios.push(norm / scale);
        zero &= quad_exponent_swap_norm(h, &a, &a, alpha)? == 0.0;
    }
    let mid = ratios.len() / 2;
    let coarse = ratios[..mid].iter().copied().fold(0.0, f64::max);
    let fine = ratios[mid..].iter().copied().fold(0.0, f64::max);
    let finite = ratios.iter().all(|r| r.is_finite());
    Ok(SwapCheck {
        delta,
        h: hs,
        ratios,
        zero_at_equal_exponents: zero,
        pass: finite && zero && fine <= coarse,
    })
}

/// Pareto survival at `2γ`, Gaussian variance at α = 2 and the stable tail slope.
pub fn sampler_checks(alpha: f64, draws: usize, seed: u64) -> msm_core::Result<Vec<SamplerCheck>> {
    let mut rng = RngStream::new(seed, 0);
    let hits = (0..draws)
        .filter(|_| sample_pareto(1.0, alpha, rng.uniform_pos()).map(|y| y > 2.0).unwrap_or(false))
        .count();
    let p = 2f64.powf(-alpha);
    let sigma = (p * (1.0 - p) / draws as f64).sqrt();
    let survival = hits as f64 / draws as f64;

    let mut rng = RngStream::new(seed, 1);
    let gauss = StableSpec::new(2.0, 1.0)?;
    let xs: Vec<f64> = (0..draws).map(|_| sample_sas(&gauss, &mut rng)).collect();
    let mean = xs.iter().sum::<f64>() / draws as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws as f64 - 1.0);

    let mut rng = RngStream::new(seed, 2);
    let spec = StableSpec::standard(alpha)?;
    let ys: Vec<f64> = (0..draws).map(|_| sample_sas(&spec, &mut rng)).collect();
    let slope = tail_slope(&ys)?.slope;

    Ok(vec![
        SamplerCheck {
            name: "pareto_survival_at_2gamma".into(),
            statistic: survival,
            target: p,
            tolerance: 3.0 * sigma,
            pass: (survival - p).abs() <= 3.0 * sigma,
        },
        SamplerCheck {
            name: "gaussian_variance".into(),
            statistic: var,
            target: 2.0,
            tolerance: 0.1,
            pass: (var - 2.0).abs() <= 0.1,
        },
        SamplerCheck {
            name: "stable_tail_slope".into(),
            statistic: slope,
            target: -alpha,
            tolerance: 0.1,
            pass: (slope + alpha).abs() <= 0.1,
        },
    ])
}

fn verify(cfg: &RunConfig, out: &mut OutputWriter) -> Result<(Value, Option<String>), RunError> {
    let v: VerifySettings = cfg.raw.verify.clone().unwrap_or_default();
    let alpha = cfg.raw.alpha;
    let h0 = cfg.hurst.constant_value().expect("validated constant");
    let kernel = kernel_slopes(&cfg.hurst, alpha, v.eps, v.h_exponents, v.slope_tolerance)?;
    let swap = v
        .swap_deltas
        .iter()
        .map(|&d| swap_ratios(h0, alpha, d, v.swap_h_exponents))
        .collect::<msm_core::Result<Vec<_>>>()?;
    let sampler = sampler_checks(alpha, v.sampler_draws, cfg.raw.seed)?;
    let mut failed: Vec<String> = kernel.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
    failed.extend(swap.iter().filter(|c| !c.pass).map(|c| format!("swap_delta_{}", c.delta)));
    failed.extend(sampler.iter().filter(|c| !c.pass).map(|c| c.name.clone()));
    let report = VerifyReport {
        alpha,
        h: h0,
        kernel_slopes: kernel,
        swap,
        sampler,
        pass: failed.is_empty(),
    };
    out.json("verify.json", &report)?;
    let verdict = (!failed.is_empty()).then(|| failed.join(", "));
    Ok((json!({ "pass": report.pass }), verdict))
}
