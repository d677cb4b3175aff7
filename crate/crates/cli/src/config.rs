//! Run configuration: JSON schema, parsing and whole-config validation.

use msm_core::hurst::HurstDescriptor;
use msm_core::simulate::{PathMode, TruncationWindow, DEFAULT_ATOM_CAP};
use msm_core::HurstFunction;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Estimate,
    Tangent,
    Verify,
    Figures,
}

impl Command {
    /// Commands whose targets need positive Hölder exponents, `h_lo > 1/α`.
    pub fn is_regularity(self) -> bool {
        matches!(self, Command::Estimate | Command::Tangent | Command::Figures)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowSpec {
    Auto(AutoTag),
    Explicit(TruncationWindow),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSettings {
    pub interval: (f64, f64),
    /// Inclusive dyadic level range for the uniform estimator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<(u32, u32)>,
    /// Point for the ensemble quantile-scaling estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointwise_t0: Option<f64>,
    #[serde(default = "default_estimate_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TangentSettings {
    pub t0: f64,
    pub h_values: Vec<f64>,
    pub r_grid: Vec<f64>,
    pub window_start: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySettings {
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// `h = 2^{-k}` for `k` in this inclusive range.
    #[serde(default = "default_h_exponents")]
    pub h_exponents: (i32, i32),
    #[serde(default = "default_slope_tolerance")]
    pub slope_tolerance: f64,
    #[serde(default = "default_swap_deltas")]
    pub swap_deltas: Vec<f64>,
    #[serde(default = "default_swap_h_exponents")]
    pub swap_h_exponents: (i32, i32),
    #[serde(default = "default_sampler_draws")]
    pub sampler_draws: usize,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            eps: default_eps(),
            h_exponents: default_h_exponents(),
            slope_tolerance: default_slope_tolerance(),
            swap_deltas: default_swap_deltas(),
            swap_h_exponents: default_swap_h_exponents(),
            sampler_draws: default_sampler_draws(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSettings {
    pub interval: (f64, f64),
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_estimate_tolerance() -> f64 {
    0.08
}
fn default_eps() -> f64 {
    0.1
}
fn default_h_exponents() -> (i32, i32) {
    (4, 10)
}
fn default_slope_tolerance() -> f64 {
    0.05
}
fn default_swap_deltas() -> Vec<f64> {
    vec![0.01, 0.05]
}
fn default_swap_h_exponents() -> (i32, i32) {
    (4, 12)
}
fn default_sampler_draws() -> usize {
    1_000_000
}
fn default_margin() -> f64 {
    0.1
}
fn default_replicates() -> usize {
    1
}
fn default_atom_cap() -> f64 {
    DEFAULT_ATOM_CAP
}
fn default_mode() -> PathMode {
    PathMode::ItoMsm
}
fn default_output_dir() -> String {
    "out".into()
}

/// The on-disk configuration, before semantic validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub schema_version: u32,
    pub command: Command,
    pub alpha: f64,
    pub hurst: HurstDescriptor,
    pub window: WindowSpec,
    pub grid: GridSpec,
    #[serde(default = "default_mode")]
    pub mode: PathMode,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default = "default_atom_cap")]
    pub atom_cap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangent: Option<TangentSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figures: Option<FigureSettings>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub raw: RawConfig,
    pub hurst: HurstFunction,
}

impl RunConfig {
    pub fn command(&self) -> Command {
        self.raw.command
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.raw).expect("config serialises")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Config,
    ResourceCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub constraint: String,
    pub got: Value,
    pub kind: ErrorKind,
}

impl FieldError {
    fn config(field: impl Into<String>, constraint: impl Into<String>, got: Value) -> Self {
        Self {
            field: field.into(),
            constraint: constraint.into(),
            got,
            kind: ErrorKind::Config,
        }
    }
}

/// Parses and checks a configuration, reporting every violation found.
pub fn validate_config(raw: &str) -> Result<RunConfig, Vec<FieldError>> {
    let value: Value = serde_json::from_str(raw).map_err(|e| {
        vec![FieldError::config("$", "valid JSON", Value::String(e.to_string()))]
    })?;
    let cfg: RawConfig = serde_json::from_value(value.clone()).map_err(|e| {
        vec![FieldError::config("$", "configuration schema", Value::String(e.to_string()))]
    })?;
    let mut errs = Vec::new();
    let got = |path: &str| value.pointer(path).cloned().unwrap_or(Value::Null);

    if cfg.schema_version != SCHEMA_VERSION {
        errs.push(FieldError::config(
            "schema_version",
            format!("schema_version = {SCHEMA_VERSION}"),
            got("/schema_version"),
        ));
    }
    let alpha = cfg.alpha;
    let alpha_ok = alpha > 0.0 && alpha < 2.0;
    if !alpha_ok {
        errs.push(FieldError::config("alpha", "0 < α < 2", got("/alpha")));
    }
    let hurst = match cfg.hurst.resolve() {
        Ok(h) => Some(h),
        Err(problems) => {
            for (field, msg) in problems {
                let path = format!("/hurst/{}", field.replace('.', "/"));
                errs.push(FieldError::config(format!("hurst.{field}"), msg, got(&path)));
            }
            None
        }
    };
    if cfg.command.is_regularity() && alpha_ok {
        if alpha <= 1.0 {
            errs.push(FieldError::config(
                "alpha",
                format!("h_lo > 1/α unsatisfiable (α = {alpha} ≤ 1)"),
                got("/alpha"),
            ));
        } else if cfg.hurst.h_lo <= 1.0 / alpha {
            errs.push(FieldError::config(
                "hurst.h_lo",
                format!("h_lo > 1/α violated (1/α = {})", 1.0 / alpha),
                got("/hurst/h_lo"),
            ));
        }
    }
    let g = cfg.grid;
    if g.n_points < 1 {
        errs.push(FieldError::config("grid.n_points", "n_points ≥ 1", got("/grid/n_points")));
    }
    if !(g.start.is_finite() && g.end.is_finite() && (g.end > g.start || (g.n_points == 1 && g.end == g.start))) {
        errs.push(FieldError::config("grid", "finite start < end", got("/grid")));
    }
    if cfg.replicates < 1 {
        errs.push(FieldError::config("replicates", "replicates ≥ 1", got("/replicates")));
    }
    if cfg.threads == Some(0) {
        errs.push(FieldError::config("threads", "threads ≥ 1", got("/threads")));
    }
    if !(cfg.atom_cap > 0.0) {
        errs.push(FieldError::config("atom_cap", "atom_cap > 0", got("/atom_cap")));
    }
    if let Some(h) = &hurst {
        match cfg.mode {
            PathMode::Lfsm if h.constant_value().is_none() => errs.push(FieldError::config(
                "mode",
                "lfsm needs a constant Hurst function",
                got("/mode"),
            )),
            PathMode::ClassicalMsm if !h.is_deterministic() => errs.push(FieldError::config(
                "mode",
                "classical_msm needs a deterministic Hurst function",
                got("/mode"),
            )),
            _ => {}
        }
    }
    if let WindowSpec::Explicit(w) = cfg.window {
        if let Err(e) = w.validate() {
            errs.push(FieldError::config("window", e.to_string(), got("/window")));
        } else {
            if !(g.start > w.t0 && g.end <= w.t_end) {
                errs.push(FieldError::config(
                    "window",
                    "grid must lie in (t0, t_end]",
                    got("/window"),
                ));
            }
            if alpha_ok {
                let lambda = w.rate(alpha);
                if !(lambda <= cfg.atom_cap) {
                    errs.push(FieldError {
                        field: "window".into(),
                        constraint: format!(
                            "lambda = 2(t_end − t0)γ^(−α) = {lambda:.6e} exceeds the atom cap {:.6e}; raise gamma or shrink the window",
                            cfg.atom_cap
                        ),
                        got: got("/window"),
                        kind: ErrorKind::ResourceCap,
                    });
                }
            }
        }
    }
    check_section(&cfg, hurst.as_ref(), &got, &mut errs);
    if errs.is_empty() {
        Ok(RunConfig {
            raw: cfg,
            hurst: hurst.expect("valid Hurst function"),
        })
    } else {
        Err(errs)
    }
}

fn check_section(
    cfg: &RawConfig,
    hurst: Option<&HurstFunction>,
    got: &dyn Fn(&str) -> Value,
    errs: &mut Vec<FieldError>,
) {
    let g = cfg.grid;
    match cfg.command {
        Command::Simulate => {}
        Command::Estimate => match &cfg.estimate {
            None => errs.push(FieldError::config("estimate", "section required", Value::Null)),
            Some(e) => {
                let (a, b) = e.interval;
                if !(a < b && a >= g.start && b <= g.end) {
                    errs.push(FieldError::config(
                        "estimate.interval",
                        "a < b inside the grid",
                        got("/estimate/interval"),
                    ));
                }
                if let Some(t0) = e.pointwise_t0 {
                    if !(t0 >= g.start && t0 < g.end) {
                        errs.push(FieldError::config(
                            "estimate.pointwise_t0",
                            "inside the grid",
                            got("/estimate/pointwise_t0"),
                        ));
                    }
                }
                if !(e.tolerance > 0.0) {
                    errs.push(FieldError::config("estimate.tolerance", "> 0", got("/estimate/tolerance")));
                }
            }
        },
        Command::Tangent => match &cfg.tangent {
            None => errs.push(FieldError::config("tangent", "section required", Value::Null)),
            Some(t) => {
                if t.h_values.is_empty() || t.h_values.iter().any(|&h| !(h > 0.0)) {
                    errs.push(FieldError::config("tangent.h_values", "non-empty, all > 0", got("/tangent/h_values")));
                }
                if t.r_grid.is_empty() {
                    errs.push(FieldError::config("tangent.r_grid", "non-empty", got("/tangent/r_grid")));
                }
                if !(t.gamma > 0.0) {
                    errs.push(FieldError::config("tangent.gamma", "> 0", got("/tangent/gamma")));
                }
                if !(t.window_start < t.t0) {
                    errs.push(FieldError::config("tangent.window_start", "< t0", got("/tangent/window_start")));
                }
                if cfg.replicates < 500 {
                    errs.push(FieldError::config("replicates", "≥ 500 for tangent checks", got("/replicates")));
                }
                if hurst.is_some_and(|h| !h.is_deterministic()) {
                    errs.push(FieldError::config("hurst.kind", "deterministic kind for tangent checks", got("/hurst/kind")));
                }
            }
        },
        Command::Verify => {
            if hurst.is_some_and(|h| h.constant_value().is_none()) {
                errs.push(FieldError::config(
                    "hurst.kind",
                    "verify needs a constant Hurst function",
                    got("/hurst/kind"),
                ));
            }
            let v = cfg.verify.clone().unwrap_or_default();
            if !(v.eps > 0.0 && v.eps < 1.0) {
                errs.push(FieldError::config("verify.eps", "0 < eps < 1", got("/verify/eps")));
            }
            let (lo, hi) = v.h_exponents;
            if !(2 <= lo && lo + 3 <= hi && hi <= 40) {
                errs.push(FieldError::config("verify.h_exponents", "2 ≤ lo, lo + 3 ≤ hi ≤ 40", got("/verify/h_exponents")));
            }
            let (lo, hi) = v.swap_h_exponents;
            if !(2 <= lo && lo < hi && hi <= 40) {
                errs.push(FieldError::config("verify.swap_h_exponents", "2 ≤ lo < hi ≤ 40", got("/verify/swap_h_exponents")));
            }
            if v.swap_deltas.iter().any(|&d| !(d > 0.0)) || v.swap_deltas.is_empty() {
                errs.push(FieldError::config("verify.swap_deltas", "non-empty, all > 0", got("/verify/swap_deltas")));
            }
            if hurst.is_some_and(|h| v.swap_deltas.iter().any(|d| h.h_hi() + d >= 1.0)) {
                errs.push(FieldError::config("verify.swap_deltas", "H + Δ < 1", got("/verify/swap_deltas")));
            }
            if v.sampler_draws < 10_000 {
                errs.push(FieldError::config("verify.sampler_draws", "≥ 10000", got("/verify/sampler_draws")));
            }
        }
        Command::Figures => match &cfg.figures {
            None => errs.push(FieldError::config("figures", "section required", Value::Null)),
            Some(f) => {
                let (a, b) = f.interval;
                if !(a < b && a >= g.start && b <= g.end) {
                    errs.push(FieldError::config("figures.interval", "a < b inside the grid", got("/figures/interval")));
                }
                if hurst.is_some_and(|h| !h.is_deterministic()) {
                    errs.push(FieldError::config("hurst.kind", "deterministic kind for figures", got("/hurst/kind")));
                }
            }
        },
    }
}
