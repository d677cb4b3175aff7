//! Approximate sample paths from the jump representation
//! `X(t) = Σ_i y_i [(t−x_i)_+^{H(x_i)−1/α} − (−x_i)_+^{H(x_i)−1/α}]`,
//! a Riemann-sum oracle, and truncation-error estimates.
//!
//! Jumps are drawn from the Poisson measure with intensity
//! `dx ⊗ α|y|^{-α-1} dy` restricted to `(t0, t_end] × {|y| ≥ γ}` and scaled by
//! [`jump_amplitude`] so the driving motion has unit-scale increments,
//! `E exp(i s L(1)) = exp(−|s|^α)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hurst::{HurstFunction, PathContext};
use crate::kernel::{kernel_power_envelope, kernel_power_integral, pos_pow};
use crate::stable_random::{jump_amplitude, pareto_unchecked, sample_poisson, standard_sas, RngStream};

/// Default ceiling on the expected number of Poisson atoms.
pub const DEFAULT_ATOM_CAP: f64 = 1e8;

/// Below this many kernel evaluations a path is summed on one thread.
const PAR_THRESHOLD: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationWindow {
    pub t0: f64,
    pub t_end: f64,
    pub gamma: f64,
}

impl TruncationWindow {
    pub fn new(t0: f64, t_end: f64, gamma: f64) -> Result<Self> {
        let w = Self { t0, t_end, gamma };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t_end.is_finite() && self.t0 < self.t_end) {
            return Err(Error::param(
                "window",
                format!("need finite t0 < t_end, got ({}, {}]", self.t0, self.t_end),
            ));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::param("gamma", format!("must be positive, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Expected atom count `2 (t_end − t0) γ^{−α}`.
    pub fn rate(&self, alpha: f64) -> f64 {
        2.0 * (self.t_end - self.t0) * self.gamma.powf(-alpha)
    }

    /// Rejects windows whose expected atom count exceeds `cap`.
    pub fn check_cap(&self, alpha: f64, cap: f64) -> Result<f64> {
        let lambda = self.rate(alpha);
        if !(lambda <= cap) {
            return Err(Error::ResourceCap {
                what: "lambda",
                requested: lambda,
                cap,
                hint: "raise gamma or shrink the window".into(),
            });
        }
        Ok(lambda)
    }
}

/// Atoms of the truncated Poisson point process, sorted by time.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpSet {
    times: Vec<f64>,
    sizes: Vec<f64>,
    window: TruncationWindow,
    alpha: f64,
    amplitude: f64,
}

impl JumpSet {
    /// Explicit atoms, used as given (no amplitude normalisation).
    pub fn from_atoms(
        times: Vec<f64>,
        sizes: Vec<f64>,
        window: TruncationWindow,
        alpha: f64,
    ) -> Result<Self> {
        window.validate()?;
        if times.len() != sizes.len() {
            return Err(Error::Input("times and sizes differ in length".into()));
        }
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Input("jump times must be sorted".into()));
        }
        if times.iter().any(|&x| !(x > window.t0 && x <= window.t_end)) {
            return Err(Error::Input("jump times must lie in (t0, t_end]".into()));
        }
        if sizes.iter().any(|y| !(y.abs() >= window.gamma && y.is_finite())) {
            return Err(Error::Input("every jump size needs |y| ≥ gamma".into()));
        }
        Ok(Self {
            times,
            sizes,
            window,
            alpha,
            amplitude: 1.0,
        })
    }

    pub fn empty(window: TruncationWindow, alpha: f64) -> Self {
        Self {
            times: Vec::new(),
            sizes: Vec::new(),
            window,
            alpha,
            amplitude: jump_amplitude(alpha),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn window(&self) -> &TruncationWindow {
        &self.window
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Factor applied to every jump when a path is formed.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The same atoms with every size negated.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.sizes.iter_mut().for_each(|y| *y = -*y);
        out
    }
}

/// Draws the atoms of the truncated Poisson point process on the window.
pub fn sample_jumps(window: &TruncationWindow, alpha: f64, rng: &mut RngStream) -> Result<JumpSet> {
    sample_jumps_capped(window, alpha, rng, DEFAULT_ATOM_CAP)
}

pub fn sample_jumps_capped(
    window: &TruncationWindow,
    alpha: f64,
    rng: &mut RngStream,
    cap: f64,
) -> Result<JumpSet> {
    window.validate()?;
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::param("alpha", format!("must lie in (0, 2), got {alpha}")));
    }
    let lambda = window.check_cap(alpha, cap)?;
    let m = sample_poisson(lambda, rng)? as usize;
    // Sorted i.i.d. uniforms as normalised partial sums of m + 1 exponentials.
    let mut times = Vec::with_capacity(m);
    let mut acc = 0.0;
    for _ in 0..m {
        acc += rng.exp1();
        times.push(acc);
    }
    let total = acc + rng.exp1();
    let len = window.t_end - window.t0;
    for x in times.iter_mut() {
        *x = window.t0 + len * (*x / total);
    }
    let sizes = (0..m)
        .map(|_| {
            let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
            sign * pareto_unchecked(window.gamma, alpha, rng.uniform_pos())
        })
        .collect();
    Ok(JumpSet {
        times,
        sizes,
        window: *window,
        alpha,
        amplitude: jump_amplitude(alpha),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    /// `H` evaluated at the integration variable.
    ItoMsm,
    /// `H` evaluated at the observation time.
    ClassicalMsm,
    /// Constant `H`.
    Lfsm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Jumps,
    Riemann,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub stream_id: u64,
    pub generator: Generator,
    pub t0: f64,
    pub t_end: f64,
    /// Small-jump cutoff (jump generator) or cell width (Riemann generator).
    pub resolution: f64,
    pub hurst: HurstFunction,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub mode: PathMode,
    pub provenance: Provenance,
}

fn check_grid(grid: &[f64], t0: f64, t_end: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Input("empty evaluation grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Input("grid must be strictly increasing".into()));
    }
    if !(grid[0] > t0) {
        return Err(Error::Domain(format!(
            "grid point {} is not right of the window start t0 = {t0}",
            grid[0]
        )));
    }
    if grid[grid.len() - 1] > t_end {
        return Err(Error::Domain(format!(
            "grid point {} lies beyond the window end {t_end}",
            grid[grid.len() - 1]
        )));
    }
    Ok(())
}

fn check_mode(hurst: &HurstFunction, mode: PathMode) -> Result<()> {
    match mode {
        PathMode::Lfsm if hurst.constant_value().is_none() => Err(Error::param(
            "mode",
            "lfsm needs a constant Hurst function",
        )),
        PathMode::ClassicalMsm if !hurst.is_deterministic() => Err(Error::param(
            "mode",
            "classical_msm needs a deterministic Hurst function",
        )),
        _ => Ok(()),
    }
}

/// Evaluates the jump representation on `grid`. Cost is O(m·n).
pub fn path_from_jumps(
    jumps: &JumpSet,
    hurst: &HurstFunction,
    grid: &[f64],
    mode: PathMode,
) -> Result<SamplePath> {
    check_mode(hurst, mode)?;
    check_grid(grid, jumps.window.t0, jumps.window.t_end)?;
    let values = jump_values(jumps, hurst, grid, mode);
    Ok(SamplePath {
        grid: grid.to_vec(),
        values,
        mode,
        provenance: Provenance {
            seed: 0,
            stream_id: 0,
            generator: Generator::Jumps,
            t0: jumps.window.t0,
            t_end: jumps.window.t_end,
            resolution: jumps.window.gamma,
            hurst: hurst.clone(),
            alpha: jumps.alpha,
        },
    })
}

fn jump_values(jumps: &JumpSet, hurst: &HurstFunction, grid: &[f64], mode: PathMode) -> Vec<f64> {
    let inv = 1.0 / jumps.alpha;
    let (xs, ys) = (&jumps.times[..], &jumps.sizes[..]);
    let work = xs.len() * grid.len();
    match mode {
        PathMode::ClassicalMsm => {
            let eval = |&t: &f64| {
                let e = hurst.at(t) - inv;
                let end = xs.partition_point(|&x| x < t.max(0.0));
                let mut s = 0.0;
                for i in 0..end {
                    s += ys[i] * (pos_pow(t - xs[i], e) - pos_pow(-xs[i], e));
                }
                jumps.amplitude * s
            };
            map_grid(grid, work, eval)
        }
        PathMode::ItoMsm | PathMode::Lfsm => {
            // Per-atom exponents in time order, so adapted kinds see only
            // the jumps strictly before each atom.
            let mut exps = Vec::with_capacity(xs.len());
            let mut sum = 0.0;
            for (&x, &y) in xs.iter().zip(ys) {
                let h = hurst.eval(x, &PathContext::new(jumps.amplitude * sum));
                exps.push(h - inv);
                sum += y;
            }
            let anchors: Vec<f64> = xs.iter().zip(&exps).map(|(&x, &e)| pos_pow(-x, e)).collect();
            let eval = |&t: &f64| {
                let end = xs.partition_point(|&x| x < t.max(0.0));
                let mut s = 0.0;
                for i in 0..end {
                    s += ys[i] * (pos_pow(t - xs[i], exps[i]) - anchors[i]);
                }
                jumps.amplitude * s
            };
            map_grid(grid, work, eval)
        }
    }
}

fn map_grid<F: Fn(&f64) -> f64 + Sync + Send>(grid: &[f64], work: usize, f: F) -> Vec<f64> {
    if work < PAR_THRESHOLD {
        grid.iter().map(f).collect()
    } else {
        grid.par_iter().map(f).collect()
    }
}

/// Draws a window's jumps from `(seed, stream_id)` and evaluates the path.
pub fn simulate_path(
    window: &TruncationWindow,
    hurst: &HurstFunction,
    alpha: f64,
    grid: &[f64],
    mode: PathMode,
    seed: u64,
    stream_id: u64,
) -> Result<SamplePath> {
    check_mode(hurst, mode)?;
    check_grid(grid, window.t0, window.t_end)?;
    let mut rng = RngStream::new(seed, stream_id);
    let jumps = sample_jumps(window, alpha, &mut rng)?;
    let mut path = path_from_jumps(&jumps, hurst, grid, mode)?;
    path.provenance.seed = seed;
    path.provenance.stream_id = stream_id;
    Ok(path)
}

/// Paths for stream ids `first_stream .. first_stream + n`, in parallel.
#[allow(clippy::too_many_arguments)]
pub fn simulate_ensemble(
    window: &TruncationWindow,
    hurst: &HurstFunction,
    alpha: f64,
    grid: &[f64],
    mode: PathMode,
    seed: u64,
    first_stream: u64,
    n: usize,
) -> Result<Vec<SamplePath>> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| simulate_path(window, hurst, alpha, grid, mode, seed, first_stream + i))
        .collect()
}

/// `Σ_k F_t(x_k) ΔL_k` over cells `[x_k, x_k + step)` from `window_t0`,
/// with i.i.d. SαS increments of scale `step^{1/α}` and the kernel taken at
/// the left end of each cell.
pub fn riemann_oracle(
    grid: &[f64],
    hurst: &HurstFunction,
    alpha: f64,
    window_t0: f64,
    step: f64,
    rng: &mut RngStream,
) -> Result<SamplePath> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::param("alpha", format!("must lie in (0, 2], got {alpha}")));
    }
    if !hurst.is_deterministic() {
        return Err(Error::Unsupported(
            "the Riemann oracle needs a deterministic Hurst function".into(),
        ));
    }
    if !(hurst.h_lo() > 1.0 / alpha) {
        return Err(Error::Domain(
            "the Riemann oracle samples the kernel at cell ends and needs h_lo > 1/α".into(),
        ));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::param("step", format!("must be positive, got {step}")));
    }
    let t_end = grid.last().copied().unwrap_or(window_t0);
    check_grid(grid, window_t0, t_end)?;
    let cells = ((t_end.max(0.0) - window_t0) / step).ceil();
    if cells < 1e3 {
        return Err(Error::param(
            "step",
            format!("only {cells} cells cover the window; at least 1000 are needed"),
        ));
    }
    let work = cells * grid.len() as f64;
    if work > 1e10 || cells > DEFAULT_ATOM_CAP {
        return Err(Error::ResourceCap {
            what: "riemann_cells",
            requested: cells,
            cap: DEFAULT_ATOM_CAP,
            hint: "increase the step or shrink the window".into(),
        });
    }
    let cells = cells as usize;
    let inv = 1.0 / alpha;
    let scale = step.powf(inv);
    let xs: Vec<f64> = (0..cells).map(|k| window_t0 + k as f64 * step).collect();
    let dl: Vec<f64> = (0..cells).map(|_| scale * standard_sas(alpha, rng)).collect();
    let exps: Vec<f64> = xs.iter().map(|&x| hurst.at(x) - inv).collect();
    let anchors: Vec<f64> = xs.iter().zip(&exps).map(|(&x, &e)| pos_pow(-x, e)).collect();
    let eval = |&t: &f64| {
        let end = xs.partition_point(|&x| x < t.max(0.0));
        let mut s = 0.0;
        for k in 0..end {
            s += dl[k] * (pos_pow(t - xs[k], exps[k]) - anchors[k]);
        }
        s
    };
    let values = map_grid(grid, cells * grid.len(), eval);
    let mode = if hurst.constant_value().is_some() {
        PathMode::Lfsm
    } else {
        PathMode::ItoMsm
    };
    Ok(SamplePath {
        grid: grid.to_vec(),
        values,
        mode,
        provenance: Provenance {
            seed: rng.seed(),
            stream_id: rng.stream_id(),
            generator: Generator::Riemann,
            t0: window_t0,
            t_end,
            resolution: step,
            hurst: hurst.clone(),
            alpha,
        },
    })
}

/// `∫_{−γ}^{γ} y² α|y|^{−α−1} dy = 2αγ^{2−α}/(2−α)`.
pub fn small_jump_second_moment(alpha: f64, gamma: f64) -> f64 {
    2.0 * alpha * gamma.powf(2.0 - alpha) / (2.0 - alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationBound {
    /// Second moment of the dropped small-jump integral over `(t0, t]`,
    /// in the units of the unit-scale driving motion.
    pub small_jump_l2: f64,
    /// `∫_{−∞}^{t0} |F_t(x)|^α dx`; the `Λ^α` quasi-norm of the dropped
    /// far past up to a constant depending on α only.
    pub far_past_lambda_alpha: f64,
}

/// Itô-isometry estimate of the error from dropping jumps below γ, and the
/// size of the omitted far past, at time `grid_max_t > 0`.
///
/// Non-constant Hurst functions use the pointwise envelope over constant
/// levels in `[h_lo, h_hi]`, so the result bounds the error for any path.
pub fn truncation_error_bound(
    window: &TruncationWindow,
    grid_max_t: f64,
    hurst: &HurstFunction,
    alpha: f64,
) -> Result<TruncationBound> {
    window.validate()?;
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::param("alpha", format!("must lie in (0, 2), got {alpha}")));
    }
    if !(grid_max_t > 0.0 && grid_max_t > window.t0) {
        return Err(Error::param(
            "grid_max_t",
            format!("must be positive and right of t0, got {grid_max_t}"),
        ));
    }
    let t = grid_max_t;
    let integral = if hurst.constant_value().is_some() {
        kernel_power_integral
    } else {
        kernel_power_envelope
    };
    let l2 = integral(t, hurst, alpha, 2.0, window.t0, t)?;
    let far = if window.t0 < t {
        integral(t, hurst, alpha, alpha, f64::NEG_INFINITY, window.t0)?
    } else {
        0.0
    };
    let amp = jump_amplitude(alpha);
    Ok(TruncationBound {
        small_jump_l2: amp * amp * small_jump_second_moment(alpha, window.gamma) * l2,
        far_past_lambda_alpha: far,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutoWindow {
    pub window: TruncationWindow,
    /// Whether the small-jump target was reachable within the atom budget.
    pub target_met: bool,
    pub bound: TruncationBound,
    /// Marginal scale `(∫|F_t|^α)^{1/α}` at the last grid time, with `H`
    /// frozen at its value there.
    pub path_scale: f64,
}

/// Default truncation: `t0 = min(grid) − 10·span` and the γ for which
/// `small_jump_l2 ≤ 10⁻⁴·scale²`, raised if needed so that the expected
/// atom count stays within `atom_budget`.
pub fn auto_window(
    grid: &[f64],
    hurst: &HurstFunction,
    alpha: f64,
    atom_budget: f64,
) -> Result<AutoWindow> {
    let (lo, hi) = match (grid.first(), grid.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::Input("empty evaluation grid".into())),
    };
    let span = if hi > lo { hi - lo } else { 1.0 };
    let t0 = lo - 10.0 * span;
    let t = hi.max(1e-12);
    let probe = TruncationWindow::new(t0, hi, 1.0)?;
    let unit = truncation_error_bound(&probe, t, hurst, alpha)?;
    // Scale of an lfsm frozen at the local level H(t).
    let level = if hurst.is_deterministic() {
        hurst.at(t)
    } else {
        hurst.h_hi()
    };
    let frozen = HurstFunction::constant(level)?;
    let scale_alpha = kernel_power_integral(t, &frozen, alpha, alpha, f64::NEG_INFINITY, t)?;
    let path_scale = scale_alpha.powf(1.0 / alpha);
    // small_jump_l2 is proportional to γ^{2−α}; unit holds its value at γ = 1.
    let target = 1e-4 * path_scale * path_scale;
    let mut gamma = (target / unit.small_jump_l2).powf(1.0 / (2.0 - alpha));
    let gamma_budget = (2.0 * (hi - t0) / atom_budget).powf(1.0 / alpha);
    let target_met = gamma >= gamma_budget;
    if !target_met {
        gamma = gamma_budget;
    }
    let window = TruncationWindow::new(t0, hi, gamma)?;
    let bound = truncation_error_bound(&window, t, hurst, alpha)?;
    Ok(AutoWindow {
        window,
        target_met,
        bound,
        path_scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lfsm(h: f64) -> HurstFunction {
        HurstFunction::constant(h).unwrap()
    }

    #[test]
    fn rate_matches_formula() {
        let w = TruncationWindow::new(-10.0, 1.0, 0.1).unwrap();
        assert!((w.rate(1.5) - 695.701_085_237_6).abs() < 1e-6);
    }

    #[test]
    fn huge_gamma_gives_empty_set() {
        let w = TruncationWindow::new(-1.0, 1.0, 1e12).unwrap();
        let mut rng = RngStream::new(1, 0);
        for _ in 0..100 {
            assert!(sample_jumps(&w, 1.5, &mut rng).unwrap().is_empty());
        }
    }

    #[test]
    fn resource_cap() {
        let w = TruncationWindow::new(-1000.0, 1.0, 0.001).unwrap();
        let mut rng = RngStream::new(1, 0);
        match sample_jumps(&w, 1.9, &mut rng) {
            Err(Error::ResourceCap { what, requested, .. }) => {
                assert_eq!(what, "lambda");
                assert!(requested > 1e8);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn jumps_are_sorted_and_in_window() {
        let w = TruncationWindow::new(-3.0, 2.0, 0.05).unwrap();
        let mut rng = RngStream::new(9, 2);
        let j = sample_jumps(&w, 1.3, &mut rng).unwrap();
        assert!(j.len() > 100);
        assert!(j.times().windows(2).all(|p| p[0] <= p[1]));
        assert!(j.times().iter().all(|&x| x > -3.0 && x <= 2.0));
        assert!(j.sizes().iter().all(|y| y.abs() >= 0.05));
    }

    #[test]
    fn jump_count_mean() {
        let w = TruncationWindow::new(-10.0, 1.0, 0.1).unwrap();
        let lambda = w.rate(1.5);
        let n = 10_000;
        let total: usize = (0..n)
            .map(|i| sample_jumps(&w, 1.5, &mut RngStream::new(4, i)).unwrap().len())
            .sum();
        let mean = total as f64 / n as f64;
        assert!((mean - lambda).abs() < 3.0 * (lambda / n as f64).sqrt());
    }

    #[test]
    fn empty_set_gives_zero_path() {
        let w = TruncationWindow::new(-5.0, 1.0, 0.1).unwrap();
        let j = JumpSet::empty(w, 1.5);
        let grid = [-1.0, 0.0, 0.5, 1.0];
        for mode in [PathMode::ItoMsm, PathMode::ClassicalMsm, PathMode::Lfsm] {
            let p = path_from_jumps(&j, &lfsm(0.8), &grid, mode).unwrap();
            assert!(p.values.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn single_atom() {
        let w = TruncationWindow::new(-1.0, 1.0, 0.1).unwrap();
        let j = JumpSet::from_atoms(vec![0.5], vec![2.0], w, 2.0).unwrap();
        let p = path_from_jumps(&j, &lfsm(0.75), &[1.0], PathMode::ItoMsm).unwrap();
        assert!((p.values[0] - 2.0 * 0.5f64.powf(0.25)).abs() < 1e-15);
        assert!((p.values[0] - 1.681_793).abs() < 1e-6);
    }

    #[test]
    fn zero_at_origin_in_every_mode() {
        let w = TruncationWindow::new(-4.0, 1.0, 0.05).unwrap();
        let j = sample_jumps(&w, 1.5, &mut RngStream::new(3, 3)).unwrap();
        let grid = [-0.5, 0.0, 0.5];
        let sine = HurstFunction::sine(0.7, 0.9, 1.0, 0.0).unwrap();
        let adapted = HurstFunction::adapted(0.7, 0.9, 0.0, 1.0).unwrap();
        for (h, mode) in [
            (&sine, PathMode::ItoMsm),
            (&sine, PathMode::ClassicalMsm),
            (&adapted, PathMode::ItoMsm),
            (&lfsm(0.8), PathMode::Lfsm),
        ] {
            let p = path_from_jumps(&j, h, &grid, mode).unwrap();
            assert_eq!(p.values[1], 0.0, "{mode:?}");
            assert!(p.values[0] != 0.0 && p.values[2] != 0.0);
        }
    }

    #[test]
    fn constant_h_modes_agree_bitwise() {
        let w = TruncationWindow::new(-4.0, 1.0, 0.02).unwrap();
        let j = sample_jumps(&w, 1.7, &mut RngStream::new(8, 0)).unwrap();
        let grid: Vec<f64> = (1..=64).map(|i| i as f64 / 64.0 - 0.3).collect();
        let h = lfsm(0.8);
        let x = path_from_jumps(&j, &h, &grid, PathMode::ItoMsm).unwrap();
        let y = path_from_jumps(&j, &h, &grid, PathMode::ClassicalMsm).unwrap();
        let l = path_from_jumps(&j, &h, &grid, PathMode::Lfsm).unwrap();
        assert_eq!(x.values, y.values);
        assert_eq!(x.values, l.values);
    }

    #[test]
    fn negating_jumps_negates_path() {
        let w = TruncationWindow::new(-4.0, 1.0, 0.05).unwrap();
        let j = sample_jumps(&w, 1.5, &mut RngStream::new(5, 1)).unwrap();
        let grid = [0.25, 0.5, 1.0];
        let h = HurstFunction::sine(0.7, 0.9, 1.0, 0.0).unwrap();
        let a = path_from_jumps(&j, &h, &grid, PathMode::ItoMsm).unwrap();
        let b = path_from_jumps(&j.negated(), &h, &grid, PathMode::ItoMsm).unwrap();
        for (u, v) in a.values.iter().zip(&b.values) {
            assert_eq!(*u, -*v);
        }
    }

    #[test]
    fn grid_outside_window_rejected() {
        let w = TruncationWindow::new(-1.0, 1.0, 0.1).unwrap();
        let j = JumpSet::empty(w, 1.5);
        let e = path_from_jumps(&j, &lfsm(0.8), &[-1.0, 0.5], PathMode::Lfsm);
        assert!(matches!(e, Err(Error::Domain(_))));
        let e = path_from_jumps(&j, &HurstFunction::sine(0.7, 0.9, 1.0, 0.0).unwrap(), &[0.5], PathMode::Lfsm);
        assert!(e.is_err());
    }

    #[test]
    fn gaussian_oracle_variance() {
        // α = 2: X(1) is centred normal with variance 2∫F_1².
        let h = lfsm(0.75);
        let (t0, step) = (-20.0, 2e-3);
        let n = 10_000;
        let samples: Vec<f64> = (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = RngStream::new(21, i);
                riemann_oracle(&[1.0], &h, 2.0, t0, step, &mut rng).unwrap().values[0]
            })
            .collect();
        let var = samples.iter().map(|v| v * v).sum::<f64>() / n as f64;
        // Square-integral of F_1 over the simulated window, e = 1/4.
        let e: f64 = 0.25;
        let f = |x: f64| {
            let v = pos_pow(1.0 - x, e) - pos_pow(-x, e);
            v * v
        };
        let mut exact = 0.0;
        let mut a = t0;
        while a < 1.0 {
            let b = (a + 0.5).min(1.0);
            exact += crate::quad::integrate(&f, a, b, 1e-10, 0.0).unwrap().value;
            a = b;
        }
        let target = 2.0 * exact;
        assert!((var / target - 1.0).abs() < 0.05, "{var} vs {target}");
    }

    #[test]
    fn oracle_zero_at_origin() {
        let mut rng = RngStream::new(1, 1);
        let p = riemann_oracle(&[-0.5, 0.0, 1.0], &lfsm(0.8), 1.5, -5.0, 1e-3, &mut rng).unwrap();
        assert_eq!(p.values[1], 0.0);
    }

    #[test]
    fn small_jump_moment() {
        assert!((small_jump_second_moment(1.5, 0.1) - 1.897_366_596).abs() < 1e-8);
    }

    #[test]
    fn small_jump_bound_slope() {
        let h = lfsm(0.8);
        let xs: Vec<f64> = (0..5).map(|k| (1e-2 * 0.5f64.powi(k)).ln()).collect();
        let ys: Vec<f64> = (0..5)
            .map(|k| {
                let w = TruncationWindow::new(-10.0, 1.0, 1e-2 * 0.5f64.powi(k)).unwrap();
                truncation_error_bound(&w, 1.0, &h, 1.5).unwrap().small_jump_l2.ln()
            })
            .collect();
        let fit = crate::stats::ols(&xs, &ys).unwrap();
        assert!((fit.slope - 0.5).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn far_past_shrinks() {
        let h = lfsm(0.8);
        let vals: Vec<f64> = [-10.0, -100.0, -1000.0]
            .iter()
            .map(|&t0| {
                let w = TruncationWindow::new(t0, 1.0, 0.1).unwrap();
                truncation_error_bound(&w, 1.0, &h, 1.5).unwrap().far_past_lambda_alpha
            })
            .collect();
        assert!(vals[0] > vals[1] && vals[1] > vals[2] && vals[2] > 0.0, "{vals:?}");
    }

    #[test]
    fn auto_window_respects_budget() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let a = auto_window(&grid, &lfsm(0.8), 1.5, 1e6).unwrap();
        assert_eq!(a.window.t0, -10.0);
        assert!(a.window.rate(1.5) <= 1e6 * (1.0 + 1e-9));
        assert!(a.path_scale > 0.0);
    }
}
