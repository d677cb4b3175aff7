//! Hurst functions `H(·)`: deterministic smooth, deterministic rough and
//! path-adapted, always clamped into a declared range `[h_lo, h_hi]`.
//!
//! The JSON descriptor is
//! `{"kind": ..., "params": {...}, "h_lo": ..., "h_hi": ..., "modulus_hint": ...}`
//! and every kind's `params` object rejects unknown fields.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// What the simulator knows about the driving noise strictly before `x`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PathContext {
    /// Value of the truncated big-jump process just before the evaluation point.
    pub accumulated_jump_sum: f64,
}

impl PathContext {
    pub fn new(accumulated_jump_sum: f64) -> Self {
        Self {
            accumulated_jump_sum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothShape {
    Sine,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HurstKind {
    /// `H ≡ h_lo = h_hi`.
    Constant,
    /// `mid + amplitude·half·sin(2π·frequency·x + phase)`.
    Smooth {
        shape: SmoothShape,
        frequency: f64,
        phase: f64,
        amplitude: f64,
    },
    /// `mid + amplitude·half·W(x)/Σa^k` with `W(x) = Σ_{k=0}^{K} a^k cos(b^k ω x + phase)`.
    RoughWeierstrass {
        a: f64,
        b: f64,
        terms: u32,
        omega: f64,
        amplitude: f64,
        phase: f64,
    },
    /// Linear interpolation between knots, flat outside them.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// `mid + half·tanh((s − center)/scale)` with `s` the jump sum before `x`.
    AdaptedToPath { center: f64, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusHint {
    Holder { exponent: f64 },
    LogInverse,
    None,
}

/// A modulus of continuity `w` for [`HurstFunction::verify_modulus`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modulus {
    /// `w(r) = c·r^ρ`
    Holder { rho: f64, c: f64 },
    /// `w(r) = c / |ln r|`
    LogInverse { c: f64 },
}

impl Modulus {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Modulus::Holder { rho, c } => c * r.powf(rho),
            Modulus::LogInverse { c } => {
                let l = r.ln().abs();
                if l == 0.0 {
                    f64::INFINITY
                } else {
                    c / l
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusCheck {
    pub holds: bool,
    pub worst_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HurstDescriptor", into = "HurstDescriptor")]
pub struct HurstFunction {
    kind: HurstKind,
    h_lo: f64,
    h_hi: f64,
    modulus_hint: Option<ModulusHint>,
}

impl HurstFunction {
    pub fn new(kind: HurstKind, h_lo: f64, h_hi: f64) -> Result<Self> {
        let h = Self {
            kind,
            h_lo,
            h_hi,
            modulus_hint: None,
        };
        let errs = h.problems();
        match errs.into_iter().next() {
            Some((name, reason)) => Err(Error::param(name, reason)),
            None => Ok(h),
        }
    }

    pub fn constant(h: f64) -> Result<Self> {
        Self::new(HurstKind::Constant, h, h)
    }

    pub fn sine(h_lo: f64, h_hi: f64, frequency: f64, phase: f64) -> Result<Self> {
        Self::new(
            HurstKind::Smooth {
                shape: SmoothShape::Sine,
                frequency,
                phase,
                amplitude: 1.0,
            },
            h_lo,
            h_hi,
        )
    }

    /// Weierstrass-type function whose Hölder exponent is `ln(1/a)/ln b`.
    pub fn weierstrass(h_lo: f64, h_hi: f64, a: f64, b: f64, terms: u32) -> Result<Self> {
        Self::new(
            HurstKind::RoughWeierstrass {
                a,
                b,
                terms,
                omega: 2.0 * PI,
                amplitude: 1.0,
                phase: 0.0,
            },
            h_lo,
            h_hi,
        )
    }

    pub fn piecewise_linear(h_lo: f64, h_hi: f64, knots: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(HurstKind::PiecewiseLinear { knots }, h_lo, h_hi)
    }

    pub fn adapted(h_lo: f64, h_hi: f64, center: f64, scale: f64) -> Result<Self> {
        Self::new(HurstKind::AdaptedToPath { center, scale }, h_lo, h_hi)
    }

    pub fn with_modulus_hint(mut self, hint: ModulusHint) -> Self {
        self.modulus_hint = Some(hint);
        self
    }

    pub fn kind(&self) -> &HurstKind {
        &self.kind
    }

    pub fn h_lo(&self) -> f64 {
        self.h_lo
    }

    pub fn h_hi(&self) -> f64 {
        self.h_hi
    }

    pub fn modulus_hint(&self) -> Option<ModulusHint> {
        self.modulus_hint
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            HurstKind::Constant => "constant",
            HurstKind::Smooth { .. } => "smooth_catalog",
            HurstKind::RoughWeierstrass { .. } => "rough_weierstrass",
            HurstKind::PiecewiseLinear { .. } => "piecewise_linear",
            HurstKind::AdaptedToPath { .. } => "adapted_to_path",
        }
    }

    pub fn is_deterministic(&self) -> bool {
        !matches!(self.kind, HurstKind::AdaptedToPath { .. })
    }

    /// The constant value, if this is the constant kind.
    pub fn constant_value(&self) -> Option<f64> {
        match self.kind {
            HurstKind::Constant => Some(self.h_lo),
            _ => None,
        }
    }

    fn mid_half(&self) -> (f64, f64) {
        (0.5 * (self.h_lo + self.h_hi), 0.5 * (self.h_hi - self.h_lo))
    }

    /// `H(x)` given the path information available before `x`.
    pub fn eval(&self, x: f64, ctx: &PathContext) -> f64 {
        let (mid, half) = self.mid_half();
        let raw = match &self.kind {
            HurstKind::Constant => return self.h_lo,
            HurstKind::Smooth {
                shape: SmoothShape::Sine,
                frequency,
                phase,
                amplitude,
            } => mid + amplitude * half * (2.0 * PI * frequency * x + phase).sin(),
            HurstKind::RoughWeierstrass {
                a,
                b,
                terms,
                omega,
                amplitude,
                phase,
            } => {
                let (mut w, mut norm) = (0.0, 0.0);
                let (mut ak, mut bk) = (1.0, 1.0);
                for _ in 0..=*terms {
                    w += ak * (bk * omega * x + phase).cos();
                    norm += ak;
                    ak *= a;
                    bk *= b;
                }
                mid + amplitude * half * w / norm
            }
            HurstKind::PiecewiseLinear { knots } => interpolate(knots, x),
            HurstKind::AdaptedToPath { center, scale } => {
                mid + half * ((ctx.accumulated_jump_sum - center) / scale).tanh()
            }
        };
        raw.clamp(self.h_lo, self.h_hi)
    }

    /// Evaluation for deterministic kinds (the context is ignored by them).
    pub fn at(&self, x: f64) -> f64 {
        self.eval(x, &PathContext::default())
    }

    /// Minimum of `H` over `[a, b]`, by a dense scan that includes the knots.
    ///
    /// Adapted kinds return `h_lo`, the only almost-sure lower bound.
    pub fn min_over(&self, a: f64, b: f64) -> f64 {
        match self.kind {
            HurstKind::AdaptedToPath { .. } => self.h_lo,
            _ => self.scan(a, b, f64::min),
        }
    }

    pub fn max_over(&self, a: f64, b: f64) -> f64 {
        match self.kind {
            HurstKind::AdaptedToPath { .. } => self.h_hi,
            _ => self.scan(a, b, f64::max),
        }
    }

    fn scan(&self, a: f64, b: f64, pick: fn(f64, f64) -> f64) -> f64 {
        if let HurstKind::Constant = self.kind {
            return self.h_lo;
        }
        let n = 1 << 16;
        let mut m = pick(self.at(a), self.at(b));
        for i in 1..n {
            m = pick(m, self.at(a + (b - a) * i as f64 / n as f64));
        }
        if let HurstKind::PiecewiseLinear { knots } = &self.kind {
            for &(x, _) in knots.iter().filter(|k| k.0 > a && k.0 < b) {
                m = pick(m, self.at(x));
            }
        }
        m
    }

    /// Checks `|H(t) − H(s)| ≤ w(|t − s|)` on all pairs of grid points of
    /// `[window.0, window.1]` with spacing `grid_step` and `|t − s| ≤ 1`.
    pub fn verify_modulus(
        &self,
        w: Modulus,
        grid_step: f64,
        window: (f64, f64),
    ) -> Result<ModulusCheck> {
        if !self.is_deterministic() {
            return Err(Error::Unsupported(
                "modulus of a path-adapted Hurst function cannot be checked on a grid".into(),
            ));
        }
        if !(grid_step > 0.0 && grid_step.is_finite()) {
            return Err(Error::param("grid_step", format!("must be positive, got {grid_step}")));
        }
        let (a, b) = window;
        if !(a < b) {
            return Err(Error::param("window", format!("empty interval [{a}, {b}]")));
        }
        let n = ((b - a) / grid_step).floor() as usize + 1;
        let values: Vec<f64> = (0..n).map(|i| self.at(a + i as f64 * grid_step)).collect();
        let max_lag = ((1.0 / grid_step).floor() as usize).min(n - 1);
        let mut worst = 0.0f64;
        for lag in 1..=max_lag {
            let bound = w.eval(lag as f64 * grid_step);
            let diff = values
                .iter()
                .zip(&values[lag..])
                .map(|(s, t)| (t - s).abs())
                .fold(0.0, f64::max);
            if diff > 0.0 {
                worst = worst.max(diff / bound);
            }
        }
        Ok(ModulusCheck {
            // Grid arithmetic may overshoot an exact bound by a few ulps.
            holds: worst <= 1.0 + 1e-9,
            worst_ratio: worst,
        })
    }

    fn problems(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let (lo, hi) = (self.h_lo, self.h_hi);
        if !(lo > 0.0 && lo < 1.0) {
            out.push(("h_lo", format!("must lie in (0, 1), got {lo}")));
        }
        if !(hi > 0.0 && hi < 1.0) {
            out.push(("h_hi", format!("must lie in (0, 1), got {hi}")));
        }
        if lo > hi {
            out.push(("h_lo", format!("h_lo ≤ h_hi violated ({lo} > {hi})")));
        }
        let finite = |name: &'static str, v: f64, out: &mut Vec<_>| {
            if !v.is_finite() {
                out.push((name, format!("must be finite, got {v}")));
            }
        };
        match &self.kind {
            HurstKind::Constant => {
                if lo != hi {
                    out.push(("h_hi", format!("constant kind needs h_lo = h_hi, got {lo} and {hi}")));
                }
            }
            HurstKind::Smooth {
                frequency,
                phase,
                amplitude,
                ..
            } => {
                finite("params.frequency", *frequency, &mut out);
                finite("params.phase", *phase, &mut out);
                if !(0.0..=1.0).contains(amplitude) {
                    out.push(("params.amplitude", format!("must lie in [0, 1], got {amplitude}")));
                }
            }
            HurstKind::RoughWeierstrass {
                a,
                b,
                terms,
                omega,
                amplitude,
                phase,
            } => {
                if !(*a > 0.0 && *a < 1.0) {
                    out.push(("params.a", format!("must lie in (0, 1), got {a}")));
                }
                if !(*b > 1.0 && b.is_finite()) {
                    out.push(("params.b", format!("must exceed 1, got {b}")));
                }
                if *terms > 64 {
                    out.push(("params.terms", format!("at most 64 terms, got {terms}")));
                }
                finite("params.omega", *omega, &mut out);
                finite("params.phase", *phase, &mut out);
                if !(0.0..=1.0).contains(amplitude) {
                    out.push(("params.amplitude", format!("must lie in [0, 1], got {amplitude}")));
                }
            }
            HurstKind::PiecewiseLinear { knots } => {
                if knots.is_empty() {
                    out.push(("params.knots", "at least one knot required".into()));
                }
                if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                    out.push(("params.knots", "knots must be finite".into()));
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    out.push(("params.knots", "knot abscissae must be strictly increasing".into()));
                }
            }
            HurstKind::AdaptedToPath { center, scale } => {
                finite("params.center", *center, &mut out);
                if !(*scale > 0.0 && scale.is_finite()) {
                    out.push(("params.scale", format!("must be positive, got {scale}")));
                }
            }
        }
        out
    }

    /// All validation problems as `(field, message)` pairs; empty when valid.
    pub fn validation_problems(&self) -> Vec<(&'static str, String)> {
        self.problems()
    }
}

fn interpolate(knots: &[(f64, f64)], x: f64) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let i = knots.partition_point(|k| k.0 <= x);
    let (x0, y0) = knots[i - 1];
    let (x1, y1) = knots[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Serialized form of a [`HurstFunction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HurstDescriptor {
    pub kind: String,
    #[serde(default)]
    pub params: Value,
    pub h_lo: f64,
    pub h_hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus_hint: Option<ModulusHint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SmoothParams {
    #[serde(default = "sine")]
    shape: SmoothShape,
    frequency: f64,
    #[serde(default)]
    phase: f64,
    #[serde(default = "one")]
    amplitude: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeierstrassParams {
    a: f64,
    b: f64,
    terms: u32,
    #[serde(default = "two_pi")]
    omega: f64,
    #[serde(default = "one")]
    amplitude: f64,
    #[serde(default)]
    phase: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PiecewiseParams {
    knots: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AdaptedParams {
    #[serde(default)]
    center: f64,
    scale: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

fn sine() -> SmoothShape {
    SmoothShape::Sine
}
fn one() -> f64 {
    1.0
}
fn two_pi() -> f64 {
    2.0 * PI
}

fn params<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
    let v = if v.is_null() {
        Value::Object(Default::default())
    } else {
        v
    };
    serde_json::from_value(v).map_err(|e| Error::param("params", e.to_string()))
}

impl HurstDescriptor {
    /// Builds the Hurst function, reporting every problem as `(field, message)`.
    pub fn resolve(&self) -> std::result::Result<HurstFunction, Vec<(&'static str, String)>> {
        let p = self.params.clone();
        let kind = match self.kind.as_str() {
            "constant" => params::<NoParams>(p).map(|NoParams {}| HurstKind::Constant),
            "smooth_catalog" => params::<SmoothParams>(p).map(|p| HurstKind::Smooth {
                shape: p.shape,
                frequency: p.frequency,
                phase: p.phase,
                amplitude: p.amplitude,
            }),
            "rough_weierstrass" => params::<WeierstrassParams>(p).map(|p| HurstKind::RoughWeierstrass {
                a: p.a,
                b: p.b,
                terms: p.terms,
                omega: p.omega,
                amplitude: p.amplitude,
                phase: p.phase,
            }),
            "piecewise_linear" => {
                params::<PiecewiseParams>(p).map(|p| HurstKind::PiecewiseLinear { knots: p.knots })
            }
            "adapted_to_path" => params::<AdaptedParams>(p).map(|p| HurstKind::AdaptedToPath {
                center: p.center,
                scale: p.scale,
            }),
            other => Err(Error::param("kind", format!("unknown Hurst kind `{other}`"))),
        };
        let kind = kind.map_err(|e| match e {
            Error::Parameter { name, reason } => vec![(name, reason)],
            other => vec![("params", other.to_string())],
        })?;
        let h = HurstFunction {
            kind,
            h_lo: self.h_lo,
            h_hi: self.h_hi,
            modulus_hint: self.modulus_hint,
        };
        let problems = h.problems();
        if problems.is_empty() {
            Ok(h)
        } else {
            Err(problems)
        }
    }
}

impl TryFrom<HurstDescriptor> for HurstFunction {
    type Error = Error;

    fn try_from(d: HurstDescriptor) -> Result<Self> {
        d.resolve().map_err(|mut problems| {
            let (name, reason) = problems.remove(0);
            Error::param(name, reason)
        })
    }
}

impl From<HurstFunction> for HurstDescriptor {
    fn from(h: HurstFunction) -> Self {
        let kind = h.kind_name().to_string();
        let params = match h.kind {
            HurstKind::Constant => serde_json::json!({}),
            HurstKind::Smooth {
                shape,
                frequency,
                phase,
                amplitude,
            } => serde_json::json!({
                "shape": shape, "frequency": frequency, "phase": phase, "amplitude": amplitude
            }),
            HurstKind::RoughWeierstrass {
                a,
                b,
                terms,
                omega,
                amplitude,
                phase,
            } => serde_json::json!({
                "a": a, "b": b, "terms": terms, "omega": omega,
                "amplitude": amplitude, "phase": phase
            }),
            HurstKind::PiecewiseLinear { knots } => serde_json::json!({ "knots": knots }),
            HurstKind::AdaptedToPath { center, scale } => {
                serde_json::json!({ "center": center, "scale": scale })
            }
        };
        HurstDescriptor {
            kind,
            params,
            h_lo: h.h_lo,
            h_hi: h.h_hi,
            modulus_hint: h.modulus_hint,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_everywhere() {
        let h = HurstFunction::constant(0.8).unwrap();
        for x in [-100.0, -1.0, 0.0, 0.3, 7.0] {
            assert_eq!(h.at(x), 0.8);
            assert_eq!(h.eval(x, &PathContext::new(123.0)), 0.8);
        }
    }

    #[test]
    fn zero_amplitude_weierstrass_is_midpoint() {
        let h = HurstFunction::new(
            HurstKind::RoughWeierstrass {
                a: 0.7,
                b: 2.0,
                terms: 12,
                omega: 2.0 * PI,
                amplitude: 0.0,
                phase: 0.3,
            },
            0.6,
            0.9,
        )
        .unwrap();
        for i in 0..50 {
            assert!((h.at(i as f64 * 0.037 - 1.0) - 0.75).abs() < 1e-15);
        }
    }

    #[test]
    fn piecewise_interpolation() {
        let h = HurstFunction::piecewise_linear(0.7, 0.9, vec![(0.0, 0.7), (1.0, 0.9)]).unwrap();
        assert!((h.at(0.5) - 0.8).abs() < 1e-15);
        assert_eq!(h.at(-3.0), 0.7);
        assert_eq!(h.at(4.0), 0.9);
    }

    #[test]
    fn clamping_into_range() {
        let h = HurstFunction::piecewise_linear(0.7, 0.8, vec![(0.0, 0.5), (1.0, 0.95)]).unwrap();
        assert_eq!(h.at(0.0), 0.7);
        assert_eq!(h.at(1.0), 0.8);
    }

    #[test]
    fn adapted_depends_on_context_only() {
        let h = HurstFunction::adapted(0.6, 0.9, 0.0, 1.0).unwrap();
        assert!((h.eval(5.0, &PathContext::new(0.0)) - 0.75).abs() < 1e-15);
        assert_eq!(
            h.eval(-3.0, &PathContext::new(2.0)),
            h.eval(10.0, &PathContext::new(2.0))
        );
        assert!(h.eval(0.0, &PathContext::new(1e6)) <= 0.9);
        assert!(h.eval(0.0, &PathContext::new(-1e6)) >= 0.6);
        assert!(!h.is_deterministic());
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(HurstFunction::sine(0.9, 0.7, 1.0, 0.0).is_err());
        assert!(HurstFunction::sine(0.0, 0.7, 1.0, 0.0).is_err());
        assert!(HurstFunction::sine(0.5, 1.0, 1.0, 0.0).is_err());
        assert!(HurstFunction::piecewise_linear(0.5, 0.7, vec![(1.0, 0.6), (0.0, 0.6)]).is_err());
        assert!(HurstFunction::weierstrass(0.5, 0.7, 1.2, 2.0, 10).is_err());
    }

    #[test]
    fn modulus_of_constant() {
        let h = HurstFunction::constant(0.8).unwrap();
        let r = h
            .verify_modulus(Modulus::Holder { rho: 0.5, c: 1e-9 }, 0.01, (0.0, 2.0))
            .unwrap();
        assert!(r.holds);
        assert_eq!(r.worst_ratio, 0.0);
    }

    #[test]
    fn modulus_of_piecewise_linear() {
        let h = HurstFunction::piecewise_linear(0.7, 0.9, vec![(0.0, 0.7), (1.0, 0.9)]).unwrap();
        let r = h
            .verify_modulus(Modulus::Holder { rho: 1.0, c: 0.2 }, 1e-3, (-0.5, 1.5))
            .unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.worst_ratio <= 1.0 + 1e-9);
    }

    #[test]
    fn modulus_fails_for_rough_function_with_larger_exponent() {
        // Hölder exponent ln(1/a)/ln b = 0.3.
        let h = HurstFunction::weierstrass(0.6, 0.9, 2f64.powf(-0.3), 2.0, 20).unwrap();
        let r = h
            .verify_modulus(Modulus::Holder { rho: 0.6, c: 1.0 }, 1e-5, (0.0, 0.02))
            .unwrap();
        assert!(!r.holds, "{r:?}");
        let ok = h
            .verify_modulus(Modulus::Holder { rho: 0.2, c: 1.0 }, 1e-5, (0.0, 0.02))
            .unwrap();
        assert!(ok.holds, "{ok:?}");
    }

    #[test]
    fn modulus_unsupported_for_adapted() {
        let h = HurstFunction::adapted(0.6, 0.9, 0.0, 1.0).unwrap();
        let e = h.verify_modulus(Modulus::LogInverse { c: 1.0 }, 0.1, (0.0, 1.0));
        assert!(matches!(e, Err(Error::Unsupported(_))));
    }

    #[test]
    fn extremum_over_interval() {
        let h = HurstFunction::piecewise_linear(0.75, 0.95, vec![(0.0, 0.95), (0.5, 0.75), (1.0, 0.95)])
            .unwrap();
        assert!((h.min_over(0.1, 0.4) - 0.79).abs() < 1e-9);
        assert!((h.min_over(0.0, 1.0) - 0.75).abs() < 1e-12);
        assert!((h.max_over(0.2, 0.6) - 0.87).abs() < 1e-9);
    }

    #[test]
    fn descriptor_round_trip() {
        let cases = vec![
            HurstFunction::constant(0.8).unwrap(),
            HurstFunction::sine(0.75, 0.95, 1.0, 0.2).unwrap(),
            HurstFunction::weierstrass(0.75, 0.95, 2f64.powf(-0.3), 2.0, 20)
                .unwrap()
                .with_modulus_hint(ModulusHint::Holder { exponent: 0.3 }),
            HurstFunction::piecewise_linear(0.7, 0.9, vec![(0.0, 0.7), (1.0, 0.9)]).unwrap(),
            HurstFunction::adapted(0.6, 0.9, 0.5, 2.0)
                .unwrap()
                .with_modulus_hint(ModulusHint::None),
        ];
        for h in cases {
            let s = serde_json::to_string(&h).unwrap();
            let back: HurstFunction = serde_json::from_str(&s).unwrap();
            assert_eq!(back, h, "{s}");
        }
    }

    #[test]
    fn descriptor_rejects_unknown_fields() {
        let bad = r#"{"kind":"constant","params":{},"h_lo":0.8,"h_hi":0.8,"extra":1}"#;
        assert!(serde_json::from_str::<HurstFunction>(bad).is_err());
        let bad = r#"{"kind":"smooth_catalog","params":{"frequency":1,"speed":2},"h_lo":0.7,"h_hi":0.8}"#;
        assert!(serde_json::from_str::<HurstFunction>(bad).is_err());
        let bad = r#"{"kind":"fractal","h_lo":0.7,"h_hi":0.8}"#;
        assert!(serde_json::from_str::<HurstFunction>(bad).is_err());
        let ok = r#"{"kind":"constant","h_lo":0.8,"h_hi":0.8}"#;
        assert!(serde_json::from_str::<HurstFunction>(ok).is_ok());
    }
}
