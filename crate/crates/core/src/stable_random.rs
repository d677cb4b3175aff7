//! Seedable random sources for the jump simulator and the Riemann oracle.
//!
//! Every variate is drawn from an explicit [`RngStream`]. A stream is a
//! ChaCha8 generator keyed by `seed` with its 64-bit stream parameter set to
//! `stream_id`, so replicate streams are disjoint by construction and a
//! given `(seed, stream_id)` pair yields the same sequence on any thread.
//!
//! Scale convention: a symmetric α-stable variate of scale σ has
//! characteristic function `exp(-σ^α |t|^α)`. The Poisson jump measure
//! `α|y|^{-α-1} dy` used by the simulator corresponds to a Lévy motion whose
//! unit-time increment has scale `levy_measure_constant(α)^{1/α}`, see
//! [`jump_amplitude`].

use std::f64::consts::PI;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stability index and scale of a symmetric α-stable law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableSpec {
    alpha: f64,
    scale: f64,
}

impl StableSpec {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::param("alpha", format!("must lie in (0, 2], got {alpha}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::param("scale", format!("must be positive and finite, got {scale}")));
        }
        Ok(Self { alpha, scale })
    }

    /// Unit scale: `E exp(i t L(1)) = exp(-|t|^α)`.
    pub fn standard(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// A deterministic random stream identified by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * INV_2_53
    }

    /// Uniform on `(0, 1]`.
    #[inline]
    pub fn uniform_pos(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * INV_2_53
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * INV_2_53
    }

    /// Standard exponential, strictly positive.
    #[inline]
    pub fn exp1(&mut self) -> f64 {
        -self.uniform_open().ln()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Inverse-CDF draw from Pareto(γ, α): survival `(γ/y)^α` on `[γ, ∞)`.
pub fn sample_pareto(gamma: f64, alpha: f64, u: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::param("gamma", format!("must be positive and finite, got {gamma}")));
    }
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::param("alpha", format!("must lie in (0, 2], got {alpha}")));
    }
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::param("u", format!("must lie in (0, 1], got {u}")));
    }
    Ok(pareto_unchecked(gamma, alpha, u))
}

#[inline]
pub(crate) fn pareto_unchecked(gamma: f64, alpha: f64, u: f64) -> f64 {
    gamma * u.powf(-1.0 / alpha)
}

#[inline]
pub fn sample_rademacher(u: f64) -> f64 {
    if u < 0.5 {
        -1.0
    } else {
        1.0
    }
}

/// Exact Poisson(λ) count.
///
/// Backed by `rand_distr::Poisson`, which uses multiplication of uniforms for
/// small rates and a transformed-rejection sampler for large ones; both are
/// exact.
pub fn sample_poisson(lambda: f64, rng: &mut RngStream) -> Result<u64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::param(
            "lambda",
            format!("must be non-negative and finite, got {lambda}"),
        ));
    }
    if lambda == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(lambda).map_err(|e| Error::param("lambda", e.to_string()))?;
    Ok(dist.sample(rng) as u64)
}

/// Symmetric α-stable draw with characteristic function `exp(-σ^α |t|^α)`,
/// by the Chambers–Mallows–Stuck construction.
///
/// With β = 0 there is no drift term; α = 1 reduces to `tan V` (standard
/// Cauchy) and α = 2 to `2 sin V √W`, a centred normal of variance 2.
pub fn sample_sas(spec: &StableSpec, rng: &mut RngStream) -> f64 {
    spec.scale * standard_sas(spec.alpha, rng)
}

#[inline]
pub(crate) fn standard_sas(alpha: f64, rng: &mut RngStream) -> f64 {
    let v = PI * (rng.uniform_open() - 0.5);
    let w = rng.exp1();
    if alpha == 1.0 {
        return v.tan();
    }
    let inv_alpha = 1.0 / alpha;
    (alpha * v).sin() / v.cos().powf(inv_alpha)
        * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) * inv_alpha)
}

/// `C_α = ∫(1 - cos y) α|y|^{-α-1} dy = 2 Γ(1-α) cos(πα/2)` (π at α = 1).
///
/// A Lévy motion with jump measure `α|y|^{-α-1} dy` has
/// `E exp(i t L(1)) = exp(-C_α |t|^α)`.
pub fn levy_measure_constant(alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha < 2.0, "alpha must lie in (0, 2)");
    if (alpha - 1.0).abs() < 1e-9 {
        // Removable singularity of Γ(1-α)cos(πα/2).
        return PI;
    }
    2.0 * gamma_fn(1.0 - alpha) * (PI * alpha / 2.0).cos()
}

/// Factor mapping jumps of the `α|y|^{-α-1} dy` measure onto the unit-scale
/// stable motion: `L = jump_amplitude(α) · L_jumps` in law.
pub fn jump_amplitude(alpha: f64) -> f64 {
    levy_measure_constant(alpha).powf(-1.0 / alpha)
}

/// Lanczos approximation (g = 7, n = 9), with reflection for x < 1/2.
pub(crate) fn gamma_fn(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_fn(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}
