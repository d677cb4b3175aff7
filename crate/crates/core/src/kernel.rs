//! The moving-average kernel `F_t(x) = (t−x)_+^e − (−x)_+^e`, `e = H − 1/α`,
//! and quadrature of the kernel-increment integrals that control the
//! regularity of the process.
//!
//! All integrals are written in distance variables (`u = t − x`), so that
//! the differences of powers can be formed without cancellation.

use crate::error::{Error, Result};
use crate::hurst::HurstFunction;
use crate::quad;

/// Relative tolerance of every kernel integral.
pub const REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub t: f64,
    pub x: f64,
    /// `H(x)` in the Itô kernel, `H(t)` in the classical one.
    pub h_at_x: f64,
    pub alpha: f64,
}

impl KernelPoint {
    pub fn exponent(&self) -> f64 {
        self.h_at_x - 1.0 / self.alpha
    }
}

/// `base_+^e` with `0^e = 0` for `e > 0` and `+∞` for `e ≤ 0`.
#[inline]
pub fn pos_pow(base: f64, e: f64) -> f64 {
    if base > 0.0 {
        base.powf(e)
    } else if base < 0.0 || e > 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `F_t(x)`. Returns `+∞` when a non-positive exponent meets a singular
/// point (`x = t` or `x = 0`); callers doing quadrature never sample there.
pub fn eval_kernel(p: &KernelPoint) -> f64 {
    let e = p.exponent();
    let lead = pos_pow(p.t - p.x, e);
    let anchor = pos_pow(-p.x, e);
    if lead.is_infinite() || anchor.is_infinite() {
        return f64::INFINITY;
    }
    lead - anchor
}

/// `(u + h)^e − u^e` for `u, h > 0`, accurate when `h ≪ u`.
#[inline]
pub(crate) fn pow_diff(u: f64, h: f64, e: f64) -> f64 {
    u.powf(e) * (e * (h / u).ln_1p()).exp_m1()
}

/// Region of `∫ |F_{t+h}(x) − F_t(x)|^α dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// `x ∈ (−∞, t − ε)`
    FarPast { eps: f64 },
    /// `x ∈ (t − ε, t)`
    NearPast { eps: f64 },
    /// `x ∈ (t, t + h)`
    NewMass,
}

/// `∫_region |F_{t+h}(x) − F_t(x)|^α dx` for the Itô kernel.
///
/// The anchor terms cancel in the difference, leaving
/// `|(t+h−x)_+^{e(x)} − (t−x)_+^{e(x)}|^α`.
pub fn quad_kernel_diff_alpha_norm(
    t: f64,
    h: f64,
    region: Region,
    hurst: &HurstFunction,
    alpha: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    if !(h > 0.0 && h < 0.5) {
        return Err(Error::param("h", format!("must lie in (0, 1/2), got {h}")));
    }
    if !t.is_finite() {
        return Err(Error::param("t", format!("must be finite, got {t}")));
    }
    deterministic(hurst)?;
    let inv = 1.0 / alpha;
    let diff = |u: f64| {
        let e = hurst.at(t - u) - inv;
        pow_diff(u, h, e).abs().powf(alpha)
    };
    match region {
        Region::FarPast { eps } => {
            check_eps(eps)?;
            let tail = far_tail(hurst, alpha, h, alpha)?;
            integrate_to_infinity(&diff, eps, &tail)
        }
        Region::NearPast { eps } => {
            check_eps(eps)?;
            integrate_toward_zero(&diff, eps, &[h])
        }
        Region::NewMass => {
            let f = |v: f64| v.powf(alpha * hurst.at(t + h - v) - 1.0);
            integrate_toward_zero(&f, h, &[])
        }
    }
}

/// `∫ |F^a_h(x) − F^b_h(x)|^α dx` where `F^a` uses the exponent `a(x) − 1/α`.
pub fn quad_exponent_swap_norm(
    h: f64,
    a: &HurstFunction,
    b: &HurstFunction,
    alpha: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    if !(h > 0.0 && h < (-1.0f64).exp()) {
        return Err(Error::param("h", format!("must lie in (0, 1/e), got {h}")));
    }
    deterministic(a)?;
    deterministic(b)?;
    let inv = 1.0 / alpha;
    let exps = |x: f64| (a.at(x) - inv, b.at(x) - inv);
    // x < 0, u = −x.
    let past = |u: f64| {
        let (ea, eb) = exps(-u);
        (pow_diff(u, h, ea) - pow_diff(u, h, eb)).abs().powf(alpha)
    };
    // 0 < x < h, v = h − x.
    let fresh = |v: f64| {
        let (ea, eb) = exps(h - v);
        (v.powf(eb) * ((ea - eb) * v.ln()).exp_m1()).abs().powf(alpha)
    };
    let emax = emax(a, alpha).max(emax(b, alpha));
    let hbar = a.h_hi().max(b.h_hi());
    let crude = move |big_u: f64| {
        (2.0 * emax * h).powf(alpha) * big_u.powf(alpha * hbar - alpha) / (alpha - alpha * hbar)
    };
    let near = integrate_toward_zero(&past, 1.0, &[h])?;
    let far = integrate_to_infinity(&past, 1.0, &crude)?;
    let new = integrate_toward_zero(&fresh, h, &[])?;
    Ok(near + far + new)
}

/// `∫_{lo}^{hi} |F_t(x)|^p dx` for the Itô kernel with `t > 0`; `lo` may be
/// `−∞`.
pub(crate) fn kernel_power_integral(
    t: f64,
    hurst: &HurstFunction,
    alpha: f64,
    p: f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    deterministic(hurst)?;
    let inv = 1.0 / alpha;
    power_integral(
        t,
        hurst,
        alpha,
        p,
        (lo, hi),
        |v| v.powf(p * (hurst.at(t - v) - inv)),
        |u| pow_diff(u, t, hurst.at(-u) - inv).abs().powf(p),
    )
}

/// Upper bound on [`kernel_power_integral`] for any Hurst function with
/// values in `[h_lo, h_hi]`: the integrand is replaced by its maximum over a
/// ladder of constant levels, which also removes any oscillation in `H`.
pub(crate) fn kernel_power_envelope(
    t: f64,
    hurst: &HurstFunction,
    alpha: f64,
    p: f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let inv = 1.0 / alpha;
    let exps: Vec<f64> = (0..=16)
        .map(|k| hurst.h_lo() + (hurst.h_hi() - hurst.h_lo()) * k as f64 / 16.0 - inv)
        .collect();
    let top = |g: &dyn Fn(f64) -> f64| exps.iter().map(|&e| g(e)).fold(0.0, f64::max);
    power_integral(
        t,
        hurst,
        alpha,
        p,
        (lo, hi),
        |v| top(&|e| v.powf(p * e)),
        |u| top(&|e| pow_diff(u, t, e).abs().powf(p)),
    )
}

/// Shared splitting for the two kernel power integrals: `fresh(v)` is the
/// integrand at `x = t − v ∈ (0, t)`, `past(u)` at `x = −u < 0`.
fn power_integral(
    t: f64,
    hurst: &HurstFunction,
    alpha: f64,
    p: f64,
    (lo, hi): (f64, f64),
    fresh: impl Fn(f64) -> f64,
    past: impl Fn(f64) -> f64,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::param("t", format!("must be positive, got {t}")));
    }
    let hi = hi.min(t);
    if !(lo < hi) {
        return Ok(0.0);
    }
    let mut total = 0.0;
    if hi > 0.0 {
        let x_lo = lo.max(0.0);
        let (v_lo, v_hi) = (t - hi, t - x_lo);
        total += if v_lo <= 0.0 {
            integrate_toward_zero(&fresh, v_hi, &[])?
        } else {
            quad::integrate(&fresh, v_lo, v_hi, REL_TOL, 0.0)?.value
        };
    }
    if lo < 0.0 {
        let u_lo = (-hi).max(0.0);
        if lo == f64::NEG_INFINITY {
            let tail = far_tail(hurst, alpha, t, p)?;
            let start = if u_lo > 0.0 {
                u_lo
            } else {
                total += integrate_toward_zero(&past, t, &[])?;
                t
            };
            total += integrate_to_infinity(&past, start, &tail)?;
        } else {
            let u_hi = -lo;
            total += if u_lo == 0.0 {
                integrate_toward_zero(&past, u_hi, &[t])?
            } else {
                integrate_geometric(&past, u_lo, u_hi)?
            };
        }
    }
    Ok(total)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("must lie in (0, 2), got {alpha}")))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::param("eps", format!("must lie in (0, 1), got {eps}")))
    }
}

fn deterministic(h: &HurstFunction) -> Result<()> {
    if h.is_deterministic() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "kernel integrals need a deterministic Hurst function".into(),
        ))
    }
}

fn emax(h: &HurstFunction, alpha: f64) -> f64 {
    let inv = 1.0 / alpha;
    (h.h_lo() - inv).abs().max((h.h_hi() - inv).abs())
}

/// Bound on `∫_U^∞ |(u+s)^e − u^e|^p du` for `U ≥ 1`, from
/// `|(u+s)^e − u^e| ≤ |e| s u^{e−1}`.
fn far_tail(
    hurst: &HurstFunction,
    alpha: f64,
    shift: f64,
    p: f64,
) -> Result<impl Fn(f64) -> f64> {
    let ebar = hurst.h_hi() - 1.0 / alpha;
    let decay = p * (1.0 - ebar) - 1.0;
    if !(decay > 0.0) {
        return Err(Error::Domain(format!(
            "∫|F|^{p} diverges at −∞ for H up to {}",
            hurst.h_hi()
        )));
    }
    let c = (emax(hurst, alpha) * shift).powf(p) / decay;
    Ok(move |big_u: f64| {
        if big_u < 1.0 {
            f64::INFINITY
        } else {
            c * big_u.powf(-decay)
        }
    })
}

fn sum_pieces<F: Fn(f64) -> f64>(f: &F, cuts: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += quad::integrate(f, w[0], w[1], REL_TOL, 0.0)?.value;
    }
    Ok(total)
}

/// `∫_0^U f` for integrands with an integrable singularity or a sharp
/// feature at 0: dyadic panels down to `U·2^{-60}`, plus any extra cut points.
fn integrate_toward_zero<F: Fn(f64) -> f64>(f: &F, big_u: f64, extra: &[f64]) -> Result<f64> {
    let mut cuts: Vec<f64> = (0..=60).map(|j| big_u * 0.5f64.powi(j)).collect();
    cuts.push(0.0);
    cuts.extend(extra.iter().copied().filter(|&c| c > 0.0 && c < big_u));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    sum_pieces(f, &cuts)
}

/// `∫_a^b f` over dyadically growing panels, for `0 < a < b`.
fn integrate_geometric<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<f64> {
    let mut cuts = vec![a];
    let mut x = a;
    while 2.0 * x < b {
        x *= 2.0;
        cuts.push(x);
    }
    cuts.push(b);
    sum_pieces(f, &cuts)
}

/// `∫_a^∞ f` over panels `[a·2^j, a·2^{j+1}]`, stopping once either the
/// analytic tail bound falls below the tolerance or the integrand has
/// decayed below 10⁻¹⁶ of the running total.
fn integrate_to_infinity<F, T>(f: &F, a: f64, tail: &T) -> Result<f64>
where
    F: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    let mut total = 0.0;
    let mut lo = a;
    let mut prev = f64::NAN;
    for j in 0..1000 {
        let hi = 2.0 * lo;
        let piece = quad::integrate(f, lo, hi, REL_TOL, 0.0)?.value;
        total += piece;
        if total > 0.0 {
            let negligible = piece <= 1e-16 * total && f(hi) * hi <= 1e-16 * total;
            if tail(hi) <= 0.1 * REL_TOL * total || negligible {
                return Ok(total);
            }
            // Geometric decay of the panels bounds the remainder too.
            let ratio = piece / prev;
            if j >= 8 && ratio < 0.95 && piece * ratio / (1.0 - ratio) <= 0.1 * REL_TOL * total {
                return Ok(total);
            }
        } else if j >= 64 {
            return Ok(0.0);
        }
        prev = piece;
        lo = hi;
    }
    Err(Error::Numerical {
        achieved: f64::INFINITY,
        requested: REL_TOL,
    })
}
