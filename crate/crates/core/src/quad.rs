//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! The rule never evaluates the interval endpoints, so integrable endpoint
//! singularities are handled by bisection alone.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
}

/// One application of the 21-point Kronrod rule on `[a, b]`, with the
/// QUADPACK error heuristic.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> QuadResult {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut f1 = [0.0; 10];
    let mut f2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(center - dx), f(center + dx));
        f1[j] = lo;
        f2[j] = hi;
        res_k += WGK[j] * (lo + hi);
        res_abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor > err {
        err = floor;
    }
    QuadResult {
        value,
        abs_err: err,
    }
}

struct Piece {
    a: f64,
    b: f64,
    r: QuadResult,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.r.abs_err == o.r.abs_err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.r.abs_err.total_cmp(&o.r.abs_err)
    }
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`, bisecting the
/// interval with the largest error estimate first.
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult> {
    const MAX_PIECES: usize = 2000;
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_err: 0.0,
        });
    }
    let first = gk21(f, a, b);
    let mut total = first;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, r: first });
    loop {
        if !total.value.is_finite() || !total.abs_err.is_finite() {
            return Err(Error::Numerical {
                achieved: f64::INFINITY,
                requested: rel_tol,
            });
        }
        let target = abs_tol.max(rel_tol * total.value.abs());
        if total.abs_err <= target {
            return Ok(total);
        }
        if heap.len() >= MAX_PIECES {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer divisible in floating point.
            heap.push(worst);
            break;
        }
        let left = gk21(f, worst.a, mid);
        let right = gk21(f, mid, worst.b);
        total.value += left.value + right.value - worst.r.value;
        total.abs_err += left.abs_err + right.abs_err - worst.r.abs_err;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            r: left,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            r: right,
        });
    }
    // Recompute the sums from scratch to shed accumulated rounding.
    let value: f64 = heap.iter().map(|p| p.r.value).sum();
    let abs_err: f64 = heap.iter().map(|p| p.r.abs_err).sum();
    if abs_err <= abs_tol.max(rel_tol * value.abs()) {
        return Ok(QuadResult { value, abs_err });
    }
    Err(Error::Numerical {
        achieved: if value != 0.0 {
            abs_err / value.abs()
        } else {
            f64::INFINITY
        },
        requested: rel_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = gk21(&|x: f64| x.powi(7) - 3.0 * x * x, 0.0, 2.0);
        assert!((r.value - (256.0 / 8.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate(&|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-10, 0.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
        // ∫_0^1 x^{-0.9} dx = 10
        let r = integrate(&|x: f64| x.powf(-0.9), 0.0, 1.0, 1e-8, 0.0).unwrap();
        assert!((r.value - 10.0).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn oscillatory() {
        let r = integrate(&|x: f64| (50.0 * x).sin().powi(2), 0.0, std::f64::consts::PI, 1e-10, 0.0)
            .unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn zero_integrand() {
        let r = integrate(&|_| 0.0, -1.0, 1.0, 1e-6, 0.0).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn non_integrable_fails() {
        let r = integrate(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-8, 0.0);
        assert!(matches!(r, Err(Error::Numerical { .. })), "{r:?}");
    }
}
