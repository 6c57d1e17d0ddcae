//! Globally adaptive Gauss–Kronrod quadrature.
//!
//! The 21-point Kronrod extension of the 10-point Gauss rule is applied on
//! each subinterval; the interval with the largest error estimate is bisected
//! until the summed estimate meets `max(abs_tol, rel_tol * |I|)`.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_intervals: 2000,
        }
    }
}

impl QuadConfig {
    pub const fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
    pub converged: bool,
}

impl Integral {
    /// Converts a non-converged integral into a quadrature error.
    pub fn require(self, what: &'static str) -> Result<f64> {
        if self.converged && self.value.is_finite() {
            Ok(self.value)
        } else {
            Err(Error::Quadrature {
                what,
                abs_error: self.abs_error,
            })
        }
    }
}

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

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let mut res_g = 0.0;
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    Segment {
        a,
        b,
        value,
        error: err,
    }
}

/// Nodes and weights of the 21-point Kronrod rule mapped to `[a, b]`.
pub fn kronrod_nodes(a: f64, b: f64) -> [(f64, f64); 21] {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(center, WGK[10] * half); 21];
    for j in 0..10 {
        let x = half * XGK[j];
        out[2 * j] = (center - x, WGK[j] * half);
        out[2 * j + 1] = (center + x, WGK[j] * half);
    }
    out
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Integral {
    integrate_points(f, &[a, b], cfg)
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the
/// subdivision given by `points` (kinks, peaks or other trouble spots).
pub fn integrate_points<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    cfg: &QuadConfig,
) -> Integral {
    let mut heap = BinaryHeap::with_capacity(points.len() + 16);
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let seg = kronrod21(&mut f, w[0], w[1]);
        total += seg.value;
        total_err += seg.error;
        heap.push(seg);
    }
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol || !total.is_finite() {
            break;
        }
        if heap.len() >= cfg.max_intervals {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in floating point.
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            total_err -= worst.error;
            continue;
        }
        let left = kronrod21(&mut f, worst.a, mid);
        let right = kronrod21(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Resum to shed accumulated cancellation from the running updates.
    let (value, abs_error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
    Integral {
        value,
        abs_error,
        intervals: heap.len(),
        converged: abs_error <= tol && value.is_finite(),
    }
}

/// Integrates `f` over `[a, inf)` for `a > 0`, where `f(x)` decays like
/// `x^(-decay)` with `decay > 1`.
///
/// Uses `x = a s^(-k)` with `k = 1 / (decay - 1)`, which maps the power-law
/// tail onto a bounded, asymptotically flat integrand on `(0, 1]`.
pub fn integrate_power_tail<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    decay: f64,
    cfg: &QuadConfig,
) -> Integral {
    debug_assert!(a > 0.0 && decay > 1.0);
    let k = 1.0 / (decay - 1.0);
    let g = move |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let ln_x = a.ln() - k * s.ln();
        if ln_x > 700.0 {
            return 0.0;
        }
        let x = ln_x.exp();
        let jac = k * x / s;
        let v = f(x) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_points(g, &[0.0, 1e-6, 1e-3, 0.1, 1.0], cfg)
}

#[cfg(test)]
mod tests {
    use core::f64::consts::PI;

    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, &QuadConfig::default());
        assert!((r.value - 0.0).abs() < 1e-14);
        assert!(r.converged);
    }

    #[test]
    fn oscillatory_integrand() {
        let r = integrate(|x| (50.0 * x).cos(), 0.0, PI, &QuadConfig::new(1e-13, 1e-12));
        assert!(r.value.abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &QuadConfig::new(1e-10, 1e-10));
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn power_tail_integrals() {
        let cfg = QuadConfig::new(1e-13, 1e-11);
        let r = integrate_power_tail(|x| 1.0 / (1.0 + x * x), 1.0, 2.0, &cfg);
        assert!((r.value - PI / 4.0).abs() < 1e-11, "{r:?}");
        // Slowly decaying tail: x^{-1.1} from 2 gives 2^{-0.1} / 0.1.
        let r = integrate_power_tail(|x| x.powf(-1.1), 2.0, 1.1, &cfg);
        assert!((r.value - 2f64.powf(-0.1) / 0.1).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn fixed_rule_is_exact_for_polynomials() {
        let v: f64 = kronrod_nodes(-1.0, 3.0).iter().map(|(x, w)| w * x.powi(12)).sum();
        let exact = (3f64.powi(13) + 1.0) / 13.0;
        assert!((v / exact - 1.0).abs() < 1e-14);
    }

    #[test]
    fn require_reports_failure() {
        let cfg = QuadConfig {
            abs_tol: 0.0,
            rel_tol: 0.0,
            max_intervals: 3,
        };
        let r = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, &cfg);
        assert!(r.require("test").is_err());
    }
}
