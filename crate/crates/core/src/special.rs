//! Standard-normal helpers and a few constants shared by the stable-law code.

use core::f64::consts::{PI, SQRT_2};

#[allow(unused_imports)]
use num_traits::Float;

pub(crate) const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Standard normal distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Inverse of the standard normal distribution function.
///
/// Acklam's rational approximation polished by two Halley steps against
/// `erfc`, which brings it to full double precision on `(0, 1)`.
pub fn norm_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    for _ in 0..2 {
        // Work on the tail nearest to p so the residual keeps relative accuracy.
        let e = if x < 0.0 {
            norm_cdf(x) - p
        } else {
            (1.0 - p) - 0.5 * libm::erfc(x / SQRT_2)
        };
        let u = e * SQRT_2PI * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// Lower tail mean magnitude of the standard normal, `phi(Phi^{-1}(q)) / q`.
pub fn norm_tail_mean_magnitude(q: f64) -> f64 {
    norm_pdf(norm_quantile(q)) / q
}

/// `E|N|^p` for a standard normal `N`.
pub fn norm_abs_moment(p: f64) -> f64 {
    (0.5 * p).exp2() * libm::tgamma(0.5 * (p + 1.0)) / PI.sqrt()
}

/// `E[(-N)_+^p]` for a standard normal `N`.
pub fn norm_neg_part_moment(p: f64) -> f64 {
    0.5 * norm_abs_moment(p)
}

pub(crate) fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_known_values() {
        assert!((norm_quantile(0.05) + 1.644_853_626_951_472_9).abs() < 1e-14);
        assert!((norm_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-14);
        assert_eq!(norm_quantile(0.5), 0.0);
        assert!((norm_quantile(1e-10) + 6.361_340_902_404_056).abs() < 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-12, 1e-6, 0.001, 0.02, 0.3, 0.7, 0.98, 0.999_999] {
            let x = norm_quantile(p);
            let back = norm_cdf(x);
            assert!((back - p).abs() <= 1e-14 * p.max(1e-3), "p={p} back={back}");
        }
    }

    #[test]
    fn tail_mean_at_five_percent() {
        assert!((norm_tail_mean_magnitude(0.05) - 2.062_712_807_507_425).abs() < 1e-10);
    }

    #[test]
    fn abs_moment_closed_forms() {
        assert!((norm_abs_moment(1.0) - (2.0 / PI).sqrt()).abs() < 1e-15);
        assert!((norm_abs_moment(2.0) - 1.0).abs() < 1e-14);
        assert!((norm_neg_part_moment(1.0) - 1.0 / SQRT_2PI).abs() < 1e-15);
    }
}
