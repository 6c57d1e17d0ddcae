use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use levy_window_core::metrics::{exponent_gap, DriftSpec};
use levy_window_core::series::{log_spaced_horizons, ScaleCurve, ScaleFunctional};
use levy_window_core::stable::sample;
use levy_window_core::window::{two_segment_fit, SegmentModel};
use levy_window_core::{KellyLaw, RiskModel, StableDriver, StableParams};

fn model(alpha: f64, sigma: f64, tau0: f64, mu: f64, r: f64) -> RiskModel {
    let params = StableParams::new(alpha, 0.0, sigma, mu).unwrap();
    RiskModel::new(params, tau0).unwrap().with_drift(DriftSpec::linear(mu, r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn var_bias_matches_anchor_identity(
        alpha in 1.1f64..2.0,
        sigma in 0.1f64..3.0,
        tau0 in 0.5f64..20.0,
        ratio in 0.05f64..20.0,
        q in 0.005f64..0.2,
    ) {
        let m = model(alpha, sigma, tau0, 0.01, 0.0);
        let tau = tau0 * ratio;
        let v = m.var(tau, q).unwrap();
        let a = m.anchor(q, None).unwrap();
        let want = a.var_bias(tau);
        prop_assert!((v.bias - want).abs() <= 1e-10 * (1.0 + v.levy.abs()), "{} vs {}", v.bias, want);
    }

    #[test]
    fn es_dominates_var(
        alpha in 1.1f64..=2.0,
        tau in 0.1f64..100.0,
        q in 0.005f64..0.2,
    ) {
        let m = model(alpha, 1.0, 1.0, 0.0, 0.0);
        let v = m.var(tau, q).unwrap();
        let s = m.es(tau, q).unwrap();
        prop_assert!(s.levy >= v.levy);
        prop_assert!(s.gaussian >= v.gaussian);
    }

    #[test]
    fn biases_vanish_at_the_anchor(
        alpha in 1.1f64..2.0,
        tau0 in 0.5f64..20.0,
        q in 0.005f64..0.2,
    ) {
        let m = model(alpha, 1.0, tau0, 0.03, 0.01).with_abs_moments(&[1.0]).unwrap();
        prop_assert!(m.var(tau0, q).unwrap().bias.abs() < 1e-12);
        prop_assert!(m.es(tau0, q).unwrap().bias.abs() < 1e-11);
        prop_assert!(m.sharpe_p(tau0, 1.0).unwrap().bias.abs() < 1e-12);
    }

    #[test]
    fn sharpe_scales_with_horizon(
        alpha in 1.1f64..=2.0,
        tau in 0.1f64..50.0,
        k in 1.5f64..8.0,
    ) {
        let m = model(alpha, 1.0, 1.0, 0.04, 0.01).with_abs_moments(&[1.0]).unwrap();
        let a = m.sharpe_p(tau, 1.0).unwrap();
        let b = m.sharpe_p(k * tau, 1.0).unwrap();
        let want = k.powf(1.0 - 1.0 / alpha);
        prop_assert!((b.levy / a.levy / want - 1.0).abs() < 1e-12);
        prop_assert!((b.gaussian / a.gaussian / k.sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kelly_bound_grows_with_level(
        alpha in 1.1f64..=2.0,
        tau in 0.5f64..20.0,
        q in 0.005f64..0.1,
    ) {
        let m = model(alpha, 0.2, 1.0, 0.001, 0.0);
        let lo = m.kelly(tau, q, KellyLaw::Trimmed).unwrap();
        let hi = m.kelly(tau, 2.0 * q, KellyLaw::Trimmed).unwrap();
        prop_assert!(lo.f_max.is_finite() && hi.f_max > lo.f_max);
        prop_assert!(lo.f_star <= lo.upper && lo.f_star >= 0.0);
    }

    #[test]
    fn exponent_gap_sign(ratio in 1e-3f64..1e3, alpha in 1.01f64..2.0) {
        let g = exponent_gap(ratio, alpha);
        if ratio > 1.0 {
            prop_assert!(g > 0.0);
        } else if ratio < 1.0 {
            prop_assert!(g < 0.0);
        }
    }
}

fn hinge(x: f64, at: f64) -> f64 {
    (x - at).max(0.0)
}

/// Exhaustive three-piece fit by SVD least squares over every interior kink pair.
fn hinge_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let rhs = DVector::from_column_slice(y);
    let mut best = f64::INFINITY;
    for i in 1..n - 1 {
        for j in i + 1..n - 1 {
            let a = DMatrix::from_fn(n, 4, |r, c| match c {
                0 => 1.0,
                1 => x[r],
                2 => hinge(x[r], x[i]),
                _ => hinge(x[r], x[j]),
            });
            let coef = a.clone().svd(true, true).solve(&rhs, 1e-12).unwrap();
            best = best.min((a * coef - &rhs).norm_squared());
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn segmented_fit_attains_the_least_squares_minimum(
        noise in proptest::collection::vec(-0.05f64..0.05, 25),
        s1 in 0.3f64..1.0,
        s2 in 0.5f64..0.9,
        s3 in 0.3f64..1.0,
        k1 in 3usize..10,
        k2 in 13usize..21,
    ) {
        let horizons = log_spaced_horizons(1, 1000, 8).unwrap();
        let x: Vec<f64> = horizons.iter().map(|&h| (h as f64).ln()).collect();
        let (a, b) = (x[k1], x[k2]);
        let g: Vec<f64> = x
            .iter()
            .zip(noise.iter().cycle())
            .map(|(&v, e)| s1 * v + (s2 - s1) * hinge(v, a) + (s3 - s2) * hinge(v, b) + e)
            .collect();
        let curve = ScaleCurve {
            s_values: g.iter().map(|v| v.exp()).collect(),
            g_values: g.clone(),
            horizons: horizons.clone(),
            functional: ScaleFunctional::Mad,
        };
        let fit = two_segment_fit(&curve, (1, 1000), SegmentModel::ThreePiece).unwrap();
        let oracle = hinge_oracle(&x, &g);
        prop_assert!(
            (fit.sse - oracle).abs() <= 1e-9 * (1.0 + oracle),
            "fit {} oracle {}",
            fit.sse,
            oracle
        );
        prop_assert!(fit.sse <= fit.line_sse + 1e-12);
    }
}

/// One-sample Kolmogorov-Smirnov statistic against the quadrature CDF.
fn ks_statistic(draws: &mut [f64], driver: &StableDriver) -> f64 {
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in draws.iter().enumerate() {
        let f = driver.cdf(x).unwrap();
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    d
}

#[test]
fn sampler_passes_kolmogorov_smirnov() {
    let n = 20_000;
    for (seed, &(alpha, beta)) in [(1.2, 0.0), (1.5, 0.0), (1.5, 0.6), (1.8, -0.5), (2.0, 0.0)]
        .iter()
        .enumerate()
    {
        let params = StableParams::standard(alpha, beta).unwrap();
        let mut draws = sample(&params, n, 40 + seed as u64);
        let d = ks_statistic(&mut draws, &StableDriver::new(&params));
        // 0.1% critical value of the limiting distribution.
        assert!(d * (n as f64).sqrt() < 1.95, "alpha={alpha} beta={beta} D={d}");
    }
}

#[test]
fn truncated_second_moment_matches_sample() {
    let n = 2_000_000;
    for (seed, &alpha) in [1.3, 1.6, 1.9].iter().enumerate() {
        let params = StableParams::standard(alpha, 0.0).unwrap();
        let driver = StableDriver::new(&params);
        let q = 0.05;
        let c = driver.quantile(q).unwrap().abs();
        let draws = sample(&params, n, 70 + seed as u64);
        let kept: Vec<f64> = draws.into_iter().filter(|z| z.abs() <= c).collect();
        let mc = kept.iter().map(|z| z * z).sum::<f64>() / n as f64;
        let quad = driver.truncated_second_moment(q).unwrap();
        assert!((mc / quad - 1.0).abs() < 0.01, "alpha={alpha}: {mc} vs {quad}");
    }
}
