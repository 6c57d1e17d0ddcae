//! Order statistics, robust scale and small least-squares problems.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[cfg(test)]
fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// Linear-interpolation quantile (Hyndman–Fan type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Type-7 quantile by selection; reorders `v`.
pub fn select_quantile(v: &mut [f64], p: f64) -> f64 {
    let n = v.len();
    debug_assert!(n > 0);
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let (_, &mut a, right) = v.select_nth_unstable_by(lo, f64::total_cmp);
    let w = h - lo as f64;
    if w == 0.0 || right.is_empty() {
        return a;
    }
    let b = right.iter().copied().fold(f64::INFINITY, f64::min);
    a + w * (b - a)
}

pub fn quantile(xs: &[f64], p: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(select_quantile(&mut xs.to_vec(), p))
}

pub fn median(xs: &[f64]) -> Result<f64> {
    quantile(xs, 0.5)
}

pub fn mean(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Median absolute deviation about the median, without a consistency constant.
pub fn mad(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut v = xs.to_vec();
    let m = select_quantile(&mut v, 0.5);
    for x in v.iter_mut() {
        *x = (*x - m).abs();
    }
    Ok(select_quantile(&mut v, 0.5))
}

/// Interquartile range.
pub fn iqr(xs: &[f64]) -> Result<f64> {
    Ok(quantile(xs, 0.75)? - quantile(xs, 0.25)?)
}

/// Simple regression `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ols {
    pub slope: f64,
    pub intercept: f64,
    pub sse: f64,
    /// Homoskedastic standard error of the slope.
    pub se_slope: f64,
    /// White (HC0) standard error of the slope.
    pub se_slope_hc0: f64,
    pub n: usize,
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<Ols> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return Err(Error::DegenerateGrid(alloc::format!(
            "need at least two paired points, got {} and {}",
            n,
            y.len()
        )));
    }
    let xm = x.iter().sum::<f64>() / n as f64;
    let ym = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - xm) * (a - xm)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateGrid("regressor has no spread".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let mut sse = 0.0;
    let mut meat = 0.0;
    for (a, b) in x.iter().zip(y) {
        let e = b - intercept - slope * a;
        sse += e * e;
        meat += (a - xm) * (a - xm) * e * e;
    }
    let se_slope = if n > 2 {
        (sse / (n - 2) as f64 / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok(Ols {
        slope,
        intercept,
        sse,
        se_slope,
        se_slope_hc0: meat.sqrt() / sxx,
        n,
    })
}

/// Mid-ranks (ties share the average rank), starting at 1.
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = alloc::vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation; `NaN` when either input is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let m = (n + 1.0) / 2.0;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - m) * (b - m);
        sxx += (a - m) * (a - m);
        syy += (b - m) * (b - m);
    }
    sxy / (sxx * syy).sqrt()
}

/// Least squares for a dense `n x k` design (row-major) by Householder QR.
///
/// Returns the coefficients and the residual sum of squares, or `None` when
/// the design is rank deficient.
pub fn least_squares(design: &[f64], k: usize, y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = y.len();
    if k == 0 || design.len() != n * k || n < k {
        return None;
    }
    let mut a = design.to_vec();
    let mut b = y.to_vec();
    let scale: f64 = a.iter().fold(0.0, |m, v| m.max(v.abs()));
    for j in 0..k {
        let norm = (j..n).map(|i| a[i * k + j] * a[i * k + j]).sum::<f64>().sqrt();
        if norm <= 1e-12 * scale.max(1.0) {
            return None;
        }
        let alpha = if a[j * k + j] > 0.0 { -norm } else { norm };
        // v = x - alpha e_1, stored in place of column j
        a[j * k + j] -= alpha;
        let vnorm2: f64 = (j..n).map(|i| a[i * k + j] * a[i * k + j]).sum();
        for c in j + 1..k {
            let dot: f64 = (j..n).map(|i| a[i * k + j] * a[i * k + c]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..n {
                a[i * k + c] -= f * a[i * k + j];
            }
        }
        let dot: f64 = (j..n).map(|i| a[i * k + j] * b[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in j..n {
            b[i] -= f * a[i * k + j];
        }
        a[j * k + j] = alpha;
    }
    let mut coef = alloc::vec![0.0; k];
    for j in (0..k).rev() {
        let mut s = b[j];
        for c in j + 1..k {
            s -= a[j * k + c] * coef[c];
        }
        coef[j] = s / a[j * k + j];
    }
    let sse = b[k..].iter().map(|r| r * r).sum();
    Some((coef, sse))
}
