//! Descriptive statistics: moments, autocorrelation, Ljung-Box, lagged
//! cross-correlation, and sampling-theory z-scores for skewness/kurtosis.

use std::collections::BTreeMap;

use crate::dist::chi2_sf;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Moment and serial-dependence summary of one series.
///
/// `kurtosis` is raw (normal distribution = 3); use [`SummaryStats::excess_kurtosis`]
/// for the excess convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n-1 denominator).
    pub stdev: f64,
    pub min: f64,
    pub max: f64,
    /// m3 / m2^1.5 on population central moments.
    pub skewness: f64,
    /// m4 / m2^2 on population central moments; 3 under normality.
    pub kurtosis: f64,
    pub acf1: f64,
    pub acf2: f64,
    pub ljung_box_lags: usize,
    pub ljung_box_q: f64,
    pub ljung_box_p: f64,
}

impl SummaryStats {
    pub fn excess_kurtosis(&self) -> f64 {
        self.kurtosis - 3.0
    }
}

fn mean_of(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Central moment of order `k` (1/n normalization).
fn central_moment(xs: &[f64], mean: f64, k: u32) -> f64 {
    xs.iter().map(|x| (x - mean).powi(k as i32)).sum::<f64>() / xs.len() as f64
}

/// Full summary including Ljung-Box over `lb_lags` lags.
pub fn describe(series: &TimeSeries, lb_lags: usize) -> Result<SummaryStats> {
    let xs = series.values();
    let n = xs.len();
    if n < lb_lags + 2 {
        return Err(Error::Insufficient(format!(
            "describe needs n >= lb_lags + 2 (n = {n}, lb_lags = {lb_lags})"
        )));
    }
    let mean = mean_of(xs);
    let m2 = central_moment(xs, mean, 2);
    if m2 == 0.0 {
        return Err(Error::Invalid(
            "constant series: higher moments undefined".into(),
        ));
    }
    let m3 = central_moment(xs, mean, 3);
    let m4 = central_moment(xs, mean, 4);
    let (q, p) = ljung_box(series, lb_lags)?;
    Ok(SummaryStats {
        n,
        mean,
        stdev: (m2 * n as f64 / (n as f64 - 1.0)).sqrt(),
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
        acf1: autocorrelation(series, 1)?,
        acf2: autocorrelation(series, 2)?,
        ljung_box_lags: lb_lags,
        ljung_box_q: q,
        ljung_box_p: p,
    })
}

/// Sample autocorrelation at lag `k` with the biased (divide-by-n)
/// autocovariance estimator, the convention Ljung-Box assumes.
pub fn autocorrelation(series: &TimeSeries, k: usize) -> Result<f64> {
    let xs = series.values();
    let n = xs.len();
    if n <= k {
        return Err(Error::Insufficient(format!(
            "autocorrelation lag {k} needs n > {k}"
        )));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let mean = mean_of(xs);
    let denom: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    if denom == 0.0 {
        return Err(Error::Invalid("constant series has no autocorrelation".into()));
    }
    let num: f64 = (0..n - k)
        .map(|t| (xs[t] - mean) * (xs[t + k] - mean))
        .sum();
    Ok(num / denom)
}

/// Ljung-Box portmanteau test over lags 1..=m.
///
/// Q = n(n+2) * sum_k acf_k^2 / (n-k); the p-value is the chi-square(m)
/// upper tail.
pub fn ljung_box(series: &TimeSeries, m: usize) -> Result<(f64, f64)> {
    let n = series.len();
    if m == 0 {
        return Err(Error::Invalid("ljung_box needs m >= 1".into()));
    }
    if n <= m {
        return Err(Error::Insufficient(format!(
            "ljung_box with m = {m} needs n > m (n = {n})"
        )));
    }
    let nf = n as f64;
    let mut q = 0.0;
    for k in 1..=m {
        let rho = autocorrelation(series, k)?;
        q += rho * rho / (nf - k as f64);
    }
    q *= nf * (nf + 2.0);
    Ok((q, chi2_sf(q, m as f64)))
}

/// Pearson correlation of `a_t` with `b_{t+lag}` over the date-matched
/// overlap. Series are joined on dates first, so differing calendars are
/// handled; `lag` shifts within the joined window.
pub fn cross_correlation(a: &TimeSeries, b: &TimeSeries, lag: i64) -> Result<f64> {
    // inner join on dates
    let bmap: BTreeMap<_, _> = b.iter().collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (d, v) in a.iter() {
        if let Some(w) = bmap.get(&d) {
            xs.push(v);
            ys.push(*w);
        }
    }
    let n = xs.len() as i64;
    if n <= lag.abs() + 2 {
        return Err(Error::Insufficient(format!(
            "cross_correlation overlap {n} too short for lag {lag}"
        )));
    }
    // pair x_t with y_{t+lag}
    let (mut px, mut py) = (Vec::new(), Vec::new());
    for t in 0..n {
        let u = t + lag;
        if u >= 0 && u < n {
            px.push(xs[t as usize]);
            py.push(ys[u as usize]);
        }
    }
    pearson(&px, &py)
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let (mx, my) = (mean_of(x), mean_of(y));
    let (mut sxx, mut syy, mut sxy) = (0.0f64, 0.0f64, 0.0f64);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Invalid(
            "constant series on the correlation window".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Asymptotic z-scores for sample skewness and kurtosis under normality:
/// `z_skew = skew / sqrt(6/n)`, `z_kurt = (kurt - 3) / sqrt(24/n)`.
pub fn moment_zscores(skewness: f64, kurtosis: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    (
        skewness / (6.0 / nf).sqrt(),
        (kurtosis - 3.0) / (24.0 / nf).sqrt(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::weekday_calendar;
    use crate::simulate::{sim_ar1, sim_gaussian};

    fn ts(values: &[f64]) -> TimeSeries {
        let dates = weekday_calendar(crate::series::default_sim_start(), values.len());
        TimeSeries::new(dates, values.to_vec()).unwrap()
    }

    #[test]
    fn symmetric_series_has_zero_mean_and_skew() {
        let vals: Vec<f64> = [-1.0, 0.0, 1.0].repeat(20);
        let s = describe(&ts(&vals), 5).unwrap();
        assert!(s.mean.abs() < 1e-15);
        assert!(s.skewness.abs() < 1e-12);
        assert_eq!(s.min, -1.0);
        assert_eq!(s.max, 1.0);
    }

    #[test]
    fn normal_sample_moments_inside_sampling_bands() {
        let n = 10_000;
        let s = describe(&sim_gaussian(n, 0.0, 1.0, 2024).unwrap(), 10).unwrap();
        let t = n as f64;
        assert!(s.skewness.abs() < 3.0 * (6.0 / t).sqrt(), "skew {}", s.skewness);
        assert!(
            (s.kurtosis - 3.0).abs() < 3.0 * (24.0 / t).sqrt(),
            "kurt {}",
            s.kurtosis
        );
        let (zs, zk) = moment_zscores(s.skewness, s.kurtosis, n);
        assert!(zs.abs() < 3.0 && zk.abs() < 3.0);
    }

    #[test]
    fn ar1_acf_matches_phi() {
        let s = describe(&sim_ar1(5000, 0.9, 1.0, 99).unwrap(), 10).unwrap();
        assert!(s.acf1 > 0.85 && s.acf1 < 0.95, "acf1 {}", s.acf1);
        assert!(s.ljung_box_p < 1e-10);
    }

    #[test]
    fn constant_series_is_an_error() {
        assert!(describe(&ts(&[2.0; 50]), 5).is_err());
        assert!(autocorrelation(&ts(&[2.0; 50]), 1).is_err());
    }

    #[test]
    fn acf_lag0_is_one_and_alternating_is_near_minus_one() {
        let s = ts(&[1.5, 2.5, 0.5, 2.0]);
        assert_eq!(autocorrelation(&s, 0).unwrap(), 1.0);
        let alt: Vec<f64> = (0..400).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r1 = autocorrelation(&ts(&alt), 1).unwrap();
        assert!((r1 - (-(399.0) / 400.0)).abs() < 1e-12);
    }

    #[test]
    fn iid_acf_within_bartlett_band() {
        let n = 10_000;
        let s = sim_gaussian(n, 0.0, 1.0, 8).unwrap();
        let r1 = autocorrelation(&s, 1).unwrap();
        assert!(r1.abs() < 3.0 / (n as f64).sqrt(), "acf1 {r1}");
    }

    #[test]
    fn ljung_box_zero_acf_gives_zero_q_unit_p() {
        // this pattern has exactly zero lag-1 sample autocovariance
        let s = ts(&[6.0, 5.0, 4.0, 5.0, 5.0]);
        let (q, p) = ljung_box(&s, 1).unwrap();
        assert!(q.abs() < 1e-14);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn ljung_box_nondecreasing_in_m() {
        let s = sim_ar1(300, 0.3, 1.0, 5).unwrap();
        let mut last = 0.0;
        for m in 1..=12 {
            let (q, _) = ljung_box(&s, m).unwrap();
            assert!(q >= last - 1e-12);
            last = q;
        }
    }

    #[test]
    fn ljung_box_size_and_power() {
        // size under IID
        let mut rejections = 0;
        for rep in 0..500 {
            let s = sim_gaussian(2000, 0.0, 1.0, 40_000 + rep).unwrap();
            let (_, p) = ljung_box(&s, 10).unwrap();
            if p < 0.05 {
                rejections += 1;
            }
        }
        let rate = rejections as f64 / 500.0;
        assert!((0.03..=0.08).contains(&rate), "size {rate}");

        // power against AR(1) phi = 0.5
        let mut detected = 0;
        for rep in 0..200 {
            let s = sim_ar1(500, 0.5, 1.0, 50_000 + rep).unwrap();
            let (_, p) = ljung_box(&s, 10).unwrap();
            if p < 0.01 {
                detected += 1;
            }
        }
        assert!(detected as f64 / 200.0 > 0.99, "power {detected}/200");
    }

    #[test]
    fn cross_correlation_identities() {
        let a = sim_gaussian(500, 0.0, 1.0, 1).unwrap();
        assert!((cross_correlation(&a, &a, 0).unwrap() - 1.0).abs() < 1e-12);
        let neg = TimeSeries::new(
            a.dates().to_vec(),
            a.values().iter().map(|v| -v).collect(),
        )
        .unwrap();
        assert!((cross_correlation(&a, &neg, 0).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cross_correlation_lag_symmetry() {
        let a = sim_gaussian(400, 0.0, 1.0, 2).unwrap();
        let b = sim_ar1(400, 0.5, 1.0, 3).unwrap();
        for lag in [-5i64, -1, 0, 1, 2, 7] {
            let x = cross_correlation(&a, &b, lag).unwrap();
            let y = cross_correlation(&b, &a, -lag).unwrap();
            assert!((x - y).abs() < 1e-12, "lag {lag}: {x} vs {y}");
        }
    }

    #[test]
    fn designed_cross_correlation_recovered() {
        // Gaussian pair with target correlation -0.61
        let rho: f64 = -0.61;
        let z1 = sim_gaussian(10_000, 0.0, 1.0, 11).unwrap();
        let z2 = sim_gaussian(10_000, 0.0, 1.0, 12).unwrap();
        let b_vals: Vec<f64> = z1
            .values()
            .iter()
            .zip(z2.values())
            .map(|(a, b)| rho * a + (1.0 - rho * rho).sqrt() * b)
            .collect();
        let b = TimeSeries::new(z1.dates().to_vec(), b_vals).unwrap();
        let c = cross_correlation(&z1, &b, 0).unwrap();
        assert!((c - rho).abs() < 0.03, "corr {c}");
    }

    #[test]
    fn zscore_arithmetic() {
        let (zs, zk) = moment_zscores(0.0, 3.0, 123);
        assert_eq!((zs, zk), (0.0, 0.0));
        let (zs, _) = moment_zscores(0.5, 3.0, 600);
        assert!((zs - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zscore_size_under_normality() {
        let mut exceed = 0;
        for rep in 0..500 {
            let s = describe(&sim_gaussian(1000, 0.0, 1.0, 90_000 + rep).unwrap(), 5).unwrap();
            let (zs, _) = moment_zscores(s.skewness, s.kurtosis, s.n);
            if zs.abs() > 1.96 {
                exceed += 1;
            }
        }
        let rate = exceed as f64 / 500.0;
        assert!((0.02..=0.09).contains(&rate), "skew z-score size {rate}");
    }
}
