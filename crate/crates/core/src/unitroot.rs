//! Augmented Dickey-Fuller and KPSS stationarity tests.
//!
//! Both tests report decisions at the 1%/5%/10% levels against embedded
//! asymptotic critical values (Dickey-Fuller 1981 response-surface values as
//! tabulated by MacKinnon; Kwiatkowski-Phillips-Schmidt-Shin 1992 Table 1).
//! P-value interpolation is deliberately out of scope. The embedded tables
//! are themselves validated by a large Monte Carlo in the integration tests.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linreg::{ols, Design, OlsOptions};
use crate::series::TimeSeries;

/// Deterministic terms included in the ADF regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendSpec {
    None,
    Constant,
    ConstantTrend,
}

impl fmt::Display for TrendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrendSpec::None => "none",
            TrendSpec::Constant => "constant",
            TrendSpec::ConstantTrend => "constant+trend",
        })
    }
}

/// How the augmentation order p is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Use exactly `max_lags` augmentation lags.
    Fixed,
    /// Minimize the Schwarz criterion over p = 0..=max_lags on a common
    /// estimation sample, then re-fit the winner on its maximal sample.
    Schwarz,
}

/// Lags mirroring common practice for the tests in this module.
pub const DEFAULT_MAX_LAGS: usize = 8;

/// Significance levels, in display order.
pub const LEVELS: [&str; 3] = ["1%", "5%", "10%"];

// Asymptotic 1%/5%/10% critical values.
const ADF_CV_NONE: [f64; 3] = [-2.565, -1.941, -1.617];
const ADF_CV_CONSTANT: [f64; 3] = [-3.434, -2.862, -2.567];
const ADF_CV_TREND: [f64; 3] = [-3.963, -3.413, -3.128];
const KPSS_CV_LEVEL: [f64; 3] = [0.739, 0.463, 0.347];

/// Critical values used by [`adf_test`] for a trend specification.
pub fn adf_critical_values(trend: TrendSpec) -> [f64; 3] {
    match trend {
        TrendSpec::None => ADF_CV_NONE,
        TrendSpec::Constant => ADF_CV_CONSTANT,
        TrendSpec::ConstantTrend => ADF_CV_TREND,
    }
}

/// Critical values used by [`kpss_test`] (level stationarity).
pub fn kpss_critical_values() -> [f64; 3] {
    KPSS_CV_LEVEL
}

#[derive(Debug, Clone)]
pub struct UnitRootResult {
    pub statistic: f64,
    /// ADF: augmentation lags in the final regression. KPSS: Bartlett
    /// bandwidth used for the long-run variance.
    pub lags_used: usize,
    pub trend_spec: TrendSpec,
    pub critical_values: BTreeMap<&'static str, f64>,
    pub reject_at: BTreeMap<&'static str, bool>,
}

fn decision_maps(
    statistic: f64,
    cvs: [f64; 3],
    reject: impl Fn(f64, f64) -> bool,
) -> (BTreeMap<&'static str, f64>, BTreeMap<&'static str, bool>) {
    let mut critical_values = BTreeMap::new();
    let mut reject_at = BTreeMap::new();
    for (level, cv) in LEVELS.iter().zip(cvs) {
        critical_values.insert(*level, cv);
        reject_at.insert(*level, reject(statistic, cv));
    }
    (critical_values, reject_at)
}

/// One ADF regression at augmentation order `p` on observations
/// `start..n_dy` of the difference series; returns (t-ratio of the level
/// coefficient, Schwarz criterion).
fn adf_regression(
    dates: &[chrono::NaiveDate],
    y: &[f64],
    dy: &[f64],
    p: usize,
    start: usize,
    trend: TrendSpec,
) -> Result<(f64, f64)> {
    let n_dy = dy.len();
    let idx: Vec<usize> = (start..n_dy).collect();
    let resp = TimeSeries::new(
        idx.iter().map(|&i| dates[i + 1]).collect(),
        idx.iter().map(|&i| dy[i]).collect(),
    )?;
    let mut design = Design::new().col("y.L1", idx.iter().map(|&i| y[i]).collect());
    for j in 1..=p {
        design = design.col(
            &format!("d.L{j}"),
            idx.iter().map(|&i| dy[i - j]).collect(),
        );
    }
    if trend == TrendSpec::ConstantTrend {
        design = design.col("trend", idx.iter().map(|&i| i as f64).collect());
    }
    let options = OlsOptions {
        intercept: trend != TrendSpec::None,
        hac_lags: None,
    };
    let fit = ols(&resp, &design, &options)?;
    let t = fit.t_stats[if options.intercept { 1 } else { 0 }];
    let n_eff = fit.nobs as f64;
    let k = fit.names.len() as f64;
    let sic = (fit.rss / n_eff).ln() + k * n_eff.ln() / n_eff;
    Ok((t, sic))
}

/// Augmented Dickey-Fuller test: Δyₜ regressed on yₜ₋₁, p lagged
/// differences, and the chosen deterministic terms. The null of a unit root
/// is rejected when the t-ratio falls below the critical value.
pub fn adf_test(
    series: &TimeSeries,
    max_lags: usize,
    selection: Selection,
    trend: TrendSpec,
) -> Result<UnitRootResult> {
    let n = series.len();
    if n <= max_lags + 10 {
        return Err(Error::Insufficient(format!(
            "adf needs length > max_lags + 10 ({} <= {})",
            n,
            max_lags + 10
        )));
    }
    let y = series.values();
    let dates = series.dates();
    let dy: Vec<f64> = (1..n).map(|t| y[t] - y[t - 1]).collect();

    let p = match selection {
        Selection::Fixed => max_lags,
        Selection::Schwarz => {
            // all candidate orders compete on the same (most truncated) sample
            let mut best = (0usize, f64::INFINITY);
            for cand in 0..=max_lags {
                let (_, sic) = adf_regression(dates, y, &dy, cand, max_lags, trend)?;
                if sic < best.1 {
                    best = (cand, sic);
                }
            }
            best.0
        }
    };
    let (statistic, _) = adf_regression(dates, y, &dy, p, p, trend)?;
    let (critical_values, reject_at) =
        decision_maps(statistic, adf_critical_values(trend), |s, cv| s < cv);
    Ok(UnitRootResult {
        statistic,
        lags_used: p,
        trend_spec: trend,
        critical_values,
        reject_at,
    })
}

/// KPSS level-stationarity test: η = T⁻² Σ Sₜ² / s²(ℓ) with Sₜ the partial
/// sums of the demeaned series and s²(ℓ) the Bartlett long-run variance.
/// `bandwidth = None` uses the automatic rule floor(4·(T/100)^0.25). The
/// null of stationarity is rejected when η exceeds the critical value.
pub fn kpss_test(series: &TimeSeries, bandwidth: Option<usize>) -> Result<UnitRootResult> {
    let n = series.len();
    if n <= 20 {
        return Err(Error::Insufficient(format!(
            "kpss needs length > 20, got {n}"
        )));
    }
    let t = n as f64;
    let ell = bandwidth.unwrap_or_else(|| (4.0 * (t / 100.0).powf(0.25)).floor() as usize);
    if ell >= n {
        return Err(Error::Invalid(format!(
            "bandwidth {ell} must be < length {n}"
        )));
    }
    let mean = series.values().iter().sum::<f64>() / t;
    let e: Vec<f64> = series.values().iter().map(|v| v - mean).collect();
    if e.iter().all(|v| v.abs() < 1e-300) {
        return Err(Error::Invalid("constant series".into()));
    }
    let mut s2 = e.iter().map(|v| v * v).sum::<f64>() / t;
    for l in 1..=ell {
        let w = 1.0 - l as f64 / (ell as f64 + 1.0);
        let gamma: f64 = (l..n).map(|i| e[i] * e[i - l]).sum::<f64>() / t;
        s2 += 2.0 * w * gamma;
    }
    if s2 <= 0.0 {
        return Err(Error::Numeric(format!(
            "long-run variance is non-positive ({s2:e})"
        )));
    }
    let mut partial = 0.0;
    let mut num = 0.0;
    for v in &e {
        partial += v;
        num += partial * partial;
    }
    let statistic = num / (t * t) / s2;
    let (critical_values, reject_at) =
        decision_maps(statistic, kpss_critical_values(), |s, cv| s > cv);
    Ok(UnitRootResult {
        statistic,
        lags_used: ell,
        trend_spec: TrendSpec::Constant,
        critical_values,
        reject_at,
    })
}
