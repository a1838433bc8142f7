//! Least-squares engine and the toolkit's named regressions.
//!
//! The solver runs on a QR factorization (never explicit normal equations,
//! which only appear as a test oracle). Standard errors are classical by
//! default; Newey-West HAC with Bartlett weights is available via
//! `hac_lags` (0 lags = White heteroskedasticity-robust).

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use nalgebra::{DMatrix, DVector};

use crate::dist::{chi2_sf, t_pvalue};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Named regressor columns; the intercept is added by [`OlsOptions`], not here.
#[derive(Debug, Clone, Default)]
pub struct Design {
    names: Vec<String>,
    cols: Vec<Vec<f64>>,
}

impl Design {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn col(mut self, name: &str, values: Vec<f64>) -> Self {
        self.names.push(name.to_string());
        self.cols.push(values);
        self
    }

    pub fn width(&self) -> usize {
        self.cols.len()
    }
}

#[derive(Debug, Clone)]
pub struct OlsOptions {
    pub intercept: bool,
    /// None = classical errors; Some(L) = Newey-West with Bartlett weights
    /// over L lags (L = 0 reduces to White's estimator).
    pub hac_lags: Option<usize>,
}

impl Default for OlsOptions {
    fn default() -> Self {
        Self {
            intercept: true,
            hac_lags: None,
        }
    }
}

/// A fitted least-squares regression.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r2: f64,
    pub adj_r2: f64,
    pub residuals: TimeSeries,
    pub nobs: usize,
    /// Coefficient covariance consistent with `std_errors`.
    pub cov: DMatrix<f64>,
    pub rss: f64,
    pub tss: f64,
    /// Whether an intercept column was included (first position if so).
    pub has_intercept: bool,
}

impl OlsFit {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(self.coefficients[i])
    }

    /// Position of a named regressor, for indexing into `std_errors`,
    /// `t_stats`, or `cov`.
    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Residual degrees of freedom n - k.
    pub fn dof(&self) -> usize {
        self.nobs - self.names.len()
    }
}

/// OLS of `y` on `design` (plus intercept per options).
pub fn ols(y: &TimeSeries, design: &Design, options: &OlsOptions) -> Result<OlsFit> {
    let n = y.len();
    for (name, c) in design.names.iter().zip(&design.cols) {
        if c.len() != n {
            return Err(Error::Invalid(format!(
                "regressor '{name}' has {} rows, y has {n}",
                c.len()
            )));
        }
    }
    let mut names: Vec<String> = Vec::new();
    if options.intercept {
        names.push("const".into());
    }
    names.extend(design.names.iter().cloned());
    let k = names.len();
    if k == 0 {
        return Err(Error::Invalid("empty design".into()));
    }
    if n <= k {
        return Err(Error::Insufficient(format!(
            "ols needs n > k (n = {n}, k = {k})"
        )));
    }

    let x = DMatrix::from_fn(n, k, |i, j| {
        if options.intercept {
            if j == 0 {
                1.0
            } else {
                design.cols[j - 1][i]
            }
        } else {
            design.cols[j][i]
        }
    });
    let yv = DVector::from_column_slice(y.values());

    let qr = x.clone().qr();
    let r = qr.r();
    // rank check on the R diagonal
    let diag: Vec<f64> = (0..k).map(|i| r[(i, i)].abs()).collect();
    let dmax = diag.iter().copied().fold(0.0f64, f64::max);
    let bad: Vec<&str> = diag
        .iter()
        .enumerate()
        .filter(|(_, d)| **d < 1e-10 * dmax)
        .map(|(i, _)| names[i].as_str())
        .collect();
    if !bad.is_empty() {
        return Err(Error::RankDeficient(format!(
            "columns [{}] are linearly dependent",
            bad.join(", ")
        )));
    }

    let qty = qr.q().transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Numeric("triangular solve failed".into()))?;
    let fitted = &x * &beta;
    let resid = &yv - &fitted;
    let rss: f64 = resid.dot(&resid);
    let tss: f64 = if options.intercept {
        let ybar = yv.mean();
        yv.iter().map(|v| (v - ybar) * (v - ybar)).sum()
    } else {
        yv.dot(&yv)
    };
    if tss == 0.0 {
        return Err(Error::Invalid("response is constant".into()));
    }

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::Numeric("R inversion failed".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();

    let dof = (n - k) as f64;
    let cov = match options.hac_lags {
        None => {
            let s2 = rss / dof;
            s2 * xtx_inv.clone()
        }
        Some(lags) => {
            if lags >= n {
                return Err(Error::Invalid(format!(
                    "hac_lags = {lags} must be < n = {n}"
                )));
            }
            let mut meat = DMatrix::zeros(k, k);
            for t in 0..n {
                let xt = x.row(t).transpose();
                meat += resid[t] * resid[t] * &xt * xt.transpose();
            }
            for l in 1..=lags {
                let w = 1.0 - l as f64 / (lags as f64 + 1.0);
                let mut gamma = DMatrix::zeros(k, k);
                for t in l..n {
                    let xt = x.row(t).transpose();
                    let xl = x.row(t - l).transpose();
                    gamma += resid[t] * resid[t - l] * &xt * xl.transpose();
                }
                meat += w * (&gamma + gamma.transpose());
            }
            &xtx_inv * meat * &xtx_inv
        }
    };

    let std_errors: Vec<f64> = (0..k).map(|i| cov[(i, i)].max(0.0).sqrt()).collect();
    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let t_stats: Vec<f64> = coefficients
        .iter()
        .zip(&std_errors)
        .map(|(b, s)| b / s)
        .collect();
    let p_values: Vec<f64> = t_stats.iter().map(|t| t_pvalue(*t, dof)).collect();

    let r2 = 1.0 - rss / tss;
    let centered = if options.intercept { 1.0 } else { 0.0 };
    let adj_r2 = 1.0 - (1.0 - r2) * (n as f64 - centered) / dof;

    Ok(OlsFit {
        names,
        coefficients,
        std_errors,
        t_stats,
        p_values,
        r2,
        adj_r2,
        residuals: TimeSeries::new(y.dates().to_vec(), resid.iter().copied().collect())?,
        nobs: n,
        cov,
        rss,
        tss,
        has_intercept: options.intercept,
    })
}

// ---- date joins ------------------------------------------------------------

fn join2(a: &TimeSeries, b: &TimeSeries) -> (Vec<NaiveDate>, Vec<f64>, Vec<f64>) {
    let bm: BTreeMap<_, _> = b.iter().collect();
    let mut dates = Vec::new();
    let (mut va, mut vb) = (Vec::new(), Vec::new());
    for (d, x) in a.iter() {
        if let Some(y) = bm.get(&d) {
            dates.push(d);
            va.push(x);
            vb.push(*y);
        }
    }
    (dates, va, vb)
}

fn join3(
    a: &TimeSeries,
    b: &TimeSeries,
    c: &TimeSeries,
) -> (Vec<NaiveDate>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let bm: BTreeMap<_, _> = b.iter().collect();
    let cm: BTreeMap<_, _> = c.iter().collect();
    let mut dates = Vec::new();
    let (mut va, mut vb, mut vc) = (Vec::new(), Vec::new(), Vec::new());
    for (d, x) in a.iter() {
        if let (Some(y), Some(z)) = (bm.get(&d), cm.get(&d)) {
            dates.push(d);
            va.push(x);
            vb.push(*y);
            vc.push(*z);
        }
    }
    (dates, va, vb, vc)
}

fn sample_corr(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

// ---- named regressions ------------------------------------------------------

/// Regression of a change series on five weekday dummies (no intercept), so
/// each coefficient is exactly the weekday's sample mean.
pub fn day_of_week_regression(delta_series: &TimeSeries) -> Result<OlsFit> {
    const DAYS: [&str; 5] = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday"];
    let n = delta_series.len();
    if n < 25 {
        return Err(Error::Insufficient(
            "day-of-week regression needs length >= 25".into(),
        ));
    }
    let mut dummies = vec![vec![0.0; n]; 5];
    for (i, d) in delta_series.dates().iter().enumerate() {
        let w = d.weekday().num_days_from_monday() as usize;
        if w >= 5 {
            return Err(Error::Invalid(format!("weekend observation at {d}")));
        }
        dummies[w][i] = 1.0;
    }
    for (j, col) in dummies.iter().enumerate() {
        if col.iter().all(|&v| v == 0.0) {
            return Err(Error::Invalid(format!("no {} in sample", DAYS[j])));
        }
    }
    let mut design = Design::new();
    for (name, col) in DAYS.iter().zip(dummies) {
        design = design.col(name, col);
    }
    ols(
        delta_series,
        &design,
        &OlsOptions {
            intercept: false,
            hac_lags: None,
        },
    )
}

/// Asymmetry regression of index changes on returns.
#[derive(Debug, Clone)]
pub struct LeverageFit {
    pub base: OlsFit,
    /// Total impact of a positive return move: beta0 + beta0_av.
    pub beta0_plus: f64,
    pub beta0_plus_se: f64,
    /// Total impact of a negative return move: beta0 - beta0_av.
    pub beta0_minus: f64,
    pub beta0_minus_se: f64,
}

/// Regressor labels used by [`leverage_regression`].
pub const LEVERAGE_REGRESSORS: [&str; 7] = [
    "r[t-2]", "r[t-1]", "r[t]", "|r[t]|", "r[t+1]", "r[t+2]", "dvol[t-1]",
];

/// Regresses volatility changes on an intercept, two return lags, the
/// contemporaneous return and its absolute value, two return leads, and one
/// lag of the dependent variable. The contemporaneous pair is folded into
/// one-sided impacts `beta0_plus = b0 + b0_av` (positive return days) and
/// `beta0_minus = b0 - b0_av` (negative days), with standard errors from the
/// coefficient covariance.
pub fn leverage_regression(d_log_imp: &TimeSeries, returns: &TimeSeries) -> Result<LeverageFit> {
    let (dates, dvol, r) = join2(d_log_imp, returns);
    let n = dates.len();
    if n < 34 {
        return Err(Error::Insufficient(format!(
            "leverage regression needs >= 30 usable rows after leads/lags (aligned = {n})"
        )));
    }
    // usable window: t = 2 .. n-3 (two lags, two leads, one dvol lag)
    let idx: Vec<usize> = (2..n - 2).collect();
    let take = |f: &dyn Fn(usize) -> f64| idx.iter().map(|&t| f(t)).collect::<Vec<f64>>();
    let cols: [Vec<f64>; 7] = [
        take(&|t| r[t - 2]),
        take(&|t| r[t - 1]),
        take(&|t| r[t]),
        take(&|t| r[t].abs()),
        take(&|t| r[t + 1]),
        take(&|t| r[t + 2]),
        take(&|t| dvol[t - 1]),
    ];
    let y = TimeSeries::new(
        idx.iter().map(|&t| dates[t]).collect(),
        idx.iter().map(|&t| dvol[t]).collect(),
    )?;
    let mut design = Design::new();
    for (name, col) in LEVERAGE_REGRESSORS.iter().zip(cols) {
        design = design.col(name, col);
    }
    let base = ols(&y, &design, &OlsOptions::default())?;

    let i0 = base.index("r[t]").expect("present");
    let iav = base.index("|r[t]|").expect("present");
    let (b0, bav) = (base.coefficients[i0], base.coefficients[iav]);
    let (v0, vav, c) = (
        base.cov[(i0, i0)],
        base.cov[(iav, iav)],
        base.cov[(i0, iav)],
    );
    Ok(LeverageFit {
        beta0_plus: b0 + bav,
        beta0_plus_se: (v0 + vav + 2.0 * c).max(0.0).sqrt(),
        beta0_minus: b0 - bav,
        beta0_minus_se: (v0 + vav - 2.0 * c).max(0.0).sqrt(),
        base,
    })
}

/// Forecast-evaluation regression: realized on forecast, with a joint Wald
/// test of unbiasedness (intercept 0, slope 1).
#[derive(Debug, Clone)]
pub struct ForecastFit {
    pub base: OlsFit,
    /// Wald statistic for (intercept, slope) = (0, 1), chi-square(2).
    pub wald_stat: f64,
    pub wald_pvalue: f64,
}

pub fn forecast_regression(rv: &TimeSeries, forecaster: &TimeSeries) -> Result<ForecastFit> {
    let (dates, y, x) = join2(rv, forecaster);
    if dates.len() < 10 {
        return Err(Error::Insufficient(format!(
            "forecast regression needs >= 10 aligned rows, got {}",
            dates.len()
        )));
    }
    if x.iter().all(|v| *v == x[0]) {
        return Err(Error::Invalid("constant forecaster".into()));
    }
    let yts = TimeSeries::new(dates, y)?;
    let design = Design::new().col("forecast", x);
    let base = ols(&yts, &design, &OlsOptions::default())?;

    // Wald test of (a, b) = (0, 1) using the 2x2 coefficient covariance.
    let d = DVector::from_column_slice(&[base.coefficients[0], base.coefficients[1] - 1.0]);
    let w = if base.rss <= 1e-20 * base.tss {
        // numerically perfect fit: the covariance degenerates, but the
        // hypothesis either holds exactly or fails deterministically
        if d.norm() <= 1e-8 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        let vinv = base
            .cov
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numeric("singular coefficient covariance".into()))?;
        (d.transpose() * vinv * d)[(0, 0)]
    };
    Ok(ForecastFit {
        wald_stat: w,
        wald_pvalue: chi2_sf(w, 2.0),
        base,
    })
}

/// Encompassing regression of realized volatility on two competing
/// forecasters (plus intercept). Errors if the forecasters are collinear
/// (|correlation| > 0.9999).
pub fn encompassing_regression(
    rv: &TimeSeries,
    f1: &TimeSeries,
    f2: &TimeSeries,
) -> Result<OlsFit> {
    let (dates, y, x1, x2) = join3(rv, f1, f2);
    if dates.len() < 10 {
        return Err(Error::Insufficient(format!(
            "encompassing regression needs >= 10 aligned rows, got {}",
            dates.len()
        )));
    }
    let corr = sample_corr(&x1, &x2);
    if !corr.is_finite() || corr.abs() > 0.9999 {
        return Err(Error::Invalid(format!(
            "forecasters are collinear (correlation {corr:.6})"
        )));
    }
    let yts = TimeSeries::new(dates, y)?;
    let design = Design::new().col("f1", x1).col("f2", x2);
    ols(&yts, &design, &OlsOptions::default())
}
