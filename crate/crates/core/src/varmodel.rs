//! Vector autoregression estimation, lag-order selection, Granger causality,
//! and residual cross-correlations.
//!
//! Estimation is equation-by-equation OLS with intercepts, the efficient
//! estimator for an unrestricted VAR. Information criteria follow the
//! standard multivariate forms (Lütkepohl): AIC/SIC/FPE on the ML residual
//! covariance, plus the small-sample-corrected likelihood-ratio sequence.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::dist::{chi2_sf, f_sf};
use crate::error::{Error, Result};
use crate::linreg::{ols, Design, OlsFit, OlsOptions};
use crate::series::{Panel, TimeSeries};

/// Analysis default mirroring a common monthly-ish memory for daily changes.
pub const DEFAULT_VAR_LAG: usize = 8;

#[derive(Debug, Clone, Copy)]
pub struct EquationStats {
    pub r2: f64,
    pub adj_r2: f64,
    /// Overall F for all slope coefficients jointly zero.
    pub f_stat: f64,
    pub f_pvalue: f64,
}

#[derive(Debug, Clone)]
pub struct VarFit {
    pub p: usize,
    /// Column names, fixing the equation/variable order below.
    pub names: Vec<String>,
    pub intercepts: Vec<f64>,
    /// `lag_matrices[l-1][(i, j)]` = response of equation i to variable j
    /// at lag l.
    pub lag_matrices: Vec<DMatrix<f64>>,
    pub residuals: Panel,
    /// Residual covariance with T − Kp − 1 degrees-of-freedom correction.
    pub sigma: DMatrix<f64>,
    pub equation_stats: Vec<EquationStats>,
    /// Effective observations (panel length minus p).
    pub nobs: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LagCriteria {
    pub p: usize,
    pub aic: f64,
    pub sic: f64,
    pub fpe: f64,
    /// Tests lag p against p−1 with the (T − Kp) correction, χ²(K²).
    pub lr_stat: f64,
    pub lr_pvalue: f64,
}

#[derive(Debug, Clone)]
pub struct LagSelection {
    pub rows: Vec<LagCriteria>,
    /// Per criterion ("aic", "sic", "fpe", "lr"): the chosen order.
    /// Information criteria choose the argmin over 1..=p_max; the LR scan
    /// runs downward and picks the largest significant p (0 if none).
    pub chosen: BTreeMap<&'static str, usize>,
    /// Common estimation sample shared by every candidate order.
    pub t_effective: usize,
}

#[derive(Debug, Clone)]
pub struct GrangerResult {
    pub cause: String,
    pub effect: String,
    pub p: usize,
    pub f_stat: f64,
    pub p_value: f64,
}

fn column_index(panel: &Panel, name: &str) -> Result<usize> {
    panel
        .names()
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::Invalid(format!("no column named '{name}'")))
}

/// Lagged design shared by the fits: response rows are observations
/// `start..T`, regressors are lags 1..=p of the chosen columns.
fn lagged_design(panel: &Panel, columns: &[usize], p: usize, start: usize) -> Design {
    let mut design = Design::new();
    for l in 1..=p {
        for &j in columns {
            let name = format!("{}.L{l}", panel.names()[j]);
            let col: Vec<f64> = (start..panel.len())
                .map(|t| panel.columns()[j][t - l])
                .collect();
            design = design.col(&name, col);
        }
    }
    design
}

fn response(panel: &Panel, j: usize, start: usize) -> Result<TimeSeries> {
    TimeSeries::new(
        panel.dates()[start..].to_vec(),
        panel.columns()[j][start..].to_vec(),
    )
}

fn equation_fit(panel: &Panel, eq: usize, p: usize, start: usize) -> Result<OlsFit> {
    let all: Vec<usize> = (0..panel.width()).collect();
    let design = lagged_design(panel, &all, p, start);
    ols(&response(panel, eq, start)?, &design, &OlsOptions::default())
}

/// VAR(p) by equation-wise OLS with intercepts.
pub fn var_fit(panel: &Panel, p: usize) -> Result<VarFit> {
    let k = panel.width();
    let t = panel.len();
    if p == 0 {
        return Err(Error::Invalid("lag order must be >= 1".into()));
    }
    if t <= k * p + k + 10 {
        return Err(Error::Insufficient(format!(
            "panel length {t} too short for VAR({p}) on {k} columns (need > {})",
            k * p + k + 10
        )));
    }
    let t_eff = t - p;
    let mut intercepts = Vec::with_capacity(k);
    let mut lag_matrices = vec![DMatrix::zeros(k, k); p];
    let mut resid_cols: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut equation_stats = Vec::with_capacity(k);

    for eq in 0..k {
        let fit = equation_fit(panel, eq, p, p)?;
        intercepts.push(fit.coefficients[0]);
        for l in 0..p {
            for j in 0..k {
                lag_matrices[l][(eq, j)] = fit.coefficients[1 + l * k + j];
            }
        }
        let n = fit.nobs as f64;
        let kk = fit.names.len() as f64; // Kp + 1
        let f_stat = if fit.rss > 0.0 {
            ((fit.tss - fit.rss) / (kk - 1.0)) / (fit.rss / (n - kk))
        } else {
            f64::INFINITY
        };
        equation_stats.push(EquationStats {
            r2: fit.r2,
            adj_r2: fit.adj_r2,
            f_stat,
            f_pvalue: f_sf(f_stat, kk - 1.0, n - kk),
        });
        resid_cols.push(fit.residuals.values().to_vec());
    }

    let dof = (t_eff as isize - (k * p) as isize - 1).max(1) as f64;
    let mut sigma = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let s: f64 = resid_cols[i]
                .iter()
                .zip(&resid_cols[j])
                .map(|(a, b)| a * b)
                .sum();
            sigma[(i, j)] = s / dof;
            sigma[(j, i)] = sigma[(i, j)];
        }
    }
    let residuals = Panel::new(
        panel.dates()[p..].to_vec(),
        panel.names().to_vec(),
        resid_cols,
    )?;
    Ok(VarFit {
        p,
        names: panel.names().to_vec(),
        intercepts,
        lag_matrices,
        residuals,
        sigma,
        equation_stats,
        nobs: t_eff,
    })
}

/// ln det of the ML residual covariance (divide by T) for order `p` on the
/// common sample starting at `start`; p = 0 is the intercepts-only model.
fn ml_logdet(panel: &Panel, p: usize, start: usize) -> Result<f64> {
    let k = panel.width();
    let t_eff = panel.len() - start;
    let mut resid: Vec<Vec<f64>> = Vec::with_capacity(k);
    for eq in 0..k {
        if p == 0 {
            let y = &panel.columns()[eq][start..];
            let mean = y.iter().sum::<f64>() / t_eff as f64;
            resid.push(y.iter().map(|v| v - mean).collect());
        } else {
            let fit = equation_fit(panel, eq, p, start)?;
            resid.push(fit.residuals.values().to_vec());
        }
    }
    let mut sigma = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            sigma[(i, j)] = resid[i]
                .iter()
                .zip(&resid[j])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / t_eff as f64;
        }
    }
    let det = sigma.determinant();
    if !(det > 0.0) {
        return Err(Error::Numeric(format!(
            "residual covariance determinant {det:e} not positive at p = {p}"
        )));
    }
    Ok(det.ln())
}

/// Computes AIC/SIC/FPE and the downward LR sequence for orders 1..=p_max,
/// all on the identical p_max-truncated sample so values are comparable.
pub fn lag_select(panel: &Panel, p_max: usize) -> Result<LagSelection> {
    let k = panel.width();
    let t = panel.len();
    if p_max == 0 {
        return Err(Error::Invalid("p_max must be >= 1".into()));
    }
    if t <= k * p_max + k + 10 {
        return Err(Error::Insufficient(format!(
            "panel length {t} too short for p_max = {p_max} on {k} columns"
        )));
    }
    let t_eff = (t - p_max) as f64;
    let kf = k as f64;
    let logdets: Vec<f64> = (0..=p_max)
        .map(|p| ml_logdet(panel, p, p_max))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let ld = logdets[p];
        let params = (p * k * k) as f64;
        let m = (k * p) as f64; // per-equation lag coefficients
        let lr = (t_eff - kf * p as f64) * (logdets[p - 1] - ld);
        rows.push(LagCriteria {
            p,
            aic: ld + 2.0 * params / t_eff,
            sic: ld + t_eff.ln() * params / t_eff,
            fpe: ((t_eff + m + 1.0) / (t_eff - m - 1.0)).powf(kf) * ld.exp(),
            lr_stat: lr.max(0.0),
            lr_pvalue: chi2_sf(lr.max(0.0), kf * kf),
        });
    }

    let argmin = |f: &dyn Fn(&LagCriteria) -> f64| -> usize {
        rows.iter()
            .min_by(|a, b| f(a).total_cmp(&f(b)))
            .map(|r| r.p)
            .unwrap()
    };
    let mut chosen = BTreeMap::new();
    chosen.insert("aic", argmin(&|r: &LagCriteria| r.aic));
    chosen.insert("sic", argmin(&|r: &LagCriteria| r.sic));
    chosen.insert("fpe", argmin(&|r: &LagCriteria| r.fpe));
    let lr_pick = rows
        .iter()
        .rev()
        .find(|r| r.lr_pvalue < 0.05)
        .map_or(0, |r| r.p);
    chosen.insert("lr", lr_pick);

    Ok(LagSelection {
        rows,
        chosen,
        t_effective: t_eff as usize,
    })
}

/// F-test of whether `cause`'s p lags improve the `effect` equation, with
/// every other column's lags kept in both the restricted and unrestricted
/// regressions (full-system conditioning).
pub fn granger_test(
    panel: &Panel,
    cause: &str,
    effect: &str,
    p: usize,
) -> Result<GrangerResult> {
    if p == 0 {
        return Err(Error::Invalid("granger test needs p >= 1".into()));
    }
    if cause == effect {
        return Err(Error::Invalid(
            "cause and effect are the same column".into(),
        ));
    }
    let ci = column_index(panel, cause)?;
    let ei = column_index(panel, effect)?;
    let k = panel.width();
    let t = panel.len();
    if t <= k * p + k + 10 {
        return Err(Error::Insufficient(format!(
            "panel length {t} too short for granger test at p = {p}"
        )));
    }
    let y = response(panel, ei, p)?;
    let all: Vec<usize> = (0..k).collect();
    let without: Vec<usize> = (0..k).filter(|j| *j != ci).collect();
    let unrestricted = ols(
        &y,
        &lagged_design(panel, &all, p, p),
        &OlsOptions::default(),
    )?;
    let restricted = ols(
        &y,
        &lagged_design(panel, &without, p, p),
        &OlsOptions::default(),
    )?;
    let t_eff = unrestricted.nobs as f64;
    let m = unrestricted.names.len() as f64; // Kp + 1
    let f_stat =
        (((restricted.rss - unrestricted.rss) / p as f64) / (unrestricted.rss / (t_eff - m)))
            .max(0.0);
    Ok(GrangerResult {
        cause: cause.to_string(),
        effect: effect.to_string(),
        p,
        f_stat,
        p_value: f_sf(f_stat, p as f64, t_eff - m),
    })
}

/// Pearson correlations of the fit's residual columns; the diagonal is
/// exactly 1.
pub fn residual_correlations(fit: &VarFit) -> Result<DMatrix<f64>> {
    let k = fit.residuals.width();
    if k < 2 {
        return Err(Error::Invalid(
            "residual correlations need >= 2 columns".into(),
        ));
    }
    let cols = fit.residuals.columns();
    let n = fit.residuals.len() as f64;
    let means: Vec<f64> = cols.iter().map(|c| c.iter().sum::<f64>() / n).collect();
    let sds: Vec<f64> = cols
        .iter()
        .zip(&means)
        .map(|(c, m)| (c.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt())
        .collect();
    if let Some(i) = sds.iter().position(|s| *s == 0.0) {
        return Err(Error::Invalid(format!(
            "residual column '{}' is degenerate",
            fit.residuals.names()[i]
        )));
    }
    let mut out = DMatrix::identity(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let cov = cols[i]
                .iter()
                .zip(&cols[j])
                .map(|(a, b)| (a - means[i]) * (b - means[j]))
                .sum::<f64>()
                / n;
            let r = cov / (sds[i] * sds[j]);
            out[(i, j)] = r;
            out[(j, i)] = r;
        }
    }
    Ok(out)
}
