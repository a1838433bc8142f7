//! One function per subcommand. Each loads its inputs through the run
//! configuration, delegates to the library, and renders one or more tables.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use nalgebra::DMatrix;
use volmetrics::garch::{
    garch_apply, garch_fit, garch_forecast, GarchFit, GarchModel, GarchSpec,
};
use volmetrics::linreg::{
    day_of_week_regression, encompassing_regression, forecast_regression, leverage_regression,
    OlsFit,
};
use volmetrics::series::{align, AlignPolicy};
use volmetrics::simulate::{
    sim_ar1, sim_garch, sim_gaussian, sim_leverage, sim_var, DEFAULT_BURN_IN,
};
use volmetrics::stats::{cross_correlation, describe as describe_series, SummaryStats};
use volmetrics::unitroot::{adf_test, kpss_test, Selection, TrendSpec, UnitRootResult};
use volmetrics::varmodel::{granger_test, lag_select, residual_correlations, var_fit};
use volmetrics::vol::{
    implied_horizon, realized_vol, riskmetrics, riskmetrics_horizon, Sampling, VarianceInit,
    VolForecast,
};
use volmetrics::volindex::{
    blend_index, index_level, interpolate_skew, load_chains, load_skews, IndexOptions,
    IndexQuote, OptionChain, SkewCurve, Weighting,
};
use volmetrics::{Error, TimeSeries};

use crate::config::{Role, RunConfig};
use crate::errors::{CliError, CliResult};
use crate::table::{Cell, Table};

// ---- describe ----------------------------------------------------------------

fn change_label(role: Role) -> &'static str {
    match role {
        Role::Index => "diff",
        Role::Price => "return",
    }
}

fn summary_row(t: &mut Table, name: &str, transform: &str, s: &SummaryStats) {
    t.row(vec![
        Cell::str(name),
        Cell::str(transform),
        Cell::Int(s.n as i64),
        Cell::Num(s.mean),
        Cell::Num(s.stdev),
        Cell::Num(s.min),
        Cell::Num(s.max),
        Cell::Num(s.skewness),
        Cell::Num(s.kurtosis),
        Cell::Num(s.acf1),
        Cell::Num(s.acf2),
        Cell::Num(s.ljung_box_q),
        Cell::Num(s.ljung_box_p),
    ]);
}

pub fn describe(cfg: &RunConfig) -> CliResult<Vec<Table>> {
    let specs = cfg.require_series()?;
    let mut t = Table::new(
        "descriptive statistics",
        &[
            "series", "transform", "n", "mean", "stdev", "min", "max", "skewness", "kurtosis",
            "acf1", "acf2", "lb_q", "lb_p",
        ],
    );
    let mut changes: Vec<(String, TimeSeries)> = Vec::new();
    for spec in specs {
        let level = cfg.load(spec)?;
        summary_row(&mut t, &spec.name, "level", &describe_series(&level, cfg.lb_lags)?);
        let ch = cfg.load_changes(spec)?;
        summary_row(
            &mut t,
            &spec.name,
            change_label(spec.role),
            &describe_series(&ch, cfg.lb_lags)?,
        );
        changes.push((spec.name.clone(), ch));
    }
    let mut out = vec![t];
    if changes.len() >= 2 {
        let mut c = Table::new(
            "cross-correlations of changes (lag 0)",
            &["a", "b", "correlation"],
        );
        for i in 0..changes.len() {
            for j in i + 1..changes.len() {
                let r = cross_correlation(&changes[i].1, &changes[j].1, 0)?;
                c.row(vec![
                    Cell::str(&changes[i].0),
                    Cell::str(&changes[j].0),
                    Cell::Num(r),
                ]);
            }
        }
        out.push(c);
    }
    Ok(out)
}

// ---- unitroot ----------------------------------------------------------------

pub struct UnitrootArgs {
    pub max_lags: Option<usize>,
    pub selection: Selection,
    pub trend: TrendSpec,
    pub bandwidth: Option<usize>,
}

fn strongest_rejection(r: &UnitRootResult) -> &'static str {
    for level in ["1%", "5%", "10%"] {
        if r.reject_at[level] {
            return level;
        }
    }
    "no"
}

pub fn unitroot(cfg: &RunConfig, args: &UnitrootArgs) -> CliResult<Vec<Table>> {
    let specs = cfg.require_series()?;
    let max_lags = args.max_lags.unwrap_or(cfg.max_lags);
    let mut t = Table::new(
        "unit-root tests",
        &[
            "series", "transform", "adf_stat", "adf_lags", "adf_reject", "kpss_stat", "kpss_bw",
            "kpss_reject",
        ],
    );
    for spec in specs {
        let level = cfg.load(spec)?;
        let ch = cfg.load_changes(spec)?;
        for (transform, s) in [("level", &level), (change_label(spec.role), &ch)] {
            let adf = adf_test(s, max_lags, args.selection, args.trend)?;
            let kpss = kpss_test(s, args.bandwidth)?;
            t.row(vec![
                Cell::str(&spec.name),
                Cell::str(transform),
                Cell::Num(adf.statistic),
                Cell::Int(adf.lags_used as i64),
                Cell::str(strongest_rejection(&adf)),
                Cell::Num(kpss.statistic),
                Cell::Int(kpss.lags_used as i64),
                Cell::str(strongest_rejection(&kpss)),
            ]);
        }
    }
    Ok(vec![t])
}

// ---- dayofweek ---------------------------------------------------------------

fn coefficient_rows(t: &mut Table, prefix: &[Cell], fit: &OlsFit) {
    for (i, name) in fit.names.iter().enumerate() {
        let mut row = prefix.to_vec();
        row.extend([
            Cell::str(name),
            Cell::Num(fit.coefficients[i]),
            Cell::Num(fit.std_errors[i]),
            Cell::Num(fit.t_stats[i]),
            Cell::Num(fit.p_values[i]),
        ]);
        t.row(row);
    }
}

pub fn dayofweek(cfg: &RunConfig) -> CliResult<Vec<Table>> {
    let specs = cfg.require_series()?;
    let mut t = Table::new(
        "day-of-week effects in changes",
        &["series", "regressor", "coefficient", "std_error", "t_stat", "p_value"],
    );
    let mut fits = Table::new("fit", &["series", "r2", "adj_r2", "nobs"]);
    for spec in specs {
        let ch = cfg.load_changes(spec)?;
        let fit = day_of_week_regression(&ch)?;
        coefficient_rows(&mut t, &[Cell::str(&spec.name)], &fit);
        fits.row(vec![
            Cell::str(&spec.name),
            Cell::Num(fit.r2),
            Cell::Num(fit.adj_r2),
            Cell::Int(fit.nobs as i64),
        ]);
    }
    Ok(vec![t, fits])
}

// ---- leverage ----------------------------------------------------------------

pub fn leverage(cfg: &RunConfig, index: Option<&str>, price: Option<&str>) -> CliResult<Vec<Table>> {
    let ispec = cfg.pick(index, Role::Index)?;
    let pspec = cfg.pick(price, Role::Price)?;
    let dvol = cfg.load_log_changes(ispec)?;
    let rets = cfg.load_changes(pspec)?;
    let fit = leverage_regression(&dvol, &rets)?;

    let mut t = Table::new(
        "volatility-return asymmetry regression",
        &["regressor", "coefficient", "std_error", "t_stat", "p_value"],
    );
    coefficient_rows(&mut t, &[], &fit.base);
    for (name, b, se) in [
        ("beta0_plus", fit.beta0_plus, fit.beta0_plus_se),
        ("beta0_minus", fit.beta0_minus, fit.beta0_minus_se),
    ] {
        t.row(vec![
            Cell::str(name),
            Cell::Num(b),
            Cell::Num(se),
            Cell::Num(b / se),
            Cell::str("-"),
        ]);
    }
    let mut f = Table::new("fit", &["index", "price", "r2", "adj_r2", "nobs"]);
    f.row(vec![
        Cell::str(&ispec.name),
        Cell::str(&pspec.name),
        Cell::Num(fit.base.r2),
        Cell::Num(fit.base.adj_r2),
        Cell::Int(fit.base.nobs as i64),
    ]);
    Ok(vec![t, f])
}

// ---- var / granger -----------------------------------------------------------

fn changes_panel(cfg: &RunConfig, levels: bool) -> CliResult<volmetrics::Panel> {
    let specs = cfg.require_series()?;
    let mut named: Vec<(String, TimeSeries)> = Vec::new();
    for spec in specs {
        let s = if levels { cfg.load(spec)? } else { cfg.load_changes(spec)? };
        named.push((spec.name.clone(), s));
    }
    let refs: Vec<(&str, &TimeSeries)> = named.iter().map(|(n, s)| (n.as_str(), s)).collect();
    Ok(align(&refs, AlignPolicy::InnerJoin)?)
}

pub struct VarArgs {
    pub lag: Option<usize>,
    pub select_lags: bool,
    pub levels: bool,
}

pub fn var(cfg: &RunConfig, args: &VarArgs) -> CliResult<Vec<Table>> {
    let panel = changes_panel(cfg, args.levels)?;
    if args.select_lags {
        let p_max = args.lag.unwrap_or(cfg.max_lags);
        let sel = lag_select(&panel, p_max)?;
        let mut t = Table::new(
            &format!("lag selection (common sample T = {})", sel.t_effective),
            &["p", "aic", "sic", "fpe", "lr_stat", "lr_pvalue", "chosen_by"],
        );
        for row in &sel.rows {
            let mut chosen: Vec<&str> = Vec::new();
            for crit in ["aic", "sic", "fpe", "lr"] {
                if sel.chosen[crit] == row.p {
                    chosen.push(crit);
                }
            }
            t.row(vec![
                Cell::Int(row.p as i64),
                Cell::Num(row.aic),
                Cell::Num(row.sic),
                Cell::Num(row.fpe),
                Cell::Num(row.lr_stat),
                Cell::Num(row.lr_pvalue),
                Cell::str(if chosen.is_empty() { "-".into() } else { chosen.join("+") }),
            ]);
        }
        return Ok(vec![t]);
    }

    let p = args.lag.unwrap_or(cfg.var_lag);
    let fit = var_fit(&panel, p)?;
    let mut t = Table::new(
        &format!("VAR({p}) equation fit"),
        &["equation", "intercept", "r2", "adj_r2", "f_stat", "f_pvalue"],
    );
    for (i, name) in fit.names.iter().enumerate() {
        let st = &fit.equation_stats[i];
        t.row(vec![
            Cell::str(name),
            Cell::Num(fit.intercepts[i]),
            Cell::Num(st.r2),
            Cell::Num(st.adj_r2),
            Cell::Num(st.f_stat),
            Cell::Num(st.f_pvalue),
        ]);
    }
    let mut out = vec![t];
    if fit.names.len() >= 2 {
        let corr = residual_correlations(&fit)?;
        let mut headers: Vec<&str> = vec!["series"];
        headers.extend(fit.names.iter().map(String::as_str));
        let mut c = Table::new("residual correlations", &headers);
        for (i, name) in fit.names.iter().enumerate() {
            let mut row = vec![Cell::str(name)];
            row.extend((0..fit.names.len()).map(|j| Cell::Num(corr[(i, j)])));
            c.row(row);
        }
        out.push(c);
    }
    Ok(out)
}

pub fn granger(cfg: &RunConfig, lag: Option<usize>, bivariate: bool) -> CliResult<Vec<Table>> {
    let panel = changes_panel(cfg, false)?;
    if panel.width() < 2 {
        return Err(CliError::Config(
            "granger needs at least two configured series".into(),
        ));
    }
    let p = lag.unwrap_or(cfg.var_lag);
    let names = panel.names().to_vec();
    let mut t = Table::new(
        &format!(
            "Granger causality ({} conditioning, {p} lags)",
            if bivariate { "pairwise" } else { "full-system" }
        ),
        &["cause", "effect", "f_stat", "p_value", "reject_5pct"],
    );
    for cause in &names {
        for effect in &names {
            if cause == effect {
                continue;
            }
            let res = if bivariate {
                let a = panel.series(cause).expect("present");
                let b = panel.series(effect).expect("present");
                let pair = align(
                    &[(cause.as_str(), &a), (effect.as_str(), &b)],
                    AlignPolicy::InnerJoin,
                )?;
                granger_test(&pair, cause, effect, p)?
            } else {
                granger_test(&panel, cause, effect, p)?
            };
            t.row(vec![
                Cell::str(cause),
                Cell::str(effect),
                Cell::Num(res.f_stat),
                Cell::Num(res.p_value),
                Cell::str(if res.p_value < 0.05 { "yes" } else { "no" }),
            ]);
        }
    }
    Ok(vec![t])
}

// ---- forecast / encompass ------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GarchMode {
    /// Fit and evaluate on the full window.
    InSample,
    /// Fit on the first half; evaluate every forecaster on the second half.
    Split,
}

pub struct ForecastArgs {
    pub horizons: Option<Vec<usize>>,
    pub index: Option<String>,
    pub price: Option<String>,
    pub garch_mode: GarchMode,
    pub garch_model: GarchModel,
    pub non_overlapping: bool,
}

fn fit_garch(rets: &TimeSeries, model: GarchModel, mode: GarchMode) -> CliResult<GarchFit> {
    let spec = GarchSpec {
        model,
        ..GarchSpec::default()
    };
    match mode {
        GarchMode::InSample => Ok(garch_fit(rets, &spec)?),
        GarchMode::Split => {
            let mid = rets.len() / 2;
            let head = TimeSeries::new(
                rets.dates()[..mid].to_vec(),
                rets.values()[..mid].to_vec(),
            )?;
            let fit = garch_fit(&head, &spec)?;
            Ok(garch_apply(&fit, rets)?)
        }
    }
}

fn horizons<'a>(cfg: &'a RunConfig, flag: &'a Option<Vec<usize>>) -> CliResult<&'a [usize]> {
    let hs = flag.as_deref().unwrap_or(&cfg.horizons);
    if hs.is_empty() || hs.contains(&0) {
        return Err(CliError::Config("horizons must be positive and non-empty".into()));
    }
    Ok(hs)
}

pub fn forecast(cfg: &RunConfig, args: &ForecastArgs) -> CliResult<Vec<Table>> {
    let pspec = cfg.pick(args.price.as_deref(), Role::Price)?;
    let ispec = cfg.pick(args.index.as_deref(), Role::Index)?;
    let rets = cfg.load_changes(pspec)?;
    let level = cfg.load(ispec)?;
    let rm = riskmetrics(&rets, cfg.lambda, VarianceInit::Sample)?;
    let gfit = fit_garch(&rets, args.garch_model, args.garch_mode)?;
    let eval_from = match args.garch_mode {
        GarchMode::InSample => None,
        GarchMode::Split => Some(rets.dates()[rets.len() / 2]),
    };
    let sampling = if args.non_overlapping {
        Sampling::NonOverlapping
    } else {
        Sampling::Overlapping
    };

    let mut t = Table::new(
        "forecast-evaluation regressions (realized on forecast)",
        &[
            "horizon", "source", "alpha", "beta", "t_alpha", "t_beta", "r2", "wald_p", "n",
        ],
    );
    for &h in horizons(cfg, &args.horizons)? {
        let rv = realized_vol(&rets, h, sampling)?.values;
        let sources: [VolForecast; 3] = [
            implied_horizon(&level, h, cfg.calendar_base)?,
            riskmetrics_horizon(&rm, h)?,
            garch_forecast(&gfit, h)?,
        ];
        for f in sources {
            let rv_eval = rv.slice(eval_from, None);
            let fc_eval = f.values.slice(eval_from, None);
            let fit = forecast_regression(&rv_eval, &fc_eval)?;
            t.row(vec![
                Cell::Int(h as i64),
                Cell::str(f.source.to_string()),
                Cell::Num(fit.base.coefficients[0]),
                Cell::Num(fit.base.coefficients[1]),
                Cell::Num(fit.base.t_stats[0]),
                Cell::Num(fit.base.t_stats[1]),
                Cell::Num(fit.base.r2),
                Cell::Num(fit.wald_pvalue),
                Cell::Int(fit.base.nobs as i64),
            ]);
        }
    }
    Ok(vec![t])
}

pub struct EncompassArgs {
    pub horizons: Option<Vec<usize>>,
    pub index: Option<String>,
    pub price: Option<String>,
    pub garch_model: GarchModel,
}

pub fn encompass(cfg: &RunConfig, args: &EncompassArgs) -> CliResult<Vec<Table>> {
    let pspec = cfg.pick(args.price.as_deref(), Role::Price)?;
    let ispec = cfg.pick(args.index.as_deref(), Role::Index)?;
    let rets = cfg.load_changes(pspec)?;
    let level = cfg.load(ispec)?;
    let gfit = fit_garch(&rets, args.garch_model, GarchMode::InSample)?;

    let mut t = Table::new(
        "encompassing regressions (realized on implied + garch)",
        &[
            "horizon", "alpha", "beta_implied", "gamma_garch", "t_alpha", "t_implied",
            "t_garch", "r2", "n",
        ],
    );
    for &h in horizons(cfg, &args.horizons)? {
        let rv = realized_vol(&rets, h, Sampling::Overlapping)?.values;
        let f1 = implied_horizon(&level, h, cfg.calendar_base)?.values;
        let f2 = garch_forecast(&gfit, h)?.values;
        let fit = encompassing_regression(&rv, &f1, &f2)?;
        t.row(vec![
            Cell::Int(h as i64),
            Cell::Num(fit.coefficients[0]),
            Cell::Num(fit.coefficients[1]),
            Cell::Num(fit.coefficients[2]),
            Cell::Num(fit.t_stats[0]),
            Cell::Num(fit.t_stats[1]),
            Cell::Num(fit.t_stats[2]),
            Cell::Num(fit.r2),
            Cell::Int(fit.nobs as i64),
        ]);
    }
    Ok(vec![t])
}

// ---- savi ----------------------------------------------------------------------

pub struct SaviArgs {
    pub chain: PathBuf,
    pub skew: Option<PathBuf>,
    pub spot: f64,
    pub rate: f64,
    pub div_yield: f64,
    pub tenor_days: i64,
    pub n0: i64,
    pub vix_blend: bool,
    pub fwd_adjust: bool,
    pub include_zero_bids: bool,
    pub weights: Option<PathBuf>,
}

fn load_weight_table(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let raw = std::fs::read_to_string(path).map_err(volmetrics::Error::Io)?;
    let mut out = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("strike")) {
            continue;
        }
        let mut parts = line.split(',');
        let parse = |s: Option<&str>| -> CliResult<f64> {
            s.and_then(|v| v.trim().parse::<f64>().ok()).ok_or_else(|| {
                CliError::Lib(Error::Parse(format!(
                    "{}: line {}: expected 'strike,weight'",
                    path.display(),
                    i + 1
                )))
            })
        };
        out.push((parse(parts.next())?, parse(parts.next())?));
    }
    if out.is_empty() {
        return Err(CliError::Lib(Error::Insufficient(format!(
            "{}: no weight rows",
            path.display()
        ))));
    }
    Ok(out)
}

/// Target skew for the synthetic route: an exact-tenor curve if present,
/// otherwise time interpolation between the bracketing tenors.
fn target_skew(skews: &[SkewCurve], tenor_days: i64, n0: i64) -> CliResult<SkewCurve> {
    if let Some(exact) = skews.iter().find(|s| s.tenor_days() == tenor_days) {
        return Ok(exact.clone());
    }
    let near = skews
        .iter()
        .filter(|s| s.tenor_days() < tenor_days)
        .max_by_key(|s| s.tenor_days());
    let next = skews
        .iter()
        .filter(|s| s.tenor_days() > tenor_days)
        .min_by_key(|s| s.tenor_days());
    match (near, next) {
        (Some(a), Some(b)) => Ok(interpolate_skew(a, b, n0, tenor_days)?),
        _ => Err(CliError::Config(format!(
            "no skew tenor brackets {tenor_days} days (available: {})",
            skews
                .iter()
                .map(|s| s.tenor_days().to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}

/// The expiry whose listed tenor is closest to the target.
fn nearest_expiry(chain: &OptionChain, target_days: i64) -> NaiveDate {
    *chain
        .expiries()
        .iter()
        .min_by_key(|e| ((**e - chain.as_of()).num_days() - target_days).abs())
        .expect("chains are non-empty")
}

fn blend_row(
    chain: &OptionChain,
    tenor_days: i64,
    n0: i64,
    weighting: &Weighting,
    options: &IndexOptions,
) -> CliResult<(String, f64, Option<IndexQuote>)> {
    let expiries = chain.expiries();
    let target = chain.as_of() + chrono::Days::new(tenor_days as u64);
    let near = expiries.iter().rev().find(|e| **e <= target);
    let next = expiries.iter().find(|e| **e >= target);
    let (e1, e2) = match (near, next) {
        (Some(a), Some(b)) if a != b => (*a, *b),
        (Some(a), Some(_)) => {
            // exact hit: a single listed expiry matches the target
            let q = quote_for(chain, *a, n0, weighting, options)?;
            return Ok((format!("listed {a}"), q.level, Some(q)));
        }
        _ => {
            return Err(CliError::Lib(Error::Invalid(format!(
                "as_of {}: listed expiries do not bracket the {tenor_days}-day target",
                chain.as_of()
            ))))
        }
    };
    let q1 = quote_for(chain, e1, n0, weighting, options)?;
    let q2 = quote_for(chain, e2, n0, weighting, options)?;
    let t1 = (e1 - chain.as_of()).num_days() as f64 / n0 as f64;
    let t2 = (e2 - chain.as_of()).num_days() as f64 / n0 as f64;
    let level = blend_index(&q1, t1, &q2, t2, tenor_days as f64 / n0 as f64)?;
    Ok((format!("blend {e1}|{e2}"), level, None))
}

fn quote_for(
    chain: &OptionChain,
    expiry: NaiveDate,
    n0: i64,
    weighting: &Weighting,
    options: &IndexOptions,
) -> CliResult<IndexQuote> {
    let sub = chain.for_expiry(expiry)?;
    let tenor = (expiry - chain.as_of()).num_days() as f64 / n0 as f64;
    Ok(index_level(&sub, None, tenor, weighting, options)?)
}

pub fn savi(cfg: &RunConfig, args: &SaviArgs) -> CliResult<Vec<Table>> {
    if args.n0 < 1 {
        return Err(CliError::Config(format!("--n0 {} must be >= 1", args.n0)));
    }
    if args.tenor_days < 1 {
        return Err(CliError::Config(format!(
            "--tenor-days {} must be >= 1",
            args.tenor_days
        )));
    }
    let chains = load_chains(&args.chain, args.spot, args.rate, args.div_yield)?;
    let chains: Vec<OptionChain> = chains
        .into_iter()
        .filter(|c| {
            cfg.window.0.is_none_or(|d| c.as_of() >= d)
                && cfg.window.1.is_none_or(|d| c.as_of() <= d)
        })
        .collect();
    if chains.is_empty() {
        return Err(CliError::Lib(Error::Insufficient(
            "no chains in the requested window".into(),
        )));
    }
    let weighting = match &args.weights {
        Some(p) => Weighting::CustomTable(load_weight_table(p)?),
        None => Weighting::VixStyle,
    };
    let options = IndexOptions {
        forward_adjustment: args.fwd_adjust,
        include_zero_bids: args.include_zero_bids,
    };
    let skews = args.skew.as_deref().map(load_skews).transpose()?;

    let mut t = Table::new(
        "volatility index",
        &["as_of", "mode", "level", "forward", "n_puts", "n_calls"],
    );
    for chain in &chains {
        let (mode, level, quote) = match &skews {
            Some(sk) => {
                let target = target_skew(sk, args.tenor_days, args.n0)?;
                let expiry = nearest_expiry(chain, args.tenor_days);
                let sub = chain.for_expiry(expiry)?;
                let q = index_level(
                    &sub,
                    Some(&target),
                    args.tenor_days as f64 / args.n0 as f64,
                    &weighting,
                    &options,
                )?;
                (format!("synthetic {}d", args.tenor_days), q.level, Some(q))
            }
            None if args.vix_blend => blend_row(chain, args.tenor_days, args.n0, &weighting, &options)?,
            None => {
                let expiries = chain.expiries();
                if expiries.len() != 1 {
                    return Err(CliError::Lib(Error::Invalid(format!(
                        "as_of {}: chain has {} expiries; pass --vix-blend or --skew",
                        chain.as_of(),
                        expiries.len()
                    ))));
                }
                let q = quote_for(chain, expiries[0], args.n0, &weighting, &options)?;
                (format!("listed {}", expiries[0]), q.level, Some(q))
            }
        };
        let (fwd, np, nc) = match quote {
            Some(q) => (
                Cell::Num(q.forward),
                Cell::Int(q.n_puts as i64),
                Cell::Int(q.n_calls as i64),
            ),
            None => (Cell::str("-"), Cell::str("-"), Cell::str("-")),
        };
        t.row(vec![
            Cell::str(chain.as_of().to_string()),
            Cell::str(mode),
            Cell::Num(level),
            fwd,
            np,
            nc,
        ]);
    }
    Ok(vec![t])
}

// ---- simulate --------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimModel {
    Gaussian,
    Ar1,
    Garch,
    Var,
    Leverage,
}

pub struct SimulateArgs {
    pub model: SimModel,
    pub n: usize,
    pub burn_in: Option<usize>,
    pub mean: f64,
    pub stdev: f64,
    pub phi: f64,
    pub sigma: f64,
    pub omega: f64,
    pub alpha: f64,
    pub gjr_phi: f64,
    pub beta: f64,
    pub k: usize,
    pub rho: f64,
    pub beta0: f64,
    pub beta0_av: f64,
    pub noise_sd: f64,
}

pub fn simulate(cfg: &RunConfig, args: &SimulateArgs) -> CliResult<Vec<Table>> {
    let seed = cfg.seed;
    let burn = args.burn_in.unwrap_or(DEFAULT_BURN_IN);
    let table = match args.model {
        SimModel::Gaussian => {
            let s = sim_gaussian(args.n, args.mean, args.stdev, seed)?;
            series_table("simulated gaussian", &[("value", &s)])
        }
        SimModel::Ar1 => {
            let s = sim_ar1(args.n, args.phi, args.sigma, seed)?;
            series_table("simulated ar1", &[("value", &s)])
        }
        SimModel::Garch => {
            let (r, v) = sim_garch(args.omega, args.alpha, args.gjr_phi, args.beta, args.n, burn, seed)?;
            series_table("simulated garch", &[("return", &r), ("variance", &v)])
        }
        SimModel::Var => {
            if args.k == 0 {
                return Err(CliError::Config("--k must be >= 1".into()));
            }
            if !(-1.0..=1.0).contains(&args.rho) {
                return Err(CliError::Config(format!("--rho {} outside [-1, 1]", args.rho)));
            }
            let a = DMatrix::from_diagonal_element(args.k, args.k, args.phi);
            let mut cov = DMatrix::from_element(args.k, args.k, args.rho);
            cov.fill_diagonal(1.0);
            let panel = sim_var(&[a], &cov, args.n, burn, seed)?;
            let cols: Vec<(String, TimeSeries)> = panel
                .names()
                .iter()
                .map(|n| (n.clone(), panel.series(n).expect("present")))
                .collect();
            let refs: Vec<(&str, &TimeSeries)> =
                cols.iter().map(|(n, s)| (n.as_str(), s)).collect();
            series_table("simulated var", &refs)
        }
        SimModel::Leverage => {
            let (dvol, r) = sim_leverage(args.beta0, args.beta0_av, args.noise_sd, args.n, seed)?;
            series_table("simulated leverage", &[("d_vol", &dvol), ("return", &r)])
        }
    };
    Ok(vec![table])
}

fn series_table(title: &str, columns: &[(impl AsRef<str>, &TimeSeries)]) -> Table {
    let mut headers = vec!["date"];
    for (name, _) in columns {
        headers.push(name.as_ref());
    }
    let mut t = Table::new(title, &headers);
    let dates = columns[0].1.dates();
    for (i, d) in dates.iter().enumerate() {
        let mut row = vec![Cell::str(d.to_string())];
        for (_, s) in columns {
            row.push(Cell::Num(s.values()[i]));
        }
        t.row(row);
    }
    t
}
