//! Run configuration: a TOML file declaring input series, date ranges and
//! parameters, merged with command-line overrides (flags win).

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Deserialize;
use volmetrics::series::{
    difference, load_series_with, log_difference, log_returns, DuplicatePolicy,
};
use volmetrics::TimeSeries;

use crate::errors::{CliError, CliResult};
use crate::table::Format;

// Default sample and sub-periods (a pre-crisis/post-crisis split with a
// buffer week between them).
const DEFAULT_FULL: (&str, &str) = ("2007-05-04", "2012-12-06");
const DEFAULT_SUB1: (&str, &str) = ("2007-05-04", "2009-04-24");
const DEFAULT_SUB2: (&str, &str) = ("2009-05-04", "2012-12-06");

pub const DEFAULT_HORIZONS: [usize; 3] = [5, 10, 22];
pub const DEFAULT_VAR_LAG: usize = 8;
pub const DEFAULT_MAX_LAGS: usize = 8;
pub const DEFAULT_LB_LAGS: usize = 10;
pub const DEFAULT_CALENDAR_BASE: usize = 252;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// A volatility index quoted in annualized percent; differenced for
    /// dynamic analyses.
    Index,
    /// An asset price level; log returns for dynamic analyses.
    Price,
}

fn default_date_column() -> String {
    "date".into()
}

fn default_value_column() -> String {
    "value".into()
}

fn default_date_format() -> String {
    "%Y-%m-%d".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    pub name: String,
    pub path: String,
    pub role: Role,
    #[serde(default = "default_date_column")]
    pub date_column: String,
    #[serde(default = "default_value_column")]
    pub value_column: String,
    #[serde(default = "default_date_format")]
    pub date_format: String,
    /// "error" (default) or "last-wins".
    #[serde(default)]
    pub duplicates: Duplicates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Duplicates {
    #[default]
    Error,
    LastWins,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RangeSpec {
    from: String,
    to: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatesSpec {
    full: Option<RangeSpec>,
    sub1: Option<RangeSpec>,
    sub2: Option<RangeSpec>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsSpec {
    horizons: Option<Vec<usize>>,
    lambda: Option<f64>,
    var_lag: Option<usize>,
    max_lags: Option<usize>,
    lb_lags: Option<usize>,
    calendar_base: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    format: Option<String>,
    seed: Option<u64>,
    #[serde(default)]
    series: Vec<SeriesSpec>,
    dates: Option<DatesSpec>,
    params: Option<ParamsSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Period {
    Full,
    Sub1,
    Sub2,
}

/// Flag-level overrides collected by the argument parser.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub period: Option<Period>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub format: Format,
    pub seed: u64,
    pub series: Vec<SeriesSpec>,
    pub full: (NaiveDate, NaiveDate),
    pub sub1: (NaiveDate, NaiveDate),
    pub sub2: (NaiveDate, NaiveDate),
    /// Effective date window applied to every loaded series.
    pub window: (Option<NaiveDate>, Option<NaiveDate>),
    pub horizons: Vec<usize>,
    pub lambda: f64,
    pub var_lag: usize,
    pub max_lags: usize,
    pub lb_lags: usize,
    pub calendar_base: usize,
    base_dir: PathBuf,
}

fn parse_date(s: &str, what: &str) -> CliResult<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|_| CliError::Config(format!("{what}: '{s}' is not a YYYY-MM-DD date")))
}

fn builtin(pair: (&str, &str)) -> (NaiveDate, NaiveDate) {
    let d = |s: &str| NaiveDate::parse_from_str(s, "%Y-%m-%d").expect("valid builtin date");
    (d(pair.0), d(pair.1))
}

fn resolve_range(
    spec: &Option<RangeSpec>,
    fallback: (&str, &str),
    what: &str,
) -> CliResult<(NaiveDate, NaiveDate)> {
    match spec {
        Some(r) => Ok((
            parse_date(&r.from, &format!("dates.{what}.from"))?,
            parse_date(&r.to, &format!("dates.{what}.to"))?,
        )),
        None => Ok(builtin(fallback)),
    }
}

impl RunConfig {
    /// Loads the optional config file and applies flag overrides.
    pub fn resolve(config_path: Option<&Path>, over: &Overrides) -> CliResult<Self> {
        let (file, base_dir) = match config_path {
            Some(p) => {
                let raw = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", p.display()))
                })?;
                let parsed: FileConfig = toml::from_str(&raw)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                let dir = p.parent().unwrap_or(Path::new(".")).to_path_buf();
                (parsed, dir)
            }
            None => (FileConfig::default(), PathBuf::from(".")),
        };

        let format = match over.format {
            Some(f) => f,
            None => match file.format.as_deref() {
                None | Some("text") => Format::Text,
                Some("csv") => Format::Csv,
                Some(other) => {
                    return Err(CliError::Config(format!(
                        "format must be 'text' or 'csv', got '{other}'"
                    )))
                }
            },
        };

        let dates_given = file.dates.is_some();
        let dates = file.dates.unwrap_or_default();
        let full = resolve_range(&dates.full, DEFAULT_FULL, "full")?;
        let sub1 = resolve_range(&dates.sub1, DEFAULT_SUB1, "sub1")?;
        let sub2 = resolve_range(&dates.sub2, DEFAULT_SUB2, "sub2")?;
        for (name, (a, b)) in [("full", full), ("sub1", sub1), ("sub2", sub2)] {
            if a > b {
                return Err(CliError::Config(format!("dates.{name}: from {a} after to {b}")));
            }
        }
        if sub1.0 < full.0 || sub2.1 > full.1 {
            return Err(CliError::Config(
                "sub-periods must lie within the full range".into(),
            ));
        }
        if sub1.1 >= sub2.0 {
            return Err(CliError::Config(format!(
                "sub-periods overlap: sub1 ends {} but sub2 starts {}",
                sub1.1, sub2.0
            )));
        }

        let params = file.params.unwrap_or_default();
        let horizons = params.horizons.unwrap_or_else(|| DEFAULT_HORIZONS.to_vec());
        if horizons.is_empty() || horizons.contains(&0) {
            return Err(CliError::Config("horizons must be positive and non-empty".into()));
        }
        let lambda = params.lambda.unwrap_or(volmetrics::vol::DEFAULT_LAMBDA);
        if !(0.0 < lambda && lambda < 1.0) {
            return Err(CliError::Config(format!("lambda {lambda} outside (0, 1)")));
        }
        let var_lag = params.var_lag.unwrap_or(DEFAULT_VAR_LAG);
        if var_lag == 0 {
            return Err(CliError::Config("var_lag must be >= 1".into()));
        }
        let lb_lags = params.lb_lags.unwrap_or(DEFAULT_LB_LAGS);
        if lb_lags == 0 {
            return Err(CliError::Config("lb_lags must be >= 1".into()));
        }
        let calendar_base = params.calendar_base.unwrap_or(DEFAULT_CALENDAR_BASE);
        if calendar_base == 0 {
            return Err(CliError::Config("calendar_base must be >= 1".into()));
        }

        let mut names = std::collections::BTreeSet::new();
        for s in &file.series {
            if !names.insert(s.name.as_str()) {
                return Err(CliError::Config(format!("duplicate series name '{}'", s.name)));
            }
        }

        let mut cfg = Self {
            format,
            seed: over.seed.or(file.seed).unwrap_or(42),
            series: file.series,
            full,
            sub1,
            sub2,
            window: (None, None),
            horizons,
            lambda,
            var_lag,
            max_lags: params.max_lags.unwrap_or(DEFAULT_MAX_LAGS),
            lb_lags,
            calendar_base,
            base_dir,
        };

        // the window is opt-in: a --period flag, or [dates] in the config
        // (then defaulting to the full range), or explicit --from/--to
        let base = match over.period {
            Some(Period::Full) => Some(cfg.full),
            Some(Period::Sub1) => Some(cfg.sub1),
            Some(Period::Sub2) => Some(cfg.sub2),
            None if dates_given => Some(cfg.full),
            None => None,
        };
        cfg.window = (
            over.from.or(base.map(|(a, _)| a)),
            over.to.or(base.map(|(_, b)| b)),
        );
        if let (Some(a), Some(b)) = cfg.window {
            if a > b {
                return Err(CliError::Config(format!("window start {a} after end {b}")));
            }
        }
        Ok(cfg)
    }

    /// All configured series; commands needing data error out when empty.
    pub fn require_series(&self) -> CliResult<&[SeriesSpec]> {
        if self.series.is_empty() {
            return Err(CliError::Config(
                "no [[series]] configured; pass --config with input series".into(),
            ));
        }
        Ok(&self.series)
    }

    /// Picks a series by name, or the first with the given role.
    pub fn pick(&self, name: Option<&str>, role: Role) -> CliResult<&SeriesSpec> {
        match name {
            Some(n) => self
                .series
                .iter()
                .find(|s| s.name == n)
                .ok_or_else(|| CliError::Config(format!("no series named '{n}'"))),
            None => self.series.iter().find(|s| s.role == role).ok_or_else(|| {
                CliError::Config(format!(
                    "no series with role '{}' configured",
                    match role {
                        Role::Index => "index",
                        Role::Price => "price",
                    }
                ))
            }),
        }
    }

    /// Loads one series and applies the date window.
    pub fn load(&self, spec: &SeriesSpec) -> CliResult<TimeSeries> {
        let path = self.base_dir.join(&spec.path);
        let policy = match spec.duplicates {
            Duplicates::Error => DuplicatePolicy::Error,
            Duplicates::LastWins => DuplicatePolicy::LastWins,
        };
        let loaded = load_series_with(
            &path,
            &spec.date_column,
            &spec.value_column,
            &spec.date_format,
            policy,
        )?;
        let cut = loaded.series.slice(self.window.0, self.window.1);
        if cut.is_empty() {
            return Err(CliError::Config(format!(
                "series '{}' has no observations in the requested window",
                spec.name
            )));
        }
        Ok(cut)
    }

    /// The role-specific dynamic transform: differences for an index,
    /// log returns for a price.
    pub fn load_changes(&self, spec: &SeriesSpec) -> CliResult<TimeSeries> {
        let level = self.load(spec)?;
        let out = match spec.role {
            Role::Index => difference(&level)?,
            Role::Price => log_returns(&level)?,
        };
        Ok(out)
    }

    /// Log-differences of an index level (leverage-regression convention).
    pub fn load_log_changes(&self, spec: &SeriesSpec) -> CliResult<TimeSeries> {
        let level = self.load(spec)?;
        let out = match spec.role {
            Role::Index => log_difference(&level)?,
            Role::Price => log_returns(&level)?,
        };
        Ok(out)
    }
}
