//! Volatility econometrics toolkit.
//!
//! Building blocks for analysing implied-volatility indices and asset
//! returns:
//!
//! - [`series`]: date-indexed containers, return/difference transforms,
//!   CSV ingestion, multi-series calendar alignment;
//! - [`stats`]: descriptive moments, autocorrelation, Ljung-Box,
//!   cross-correlation;
//! - [`unitroot`]: augmented Dickey-Fuller and KPSS tests;
//! - [`linreg`]: QR-based OLS with optional Newey-West errors, plus the
//!   day-of-week, leverage, forecast-evaluation and encompassing regressions;
//! - [`vol`]: realized volatility, RiskMetrics EWMA, horizon scaling of an
//!   implied-volatility index;
//! - [`garch`]: symmetric and GJR GARCH(1,1) maximum likelihood;
//! - [`volindex`]: model-free implied-volatility index from an option chain
//!   with time-weighted skew interpolation;
//! - [`varmodel`]: VAR(p) estimation, lag-order selection, Granger causality;
//! - [`simulate`]: seeded, platform-independent data generators used as test
//!   oracles and exposed for experimentation.

mod dist;
pub mod error;
pub mod garch;
pub mod linreg;
mod optim;
pub mod series;
pub mod simulate;
pub mod stats;
pub mod unitroot;
pub mod varmodel;
pub mod vol;
pub mod volindex;

pub use error::{Error, Result};
pub use series::{Panel, TimeSeries};
