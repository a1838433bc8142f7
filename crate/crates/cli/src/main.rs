//! `volmetrics` — command-line front end for the volatility toolkit.
//!
//! Every run is deterministic: the same arguments, config and inputs
//! produce byte-identical output. Errors print a single
//! `error[category]: message` line to stderr with a category-specific
//! exit code.

mod commands;
mod config;
mod errors;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use volmetrics::garch::GarchModel;
use volmetrics::simulate::DEFAULT_BURN_IN;
use volmetrics::unitroot::{Selection, TrendSpec};

use commands::{
    EncompassArgs, ForecastArgs, GarchMode, SaviArgs, SimModel, SimulateArgs, UnitrootArgs,
    VarArgs,
};
use config::{Overrides, Period, RunConfig};
use errors::{category, CliError, CliResult};
use table::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PeriodArg {
    Full,
    Sub1,
    Sub2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SelectionArg {
    Fixed,
    Schwarz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TrendArg {
    None,
    Constant,
    Trend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GarchModeArg {
    InSample,
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GarchModelArg {
    Symmetric,
    Gjr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimModelArg {
    Gaussian,
    Ar1,
    Garch,
    Var,
    Leverage,
}

#[derive(Debug, Parser)]
#[command(
    name = "volmetrics",
    version,
    about = "Volatility index and forecast econometrics",
    propagate_version = true
)]
struct Cli {
    /// Config file (TOML); also read from $VOLMETRICS_CONFIG.
    #[arg(long, global = true, env = "VOLMETRICS_CONFIG", value_name = "PATH")]
    config: Option<PathBuf>,

    /// Window start (YYYY-MM-DD); overrides the period/config window.
    #[arg(long, global = true, value_name = "DATE")]
    from: Option<chrono::NaiveDate>,

    /// Window end (YYYY-MM-DD); overrides the period/config window.
    #[arg(long, global = true, value_name = "DATE")]
    to: Option<chrono::NaiveDate>,

    /// Named sample window from the config (full, sub1, sub2).
    #[arg(long, global = true, value_enum)]
    period: Option<PeriodArg>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Seed for simulation commands.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker cap; accepted for compatibility, execution is sequential.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Summary statistics for each configured series, in levels and changes.
    Describe,
    /// ADF and KPSS tests in levels and changes.
    Unitroot {
        /// Maximum augmentation lags for the ADF regression.
        #[arg(long, value_name = "P")]
        max_lags: Option<usize>,
        /// Lag choice: fixed at max-lags, or Schwarz-criterion search.
        #[arg(long, value_enum, default_value = "schwarz")]
        selection: SelectionArg,
        /// Deterministic terms in the ADF regression.
        #[arg(long, value_enum, default_value = "constant")]
        trend: TrendArg,
        /// KPSS Bartlett bandwidth (default: the Schwert rule).
        #[arg(long, value_name = "L")]
        bandwidth: Option<usize>,
    },
    /// Day-of-week dummy regression on changes.
    Dayofweek,
    /// Volatility-change on return regression with asymmetry terms.
    Leverage {
        /// Volatility-index series name (default: first index series).
        #[arg(long, value_name = "NAME")]
        index: Option<String>,
        /// Price series name (default: first price series).
        #[arg(long, value_name = "NAME")]
        price: Option<String>,
    },
    /// Vector autoregression on the changes of all configured series.
    Var {
        /// Lag order (fit) or maximum order (selection).
        #[arg(long, value_name = "P")]
        lag: Option<usize>,
        /// Print the lag-order criteria table instead of fitting.
        #[arg(long)]
        select_lags: bool,
        /// Use levels instead of changes.
        #[arg(long)]
        levels: bool,
    },
    /// Granger-causality F-tests for every ordered series pair.
    Granger {
        /// VAR lag order.
        #[arg(long, value_name = "P")]
        lag: Option<usize>,
        /// Test each pair in a bivariate system instead of the full one.
        #[arg(long)]
        bivariate: bool,
    },
    /// Regress realized vol on implied, EWMA and GARCH forecasts.
    Forecast {
        /// Comma-separated horizons in trading days.
        #[arg(long, value_delimiter = ',', value_name = "H,..")]
        horizons: Option<Vec<usize>>,
        /// Volatility-index series name (default: first index series).
        #[arg(long, value_name = "NAME")]
        index: Option<String>,
        /// Price series name (default: first price series).
        #[arg(long, value_name = "NAME")]
        price: Option<String>,
        /// Fit GARCH on the full window, or on the first half with
        /// out-of-sample evaluation on the second.
        #[arg(long, value_enum, default_value = "in-sample")]
        garch_mode: GarchModeArg,
        /// GARCH variance equation.
        #[arg(long, value_enum, default_value = "gjr")]
        garch_model: GarchModelArg,
        /// Use non-overlapping realized-vol windows.
        #[arg(long)]
        non_overlapping: bool,
    },
    /// Encompassing regression: realized vol on implied and GARCH jointly.
    Encompass {
        /// Comma-separated horizons in trading days.
        #[arg(long, value_delimiter = ',', value_name = "H,..")]
        horizons: Option<Vec<usize>>,
        /// Volatility-index series name (default: first index series).
        #[arg(long, value_name = "NAME")]
        index: Option<String>,
        /// Price series name (default: first price series).
        #[arg(long, value_name = "NAME")]
        price: Option<String>,
        /// GARCH variance equation.
        #[arg(long, value_enum, default_value = "gjr")]
        garch_model: GarchModelArg,
    },
    /// Model-free volatility index levels from option chains.
    Savi {
        /// Option-chain CSV (as_of,expiry,strike,kind,bid,ask[,implied_vol]).
        #[arg(long, value_name = "PATH")]
        chain: PathBuf,
        /// Skew-curve CSV (tenor_days,strike,vol) for a synthetic
        /// constant-maturity chain.
        #[arg(long, value_name = "PATH", conflicts_with = "vix_blend")]
        skew: Option<PathBuf>,
        /// Underlying spot level.
        #[arg(long, value_name = "S")]
        spot: f64,
        /// Continuously compounded rate.
        #[arg(long, value_name = "R", default_value_t = 0.0)]
        rate: f64,
        /// Continuous dividend yield.
        #[arg(long, value_name = "Q", default_value_t = 0.0)]
        div_yield: f64,
        /// Target tenor in calendar days.
        #[arg(long, value_name = "D", default_value_t = 90)]
        tenor_days: i64,
        /// Calendar-day year base.
        #[arg(long, value_name = "D", default_value_t = 365)]
        n0: i64,
        /// Interpolate two listed expiries around the target tenor.
        #[arg(long)]
        vix_blend: bool,
        /// Apply the forward-deviation adjustment.
        #[arg(long)]
        fwd_adjust: bool,
        /// Keep quotes with a zero bid.
        #[arg(long)]
        include_zero_bids: bool,
        /// Strike-weight CSV (strike,weight) replacing the standard weights.
        #[arg(long, value_name = "PATH")]
        weights: Option<PathBuf>,
    },
    /// Write a simulated dataset to stdout.
    Simulate {
        /// Data-generating process.
        #[arg(long, value_enum, default_value = "gaussian")]
        model: SimModelArg,
        /// Sample length.
        #[arg(long, value_name = "N", default_value_t = 1000)]
        n: usize,
        /// Burn-in length for recursive models.
        #[arg(long, value_name = "N")]
        burn_in: Option<usize>,
        /// Mean (gaussian).
        #[arg(long, value_name = "X", default_value_t = 0.0)]
        mean: f64,
        /// Standard deviation (gaussian).
        #[arg(long, value_name = "X", default_value_t = 1.0)]
        stdev: f64,
        /// Autoregressive coefficient (ar1, var).
        #[arg(long, value_name = "X", default_value_t = 0.5)]
        phi: f64,
        /// Innovation standard deviation (ar1).
        #[arg(long, value_name = "X", default_value_t = 1.0)]
        sigma: f64,
        /// Variance intercept (garch).
        #[arg(long, value_name = "X", default_value_t = 0.05)]
        omega: f64,
        /// Squared-shock loading (garch).
        #[arg(long, value_name = "X", default_value_t = 0.08)]
        alpha: f64,
        /// Negative-shock extra loading (garch).
        #[arg(long, value_name = "X", default_value_t = 0.0)]
        gjr_phi: f64,
        /// Lagged-variance loading (garch).
        #[arg(long, value_name = "X", default_value_t = 0.90)]
        beta: f64,
        /// System dimension (var).
        #[arg(long, value_name = "K", default_value_t = 2)]
        k: usize,
        /// Innovation cross-correlation (var).
        #[arg(long, value_name = "X", default_value_t = 0.0)]
        rho: f64,
        /// Contemporaneous return loading (leverage).
        #[arg(long, value_name = "X", default_value_t = -0.808)]
        beta0: f64,
        /// Absolute-return loading (leverage).
        #[arg(long, value_name = "X", default_value_t = 0.168)]
        beta0_av: f64,
        /// Noise standard deviation (leverage).
        #[arg(long, value_name = "X", default_value_t = 1.0)]
        noise_sd: f64,
    },
}

fn overrides(cli: &Cli) -> Overrides {
    Overrides {
        from: cli.from,
        to: cli.to,
        format: cli.format.map(|f| match f {
            FormatArg::Text => Format::Text,
            FormatArg::Csv => Format::Csv,
        }),
        seed: cli.seed,
        period: cli.period.map(|p| match p {
            PeriodArg::Full => Period::Full,
            PeriodArg::Sub1 => Period::Sub1,
            PeriodArg::Sub2 => Period::Sub2,
        }),
    }
}

fn run(cli: Cli) -> CliResult<String> {
    if cli.jobs == Some(0) {
        return Err(CliError::Config("--jobs must be >= 1".into()));
    }
    let cfg = RunConfig::resolve(cli.config.as_deref(), &overrides(&cli))?;
    let tables = match cli.command {
        Command::Describe => commands::describe(&cfg)?,
        Command::Unitroot {
            max_lags,
            selection,
            trend,
            bandwidth,
        } => commands::unitroot(
            &cfg,
            &UnitrootArgs {
                max_lags,
                selection: match selection {
                    SelectionArg::Fixed => Selection::Fixed,
                    SelectionArg::Schwarz => Selection::Schwarz,
                },
                trend: match trend {
                    TrendArg::None => TrendSpec::None,
                    TrendArg::Constant => TrendSpec::Constant,
                    TrendArg::Trend => TrendSpec::ConstantTrend,
                },
                bandwidth,
            },
        )?,
        Command::Dayofweek => commands::dayofweek(&cfg)?,
        Command::Leverage { index, price } => {
            commands::leverage(&cfg, index.as_deref(), price.as_deref())?
        }
        Command::Var {
            lag,
            select_lags,
            levels,
        } => commands::var(
            &cfg,
            &VarArgs {
                lag,
                select_lags,
                levels,
            },
        )?,
        Command::Granger { lag, bivariate } => commands::granger(&cfg, lag, bivariate)?,
        Command::Forecast {
            horizons,
            index,
            price,
            garch_mode,
            garch_model,
            non_overlapping,
        } => commands::forecast(
            &cfg,
            &ForecastArgs {
                horizons,
                index,
                price,
                garch_mode: match garch_mode {
                    GarchModeArg::InSample => GarchMode::InSample,
                    GarchModeArg::Split => GarchMode::Split,
                },
                garch_model: match garch_model {
                    GarchModelArg::Symmetric => GarchModel::Symmetric,
                    GarchModelArg::Gjr => GarchModel::Gjr,
                },
                non_overlapping,
            },
        )?,
        Command::Encompass {
            horizons,
            index,
            price,
            garch_model,
        } => commands::encompass(
            &cfg,
            &EncompassArgs {
                horizons,
                index,
                price,
                garch_model: match garch_model {
                    GarchModelArg::Symmetric => GarchModel::Symmetric,
                    GarchModelArg::Gjr => GarchModel::Gjr,
                },
            },
        )?,
        Command::Savi {
            chain,
            skew,
            spot,
            rate,
            div_yield,
            tenor_days,
            n0,
            vix_blend,
            fwd_adjust,
            include_zero_bids,
            weights,
        } => commands::savi(
            &cfg,
            &SaviArgs {
                chain,
                skew,
                spot,
                rate,
                div_yield,
                tenor_days,
                n0,
                vix_blend,
                fwd_adjust,
                include_zero_bids,
                weights,
            },
        )?,
        Command::Simulate {
            model,
            n,
            burn_in,
            mean,
            stdev,
            phi,
            sigma,
            omega,
            alpha,
            gjr_phi,
            beta,
            k,
            rho,
            beta0,
            beta0_av,
            noise_sd,
        } => commands::simulate(
            &cfg,
            &SimulateArgs {
                model: match model {
                    SimModelArg::Gaussian => SimModel::Gaussian,
                    SimModelArg::Ar1 => SimModel::Ar1,
                    SimModelArg::Garch => SimModel::Garch,
                    SimModelArg::Var => SimModel::Var,
                    SimModelArg::Leverage => SimModel::Leverage,
                },
                n,
                burn_in: Some(burn_in.unwrap_or(DEFAULT_BURN_IN)),
                mean,
                stdev,
                phi,
                sigma,
                omega,
                alpha,
                gjr_phi,
                beta,
                k,
                rho,
                beta0,
                beta0_av,
                noise_sd,
            },
        )?,
    };
    Ok(table::render(&tables, cfg.format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            // a consumer closing the pipe early (e.g. `| head`) is not an error
            use std::io::Write;
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (cat, code) = category(&e);
            let msg = e.to_string().replace('\n', "; ");
            eprintln!("error[{cat}]: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
