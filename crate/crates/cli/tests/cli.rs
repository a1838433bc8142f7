//! End-to-end tests of the `volmetrics` binary: fixture data goes in via
//! CSV + TOML, and the rendered output is checked against the library run
//! on the same inputs.

mod common;

use common::{bin, csv_section, field, num, run, stdout, write_chain, Fixture};
use volmetrics::linreg::leverage_regression;
use volmetrics::series::{log_difference, log_returns};
use volmetrics::stats::describe;

#[test]
fn describe_prints_level_and_change_rows_per_series() {
    let fx = Fixture::new();
    let text = stdout(&fx.run(&["describe"]));
    let first_table = text.split("\n\n").next().unwrap();
    let data: Vec<&str> = first_table
        .lines()
        .filter(|l| l.starts_with("vix ") || l.starts_with("px "))
        .collect();
    assert_eq!(data.len(), 4, "two series x (level, changes):\n{text}");
    assert!(data[0].contains("level") && data[1].contains("diff"));
    assert!(data[2].contains("level") && data[3].contains("return"));
    assert!(text.contains("cross-correlations"));
}

#[test]
fn describe_csv_reparses_to_library_numbers() {
    let fx = Fixture::new();
    let out = stdout(&fx.run(&["describe", "--format", "csv"]));
    let (headers, rows) = csv_section(&out, "descriptive statistics");
    let row = rows
        .iter()
        .find(|r| r[0] == "px" && r[1] == "return")
        .expect("px return row");

    let oracle = describe(&log_returns(&fx.load("price.csv")).unwrap(), 10).unwrap();
    assert_eq!(num(&headers, row, "n") as usize, oracle.n);
    for (name, want) in [
        ("mean", oracle.mean),
        ("stdev", oracle.stdev),
        ("kurtosis", oracle.kurtosis),
        ("lb_q", oracle.ljung_box_q),
    ] {
        let got = num(&headers, row, name);
        assert!(
            (got - want).abs() <= 1e-10 * want.abs().max(1e-300),
            "{name}: {got} vs {want}"
        );
    }
}

#[test]
fn leverage_csv_matches_library_fit() {
    let fx = Fixture::new();
    let out = stdout(&fx.run(&["leverage", "--format", "csv"]));
    let (headers, rows) = csv_section(&out, "volatility-return asymmetry regression");

    let fit = leverage_regression(
        &log_difference(&fx.load("vindex.csv")).unwrap(),
        &log_returns(&fx.load("price.csv")).unwrap(),
    )
    .unwrap();
    for (i, name) in fit.base.names.iter().enumerate() {
        let row = rows.iter().find(|r| &r[0] == name).expect("regressor row");
        let got = num(&headers, row, "coefficient");
        let want = fit.base.coefficients[i];
        assert!(
            (got - want).abs() <= 1e-12 * want.abs().max(1e-300),
            "{name}: {got} vs {want}"
        );
    }
    let plus = rows.iter().find(|r| r[0] == "beta0_plus").unwrap();
    assert!((num(&headers, plus, "coefficient") - fit.beta0_plus).abs() <= 1e-12);
}

#[test]
fn savi_flat_chain_prices_near_quoted_vol() {
    let fx = Fixture::new();
    let chain1 = fx.dir.path().join("chain1.csv");
    write_chain(&chain1, &[("2000-02-02", 30.0 / 365.0)], 0.20);
    let out = stdout(&run(&[
        "savi", "--chain", chain1.to_str().unwrap(), "--spot", "100", "--format", "csv",
    ]));
    let (headers, rows) = csv_section(&out, "volatility index");
    assert_eq!(rows.len(), 1);
    let level = num(&headers, &rows[0], "level");
    assert!((level - 20.0).abs() < 0.5, "level {level}");
    assert_eq!(field(&headers, &rows[0], "mode"), "listed 2000-02-02");

    // two listed expiries interpolated to a 45-day tenor
    let chain2 = fx.dir.path().join("chain2.csv");
    write_chain(
        &chain2,
        &[("2000-02-02", 30.0 / 365.0), ("2000-03-03", 60.0 / 365.0)],
        0.20,
    );
    let out = stdout(&run(&[
        "savi", "--chain", chain2.to_str().unwrap(), "--spot", "100", "--tenor-days", "45",
        "--vix-blend", "--format", "csv",
    ]));
    let (headers, rows) = csv_section(&out, "volatility index");
    let level = num(&headers, &rows[0], "level");
    assert!((level - 20.0).abs() < 0.5, "blend level {level}");

    // synthetic constant-maturity tenor from a flat skew file
    let skew = fx.dir.path().join("skew.csv");
    std::fs::write(
        &skew,
        "tenor_days,strike,vol\n30,80,20\n30,120,20\n60,80,20\n60,120,20\n",
    )
    .unwrap();
    let out = stdout(&run(&[
        "savi", "--chain", chain2.to_str().unwrap(), "--spot", "100", "--tenor-days", "45",
        "--skew", skew.to_str().unwrap(), "--format", "csv",
    ]));
    let (headers, rows) = csv_section(&out, "volatility index");
    let level = num(&headers, &rows[0], "level");
    assert!((level - 20.0).abs() < 0.5, "synthetic level {level}");
    assert_eq!(field(&headers, &rows[0], "mode"), "synthetic 45d");
}

#[test]
fn forecast_covers_each_horizon_and_source() {
    let fx = Fixture::new();
    let out = stdout(&fx.run(&["forecast", "--horizons", "5,10", "--format", "csv"]));
    let (headers, rows) = csv_section(&out, "forecast-evaluation regressions (realized on forecast)");
    assert_eq!(rows.len(), 6, "2 horizons x 3 sources");
    for source in ["implied", "riskmetrics", "garch"] {
        assert!(rows.iter().any(|r| field(&headers, r, "source") == source));
    }
    for r in &rows {
        assert!(num(&headers, r, "n") > 400.0);
    }
}

#[test]
fn var_selection_and_granger_tables_have_expected_rows() {
    let fx = Fixture::new();
    let out = stdout(&fx.run(&["var", "--select-lags", "--lag", "3", "--format", "csv"]));
    let (headers, rows) = csv_section(&out, "lag selection (common sample T = 596)");
    assert_eq!(rows.len(), 3);
    assert!(headers.contains(&"chosen_by".to_string()));

    let out = stdout(&fx.run(&["granger", "--lag", "2", "--format", "csv"]));
    let (_, rows) = csv_section(&out, "Granger causality (full-system conditioning, 2 lags)");
    assert_eq!(rows.len(), 2, "both ordered pairs");
    let out2 = stdout(&fx.run(&["granger", "--lag", "2", "--bivariate", "--format", "csv"]));
    let (_, rows2) = csv_section(&out2, "Granger causality (pairwise conditioning, 2 lags)");
    assert_eq!(rows2.len(), 2);
}

#[test]
fn window_flags_restrict_the_sample() {
    let fx = Fixture::new();
    let all = stdout(&fx.run(&["describe", "--format", "csv"]));
    let cut = stdout(&fx.run(&["describe", "--from", "2001-01-01", "--format", "csv"]));
    let (h1, r1) = csv_section(&all, "descriptive statistics");
    let (h2, r2) = csv_section(&cut, "descriptive statistics");
    let n_all = num(&h1, &r1[0], "n");
    let n_cut = num(&h2, &r2[0], "n");
    assert!(n_cut < n_all, "window must drop rows: {n_cut} vs {n_all}");
}

#[test]
fn env_var_supplies_the_config() {
    let fx = Fixture::new();
    let via_flag = stdout(&fx.run(&["dayofweek"]));
    let via_env = bin()
        .arg("dayofweek")
        .env("VOLMETRICS_CONFIG", fx.arg("run.toml"))
        .output()
        .unwrap();
    assert_eq!(via_flag, stdout(&via_env));
}

#[test]
fn simulate_output_is_seed_deterministic() {
    let a = stdout(&run(&["simulate", "--model", "garch", "--n", "50", "--seed", "1"]));
    let b = stdout(&run(&["simulate", "--model", "garch", "--n", "50", "--seed", "1"]));
    let c = stdout(&run(&["simulate", "--model", "garch", "--n", "50", "--seed", "2"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn errors_are_single_line_with_category_and_exit_code() {
    // no series configured
    let out = run(&["describe"]);
    assert_eq!(out.status.code(), Some(10));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1, "single-line error: {err}");
    assert!(err.starts_with("error[config]:"), "{err}");

    // config points at a missing file
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.toml"),
        "[[series]]\nname = \"x\"\npath = \"absent.csv\"\nrole = \"index\"\n",
    )
    .unwrap();
    let out = run(&[
        "describe", "--config", dir.path().join("bad.toml").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[io]:"));

    // malformed flag value is a usage error
    let out = run(&["describe", "--format", "xml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unitroot_decides_level_vs_changes() {
    let fx = Fixture::new();
    let out = stdout(&fx.run(&["unitroot", "--format", "csv"]));
    let (headers, rows) = csv_section(&out, "unit-root tests");
    assert_eq!(rows.len(), 4);
    // the price level is a simulated random walk: ADF keeps the null at 1%
    // in levels and rejects it decisively in returns
    let level = rows.iter().find(|r| r[0] == "px" && r[1] == "level").unwrap();
    let ret = rows.iter().find(|r| r[0] == "px" && r[1] == "return").unwrap();
    assert_ne!(field(&headers, level, "adf_reject"), "1%");
    assert_eq!(field(&headers, ret, "adf_reject"), "1%");
}
