//! Shared fixtures and output-parsing helpers for the binary's
//! integration tests. Each test target uses a subset.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};

use volmetrics::series::{load_series_with, DuplicatePolicy};
use volmetrics::simulate::{sim_garch, sim_leverage, DEFAULT_BURN_IN};
use volmetrics::volindex::{black_price, OptionKind};
use volmetrics::TimeSeries;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_volmetrics"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

/// Rows of the CSV-format section with the given title.
pub fn csv_section(text: &str, title: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().skip_while(|l| *l != format!("# {title}"));
    assert_eq!(
        lines.next(),
        Some(format!("# {title}").as_str()),
        "section '{title}' missing in:\n{text}"
    );
    let headers: Vec<String> = lines
        .next()
        .expect("header line")
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() || line.starts_with('#') {
            break;
        }
        rows.push(line.split(',').map(str::to_string).collect());
    }
    (headers, rows)
}

pub fn field<'a>(headers: &[String], row: &'a [String], name: &str) -> &'a str {
    let i = headers.iter().position(|h| h == name).expect("known column");
    &row[i]
}

pub fn num(headers: &[String], row: &[String], name: &str) -> f64 {
    field(headers, row, name).parse().expect("numeric field")
}

/// Writes `level[t] = base * exp(scale * cumsum(s))` as a date,value CSV.
pub fn write_series(path: &Path, s: &TimeSeries, scale: f64, base: f64) {
    let mut acc = 0.0;
    let mut out = String::from("date,value\n");
    for (d, v) in s.iter() {
        acc += scale * v;
        writeln!(out, "{d},{}", base * acc.exp()).unwrap();
    }
    std::fs::write(path, out).unwrap();
}

/// Writes a flat-vol chain quoted at Black prices (forward 100, rate 0).
pub fn write_chain(path: &Path, expiries: &[(&str, f64)], vol: f64) {
    let mut out = String::from("as_of,expiry,strike,kind,bid,ask\n");
    for (expiry, tenor_years) in expiries {
        let mut k = 50.0;
        while k <= 200.0 {
            for kind in [OptionKind::Put, OptionKind::Call] {
                let p = black_price(100.0, k, vol, *tenor_years, 0.0, kind);
                if p > 1e-10 {
                    let tag = if kind == OptionKind::Put { "P" } else { "C" };
                    writeln!(out, "2000-01-03,{expiry},{k},{tag},{p},{p}").unwrap();
                }
            }
            k += 1.0;
        }
    }
    std::fs::write(path, out).unwrap();
}

/// A volatility-index series, a price series and a run config in a tempdir.
pub struct Fixture {
    pub dir: tempfile::TempDir,
}

impl Fixture {
    pub fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let (dvol, _) = sim_leverage(-0.4, 0.1, 0.5, 600, 31).unwrap();
        write_series(&dir.path().join("vindex.csv"), &dvol, 0.05, 20.0);
        let (gr, _) = sim_garch(0.05, 0.08, 0.0, 0.90, 600, DEFAULT_BURN_IN, 32).unwrap();
        write_series(&dir.path().join("price.csv"), &gr, 0.01, 100.0);
        std::fs::write(
            dir.path().join("run.toml"),
            "[[series]]\n\
             name = \"vix\"\n\
             path = \"vindex.csv\"\n\
             role = \"index\"\n\n\
             [[series]]\n\
             name = \"px\"\n\
             path = \"price.csv\"\n\
             role = \"price\"\n",
        )
        .unwrap();
        Fixture { dir }
    }

    pub fn arg(&self, name: &str) -> String {
        self.dir.path().join(name).to_str().unwrap().to_string()
    }

    pub fn config(&self) -> Vec<String> {
        vec!["--config".into(), self.arg("run.toml")]
    }

    pub fn run(&self, args: &[&str]) -> Output {
        let mut all = self.config();
        all.extend(args.iter().map(|s| s.to_string()));
        bin().args(&all).output().expect("binary runs")
    }

    pub fn load(&self, name: &str) -> TimeSeries {
        load_series_with(
            &self.dir.path().join(name),
            "date",
            "value",
            "%Y-%m-%d",
            DuplicatePolicy::Error,
        )
        .unwrap()
        .series
    }
}
