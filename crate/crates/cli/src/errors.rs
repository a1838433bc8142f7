//! CLI error surface: every failure maps to a single-line
//! `error[category]: message` on stderr and a category-specific exit code.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Lib(volmetrics::Error),
    Config(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl From<volmetrics::Error> for CliError {
    fn from(e: volmetrics::Error) -> Self {
        CliError::Lib(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Config(m) => write!(f, "{m}"),
        }
    }
}

/// (category, exit code). Codes are stable so scripts can dispatch on them;
/// 2 is left to the argument parser's usage errors.
pub fn category(e: &CliError) -> (&'static str, i32) {
    use volmetrics::Error as E;
    match e {
        CliError::Config(_) => ("config", 10),
        CliError::Lib(le) => match le {
            E::Io(_) => ("io", 3),
            E::Csv(_) => ("csv", 4),
            E::Parse(_) => ("parse", 5),
            E::Invalid(_) => ("invalid", 6),
            E::Insufficient(_) => ("insufficient", 7),
            E::RankDeficient(_) => ("rank-deficient", 8),
            E::Numeric(_) => ("numeric", 9),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn categories_have_distinct_codes() {
        let errs = [
            CliError::Config("x".into()),
            CliError::Lib(volmetrics::Error::Parse("x".into())),
            CliError::Lib(volmetrics::Error::Invalid("x".into())),
            CliError::Lib(volmetrics::Error::Insufficient("x".into())),
            CliError::Lib(volmetrics::Error::RankDeficient("x".into())),
            CliError::Lib(volmetrics::Error::Numeric("x".into())),
        ];
        let mut codes: Vec<i32> = errs.iter().map(|e| category(e).1).collect();
        codes.sort_unstable();
        codes.dedup();
        assert_eq!(codes.len(), errs.len());
    }
}
