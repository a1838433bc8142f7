//! Non-parametric volatility estimators and horizon rescaling: realized
//! volatility over forward windows, the RiskMetrics EWMA variance recursion,
//! and square-root-of-time scaling for EWMA and implied index levels.

use std::fmt;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Which estimator produced a [`VolForecast`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForecastSource {
    Implied,
    RiskMetrics,
    Garch,
    Realized,
}

impl fmt::Display for ForecastSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForecastSource::Implied => "implied",
            ForecastSource::RiskMetrics => "riskmetrics",
            ForecastSource::Garch => "garch",
            ForecastSource::Realized => "realized",
        })
    }
}

/// An h-day volatility series in return units (not annualized percent).
#[derive(Debug, Clone)]
pub struct VolForecast {
    pub horizon_days: usize,
    pub values: TimeSeries,
    pub source: ForecastSource,
}

/// How to seed a variance recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceInit {
    /// Sample variance of the input returns (denominator n).
    Sample,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Overlapping,
    NonOverlapping,
}

/// Decay used in practice for daily EWMA variance.
pub const DEFAULT_LAMBDA: f64 = 0.94;

/// Trading days per year, the default annualization base.
pub const DEFAULT_CALENDAR_BASE: usize = 252;

/// Realized h-day volatility: the value stamped at the first date of each
/// h-return window is √(Σ of the window's squared returns), so each stamp
/// summarizes the returns realized from that date forward.
/// `NonOverlapping` keeps every h-th stamp starting from the first, which
/// makes its values an exact subset of the overlapping series.
pub fn realized_vol(returns: &TimeSeries, h: usize, sampling: Sampling) -> Result<VolForecast> {
    let n = returns.len();
    if h == 0 {
        return Err(Error::Invalid("horizon must be positive".into()));
    }
    if h > n {
        return Err(Error::Insufficient(format!(
            "horizon {h} exceeds series length {n}"
        )));
    }
    let r = returns.values();
    let mut dates = Vec::new();
    let mut vals = Vec::new();
    let step = match sampling {
        Sampling::Overlapping => 1,
        Sampling::NonOverlapping => h,
    };
    let mut t = 0;
    while t + h <= n {
        let ss: f64 = r[t..t + h].iter().map(|x| x * x).sum();
        dates.push(returns.dates()[t]);
        vals.push(ss.sqrt());
        t += step;
    }
    Ok(VolForecast {
        horizon_days: h,
        values: TimeSeries::new(dates, vals)?,
        source: ForecastSource::Realized,
    })
}

/// RiskMetrics EWMA variance: rmₜ = (1−λ)·r²ₜ₋₁ + λ·rmₜ₋₁, seeded at the
/// first return date with rm₀ per `init`. Output is variance, not
/// volatility, aligned to the return dates (the value at a date uses only
/// returns strictly before it).
pub fn riskmetrics(returns: &TimeSeries, lambda: f64, init: VarianceInit) -> Result<TimeSeries> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::Invalid(format!(
            "lambda must be in (0, 1), got {lambda}"
        )));
    }
    let n = returns.len();
    if n == 0 {
        return Err(Error::Insufficient("empty return series".into()));
    }
    let r = returns.values();
    let rm0 = match init {
        VarianceInit::Sample => {
            let mean = r.iter().sum::<f64>() / n as f64;
            r.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64
        }
        VarianceInit::Fixed(v) => {
            if v < 0.0 {
                return Err(Error::Invalid(format!("fixed init variance {v} < 0")));
            }
            v
        }
    };
    let mut out = Vec::with_capacity(n);
    out.push(rm0);
    for t in 1..n {
        out.push((1.0 - lambda) * r[t - 1] * r[t - 1] + lambda * out[t - 1]);
    }
    TimeSeries::new(returns.dates().to_vec(), out)
}

/// Scales a daily EWMA variance series to an h-day volatility:
/// RM_{h,t} = √(h·rmₜ).
pub fn riskmetrics_horizon(rm: &TimeSeries, h: usize) -> Result<VolForecast> {
    if h == 0 {
        return Err(Error::Invalid("horizon must be positive".into()));
    }
    if let Some((d, v)) = rm.iter().find(|(_, v)| *v < 0.0) {
        return Err(Error::Invalid(format!("negative variance {v} at {d}")));
    }
    let vals: Vec<f64> = rm.values().iter().map(|v| (h as f64 * v).sqrt()).collect();
    Ok(VolForecast {
        horizon_days: h,
        values: TimeSeries::new(rm.dates().to_vec(), vals)?,
        source: ForecastSource::RiskMetrics,
    })
}

/// Rescales an annualized-percent implied index (25.77 means 25.77%) to an
/// h-day decimal volatility by the square-root-of-time rule:
/// IMP_{h,t} = (VOLₜ/100)·√(h/calendar_base).
///
/// The base defaults to 252 trading days so the result is comparable with
/// realized vol over h daily returns; 360/365 calendar conventions are a
/// caller choice.
pub fn implied_horizon(
    index_level: &TimeSeries,
    h: usize,
    calendar_base: usize,
) -> Result<VolForecast> {
    if h == 0 || calendar_base == 0 {
        return Err(Error::Invalid(
            "horizon and calendar base must be positive".into(),
        ));
    }
    if let Some((d, v)) = index_level.iter().find(|(_, v)| *v < 0.0) {
        return Err(Error::Invalid(format!("negative index level {v} at {d}")));
    }
    let scale = (h as f64 / calendar_base as f64).sqrt() / 100.0;
    let vals: Vec<f64> = index_level.values().iter().map(|v| v * scale).collect();
    Ok(VolForecast {
        horizon_days: h,
        values: TimeSeries::new(index_level.dates().to_vec(), vals)?,
        source: ForecastSource::Implied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{default_sim_start, weekday_calendar};
    use crate::simulate::sim_gaussian;

    fn ts(values: &[f64]) -> TimeSeries {
        let dates = weekday_calendar(default_sim_start(), values.len());
        TimeSeries::new(dates, values.to_vec()).unwrap()
    }

    #[test]
    fn realized_vol_basics() {
        let zero = ts(&[0.0; 30]);
        let rv = realized_vol(&zero, 5, Sampling::Overlapping).unwrap();
        assert!(rv.values.values().iter().all(|v| *v == 0.0));
        assert_eq!(rv.values.len(), 26);
        assert_eq!(rv.horizon_days, 5);
        assert_eq!(rv.source, ForecastSource::Realized);

        let flat = ts(&[0.01; 5]);
        let rv = realized_vol(&flat, 5, Sampling::Overlapping).unwrap();
        assert_eq!(rv.values.len(), 1);
        assert_eq!(rv.values.dates()[0], flat.dates()[0]);
        assert!((rv.values.values()[0] - 0.01 * 5f64.sqrt()).abs() < 1e-15);

        assert!(matches!(
            realized_vol(&flat, 6, Sampling::Overlapping),
            Err(Error::Insufficient(_))
        ));
    }

    #[test]
    fn non_overlapping_is_exact_subsample() {
        let r = sim_gaussian(101, 0.0, 0.01, 5).unwrap();
        let h = 10;
        let over = realized_vol(&r, h, Sampling::Overlapping).unwrap();
        let non = realized_vol(&r, h, Sampling::NonOverlapping).unwrap();
        // 92 overlapping stamps; every 10th starting at 0 -> 10 stamps
        assert_eq!(over.values.len(), 92);
        assert_eq!(non.values.len(), 10);
        for (i, (d, v)) in non.values.iter().enumerate() {
            assert_eq!(d, over.values.dates()[i * h]);
            assert_eq!(v, over.values.values()[i * h]);
            // stamps are h observations apart on the return calendar
            assert_eq!(d, r.dates()[i * h]);
        }
    }

    #[test]
    fn riskmetrics_geometric_decay_with_zero_returns() {
        let zero = ts(&[0.0; 50]);
        let rm = riskmetrics(&zero, 0.94, VarianceInit::Fixed(0.2)).unwrap();
        for (t, v) in rm.values().iter().enumerate() {
            assert!((v - 0.94f64.powi(t as i32) * 0.2).abs() < 1e-16 * (1.0 + v));
        }
    }

    #[test]
    fn riskmetrics_matches_closed_form_unroll() {
        let r = sim_gaussian(1000, 0.0, 0.012, 9).unwrap();
        let lambda = DEFAULT_LAMBDA;
        let rm = riskmetrics(&r, lambda, VarianceInit::Sample).unwrap();
        let rm0 = rm.values()[0];
        for t in [1usize, 2, 17, 250, 999] {
            let mut acc = lambda.powi(t as i32) * rm0;
            for i in 0..t {
                acc += (1.0 - lambda)
                    * lambda.powi((t - 1 - i) as i32)
                    * r.values()[i]
                    * r.values()[i];
            }
            let got = rm.values()[t];
            assert!(
                (got - acc).abs() <= 1e-12 * acc.max(1e-300),
                "t = {t}: {got} vs {acc}"
            );
        }
    }

    #[test]
    fn riskmetrics_scale_equivariant() {
        let r = sim_gaussian(200, 0.0, 0.01, 10).unwrap();
        let scaled = TimeSeries::new(
            r.dates().to_vec(),
            r.values().iter().map(|v| 2.0 * v).collect(),
        )
        .unwrap();
        let a = riskmetrics(&r, 0.94, VarianceInit::Sample).unwrap();
        let b = riskmetrics(&scaled, 0.94, VarianceInit::Sample).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            // factor 4 = 2² is a power of two, so equality is exact
            assert_eq!(4.0 * x, *y);
        }
    }

    #[test]
    fn riskmetrics_rejects_bad_lambda() {
        let r = ts(&[0.01, -0.02, 0.005]);
        for lambda in [0.0, 1.0, -0.5, 1.5] {
            assert!(matches!(
                riskmetrics(&r, lambda, VarianceInit::Sample),
                Err(Error::Invalid(_))
            ));
        }
    }

    #[test]
    fn horizon_scaling() {
        let rm = ts(&[0.0004; 10]);
        let f1 = riskmetrics_horizon(&rm, 1).unwrap();
        assert!((f1.values.values()[0] - 0.02).abs() < 1e-15);
        let f25 = riskmetrics_horizon(&rm, 25).unwrap();
        assert!((f25.values.values()[0] - 0.1).abs() < 1e-15);
        // monotone in h
        let f10 = riskmetrics_horizon(&rm, 10).unwrap();
        for ((a, b), c) in f1
            .values
            .values()
            .iter()
            .zip(f10.values.values())
            .zip(f25.values.values())
        {
            assert!(a <= b && b <= c);
        }

        let neg = ts(&[0.0004, -0.1]);
        assert!(matches!(
            riskmetrics_horizon(&neg, 5),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn implied_horizon_rescale() {
        let idx = ts(&[0.0, 25.2, 25.2]);
        let f = implied_horizon(&idx, 252, 252).unwrap();
        assert_eq!(f.values.values()[0], 0.0);
        assert!((f.values.values()[1] - 0.252).abs() < 1e-15);
        assert_eq!(f.source, ForecastSource::Implied);

        let neg = ts(&[20.0, -1.0]);
        assert!(matches!(
            implied_horizon(&neg, 10, 252),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn implied_and_realized_agree_for_constant_vol() {
        // daily sd s, annualized percent index = 100·s·√252; the rescaled
        // index should match mean realized vol within 15%
        let s = 0.012;
        let n = 3000;
        let h = 10;
        let r = sim_gaussian(n, 0.0, s, 21).unwrap();
        let level = 100.0 * s * 252f64.sqrt();
        let idx = TimeSeries::new(r.dates().to_vec(), vec![level; n]).unwrap();
        let imp = implied_horizon(&idx, h, DEFAULT_CALENDAR_BASE).unwrap();
        let rv = realized_vol(&r, h, Sampling::Overlapping).unwrap();
        let rv_mean = rv.values.values().iter().sum::<f64>() / rv.values.len() as f64;
        let imp_val = imp.values.values()[0];
        assert!(
            (rv_mean - imp_val).abs() / imp_val < 0.15,
            "rv mean {rv_mean} vs implied {imp_val}"
        );
    }
}
