//! Property tests for the series containers, transforms, and the
//! identities tying the volatility estimators together.

use proptest::prelude::*;

use volmetrics::series::{
    align, default_sim_start, difference, log_returns, weekday_calendar, AlignPolicy,
};
use volmetrics::stats::cross_correlation;
use volmetrics::vol::{realized_vol, riskmetrics, Sampling, VarianceInit};
use volmetrics::TimeSeries;

fn series(values: Vec<f64>) -> TimeSeries {
    let dates = weekday_calendar(default_sim_start(), values.len());
    TimeSeries::new(dates, values).unwrap()
}

fn values(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, n)
}

proptest! {
    #[test]
    fn log_returns_reconstruct_prices(logs in values(2..120)) {
        let prices = series(logs.iter().map(|v| (v / 4.0).exp()).collect());
        let r = log_returns(&prices).unwrap();
        prop_assert_eq!(r.len(), prices.len() - 1);
        let mut p = prices.values()[0];
        for (i, ret) in r.values().iter().enumerate() {
            p *= ret.exp();
            let want = prices.values()[i + 1];
            prop_assert!((p - want).abs() <= 1e-9 * want.abs().max(1.0));
        }
    }

    #[test]
    fn difference_inverts_cumsum(vals in values(2..120)) {
        let mut acc = 0.0;
        let levels = series(vals.iter().map(|v| { acc += v; acc }).collect());
        let d = difference(&levels).unwrap();
        prop_assert_eq!(d.len(), vals.len() - 1);
        for (got, want) in d.values().iter().zip(&vals[1..]) {
            prop_assert!((got - want).abs() < 1e-9);
        }
        // differences are stamped on the later date of each pair
        prop_assert_eq!(d.dates(), &levels.dates()[1..]);
    }

    #[test]
    fn inner_join_is_subset_preserving_values(
        a in values(1..80),
        b in values(1..80),
        skip in 0usize..5,
    ) {
        let sa = series(a);
        // offset b's calendar so the overlap is partial
        let db = weekday_calendar(default_sim_start(), b.len() + skip)[skip..].to_vec();
        let sb = TimeSeries::new(db, b).unwrap();
        let panel = match align(&[("a", &sa), ("b", &sb)], AlignPolicy::InnerJoin) {
            Ok(p) => p,
            Err(_) => return Ok(()), // empty intersection is a valid error
        };
        for (i, d) in panel.dates().iter().enumerate() {
            let ia = sa.dates().iter().position(|x| x == d).unwrap();
            let ib = sb.dates().iter().position(|x| x == d).unwrap();
            prop_assert_eq!(panel.columns()[0][i], sa.values()[ia]);
            prop_assert_eq!(panel.columns()[1][i], sb.values()[ib]);
        }
    }

    #[test]
    fn riskmetrics_power_of_two_scaling_is_exact(rets in values(2..100), lambda in 0.5..0.99f64) {
        let r = series(rets);
        let scaled = TimeSeries::new(
            r.dates().to_vec(),
            r.values().iter().map(|v| 4.0 * v).collect(),
        ).unwrap();
        let a = riskmetrics(&r, lambda, VarianceInit::Sample).unwrap();
        let b = riskmetrics(&scaled, lambda, VarianceInit::Sample).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert_eq!(16.0 * x, *y);
        }
    }

    #[test]
    fn non_overlapping_realized_vol_is_subset(rets in values(4..150), h in 1usize..12) {
        let r = series(rets);
        prop_assume!(h <= r.len());
        let over = realized_vol(&r, h, Sampling::Overlapping).unwrap();
        let non = realized_vol(&r, h, Sampling::NonOverlapping).unwrap();
        for (d, v) in non.values.iter() {
            let i = over.values.dates().iter().position(|x| *x == d).unwrap();
            prop_assert_eq!(over.values.values()[i], v);
        }
    }

    #[test]
    fn cross_correlation_lag_symmetry(
        a in values(12..60),
        b in values(12..60),
        lag in -4i64..=4,
    ) {
        let n = a.len().min(b.len());
        let sa = series(a[..n].to_vec());
        let sb = series(b[..n].to_vec());
        let fwd = cross_correlation(&sa, &sb, lag);
        let rev = cross_correlation(&sb, &sa, -lag);
        match (fwd, rev) {
            (Ok(x), Ok(y)) => prop_assert!((x - y).abs() < 1e-12),
            (Err(_), Err(_)) => {}
            other => prop_assert!(false, "asymmetric outcome {other:?}"),
        }
    }

    #[test]
    fn slice_respects_bounds(vals in values(1..100), lo in 0usize..100, span in 0usize..100) {
        let s = series(vals);
        let dates = s.dates();
        let from = dates.get(lo.min(dates.len() - 1)).copied();
        let to = dates.get((lo + span).min(dates.len() - 1)).copied();
        let cut = s.slice(from, to);
        for (d, v) in cut.iter() {
            prop_assert!(Some(d) >= from && Some(d) <= to);
            let i = dates.iter().position(|x| *x == d).unwrap();
            prop_assert_eq!(s.values()[i], v);
        }
    }
}
