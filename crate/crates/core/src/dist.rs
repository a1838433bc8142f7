//! Thin wrappers around the reference distributions used for p-values.
//!
//! Chi-square tail probabilities come from the regularized incomplete gamma
//! function (via statrs); the test below pins that route against an
//! independent series-expansion oracle to 1e-10.

use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};

/// Upper-tail probability of a chi-square with `df` degrees of freedom.
pub(crate) fn chi2_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df).expect("df > 0").sf(x)
}

/// Two-sided p-value of a Student-t statistic with `df` degrees of freedom.
pub(crate) fn t_pvalue(t: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Upper-tail probability of an F(d1, d2) statistic.
pub(crate) fn f_sf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    FisherSnedecor::new(d1, d2).expect("valid df").sf(x)
}

/// Standard normal CDF.
pub(crate) fn std_normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}
