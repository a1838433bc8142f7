//! Seeded synthetic data generators.
//!
//! Every generator is a pure function of (parameters, seed) and produces
//! bit-identical output across runs and platforms. The draw protocol is fixed:
//!
//! - stream: ChaCha8 (`rand_chacha`) keyed via `seed_from_u64`;
//! - uniforms: `u = ((next_u64() >> 11) + 0.5) * 2^-53`, strictly inside (0,1);
//! - standard normals: inverse CDF applied to one uniform per draw (no
//!   rejection steps), so the draw count per step is constant and documented
//!   on each generator.
//!
//! Monte Carlo harnesses derive per-replication seeds as `seed + index`.

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::series::{default_sim_start, weekday_calendar, Panel, TimeSeries};

/// Seed for the portable generator; identical seeds give identical samples.
pub type Seed = u64;

/// Burn-in used by the recursive generators unless overridden.
pub const DEFAULT_BURN_IN: usize = 1000;

/// Leverage-DGP defaults: instantaneous return impact and its absolute-value
/// (asymmetry) companion.
pub const DEFAULT_LEVERAGE_BETA0: f64 = -0.808;
pub const DEFAULT_LEVERAGE_BETA0_AV: f64 = 0.168;

/// A deterministic N(0,1) source on a ChaCha8 stream.
pub struct NormalSource {
    rng: ChaCha8Rng,
    inv: Normal,
}

impl NormalSource {
    pub fn new(seed: Seed) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            inv: Normal::standard(),
        }
    }

    /// Uniform on the open interval (0,1) with 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    /// One standard normal via the inverse CDF (one uniform consumed).
    pub fn standard_normal(&mut self) -> f64 {
        let u = self.uniform();
        self.inv.inverse_cdf(u)
    }
}

fn calendar(n: usize) -> Vec<NaiveDate> {
    weekday_calendar(default_sim_start(), n)
}

/// `n` IID N(mean, stdev^2) draws on a synthetic weekday calendar.
/// One normal per observation.
pub fn sim_gaussian(n: usize, mean: f64, stdev: f64, seed: Seed) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::Invalid("sim_gaussian: n must be positive".into()));
    }
    if stdev < 0.0 {
        return Err(Error::Invalid("sim_gaussian: stdev must be >= 0".into()));
    }
    let mut src = NormalSource::new(seed);
    let values = (0..n).map(|_| mean + stdev * src.standard_normal()).collect();
    TimeSeries::new(calendar(n), values)
}

/// AR(1): y_t = phi*y_{t-1} + sigma*z_t with presample y_0 = 0.
/// One normal per observation; with phi = 0 the output equals
/// `sim_gaussian(n, 0, sigma, seed)` draw for draw.
pub fn sim_ar1(n: usize, phi: f64, sigma: f64, seed: Seed) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::Invalid("sim_ar1: n must be positive".into()));
    }
    if phi.abs() > 1.0 {
        return Err(Error::Invalid(format!("sim_ar1: |phi| = {} > 1", phi.abs())));
    }
    let mut src = NormalSource::new(seed);
    let mut y = 0.0;
    let values = (0..n)
        .map(|_| {
            y = phi * y + sigma * src.standard_normal();
            y
        })
        .collect();
    TimeSeries::new(calendar(n), values)
}

/// GARCH(1,1) / GJR recursion
/// `h_{t+1} = omega + (alpha + phi*[r_t < 0]) r_t^2 + beta h_t`
/// started at the unconditional variance, with `burn_in` discarded steps.
/// Returns the sample path and the latent conditional-variance path that
/// generated it. One normal per step (including burn-in).
pub fn sim_garch(
    omega: f64,
    alpha: f64,
    phi: f64,
    beta: f64,
    n: usize,
    burn_in: usize,
    seed: Seed,
) -> Result<(TimeSeries, TimeSeries)> {
    if n == 0 {
        return Err(Error::Invalid("sim_garch: n must be positive".into()));
    }
    if omega <= 0.0 || alpha < 0.0 || beta < 0.0 || alpha + phi < 0.0 {
        return Err(Error::Invalid(
            "sim_garch: need omega > 0, alpha, beta, alpha+phi >= 0".into(),
        ));
    }
    let persistence = alpha + 0.5 * phi + beta;
    if persistence >= 1.0 {
        return Err(Error::Invalid(format!(
            "sim_garch: non-stationary parameters (alpha + phi/2 + beta = {persistence})"
        )));
    }
    let mut src = NormalSource::new(seed);
    let mut h = omega / (1.0 - persistence);
    let mut returns = Vec::with_capacity(n);
    let mut variance = Vec::with_capacity(n);
    for t in 0..burn_in + n {
        let r = h.sqrt() * src.standard_normal();
        if t >= burn_in {
            returns.push(r);
            variance.push(h);
        }
        let shock = if r < 0.0 { alpha + phi } else { alpha };
        h = omega + shock * r * r + beta * h;
    }
    let dates = calendar(n);
    Ok((
        TimeSeries::new(dates.clone(), returns)?,
        TimeSeries::new(dates, variance)?,
    ))
}

/// K-variate VAR(p) without intercept:
/// `y_t = A_1 y_{t-1} + ... + A_p y_{t-p} + e_t`, `e_t ~ N(0, innovation_cov)`.
///
/// Innovations are factorized through a symmetric eigendecomposition so a
/// merely positive *semi*definite covariance is accepted. K normals per step,
/// drawn component-major. Columns are named `y1..yK`.
pub fn sim_var(
    coefficient_matrices: &[DMatrix<f64>],
    innovation_cov: &DMatrix<f64>,
    n: usize,
    burn_in: usize,
    seed: Seed,
) -> Result<Panel> {
    let k = innovation_cov.nrows();
    if k == 0 || innovation_cov.ncols() != k {
        return Err(Error::Invalid("sim_var: covariance must be square".into()));
    }
    if n == 0 {
        return Err(Error::Invalid("sim_var: n must be positive".into()));
    }
    for (i, a) in coefficient_matrices.iter().enumerate() {
        if a.nrows() != k || a.ncols() != k {
            return Err(Error::Invalid(format!(
                "sim_var: coefficient matrix {} is {}x{}, expected {k}x{k}",
                i + 1,
                a.nrows(),
                a.ncols()
            )));
        }
    }
    let p = coefficient_matrices.len();
    if p > 0 {
        let rho = companion_spectral_radius(coefficient_matrices, k);
        if rho >= 1.0 {
            return Err(Error::Invalid(format!(
                "sim_var: explosive coefficients (companion spectral radius {rho:.4})"
            )));
        }
    }
    let factor = semidefinite_factor(innovation_cov)?;

    let mut src = NormalSource::new(seed);
    let mut history: Vec<DVector<f64>> = vec![DVector::zeros(k); p];
    let mut columns = vec![Vec::with_capacity(n); k];
    for t in 0..burn_in + n {
        let z = DVector::from_fn(k, |_, _| src.standard_normal());
        let mut y = &factor * z;
        for (lag, a) in coefficient_matrices.iter().enumerate() {
            y += a * &history[lag];
        }
        if t >= burn_in {
            for (col, v) in columns.iter_mut().zip(y.iter()) {
                col.push(*v);
            }
        }
        if p > 0 {
            history.rotate_right(1);
            history[0] = y;
        }
    }
    let names = (1..=k).map(|i| format!("y{i}")).collect();
    Panel::new(calendar(n), names, columns)
}

/// Largest eigenvalue modulus of the VAR companion matrix.
fn companion_spectral_radius(mats: &[DMatrix<f64>], k: usize) -> f64 {
    let p = mats.len();
    let mut companion = DMatrix::zeros(k * p, k * p);
    for (lag, a) in mats.iter().enumerate() {
        companion.view_mut((0, lag * k), (k, k)).copy_from(a);
    }
    for i in 0..k * (p - 1) {
        companion[(k + i, i)] = 1.0;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

/// Factor L with L L' = cov, tolerating zero eigenvalues.
fn semidefinite_factor(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = 0.5 * (cov + cov.transpose());
    let eig = sym.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let tol = 1e-10 * max.max(1e-300);
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < -tol {
            return Err(Error::Invalid(
                "sim_var: covariance is not positive semidefinite".into(),
            ));
        }
        *v = v.max(0.0).sqrt();
    }
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&vals))
}

/// Leverage-style DGP: IID N(0,1) returns and
/// `d_vol_t = beta0*r_t + beta0_av*|r_t| + noise_sd*u_t`.
/// Two normals per observation, return draw first.
pub fn sim_leverage(
    beta0: f64,
    beta0_av: f64,
    noise_sd: f64,
    n: usize,
    seed: Seed,
) -> Result<(TimeSeries, TimeSeries)> {
    if n == 0 {
        return Err(Error::Invalid("sim_leverage: n must be positive".into()));
    }
    if noise_sd < 0.0 {
        return Err(Error::Invalid("sim_leverage: noise_sd must be >= 0".into()));
    }
    let mut src = NormalSource::new(seed);
    let mut d_vol = Vec::with_capacity(n);
    let mut returns = Vec::with_capacity(n);
    for _ in 0..n {
        let r = src.standard_normal();
        let u = src.standard_normal();
        returns.push(r);
        d_vol.push(beta0 * r + beta0_av * r.abs() + noise_sd * u);
    }
    let dates = calendar(n);
    Ok((
        TimeSeries::new(dates.clone(), d_vol)?,
        TimeSeries::new(dates, returns)?,
    ))
}
