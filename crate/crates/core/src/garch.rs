//! GARCH(1,1) estimation by Gaussian maximum likelihood, in the symmetric
//! form and the Glosten-Jagannathan-Runkle asymmetric extension
//!
//!   σₜ² = ω + (α + φ·I[εₜ₋₁ < 0])·εₜ₋₁² + β·σₜ₋₁²
//!
//! The likelihood is maximized over an unconstrained reparameterization
//! (log for ω, logistic for the persistence, a simplex map for its split
//! between α, φ/2, β), so every iterate satisfies ω > 0, α, β ≥ 0 and
//! α + φ/2 + β < 1 by construction. Multi-start BFGS with an analytic
//! gradient; the best likelihood wins, ties broken by start order.

use std::fmt;

use crate::error::{Error, Result};
use crate::optim::bfgs;
use crate::series::TimeSeries;
use crate::vol::{ForecastSource, VarianceInit, VolForecast};

const LN_2PI: f64 = 1.8378770664093453;
const MAX_ITERS: usize = 500;
const GRAD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GarchModel {
    Symmetric,
    Gjr,
}

impl fmt::Display for GarchModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GarchModel::Symmetric => "symmetric",
            GarchModel::Gjr => "gjr",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanSpec {
    Zero,
    Constant,
}

#[derive(Debug, Clone)]
pub struct GarchSpec {
    pub model: GarchModel,
    pub mean: MeanSpec,
    pub init_variance: VarianceInit,
}

impl Default for GarchSpec {
    fn default() -> Self {
        Self {
            model: GarchModel::Symmetric,
            mean: MeanSpec::Zero,
            init_variance: VarianceInit::Sample,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GarchFit {
    pub model: GarchModel,
    pub omega: f64,
    pub alpha: f64,
    /// Asymmetry loading on negative shocks; 0 under the symmetric model.
    pub phi: f64,
    pub beta: f64,
    /// Estimated mean of the return equation (0 under `MeanSpec::Zero`).
    pub mu: f64,
    /// Total Gaussian log-likelihood at the optimum.
    pub loglik: f64,
    pub conditional_variance: TimeSeries,
    /// Demeaned returns εₜ used in the variance recursion.
    pub residuals: TimeSeries,
    pub converged: bool,
    /// Iterations used by the winning start.
    pub iterations: usize,
    /// 1 − (α + φ/2 + β); positive inside the covariance-stationary region.
    pub stationarity_margin: f64,
}

impl GarchFit {
    pub fn persistence(&self) -> f64 {
        self.alpha + self.phi / 2.0 + self.beta
    }

    pub fn unconditional_variance(&self) -> f64 {
        self.omega / self.stationarity_margin
    }

    /// Solution is within 1e-4 of the stationarity bound.
    pub fn boundary(&self) -> bool {
        self.stationarity_margin < 1e-4
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Natural parameters and their value/gradient under one transform point.
#[derive(Debug, Clone, Copy)]
struct Natural {
    omega: f64,
    alpha: f64,
    phi: f64,
    beta: f64,
}

fn to_natural(model: GarchModel, u: &[f64]) -> Natural {
    let omega = u[0].exp();
    let s = sigmoid(u[1]);
    match model {
        GarchModel::Symmetric => {
            let q = sigmoid(u[2]);
            Natural {
                omega,
                alpha: s * q,
                phi: 0.0,
                beta: s * (1.0 - q),
            }
        }
        GarchModel::Gjr => {
            // softmax over (u2, u3, 0) splits persistence into α, φ/2, β
            let m = u[2].max(u[3]).max(0.0);
            let ea = (u[2] - m).exp();
            let eg = (u[3] - m).exp();
            let eb = (-m).exp();
            let z = ea + eg + eb;
            Natural {
                omega,
                alpha: s * ea / z,
                phi: 2.0 * s * eg / z,
                beta: s * eb / z,
            }
        }
    }
}

/// Mean negative log-likelihood and its gradient in the natural
/// parameters, via the one-pass dσₜ²/dθ recursion.
fn nll_grad_natural(eps: &[f64], h1: f64, p: Natural) -> (f64, [f64; 4]) {
    let n = eps.len();
    let scale = 1.0 / (2.0 * n as f64);
    let mut h = h1;
    let mut dh = [0.0f64; 4]; // d h_t / d(ω, α, φ, β); h₁ is parameter-free
    let mut nll = 0.0;
    let mut grad = [0.0f64; 4];
    for t in 0..n {
        let e2 = eps[t] * eps[t];
        nll += scale * (LN_2PI + h.ln() + e2 / h);
        let w = scale * (1.0 - e2 / h) / h;
        for k in 0..4 {
            grad[k] += w * dh[k];
        }
        if t + 1 < n {
            let ind = if eps[t] < 0.0 { 1.0 } else { 0.0 };
            let next = [
                1.0 + p.beta * dh[0],
                e2 + p.beta * dh[1],
                ind * e2 + p.beta * dh[2],
                h + p.beta * dh[3],
            ];
            h = p.omega + (p.alpha + p.phi * ind) * e2 + p.beta * h;
            dh = next;
        }
    }
    (nll, grad)
}

/// Objective in the unconstrained coordinates: chains the natural gradient
/// through the transform Jacobian.
fn objective(model: GarchModel, eps: &[f64], h1: f64, u: &[f64]) -> (f64, Vec<f64>) {
    let p = to_natural(model, u);
    let (nll, g) = nll_grad_natural(eps, h1, p);
    let (gw, ga, gp, gb) = (g[0], g[1], g[2], g[3]);
    let s = sigmoid(u[1]);
    let ds = s * (1.0 - s);
    match model {
        GarchModel::Symmetric => {
            let q = sigmoid(u[2]);
            let dq = q * (1.0 - q);
            (
                nll,
                vec![
                    gw * p.omega,
                    (ga * q + gb * (1.0 - q)) * ds,
                    (ga - gb) * s * dq,
                ],
            )
        }
        GarchModel::Gjr => {
            let (wa, wg, wb) = (p.alpha / s, p.phi / (2.0 * s), p.beta / s);
            (
                nll,
                vec![
                    gw * p.omega,
                    (ga * wa + 2.0 * gp * wg + gb * wb) * ds,
                    s * (ga * wa * (1.0 - wa) - 2.0 * gp * wg * wa - gb * wb * wa),
                    s * (-ga * wa * wg + 2.0 * gp * wg * (1.0 - wg) - gb * wb * wg),
                ],
            )
        }
    }
}

fn starts(model: GarchModel, vbar: f64) -> Vec<Vec<f64>> {
    match model {
        GarchModel::Symmetric => [(0.05, 0.90), (0.10, 0.80), (0.01, 0.97)]
            .iter()
            .map(|&(a, b)| {
                let s = a + b;
                vec![(vbar * (1.0 - s)).ln(), logit(s), logit(a / s)]
            })
            .collect(),
        GarchModel::Gjr => [
            (0.05, 0.05, 0.85),
            (0.03, 0.10, 0.88),
            (0.10, 0.02, 0.80),
        ]
        .iter()
        .map(|&(a, g, b)| {
            let s = a + g / 2.0 + b;
            let (wa, wg, wb) = (a / s, g / 2.0 / s, b / s);
            vec![
                (vbar * (1.0 - s)).ln(),
                logit(s),
                (wa / wb).ln(),
                (wg / wb).ln(),
            ]
        })
        .collect(),
    }
}

/// Maximum-likelihood GARCH fit. Requires at least 200 observations;
/// short samples give noisy persistence estimates, so several hundred is a
/// practical minimum. On failure to reach the gradient tolerance within
/// 500 iterations the best point found is returned with `converged = false`.
pub fn garch_fit(returns: &TimeSeries, spec: &GarchSpec) -> Result<GarchFit> {
    let n = returns.len();
    if n < 200 {
        return Err(Error::Insufficient(format!(
            "garch fit needs >= 200 observations, got {n}"
        )));
    }
    let mu = match spec.mean {
        MeanSpec::Zero => 0.0,
        MeanSpec::Constant => returns.values().iter().sum::<f64>() / n as f64,
    };
    let eps: Vec<f64> = returns.values().iter().map(|r| r - mu).collect();
    let vbar = eps.iter().map(|e| e * e).sum::<f64>() / n as f64;
    if vbar <= 0.0 {
        return Err(Error::Invalid("returns have zero variance".into()));
    }
    let h1 = match spec.init_variance {
        VarianceInit::Sample => vbar,
        VarianceInit::Fixed(v) => {
            if v <= 0.0 {
                return Err(Error::Invalid(format!("fixed init variance {v} <= 0")));
            }
            v
        }
    };

    let mut best: Option<crate::optim::BfgsResult> = None;
    for start in starts(spec.model, vbar) {
        let run = bfgs(
            &start,
            |u| objective(spec.model, &eps, h1, u),
            MAX_ITERS,
            GRAD_TOL,
        );
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    let p = to_natural(spec.model, &best.x);
    let margin = 1.0 - (p.alpha + p.phi / 2.0 + p.beta);

    let mut h = Vec::with_capacity(n);
    h.push(h1);
    for t in 1..n {
        let e = eps[t - 1];
        let ind = if e < 0.0 { p.phi } else { 0.0 };
        h.push(p.omega + (p.alpha + ind) * e * e + p.beta * h[t - 1]);
    }

    Ok(GarchFit {
        model: spec.model,
        omega: p.omega,
        alpha: p.alpha,
        phi: p.phi,
        beta: p.beta,
        mu,
        loglik: -(n as f64) * best.value,
        conditional_variance: TimeSeries::new(returns.dates().to_vec(), h)?,
        residuals: TimeSeries::new(returns.dates().to_vec(), eps)?,
        converged: best.converged && margin > 0.0,
        iterations: best.iterations,
        stationarity_margin: margin,
    })
}

/// Re-runs a fit's variance recursion on a (possibly different) return
/// sample with every parameter held fixed — the estimation/evaluation
/// split case. Model, parameters and convergence diagnostics carry over;
/// residuals, conditional variances and the likelihood refer to the new
/// sample, initialized at its mean-square residual.
pub fn garch_apply(fit: &GarchFit, returns: &TimeSeries) -> Result<GarchFit> {
    let n = returns.len();
    if n == 0 {
        return Err(Error::Insufficient("empty return series".into()));
    }
    let eps: Vec<f64> = returns.values().iter().map(|r| r - fit.mu).collect();
    let h1 = eps.iter().map(|e| e * e).sum::<f64>() / n as f64;
    if h1 <= 0.0 {
        return Err(Error::Invalid("returns have zero variance".into()));
    }
    let mut h = Vec::with_capacity(n);
    h.push(h1);
    for t in 1..n {
        let e = eps[t - 1];
        let ind = if e < 0.0 { fit.phi } else { 0.0 };
        h.push(fit.omega + (fit.alpha + ind) * e * e + fit.beta * h[t - 1]);
    }
    let residuals = TimeSeries::new(returns.dates().to_vec(), eps)?;
    let loglik = garch_loglik(
        &residuals,
        fit.omega,
        fit.alpha,
        fit.phi,
        fit.beta,
        VarianceInit::Sample,
    )?;
    Ok(GarchFit {
        model: fit.model,
        omega: fit.omega,
        alpha: fit.alpha,
        phi: fit.phi,
        beta: fit.beta,
        mu: fit.mu,
        loglik,
        conditional_variance: TimeSeries::new(returns.dates().to_vec(), h)?,
        residuals,
        converged: fit.converged,
        iterations: fit.iterations,
        stationarity_margin: fit.stationarity_margin,
    })
}

/// Total Gaussian log-likelihood of a residual series at given parameters
/// (φ = 0 evaluates the symmetric model). σ₁² is the mean square of the
/// residuals under `Sample`, matching [`garch_fit`]'s initialization.
pub fn garch_loglik(
    residuals: &TimeSeries,
    omega: f64,
    alpha: f64,
    phi: f64,
    beta: f64,
    init: VarianceInit,
) -> Result<f64> {
    if residuals.is_empty() {
        return Err(Error::Insufficient("empty residual series".into()));
    }
    if omega <= 0.0 || alpha < 0.0 || beta < 0.0 || alpha + phi < 0.0 {
        return Err(Error::Invalid(
            "parameters must keep the variance positive (omega > 0, alpha >= 0, beta >= 0, alpha + phi >= 0)"
                .into(),
        ));
    }
    let eps = residuals.values();
    let h1 = match init {
        VarianceInit::Sample => eps.iter().map(|e| e * e).sum::<f64>() / eps.len() as f64,
        VarianceInit::Fixed(v) => {
            if v <= 0.0 {
                return Err(Error::Invalid(format!("fixed init variance {v} <= 0")));
            }
            v
        }
    };
    let (nll, _) = nll_grad_natural(
        eps,
        h1,
        Natural {
            omega,
            alpha,
            phi,
            beta,
        },
    );
    Ok(-(eps.len() as f64) * nll)
}

/// h-day volatility forecast from a converged fit: at each date t the
/// one-step variance σ²ₜ₊₁ is rolled forward with the mean-reverting
/// recursion E[σ²ₜ₊ⱼ] = σ̄² + πʲ⁻¹(σ²ₜ₊₁ − σ̄²), π = α + φ/2 + β,
/// σ̄² = ω/(1−π); the forecast is the square root of the summed variances.
pub fn garch_forecast(fit: &GarchFit, h: usize) -> Result<VolForecast> {
    if !fit.converged {
        return Err(Error::Invalid(
            "forecast requires a converged fit".into(),
        ));
    }
    if h == 0 {
        return Err(Error::Invalid("horizon must be positive".into()));
    }
    let pi = fit.persistence();
    if pi >= 1.0 {
        return Err(Error::Invalid(format!(
            "persistence {pi} >= 1: variance forecast diverges"
        )));
    }
    let vbar = fit.omega / (1.0 - pi);
    // Σ_{j=1..h} π^{j-1} = (1 − π^h)/(1 − π), valid for π ∈ [0, 1)
    let geo = (1.0 - pi.powi(h as i32)) / (1.0 - pi);
    let n = fit.residuals.len();
    let mut vals = Vec::with_capacity(n);
    for t in 0..n {
        let e = fit.residuals.values()[t];
        let ind = if e < 0.0 { fit.phi } else { 0.0 };
        let v1 =
            fit.omega + (fit.alpha + ind) * e * e + fit.beta * fit.conditional_variance.values()[t];
        let varsum = h as f64 * vbar + (v1 - vbar) * geo;
        vals.push(varsum.sqrt());
    }
    Ok(VolForecast {
        horizon_days: h,
        values: TimeSeries::new(fit.residuals.dates().to_vec(), vals)?,
        source: ForecastSource::Garch,
    })
}
