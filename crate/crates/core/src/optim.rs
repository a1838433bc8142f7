//! Small quasi-Newton minimizer used by the GARCH estimator.

use nalgebra::{DMatrix, DVector};

pub(crate) struct BfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    #[allow(dead_code)] // diagnostic; read by tests
    pub grad_norm: f64,
    pub iterations: usize,
    /// Gradient norm fell below tolerance.
    pub converged: bool,
}

/// BFGS with Armijo backtracking. `fg` must return the objective value and
/// gradient; non-finite values during the line search are treated as
/// insufficient decrease (the step keeps shrinking), so the iterate never
/// leaves the finite region it started in.
pub(crate) fn bfgs<F>(x0: &[f64], fg: F, max_iters: usize, grad_tol: f64) -> BfgsResult
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    const C1: f64 = 1e-4;
    let dim = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let (mut f, g0) = fg(x.as_slice());
    let mut g = DVector::from_vec(g0);
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return BfgsResult {
            x: x0.to_vec(),
            value: f,
            grad_norm: f64::INFINITY,
            iterations: 0,
            converged: false,
        };
    }
    let mut h = DMatrix::<f64>::identity(dim, dim);
    let mut iterations = 0;
    let mut converged = g.norm() < grad_tol;

    while !converged && iterations < max_iters {
        iterations += 1;
        let mut d = -(&h * &g);
        let mut slope = g.dot(&d);
        if slope >= 0.0 {
            // curvature information went bad; restart from steepest descent
            h = DMatrix::identity(dim, dim);
            d = -g.clone();
            slope = g.dot(&d);
        }

        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-14 {
            let cand = &x + step * &d;
            let (fc, gc) = fg(cand.as_slice());
            if fc.is_finite() && fc <= f + C1 * step * slope && gc.iter().all(|v| v.is_finite())
            {
                accepted = Some((cand, fc, DVector::from_vec(gc)));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            break; // line search failed; return best point so far
        };

        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            let rho = 1.0 / sy;
            let id = DMatrix::<f64>::identity(dim, dim);
            let left = &id - rho * &s * y.transpose();
            let right = &id - rho * &y * s.transpose();
            h = &left * h * &right + rho * &s * s.transpose();
        }
        x = xn;
        f = fn_;
        g = gn;
        converged = g.norm() < grad_tol;
    }

    BfgsResult {
        x: x.as_slice().to_vec(),
        value: f,
        grad_norm: g.norm(),
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic_and_rosenbrock() {
        let quad = |x: &[f64]| {
            let f = (x[0] - 3.0).powi(2) + 10.0 * (x[1] + 1.0).powi(2);
            (f, vec![2.0 * (x[0] - 3.0), 20.0 * (x[1] + 1.0)])
        };
        let r = bfgs(&[0.0, 0.0], quad, 100, 1e-8);
        assert!(r.converged);
        assert!((r.x[0] - 3.0).abs() < 1e-6 && (r.x[1] + 1.0).abs() < 1e-6);

        let rosen = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![
                -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                200.0 * (b - a * a),
            ];
            (f, g)
        };
        let r = bfgs(&[-1.2, 1.0], rosen, 500, 1e-8);
        assert!(r.converged, "grad norm {}", r.grad_norm);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn survives_objective_with_undefined_region() {
        // ln(x) is undefined for x <= 0; minimizer of x - ln(x) is x = 1
        let f = |x: &[f64]| {
            let v = x[0] - x[0].ln();
            (v, vec![1.0 - 1.0 / x[0]])
        };
        let r = bfgs(&[5.0], f, 200, 1e-10);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-8);
    }
}
