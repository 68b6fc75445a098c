//! Sampled solutions on a uniform grid over [0, b], with monotone cubic
//! interpolation for evaluating delayed arguments that fall between nodes.

use crate::error::Error;

/// A solution sampled at x_k = k b / N together with whatever certificate
/// the producing engine can offer.
#[derive(Debug, Clone)]
pub struct GridSolution {
    b: f64,
    values: Vec<f64>,
    iteration_count: usize,
    certified_error: Option<f64>,
    increment_norms: Vec<f64>,
}

/// An off-grid evaluation; exact whenever `x` lands on a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolatedValue {
    pub x: f64,
    pub value: f64,
}

impl GridSolution {
    pub(crate) fn new(
        b: f64,
        values: Vec<f64>,
        iteration_count: usize,
        certified_error: Option<f64>,
        increment_norms: Vec<f64>,
    ) -> Self {
        debug_assert!(values.len() >= 2);
        Self {
            b,
            values,
            iteration_count,
            certified_error,
            increment_norms,
        }
    }

    /// Right end of the domain.
    pub fn domain_end(&self) -> f64 {
        self.b
    }

    /// Number of grid intervals N.
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        self.b / self.intervals() as f64
    }

    pub fn node_x(&self, k: usize) -> f64 {
        k as f64 * self.step()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Iterations (successive-approximation sweeps) or steps (marching)
    /// the producing engine performed.
    pub fn iteration_count(&self) -> usize {
        self.iteration_count
    }

    /// A-priori majorant remainder when the engine can certify one
    /// (the successive-approximation solver can; the marching integrator
    /// cannot and reports `None`).
    pub fn certified_error(&self) -> Option<f64> {
        self.certified_error
    }

    /// Sup-norms of the successive increments, one per iteration; empty for
    /// engines without an iteration structure.
    pub fn increment_norms(&self) -> &[f64] {
        &self.increment_norms
    }

    /// Monotone cubic interpolation at `x` in [0, b]; exact at the nodes.
    pub fn value_at(&self, x: f64) -> Result<InterpolatedValue, Error> {
        if !x.is_finite() || x < 0.0 || x > self.b {
            return Err(Error::Domain(format!(
                "x = {x}: interpolation is only defined on [0, {}]",
                self.b
            )));
        }
        let interp = MonotoneCubic::new(self.step(), &self.values);
        Ok(InterpolatedValue {
            x,
            value: interp.eval(x),
        })
    }
}

/// Piecewise cubic Hermite interpolant on a uniform grid starting at 0 with
/// Fritsch-Carlson limited slopes, so interpolated values never overshoot
/// the local data range.
#[derive(Debug, Clone)]
pub(crate) struct MonotoneCubic {
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(step: f64, values: &[f64]) -> Self {
        assert!(values.len() >= 2 && step > 0.0);
        let n = values.len() - 1;
        let mut secants = Vec::with_capacity(n);
        for k in 0..n {
            secants.push((values[k + 1] - values[k]) / step);
        }
        let mut slopes = vec![0.0; n + 1];
        slopes[0] = secants[0];
        slopes[n] = secants[n - 1];
        for k in 1..n {
            slopes[k] = 0.5 * (secants[k - 1] + secants[k]);
        }
        // Fritsch-Carlson limiter
        for k in 0..n {
            if secants[k] == 0.0 {
                slopes[k] = 0.0;
                slopes[k + 1] = 0.0;
                continue;
            }
            let alpha = slopes[k] / secants[k];
            let beta = slopes[k + 1] / secants[k];
            if alpha < 0.0 {
                slopes[k] = 0.0;
            }
            if beta < 0.0 {
                slopes[k + 1] = 0.0;
            }
            let alpha = slopes[k] / secants[k];
            let beta = slopes[k + 1] / secants[k];
            let s = alpha * alpha + beta * beta;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                slopes[k] = tau * alpha * secants[k];
                slopes[k + 1] = tau * beta * secants[k];
            }
        }
        Self {
            step,
            values: values.to_vec(),
            slopes,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len() - 1;
        // queries at a node (bit-identical to k * step) are served exactly
        let nearest = (x / self.step).round();
        if nearest >= 0.0 && (nearest as usize) <= n && x == nearest * self.step {
            return self.values[nearest as usize];
        }
        let mut j = (x / self.step).floor() as usize;
        if j >= n {
            j = n - 1;
        }
        let theta = x / self.step - j as f64;
        let t2 = theta * theta;
        let t3 = t2 * theta;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + theta;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[j]
            + h10 * self.step * self.slopes[j]
            + h01 * self.values[j + 1]
            + h11 * self.step * self.slopes[j + 1]
    }
}
