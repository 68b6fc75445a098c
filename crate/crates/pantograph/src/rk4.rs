//! Marching reference integrator for y'(x) = sum_i a_i y(q_i x), y(0) = 1.
//!
//! Classical fixed-step RK4. Proportional delays only ever look backwards
//! (q_i x <= x), so every delayed value lies in already-computed history and
//! is served by cubic Hermite dense output. Early in the integration a
//! delayed argument can still land inside the step being built; those
//! lookups start from the known-slope predictor and the step is then swept
//! to a fixed point against its own provisional dense output, which keeps
//! the one-shot predictor's O(h^3) defect out of the accepted solution.

use crate::error::Error;
use crate::grid::GridSolution;
use crate::series;
use crate::spec::DelaySpec;

/// Accepted nodes (x_k, y_k, y'_k) with cubic Hermite dense output between
/// them.
#[derive(Debug, Clone)]
pub struct History {
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl History {
    fn with_capacity(step: f64, capacity: usize) -> Self {
        Self {
            step,
            values: Vec::with_capacity(capacity),
            slopes: Vec::with_capacity(capacity),
        }
    }

    fn push(&mut self, value: f64, slope: f64) {
        self.values.push(value);
        self.slopes.push(slope);
    }

    /// Right edge of the covered interval.
    pub fn frontier(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Dense output at `x` within the accepted history. Delayed-argument
    /// containment is a structural property of proportional delays, so a
    /// query beyond the frontier is a bug, not an input error.
    pub fn lookup(&self, x: f64) -> f64 {
        assert!(
            x >= 0.0 && x <= self.frontier() * (1.0 + 1e-12) + 1e-300,
            "dense-output query at {x} beyond frontier {}",
            self.frontier()
        );
        let n = self.values.len() - 1;
        let mut j = (x / self.step).floor() as usize;
        if j >= n {
            j = n.saturating_sub(1);
        }
        if n == 0 {
            return self.values[0];
        }
        let theta = x / self.step - j as f64;
        hermite(
            theta,
            self.step,
            self.values[j],
            self.slopes[j],
            self.values[j + 1],
            self.slopes[j + 1],
        )
    }
}

fn hermite(theta: f64, h: f64, y0: f64, s0: f64, y1: f64, s1: f64) -> f64 {
    if theta == 0.0 {
        return y0;
    }
    let t2 = theta * theta;
    let t3 = t2 * theta;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + theta) * h * s0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * s1
}

/// How many fixed-point sweeps a step may take when a delayed argument
/// lands inside it.
const MAX_STEP_SWEEPS: usize = 5;

/// Marches from y(0) = 1 to b with step (close to) h and returns the node
/// values. Global error is O(h^4) on these smooth solutions.
pub fn integrate(spec: &DelaySpec, b: f64, h: f64) -> Result<GridSolution, Error> {
    integrate_with_history(spec, b, h).map(|(grid, _)| grid)
}

/// As [`integrate`], also handing back the dense-output history so callers
/// can evaluate the solution between nodes.
pub fn integrate_with_history(
    spec: &DelaySpec,
    b: f64,
    h: f64,
) -> Result<(GridSolution, History), Error> {
    if b <= 0.0 || !b.is_finite() {
        return Err(Error::Domain(format!(
            "b = {b}: the interval end must be positive"
        )));
    }
    if h <= 0.0 || h.is_nan() || h > b / 16.0 {
        return Err(Error::Domain(format!(
            "h = {h}: the step must be positive and at most b/16 = {}",
            b / 16.0
        )));
    }
    let n = (b / h).round().max(16.0) as usize;
    let h = b / n as f64;

    let a = spec.coefficients();
    let q = spec.ratios();
    let mut history = History::with_capacity(h, n + 1);
    history.push(1.0, spec.coeff_sum()); // y(0) = 1, y'(0) = sum a_i

    for k in 0..n {
        let t = k as f64 * h;
        let y = history.values[k];
        let slope = history.slopes[k];

        // provisional endpoint (value, slope); refined by the sweeps below
        let mut provisional: Option<(f64, f64)> = None;

        for _sweep in 0..MAX_STEP_SWEEPS {
            let delayed = |tau: f64, used: &mut bool| -> f64 {
                if tau <= t {
                    history.lookup(tau)
                } else {
                    *used = true;
                    match provisional {
                        // known-slope predictor until a provisional endpoint exists
                        None => y + (tau - t) * slope,
                        Some((yp, sp)) => hermite((tau - t) / h, h, y, slope, yp, sp),
                    }
                }
            };
            let mut used = false;
            let rhs = |ts: f64, y_stage: f64, used: &mut bool| -> f64 {
                let mut v = a[0] * y_stage;
                for i in 1..a.len() {
                    if a[i] != 0.0 {
                        v += a[i] * delayed(q[i] * ts, used);
                    }
                }
                v
            };

            let k1 = rhs(t, y, &mut used);
            let k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1, &mut used);
            let k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2, &mut used);
            let k4 = rhs(t + h, y + h * k3, &mut used);
            let y_new = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

            // slope at the new node, served from the freshest segment data
            let sp_guess = provisional.map_or(k4, |(_, sp)| sp);
            let mut slope_new = a[0] * y_new;
            for i in 1..a.len() {
                if a[i] != 0.0 {
                    let tau = q[i] * (t + h);
                    slope_new += a[i]
                        * if tau <= t {
                            history.lookup(tau)
                        } else {
                            hermite((tau - t) / h, h, y, slope, y_new, sp_guess)
                        };
                }
            }

            let settled = provisional
                .map(|(prev, _)| (y_new - prev).abs() <= 1e-14 * (1.0 + y_new.abs()))
                .unwrap_or(false);
            provisional = Some((y_new, slope_new));
            if !used || settled {
                break;
            }
        }

        let (y_new, slope_new) = provisional.unwrap();
        if !y_new.is_finite() || !slope_new.is_finite() {
            return Err(Error::Blowup { last_good_x: t });
        }
        history.push(y_new, slope_new);
    }

    let grid = GridSolution::new(b, history.values.clone(), n, None, Vec::new());
    Ok((grid, history))
}

/// Observed convergence order from steps b/64 and b/128 against the series
/// value at b. Returns infinity when both errors sit at rounding level
/// (order undefined).
pub fn convergence_order(spec: &DelaySpec, b: f64) -> Result<f64, Error> {
    let reference = series::eval(spec, b, 1e-13)?.value;
    let coarse = integrate(spec, b, b / 64.0)?.final_value();
    let fine = integrate(spec, b, b / 128.0)?.final_value();
    let e1 = (coarse - reference).abs();
    let e2 = (fine - reference).abs();
    let floor = 1e-14 * (1.0 + reference.abs());
    if e1 <= floor || e2 <= floor {
        return Ok(f64::INFINITY);
    }
    Ok((e1 / e2).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undelayed_case_is_plain_rk4_on_exp() {
        let spec = DelaySpec::new(vec![1.0], vec![1.0]).unwrap();
        let sol = integrate(&spec, 1.0, 1.0 / 64.0).unwrap();
        assert!((sol.final_value() - std::f64::consts::E).abs() < 1e-8);
    }

    #[test]
    fn two_delay_case_matches_series() {
        let spec = DelaySpec::new(vec![0.5, 0.5], vec![1.0, 0.5]).unwrap();
        let sol = integrate(&spec, 1.0, 1.0 / 128.0).unwrap();
        let reference = series::eval(&spec, 1.0, 1e-13).unwrap().value;
        assert!(
            (sol.final_value() - reference).abs() < 1e-6,
            "y(1) = {}, series = {}",
            sol.final_value(),
            reference
        );
    }

    #[test]
    fn mixed_sign_case_matches_series() {
        let spec = DelaySpec::new(vec![0.0, -1.0], vec![1.0, 0.5]).unwrap();
        let sol = integrate(&spec, 1.0, 1.0 / 128.0).unwrap();
        let reference = series::eval(&spec, 1.0, 1e-13).unwrap().value;
        assert!(
            (sol.final_value() - reference).abs() < 1e-6,
            "y(1) = {}, series = {}",
            sol.final_value(),
            reference
        );
    }

    #[test]
    fn observed_order_is_fourth() {
        let spec = DelaySpec::new(vec![1.0], vec![1.0]).unwrap();
        let p = convergence_order(&spec, 1.0).unwrap();
        assert!((p - 4.0).abs() < 0.3, "order = {p}");

        let spec = DelaySpec::new(vec![0.5, 0.5], vec![1.0, 0.5]).unwrap();
        let p = convergence_order(&spec, 1.0).unwrap();
        assert!(p >= 3.5, "order = {p}");
    }

    #[test]
    fn zero_rhs_reports_infinite_order() {
        let spec = DelaySpec::new(vec![0.0], vec![1.0]).unwrap();
        let p = convergence_order(&spec, 1.0).unwrap();
        assert!(p.is_infinite());
    }

    #[test]
    fn halving_the_step_cuts_the_error_by_eight() {
        let spec = DelaySpec::new(vec![0.5, 0.5], vec![1.0, 0.9]).unwrap();
        let reference = series::eval(&spec, 1.0, 1e-13).unwrap().value;
        let e1 = (integrate(&spec, 1.0, 1.0 / 64.0).unwrap().final_value() - reference).abs();
        let e2 = (integrate(&spec, 1.0, 1.0 / 128.0).unwrap().final_value() - reference).abs();
        assert!(e1 / e2 >= 8.0, "ratio = {}", e1 / e2);
    }

    #[test]
    fn dense_output_tracks_the_series_between_nodes() {
        let spec = DelaySpec::new(vec![0.5, 0.5], vec![1.0, 0.5]).unwrap();
        let (_, history) = integrate_with_history(&spec, 1.0, 1.0 / 128.0).unwrap();
        for i in 0..100 {
            let x = (i as f64 + 0.5) / 100.0;
            let reference = series::eval(&spec, x, 1e-13).unwrap().value;
            assert!(
                (history.lookup(x) - reference).abs() < 1e-7,
                "x = {x}: {} vs {reference}",
                history.lookup(x)
            );
        }
        assert_eq!(history.len(), 129);
        assert!(!history.is_empty());
        assert!((history.frontier() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nodes_respect_the_sandwich() {
        let spec = DelaySpec::new(vec![0.3, 0.6], vec![1.0, 0.4]).unwrap();
        let sol = integrate(&spec, 2.0, 2.0 / 128.0).unwrap();
        for k in 0..=sol.intervals() {
            let x = sol.node_x(k);
            let (lo, hi) = crate::series::sandwich_bounds(&spec, x).unwrap();
            let y = sol.values()[k];
            assert!(
                y >= lo * (1.0 - 1e-6) && y <= hi * (1.0 + 1e-6),
                "node {k}: {y} outside [{lo}, {hi}]"
            );
        }
    }

    #[test]
    fn step_preconditions_are_enforced() {
        let spec = DelaySpec::new(vec![1.0], vec![1.0]).unwrap();
        assert!(integrate(&spec, 1.0, 0.2).is_err()); // h > b/16
        assert!(integrate(&spec, 0.0, 0.01).is_err());
        assert!(integrate(&spec, 1.0, -0.01).is_err());
    }

    #[test]
    fn blowup_is_detected() {
        let spec = DelaySpec::new(vec![700.0], vec![1.0]).unwrap();
        match integrate(&spec, 4.0, 4.0 / 64.0) {
            Err(Error::Blowup { last_good_x }) => assert!(last_good_x >= 0.0),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }
}
