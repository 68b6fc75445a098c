//! Grid realization of the successive-approximation (decomposition)
//! iteration for y'(x) = f(x, y(q_0 x), ..., y(q_n x)), y(0) = y0.
//!
//! Writing S_m for the m-th partial sum of the decomposition series, each
//! sweep adds the increment
//!
//! ```text
//! y_{m+1}(x) = integral_0^x [ f(t, S_m(q t)) - f(t, S_{m-1}(q t)) ] dt,
//! ```
//!
//! the first sweep integrating f against the constant initial iterate. The
//! quadrature is the composite trapezoid rule on the same grid, and delayed
//! arguments q_i t (always <= t, so never ahead of the data) are filled in
//! by monotone cubic interpolation. The iterate bound
//! M (sum L_i)^(m-1) b^m / m! from the convergence proof turns the stopping
//! index into a certified remainder.

use crate::error::Error;
use crate::grid::{GridSolution, MonotoneCubic};
use crate::kahan::KahanSum;
use crate::series;
use crate::spec::{validate_ratios, DelaySpec};

/// Boxed scalar right-hand side f(x, y_0, ..., y_n).
pub type Rhs = Box<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;

/// A right-hand side f(x, y_0, ..., y_n) together with everything the
/// convergence theorem assumes about it: delay ratios, Lipschitz constants
/// per argument, a bound M on |f| over the rectangle, and the rectangle
/// itself ([0, b] times prod [-delta_i, delta_i]).
pub struct DelayRhs {
    q: Vec<f64>,
    f: Rhs,
    lipschitz: Vec<f64>,
    bound_m: f64,
    b: f64,
    delta: Vec<f64>,
}

impl DelayRhs {
    pub fn new(
        q: Vec<f64>,
        f: Rhs,
        lipschitz: Vec<f64>,
        bound_m: f64,
        b: f64,
        delta: Vec<f64>,
    ) -> Result<Self, Error> {
        validate_ratios(&q)?;
        if lipschitz.len() != q.len() {
            return Err(Error::Domain(format!(
                "lipschitz has {} entries but q has {}",
                lipschitz.len(),
                q.len()
            )));
        }
        if delta.len() != q.len() {
            return Err(Error::Domain(format!(
                "delta has {} entries but q has {}",
                delta.len(),
                q.len()
            )));
        }
        for (i, &l) in lipschitz.iter().enumerate() {
            if l < 0.0 || !l.is_finite() {
                return Err(Error::Domain(format!(
                    "lipschitz[{i}] = {l}: constants must be nonnegative and finite"
                )));
            }
        }
        for (i, &d) in delta.iter().enumerate() {
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::Domain(format!(
                    "delta[{i}] = {d}: rectangle half-widths must be positive"
                )));
            }
        }
        if bound_m < 0.0 || !bound_m.is_finite() {
            return Err(Error::Domain(format!(
                "bound_m = {bound_m}: the bound on |f| must be nonnegative and finite"
            )));
        }
        if b <= 0.0 || !b.is_finite() {
            return Err(Error::Domain(format!(
                "b = {b}: the interval end must be positive"
            )));
        }
        Ok(Self {
            q,
            f,
            lipschitz,
            bound_m,
            b,
            delta,
        })
    }

    /// The linear right-hand side f = sum_i a_i y_i belonging to a
    /// [`DelaySpec`], with L_i = |a_i| and a rectangle wide enough to hold
    /// the solution on [0, b] (|y| <= e^(A b) by the sandwich argument).
    pub fn linear(spec: &DelaySpec, b: f64) -> Result<Self, Error> {
        let a = spec.coefficients().to_vec();
        let a_abs = spec.coeff_abs_sum();
        let delta = (a_abs * b).exp() + 1.0;
        if !delta.is_finite() {
            return Err(Error::Domain(format!(
                "b = {b}: the linear rectangle e^(A b) overflows; shrink the interval"
            )));
        }
        let lipschitz: Vec<f64> = a.iter().map(|v| v.abs()).collect();
        let bound_m = a_abs * delta;
        let deltas = vec![delta; a.len()];
        let f: Rhs = Box::new(move |_x, ys| a.iter().zip(ys).map(|(&ai, &yi)| ai * yi).sum());
        Self::new(spec.ratios().to_vec(), f, lipschitz, bound_m, b, deltas)
    }

    pub fn ratios(&self) -> &[f64] {
        &self.q
    }

    pub fn lipschitz(&self) -> &[f64] {
        &self.lipschitz
    }

    pub fn lipschitz_sum(&self) -> f64 {
        self.lipschitz.iter().sum()
    }

    pub fn bound_m(&self) -> f64 {
        self.bound_m
    }

    pub fn domain_end(&self) -> f64 {
        self.b
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn call(&self, x: f64, ys: &[f64]) -> f64 {
        (self.f)(x, ys)
    }
}

impl std::fmt::Debug for DelayRhs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DelayRhs")
            .field("q", &self.q)
            .field("lipschitz", &self.lipschitz)
            .field("bound_m", &self.bound_m)
            .field("b", &self.b)
            .field("delta", &self.delta)
            .finish_non_exhaustive()
    }
}

/// Runs the decomposition iteration on an N-interval grid until the
/// sup-norm of an increment drops to `tol` or `max_iter` sweeps are spent.
pub fn djm_iterate(
    rhs: &DelayRhs,
    y0: f64,
    n: usize,
    max_iter: usize,
    tol: f64,
) -> Result<GridSolution, Error> {
    if n < 16 {
        return Err(Error::Domain(format!(
            "N = {n}: the iteration grid needs N >= 16"
        )));
    }
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::Domain(format!(
            "tol = {tol}: tolerance must be positive and finite"
        )));
    }
    if max_iter == 0 {
        return Err(Error::Domain("max_iter must be at least 1".into()));
    }
    if !y0.is_finite() {
        return Err(Error::Domain(format!(
            "y0 = {y0}: initial value must be finite"
        )));
    }

    let b = rhs.b;
    let h = b / n as f64;
    let escape_bound = rhs.delta.iter().cloned().fold(f64::INFINITY, f64::min) + y0.abs();

    let mut partial_sum = vec![y0; n + 1];
    let mut prev_f: Option<Vec<f64>> = None;
    let mut increment_norms = Vec::new();
    let mut args = vec![0.0f64; rhs.q.len()];

    let mut last_norm = f64::INFINITY;
    for iteration in 1..=max_iter {
        // f along the grid against the current partial sum
        let interp = MonotoneCubic::new(h, &partial_sum);
        let mut f_cur = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let x = k as f64 * h;
            for (slot, &qi) in args.iter_mut().zip(&rhs.q) {
                *slot = if k == 0 {
                    partial_sum[0]
                } else {
                    interp.eval(qi * x)
                };
            }
            f_cur.push(rhs.call(x, &args));
        }

        // increment = cumulative trapezoid of (f_cur - f_prev)
        let g = |j: usize| f_cur[j] - prev_f.as_ref().map_or(0.0, |p| p[j]);
        let mut running = KahanSum::new();
        let mut norm = 0.0f64;
        for (k, value) in partial_sum.iter_mut().enumerate() {
            if k > 0 {
                running.add(0.5 * h * (g(k - 1) + g(k)));
            }
            let inc = running.value();
            *value += inc;
            norm = norm.max(inc.abs());
            if !value.is_finite() {
                return Err(Error::Range {
                    context: "iterate value",
                    index: k,
                });
            }
        }
        increment_norms.push(norm);
        last_norm = norm;

        let sup = partial_sum.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if sup > escape_bound {
            return Err(Error::RectangleEscape {
                iteration,
                norm: sup,
                bound: escape_bound,
            });
        }

        if norm <= tol {
            let certified = majorant_remainder(iteration, rhs.bound_m, rhs.lipschitz_sum(), b);
            return Ok(GridSolution::new(
                b,
                partial_sum,
                iteration,
                Some(certified),
                increment_norms,
            ));
        }
        prev_f = Some(f_cur);
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_increment: last_norm,
    })
}

/// The proof's remainder after the first `m_done` iterates were added:
/// M / L * (e^(L b) - sum_{j<=m_done} (L b)^j / j!), summed directly from
/// the tail side so nothing cancels.
fn majorant_remainder(m_done: usize, bound_m: f64, lipschitz_sum: f64, b: f64) -> f64 {
    if bound_m == 0.0 {
        return 0.0;
    }
    if lipschitz_sum == 0.0 {
        // only the j = 1 term survives the L -> 0 limit
        return if m_done >= 1 { 0.0 } else { bound_m * b };
    }
    let lb = lipschitz_sum * b;
    // term_j = (L b)^j / j! starting at j = m_done + 1
    let mut term = 1.0f64;
    for j in 1..=m_done + 1 {
        term *= lb / j as f64;
    }
    let mut tail = KahanSum::new();
    let mut j = m_done + 1;
    loop {
        tail.add(term);
        j += 1;
        term *= lb / j as f64;
        if term < tail.value() * 1e-18 + f64::MIN_POSITIVE || j > m_done + 10_000 {
            break;
        }
    }
    bound_m / lipschitz_sum * tail.value()
}

/// The exact m-th iterate coefficient for the linear equation: the grid
/// iteration's analytic counterpart is x^m/m! times this product, so the
/// bridge to the series module is the coefficient product itself.
pub fn djm_symbolic_linear_terms(spec: &DelaySpec, m: usize) -> Result<f64, Error> {
    series::coefficient_product(spec, m)
}

/// The iterate bound M (sum L_i)^(m-1) b^m / m! from the convergence proof,
/// for m >= 1.
pub fn apriori_bound(rhs: &DelayRhs, m: usize) -> f64 {
    assert!(m >= 1, "the a-priori bound is defined for m >= 1");
    let l = rhs.lipschitz_sum();
    let mut bound = rhs.bound_m * rhs.b;
    for j in 2..=m {
        bound *= l * rhs.b / j as f64;
    }
    bound
}
