//! The parameter pair (a, q) defining an equation with multiple
//! proportional delays,
//!
//! ```text
//! y'(x) = a_0 y(x) + a_1 y(q_1 x) + ... + a_n y(q_n x),    y(0) = 1,
//! ```
//!
//! with q_0 = 1 and 0 < q_i < 1 for i >= 1.

use crate::error::Error;

/// Validated coefficient/ratio pair. Both vectors have length n + 1; entry 0
/// is the undelayed term.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySpec {
    a: Vec<f64>,
    q: Vec<f64>,
}

/// Checks the delay-ratio rules shared by [`DelaySpec`] and the solver
/// right-hand sides: `q[0]` = 1 exactly, 0 < `q[i]` < 1 for i >= 1, all
/// entries finite.
pub(crate) fn validate_ratios(q: &[f64]) -> Result<(), Error> {
    if q.is_empty() {
        return Err(Error::Domain("q must have at least one entry".into()));
    }
    if q[0] != 1.0 {
        return Err(Error::Domain(format!(
            "q[0] = {}: the first ratio must be exactly 1",
            q[0]
        )));
    }
    for (i, &qi) in q.iter().enumerate().skip(1) {
        if !qi.is_finite() || qi <= 0.0 || qi >= 1.0 {
            return Err(Error::Domain(format!(
                "q[{i}] = {qi}: delay ratios after q[0] must lie strictly inside (0, 1)"
            )));
        }
    }
    Ok(())
}

impl DelaySpec {
    /// Builds a spec, rejecting anything outside the hypotheses: equal
    /// lengths, `q[0]` = 1 exactly, 0 < `q[i]` < 1 strictly for i >= 1,
    /// all entries finite. Duplicate ratios are allowed; they merely merge
    /// coefficients.
    pub fn new(a: Vec<f64>, q: Vec<f64>) -> Result<Self, Error> {
        if a.is_empty() {
            return Err(Error::Domain("a must have at least one entry".into()));
        }
        if a.len() != q.len() {
            return Err(Error::Domain(format!(
                "a has {} entries but q has {}; the lists must have equal length",
                a.len(),
                q.len()
            )));
        }
        for (i, &ai) in a.iter().enumerate() {
            if !ai.is_finite() {
                return Err(Error::Domain(format!(
                    "a[{i}] = {ai}: coefficients must be finite"
                )));
            }
        }
        validate_ratios(&q)?;
        Ok(Self { a, q })
    }

    /// Coefficients a_0 ... a_n.
    pub fn coefficients(&self) -> &[f64] {
        &self.a
    }

    /// Delay ratios q_0 ... q_n (q_0 = 1).
    pub fn ratios(&self) -> &[f64] {
        &self.q
    }

    /// Number of delayed terms n (the lists have n + 1 entries).
    pub fn delay_count(&self) -> usize {
        self.a.len() - 1
    }

    /// Sum of the coefficients. Governs the upper sandwich bound.
    pub fn coeff_sum(&self) -> f64 {
        self.a.iter().sum()
    }

    /// Sum of |a_i|; the growth constant in every tail majorant.
    pub fn coeff_abs_sum(&self) -> f64 {
        self.a.iter().map(|v| v.abs()).sum()
    }

    /// The factor sum_i a_i q_i^m that multiplies the coefficient product
    /// when advancing from index m to m + 1.
    pub fn recurrence_factor(&self, m: usize) -> f64 {
        self.a
            .iter()
            .zip(&self.q)
            .map(|(&ai, &qi)| ai * qi.powi(m as i32))
            .sum()
    }

    /// Fractional-order variant sum_i a_i q_i^(alpha m).
    pub fn frac_recurrence_factor(&self, alpha: f64, m: usize) -> f64 {
        self.a
            .iter()
            .zip(&self.q)
            .map(|(&ai, &qi)| ai * qi.powf(alpha * m as f64))
            .sum()
    }
}
