//! The special function R(a; q; x) solving y'(x) = sum_i a_i y(q_i x),
//! y(0) = 1, as the entire series
//!
//! ```text
//! R(a; q; x) = sum_{m>=0} x^m / m! * c_m,
//! c_m = prod_{j=0}^{m-1} (sum_i a_i q_i^j),   c_0 = 1.
//! ```
//!
//! Evaluation truncates when a rigorous tail bound drops below the requested
//! tolerance. With A = sum_i |a_i| every coefficient satisfies |c_m| <= A^m,
//! so the tail beyond m* is bounded by the exponential remainder
//! sum_{m>m*} (A|x|)^m / m!, which is itself bounded geometrically once
//! m* + 2 > A|x|. Stopping on the bound, not on term smallness, is what makes
//! the reported `tail_bound` trustworthy before the terms start decaying.

use crate::error::Error;
use crate::kahan::KahanSum;
use crate::spec::DelaySpec;
use num_complex::Complex64;

/// Hard ceiling on summed terms; reaching it yields [`Error::Truncation`].
pub const DEFAULT_MAX_TERMS: usize = 10_000;

/// A truncated series evaluation: the value, how many terms were summed and
/// a rigorous bound on everything that was dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
}

/// A complex evaluation result, the real/imaginary split of R at a complex
/// argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl ComplexValue {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for Complex64 {
    fn from(z: ComplexValue) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Incremental coefficient products c_m. Starts at c_0 = 1; each
/// [`advance`](Self::advance) multiplies by the recurrence factor
/// sum_i a_i q_i^m exactly once, so walking to index m costs O(n) per step.
#[derive(Debug, Clone)]
pub struct CoefficientStream<'a> {
    spec: &'a DelaySpec,
    index: usize,
    product: f64,
}

impl<'a> CoefficientStream<'a> {
    pub fn new(spec: &'a DelaySpec) -> Self {
        Self {
            spec,
            index: 0,
            product: 1.0,
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn product(&self) -> f64 {
        self.product
    }

    /// Steps from index m to m + 1 and returns the new product.
    pub fn advance(&mut self) -> f64 {
        self.product *= self.spec.recurrence_factor(self.index);
        self.index += 1;
        self.product
    }
}

/// The coefficient product c_m = prod_{j=0}^{m-1} sum_i a_i q_i^j; returns 1
/// for m = 0 by convention.
pub fn coefficient_product(spec: &DelaySpec, m: usize) -> Result<f64, Error> {
    let mut stream = CoefficientStream::new(spec);
    for _ in 0..m {
        stream.advance();
        if !stream.product().is_finite() {
            return Err(Error::Range {
                context: "coefficient product",
                index: stream.index(),
            });
        }
    }
    Ok(stream.product())
}

fn check_tol(tol: f64) -> Result<(), Error> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::Domain(format!(
            "tol = {tol}: tolerance must be positive and finite"
        )));
    }
    Ok(())
}

/// Geometric bound on the exponential remainder sum_{k>r} u^k / k! given the
/// already-computed term u^(r+1)/(r+1)!. Valid (and finite) once u < r + 2.
/// For u > 0 the true remainder is positive, so the bound is kept positive
/// even when the leading term has underflowed.
fn exp_tail_from_next(next_term: f64, u: f64, r: usize) -> f64 {
    if u == 0.0 {
        return next_term; // 0 exactly: the series has terminated
    }
    if u < (r + 2) as f64 {
        (next_term / (1.0 - u / (r + 2) as f64)).max(f64::MIN_POSITIVE)
    } else {
        f64::INFINITY
    }
}

/// Evaluates R(a; q; x) with tail bound at most `tol`.
pub fn eval(spec: &DelaySpec, x: f64, tol: f64) -> Result<SeriesValue, Error> {
    eval_derivative(spec, x, 0, tol)
}

/// As [`eval`] with a caller-chosen term budget.
pub fn eval_with_limit(
    spec: &DelaySpec,
    x: f64,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesValue, Error> {
    truncated_series(spec, x, 0, tol, max_terms)
}

/// Solution with a general initial value: the equation is linear, so
/// y(0) = y0 just scales the normalized series, y(x) = y0 R(a; q; x).
/// The tail bound scales with it.
pub fn eval_with_initial(
    spec: &DelaySpec,
    y0: f64,
    x: f64,
    tol: f64,
) -> Result<SeriesValue, Error> {
    if !y0.is_finite() {
        return Err(Error::Domain(format!(
            "y0 = {y0}: initial value must be finite"
        )));
    }
    let base = eval(spec, x, tol)?;
    Ok(SeriesValue {
        value: y0 * base.value,
        terms_used: base.terms_used,
        tail_bound: y0.abs() * base.tail_bound,
    })
}

/// The r-th derivative series sum_{m>=r} x^(m-r)/(m-r)! c_m. For r = 0 this
/// is exactly [`eval`] (same code path, bit for bit).
pub fn eval_derivative(spec: &DelaySpec, x: f64, r: usize, tol: f64) -> Result<SeriesValue, Error> {
    truncated_series(spec, x, r, tol, DEFAULT_MAX_TERMS)
}

/// Shared engine: sums t_k = c_(r+k) x^k / k! by the combined recurrence
/// t_(k+1) = t_k * x * factor(r+k) / (k+1), Kahan-compensated, with the
/// exponential majorant A^(r+k) |x|^k / k! driving the stop rule.
fn truncated_series(
    spec: &DelaySpec,
    x: f64,
    r: usize,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesValue, Error> {
    check_tol(tol)?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("x = {x}: argument must be finite")));
    }
    if r > DEFAULT_MAX_TERMS {
        return Err(Error::Domain(format!(
            "r = {r}: derivative order beyond the term budget {DEFAULT_MAX_TERMS}"
        )));
    }

    let a_abs = spec.coeff_abs_sum();
    let u = a_abs * x.abs();

    // leading term t_0 = c_r
    let mut term = 1.0f64;
    for j in 0..r {
        term *= spec.recurrence_factor(j);
        if !term.is_finite() {
            return Err(Error::Range {
                context: "coefficient product",
                index: j + 1,
            });
        }
    }

    let mut majorant = if r == 0 { 1.0 } else { a_abs.powi(r as i32) };
    if !majorant.is_finite() {
        return Err(Error::Range {
            context: "tail majorant",
            index: r,
        });
    }

    let mut sum = KahanSum::new();
    let mut last_tail = f64::INFINITY;
    for k in 0..max_terms {
        sum.add(term);
        if !sum.value().is_finite() {
            return Err(Error::Range {
                context: "series partial sum",
                index: r + k,
            });
        }
        let next_majorant = majorant * u / (k + 1) as f64;
        last_tail = exp_tail_from_next(next_majorant, u, k);
        if last_tail <= tol {
            return Ok(SeriesValue {
                value: sum.value(),
                terms_used: k + 1,
                tail_bound: last_tail,
            });
        }
        term = term * x * spec.recurrence_factor(r + k) / (k + 1) as f64;
        if !term.is_finite() {
            return Err(Error::Range {
                context: "series term",
                index: r + k + 1,
            });
        }
        majorant = next_majorant;
    }
    Err(Error::Truncation {
        requested: tol,
        achieved: last_tail,
        terms: max_terms,
    })
}

/// Rebuilds R at x + y from derivative values at y:
/// sum_{r=0}^{R} x^r / r! * R^(r)(y). The reported `tail_bound` covers both
/// the inner truncations and the outer remainder, so it bounds the distance
/// to the true R(x + y).
pub fn eval_addition(
    spec: &DelaySpec,
    x: f64,
    y: f64,
    outer_terms: usize,
    tol: f64,
) -> Result<SeriesValue, Error> {
    check_tol(tol)?;
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain("x and y must be finite".into()));
    }
    if outer_terms > DEFAULT_MAX_TERMS {
        return Err(Error::Domain(format!(
            "R = {outer_terms}: outer term count beyond the budget {DEFAULT_MAX_TERMS}"
        )));
    }

    let a_abs = spec.coeff_abs_sum();
    let mut sum = KahanSum::new();
    let mut weight = 1.0f64; // x^r / r!
    let mut inner_tail = 0.0f64;
    for r in 0..=outer_terms {
        let deriv = eval_derivative(spec, y, r, tol)?;
        sum.add(weight * deriv.value);
        inner_tail += weight.abs() * deriv.tail_bound;
        weight = weight * x / (r + 1) as f64;
    }
    if !sum.value().is_finite() {
        return Err(Error::Range {
            context: "addition partial sum",
            index: outer_terms,
        });
    }

    // |R^(r)(y)| <= A^r e^(A|y|), so the dropped outer terms are bounded by
    // e^(A|y|) * sum_{r>R} (A|x|)^r / r!; fall back to the full exponential
    // when the geometric form is not yet valid.
    let u = a_abs * x.abs();
    let mut next = 1.0f64; // u^(R+1) / (R+1)!
    for r in 0..=outer_terms {
        next *= u / (r + 1) as f64;
    }
    let outer_tail = exp_tail_from_next(next, u, outer_terms).min(u.exp());
    let scale = (a_abs * y.abs()).exp();
    if !(outer_tail * scale).is_finite() {
        return Err(Error::Range {
            context: "addition tail bound",
            index: outer_terms,
        });
    }

    Ok(SeriesValue {
        value: sum.value(),
        terms_used: outer_terms + 1,
        tail_bound: inner_tail + outer_tail * scale,
    })
}

/// Sums the series at a complex argument. The real and imaginary parts of
/// the result are the cosine-like and sine-like splits of R.
pub fn eval_complex(spec: &DelaySpec, z: ComplexValue, tol: f64) -> Result<ComplexValue, Error> {
    check_tol(tol)?;
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain("z must be finite".into()));
    }

    let zc: Complex64 = z.into();
    let a_abs = spec.coeff_abs_sum();
    let u = a_abs * zc.norm();

    let mut term = Complex64::new(1.0, 0.0);
    let mut majorant = 1.0f64;
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    let mut last_tail = f64::INFINITY;
    for k in 0..DEFAULT_MAX_TERMS {
        re.add(term.re);
        im.add(term.im);
        if !re.value().is_finite() || !im.value().is_finite() {
            return Err(Error::Range {
                context: "complex partial sum",
                index: k,
            });
        }
        let next_majorant = majorant * u / (k + 1) as f64;
        last_tail = exp_tail_from_next(next_majorant, u, k);
        if last_tail <= tol {
            return Ok(ComplexValue::new(re.value(), im.value()));
        }
        term = term * zc * spec.recurrence_factor(k) / (k + 1) as f64;
        if !term.re.is_finite() || !term.im.is_finite() {
            return Err(Error::Range {
                context: "complex series term",
                index: k + 1,
            });
        }
        majorant = next_majorant;
    }
    Err(Error::Truncation {
        requested: tol,
        achieved: last_tail,
        terms: DEFAULT_MAX_TERMS,
    })
}

/// The exponential sandwich (e^(a_0 x), e^((sum a_i) x)) that encloses R for
/// nonnegative coefficients and x >= 0.
pub fn sandwich_bounds(spec: &DelaySpec, x: f64) -> Result<(f64, f64), Error> {
    for (i, &ai) in spec.coefficients().iter().enumerate() {
        if ai < 0.0 {
            return Err(Error::Domain(format!(
                "a[{i}] = {ai}: the sandwich inequality needs nonnegative coefficients"
            )));
        }
    }
    if x < 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "x = {x}: the sandwich inequality needs x >= 0"
        )));
    }
    Ok((
        (spec.coefficients()[0] * x).exp(),
        (spec.coeff_sum() * x).exp(),
    ))
}
