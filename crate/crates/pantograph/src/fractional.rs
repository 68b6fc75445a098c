//! Fractional-order generalization: the series solving
//! D^alpha y(x) = sum_i a_i y(q_i x), y(0) = 1, with a Caputo derivative of
//! order alpha on the left,
//!
//! ```text
//! R_alpha(a; q; x) = sum_{m>=0} x^(alpha m) / Gamma(alpha m + 1) * c_m,
//! c_m = prod_{j=0}^{m-1} (sum_i a_i q_i^(alpha j)),
//! ```
//!
//! plus the Mittag-Leffler comparison function E_alpha, the log-gamma kernel
//! both need, and an L1 finite-difference residual check that verifies the
//! Caputo equation numerically on a grid.

use crate::error::Error;
use crate::kahan::KahanSum;
use crate::series::{SeriesValue, DEFAULT_MAX_TERMS};
use crate::spec::DelaySpec;

/// A validated Caputo order. Any finite alpha > 0 is accepted for series
/// evaluation; the residual check additionally requires alpha < 1, the
/// window on which the L1 scheme is valid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    alpha: f64,
}

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self, Error> {
        if alpha <= 0.0 || !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "alpha = {alpha}: the order must be positive and finite"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn value(&self) -> f64 {
        self.alpha
    }
}

/// Incremental fractional coefficient products; the step from m to m + 1
/// multiplies by sum_i a_i q_i^(alpha m) exactly once.
#[derive(Debug, Clone)]
pub struct FracCoefficientStream<'a> {
    spec: &'a DelaySpec,
    alpha: f64,
    index: usize,
    product: f64,
}

impl<'a> FracCoefficientStream<'a> {
    pub fn new(spec: &'a DelaySpec, alpha: FractionalOrder) -> Self {
        Self {
            spec,
            alpha: alpha.value(),
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

    pub fn advance(&mut self) -> f64 {
        self.product *= self.spec.frac_recurrence_factor(self.alpha, self.index);
        self.index += 1;
        self.product
    }
}

// Lanczos coefficients, g = 607/128 with 14 terms; gives ln Gamma to close
// to full double precision for x > 0. Constants kept at published precision.
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_89e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

#[allow(clippy::excessive_precision)]
fn lgamma_raw(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    // Gamma(1) = Gamma(2) = 1 exactly; pin the zeros of ln Gamma
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let shifted = x + 5.242_187_5;
    let front = (x + 0.5) * shifted.ln() - shifted;
    let mut denom = x;
    let mut ser = 0.999_999_999_999_997_092;
    for c in LANCZOS {
        denom += 1.0;
        ser += c / denom;
    }
    front + (2.506_628_274_631_000_5 * ser / x).ln()
}

/// ln Gamma(x) for x > 0, accurate to about a unit of relative error in the
/// result (well under 1e-13 away from the zeros, which are returned exactly).
pub fn log_gamma(x: f64) -> Result<f64, Error> {
    if x <= 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("x = {x}: log_gamma needs x > 0")));
    }
    Ok(lgamma_raw(x))
}

/// Geometric tail of a Mittag-Leffler-type series: bounds
/// sum_{m > m_star} u^m / Gamma(alpha m + 1) by the first dropped magnitude
/// over 1 - rho, where rho is the (strictly decreasing) term ratio at
/// m_star + 1. Returns infinity while rho >= 1.
fn ml_tail(alpha: f64, u: f64, m_star: usize) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let m1 = (m_star + 1) as f64;
    let ln_u = u.ln();
    let next = (m1 * ln_u - lgamma_raw(alpha * m1 + 1.0)).exp();
    let rho = u * (lgamma_raw(alpha * m1 + 1.0) - lgamma_raw(alpha * m1 + alpha + 1.0)).exp();
    if rho < 1.0 {
        // u > 0 means the true tail is positive; keep the bound positive
        // through underflow of the leading term
        (next / (1.0 - rho)).max(f64::MIN_POSITIVE)
    } else {
        f64::INFINITY
    }
}

/// The Mittag-Leffler function E_alpha(x) = sum_m x^m / Gamma(alpha m + 1)
/// with a rigorous geometric tail bound. E_1 = exp is taken through an exact
/// factorial recurrence rather than the log-gamma kernel.
pub fn mittag_leffler(alpha: FractionalOrder, x: f64, tol: f64) -> Result<SeriesValue, Error> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::Domain(format!(
            "tol = {tol}: tolerance must be positive and finite"
        )));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("x = {x}: argument must be finite")));
    }
    let a = alpha.value();
    if x == 0.0 {
        return Ok(SeriesValue {
            value: 1.0,
            terms_used: 1,
            tail_bound: 0.0,
        });
    }

    let exact_factorials = a == 1.0;
    let ln_ax = x.abs().ln();
    let mut term = 1.0f64;
    let mut sum = KahanSum::new();
    let mut last_tail = f64::INFINITY;
    for m in 0..DEFAULT_MAX_TERMS {
        sum.add(term);
        if !sum.value().is_finite() {
            return Err(Error::Range {
                context: "Mittag-Leffler partial sum",
                index: m,
            });
        }
        last_tail = if exact_factorials {
            let next = term.abs() * x.abs() / (m + 1) as f64;
            let rho = x.abs() / (m + 2) as f64;
            if rho < 1.0 {
                (next / (1.0 - rho)).max(f64::MIN_POSITIVE)
            } else {
                f64::INFINITY
            }
        } else {
            ml_tail(a, x.abs(), m)
        };
        if last_tail <= tol {
            return Ok(SeriesValue {
                value: sum.value(),
                terms_used: m + 1,
                tail_bound: last_tail,
            });
        }
        term = if exact_factorials {
            term * x / (m + 1) as f64
        } else {
            let m1 = (m + 1) as f64;
            let magnitude = (m1 * ln_ax - lgamma_raw(a * m1 + 1.0)).exp();
            if x < 0.0 && (m + 1) % 2 == 1 {
                -magnitude
            } else {
                magnitude
            }
        };
        if !term.is_finite() {
            return Err(Error::Range {
                context: "Mittag-Leffler term",
                index: m + 1,
            });
        }
    }
    Err(Error::Truncation {
        requested: tol,
        achieved: last_tail,
        terms: DEFAULT_MAX_TERMS,
    })
}

/// Evaluates R_alpha(a; q; x) for x >= 0 with a tail bound built from the
/// Mittag-Leffler majorant at A x^alpha, A = sum |a_i|. Coefficient products
/// are carried in log space so that huge c_m never overflow while the terms
/// themselves stay representable.
pub fn eval_frac(
    spec: &DelaySpec,
    alpha: FractionalOrder,
    x: f64,
    tol: f64,
) -> Result<SeriesValue, Error> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::Domain(format!(
            "tol = {tol}: tolerance must be positive and finite"
        )));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "x = {x}: the fractional series needs x >= 0 (x^(alpha m) with non-integer alpha)"
        )));
    }
    let a = alpha.value();
    if x == 0.0 {
        return Ok(SeriesValue {
            value: 1.0,
            terms_used: 1,
            tail_bound: 0.0,
        });
    }

    let a_abs = spec.coeff_abs_sum();
    let u = a_abs * x.powf(a); // majorant argument
    let ln_x = x.ln();

    // coefficient product in log space: c_m = sign * exp(ln_c)
    let mut ln_c = 0.0f64;
    let mut sign_c = 1.0f64;
    // `dead` marks a zero recurrence factor: every later coefficient is zero
    let mut dead = false;
    let mut term = 1.0f64;
    let mut sum = KahanSum::new();
    let mut last_tail = f64::INFINITY;
    for m in 0..DEFAULT_MAX_TERMS {
        sum.add(term);
        if !sum.value().is_finite() {
            return Err(Error::Range {
                context: "fractional partial sum",
                index: m,
            });
        }
        if dead {
            return Ok(SeriesValue {
                value: sum.value(),
                terms_used: m + 1,
                tail_bound: 0.0,
            });
        }
        last_tail = ml_tail(a, u, m);
        if last_tail <= tol {
            return Ok(SeriesValue {
                value: sum.value(),
                terms_used: m + 1,
                tail_bound: last_tail,
            });
        }
        let factor = spec.frac_recurrence_factor(a, m);
        if factor == 0.0 {
            dead = true;
            term = 0.0;
        } else {
            ln_c += factor.abs().ln();
            sign_c *= factor.signum();
            let m1 = (m + 1) as f64;
            term = sign_c * (ln_c + a * m1 * ln_x - lgamma_raw(a * m1 + 1.0)).exp();
        }
        if !term.is_finite() {
            return Err(Error::Range {
                context: "fractional series term",
                index: m + 1,
            });
        }
    }
    Err(Error::Truncation {
        requested: tol,
        achieved: last_tail,
        terms: DEFAULT_MAX_TERMS,
    })
}

/// Fraction of the grid excluded at the origin when taking the residual
/// maximum. Solutions carry an x^alpha leading term whose L1 truncation
/// error at the first node is O(1) regardless of the step, so the stated
/// O(N^-(2-alpha)) rate only holds away from that initial layer; the check
/// measures over x_k >= b/4.
pub const L1_INTERIOR_FRACTION: f64 = 0.25;

/// Evaluates y = R_alpha on a uniform grid over [0, b], applies the L1
/// finite-difference Caputo derivative at the interior nodes (x_k >= b/4)
/// and returns max_k |D^alpha y(x_k) - sum_i a_i y(q_i x_k)|.
pub fn caputo_l1_residual(
    spec: &DelaySpec,
    alpha: FractionalOrder,
    b: f64,
    n: usize,
) -> Result<f64, Error> {
    let a = alpha.value();
    if a >= 1.0 {
        return Err(Error::Domain(format!(
            "alpha = {a}: the L1 residual check needs 0 < alpha < 1; use the classical \
             derivative residual for alpha = 1"
        )));
    }
    if b <= 0.0 || !b.is_finite() {
        return Err(Error::Domain(format!(
            "b = {b}: the interval end must be positive"
        )));
    }
    if n < 16 {
        return Err(Error::Domain(format!(
            "N = {n}: the residual grid needs N >= 16"
        )));
    }

    let h = b / n as f64;
    let series_tol = 1e-12;
    let mut y = Vec::with_capacity(n + 1);
    for k in 0..=n {
        y.push(eval_frac(spec, alpha, k as f64 * h, series_tol)?.value);
    }

    // L1 weights w_j = (j+1)^(1-alpha) - j^(1-alpha)
    let mut w = Vec::with_capacity(n);
    for j in 0..n {
        w.push(((j + 1) as f64).powf(1.0 - a) - (j as f64).powf(1.0 - a));
    }
    let scale = h.powf(-a) / lgamma_raw(2.0 - a).exp();

    let k_min = ((n as f64) * L1_INTERIOR_FRACTION).ceil() as usize;
    let mut residual = 0.0f64;
    for k in k_min.max(1)..=n {
        let xk = k as f64 * h;
        let mut acc = KahanSum::new();
        for j in 0..k {
            acc.add(w[j] * (y[k - j] - y[k - j - 1]));
        }
        let caputo = scale * acc.value();
        let mut rhs = 0.0;
        for (&ai, &qi) in spec.coefficients().iter().zip(spec.ratios()) {
            if ai != 0.0 {
                rhs += ai * eval_frac(spec, alpha, qi * xk, series_tol)?.value;
            }
        }
        residual = residual.max((caputo - rhs).abs());
    }
    Ok(residual)
}
