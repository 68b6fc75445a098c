//! Shared test machinery: a deterministic RNG for reproducible "random"
//! specs and exact-rational oracles that are independent of the library's
//! evaluation path.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use pantograph::spec::DelaySpec;

/// SplitMix64: tiny, seedable, identical on every platform.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        lo + (hi - lo) * u
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// A random spec with n in 0..=max_delays extra delays, |a_i| <= amp
    /// (nonnegative when `nonnegative`), q_i in (0.1, 0.95).
    pub fn spec(&mut self, max_delays: usize, amp: f64, nonnegative: bool) -> DelaySpec {
        let n = self.below(max_delays + 1);
        let mut a = Vec::with_capacity(n + 1);
        let mut q = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let lo = if nonnegative { 0.0 } else { -amp };
            a.push(self.uniform(lo, amp));
            q.push(if i == 0 { 1.0 } else { self.uniform(0.1, 0.95) });
        }
        DelaySpec::new(a, q).expect("generated spec is valid")
    }
}

fn big(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite f64")
}

/// Exact-rational partial sums of the series sum x^m/m! c_m, stopping once
/// |term| < cutoff. Every f64 input is a rational, so the only rounding is
/// the final conversion of the sum.
pub fn rational_eval(spec: &DelaySpec, x: f64, cutoff: f64) -> f64 {
    let a: Vec<BigRational> = spec.coefficients().iter().map(|&v| big(v)).collect();
    let q: Vec<BigRational> = spec.ratios().iter().map(|&v| big(v)).collect();
    let x = big(x);

    let mut qpow: Vec<BigRational> = vec![BigRational::from_integer(BigInt::from(1)); a.len()];
    let mut coeff = BigRational::from_integer(BigInt::from(1)); // c_m
    let mut xp = BigRational::from_integer(BigInt::from(1)); // x^m / m!
    let mut total = BigRational::zero();
    for m in 0..10_000u32 {
        let term = &coeff * &xp;
        total += &term;
        if term.abs().to_f64().unwrap_or(f64::INFINITY) < cutoff && m > 2 {
            break;
        }
        // advance: c_{m+1} = c_m * sum_i a_i q_i^m, x^{m+1}/(m+1)!
        let mut factor = BigRational::zero();
        for (ai, qp) in a.iter().zip(&qpow) {
            factor += ai * qp;
        }
        coeff *= factor;
        for (qp, qi) in qpow.iter_mut().zip(&q) {
            *qp *= qi;
        }
        xp = xp * &x / BigRational::from_integer(BigInt::from(m as i64 + 1));
    }
    total.to_f64().expect("sum fits in f64")
}

/// The exact coefficient product c_m as a rational, converted once.
pub fn rational_coefficient_product(spec: &DelaySpec, m: usize) -> f64 {
    let a: Vec<BigRational> = spec.coefficients().iter().map(|&v| big(v)).collect();
    let q: Vec<BigRational> = spec.ratios().iter().map(|&v| big(v)).collect();
    let mut qpow: Vec<BigRational> = vec![BigRational::from_integer(BigInt::from(1)); a.len()];
    let mut coeff = BigRational::from_integer(BigInt::from(1));
    for _ in 0..m {
        let mut factor = BigRational::zero();
        for (ai, qp) in a.iter().zip(&qpow) {
            factor += ai * qp;
        }
        coeff *= factor;
        for (qp, qi) in qpow.iter_mut().zip(&q) {
            *qp *= qi;
        }
    }
    coeff.to_f64().expect("product fits in f64")
}

/// Complex variant of [`rational_eval`]: exact rational real/imaginary
/// parts of the partial sums at z = re + i im.
pub fn rational_eval_complex(spec: &DelaySpec, re: f64, im: f64, cutoff: f64) -> (f64, f64) {
    let a: Vec<BigRational> = spec.coefficients().iter().map(|&v| big(v)).collect();
    let q: Vec<BigRational> = spec.ratios().iter().map(|&v| big(v)).collect();
    let zr = big(re);
    let zi = big(im);

    let one = BigRational::from_integer(BigInt::from(1));
    let mut qpow: Vec<BigRational> = vec![one.clone(); a.len()];
    let mut coeff = one.clone();
    // zp = z^m / m!
    let mut zp_re = one.clone();
    let mut zp_im = BigRational::zero();
    let mut total_re = BigRational::zero();
    let mut total_im = BigRational::zero();
    for m in 0..10_000u32 {
        let term_re = &coeff * &zp_re;
        let term_im = &coeff * &zp_im;
        total_re += &term_re;
        total_im += &term_im;
        let size = term_re.abs().to_f64().unwrap_or(f64::INFINITY)
            + term_im.abs().to_f64().unwrap_or(f64::INFINITY);
        if size < cutoff && m > 2 {
            break;
        }
        let mut factor = BigRational::zero();
        for (ai, qp) in a.iter().zip(&qpow) {
            factor += ai * qp;
        }
        coeff *= factor;
        for (qp, qi) in qpow.iter_mut().zip(&q) {
            *qp *= qi;
        }
        let m1 = BigRational::from_integer(BigInt::from(m as i64 + 1));
        let next_re = (&zp_re * &zr - &zp_im * &zi) / &m1;
        let next_im = (&zp_re * &zi + &zp_im * &zr) / &m1;
        zp_re = next_re;
        zp_im = next_im;
    }
    (
        total_re.to_f64().expect("re fits in f64"),
        total_im.to_f64().expect("im fits in f64"),
    )
}

/// erf(x) by its entire Taylor series; plenty for oracle duty at |x| <= 2.
pub fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = 0.0f64;
    for n in 0..200 {
        sum += term / (2 * n + 1) as f64;
        term *= -x * x / (n + 1) as f64;
        if term.abs() < 1e-20 {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

/// The identity E_{1/2}(x) = e^(x^2) erfc(-x) = e^(x^2) (1 + erf(x)).
pub fn mittag_leffler_half_oracle(x: f64) -> f64 {
    (x * x).exp() * (1.0 + erf_series(x))
}
