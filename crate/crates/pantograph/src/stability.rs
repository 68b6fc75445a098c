//! Frozen-delay stability analysis.
//!
//! Freezing the proportional delays at a point x0 turns them into constant
//! lags tau_i = (1 - q_i) x0, whose characteristic function is
//!
//! ```text
//! h(lambda) = lambda - sum_i a_i e^(-lambda tau_i).
//! ```
//!
//! The verdict depends only on the signs of the root real parts. Any root
//! with Re lambda >= 0 satisfies |lambda| <= sum |a_i| (take real parts of
//! lambda = sum a_i e^(-lambda tau_i)), so a window covering that half-disk
//! decides the question: roots further left are negative-real-part by
//! construction. Roots are located by multi-start Newton and the count is
//! certified by the boundary winding number; any mismatch yields an
//! inconclusive verdict rather than a silently wrong one.

use crate::error::Error;
use crate::series::ComplexValue;
use crate::spec::DelaySpec;
use num_complex::Complex64;

/// Coefficients with delays frozen at x0: tau_0 = 0, tau_i >= 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenDelays {
    a: Vec<f64>,
    tau: Vec<f64>,
    x0: f64,
}

impl FrozenDelays {
    pub fn new(a: Vec<f64>, tau: Vec<f64>, x0: f64) -> Result<Self, Error> {
        if a.is_empty() || a.len() != tau.len() {
            return Err(Error::Domain(format!(
                "a has {} entries but tau has {}; the lists must be non-empty and equal",
                a.len(),
                tau.len()
            )));
        }
        if tau[0] != 0.0 {
            return Err(Error::Domain(format!(
                "tau[0] = {}: the undelayed lag must be 0",
                tau[0]
            )));
        }
        for (i, &t) in tau.iter().enumerate() {
            if t < 0.0 || !t.is_finite() {
                return Err(Error::Domain(format!(
                    "tau[{i}] = {t}: lags must be nonnegative"
                )));
            }
        }
        for (i, &ai) in a.iter().enumerate() {
            if !ai.is_finite() {
                return Err(Error::Domain(format!(
                    "a[{i}] = {ai}: coefficients must be finite"
                )));
            }
        }
        Ok(Self { a, tau, x0 })
    }

    /// Freezes a proportional-delay spec at x0: tau_i = (1 - q_i) x0.
    pub fn from_spec(spec: &DelaySpec, x0: f64) -> Result<Self, Error> {
        if x0 < 0.0 || !x0.is_finite() {
            return Err(Error::Domain(format!(
                "x0 = {x0}: the freeze point must be >= 0"
            )));
        }
        let tau = spec.ratios().iter().map(|&qi| (1.0 - qi) * x0).collect();
        Self::new(spec.coefficients().to_vec(), tau, x0)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.a
    }

    pub fn lags(&self) -> &[f64] {
        &self.tau
    }

    pub fn freeze_point(&self) -> f64 {
        self.x0
    }

    pub fn coeff_abs_sum(&self) -> f64 {
        self.a.iter().map(|v| v.abs()).sum()
    }
}

/// h(lambda) = lambda - sum_i a_i e^(-lambda tau_i).
pub fn char_fn(fd: &FrozenDelays, lambda: Complex64) -> Complex64 {
    let mut v = lambda;
    for (&ai, &ti) in fd.a.iter().zip(&fd.tau) {
        v -= ai * (-lambda * ti).exp();
    }
    v
}

/// h'(lambda) = 1 + sum_i a_i tau_i e^(-lambda tau_i).
pub fn char_fn_derivative(fd: &FrozenDelays, lambda: Complex64) -> Complex64 {
    let mut v = Complex64::new(1.0, 0.0);
    for (&ai, &ti) in fd.a.iter().zip(&fd.tau) {
        v += ai * ti * (-lambda * ti).exp();
    }
    v
}

/// Search rectangle: Re in [re_min, re_max], Im in [-im_max, im_max].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_max: f64,
}

impl Window {
    fn validate(&self, grid: usize) -> Result<(), Error> {
        if !self.re_min.is_finite() || !self.re_max.is_finite() || !self.im_max.is_finite() {
            return Err(Error::Domain("window bounds must be finite".into()));
        }
        if self.re_min >= self.re_max {
            return Err(Error::Domain(format!(
                "window needs re_min < re_max, got [{}, {}]",
                self.re_min, self.re_max
            )));
        }
        if self.im_max <= 0.0 {
            return Err(Error::Domain(format!(
                "window needs im_max > 0, got {}",
                self.im_max
            )));
        }
        if grid < 8 {
            return Err(Error::Domain(format!(
                "grid = {grid}: the start lattice needs grid >= 8"
            )));
        }
        Ok(())
    }

    fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im.abs() <= self.im_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Every root in the certified region has negative real part.
    StableOnFiniteInterval,
    /// A certified root with positive real part exists.
    Unstable,
    /// Root count could not be certified, a root sits on the boundary, or
    /// the window does not cover the right half-disk |lambda| <= sum |a_i|.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::StableOnFiniteInterval => "stable-on-finite-interval",
            Verdict::Unstable => "unstable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Root-search outcome. `max_real_part` is negative infinity when no roots
/// were found in the window.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub roots: Vec<ComplexValue>,
    pub max_real_part: f64,
    pub verdict: Verdict,
    pub window: Window,
    /// Winding-number count over the window boundary, when it could be
    /// computed; `verdict` is inconclusive unless this matches `roots.len()`.
    pub certified_count: Option<usize>,
}

const NEWTON_MAX_ITER: usize = 80;
const DEDUP_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-9;

fn newton(fd: &FrozenDelays, start: Complex64) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..NEWTON_MAX_ITER {
        let f = char_fn(fd, z);
        if !f.re.is_finite() || !f.im.is_finite() {
            return None;
        }
        if f.norm() <= 1e-13 * (1.0 + z.norm()) {
            return Some(z);
        }
        let d = char_fn_derivative(fd, z);
        if d.norm() < 1e-300 {
            return None;
        }
        let step = f / d;
        z -= step;
        if z.norm() > 1e9 {
            return None;
        }
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    let f = char_fn(fd, z);
    (f.norm() <= RESIDUAL_TOL * (1.0 + z.norm())).then_some(z)
}

/// Multi-start Newton over a grid x grid lattice, deduplicated, counted
/// against the argument principle, and folded into the sign-of-real-parts
/// verdict.
pub fn find_roots(
    fd: &FrozenDelays,
    window: Window,
    grid: usize,
) -> Result<StabilityReport, Error> {
    window.validate(grid)?;

    let dre = (window.re_max - window.re_min) / grid as f64;
    let dim = 2.0 * window.im_max / grid as f64;
    let mut found: Vec<Complex64> = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let start = Complex64::new(
                window.re_min + (i as f64 + 0.5) * dre,
                -window.im_max + (j as f64 + 0.5) * dim,
            );
            let Some(root) = newton(fd, start) else {
                continue;
            };
            if !window.contains(root) {
                continue;
            }
            let duplicate = found
                .iter()
                .any(|r| (r - root).norm() <= DEDUP_TOL * (1.0 + root.norm()));
            if !duplicate {
                found.push(root);
            }
        }
    }
    found.sort_by(|p, q| {
        q.re.partial_cmp(&p.re)
            .unwrap()
            .then(p.im.partial_cmp(&q.im).unwrap())
    });

    let certified_count = winding_number(fd, window);
    let count_ok = certified_count == Some(found.len());

    let max_real_part = found.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);

    // the window decides stability only if it covers the half-disk that
    // contains every root with nonnegative real part
    let a1 = fd.coeff_abs_sum();
    let covers_right_half_disk = window.re_min <= 0.0 && window.re_max >= a1 && window.im_max >= a1;

    let re_margin = |r: &Complex64| 1e-9 * (1.0 + r.norm());
    let verdict = if found.iter().any(|r| r.re > re_margin(r)) {
        Verdict::Unstable
    } else if !count_ok {
        Verdict::Inconclusive
    } else if covers_right_half_disk && found.iter().all(|r| r.re < -re_margin(r)) {
        Verdict::StableOnFiniteInterval
    } else {
        Verdict::Inconclusive
    };

    Ok(StabilityReport {
        roots: found.into_iter().map(ComplexValue::from).collect(),
        max_real_part,
        verdict,
        window,
        certified_count,
    })
}

const WINDING_MAX_DEPTH: usize = 42;
const WINDING_BASE_SAMPLES: usize = 64;

/// Zero count inside the window by the boundary winding number of h.
/// Each boundary sub-segment is refined until the phase change stays below
/// pi/2; `None` when refinement bottoms out or the boundary passes through
/// a (near-)zero.
fn winding_number(fd: &FrozenDelays, window: Window) -> Option<usize> {
    let corners = [
        Complex64::new(window.re_min, -window.im_max),
        Complex64::new(window.re_max, -window.im_max),
        Complex64::new(window.re_max, window.im_max),
        Complex64::new(window.re_min, window.im_max),
    ];
    let mut total = 0.0f64;
    for e in 0..4 {
        let z1 = corners[e];
        let z2 = corners[(e + 1) % 4];
        for s in 0..WINDING_BASE_SAMPLES {
            let t1 = s as f64 / WINDING_BASE_SAMPLES as f64;
            let t2 = (s + 1) as f64 / WINDING_BASE_SAMPLES as f64;
            let a = z1 + (z2 - z1) * t1;
            let b = z1 + (z2 - z1) * t2;
            total += segment_phase(fd, a, char_fn(fd, a), b, char_fn(fd, b), WINDING_MAX_DEPTH)?;
        }
    }
    let turns = total / std::f64::consts::TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.2 || rounded < -0.5 {
        return None;
    }
    Some(rounded as usize)
}

fn segment_phase(
    fd: &FrozenDelays,
    z1: Complex64,
    f1: Complex64,
    z2: Complex64,
    f2: Complex64,
    depth: usize,
) -> Option<f64> {
    let scale = 1.0 + z1.norm().max(z2.norm());
    if f1.norm() <= 1e-12 * scale || f2.norm() <= 1e-12 * scale {
        return None; // root on (or hugging) the boundary
    }
    let dphi = (f2 / f1).arg();
    if dphi.abs() <= std::f64::consts::FRAC_PI_2 {
        return Some(dphi);
    }
    if depth == 0 {
        return None;
    }
    let zm = 0.5 * (z1 + z2);
    let fm = char_fn(fd, zm);
    Some(
        segment_phase(fd, z1, f1, zm, fm, depth - 1)?
            + segment_phase(fd, zm, fm, z2, f2, depth - 1)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(a: Vec<f64>, tau: Vec<f64>) -> FrozenDelays {
        FrozenDelays::new(a, tau, 0.0).unwrap()
    }

    fn default_window() -> Window {
        Window {
            re_min: -5.0,
            re_max: 2.0,
            im_max: 40.0,
        }
    }

    #[test]
    fn char_fn_hand_values() {
        // undelayed: root at lambda = a_0
        let f = fd(vec![0.7], vec![0.0]);
        let v = char_fn(&f, Complex64::new(0.7, 0.0));
        assert!(v.norm() < 1e-15);

        // direct substitution at lambda = 0
        let f = fd(vec![0.0, -1.0], vec![0.0, 1.0]);
        let v = char_fn(&f, Complex64::new(0.0, 0.0));
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn frozen_from_spec_hand_values() {
        let spec = DelaySpec::new(vec![0.0, -1.0], vec![1.0, 0.5]).unwrap();
        let f = FrozenDelays::from_spec(&spec, 2.0).unwrap();
        assert_eq!(f.lags(), &[0.0, 1.0]);

        let spec = DelaySpec::new(vec![1.0, 1.0, 1.0], vec![1.0, 0.9, 0.5]).unwrap();
        let f = FrozenDelays::from_spec(&spec, 10.0).unwrap();
        assert!((f.lags()[1] - 1.0).abs() < 1e-12);
        assert!((f.lags()[2] - 5.0).abs() < 1e-12);

        // x0 = 0 degenerates to the undelayed problem with root sum(a)
        let f = FrozenDelays::from_spec(&spec, 0.0).unwrap();
        assert_eq!(f.lags(), &[0.0, 0.0, 0.0]);
        let v = char_fn(&f, Complex64::new(3.0, 0.0));
        assert!(v.norm() < 1e-15);

        assert!(FrozenDelays::from_spec(&spec, -1.0).is_err());
    }

    #[test]
    fn undelayed_negative_coefficient_is_stable() {
        let f = fd(vec![-1.0], vec![0.0]);
        let report = find_roots(&f, default_window(), 16).unwrap();
        assert_eq!(report.roots.len(), 1);
        assert!((report.max_real_part + 1.0).abs() < 1e-9);
        assert_eq!(report.verdict, Verdict::StableOnFiniteInterval);
        assert_eq!(report.certified_count, Some(1));
    }

    #[test]
    fn undelayed_positive_coefficient_is_unstable() {
        let f = fd(vec![1.0], vec![0.0]);
        let report = find_roots(&f, default_window(), 16).unwrap();
        assert_eq!(report.verdict, Verdict::Unstable);
        assert!((report.max_real_part - 1.0).abs() < 1e-9);
    }

    #[test]
    fn classical_delayed_negative_feedback() {
        // y'(t) = -y(t - 1): dominant root pair near -0.3181 +- 1.3372i
        let f = fd(vec![0.0, -1.0], vec![0.0, 1.0]);
        let report = find_roots(&f, default_window(), 48).unwrap();
        assert_eq!(report.verdict, Verdict::StableOnFiniteInterval);
        assert!(
            (report.max_real_part + 0.318_131_505_204_764_1).abs() < 5e-3,
            "max re = {}",
            report.max_real_part
        );
        // roots pair up in conjugates
        for r in &report.roots {
            assert!(
                report
                    .roots
                    .iter()
                    .any(|s| (s.re - r.re).abs() < 1e-7 && (s.im + r.im).abs() < 1e-7),
                "unpaired root {r:?}"
            );
        }
        // every reported root really is one
        for r in &report.roots {
            let v = char_fn(&f, Complex64::new(r.re, r.im));
            assert!(v.norm() <= 1e-9 * (1.0 + r.abs()));
        }
        assert_eq!(report.certified_count, Some(report.roots.len()));
    }

    #[test]
    fn winding_matches_on_all_three_reference_cases() {
        for (a, tau, expect) in [
            (vec![-1.0], vec![0.0], 1usize),
            (vec![1.0], vec![0.0], 1),
            (vec![0.0, -1.0], vec![0.0, 1.0], 14),
        ] {
            let f = fd(a, tau);
            let count = winding_number(&f, default_window()).unwrap();
            assert_eq!(count, expect);
        }
    }

    #[test]
    fn small_window_without_coverage_is_inconclusive() {
        // stable case but the window cannot certify the right half-disk
        let f = fd(vec![-1.0], vec![0.0]);
        let w = Window {
            re_min: -5.0,
            re_max: 0.5,
            im_max: 0.5,
        };
        let report = find_roots(&f, w, 16).unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn window_validation() {
        let f = fd(vec![-1.0], vec![0.0]);
        let mut w = default_window();
        w.re_min = 3.0;
        assert!(find_roots(&f, w, 16).is_err());
        assert!(find_roots(&f, default_window(), 4).is_err());
        let mut w = default_window();
        w.im_max = -1.0;
        assert!(find_roots(&f, w, 16).is_err());
    }

    #[test]
    fn overflowing_left_edge_degrades_safely() {
        // e^(-re_min * tau) overflows along the left edge, so the winding
        // count is unavailable; a lag this long is genuinely unstable
        // (delay far beyond pi/2) and an individually certified root with
        // positive real part still decides that
        let f = FrozenDelays::new(vec![0.0, -1.0], vec![0.0, 150.0], 300.0).unwrap();
        let w = Window {
            re_min: -6.0,
            re_max: 2.0,
            im_max: 10.0,
        };
        let report = find_roots(&f, w, 12).unwrap();
        assert_eq!(report.certified_count, None);
        assert_eq!(report.verdict, Verdict::Unstable);
        assert!(report.max_real_part > 0.0);
    }

    #[test]
    fn boundary_root_is_inconclusive_not_wrong() {
        // root exactly at 0 sits on every boundary through the origin;
        // here the root -1 lies exactly on the left edge re_min = -1
        let f = fd(vec![-1.0], vec![0.0]);
        let w = Window {
            re_min: -1.0,
            re_max: 2.0,
            im_max: 2.0,
        };
        let report = find_roots(&f, w, 16).unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
    }
}
