//! Numerics for differential equations with multiple proportional delays.
//!
//! The central object is the entire function R(a; q; x) solving
//!
//! ```text
//! y'(x) = a_0 y(x) + a_1 y(q_1 x) + ... + a_n y(q_n x),    y(0) = 1,
//! ```
//!
//! with q_0 = 1 and 0 < q_i < 1, together with its fractional-order
//! generalization (Caputo derivative on the left-hand side) and the
//! machinery needed to check both against independent routes:
//!
//! - [`series`]: truncated evaluation of R with rigorous tail bounds,
//!   derivatives, the addition rebuild, complex arguments and the
//!   exponential sandwich.
//! - [`fractional`]: the fractional series, the Mittag-Leffler comparison
//!   function, a log-gamma kernel and an L1-scheme residual check of the
//!   Caputo equation.
//! - [`djm`]: the successive-approximation (decomposition) iteration on a
//!   grid, with the a-priori bound from its convergence proof as an error
//!   certificate.
//! - [`rk4`]: a marching Runge-Kutta reference integrator; proportional
//!   delays look backwards, so delayed values come from dense output over
//!   the already-computed history.
//! - [`stability`]: roots of the frozen-delay characteristic function in a
//!   complex window, certified by the argument principle, and the resulting
//!   finite-interval stability verdict.
//! - [`expr`]: the small arithmetic grammar the CLI accepts for scalar
//!   right-hand sides.
//!
//! The `pantograph` binary exposes `eval`, `table`, `solve` and `stability`
//! subcommands over these modules with CSV/JSON output.
//!
//! ```
//! use pantograph::{series, DelaySpec};
//!
//! // y'(x) = 0.5 y(x) + 0.5 y(x/2), y(0) = 1
//! let spec = DelaySpec::new(vec![0.5, 0.5], vec![1.0, 0.5])?;
//! let at_one = series::eval(&spec, 1.0, 1e-12)?;
//! assert!((at_one.value - 2.4653867).abs() < 1e-6);
//! assert!(at_one.tail_bound <= 1e-12);
//!
//! // the value sits inside its exponential sandwich
//! let (lower, upper) = series::sandwich_bounds(&spec, 1.0)?;
//! assert!(lower <= at_one.value && at_one.value <= upper);
//!
//! // and the marching integrator lands on the same number
//! let grid = pantograph::rk4::integrate(&spec, 1.0, 1.0 / 128.0)?;
//! assert!((grid.final_value() - at_one.value).abs() < 1e-6);
//! # Ok::<(), pantograph::Error>(())
//! ```

pub mod djm;
pub mod error;
pub mod expr;
pub mod fractional;
pub mod grid;
pub mod kahan;
pub mod rk4;
pub mod series;
pub mod spec;
pub mod stability;

pub use error::Error;
pub use spec::DelaySpec;

#[cfg(test)]
mod concurrency {
    // every result type crosses threads freely; the incremental coefficient
    // streams are single-owner but still movable between threads
    #[test]
    fn public_types_are_send_and_sync() {
        fn shared<T: Send + Sync>() {}
        shared::<crate::DelaySpec>();
        shared::<crate::Error>();
        shared::<crate::series::SeriesValue>();
        shared::<crate::series::ComplexValue>();
        shared::<crate::fractional::FractionalOrder>();
        shared::<crate::grid::GridSolution>();
        shared::<crate::grid::InterpolatedValue>();
        shared::<crate::djm::DelayRhs>();
        shared::<crate::rk4::History>();
        shared::<crate::stability::FrozenDelays>();
        shared::<crate::stability::StabilityReport>();

        fn movable<T: Send>() {}
        movable::<crate::series::CoefficientStream<'static>>();
        movable::<crate::fractional::FracCoefficientStream<'static>>();
    }
}
