//! Error type shared by every module in the crate.

use std::fmt;

/// Everything that can go wrong across series evaluation, the solvers and
/// the stability search.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violates a documented precondition. The message names the
    /// offending field or value.
    Domain(String),
    /// The requested tail tolerance could not be reached within the term
    /// budget. Carries the rigorous bound that was achieved.
    Truncation {
        requested: f64,
        achieved: f64,
        terms: usize,
    },
    /// An intermediate quantity left the representable range. `index` is the
    /// series index (or grid node) at which it happened.
    Range { context: &'static str, index: usize },
    /// A successive-approximation iterate left the rectangle on which the
    /// convergence theorem holds.
    RectangleEscape {
        iteration: usize,
        norm: f64,
        bound: f64,
    },
    /// The iteration did not meet the tolerance within the sweep budget.
    /// Carries the sup-norm of the last increment.
    NonConvergence {
        iterations: usize,
        last_increment: f64,
    },
    /// The marching integrator produced a non-finite state.
    Blowup { last_good_x: f64 },
    /// Syntax error in an expression or list. `position` is a byte offset
    /// into the input.
    Parse { position: usize, message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Truncation {
                requested,
                achieved,
                terms,
            } => write!(
                f,
                "truncation error: tail bound {achieved:e} after {terms} terms, requested {requested:e}"
            ),
            Error::Range { context, index } => {
                write!(f, "range error: {context} became non-finite at index {index}")
            }
            Error::RectangleEscape {
                iteration,
                norm,
                bound,
            } => write!(
                f,
                "iterate escaped the rectangle at iteration {iteration}: |S| = {norm:e} > {bound:e}"
            ),
            Error::NonConvergence {
                iterations,
                last_increment,
            } => write!(
                f,
                "no convergence after {iterations} iterations, last increment norm {last_increment:e}"
            ),
            Error::Blowup { last_good_x } => {
                write!(f, "solution blew up; last good point x = {last_good_x}")
            }
            Error::Parse { position, message } => {
                write!(f, "parse error at byte {position}: {message}")
            }
        }
    }
}

impl std::error::Error for Error {}
