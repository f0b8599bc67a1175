//! Inexact infeasible interior point method for standard-form linear
//! programs, with a simulated quantum linear system oracle and a
//! preconditioned Newton system whose condition number grows like `1/μ`.
//!
//! The guide in `book/` walks through the modules in the order an iteration
//! uses them; its code blocks run as doctests of this crate.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod linalg;
pub mod newton;
pub mod oracle;
pub mod problem;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/problem.md")]
    mod problem {}
    #[doc = include_str!("../../../book/src/newton.md")]
    mod newton {}
    #[doc = include_str!("../../../book/src/preconditioning.md")]
    mod preconditioning {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/driver.md")]
    mod driver {}
    #[doc = include_str!("../../../book/src/conditioning.md")]
    mod conditioning {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
