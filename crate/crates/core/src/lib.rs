//! Weighted Holm multiple testing.
//!
//! Two ways of weighting Holm's step-down procedure are implemented side by
//! side:
//!
//! * **WHP** orders hypotheses by weighted p-values `p_i / w_i` and tests
//!   them against `alpha / (sum of remaining weights)`.
//! * **WAP** orders hypotheses by raw p-values and tests `p_(j)` against
//!   `w_(j) / (sum of remaining weights) * alpha`.
//!
//! Each procedure is available as a step-down ([`procedures`]), as a
//! brute-force closed testing procedure ([`closure`]), as a graphical
//! procedure with a transition matrix ([`graphical`]) and through adjusted
//! p-values ([`adjust`]). [`montecarlo`] holds the least favorable
//! configuration samplers used to check sharpness and the FWER/power
//! simulation study; [`cli`] backs the `wholm` binary.
//!
//! ```
//! use weighted_holm::{adjust, procedures, TestingProblem};
//!
//! let problem = TestingProblem::unlabeled(
//!     vec![0.01, 0.014, 0.3],
//!     vec![1.0, 2.0, 3.0],
//!     0.05,
//! )?;
//! assert_eq!(procedures::whp_stepdown(&problem).len(), 2);
//! assert!(procedures::wap_stepdown(&problem).is_empty());
//! let adj = adjust::adjusted_whp(&problem);
//! assert!((adj.values()[0] - 0.042).abs() < 1e-12);
//! # Ok::<(), weighted_holm::Error>(())
//! ```

pub mod adjust;
pub mod cli;
pub mod closure;
pub mod corpus;
pub mod error;
pub mod graphical;
pub mod montecarlo;
pub mod problem;
pub mod procedures;

pub use error::{Error, Result};
pub use problem::{
    order, weighted_pvalues, OrderKey, OrderingPermutation, RejectionSet, RejectionStep,
    TestingProblem, WeightedPValues,
};
pub use procedures::{holm_stepdown, wap_stepdown, whp_stepdown, Procedure};
