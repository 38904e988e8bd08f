//! Distributions, hazard rates and stochastic-order verdicts for parallel
//! systems of independent components under the exponentiated scale model,
//! where a component has CDF `F(λx)^a`.
//!
//! * [`dists`]: PGW and GG baselines, components, JSON form.
//! * [`parallel`]: system CDF, survival and hazard, grids and curves.
//! * [`preorders`]: majorization, the p-larger order and scale means.
//! * [`ordercheck`]: usual and hazard rate order checks, equivalence harnesses.
//! * [`identities`]: assumption audits and identity residuals.
//! * [`bounds`]: closed-form hazard and conditional-survival bounds.
//! * [`mcsim`]: seeded, worker-count independent Monte Carlo.
//!
//! ```
//! use stochorder::dists::BaselineFamily;
//! use stochorder::ordercheck::check_st;
//! use stochorder::parallel::{EvalGrid, ParallelSystem};
//!
//! # fn main() -> Result<(), stochorder::error::Error> {
//! let fam = BaselineFamily::pgw(1.5, 0.8)?;
//! let hetero = ParallelSystem::scale_model(fam, &[1.5, 2.0, 3.5])?;
//! let homo = ParallelSystem::scale_model(fam, &[2.2; 3])?;
//! // the homogeneous scale is above the geometric mean 2.19, so the
//! // heterogeneous system lives longer
//! assert!(check_st(&hetero, &homo, &EvalGrid::default())?.holds);
//! # Ok(())
//! # }
//! ```
//!
//! A longer walk-through lives in the `book/` directory of the repository.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dists;
pub mod error;
pub mod identities;
pub mod mcsim;
pub mod numeric;
pub mod ordercheck;
pub mod parallel;
pub mod preorders;
pub mod quadrature;
pub mod rng;
pub mod special;

// Book chapters are compiled as doctests so their snippets cannot go stale.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    pub mod distributions {}
    #[doc = include_str!("../../../book/src/parallel-systems.md")]
    pub mod parallel_systems {}
    #[doc = include_str!("../../../book/src/preorders.md")]
    pub mod preorders {}
    #[doc = include_str!("../../../book/src/stochastic-orders.md")]
    pub mod stochastic_orders {}
    #[doc = include_str!("../../../book/src/assumptions.md")]
    pub mod assumptions {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    pub mod bounds {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
