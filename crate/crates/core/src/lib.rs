//! Volume minimization over Reeb covectors of toric cones.
//!
//! Cones are stored exactly ([`cone`], [`polycone`]); slices, truncated
//! cones and their moments work over any [`num::Scalar`] so the same code
//! runs in rational and floating-point mode ([`polytope`], [`moments`]).
//! [`functionals`] builds `W` and its derivatives, [`optimizer`] minimizes it
//! and [`oracle`] cross-checks everything by brute force.

pub mod cone;
pub mod corpus;
pub mod error;
pub mod functionals;
pub mod io;
pub mod moments;
pub mod num;
pub mod optimizer;
pub mod oracle;
pub mod polycone;
pub mod polytope;
pub mod smith;

pub use error::{Error, Result};
