//! Exact arithmetic in the distribution algebra Dist(T_r) of the diagonal
//! torus of GL(m|n) over F_p: binomial and idempotent bases, supersymmetric
//! elements, canonical labels and the class-sum basis of SS_r, with an
//! independent nullspace oracle.

pub mod canonical;
pub mod cli;
pub mod error;
pub mod idempotents;
pub mod json;
pub mod linalg;
pub mod modp;
pub mod ss_basis;
pub mod supersymmetry;
pub mod torus;

pub use canonical::{CanonicalLabel, EquivClass};
pub use error::{Error, Result};
pub use modp::{FpScalar, Prime};
pub use ss_basis::CountReport;
pub use torus::{Basis, ExponentVector, TorusElement, TorusSpec, Var};
