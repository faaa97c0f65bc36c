//! Primitivity of the subgroup of middle homology spanned by standard
//! subspaces of a complex Fermat variety of even dimension.
//!
//! The crate is organised bottom-up:
//!
//! * [`combinatorics`]: pair-partitions, the point count `|Γ_K|` and the rank
//!   of `L_K(X)`.
//! * [`polyring`]: exact sparse polynomials over `Z` and `F_p`, the generator
//!   polynomials and reduction in the finite quotients `R` and `R̄`.
//! * [`groebner`]: grevlex Buchberger over `F_p` and an independent
//!   linear-algebra closure, both yielding `d_p = dim B_K ⊗ F_p`.
//! * [`zlattice`]: integer presentations of the torsion group and Smith
//!   normal form.
//! * [`criterion`]: the `d_0` versus `d_p` verdict and grid scans.

pub mod combinatorics;
pub mod criterion;
mod error;
pub mod exec;
pub mod fp;
pub mod groebner;
pub mod limits;
pub mod polyring;
pub mod zlattice;

pub use combinatorics::{PairPartition, PartitionSet, ProblemInstance};
pub use error::{Error, Result};
pub use exec::Exec;
pub use limits::Limits;
