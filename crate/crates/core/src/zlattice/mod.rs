//! Integer presentations of the torsion group of `H_n(X)/L_K(X)` and Smith
//! normal form to read it off.

mod echelon;
mod lowrank;
mod presentation;
mod snf;

pub use echelon::{lattice_snf, SparseRow};
pub use presentation::{
    invariant_factors, lemma_a_check, present, present_bar_m_k, present_m_k, present_psi_quotient,
    present_rho_quotient, torsion, torsion_of_bar_m, torsion_of_rho_ideal, BasisLabel, ModulePresentation, Route,
    ROUTE_A_MAX_RANK,
};
pub use snf::{smith_normal_form, IntegerMatrix, SNFResult};
