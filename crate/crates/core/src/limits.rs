//! Resource budgets. Exceeding any of them is reported as
//! [`Error::ResourceLimit`](crate::Error::ResourceLimit), never as an answer.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Limits {
    /// Maximum number of S-pairs Buchberger may reduce.
    pub max_spairs: u64,
    /// Maximum number of polynomials in an intermediate Gröbner basis.
    pub max_basis: usize,
    /// Maximum ambient dimension `(m-1)^(n+1)` for the linear-algebra oracle.
    pub max_dense_dim: usize,
    /// Maximum bytes of pivot rows the linear-algebra oracle may hold.
    pub max_dense_bytes: usize,
    /// Maximum number of columns of an integer presentation.
    pub max_snf_cols: usize,
    /// Maximum number of (deduplicated) generator rows of an integer presentation.
    pub max_snf_rows: usize,
    /// Maximum number of stored nonzero entries during integer elimination.
    pub max_snf_entries: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_spairs: 5_000_000,
            max_basis: 200_000,
            max_dense_dim: 400_000,
            max_dense_bytes: 2_000_000_000,
            max_snf_cols: 300_000,
            max_snf_rows: 2_000_000,
            max_snf_entries: 200_000_000,
        }
    }
}

impl Limits {
    /// Generous budgets for the extended (slow) test tier.
    pub fn extended() -> Self {
        Limits {
            max_spairs: 100_000_000,
            max_basis: 2_000_000,
            max_dense_dim: 2_000_000,
            max_dense_bytes: 4_000_000_000,
            max_snf_cols: 1_000_000,
            max_snf_rows: 20_000_000,
            max_snf_entries: 2_000_000_000,
        }
    }
}
