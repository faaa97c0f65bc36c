//! Budgets from the environment. Each `FERMAT_MAX_*` variable overrides the
//! matching field of [`Limits`]; unset variables keep the base value.

use anyhow::{Context, Result};
use fermat_core::Limits;

pub const VARS: [&str; 7] = [
    "FERMAT_MAX_SPAIRS",
    "FERMAT_MAX_BASIS",
    "FERMAT_MAX_DENSE_DIM",
    "FERMAT_MAX_DENSE_BYTES",
    "FERMAT_MAX_SNF_COLS",
    "FERMAT_MAX_SNF_ROWS",
    "FERMAT_MAX_SNF_ENTRIES",
];

/// `base` with overrides read through `get` (normally `std::env::var`).
pub fn limits_from(base: Limits, get: impl Fn(&str) -> Option<String>) -> Result<Limits> {
    let mut l = base;
    for var in VARS {
        let Some(raw) = get(var) else { continue };
        let v: u64 = raw.trim().replace('_', "").parse().with_context(|| format!("{var}={raw:?} is not a count"))?;
        let size = || usize::try_from(v).with_context(|| format!("{var} is too large"));
        match var {
            "FERMAT_MAX_SPAIRS" => l.max_spairs = v,
            "FERMAT_MAX_BASIS" => l.max_basis = size()?,
            "FERMAT_MAX_DENSE_DIM" => l.max_dense_dim = size()?,
            "FERMAT_MAX_DENSE_BYTES" => l.max_dense_bytes = size()?,
            "FERMAT_MAX_SNF_COLS" => l.max_snf_cols = size()?,
            "FERMAT_MAX_SNF_ROWS" => l.max_snf_rows = size()?,
            "FERMAT_MAX_SNF_ENTRIES" => l.max_snf_entries = size()?,
            _ => unreachable!(),
        }
    }
    Ok(l)
}

pub fn limits(extended: bool) -> Result<Limits> {
    let base = if extended { Limits::extended() } else { Limits::default() };
    limits_from(base, |v| std::env::var(v).ok())
}
