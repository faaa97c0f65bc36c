//! `d_p` by plain linear algebra in `R̄ ⊗ F_p`, with no Gröbner machinery.
//!
//! The ideal generated by the `ρ_J` is the smallest subspace containing them
//! and closed under multiplication by every `t_i`. Starting from the reduced
//! `ρ_J`, each newly independent vector is multiplied by every variable and
//! fed back into an incremental echelon form until nothing new appears.

use std::collections::VecDeque;

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::combinatorics::{PartitionSet, ProblemInstance};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fp::Echelon;
use crate::limits::Limits;
use crate::polyring::{Generators, Polynomial, QuotientContext};

/// Candidates reduced together; within a batch the work runs under `Exec`.
const BATCH: usize = 256;

/// Multiplies a dense element of `R̄ ⊗ F_p` by `t_{var+1}`.
///
/// Coordinates are indexed in mixed radix `m-1` with `t_1` fastest. Along
/// each line in direction `var` the entries shift up by one and the entry
/// pushed past `t^{m-2}` wraps around as `t^{m-1} = -(1 + t + ⋯ + t^{m-2})`.
pub fn mul_by_var(v: &[u8], var: usize, m: usize, p: u8) -> Vec<u8> {
    let b = m - 1;
    let stride = b.pow(var as u32);
    let block = stride * b;
    let mut out = vec![0u8; v.len()];
    for base in (0..v.len()).step_by(block) {
        for inner in 0..stride {
            let start = base + inner;
            let top = v[start + (b - 1) * stride];
            let neg = if top == 0 { 0 } else { p - top };
            out[start] = neg;
            for e in 1..b {
                let x = v[start + (e - 1) * stride] as u16 + neg as u16;
                out[start + e * stride] = (x % p as u16) as u8;
            }
        }
    }
    out
}

/// Dense image of `f` in `R̄ ⊗ F_p`.
pub fn dense_phi_image(f: &Polynomial, ctx: &QuotientContext, p: u64) -> Vec<u8> {
    let reduced = ctx.reduce(f);
    let mut out = vec![0u8; ctx.basis_size() as usize];
    for (mono, c) in reduced.terms() {
        let idx = ctx.index_of(mono).expect("reduced monomial") as usize;
        out[idx] = c.mod_floor(&p.into()).to_u8().expect("small prime");
    }
    out
}

/// Dimension of the smallest `t`-stable subspace of `R̄ ⊗ F_p` containing
/// `start`, i.e. of the ideal the vectors generate.
pub fn closure_rank(
    instance: &ProblemInstance,
    start: Vec<Vec<u8>>,
    p: u64,
    limits: &Limits,
    exec: Exec,
) -> Result<u64> {
    let dim = instance.reduced_rank();
    if dim > limits.max_dense_dim as u64 {
        return Err(Error::budget(
            "linear oracle",
            format!("ambient dimension {dim} above {}", limits.max_dense_dim),
        ));
    }
    let dim = dim as usize;
    let nvars = instance.num_vars();
    let m = instance.m();
    let mut ech = Echelon::new(p, dim, limits.max_dense_bytes)?;
    let mut tasks: VecDeque<(usize, usize)> = VecDeque::new();
    for chunk in start.chunks(BATCH) {
        for idx in ech.insert_batch(chunk.to_vec(), exec)?.into_iter().flatten() {
            tasks.extend((0..nvars).map(|v| (idx, v)));
        }
    }
    while !tasks.is_empty() {
        let take = tasks.len().min(BATCH);
        let batch: Vec<(usize, usize)> = tasks.drain(..take).collect();
        let ech_ref = &ech;
        let vectors = exec.map(batch, |(row, var)| mul_by_var(&ech_ref.row_dense(row), var, m, p as u8));
        for idx in ech.insert_batch(vectors, exec)?.into_iter().flatten() {
            tasks.extend((0..nvars).map(|v| (idx, v)));
        }
    }
    Ok(ech.rank() as u64)
}

/// Dimension of the ideal `(ρ_J | J ∈ K)` of `R̄ ⊗ F_p`.
pub fn ideal_dimension_linear(
    instance: &ProblemInstance,
    k: &PartitionSet,
    p: u64,
    limits: &Limits,
    exec: Exec,
) -> Result<u64> {
    if k.n() != instance.n() {
        return Err(Error::InvalidArgument(format!("partition set does not match {instance}")));
    }
    if !crate::polyring::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if instance.reduced_rank() > limits.max_dense_dim as u64 {
        return Err(Error::budget(
            "linear oracle",
            format!("ambient dimension {} above {}", instance.reduced_rank(), limits.max_dense_dim),
        ));
    }
    let ctx = QuotientContext::phi(instance.num_vars(), instance.m() as u32);
    let start: Vec<Vec<u8>> = k
        .iter()
        .map(|j| Generators::new(instance, j).map(|g| dense_phi_image(&g.rho, &ctx, p)))
        .collect::<Result<_>>()?;
    closure_rank(instance, start, p, limits, exec)
}

/// `d_p = (m-1)^{n+1} - dim (ρ_J | J ∈ K)` by linear algebra.
pub fn dim_bk_linear_oracle(
    instance: &ProblemInstance,
    k: &PartitionSet,
    p: u64,
    limits: &Limits,
    exec: Exec,
) -> Result<u64> {
    Ok(instance.reduced_rank() - ideal_dimension_linear(instance, k, p, limits, exec)?)
}
