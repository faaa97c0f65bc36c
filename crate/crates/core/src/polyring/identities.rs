//! Executable identity checks in `R`.

use num_bigint::BigInt;

use super::{make_lambda, make_phi, make_phi_of_product, make_rho, Generators, Polynomial, QuotientContext};
use crate::combinatorics::{PairPartition, ProblemInstance};
use crate::error::{Error, Result};

/// `(y-1)φ(xy)` and `sign·(x-1)(y-1)ρ(x,y)` in `Z[x, y]` (`x = t1`, `y = t2`).
/// The identity holds in `R` for `sign = -1`.
pub fn phirho_sides(m: u32, sign: i64) -> (Polynomial, Polynomial) {
    let ring = super::CoeffRing::Integers;
    let one = Polynomial::one(ring, 2);
    let xm1 = &Polynomial::var(ring, 2, 1) - &one;
    let ym1 = &Polynomial::var(ring, 2, 2) - &one;
    let lhs = &ym1 * &make_phi_of_product(m, 2, 1, 2);
    let rho = make_rho(m, 2, 1, 2).expect("distinct variables");
    let rhs = (&(&xm1 * &ym1) * &rho).scale(&BigInt::from(sign));
    (lhs, rhs)
}

/// Whether `(y-1)φ(xy) = -(x-1)(y-1)ρ(x,y)` modulo `x^m - 1, y^m - 1`.
pub fn verify_phirho_identity(m: u32) -> bool {
    let ctx = QuotientContext::cyclic(2, m);
    let (lhs, rhs) = phirho_sides(m, -1);
    ctx.reduce(&lhs) == ctx.reduce(&rhs)
}

/// The sign `ε` with `ψ_J = ε·λ·ρ_J` in `R`.
pub fn verify_psi_lambda_rho(instance: &ProblemInstance, j: &PairPartition) -> Result<i8> {
    let ctx = QuotientContext::cyclic(instance.num_vars(), instance.m() as u32);
    let g = Generators::new(instance, j)?;
    let psi = ctx.reduce(&g.psi);
    let lambda_rho = ctx.mul(&make_lambda(instance.num_vars()), &g.rho);
    if psi == lambda_rho {
        Ok(1)
    } else if (&psi + &lambda_rho).is_zero() {
        Ok(-1)
    } else {
        Err(Error::Inconsistent(format!("ψ_J ≠ ±λρ_J for J = {j} at {instance}")))
    }
}

/// Whether `λ·φ(t_var)` vanishes in `R` on `nvars` variables.
pub fn check_lambda_kills_phi(nvars: usize, m: u32, var: usize) -> bool {
    let ctx = QuotientContext::cyclic(nvars, m);
    ctx.mul(&make_lambda(nvars), &make_phi(m, nvars, var)).is_zero()
}
