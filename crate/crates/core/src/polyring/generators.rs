//! The polynomials `φ`, `ρ`, `λ`, `τ_J`, `ψ_J` and `ρ_J` over `Z`.
//!
//! `t_0` never needs to be substituted: `τ_J` only involves the `k_i ≥ 1`
//! and the factors of `ψ_J`, `ρ_J` only involve pairs with `i ≥ 1`, whose
//! indices are all positive because `j_0 = 0`.

use num_bigint::BigInt;

use super::{CoeffRing, Monomial, Polynomial};
use crate::combinatorics::{PairPartition, ProblemInstance};
use crate::error::{Error, Result};

const Z: CoeffRing = CoeffRing::Integers;

/// `φ(t_var) = 1 + t_var + ⋯ + t_var^{m-1}`.
pub fn make_phi(m: u32, nvars: usize, var: usize) -> Polynomial {
    Polynomial::from_terms(
        Z,
        nvars,
        (0..m).map(|e| (Monomial::var_power(nvars, var, e), BigInt::from(1))),
    )
}

/// `φ(t_x t_y) = Σ_{a<m} t_x^a t_y^a`.
pub fn make_phi_of_product(m: u32, nvars: usize, x: usize, y: usize) -> Polynomial {
    Polynomial::from_terms(
        Z,
        nvars,
        (0..m).map(|a| {
            let mut e = vec![0; nvars];
            e[x - 1] += a;
            e[y - 1] += a;
            (Monomial::new(e), BigInt::from(1))
        }),
    )
}

/// `ρ(t_x, t_y) = Σ_{μ=0}^{m-2} t_x^μ Σ_{ν=0}^{μ} t_y^ν`.
pub fn make_rho(m: u32, nvars: usize, x: usize, y: usize) -> Result<Polynomial> {
    if x == y {
        return Err(Error::InvalidArgument(format!("ρ needs two distinct variables, got t{x} twice")));
    }
    let mut terms = Vec::new();
    for mu in 0..m - 1 {
        for nu in 0..=mu {
            let mut e = vec![0; nvars];
            e[x - 1] = mu;
            e[y - 1] = nu;
            terms.push((Monomial::new(e), BigInt::from(1)));
        }
    }
    Ok(Polynomial::from_terms(Z, nvars, terms))
}

/// `λ = (t_1 - 1)⋯(t_N - 1)`.
pub fn make_lambda(nvars: usize) -> Polynomial {
    (1..=nvars).fold(Polynomial::one(Z, nvars), |acc, v| &acc * &var_minus_one(nvars, v))
}

fn var_minus_one(nvars: usize, var: usize) -> Polynomial {
    &Polynomial::var(Z, nvars, var) - &Polynomial::one(Z, nvars)
}

/// `τ_J`, `ψ_J` and `ρ_J` for one partition, in `t_1, …, t_{n+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generators {
    pub tau: Polynomial,
    pub psi: Polynomial,
    pub rho: Polynomial,
}

impl Generators {
    pub fn new(instance: &ProblemInstance, j: &PairPartition) -> Result<Self> {
        if j.n() != instance.n() {
            return Err(Error::InvalidArgument(format!("partition {j} does not match {instance}")));
        }
        let nvars = instance.num_vars();
        let m = instance.m() as u32;
        let mut tau = Polynomial::one(Z, nvars);
        for k in j.k_indices() {
            debug_assert!(k >= 1);
            tau = &tau * &var_minus_one(nvars, k);
        }
        let mut psi = tau.clone();
        let mut rho = Polynomial::one(Z, nvars);
        for (a, b) in j.nontrivial_pairs() {
            debug_assert!(a >= 1 && b >= 1);
            psi = &psi * &make_phi_of_product(m, nvars, a, b);
            rho = &rho * &make_rho(m, nvars, a, b)?;
        }
        Ok(Generators { tau, psi, rho })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_examples() {
        assert_eq!(make_phi(3, 1, 1).to_string(), "1 + t1 + t1^2");
        assert_eq!(make_phi(4, 2, 2).to_string(), "1 + t2 + t2^2 + t2^3");
        assert_eq!(make_phi(3, 1, 1).eval(&[1]), BigInt::from(3));
    }

    #[test]
    fn rho_examples() {
        assert_eq!(make_rho(3, 2, 1, 2).unwrap().to_string(), "1 + t1 + t1*t2");
        let r4 = make_rho(4, 2, 1, 2).unwrap();
        assert_eq!(r4.to_string(), "1 + t1 + t1^2 + t1*t2 + t1^2*t2 + t1^2*t2^2");
        for m in 3..10 {
            let r = make_rho(m, 2, 1, 2).unwrap();
            assert_eq!(r.num_terms() as u32, m * (m - 1) / 2);
            assert!(r.degree_in(1) <= m - 2 && r.degree_in(2) <= m - 2);
        }
        assert_eq!(make_rho(5, 2, 1, 2).unwrap().num_terms(), 10);
        assert!(make_rho(3, 2, 1, 1).is_err());
    }

    #[test]
    fn generators_for_standard_surface() {
        let inst = ProblemInstance::new(2, 3).unwrap();
        let j = PairPartition::standard(2).unwrap();
        let g = Generators::new(&inst, &j).unwrap();
        assert_eq!(g.tau.to_string(), "1 - t1 - t3 + t1*t3");
        assert_eq!(g.rho.to_string(), "1 + t2 + t2*t3");
        assert_eq!(g.psi.num_terms(), 12);
    }

    #[test]
    fn tau_term_count() {
        for n in [0, 2, 4, 6] {
            let inst = ProblemInstance::new(n, 3).unwrap();
            for j in crate::combinatorics::enumerate_partitions(&inst) {
                let g = Generators::new(&inst, &j).unwrap();
                assert_eq!(g.tau.num_terms(), 1 << (n / 2 + 1));
            }
        }
    }

    #[test]
    fn lambda_vanishes_at_one() {
        let l = make_lambda(3);
        assert_eq!(l.num_terms(), 8);
        assert_eq!(l.eval(&[1, 5, 7]), BigInt::from(0));
        assert_eq!(l.eval(&[2, 2, 2]), BigInt::from(1));
    }
}
