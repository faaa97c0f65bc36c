//! Normal forms in `R = Z[t]/(t_i^m - 1)` and `R̄ = Z[t]/(φ(t_i))`, or mixtures.

use num_bigint::BigInt;

use super::{Monomial, Polynomial};
use crate::error::{Error, Result};

/// Relation imposed on one variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModKind {
    /// `t^m = 1`; basis exponents `0..m`.
    Cyclic(u32),
    /// `φ(t) = t^{m-1} + ⋯ + 1 = 0`; basis exponents `0..m-1`.
    Phi(u32),
}

impl ModKind {
    /// Number of basis exponents for this variable.
    pub fn bound(self) -> u32 {
        match self {
            ModKind::Cyclic(m) => m,
            ModKind::Phi(m) => m - 1,
        }
    }

    /// `t^e` as a list of `(exponent, coefficient)` in normal form.
    fn reduce_power(self, e: u32) -> Vec<(u32, i64)> {
        match self {
            ModKind::Cyclic(m) => vec![(e % m, 1)],
            ModKind::Phi(m) => {
                let r = e % m;
                if r < m - 1 {
                    vec![(r, 1)]
                } else {
                    (0..m - 1).map(|k| (k, -1)).collect()
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotientContext {
    kinds: Vec<ModKind>,
}

impl QuotientContext {
    pub fn new(kinds: Vec<ModKind>) -> Result<Self> {
        for k in &kinds {
            let (ModKind::Cyclic(m) | ModKind::Phi(m)) = *k;
            if m < 2 {
                return Err(Error::InvalidArgument(format!("modulus {m} too small")));
            }
        }
        Ok(QuotientContext { kinds })
    }

    /// `R` on `nvars` variables.
    pub fn cyclic(nvars: usize, m: u32) -> Self {
        QuotientContext { kinds: vec![ModKind::Cyclic(m); nvars] }
    }

    /// `R̄` on `nvars` variables.
    pub fn phi(nvars: usize, m: u32) -> Self {
        QuotientContext { kinds: vec![ModKind::Phi(m); nvars] }
    }

    pub fn nvars(&self) -> usize {
        self.kinds.len()
    }

    pub fn kinds(&self) -> &[ModKind] {
        &self.kinds
    }

    /// Product of the per-variable bounds.
    pub fn basis_size(&self) -> u64 {
        self.kinds.iter().map(|k| k.bound() as u64).product()
    }

    /// Position of a reduced monomial in the basis; `t_1` is the fastest digit.
    pub fn index_of(&self, mono: &Monomial) -> Option<u64> {
        let mut idx = 0u64;
        for (k, &e) in self.kinds.iter().zip(mono.exponents()).rev() {
            if e >= k.bound() {
                return None;
            }
            idx = idx * k.bound() as u64 + e as u64;
        }
        Some(idx)
    }

    pub fn monomial_at(&self, mut idx: u64) -> Monomial {
        let mut e = Vec::with_capacity(self.kinds.len());
        for k in &self.kinds {
            e.push((idx % k.bound() as u64) as u32);
            idx /= k.bound() as u64;
        }
        Monomial::new(e)
    }

    pub fn is_reduced(&self, poly: &Polynomial) -> bool {
        poly.terms()
            .all(|(m, _)| m.exponents().iter().zip(&self.kinds).all(|(&e, k)| e < k.bound()))
    }

    /// Normal form of `poly`: every term is rewritten variable by variable
    /// with the monic relations, which terminates after one pass since each
    /// univariate rewrite already lands below the bound.
    pub fn reduce(&self, poly: &Polynomial) -> Polynomial {
        assert_eq!(poly.nvars(), self.nvars(), "context arity mismatch");
        let mut out = Polynomial::zero(poly.ring(), poly.nvars());
        for (mono, c) in poly.terms() {
            let factors: Vec<Vec<(u32, i64)>> = mono
                .exponents()
                .iter()
                .zip(&self.kinds)
                .map(|(&e, k)| k.reduce_power(e))
                .collect();
            let mut partial: Vec<(Vec<u32>, i64)> = vec![(Vec::new(), 1)];
            for f in &factors {
                let mut next = Vec::with_capacity(partial.len() * f.len());
                for (exps, s) in &partial {
                    for &(e, t) in f {
                        let mut v = exps.clone();
                        v.push(e);
                        next.push((v, s * t));
                    }
                }
                partial = next;
            }
            for (exps, s) in partial {
                out.add_term(Monomial::new(exps), c * BigInt::from(s));
            }
        }
        out
    }

    /// Product reduced into normal form.
    pub fn mul(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        self.reduce(&(a * b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{make_phi, CoeffRing};

    const Z: CoeffRing = CoeffRing::Integers;

    #[test]
    fn cyclic_power_wraps() {
        let ctx = QuotientContext::cyclic(1, 5);
        let p = Polynomial::monomial(Z, Monomial::new(vec![5]), 1);
        assert_eq!(ctx.reduce(&p).to_string(), "1");
        let q = Polynomial::monomial(Z, Monomial::new(vec![13]), 2);
        assert_eq!(ctx.reduce(&q).to_string(), "2*t1^3");
    }

    #[test]
    fn phi_top_power_expands() {
        let ctx = QuotientContext::phi(1, 3);
        let p = Polynomial::monomial(Z, Monomial::new(vec![2]), 1);
        assert_eq!(ctx.reduce(&p).to_string(), "-1 - t1");
        let phi = make_phi(3, 1, 1);
        assert!(ctx.reduce(&phi).is_zero());
        let other = &Polynomial::var(Z, 1, 1) + &Polynomial::constant(Z, 1, 7);
        assert!(ctx.reduce(&(&phi * &other)).is_zero());
    }

    #[test]
    fn variables_invertible_in_phi_context() {
        for m in 3..8 {
            let ctx = QuotientContext::phi(2, m);
            let t = Polynomial::var(Z, 2, 2);
            let inv = ctx.reduce(&t.pow(m - 1));
            assert_eq!(ctx.mul(&t, &inv).to_string(), "1");
        }
    }

    #[test]
    fn basis_indexing_roundtrip() {
        let ctx = QuotientContext::new(vec![ModKind::Cyclic(4), ModKind::Phi(4), ModKind::Phi(5)]).unwrap();
        assert_eq!(ctx.basis_size(), 4 * 3 * 4);
        for i in 0..ctx.basis_size() {
            assert_eq!(ctx.index_of(&ctx.monomial_at(i)), Some(i));
        }
        assert_eq!(ctx.index_of(&Monomial::new(vec![0, 3, 0])), None);
    }

    #[test]
    fn reduce_is_idempotent() {
        let ctx = QuotientContext::phi(2, 4);
        let p = &make_phi(5, 2, 1) * &make_phi(4, 2, 2);
        let r = ctx.reduce(&p);
        assert!(ctx.is_reduced(&r));
        assert_eq!(ctx.reduce(&r), r);
    }
}
