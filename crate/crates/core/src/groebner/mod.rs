//! Gröbner bases over `F_p` for the grevlex order with `t_1 < ⋯ < t_N`, and
//! two independent ways of computing `d_p = dim_{F_p} B_K ⊗ F_p`.
//!
//! [`buchberger`] picks between two kernels. When every variable has a
//! univariate generator, all normal forms live in a fixed box of exponents and
//! the dense [`boxed`] kernel applies; otherwise the map-based [`sparse`]
//! kernel runs. Both share the pair queue in [`pairs`] and yield the same
//! reduced basis.

mod boxed;
mod linear;
mod pairs;
mod sparse;

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::combinatorics::{PartitionSet, ProblemInstance};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::polyring::{make_phi, CoeffRing, Generators, Monomial, Polynomial};

pub use linear::{dim_bk_linear_oracle, ideal_dimension_linear};

/// Which Buchberger implementation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Kernel {
    /// Dense box kernel when applicable, otherwise sparse.
    #[default]
    Auto,
    Sparse,
    Dense,
}

/// A reduced Gröbner basis: monic generators with pairwise non-divisible
/// leading monomials, sorted by ascending leading monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    p: u64,
    nvars: usize,
    polys: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys.iter().map(|f| f.leading_term().expect("nonzero").0.clone()).collect()
    }

    /// Whether the basis is `{1}`.
    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].leading_term().is_some_and(|(m, _)| m.is_one())
    }

    /// One polynomial per line in the textual polynomial grammar.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for f in &self.polys {
            writeln!(out, "{f}").expect("writing to a String");
        }
        out
    }

    /// Checks that every S-polynomial of the basis reduces to zero.
    pub fn verify(&self) -> bool {
        sparse::all_spolys_reduce_to_zero(&self.polys, self.p)
    }
}

/// Dimension of `F_p[t]/I` for a Gröbner basis of `I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientDim {
    Finite(u64),
    Infinite,
}

/// Counts standard monomials. Finite exactly when each variable has a pure
/// power among the leading monomials.
pub fn quotient_dimension(basis: &GroebnerBasis) -> QuotientDim {
    let lms = basis.leading_monomials();
    let n = basis.nvars();
    let mut bounds = vec![None::<u32>; n];
    for lm in &lms {
        let e = lm.exponents();
        let nonzero: Vec<usize> = (0..n).filter(|&i| e[i] > 0).collect();
        match nonzero.as_slice() {
            [] => return QuotientDim::Finite(0),
            [i] => bounds[*i] = Some(bounds[*i].map_or(e[*i], |b| b.min(e[*i]))),
            _ => {}
        }
    }
    let Some(bounds) = bounds.into_iter().collect::<Option<Vec<u32>>>() else {
        return QuotientDim::Infinite;
    };
    let mut count = 0u64;
    let mut e = vec![0u32; n];
    'outer: loop {
        if !lms.iter().any(|lm| lm.exponents().iter().zip(&e).all(|(a, b)| a <= b)) {
            count += 1;
        }
        for i in 0..n {
            e[i] += 1;
            if e[i] < bounds[i] {
                continue 'outer;
            }
            e[i] = 0;
        }
        break;
    }
    QuotientDim::Finite(count)
}

/// Reduced Gröbner basis of the ideal generated by `gens` over `F_p`.
pub fn buchberger(gens: &[Polynomial], limits: &Limits) -> Result<GroebnerBasis> {
    buchberger_with(gens, limits, Kernel::Auto)
}

pub fn buchberger_with(gens: &[Polynomial], limits: &Limits, kernel: Kernel) -> Result<GroebnerBasis> {
    let first = gens
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one generator is required".into()))?;
    let nvars = first.nvars();
    let CoeffRing::PrimeField(p) = first.ring() else {
        return Err(Error::InvalidArgument("generators must be over a prime field".into()));
    };
    if p >= 1 << 16 {
        return Err(Error::InvalidArgument(format!("characteristic {p} is too large")));
    }
    if gens.iter().any(|g| g.ring() != first.ring() || g.nvars() != nvars) {
        return Err(Error::InvalidArgument("generators must share ring and variable count".into()));
    }
    let inputs: Vec<Vec<(Monomial, u32)>> = gens.iter().map(|g| to_terms(g, p)).collect();
    let polys = match (kernel, boxed::BoxLayout::detect(&inputs, nvars)) {
        (Kernel::Sparse, _) | (Kernel::Auto, None) => sparse::run(inputs, p as u32, limits)?,
        (Kernel::Dense, None) => {
            return Err(Error::InvalidArgument(
                "dense kernel needs a univariate generator in every variable".into(),
            ))
        }
        (_, Some(layout)) => boxed::run(layout, inputs, p as u32, limits)?,
    };
    let ring = CoeffRing::PrimeField(p);
    let mut polys: Vec<Polynomial> = polys
        .into_iter()
        .map(|terms| {
            Polynomial::from_terms(ring, nvars, terms.into_iter().map(|(m, c)| (m, BigInt::from(c))))
        })
        .collect();
    polys.sort_by(|a, b| a.leading_term().unwrap().0.cmp(b.leading_term().unwrap().0));
    Ok(GroebnerBasis { p, nvars, polys })
}

fn to_terms(f: &Polynomial, p: u64) -> Vec<(Monomial, u32)> {
    f.terms()
        .rev()
        .map(|(m, c)| (m.clone(), c.to_u64().expect("reduced coefficient") as u32))
        .filter(|(_, c)| *c % p as u32 != 0)
        .collect()
}

/// `φ(t_1), …, φ(t_{n+1})` followed by `ρ_J` for `J ∈ K`, over `F_p`.
pub fn ideal_generators(instance: &ProblemInstance, k: &PartitionSet, p: u64) -> Result<Vec<Polynomial>> {
    let mut gens = phi_generators(instance, p)?;
    for j in k {
        gens.push(Generators::new(instance, j)?.rho.to_prime_field(p)?);
    }
    Ok(gens)
}

/// `φ(t_1), …, φ(t_{n+1})` over `F_p`.
pub fn phi_generators(instance: &ProblemInstance, p: u64) -> Result<Vec<Polynomial>> {
    let nvars = instance.num_vars();
    (1..=nvars).map(|v| make_phi(instance.m() as u32, nvars, v).to_prime_field(p)).collect()
}

/// `d_p = dim_{F_p} R̄/(ρ_J | J ∈ K) ⊗ F_p` by Buchberger.
pub fn dim_bk_mod_p(instance: &ProblemInstance, k: &PartitionSet, p: u64, limits: &Limits) -> Result<u64> {
    if k.n() != instance.n() {
        return Err(Error::InvalidArgument(format!("partition set does not match {instance}")));
    }
    let basis = buchberger(&ideal_generators(instance, k, p)?, limits)?;
    match quotient_dimension(&basis) {
        QuotientDim::Finite(d) => Ok(d),
        QuotientDim::Infinite => Err(Error::Inconsistent(
            "quotient by an ideal containing every φ(t_i) came out infinite".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::PairPartition;

    fn fp(p: u64) -> CoeffRing {
        CoeffRing::prime_field(p).unwrap()
    }

    fn poly(p: u64, nvars: usize, terms: &[(&[u32], i64)]) -> Polynomial {
        Polynomial::from_terms(
            fp(p),
            nvars,
            terms.iter().map(|(e, c)| (Monomial::new(e.to_vec()), BigInt::from(*c))),
        )
    }

    #[test]
    fn single_phi_is_its_own_basis() {
        let phi = make_phi(5, 1, 1).to_prime_field(5).unwrap();
        for kernel in [Kernel::Sparse, Kernel::Auto] {
            let b = buchberger_with(&[phi.clone()], &Limits::default(), kernel).unwrap();
            assert_eq!(b.polys(), &[phi.clone()]);
        }
    }

    #[test]
    fn inconsistent_linear_forms_give_unit() {
        let f = poly(5, 1, &[(&[1], 1), (&[0], -1)]);
        let g = poly(5, 1, &[(&[1], 1), (&[0], -2)]);
        for kernel in [Kernel::Sparse, Kernel::Auto] {
            let b = buchberger_with(&[f.clone(), g.clone()], &Limits::default(), kernel).unwrap();
            assert!(b.is_unit());
            assert_eq!(quotient_dimension(&b), QuotientDim::Finite(0));
        }
    }

    #[test]
    fn quotient_dimension_examples() {
        let b = buchberger(&[poly(3, 1, &[(&[2], 1), (&[1], 1), (&[0], 1)])], &Limits::default()).unwrap();
        assert_eq!(quotient_dimension(&b), QuotientDim::Finite(2));
        let b = buchberger(&[poly(7, 2, &[(&[2, 0], 1)]), poly(7, 2, &[(&[0, 3], 1)])], &Limits::default())
            .unwrap();
        assert_eq!(quotient_dimension(&b), QuotientDim::Finite(6));
        let b = buchberger(&[poly(7, 2, &[(&[2, 0], 1)])], &Limits::default()).unwrap();
        assert_eq!(quotient_dimension(&b), QuotientDim::Infinite);
    }

    #[test]
    fn textbook_example_over_f7() {
        // x^2 - y, x*y - 1 with x = t1, y = t2.
        let f = poly(7, 2, &[(&[2, 0], 1), (&[0, 1], -1)]);
        let g = poly(7, 2, &[(&[1, 1], 1), (&[0, 0], -1)]);
        let b = buchberger(&[f, g], &Limits::default()).unwrap();
        assert!(b.verify());
        // The quotient is F_7[x]/(x^3 - 1).
        assert_eq!(quotient_dimension(&b), QuotientDim::Finite(3));
    }

    #[test]
    fn kernels_agree_on_surface_ideals() {
        for (m, p) in [(3u64, 3u64), (4, 2), (5, 5), (6, 2), (6, 3)] {
            let inst = ProblemInstance::new(2, m as usize).unwrap();
            let gens = ideal_generators(&inst, &PartitionSet::all(&inst), p).unwrap();
            let a = buchberger_with(&gens, &Limits::default(), Kernel::Sparse).unwrap();
            let b = buchberger_with(&gens, &Limits::default(), Kernel::Dense).unwrap();
            assert_eq!(a, b, "m={m} p={p}");
            assert!(b.verify());
        }
    }

    #[test]
    fn surface_dimensions() {
        // The ideal of (ρ_J) has dimension |Γ| = 6 inside the 8-dimensional R̄.
        let inst = ProblemInstance::new(2, 3).unwrap();
        let all = PartitionSet::all(&inst);
        assert_eq!(dim_bk_mod_p(&inst, &all, 3, &Limits::default()).unwrap(), 8 - 6);
        let inst = ProblemInstance::new(2, 4).unwrap();
        let std = PartitionSet::standard(&inst);
        assert_eq!(dim_bk_mod_p(&inst, &std, 2, &Limits::default()).unwrap(), 27 - 9);
    }

    #[test]
    fn only_phis_leave_everything() {
        let inst = ProblemInstance::new(2, 4).unwrap();
        let b = buchberger(&phi_generators(&inst, 2).unwrap(), &Limits::default()).unwrap();
        assert_eq!(quotient_dimension(&b), QuotientDim::Finite(27));
    }

    #[test]
    fn spair_budget_is_reported() {
        let inst = ProblemInstance::new(4, 4).unwrap();
        let gens = ideal_generators(&inst, &PartitionSet::all(&inst), 2).unwrap();
        let tight = Limits { max_spairs: 3, ..Limits::default() };
        let err = buchberger(&gens, &tight).unwrap_err();
        assert!(err.is_resource_limit());
    }

    #[test]
    fn rendering_lists_one_poly_per_line() {
        let inst = ProblemInstance::new(0, 3).unwrap();
        let k = PartitionSet::new(0, vec![PairPartition::standard(0).unwrap()]).unwrap();
        let b = buchberger(&ideal_generators(&inst, &k, 3).unwrap(), &Limits::default()).unwrap();
        // For n = 0 there is no nontrivial pair, so ρ_J = 1 and the ideal is the unit ideal.
        assert_eq!(b.render(), "1\n");
    }
}
