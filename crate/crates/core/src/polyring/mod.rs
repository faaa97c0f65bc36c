//! Exact sparse multivariate polynomials in `t_1, …, t_N` over `Z` or `F_p`.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose `Ord` is
//! grevlex with `t_1 < t_2 < ⋯ < t_N`. Coefficients are `BigInt`; over `F_p`
//! they are stored reduced into `0..p`.

mod generators;
mod identities;
mod quotient;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use generators::{make_lambda, make_phi, make_phi_of_product, make_rho, Generators};
pub use identities::{
    check_lambda_kills_phi, phirho_sides, verify_phirho_identity, verify_psi_lambda_rho,
};
pub use quotient::{ModKind, QuotientContext};

/// Exponent vector of a monomial. Position `i` holds the exponent of `t_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents.into_boxed_slice())
    }

    /// `t_var^exp`, with `var` 1-based.
    pub fn var_power(nvars: usize, var: usize, exp: u32) -> Self {
        let mut e = vec![0; nvars];
        e[var - 1] = exp;
        Monomial::new(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial(other.0.iter().zip(self.0.iter()).map(|(a, b)| a - b).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    /// Whether `lcm(self, other) == target`, without allocating.
    pub fn lcm_is(&self, other: &Monomial, target: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).zip(target.0.iter()).all(|((a, b), t)| a.max(b) == t)
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }
}

/// Grevlex with `t_1 < ⋯ < t_N`: higher total degree wins; on a tie, the
/// monomial with the smaller exponent at the first differing position (from
/// `t_1` upward) is the larger one.
pub fn grevlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b) {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        grevlex_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    /// `1`, `t2`, `t1^2*t3`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "t{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Coefficient ring of a [`Polynomial`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoeffRing {
    Integers,
    PrimeField(u64),
}

impl CoeffRing {
    pub fn prime_field(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        Ok(CoeffRing::PrimeField(p))
    }

    fn normalize(&self, c: BigInt) -> BigInt {
        match self {
            CoeffRing::Integers => c,
            CoeffRing::PrimeField(p) => c.mod_floor(&BigInt::from(*p)),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= p {
        if p % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    ring: CoeffRing,
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero(ring: CoeffRing, nvars: usize) -> Self {
        Polynomial { ring, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(ring: CoeffRing, nvars: usize, c: impl Into<BigInt>) -> Self {
        Polynomial::from_terms(ring, nvars, [(Monomial::one(nvars), c.into())])
    }

    pub fn one(ring: CoeffRing, nvars: usize) -> Self {
        Polynomial::constant(ring, nvars, 1)
    }

    /// The variable `t_var`, 1-based.
    pub fn var(ring: CoeffRing, nvars: usize, var: usize) -> Self {
        assert!((1..=nvars).contains(&var), "variable t{var} out of range");
        Polynomial::monomial(ring, Monomial::var_power(nvars, var, 1), 1)
    }

    pub fn monomial(ring: CoeffRing, mono: Monomial, c: impl Into<BigInt>) -> Self {
        let nvars = mono.nvars();
        Polynomial::from_terms(ring, nvars, [(mono, c.into())])
    }

    /// Sums the given terms; repeated monomials are combined.
    pub fn from_terms<I>(ring: CoeffRing, nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut p = Polynomial::zero(ring, nvars);
        for (mono, c) in terms {
            p.add_term(mono, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, mono: Monomial, c: BigInt) {
        assert_eq!(mono.nvars(), self.nvars, "monomial arity mismatch");
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                let c = self.ring.normalize(c);
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = self.ring.normalize(o.get() + c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending grevlex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> BigInt {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Maximum exponent of `t_var` (1-based) over all terms.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var - 1]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &BigInt) -> Polynomial {
        Polynomial::from_terms(
            self.ring,
            self.nvars,
            self.terms.iter().map(|(m, a)| (m.clone(), a * c)),
        )
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Polynomial {
        Polynomial {
            ring: self.ring,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.mul(mono), a.clone())).collect(),
        }
    }

    /// Evaluates at an integer point; over `F_p` the result is reduced mod `p`.
    pub fn eval(&self, point: &[i64]) -> BigInt {
        assert_eq!(point.len(), self.nvars, "evaluation point arity mismatch");
        let mut total = BigInt::zero();
        for (mono, c) in &self.terms {
            let mut v = c.clone();
            for (&x, &e) in point.iter().zip(mono.0.iter()) {
                v *= BigInt::from(x).pow(e);
            }
            total += v;
        }
        self.ring.normalize(total)
    }

    /// Reinterprets integer coefficients modulo `p`.
    pub fn to_prime_field(&self, p: u64) -> Result<Polynomial> {
        let ring = CoeffRing::prime_field(p)?;
        Ok(Polynomial::from_terms(
            ring,
            self.nvars,
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())),
        ))
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.ring, self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    fn check_compatible(&self, other: &Polynomial) {
        assert_eq!(self.ring, other.ring, "coefficient ring mismatch");
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.check_compatible(rhs);
        let mut out = Polynomial::zero(self.ring, self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(&BigInt::from(-1))
    }
}

impl fmt::Display for Polynomial {
    /// Terms in ascending grevlex order, e.g. `1 - t2 + 3*t1*t3^2`; the zero
    /// polynomial renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (mono, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let abs = c.abs();
            if mono.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}
