//! Smith form of a lattice of small rank spanned by many rows with large
//! entries, as left over after unit elimination.
//!
//! Pick rows `S` and columns `C` that are independent modulo a prime and let
//! `Δ = det B_SC`, `X = adj(B_SC)·B_S`. If the rank is `ρ = |S|`, every lattice
//! vector `v` satisfies `Δ·v = v_C·X`. That identity is checked for every row
//! modulo enough primes to exceed the size of both sides, which proves the
//! rank. Through `v ↦ v_C` the lattice is then isomorphic to a lattice
//! `Λ ⊂ Z^ρ` that contains `ΔZ^ρ`, so an echelon basis of `Λ` can be kept
//! with entries reduced mod `Δ`.
//!
//! The product of the invariant factors divides `Δ` and also the index of
//! the projection of the lattice onto any column set where it stays
//! injective. Taking the gcd over a few column sets usually leaves a small
//! modulus `N`, often 1. The torsion is then the Smith form of the lattice
//! plus `N·Z^w`, computed with entries reduced mod `N`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::snf::{chain, diagonalize_mod, diagonalize_small, SNFResult, SMALL_MODULUS};
use crate::error::{Error, Result};
use crate::limits::Limits;

type Row = Vec<(u32, BigInt)>;

/// Above this rank the cubic exact steps cost more than plain echelon.
const MAX_RANK: usize = 256;
/// Independent sets tried (each modulo a fresh prime) before giving up.
const ATTEMPTS: usize = 3;
/// Extra column sets whose projection indices bound the torsion.
const PROJECTIONS: usize = 2;

/// Primes below `2^62`, largest first.
fn primes() -> impl Iterator<Item = u64> {
    (0u64..).map(|k| (1u64 << 62) - 1 - 2 * k).filter(|&p| primal::is_prime(p))
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn residue(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

/// Rows (by index) and columns (by position) independent modulo `p`, or
/// `None` once more than `MAX_RANK` are found. Pivot columns are taken in
/// the given order.
fn independent(dense: &[Vec<u64>], p: u64, order: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut rows = Vec::new();
    for (i, row) in dense.iter().enumerate() {
        let mut v = row.clone();
        for (c, b) in &basis {
            let f = v[*c];
            if f != 0 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x = (*x + p - mul_mod(f, *y, p)) % p;
                }
            }
        }
        let Some(&c) = order.iter().find(|&&c| v[c] != 0) else { continue };
        if basis.len() == MAX_RANK {
            return None;
        }
        let inv = pow_mod(v[c], p - 2, p);
        v.iter_mut().for_each(|x| *x = mul_mod(*x, inv, p));
        basis.push((c, v));
        rows.push(i);
    }
    Some((rows, basis.into_iter().map(|(c, _)| c).collect()))
}

/// `[B_SC | I]` from the dense rows `B_S`.
fn with_identity(b_s: &[Vec<BigInt>], cols: &[usize]) -> Vec<Vec<BigInt>> {
    let rho = cols.len();
    b_s.iter()
        .enumerate()
        .map(|(i, r)| {
            let mut out: Vec<BigInt> = cols.iter().map(|&c| r[c].clone()).collect();
            out.extend((0..rho).map(|j| BigInt::from(u8::from(i == j))));
            out
        })
        .collect()
}

/// `a·b` for dense matrices.
fn times(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let width = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|ar| {
            let mut out = vec![BigInt::zero(); width];
            for (f, br) in ar.iter().zip(b) {
                if f.is_zero() {
                    continue;
                }
                for (o, y) in out.iter_mut().zip(br) {
                    if !y.is_zero() {
                        *o += f * y;
                    }
                }
            }
            out
        })
        .collect()
}

/// Fraction-free Gauss–Jordan on `[A | B]` with `A` square of size `rho`:
/// returns `Δ = ±det A` and `Δ·A^{-1}·B`. With `B = I` that is the adjugate
/// up to sign.
fn solve(mut a: Vec<Vec<BigInt>>, rho: usize) -> Result<(BigInt, Vec<Vec<BigInt>>)> {
    let mut prev = BigInt::one();
    for k in 0..rho {
        let p = (k..rho)
            .find(|&i| !a[i][k].is_zero())
            .ok_or_else(|| Error::Inconsistent("independent block is singular".into()))?;
        a.swap(k, p);
        let pivot = a[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let f = row[k].clone();
            for (x, y) in row.iter_mut().zip(&pivot) {
                let (q, r) = (&pivot[k] * &*x - &f * y).div_rem(&prev);
                if !r.is_zero() {
                    return Err(Error::Inconsistent("inexact fraction-free step".into()));
                }
                *x = q;
            }
        }
        prev = pivot[k].clone();
    }
    let x = a.into_iter().map(|row| row[rho..].to_vec()).collect();
    Ok((prev, x))
}

/// Whether `Δ·v = v_C·X` for every row, decided modulo primes whose product
/// exceeds twice the largest possible entry of either side.
fn certify(rows: &[Row], pos: &impl Fn(u32) -> usize, cols: &[usize], delta: &BigInt, x: &[Vec<BigInt>]) -> bool {
    let rho = cols.len();
    let width = x.first().map_or(0, Vec::len);
    let vbits = rows.iter().flatten().map(|e| e.1.bits()).max().unwrap_or(0);
    let xbits = x.iter().flatten().map(BigInt::bits).max().unwrap_or(0);
    let rbits = 64 - (rho as u64).leading_zeros() as u64;
    let need = (delta.bits() + vbits).max(vbits + xbits + rbits) + 2;
    let mut have = 0u64;
    for q in primes() {
        if have > need {
            return true;
        }
        have += 61;
        let dq = residue(delta, q);
        let xq: Vec<Vec<u64>> = x.iter().map(|r| r.iter().map(|e| residue(e, q)).collect()).collect();
        let mut acc = vec![0u128; width];
        for row in rows {
            let mut vc = vec![0u64; rho];
            let mut dense = vec![0u64; width];
            for (c, e) in row {
                dense[pos(*c)] = residue(e, q);
            }
            for (k, &c) in cols.iter().enumerate() {
                vc[k] = dense[c];
            }
            acc.iter_mut().for_each(|a| *a = 0);
            for (k, &f) in vc.iter().enumerate() {
                if f == 0 {
                    continue;
                }
                for (a, &y) in acc.iter_mut().zip(&xq[k]) {
                    *a += f as u128 * y as u128;
                }
                if k % 8 == 7 {
                    acc.iter_mut().for_each(|a| *a %= q as u128);
                }
            }
            let ok = acc.iter().zip(&dense).all(|(a, &v)| (*a % q as u128) as u64 == mul_mod(dq, v, q));
            if !ok {
                return false;
            }
        }
    }
    unreachable!("there are infinitely many primes")
}

/// Echelon basis of `Λ + ΔZ^ρ` from generators, entries reduced mod `Δ`.
/// Reducing by `Δe_j` is harmless because those vectors stay in the span as a
/// separate summand.
struct ModEchelon {
    modulus: BigInt,
    rows: Vec<Option<Vec<BigInt>>>,
    unit_pivots: usize,
}

impl ModEchelon {
    fn reduce(&self, v: &mut [BigInt], from: usize) {
        for x in &mut v[from..] {
            *x = x.mod_floor(&self.modulus);
        }
    }

    fn insert(&mut self, mut v: Vec<BigInt>) {
        self.reduce(&mut v, 0);
        for k in 0..v.len() {
            if v[k].is_zero() {
                continue;
            }
            let Some(row) = self.rows[k].take() else {
                if v[k].is_one() {
                    self.unit_pivots += 1;
                }
                self.rows[k] = Some(v);
                return;
            };
            let (a, b) = (row[k].clone(), v[k].clone());
            let new_row = if b.is_multiple_of(&a) {
                let q = &b / &a;
                v.iter_mut().zip(&row).for_each(|(x, y)| *x -= &q * y);
                row
            } else {
                let e = a.extended_gcd(&b);
                let (ag, bg) = (&a / &e.gcd, &b / &e.gcd);
                let mut pivot: Vec<BigInt> = row.iter().zip(&v).map(|(r, x)| &e.x * r + &e.y * x).collect();
                v.iter_mut().zip(&row).for_each(|(x, r)| *x = &ag * &*x - &bg * r);
                if pivot[k].is_negative() {
                    pivot.iter_mut().for_each(|x| *x = -&*x);
                }
                if pivot[k].is_one() {
                    self.unit_pivots += 1;
                }
                pivot
            };
            let mut new_row = new_row;
            self.reduce(&mut new_row, k + 1);
            self.reduce(&mut v, k + 1);
            self.rows[k] = Some(new_row);
        }
    }
}

/// Exact rows of `rows` selected by `idx`, dense over the used columns.
fn dense_exact(rows: &[Row], idx: &[usize], pos: &impl Fn(u32) -> usize, width: usize) -> Vec<Vec<BigInt>> {
    idx.iter()
        .map(|&i| {
            let mut full = vec![BigInt::zero(); width];
            for (c, e) in &rows[i] {
                full[pos(*c)] = e.clone();
            }
            full
        })
        .collect()
}

/// Echelon of `Λ = π_C(L)` modulo `Δ·Z^ρ`.
fn project(rows: &[Row], pos: &impl Fn(u32) -> usize, cols: &[usize], delta: &BigInt) -> ModEchelon {
    let rho = cols.len();
    let mut ech = ModEchelon { modulus: delta.abs(), rows: vec![None; rho], unit_pivots: 0 };
    let slot: std::collections::HashMap<usize, usize> = cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    for r in rows {
        if ech.unit_pivots == rho {
            break;
        }
        let mut v = vec![BigInt::zero(); rho];
        for (c, e) in r {
            if let Some(&k) = slot.get(&pos(*c)) {
                v[k] = e.clone();
            }
        }
        ech.insert(v);
    }
    ech
}

impl ModEchelon {
    /// A multiple of `[Z^ρ : Λ]`: the index of `span(H) + Σ Δe_k` over the
    /// columns `k` without a pivot.
    fn index_bound(&self) -> BigInt {
        self.rows.iter().enumerate().fold(BigInt::one(), |acc, (k, r)| match r {
            Some(r) => acc * r[k].abs(),
            None => acc * &self.modulus,
        })
    }
}

/// Factors below the modulus cannot outnumber the rank.
fn finish(found: usize, rho: usize, modulus: &BigInt) -> Result<()> {
    if found > rho {
        return Err(Error::Inconsistent(format!("{found} factors below {modulus} for rank {rho}")));
    }
    Ok(())
}

/// Smith form of the lattice spanned by `rows`, or `None` if its rank is too
/// large for this method.
///
/// The product of the invariant factors is `[L_sat : L]`. For any columns
/// `C` on which `L` projects injectively, `π_C(L_sat) ⊂ Z^ρ` shows that it
/// divides `[Z^ρ : π_C(L)]`, and it divides `Δ`. The gcd of these over a few
/// column sets is often 1, which settles the torsion-free case without a
/// dense Smith form; otherwise it serves as the modulus for one.
pub(super) fn low_rank_snf(rows: &[Row], limits: &Limits) -> Result<Option<SNFResult>> {
    let mut used: Vec<u32> = rows.iter().flatten().map(|e| e.0).collect();
    used.sort_unstable();
    used.dedup();
    let width = used.len();
    if rows.len().saturating_mul(width) > limits.max_snf_entries {
        return Err(Error::budget(
            "smith normal form",
            format!("residual block {}x{width} too large", rows.len()),
        ));
    }
    let pos = |c: u32| used.binary_search(&c).expect("collected column");
    let natural: Vec<usize> = (0..width).collect();
    for p in primes().take(ATTEMPTS) {
        let modp = |r: &Row| {
            let mut d = vec![0u64; width];
            for (c, e) in r {
                d[pos(*c)] = residue(e, p);
            }
            d
        };
        let dense: Vec<Vec<u64>> = rows.iter().map(modp).collect();
        let Some((srows, cols)) = independent(&dense, p, &natural) else { return Ok(None) };
        drop(dense);
        let rho = cols.len();
        let b_s = dense_exact(rows, &srows, &pos, width);
        let (delta, adj) = solve(with_identity(&b_s, &cols), rho)?;
        let x = times(&adj, &b_s);
        if !certify(rows, &pos, &cols, &delta, &x) {
            // The rank modulo p was too small; try another prime.
            continue;
        }
        let ech = project(rows, &pos, &cols, &delta);
        let mut modulus = ech.index_bound().gcd(&delta);
        let b_s_mod: Vec<Vec<u64>> = srows.iter().map(|&i| modp(&rows[i])).collect();
        for k in 1..=PROJECTIONS {
            if modulus.is_one() {
                break;
            }
            // Another nonsingular set of columns, found by scanning them in a
            // different order.
            let step = (1..).map(|s| 2 * s * k + 1).find(|&s| s.gcd(&width) == 1).expect("coprime step");
            let order: Vec<usize> = (0..width).map(|j| (j * step + k * 7919) % width).collect();
            let Some((_, other)) = independent(&b_s_mod, p, &order) else { break };
            if other.len() != rho {
                break;
            }
            let block: Vec<Vec<BigInt>> = b_s.iter().map(|r| other.iter().map(|&c| r[c].clone()).collect()).collect();
            let (d2, _) = solve(block, rho)?;
            modulus = modulus.gcd(&project(rows, &pos, &other, &d2).index_bound());
        }
        if modulus.is_one() {
            return Ok(Some(SNFResult::new(vec![BigInt::one(); rho])));
        }
        if let Some(n) = modulus.to_i64().filter(|&n| n < SMALL_MODULUS) {
            // The rows themselves span the lattice plus `n·Z^width`.
            let bn = BigInt::from(n);
            let reduced: Vec<Vec<i64>> = rows
                .iter()
                .map(|r| {
                    let mut d = vec![0i64; width];
                    for (c, e) in r {
                        d[pos(*c)] = e.mod_floor(&bn).to_i64().expect("reduced");
                    }
                    d
                })
                .collect();
            let mut factors: Vec<BigInt> =
                chain(diagonalize_small(reduced, n).into_iter().map(|d| BigInt::from(d.gcd(&n))).collect())
                    .into_iter()
                    .filter(|d| *d != bn)
                    .collect();
            return finish(factors.len(), rho, &modulus).map(|()| {
                factors.resize(rho, modulus);
                Some(SNFResult::new(factors))
            });
        }

        // Basis `h·X/Δ` of the lattice from the echelon rows `h`, plus the
        // rows of `X` standing in for `ΔZ^ρ`.
        let mut gens: Vec<Vec<BigInt>> = Vec::new();
        for h in ech.rows.iter().flatten() {
            let mut y = vec![BigInt::zero(); width];
            for (hk, xk) in h.iter().zip(&x) {
                if hk.is_zero() {
                    continue;
                }
                y.iter_mut().zip(xk).for_each(|(a, b)| *a += hk * b);
            }
            for e in &mut y {
                let (q, r) = e.div_rem(&delta);
                if !r.is_zero() {
                    return Err(Error::Inconsistent("projected basis does not lift".into()));
                }
                *e = q;
            }
            gens.push(y);
        }
        gens.extend(x);
        let mut factors = diagonalize_mod(gens, &modulus);
        finish(factors.len(), rho, &modulus)?;
        factors.resize(rho, modulus);
        return Ok(Some(SNFResult::new(factors)));
    }
    Err(Error::Inconsistent("could not certify the rank of the residual lattice".into()))
}
