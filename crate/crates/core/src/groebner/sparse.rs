//! Buchberger on ordered maps of monomials. Handles arbitrary generators.

use std::collections::BTreeMap;

use super::pairs::PairQueue;
use crate::error::{Error, Result};
use crate::fp::inv_mod;
use crate::limits::Limits;
use crate::polyring::{Monomial, Polynomial};

/// Terms in descending grevlex order; the first one is the leading term.
pub(super) type Terms = Vec<(Monomial, u32)>;

type Acc = BTreeMap<Monomial, u32>;

fn add_scaled(acc: &mut Acc, terms: &[(Monomial, u32)], mult: &Monomial, scale: u32, p: u32) {
    let p = p as u64;
    for (m, c) in terms {
        let key = m.mul(mult);
        let add = *c as u64 * scale as u64 % p;
        match acc.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                if add != 0 {
                    v.insert(add as u32);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = (*o.get() as u64 + add) % p;
                if sum == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = sum as u32;
                }
            }
        }
    }
}

/// Normal form of `acc` modulo `basis` (no rescaling).
fn normal_form(basis: &[Terms], mut acc: Acc, p: u32) -> Terms {
    let mut out = Vec::new();
    while let Some((mono, c)) = acc.pop_last() {
        let Some(g) = basis.iter().find(|g| g[0].0.divides(&mono)) else {
            out.push((mono, c));
            continue;
        };
        let u = g[0].0.quotient_of(&mono).expect("leading monomial divides");
        add_scaled(&mut acc, &g[1..], &u, p - c, p);
    }
    out
}

fn make_monic(f: &mut Terms, p: u32) {
    if let Some(&(_, lead)) = f.first() {
        let inv = inv_mod(lead as u64, p as u64);
        for (_, c) in f.iter_mut() {
            *c = (*c as u64 * inv % p as u64) as u32;
        }
    }
}

fn spoly(f: &Terms, g: &Terms, lcm: &Monomial, p: u32) -> Acc {
    let mut acc = Acc::new();
    add_scaled(&mut acc, f, &f[0].0.quotient_of(lcm).expect("lcm"), 1, p);
    add_scaled(&mut acc, g, &g[0].0.quotient_of(lcm).expect("lcm"), p - 1, p);
    acc
}

pub(super) fn run(inputs: Vec<Terms>, p: u32, limits: &Limits) -> Result<Vec<Terms>> {
    let mut basis: Vec<Terms> = Vec::new();
    let mut queue = PairQueue::new();
    let push = |mut f: Terms, basis: &mut Vec<Terms>, queue: &mut PairQueue| -> Result<()> {
        if basis.len() >= limits.max_basis {
            return Err(Error::budget("buchberger", format!("basis exceeded {} elements", limits.max_basis)));
        }
        make_monic(&mut f, p);
        queue.add(f[0].0.clone());
        basis.push(f);
        Ok(())
    };
    for f in inputs {
        let nf = normal_form(&basis, f.into_iter().collect(), p);
        if !nf.is_empty() {
            push(nf, &mut basis, &mut queue)?;
        }
    }
    let mut processed = 0u64;
    loop {
        let Some(pair) = queue.pop() else { break };
        processed += 1;
        if processed > limits.max_spairs {
            return Err(Error::budget("buchberger", format!("more than {} S-pairs", limits.max_spairs)));
        }
        let s = spoly(&basis[pair.newer], &basis[pair.older], &pair.lcm, p);
        let nf = normal_form(&basis, s, p);
        if !nf.is_empty() {
            push(nf, &mut basis, &mut queue)?;
        }
    }
    let active: Vec<usize> = queue.active_indices().collect();
    Ok(interreduce(active.iter().map(|&i| basis[i].clone()).collect(), p))
}

/// Tail-reduces a minimal Gröbner basis into the reduced one.
pub(super) fn interreduce(minimal: Vec<Terms>, p: u32) -> Vec<Terms> {
    (0..minimal.len())
        .map(|k| {
            let others: Vec<Terms> =
                minimal.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, g)| g.clone()).collect();
            let f = &minimal[k];
            let mut reduced = vec![f[0].clone()];
            reduced.extend(normal_form(&others, f[1..].iter().cloned().collect(), p));
            reduced
        })
        .collect()
}

/// Post-hoc check that every S-polynomial of `polys` reduces to zero modulo `polys`.
pub(super) fn all_spolys_reduce_to_zero(polys: &[Polynomial], p: u64) -> bool {
    let terms: Vec<Terms> = polys.iter().map(|f| super::to_terms(f, p)).collect();
    if terms.iter().any(|t| t.is_empty()) {
        return false;
    }
    let p = p as u32;
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            let (a, b) = (&terms[i][0].0, &terms[j][0].0);
            if a.is_coprime(b) {
                continue;
            }
            let s = spoly(&terms[i], &terms[j], &a.lcm(b), p);
            if !normal_form(&terms, s, p).is_empty() {
                return false;
            }
        }
    }
    true
}
