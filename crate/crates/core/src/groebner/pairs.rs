//! Critical-pair bookkeeping with the Gebauer–Möller criteria. Works purely on
//! leading monomials, so both Buchberger kernels share it.

use std::collections::BTreeSet;

use crate::polyring::Monomial;

/// Pairs ordered by the grevlex order of their lcm, then by the indices of
/// the newer and older element (insertion order).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(super) struct Pair {
    pub lcm: Monomial,
    pub newer: usize,
    pub older: usize,
}

#[derive(Debug, Default)]
pub(super) struct PairQueue {
    pairs: BTreeSet<Pair>,
    /// Leading monomials of every element ever added, by insertion index.
    lms: Vec<Monomial>,
    /// Elements whose leading monomial is not divisible by a later one.
    active: Vec<bool>,
}

impl PairQueue {
    pub fn new() -> Self {
        Self::default()
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    #[cfg(test)]
    pub fn is_active(&self, idx: usize) -> bool {
        self.active[idx]
    }

    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.active.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i)
    }

    /// Pops the pair with the smallest lcm (normal strategy).
    pub fn pop(&mut self) -> Option<Pair> {
        self.pairs.pop_first()
    }

    /// Registers a new basis element with leading monomial `lm`, whose index
    /// is the number of elements registered so far.
    pub fn add(&mut self, lm: Monomial) -> usize {
        let h = self.lms.len();
        let candidates: Vec<(usize, Monomial, bool)> = self
            .active_indices()
            .map(|g| (g, lm.lcm(&self.lms[g]), lm.is_coprime(&self.lms[g])))
            .collect();

        // Chain criterion among the new pairs: keep (h, g1) unless some other
        // new pair's lcm properly divides it (for equal lcms, keep the first).
        let mut kept: Vec<(usize, Monomial, bool)> = Vec::new();
        for (pos, (g1, l1, coprime1)) in candidates.iter().enumerate() {
            let dominated = !coprime1
                && (candidates[pos + 1..].iter().any(|(_, l2, _)| l2.divides(l1))
                    || kept.iter().any(|(_, l2, _)| l2.divides(l1)));
            if !dominated {
                kept.push((*g1, l1.clone(), *coprime1));
            }
        }

        // Old pairs made redundant by h.
        let lms = &self.lms;
        self.pairs.retain(|pair| {
            !(lm.divides(&pair.lcm)
                && !lm.lcm_is(&lms[pair.older], &pair.lcm)
                && !lm.lcm_is(&lms[pair.newer], &pair.lcm))
        });

        // Product criterion: coprime leading monomials need no S-pair.
        for (g, l, coprime) in kept {
            if !coprime {
                self.pairs.insert(Pair { lcm: l, newer: h, older: g });
            }
        }

        for g in 0..self.active.len() {
            if self.active[g] && lm.divides(&self.lms[g]) {
                self.active[g] = false;
            }
        }
        self.lms.push(lm);
        self.active.push(true);
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn coprime_pairs_are_dropped() {
        let mut q = PairQueue::new();
        q.add(mono(&[2, 0]));
        q.add(mono(&[0, 3]));
        assert_eq!(q.len(), 0);
    }

    #[test]
    fn chain_criterion_prunes() {
        let mut q = PairQueue::new();
        q.add(mono(&[1, 1, 0]));
        q.add(mono(&[0, 1, 1]));
        assert_eq!(q.len(), 1);
        // x*y*z divides every lcm, so the lcm(x*y, y*z) = x*y*z pair is kept
        // and the new pairs with lcm x*y*z are dominated down to one.
        q.add(mono(&[1, 0, 1]));
        let pairs: Vec<_> = std::iter::from_fn(|| q.pop()).collect();
        assert!(pairs.len() <= 2, "{pairs:?}");
    }

    #[test]
    fn divisible_elements_deactivate() {
        let mut q = PairQueue::new();
        q.add(mono(&[2, 1]));
        q.add(mono(&[1, 1]));
        assert!(!q.is_active(0));
        assert!(q.is_active(1));
    }
}
