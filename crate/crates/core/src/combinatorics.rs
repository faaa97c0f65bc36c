//! Pair-partitions of the index set `{0, …, n+1}`, the point set `Γ_K` and
//! the rank of `L_K(X)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

/// Dimension `n = 2d` and degree `m` of the Fermat variety.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProblemInstance {
    n: usize,
    m: usize,
}

/// Largest supported dimension. Index sets are stored in `u8` and Γ counting
/// iterates over `(m-1)^(n+1)` points, so anything bigger is out of reach anyway.
pub const MAX_DIMENSION: usize = 16;

impl ProblemInstance {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::InvalidInstance(format!("dimension n = {n} must be even")));
        }
        if n > MAX_DIMENSION {
            return Err(Error::InvalidInstance(format!(
                "dimension n = {n} exceeds the supported maximum {MAX_DIMENSION}"
            )));
        }
        if m < 3 {
            return Err(Error::InvalidInstance(format!("degree m = {m} must be at least 3")));
        }
        if m > 255 {
            return Err(Error::InvalidInstance(format!("degree m = {m} is too large")));
        }
        Ok(ProblemInstance { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.n / 2
    }

    /// Number of polynomial variables `t_1, …, t_{n+1}`.
    pub fn num_vars(&self) -> usize {
        self.n + 1
    }

    /// Size of the index set `{0, …, n+1}`.
    pub fn num_indices(&self) -> usize {
        self.n + 2
    }

    /// `(m-1)^(n+1)`, the rank of `R̄`.
    pub fn reduced_rank(&self) -> u64 {
        (self.m as u64 - 1).pow(self.num_vars() as u32)
    }

    /// `m^(n+1)`, the rank of `R`.
    pub fn full_rank(&self) -> u64 {
        (self.m as u64).pow(self.num_vars() as u32)
    }
}

impl fmt::Display for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, m={})", self.n, self.m)
    }
}

/// A partition of `{0, …, n+1}` into pairs `(j_i, k_i)` with `j_i < k_i` and
/// `j_0 < j_1 < ⋯ < j_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairPartition {
    pairs: Vec<(u8, u8)>,
}

impl PairPartition {
    /// Builds a partition of `{0, …, n+1}` from pairs given in any order.
    pub fn new<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n % 2 != 0 || n > MAX_DIMENSION {
            return Err(Error::InvalidPartition(format!("unsupported dimension n = {n}")));
        }
        let size = n + 2;
        let mut seen = vec![false; size];
        let mut normalized = Vec::with_capacity(size / 2);
        for (a, b) in pairs {
            if a == b {
                return Err(Error::InvalidPartition(format!("pair {a}-{b} repeats an index")));
            }
            for idx in [a, b] {
                if idx >= size {
                    return Err(Error::InvalidPartition(format!(
                        "index {idx} outside 0..={}",
                        size - 1
                    )));
                }
                if seen[idx] {
                    return Err(Error::InvalidPartition(format!("index {idx} used twice")));
                }
                seen[idx] = true;
            }
            normalized.push((a.min(b) as u8, a.max(b) as u8));
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("index {missing} not covered")));
        }
        normalized.sort_unstable();
        Ok(PairPartition { pairs: normalized })
    }

    /// `J_0 = [[0,1],[2,3],…,[n,n+1]]`.
    pub fn standard(n: usize) -> Result<Self> {
        PairPartition::new(n, (0..=n / 2).map(|i| (2 * i, 2 * i + 1)))
    }

    pub fn pairs(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().map(|&(j, k)| (j as usize, k as usize))
    }

    /// Pairs `(j_i, k_i)` for `i ≥ 1`; these never involve the index 0.
    pub fn nontrivial_pairs(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.pairs[1..].iter().map(|&(j, k)| (j as usize, k as usize))
    }

    /// `k_0, k_1, …, k_d`.
    pub fn k_indices(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.pairs.iter().map(|&(_, k)| k as usize)
    }

    /// `d = (number of pairs) - 1`.
    pub fn d(&self) -> usize {
        self.pairs.len() - 1
    }

    pub fn n(&self) -> usize {
        2 * self.d()
    }

    /// Sign of the permutation `i ↦ (j_0, k_0, …, j_d, k_d)[i]`, via its
    /// cycle decomposition.
    pub fn sign(&self) -> i8 {
        let image: Vec<usize> = self.pairs.iter().flat_map(|&(j, k)| [j as usize, k as usize]).collect();
        let mut visited = vec![false; image.len()];
        let mut cycles = 0;
        for start in 0..image.len() {
            if visited[start] {
                continue;
            }
            cycles += 1;
            let mut cur = start;
            while !visited[cur] {
                visited[cur] = true;
                cur = image[cur];
            }
        }
        if (image.len() - cycles) % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for PairPartition {
    /// `0-1,2-3,4-5`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (j, k)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{j}-{k}")?;
        }
        Ok(())
    }
}

/// All pair-partitions of `{0, …, n+1}` in lexicographic order; there are
/// `(n+1)!! = 1·3·5⋯(n+1)` of them.
pub fn enumerate_partitions(instance: &ProblemInstance) -> Vec<PairPartition> {
    fn rec(remaining: &[u8], current: &mut Vec<(u8, u8)>, out: &mut Vec<PairPartition>) {
        let Some((&first, rest)) = remaining.split_first() else {
            out.push(PairPartition { pairs: current.clone() });
            return;
        };
        for (pos, &partner) in rest.iter().enumerate() {
            let next: Vec<u8> = rest
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != pos)
                .map(|(_, &x)| x)
                .collect();
            current.push((first, partner));
            rec(&next, current, out);
            current.pop();
        }
    }
    let indices: Vec<u8> = (0..instance.num_indices() as u8).collect();
    let mut out = Vec::new();
    rec(&indices, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// `(2d+1)!!`
pub fn double_factorial_odd(d: usize) -> u64 {
    (0..=d as u64).map(|i| 2 * i + 1).product()
}

/// A non-empty, duplicate-free set `K` of partitions of the same index set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionSet {
    n: usize,
    partitions: Vec<PairPartition>,
}

impl PartitionSet {
    pub fn new(n: usize, partitions: Vec<PairPartition>) -> Result<Self> {
        if partitions.is_empty() {
            return Err(Error::InvalidPartition("partition set must be non-empty".into()));
        }
        let mut seen = BTreeSet::new();
        for p in &partitions {
            if p.n() != n {
                return Err(Error::InvalidPartition(format!(
                    "partition {p} is over n = {}, expected n = {n}",
                    p.n()
                )));
            }
            if !seen.insert(p.clone()) {
                return Err(Error::InvalidPartition(format!("duplicate partition {p}")));
            }
        }
        Ok(PartitionSet { n, partitions: seen.into_iter().collect() })
    }

    /// `K = J`, every partition.
    pub fn all(instance: &ProblemInstance) -> Self {
        PartitionSet { n: instance.n(), partitions: enumerate_partitions(instance) }
    }

    /// `K = {J_0}`.
    pub fn standard(instance: &ProblemInstance) -> Self {
        PartitionSet {
            n: instance.n(),
            partitions: vec![PairPartition::standard(instance.n()).expect("valid n")],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PairPartition> {
        self.partitions.iter()
    }

    pub fn as_slice(&self) -> &[PairPartition] {
        &self.partitions
    }

    pub fn is_subset_of(&self, other: &PartitionSet) -> bool {
        self.partitions.iter().all(|p| other.partitions.binary_search(p).is_ok())
    }

    pub fn is_all(&self) -> bool {
        self.partitions.len() as u64 == double_factorial_odd(self.n / 2)
    }

    pub fn is_standard(&self) -> bool {
        self.partitions.len() == 1
            && self.partitions[0] == PairPartition::standard(self.n).expect("valid n")
    }

    fn check_instance(&self, instance: &ProblemInstance) -> Result<()> {
        if self.n != instance.n() {
            return Err(Error::InvalidArgument(format!(
                "partition set is over n = {}, instance has n = {}",
                self.n,
                instance.n()
            )));
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a PartitionSet {
    type Item = &'a PairPartition;
    type IntoIter = std::slice::Iter<'a, PairPartition>;

    fn into_iter(self) -> Self::IntoIter {
        self.partitions.iter()
    }
}

/// `|Γ_K|`: exponent vectors `e ∈ {1,…,m-1}^(n+1)` such that some `J ∈ K`
/// has `e_{j_i} + e_{k_i} ≡ 0 (mod m)` for every `i ≥ 1`, where
/// `e_0 = -(e_1 + ⋯ + e_{n+1})`.
pub fn gamma_count(instance: &ProblemInstance, k: &PartitionSet) -> Result<u64> {
    gamma_count_with(instance, k, Exec::default())
}

pub fn gamma_count_with(instance: &ProblemInstance, k: &PartitionSet, exec: Exec) -> Result<u64> {
    k.check_instance(instance)?;
    let m = instance.m();
    let vars = instance.num_vars();
    let conditions: Vec<Vec<(usize, usize)>> =
        k.iter().map(|j| j.nontrivial_pairs().collect()).collect();
    let first_pairs: Vec<(usize, usize)> = k.iter().map(|j| j.pairs().next().expect("pair")).collect();

    // The outer loop runs over e_1; each task walks the remaining coordinates.
    let count = exec.sum_range(m - 1, |first| {
        let mut e = vec![1usize; vars + 1];
        e[1] = first + 1;
        let mut local = 0u64;
        loop {
            let sum: usize = e[1..].iter().sum();
            e[0] = (m - sum % m) % m;
            for (cond, &(j0, k0)) in conditions.iter().zip(&first_pairs) {
                if cond.iter().all(|&(j, k)| (e[j] + e[k]) % m == 0) {
                    debug_assert_eq!((e[j0] + e[k0]) % m, 0, "pair through index 0 must close up");
                    local += 1;
                    break;
                }
            }
            // Odometer over e_2..e_{n+1}.
            let mut pos = 2;
            loop {
                if pos > vars {
                    return local;
                }
                if e[pos] < m - 1 {
                    e[pos] += 1;
                    break;
                }
                e[pos] = 1;
                pos += 1;
            }
        }
    });
    Ok(count)
}

/// Rank of `L_K(X)`, equal to `|Γ_K| + 1`.
pub fn rank_of_lk(instance: &ProblemInstance, k: &PartitionSet) -> Result<u64> {
    Ok(gamma_count(instance, k)? + 1)
}

/// Closed-form polynomials in `m` for `|Γ_J|` (all partitions), `n ∈ {2,4,6}`.
///
/// These evaluate to `|Γ_J|`, i.e. the rank of `L(X)` minus one; at
/// `(n, m) = (2, 3)` the polynomial gives 6 while the cubic surface has rank 7.
pub fn gamma_closed_form(n: usize, m: usize) -> Result<i64> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("degree m = {m} must be at least 3")));
    }
    let m = m as i64;
    let delta = (m - 1) % 2;
    let value = match n {
        2 => 3 * m * m - 9 * m + 6 + delta,
        4 => 15 * m.pow(3) - 90 * m * m + 175 * m - 100 + (15 * m - 39) * delta,
        6 => {
            105 * m.pow(4) - 1050 * m.pow(3) + 3955 * m * m - 6335 * m + 3325
                + (210 * m * m - 1302 * m + 2010) * delta
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "closed form only available for n in {{2, 4, 6}}, got {n}"
            )))
        }
    };
    Ok(value)
}

/// Constant term of `(x_1 + ⋯ + x_h + x_h^{-1} + ⋯ + x_1^{-1})^(n+2)` for odd
/// `m = 2h+1`, or of `(x_1 + ⋯ + x_{h-1} + 1 + x_{h-1}^{-1} + ⋯ + x_1^{-1})^(n+2)`
/// for even `m = 2h`. Equals `|Γ_J|` for the full partition set.
pub fn gamma_constant_term(n: usize, m: usize) -> Result<u64> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("degree m = {m} must be at least 3")));
    }
    if n % 2 != 0 {
        return Err(Error::InvalidArgument(format!("dimension n = {n} must be even")));
    }
    let power = n + 2;
    let (vars, has_one) = if m % 2 == 1 { ((m - 1) / 2, false) } else { (m / 2 - 1, true) };
    let side = 2 * power + 1;
    let cells = side
        .checked_pow(vars as u32)
        .filter(|&c| c <= 50_000_000)
        .ok_or_else(|| Error::budget("gamma_constant_term", format!("{side}^{vars} cells")))?;

    let strides: Vec<usize> = (0..vars).map(|i| side.pow(i as u32)).collect();
    let origin: usize = strides.iter().map(|s| s * power).sum();
    let mut current = vec![0u64; cells];
    current[origin] = 1;
    for _ in 0..power {
        let mut next = vec![0u64; cells];
        for (idx, &c) in current.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if has_one {
                next[idx] += c;
            }
            for &s in &strides {
                // Exponents never leave [-power, power] within `power` steps.
                next[idx + s] += c;
                next[idx - s] += c;
            }
        }
        current = next;
    }
    Ok(current[origin])
}
