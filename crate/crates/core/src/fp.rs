//! Arithmetic in small prime fields and incremental row echelon forms over
//! them.
//!
//! Rows over `F_2` are bit-packed into `u64` words. Rows over odd `F_p` are
//! stored as reduced `u8`, while the vector being reduced accumulates in
//! `u16` lanes and is only brought back into `0..p` when an overflow is near.

use crate::error::{Error, Result};
use crate::exec::Exec;

/// `a^{-1} mod p` for `p` prime and `a ≢ 0`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    let a = a % p;
    assert!(a != 0, "zero has no inverse");
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

#[inline(always)]
fn xor_into_portable(acc: &mut [u64], row: &[u64]) {
    for (a, r) in acc.iter_mut().zip(row) {
        *a ^= r;
    }
}

#[inline(always)]
fn axpy_portable(acc: &mut [u16], row: &[u8], c: u16) {
    for (a, &r) in acc.iter_mut().zip(row) {
        *a = a.wrapping_add(c * r as u16);
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn xor_into_avx2(acc: &mut [u64], row: &[u64]) {
    xor_into_portable(acc, row)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn axpy_avx2(acc: &mut [u16], row: &[u8], c: u16) {
    axpy_portable(acc, row, c)
}

/// `acc ^= row` over the common prefix.
pub fn xor_into(acc: &mut [u64], row: &[u64]) {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("avx2") {
        // SAFETY: the CPU supports AVX2, checked just above.
        unsafe { xor_into_avx2(acc, row) };
        return;
    }
    xor_into_portable(acc, row)
}

/// `acc += c·row` with wrapping `u16` lanes over the common prefix.
pub fn axpy_u16(acc: &mut [u16], row: &[u8], c: u16) {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("avx2") {
        // SAFETY: the CPU supports AVX2, checked just above.
        unsafe { axpy_avx2(acc, row, c) };
        return;
    }
    axpy_portable(acc, row, c)
}

/// Row echelon form over `F_p` built one vector at a time. Pivot rows are
/// not back-substituted; each is stored from its pivot column onward with
/// leading entry 1.
#[derive(Debug, Clone)]
pub struct Echelon {
    p: u64,
    dim: usize,
    pivot_row: Vec<u32>,
    pivot_cols: Vec<usize>,
    store: Store,
    max_bytes: usize,
}

#[derive(Debug, Clone)]
enum Store {
    Binary { rows: Vec<Vec<u64>> },
    Odd { rows: Vec<Vec<u8>>, modtab: Vec<u8>, max_ops: u32 },
}

const NO_PIVOT: u32 = u32::MAX;

/// A vector partway through reduction.
enum Acc {
    Binary(Vec<u64>),
    Odd { lanes: Vec<u16>, ops: u32 },
}

impl Echelon {
    pub fn new(p: u64, dim: usize, max_bytes: usize) -> Result<Self> {
        if !crate::polyring::is_prime(p) || p > 251 {
            return Err(Error::InvalidArgument(format!("unsupported field characteristic {p}")));
        }
        let store = if p == 2 {
            Store::Binary { rows: Vec::new() }
        } else {
            let pm1 = (p - 1) as u32;
            // Lanes start below p and grow by at most (p-1)^2 per row operation.
            let max_ops = (u16::MAX as u32 - pm1) / (pm1 * pm1);
            Store::Odd {
                rows: Vec::new(),
                modtab: (0..=u16::MAX as u32).map(|x| (x % p as u32) as u8).collect(),
                max_ops,
            }
        };
        Ok(Echelon {
            p,
            dim,
            pivot_row: vec![NO_PIVOT; dim],
            pivot_cols: Vec::new(),
            store,
            max_bytes,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    pub fn pivot_columns(&self) -> &[usize] {
        &self.pivot_cols
    }

    /// Approximate heap bytes held by pivot rows.
    pub fn bytes_used(&self) -> usize {
        match &self.store {
            Store::Binary { rows } => rows.iter().map(|r| r.len() * 8).sum(),
            Store::Odd { rows, .. } => rows.iter().map(Vec::len).sum(),
        }
    }

    /// Pivot row `idx` as a dense vector of values in `0..p`.
    pub fn row_dense(&self, idx: usize) -> Vec<u8> {
        let col = self.pivot_cols[idx];
        let mut out = vec![0u8; self.dim];
        match &self.store {
            Store::Binary { rows } => {
                let w0 = col / 64;
                for (k, &word) in rows[idx].iter().enumerate() {
                    let mut x = word;
                    while x != 0 {
                        let b = x.trailing_zeros() as usize;
                        out[(w0 + k) * 64 + b] = 1;
                        x &= x - 1;
                    }
                }
            }
            Store::Odd { rows, .. } => out[col..].copy_from_slice(&rows[idx]),
        }
        out
    }

    fn load(&self, v: &[u8]) -> Acc {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        match &self.store {
            Store::Binary { .. } => {
                let mut words = vec![0u64; self.dim.div_ceil(64)];
                for (i, &x) in v.iter().enumerate() {
                    if x & 1 == 1 {
                        words[i / 64] |= 1 << (i % 64);
                    }
                }
                Acc::Binary(words)
            }
            Store::Odd { .. } => Acc::Odd {
                lanes: v.iter().map(|&x| (x as u64 % self.p) as u16).collect(),
                ops: 0,
            },
        }
    }

    /// Eliminates the current pivots from `acc`, scanning from column `from`.
    /// Returns the first nonzero column without a pivot, or `None` if the
    /// vector reduced to zero.
    fn reduce(&self, acc: &mut Acc, from: usize) -> Option<usize> {
        match (&self.store, acc) {
            (Store::Binary { rows }, Acc::Binary(words)) => {
                let mut w = from / 64;
                let mut mask = if from % 64 == 0 { !0u64 } else { !0u64 << (from % 64) };
                while w < words.len() {
                    let x = words[w] & mask;
                    if x == 0 {
                        w += 1;
                        mask = !0;
                        continue;
                    }
                    let col = w * 64 + x.trailing_zeros() as usize;
                    let r = self.pivot_row[col];
                    if r == NO_PIVOT {
                        return Some(col);
                    }
                    xor_into(&mut words[w..], &rows[r as usize]);
                    // Bits below `col` in this word are untouched; the pivot bit is now clear.
                    mask = if col % 64 == 63 { 0 } else { !0u64 << (col % 64 + 1) };
                }
                None
            }
            (Store::Odd { rows, modtab, max_ops }, Acc::Odd { lanes, ops }) => {
                let p = self.p as u16;
                for col in from..self.dim {
                    let v = modtab[lanes[col] as usize];
                    if v == 0 {
                        lanes[col] = 0;
                        continue;
                    }
                    let r = self.pivot_row[col];
                    if r == NO_PIVOT {
                        return Some(col);
                    }
                    if *ops >= *max_ops {
                        for x in lanes[col..].iter_mut() {
                            *x = modtab[*x as usize] as u16;
                        }
                        *ops = 0;
                    }
                    axpy_u16(&mut lanes[col..], &rows[r as usize], p - v as u16);
                    *ops += 1;
                    lanes[col] = 0;
                }
                None
            }
            _ => unreachable!("accumulator kind matches the field"),
        }
    }

    fn push_pivot(&mut self, acc: Acc, col: usize) -> Result<usize> {
        let idx = self.pivot_cols.len();
        match (&mut self.store, acc) {
            (Store::Binary { rows }, Acc::Binary(words)) => {
                rows.push(words[col / 64..].to_vec());
            }
            (Store::Odd { rows, modtab, .. }, Acc::Odd { lanes, .. }) => {
                let lead = modtab[lanes[col] as usize] as u64;
                let inv = inv_mod(lead, self.p) as u32;
                let p = self.p as u32;
                let row: Vec<u8> =
                    lanes[col..].iter().map(|&x| (modtab[x as usize] as u32 * inv % p) as u8).collect();
                debug_assert_eq!(row[0], 1);
                rows.push(row);
            }
            _ => unreachable!("accumulator kind matches the field"),
        }
        self.pivot_row[col] = idx as u32;
        self.pivot_cols.push(col);
        if self.bytes_used() > self.max_bytes {
            return Err(Error::budget(
                "linear oracle",
                format!("echelon storage above {} bytes at rank {}", self.max_bytes, idx + 1),
            ));
        }
        Ok(idx)
    }

    /// Inserts a single vector; returns the new pivot index if it was
    /// independent of the rows already present.
    pub fn insert(&mut self, v: &[u8]) -> Result<Option<usize>> {
        let mut acc = self.load(v);
        match self.reduce(&mut acc, 0) {
            None => Ok(None),
            Some(col) => self.push_pivot(acc, col).map(Some),
        }
    }

    /// Inserts vectors in order. The reduction against the rows present
    /// before the call runs under `exec`; the outcome is identical to
    /// inserting them one by one.
    pub fn insert_batch(&mut self, vectors: Vec<Vec<u8>>, exec: Exec) -> Result<Vec<Option<usize>>> {
        let this = &*self;
        let partial: Vec<Option<(Acc, usize)>> = exec.map(vectors, |v| {
            let mut acc = this.load(&v);
            this.reduce(&mut acc, 0).map(|col| (acc, col))
        });
        let mut out = Vec::with_capacity(partial.len());
        for item in partial {
            let Some((mut acc, col)) = item else {
                out.push(None);
                continue;
            };
            // Only pivots added earlier in this batch can still interfere.
            match self.reduce(&mut acc, col) {
                None => out.push(None),
                Some(c) => out.push(Some(self.push_pivot(acc, c)?)),
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference rank by plain Gaussian elimination on `i64` rows.
    fn naive_rank(rows: &[Vec<u8>], p: i64) -> usize {
        let mut m: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|&x| x as i64 % p).collect()).collect();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
            m.swap(rank, piv);
            let inv = inv_mod(m[rank][c] as u64, p as u64) as i64;
            for x in m[rank].iter_mut() {
                *x = *x * inv % p;
            }
            for r in 0..m.len() {
                if r != rank && m[r][c] != 0 {
                    let f = m[r][c];
                    for k in 0..cols {
                        m[r][k] = ((m[r][k] - f * m[rank][k]) % p + p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn pseudo_random_rows(count: usize, dim: usize, p: u64, seed: u64, dep: bool) -> Vec<Vec<u8>> {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) % p
        };
        let mut rows: Vec<Vec<u8>> = (0..count).map(|_| (0..dim).map(|_| next() as u8).collect()).collect();
        if dep && count >= 3 {
            // Make the last row a combination of the first two.
            let a = next();
            let comb: Vec<u8> = (0..dim)
                .map(|i| ((rows[0][i] as u64 + a * rows[1][i] as u64) % p) as u8)
                .collect();
            rows[count - 1] = comb;
        }
        rows
    }

    #[test]
    fn inverses() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            for a in 1..p {
                assert_eq!(a * inv_mod(a, p) % p, 1);
            }
        }
    }

    #[test]
    fn rank_matches_naive() {
        for p in [2u64, 3, 5, 7, 13] {
            for (count, dim) in [(5, 7), (12, 10), (30, 130), (70, 65)] {
                for dep in [false, true] {
                    let rows = pseudo_random_rows(count, dim, p, count as u64 * 31 + p, dep);
                    let mut e = Echelon::new(p, dim, usize::MAX).unwrap();
                    for r in &rows {
                        e.insert(r).unwrap();
                    }
                    assert_eq!(e.rank(), naive_rank(&rows, p as i64), "p={p} {count}x{dim}");
                }
            }
        }
    }

    #[test]
    fn many_row_operations_do_not_overflow() {
        // Upper triangular with all-ones entries forces long elimination chains.
        let p = 13;
        let dim = 300;
        let mut e = Echelon::new(p, dim, usize::MAX).unwrap();
        for i in 0..dim {
            let row: Vec<u8> = (0..dim).map(|k| if k >= i { 12 } else { 0 }).collect();
            e.insert(&row).unwrap();
        }
        let all: Vec<u8> = (0..dim).map(|k| ((k * 7) % 13) as u8).collect();
        assert_eq!(e.insert(&all).unwrap(), None);
        assert_eq!(e.rank(), dim);
    }

    #[test]
    fn batch_equals_sequential() {
        for p in [2u64, 5] {
            let rows = pseudo_random_rows(40, 25, p, 99, true);
            let mut a = Echelon::new(p, 25, usize::MAX).unwrap();
            let mut b = Echelon::new(p, 25, usize::MAX).unwrap();
            let seq: Vec<_> = rows.iter().map(|r| a.insert(r).unwrap()).collect();
            let bat = b.insert_batch(rows.clone(), Exec::Parallel).unwrap();
            assert_eq!(seq, bat);
            for i in 0..a.rank() {
                assert_eq!(a.row_dense(i), b.row_dense(i));
            }
        }
    }

    #[test]
    fn storage_budget_is_enforced() {
        let mut e = Echelon::new(3, 100, 150).unwrap();
        let mut hit = false;
        for i in 0..10 {
            let mut v = vec![0u8; 100];
            v[i] = 1;
            if let Err(err) = e.insert(&v) {
                assert!(err.is_resource_limit());
                hit = true;
                break;
            }
        }
        assert!(hit);
    }
}
