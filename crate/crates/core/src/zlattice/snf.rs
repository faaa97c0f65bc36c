//! Dense Smith normal form over `Z` with arbitrary-precision entries.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A dense `rows × cols` integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!("matrix dimensions must be positive, got {rows}x{cols}")));
        }
        Ok(IntegerMatrix { rows, cols, data: vec![vec![BigInt::zero(); cols]; rows] })
    }

    pub fn from_rows<T: Into<BigInt>>(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        let data: Vec<Vec<BigInt>> = rows.into_iter().map(|r| r.into_iter().map(Into::into).collect()).collect();
        Ok(IntegerMatrix { rows: data.len(), cols, data })
    }

    pub fn identity(size: usize) -> Result<Self> {
        let mut m = Self::zeros(size, size)?;
        for i in 0..size {
            m.data[i][i] = BigInt::one();
        }
        Ok(m)
    }

    pub fn diagonal<T: Into<BigInt> + Clone>(entries: &[T]) -> Result<Self> {
        let mut m = Self::zeros(entries.len(), entries.len())?;
        for (i, e) in entries.iter().enumerate() {
            m.data[i][i] = e.clone().into();
        }
        Ok(m)
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.data[row][col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: impl Into<BigInt>) {
        self.data[row][col] = value.into();
    }

    pub fn row(&self, row: usize) -> &[BigInt] {
        &self.data[row]
    }

    /// Matrix product, or `None` on a dimension mismatch.
    pub fn mul(&self, other: &IntegerMatrix) -> Option<IntegerMatrix> {
        if self.cols != other.rows {
            return None;
        }
        let mut out = IntegerMatrix::zeros(self.rows, other.cols).ok()?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i][j] += a * &other.data[k][j];
                }
            }
        }
        Some(out)
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.data {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Invariant factors `d_1 | d_2 | ⋯ | d_r` of a matrix (all positive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SNFResult {
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
}

impl SNFResult {
    pub(crate) fn new(mut invariant_factors: Vec<BigInt>) -> Self {
        invariant_factors.sort();
        let rank = invariant_factors.len();
        SNFResult { invariant_factors, rank }
    }

    /// The factors greater than one: the torsion of the presented quotient.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.invariant_factors.iter().all(One::is_one)
    }

    pub fn satisfies_divisibility_chain(&self) -> bool {
        self.invariant_factors.iter().all(Signed::is_positive)
            && self.invariant_factors.windows(2).all(|w| w[1].is_multiple_of(&w[0]))
    }
}

/// Smith normal form by elimination with minimal-absolute-value pivots.
pub fn smith_normal_form(matrix: &IntegerMatrix) -> SNFResult {
    SNFResult::new(diagonalize(matrix.data.clone()))
}

/// Diagonal of the Smith form of `a` (nonzero entries only, unsorted).
pub(crate) fn diagonalize(a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    diagonalize_with(a, None)
}

/// Smith form of the row lattice of `a` plus `N·Z^cols`, with entries kept
/// below `N` in absolute value: the nonzero diagonal entries, each replaced
/// by its gcd with `N`. If every invariant factor of `a` divides `N`, these
/// are exactly the invariant factors other than `N` itself.
pub(crate) fn diagonalize_mod(a: Vec<Vec<BigInt>>, n: &BigInt) -> Vec<BigInt> {
    let diag = match n.to_i64().filter(|&k| k < SMALL_MODULUS) {
        Some(k) => {
            let bn = BigInt::from(k);
            let a = a
                .into_iter()
                .map(|r| r.into_iter().map(|x| x.mod_floor(&bn).to_i64().expect("reduced")).collect())
                .collect();
            chain(diagonalize_small(a, k).into_iter().map(|d| BigInt::from(d.gcd(&k))).collect())
        }
        None => diagonalize_with(a, Some(n)),
    };
    diag.into_iter().map(|d| d.gcd(n)).filter(|d| d != n).collect()
}

/// Moduli below this go through [`diagonalize_small`].
pub(crate) const SMALL_MODULUS: i64 = 1 << 62;

/// [`diagonalize_mod`] for `n < SMALL_MODULUS` in machine integers, without
/// the final gcd. Entries must lie in `[0, n)`. The diagonal is not put into
/// divisibility order; pivots are cleared with Bezout steps so that each
/// pass touches every row (or column) once.
pub(crate) fn diagonalize_small(a: Vec<Vec<i64>>, n: i64) -> Vec<i64> {
    // Below 2^31 every product of two reduced entries fits in an i64.
    if n < 1 << 31 {
        small_kernel::<i64>(a, n)
    } else {
        small_kernel::<i128>(a, n)
    }
}

trait Wide:
    Copy + From<i64> + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> + std::ops::Mul<Output = Self>
{
    fn rem_euclid(self, n: Self) -> Self;
    fn narrow(self) -> i64;
}

impl Wide for i64 {
    fn rem_euclid(self, n: Self) -> Self {
        i64::rem_euclid(self, n)
    }
    fn narrow(self) -> i64 {
        self
    }
}

impl Wide for i128 {
    fn rem_euclid(self, n: Self) -> Self {
        i128::rem_euclid(self, n)
    }
    fn narrow(self) -> i64 {
        self as i64
    }
}

fn red<W: Wide>(x: W, n: i64) -> i64 {
    let r = x.rem_euclid(W::from(n)).narrow();
    if 2 * r > n {
        r - n
    } else {
        r
    }
}

/// `(g, s, t)` with `g = s*x + t*y`; inputs are below `2^62`.
fn bezout<W: Wide>(x: i64, y: i64) -> (i64, W, W) {
    let e = x.extended_gcd(&y);
    (e.gcd, W::from(e.x), W::from(e.y))
}

/// Zeroes column `c` of every row in `tail` against `top`, which ends up
/// holding the gcd there. Only columns from `c` on are touched.
fn clear_below<W: Wide>(top: &mut [i64], tail: &mut [Vec<i64>], c: usize, n: i64) {
    for row in tail.iter_mut() {
        let (x, y) = (top[c], row[c]);
        if y == 0 {
            continue;
        }
        if y % x == 0 {
            let q = W::from(y / x);
            for (r, p) in row[c..].iter_mut().zip(&top[c..]) {
                *r = red(W::from(*r) - q * W::from(*p), n);
            }
            continue;
        }
        let (g, s1, s2) = bezout::<W>(x, y);
        let (xg, yg) = (W::from(x / g), W::from(y / g));
        for (p, r) in top[c..].iter_mut().zip(row[c..].iter_mut()) {
            let (pv, rv) = (W::from(*p), W::from(*r));
            *p = red(s1 * pv + s2 * rv, n);
            *r = red(xg * rv - yg * pv, n);
        }
    }
}

/// Row echelon form mod `n` by row operations alone; zero rows are dropped.
fn echelon_mod<W: Wide>(mut a: Vec<Vec<i64>>, n: i64) -> Vec<Vec<i64>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len())
            .filter(|&i| a[i][c] != 0)
            .min_by_key(|&i| a[i][c].unsigned_abs())
        else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        clear_below::<W>(&mut head[r], tail, c, n);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    a
}

fn small_kernel<W: Wide>(mut a: Vec<Vec<i64>>, n: i64) -> Vec<i64> {
    for row in a.iter_mut() {
        row.iter_mut().for_each(|x| *x = red(W::from(*x), n));
    }
    let mut a = echelon_mod::<W>(a, n);
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        'scan: for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &v) in row.iter().enumerate().skip(t) {
                if v != 0 && best.map_or(true, |(bi, bj)| v.unsigned_abs() < a[bi][bj].unsigned_abs()) {
                    best = Some((i, j));
                    if v.unsigned_abs() == 1 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        if pj != t {
            a.iter_mut().for_each(|r| r.swap(t, pj));
        }
        loop {
            let (head, tail) = a.split_at_mut(t + 1);
            clear_below::<W>(&mut head[t], tail, t, n);
            for j in t + 1..cols {
                let (x, y) = (a[t][t], a[t][j]);
                if y == 0 {
                    continue;
                }
                if y % x == 0 {
                    let q = W::from(y / x);
                    for row in a[t..].iter_mut() {
                        if row[t] != 0 {
                            row[j] = red(W::from(row[j]) - q * W::from(row[t]), n);
                        }
                    }
                    continue;
                }
                let (g, s1, s2) = bezout::<W>(x, y);
                let (xg, yg) = (W::from(x / g), W::from(y / g));
                for row in a[t..].iter_mut() {
                    let (pv, rv) = (W::from(row[t]), W::from(row[j]));
                    row[t] = red(s1 * pv + s2 * rv, n);
                    row[j] = red(xg * rv - yg * pv, n);
                }
            }
            if a[t + 1..].iter().all(|r| r[t] == 0) {
                break;
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

/// Invariant factors of `diag(d_1, …)`: repeated gcd/lcm until each divides
/// the next.
pub(crate) fn chain(mut d: Vec<BigInt>) -> Vec<BigInt> {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            if g != d[i] {
                let l = d[i].lcm(&d[j]);
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d
}

fn sym_mod(x: &mut BigInt, n: &BigInt) {
    let mut r = x.mod_floor(n);
    if (&r << 1u32) > *n {
        r -= n;
    }
    *x = r;
}

fn diagonalize_with(mut a: Vec<Vec<BigInt>>, modulus: Option<&BigInt>) -> Vec<BigInt> {
    if let Some(n) = modulus {
        a.iter_mut().flatten().for_each(|x| sym_mod(x, n));
    }
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = min_abs_entry(&a, t..rows, t..cols) else { break };
        a.swap(t, pi);
        swap_cols(&mut a, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    sub_row(&mut a, i, t, &q, t, modulus);
                    clean &= a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    sub_col(&mut a, j, t, &q, t, modulus);
                    clean &= a[t][j].is_zero();
                }
            }
            if !clean {
                // A remainder smaller than the pivot is left over; move the
                // smallest entry of row/column t into the pivot position.
                let col_best = min_abs_entry(&a, t..rows, t..t + 1);
                let row_best = min_abs_entry(&a, t..t + 1, t..cols);
                let (bi, bj) = match (col_best, row_best) {
                    (Some(c), Some(r)) if a[r.0][r.1].magnitude() < a[c.0][c.1].magnitude() => r,
                    (Some(c), _) => c,
                    (None, Some(r)) => r,
                    (None, None) => unreachable!("pivot is nonzero"),
                };
                a.swap(t, bi);
                swap_cols(&mut a, t, bj);
                continue;
            }
            // Row and column are clear. Enforce the divisibility chain.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                        if let Some(n) = modulus {
                            sym_mod(&mut a[t][j], n);
                        }
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

fn min_abs_entry(
    a: &[Vec<BigInt>],
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            let v = &a[i][j];
            if v.is_zero() {
                continue;
            }
            if best.map_or(true, |(bi, bj)| v.magnitude() < a[bi][bj].magnitude()) {
                best = Some((i, j));
                if v.magnitude().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

fn swap_cols(a: &mut [Vec<BigInt>], x: usize, y: usize) {
    if x != y {
        for row in a.iter_mut() {
            row.swap(x, y);
        }
    }
}

/// `row_i -= q * row_t`, touching columns `from..` only (earlier ones are zero).
fn sub_row(a: &mut [Vec<BigInt>], i: usize, t: usize, q: &BigInt, from: usize, modulus: Option<&BigInt>) {
    let (lo, hi) = a.split_at_mut(i.max(t));
    let (dst, src) = if i > t { (&mut hi[0], &lo[t]) } else { (&mut lo[i], &hi[0]) };
    for j in from..src.len() {
        if !src[j].is_zero() {
            dst[j] -= q * &src[j];
            if let Some(n) = modulus {
                sym_mod(&mut dst[j], n);
            }
        }
    }
}

/// `col_j -= q * col_t`, touching rows `from..` only.
fn sub_col(a: &mut [Vec<BigInt>], j: usize, t: usize, q: &BigInt, from: usize, modulus: Option<&BigInt>) {
    for row in a[from..].iter_mut() {
        if !row[t].is_zero() {
            let d = q * &row[t];
            row[j] -= d;
            if let Some(n) = modulus {
                sym_mod(&mut row[j], n);
            }
        }
    }
}
