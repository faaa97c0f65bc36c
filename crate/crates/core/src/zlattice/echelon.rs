//! Incremental row echelon form of a sublattice of `Z^cols`, used to shrink
//! large sparse presentations before the dense Smith form.
//!
//! Inserting a row reduces it against the pivot rows. When a pivot does not
//! divide the incoming leading entry, the pivot row and the incoming row are
//! replaced by their unimodular (Bezout) combination, so the span is kept
//! exactly. Entries live in `i64` with overflow checks; on overflow the whole
//! elimination restarts with big integers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::lowrank::low_rank_snf;
use super::snf::{diagonalize, SNFResult};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// Sorted `(column, coefficient)` pairs with no zero coefficients.
pub type SparseRow = Vec<(u32, i64)>;

#[derive(Debug)]
pub(crate) struct Overflow;

pub(crate) trait Entry: Clone + PartialEq + std::fmt::Debug + Sized {
    fn to_big(&self) -> BigInt;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn neg(&self) -> Result<Self, Overflow>;
    fn mul(&self, other: &Self) -> Result<Self, Overflow>;
    fn add(&self, other: &Self) -> Result<Self, Overflow>;
    /// `other / self` when `self` divides `other`.
    fn quotient_if_divides(&self, other: &Self) -> Option<Self>;
    /// `(g, s, t)` with `g = s*a + t*b > 0`.
    fn bezout(a: &Self, b: &Self) -> (Self, Self, Self);
}

impl Entry for i64 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn neg(&self) -> Result<Self, Overflow> {
        self.checked_neg().ok_or(Overflow)
    }
    fn mul(&self, other: &Self) -> Result<Self, Overflow> {
        self.checked_mul(*other).ok_or(Overflow)
    }
    fn add(&self, other: &Self) -> Result<Self, Overflow> {
        self.checked_add(*other).ok_or(Overflow)
    }
    fn quotient_if_divides(&self, other: &Self) -> Option<Self> {
        (other.checked_rem(*self)? == 0).then(|| other / self)
    }
    fn bezout(a: &Self, b: &Self) -> (Self, Self, Self) {
        // i128 keeps the intermediate products of the Euclidean steps exact.
        let e = (*a as i128).extended_gcd(&(*b as i128));
        let (g, s, t) = if e.gcd < 0 { (-e.gcd, -e.x, -e.y) } else { (e.gcd, e.x, e.y) };
        let fit = |v: i128| i64::try_from(v).expect("Bezout coefficients are bounded by the inputs");
        (fit(g), fit(s), fit(t))
    }
}

impl Entry for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn neg(&self) -> Result<Self, Overflow> {
        Ok(-self)
    }
    fn mul(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self * other)
    }
    fn add(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self + other)
    }
    fn quotient_if_divides(&self, other: &Self) -> Option<Self> {
        other.is_multiple_of(self).then(|| other / self)
    }
    fn bezout(a: &Self, b: &Self) -> (Self, Self, Self) {
        let e = a.extended_gcd(b);
        if Signed::is_negative(&e.gcd) {
            (-e.gcd, -e.x, -e.y)
        } else {
            (e.gcd, e.x, e.y)
        }
    }
}

type Row<T> = Vec<(u32, T)>;

/// `x*a + y*b`, merged; `x = None` means `x = 1`.
fn combine<T: Entry>(x: Option<&T>, a: &[(u32, T)], y: &T, b: &[(u32, T)]) -> Result<Row<T>, Overflow> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let scale_a = |v: &T| match x {
        Some(x) => v.mul(x),
        None => Ok(v.clone()),
    };
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(u32::MAX, |e| e.0);
        let cb = b.get(j).map_or(u32::MAX, |e| e.0);
        let (col, v) = if ca < cb {
            i += 1;
            (ca, scale_a(&a[i - 1].1)?)
        } else if cb < ca {
            j += 1;
            (cb, b[j - 1].1.mul(y)?)
        } else {
            i += 1;
            j += 1;
            (ca, scale_a(&a[i - 1].1)?.add(&b[j - 1].1.mul(y)?)?)
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    Ok(out)
}

fn negate<T: Entry>(row: &mut Row<T>) -> Result<(), Overflow> {
    for e in row.iter_mut() {
        e.1 = e.1.neg()?;
    }
    Ok(())
}

const NO_PIVOT: u32 = u32::MAX;

/// Echelon basis of the lattice spanned by the inserted rows. Pivot rows have
/// distinct leading columns and positive leading entries.
pub(crate) struct ZEchelon<T> {
    rows: Vec<Row<T>>,
    pivot_row: Vec<u32>,
    stored: usize,
    max_entries: usize,
}

pub(crate) enum InsertError {
    Overflow,
    Budget,
}

impl From<Overflow> for InsertError {
    fn from(_: Overflow) -> Self {
        InsertError::Overflow
    }
}

impl<T: Entry> ZEchelon<T> {
    pub fn new(cols: usize, max_entries: usize) -> Self {
        ZEchelon { rows: Vec::new(), pivot_row: vec![NO_PIVOT; cols], stored: 0, max_entries }
    }

    pub fn insert(&mut self, mut v: Row<T>) -> Result<(), InsertError> {
        loop {
            let Some((col, lead)) = v.first().cloned() else { return Ok(()) };
            let r = self.pivot_row[col as usize];
            if r == NO_PIVOT {
                if lead.is_negative() {
                    negate(&mut v)?;
                }
                self.stored += v.len();
                if self.stored > self.max_entries {
                    return Err(InsertError::Budget);
                }
                self.pivot_row[col as usize] = self.rows.len() as u32;
                self.rows.push(v);
                return Ok(());
            }
            let row = &self.rows[r as usize];
            let a = &row[0].1;
            if let Some(q) = a.quotient_if_divides(&lead) {
                v = combine(None, &v, &q.neg()?, row)?;
                continue;
            }
            let (g, s, t) = T::bezout(a, &lead);
            let a_g = g.quotient_if_divides(a).expect("gcd divides");
            let b_g = g.quotient_if_divides(&lead).expect("gcd divides");
            let new_pivot = combine(Some(&s), row, &t, &v)?;
            let rest = combine(Some(&a_g), &v, &b_g.neg()?, row)?;
            debug_assert!(new_pivot[0].0 == col && new_pivot[0].1 == g);
            self.stored = self.stored + new_pivot.len() - row.len();
            self.rows[r as usize] = new_pivot;
            v = rest;
        }
    }

    /// Smith form of the echelon basis. Rows with unit pivots split off as
    /// factors 1; the remaining rows, with the unit-pivot columns eliminated,
    /// go through the dense Smith form.
    fn finish(self, limits: &Limits) -> Result<Result<SNFResult, Overflow>> {
        let units: Vec<usize> = (0..self.rows.len()).filter(|&i| self.rows[i][0].1.is_unit()).collect();
        let unit_of_col = |c: u32| {
            let r = self.pivot_row[c as usize];
            (r != NO_PIVOT && self.rows[r as usize][0].1.is_unit()).then_some(r as usize)
        };
        let mut residual: Vec<BTreeMap<u32, T>> = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            if row[0].1.is_unit() {
                continue;
            }
            let mut acc: BTreeMap<u32, T> = row.iter().cloned().collect();
            let mut out = BTreeMap::new();
            while let Some((c, x)) = acc.pop_first() {
                let Some(u) = unit_of_col(c) else {
                    out.insert(c, x);
                    continue;
                };
                debug_assert!(u != i);
                // Subtract x/lead times the unit row; lead is 1.
                let urow = &self.rows[u];
                let q = match x.mul(&urow[0].1) {
                    Ok(q) => q,
                    Err(o) => return Ok(Err(o)),
                };
                for (cc, y) in &urow[1..] {
                    let d = match q.mul(y).and_then(|d| d.neg()) {
                        Ok(d) => d,
                        Err(o) => return Ok(Err(o)),
                    };
                    let cur = acc.remove(cc);
                    let nv = match cur {
                        Some(cv) => match cv.add(&d) {
                            Ok(v) => v,
                            Err(o) => return Ok(Err(o)),
                        },
                        None => d,
                    };
                    if !nv.is_zero() {
                        acc.insert(*cc, nv);
                    }
                }
            }
            residual.push(out);
        }
        let mut factors: Vec<BigInt> = vec![BigInt::one(); units.len()];
        if !residual.is_empty() {
            let mut cols: Vec<u32> = residual.iter().flat_map(|r| r.keys().copied()).collect();
            cols.sort_unstable();
            cols.dedup();
            if residual.len().saturating_mul(cols.len()) > limits.max_snf_entries {
                return Err(Error::budget(
                    "smith normal form",
                    format!("residual block {}x{} too large", residual.len(), cols.len()),
                ));
            }
            let dense: Vec<Vec<BigInt>> = residual
                .iter()
                .map(|r| {
                    let mut d = vec![BigInt::zero(); cols.len()];
                    for (c, x) in r {
                        d[cols.binary_search(c).expect("collected column")] = x.to_big();
                    }
                    d
                })
                .collect();
            factors.extend(diagonalize(dense));
        }
        Ok(Ok(SNFResult::new(factors)))
    }
}

fn run<T: Entry>(rows: impl IntoIterator<Item = Row<T>>, cols: usize, limits: &Limits) -> Result<Result<SNFResult, Overflow>> {
    let mut ech = ZEchelon::<T>::new(cols, limits.max_snf_entries);
    for v in rows {
        match ech.insert(v) {
            Ok(()) => {}
            Err(InsertError::Overflow) => return Ok(Err(Overflow)),
            Err(InsertError::Budget) => {
                return Err(Error::budget(
                    "integer elimination",
                    format!("more than {} stored entries", limits.max_snf_entries),
                ))
            }
        }
    }
    ech.finish(limits)
}

/// Structured elimination on unit entries. A row with a `±1` entry in column
/// `c` lets `e_c` be solved for, so the row and the column both leave the
/// presentation (a factor 1) after `c` is cleared from the other rows. Light
/// rows and sparse columns go first to keep fill-in down. Stops once the
/// lightest row with a unit has more than `stop_weight` entries. Returns the
/// number of eliminated pivots and the remaining nonzero rows.
fn eliminate_units<T: Entry>(
    rows: Vec<Row<T>>,
    cols: usize,
    max_entries: usize,
    stop_weight: usize,
) -> Result<Result<(usize, Vec<Row<T>>), Overflow>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut rows = rows;
    let mut alive = vec![true; rows.len()];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); cols];
    let mut heap = BinaryHeap::new();
    let mut stored = 0usize;
    for (i, row) in rows.iter().enumerate() {
        for (c, _) in row {
            col_rows[*c as usize].push(i as u32);
        }
        stored += row.len();
        heap.push(Reverse((row.len(), i as u32)));
    }
    let entry = |row: &Row<T>, c: u32| row.binary_search_by_key(&c, |e| e.0).ok().map(|k| row[k].1.clone());
    let mut pivots = 0usize;
    while let Some(Reverse((weight, r))) = heap.pop() {
        let r = r as usize;
        if !alive[r] || rows[r].len() != weight {
            continue;
        }
        let Some((c, unit)) = rows[r].iter().filter(|e| e.1.is_unit()).min_by_key(|e| col_rows[e.0 as usize].len()).cloned()
        else {
            continue;
        };
        if weight > stop_weight {
            break;
        }
        let pivot = std::mem::take(&mut rows[r]);
        alive[r] = false;
        stored -= pivot.len();
        pivots += 1;
        let users = std::mem::take(&mut col_rows[c as usize]);
        for s in users {
            let s = s as usize;
            if !alive[s] {
                continue;
            }
            let Some(x) = entry(&rows[s], c) else { continue };
            // rows[s] -= x * unit * pivot (unit = ±1 is its own inverse).
            let q = match x.mul(&unit).and_then(|q| q.neg()) {
                Ok(q) => q,
                Err(o) => return Ok(Err(o)),
            };
            let before = rows[s].len();
            let updated = match combine(None, &rows[s], &q, &pivot) {
                Ok(v) => v,
                Err(o) => return Ok(Err(o)),
            };
            for (cc, _) in &updated {
                if entry(&rows[s], *cc).is_none() {
                    col_rows[*cc as usize].push(s as u32);
                }
            }
            stored = stored + updated.len() - before;
            if stored > max_entries {
                return Err(Error::budget("integer elimination", format!("more than {max_entries} stored entries")));
            }
            rows[s] = updated;
            if rows[s].is_empty() {
                alive[s] = false;
            } else {
                heap.push(Reverse((rows[s].len(), s as u32)));
            }
        }
    }
    let rest = rows.into_iter().zip(alive).filter(|(r, a)| *a && !r.is_empty()).map(|(r, _)| r).collect();
    Ok(Ok((pivots, rest)))
}

struct Dense {
    v: Vec<i64>,
    bound: u64,
    nnz: usize,
    has_unit: bool,
}

impl Dense {
    fn new(v: Vec<i64>) -> Self {
        let bound = v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
        let nnz = v.iter().filter(|&&x| x != 0).count();
        let has_unit = v.iter().any(|x| x.is_unit());
        Dense { v, bound, nnz, has_unit }
    }
}

/// When no row has a unit, finds a column whose entries have gcd 1 and
/// replaces pairs of rows by unimodular Bezout combinations until one row has
/// a unit there. Returns that row, or `None` if there is no such column or
/// the combination could overflow.
fn make_unit(mat: &mut [Dense], col_count: &mut [usize]) -> Option<usize> {
    let width = col_count.len();
    let mut order: Vec<usize> = (0..width).filter(|&c| col_count[c] > 0).collect();
    order.sort_by_key(|&c| col_count[c]);
    let c = order.into_iter().find(|&c| mat.iter().fold(0i64, |g, d| g.gcd(&d.v[c])) == 1)?;
    let mut rows = (0..mat.len()).filter(|&i| mat[i].v[c] != 0).collect::<Vec<_>>().into_iter();
    let first = rows.next()?;
    for j in rows {
        let (a, b) = (mat[first].v[c], mat[j].v[c]);
        if b % a == 0 {
            continue;
        }
        let (g, x, y) = i64::bezout(&a, &b);
        let (ag, bg) = (a / g, b / g);
        let grow = |p: i64, q: i64| p.unsigned_abs() as u128 * mat[first].bound as u128 + q.unsigned_abs() as u128 * mat[j].bound as u128;
        if grow(x, y).max(grow(bg, ag)) > i64::MAX as u128 {
            return None;
        }
        let top: Vec<i64> = mat[first].v.iter().zip(&mat[j].v).map(|(p, q)| x * p + y * q).collect();
        let bottom: Vec<i64> = mat[first].v.iter().zip(&mat[j].v).map(|(p, q)| ag * q - bg * p).collect();
        for (k, cnt) in col_count.iter_mut().enumerate() {
            *cnt = *cnt + usize::from(top[k] != 0) + usize::from(bottom[k] != 0)
                - usize::from(mat[first].v[k] != 0)
                - usize::from(mat[j].v[k] != 0);
        }
        mat[first] = Dense::new(top);
        mat[j] = Dense::new(bottom);
        if g == 1 {
            return Some(first);
        }
    }
    None
}

/// Rows with more than `cols / DENSE_FILL` entries are left to
/// [`dense_units`].
const DENSE_FILL: usize = 4;

/// Dense continuation of [`eliminate_units`] for rows that have filled in,
/// with the same pivot rule. Entries are updated with wrapping arithmetic
/// after checking a per-row bound on their size, which keeps the inner loop
/// branch free. Rows that do not fit in `max_entries` dense entries are
/// returned untouched.
fn dense_units(rows: Vec<Row<i64>>, max_entries: usize) -> Result<(usize, Vec<Row<i64>>), Overflow> {

    let mut used: Vec<u32> = rows.iter().flatten().map(|e| e.0).collect();
    used.sort_unstable();
    used.dedup();
    let width = used.len();
    if rows.is_empty() || rows.len().saturating_mul(width) > max_entries {
        return Ok((0, rows));
    }
    let mut col_count = vec![0usize; width];
    let mut mat: Vec<Dense> = rows
        .iter()
        .map(|r| {
            let mut v = vec![0i64; width];
            for (c, x) in r {
                let k = used.binary_search(c).expect("collected column");
                v[k] = *x;
                col_count[k] += 1;
            }
            Dense::new(v)
        })
        .collect();
    drop(rows);
    let mut pivots = 0;
    loop {
        let r = match (0..mat.len()).filter(|&i| mat[i].has_unit).min_by_key(|&i| mat[i].nnz) {
            Some(r) => r,
            None => match make_unit(&mut mat, &mut col_count) {
                Some(r) => r,
                None => break,
            },
        };
        let pivot = mat.swap_remove(r);
        let c = (0..width).filter(|&k| pivot.v[k].is_unit()).min_by_key(|&k| col_count[k]).expect("has a unit");
        let u = pivot.v[c];
        for (k, x) in pivot.v.iter().enumerate() {
            col_count[k] -= usize::from(*x != 0);
        }
        let limit = i64::MAX as u128;
        if mat.iter().any(|d| d.v[c].unsigned_abs() as u128 * pivot.bound as u128 + d.bound as u128 > limit) {
            return Err(Overflow);
        }
        for d in &mut mat {
            let q = d.v[c] * u;
            if q == 0 {
                continue;
            }
            let (mut bound, mut nnz, mut has_unit) = (0u64, 0usize, false);
            for ((a, b), cnt) in d.v.iter_mut().zip(&pivot.v).zip(col_count.iter_mut()) {
                if *b != 0 {
                    let was = *a != 0;
                    *a = a.wrapping_sub(q.wrapping_mul(*b));
                    let now = *a != 0;
                    if was != now {
                        if now {
                            *cnt += 1;
                        } else {
                            *cnt -= 1;
                        }
                    }
                }
                bound = bound.max(a.unsigned_abs());
                nnz += usize::from(*a != 0);
                has_unit |= *a == 1 || *a == -1;
            }
            *d = Dense { v: std::mem::take(&mut d.v), bound, nnz, has_unit };
        }
        mat.retain(|d| d.nnz > 0);
        pivots += 1;
    }
    let rest = mat
        .into_iter()
        .map(|d| d.v.iter().zip(&used).filter(|e| *e.0 != 0).map(|(&x, &c)| (c, x)).collect())
        .collect();
    Ok((pivots, rest))
}

/// Unit elimination in `i64`: sparse while rows are light, dense after.
fn units_i64(rows: Vec<Row<i64>>, cols: usize, limits: &Limits) -> Result<Result<(usize, Vec<Row<i64>>), Overflow>> {
    let (p, rest) = match eliminate_units(rows, cols, limits.max_snf_entries, cols / DENSE_FILL)? {
        Ok(done) => done,
        Err(o) => return Ok(Err(o)),
    };
    Ok(dense_units(rest, limits.max_snf_entries).map(|(q, rest)| (p + q, rest)))
}

/// Plain echelon on all rows, without unit elimination.
#[cfg(test)]
fn via_echelon(rows: &[SparseRow], cols: usize, limits: &Limits) -> Result<SNFResult> {
    let typed = |t: fn(i64) -> BigInt| rows.iter().map(move |r| r.iter().map(|&(c, x)| (c, t(x))).collect::<Row<BigInt>>());
    match run::<i64>(rows.iter().cloned(), cols, limits)? {
        Ok(res) => Ok(res),
        Err(Overflow) => match run(typed(BigInt::from), cols, limits)? {
            Ok(res) => Ok(res),
            Err(Overflow) => unreachable!("big integers do not overflow"),
        },
    }
}

/// Smith form of the lattice spanned by sparse rows in `Z^cols`.
pub fn lattice_snf(rows: &[SparseRow], cols: usize, limits: &Limits) -> Result<SNFResult> {
    if let Some(c) = rows.iter().flat_map(|r| r.iter()).map(|e| e.0).find(|&c| c as usize >= cols) {
        return Err(Error::InvalidArgument(format!("column {c} out of range {cols}")));
    }
    let big = |rows: Vec<Row<i64>>| -> Vec<Row<BigInt>> {
        rows.into_iter().map(|r| r.into_iter().map(|(c, x)| (c, BigInt::from(x))).collect()).collect()
    };
    let (pivots, rest) = match units_i64(rows.to_vec(), cols, limits)? {
        Ok((pivots, rest)) => (pivots, big(rest)),
        Err(Overflow) => match eliminate_units(big(rows.to_vec()), cols, limits.max_snf_entries, usize::MAX)? {
            Ok(done) => done,
            Err(Overflow) => unreachable!("big integers do not overflow"),
        },
    };
    let mut res = residual_snf(rest, cols, limits)?;
    res.invariant_factors.splice(0..0, std::iter::repeat(BigInt::one()).take(pivots));
    res.rank += pivots;
    Ok(res)
}

/// Rows left after unit elimination: usually of small rank but with large
/// entries, which suits the projection method; otherwise plain echelon.
fn residual_snf(rest: Vec<Row<BigInt>>, cols: usize, limits: &Limits) -> Result<SNFResult> {
    if rest.is_empty() {
        return Ok(SNFResult::new(Vec::new()));
    }
    if let Some(res) = low_rank_snf(&rest, limits)? {
        return Ok(res);
    }
    match run(rest, cols, limits)? {
        Ok(res) => Ok(res),
        Err(Overflow) => unreachable!("big integers do not overflow"),
    }
}
