//! Integer presentations of the four torsion-equivalent modules.
//!
//! Every presentation is a direct sum of blocks. A block is a truncated
//! monomial ring in a few coordinates `x_0, …, x_c`, each either cyclic
//! (`x^m = 1`, exponents `0..m`) or cyclotomic (`φ(x) = 0`, exponents
//! `0..m-1`). The variables `t_1, …, t_{n+1}` act on a block by multiplying
//! one coordinate by `x` or by `x^{-1}`. The quotient is by the submodule
//! generated by some rows `s`, which as a lattice is spanned by the `g·s` for
//! the basis monomials `g` of the acting ring.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexSet;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::echelon::{lattice_snf, SparseRow};
use super::snf::{IntegerMatrix, SNFResult};
use crate::combinatorics::{PairPartition, PartitionSet, ProblemInstance};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::polyring::{Generators, Monomial, Polynomial, QuotientContext};

/// Route (a) is only offered up to this ambient rank `m^{n+1}`.
pub const ROUTE_A_MAX_RANK: u64 = 4096;

/// Which module presents the torsion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    /// `R / (ψ_J | J ∈ K)`.
    A,
    /// `R̄ / (ρ_J | J ∈ K)`.
    B,
    /// `(⊕ R_J) / R·Σ τ_J 1_J`.
    C,
    /// `(⊕ R̄_J) / R̄·Σ 1_J`.
    D,
}

impl Route {
    pub const ALL: [Route; 4] = [Route::A, Route::B, Route::C, Route::D];
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Route::A => "a",
            Route::B => "b",
            Route::C => "c",
            Route::D => "d",
        };
        f.write_str(s)
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Route::A),
            "b" => Ok(Route::B),
            "c" => Ok(Route::C),
            "d" => Ok(Route::D),
            _ => Err(Error::InvalidArgument(format!("unknown route {s:?} (expected a, b, c or d)"))),
        }
    }
}

/// Label of a free-basis element: a block (the partition `J` for routes (c)
/// and (d)) and a standard monomial in `t_1, …, t_{n+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub partition: Option<PairPartition>,
    pub monomial: Monomial,
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.partition {
            Some(j) => write!(f, "[{j}] {}", self.monomial),
            None => write!(f, "{}", self.monomial),
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Layout {
    pub(super) m: u32,
    /// Cyclotomic (`φ = 0`) rather than cyclic coordinates.
    phi: bool,
    pub(super) num_vars: usize,
    /// Which `t_v` (1-based) each coordinate stands for, per block.
    coord_vars: Vec<usize>,
    /// For each `t_v` (index `v - 1`) and block: coordinate and whether the
    /// action is by the inverse.
    actions: Vec<Vec<(usize, bool)>>,
    blocks: Vec<Option<PairPartition>>,
}

impl Layout {
    fn radix(&self) -> u32 {
        if self.phi {
            self.m - 1
        } else {
            self.m
        }
    }

    fn block_size(&self) -> u64 {
        (self.radix() as u64).pow(self.coord_vars.len() as u32)
    }

    pub(super) fn columns(&self) -> u64 {
        self.block_size() * self.blocks.len() as u64
    }

    fn stride(&self, coord: usize) -> u32 {
        self.radix().pow(coord as u32)
    }

    /// Calls `emit(target, negated)` for each term of `t_var · e_col`.
    fn image(&self, col: u32, var: usize, mut emit: impl FnMut(u32, bool)) {
        let radix = self.radix();
        let block = (col / self.block_size() as u32) as usize;
        let (coord, inverse) = self.actions[var - 1][block];
        let stride = self.stride(coord);
        let digit = col / stride % radix;
        let base = col - digit * stride;
        let shifted = if inverse { (digit + self.m - 1) % self.m } else { (digit + 1) % self.m };
        if shifted < radix {
            emit(base + shifted * stride, false);
        } else {
            // x^{m-1} = -(1 + x + ⋯ + x^{m-2})
            for e in 0..radix {
                emit(base + e * stride, true);
            }
        }
    }

    /// `t_var · row`.
    pub(super) fn act(&self, row: &SparseRow, var: usize) -> SparseRow {
        let mut out: SparseRow = Vec::with_capacity(row.len() + 4);
        for &(col, x) in row {
            self.image(col, var, |t, neg| out.push((t, if neg { -x } else { x })));
        }
        normalize(out)
    }

    fn label(&self, col: u64) -> BasisLabel {
        let radix = self.radix() as u64;
        let block = (col / self.block_size()) as usize;
        let mut local = col % self.block_size();
        let mut exps = vec![0u32; self.num_vars];
        for &v in &self.coord_vars_of(block) {
            exps[v - 1] = (local % radix) as u32;
            local /= radix;
        }
        BasisLabel { partition: self.blocks[block].clone(), monomial: Monomial::new(exps) }
    }

    fn coord_vars_of(&self, block: usize) -> Vec<usize> {
        match &self.blocks[block] {
            Some(j) => j.k_indices().collect(),
            None => self.coord_vars.clone(),
        }
    }
}

fn normalize(mut row: SparseRow) -> SparseRow {
    row.sort_unstable_by_key(|e| e.0);
    let mut out: SparseRow = Vec::with_capacity(row.len());
    for (c, x) in row {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 += x,
            _ => out.push((c, x)),
        }
        if out.last().is_some_and(|e| e.1 == 0) {
            out.pop();
        }
    }
    out
}

/// A free `Z`-module with labelled basis and the generator rows of the
/// sublattice to divide out.
#[derive(Debug, Clone)]
pub struct ModulePresentation {
    route: Route,
    layout: Layout,
    rows: Vec<SparseRow>,
    translates: u64,
}

impl ModulePresentation {
    pub fn route(&self) -> Route {
        self.route
    }

    pub fn num_columns(&self) -> usize {
        self.layout.columns() as usize
    }

    /// Number of distinct generator rows.
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Number of basis monomials `g` multiplying each module generator:
    /// `m^{n+1}` over `R`, `(m-1)^{n+1}` over `R̄`. Coinciding rows are
    /// stored once.
    pub fn num_translates(&self) -> u64 {
        self.translates
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn label(&self, col: usize) -> BasisLabel {
        self.layout.label(col as u64)
    }

    pub fn labels(&self) -> impl Iterator<Item = BasisLabel> + '_ {
        (0..self.num_columns()).map(|c| self.label(c))
    }

    /// `t_var · row` in this module (`var` is 1-based).
    pub fn act(&self, row: &SparseRow, var: usize) -> SparseRow {
        self.layout.act(row, var)
    }

    /// Dense copy of the generator matrix.
    pub fn to_matrix(&self) -> Result<IntegerMatrix> {
        let mut m = IntegerMatrix::zeros(self.rows.len().max(1), self.num_columns())?;
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, x) in row {
                m.set(i, c as usize, x);
            }
        }
        Ok(m)
    }

    pub fn snf(&self, limits: &Limits) -> Result<SNFResult> {
        lattice_snf(&self.rows, self.num_columns(), limits)
    }
}

fn check_columns(cols: u64, limits: &Limits, what: &str) -> Result<()> {
    if cols > limits.max_snf_cols as u64 {
        return Err(Error::budget(
            "presentation",
            format!("{what} has {cols} basis elements, above {}", limits.max_snf_cols),
        ));
    }
    Ok(())
}

fn check_k(instance: &ProblemInstance, k: &PartitionSet) -> Result<()> {
    if k.n() != instance.n() {
        return Err(Error::InvalidArgument(format!("partition set does not match {instance}")));
    }
    Ok(())
}

/// The rows `g·s` for every start `s` and every basis monomial `g` of the
/// acting ring, without repeats. Those `g` have exponents below `m` for the
/// cyclic ring and below `m - 1` for the cyclotomic one; other monomials are
/// `Z`-combinations of them, so the rows span the generated submodule.
fn multiples(layout: &Layout, starts: Vec<SparseRow>, limits: &Limits) -> Result<Vec<SparseRow>> {
    let top = if layout.phi { layout.m - 2 } else { layout.m - 1 };
    let over = || {
        Error::budget(
            "presentation",
            format!("more than {} rows or {} entries", limits.max_snf_rows, limits.max_snf_entries),
        )
    };
    let mut layer: IndexSet<SparseRow> = starts.into_iter().filter(|r| !r.is_empty()).collect();
    for var in 1..=layout.num_vars {
        let mut next: IndexSet<SparseRow> = IndexSet::new();
        let mut entries = 0usize;
        for row in &layer {
            let mut cur = row.clone();
            for e in 0..=top {
                if e > 0 {
                    cur = layout.act(&cur, var);
                }
                if cur.is_empty() || next.contains(&cur) {
                    continue;
                }
                entries += cur.len();
                if next.len() >= limits.max_snf_rows || entries > limits.max_snf_entries {
                    return Err(over());
                }
                next.insert(cur.clone());
            }
        }
        layer = next;
    }
    Ok(layer.into_iter().collect())
}

fn poly_row(f: &Polynomial, ctx: &QuotientContext) -> Result<SparseRow> {
    let reduced = ctx.reduce(f);
    let row = reduced
        .terms()
        .map(|(mono, c)| {
            let col = ctx.index_of(mono).expect("reduced monomial") as u32;
            let x = c.to_i64().ok_or_else(|| Error::Inconsistent("generator coefficient out of range".into()))?;
            Ok((col, x))
        })
        .collect::<Result<SparseRow>>()?;
    Ok(normalize(row))
}

fn whole_ring_layout(instance: &ProblemInstance, phi: bool) -> Layout {
    let nv = instance.num_vars();
    Layout {
        m: instance.m() as u32,
        phi,
        num_vars: nv,
        coord_vars: (1..=nv).collect(),
        actions: (0..nv).map(|v| vec![(v, false)]).collect(),
        blocks: vec![None],
    }
}

fn per_partition_layout(instance: &ProblemInstance, k: &PartitionSet, phi: bool) -> Layout {
    let nv = instance.num_vars();
    let mut actions = vec![Vec::with_capacity(k.len()); nv];
    for j in k.iter() {
        for (nu, (a, b)) in j.pairs().enumerate() {
            actions[b - 1].push((nu, false));
            if nu > 0 {
                actions[a - 1].push((nu, true));
            }
        }
    }
    debug_assert!(actions.iter().all(|a| a.len() == k.len()));
    Layout {
        m: instance.m() as u32,
        phi,
        num_vars: nv,
        coord_vars: (0..=instance.d()).collect(),
        actions,
        blocks: k.iter().cloned().map(Some).collect(),
    }
}

fn translates(layout: &Layout) -> u64 {
    let per_var = if layout.phi { layout.m - 1 } else { layout.m };
    (per_var as u64).pow(layout.num_vars as u32)
}

/// Layout and module generators of a route, before any translates.
fn prepare(route: Route, instance: &ProblemInstance, k: &PartitionSet, limits: &Limits) -> Result<(Layout, Vec<SparseRow>)> {
    check_k(instance, k)?;
    let nvars = instance.num_vars();
    let m = instance.m() as u32;
    let from_polys = |ctx: QuotientContext, pick: fn(Generators) -> Polynomial| {
        k.iter().map(|j| poly_row(&pick(Generators::new(instance, j)?), &ctx)).collect::<Result<Vec<_>>>()
    };
    match route {
        Route::A => {
            let cols = instance.full_rank();
            if cols > ROUTE_A_MAX_RANK {
                return Err(Error::InvalidArgument(format!(
                    "route a needs m^(n+1) <= {ROUTE_A_MAX_RANK}, {instance} has {cols}"
                )));
            }
            check_columns(cols, limits, "R")?;
            Ok((whole_ring_layout(instance, false), from_polys(QuotientContext::cyclic(nvars, m), |g| g.psi)?))
        }
        Route::B => {
            check_columns(instance.reduced_rank(), limits, "R̄")?;
            Ok((whole_ring_layout(instance, true), from_polys(QuotientContext::phi(nvars, m), |g| g.rho)?))
        }
        Route::C => {
            let layout = per_partition_layout(instance, k, false);
            check_columns(layout.columns(), limits, "⊕ R_J")?;
            // τ_J = Π_ν (x_ν - 1): the coefficient of Π_{ν∈S} x_ν is (-1)^{d+1-|S|}.
            let coords = instance.d() + 1;
            let bsize = layout.block_size() as u32;
            let mut start = Vec::new();
            for block in 0..k.len() as u32 {
                for subset in 0u32..1 << coords {
                    let col = (0..coords).filter(|c| subset >> c & 1 == 1).map(|c| layout.stride(c)).sum::<u32>();
                    let sign = if (coords as u32 - subset.count_ones()) % 2 == 0 { 1 } else { -1 };
                    start.push((block * bsize + col, sign));
                }
            }
            Ok((layout, vec![normalize(start)]))
        }
        Route::D => {
            let layout = per_partition_layout(instance, k, true);
            check_columns(layout.columns(), limits, "⊕ R̄_J")?;
            let bsize = layout.block_size() as u32;
            let start: SparseRow = (0..k.len() as u32).map(|b| (b * bsize, 1)).collect();
            Ok((layout, vec![start]))
        }
    }
}

/// The presentation with every distinct basis-monomial multiple of the
/// module generators as a row.
pub fn present(route: Route, instance: &ProblemInstance, k: &PartitionSet, limits: &Limits) -> Result<ModulePresentation> {
    let (layout, starts) = prepare(route, instance, k, limits)?;
    let rows = multiples(&layout, starts, limits)?;
    let translates = translates(&layout);
    Ok(ModulePresentation { route, layout, rows, translates })
}

/// Route (a): `R / (ψ_J | J ∈ K)`, only for `m^{n+1} ≤ 4096`.
pub fn present_psi_quotient(instance: &ProblemInstance, k: &PartitionSet, limits: &Limits) -> Result<ModulePresentation> {
    present(Route::A, instance, k, limits)
}

/// Route (b): `R̄ / (ρ_J | J ∈ K)`.
pub fn present_rho_quotient(instance: &ProblemInstance, k: &PartitionSet, limits: &Limits) -> Result<ModulePresentation> {
    present(Route::B, instance, k, limits)
}

/// Route (c): `(⊕_{J∈K} R_J) / R·Σ τ_J 1_J`.
pub fn present_m_k(instance: &ProblemInstance, k: &PartitionSet, limits: &Limits) -> Result<ModulePresentation> {
    present(Route::C, instance, k, limits)
}

/// Route (d): `(⊕_{J∈K} R̄_J) / R̄·Σ 1_J`.
pub fn present_bar_m_k(instance: &ProblemInstance, k: &PartitionSet, limits: &Limits) -> Result<ModulePresentation> {
    present(Route::D, instance, k, limits)
}

/// Invariant factors of the chosen presentation.
pub fn invariant_factors(route: Route, instance: &ProblemInstance, k: &PartitionSet, limits: &Limits) -> Result<SNFResult> {
    present(route, instance, k, limits)?.snf(limits)
}

/// The torsion (factors > 1) through the chosen route.
pub fn torsion(route: Route, instance: &ProblemInstance, k: &PartitionSet, limits: &Limits) -> Result<Vec<BigInt>> {
    Ok(invariant_factors(route, instance, k, limits)?.torsion())
}

pub fn torsion_of_bar_m(instance: &ProblemInstance, k: &PartitionSet, limits: &Limits) -> Result<Vec<BigInt>> {
    torsion(Route::D, instance, k, limits)
}

pub fn torsion_of_rho_ideal(instance: &ProblemInstance, k: &PartitionSet, limits: &Limits) -> Result<Vec<BigInt>> {
    torsion(Route::B, instance, k, limits)
}

/// Checks that `A/(θ)` is torsion free for `A = Z[x_1..x_N]/(x_i^m - 1)` and
/// `θ = Π (x_i - 1)`, and that the annihilator of `θ` is the ideal generated
/// by the `φ(x_i)`.
///
/// The annihilator is the kernel of multiplication by `θ`, a saturated
/// lattice of rank `m^N - rank(θ A)`. The `φ(x_i)`-ideal lies inside it, so
/// the two agree exactly when the ideal is saturated and has that rank.
pub fn lemma_a_check(num_vars: usize, m: usize, limits: &Limits) -> Result<bool> {
    if num_vars == 0 || m < 2 {
        return Err(Error::InvalidArgument(format!("need N >= 1 and m >= 2, got N={num_vars}, m={m}")));
    }
    let cols = (m as u64).checked_pow(num_vars as u32).unwrap_or(u64::MAX);
    check_columns(cols, limits, "A")?;
    let layout = Layout {
        m: m as u32,
        phi: false,
        num_vars,
        coord_vars: (1..=num_vars).collect(),
        actions: (0..num_vars).map(|v| vec![(v, false)]).collect(),
        blocks: vec![None],
    };
    let stride = |v: usize| (m as u32).pow(v as u32);
    let times_theta = |row: &SparseRow| {
        (1..=num_vars).fold(row.clone(), |acc, v| {
            let mut both = layout.act(&acc, v);
            both.extend(acc.iter().map(|&(c, x)| (c, -x)));
            normalize(both)
        })
    };
    let theta = times_theta(&vec![(0, 1)]);
    let image = multiples(&layout, vec![theta], limits)?;
    let image_snf = lattice_snf(&image, cols as usize, limits)?;

    let phis: Vec<SparseRow> = (0..num_vars).map(|v| (0..m as u32).map(|e| (e * stride(v), 1)).collect()).collect();
    let ideal = multiples(&layout, phis, limits)?;
    if ideal.iter().any(|row| !times_theta(row).is_empty()) {
        return Ok(false);
    }
    let ideal_snf = lattice_snf(&ideal, cols as usize, limits)?;
    Ok(image_snf.is_torsion_free()
        && ideal_snf.is_torsion_free()
        && ideal_snf.rank + image_snf.rank == cols as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::snf::smith_normal_form;
    use crate::combinatorics::gamma_count;
    use std::collections::HashSet;

    fn inst(n: usize, m: usize) -> ProblemInstance {
        ProblemInstance::new(n, m).unwrap()
    }

    fn starts(route: Route, i: &ProblemInstance, k: &PartitionSet, p: &ModulePresentation) -> Vec<SparseRow> {
        match route {
            Route::A | Route::B => {
                let m = i.m() as u32;
                let ctx = if route == Route::A { QuotientContext::cyclic(i.num_vars(), m) } else { QuotientContext::phi(i.num_vars(), m) };
                k.iter()
                    .map(|j| {
                        let g = Generators::new(i, j).unwrap();
                        poly_row(if route == Route::A { &g.psi } else { &g.rho }, &ctx).unwrap()
                    })
                    .collect()
            }
            _ => vec![p.rows()[0].clone()],
        }
    }

    /// Every `t^e·s` with `0 <= e_v < per_var`, built by repeated action.
    fn literal_translates(p: &ModulePresentation, starts: &[SparseRow], per_var: usize, nvars: usize) -> Vec<SparseRow> {
        let mut out = Vec::new();
        for s in starts {
            let mut layer = vec![s.clone()];
            for v in 1..=nvars {
                let mut next = Vec::new();
                for row in &layer {
                    let mut cur = row.clone();
                    for _ in 0..per_var {
                        next.push(cur.clone());
                        cur = p.act(&cur, v);
                    }
                }
                layer = next;
            }
            assert_eq!(layer.len(), per_var.pow(nvars as u32));
            out.extend(layer);
        }
        out
    }

    fn dense(rows: &[SparseRow], cols: usize) -> IntegerMatrix {
        let mut m = IntegerMatrix::zeros(rows.len(), cols).unwrap();
        for (i, row) in rows.iter().enumerate() {
            for &(c, x) in row {
                m.set(i, c as usize, x);
            }
        }
        m
    }

    #[test]
    fn rows_are_basis_multiples() {
        let lim = Limits::default();
        for (n, m) in [(2, 3), (2, 4), (4, 3)] {
            let i = inst(n, m);
            let all = PartitionSet::all(&i);
            for route in [Route::B, Route::C, Route::D] {
                let p = present(route, &i, &all, &lim).unwrap();
                let per_var = if matches!(route, Route::B | Route::D) { m - 1 } else { m };
                let expected: HashSet<SparseRow> =
                    literal_translates(&p, &starts(route, &i, &all, &p), per_var, i.num_vars())
                        .into_iter()
                        .filter(|r| !r.is_empty())
                        .collect();
                let got: HashSet<SparseRow> = p.rows().iter().cloned().collect();
                assert_eq!(got, expected, "route {route} at {i}");
            }
        }
    }

    // Multiplying by every monomial with exponents below m, not only the
    // basis monomials, must not change the lattice.
    #[test]
    fn basis_multiples_span_all_translates() {
        let lim = Limits::default();
        for (n, m) in [(0, 5), (2, 3), (2, 4), (2, 5), (4, 3)] {
            let i = inst(n, m);
            for k in [PartitionSet::all(&i), PartitionSet::standard(&i)] {
                for route in Route::ALL {
                    if route == Route::A && i.full_rank() > 300 {
                        continue;
                    }
                    let p = present(route, &i, &k, &lim).unwrap();
                    let all = literal_translates(&p, &starts(route, &i, &k, &p), m, i.num_vars());
                    let oracle = smith_normal_form(&dense(&all, p.num_columns()));
                    assert_eq!(invariant_factors(route, &i, &k, &lim).unwrap(), oracle, "route {route} at {i}");
                }
            }
        }
    }

    #[test]
    fn bar_module_shapes() {
        let lim = Limits::default();
        let p = present_bar_m_k(&inst(2, 3), &PartitionSet::all(&inst(2, 3)), &lim).unwrap();
        assert_eq!(p.num_columns(), 12);
        assert_eq!(p.num_translates(), 8);
        assert!(p.num_rows() <= 8);
        let p = present_bar_m_k(&inst(4, 3), &PartitionSet::all(&inst(4, 3)), &lim).unwrap();
        assert_eq!(p.num_columns(), 120);
        assert_eq!(p.num_translates(), 32);
        for m in 3..7 {
            let i = inst(0, m);
            let p = present_bar_m_k(&i, &PartitionSet::all(&i), &lim).unwrap();
            assert_eq!(p.num_columns(), m - 1);
            assert_eq!(p.num_translates(), m as u64 - 1);
            assert!(torsion_of_bar_m(&i, &PartitionSet::all(&i), &lim).unwrap().is_empty());
        }
    }

    #[test]
    fn labels_are_unique() {
        let i = inst(2, 4);
        let all = PartitionSet::all(&i);
        for route in Route::ALL {
            let p = present(route, &i, &all, &Limits::default()).unwrap();
            let labels: HashSet<String> = p.labels().map(|l| l.to_string()).collect();
            assert_eq!(labels.len(), p.num_columns(), "route {route}");
        }
        let p = present_bar_m_k(&i, &all, &Limits::default()).unwrap();
        assert_eq!(p.label(0).to_string(), "[0-1,2-3] 1");
    }

    #[test]
    fn surface_torsion_is_empty() {
        let lim = Limits::default();
        for m in 3..6 {
            let i = inst(2, m);
            let all = PartitionSet::all(&i);
            for route in Route::ALL {
                assert!(torsion(route, &i, &all, &lim).unwrap().is_empty(), "route {route}, m {m}");
            }
        }
        let i = inst(2, 3);
        let single = PartitionSet::new(2, vec![PairPartition::new(2, [(0, 1), (2, 3)]).unwrap()]).unwrap();
        assert!(torsion_of_rho_ideal(&i, &single, &lim).unwrap().is_empty());
    }

    #[test]
    fn rho_ideal_rank_is_gamma() {
        let lim = Limits::default();
        for (n, m) in [(2, 3), (2, 4), (2, 6), (4, 3)] {
            let i = inst(n, m);
            for k in [PartitionSet::all(&i), PartitionSet::standard(&i)] {
                let snf = invariant_factors(Route::B, &i, &k, &lim).unwrap();
                assert_eq!(snf.rank as u64, gamma_count(&i, &k).unwrap());
            }
        }
    }

    #[test]
    fn route_a_is_gated() {
        let i = inst(4, 6);
        let err = present_psi_quotient(&i, &PartitionSet::standard(&i), &Limits::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn column_budget() {
        let i = inst(6, 8);
        let err = present_rho_quotient(&i, &PartitionSet::standard(&i), &Limits::default()).unwrap_err();
        assert!(err.is_resource_limit());
    }

    #[test]
    fn theta_quotient() {
        let lim = Limits::default();
        assert!(lemma_a_check(1, 3, &lim).unwrap());
        assert!(lemma_a_check(2, 3, &lim).unwrap());
        assert!(lemma_a_check(2, 4, &lim).unwrap());
        assert!(lemma_a_check(0, 3, &lim).is_err());
    }

    #[test]
    fn route_parsing() {
        for r in Route::ALL {
            assert_eq!(r.to_string().parse::<Route>().unwrap(), r);
        }
        assert!("e".parse::<Route>().is_err());
    }
}
