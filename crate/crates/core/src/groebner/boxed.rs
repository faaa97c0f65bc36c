//! Buchberger with dense accumulators over a fixed exponent box.
//!
//! If every variable `t_i` has a univariate generator `P_i` of degree `b_i`,
//! every normal form has exponents in the base box `∏ [0, b_i)`. Products of
//! two base-box monomials stay below `2b_i - 1` in each coordinate, so all
//! monomials met during reduction fit in an enlarged box indexed in mixed
//! radix, where multiplying monomials is adding indices. A precomputed table
//! maps indices to grevlex ranks, and the accumulator is an array over ranks
//! with a two-level bitmap to find the current leading term.

use super::pairs::PairQueue;
use super::sparse::Terms;
use crate::error::{Error, Result};
use crate::fp::inv_mod;
use crate::limits::Limits;
use crate::polyring::Monomial;

/// Enlarged boxes beyond this many cells fall back to the sparse kernel.
const MAX_CELLS: usize = 1 << 25;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub(super) struct BoxLayout {
    bounds: Vec<u32>,
    radix: Vec<u32>,
    stride: Vec<u32>,
    cells: usize,
    /// Input position of the chosen univariate generator of each variable.
    pure_inputs: Vec<usize>,
}

impl BoxLayout {
    pub fn detect(inputs: &[Terms], nvars: usize) -> Option<BoxLayout> {
        let mut pure_inputs = vec![None::<(usize, u32)>; nvars];
        for (pos, f) in inputs.iter().enumerate() {
            let Some((lm, _)) = f.first() else { continue };
            let e = lm.exponents();
            let Some(var) = e.iter().position(|&x| x > 0) else { continue };
            let univariate = f
                .iter()
                .all(|(m, _)| m.exponents().iter().enumerate().all(|(i, &x)| i == var || x == 0));
            if univariate && pure_inputs[var].map_or(true, |(_, d)| e[var] < d) {
                pure_inputs[var] = Some((pos, e[var]));
            }
        }
        let chosen: Vec<(usize, u32)> = pure_inputs.into_iter().collect::<Option<_>>()?;
        let bounds: Vec<u32> = chosen.iter().map(|&(_, d)| d).collect();
        let radix: Vec<u32> = bounds.iter().map(|&b| (2 * b - 1).max(b + 1)).collect();
        let mut stride = Vec::with_capacity(nvars);
        let mut cells = 1usize;
        for &r in &radix {
            stride.push(cells as u32);
            cells = cells.checked_mul(r as usize).filter(|&c| c <= MAX_CELLS)?;
        }
        let fits = inputs.iter().flatten().all(|(m, _)| m.exponents().iter().zip(&radix).all(|(e, r)| e < r));
        fits.then(|| BoxLayout {
            bounds,
            radix,
            stride,
            cells,
            pure_inputs: chosen.into_iter().map(|(pos, _)| pos).collect(),
        })
    }

    fn index(&self, m: &Monomial) -> u32 {
        m.exponents().iter().zip(&self.stride).map(|(&e, &s)| e * s).sum()
    }

    fn digits(&self, mut idx: u32) -> Vec<u32> {
        self.radix
            .iter()
            .map(|&r| {
                let d = idx % r;
                idx /= r;
                d
            })
            .collect()
    }

    fn monomial(&self, idx: u32) -> Monomial {
        Monomial::new(self.digits(idx))
    }
}

/// Accumulator indexed by grevlex rank with a two-level occupancy bitmap.
struct Accumulator {
    coef: Vec<u32>,
    low: Vec<u64>,
    high: Vec<u64>,
    top: usize,
}

impl Accumulator {
    fn new(cells: usize) -> Self {
        let low_words = cells.div_ceil(64);
        Accumulator {
            coef: vec![0; cells],
            low: vec![0; low_words],
            high: vec![0; low_words.div_ceil(64)],
            top: 0,
        }
    }

    #[inline]
    fn add(&mut self, rank: u32, c: u32, p: u32) {
        let r = rank as usize;
        let v = self.coef[r] + c;
        self.coef[r] = if v >= p { v - p } else { v };
        let w = r / 64;
        self.low[w] |= 1 << (r % 64);
        self.high[w / 64] |= 1 << (w % 64);
        self.top = self.top.max(w / 64 + 1);
    }

    /// Removes and returns the highest occupied rank with a nonzero coefficient.
    fn pop_max(&mut self) -> Option<(u32, u32)> {
        while self.top > 0 {
            let hw = self.top - 1;
            let h = self.high[hw];
            if h == 0 {
                self.top -= 1;
                continue;
            }
            let w = hw * 64 + 63 - h.leading_zeros() as usize;
            let bits = self.low[w];
            let b = 63 - bits.leading_zeros() as usize;
            self.low[w] &= !(1 << b);
            if self.low[w] == 0 {
                self.high[hw] &= !(1 << (w % 64));
            }
            let r = w * 64 + b;
            let c = std::mem::take(&mut self.coef[r]);
            if c != 0 {
                return Some((r as u32, c));
            }
        }
        None
    }
}

struct Element {
    /// `(index, coefficient)` by descending rank; the first term is monic.
    terms: Vec<(u32, u32)>,
}

struct BoxEngine {
    layout: BoxLayout,
    p: u32,
    rank_of: Vec<u32>,
    index_of_rank: Vec<u32>,
    /// Basis element whose leading monomial divides the monomial at an index.
    reducer: Vec<u32>,
    elements: Vec<Element>,
    acc: Accumulator,
}

impl BoxEngine {
    fn new(layout: BoxLayout, p: u32) -> Self {
        let n = layout.radix.len();
        let cells = layout.cells;
        // Grevlex key: total degree, then exponents of t_1, t_2, … read as a
        // number with reversed digits, so smaller exponents rank higher.
        let mut weight = vec![1u64; n];
        for i in (0..n.saturating_sub(1)).rev() {
            weight[i] = weight[i + 1] * layout.radix[i + 1] as u64;
        }
        let keys: Vec<u64> = (0..cells as u32)
            .map(|idx| {
                let d = layout.digits(idx);
                let deg: u64 = d.iter().map(|&x| x as u64).sum();
                let rev: u64 = (0..n).map(|i| (layout.radix[i] - 1 - d[i]) as u64 * weight[i]).sum();
                deg * cells as u64 + rev
            })
            .collect();
        let mut order: Vec<u32> = (0..cells as u32).collect();
        order.sort_unstable_by_key(|&idx| keys[idx as usize]);
        drop(keys);
        let mut rank_of = vec![0u32; cells];
        for (rank, &idx) in order.iter().enumerate() {
            rank_of[idx as usize] = rank as u32;
        }
        // Outside the base box, reduce by the univariate generator of the
        // first oversized coordinate; these are elements 0..n.
        let mut reducer = vec![NONE; cells];
        for (idx, slot) in reducer.iter_mut().enumerate() {
            let d = layout.digits(idx as u32);
            if let Some(var) = (0..n).find(|&i| d[i] >= layout.bounds[i]) {
                *slot = var as u32;
            }
        }
        BoxEngine {
            acc: Accumulator::new(cells),
            layout,
            p,
            rank_of,
            index_of_rank: order,
            reducer,
            elements: Vec::new(),
        }
    }

    fn load(&mut self, terms: &[(u32, u32)], shift: u32, scale: u32) {
        let p = self.p as u64;
        for &(idx, c) in terms {
            let rank = self.rank_of[(idx + shift) as usize];
            self.acc.add(rank, (c as u64 * scale as u64 % p) as u32, self.p);
        }
    }

    /// Drains the accumulator into its normal form, without rescaling.
    fn drain(&mut self) -> Vec<(u32, u32)> {
        let p = self.p;
        let mut out = Vec::new();
        while let Some((rank, c)) = self.acc.pop_max() {
            let idx = self.index_of_rank[rank as usize];
            let g = self.reducer[idx as usize];
            if g == NONE {
                out.push((idx, c));
                continue;
            }
            let g = &self.elements[g as usize];
            let shift = idx - g.terms[0].0;
            let scale = (p - c) as u64;
            for &(ti, tc) in &g.terms[1..] {
                let rank = self.rank_of[(ti + shift) as usize];
                self.acc.add(rank, (scale * tc as u64 % p as u64) as u32, p);
            }
        }
        out
    }

    fn drain_monic(&mut self) -> Vec<(u32, u32)> {
        let p = self.p as u64;
        let mut out = self.drain();
        if let Some(&(_, lead)) = out.first() {
            let inv = inv_mod(lead as u64, p);
            for (_, c) in out.iter_mut() {
                *c = (*c as u64 * inv % p) as u32;
            }
        }
        out
    }

    fn to_indexed(&self, f: &Terms) -> Vec<(u32, u32)> {
        f.iter().map(|(m, c)| (self.layout.index(m), *c)).collect()
    }

    /// Appends an element and marks the base-box multiples of its leading
    /// monomial as reducible by it.
    fn push(&mut self, terms: Vec<(u32, u32)>) -> u32 {
        let h = self.elements.len() as u32;
        let lead = self.layout.digits(terms[0].0);
        let bounds = &self.layout.bounds;
        if lead.iter().zip(bounds).all(|(e, b)| e < b) {
            let n = lead.len();
            let mut cur = lead.clone();
            'odometer: loop {
                let idx: u32 = cur.iter().zip(&self.layout.stride).map(|(&e, &s)| e * s).sum();
                let slot = &mut self.reducer[idx as usize];
                if *slot == NONE {
                    *slot = h;
                }
                for i in 0..n {
                    cur[i] += 1;
                    if cur[i] < bounds[i] {
                        continue 'odometer;
                    }
                    cur[i] = lead[i];
                }
                break;
            }
        }
        self.elements.push(Element { terms });
        h
    }

    fn lm(&self, h: usize) -> Monomial {
        self.layout.monomial(self.elements[h].terms[0].0)
    }
}

pub(super) fn run(layout: BoxLayout, inputs: Vec<Terms>, p: u32, limits: &Limits) -> Result<Vec<Terms>> {
    let pure_inputs = layout.pure_inputs.clone();
    let mut engine = BoxEngine::new(layout, p);
    let mut queue = PairQueue::new();

    let add = |engine: &mut BoxEngine, queue: &mut PairQueue, terms: Vec<(u32, u32)>| -> Result<()> {
        if engine.elements.len() >= limits.max_basis {
            return Err(Error::budget("buchberger", format!("basis exceeded {} elements", limits.max_basis)));
        }
        let h = engine.push(terms);
        let lm = engine.lm(h as usize);
        let q = queue.add(lm);
        debug_assert_eq!(q as u32, h);
        Ok(())
    };

    // The univariate generators go in first and unreduced: nothing else can
    // reduce them yet, and the reducer table already points at them.
    for &pos in &pure_inputs {
        let mut terms = engine.to_indexed(&inputs[pos]);
        let inv = inv_mod(terms[0].1 as u64, p as u64);
        for (_, c) in terms.iter_mut() {
            *c = (*c as u64 * inv % p as u64) as u32;
        }
        add(&mut engine, &mut queue, terms)?;
    }
    for (pos, f) in inputs.iter().enumerate() {
        if pure_inputs.contains(&pos) {
            continue;
        }
        let terms = engine.to_indexed(f);
        engine.load(&terms, 0, 1);
        let nf = engine.drain_monic();
        if !nf.is_empty() {
            add(&mut engine, &mut queue, nf)?;
        }
    }

    let mut processed = 0u64;
    while let Some(pair) = queue.pop() {
        processed += 1;
        if processed > limits.max_spairs {
            return Err(Error::budget("buchberger", format!("more than {} S-pairs", limits.max_spairs)));
        }
        let lcm = engine.layout.index(&pair.lcm);
        let f = std::mem::take(&mut engine.elements[pair.newer].terms);
        engine.load(&f, lcm - f[0].0, 1);
        engine.elements[pair.newer].terms = f;
        let g = std::mem::take(&mut engine.elements[pair.older].terms);
        engine.load(&g, lcm - g[0].0, p - 1);
        engine.elements[pair.older].terms = g;
        let nf = engine.drain_monic();
        if !nf.is_empty() {
            add(&mut engine, &mut queue, nf)?;
        }
    }

    let active: Vec<usize> = queue.active_indices().collect();
    let mut out = Vec::with_capacity(active.len());
    for h in active {
        let terms = std::mem::take(&mut engine.elements[h].terms);
        engine.load(&terms[1..], 0, 1);
        let mut tail = engine.drain();
        let mut full = vec![terms[0]];
        full.append(&mut tail);
        engine.elements[h].terms = terms;
        out.push(full.into_iter().map(|(idx, c)| (engine.layout.monomial(idx), c)).collect());
    }
    Ok(out)
}
