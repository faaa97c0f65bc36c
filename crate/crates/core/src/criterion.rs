//! The primitivity verdict: `L_K(X)` is primitive exactly when
//! `d_0 = d_p` for every prime `p | m`, where `d_0` and `d_p` are the
//! dimensions of `B_K` over `C` and over `F_p`.
//!
//! `d_0` comes from the point count, `d_0 = (m-1)^{n+1} - |Γ_K|`, so it never
//! depends on the `F_p` engines. Torsion of a presentation can be attached as
//! independent evidence.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::combinatorics::{gamma_count_with, PartitionSet, ProblemInstance};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::groebner::{dim_bk_linear_oracle, dim_bk_mod_p};
use crate::limits::Limits;
use crate::zlattice::{torsion, Route};

/// Above this ambient dimension `(m-1)^{n+1}` the automatic engine choice is
/// Buchberger rather than dense linear algebra.
pub const LINEAR_DEFAULT_MAX_DIM: u64 = 200_000;

/// Distinct prime divisors of `m`, ascending.
pub fn prime_divisors(m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = m;
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            out.push(p);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > 1 {
        out.push(rest);
    }
    out
}

/// How `d_p` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Groebner,
    Linear,
    /// Both, which must agree.
    Both,
}

impl Engine {
    /// Linear algebra while the ambient space is small, Buchberger beyond.
    pub fn default_for(instance: &ProblemInstance) -> Engine {
        if instance.reduced_rank() <= LINEAR_DEFAULT_MAX_DIM {
            Engine::Linear
        } else {
            Engine::Groebner
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Groebner => "groebner",
            Engine::Linear => "linear",
            Engine::Both => "both",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "groebner" => Ok(Engine::Groebner),
            "linear" => Ok(Engine::Linear),
            "both" => Ok(Engine::Both),
            _ => Err(Error::InvalidArgument(format!("unknown engine {s:?} (expected groebner, linear or both)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    /// `None` picks [`Engine::default_for`] the instance.
    pub engine: Option<Engine>,
    /// Route for torsion evidence, if any.
    pub snf: Option<Route>,
    pub limits: Limits,
    pub exec: Exec,
}

impl Default for Options {
    fn default() -> Self {
        Options { engine: None, snf: None, limits: Limits::default(), exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Primitive,
    TorsionDetected,
    /// A budget ran out in `stage`; nothing is claimed.
    Inconclusive { stage: String, reason: String },
}

impl Verdict {
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Primitive => f.write_str("PRIMITIVE"),
            Verdict::TorsionDetected => f.write_str("TORSION_DETECTED"),
            Verdict::Inconclusive { .. } => f.write_str("INCONCLUSIVE"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitivityReport {
    pub n: usize,
    pub m: usize,
    pub k: PartitionSet,
    /// `|Γ_K|`.
    pub gamma: u64,
    /// Rank of `L_K(X)`, `|Γ_K| + 1`.
    pub rank: u64,
    /// `dim_C B_K = (m-1)^{n+1} - |Γ_K|`.
    pub d0: u64,
    /// `dim_{F_p} B_K` for each prime `p | m` that was computed.
    pub dp: BTreeMap<u64, u64>,
    pub verdict: Verdict,
    /// Torsion of the chosen presentation, when requested and computed.
    pub torsion_factors: Option<Vec<BigInt>>,
    /// Route the torsion came from.
    pub route: Option<Route>,
    pub engine: Engine,
    /// Wall-clock time per stage.
    pub timings: BTreeMap<&'static str, Duration>,
}

impl PrimitivityReport {
    /// `(m-1)^{n+1}`, the dimension of `R̄ ⊗ F`.
    pub fn ambient(&self) -> u64 {
        self.d0 + self.gamma
    }
}

fn timed<T>(timings: &mut BTreeMap<&'static str, Duration>, stage: &'static str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *timings.entry(stage).or_default() += start.elapsed();
    out
}

/// The verdict for known dimensions: primitive exactly when every `d_p`
/// equals `d_0`.
pub fn verdict_from(d0: u64, dp: &BTreeMap<u64, u64>) -> Verdict {
    if dp.values().all(|&d| d == d0) {
        Verdict::Primitive
    } else {
        Verdict::TorsionDetected
    }
}

/// `d_p` by the chosen engine; with [`Engine::Both`] a disagreement is an
/// error.
fn dimension(instance: &ProblemInstance, k: &PartitionSet, p: u64, engine: Engine, opts: &Options) -> Result<u64> {
    let groebner = || dim_bk_mod_p(instance, k, p, &opts.limits);
    let linear = || dim_bk_linear_oracle(instance, k, p, &opts.limits, opts.exec);
    match engine {
        Engine::Groebner => groebner(),
        Engine::Linear => linear(),
        Engine::Both => {
            let (g, l) = (groebner()?, linear()?);
            if g != l {
                return Err(Error::Inconsistent(format!(
                    "d_{p} of {instance}: groebner gives {g}, linear algebra gives {l}"
                )));
            }
            Ok(g)
        }
    }
}

fn inconclusive(err: Error) -> Result<Verdict> {
    match err {
        Error::ResourceLimit { stage, detail } => Ok(Verdict::Inconclusive { stage, reason: detail }),
        other => Err(other),
    }
}

/// Whether every prime factor of `x` divides `m`.
fn supported_on(x: &BigInt, m: usize) -> bool {
    let mut rest = x.clone();
    for p in prime_divisors(m as u64) {
        let p = BigInt::from(p);
        while rest.is_multiple_of(&p) && !rest.is_one() {
            rest /= &p;
        }
    }
    rest.is_one()
}

/// Runs the `d_0` versus `d_p` criterion for `K`.
///
/// Budget exhaustion in any stage yields [`Verdict::Inconclusive`] naming the
/// stage. Contradictions between independent computations (the two engines,
/// `d_p < d_0`, or torsion that disagrees with the verdict) are errors.
pub fn primitivity_check(instance: &ProblemInstance, k: &PartitionSet, opts: &Options) -> Result<PrimitivityReport> {
    if k.n() != instance.n() {
        return Err(Error::InvalidArgument(format!("partition set does not match {instance}")));
    }
    let engine = opts.engine.unwrap_or_else(|| Engine::default_for(instance));
    let mut timings = BTreeMap::new();
    let gamma = timed(&mut timings, "gamma", || gamma_count_with(instance, k, opts.exec))?;
    let d0 = instance.reduced_rank() - gamma;
    let mut report = PrimitivityReport {
        n: instance.n(),
        m: instance.m(),
        k: k.clone(),
        gamma,
        rank: gamma + 1,
        d0,
        dp: BTreeMap::new(),
        verdict: Verdict::Primitive,
        torsion_factors: None,
        route: opts.snf,
        engine,
        timings: BTreeMap::new(),
    };

    for p in prime_divisors(instance.m() as u64) {
        match timed(&mut timings, "dp", || dimension(instance, k, p, engine, opts)) {
            Ok(dp) => {
                if dp < d0 {
                    return Err(Error::Inconsistent(format!("d_{p} = {dp} below d_0 = {d0} for {instance}")));
                }
                report.dp.insert(p, dp);
            }
            Err(e) => {
                report.verdict = inconclusive(e)?;
                report.timings = timings;
                return Ok(report);
            }
        }
    }
    report.verdict = verdict_from(d0, &report.dp);

    if let Some(route) = opts.snf {
        match timed(&mut timings, "snf", || torsion(route, instance, k, &opts.limits)) {
            Ok(factors) => {
                if factors.is_empty() != (report.verdict == Verdict::Primitive) {
                    return Err(Error::Inconsistent(format!(
                        "route {route} torsion {factors:?} contradicts verdict {} for {instance}",
                        report.verdict
                    )));
                }
                if let Some(x) = factors.iter().find(|x| !supported_on(x, instance.m())) {
                    return Err(Error::Inconsistent(format!("invariant factor {x} has a prime not dividing m")));
                }
                report.torsion_factors = Some(factors);
            }
            Err(e) => report.verdict = inconclusive(e)?,
        }
    }
    report.timings = timings;
    Ok(report)
}

/// [`primitivity_check`] with `K` the set of all pair-partitions at every
/// grid point `(n, m)`. Instances run concurrently under `opts.exec`; each
/// result depends only on its own instance.
pub fn conjecture_scan(grid: &[(usize, usize)], opts: &Options) -> Vec<Result<PrimitivityReport>> {
    opts.exec.map(grid.to_vec(), |(n, m)| {
        let instance = ProblemInstance::new(n, m)?;
        primitivity_check(&instance, &PartitionSet::all(&instance), opts)
    })
}

/// `n:m` or `n:m1-m2` items separated by commas, e.g. `2:3-10,4:3`.
pub fn parse_grid(s: &str) -> Result<Vec<(usize, usize)>> {
    let bad = |why: &str| Error::InvalidArgument(format!("grid {s:?}: {why}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad(&format!("{t:?} is not a number")));
    let mut out = Vec::new();
    for item in s.split(',').filter(|t| !t.trim().is_empty()) {
        let (n, ms) = item.split_once(':').ok_or_else(|| bad("expected n:m or n:m1-m2"))?;
        let n = num(n)?;
        let (lo, hi) = match ms.split_once('-') {
            Some((a, b)) => (num(a)?, num(b)?),
            None => (num(ms)?, num(ms)?),
        };
        if lo > hi {
            return Err(bad("empty range"));
        }
        out.extend((lo..=hi).map(|m| (n, m)));
    }
    if out.is_empty() {
        return Err(bad("no instances"));
    }
    Ok(out)
}
