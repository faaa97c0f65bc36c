//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! The process fails only when a computed value is wrong. A criterion whose
//! checks could not all be run is still printed as FAIL, with the missing
//! pieces listed. Set `FERMAT_EXTENDED=1` for the slow instances and the
//! (4, 9..12) stretch grid.

use std::collections::BTreeMap;
use std::time::Instant;

use fermat_core::combinatorics::{enumerate_partitions, gamma_closed_form, gamma_constant_term, gamma_count};
use fermat_core::criterion::{prime_divisors, primitivity_check, verdict_from, Engine, Options, Verdict};
use fermat_core::groebner::{buchberger, phi_generators, quotient_dimension, QuotientDim};
use fermat_core::polyring::{verify_phirho_identity, verify_psi_lambda_rho};
use fermat_core::zlattice::{lemma_a_check, torsion, Route, ROUTE_A_MAX_RANK};
use fermat_core::{Limits, PartitionSet, ProblemInstance};
use num_bigint::BigInt;

#[derive(Default)]
struct Outcome {
    wrong: Vec<String>,
    missing: Vec<String>,
    checks: usize,
}

impl Outcome {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.wrong.push(what());
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Which {
    All,
    Standard,
}

type Torsion = Result<Vec<BigInt>, String>;

struct Run {
    extended: bool,
    /// Torsion per instance, partition set and route, shared with criterion 6.
    snf: BTreeMap<(usize, usize, Which), BTreeMap<Route, Torsion>>,
    /// `d_p` from both engines per instance, shared with criterion 6.
    engines: Vec<String>,
    dp_below_d0: Vec<String>,
    skipped_snf: Vec<String>,
    failed: bool,
}

fn kset(inst: &ProblemInstance, which: Which) -> PartitionSet {
    match which {
        Which::All => PartitionSet::all(inst),
        Which::Standard => PartitionSet::standard(inst),
    }
}

fn both() -> Options {
    Options { engine: Some(Engine::Both), ..Options::default() }
}

impl Run {
    /// Routes b and d, plus a where it is offered.
    fn routes(&mut self, n: usize, m: usize, which: Which) -> &BTreeMap<Route, Torsion> {
        let inst = ProblemInstance::new(n, m).unwrap();
        let k = kset(&inst, which);
        self.snf.entry((n, m, which)).or_insert_with(|| {
            let mut routes = vec![Route::B, Route::D];
            if inst.full_rank() <= ROUTE_A_MAX_RANK {
                routes.push(Route::A);
            }
            routes
                .into_iter()
                .map(|r| (r, torsion(r, &inst, &k, &Limits::extended()).map_err(|e| e.to_string())))
                .collect()
        })
    }

    /// Verdict with both engines; records engine agreement and `d_p >= d_0`.
    fn verdict(&mut self, out: &mut Outcome, n: usize, m: usize, which: Which, opts: &Options) -> Option<(u64, u64, Verdict)> {
        let inst = ProblemInstance::new(n, m).unwrap();
        match primitivity_check(&inst, &kset(&inst, which), opts) {
            Ok(r) => {
                if r.dp.values().any(|&d| d < r.d0) {
                    self.dp_below_d0.push(format!("({n},{m})"));
                }
                if let Verdict::Inconclusive { stage, reason } = &r.verdict {
                    out.missing.push(format!("({n},{m}) inconclusive in {stage}: {reason}"));
                    return None;
                }
                self.engines.push(format!("({n},{m})"));
                out.check(r.dp.values().all(|&d| d == r.d0), || format!("({n},{m}) d_p {:?} vs d_0 {}", r.dp, r.d0));
                Some((r.gamma, r.rank, r.verdict))
            }
            // Engine disagreement and d_p < d_0 surface here as errors.
            Err(e) => {
                out.check(false, || format!("({n},{m}): {e}"));
                None
            }
        }
    }

    fn torsion_free(&mut self, out: &mut Outcome, n: usize, m: usize, which: Which, routes: &[Route]) {
        for (r, t) in self.routes(n, m, which).clone() {
            if !routes.contains(&r) {
                continue;
            }
            match t {
                Ok(f) => out.check(f.is_empty(), || format!("({n},{m}) route {r} torsion {f:?}")),
                Err(e) => out.missing.push(format!("({n},{m}) route {r}: {e}")),
            }
        }
    }

    fn report(&mut self, number: usize, title: &str, out: Outcome, start: Instant) {
        let status = if out.wrong.is_empty() && out.missing.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {number} {status}  {title}: {} checks ({:.1?})", out.checks, start.elapsed());
        if !out.wrong.is_empty() {
            line += &format!("; wrong: {}", out.wrong.join("; "));
            self.failed = true;
        }
        if !out.missing.is_empty() {
            line += &format!("; not covered: {}", out.missing.join("; "));
        }
        println!("{line}");
    }
}

fn criterion_1(run: &mut Run) {
    let start = Instant::now();
    let mut out = Outcome::default();
    for m in 3..=10 {
        if let Some((_, _, v)) = run.verdict(&mut out, 2, m, Which::All, &both()) {
            out.check(v == Verdict::Primitive, || format!("(2,{m}) verdict {v}"));
        }
        run.torsion_free(&mut out, 2, m, Which::All, &[Route::B, Route::D]);
    }
    run.report(1, "surface grid n=2, m=3..10", out, start);
}

fn criterion_2(run: &mut Run) {
    let start = Instant::now();
    let mut out = Outcome::default();
    let grid = [(4, 3), (4, 4), (4, 5), (4, 6), (4, 7), (4, 8), (6, 3), (6, 4), (6, 5), (8, 3)];
    for (n, m) in grid {
        if let Some((_, _, v)) = run.verdict(&mut out, n, m, Which::All, &both()) {
            out.check(v == Verdict::Primitive, || format!("({n},{m}) verdict {v}"));
        }
    }
    if run.extended {
        // Stretch targets: a budget failure is acceptable, a wrong verdict is not.
        let opts = Options { limits: Limits::extended(), ..both() };
        for m in 9..=12 {
            if let Some((_, _, v)) = run.verdict(&mut out, 4, m, Which::All, &opts) {
                out.check(v == Verdict::Primitive, || format!("(4,{m}) verdict {v}"));
            }
        }
    }
    let title = if run.extended { "confirmed table plus (4,9..12)" } else { "confirmed table" };
    run.report(2, title, out, start);
}

fn criterion_3(run: &mut Run) {
    let start = Instant::now();
    let mut out = Outcome::default();
    for n in [0, 2, 4, 6] {
        for m in 3..=8 {
            let want = (m as u64 - 1).pow(n as u32 / 2 + 1);
            let opts = Options { limits: Limits::extended(), ..both() };
            if let Some((gamma, rank, v)) = run.verdict(&mut out, n, m, Which::Standard, &opts) {
                out.check(gamma == want && rank == want + 1, || format!("({n},{m}) gamma {gamma} rank {rank}"));
                out.check(v == Verdict::Primitive, || format!("({n},{m}) verdict {v}"));
            }
            run.torsion_free(&mut out, n, m, Which::Standard, &[Route::A, Route::B, Route::D]);
        }
    }
    run.report(3, "K = standard, n <= 6, m = 3..8", out, start);
}

fn criterion_4(run: &mut Run) {
    let start = Instant::now();
    let mut out = Outcome::default();
    for n in [2, 4, 6] {
        for m in 3..=10 {
            let inst = ProblemInstance::new(n, m).unwrap();
            let count = gamma_count(&inst, &PartitionSet::all(&inst)).unwrap();
            let constant = gamma_constant_term(n, m).unwrap();
            let closed = gamma_closed_form(n, m).unwrap();
            out.check(count == constant && closed == count as i64, || {
                format!("({n},{m}) count {count}, constant term {constant}, closed form {closed}")
            });
        }
    }
    for (m, rank) in [(3, 7), (4, 20)] {
        let inst = ProblemInstance::new(2, m).unwrap();
        let got = gamma_count(&inst, &PartitionSet::all(&inst)).unwrap() + 1;
        out.check(got == rank, || format!("(2,{m}) rank {got}, expected {rank}"));
    }
    run.report(4, "rank cross-checks n in {2,4,6}, m = 3..10", out, start);
}

fn criterion_5(run: &mut Run) {
    let start = Instant::now();
    let mut out = Outcome::default();
    for m in 3..=12 {
        out.check(verify_phirho_identity(m), || format!("phi/rho identity fails at m = {m}"));
    }
    for (n, ms) in [(2, 3..=6), (4, 3..=6)] {
        for m in ms {
            let inst = ProblemInstance::new(n, m).unwrap();
            for j in enumerate_partitions(&inst) {
                let r = verify_psi_lambda_rho(&inst, &j);
                out.check(r.is_ok(), || format!("({n},{m}) J = {j}: {r:?}"));
            }
        }
    }
    let cases = [(1, 3..=6), (2, 3..=5), (3, 3..=3)];
    for (vars, ms) in cases {
        for m in ms {
            let r = lemma_a_check(vars, m, &Limits::default());
            out.check(r == Ok(true), || format!("A/(theta) at N = {vars}, m = {m}: {r:?}"));
        }
    }
    run.report(5, "identity suite", out, start);
}

/// Whether every prime factor of `x` divides `m`.
fn supported_on(x: &BigInt, m: usize) -> bool {
    let mut rest = x.clone();
    for p in prime_divisors(m as u64) {
        let p = BigInt::from(p);
        while (&rest % &p) == BigInt::from(0) {
            rest /= &p;
        }
    }
    rest == BigInt::from(1)
}

fn criterion_6(run: &mut Run) {
    let start = Instant::now();
    // Torsion for the confirmed table. (6,5) is out of reach for the integer
    // elimination (hours); (4,8) takes about ten minutes per route.
    for (n, m) in [(4, 3), (4, 4), (4, 5), (4, 6), (4, 7), (6, 3), (6, 4), (8, 3), (4, 8), (6, 5)] {
        let slow = (n, m) == (4, 8);
        if (n, m) == (6, 5) || (slow && !run.extended) {
            let why = if slow { "needs FERMAT_EXTENDED=1" } else { "not attempted, elimination takes hours" };
            run.skipped_snf.push(format!("({n},{m},all) routes b, d: {why}"));
            continue;
        }
        run.routes(n, m, Which::All);
    }
    let mut out = Outcome::default();
    // Engine agreement is enforced inside every Engine::Both check above.
    out.checks += run.engines.len();
    out.check(run.dp_below_d0.is_empty(), || format!("d_p < d_0 at {}", run.dp_below_d0.join(" ")));
    for ((n, m, which), routes) in &run.snf {
        let done: Vec<(&Route, &Vec<BigInt>)> = routes.iter().filter_map(|(r, t)| t.as_ref().ok().map(|f| (r, f))).collect();
        if let Some((r0, f0)) = done.first() {
            for (r, f) in &done[1..] {
                out.check(f == f0, || format!("({n},{m}) route {r} {f:?} vs route {r0} {f0:?}"));
            }
        }
        for (r, f) in &done {
            // Every instance in criteria 1-3 is primitive.
            out.check(f.is_empty(), || format!("({n},{m}) route {r} torsion {f:?}"));
            out.check(f.iter().all(|x| supported_on(x, *m)), || format!("({n},{m}) route {r} factor prime not dividing m"));
        }
        let k = if *which == Which::All { "all" } else { "standard" };
        for (r, t) in routes {
            if let Err(e) = t {
                out.missing.push(format!("({n},{m},{k}) route {r}: {e}"));
            }
        }
    }
    out.missing.extend(run.skipped_snf.iter().cloned());
    run.report(6, "oracle equivalence over criteria 1-3", out, start);
}

fn criterion_7(run: &mut Run) {
    let start = Instant::now();
    let mut out = Outcome::default();
    for (n, m) in [(2, 3), (2, 4), (2, 6), (4, 3), (4, 4), (6, 3)] {
        let inst = ProblemInstance::new(n, m).unwrap();
        let d0 = inst.reduced_rank() - gamma_count(&inst, &PartitionSet::all(&inst)).unwrap();
        let mut dp = BTreeMap::new();
        for p in prime_divisors(m as u64) {
            // Only the φ(t_i): the ρ_J are left out on purpose.
            let basis = buchberger(&phi_generators(&inst, p).unwrap(), &Limits::default()).unwrap();
            match quotient_dimension(&basis) {
                QuotientDim::Finite(d) => {
                    out.check(d == inst.reduced_rank() && d > d0, || format!("({n},{m}) weakened d_{p} = {d}"));
                    dp.insert(p, d);
                }
                QuotientDim::Infinite => out.check(false, || format!("({n},{m}) infinite quotient")),
            }
        }
        let v = verdict_from(d0, &dp);
        out.check(v == Verdict::TorsionDetected, || format!("({n},{m}) weakened verdict {v}"));
    }
    run.report(7, "negative control without rho_J", out, start);
}

fn main() {
    let extended = std::env::var("FERMAT_EXTENDED").is_ok_and(|v| v == "1");
    let mut run =
        Run { extended, snf: BTreeMap::new(), engines: Vec::new(), dp_below_d0: Vec::new(), skipped_snf: Vec::new(), failed: false };
    criterion_1(&mut run);
    criterion_2(&mut run);
    criterion_3(&mut run);
    criterion_4(&mut run);
    criterion_5(&mut run);
    criterion_6(&mut run);
    criterion_7(&mut run);
    if run.failed {
        eprintln!("acceptance: some computed values are wrong");
        std::process::exit(1);
    }
}
