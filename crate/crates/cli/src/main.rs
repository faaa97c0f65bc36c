//! `fermat`: primitivity checks for standard subspaces of Fermat varieties.
//!
//! Exit codes: 0 when a verdict was computed (primitive or not), 1 for usage
//! errors, 2 when a budget ran out, 3 when independent computations
//! disagreed or output could not be written.

mod budget;
mod cache;
mod report;
mod spec;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use fermat_core::combinatorics::{enumerate_partitions, gamma_closed_form, gamma_constant_term, gamma_count_with};
use fermat_core::criterion::{conjecture_scan, parse_grid, primitivity_check, Engine, Options};
use fermat_core::zlattice::{torsion, Route};
use fermat_core::{Exec, Limits, ProblemInstance};
use serde_json::json;

use cache::Cache;
use report::ReportDocument;
use spec::PartitionSpec;

#[derive(Parser)]
#[command(name = "fermat", version, about = "Primitivity of standard-subspace lattices on Fermat varieties")]
struct Cli {
    /// Start from the generous extended budgets instead of the defaults.
    #[arg(long, global = true)]
    extended: bool,
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Instance {
    /// Even dimension n = 2d.
    #[arg(long)]
    n: usize,
    /// Degree m >= 3.
    #[arg(long)]
    m: usize,
    /// Partition set: all, standard, or e.g. 0-1,2-3,4-5;0-2,1-3,4-5
    #[arg(long = "K", visible_alias = "k", default_value = "all")]
    k: PartitionSpec,
}

#[derive(Subcommand)]
enum Cmd {
    /// List every pair-partition of {0, …, n+1} with its sign.
    Partitions {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// |Γ_K| and the rank of L_K(X).
    Rank {
        #[command(flatten)]
        inst: Instance,
        #[arg(long)]
        json: bool,
    },
    /// The d_0 = d_p criterion, optionally with Smith-form torsion.
    Check {
        #[command(flatten)]
        inst: Instance,
        /// groebner, linear or both; automatic by size when omitted.
        #[arg(long)]
        engine: Option<Engine>,
        /// Also compute the torsion of a presentation.
        #[arg(long)]
        snf: bool,
        /// Presentation used with --snf.
        #[arg(long, default_value = "d")]
        route: Route,
        #[arg(long)]
        json: bool,
    },
    /// Invariant factors > 1 of one presentation of the torsion.
    Torsion {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value = "d")]
        route: Route,
        #[arg(long)]
        json: bool,
    },
    /// Check K = all over a grid, writing one report per instance.
    Scan {
        /// e.g. "2:3-10,4:3-8,8:3"
        #[arg(long)]
        grid: String,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
        #[arg(long)]
        engine: Option<Engine>,
        #[arg(long)]
        snf: bool,
        #[arg(long, default_value = "d")]
        route: Route,
        /// Recompute even when a cached result exists.
        #[arg(long)]
        force: bool,
    },
}

/// Why a run stopped without a verdict.
#[derive(Debug)]
enum Stop {
    Usage,
    Budget,
    Failed,
}

impl Stop {
    fn code(&self) -> u8 {
        match self {
            Stop::Usage => 1,
            Stop::Budget => 2,
            Stop::Failed => 3,
        }
    }
}

fn classify(e: &anyhow::Error) -> Stop {
    use fermat_core::Error as E;
    match e.chain().find_map(|c| c.downcast_ref::<E>()) {
        Some(E::ResourceLimit { .. }) => Stop::Budget,
        Some(E::Inconsistent(_)) => Stop::Failed,
        Some(_) => Stop::Usage,
        None if e.chain().any(|c| c.is::<std::io::Error>()) => Stop::Failed,
        None => Stop::Usage,
    }
}

struct Ctx {
    limits: Limits,
    exec: Exec,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let run = || -> Result<u8> {
        let ctx = Ctx {
            limits: budget::limits(cli.extended)?,
            exec: if cli.sequential { Exec::Sequential } else { Exec::default() },
        };
        match &cli.cmd {
            Cmd::Partitions { n, json } => partitions(*n, *json),
            Cmd::Rank { inst, json } => rank(&ctx, inst, *json),
            Cmd::Check { inst, engine, snf, route, json } => {
                check(&ctx, inst, *engine, snf.then_some(*route), *json)
            }
            Cmd::Torsion { inst, route, json } => torsion_cmd(&ctx, inst, *route, *json),
            Cmd::Scan { grid, out, engine, snf, route, force } => {
                scan(&ctx, grid, out, *engine, snf.then_some(*route), *force)
            }
        }
    };
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let stop = classify(&e);
            eprintln!("error: {e:#}");
            ExitCode::from(stop.code())
        }
    }
}

fn partitions(n: usize, json: bool) -> Result<u8> {
    // Any m works; partitions only depend on n.
    let inst = ProblemInstance::new(n, 3)?;
    let all = enumerate_partitions(&inst);
    if json {
        let items: Vec<_> = all.iter().map(|p| json!({"partition": p.to_string(), "sign": p.sign()})).collect();
        println!("{}", serde_json::to_string_pretty(&items)?);
    } else {
        for p in &all {
            println!("{:+} {p}", p.sign());
        }
    }
    Ok(0)
}

fn resolve(inst: &Instance) -> Result<(ProblemInstance, fermat_core::PartitionSet)> {
    let instance = ProblemInstance::new(inst.n, inst.m)?;
    let k = inst.k.resolve(&instance)?;
    Ok((instance, k))
}

fn rank(ctx: &Ctx, inst: &Instance, json: bool) -> Result<u8> {
    let (instance, k) = resolve(inst)?;
    let gamma = gamma_count_with(&instance, &k, ctx.exec)?;
    // The closed-form polynomials and the constant term both count |Γ_J|
    // for K = all, which is the rank minus one.
    let cross = if k.is_all() && matches!(inst.n, 2 | 4 | 6) {
        let closed = gamma_closed_form(inst.n, inst.m)?;
        let constant = gamma_constant_term(inst.n, inst.m)?;
        Some((closed, constant, closed == gamma as i64 && constant == gamma))
    } else {
        None
    };
    if json {
        let mut doc = json!({
            "n": inst.n, "m": inst.m, "K": PartitionSpec::of(&k).to_string(), "gamma": gamma, "rank": gamma + 1,
        });
        if let Some((closed, constant, ok)) = cross {
            doc["cross_check"] = json!({"closed_form": closed, "constant_term": constant, "consistent": ok});
        }
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("gamma={gamma}");
        println!("rank={}", gamma + 1);
        if let Some((closed, constant, ok)) = cross {
            println!("closed_form={closed}");
            println!("constant_term={constant}");
            println!("cross_check={}", if ok { "ok" } else { "MISMATCH" });
        }
    }
    match cross {
        Some((_, _, false)) => {
            eprintln!("error: |Γ_J| counts disagree");
            Ok(Stop::Failed.code())
        }
        _ => Ok(0),
    }
}

fn options(ctx: &Ctx, engine: Option<Engine>, snf: Option<Route>) -> Options {
    Options { engine, snf, limits: ctx.limits.clone(), exec: ctx.exec }
}

fn render(doc: &ReportDocument, route: Option<Route>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "instance  n={} m={}", doc.n, doc.m);
    let _ = writeln!(s, "K         {}", doc.k);
    let _ = writeln!(s, "gamma     {}", doc.gamma);
    let _ = writeln!(s, "rank      {}", doc.rank);
    let _ = writeln!(s, "d0        {}", doc.d0);
    for (p, d) in &doc.dp {
        let _ = writeln!(s, "d_{p:<7} {d}");
    }
    if let (Some(f), Some(r)) = (&doc.torsion_factors, route) {
        let _ = writeln!(s, "torsion   [{}] (route {r})", f.join(", "));
    }
    let _ = writeln!(s, "engine    {}", doc.engine);
    let _ = write!(s, "verdict   {}", doc.verdict);
    s
}

fn check(ctx: &Ctx, inst: &Instance, engine: Option<Engine>, snf: Option<Route>, json: bool) -> Result<u8> {
    let (instance, k) = resolve(inst)?;
    let report = primitivity_check(&instance, &k, &options(ctx, engine, snf))?;
    let doc = ReportDocument::new(&report);
    if json {
        println!("{}", doc.to_json());
    } else {
        println!("{}", render(&doc, snf));
    }
    if let fermat_core::criterion::Verdict::Inconclusive { stage, reason } = &report.verdict {
        eprintln!("inconclusive: {stage}: {reason}");
        return Ok(Stop::Budget.code());
    }
    Ok(0)
}

fn torsion_cmd(ctx: &Ctx, inst: &Instance, route: Route, json: bool) -> Result<u8> {
    let (instance, k) = resolve(inst)?;
    let factors = torsion(route, &instance, &k, &ctx.limits)?;
    let text: Vec<String> = factors.iter().map(ToString::to_string).collect();
    if json {
        let doc = json!({
            "n": inst.n, "m": inst.m, "K": PartitionSpec::of(&k).to_string(), "route": route.to_string(),
            "torsion_factors": text,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("[{}]", text.join(", "));
    }
    Ok(0)
}

fn scan(ctx: &Ctx, grid: &str, out: &std::path::Path, engine: Option<Engine>, snf: Option<Route>, force: bool) -> Result<u8> {
    let grid = parse_grid(grid)?;
    for &(n, m) in &grid {
        ProblemInstance::new(n, m)?;
    }
    let cache = Cache::open(&out.join(".cache"))?;
    let keys: Vec<String> = grid.iter().map(|&(n, m)| cache::key(n, m, "all", engine, snf, &ctx.limits)).collect();
    let mut docs: BTreeMap<usize, (Result<ReportDocument, String>, bool)> = BTreeMap::new();
    let mut todo = Vec::new();
    for (i, key) in keys.iter().enumerate() {
        match cache.get(key).filter(|_| !force) {
            Some(doc) => {
                docs.insert(i, (Ok(doc), true));
            }
            None => todo.push(i),
        }
    }
    let start = Instant::now();
    let points: Vec<(usize, usize)> = todo.iter().map(|&i| grid[i]).collect();
    for (&i, res) in todo.iter().zip(conjecture_scan(&points, &options(ctx, engine, snf))) {
        let res = res.map(|r| ReportDocument::new(&r)).map_err(|e| e.to_string());
        if let Ok(doc) = &res {
            cache.put(&keys[i], doc)?;
        }
        docs.insert(i, (res, false));
    }

    let mut csv = String::from("n,m,K,gamma,rank,d0,dp,verdict,torsion_factors,cached\n");
    println!("{:>3} {:>3} {:>10} {:>10} {:>22} {:<20} cached", "n", "m", "gamma", "d0", "dp", "verdict");
    let (mut inconclusive, mut failed) = (false, false);
    for (i, &(n, m)) in grid.iter().enumerate() {
        let (res, cached) = &docs[&i];
        match res {
            Ok(doc) => {
                let dp: Vec<String> = doc.dp.iter().map(|(p, d)| format!("{p}:{d}")).collect();
                let tf = doc.torsion_factors.as_ref().map(|f| f.join(" ")).unwrap_or_default();
                println!(
                    "{n:>3} {m:>3} {:>10} {:>10} {:>22} {:<20} {}",
                    doc.gamma,
                    doc.d0,
                    dp.join(" "),
                    doc.verdict,
                    if *cached { "yes" } else { "no" }
                );
                let _ = writeln!(
                    csv,
                    "{n},{m},{},{},{},{},{},{},{tf},{cached}",
                    doc.k,
                    doc.gamma,
                    doc.rank,
                    doc.d0,
                    dp.join(" "),
                    doc.verdict
                );
                cache::write_atomic(&out.join(format!("n{n}_m{m}.json")), doc.to_json().as_bytes())?;
                inconclusive |= doc.is_inconclusive();
            }
            Err(e) => {
                println!("{n:>3} {m:>3} ERROR: {e}");
                let _ = writeln!(csv, "{n},{m},all,,,,,ERROR,,false");
                failed = true;
            }
        }
    }
    cache::write_atomic(&out.join("summary.csv"), csv.as_bytes())?;
    eprintln!("{} computed, {} cached in {:.1?}", todo.len(), grid.len() - todo.len(), start.elapsed());
    if failed {
        bail!(fermat_core::Error::Inconsistent("some instances failed".into()));
    }
    Ok(if inconclusive { Stop::Budget.code() } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_exit_codes() {
        use fermat_core::Error as E;
        let code = |e: E| classify(&anyhow::Error::new(e).context("while running")).code();
        assert_eq!(code(E::InvalidInstance("odd".into())), 1);
        assert_eq!(code(E::ResourceLimit { stage: "x".into(), detail: "y".into() }), 2);
        assert_eq!(code(E::Inconsistent("z".into())), 3);
    }

    #[test]
    fn flags_parse() {
        Cli::try_parse_from(["fermat", "check", "--n", "4", "--m", "3", "--K", "standard", "--engine", "both"]).unwrap();
        Cli::try_parse_from(["fermat", "torsion", "--n", "2", "--m", "3", "--route", "b"]).unwrap();
        assert!(Cli::try_parse_from(["fermat", "check", "--n", "4", "--m", "3", "--engine", "magic"]).is_err());
        assert!(Cli::try_parse_from(["fermat", "check", "--n", "4", "--m", "3", "--K", "0-1,1-2"]).is_err());
    }
}
