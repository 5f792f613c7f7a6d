//! Command-line front end: parses poset expressions and family files,
//! dispatches to the library, and emits line-oriented key=value reports.
//!
//! Exit status: 0 all checks passed, 1 some check failed, 2 inconclusive
//! under the budget, 3 usage or input error.

use crate::cert::{Budget, Certificate, Verdict, Witness};
use crate::dchain::{audit_double_chains, window_condition};
use crate::embed::{search_host, MaskHost};
use crate::expr::{eval_expr, parse_expr};
use crate::extremal::{
    double_chain_bound, e_composition_bound, e_lower_scan, e_upper_witness, la_exact,
    path_embedding_bound, verify_sharp_bound, LaOutcome,
};
use crate::family::Family;
use clap::{Parser, Subcommand};
use num_rational::Rational64;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Environment variable supplying the default worker count for the
/// verbs that accept `--jobs`.
pub const JOBS_ENV: &str = "SUBPOSET_JOBS";

#[derive(Parser)]
#[command(
    name = "subposet",
    version,
    about = "Forbidden-subposet bounds on the Boolean lattice",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Print size, longest chain, b, and e for a poset expression
    Info {
        /// Expression over E, B, D3, Q, R, S, S' (alias Sp) and @file atoms
        expr: String,
        /// Also print both upper bounds at this ground-set size
        #[arg(long)]
        n: Option<u32>,
    },
    /// Compute La(n, P) exactly by complete search
    La {
        expr: String,
        #[arg(long)]
        n: u32,
        /// Search-node budget before giving up
        #[arg(long)]
        budget: Option<u64>,
        /// Write the certificate to this file as well
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check La(n, P) = sigma(n, b(P)), exactly or via the property pair
    Verify {
        expr: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare enumerated double-chain containment counts with the closed form
    AuditDoubleChains {
        #[arg(long)]
        n: u32,
        /// Worker threads (default: SUBPOSET_JOBS or 1)
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Search for a pattern-free window subset of 2m+1 points
    WindowCheck {
        expr: String,
        /// Window half-size, an integer or half-integer like 5/2 (default: b(P))
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Level-family evidence for e(P): a lower scan and an upper witness hunt
    EScan {
        expr: String,
        /// Level count for the lower scan (default: b(P))
        #[arg(long)]
        m: Option<u32>,
        /// Level count for the upper witness hunt (default: m+1)
        #[arg(long)]
        k: Option<u32>,
        /// Largest ground set scanned (default: 2m+2)
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Test a family file for freeness from a pattern
    FreeCheck {
        /// Family file: `family <n>` then one set literal per line
        family: PathBuf,
        expr: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Parses the arguments and runs one command, returning the exit status.
pub fn run<I>(args: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 3 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.verb) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            3
        }
    }
}

fn dispatch(verb: Verb) -> Result<i32, String> {
    match verb {
        Verb::Info { expr, n } => cmd_info(&expr, n),
        Verb::La { expr, n, budget, report } => cmd_la(&expr, n, to_budget(budget), report),
        Verb::Verify { expr, n, budget, report } => {
            cmd_verify(&expr, n, to_budget(budget), report)
        }
        Verb::AuditDoubleChains { n, jobs, report } => cmd_audit(n, resolve_jobs(jobs)?, report),
        Verb::WindowCheck { expr, m, budget, report } => {
            cmd_window(&expr, m.as_deref(), to_budget(budget), report)
        }
        Verb::EScan { expr, m, k, n_max, jobs, report } => {
            cmd_escan(&expr, m, k, n_max, resolve_jobs(jobs)?, report)
        }
        Verb::FreeCheck { family, expr, report } => cmd_free_check(&family, &expr, report),
    }
}

fn to_budget(nodes: Option<u64>) -> Budget {
    match nodes {
        Some(max_nodes) => Budget { max_nodes, time_limit: None },
        None => Budget::default(),
    }
}

fn resolve_jobs(flag: Option<usize>) -> Result<usize, String> {
    if let Some(j) = flag {
        if j == 0 {
            return Err("--jobs must be at least 1".into());
        }
        return Ok(j);
    }
    match std::env::var(JOBS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(j) if j >= 1 => Ok(j),
            _ => Err(format!("{JOBS_ENV} must be a positive integer, got `{v}`")),
        },
        Err(_) => Ok(1),
    }
}

fn parse_ratio(text: &str) -> Result<Rational64, String> {
    let bad = || format!("expected an integer or p/q fraction, got `{text}`");
    if let Some((p, q)) = text.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        Ok(Rational64::new(p, q))
    } else {
        text.trim().parse::<i64>().map(Rational64::from_integer).map_err(|_| bad())
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass | Verdict::PropertyPass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 2,
    }
}

/// Prints each certificate to stdout and optionally to the report file,
/// then folds the verdicts into an exit status.
fn emit(certs: &[Certificate], report: Option<&Path>) -> Result<i32, String> {
    let text = certs.iter().map(Certificate::render).collect::<Vec<_>>().join("\n");
    print!("{text}");
    if let Some(path) = report {
        std::fs::write(path, &text)
            .map_err(|e| format!("cannot write report {}: {e}", path.display()))?;
    }
    Ok(certs.iter().map(|c| verdict_code(c.verdict)).max().unwrap_or(0))
}

fn cmd_info(expr_text: &str, n: Option<u32>) -> Result<i32, String> {
    let expr = parse_expr(expr_text).map_err(|e| e.to_string())?;
    let p = eval_expr(&expr).map_err(|e| e.to_string())?;
    println!("expr={expr}");
    println!("size={}", p.size());
    println!("L={}", p.longest_chain());
    println!("b={}", p.b_value());
    if let Ok(e) = e_composition_bound(&expr) {
        println!("e={e}");
    }
    if let Some(n) = n {
        let (bound, kind) = double_chain_bound(&p, n);
        println!("n={n}");
        println!("double_chain_bound={bound}");
        println!("bound_kind={}", kind.as_str());
        println!("path_embedding_bound={}", path_embedding_bound(&p, n));
    }
    Ok(0)
}

fn cmd_la(expr_text: &str, n: u32, budget: Budget, report: Option<PathBuf>) -> Result<i32, String> {
    let started = Instant::now();
    let expr = parse_expr(expr_text).map_err(|e| e.to_string())?;
    let p = eval_expr(&expr).map_err(|e| e.to_string())?;
    let outcome = la_exact(n, &p, &budget).map_err(|e| e.to_string())?;
    let mut cert = Certificate::new("la", Verdict::Pass);
    cert.expr = Some(expr.to_string());
    cert.n = Some(n as u64);
    match outcome {
        LaOutcome::Exact { value, witness } => {
            cert.value = Some(value.to_string());
            cert.notes.push("complete search; the witness family attains the maximum".into());
            cert.witness = Some(Witness::Family(witness));
        }
        LaOutcome::Inconclusive { best, witness, upper, nodes } => {
            cert.verdict = Verdict::Inconclusive;
            cert.value = Some(format!("{best} <= La <= {upper}"));
            cert.notes.push(format!(
                "budget exhausted after {nodes} nodes; only the trivial bound {upper} holds for the unexplored region"
            ));
            cert.witness = Some(Witness::Family(witness));
        }
    }
    cert.elapsed = Some(started.elapsed());
    emit(&[cert], report.as_deref())
}

fn cmd_verify(
    expr_text: &str,
    n: u32,
    budget: Budget,
    report: Option<PathBuf>,
) -> Result<i32, String> {
    let expr = parse_expr(expr_text).map_err(|e| e.to_string())?;
    let cert = verify_sharp_bound(&expr, n, &budget).map_err(|e| e.to_string())?;
    emit(&[cert], report.as_deref())
}

fn cmd_audit(n: u32, jobs: usize, report: Option<PathBuf>) -> Result<i32, String> {
    let cert = audit_double_chains(n, jobs).map_err(|e| e.to_string())?;
    emit(&[cert], report.as_deref())
}

fn cmd_window(
    expr_text: &str,
    m_text: Option<&str>,
    budget: Budget,
    report: Option<PathBuf>,
) -> Result<i32, String> {
    let expr = parse_expr(expr_text).map_err(|e| e.to_string())?;
    let p = eval_expr(&expr).map_err(|e| e.to_string())?;
    let m = match m_text {
        Some(t) => parse_ratio(t)?,
        None => p.b_value(),
    };
    let mut cert = window_condition(&p, m, &budget).map_err(|e| e.to_string())?;
    cert.expr = Some(expr.to_string());
    emit(&[cert], report.as_deref())
}

fn cmd_escan(
    expr_text: &str,
    m: Option<u32>,
    k: Option<u32>,
    n_max: Option<u32>,
    jobs: usize,
    report: Option<PathBuf>,
) -> Result<i32, String> {
    let expr = parse_expr(expr_text).map_err(|e| e.to_string())?;
    let p = eval_expr(&expr).map_err(|e| e.to_string())?;
    let m = match m {
        Some(m) => m,
        None => {
            let b = p.b_value();
            if *b.denom() != 1 || *b.numer() < 0 {
                return Err(format!("b = {b} is not a usable level count; pass --m"));
            }
            b.to_integer() as u32
        }
    };
    let k = k.unwrap_or(m + 1);
    let n_max = n_max.unwrap_or(2 * m + 2);

    let started = Instant::now();
    let mut lower = e_lower_scan(&p, m, n_max, jobs).map_err(|e| e.to_string())?;
    lower.expr = Some(expr.to_string());
    lower.elapsed = Some(started.elapsed());

    let started = Instant::now();
    let mut upper = Certificate::new("e-upper-witness", Verdict::Inconclusive);
    upper.expr = Some(expr.to_string());
    upper.m = Some(k.to_string());
    match e_upper_witness(&p, k, n_max).map_err(|e| e.to_string())? {
        Some(w) => {
            upper.verdict = Verdict::Pass;
            upper.n = Some(w.n as u64);
            upper.k = Some(w.k as u64);
            upper.value = Some(format!("embedding into {k} consecutive levels of [{}]", w.n));
            upper.notes.push(format!("certifies e < {k}"));
            upper.witness = Some(Witness::Embedding { n: w.n, images: w.images });
        }
        None => {
            upper.value = Some(format!("no embedding into {k} consecutive levels up to n = {n_max}"));
            upper.notes.push("absence in the scanned range decides nothing beyond it".into());
        }
    }
    upper.elapsed = Some(started.elapsed());
    emit(&[lower, upper], report.as_deref())
}

fn cmd_free_check(family: &Path, expr_text: &str, report: Option<PathBuf>) -> Result<i32, String> {
    let text = std::fs::read_to_string(family)
        .map_err(|e| format!("cannot read family file {}: {e}", family.display()))?;
    let f = Family::parse_text(&text).map_err(|e| format!("{}: {e}", family.display()))?;
    let expr = parse_expr(expr_text).map_err(|e| e.to_string())?;
    let p = eval_expr(&expr).map_err(|e| e.to_string())?;
    let mut cert = Certificate::new("free-check", Verdict::Pass);
    cert.expr = Some(expr.to_string());
    cert.n = Some(f.n() as u64);
    match search_host(&p, &MaskHost { masks: f.members() }, None) {
        None => {
            cert.value = Some(format!("all {} members avoid the pattern", f.len()));
        }
        Some(emb) => {
            cert.verdict = Verdict::Fail;
            cert.value = Some("the family contains the pattern".into());
            let images = emb.map.iter().map(|&i| f.members()[i]).collect();
            cert.witness = Some(Witness::Embedding { n: f.n(), images });
        }
    }
    emit(&[cert], report.as_deref())
}
