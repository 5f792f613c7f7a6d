//! Certificates: the structured outcome of every checking operation.
//!
//! A certificate names the claim that was tested, the inputs, the computed
//! and expected values, a verdict, and when possible a witness that can be
//! revalidated from scratch. Certificates render to stable `key=value`
//! records so runs can be diffed; only the elapsed-time field varies
//! between identical runs.

use crate::dchain::Role;
use crate::family::{render_set, Family};
use std::time::{Duration, Instant};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The claim holds, backed by an exact computation.
    Pass,
    /// Every finite-range property check passed; not a full proof.
    PropertyPass,
    Fail,
    /// A budget ran out before the search finished.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::PropertyPass => "property-pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn is_passing(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::PropertyPass)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A set family, e.g. an extremal pattern-free family.
    Family(Family),
    /// A pattern embedding into a set family: `images[q]` is the member
    /// carrying pattern element q.
    Embedding { n: u32, images: Vec<u64> },
    /// Elements of the doubly infinite double chain, as (role, column).
    WindowSubset(Vec<(Role, i64)>),
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub claim: String,
    pub expr: Option<String>,
    pub n: Option<u64>,
    pub m: Option<String>,
    pub k: Option<u64>,
    pub value: Option<String>,
    pub expected: Option<String>,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
    pub elapsed: Option<Duration>,
}

impl Certificate {
    pub fn new(claim: &str, verdict: Verdict) -> Certificate {
        Certificate {
            claim: claim.to_string(),
            expr: None,
            n: None,
            m: None,
            k: None,
            value: None,
            expected: None,
            verdict,
            witness: None,
            notes: Vec::new(),
            elapsed: None,
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("claim={}\n", self.claim);
        if let Some(e) = &self.expr {
            out.push_str(&format!("expr={e}\n"));
        }
        if let Some(n) = self.n {
            out.push_str(&format!("n={n}\n"));
        }
        if let Some(m) = &self.m {
            out.push_str(&format!("m={m}\n"));
        }
        if let Some(k) = self.k {
            out.push_str(&format!("k={k}\n"));
        }
        if let Some(v) = &self.value {
            out.push_str(&format!("value={v}\n"));
        }
        if let Some(e) = &self.expected {
            out.push_str(&format!("expected={e}\n"));
        }
        out.push_str(&format!("verdict={}\n", self.verdict));
        for note in &self.notes {
            out.push_str(&format!("note={note}\n"));
        }
        if let Some(t) = self.elapsed {
            out.push_str(&format!("elapsed_ms={}\n", t.as_millis()));
        }
        match &self.witness {
            None => {}
            Some(Witness::Family(f)) => {
                out.push_str("witness=family\n");
                out.push_str(&f.render_text());
            }
            Some(Witness::Embedding { n, images }) => {
                out.push_str("witness=embedding\n");
                out.push_str(&format!("into ground set of {n}\n"));
                for (q, &img) in images.iter().enumerate() {
                    out.push_str(&format!("{q} -> {}\n", render_set(img)));
                }
            }
            Some(Witness::WindowSubset(elems)) => {
                out.push_str("witness=window-subset\n");
                let cols: Vec<String> =
                    elems.iter().map(|&(r, c)| format!("{r}({c})")).collect();
                out.push_str(&cols.join(" "));
                out.push('\n');
            }
        }
        out
    }
}

/// Node and wall-clock limits for the exhaustive searches.
#[derive(Clone, Debug)]
pub struct Budget {
    pub max_nodes: u64,
    pub time_limit: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { max_nodes: 100_000_000, time_limit: None }
    }
}

impl Budget {
    pub fn nodes(max_nodes: u64) -> Budget {
        Budget { max_nodes, time_limit: None }
    }
}

/// Counts search nodes against a budget, polling the clock sparingly.
pub(crate) struct Meter {
    started: Instant,
    pub nodes: u64,
    max_nodes: u64,
    time_limit: Option<Duration>,
    exhausted: bool,
}

impl Meter {
    pub fn new(budget: &Budget) -> Meter {
        Meter {
            started: Instant::now(),
            nodes: 0,
            max_nodes: budget.max_nodes,
            time_limit: budget.time_limit,
            exhausted: false,
        }
    }

    /// Registers one node; false once the budget is gone.
    pub fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.exhausted = true;
        } else if let Some(limit) = self.time_limit {
            if self.nodes.is_multiple_of(8192) && self.started.elapsed() > limit {
                self.exhausted = true;
            }
        }
        !self.exhausted
    }

    pub fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }
}
