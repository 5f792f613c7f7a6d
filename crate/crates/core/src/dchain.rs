//! Double chains and the counting facts behind the La(n, P) bound.
//!
//! A permutation pi of {1, ..., n} yields the primary chain L_0 = {} up to
//! L_n = [n] by prefixes, and the secondary sets M_i = L_{i-1} union
//! (L_{i+1} minus L_i) for 0 < i < n: step i is replaced by sneaking the
//! next element in first. The 2n sets L_0..L_n, M_1..M_{n-1} form the
//! double chain of pi. Averaging set-membership over all n! double chains
//! gives the Lubell-style bound implemented in `extremal`.
//!
//! The doubly infinite double chain keeps one L and one M per integer
//! column; x < y whenever x's column precedes y's, except that two M's in
//! adjacent columns stay incomparable. `window_condition` decides whether
//! every (2m+1)-point subset of it contains a given pattern, which is the
//! hypothesis the sharp bound rests on.

use crate::cert::{Budget, Certificate, Meter, Verdict, Witness};
use crate::embed::{search_host, HostOrder};
use crate::family::{binomial, ground_mask, render_set, Family, MAX_GROUND};
use crate::poset::{mix, Poset};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

/// Permutation enumeration ceiling for the audit and oracle paths.
pub const ENUMERATION_MAX_N: u32 = 6;

/// Column ceiling for materialized window posets.
pub const WINDOW_MAX_COLS: i64 = 256;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DChainError {
    #[error("bad permutation: {0}")]
    BadPermutation(String),
    #[error("ground set size {0} exceeds the {MAX_GROUND}-bit word width")]
    GroundTooLarge(u32),
    #[error("set {mask:#x} uses elements outside the {n}-element ground set")]
    SetOutOfRange { mask: u64, n: u32 },
    #[error("double-chain counting needs n >= 2, got n={0}")]
    GroundTooSmall(u32),
    #[error("permutation enumeration capped at n = {ENUMERATION_MAX_N}, got n={0}")]
    EnumerationTooLarge(u32),
    #[error("window columns {lo}..={hi} are empty or wider than {WINDOW_MAX_COLS}")]
    BadWindow { lo: i64, hi: i64 },
    #[error("window count parameter must be a nonnegative integer or half-integer, got {0}")]
    InvalidM(String),
    #[error("window subsets of {0} points are beyond the supported search depth")]
    WindowTooDeep(usize),
}

/// The 2n sets attached to one permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleChain {
    n: u32,
    perm: Vec<u32>,
    primary: Vec<u64>,
    secondary: Vec<u64>,
}

/// Builds the double chain of a permutation of {1, ..., n}.
pub fn double_chain(perm: &[u32]) -> Result<DoubleChain, DChainError> {
    let n = perm.len() as u32;
    if n == 0 {
        return Err(DChainError::BadPermutation("empty permutation".into()));
    }
    if n > MAX_GROUND {
        return Err(DChainError::GroundTooLarge(n));
    }
    let mut seen = 0u64;
    for &e in perm {
        if e == 0 || e > n {
            return Err(DChainError::BadPermutation(format!(
                "entry {e} outside 1..={n}"
            )));
        }
        if seen >> (e - 1) & 1 == 1 {
            return Err(DChainError::BadPermutation(format!("entry {e} repeats")));
        }
        seen |= 1 << (e - 1);
    }
    let mut primary = Vec::with_capacity(n as usize + 1);
    let mut acc = 0u64;
    primary.push(acc);
    for &e in perm {
        acc |= 1 << (e - 1);
        primary.push(acc);
    }
    let mut secondary = Vec::with_capacity(n.saturating_sub(1) as usize);
    for i in 1..n as usize {
        secondary.push(primary[i - 1] | (primary[i + 1] & !primary[i]));
    }
    Ok(DoubleChain { n, perm: perm.to_vec(), primary, secondary })
}

impl DoubleChain {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn perm(&self) -> &[u32] {
        &self.perm
    }

    /// L_0, ..., L_n.
    pub fn primary(&self) -> &[u64] {
        &self.primary
    }

    /// M_1, ..., M_{n-1}.
    pub fn secondary(&self) -> &[u64] {
        &self.secondary
    }

    /// All 2n sets, primary first.
    pub fn sets(&self) -> Vec<u64> {
        let mut all = self.primary.clone();
        all.extend_from_slice(&self.secondary);
        all
    }

    pub fn contains_set(&self, mask: u64) -> bool {
        self.primary.contains(&mask) || self.secondary.contains(&mask)
    }

    pub fn family(&self) -> Family {
        Family::new(self.n, self.sets()).expect("double-chain sets are distinct and in range")
    }
}

pub(crate) fn permutations(n: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, cur: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if cur.len() == n as usize {
            out.push(cur.clone());
            return;
        }
        for e in 1..=n {
            if !used[e as usize - 1] {
                used[e as usize - 1] = true;
                cur.push(e);
                rec(n, cur, used, out);
                cur.pop();
                used[e as usize - 1] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut vec![false; n as usize], &mut out);
    out
}

fn factorial(n: u64) -> BigInt {
    (1..=n).map(BigInt::from).fold(BigInt::one(), |a, b| a * b)
}

fn check_set(mask: u64, n: u32) -> Result<(), DChainError> {
    if n > MAX_GROUND {
        return Err(DChainError::GroundTooLarge(n));
    }
    if n < 2 {
        return Err(DChainError::GroundTooSmall(n));
    }
    if mask & !ground_mask(n) != 0 {
        return Err(DChainError::SetOutOfRange { mask, n });
    }
    Ok(())
}

/// Number of permutations of {1, ..., n} whose double chain contains the
/// given set: n! for {} and the full set, otherwise 2 |F|! (n-|F|)!.
pub fn count_containing(mask: u64, n: u32) -> Result<BigInt, DChainError> {
    check_set(mask, n)?;
    let k = mask.count_ones() as u64;
    if mask == 0 || mask == ground_mask(n) {
        Ok(factorial(n as u64))
    } else {
        Ok(BigInt::from(2) * factorial(k) * factorial(n as u64 - k))
    }
}

/// Same count by walking every permutation; the audit's reference route.
pub fn count_containing_enumerated(mask: u64, n: u32) -> Result<BigInt, DChainError> {
    check_set(mask, n)?;
    if n > ENUMERATION_MAX_N {
        return Err(DChainError::EnumerationTooLarge(n));
    }
    let mut count = 0u64;
    for perm in permutations(n) {
        if double_chain(&perm).unwrap().contains_set(mask) {
            count += 1;
        }
    }
    Ok(BigInt::from(count))
}

/// Sum of 1/binomial(n, |F|) over the family: the chain-based average
/// behind the classical bound.
pub fn chain_lubell_sum(f: &Family) -> BigRational {
    let n = f.n() as u64;
    f.members()
        .iter()
        .map(|&m| BigRational::new(BigInt::one(), binomial(n, m.count_ones() as u64)))
        .sum()
}

/// The double-chain average: members equal to {} or the full set weigh
/// 1/2 each, every other member F weighs 1/binomial(n, |F|).
pub fn double_lubell_sum(f: &Family) -> Result<BigRational, DChainError> {
    let n = f.n();
    if n < 2 {
        return Err(DChainError::GroundTooSmall(n));
    }
    let ground = ground_mask(n);
    let mut total = BigRational::zero();
    for &m in f.members() {
        if m == 0 || m == ground {
            total += BigRational::new(BigInt::one(), BigInt::from(2));
        } else {
            total += BigRational::new(BigInt::one(), binomial(n as u64, m.count_ones() as u64));
        }
    }
    Ok(total)
}

/// Compares the closed-form membership count against full permutation
/// enumeration for every subset of {1, ..., n}.
pub fn audit_double_chains(n: u32, jobs: usize) -> Result<Certificate, DChainError> {
    if n < 2 {
        return Err(DChainError::GroundTooSmall(n));
    }
    if n > ENUMERATION_MAX_N {
        return Err(DChainError::EnumerationTooLarge(n));
    }
    let start = std::time::Instant::now();
    let perms = permutations(n);
    let size = 1usize << n;
    let tally = |chunk: &[Vec<u32>]| {
        let mut counts = vec![0u64; size];
        for perm in chunk {
            for set in double_chain(perm).unwrap().sets() {
                counts[set as usize] += 1;
            }
        }
        counts
    };
    let counts = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        let chunk = perms.len().div_ceil(jobs.max(1));
        pool.install(|| {
            perms
                .par_chunks(chunk)
                .map(tally)
                .reduce(
                    || vec![0u64; size],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x += y;
                        }
                        a
                    },
                )
        })
    } else {
        tally(&perms)
    };

    let mut mismatches = Vec::new();
    for mask in 0..size as u64 {
        let expected = count_containing(mask, n)?;
        if BigInt::from(counts[mask as usize]) != expected {
            mismatches.push(format!(
                "{}: enumerated {} vs closed form {}",
                render_set(mask),
                counts[mask as usize],
                expected
            ));
        }
    }
    let matched = size - mismatches.len();
    let mut cert = Certificate::new(
        "audit-double-chains",
        if mismatches.is_empty() { Verdict::Pass } else { Verdict::Fail },
    );
    cert.n = Some(n as u64);
    cert.value = Some(format!("{matched}/{size} subset counts match"));
    cert.expected = Some(format!("{size}/{size}"));
    cert.notes.push(format!(
        "enumerated all {} permutations, 2n = {} sets each",
        perms.len(),
        2 * n
    ));
    cert.notes.push(
        "closed form: n! for {} and the full set, else 2 |F|! (n-|F|)!".into(),
    );
    for miss in mismatches.into_iter().take(5) {
        cert.notes.push(format!("mismatch at {miss}"));
    }
    cert.elapsed = Some(start.elapsed());
    Ok(cert)
}

// ---------------------------------------------------------------------------
// The doubly infinite double chain.

/// Which of a column's two points: the primary chain's or the secondary's.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    L,
    M,
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Role::L => "L",
            Role::M => "M",
        })
    }
}

/// Strict order of the infinite double chain: earlier columns lie below
/// later ones, except that M's in adjacent columns are incomparable.
pub fn window_less(a: (Role, i64), b: (Role, i64)) -> bool {
    a.1 < b.1 && !(a.0 == Role::M && b.0 == Role::M && b.1 == a.1 + 1)
}

/// A list of infinite-double-chain points acting as an embedding host.
pub(crate) struct WindowElems<'a>(pub &'a [(Role, i64)]);

impl HostOrder for WindowElems<'_> {
    fn size(&self) -> usize {
        self.0.len()
    }

    fn less(&self, a: usize, b: usize) -> bool {
        window_less(self.0[a], self.0[b])
    }
}

/// The finite window of columns lo..=hi as a poset; each column
/// contributes its L point (even index) then its M point (odd index).
pub fn window_poset(lo: i64, hi: i64) -> Result<Poset, DChainError> {
    window_elems(lo, hi).map(|elems| window_restrict(&elems))
}

fn window_elems(lo: i64, hi: i64) -> Result<Vec<(Role, i64)>, DChainError> {
    if lo > hi || hi - lo >= WINDOW_MAX_COLS {
        return Err(DChainError::BadWindow { lo, hi });
    }
    Ok((lo..=hi).flat_map(|c| [(Role::L, c), (Role::M, c)]).collect())
}

fn window_restrict(elems: &[(Role, i64)]) -> Poset {
    let n = elems.len();
    let mut lt = vec![false; n * n];
    for (i, &a) in elems.iter().enumerate() {
        for (j, &b) in elems.iter().enumerate() {
            lt[i * n + j] = window_less(a, b);
        }
    }
    Poset::from_lt_matrix(n, lt).expect("window order is a strict order")
}

/// Decides whether every (2m+1)-point subset of the infinite double chain
/// contains the pattern. m may be a half-integer. Complete search over
/// configurations up to translation, gap compression, and isomorphism;
/// exceeding the budget yields an inconclusive certificate.
pub fn window_condition(
    pattern: &Poset,
    m: Rational64,
    budget: &Budget,
) -> Result<Certificate, DChainError> {
    let s = window_points(m)?;
    let mut cert = Certificate::new("window-condition", Verdict::Pass);
    cert.m = Some(m.to_string());
    if *m.denom() == 1 {
        cert.notes.push(format!(
            "m integral: checking {s}-point subsets, the level-count regime"
        ));
    } else {
        cert.notes.push(format!(
            "m half-integral: checking {s}-point subsets, the averaged regime only"
        ));
    }

    if s < pattern.size() {
        let free: Vec<(Role, i64)> = (0..s as i64).map(|c| (Role::L, c)).collect();
        cert.verdict = Verdict::Fail;
        cert.value = Some(format!(
            "a {s}-point subset cannot cover a {}-element pattern",
            pattern.size()
        ));
        cert.witness = Some(Witness::WindowSubset(free));
        return Ok(cert);
    }

    let mut search = WindowSearch {
        pattern,
        s,
        meter: Meter::new(budget),
        memo: HashMap::new(),
        stored: 0,
        dedup_hits: 0,
    };
    let mut elems = Vec::with_capacity(s);
    let outcome = search.dfs(&mut elems, 0, false);
    cert.notes.push(format!(
        "explored {} configurations, {} merged as isomorphic repeats",
        search.meter.nodes, search.dedup_hits
    ));
    cert.elapsed = Some(search.meter.elapsed());
    match outcome {
        Walk::Found(subset) => {
            debug_assert!(
                search_host(pattern, &WindowElems(&subset), None).is_none(),
                "counterexample must be pattern-free"
            );
            cert.verdict = Verdict::Fail;
            cert.value = Some(format!("found a pattern-free {s}-point subset"));
            cert.witness = Some(Witness::WindowSubset(subset));
        }
        Walk::Exhausted => {
            cert.verdict = Verdict::Pass;
            cert.value = Some(format!("every {s}-point subset contains the pattern"));
        }
        Walk::Cut => {
            cert.verdict = Verdict::Inconclusive;
            cert.value = Some(format!(
                "search stopped after {} configurations",
                search.meter.nodes
            ));
            cert.notes.push("raise the budget for a definite verdict".into());
        }
    }
    Ok(cert)
}

/// Number of points 2m+1 for integer or half-integer m >= 0.
fn window_points(m: Rational64) -> Result<usize, DChainError> {
    let bad = || DChainError::InvalidM(m.to_string());
    if m < Rational64::zero() {
        return Err(bad());
    }
    let s = match *m.denom() {
        1 => m.numer().checked_mul(2).and_then(|d| d.checked_add(1)).ok_or_else(bad)?,
        2 => m.numer() + 1,
        _ => return Err(bad()),
    } as usize;
    if s > 4096 {
        return Err(DChainError::WindowTooDeep(s));
    }
    Ok(s)
}

enum Walk {
    Found(Vec<(Role, i64)>),
    Exhausted,
    Cut,
}

/// Depth-first search over canonical column configurations. Columns are
/// laid out left to right starting at 0; consecutive occupied columns sit
/// at gap 1, or gap 2 exactly when both carry an M point (the only case
/// where spacing changes the induced order). Partial configurations are
/// pattern-free throughout, and states already seen up to isomorphism
/// (marking the frontier M, whose adjacency still matters) are skipped.
struct WindowSearch<'a> {
    pattern: &'a Poset,
    s: usize,
    meter: Meter,
    memo: HashMap<u64, Vec<(Poset, Option<usize>)>>,
    stored: usize,
    dedup_hits: u64,
}

/// Keep at most this many memoized states; past it the search stays
/// complete but stops recording new states.
const MEMO_CAP: usize = 1_000_000;

impl WindowSearch<'_> {
    fn dfs(&mut self, elems: &mut Vec<(Role, i64)>, last_col: i64, last_has_m: bool) -> Walk {
        if !self.meter.tick() {
            return Walk::Cut;
        }
        if elems.len() == self.s {
            return Walk::Found(elems.clone());
        }
        if !elems.is_empty() && !self.visit(elems, last_col) {
            return Walk::Exhausted;
        }

        for roles in [&[Role::L][..], &[Role::M][..], &[Role::L, Role::M][..]] {
            if elems.len() + roles.len() > self.s {
                continue;
            }
            let adds_m = roles.contains(&Role::M);
            let gaps: &[i64] = if elems.is_empty() {
                &[0]
            } else if last_has_m && adds_m {
                &[1, 2]
            } else {
                &[1]
            };
            for &gap in gaps {
                let col = if elems.is_empty() { 0 } else { last_col + gap };
                let base = elems.len();
                for &r in roles {
                    elems.push((r, col));
                }
                let blocked = (base..elems.len()).any(|idx| {
                    search_host(self.pattern, &WindowElems(elems), Some(idx)).is_some()
                });
                if !blocked {
                    match self.dfs(elems, col, adds_m) {
                        Walk::Exhausted => {}
                        stop => {
                            elems.truncate(base);
                            return stop;
                        }
                    }
                }
                elems.truncate(base);
            }
        }
        Walk::Exhausted
    }

    /// True when this state is new (and now recorded); false when an
    /// isomorphic state was already explored.
    fn visit(&mut self, elems: &[(Role, i64)], last_col: i64) -> bool {
        let poset = window_restrict(elems);
        let frontier = elems.iter().position(|&(r, c)| r == Role::M && c == last_col);
        let sig = state_signature(&poset, frontier);
        if let Some(bucket) = self.memo.get(&sig) {
            for (seen, seen_frontier) in bucket {
                let equivalent = match (frontier, seen_frontier) {
                    (None, None) => poset.iso_map(seen, None).is_some(),
                    (Some(a), Some(b)) => poset.iso_map(seen, Some((a, *b))).is_some(),
                    _ => false,
                };
                if equivalent {
                    self.dedup_hits += 1;
                    return false;
                }
            }
        }
        if self.stored < MEMO_CAP {
            self.memo.entry(sig).or_default().push((poset, frontier));
            self.stored += 1;
        }
        true
    }
}

/// Isomorphism-invariant hash of a state, distinguishing the frontier M.
fn state_signature(p: &Poset, frontier: Option<usize>) -> u64 {
    let n = p.size();
    let mut colors: Vec<u64> = (0..n)
        .map(|v| {
            let mark = if Some(v) == frontier { 0xf007 } else { 1 };
            mix(mix(mark, p.down_count(v) as u64), p.up_count(v) as u64)
        })
        .collect();
    for _ in 0..2 {
        let mut next = Vec::with_capacity(n);
        for v in 0..n {
            let mut h = mix(colors[v], 0x517c);
            let mut lower: Vec<u64> = p.below(v).map(|u| colors[u]).collect();
            let mut upper: Vec<u64> = p.above(v).map(|u| colors[u]).collect();
            lower.sort_unstable();
            upper.sort_unstable();
            for c in lower {
                h = mix(h, c);
            }
            h = mix(h, 0x2b5d);
            for c in upper {
                h = mix(h, c);
            }
            next.push(h);
        }
        colors = next;
    }
    colors.sort_unstable();
    let mut h = mix(0x5747, n as u64);
    for c in colors {
        h = mix(h, c);
    }
    h
}
