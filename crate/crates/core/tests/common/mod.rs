//! Shared helpers for integration tests: an intentionally naive embedding
//! oracle and seeded random generators for posets, families, and
//! expressions.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use subposet::{Family, Poset, PosetExpr};
use subposet::poset::BaseName;

/// Tries every injective map and checks all pattern relations at the
/// leaf. No pruning, no ordering heuristics; slow on purpose so it
/// shares nothing with the search under test.
pub fn embeds_exhaustive(pattern: &Poset, host: &Poset) -> bool {
    let k = pattern.size();
    let h = host.size();
    if k > h {
        return false;
    }
    fn rec(q: usize, pattern: &Poset, host: &Poset, map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        if q == pattern.size() {
            for a in 0..pattern.size() {
                for b in 0..pattern.size() {
                    if pattern.lt(a, b) && !host.lt(map[a], map[b]) {
                        return false;
                    }
                }
            }
            return true;
        }
        for r in 0..host.size() {
            if used[r] {
                continue;
            }
            map.push(r);
            used[r] = true;
            if rec(q + 1, pattern, host, map, used) {
                return true;
            }
            map.pop();
            used[r] = false;
        }
        false
    }
    rec(0, pattern, host, &mut Vec::with_capacity(k), &mut vec![false; h])
}

/// A random poset on at most max_n elements: edges i -> j sampled for
/// i < j, then transitively closed.
pub fn random_poset(rng: &mut ChaCha8Rng, max_n: usize) -> Poset {
    let n = rng.gen_range(1..=max_n);
    let mut rels = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.35) {
                rels.push((i, j));
            }
        }
    }
    Poset::from_relations(n, &rels).unwrap()
}

/// A random family over a ground set of at most max_n elements, each
/// subset kept with probability 0.4.
pub fn random_family(rng: &mut ChaCha8Rng, max_n: u32) -> Family {
    let n = rng.gen_range(2..=max_n);
    let members: Vec<u64> = (0..1u64 << n).filter(|_| rng.gen_bool(0.4)).collect();
    Family::new(n, members).unwrap()
}

pub fn random_base(rng: &mut ChaCha8Rng) -> BaseName {
    BaseName::ALL[rng.gen_range(0..BaseName::ALL.len())]
}

fn random_tree(rng: &mut ChaCha8Rng, depth: u32) -> PosetExpr {
    if depth == 0 || rng.gen_bool(0.35) {
        PosetExpr::Base(random_base(rng))
    } else if rng.gen_bool(0.5) {
        PosetExpr::oplus(random_tree(rng, depth - 1), random_tree(rng, depth - 1))
    } else {
        PosetExpr::otimes(random_tree(rng, depth - 1), random_tree(rng, depth - 1))
    }
}

/// A random expression of the given depth whose glued products are all
/// legal, found by redrawing until evaluation succeeds.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> (PosetExpr, Poset) {
    loop {
        let expr = random_tree(rng, depth);
        if let Ok(p) = subposet::eval_expr(&expr) {
            return (expr, p);
        }
    }
}
