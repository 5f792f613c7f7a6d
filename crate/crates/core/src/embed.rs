//! Weak-subposet embedding: an injection of a pattern poset into a host
//! order that carries every strict pattern relation to a strict host
//! relation. The host may order images of incomparable pattern elements;
//! nothing is required of those pairs.
//!
//! The search assigns pattern elements in a fixed most-constrained-first
//! order and keeps a candidate bitset per unplaced element, pruned by
//! up/down degree counts and, after each placement, by the host's
//! above/below sets. All ties break toward smaller indices, so the witness
//! an instance produces is reproducible.

use crate::family::Family;
use crate::poset::Poset;

/// A found embedding: `map[q]` is the host element carrying pattern
/// element q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub map: Vec<usize>,
}

/// Anything that can serve as the host side of an embedding search.
pub(crate) trait HostOrder {
    fn size(&self) -> usize;
    fn less(&self, a: usize, b: usize) -> bool;
}

impl HostOrder for Poset {
    fn size(&self) -> usize {
        Poset::size(self)
    }

    fn less(&self, a: usize, b: usize) -> bool {
        self.lt(a, b)
    }
}

/// A family of masks ordered by strict set inclusion.
pub(crate) struct MaskHost<'a> {
    pub masks: &'a [u64],
}

impl HostOrder for MaskHost<'_> {
    fn size(&self) -> usize {
        self.masks.len()
    }

    fn less(&self, a: usize, b: usize) -> bool {
        let (x, y) = (self.masks[a], self.masks[b]);
        x != y && x & !y == 0
    }
}

/// Searches for a weak embedding of `pattern` into `host`.
pub fn embeds_weak(pattern: &Poset, host: &Poset) -> Option<Embedding> {
    search_host(pattern, host, None)
}

/// Checks an embedding claim from scratch: injectivity plus order
/// preservation on every strict pattern pair.
pub fn validate_embedding(pattern: &Poset, host: &Poset, emb: &Embedding) -> bool {
    validate_on(pattern, host, &emb.map)
}

pub(crate) fn validate_on<H: HostOrder>(pattern: &Poset, host: &H, map: &[usize]) -> bool {
    let k = pattern.size();
    if map.len() != k || map.iter().any(|&w| w >= host.size()) {
        return false;
    }
    for a in 0..k {
        for b in 0..k {
            if a != b && map[a] == map[b] {
                return false;
            }
            if pattern.lt(a, b) && !host.less(map[a], map[b]) {
                return false;
            }
        }
    }
    true
}

/// The poset of a family under strict set inclusion, elements in member
/// order.
pub fn family_poset(f: &Family) -> Poset {
    let ms = f.members();
    let n = ms.len();
    assert!(n > 0, "the poset of an empty family has no elements");
    let mut lt = vec![false; n * n];
    for a in 0..n {
        for b in 0..n {
            lt[a * n + b] = ms[a] != ms[b] && ms[a] & !ms[b] == 0;
        }
    }
    Poset::from_lt_matrix(n, lt).expect("set inclusion is a strict order")
}

/// True when no weak copy of `pattern` lies in `f` under set inclusion.
pub fn is_p_free(f: &Family, pattern: &Poset) -> bool {
    search_host(pattern, &MaskHost { masks: f.members() }, None).is_none()
}

/// Embedding search, optionally restricted to embeddings whose image
/// includes the host element `require`.
pub(crate) fn search_host<H: HostOrder>(
    pattern: &Poset,
    host: &H,
    require: Option<usize>,
) -> Option<Embedding> {
    let k = pattern.size();
    let h = host.size();
    if k > h {
        return None;
    }

    // Host above/below bitsets and degree counts, computed once.
    let words = h.div_ceil(64);
    let mut below = vec![0u64; h * words];
    let mut above = vec![0u64; h * words];
    for a in 0..h {
        for b in 0..h {
            if host.less(a, b) {
                above[a * words + b / 64] |= 1 << (b % 64);
                below[b * words + a / 64] |= 1 << (a % 64);
            }
        }
    }
    let down_h: Vec<usize> =
        (0..h).map(|v| below[v * words..(v + 1) * words].iter().map(|w| w.count_ones() as usize).sum()).collect();
    let up_h: Vec<usize> =
        (0..h).map(|v| above[v * words..(v + 1) * words].iter().map(|w| w.count_ones() as usize).sum()).collect();

    let ctx = Ctx {
        k,
        words,
        below_p: (0..k).map(|q| pattern.below(q).collect()).collect(),
        above_p: (0..k).map(|q| pattern.above(q).collect()).collect(),
        below_h: below,
        above_h: above,
        order: {
            let mut o: Vec<usize> = (0..k).collect();
            o.sort_by_key(|&q| (std::cmp::Reverse(pattern.down_count(q) + pattern.up_count(q)), q));
            o
        },
    };

    // Initial candidate sets from the degree filter.
    let mut domains = vec![0u64; k * words];
    for q in 0..k {
        let (dq, uq) = (ctx.below_p[q].len(), ctx.above_p[q].len());
        for w in 0..h {
            if down_h[w] >= dq && up_h[w] >= uq {
                domains[q * words + w / 64] |= 1 << (w % 64);
            }
        }
    }

    match require {
        None => {
            let mut map = vec![usize::MAX; k];
            extend(&ctx, 0, &mut domains, &mut map).then_some(Embedding { map })
        }
        Some(r) => {
            // Pin each pattern element to r in turn; the first branch that
            // completes wins.
            for q in 0..k {
                if domains[q * words + r / 64] >> (r % 64) & 1 == 0 {
                    continue;
                }
                let mut pinned = domains.clone();
                for w in &mut pinned[q * words..(q + 1) * words] {
                    *w = 0;
                }
                pinned[q * words + r / 64] = 1 << (r % 64);
                let mut map = vec![usize::MAX; k];
                if !place(&ctx, q, r, &mut pinned, &mut map) {
                    continue;
                }
                if extend(&ctx, 0, &mut pinned, &mut map) {
                    return Some(Embedding { map });
                }
            }
            None
        }
    }
}

struct Ctx {
    k: usize,
    words: usize,
    below_p: Vec<Vec<usize>>,
    above_p: Vec<Vec<usize>>,
    below_h: Vec<u64>,
    above_h: Vec<u64>,
    order: Vec<usize>,
}

/// Records `map[q] = w` and filters every unplaced domain: w leaves all of
/// them (injectivity), pattern elements above q keep only hosts above w,
/// and dually below. Fails if some unplaced domain empties.
fn place(ctx: &Ctx, q: usize, w: usize, domains: &mut [u64], map: &mut [usize]) -> bool {
    map[q] = w;
    let words = ctx.words;
    for other in 0..ctx.k {
        if map[other] != usize::MAX || other == q {
            continue;
        }
        let dom = &mut domains[other * words..(other + 1) * words];
        dom[w / 64] &= !(1 << (w % 64));
    }
    for &up in &ctx.above_p[q] {
        if map[up] != usize::MAX {
            continue;
        }
        let dom = &mut domains[up * words..(up + 1) * words];
        for (d, &a) in dom.iter_mut().zip(&ctx.above_h[w * words..(w + 1) * words]) {
            *d &= a;
        }
    }
    for &dn in &ctx.below_p[q] {
        if map[dn] != usize::MAX {
            continue;
        }
        let dom = &mut domains[dn * words..(dn + 1) * words];
        for (d, &b) in dom.iter_mut().zip(&ctx.below_h[w * words..(w + 1) * words]) {
            *d &= b;
        }
    }
    for other in 0..ctx.k {
        if map[other] == usize::MAX
            && domains[other * words..(other + 1) * words].iter().all(|&x| x == 0)
        {
            return false;
        }
    }
    true
}

fn extend(ctx: &Ctx, pos: usize, domains: &mut [u64], map: &mut [usize]) -> bool {
    if pos == ctx.k {
        return true;
    }
    let q = ctx.order[pos];
    if map[q] != usize::MAX {
        return extend(ctx, pos + 1, domains, map);
    }
    let words = ctx.words;
    let dom: Vec<u64> = domains[q * words..(q + 1) * words].to_vec();
    for (wi, &word) in dom.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let w = wi * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let mut saved = domains.to_vec();
            if place(ctx, q, w, &mut saved, map) && extend(ctx, pos + 1, &mut saved, map) {
                domains.copy_from_slice(&saved);
                return true;
            }
            map[q] = usize::MAX;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{BaseName, Poset};
    use proptest::prelude::*;

    /// Exhaustive reference: try every injective map.
    fn embeds_brute(pattern: &Poset, host: &Poset) -> bool {
        fn go(pattern: &Poset, host: &Poset, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
            let q = map.len();
            if q == pattern.size() {
                return true;
            }
            for w in 0..host.size() {
                if used[w] {
                    continue;
                }
                let ok = (0..q).all(|p| {
                    (!pattern.lt(p, q) || host.lt(map[p], w))
                        && (!pattern.lt(q, p) || host.lt(w, map[p]))
                });
                if ok {
                    map.push(w);
                    used[w] = true;
                    if go(pattern, host, map, used) {
                        return true;
                    }
                    map.pop();
                    used[w] = false;
                }
            }
            false
        }
        go(pattern, host, &mut Vec::new(), &mut vec![false; host.size()])
    }

    fn chain(k: usize) -> Poset {
        Poset::from_levels(&vec![1; k])
    }

    #[test]
    fn single_element_embeds_anywhere() {
        let e = Poset::base(BaseName::E);
        let b = Poset::base(BaseName::B);
        let emb = embeds_weak(&e, &b).unwrap();
        assert!(validate_embedding(&e, &b, &emb));
    }

    #[test]
    fn butterfly_needs_two_by_two() {
        let b = Poset::base(BaseName::B);
        let d3 = Poset::base(BaseName::D3);
        // D3 has only one minimal and one maximal element, so no two
        // elements share two upper covers from below.
        assert!(embeds_weak(&b, &d3).is_none());
        assert!(embeds_weak(&d3, &b).is_none());
        let q = Poset::base(BaseName::Q);
        let emb = embeds_weak(&b, &q).unwrap();
        assert!(validate_embedding(&b, &q, &emb));
    }

    #[test]
    fn chains_embed_into_taller_hosts() {
        let d3 = Poset::base(BaseName::D3);
        assert!(embeds_weak(&chain(3), &d3).is_some());
        assert!(embeds_weak(&chain(4), &d3).is_none());
    }

    #[test]
    fn weak_embedding_ignores_extra_relations() {
        // Two incomparable pattern elements may land on a chain.
        let anti = Poset::from_relations(2, &[]).unwrap();
        let emb = embeds_weak(&anti, &chain(2)).unwrap();
        assert!(validate_embedding(&anti, &chain(2), &emb));
    }

    #[test]
    fn family_poset_orders_by_inclusion() {
        // Members sort by (size, value): {}, {1}, {3}, {1,2}.
        let f = Family::new(3, vec![0b000, 0b001, 0b011, 0b100]).unwrap();
        let p = family_poset(&f);
        assert_eq!(p.size(), 4);
        assert!(p.lt(0, 1)); // {} < {1}
        assert!(p.lt(1, 3)); // {1} < {1,2}
        assert!(!p.comparable(2, 3)); // {3} vs {1,2}
        assert_eq!(p.longest_chain(), 3);
    }

    #[test]
    fn middle_levels_avoid_the_diamond() {
        // e(D3) = 3: three consecutive levels never hold the diamond,
        // four do (the bottom fans out to three singletons).
        let d3 = Poset::base(BaseName::D3);
        let three = Family::middle_levels(4, 3).unwrap();
        assert!(is_p_free(&three, &d3));
        let four = Family::middle_levels(4, 4).unwrap();
        assert!(!is_p_free(&four, &d3));
    }

    #[test]
    fn empty_family_is_free_of_everything() {
        let f = Family::empty(3);
        for name in BaseName::ALL {
            assert!(is_p_free(&f, &Poset::base(name)));
        }
    }

    #[test]
    fn required_element_variant() {
        let b = Poset::base(BaseName::B);
        // In the power set of [3], every member sits in some weak butterfly
        // copy; {} for instance joins {1} below {1,2} and {1,3}.
        let f3 = Family::levels(3, 0, 4).unwrap();
        let host3 = MaskHost { masks: f3.members() };
        for r in 0..f3.len() {
            let emb = search_host(&b, &host3, Some(r)).expect("pinned copy exists");
            assert!(emb.map.contains(&r));
            assert!(validate_on(&b, &host3, &emb.map));
        }
        // The power set of [2] has no butterfly at all: only {} has two
        // strict supersets.
        let f2 = Family::levels(2, 0, 3).unwrap();
        let host2 = MaskHost { masks: f2.members() };
        for r in 0..f2.len() {
            assert!(search_host(&b, &host2, Some(r)).is_none());
        }
    }

    fn arb_poset(max_n: usize) -> impl Strategy<Value = Poset> {
        (1..=max_n).prop_flat_map(|n| {
            prop::collection::vec(prop::bool::ANY, n * n).prop_map(move |bits| {
                let mut rels = Vec::new();
                for a in 0..n {
                    for b in a + 1..n {
                        if bits[a * n + b] {
                            rels.push((a, b));
                        }
                    }
                }
                Poset::from_relations(n, &rels).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn search_matches_brute_force(p in arb_poset(4), h in arb_poset(7)) {
            let got = embeds_weak(&p, &h);
            prop_assert_eq!(got.is_some(), embeds_brute(&p, &h));
            if let Some(emb) = got {
                prop_assert!(validate_embedding(&p, &h, &emb));
            }
        }

        #[test]
        fn freeness_is_monotone(n in 1u32..=5, picks in prop::collection::btree_set(0u64..32, 1..12)) {
            let masks: Vec<u64> = picks.iter().map(|&m| m & crate::family::ground_mask(n)).collect();
            let mut dedup = masks;
            dedup.sort_unstable();
            dedup.dedup();
            let f = Family::new(n, dedup.clone()).unwrap();
            let sub = Family::new(n, dedup[..dedup.len() / 2].to_vec()).unwrap();
            let b = Poset::base(BaseName::B);
            if is_p_free(&f, &b) {
                prop_assert!(is_p_free(&sub, &b));
            }
        }

        #[test]
        fn freeness_respects_duality(n in 1u32..=5, picks in prop::collection::btree_set(0u64..32, 0..12)) {
            let masks: Vec<u64> = picks.iter().map(|&m| m & crate::family::ground_mask(n)).collect();
            let mut dedup = masks;
            dedup.sort_unstable();
            dedup.dedup();
            let f = Family::new(n, dedup).unwrap();
            for name in [BaseName::S, BaseName::D3, BaseName::B] {
                let p = Poset::base(name);
                prop_assert_eq!(is_p_free(&f, &p), is_p_free(&f.complements(), &p.dual()));
            }
        }
    }
}
