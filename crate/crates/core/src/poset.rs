//! Finite posets stored as full strict-order matrices.
//!
//! Sizes stay small (patterns of a couple dozen elements, hosts of a few
//! hundred), so every poset keeps its complete `<` relation as an n x n
//! boolean matrix rather than a Hasse diagram. Comparability queries are
//! then a single lookup and composition is pure matrix filling.

use num_rational::Rational64;
use thiserror::Error;

/// Largest poset accepted by [`Poset::is_isomorphic`].
pub const ISO_SIZE_LIMIT: usize = 25;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PosetError {
    #[error("unknown base poset `{0}` (expected one of E, B, D3, Q, R, S, S')")]
    UnknownBase(String),
    #[error("relation matrix has {got} entries, expected {expected} for {n} elements")]
    MatrixShape { n: usize, expected: usize, got: usize },
    #[error("poset must have at least one element")]
    Empty,
    #[error("element {0} compares below itself")]
    Reflexive(usize),
    #[error("elements {0} and {1} compare below each other")]
    Asymmetry(usize, usize),
    #[error("missing transitive pair: {0} < {1} < {2} but not {0} < {2}")]
    NotTransitive(usize, usize, usize),
    #[error("relation {0} < {1} is out of range for {2} elements")]
    RelationOutOfRange(usize, usize, usize),
    #[error("relations contain a cycle through element {0}")]
    Cycle(usize),
    #[error("left factor of `*` has no greatest element")]
    NoGreatestInLeft,
    #[error("right factor of `*` has no least element")]
    NoLeastInRight,
    #[error("isomorphism test limited to {ISO_SIZE_LIMIT} elements, got {0}")]
    IsoTooLarge(usize),
    #[error("poset text: {0}")]
    Parse(String),
}

/// The seven named building-block posets.
///
/// Each is a stack of complete bipartite layers; the tuple of layer sizes
/// from bottom to top determines it:
///
/// * `E`  single element, (1)
/// * `B`  butterfly, (2, 2)
/// * `D3` diamond with three middle elements, (1, 3, 1)
/// * `Q`  (2, 3, 2)
/// * `R`  (1, 4, 4, 1)
/// * `S`  (1, 4, 2)
/// * `SP` written `S'`, the dual of S, (2, 4, 1)
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseName {
    E,
    B,
    D3,
    Q,
    R,
    S,
    SP,
}

impl BaseName {
    pub const ALL: [BaseName; 7] = [
        BaseName::E,
        BaseName::B,
        BaseName::D3,
        BaseName::Q,
        BaseName::R,
        BaseName::S,
        BaseName::SP,
    ];

    pub fn levels(self) -> &'static [usize] {
        match self {
            BaseName::E => &[1],
            BaseName::B => &[2, 2],
            BaseName::D3 => &[1, 3, 1],
            BaseName::Q => &[2, 3, 2],
            BaseName::R => &[1, 4, 4, 1],
            BaseName::S => &[1, 4, 2],
            BaseName::SP => &[2, 4, 1],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BaseName::E => "E",
            BaseName::B => "B",
            BaseName::D3 => "D3",
            BaseName::Q => "Q",
            BaseName::R => "R",
            BaseName::S => "S",
            BaseName::SP => "S'",
        }
    }

    pub fn parse(name: &str) -> Result<BaseName, PosetError> {
        match name {
            "E" => Ok(BaseName::E),
            "B" => Ok(BaseName::B),
            "D3" => Ok(BaseName::D3),
            "Q" => Ok(BaseName::Q),
            "R" => Ok(BaseName::R),
            "S" => Ok(BaseName::S),
            "S'" | "Sp" => Ok(BaseName::SP),
            other => Err(PosetError::UnknownBase(other.to_string())),
        }
    }
}

impl std::fmt::Display for BaseName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A finite poset on elements `0..n` with its full strict order.
#[derive(Clone, Debug)]
pub struct Poset {
    n: usize,
    lt: Vec<bool>,
    levels: Option<Vec<usize>>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.lt == other.lt
    }
}

impl Eq for Poset {}

/// Builds one of the seven base posets by name.
pub fn base_poset(name: &str) -> Result<Poset, PosetError> {
    Ok(Poset::base(BaseName::parse(name)?))
}

impl Poset {
    /// Validates and wraps a full strict-order matrix (row-major, `lt[a*n+b]`
    /// meaning `a < b`).
    pub fn from_lt_matrix(n: usize, lt: Vec<bool>) -> Result<Poset, PosetError> {
        if n == 0 {
            return Err(PosetError::Empty);
        }
        if lt.len() != n * n {
            return Err(PosetError::MatrixShape { n, expected: n * n, got: lt.len() });
        }
        let p = Poset { n, lt, levels: None };
        p.validate()?;
        Ok(p)
    }

    /// Builds a poset from generating relations `a < b`, taking the
    /// transitive closure and rejecting cycles.
    pub fn from_relations(n: usize, relations: &[(usize, usize)]) -> Result<Poset, PosetError> {
        if n == 0 {
            return Err(PosetError::Empty);
        }
        let mut lt = vec![false; n * n];
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(PosetError::RelationOutOfRange(a, b, n));
            }
            lt[a * n + b] = true;
        }
        transitive_close(n, &mut lt);
        for v in 0..n {
            if lt[v * n + v] {
                return Err(PosetError::Cycle(v));
            }
        }
        Ok(Poset { n, lt, levels: None })
    }

    /// Stack of complete bipartite layers: every element of layer i sits
    /// below every element of each later layer.
    pub fn from_levels(sizes: &[usize]) -> Poset {
        let n: usize = sizes.iter().sum();
        assert!(n > 0, "layer sizes must sum to a positive count");
        let mut lt = vec![false; n * n];
        let mut tags = Vec::with_capacity(n);
        let mut start = 0usize;
        for (tag, &sz) in sizes.iter().enumerate() {
            for a in start..start + sz {
                tags.push(tag);
                for b in start + sz..n {
                    lt[a * n + b] = true;
                }
            }
            start += sz;
        }
        Poset { n, lt, levels: Some(tags) }
    }

    pub fn base(name: BaseName) -> Poset {
        Poset::from_levels(name.levels())
    }

    /// Parses the `poset <n>` text format: a header line, then one `a < b`
    /// relation per line with 0-based elements. Blank lines are skipped.
    pub fn parse_text(text: &str) -> Result<Poset, PosetError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| PosetError::Parse("empty input".into()))?;
        let n: usize = header
            .strip_prefix("poset")
            .map(str::trim)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                PosetError::Parse(format!("expected header `poset <n>`, got `{header}`"))
            })?;
        let mut relations = Vec::new();
        for line in lines {
            let (a, b) = line
                .split_once('<')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| PosetError::Parse(format!("expected `a < b`, got `{line}`")))?;
            relations.push((a, b));
        }
        Poset::from_relations(n, &relations)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// True when `a < b` in this poset.
    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.lt[a * self.n + b]
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.lt(a, b) || self.lt(b, a)
    }

    /// Number of ordered pairs (a, b) with a < b.
    pub fn strict_pairs(&self) -> usize {
        self.lt.iter().filter(|&&x| x).count()
    }

    pub fn below(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.lt(u, v))
    }

    pub fn above(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.lt(v, u))
    }

    pub fn down_count(&self, v: usize) -> usize {
        self.below(v).count()
    }

    pub fn up_count(&self, v: usize) -> usize {
        self.above(v).count()
    }

    /// Per-element layer tags when the poset was built from layers.
    /// Purely descriptive; no operation depends on them.
    pub fn level_tags(&self) -> Option<&[usize]> {
        self.levels.as_deref()
    }

    /// Checks irreflexivity, asymmetry, and transitivity of the stored matrix.
    pub fn validate(&self) -> Result<(), PosetError> {
        let n = self.n;
        for a in 0..n {
            if self.lt(a, a) {
                return Err(PosetError::Reflexive(a));
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if self.lt(a, b) && self.lt(b, a) {
                    return Err(PosetError::Asymmetry(a, b));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !self.lt(a, b) {
                    continue;
                }
                for c in 0..n {
                    if self.lt(b, c) && !self.lt(a, c) {
                        return Err(PosetError::NotTransitive(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }

    /// Series sum: all of `self` strictly below all of `other`.
    pub fn oplus(&self, other: &Poset) -> Poset {
        let n = self.n + other.n;
        let mut lt = vec![false; n * n];
        for a in 0..self.n {
            for b in 0..self.n {
                lt[a * n + b] = self.lt(a, b);
            }
            for b in 0..other.n {
                lt[a * n + self.n + b] = true;
            }
        }
        for a in 0..other.n {
            for b in 0..other.n {
                lt[(self.n + a) * n + self.n + b] = other.lt(a, b);
            }
        }
        Poset { n, lt, levels: None }
    }

    /// Glued product: identifies the greatest element of `self` with the
    /// least element of `other`. Elements of `self` come first, keeping
    /// their indices; the glue point is `self`'s greatest element, and the
    /// remaining elements of `other` follow in their original order.
    pub fn otimes(&self, other: &Poset) -> Result<Poset, PosetError> {
        let top = self.greatest_element().ok_or(PosetError::NoGreatestInLeft)?;
        let bot = other.least_element().ok_or(PosetError::NoLeastInRight)?;
        let n = self.n + other.n - 1;
        // Index map for other's elements, skipping its least.
        let mut right = Vec::with_capacity(other.n);
        let mut next = self.n;
        for b in 0..other.n {
            if b == bot {
                right.push(top);
            } else {
                right.push(next);
                next += 1;
            }
        }
        let mut lt = vec![false; n * n];
        for a in 0..self.n {
            for b in 0..self.n {
                if self.lt(a, b) {
                    lt[a * n + b] = true;
                }
            }
        }
        for a in 0..other.n {
            for b in 0..other.n {
                if other.lt(a, b) {
                    lt[right[a] * n + right[b]] = true;
                }
            }
        }
        // Everything at or below the glue point precedes everything above it.
        for a in 0..self.n {
            if a == top || self.lt(a, top) {
                for b in 0..other.n {
                    if b != bot {
                        lt[a * n + right[b]] = true;
                    }
                }
            }
        }
        debug_assert!(Poset { n, lt: lt.clone(), levels: None }.validate().is_ok());
        Ok(Poset { n, lt, levels: None })
    }

    pub fn greatest_element(&self) -> Option<usize> {
        (0..self.n).find(|&v| self.down_count(v) == self.n - 1)
    }

    pub fn least_element(&self) -> Option<usize> {
        (0..self.n).find(|&v| self.up_count(v) == self.n - 1)
    }

    /// Number of elements in a longest chain.
    pub fn longest_chain(&self) -> usize {
        let n = self.n;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| self.down_count(v));
        let mut len = vec![1usize; n];
        for &v in &order {
            for u in self.below(v) {
                len[v] = len[v].max(len[u] + 1);
            }
        }
        len.into_iter().max().unwrap_or(0)
    }

    /// The double-chain parameter b(P) = (|P| + h(P))/2 - 1, exact.
    pub fn b_value(&self) -> Rational64 {
        Rational64::new((self.n + self.longest_chain()) as i64 - 2, 2)
    }

    pub fn dual(&self) -> Poset {
        let n = self.n;
        let mut lt = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                lt[b * n + a] = self.lt(a, b);
            }
        }
        Poset { n, lt, levels: self.levels.as_ref().map(|tags| {
            let max = *tags.iter().max().unwrap();
            tags.iter().map(|&t| max - t).collect()
        }) }
    }

    /// Induced subposet on the given elements, in the given order.
    pub fn restrict(&self, elems: &[usize]) -> Poset {
        let n = elems.len();
        assert!(n > 0, "restriction needs at least one element");
        let mut lt = vec![false; n * n];
        for (i, &a) in elems.iter().enumerate() {
            for (j, &b) in elems.iter().enumerate() {
                lt[i * n + j] = self.lt(a, b);
            }
        }
        Poset { n, lt, levels: None }
    }

    /// Order-isomorphism test, guarded to [`ISO_SIZE_LIMIT`] elements.
    pub fn is_isomorphic(&self, other: &Poset) -> Result<bool, PosetError> {
        let big = self.n.max(other.n);
        if big > ISO_SIZE_LIMIT {
            return Err(PosetError::IsoTooLarge(big));
        }
        Ok(self.iso_map(other, None).is_some())
    }

    /// Searches for an isomorphism, optionally forcing `pin.0 -> pin.1`.
    /// Returns the image of each element of `self` when one exists.
    pub(crate) fn iso_map(&self, other: &Poset, pin: Option<(usize, usize)>) -> Option<Vec<usize>> {
        if self.n != other.n {
            return None;
        }
        let ca = refine_colors(self);
        let cb = refine_colors(other);
        let mut sa = ca.clone();
        let mut sb = cb.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return None;
        }
        if let Some((a, b)) = pin {
            if ca[a] != cb[b] {
                return None;
            }
        }
        let n = self.n;
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if let Some((a, b)) = pin {
            map[a] = b;
            used[b] = true;
        }
        // Assign rarest colors first to fail fast.
        let mut order: Vec<usize> = (0..n).filter(|&v| map[v] == usize::MAX).collect();
        let mut freq = std::collections::HashMap::new();
        for &c in &ca {
            *freq.entry(c).or_insert(0usize) += 1;
        }
        order.sort_by_key(|&v| (freq[&ca[v]], v));
        if assign(self, other, &ca, &cb, &order, 0, &mut map, &mut used) {
            Some(map)
        } else {
            None
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn assign(
    p: &Poset,
    q: &Poset,
    ca: &[u64],
    cb: &[u64],
    order: &[usize],
    pos: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if pos == order.len() {
        return true;
    }
    let v = order[pos];
    'cand: for w in 0..q.size() {
        if used[w] || cb[w] != ca[v] {
            continue;
        }
        for (u, &img) in map.iter().enumerate() {
            if img == usize::MAX {
                continue;
            }
            if p.lt(u, v) != q.lt(img, w) || p.lt(v, u) != q.lt(w, img) {
                continue 'cand;
            }
        }
        map[v] = w;
        used[w] = true;
        if assign(p, q, ca, cb, order, pos + 1, map, used) {
            return true;
        }
        map[v] = usize::MAX;
        used[w] = false;
    }
    false
}

/// Structure-determined element colors: start from (down, up) degree pairs
/// and repeatedly fold in the sorted colors of each element's strict
/// down-set and up-set. The result is identical for isomorphic posets.
fn refine_colors(p: &Poset) -> Vec<u64> {
    let n = p.size();
    let mut colors: Vec<u64> =
        (0..n).map(|v| mix(mix(17, p.down_count(v) as u64), p.up_count(v) as u64)).collect();
    for _ in 0..3 {
        let mut next = Vec::with_capacity(n);
        for v in 0..n {
            let mut h = mix(colors[v], 0x9e37);
            let mut lower: Vec<u64> = p.below(v).map(|u| colors[u]).collect();
            let mut upper: Vec<u64> = p.above(v).map(|u| colors[u]).collect();
            lower.sort_unstable();
            upper.sort_unstable();
            for c in lower {
                h = mix(h, c);
            }
            h = mix(h, 0x85eb);
            for c in upper {
                h = mix(h, c);
            }
            next.push(h);
        }
        colors = next;
    }
    colors
}

/// splitmix64-style combiner, deterministic across runs.
pub(crate) fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn transitive_close(n: usize, lt: &mut [bool]) {
    for k in 0..n {
        for a in 0..n {
            if lt[a * n + k] {
                for b in 0..n {
                    if lt[k * n + b] {
                        lt[a * n + b] = true;
                    }
                }
            }
        }
    }
}
