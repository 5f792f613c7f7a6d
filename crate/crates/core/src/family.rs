//! Families of subsets of an n-element ground set, stored as bitmasks.
//!
//! The ground set is {1, ..., n} with element i on bit i-1, capped at the
//! word width n <= 64. Families keep their members sorted by (cardinality,
//! numeric value) so equal families compare equal and printed output is
//! stable.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

/// Ground sets larger than this cannot be represented in a u64 mask.
pub const MAX_GROUND: u32 = 64;

/// Refuse to materialize level families beyond this many members.
pub const MAX_FAMILY_MEMBERS: u64 = 1 << 22;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("ground set size {0} exceeds the {MAX_GROUND}-bit word width")]
    GroundTooLarge(u32),
    #[error("member {mask:#x} uses elements outside the {n}-element ground set")]
    MemberOutOfRange { mask: u64, n: u32 },
    #[error("duplicate member {{{0}}}")]
    Duplicate(String),
    #[error("levels k={k}..k+{m} do not fit in 0..={n}")]
    LevelsOutOfRange { n: u32, k: u32, m: u32 },
    #[error("middle levels need 1 <= m <= n+1, got m={m} for n={n}")]
    MiddleOutOfRange { n: u32, m: u32 },
    #[error("level family would have {0} members, over the {MAX_FAMILY_MEMBERS} cap")]
    TooManyMembers(BigInt),
    #[error("family text: {0}")]
    Parse(String),
}

/// A family of distinct subsets of {1, ..., n}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    n: u32,
    members: Vec<u64>,
}

impl Family {
    /// Sorts the given masks into a family, rejecting out-of-range bits and
    /// duplicates.
    pub fn new(n: u32, mut members: Vec<u64>) -> Result<Family, FamilyError> {
        if n > MAX_GROUND {
            return Err(FamilyError::GroundTooLarge(n));
        }
        let ground = ground_mask(n);
        for &m in &members {
            if m & !ground != 0 {
                return Err(FamilyError::MemberOutOfRange { mask: m, n });
            }
        }
        members.sort_unstable_by_key(|&m| (m.count_ones(), m));
        for w in members.windows(2) {
            if w[0] == w[1] {
                return Err(FamilyError::Duplicate(render_set(w[0])));
            }
        }
        Ok(Family { n, members })
    }

    pub fn empty(n: u32) -> Family {
        Family { n, members: Vec::new() }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_member(&self, mask: u64) -> bool {
        self.members.binary_search_by_key(&(mask.count_ones(), mask), |&m| (m.count_ones(), m)).is_ok()
    }

    /// The m consecutive levels of sizes k, k+1, ..., k+m-1.
    pub fn levels(n: u32, k: u32, m: u32) -> Result<Family, FamilyError> {
        if n > MAX_GROUND {
            return Err(FamilyError::GroundTooLarge(n));
        }
        if m > 0 && k as u64 + m as u64 - 1 > n as u64 {
            return Err(FamilyError::LevelsOutOfRange { n, k, m });
        }
        let mut count = BigInt::zero();
        for size in k..k + m {
            count += binomial(n as u64, size as u64);
        }
        if count > BigInt::from(MAX_FAMILY_MEMBERS) {
            return Err(FamilyError::TooManyMembers(count));
        }
        let mut members = Vec::new();
        for size in k..k + m {
            push_level(n, size, &mut members);
        }
        members.sort_unstable_by_key(|&m| (m.count_ones(), m));
        Ok(Family { n, members })
    }

    /// The m middle levels: sizes floor((n-m+1)/2) through floor((n+m-1)/2).
    /// These are the m levels whose binomial coefficients are largest.
    pub fn middle_levels(n: u32, m: u32) -> Result<Family, FamilyError> {
        if m == 0 || m > n + 1 {
            return Err(FamilyError::MiddleOutOfRange { n, m });
        }
        Family::levels(n, (n + 1 - m) / 2, m)
    }

    /// Complements every member within the ground set.
    pub fn complements(&self) -> Family {
        let ground = ground_mask(self.n);
        let mut members: Vec<u64> = self.members.iter().map(|&m| !m & ground).collect();
        members.sort_unstable_by_key(|&m| (m.count_ones(), m));
        Family { n: self.n, members }
    }

    /// Parses the `family <n>` text format: a header line, then one set
    /// literal per line, `{}` or `{i,j,...}` with 1-based elements.
    pub fn parse_text(text: &str) -> Result<Family, FamilyError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| FamilyError::Parse("empty input".into()))?;
        let n: u32 = header
            .strip_prefix("family")
            .map(str::trim)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                FamilyError::Parse(format!("expected header `family <n>`, got `{header}`"))
            })?;
        if n > MAX_GROUND {
            return Err(FamilyError::GroundTooLarge(n));
        }
        let mut members = Vec::new();
        for line in lines {
            let inner = line
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| FamilyError::Parse(format!("expected `{{...}}`, got `{line}`")))?
                .trim();
            let mut mask = 0u64;
            if !inner.is_empty() {
                for part in inner.split(',') {
                    let e: u32 = part.trim().parse().map_err(|_| {
                        FamilyError::Parse(format!("bad element `{}` in `{line}`", part.trim()))
                    })?;
                    if e == 0 || e > n {
                        return Err(FamilyError::Parse(format!(
                            "element {e} outside 1..={n} in `{line}`"
                        )));
                    }
                    mask |= 1 << (e - 1);
                }
            }
            members.push(mask);
        }
        members.sort_unstable_by_key(|&m| (m.count_ones(), m));
        for w in members.windows(2) {
            if w[0] == w[1] {
                return Err(FamilyError::Duplicate(render_set(w[0])));
            }
        }
        Ok(Family { n, members })
    }

    /// Renders back to the `family <n>` text format.
    pub fn render_text(&self) -> String {
        let mut out = format!("family {}\n", self.n);
        for &m in &self.members {
            out.push_str(&render_set(m));
            out.push('\n');
        }
        out
    }
}

/// Prints a mask as a 1-based set literal, `{}` or `{i,j,...}`.
pub fn render_set(mask: u64) -> String {
    let elems: Vec<String> =
        (0..64).filter(|&i| mask >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", elems.join(","))
}

pub fn ground_mask(n: u32) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn push_level(n: u32, size: u32, out: &mut Vec<u64>) {
    if size > n {
        return;
    }
    if size == 0 {
        out.push(0);
        return;
    }
    // Lexicographic combinations by index vector; safe at n = 64 where
    // Gosper's next-mask trick can overflow.
    let mut idx: Vec<u32> = (0..size).collect();
    loop {
        out.push(idx.iter().fold(0u64, |m, &i| m | 1 << i));
        let mut j = size as i64 - 1;
        while j >= 0 && idx[j as usize] == n - size + j as u32 {
            j -= 1;
        }
        if j < 0 {
            return;
        }
        idx[j as usize] += 1;
        for t in j as usize + 1..size as usize {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// Sum of the m largest binomial coefficients of order n: the maximum size
/// of a union of m levels. Zero when m = 0 and the full 2^n once m >= n+1.
pub fn sigma(n: u32, m: u32) -> BigInt {
    if m == 0 {
        return BigInt::zero();
    }
    if m > n {
        return BigInt::one() << n;
    }
    let lo = (n - m).div_ceil(2);
    (lo..lo + m).map(|i| binomial(n as u64, i as u64)).sum()
}
