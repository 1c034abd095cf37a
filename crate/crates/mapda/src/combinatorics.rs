//! Subsets of small ground sets, binomial arithmetic and cyclic regular designs.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest ground set a [`Subset`] can index.
pub const MAX_GROUND: usize = 64;

/// A subset of `[1, 64]` stored as a bit mask (element `x` is bit `x - 1`).
///
/// Ordering is lexicographic on the ascending member lists, so `{1,2} <
/// {1,2,3} < {1,3} < {2}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// Builds a subset from 1-based members; duplicates are rejected.
    pub fn from_members(members: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &x in members {
            if x == 0 || x > MAX_GROUND {
                return Err(invalid(format!("element {x} outside [1, {MAX_GROUND}]")));
            }
            let bit = 1u64 << (x - 1);
            if bits & bit != 0 {
                return Err(invalid(format!("duplicate element {x}")));
            }
            bits |= bit;
        }
        Ok(Subset(bits))
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_GROUND, "ground set too large");
        if n == MAX_GROUND {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> Self {
        assert!((1..=MAX_GROUND).contains(&x));
        Subset(1u64 << (x - 1))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, x: usize) -> bool {
        (1..=MAX_GROUND).contains(&x) && self.0 & (1u64 << (x - 1)) != 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Largest member, or 0 for the empty set.
    pub fn max_element(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Members in ascending order.
    pub fn members(self) -> Members {
        Members(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.members().collect()
    }

    /// Compact label: concatenated digits when `ground <= 9`, otherwise
    /// comma-separated members. The empty set is `"-"`.
    pub fn label(self, ground: usize) -> String {
        if self.is_empty() {
            return "-".to_string();
        }
        let parts: Vec<String> = self.members().map(|x| x.to_string()).collect();
        if ground <= 9 {
            parts.concat()
        } else {
            parts.join(",")
        }
    }

    /// Inverse of [`Subset::label`].
    pub fn parse_label(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(Subset::EMPTY);
        }
        let members: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|p| p.trim().parse::<usize>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| Error::Parse(format!("bad subset label {s:?}"))))
                .collect::<Result<_>>()?
        };
        Subset::from_members(&members)
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let low = diff & diff.wrapping_neg();
        let above = !(low | (low - 1));
        // the set holding the first differing element is smaller unless the
        // other set has run out of elements
        if self.0 & low != 0 {
            if other.0 & above != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        } else if self.0 & above != 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.members().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.members())
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Subset::from_members(&v).map_err(serde::de::Error::custom)
    }
}

/// Iterator over the members of a [`Subset`].
#[derive(Clone)]
pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let x = self.0.trailing_zeros() as usize + 1;
        self.0 &= self.0 - 1;
        Some(x)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

/// `C(n, k)` in 64 bits; zero when `k < 0` or `k > n`.
pub fn binom(n: u64, k: i64) -> Result<u64> {
    if k < 0 || k as u64 > n {
        return Ok(0);
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::Overflow("binomial coefficient"));
        }
    }
    Ok(acc as u64)
}

/// `C(n, k)` for signed arguments; zero outside `0 <= k <= n`.
pub fn binom_i(n: i64, k: i64) -> Result<u64> {
    if n < 0 {
        return Ok(0);
    }
    binom(n as u64, k)
}

/// `C(n, k)` with arbitrary precision.
pub fn binom_big(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::from(0u32);
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Checked least common multiple; `lcm(0, x) = 0`.
pub fn lcm(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / a.gcd(&b)).checked_mul(b).ok_or(Error::Overflow("least common multiple"))
}

/// LCM of a list; the empty list gives 1.
pub fn lcm_list(xs: &[u64]) -> Result<u64> {
    xs.iter().try_fold(1u64, |acc, &x| lcm(acc, x))
}

/// All `k`-subsets of `ground` in lexicographic order.
pub fn enumerate_subsets(ground: Subset, k: usize) -> Vec<Subset> {
    let pool = ground.to_vec();
    let n = pool.len();
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut bits = 0u64;
        for &i in &idx {
            bits |= 1u64 << (pool[i] - 1);
        }
        out.push(Subset(bits));
        // advance to the next combination
        let mut j = k;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if idx[j] < n - k + j {
                break;
            }
        }
        idx[j] += 1;
        for m in j + 1..k {
            idx[m] = idx[m - 1] + 1;
        }
    }
}

/// Lexicographic rank of `k`-subsets of `[n]`, backed by a Pascal table.
#[derive(Clone, Debug)]
pub struct SubsetRanker {
    n: usize,
    k: usize,
    pascal: Vec<Vec<u64>>,
}

impl SubsetRanker {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n > MAX_GROUND || k > n {
            return Err(invalid(format!("cannot rank {k}-subsets of [{n}]")));
        }
        let mut pascal = vec![vec![0u64; k + 1]; n + 1];
        for (m, row) in pascal.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = binom(m as u64, j as i64)?;
            }
        }
        Ok(SubsetRanker { n, k, pascal })
    }

    pub fn count(&self) -> usize {
        self.pascal[self.n][self.k] as usize
    }

    /// 0-based position of `s` in the lexicographic list of `k`-subsets.
    pub fn rank(&self, s: Subset) -> usize {
        debug_assert_eq!(s.len(), self.k);
        debug_assert!(s.max_element() <= self.n);
        let mut rank = 0u64;
        let mut prev = 0usize;
        for (j, x) in s.members().enumerate() {
            let remaining = self.k - j - 1;
            for y in prev + 1..x {
                rank += self.pascal[self.n - y][remaining];
            }
            prev = x;
        }
        rank as usize
    }
}

/// Points `1..=point_count` grouped into equal-size blocks so that every
/// point lies in `replication` blocks. Block members are sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularDesign {
    pub point_count: u64,
    pub block_size: u64,
    pub blocks: Vec<Vec<usize>>,
    pub replication: u64,
}

/// Cyclic design: block `i` holds `((i-1)k + j) mod v + 1` for `j < k`, with
/// `LCM(v, k) / k` blocks and replication `LCM(v, k) / v`.
pub fn cyclic_regular_design(v: u64, k: u64) -> Result<RegularDesign> {
    if v == 0 || k == 0 || k > v {
        return Err(invalid(format!("regular design needs 1 <= k <= v, got v={v}, k={k}")));
    }
    let l = lcm(v, k)?;
    let count = l / k;
    let blocks = (0..count)
        .map(|i| {
            let mut b: Vec<usize> = (0..k).map(|j| ((i * k + j) % v + 1) as usize).collect();
            b.sort_unstable();
            b
        })
        .collect();
    Ok(RegularDesign { point_count: v, block_size: k, blocks, replication: l / v })
}
