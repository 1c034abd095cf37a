//! System parameters, the node-placement and user-retrieve arrays, and the
//! anchor-based column partition with its per-group statistics.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::combinatorics::{binom, enumerate_subsets, Subset, SubsetRanker, MAX_GROUND};
use crate::error::{invalid, Error, Result};

/// Cache nodes, access degree, MN placement parameter, antennas, anchor
/// shift and library size for a combinatorial multi-access network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemParams {
    pub num_nodes: usize,
    pub access_degree: usize,
    pub placement_t: usize,
    pub antennas: usize,
    pub shift_b: usize,
    pub num_files: usize,
}

impl SystemParams {
    /// Validated parameters with `num_files` defaulting to the user count.
    pub fn new(num_nodes: usize, access_degree: usize, placement_t: usize, antennas: usize, shift_b: usize) -> Result<Self> {
        if num_nodes > MAX_GROUND {
            return Err(invalid(format!("at most {MAX_GROUND} cache nodes supported")));
        }
        let users = binom(num_nodes as u64, access_degree as i64)?;
        let p = SystemParams {
            num_nodes,
            access_degree,
            placement_t,
            antennas,
            shift_b,
            num_files: usize::try_from(users).map_err(|_| Error::Overflow("user count"))?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_files(mut self, num_files: usize) -> Result<Self> {
        self.num_files = num_files;
        self.validate()?;
        Ok(self)
    }

    pub fn with_shift(mut self, shift_b: usize) -> Result<Self> {
        self.shift_b = shift_b;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let (n, r, t) = (self.num_nodes, self.access_degree, self.placement_t);
        if n > MAX_GROUND {
            return Err(invalid(format!("at most {MAX_GROUND} cache nodes supported")));
        }
        if r < 1 || r >= n {
            return Err(invalid(format!("access degree r={r} must satisfy 1 <= r < {n}")));
        }
        if t < 1 || t > n - r {
            return Err(invalid(format!("placement t={t} must satisfy 1 <= t <= {}", n - r)));
        }
        if self.antennas < 1 {
            return Err(invalid("at least one antenna required"));
        }
        if self.shift_b >= r {
            return Err(invalid(format!("shift b={} must be below r={r}", self.shift_b)));
        }
        if self.num_files < 1 {
            return Err(invalid("library must contain at least one file"));
        }
        Ok(())
    }

    /// Number of users, `C(nodes, r)`.
    pub fn users(&self) -> u64 {
        binom(self.num_nodes as u64, self.access_degree as i64).expect("validated")
    }

    /// Size of an anchor set, `t + r - b`.
    pub fn anchor_size(&self) -> usize {
        self.placement_t + self.access_degree - self.shift_b
    }

    /// Number of nodes outside an anchor, `nodes - t - r + b`.
    pub fn outside_anchor(&self) -> usize {
        self.num_nodes - self.anchor_size()
    }

    /// Every level `|D \ A|` taken by some column.
    pub fn partition_levels(&self) -> std::ops::RangeInclusive<usize> {
        let lo = self.shift_b.saturating_sub(self.placement_t);
        lo..=self.access_degree.min(self.outside_anchor())
    }

    /// Levels that become knapsack items (all-star levels below `b` excluded).
    pub fn item_levels(&self) -> std::ops::RangeInclusive<usize> {
        self.shift_b..=self.access_degree.min(self.outside_anchor())
    }

    /// Fraction of the library each user retrieves, `1 - C(nodes-r, t)/C(nodes, t)`.
    pub fn retrieval_ratio(&self) -> Result<Ratio<u64>> {
        let total = binom(self.num_nodes as u64, self.placement_t as i64)?;
        let miss = binom((self.num_nodes - self.access_degree) as u64, self.placement_t as i64)?;
        Ok(Ratio::new(total - miss, total))
    }

    /// First anchor in lexicographic order, `{1, ..., t + r - b}`.
    pub fn canonical_anchor(&self) -> Subset {
        Subset::full(self.anchor_size())
    }
}

/// A rectangular `{*, Null}` array with subset labels on both axes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarArray {
    ground: usize,
    row_labels: Vec<Subset>,
    col_labels: Vec<Subset>,
    words: usize,
    bits: Vec<u64>,
}

impl StarArray {
    /// All-Null array with the given labels.
    pub fn new(ground: usize, row_labels: Vec<Subset>, col_labels: Vec<Subset>) -> Self {
        let words = col_labels.len().div_ceil(64);
        let bits = vec![0u64; words * row_labels.len()];
        StarArray { ground, row_labels, col_labels, words, bits }
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[Subset] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[Subset] {
        &self.col_labels
    }

    pub fn is_star(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.words + col / 64] >> (col % 64) & 1 == 1
    }

    pub fn set(&mut self, row: usize, col: usize, star: bool) {
        let w = &mut self.bits[row * self.words + col / 64];
        if star {
            *w |= 1 << (col % 64);
        } else {
            *w &= !(1 << (col % 64));
        }
    }

    pub fn stars_in_col(&self, col: usize) -> usize {
        (0..self.rows()).filter(|&r| self.is_star(r, col)).count()
    }

    pub fn stars_in_row(&self, row: usize) -> usize {
        self.bits[row * self.words..(row + 1) * self.words].iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Sub-array on the given row and column positions.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> StarArray {
        let mut out = StarArray::new(
            self.ground,
            rows.iter().map(|&r| self.row_labels[r]).collect(),
            cols.iter().map(|&c| self.col_labels[c]).collect(),
        );
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.is_star(r, c));
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let cells: Vec<Vec<Value>> = (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| if self.is_star(r, c) { json!("*") } else { Value::Null }).collect())
            .collect();
        json!({
            "rows": self.row_labels.iter().map(|s| s.label(self.ground)).collect::<Vec<_>>(),
            "cols": self.col_labels.iter().map(|s| s.label(self.ground)).collect::<Vec<_>>(),
            "cells": cells,
        })
    }
}

fn check_ground(nodes: usize, k: usize) -> Result<()> {
    if nodes > MAX_GROUND || k > nodes {
        return Err(invalid(format!("cannot index {k}-subsets of {nodes} nodes")));
    }
    Ok(())
}

/// Node-placement array: rows are `t`-subsets, columns are nodes, and node
/// `x` caches the subfile of row `T` exactly when `x` is in `T`.
pub fn node_placement(nodes: usize, t: usize) -> Result<StarArray> {
    check_ground(nodes, t)?;
    let rows = enumerate_subsets(Subset::full(nodes), t);
    let cols: Vec<Subset> = (1..=nodes).map(Subset::singleton).collect();
    let mut a = StarArray::new(nodes, rows, cols);
    for r in 0..a.rows() {
        for c in 0..nodes {
            if a.row_labels[r].contains(c + 1) {
                a.set(r, c, true);
            }
        }
    }
    Ok(a)
}

/// User-retrieve array: rows are `t`-subsets, columns are `r`-subsets, and
/// user `D` retrieves the subfile of row `T` exactly when `T` meets `D`.
pub fn user_retrieve(nodes: usize, t: usize, r: usize) -> Result<StarArray> {
    check_ground(nodes, t)?;
    check_ground(nodes, r)?;
    let rows = enumerate_subsets(Subset::full(nodes), t);
    let cols = enumerate_subsets(Subset::full(nodes), r);
    let mut a = StarArray::new(nodes, rows, cols);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if !a.row_labels[i].is_disjoint(a.col_labels[j]) {
                a.set(i, j, true);
            }
        }
    }
    Ok(a)
}

pub fn node_placement_array(p: &SystemParams) -> Result<StarArray> {
    node_placement(p.num_nodes, p.placement_t)
}

pub fn user_retrieve_array(p: &SystemParams) -> Result<StarArray> {
    user_retrieve(p.num_nodes, p.placement_t, p.access_degree)
}

/// Columns sharing the same part outside the anchor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnGroup {
    /// `D \ A`, shared by every column of the group.
    pub group: Subset,
    /// `|group|`.
    pub level: usize,
    /// The columns `group ∪ D'` for `D'` an `(r - level)`-subset of the anchor, lex order.
    pub columns: Vec<Subset>,
}

fn check_anchor(p: &SystemParams, anchor: Subset) -> Result<()> {
    if anchor.len() != p.anchor_size() || !anchor.is_subset_of(Subset::full(p.num_nodes)) {
        return Err(invalid(format!(
            "anchor {anchor} must be a {}-subset of [{}]",
            p.anchor_size(),
            p.num_nodes
        )));
    }
    Ok(())
}

fn group_columns(anchor: Subset, group: Subset, r: usize) -> Vec<Subset> {
    let mut cols: Vec<Subset> = enumerate_subsets(anchor, r - group.len()).into_iter().map(|d| d.union(group)).collect();
    cols.sort_unstable();
    cols
}

/// Splits every user column by its part outside `anchor`; groups are
/// ordered by level, then lexicographically.
pub fn partition_columns(p: &SystemParams, anchor: Subset) -> Result<Vec<ColumnGroup>> {
    check_anchor(p, anchor)?;
    let outside = Subset::full(p.num_nodes).difference(anchor);
    let mut out = Vec::new();
    for level in p.partition_levels() {
        for group in enumerate_subsets(outside, level) {
            out.push(ColumnGroup { group, level, columns: group_columns(anchor, group, p.access_degree) });
        }
    }
    Ok(out)
}

/// Columns of the group `group` under `anchor`, lex order.
pub fn columns_of_group(p: &SystemParams, anchor: Subset, group: Subset) -> Result<Vec<Subset>> {
    check_anchor(p, anchor)?;
    if !group.is_disjoint(anchor) || group.len() > p.access_degree {
        return Err(invalid(format!("group {group} must avoid anchor {anchor} and have at most r members")));
    }
    Ok(group_columns(anchor, group, p.access_degree))
}

/// Shape of the sub-array on rows `C(A, t)` and the columns of one group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStats {
    /// Columns in the group.
    pub columns: u64,
    /// Null cells in each row of the sub-array that has any (identical across them).
    pub nulls_per_row: u64,
    /// Null cells in each column.
    pub nulls_per_col: u64,
}

/// Closed-form statistics of the group `group` under `anchor`.
pub fn group_stats(p: &SystemParams, anchor: Subset, group: Subset) -> Result<GroupStats> {
    check_anchor(p, anchor)?;
    if !group.is_disjoint(anchor) {
        return Err(invalid(format!("group {group} intersects anchor {anchor}")));
    }
    let i = group.len() as i64;
    let (t, r, b) = (p.placement_t as i64, p.access_degree as i64, p.shift_b as i64);
    if i > r {
        return Err(invalid(format!("group {group} larger than r={r}")));
    }
    Ok(GroupStats {
        columns: binom((t + r - b) as u64, r - i)?,
        nulls_per_row: binom((r - b) as u64, r - i)?,
        nulls_per_col: binom((t + i - b).max(0) as u64, t)?,
    })
}

/// Row positions of `C(anchor, t)` inside `C([nodes], t)`.
pub fn anchor_rows(p: &SystemParams, anchor: Subset) -> Result<Vec<usize>> {
    check_anchor(p, anchor)?;
    let ranker = SubsetRanker::new(p.num_nodes, p.placement_t)?;
    Ok(enumerate_subsets(anchor, p.placement_t).into_iter().map(|t| ranker.rank(t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(m: &[usize]) -> Subset {
        Subset::from_members(m).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::new(5, 3, 1, 2, 1).is_ok());
        assert!(SystemParams::new(5, 5, 1, 2, 1).is_err());
        assert!(SystemParams::new(5, 3, 3, 2, 1).is_err());
        assert!(SystemParams::new(5, 3, 1, 0, 1).is_err());
        assert!(SystemParams::new(5, 3, 1, 2, 3).is_err());
        assert!(SystemParams::new(65, 3, 1, 2, 1).is_err());
        let p = SystemParams::new(5, 3, 1, 2, 1).unwrap();
        assert_eq!(p.users(), 10);
        assert_eq!(p.anchor_size(), 3);
        assert_eq!(p.retrieval_ratio().unwrap(), Ratio::new(3, 5));
        assert!(p.with_files(0).is_err());
    }

    #[test]
    fn small_placement_arrays() {
        let c = node_placement(4, 2).unwrap();
        assert_eq!((c.rows(), c.cols()), (6, 4));
        assert!((0..4).all(|col| c.stars_in_col(col) == 3));
        let u = user_retrieve(4, 2, 2).unwrap();
        assert!((0..6).all(|col| u.stars_in_col(col) == 5));
        // t = nodes and r = nodes are legal for the raw arrays
        let full = user_retrieve(3, 3, 3).unwrap();
        assert_eq!((full.rows(), full.cols()), (1, 1));
        assert!(full.is_star(0, 0));
        assert!(user_retrieve(3, 4, 1).is_err());
    }

    #[test]
    fn example_partition_lambda5() {
        let p = SystemParams::new(5, 3, 1, 2, 1).unwrap();
        let parts = partition_columns(&p, s(&[1, 2, 3])).unwrap();
        let labels: Vec<(String, Vec<String>)> = parts
            .iter()
            .map(|g| (g.group.label(5), g.columns.iter().map(|c| c.label(5)).collect()))
            .collect();
        assert_eq!(labels[0], ("-".to_string(), vec!["123".into()]));
        assert_eq!(labels[1], ("4".to_string(), vec!["124".into(), "134".into(), "234".into()]));
        assert_eq!(labels[2], ("5".to_string(), vec!["125".into(), "135".into(), "235".into()]));
        assert_eq!(labels[3], ("45".to_string(), vec!["145".into(), "245".into(), "345".into()]));
        assert_eq!(parts.len(), 4);
        assert!(partition_columns(&p, s(&[1, 2])).is_err());
    }

    #[test]
    fn json_shape() {
        let u = user_retrieve(3, 1, 1).unwrap();
        let v = u.to_json();
        assert_eq!(v["rows"], json!(["1", "2", "3"]));
        assert_eq!(v["cells"][0], json!(["*", null, null]));
    }
}
