use std::collections::HashMap;

use crate::combinatorics::{binom, enumerate_subsets, Subset};
use crate::error::{constraint, Error, Result};
use crate::exec;
use crate::knapsack::{build_instance, rotate_family};
use crate::placement::{user_retrieve_array, SystemParams};

use super::{fill_anchor, replicate, Construction, FilledArray};

pub(super) fn check_merged(p: &SystemParams) -> Result<()> {
    let (n, r, t, b) = (p.num_nodes, p.access_degree, p.placement_t, p.shift_b);
    if !(b < r && r < 2 * b) {
        return Err(constraint(format!("merged construction requires b < r < 2b (b={b}, r={r})")));
    }
    if t + r <= 2 * b {
        return Err(constraint(format!("merged construction requires t + r > 2b (t={t}, r={r}, b={b})")));
    }
    let a = p.anchor_size();
    if n != 2 * a {
        return Err(constraint(format!("merged construction requires nodes = 2(t + r - b) = {} (nodes={n})", 2 * a)));
    }
    let cap = binom(a as u64, b as i64)?;
    if p.antennas as u64 > cap {
        return Err(constraint(format!("merged construction requires L <= C(t + r - b, b) = {cap} (L={})", p.antennas)));
    }
    Ok(())
}

/// Complementary-anchor construction: every anchor selects `L` groups of
/// level `b`, and the vectors of an anchor and its complement are merged,
/// halving the number of blocks.
pub fn construct_merged(p: &SystemParams) -> Result<Construction> {
    check_merged(p)?;
    let inst = build_instance(p, p.canonical_anchor())?;
    let counts: Vec<u64> = inst.levels().iter().map(|lv| if lv.level == p.shift_b { p.antennas as u64 } else { 0 }).collect();
    let base = inst.select_leading(&counts)?;
    let family = rotate_family(&inst, &base)?;

    let full = Subset::full(p.num_nodes);
    let anchors = enumerate_subsets(full, p.anchor_size());
    let parts = exec::try_map_slice(&anchors, |&a| fill_anchor(p, a, &family))?;
    let filled_cols: HashMap<Subset, Vec<usize>> = anchors
        .iter()
        .zip(&parts)
        .map(|(&a, part)| {
            let mut cs: Vec<usize> = part.iter().map(|(cell, _)| cell % p.users() as usize).collect();
            cs.sort_unstable();
            cs.dedup();
            (a, cs)
        })
        .collect();

    // rows of an anchor must be all-star on the columns its complement fills
    let col_labels = enumerate_subsets(full, p.access_degree);
    for &a in &anchors {
        let other = full.difference(a);
        for &c in &filled_cols[&other] {
            let d = col_labels[c];
            if a.difference(d).len() >= p.placement_t {
                return Err(Error::Internal(format!("anchor {a} has a Null row on column {d} filled by {other}")));
            }
        }
    }

    let mut filled = FilledArray::new(p.antennas, user_retrieve_array(p)?);
    for (a, part) in anchors.iter().zip(parts) {
        let rep = (*a).min(full.difference(*a));
        for (cell, mut v) in part {
            v.anchor = rep;
            filled.push_cell(cell, v)?;
        }
    }
    let mapda = replicate(&filled)?;
    Ok(Construction { params: *p, filled, mapda, family: Some(family) })
}
