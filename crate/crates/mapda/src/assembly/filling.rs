use crate::combinatorics::{enumerate_subsets, Subset, SubsetRanker};
use crate::error::{Error, Result};
use crate::exec;
use crate::knapsack::{build_instance, greedy_solution, rotate_family, solve_dp, optimal_solution, KnapsackInstance, KnapsackSolution, SolutionFamily};
use crate::placement::{user_retrieve_array, SystemParams};

use super::{predict_family, replicate, Construction, FillVector, FilledArray, Solver};

/// Base knapsack solution on the canonical anchor.
pub fn solve_base(p: &SystemParams, solver: Solver) -> Result<(KnapsackInstance, KnapsackSolution)> {
    let inst = build_instance(p, p.canonical_anchor())?;
    let base = match solver {
        Solver::Dp => solve_dp(&inst)?,
        Solver::Greedy => greedy_solution(p)?.1,
        Solver::Optimal => optimal_solution(p)?,
    };
    Ok((inst, base))
}

/// Vectors contributed by one anchor, as `(cell index, vector)` pairs with
/// cells indexed row-major in the user-retrieve array.
pub fn fill_anchor(p: &SystemParams, anchor: Subset, family: &SolutionFamily) -> Result<Vec<(usize, FillVector)>> {
    let inst = build_instance(p, anchor)?;
    if inst.items.len() != family.base.selected.len() {
        return Err(Error::Internal(format!("anchor {anchor} has {} items, family expects {}", inst.items.len(), family.base.selected.len())));
    }
    let rows = SubsetRanker::new(p.num_nodes, p.placement_t)?;
    let cols = SubsetRanker::new(p.num_nodes, p.access_degree)?;
    let width = cols.count();
    let mut per_item: Vec<Option<Vec<(usize, Vec<usize>)>>> = vec![None; inst.items.len()];
    let mut out = Vec::new();
    let ell = u32::try_from(family.ell).map_err(|_| Error::Overflow("rotation count"))?;
    for h in 0..ell {
        for idx in family.rotation_items(h as u64) {
            let item = inst.items[idx];
            let copies = family.mu / item.col_nulls;
            let layout = per_item[idx].get_or_insert_with(|| {
                enumerate_subsets(anchor, p.access_degree - item.level)
                    .into_iter()
                    .map(|d| {
                        let col = d.union(item.group);
                        let nulls = enumerate_subsets(anchor.difference(col), p.placement_t).into_iter().map(|t| rows.rank(t)).collect();
                        (cols.rank(col), nulls)
                    })
                    .collect()
            });
            for (col, nulls) in layout.iter() {
                if nulls.len() as u64 != item.col_nulls {
                    return Err(Error::Internal(format!("column {} under anchor {anchor} has {} Null rows, expected {}", col, nulls.len(), item.col_nulls)));
                }
                for (n, &row) in nulls.iter().enumerate() {
                    for s in 0..copies {
                        let sub = n as u64 * copies + s + 1;
                        let sub_index = u32::try_from(sub).map_err(|_| Error::Overflow("vector index"))?;
                        out.push((row * width + col, FillVector { anchor, rotation: h + 1, sub_index }));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Writes the vectors of one anchor into `f`.
pub fn fill_subarray(f: &mut FilledArray, p: &SystemParams, anchor: Subset, family: &SolutionFamily) -> Result<()> {
    for (cell, v) in fill_anchor(p, anchor, family)? {
        f.push_cell(cell, v)?;
    }
    Ok(())
}

pub(super) fn fill_all(p: &SystemParams, family: &SolutionFamily) -> Result<FilledArray> {
    let anchors = enumerate_subsets(Subset::full(p.num_nodes), p.anchor_size());
    let parts = exec::try_map_slice(&anchors, |&a| fill_anchor(p, a, family))?;
    let mut filled = FilledArray::new(p.antennas, user_retrieve_array(p)?);
    for part in parts {
        for (cell, v) in part {
            filled.push_cell(cell, v)?;
        }
    }
    Ok(filled)
}

/// Knapsack-based construction for a fixed shift `b`: one base solution on
/// the canonical anchor, rotated and applied to every anchor.
pub fn construct_knapsack(p: &SystemParams, solver: Solver) -> Result<Construction> {
    let (inst, base) = solve_base(p, solver)?;
    let family = rotate_family(&inst, &base)?;
    let filled = fill_all(p, &family)?;
    let mapda = replicate(&filled)?;
    Ok(Construction { params: *p, filled, mapda, family: Some(family) })
}

/// Tries every shift `b < r` and keeps the largest sum-DoF, then the
/// smallest subpacketization, then the smallest `b`.
pub fn construct_knapsack_best_shift(p: &SystemParams, solver: Solver) -> Result<Construction> {
    let mut best: Option<(SystemParams, num_rational::BigRational, num_bigint::BigUint)> = None;
    let mut last_err = None;
    for b in 0..p.access_degree {
        let q = p.with_shift(b)?;
        let predicted = solve_base(&q, solver).and_then(|(inst, base)| predict_family(&q, &rotate_family(&inst, &base)?));
        match predicted {
            Ok(m) => {
                let better = match &best {
                    None => true,
                    Some((_, g, f)) => m.sum_dof > *g || (m.sum_dof == *g && m.subpacketization < *f),
                };
                if better {
                    best = Some((q, m.sum_dof, m.subpacketization));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some((q, _, _)) => construct_knapsack(&q, solver),
        None => Err(last_err.unwrap_or_else(|| Error::Internal("no shift evaluated".into()))),
    }
}
