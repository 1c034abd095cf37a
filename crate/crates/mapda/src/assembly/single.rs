use crate::combinatorics::{binom, enumerate_subsets, Subset, SubsetRanker};
use crate::error::{constraint, Error, Result};
use crate::exec;
use crate::placement::{user_retrieve_array, SystemParams};

use super::{replicate, Construction, FillVector, FilledArray};

pub(super) fn check_single(p: &SystemParams, lambda_prime: usize) -> Result<()> {
    let (n, r, t) = (p.num_nodes, p.access_degree, p.placement_t);
    if lambda_prime < t + r || lambda_prime > n {
        return Err(constraint(format!("sub-network size must satisfy t + r <= size <= nodes ({} <= {lambda_prime} <= {n})", t + r)));
    }
    let load = binom((lambda_prime - t) as u64, r as i64)?;
    if load > p.antennas as u64 {
        return Err(constraint(format!("sub-network construction requires C(size - t, r) = {load} <= L = {}", p.antennas)));
    }
    Ok(())
}

/// Sub-network construction: every `lambda_prime`-subset `H` of the nodes
/// serves all users inside `H` in one block per copy index.
pub fn construct_sub_network(p: &SystemParams, lambda_prime: usize) -> Result<Construction> {
    check_single(p, lambda_prime)?;
    let rows = SubsetRanker::new(p.num_nodes, p.placement_t)?;
    let cols = SubsetRanker::new(p.num_nodes, p.access_degree)?;
    let width = cols.count();
    let subnets = enumerate_subsets(Subset::full(p.num_nodes), lambda_prime);
    let parts: Vec<Vec<(usize, FillVector)>> = exec::try_map_slice(&subnets, |&h| {
        let mut out = Vec::new();
        for d in enumerate_subsets(h, p.access_degree) {
            for (n, t) in enumerate_subsets(h.difference(d), p.placement_t).into_iter().enumerate() {
                let sub_index = u32::try_from(n + 1).map_err(|_| Error::Overflow("vector index"))?;
                out.push((rows.rank(t) * width + cols.rank(d), FillVector { anchor: h, rotation: 1, sub_index }));
            }
        }
        Ok::<_, Error>(out)
    })?;
    let mut filled = FilledArray::new(p.antennas, user_retrieve_array(p)?);
    for part in parts {
        for (cell, v) in part {
            filled.push_cell(cell, v)?;
        }
    }
    let mapda = replicate(&filled)?;
    Ok(Construction { params: *p, filled, mapda, family: None })
}
