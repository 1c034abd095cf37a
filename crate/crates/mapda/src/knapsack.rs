//! 0-1 knapsack instances over column groups, exact and closed-form
//! solvers, and the rotation family that symmetrizes a solution.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binom, binom_i, cyclic_regular_design, enumerate_subsets, lcm, lcm_list, RegularDesign, Subset};
use crate::error::{constraint, invalid, Error, Result};
use crate::placement::{group_stats, SystemParams};

/// Largest instance the brute-force oracle accepts.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// One column group seen as a knapsack item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnapsackItem {
    pub group: Subset,
    pub level: usize,
    /// Null cells per row, the capacity used.
    pub weight: u64,
    /// Columns in the group, the users served.
    pub value: u64,
    /// Null cells per column.
    pub col_nulls: u64,
}

/// Items ordered by level, then group, with the antenna budget as capacity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    pub anchor: Subset,
    pub items: Vec<KnapsackItem>,
    pub capacity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KnapsackSolution {
    pub selected: Vec<bool>,
    /// Total value.
    pub phi: u64,
    /// Total weight.
    pub psi: u64,
}

/// A maximal run of items sharing one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelRange {
    pub level: usize,
    pub start: usize,
    pub len: usize,
}

impl KnapsackInstance {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Scores an indicator vector; infeasible selections are an error.
    pub fn evaluate(&self, selected: &[bool]) -> Result<KnapsackSolution> {
        if selected.len() != self.items.len() {
            return Err(Error::InvalidSolution(format!(
                "indicator has {} entries for {} items",
                selected.len(),
                self.items.len()
            )));
        }
        let mut phi = 0u64;
        let mut psi = 0u64;
        for (item, _) in self.items.iter().zip(selected).filter(|(_, &x)| x) {
            phi = phi.checked_add(item.value).ok_or(Error::Overflow("knapsack value"))?;
            psi = psi.checked_add(item.weight).ok_or(Error::Overflow("knapsack weight"))?;
        }
        if psi > self.capacity {
            return Err(Error::InvalidSolution(format!("weight {psi} exceeds capacity {}", self.capacity)));
        }
        Ok(KnapsackSolution { selected: selected.to_vec(), phi, psi })
    }

    /// Consecutive item ranges per level, in item order.
    pub fn levels(&self) -> Vec<LevelRange> {
        let mut out: Vec<LevelRange> = Vec::new();
        for (i, item) in self.items.iter().enumerate() {
            match out.last_mut() {
                Some(last) if last.level == item.level => last.len += 1,
                _ => out.push(LevelRange { level: item.level, start: i, len: 1 }),
            }
        }
        out
    }

    /// Indicator selecting the first `counts[j]` items of the `j`-th level.
    pub fn select_leading(&self, counts: &[u64]) -> Result<KnapsackSolution> {
        let levels = self.levels();
        if counts.len() != levels.len() {
            return Err(invalid(format!("{} level counts for {} levels", counts.len(), levels.len())));
        }
        let mut selected = vec![false; self.items.len()];
        for (lv, &q) in levels.iter().zip(counts) {
            if q as usize > lv.len {
                return Err(invalid(format!("{q} items requested from level {} of size {}", lv.level, lv.len)));
            }
            selected[lv.start..lv.start + q as usize].iter_mut().for_each(|x| *x = true);
        }
        self.evaluate(&selected)
    }
}

/// Knapsack instance for `anchor`: one item per group at levels `b..`.
pub fn build_instance(p: &SystemParams, anchor: Subset) -> Result<KnapsackInstance> {
    let outside = crate::combinatorics::Subset::full(p.num_nodes).difference(anchor);
    let mut items = Vec::new();
    for level in p.item_levels() {
        for group in enumerate_subsets(outside, level) {
            let st = group_stats(p, anchor, group)?;
            items.push(KnapsackItem {
                group,
                level,
                weight: st.nulls_per_row,
                value: st.columns,
                col_nulls: st.nulls_per_col,
            });
        }
    }
    Ok(KnapsackInstance { anchor, items, capacity: p.antennas as u64 })
}

/// Exact dynamic program. Among optimal selections it returns the
/// lexicographically greatest indicator vector.
pub fn solve_dp(inst: &KnapsackInstance) -> Result<KnapsackSolution> {
    let n = inst.items.len();
    let total: u64 = inst.items.iter().try_fold(0u64, |a, it| a.checked_add(it.weight)).ok_or(Error::Overflow("knapsack weight"))?;
    let cap = inst.capacity.min(total) as usize;
    let width = cap + 1;
    let mut best = vec![0u64; (n + 1) * width];
    for i in (0..n).rev() {
        let it = inst.items[i];
        for c in 0..width {
            let skip = best[(i + 1) * width + c];
            let take = if it.weight as usize <= c {
                it.value
                    .checked_add(best[(i + 1) * width + c - it.weight as usize])
                    .ok_or(Error::Overflow("knapsack value"))?
            } else {
                0
            };
            best[i * width + c] = skip.max(if it.weight as usize <= c { take } else { 0 });
        }
    }
    let mut selected = vec![false; n];
    let mut c = cap;
    for i in 0..n {
        let it = inst.items[i];
        let w = it.weight as usize;
        if w <= c && it.value + best[(i + 1) * width + c - w] == best[i * width + c] {
            selected[i] = true;
            c -= w;
        }
    }
    inst.evaluate(&selected)
}

/// Exhaustive search over all `2^n` selections (Gray-code order). Ties are
/// broken toward the lexicographically greatest indicator vector.
pub fn solve_brute(inst: &KnapsackInstance) -> Result<KnapsackSolution> {
    let n = inst.items.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::OracleLimit { items: n, limit: BRUTE_FORCE_LIMIT });
    }
    // bit j of the mask stands for item n-1-j, so numeric order on masks is
    // lexicographic order on indicator vectors
    let mut mask = 0u64;
    let (mut phi, mut psi) = (0u64, 0u64);
    let mut best = (0u64, 0u64);
    for step in 1u64..(1u64 << n) {
        let j = step.trailing_zeros() as usize;
        let it = inst.items[n - 1 - j];
        mask ^= 1 << j;
        if mask >> j & 1 == 1 {
            phi += it.value;
            psi += it.weight;
        } else {
            phi -= it.value;
            psi -= it.weight;
        }
        if psi <= inst.capacity && (phi, mask) > best {
            best = (phi, mask);
        }
    }
    let selected: Vec<bool> = (0..n).map(|i| best.1 >> (n - 1 - i) & 1 == 1).collect();
    inst.evaluate(&selected)
}

/// Parameters of the closed-form greedy solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyParams {
    /// Level where the selection stops being complete.
    pub delta: usize,
    /// Capacity left after every item up to and including level `delta`.
    pub eta: i64,
    /// Items taken at level `delta`.
    pub zeta: u64,
}

/// Closed-form greedy selection on the canonical anchor: every item below
/// level `delta` and the first `zeta` items at level `delta`.
pub fn greedy_solution(p: &SystemParams) -> Result<(GreedyParams, KnapsackSolution)> {
    let inst = build_instance(p, p.canonical_anchor())?;
    let params = greedy_params(p)?;
    let counts: Vec<u64> = inst
        .levels()
        .iter()
        .map(|lv| match lv.level.cmp(&params.delta) {
            std::cmp::Ordering::Less => lv.len as u64,
            std::cmp::Ordering::Equal => params.zeta,
            std::cmp::Ordering::Greater => 0,
        })
        .collect();
    let sol = inst.select_leading(&counts)?;
    Ok((params, sol))
}

/// `(delta, eta, zeta)` of the greedy selection.
pub fn greedy_params(p: &SystemParams) -> Result<GreedyParams> {
    let r = p.access_degree as i64;
    let b = p.shift_b as i64;
    let outside = p.outside_anchor() as u64;
    let cap = p.antennas as i64;
    let levels: Vec<usize> = p.item_levels().collect();
    let mut used: i64 = 0;
    let mut chosen = None;
    for &k in &levels {
        let k = k as i64;
        let block = binom(outside, k)?.checked_mul(binom_i(r - b, r - k)?).ok_or(Error::Overflow("greedy weight"))?;
        used = used.checked_add(i64::try_from(block).map_err(|_| Error::Overflow("greedy weight"))?).ok_or(Error::Overflow("greedy weight"))?;
        let next = binom_i(r - b, r - k - 1)? as i64;
        if cap - used < next {
            chosen = Some((k as usize, cap - used));
            break;
        }
    }
    // every item fits: stop at the top level with all of it selected
    let (delta, eta) = chosen.unwrap_or((*levels.last().expect("non-empty levels"), cap - used));
    let count = binom(outside, delta as i64)? as i64;
    let weight = binom_i(r - b, r - delta as i64)? as i64;
    let zeta = (count * weight + eta).div_euclid(weight).min(count);
    if zeta < 1 {
        return Err(Error::Internal(format!("greedy selected {zeta} items at level {delta}")));
    }
    Ok(GreedyParams { delta, eta, zeta: zeta as u64 })
}

/// Capacity threshold `C(nodes - t, r) - C(nodes - t - r, r)` above which
/// the all-levels selection is available.
pub fn optimal_threshold(p: &SystemParams) -> Result<u64> {
    let n = p.num_nodes as u64;
    let (t, r) = (p.placement_t as u64, p.access_degree as i64);
    Ok(binom(n - t, r)? - binom_i(n as i64 - t as i64 - r, r)?)
}

/// Solution attaining `min(K M/N + L, K)` when `b = 0`, `nodes >= 2r + t`
/// and the antenna budget reaches [`optimal_threshold`]: all levels below
/// `r`, plus the first `L - threshold` groups of level `r`.
pub fn optimal_solution(p: &SystemParams) -> Result<KnapsackSolution> {
    let (n, r, t) = (p.num_nodes, p.access_degree, p.placement_t);
    if p.shift_b != 0 {
        return Err(constraint(format!("all-levels solution requires b = 0, got b = {}", p.shift_b)));
    }
    if n < 2 * r + t {
        return Err(constraint(format!("all-levels solution requires nodes >= 2r + t ({n} < {})", 2 * r + t)));
    }
    let threshold = optimal_threshold(p)?;
    if (p.antennas as u64) < threshold {
        return Err(constraint(format!("all-levels solution requires L >= {threshold}, got L = {}", p.antennas)));
    }
    let inst = build_instance(p, p.canonical_anchor())?;
    let extra = p.antennas as u64 - threshold;
    let counts: Vec<u64> = inst
        .levels()
        .iter()
        .map(|lv| if lv.level < r { lv.len as u64 } else { extra.min(lv.len as u64) })
        .collect();
    inst.select_leading(&counts)
}

/// Rotation schedule of one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRotation {
    pub level: usize,
    pub start: usize,
    /// Items at this level.
    pub count: u64,
    /// Items selected per rotation.
    pub chosen: u64,
    /// Null cells per column of this level's groups.
    pub col_nulls: u64,
    pub design: RegularDesign,
}

impl LevelRotation {
    /// Number of distinct blocks before the level repeats.
    pub fn period(&self) -> u64 {
        self.design.blocks.len() as u64
    }

    /// Rotations (out of a full family) in which each item is selected.
    pub fn selections_per_item(&self, ell: u64) -> u64 {
        ell / self.period() * self.design.replication
    }
}

/// Rotated copies of a solution with identical per-level counts, together
/// selecting every item of a level equally often.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFamily {
    pub base: KnapsackSolution,
    /// Levels with at least one selected item.
    pub levels: Vec<LevelRotation>,
    /// Number of rotations.
    pub ell: u64,
    /// LCM of the per-column Null counts of the selected levels.
    pub mu: u64,
}

impl SolutionFamily {
    /// Item indices selected by rotation `h` (0-based).
    pub fn rotation_items(&self, h: u64) -> Vec<usize> {
        let mut out = Vec::new();
        for lv in &self.levels {
            let block = &lv.design.blocks[(h % lv.period()) as usize];
            out.extend(block.iter().map(|&pt| lv.start + pt - 1));
        }
        out
    }

    /// Rotation `h` as an indicator vector.
    pub fn rotation(&self, h: u64) -> KnapsackSolution {
        let mut selected = vec![false; self.base.selected.len()];
        for i in self.rotation_items(h) {
            selected[i] = true;
        }
        KnapsackSolution { selected, phi: self.base.phi, psi: self.base.psi }
    }

    pub fn rotations(&self) -> Vec<KnapsackSolution> {
        (0..self.ell).map(|h| self.rotation(h)).collect()
    }
}

/// Builds the rotation family of `base`; each level with `q` of `p` items
/// selected cycles through a cyclic `(p, q)` design.
pub fn rotate_family(inst: &KnapsackInstance, base: &KnapsackSolution) -> Result<SolutionFamily> {
    let checked = inst.evaluate(&base.selected)?;
    if checked.phi != base.phi || checked.psi != base.psi {
        return Err(Error::InvalidSolution(format!(
            "declared (phi, psi) = ({}, {}) but indicator gives ({}, {})",
            base.phi, base.psi, checked.phi, checked.psi
        )));
    }
    let mut levels = Vec::new();
    for lv in inst.levels() {
        let items = &inst.items[lv.start..lv.start + lv.len];
        let first = items[0];
        if items.iter().any(|it| (it.weight, it.value, it.col_nulls) != (first.weight, first.value, first.col_nulls)) {
            return Err(Error::InvalidSolution(format!("level {} mixes item shapes and cannot be rotated", lv.level)));
        }
        let chosen = base.selected[lv.start..lv.start + lv.len].iter().filter(|&&x| x).count() as u64;
        if chosen == 0 {
            continue;
        }
        levels.push(LevelRotation {
            level: lv.level,
            start: lv.start,
            count: lv.len as u64,
            chosen,
            col_nulls: first.col_nulls,
            design: cyclic_regular_design(lv.len as u64, chosen)?,
        });
    }
    if levels.is_empty() {
        return Err(Error::InvalidSolution("empty selection".into()));
    }
    let periods: Vec<u64> = levels.iter().map(LevelRotation::period).collect();
    let ell = lcm_list(&periods)?;
    let mu = levels.iter().try_fold(1u64, |acc, lv| lcm(acc, lv.col_nulls))?;
    Ok(SolutionFamily { base: checked, levels, ell, mu })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, r: usize, t: usize, l: usize, b: usize) -> SystemParams {
        SystemParams::new(n, r, t, l, b).unwrap()
    }

    #[test]
    fn lambda5_instance_and_optimum() {
        let p = params(5, 3, 1, 2, 1);
        let inst = build_instance(&p, p.canonical_anchor()).unwrap();
        let z: Vec<u64> = inst.items.iter().map(|i| i.weight).collect();
        let v: Vec<u64> = inst.items.iter().map(|i| i.value).collect();
        let groups: Vec<String> = inst.items.iter().map(|i| i.group.label(5)).collect();
        assert_eq!(groups, ["4", "5", "45"]);
        assert_eq!(z, [1, 1, 2]);
        assert_eq!(v, [3, 3, 3]);
        let sol = solve_dp(&inst).unwrap();
        assert_eq!(sol.selected, [true, true, false]);
        assert_eq!(sol.phi, 6);
        assert_eq!(solve_brute(&inst).unwrap(), sol);
        let (g, gs) = greedy_solution(&p).unwrap();
        assert_eq!(g, GreedyParams { delta: 1, eta: 0, zeta: 2 });
        assert_eq!(gs, sol);
    }

    #[test]
    fn lambda6_greedy_parameters() {
        let p = params(6, 3, 2, 3, 2);
        let (g, sol) = greedy_solution(&p).unwrap();
        assert_eq!(g, GreedyParams { delta: 2, eta: 0, zeta: 3 });
        assert_eq!(sol.phi, 9);
        assert_eq!(sol.selected, [true, true, true, false]);
    }

    #[test]
    fn greedy_covers_everything_when_capacity_is_huge() {
        let p = params(5, 2, 1, 100, 0);
        let (g, sol) = greedy_solution(&p).unwrap();
        assert!(sol.selected.iter().all(|&x| x));
        assert_eq!(g.delta, 2);
    }

    #[test]
    fn brute_force_limit_enforced() {
        let item = KnapsackItem { group: Subset::EMPTY, level: 0, weight: 1, value: 1, col_nulls: 1 };
        let inst = KnapsackInstance { anchor: Subset::EMPTY, items: vec![item; 25], capacity: 3 };
        assert_eq!(solve_brute(&inst), Err(Error::OracleLimit { items: 25, limit: 24 }));
    }

    #[test]
    fn dp_prefers_lex_greatest_among_ties() {
        let mk = |w, v| KnapsackItem { group: Subset::EMPTY, level: 0, weight: w, value: v, col_nulls: 1 };
        let inst = KnapsackInstance { anchor: Subset::EMPTY, items: vec![mk(2, 3), mk(1, 2), mk(1, 1), mk(2, 3)], capacity: 2 };
        let sol = solve_dp(&inst).unwrap();
        assert_eq!(sol.selected, [true, false, false, false]);
        assert_eq!(solve_brute(&inst).unwrap(), sol);
    }

    #[test]
    fn optimal_selection_and_preconditions() {
        let p = params(6, 2, 2, 5, 0);
        let sol = optimal_solution(&p).unwrap();
        assert_eq!(sol.phi, 14);
        assert!(optimal_solution(&params(6, 2, 2, 4, 0)).is_err());
        assert!(optimal_solution(&params(6, 2, 2, 5, 1)).is_err());
        assert!(optimal_solution(&params(5, 2, 2, 5, 0)).is_err());
        let big = optimal_solution(&params(6, 2, 2, 50, 0)).unwrap();
        assert_eq!(big.phi, 15);
    }

    #[test]
    fn family_of_lambda5_solution() {
        let p = params(5, 3, 1, 2, 1);
        let inst = build_instance(&p, p.canonical_anchor()).unwrap();
        let fam = rotate_family(&inst, &solve_dp(&inst).unwrap()).unwrap();
        assert_eq!(fam.ell, 1);
        assert_eq!(fam.mu, 1);
        assert_eq!(fam.rotation(0), fam.base);
    }

    #[test]
    fn family_rejects_inconsistent_base() {
        let p = params(5, 3, 1, 2, 1);
        let inst = build_instance(&p, p.canonical_anchor()).unwrap();
        let bad = KnapsackSolution { selected: vec![true, false, false], phi: 9, psi: 1 };
        assert!(rotate_family(&inst, &bad).is_err());
        let over = KnapsackSolution { selected: vec![true, true, true], phi: 9, psi: 4 };
        assert!(rotate_family(&inst, &over).is_err());
    }
}
