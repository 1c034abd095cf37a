use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use crate::combinatorics::{binom, binom_big, lcm, lcm_list};
use crate::error::{Error, Result};
use crate::knapsack::{greedy_params, optimal_threshold, rotate_family, SolutionFamily};
use crate::mapda::SchemeMetrics;
use crate::placement::SystemParams;

use super::merged::check_merged;
use super::single::check_single;
use super::{solve_base, Solver};

/// Closed-form schemes whose metrics are known without building an array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosedForm {
    /// Greedy knapsack selection.
    Greedy,
    /// All-levels selection meeting the sum-DoF ceiling.
    Optimal,
    /// Complementary-anchor merge.
    Merged,
    /// Sub-networks of the given size.
    Single { lambda_prime: usize },
}

impl FromStr for ClosedForm {
    type Err = Error;

    /// Accepts `greedy`, `optimal`, `merged`, `single:<size>`, and the
    /// aliases `thm2`/`co1`, `thm3`/`co2`, `thm4`/`co3`, `thm5:<size>`/`co4:<size>`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let (head, arg) = match lower.split_once(':') {
            Some((h, a)) => (h.to_string(), Some(a.to_string())),
            None => (lower.clone(), None),
        };
        let size = || -> Result<usize> {
            arg.as_deref()
                .ok_or_else(|| Error::Parse(format!("{s:?} needs a sub-network size, e.g. {head}:6")))?
                .parse()
                .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
        };
        match head.as_str() {
            "greedy" | "thm2" | "co1" => Ok(ClosedForm::Greedy),
            "optimal" | "thm3" | "co2" => Ok(ClosedForm::Optimal),
            "merged" | "thm4" | "co3" => Ok(ClosedForm::Merged),
            "single" | "thm5" | "co4" => Ok(ClosedForm::Single { lambda_prime: size()? }),
            _ => Err(Error::Parse(format!("unknown scheme {s:?}"))),
        }
    }
}

/// Per-level selection: `(level, groups at the level, groups selected)`.
type LevelCounts = Vec<(usize, u64, u64)>;

/// Metrics of a rotated and replicated selection from its per-level counts.
fn from_level_counts(p: &SystemParams, levels: &LevelCounts) -> Result<SchemeMetrics> {
    let (n, r, t, b) = (p.num_nodes as u64, p.access_degree as i64, p.placement_t as i64, p.shift_b as i64);
    let levels: Vec<_> = levels.iter().copied().filter(|&(_, _, q)| q > 0).collect();
    if levels.is_empty() {
        return Err(Error::InvalidSolution("empty selection".into()));
    }
    let periods: Vec<u64> = levels.iter().map(|&(_, cnt, q)| Ok(lcm(cnt, q)? / q)).collect::<Result<_>>()?;
    let ell = lcm_list(&periods)?;
    let nulls: Vec<u64> = levels.iter().map(|&(i, _, _)| binom((t + i as i64 - b) as u64, t)).collect::<Result<_>>()?;
    let mu = lcm_list(&nulls)?;
    let mut pi = BigUint::zero();
    for (&(i, cnt, q), &u) in levels.iter().zip(&nulls) {
        let i = i as i64;
        let times_selected = BigUint::from(ell) * q / cnt;
        pi += binom_big(r as u64, r - i) * binom_big(n - (t + r) as u64, i - b) * times_selected * (mu / u);
    }
    let rows = binom_big(n, t);
    let f = &pi * &rows;
    let z = &pi * (&rows - binom_big(n - r as u64, t));
    let s = BigUint::from(ell) * mu * binom_big(n, t + r - b);
    let out = SchemeMetrics::from_counts(binom_big(n, r), f, z, s)?;
    let phi: BigUint = levels
        .iter()
        .map(|&(i, _, q)| binom_big((t + r - b) as u64, r - i as i64) * q)
        .fold(BigUint::zero(), |a, x| a + x);
    if out.sum_dof != num_rational::BigRational::from_integer(phi.into()) {
        return Err(Error::Internal("replicated sum-DoF differs from the knapsack value".into()));
    }
    Ok(out)
}

/// Predicted metrics of the construction driven by `family`.
pub fn predict_family(p: &SystemParams, family: &SolutionFamily) -> Result<SchemeMetrics> {
    let levels: LevelCounts = family.levels.iter().map(|lv| (lv.level, lv.count, lv.chosen)).collect();
    from_level_counts(p, &levels)
}

/// Predicted metrics of the knapsack construction with the given solver.
pub fn predict_knapsack(p: &SystemParams, solver: Solver) -> Result<SchemeMetrics> {
    let (inst, base) = solve_base(p, solver)?;
    predict_family(p, &rotate_family(&inst, &base)?)
}

fn outside_count(p: &SystemParams, level: usize) -> Result<u64> {
    binom(p.outside_anchor() as u64, level as i64)
}

/// Closed-form metrics of the named scheme.
pub fn predict_metrics(p: &SystemParams, form: ClosedForm) -> Result<SchemeMetrics> {
    let (n, r, t) = (p.num_nodes as u64, p.access_degree as i64, p.placement_t as i64);
    match form {
        ClosedForm::Greedy => {
            let g = greedy_params(p)?;
            let mut levels = LevelCounts::new();
            for i in p.shift_b..g.delta {
                let cnt = outside_count(p, i)?;
                levels.push((i, cnt, cnt));
            }
            levels.push((g.delta, outside_count(p, g.delta)?, g.zeta));
            from_level_counts(p, &levels)
        }
        ClosedForm::Optimal => {
            // preconditions live with the solution itself
            crate::knapsack::optimal_solution(p)?;
            let extra = p.antennas as u64 - optimal_threshold(p)?;
            let mut levels = LevelCounts::new();
            for i in 0..p.access_degree {
                let cnt = outside_count(p, i)?;
                levels.push((i, cnt, cnt));
            }
            let top = outside_count(p, p.access_degree)?;
            levels.push((p.access_degree, top, extra.min(top)));
            from_level_counts(p, &levels)
        }
        ClosedForm::Merged => {
            check_merged(p)?;
            let (a, b) = (p.anchor_size() as u64, p.shift_b as i64);
            let per_anchor = binom(a, b)?;
            let l = p.antennas as u64;
            let beta = per_anchor.gcd(&l);
            let rows = binom_big(n, t);
            let scale = binom_big(r as u64, b) * (l / beta);
            let f = &scale * &rows;
            let z = &scale * (&rows - binom_big(n - r as u64, t));
            let s = binom_big(n, a as i64) * (per_anchor / beta) / 2u32;
            let out = SchemeMetrics::from_counts(binom_big(n, r), f, z, s)?;
            let g = BigUint::from(2 * l) * binom_big(a, t);
            check_dof(&out, g)?;
            Ok(out)
        }
        ClosedForm::Single { lambda_prime } => {
            check_single(p, lambda_prime)?;
            let h = lambda_prime as i64;
            let pi = binom_big(n - (t + r) as u64, h - t - r);
            let rows = binom_big(n, t);
            let f = &pi * &rows;
            let z = &pi * (&rows - binom_big(n - r as u64, t));
            let s = binom_big(n, h) * binom_big((h - r) as u64, t);
            let out = SchemeMetrics::from_counts(binom_big(n, r), f, z, s)?;
            check_dof(&out, binom_big(h as u64, r))?;
            Ok(out)
        }
    }
}

fn check_dof(m: &SchemeMetrics, g: BigUint) -> Result<()> {
    if m.sum_dof != num_rational::BigRational::from_integer(g.into()) {
        return Err(Error::Internal("closed-form sum-DoF disagrees with K(F - Z)/S".into()));
    }
    Ok(())
}
