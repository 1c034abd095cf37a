//! Closed-form metrics of dedicated-cache and multi-access baselines, and
//! comparison tables against the constructions of this crate.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::assembly::{predict_metrics, predict_knapsack, ClosedForm, Solver};
use crate::combinatorics::{binom, binom_big};
use crate::error::{constraint, invalid, Error, Result};
use crate::mapda::{big_json, rational_string, SchemeMetrics};
use crate::placement::SystemParams;

/// A baseline scheme and its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaselineSpec {
    /// Grouping-based dedicated-cache scheme with group size `m`.
    Ywcc { users: u64, t: u64, antennas: u64, m: u64 },
    /// Non-grouping dedicated-cache scheme with `beta = gcd(K, t, L)`.
    Npr { users: u64, t: u64, antennas: u64 },
    /// Dedicated-cache scheme with two-level subpacketization.
    Wcc { users: u64, t: u64, antennas: u64 },
    /// Multi-access scheme on `nodes` nodes with `L = r + 1` antennas.
    Pr { nodes: u64, access_degree: u64, t: u64, antennas: u64 },
}

impl BaselineSpec {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineSpec::Ywcc { .. } => "ywcc",
            BaselineSpec::Npr { .. } => "npr",
            BaselineSpec::Wcc { .. } => "wcc",
            BaselineSpec::Pr { .. } => "pr",
        }
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn dedicated_checks(k: u64, t: u64, l: u64) -> Result<()> {
    if k == 0 || t == 0 || t > k {
        return Err(invalid(format!("dedicated memory t={t} must lie in [1, K={k}]")));
    }
    if l == 0 || t + l > k {
        return Err(constraint(format!("baseline requires t + L <= K (t={t}, L={l}, K={k})")));
    }
    Ok(())
}

fn with_dof(m: SchemeMetrics, g: BigUint) -> Result<SchemeMetrics> {
    if m.sum_dof != BigRational::from_integer(BigInt::from(g)) {
        return Err(Error::Internal("baseline formulas disagree with K(F - Z)/S".into()));
    }
    Ok(m)
}

/// `(K, F, Z, S)` and sum-DoF of a baseline.
pub fn baseline_metrics(spec: &BaselineSpec) -> Result<SchemeMetrics> {
    match *spec {
        BaselineSpec::Ywcc { users: k, t, antennas: l, m } => {
            dedicated_checks(k, t, l)?;
            if m == 0 || k % m != 0 || t % m != 0 {
                return Err(constraint(format!("grouping requires m | K and m | t (m={m}, K={k}, t={t})")));
            }
            let (n, c) = (k / m, (t / m) as i64);
            let out = if m == l {
                SchemeMetrics::from_counts(big(k), binom_big(n, c), binom_big(n - 1, c - 1), binom_big(n, c + 1))?
            } else {
                let g = m.gcd(&l.abs_diff(m));
                SchemeMetrics::from_counts(
                    big(k),
                    big((t + l) / g) * binom_big(n, c),
                    big((t + l) / g) * binom_big(n - 1, c - 1),
                    big((t + m) / g) * binom_big(n, c + 1),
                )?
            };
            with_dof(out, big(t + l))
        }
        BaselineSpec::Npr { users: k, t, antennas: l } => {
            dedicated_checks(k, t, l)?;
            let beta = k.gcd(&t).gcd(&l);
            let (n, c) = (k / beta, ((t + l) / beta) as i64);
            let out = SchemeMetrics::from_counts(
                big(k),
                big((t + l) / beta) * binom_big(n, c),
                big(t / beta) * binom_big(n - 1, c - 1),
                big((k - t) / beta) * binom_big(n, c),
            )?;
            with_dof(out, big(t + l))
        }
        BaselineSpec::Wcc { users: k, t, antennas: l } => {
            dedicated_checks(k, t, l)?;
            let (f, z, s) = if (k - t) % 2 == 1 {
                (2 * l * k, 2 * l * t, big(k) * (k - t))
            } else if k % l != 0 {
                (l * k, l * t, big(k) * (k - t) / 2u32)
            } else {
                (k, t, big(k) * (k - t) / (2 * l))
            };
            with_dof(SchemeMetrics::from_counts(big(k), big(f), big(z), s)?, big(2 * l))
        }
        BaselineSpec::Pr { nodes: c, access_degree: r, t, antennas: l } => {
            if r == 0 || r >= c || t == 0 {
                return Err(invalid(format!("need 1 <= r < nodes and t >= 1 (nodes={c}, r={r}, t={t})")));
            }
            if l != r + 1 {
                return Err(constraint(format!("multi-access baseline requires L = r + 1 (L={l}, r={r})")));
            }
            if t + r + 1 > c {
                return Err(constraint(format!("multi-access baseline requires t + r + 1 <= nodes (t={t}, r={r}, nodes={c})")));
            }
            let rows = binom_big(c, t as i64);
            let f = big(c - t - r) * &rows;
            let z = big(c - t - r) * (&rows - binom_big(c - r, t as i64));
            let s = big(t + 1) * binom_big(c, (t + r + 1) as i64);
            let out = SchemeMetrics::from_counts(binom_big(c, r as i64), f, z, s)?;
            with_dof(out, binom_big(t + l, r as i64))
        }
    }
}

/// Any scheme that can appear in a comparison table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeSpec {
    Baseline(BaselineSpec),
    Closed { params: SystemParams, form: ClosedForm },
    Knapsack { params: SystemParams, solver: Solver },
}

/// One comparison-table line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub scheme: String,
    pub parameters: String,
    pub antennas: u64,
    /// `M/N`: `t/K` for dedicated caches, retrieved fraction `Z/F` for multi-access.
    pub memory_ratio: BigRational,
    pub memory_convention: &'static str,
    pub metrics: SchemeMetrics,
}

impl TableRow {
    pub const HEADER: [&'static str; 11] = ["scheme", "parameters", "K", "M/N", "M/N convention", "L", "F", "Z", "S", "sum_dof", "sum_dof_decimal"];

    pub fn fields(&self) -> Vec<String> {
        let dof = &self.metrics.sum_dof;
        let dec = dof.numer().to_string().parse::<f64>().unwrap_or(f64::NAN) / dof.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
        vec![
            self.scheme.clone(),
            self.parameters.clone(),
            self.metrics.users.to_string(),
            rational_string(&self.memory_ratio),
            self.memory_convention.to_string(),
            self.antennas.to_string(),
            self.metrics.subpacketization.to_string(),
            self.metrics.stars_per_column.to_string(),
            self.metrics.symbols.to_string(),
            rational_string(dof),
            format!("{dec:.4}"),
        ]
    }

    pub fn to_json(&self) -> Value {
        json!({
            "scheme": self.scheme,
            "parameters": self.parameters,
            "K": big_json(&self.metrics.users),
            "M/N": rational_string(&self.memory_ratio),
            "M/N convention": self.memory_convention,
            "L": self.antennas,
            "F": big_json(&self.metrics.subpacketization),
            "Z": big_json(&self.metrics.stars_per_column),
            "S": big_json(&self.metrics.symbols),
            "sum_dof": rational_string(&self.metrics.sum_dof),
        })
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeSpec::Baseline(b) => match *b {
                BaselineSpec::Ywcc { users, t, antennas, m } => write!(f, "K={users},t={t},L={antennas},m={m}"),
                BaselineSpec::Npr { users, t, antennas } => {
                    write!(f, "K={users},t={t},L={antennas},beta={}", users.gcd(&t).gcd(&antennas))
                }
                BaselineSpec::Wcc { users, t, antennas } => write!(f, "K={users},t={t},L={antennas}"),
                BaselineSpec::Pr { nodes, access_degree, t, antennas } => {
                    write!(f, "nodes={nodes},r={access_degree},t={t},L={antennas}")
                }
            },
            SchemeSpec::Closed { params: p, form } => {
                write!(f, "nodes={},r={},t={},b={},L={}", p.num_nodes, p.access_degree, p.placement_t, p.shift_b, p.antennas)?;
                if let ClosedForm::Single { lambda_prime } = form {
                    write!(f, ",size={lambda_prime}")?;
                }
                Ok(())
            }
            SchemeSpec::Knapsack { params: p, .. } => {
                write!(f, "nodes={},r={},t={},b={},L={}", p.num_nodes, p.access_degree, p.placement_t, p.shift_b, p.antennas)
            }
        }
    }
}

fn scheme_name(spec: &SchemeSpec) -> String {
    match spec {
        SchemeSpec::Baseline(b) => b.name().to_string(),
        SchemeSpec::Closed { form, .. } => match form {
            ClosedForm::Greedy => "co1".into(),
            ClosedForm::Optimal => "co2".into(),
            ClosedForm::Merged => "co3".into(),
            ClosedForm::Single { .. } => "co4".into(),
        },
        SchemeSpec::Knapsack { solver, .. } => match solver {
            Solver::Dp => "thm1".into(),
            Solver::Greedy => "thm1-greedy".into(),
            Solver::Optimal => "thm1-optimal".into(),
        },
    }
}

/// Evaluates one scheme into a table row.
pub fn table_row(spec: &SchemeSpec) -> Result<TableRow> {
    let (metrics, antennas, memory_ratio, memory_convention) = match spec {
        SchemeSpec::Baseline(b) => {
            let m = baseline_metrics(b)?;
            match *b {
                BaselineSpec::Pr { antennas, .. } => {
                    let ratio = m.memory_ratio();
                    (m, antennas, ratio, "retrieved")
                }
                BaselineSpec::Ywcc { users, t, antennas, .. } | BaselineSpec::Npr { users, t, antennas } | BaselineSpec::Wcc { users, t, antennas } => {
                    (m, antennas, BigRational::new(BigInt::from(t), BigInt::from(users)), "dedicated")
                }
            }
        }
        SchemeSpec::Closed { params, form } => {
            let m = predict_metrics(params, *form)?;
            let ratio = m.memory_ratio();
            (m, params.antennas as u64, ratio, "retrieved")
        }
        SchemeSpec::Knapsack { params, solver } => {
            let m = predict_knapsack(params, *solver)?;
            let ratio = m.memory_ratio();
            (m, params.antennas as u64, ratio, "retrieved")
        }
    };
    Ok(TableRow { scheme: scheme_name(spec), parameters: spec.to_string(), antennas, memory_ratio, memory_convention, metrics })
}

/// Evaluates every scheme; the first failure aborts.
pub fn comparison_table(rows: &[SchemeSpec]) -> Result<Vec<TableRow>> {
    rows.iter().map(table_row).collect()
}

fn params(nodes: usize, r: usize, t: usize, l: usize, b: usize) -> SystemParams {
    SystemParams::new(nodes, r, t, l, b).expect("static parameters are valid")
}

/// The eight dedicated-vs-multi-access pairs of the published comparison,
/// baseline first in each pair.
pub fn reference_rows() -> Vec<SchemeSpec> {
    let ywcc = |users, t, antennas, m| SchemeSpec::Baseline(BaselineSpec::Ywcc { users, t, antennas, m });
    let npr = |users, t, antennas| SchemeSpec::Baseline(BaselineSpec::Npr { users, t, antennas });
    let opt = |n, r, t, l| SchemeSpec::Closed { params: params(n, r, t, l, 0), form: ClosedForm::Optimal };
    vec![
        ywcc(15, 9, 5, 3),
        opt(6, 2, 2, 5),
        ywcc(21, 11, 7, 1),
        opt(7, 2, 2, 7),
        ywcc(21, 15, 5, 3),
        opt(7, 2, 3, 5),
        ywcc(56, 36, 19, 4),
        opt(8, 3, 2, 19),
        npr(15, 9, 5),
        opt(6, 2, 2, 5),
        npr(56, 36, 19),
        opt(8, 3, 2, 19),
        npr(36, 21, 10),
        opt(9, 2, 3, 10),
        npr(78, 50, 16),
        opt(13, 2, 5, 16),
    ]
}

/// Parses a row description such as
/// `{"scheme": "ywcc", "K": 15, "t": 9, "L": 5, "m": 3}` or
/// `{"scheme": "co2", "nodes": 6, "r": 2, "t": 2, "L": 5}`.
pub fn scheme_from_json(v: &Value) -> Result<SchemeSpec> {
    let name = v.get("scheme").and_then(Value::as_str).ok_or_else(|| Error::Parse("row needs a \"scheme\" string".into()))?;
    let num = |k: &str| -> Result<u64> { v.get(k).and_then(Value::as_u64).ok_or_else(|| Error::Parse(format!("{name} row needs integer {k:?}"))) };
    let opt = |k: &str, d: u64| -> u64 { v.get(k).and_then(Value::as_u64).unwrap_or(d) };
    let sys = || -> Result<SystemParams> {
        SystemParams::new(num("nodes")? as usize, num("r")? as usize, num("t")? as usize, num("L")? as usize, opt("b", 0) as usize)
    };
    Ok(match name.to_ascii_lowercase().as_str() {
        "ywcc" => SchemeSpec::Baseline(BaselineSpec::Ywcc { users: num("K")?, t: num("t")?, antennas: num("L")?, m: num("m")? }),
        "npr" => SchemeSpec::Baseline(BaselineSpec::Npr { users: num("K")?, t: num("t")?, antennas: num("L")? }),
        "wcc" => SchemeSpec::Baseline(BaselineSpec::Wcc { users: num("K")?, t: num("t")?, antennas: num("L")? }),
        "pr" => SchemeSpec::Baseline(BaselineSpec::Pr { nodes: num("nodes")?, access_degree: num("r")?, t: num("t")?, antennas: num("L")? }),
        "thm1" | "dp" => SchemeSpec::Knapsack { params: sys()?, solver: Solver::Dp },
        other => {
            let form = if other.starts_with("co4") || other.starts_with("thm5") || other.starts_with("single") {
                ClosedForm::Single { lambda_prime: num("size")? as usize }
            } else {
                other.parse()?
            };
            SchemeSpec::Closed { params: sys()?, form }
        }
    })
}

/// Schemes a sweep can evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepScheme {
    /// Exact knapsack, best shift (`thm1`).
    Knapsack,
    /// Greedy closed form, best shift (`co1`).
    Greedy,
    /// All-levels closed form, `b = 0` (`co2`).
    Optimal,
    /// Complementary-anchor merge; the shift is fixed by `nodes = 2(t + r - b)` (`co3`).
    Merged,
    /// Sub-network scheme with the largest admissible sub-network (`co4`).
    SubNetwork,
    Ywcc,
    Npr,
    Wcc,
    Pr,
}

impl std::str::FromStr for SweepScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "thm1" => SweepScheme::Knapsack,
            "co1" | "thm2" => SweepScheme::Greedy,
            "co2" | "thm3" => SweepScheme::Optimal,
            "co3" | "thm4" => SweepScheme::Merged,
            "co4" | "thm5" => SweepScheme::SubNetwork,
            "ywcc" => SweepScheme::Ywcc,
            "npr" => SweepScheme::Npr,
            "wcc" => SweepScheme::Wcc,
            "pr" => SweepScheme::Pr,
            other => return Err(Error::Parse(format!("unknown sweep scheme {other:?}"))),
        })
    }
}

fn best_over_shifts(p: &SystemParams, eval: impl Fn(&SystemParams) -> Result<SchemeMetrics>) -> Option<(SystemParams, SchemeMetrics)> {
    let mut best: Option<(SystemParams, SchemeMetrics)> = None;
    for b in 0..p.access_degree {
        let Ok(q) = p.with_shift(b) else { continue };
        let Ok(m) = eval(&q) else { continue };
        let better = best.as_ref().map_or(true, |(_, cur)| {
            m.sum_dof > cur.sum_dof || (m.sum_dof == cur.sum_dof && m.subpacketization < cur.subpacketization)
        });
        if better {
            best = Some((q, m));
        }
    }
    best
}

/// Row of `scheme` at one memory point `(nodes, r, t, L)`; `None` when the
/// scheme has no admissible instance there.
pub fn sweep_point(scheme: SweepScheme, nodes: usize, r: usize, t: usize, antennas: usize) -> Option<TableRow> {
    let base = SystemParams::new(nodes, r, t, antennas, 0).ok()?;
    let users = base.users();
    let dedicated_t = users - binom((nodes - t) as u64, r as i64).ok()?;
    let spec = match scheme {
        SweepScheme::Knapsack => {
            let (q, _) = best_over_shifts(&base, |q| predict_knapsack(q, Solver::Dp))?;
            SchemeSpec::Knapsack { params: q, solver: Solver::Dp }
        }
        SweepScheme::Greedy => {
            let (q, _) = best_over_shifts(&base, |q| predict_metrics(q, ClosedForm::Greedy))?;
            SchemeSpec::Closed { params: q, form: ClosedForm::Greedy }
        }
        SweepScheme::Optimal => SchemeSpec::Closed { params: base, form: ClosedForm::Optimal },
        SweepScheme::Merged => {
            let b = (t + r).checked_sub(nodes / 2)?;
            SchemeSpec::Closed { params: base.with_shift(b).ok()?, form: ClosedForm::Merged }
        }
        SweepScheme::SubNetwork => {
            let size = (t + r..=nodes).rev().find(|&h| binom((h - t) as u64, r as i64).is_ok_and(|x| x <= antennas as u64))?;
            SchemeSpec::Closed { params: base, form: ClosedForm::Single { lambda_prime: size } }
        }
        SweepScheme::Ywcc => {
            let l = antennas as u64;
            let spec = (1..=dedicated_t)
                .filter(|m| users % m == 0 && dedicated_t % m == 0)
                .map(|m| BaselineSpec::Ywcc { users, t: dedicated_t, antennas: l, m })
                .filter_map(|s| baseline_metrics(&s).ok().map(|m| (s, m)))
                .min_by(|a, b| a.1.subpacketization.cmp(&b.1.subpacketization))?
                .0;
            SchemeSpec::Baseline(spec)
        }
        SweepScheme::Npr => SchemeSpec::Baseline(BaselineSpec::Npr { users, t: dedicated_t, antennas: antennas as u64 }),
        SweepScheme::Wcc => SchemeSpec::Baseline(BaselineSpec::Wcc { users, t: dedicated_t, antennas: antennas as u64 }),
        SweepScheme::Pr => SchemeSpec::Baseline(BaselineSpec::Pr { nodes: nodes as u64, access_degree: r as u64, t: t as u64, antennas: antennas as u64 }),
    };
    table_row(&spec).ok()
}

/// Rows of every scheme at every `t` in `[1, nodes - r]`, skipping
/// inadmissible points.
pub fn sweep(schemes: &[SweepScheme], nodes: usize, r: usize, antennas: usize) -> Result<Vec<TableRow>> {
    if r == 0 || r >= nodes {
        return Err(invalid(format!("need 1 <= r < nodes (r={r}, nodes={nodes})")));
    }
    let points: Vec<(SweepScheme, usize)> = schemes.iter().flat_map(|&s| (1..=nodes - r).map(move |t| (s, t))).collect();
    let rows = crate::exec::map_slice(&points, |&(s, t)| sweep_point(s, nodes, r, t, antennas));
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fg(spec: BaselineSpec) -> (String, String) {
        let m = baseline_metrics(&spec).unwrap();
        (m.subpacketization.to_string(), rational_string(&m.sum_dof))
    }

    #[test]
    fn grouping_scheme_rows() {
        assert_eq!(fg(BaselineSpec::Ywcc { users: 15, t: 9, antennas: 5, m: 3 }), ("140".into(), "14".into()));
        assert_eq!(fg(BaselineSpec::Ywcc { users: 21, t: 11, antennas: 7, m: 1 }), ("6348888".into(), "18".into()));
        // m = L switches to the second formula
        let (f, g) = fg(BaselineSpec::Ywcc { users: 20, t: 10, antennas: 5, m: 5 });
        assert_eq!((f, g), ("6".into(), "15".into()));
        assert!(baseline_metrics(&BaselineSpec::Ywcc { users: 15, t: 9, antennas: 5, m: 2 }).is_err());
    }

    #[test]
    fn non_grouping_beta_is_computed() {
        assert_eq!(fg(BaselineSpec::Npr { users: 78, t: 50, antennas: 16 }), ("107666559".into(), "66".into()));
    }

    #[test]
    fn two_level_cases() {
        let g = |k, t, l| fg(BaselineSpec::Wcc { users: k, t, antennas: l });
        assert_eq!(g(10, 3, 2), ("40".into(), "4".into()));
        assert_eq!(g(9, 3, 2), ("18".into(), "4".into()));
        assert_eq!(g(10, 4, 2), ("10".into(), "4".into()));
        assert!(baseline_metrics(&BaselineSpec::Wcc { users: 5, t: 4, antennas: 2 }).is_err());
    }

    #[test]
    fn multi_access_baseline() {
        let m = baseline_metrics(&BaselineSpec::Pr { nodes: 9, access_degree: 3, t: 2, antennas: 4 }).unwrap();
        assert_eq!(m.tuple(), Some((84, 144, 144 - 4 * 15, 252)));
        assert!(baseline_metrics(&BaselineSpec::Pr { nodes: 9, access_degree: 3, t: 2, antennas: 5 }).is_err());
    }

    #[test]
    fn json_rows() {
        let s = scheme_from_json(&json!({"scheme": "co2", "nodes": 6, "r": 2, "t": 2, "L": 5})).unwrap();
        assert_eq!(table_row(&s).unwrap().metrics.subpacketization, big(105));
        let s = scheme_from_json(&json!({"scheme": "co4", "nodes": 9, "r": 3, "t": 2, "L": 4, "size": 6})).unwrap();
        assert_eq!(table_row(&s).unwrap().metrics.subpacketization, big(144));
        assert!(scheme_from_json(&json!({"scheme": "ywcc", "K": 15})).is_err());
        assert!(scheme_from_json(&json!({"scheme": "nope"})).is_err());
    }

    #[test]
    fn sweep_skips_inadmissible_points() {
        let rows = sweep(&[SweepScheme::Optimal, SweepScheme::Pr], 9, 2, 3).unwrap();
        assert!(rows.iter().all(|r| r.scheme == "pr" || r.scheme == "co2"));
        assert!(!rows.is_empty());
    }
}
