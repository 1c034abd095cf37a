//! The MAPDA array, its four defining conditions, and performance metrics.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::assembly::{FillVector, FilledArray};
use crate::error::{Error, Result};
use crate::exec;

/// One cell of a MAPDA.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entry {
    Star,
    Symbol(u32),
}

impl Entry {
    fn encode(self) -> u32 {
        match self {
            Entry::Star => 0,
            Entry::Symbol(s) => s,
        }
    }

    fn decode(raw: u32) -> Entry {
        if raw == 0 {
            Entry::Star
        } else {
            Entry::Symbol(raw)
        }
    }

    fn to_json(self) -> Value {
        match self {
            Entry::Star => json!("*"),
            Entry::Symbol(s) => json!(s),
        }
    }

    fn from_json(v: &Value) -> Result<Entry> {
        match v {
            Value::String(s) if s == "*" => Ok(Entry::Star),
            Value::Number(n) => {
                let s = n.as_u64().filter(|&s| s >= 1 && s <= u32::MAX as u64);
                s.map(|s| Entry::Symbol(s as u32)).ok_or_else(|| Error::Parse(format!("symbol {n} out of range")))
            }
            other => Err(Error::Parse(format!("cell must be \"*\" or a positive integer, got {other}"))),
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Star => f.write_str("*"),
            Entry::Symbol(s) => write!(f, "{s}"),
        }
    }
}

/// An `F x K` array over `{*, 1..S}` for an `L`-antenna server. Rows are
/// packets, columns are users, integers are transmission blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mapda {
    antennas: usize,
    rows: usize,
    cols: usize,
    symbols: u32,
    cells: Vec<u32>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl Mapda {
    pub fn new(
        antennas: usize,
        rows: usize,
        cols: usize,
        symbols: u32,
        entries: Vec<Entry>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self> {
        if antennas == 0 {
            return Err(Error::InvalidArray("at least one antenna required".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidArray(format!("{} entries for a {rows}x{cols} array", entries.len())));
        }
        if row_labels.len() != rows || col_labels.len() != cols {
            return Err(Error::InvalidArray("label count does not match the array shape".into()));
        }
        Ok(Mapda { antennas, rows, cols, symbols, cells: entries.into_iter().map(Entry::encode).collect(), row_labels, col_labels })
    }

    /// Array with numeric labels from a row-major grid.
    pub fn from_grid(antennas: usize, symbols: u32, grid: &[Vec<Entry>]) -> Result<Self> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        if grid.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArray("ragged grid".into()));
        }
        Mapda::new(
            antennas,
            rows,
            cols,
            symbols,
            grid.concat(),
            (1..=rows).map(|i| i.to_string()).collect(),
            (1..=cols).map(|i| i.to_string()).collect(),
        )
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Declared number of transmission blocks `S`.
    pub fn symbols(&self) -> u32 {
        self.symbols
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn get(&self, row: usize, col: usize) -> Entry {
        Entry::decode(self.cells[row * self.cols + col])
    }

    pub fn set(&mut self, row: usize, col: usize, e: Entry) {
        self.cells[row * self.cols + col] = e.encode();
    }

    pub fn row(&self, row: usize) -> impl Iterator<Item = Entry> + '_ {
        self.cells[row * self.cols..(row + 1) * self.cols].iter().map(|&c| Entry::decode(c))
    }

    pub(crate) fn raw_row(&self, row: usize) -> &[u32] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn stars_in_col(&self, col: usize) -> usize {
        (0..self.rows).filter(|&r| self.cells[r * self.cols + col] == 0).count()
    }

    /// Positions of every occurrence of each symbol `1..=max(S, largest entry)`,
    /// row-major. Index 0 of the outer vector is unused.
    pub fn occurrences(&self) -> Vec<Vec<(usize, usize)>> {
        let top = self.cells.iter().copied().max().unwrap_or(0).max(self.symbols) as usize;
        let mut occ = vec![Vec::new(); top + 1];
        for (i, &c) in self.cells.iter().enumerate() {
            if c != 0 {
                occ[c as usize].push((i / self.cols, i % self.cols));
            }
        }
        occ
    }

    pub fn to_json(&self) -> Value {
        let z = uniform_stars(self);
        json!({
            "L": self.antennas,
            "K": self.cols,
            "F": self.rows,
            "Z": z,
            "S": self.symbols,
            "rows": self.row_labels,
            "cols": self.col_labels,
            "entries": (0..self.rows).map(|r| self.row(r).map(Entry::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Mapda> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("missing field {k:?}")));
        let as_usize = |k: &str| -> Result<usize> {
            field(k)?.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse(format!("field {k:?} must be a non-negative integer")))
        };
        let antennas = as_usize("L")?;
        let symbols = u32::try_from(as_usize("S")?).map_err(|_| Error::Parse("S too large".into()))?;
        let grid = field("entries")?.as_array().ok_or_else(|| Error::Parse("entries must be an array".into()))?;
        let rows = grid.len();
        let mut entries = Vec::new();
        let mut cols = None;
        for row in grid {
            let row = row.as_array().ok_or_else(|| Error::Parse("entries rows must be arrays".into()))?;
            if *cols.get_or_insert(row.len()) != row.len() {
                return Err(Error::Parse("ragged entries".into()));
            }
            for cell in row {
                entries.push(Entry::from_json(cell)?);
            }
        }
        let cols = cols.unwrap_or(0);
        let labels = |k: &str, n: usize| -> Result<Vec<String>> {
            match v.get(k) {
                None => Ok((1..=n).map(|i| i.to_string()).collect()),
                Some(Value::Array(a)) => Ok(a.iter().map(|x| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string())).collect()),
                Some(_) => Err(Error::Parse(format!("{k:?} must be an array"))),
            }
        };
        if let (Some(f), Some(k)) = (v.get("F").and_then(Value::as_u64), v.get("K").and_then(Value::as_u64)) {
            if f as usize != rows || k as usize != cols {
                return Err(Error::Parse(format!("declared {f}x{k} but entries are {rows}x{cols}")));
            }
        }
        Mapda::new(antennas, rows, cols, symbols, entries, labels("rows", rows)?, labels("cols", cols)?)
    }
}

fn uniform_stars(m: &Mapda) -> Option<usize> {
    let z = (m.cols > 0).then(|| m.stars_in_col(0))?;
    (1..m.cols).all(|c| m.stars_in_col(c) == z).then_some(z)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarCountCheck {
    pub pass: bool,
    /// Most common star count per column (smallest on ties).
    pub modal_stars: usize,
    /// `(column, stars)` for every column off the modal count.
    pub deviations: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageCheck {
    pub pass: bool,
    /// Symbols in `1..=S` that never occur.
    pub missing: Vec<u32>,
    /// Entries above `S`.
    pub out_of_range: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepeatCheck {
    pub pass: bool,
    /// `(symbol, column, occurrences)` with more than one occurrence.
    pub violations: Vec<(u32, usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntennaCheck {
    pub pass: bool,
    /// `(symbol, row, interfering entries)` exceeding the antenna count.
    pub violations: Vec<(u32, usize, usize)>,
}

/// Outcome of checking the four MAPDA conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub valid: bool,
    /// Equal star count in every column.
    pub c1: StarCountCheck,
    /// Every block `1..=S` used.
    pub c2: CoverageCheck,
    /// No block twice in a column.
    pub c3: RepeatCheck,
    /// Each packet row of a block sees at most `L` integer entries on the block's columns.
    pub c4: AntennaCheck,
    /// Compact arrays only: every Null cell holds the same number of vectors.
    pub uniform_fill: Option<bool>,
}

impl VerificationReport {
    fn assemble(c1: StarCountCheck, c2: CoverageCheck, c3: RepeatCheck, c4: AntennaCheck, uniform_fill: Option<bool>) -> Self {
        let valid = c1.pass && c2.pass && c3.pass && c4.pass && uniform_fill.unwrap_or(true);
        VerificationReport { valid, c1, c2, c3, c4, uniform_fill }
    }

    /// Names of the failing conditions.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.uniform_fill == Some(false) {
            out.push("uniform-fill");
        }
        for (name, pass) in [("C1", self.c1.pass), ("C2", self.c2.pass), ("C3", self.c3.pass), ("C4", self.c4.pass)] {
            if !pass {
                out.push(name);
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let triples = |v: &[(u32, usize, usize)], k: &str| -> Vec<Value> {
            v.iter().map(|&(s, x, n)| json!({"symbol": s, k: x + 1, "count": n})).collect()
        };
        let mut out = json!({
            "valid": self.valid,
            "C1": {
                "pass": self.c1.pass,
                "Z": self.c1.modal_stars,
                "deviations": self.c1.deviations.iter().map(|&(c, n)| json!({"col": c + 1, "stars": n})).collect::<Vec<_>>(),
            },
            "C2": {"pass": self.c2.pass, "missing": self.c2.missing, "out_of_range": self.c2.out_of_range},
            "C3": {"pass": self.c3.pass, "violations": triples(&self.c3.violations, "col")},
            "C4": {"pass": self.c4.pass, "violations": triples(&self.c4.violations, "row")},
        });
        if let Some(u) = self.uniform_fill {
            out["uniform_fill"] = json!(u);
        }
        out
    }
}

fn star_check(counts: &[usize]) -> StarCountCheck {
    let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in counts {
        *freq.entry(c).or_default() += 1;
    }
    let modal = freq.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map_or(0, |(&z, _)| z);
    let deviations: Vec<(usize, usize)> = counts.iter().enumerate().filter(|(_, &c)| c != modal).map(|(i, &c)| (i, c)).collect();
    StarCountCheck { pass: deviations.is_empty(), modal_stars: modal, deviations }
}

/// Checks C1-C4 on an expanded array.
pub fn verify(m: &Mapda) -> VerificationReport {
    let col_stars = exec::map_range(m.cols, |c| m.stars_in_col(c));
    let c1 = star_check(&col_stars);

    let occ = m.occurrences();
    let missing: Vec<u32> = (1..=m.symbols).filter(|&s| occ[s as usize].is_empty()).collect();
    let out_of_range: Vec<u32> = (m.symbols as usize + 1..occ.len()).filter(|&s| !occ[s].is_empty()).map(|s| s as u32).collect();
    let c2 = CoverageCheck { pass: missing.is_empty() && out_of_range.is_empty() && m.symbols > 0, missing, out_of_range };

    let per_symbol = exec::map_range(occ.len(), |s| {
        if s == 0 || occ[s].is_empty() {
            return (Vec::new(), Vec::new());
        }
        symbol_violations(m, s as u32, &occ[s])
    });
    let mut repeats = Vec::new();
    let mut antenna = Vec::new();
    for (r, a) in per_symbol {
        repeats.extend(r);
        antenna.extend(a);
    }
    let c3 = RepeatCheck { pass: repeats.is_empty(), violations: repeats };
    let c4 = AntennaCheck { pass: antenna.is_empty(), violations: antenna };
    VerificationReport::assemble(c1, c2, c3, c4, None)
}

type Violations = (Vec<(u32, usize, usize)>, Vec<(u32, usize, usize)>);

fn symbol_violations(m: &Mapda, s: u32, occ: &[(usize, usize)]) -> Violations {
    let mut cols: Vec<usize> = occ.iter().map(|&(_, c)| c).collect();
    cols.sort_unstable();
    let mut repeats = Vec::new();
    let mut i = 0;
    while i < cols.len() {
        let j = cols[i..].iter().take_while(|&&c| c == cols[i]).count();
        if j > 1 {
            repeats.push((s, cols[i], j));
        }
        i += j;
    }
    cols.dedup();
    let mut rows: Vec<usize> = occ.iter().map(|&(r, _)| r).collect();
    rows.dedup();
    let mut antenna = Vec::new();
    for &r in &rows {
        let row = m.raw_row(r);
        let n = cols.iter().filter(|&&c| row[c] != 0).count();
        if n > m.antennas {
            antenna.push((s, r, n));
        }
    }
    (repeats, antenna)
}

/// Checks C1-C4 on a filled base array without expanding it; symbols are
/// numbered by the sorted order of their vectors.
pub fn verify_compact(f: &FilledArray, declared_symbols: Option<u64>) -> VerificationReport {
    let base = f.base();
    let (rows, cols) = (base.rows(), base.cols());
    let mut pi = None;
    let mut uniform = true;
    for r in 0..rows {
        for c in 0..cols {
            let n = f.vectors(r, c).len();
            if base.is_star(r, c) {
                uniform &= n == 0;
            } else {
                uniform &= n > 0 && *pi.get_or_insert(n) == n;
            }
        }
    }
    let pi = pi.unwrap_or(0);
    let col_stars: Vec<usize> = (0..cols).map(|c| base.stars_in_col(c) * pi.max(1)).collect();
    let c1 = star_check(&col_stars);

    let mut all: Vec<(FillVector, usize, usize)> = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            all.extend(f.vectors(r, c).iter().map(|&v| (v, r, c)));
        }
    }
    all.sort_unstable();
    let mut groups: Vec<&[(FillVector, usize, usize)]> = Vec::new();
    let mut i = 0;
    while i < all.len() {
        let j = all[i..].iter().take_while(|x| x.0 == all[i].0).count();
        groups.push(&all[i..i + j]);
        i += j;
    }
    let distinct = groups.len() as u64;
    let declared = declared_symbols.unwrap_or(distinct);
    let c2 = CoverageCheck {
        pass: distinct == declared && distinct > 0,
        missing: (distinct + 1..=declared).map(|s| s as u32).collect(),
        out_of_range: (declared + 1..=distinct).map(|s| s as u32).collect(),
    };

    let per_symbol = exec::map_slice(&groups.iter().enumerate().collect::<Vec<_>>(), |&(idx, occ)| {
        let s = idx as u32 + 1;
        let mut cs: Vec<usize> = occ.iter().map(|x| x.2).collect();
        cs.sort_unstable();
        let mut repeats = Vec::new();
        let mut k = 0;
        while k < cs.len() {
            let j = cs[k..].iter().take_while(|&&c| c == cs[k]).count();
            if j > 1 {
                repeats.push((s, cs[k], j));
            }
            k += j;
        }
        cs.dedup();
        let mut rs: Vec<usize> = occ.iter().map(|x| x.1).collect();
        rs.sort_unstable();
        rs.dedup();
        let mut antenna = Vec::new();
        for &r in &rs {
            let n = cs.iter().filter(|&&c| !base.is_star(r, c)).count();
            if n > f.antennas() {
                antenna.push((s, r, n));
            }
        }
        (repeats, antenna)
    });
    let mut repeats = Vec::new();
    let mut antenna = Vec::new();
    for (r, a) in per_symbol {
        repeats.extend(r);
        antenna.extend(a);
    }
    let c3 = RepeatCheck { pass: repeats.is_empty(), violations: repeats };
    let c4 = AntennaCheck { pass: antenna.is_empty(), violations: antenna };
    VerificationReport::assemble(c1, c2, c3, c4, Some(uniform))
}

/// `(K, F, Z, S)`, the per-block user counts and the sum-DoF of a scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeMetrics {
    pub users: BigUint,
    pub subpacketization: BigUint,
    pub stars_per_column: BigUint,
    pub symbols: BigUint,
    pub sum_dof: BigRational,
    /// Users served by each block, when measured on an array.
    pub per_symbol_counts: Option<Vec<u64>>,
}

fn ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

impl SchemeMetrics {
    /// Metrics from `(K, F, Z, S)` with sum-DoF `K (F - Z) / S`.
    pub fn from_counts(users: BigUint, subpacketization: BigUint, stars_per_column: BigUint, symbols: BigUint) -> Result<Self> {
        if symbols.is_zero() || subpacketization.is_zero() || stars_per_column > subpacketization {
            return Err(Error::Internal(format!("inconsistent counts F={subpacketization}, Z={stars_per_column}, S={symbols}")));
        }
        let sum_dof = ratio(&(&users * (&subpacketization - &stars_per_column)), &symbols);
        Ok(SchemeMetrics { users, subpacketization, stars_per_column, symbols, sum_dof, per_symbol_counts: None })
    }

    /// Cached fraction of the library per user, `Z / F`.
    pub fn memory_ratio(&self) -> BigRational {
        ratio(&self.stars_per_column, &self.subpacketization)
    }

    /// `(L, K, F, Z, S)` as machine integers, when they fit.
    pub fn tuple(&self) -> Option<(u64, u64, u64, u64)> {
        Some((self.users.to_u64()?, self.subpacketization.to_u64()?, self.stars_per_column.to_u64()?, self.symbols.to_u64()?))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "K": big_json(&self.users),
            "F": big_json(&self.subpacketization),
            "Z": big_json(&self.stars_per_column),
            "S": big_json(&self.symbols),
            "sum_dof": rational_string(&self.sum_dof),
            "memory_ratio": rational_string(&self.memory_ratio()),
        })
    }
}

/// Integer JSON value, or a decimal string beyond 64 bits.
pub fn big_json(x: &BigUint) -> Value {
    x.to_u64().map_or_else(|| json!(x.to_string()), |v| json!(v))
}

/// `"p/q"`, or `"p"` for integers.
pub fn rational_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn require_c1_to_c3(m: &Mapda) -> Result<(usize, Vec<Vec<(usize, usize)>>)> {
    let z = uniform_stars(m).ok_or_else(|| Error::InvalidArray("C1 fails: star counts differ across columns".into()))?;
    let occ = m.occurrences();
    if m.symbols == 0 || occ.len() != m.symbols as usize + 1 || occ[1..].iter().any(Vec::is_empty) {
        return Err(Error::InvalidArray("C2 fails: blocks 1..S not all used exactly".into()));
    }
    for (s, o) in occ.iter().enumerate().skip(1) {
        let mut cs: Vec<usize> = o.iter().map(|x| x.1).collect();
        cs.sort_unstable();
        if cs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArray(format!("C3 fails: block {s} repeats in a column")));
        }
    }
    Ok((z, occ))
}

/// Measured metrics of an array satisfying C1-C3.
pub fn metrics(m: &Mapda) -> Result<SchemeMetrics> {
    let (z, occ) = require_c1_to_c3(m)?;
    let counts: Vec<u64> = occ[1..].iter().map(|o| o.len() as u64).collect();
    let total: u64 = counts.iter().sum();
    let mut out = SchemeMetrics::from_counts(
        BigUint::from(m.cols),
        BigUint::from(m.rows),
        BigUint::from(z),
        BigUint::from(m.symbols),
    )?;
    let measured = ratio(&BigUint::from(total), &BigUint::from(m.symbols));
    if measured != out.sum_dof {
        return Err(Error::Internal("block sizes disagree with K(F-Z)/S".into()));
    }
    out.per_symbol_counts = Some(counts);
    Ok(out)
}

/// `min(K Z / F + L, K)`, the one-shot linear sum-DoF ceiling.
pub fn dof_upper_bound(m: &Mapda) -> Result<BigRational> {
    let z = uniform_stars(m).ok_or_else(|| Error::InvalidArray("C1 fails: star counts differ across columns".into()))?;
    let k = BigRational::from_integer(BigInt::from(m.cols));
    let bound = &k * ratio(&BigUint::from(z), &BigUint::from(m.rows)) + BigRational::from_integer(BigInt::from(m.antennas));
    Ok(if bound < k { bound } else { k })
}

/// Rows and columns touched by one block, and the entries they span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolSubarray {
    pub symbol: u32,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Row-major over `rows x cols`.
    pub entries: Vec<Entry>,
}

impl SymbolSubarray {
    pub fn get(&self, i: usize, j: usize) -> Entry {
        self.entries[i * self.cols.len() + j]
    }
}

pub fn symbol_subarray(m: &Mapda, s: u32) -> Result<SymbolSubarray> {
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    for r in 0..m.rows {
        for (c, &x) in m.raw_row(r).iter().enumerate() {
            if x == s && s != 0 {
                rows.push(r);
                cols.push(c);
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::UnknownSymbol(s));
    }
    rows.dedup();
    cols.sort_unstable();
    cols.dedup();
    let entries = rows.iter().flat_map(|&r| cols.iter().map(move |&c| (r, c))).map(|(r, c)| m.get(r, c)).collect();
    Ok(SymbolSubarray { symbol: s, rows, cols, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Entry::{Star as X, Symbol as N};

    fn example1() -> Mapda {
        Mapda::from_grid(
            2,
            2,
            &[vec![X, X, N(1), N(1)], vec![X, N(2), X, N(2)], vec![N(2), X, N(2), X], vec![N(1), N(1), X, X]],
        )
        .unwrap()
    }

    #[test]
    fn small_array_verifies() {
        let m = example1();
        let rep = verify(&m);
        assert!(rep.valid, "{:?}", rep.failures());
        let met = metrics(&m).unwrap();
        assert_eq!(met.tuple(), Some((4, 4, 2, 2)));
        assert_eq!(met.sum_dof, BigRational::from_integer(4.into()));
        assert_eq!(met.per_symbol_counts, Some(vec![4, 4]));
        assert_eq!(dof_upper_bound(&m).unwrap(), BigRational::from_integer(4.into()));
    }

    #[test]
    fn each_condition_can_fail() {
        let mut m = example1();
        m.set(0, 0, N(1));
        assert_eq!(verify(&m).failures(), ["C1", "C3", "C4"]);
        let mut m = example1();
        m.set(2, 0, N(1));
        let rep = verify(&m);
        assert_eq!(rep.c3.violations, vec![(1, 0, 2)]);
        let mut m = example1();
        m.set(3, 0, N(9));
        assert_eq!(verify(&m).c2.out_of_range, vec![9]);
        let empty = Mapda::from_grid(1, 0, &[vec![X]]).unwrap();
        assert!(!verify(&empty).c2.pass);
        assert!(metrics(&empty).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = example1();
        let v = m.to_json();
        assert_eq!(v["Z"], json!(2));
        assert_eq!(v["entries"][0], json!(["*", "*", 1, 1]));
        assert_eq!(Mapda::from_json(&v).unwrap(), m);
        let mut bad = v.clone();
        bad["entries"][0][0] = json!("x");
        assert!(Mapda::from_json(&bad).is_err());
        bad["entries"][0][0] = json!(0);
        assert!(Mapda::from_json(&bad).is_err());
    }

    #[test]
    fn subarray_of_block() {
        let m = example1();
        let sub = symbol_subarray(&m, 1).unwrap();
        assert_eq!(sub.rows, [0, 3]);
        assert_eq!(sub.cols, [0, 1, 2, 3]);
        assert_eq!(sub.entries, [X, X, N(1), N(1), N(1), N(1), X, X]);
        assert_eq!(symbol_subarray(&m, 7), Err(Error::UnknownSymbol(7)));
    }
}
