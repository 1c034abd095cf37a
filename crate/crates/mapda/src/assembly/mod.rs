//! Filling the user-retrieve array with vectors and replicating it into a
//! MAPDA.

mod merged;
mod predict;
mod single;
mod filling;

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

use serde_json::{json, Value};

pub use merged::construct_merged;
pub use predict::{predict_family, predict_metrics, predict_knapsack, ClosedForm};
pub use single::construct_sub_network;
pub use filling::{construct_knapsack, construct_knapsack_best_shift, fill_anchor, fill_subarray, solve_base};

use crate::combinatorics::Subset;
use crate::error::{Error, Result};
use crate::knapsack::SolutionFamily;
use crate::mapda::{Entry, Mapda};
use crate::placement::{StarArray, SystemParams};

/// Label of one filled vector: the anchor it came from, the rotation of the
/// knapsack solution (1-based), and the copy index within a column (1-based).
/// Ordering is by anchor, then rotation, then copy index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FillVector {
    pub anchor: Subset,
    pub rotation: u32,
    pub sub_index: u32,
}

/// The user-retrieve array with a list of vectors in each Null cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilledArray {
    antennas: usize,
    base: StarArray,
    cells: Vec<Vec<FillVector>>,
}

impl FilledArray {
    pub fn new(antennas: usize, base: StarArray) -> Self {
        let cells = vec![Vec::new(); base.rows() * base.cols()];
        FilledArray { antennas, base, cells }
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn base(&self) -> &StarArray {
        &self.base
    }

    pub fn vectors(&self, row: usize, col: usize) -> &[FillVector] {
        &self.cells[row * self.base.cols() + col]
    }

    /// Appends `v` to a Null cell; writing into a star cell is an error.
    pub fn push(&mut self, row: usize, col: usize, v: FillVector) -> Result<()> {
        if self.base.is_star(row, col) {
            return Err(Error::Internal(format!("vector written into star cell ({row}, {col})")));
        }
        self.cells[row * self.base.cols() + col].push(v);
        Ok(())
    }

    pub(crate) fn push_cell(&mut self, cell: usize, v: FillVector) -> Result<()> {
        let cols = self.base.cols();
        self.push(cell / cols, cell % cols, v)
    }

    /// The common number of vectors in every Null cell.
    pub fn pi(&self) -> Result<usize> {
        let mut pi = None;
        for (i, cell) in self.cells.iter().enumerate() {
            let (r, c) = (i / self.base.cols(), i % self.base.cols());
            if self.base.is_star(r, c) {
                if !cell.is_empty() {
                    return Err(Error::NonUniformFill(format!("star cell ({r}, {c}) holds vectors")));
                }
            } else if *pi.get_or_insert(cell.len()) != cell.len() || cell.is_empty() {
                return Err(Error::NonUniformFill(format!(
                    "cell ({r}, {c}) holds {} vectors, expected {}",
                    cell.len(),
                    pi.unwrap_or(0)
                )));
            }
        }
        pi.ok_or_else(|| Error::NonUniformFill("array has no Null cell".into()))
    }

    /// Number of distinct vectors.
    pub fn distinct_vectors(&self) -> usize {
        let mut all: Vec<FillVector> = self.cells.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    }

    /// Compact JSON: base labels plus the vector lists keyed by `"T|D"`.
    pub fn to_compact_json(&self) -> Result<Value> {
        let pi = self.pi()?;
        let g = self.base.ground();
        let mut vectors = BTreeMap::new();
        for r in 0..self.base.rows() {
            for c in 0..self.base.cols() {
                let mut vs = self.vectors(r, c).to_vec();
                if vs.is_empty() {
                    continue;
                }
                vs.sort_unstable();
                let key = format!("{}|{}", self.base.row_labels()[r].label(g), self.base.col_labels()[c].label(g));
                let list: Vec<Value> = vs.iter().map(|v| json!([v.sub_index, v.anchor.label(g), v.rotation])).collect();
                vectors.insert(key, list);
            }
        }
        let z = (self.base.cols() > 0).then(|| self.base.stars_in_col(0) * pi);
        Ok(json!({
            "L": self.antennas,
            "K": self.base.cols(),
            "F": self.base.rows() * pi,
            "Z": z,
            "S": self.distinct_vectors(),
            "nodes": g,
            "pi": pi,
            "base_rows": self.base.row_labels().iter().map(|s| s.label(g)).collect::<Vec<_>>(),
            "cols": self.base.col_labels().iter().map(|s| s.label(g)).collect::<Vec<_>>(),
            "vectors": vectors,
        }))
    }

    /// Parses [`FilledArray::to_compact_json`] output; returns the array and
    /// its declared `S`.
    pub fn from_compact_json(v: &Value) -> Result<(FilledArray, Option<u64>)> {
        let err = |m: &str| Error::Parse(m.to_string());
        let antennas = v.get("L").and_then(Value::as_u64).ok_or_else(|| err("missing L"))? as usize;
        let nodes = v.get("nodes").and_then(Value::as_u64).ok_or_else(|| err("missing nodes"))? as usize;
        let labels = |k: &str| -> Result<Vec<Subset>> {
            v.get(k)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("missing {k}")))?
                .iter()
                .map(|x| x.as_str().ok_or_else(|| err("labels must be strings")).and_then(Subset::parse_label))
                .collect()
        };
        let rows = labels("base_rows")?;
        let cols = labels("cols")?;
        let row_index: HashMap<Subset, usize> = rows.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let col_index: HashMap<Subset, usize> = cols.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut base = StarArray::new(nodes, rows.clone(), cols.clone());
        for r in 0..rows.len() {
            for c in 0..cols.len() {
                base.set(r, c, true);
            }
        }
        let map = v.get("vectors").and_then(Value::as_object).ok_or_else(|| err("missing vectors"))?;
        let mut parsed = Vec::new();
        for (key, list) in map {
            let (t, d) = key.split_once('|').ok_or_else(|| Error::Parse(format!("bad cell key {key:?}")))?;
            let r = *row_index.get(&Subset::parse_label(t)?).ok_or_else(|| Error::Parse(format!("unknown row {t:?}")))?;
            let c = *col_index.get(&Subset::parse_label(d)?).ok_or_else(|| Error::Parse(format!("unknown column {d:?}")))?;
            base.set(r, c, false);
            for item in list.as_array().ok_or_else(|| err("vector lists must be arrays"))? {
                let parts = item.as_array().filter(|a| a.len() == 3).ok_or_else(|| err("vectors are [sub, anchor, rotation]"))?;
                let num = |x: &Value| x.as_u64().and_then(|n| u32::try_from(n).ok()).ok_or_else(|| err("vector indices must be integers"));
                let anchor = Subset::parse_label(parts[1].as_str().ok_or_else(|| err("anchor must be a string"))?)?;
                parsed.push((r, c, FillVector { anchor, rotation: num(&parts[2])?, sub_index: num(&parts[0])? }));
            }
        }
        let mut out = FilledArray::new(antennas, base);
        for (r, c, fv) in parsed {
            out.push(r, c, fv)?;
        }
        Ok((out, v.get("S").and_then(Value::as_u64)))
    }
}

/// Stacks `pi` copies of the base rows; copy `c` of a Null cell takes the
/// cell's `c`-th vector in canonical order. Blocks are numbered by first
/// appearance in row-major order.
pub fn replicate(f: &FilledArray) -> Result<Mapda> {
    let pi = f.pi()?;
    let base = &f.base;
    let (rows, cols) = (base.rows(), base.cols());
    let mut sorted: Vec<Vec<FillVector>> = f.cells.clone();
    for cell in &mut sorted {
        cell.sort_unstable();
        if cell.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Internal("a cell received the same vector twice".into()));
        }
    }
    let mut ids: HashMap<FillVector, u32> = HashMap::new();
    let mut entries = Vec::with_capacity(pi * rows * cols);
    for copy in 0..pi {
        for r in 0..rows {
            for c in 0..cols {
                let cell = &sorted[r * cols + c];
                if cell.is_empty() {
                    entries.push(Entry::Star);
                } else {
                    let next = ids.len() as u32 + 1;
                    entries.push(Entry::Symbol(*ids.entry(cell[copy]).or_insert(next)));
                }
            }
        }
    }
    let g = base.ground();
    let row_labels = (1..=pi).flat_map(|c| base.row_labels().iter().map(move |t| format!("{c}:{}", t.label(g)))).collect();
    let col_labels = base.col_labels().iter().map(|d| d.label(g)).collect();
    let symbols = u32::try_from(ids.len()).map_err(|_| Error::Overflow("block count"))?;
    Mapda::new(f.antennas, pi * rows, cols, symbols, entries, row_labels, col_labels)
}

/// How the base knapsack solution is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Solver {
    /// Exact dynamic program.
    Dp,
    /// Closed-form greedy selection.
    Greedy,
    /// All-levels selection (requires `b = 0`, `nodes >= 2r + t` and enough antennas).
    Optimal,
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dp" => Ok(Solver::Dp),
            "greedy" => Ok(Solver::Greedy),
            "optimal" => Ok(Solver::Optimal),
            other => Err(Error::Parse(format!("unknown solver {other:?} (dp, greedy, optimal)"))),
        }
    }
}

/// A constructed scheme: the filled base array, its expansion, and the
/// rotation family used to fill it when there is one.
#[derive(Clone, Debug)]
pub struct Construction {
    pub params: SystemParams,
    pub filled: FilledArray,
    pub mapda: Mapda,
    pub family: Option<SolutionFamily>,
}
