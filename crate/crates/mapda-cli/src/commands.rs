use std::fs;
use std::io::Write;
use std::path::Path;

use mapda::baselines::{reference_rows, scheme_from_json};
use mapda::mapda::rational_string;
use mapda::{
    comparison_table, construct_knapsack, construct_knapsack_best_shift, construct_merged, construct_sub_network, metrics, replicate, simulate_trials,
    sweep as sweep_rows, verify as verify_array, verify_compact, FilledArray, Mapda, Solver, SweepScheme, SystemParams, TableRow,
};
use serde_json::{json, Map, Value};

use crate::{
    ArrayFormat, CompareArgs, ConstructArgs, Failure, KnapsackArgs, Method, NetworkArgs, ShiftMode, SimulateArgs, SolverArg, SweepArgs, TableFormat,
    VerifyArgs,
};

fn params(n: &NetworkArgs) -> Result<SystemParams, Failure> {
    Ok(SystemParams::new(n.lambda, n.r, n.t, n.antennas, n.b)?)
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Io(format!("parsing {}: {e}", path.display())))
}

/// Writes `text` to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("writing {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure::Io(format!("writing stdout: {e}")))
        }
    }
}

fn print_json(v: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    emit(None, &text)
}

fn is_compact(v: &Value) -> bool {
    v.get("vectors").is_some()
}

/// Loads an expanded or compact array file as an expanded array.
fn load_array(path: &Path) -> Result<Mapda, Failure> {
    let v = read_json(path)?;
    if is_compact(&v) {
        let (filled, _) = FilledArray::from_compact_json(&v)?;
        Ok(replicate(&filled)?)
    } else {
        Ok(Mapda::from_json(&v)?)
    }
}

fn invalid_array(failures: &[&str]) -> Failure {
    Failure::InvalidArray(format!("array violates {}", failures.join(", ")))
}

pub fn construct(a: &ConstructArgs) -> Result<(), Failure> {
    if a.b_mode == ShiftMode::Auto && a.method != Method::Thm1 {
        return Err(Failure::Usage("--b-mode auto is only available with --method thm1".into()));
    }
    if a.lambda_prime.is_some() != (a.method == Method::Thm5) {
        return Err(Failure::Usage("--lambda-prime is required by --method thm5 and accepted only there".into()));
    }
    if a.solver.is_some() && a.method != Method::Thm1 {
        return Err(Failure::Usage("--solver applies only to --method thm1".into()));
    }
    let p = params(&a.net)?;
    let solver: Solver = a.solver.unwrap_or(SolverArg::Dp).into();
    let c = match (a.method, a.b_mode) {
        (Method::Thm1, ShiftMode::Fixed) => construct_knapsack(&p, solver)?,
        (Method::Thm1, ShiftMode::Auto) => construct_knapsack_best_shift(&p, solver)?,
        (Method::Thm4, _) => construct_merged(&p)?,
        (Method::Thm5, _) => construct_sub_network(&p, a.lambda_prime.unwrap_or_default())?,
    };
    let report = verify_array(&c.mapda);
    if !report.valid {
        return Err(invalid_array(&report.failures()));
    }
    let m = metrics(&c.mapda)?;
    if let Some(path) = &a.out {
        let v = match a.format {
            ArrayFormat::Expanded => c.mapda.to_json(),
            ArrayFormat::Compact => c.filled.to_compact_json()?,
        };
        let mut text = serde_json::to_string(&v).map_err(|e| Failure::Io(e.to_string()))?;
        text.push('\n');
        emit(Some(path), &text)?;
    }
    let method = match a.method {
        Method::Thm1 => "thm1",
        Method::Thm4 => "thm4",
        Method::Thm5 => "thm5",
    };
    let mut out = Map::new();
    out.insert("method".into(), json!(method));
    if a.method == Method::Thm1 {
        out.insert("solver".into(), json!(format!("{solver:?}").to_ascii_lowercase()));
    }
    if let Some(size) = a.lambda_prime {
        out.insert("lambda_prime".into(), json!(size));
    }
    let q = &c.params;
    for (k, v) in [("nodes", q.num_nodes), ("r", q.access_degree), ("t", q.placement_t), ("b", q.shift_b), ("L", q.antennas)] {
        out.insert(k.into(), json!(v));
    }
    if let Value::Object(fields) = m.to_json() {
        out.extend(fields);
    }
    print_json(&Value::Object(out))
}

pub fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let v = read_json(&a.input)?;
    let report = if is_compact(&v) {
        let (filled, declared) = FilledArray::from_compact_json(&v)?;
        verify_compact(&filled, declared)
    } else {
        verify_array(&Mapda::from_json(&v)?)
    };
    print_json(&report.to_json())?;
    if report.valid {
        Ok(())
    } else {
        Err(invalid_array(&report.failures()))
    }
}

pub fn knapsack(a: &KnapsackArgs) -> Result<(), Failure> {
    let p = params(&a.net)?;
    let (inst, sol) = mapda::assembly::solve_base(&p, a.solver.into())?;
    let ground = p.num_nodes;
    let items: Vec<Value> = inst
        .items
        .iter()
        .map(|it| json!({"group": it.group.label(ground), "level": it.level, "z": it.weight, "v": it.value, "u": it.col_nulls}))
        .collect();
    let x: Map<String, Value> = inst.items.iter().zip(&sol.selected).map(|(it, &s)| (it.group.label(ground), json!(u8::from(s)))).collect();
    print_json(&json!({
        "anchor": inst.anchor.label(ground),
        "items": items,
        "L": inst.capacity,
        "x": x,
        "phi": sol.phi,
        "psi": sol.psi,
    }))
}

pub fn simulate(a: &SimulateArgs) -> Result<(), Failure> {
    if a.trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    if a.demand.is_some() && (a.trials != 1 || a.files.is_some()) {
        return Err(Failure::Usage("--demand fixes a single trial; drop --trials and --files".into()));
    }
    if !(a.tol > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let m = load_array(&a.input)?;
    let report = verify_array(&m);
    if !report.valid {
        return Err(invalid_array(&report.failures()));
    }
    let out = match &a.demand {
        Some(demand) => {
            let r = mapda::simulate(&m, demand, a.seed, a.tol)?;
            json!({
                "all_decoded": r.all_decoded,
                "max_residual": r.max_residual,
                "measured_dof": rational_string(&r.measured_dof),
                "trials": 1,
                "resamples": r.resamples,
            })
        }
        None => {
            let files = a.files.unwrap_or(m.cols());
            if files == 0 {
                return Err(Failure::Usage("--files must be positive".into()));
            }
            let r = simulate_trials(&m, files, a.trials, a.seed, a.tol)?;
            json!({
                "all_decoded": r.all_decoded,
                "max_residual": r.max_residual,
                "measured_dof": rational_string(&r.measured_dof),
                "trials": r.trials,
                "resamples": r.resamples,
            })
        }
    };
    print_json(&out)
}

fn table_text(rows: &[TableRow], format: TableFormat) -> Result<String, Failure> {
    match format {
        TableFormat::Json => {
            let v = Value::Array(rows.iter().map(TableRow::to_json).collect());
            let mut text = serde_json::to_string_pretty(&v).map_err(|e| Failure::Io(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure::Io(e.to_string());
            w.write_record(TableRow::HEADER).map_err(io)?;
            for row in rows {
                w.write_record(row.fields()).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

pub fn compare(a: &CompareArgs) -> Result<(), Failure> {
    let specs = match &a.rows {
        Some(path) => {
            let v = read_json(path)?;
            let list = v.get("rows").unwrap_or(&v);
            let list = list.as_array().ok_or_else(|| Failure::Io(format!("{}: expected an array of rows", path.display())))?;
            list.iter().map(scheme_from_json).collect::<Result<Vec<_>, _>>()?
        }
        None => reference_rows(),
    };
    let rows = comparison_table(&specs)?;
    emit(a.out.as_deref(), &table_text(&rows, a.format)?)
}

pub fn sweep(a: &SweepArgs) -> Result<(), Failure> {
    let schemes = a
        .scheme
        .iter()
        .map(|s| s.parse::<SweepScheme>().map_err(|e| Failure::Usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = sweep_rows(&schemes, a.lambda, a.r, a.antennas)?;
    emit(a.out.as_deref(), &table_text(&rows, a.format)?)
}
