//! `qproc qubo` — QUBO encoders and the brute-force reference solver.

use crate::args::{QuboLinsysArgs, QuboOdeArgs, QuboSolveArgs};
use crate::util::{parse_f64_list, read_text, resolve_output, write_atomic, CliError, CliResult};
use nalgebra::DMatrix;
use qproc::circuits::{qubo_from_linear_system, OdeProblem, QuboProblem};
use serde_json::json;
use std::path::Path;

fn write_problem(q: &QuboProblem, explicit: Option<&Path>, summary: &str) -> CliResult<()> {
    let out = resolve_output(explicit, "qubo.json")?;
    write_atomic(&out, &q.to_json())?;
    let resolution = q
        .encoding
        .as_ref()
        .map(|e| format!(", resolution {}", e.resolution()))
        .unwrap_or_default();
    println!("{summary}: {} binary variables{resolution} -> {}", q.n_vars(), out.display());
    Ok(())
}

pub fn from_linsys(args: &QuboLinsysArgs) -> CliResult<()> {
    if args.bits < 2 {
        return Err(CliError::Usage(format!("--bits must be at least 2, got {}", args.bits)));
    }
    let matrix_text = read_text(&args.matrix)?;
    let rows: Vec<Vec<f64>> = serde_json::from_str(&matrix_text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.matrix.display())))?;
    let n_rows = rows.len();
    let n_cols = rows.first().map(Vec::len).unwrap_or(0);
    if n_rows == 0 || n_cols == 0 || rows.iter().any(|r| r.len() != n_cols) {
        return Err(CliError::Parse(format!(
            "{}: matrix is empty or ragged",
            args.matrix.display()
        )));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    let a = DMatrix::from_row_slice(n_rows, n_cols, &flat);

    let rhs_text = read_text(&args.rhs)?;
    let b: Vec<f64> = serde_json::from_str(&rhs_text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.rhs.display())))?;

    let q = qubo_from_linear_system(&a, &b, args.bits)
        .map_err(|e| CliError::Parse(format!("linear-system encoding: {e}")))?;
    write_problem(&q, args.output.as_deref(), &format!("{n_rows}x{n_cols} least squares"))
}

pub fn from_ode(args: &QuboOdeArgs) -> CliResult<()> {
    let f2 = parse_f64_list("f2", &args.f2, args.nt)?;
    let f1 = parse_f64_list("f1", &args.f1, args.nt)?;
    let f0 = parse_f64_list("f0", &args.f0, args.nt)?;
    let g = parse_f64_list("g", &args.g, args.nt)?;
    let ode = OdeProblem::new(f2, f1, f0, g, args.nt, args.y0, args.y1, args.bits)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let q = ode.qubo().map_err(|e| CliError::Usage(e.to_string()))?;
    write_problem(
        &q,
        args.output.as_deref(),
        &format!("ODE boundary-value problem on {} grid points", args.nt),
    )
}

pub fn solve(args: &QuboSolveArgs) -> CliResult<()> {
    let text = read_text(&args.qubo)?;
    let q = QuboProblem::from_json(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.qubo.display())))?;
    let (min_value, optima) = q
        .enumerate_optima()
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let decoded: Option<Vec<Vec<f64>>> = match &q.encoding {
        Some(enc) => Some(
            optima
                .iter()
                .map(|idx| enc.decode_index(*idx).map_err(|e| CliError::Runtime(e.to_string())))
                .collect::<CliResult<_>>()?,
        ),
        None => None,
    };

    println!("minimum value {min_value} attained by {} assignment(s)", optima.len());
    for (i, idx) in optima.iter().enumerate() {
        let bits: String = (0..q.n_vars())
            .map(|b| if idx >> b & 1 == 1 { '1' } else { '0' })
            .collect();
        match &decoded {
            Some(all) => println!("  bits {bits} -> {:?}", all[i]),
            None => println!("  bits {bits}"),
        }
    }

    if args.output.is_some() {
        let doc = json!({
            "min_value": min_value,
            "optima": optima,
            "decoded": decoded,
        });
        let mut contents = serde_json::to_string_pretty(&doc)
            .map_err(|e| CliError::Runtime(format!("serializing solution: {e}")))?;
        contents.push('\n');
        let out = resolve_output(args.output.as_deref(), "solution.json")?;
        write_atomic(&out, &contents)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
