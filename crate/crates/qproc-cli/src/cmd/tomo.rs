//! `qproc tomo` — maximum-likelihood tomography and Hamiltonian extraction.

use crate::args::{QdtArgs, QhtArgs, QptArgs, QstArgs};
use crate::util::{read_text, resolve_output, write_atomic, CliError, CliResult};
use nalgebra::DVector;
use num_complex::Complex64;
use qproc::linalg::{matrix_from_json, matrix_to_json, CMat, ComplexJson};
use qproc::tomo::{
    entanglement_fidelity, fidelity_to_target, qdt_mle, qht_extract, qpt_mle, qst_mle,
    MleOptions, MleReport, TomoDataset,
};
use serde_json::{json, Map, Value};
use std::path::Path;

fn load_dataset(path: &Path) -> CliResult<TomoDataset> {
    let text = read_text(path)?;
    TomoDataset::from_json(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> CliResult<CMat> {
    let text = read_text(path)?;
    let rows: Vec<Vec<ComplexJson>> = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    matrix_from_json(&rows)
        .ok_or_else(|| CliError::Parse(format!("{}: matrix is empty or ragged", path.display())))
}

fn report_fields(doc: &mut Map<String, Value>, report: &MleReport) {
    doc.insert("iterations".into(), json!(report.iterations));
    doc.insert("converged".into(), json!(report.converged));
    doc.insert("log_likelihood".into(), json!(report.log_likelihood.last()));
}

fn write_doc(doc: Map<String, Value>, explicit: Option<&Path>, name: &str) -> CliResult<std::path::PathBuf> {
    let mut contents = serde_json::to_string_pretty(&Value::Object(doc))
        .map_err(|e| CliError::Runtime(format!("serializing report: {e}")))?;
    contents.push('\n');
    let out = resolve_output(explicit, name)?;
    write_atomic(&out, &contents)?;
    Ok(out)
}

pub fn qst(args: &QstArgs) -> CliResult<()> {
    let ds = load_dataset(&args.data)?;
    let opts = MleOptions { max_iters: args.max_iters, rel_tol: args.tol };
    let est = qst_mle(&ds, args.rank, &opts).map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut doc = Map::new();
    doc.insert("rho".into(), json!(matrix_to_json(&est.rho)));
    report_fields(&mut doc, &est.report);
    let mut summary_extra = String::new();
    if let Some(target_path) = &args.target {
        let text = read_text(target_path)?;
        let entries: Vec<ComplexJson> = serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("{}: {e}", target_path.display())))?;
        let target = DVector::from_vec(
            entries.iter().map(|c| Complex64::new(c.re, c.im)).collect::<Vec<_>>(),
        );
        let f = fidelity_to_target(&est.rho, &target)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        doc.insert("fidelity".into(), json!(f));
        summary_extra = format!(", fidelity {f:.6}");
    }
    let out = write_doc(doc, args.output.as_deref(), "qst.json")?;
    println!(
        "qst: {} iterations, converged {}{summary_extra} -> {}",
        est.report.iterations,
        est.report.converged,
        out.display()
    );
    Ok(())
}

pub fn qpt(args: &QptArgs) -> CliResult<()> {
    let ds = load_dataset(&args.data)?;
    let opts = MleOptions { max_iters: args.max_iters, rel_tol: args.tol };
    let est = qpt_mle(&ds, args.rank, &opts).map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut doc = Map::new();
    doc.insert("choi".into(), json!(matrix_to_json(&est.choi)));
    report_fields(&mut doc, &est.report);
    let mut summary_extra = String::new();
    if let Some(u_path) = &args.target_unitary {
        let u = load_matrix(u_path)?;
        let f = entanglement_fidelity(&est.choi, &u)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        doc.insert("entanglement_fidelity".into(), json!(f));
        summary_extra = format!(", entanglement fidelity {f:.6}");
    }
    let out = write_doc(doc, args.output.as_deref(), "qpt.json")?;
    println!(
        "qpt: {} iterations, converged {}{summary_extra} -> {}",
        est.report.iterations,
        est.report.converged,
        out.display()
    );
    Ok(())
}

pub fn qdt(args: &QdtArgs) -> CliResult<()> {
    let ds = load_dataset(&args.data)?;
    let opts = MleOptions { max_iters: args.max_iters, rel_tol: args.tol };
    let est = qdt_mle(&ds, args.rank, &opts).map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut doc = Map::new();
    let effects: Vec<_> = est.effects.iter().map(matrix_to_json).collect();
    doc.insert("effects".into(), json!(effects));
    report_fields(&mut doc, &est.report);
    let out = write_doc(doc, args.output.as_deref(), "qdt.json")?;
    println!(
        "qdt: {} effects, {} iterations, converged {} -> {}",
        est.effects.len(),
        est.report.iterations,
        est.report.converged,
        out.display()
    );
    Ok(())
}

pub fn qht(args: &QhtArgs) -> CliResult<()> {
    let text = read_text(&args.chi)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.chi.display())))?;
    // Accept both a bare matrix and the object written by `tomo qpt`.
    let matrix_value = match value.get("choi") {
        Some(inner) => inner.clone(),
        None => value,
    };
    let rows: Vec<Vec<ComplexJson>> = serde_json::from_value(matrix_value)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.chi.display())))?;
    let chi = matrix_from_json(&rows)
        .ok_or_else(|| CliError::Parse(format!("{}: matrix is empty or ragged", args.chi.display())))?;

    let res = qht_extract(&chi, args.tau).map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut doc = Map::new();
    doc.insert("hamiltonian".into(), json!(matrix_to_json(&res.hamiltonian)));
    doc.insert("top_eigenvalue".into(), json!(res.top_eigenvalue));
    doc.insert("weak_unitary_warning".into(), json!(res.weak_unitary_warning));
    doc.insert("branch_warning".into(), json!(res.branch_warning));
    let out = write_doc(doc, args.output.as_deref(), "qht.json")?;

    let mut warnings = String::new();
    if res.weak_unitary_warning {
        warnings.push_str(", WARNING: channel far from unitary");
    }
    if res.branch_warning {
        warnings.push_str(", WARNING: eigenphase near the +/-pi branch cut");
    }
    println!(
        "qht: top eigenvalue {:.6} (d = {}){warnings} -> {}",
        res.top_eigenvalue,
        res.hamiltonian.nrows(),
        out.display()
    );
    Ok(())
}
