//! `qproc gen` — reference circuit generators, emitted as OpenQASM 2.0.

use crate::args::{
    GenBvArgs, GenGhzArgs, GenGroverArgs, GenQaoaArgs, GenSwaptestArgs, GenTrotterArgs,
};
use crate::util::{read_text, resolve_output, write_atomic, CliError, CliResult};
use qproc::circuits::{
    bernstein_vazirani, ghz, grover, qaoa_circuit, swap_test, trotter_circuit, FixedAngles,
    PauliHamiltonian, QuboProblem,
};
use qproc::qasm::Circuit;
use std::path::Path;

fn emit(circuit: &Circuit, explicit: Option<&Path>, name: &str) -> CliResult<()> {
    let out = resolve_output(explicit, name)?;
    write_atomic(&out, &circuit.to_qasm())?;
    println!(
        "{} qubits, {} clbits, {} instructions -> {}",
        circuit.n_qubits,
        circuit.n_clbits,
        circuit.instructions.len(),
        out.display()
    );
    Ok(())
}

pub fn grover_cmd(args: &GenGroverArgs) -> CliResult<()> {
    let iterations = args.iterations.unwrap_or_else(|| {
        // Optimal round count for a single marked state out of 2^n.
        let theta = (1.0 / (1u64 << args.n.min(62)) as f64).sqrt().asin();
        ((std::f64::consts::PI / (4.0 * theta)).floor() as usize).max(1)
    });
    let c = grover(args.n, args.marked, iterations).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(&c, args.output.as_deref(), &format!("grover_{}.qasm", args.n))
}

pub fn bv_cmd(args: &GenBvArgs) -> CliResult<()> {
    let c = bernstein_vazirani(&args.secret).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(&c, args.output.as_deref(), &format!("bv_{}.qasm", args.secret))
}

pub fn ghz_cmd(args: &GenGhzArgs) -> CliResult<()> {
    let c = ghz(args.n).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(&c, args.output.as_deref(), &format!("ghz_{}.qasm", args.n))
}

pub fn swaptest_cmd(args: &GenSwaptestArgs) -> CliResult<()> {
    let c = swap_test(args.m).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(&c, args.output.as_deref(), &format!("swaptest_{}.qasm", args.m))
}

pub fn qaoa_cmd(args: &GenQaoaArgs) -> CliResult<()> {
    let qubo_text = read_text(&args.qubo)?;
    let q = QuboProblem::from_json(&qubo_text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.qubo.display())))?;
    let angles_text = read_text(&args.angles)?;
    let angles = FixedAngles::from_json(&angles_text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.angles.display())))?;
    let mut c = qaoa_circuit(&q, &angles);
    if args.measure {
        c.n_clbits = c.n_clbits.max(c.n_qubits);
        c.measure_all();
    }
    emit(&c, args.output.as_deref(), "qaoa.qasm")
}

pub fn trotter_cmd(args: &GenTrotterArgs) -> CliResult<()> {
    let text = read_text(&args.hamiltonian)?;
    let terms: Vec<(f64, String)> = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.hamiltonian.display())))?;
    let h = PauliHamiltonian::new(terms)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.hamiltonian.display())))?;
    let mut c = trotter_circuit(&h, args.time, args.steps, args.order)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if args.measure {
        c.n_clbits = c.n_clbits.max(c.n_qubits);
        c.measure_all();
    }
    emit(&c, args.output.as_deref(), "trotter.qasm")
}
