//! `qproc qaoa train` — fit one fixed angle schedule across QUBO instances.

use crate::args::QaoaTrainArgs;
use crate::util::{read_text, resolve_output, write_atomic, CliError, CliResult};
use qproc::circuits::{train_fixed_angles, QuboProblem, TrainConfig};

pub fn train(args: &QaoaTrainArgs, seed: u64) -> CliResult<()> {
    if args.layers == 0 {
        return Err(CliError::Usage("--layers must be at least 1".into()));
    }
    let mut instances = Vec::with_capacity(args.qubos.len());
    for path in &args.qubos {
        let text = read_text(path)?;
        let q = QuboProblem::from_json(&text)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        instances.push(q);
    }

    let cfg = TrainConfig {
        n_starts: args.starts,
        max_iters: args.max_iters,
        tol: args.tol,
    };
    let result = train_fixed_angles(&instances, args.layers, &cfg, seed)
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let out = resolve_output(args.output.as_deref(), "angles.json")?;
    write_atomic(&out, &result.angles.to_json())?;

    for (path, success) in args.qubos.iter().zip(&result.per_instance) {
        println!("  {}: success probability {:.4}", path.display(), success);
    }
    println!(
        "trained p={} schedule on {} instance(s), seed {seed}; worst success {:.4} -> {}",
        args.layers,
        instances.len(),
        result.min_success,
        out.display()
    );
    Ok(())
}
