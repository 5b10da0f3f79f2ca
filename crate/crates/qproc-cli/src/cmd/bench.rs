//! `qproc bench` — randomized benchmarking and quantum volume.

use crate::args::{OutFormat, QvArgs, RbArgs};
use crate::cmd::load_noise;
use crate::util::{parse_usize_list, resolve_output, write_atomic, CliError, CliResult};
use qproc::bench::{qv_experiment, rb_experiment};

pub fn rb(args: &RbArgs, seed: u64) -> CliResult<()> {
    let lengths = parse_usize_list("lengths", &args.lengths)?;
    let noise = load_noise(args.noise.as_deref())?;
    let res = rb_experiment(&lengths, args.nseq, args.shots, noise.as_ref(), seed)
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let (name, contents) = match args.format {
        OutFormat::Csv => ("rb.csv", res.to_csv()),
        OutFormat::Json => ("rb.json", res.to_json()),
    };
    let out = resolve_output(args.output.as_deref(), name)?;
    write_atomic(&out, &contents)?;

    println!(
        "rb: {} lengths x {} sequences x {} shots, seed {seed}; decay gamma = {:.6}, \
         average gate fidelity = {:.6} -> {}",
        lengths.len(),
        args.nseq,
        args.shots,
        res.fit.gamma,
        res.avg_gate_fidelity,
        out.display()
    );
    Ok(())
}

pub fn qv(args: &QvArgs, seed: u64) -> CliResult<()> {
    let noise = load_noise(args.noise.as_deref())?;
    let res = qv_experiment(args.nmax, args.nc, args.ns, noise.as_ref(), seed)
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let (name, contents) = match args.format {
        OutFormat::Csv => ("qv.csv", res.to_csv()),
        OutFormat::Json => ("qv.json", res.to_json()),
    };
    let out = resolve_output(args.output.as_deref(), name)?;
    write_atomic(&out, &contents)?;

    for rec in &res.records {
        println!(
            "  n={}: heavy-output fraction {:.4} over {} circuits -> {}",
            rec.n,
            rec.h_est,
            rec.n_c,
            if rec.passed { "pass" } else { "fail" }
        );
    }
    println!("quantum volume: {} (seed {seed}) -> {}", res.quantum_volume, out.display());
    Ok(())
}
