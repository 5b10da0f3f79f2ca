//! `qproc run` — simulate OpenQASM 2.0 files and write counts histograms.

use crate::args::{OutFormat, RunArgs};
use crate::cmd::load_noise;
use crate::util::{read_text, resolve_output, stem, write_atomic, CliError, CliResult};
use qproc::qasm::Circuit;
use qproc::sim::{self, CountsHistogram};

pub fn run(args: &RunArgs, seed: u64) -> CliResult<()> {
    if args.inputs.len() > 1 && args.output.is_some() {
        return Err(CliError::Usage(
            "-o/--output requires a single input file; with several inputs each \
             circuit gets its own default output name"
                .into(),
        ));
    }
    let noise = load_noise(args.noise.as_deref())?;

    for input in &args.inputs {
        let text = read_text(input)?;
        let circuit = Circuit::from_qasm(&text)
            .map_err(|e| CliError::Parse(format!("{}: {e}", input.display())))?;
        let hist = sim::sample(&circuit, args.shots, seed, noise.as_ref())
            .map_err(|e| CliError::Runtime(format!("{}: {e}", input.display())))?;

        let (name, contents) = match args.format {
            OutFormat::Json => (format!("{}.counts.json", stem(input)), hist.to_json()),
            OutFormat::Csv => (format!("{}.counts.csv", stem(input)), counts_csv(&hist)),
        };
        let out = resolve_output(args.output.as_deref(), &name)?;
        write_atomic(&out, &contents)?;

        let mode = hist
            .counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)));
        match mode {
            Some((key, count)) => println!(
                "{}: {} shots, seed {}, {} distinct outcomes, mode {} x{} -> {}",
                input.display(),
                hist.total(),
                seed,
                hist.counts.len(),
                key,
                count,
                out.display()
            ),
            None => println!(
                "{}: {} shots, seed {}, no classical bits measured -> {}",
                input.display(),
                hist.total(),
                seed,
                out.display()
            ),
        }
    }
    Ok(())
}

fn counts_csv(hist: &CountsHistogram) -> String {
    let mut s = String::from("outcome,count\n");
    for (key, count) in &hist.counts {
        s.push_str(key);
        s.push(',');
        s.push_str(&count.to_string());
        s.push('\n');
    }
    s
}
