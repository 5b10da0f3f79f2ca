//! `qproc bs` — draw samples from a single-photon boson sampler.

use crate::args::BsArgs;
use crate::util::{parse_f64_list, read_text, resolve_output, stem, write_atomic, CliError, CliResult};
use qproc::photonic::{bs_sample, BsNoise, Interferometer, PhotonicError};
use std::collections::BTreeMap;

pub fn bs(args: &BsArgs, seed: u64) -> CliResult<()> {
    let text = read_text(&args.unitary)?;
    let inter = Interferometer::from_json(&text).map_err(|e| match e {
        PhotonicError::NotUnitary => CliError::Schema(format!("{}: {e}", args.unitary.display())),
        other => CliError::Parse(format!("{}: {other}", args.unitary.display())),
    })?;
    let m = inter.n_modes();

    let input = parse_occupation(&args.input)?;
    if input.len() != m {
        return Err(CliError::Usage(format!(
            "--input lists {} modes but the interferometer has {m}",
            input.len()
        )));
    }

    let noise = if args.loss.is_some() || args.eta != 1.0 || args.dark != 0.0 {
        let loss = match &args.loss {
            Some(spec) => parse_f64_list("loss", spec, m)?,
            None => vec![0.0; m],
        };
        Some(BsNoise::new(loss, args.eta, args.dark).map_err(|e| CliError::Usage(e.to_string()))?)
    } else {
        None
    };

    let samples = bs_sample(&inter, &input, args.samples, seed, noise.as_ref())
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut contents = samples.join("\n");
    contents.push('\n');
    let out = resolve_output(args.output.as_deref(), &format!("{}.samples.txt", stem(&args.unitary)))?;
    write_atomic(&out, &contents)?;

    let mut tally: BTreeMap<&str, u64> = BTreeMap::new();
    for s in &samples {
        *tally.entry(s.as_str()).or_insert(0) += 1;
    }
    let (mode_key, mode_n) = tally
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        .map(|(k, v)| (*k, *v))
        .unwrap_or(("", 0));
    println!(
        "{} modes, {} samples, seed {seed}, {} distinct patterns, mode {mode_key} x{mode_n} -> {}",
        m,
        samples.len(),
        tally.len(),
        out.display()
    );
    Ok(())
}

/// `101` means one photon in modes 0 and 2; `1,0,1` is the same pattern and
/// also covers occupations of ten or more photons.
fn parse_occupation(text: &str) -> CliResult<Vec<u32>> {
    let occ: CliResult<Vec<u32>> = if text.contains(',') {
        text.split(',')
            .map(str::trim)
            .map(|p| {
                p.parse::<u32>()
                    .map_err(|_| CliError::Usage(format!("--input: `{p}` is not an occupation")))
            })
            .collect()
    } else {
        text.chars()
            .map(|c| {
                c.to_digit(10)
                    .ok_or_else(|| CliError::Usage(format!("--input: `{c}` is not a digit")))
            })
            .collect()
    };
    let occ = occ?;
    if occ.is_empty() {
        return Err(CliError::Usage("--input is empty".into()));
    }
    Ok(occ)
}
