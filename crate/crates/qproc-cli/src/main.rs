//! `qproc` — batch front door for the emulation toolkit.
//!
//! The binary wires every library module to the shell: circuit simulation
//! (`run`), boson sampling (`bs`), benchmarking (`bench rb`/`bench qv`),
//! tomography (`tomo qst`/`qpt`/`qdt`/`qht`), circuit generation (`gen ...`),
//! QUBO encoding (`qubo ...`) and QAOA angle training (`qaoa train`).
//!
//! Contract highlights:
//!
//! * one global `--seed`; identical invocations are byte-identical,
//! * `--threads` caps parallelism without affecting any result,
//! * `QPROC_OUT_DIR` redirects *default* output paths (explicit `-o` wins),
//! * data files are written atomically; failures leave nothing behind,
//! * exit codes: 0 ok, 1 usage, 2 missing file, 3 unparsable input,
//!   4 noise-schema/non-unitary, 5 other runtime errors.

mod args;
mod cmd;
mod util;

use args::{BenchCmd, Cli, Command, GenCmd, QaoaCmd, QuboCmd, TomoCmd};
use clap::error::ErrorKind;
use clap::Parser;
use util::CliResult;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    if let Some(n) = cli.threads {
        // The pool only bounds parallelism; every result is schedule-free.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    if let Err(err) = dispatch(&cli) {
        eprintln!("qproc: {err}");
        std::process::exit(err.exit_code());
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let seed = cli.seed;
    match &cli.command {
        Command::Run(a) => cmd::run::run(a, seed),
        Command::Bs(a) => cmd::bs::bs(a, seed),
        Command::Bench(BenchCmd::Rb(a)) => cmd::bench::rb(a, seed),
        Command::Bench(BenchCmd::Qv(a)) => cmd::bench::qv(a, seed),
        Command::Tomo(TomoCmd::Qst(a)) => cmd::tomo::qst(a),
        Command::Tomo(TomoCmd::Qpt(a)) => cmd::tomo::qpt(a),
        Command::Tomo(TomoCmd::Qdt(a)) => cmd::tomo::qdt(a),
        Command::Tomo(TomoCmd::Qht(a)) => cmd::tomo::qht(a),
        Command::Gen(GenCmd::Grover(a)) => cmd::gen::grover_cmd(a),
        Command::Gen(GenCmd::Bv(a)) => cmd::gen::bv_cmd(a),
        Command::Gen(GenCmd::Ghz(a)) => cmd::gen::ghz_cmd(a),
        Command::Gen(GenCmd::Swaptest(a)) => cmd::gen::swaptest_cmd(a),
        Command::Gen(GenCmd::Qaoa(a)) => cmd::gen::qaoa_cmd(a),
        Command::Gen(GenCmd::Trotter(a)) => cmd::gen::trotter_cmd(a),
        Command::Qubo(QuboCmd::FromLinsys(a)) => cmd::qubo::from_linsys(a),
        Command::Qubo(QuboCmd::FromOde(a)) => cmd::qubo::from_ode(a),
        Command::Qubo(QuboCmd::Solve(a)) => cmd::qubo::solve(a),
        Command::Qaoa(QaoaCmd::Train(a)) => cmd::qaoa::train(a, seed),
    }
}
