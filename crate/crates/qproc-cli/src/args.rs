//! Command-line grammar.
//!
//! One binary, one `--seed`: every stochastic subcommand derives all of its
//! randomness from the single global seed, so identical invocations produce
//! byte-identical outputs regardless of `--threads`.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "qproc",
    version,
    about = "Quantum-processor emulation and benchmarking toolkit",
    propagate_version = true
)]
pub struct Cli {
    /// Master seed; all randomness in the invocation flows from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Cap on worker threads (default: all cores). Results never depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Simulate OpenQASM 2.0 circuits and write measurement statistics.
    Run(RunArgs),
    /// Sample a single-photon boson sampler defined by a unitary.
    Bs(BsArgs),
    /// Device benchmarks.
    #[command(subcommand)]
    Bench(BenchCmd),
    /// Maximum-likelihood tomography.
    #[command(subcommand)]
    Tomo(TomoCmd),
    /// Reference circuit generators (emit OpenQASM 2.0).
    #[command(subcommand)]
    Gen(GenCmd),
    /// QUBO encoders and brute-force solver.
    #[command(subcommand)]
    Qubo(QuboCmd),
    /// Fixed-angle QAOA training.
    #[command(subcommand)]
    Qaoa(QaoaCmd),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Args)]
pub struct RunArgs {
    /// OpenQASM 2.0 circuit file(s); each gets its own counts file.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    /// Number of measurement shots per circuit.
    #[arg(long, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,

    /// Noise-model JSON file (omit for a noiseless run).
    #[arg(long)]
    pub noise: Option<PathBuf>,

    /// Output path (single input only); default `<stem>.counts.<ext>`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Output format for the counts histogram.
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    pub format: OutFormat,
}

#[derive(Args)]
pub struct BsArgs {
    /// Interferometer JSON file (`{"unitary": [[{"re","im"},..],..]}`).
    #[arg(long)]
    pub unitary: PathBuf,

    /// Input occupations: one digit per mode (`101`) or comma-separated
    /// numbers (`1,0,1`) when a mode holds 10+ photons.
    #[arg(long)]
    pub input: String,

    /// Number of samples to draw.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,

    /// Per-mode photon-loss probability: one value for all modes or a
    /// comma-separated per-mode list.
    #[arg(long)]
    pub loss: Option<String>,

    /// Photon indistinguishability (1.0 = perfect).
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,

    /// Per-detector dark-count probability.
    #[arg(long, default_value_t = 0.0)]
    pub dark: f64,

    /// Output path; default `<stem>.samples.txt`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum BenchCmd {
    /// Single-qubit randomized benchmarking with an exponential-decay fit.
    Rb(RbArgs),
    /// Quantum-volume experiment over widths 2..=nmax.
    Qv(QvArgs),
}

#[derive(Args)]
pub struct RbArgs {
    /// Comma-separated Clifford sequence lengths.
    #[arg(long, default_value = "1,2,4,8,16,32,64,128")]
    pub lengths: String,

    /// Random sequences per length.
    #[arg(long, default_value_t = 30)]
    pub nseq: usize,

    /// Shots per sequence.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,

    /// Noise-model JSON file.
    #[arg(long)]
    pub noise: Option<PathBuf>,

    /// Output path; default `rb.<ext>`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Output format for the survival table.
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub format: OutFormat,
}

#[derive(Args)]
pub struct QvArgs {
    /// Largest circuit width to test.
    #[arg(long, value_parser = clap::value_parser!(usize))]
    pub nmax: usize,

    /// Random model circuits per width.
    #[arg(long, default_value_t = 100)]
    pub nc: usize,

    /// Shots per model circuit.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub ns: u64,

    /// Noise-model JSON file.
    #[arg(long)]
    pub noise: Option<PathBuf>,

    /// Output path; default `qv.<ext>`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Output format for the per-width records.
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub format: OutFormat,
}

#[derive(Subcommand)]
pub enum TomoCmd {
    /// Quantum state tomography.
    Qst(QstArgs),
    /// Quantum process tomography.
    Qpt(QptArgs),
    /// Quantum detector tomography.
    Qdt(QdtArgs),
    /// Hamiltonian extraction from a process matrix.
    Qht(QhtArgs),
}

#[derive(Args)]
pub struct QstArgs {
    /// Tomography dataset JSON file.
    #[arg(long)]
    pub data: PathBuf,

    /// Rank cap for the estimate (default: full rank).
    #[arg(long)]
    pub rank: Option<usize>,

    /// Target state vector JSON (`[{"re","im"},..]`); adds a fidelity field.
    #[arg(long)]
    pub target: Option<PathBuf>,

    /// Maximum accepted gradient steps.
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,

    /// Relative log-likelihood convergence tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    /// Output path; default `qst.json`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct QptArgs {
    /// Tomography dataset JSON file (records carry `prep` and `setting`).
    #[arg(long)]
    pub data: PathBuf,

    /// Rank cap for the process matrix (default: full rank).
    #[arg(long)]
    pub rank: Option<usize>,

    /// Target unitary JSON (`[[{"re","im"},..],..]`); adds an
    /// entanglement-fidelity field.
    #[arg(long)]
    pub target_unitary: Option<PathBuf>,

    /// Maximum accepted gradient steps.
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,

    /// Relative log-likelihood convergence tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    /// Output path; default `qpt.json`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct QdtArgs {
    /// Tomography dataset JSON file (records carry `prep` only).
    #[arg(long)]
    pub data: PathBuf,

    /// Rank cap for each effect (default: full rank).
    #[arg(long)]
    pub rank: Option<usize>,

    /// Maximum accepted gradient steps.
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,

    /// Relative log-likelihood convergence tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    /// Output path; default `qdt.json`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct QhtArgs {
    /// Process-matrix JSON: either a bare matrix or an object with a
    /// `choi` field (as written by `tomo qpt`).
    #[arg(long)]
    pub chi: PathBuf,

    /// Evolution time the channel represents.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,

    /// Output path; default `qht.json`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum GenCmd {
    /// Grover search over n qubits with a marked basis state.
    Grover(GenGroverArgs),
    /// Bernstein-Vazirani circuit for a binary secret.
    Bv(GenBvArgs),
    /// n-qubit GHZ preparation with terminal measurements.
    Ghz(GenGhzArgs),
    /// Swap test between two m-qubit registers.
    Swaptest(GenSwaptestArgs),
    /// QAOA ansatz for a QUBO problem at fixed angles.
    Qaoa(GenQaoaArgs),
    /// Suzuki-Trotter circuit for a Pauli Hamiltonian.
    Trotter(GenTrotterArgs),
}

#[derive(Args)]
pub struct GenGroverArgs {
    /// Number of search qubits.
    pub n: usize,

    /// Index of the marked basis state (1 ..= 2^n - 1).
    #[arg(long)]
    pub marked: u64,

    /// Grover iterations; default: the optimal round count for one marked
    /// state, floor(pi / (4 asin(2^{-n/2}))).
    #[arg(long)]
    pub iterations: Option<usize>,

    /// Output path; default `grover_<n>.qasm`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenBvArgs {
    /// Binary secret string, e.g. `1011`.
    pub secret: String,

    /// Output path; default `bv_<secret>.qasm`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenGhzArgs {
    /// Number of qubits.
    pub n: usize,

    /// Output path; default `ghz_<n>.qasm`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenSwaptestArgs {
    /// Register width; the circuit uses 2m+1 qubits.
    pub m: usize,

    /// Output path; default `swaptest_<m>.qasm`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenQaoaArgs {
    /// QUBO problem JSON file.
    #[arg(long)]
    pub qubo: PathBuf,

    /// Fixed-angles JSON file (as written by `qaoa train`).
    #[arg(long)]
    pub angles: PathBuf,

    /// Append terminal measurements on all qubits.
    #[arg(long)]
    pub measure: bool,

    /// Output path; default `qaoa.qasm`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenTrotterArgs {
    /// Pauli Hamiltonian JSON file: `[[coeff, "XZ"], ...]`.
    #[arg(long)]
    pub hamiltonian: PathBuf,

    /// Evolution time.
    #[arg(long)]
    pub time: f64,

    /// Trotter steps.
    #[arg(long, default_value_t = 1)]
    pub steps: usize,

    /// Product-formula order (1 or an even number).
    #[arg(long, default_value_t = 1)]
    pub order: usize,

    /// Append terminal measurements on all qubits.
    #[arg(long)]
    pub measure: bool,

    /// Output path; default `trotter.qasm`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum QuboCmd {
    /// Encode least-squares solving of A x = b over a fixed-point lattice.
    FromLinsys(QuboLinsysArgs),
    /// Encode a second-order ODE boundary-value problem (central differences).
    FromOde(QuboOdeArgs),
    /// Brute-force the minimum of an encoded QUBO and decode the optima.
    Solve(QuboSolveArgs),
}

#[derive(Args)]
pub struct QuboLinsysArgs {
    /// Matrix JSON file: `[[a11, a12, ...], ...]` (row-major reals).
    #[arg(long)]
    pub matrix: PathBuf,

    /// Right-hand side JSON file: `[b1, b2, ...]`.
    #[arg(long)]
    pub rhs: PathBuf,

    /// Bits per unknown (two's-complement window [-1, 1)).
    #[arg(long, default_value_t = 4)]
    pub bits: u32,

    /// Output path; default `qubo.json`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct QuboOdeArgs {
    /// Coefficient of y'': one value or n_t comma-separated values.
    #[arg(long, default_value = "1")]
    pub f2: String,

    /// Coefficient of y': one value or n_t comma-separated values.
    #[arg(long, default_value = "0")]
    pub f1: String,

    /// Coefficient of y: one value or n_t comma-separated values.
    #[arg(long, default_value = "0")]
    pub f0: String,

    /// Inhomogeneity g(t): one value or n_t comma-separated values.
    #[arg(long)]
    pub g: String,

    /// Number of grid points on [0, 1].
    #[arg(long)]
    pub nt: usize,

    /// Left boundary value y(0).
    #[arg(long, default_value_t = 0.0)]
    pub y0: f64,

    /// Right boundary value y(1).
    #[arg(long, default_value_t = 0.0)]
    pub y1: f64,

    /// Bits per unknown.
    #[arg(long, default_value_t = 4)]
    pub bits: u32,

    /// Output path; default `qubo.json`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct QuboSolveArgs {
    /// QUBO problem JSON file.
    #[arg(long)]
    pub qubo: PathBuf,

    /// Optional JSON output with the minimum and decoded optima.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum QaoaCmd {
    /// Train one fixed angle schedule across a set of QUBO instances.
    Train(QaoaTrainArgs),
}

#[derive(Args)]
pub struct QaoaTrainArgs {
    /// QUBO problem JSON files (training set).
    #[arg(long, required = true, num_args = 1..)]
    pub qubos: Vec<PathBuf>,

    /// QAOA depth p.
    #[arg(long, default_value_t = 1)]
    pub layers: usize,

    /// Random restarts.
    #[arg(long, default_value_t = 8)]
    pub starts: usize,

    /// Coordinate-descent sweeps per restart.
    #[arg(long, default_value_t = 80)]
    pub max_iters: usize,

    /// Objective improvement tolerance.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,

    /// Output path for the trained angles; default `angles.json`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}
