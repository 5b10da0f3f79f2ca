//! Shared plumbing: error-to-exit-code mapping, safe file I/O and flag
//! parsing helpers.
//!
//! Exit codes are part of the interface and stay stable:
//!
//! | code | meaning                                              |
//! |------|------------------------------------------------------|
//! | 0    | success                                              |
//! | 1    | usage error (bad flags, unknown subcommand)          |
//! | 2    | an input file does not exist                         |
//! | 3    | an input file exists but does not parse              |
//! | 4    | noise-schema error or non-unitary matrix             |
//! | 5    | any other runtime failure (simulation, output I/O)   |
//!
//! Output files are written atomically: contents go to a temporary file in
//! the destination directory which is renamed over the target only after a
//! complete write, so a failing command never leaves a partial file behind.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// A command failure carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag or argument value (exit 1).
    Usage(String),
    /// Missing input file (exit 2).
    NotFound(String),
    /// Unparsable input file (exit 3).
    Parse(String),
    /// Noise-schema violation or non-unitary matrix (exit 4).
    Schema(String),
    /// Everything else (exit 5).
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::NotFound(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Schema(_) => 4,
            CliError::Runtime(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m)
            | CliError::NotFound(m)
            | CliError::Parse(m)
            | CliError::Schema(m)
            | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Read a UTF-8 input file, mapping a missing path to exit code 2.
pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| {
        if e.kind() == io::ErrorKind::NotFound {
            CliError::NotFound(format!("{}: no such file", path.display()))
        } else {
            CliError::Runtime(format!("{}: {e}", path.display()))
        }
    })
}

/// Directory used for default output paths. Explicit `-o` paths are taken
/// verbatim; only defaults honor `QPROC_OUT_DIR`.
pub fn out_dir() -> PathBuf {
    std::env::var_os("QPROC_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Resolve the output path: an explicit `-o` wins, otherwise `name` inside
/// the default output directory (created on demand).
pub fn resolve_output(explicit: Option<&Path>, name: &str) -> CliResult<PathBuf> {
    match explicit {
        Some(p) => Ok(p.to_path_buf()),
        None => {
            let dir = out_dir();
            fs::create_dir_all(&dir).map_err(|e| {
                CliError::Runtime(format!("cannot create output directory {}: {e}", dir.display()))
            })?;
            Ok(dir.join(name))
        }
    }
}

/// Write `contents` to `path` atomically (temporary file + rename).
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?
        .to_string_lossy()
        .into_owned();
    let tmp = dir.join(format!(".{file_name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::Runtime(format!("cannot write {}: {e}", tmp.display()))
    })?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::Runtime(format!("cannot move output into place at {}: {e}", path.display()))
    })?;
    Ok(())
}

/// File stem for deriving default output names.
pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into())
}

/// Parse a comma-separated `f64` list; a single value is replicated to
/// `expect` entries so uniform coefficient profiles stay terse.
pub fn parse_f64_list(flag: &str, text: &str, expect: usize) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let values: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--{flag}: `{p}` is not a number")))
        })
        .collect::<CliResult<_>>()?;
    if values.len() == 1 {
        return Ok(vec![values[0]; expect]);
    }
    if values.len() != expect {
        return Err(CliError::Usage(format!(
            "--{flag}: expected 1 or {expect} comma-separated values, got {}",
            values.len()
        )));
    }
    Ok(values)
}

/// Parse a comma-separated list of positive integers.
pub fn parse_usize_list(flag: &str, text: &str) -> CliResult<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| CliError::Usage(format!("--{flag}: `{p}` is not a non-negative integer")))
        })
        .collect()
}
