use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use fracleg::harness::{
    CLUSTER_POINTS, DOMINANCE_ROUNDING, GRID_POINTS, MAX_REFERENCE_DEGREE, PROFILE_POINTS, TAIL_FRACTION,
};
use fracleg::legexp::EXPAND_TOL;

use crate::args::Format;
use crate::error::{CliError, CliResult};

/// Where the results of one invocation go.
pub struct Output {
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// True for an existing directory or a path written with a trailing slash.
pub fn is_dir_like(p: &Path) -> bool {
    p.is_dir() || p.as_os_str().to_string_lossy().ends_with(std::path::MAIN_SEPARATOR)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| CliError::Write { path: parent.to_path_buf(), source })?;
    }
    fs::write(path, bytes).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

pub fn csv_bytes<F>(f: F) -> CliResult<Vec<u8>>
where
    F: FnOnce(&mut Vec<u8>) -> fracleg::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// Wraps `data` with the `meta` block every JSON output carries.
pub fn with_meta(command: &str, data: Value) -> Value {
    json!({
        "meta": {
            "command": command,
            "cli_version": env!("CARGO_PKG_VERSION"),
            "library_version": fracleg::VERSION,
            "tolerances": {
                "quadrature_rel_tol": EXPAND_TOL,
                "parseval_tail_fraction": TAIL_FRACTION,
                "max_reference_degree": MAX_REFERENCE_DEGREE,
                "grid_points": GRID_POINTS,
                "cluster_points": CLUSTER_POINTS,
                "profile_points": PROFILE_POINTS,
                "dominance_rounding": DOMINANCE_ROUNDING,
            },
        },
        "data": data,
    })
}

impl Output {
    /// Destination for a single result; `None` means standard output.
    pub fn target(&self, default_stem: &str) -> Option<PathBuf> {
        let p = self.out.as_ref()?;
        if is_dir_like(p) {
            Some(p.join(format!("{default_stem}.{}", self.format.extension())))
        } else {
            Some(p.clone())
        }
    }

    pub fn emit_bytes(&self, default_stem: &str, bytes: &[u8]) -> CliResult<()> {
        match self.target(default_stem) {
            Some(path) => write_bytes(&path, bytes),
            None => {
                let mut stdout = io::stdout().lock();
                stdout
                    .write_all(bytes)
                    .and_then(|_| stdout.flush())
                    .map_err(|source| CliError::Write { path: PathBuf::from("<stdout>"), source })
            }
        }
    }

    /// Emits CSV or the JSON document, whichever the format asks for.
    pub fn emit<C, J>(&self, command: &str, default_stem: &str, csv: C, json: J) -> CliResult<()>
    where
        C: FnOnce(&mut Vec<u8>) -> fracleg::Result<()>,
        J: FnOnce() -> CliResult<Value>,
    {
        let bytes = match self.format {
            Format::Csv => csv_bytes(csv)?,
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&with_meta(command, json()?))?;
                s.push('\n');
                s.into_bytes()
            }
        };
        self.emit_bytes(default_stem, &bytes)
    }
}
