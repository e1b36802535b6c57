//! Run configurations, convergence studies, functional-analysis
//! diagnostics and report files.

mod config;
mod diagnostics;
mod report;
mod run;

pub use config::{HodgeConfig, MeshConfig, MeshFamily, ResolvedConfig, RunConfig, SolverConfig};
pub use diagnostics::{
    poincare_constant, sobolev_ratio_diagnostic, PoincareEstimate, SobolevEntry, SOBOLEV_DRAWS,
};
pub use report::{parse_csv, table_to_csv, table_to_svg, CSV_HEADER};
pub use run::{
    fit_rate, run_case, run_convergence, run_level, CaseReport, ConvergenceTable,
    PartialConvergence, TableRow, RATE_FLOOR,
};

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Process exit code for an error: 2 for configuration and input problems,
/// 3 for numerical failures, 4 for degenerate or invalid meshes.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::DegenerateMesh(_) | Error::InvalidMesh(_) => 4,
        Error::NotSpd(_) | Error::SolverFailure { .. } | Error::NumericalFailure(_) => 3,
        _ => 2,
    }
}

/// Writes `bytes` to a temporary sibling of `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}
