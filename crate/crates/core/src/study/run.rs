use rayon::prelude::*;

use crate::complex::MeshComplex;
use crate::error::{Error, Result};
use crate::schemes::{assemble_scheme, evaluate_errors, solve_scheme, ErrorReport, SolveStats};

use super::config::ResolvedConfig;
use super::report::{table_to_csv, table_to_svg};
use super::write_atomic;

/// Error values at or below this are treated as exact and excluded from
/// rate fits.
pub const RATE_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CaseReport {
    pub n: usize,
    pub seed: u64,
    pub n_vertices: usize,
    pub n_faces: usize,
    pub n_cells: usize,
    pub errors: ErrorReport,
    pub stats: SolveStats,
}

/// One row of a convergence table; `None` marks a column that does not
/// apply to the scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub h: f64,
    pub dofs: usize,
    pub err_energy: Option<f64>,
    pub err_energy_rec: Option<f64>,
    pub err_l2_pot: Option<f64>,
    pub err_flux: Option<f64>,
    pub iters: usize,
}

impl From<&ErrorReport> for TableRow {
    fn from(e: &ErrorReport) -> Self {
        TableRow {
            h: e.h,
            dofs: e.dofs,
            err_energy: e.energy,
            err_energy_rec: Some(e.energy_rec),
            err_l2_pot: Some(e.l2_potential),
            err_flux: e.flux,
            iters: e.iterations,
        }
    }
}

impl TableRow {
    pub const ERROR_COLUMNS: [&'static str; 4] =
        ["err_energy", "err_energy_rec", "err_l2_pot", "err_flux"];

    pub fn errors(&self) -> [Option<f64>; 4] {
        [
            self.err_energy,
            self.err_energy_rec,
            self.err_l2_pot,
            self.err_flux,
        ]
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<TableRow>,
}

impl ConvergenceTable {
    /// Fitted rate per error column, in [`TableRow::ERROR_COLUMNS`] order.
    pub fn rates(&self) -> [Option<f64>; 4] {
        let hs: Vec<f64> = self.rows.iter().map(|r| r.h).collect();
        [0, 1, 2, 3].map(|k| {
            let errs: Option<Vec<f64>> = self.rows.iter().map(|r| r.errors()[k]).collect();
            errs.and_then(|e| fit_rate(&hs, &e))
        })
    }

    pub fn rate(&self, column: &str) -> Option<f64> {
        let k = TableRow::ERROR_COLUMNS.iter().position(|c| *c == column)?;
        self.rates()[k]
    }
}

/// Least-squares slope of `log(err)` against `log(h)`. `None` with fewer
/// than three points or when any error is at or below [`RATE_FLOOR`].
pub fn fit_rate(hs: &[f64], errs: &[f64]) -> Option<f64> {
    if hs.len() < 3 || hs.len() != errs.len() || errs.iter().any(|&e| !(e > RATE_FLOOR)) {
        return None;
    }
    let n = hs.len() as f64;
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Builds mesh, dual, Hodge and scheme for resolution `n`, solves and
/// measures errors. Each failure is tagged with the stage it came from.
pub fn run_level(cfg: &ResolvedConfig, n: usize, seed: u64) -> Result<CaseReport> {
    let mesh = cfg.mesh.build(n, seed).map_err(|e| e.in_stage("mesh"))?;
    let cx = MeshComplex::new(mesh).map_err(|e| e.in_stage("dual geometry"))?;
    let system = assemble_scheme(cfg.scheme, &cx, &cfg.case, cfg.method, cfg.beta)
        .map_err(|e| e.in_stage("assembly"))?;
    let solution = solve_scheme(&system, cfg.tol, cfg.max_iter).map_err(|e| e.in_stage("solve"))?;
    let errors =
        evaluate_errors(&cfg.case, &system, &solution, &cx).map_err(|e| e.in_stage("errors"))?;
    Ok(CaseReport {
        n,
        seed,
        n_vertices: cx.mesh.n_vertices(),
        n_faces: cx.mesh.n_faces(),
        n_cells: cx.mesh.n_cells(),
        errors,
        stats: solution.stats,
    })
}

/// Single run at the configured resolution; writes `case.csv` into the
/// output directory when one is configured.
pub fn run_case(cfg: &ResolvedConfig) -> Result<CaseReport> {
    let report = run_level(cfg, cfg.mesh.n, cfg.mesh.seed)?;
    if let Some(dir) = &cfg.output {
        let table = ConvergenceTable {
            rows: vec![TableRow::from(&report.errors)],
        };
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_atomic(&dir.join("case.csv"), table_to_csv(&table)?.as_bytes())?;
    }
    Ok(report)
}

/// Rows completed before a level failed, with that level's error.
#[derive(Debug)]
pub struct PartialConvergence {
    pub table: ConvergenceTable,
    pub error: Error,
}

/// Runs every level (in parallel), level `i` of the sorted list using seed
/// `base + i`, and writes `convergence.csv` and `convergence.svg` when an
/// output directory is configured.
pub fn run_convergence(
    cfg: &ResolvedConfig,
    levels: &[usize],
) -> std::result::Result<ConvergenceTable, PartialConvergence> {
    let fail = |table, error| PartialConvergence { table, error };
    let mut sorted = levels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() < 3 {
        return Err(fail(
            ConvergenceTable::default(),
            Error::Config(format!(
                "a convergence study needs at least 3 levels, got {levels:?}"
            )),
        ));
    }
    if let Err(e) = cfg.check_levels(&sorted) {
        return Err(fail(ConvergenceTable::default(), e));
    }
    let results: Vec<Result<CaseReport>> = sorted
        .par_iter()
        .enumerate()
        .map(|(i, &n)| run_level(cfg, n, cfg.mesh.seed + i as u64))
        .collect();
    let mut table = ConvergenceTable::default();
    for r in results {
        match r {
            Ok(rep) => table.rows.push(TableRow::from(&rep.errors)),
            Err(e) => return Err(fail(table, e)),
        }
    }
    if let Some(dir) = &cfg.output {
        let written = std::fs::create_dir_all(dir)
            .map_err(|e| Error::io(dir, e))
            .and_then(|_| table_to_csv(&table))
            .and_then(|csv| write_atomic(&dir.join("convergence.csv"), csv.as_bytes()))
            .and_then(|_| table_to_svg(&table))
            .and_then(|svg| write_atomic(&dir.join("convergence.svg"), svg.as_bytes()));
        if let Err(e) = written {
            return Err(fail(table, e));
        }
    }
    Ok(table)
}
