use cdo_core::hodge::HodgeMethod;
use cdo_core::mesh::{build_cartesian_hex, Aabb};
use cdo_core::study::{
    exit_code, fit_rate, parse_csv, poincare_constant, run_case, run_convergence,
    sobolev_ratio_diagnostic, table_to_csv, table_to_svg, ConvergenceTable, RunConfig, TableRow,
    CSV_HEADER,
};
use cdo_core::{Error, MeshComplex};

fn config(scheme: &str, family: &str, n: usize, case: &str) -> RunConfig {
    RunConfig::from_json(&format!(
        r#"{{"scheme": "{scheme}", "mesh": {{"family": "{family}", "n": {n}}}, "case": "{case}"}}"#
    ))
    .unwrap()
}

fn row(h: f64, e: f64) -> TableRow {
    TableRow {
        h,
        dofs: 10,
        err_energy: Some(e),
        err_energy_rec: Some(2.0 * e),
        err_l2_pot: Some(e * h),
        err_flux: None,
        iters: 3,
    }
}

#[test]
fn rate_fit_recovers_power_laws() {
    let hs = [0.25, 0.125, 0.0625, 0.03125];
    let first: Vec<f64> = hs.to_vec();
    assert!((fit_rate(&hs, &first).unwrap() - 1.0).abs() < 1e-12);
    let second: Vec<f64> = hs.iter().map(|h| 3.7 * h * h).collect();
    assert!((fit_rate(&hs, &second).unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(fit_rate(&hs[..2], &second[..2]), None);
    assert_eq!(fit_rate(&hs, &[1e-3, 1e-13, 1e-5, 1e-6]), None);
}

#[test]
fn csv_round_trip_and_shape() {
    let table = ConvergenceTable {
        rows: vec![
            row(0.5, 0.1),
            row(0.25, 0.05123456789012345),
            row(0.125, 1.0 / 3.0),
        ],
    };
    let csv = table_to_csv(&table).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
    assert_eq!(parse_csv(&csv).unwrap(), table);
    assert!(matches!(
        table_to_csv(&ConvergenceTable::default()),
        Err(Error::EmptyData)
    ));
    assert!(matches!(parse_csv("h,dofs\n"), Err(Error::Format { .. })));
    let bad = format!("{CSV_HEADER}\n0.5,10,x,,,,3\n");
    assert!(matches!(parse_csv(&bad), Err(Error::Format { .. })));
}

#[test]
fn svg_is_self_contained() {
    let table = ConvergenceTable {
        rows: vec![row(0.5, 0.1), row(0.25, 0.05), row(0.125, 0.025)],
    };
    let svg = table_to_svg(&table).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(!svg.contains("href"));
    assert!(svg.contains("slope 1") && svg.contains("slope 2"));
    assert!(svg.contains("err_energy (rate 1.00)"));
}

#[test]
fn config_errors_are_reported_before_building() {
    let err = config("vertex", "cart", 4, "nope").resolve().unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert_eq!(exit_code(&err), 2);
    assert!(matches!(
        config("edge", "cart", 4, "sin-iso").resolve(),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        config("cell", "prism", 3, "sin-iso").resolve(),
        Err(Error::Config(_))
    ));
    assert!(RunConfig::from_json(r#"{"scheme": "vertex"}"#).is_err());
    assert!(RunConfig::from_json(
        r#"{"scheme": "vertex", "mesh": {"family": "cart", "n": 4}, "case": "zero", "extra": 1}"#
    )
    .is_err());
    let mut cfg = config("vertex", "pert", 4, "sin-iso");
    cfg.solver.tol = 1.5;
    assert!(matches!(cfg.resolve(), Err(Error::Config(_))));
    cfg.solver.tol = 1e-8;
    cfg.mesh.amplitude = 0.5;
    assert!(matches!(cfg.resolve(), Err(Error::Config(_))));
    let round = RunConfig::from_json(&cfg.to_json()).unwrap();
    assert_eq!(round, cfg);
}

#[test]
fn exit_codes_follow_error_class() {
    assert_eq!(
        exit_code(&Error::DegenerateMesh("x".into()).in_stage("mesh")),
        4
    );
    assert_eq!(exit_code(&Error::NumericalFailure("x".into())), 3);
    let solver = Error::SolverFailure {
        iterations: 3,
        residual: 1.0,
        history: vec![],
    };
    assert_eq!(exit_code(&solver.in_stage("solve")), 3);
    assert_eq!(exit_code(&Error::Config("x".into())), 2);
}

#[test]
fn run_case_smoke() {
    let cfg = config("vertex", "cart", 4, "sin-iso").resolve().unwrap();
    let r = run_case(&cfg).unwrap();
    let e = &r.errors;
    assert!(e.energy.unwrap().is_finite() && e.energy_rec.is_finite() && e.l2_potential > 0.0);
    assert_eq!(e.dofs, 27);
    assert!(r.stats.residual <= 1e-10);

    let cfg = config("cell", "cart", 4, "zero").resolve().unwrap();
    let r = run_case(&cfg).unwrap();
    assert_eq!(r.errors.energy_rec, 0.0);
    assert_eq!(r.errors.l2_potential, 0.0);
    assert_eq!(r.errors.flux, Some(0.0));
}

#[test]
fn convergence_writes_deterministic_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut raw = config("vertex", "pert", 2, "sin-iso");
    raw.output = Some(dir.path().join("a"));
    let cfg = raw.resolve().unwrap();
    let table = run_convergence(&cfg, &[2, 4, 6]).unwrap();
    assert_eq!(table.rows.len(), 3);
    assert!(table.rows.windows(2).all(|w| w[1].h < w[0].h));
    let a = std::fs::read(dir.path().join("a/convergence.csv")).unwrap();
    assert!(dir.path().join("a/convergence.svg").exists());

    raw.output = Some(dir.path().join("b"));
    run_convergence(&raw.resolve().unwrap(), &[6, 2, 4]).unwrap();
    let b = std::fs::read(dir.path().join("b/convergence.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(parse_csv(std::str::from_utf8(&a).unwrap()).unwrap(), table);

    let partial = run_convergence(&cfg, &[2, 4]).unwrap_err();
    assert!(matches!(partial.error, Error::Config(_)));
}

#[test]
fn exact_case_rates_are_not_applicable() {
    let cfg = config("cell", "cart", 2, "zero").resolve().unwrap();
    let table = run_convergence(&cfg, &[2, 3, 4]).unwrap();
    assert_eq!(table.rates(), [None; 4]);
}

#[test]
fn poincare_and_sobolev_are_consistent() {
    let cx = MeshComplex::new(build_cartesian_hex([6; 3], Aabb::unit()).unwrap()).unwrap();
    let p = poincare_constant(&cx, HodgeMethod::Reconstruction, 1.0).unwrap();
    assert!(p.constant > 0.0);
    let s = sobolev_ratio_diagnostic(&cx, HodgeMethod::Reconstruction, 1.0, &[2, 4, 6], 3).unwrap();
    assert_eq!(s.len(), 3);
    assert!(s[0].ratio <= p.constant + 1e-8);
    assert!(s.iter().all(|e| e.ratio > 0.0 && e.ratio.is_finite()));
    assert!(sobolev_ratio_diagnostic(&cx, HodgeMethod::Reconstruction, 1.0, &[3], 3).is_err());
}
