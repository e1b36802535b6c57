use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cdo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn config(dir: &Path, scheme: &str, family: &str, n: usize, case: &str) -> String {
    let out = dir.join("out");
    write_config(
        dir,
        &format!(
            r#"{{"scheme": "{scheme}", "mesh": {{"family": "{family}", "n": {n}}}, "case": "{case}", "output": {:?}}}"#,
            out.to_str().unwrap()
        ),
    )
}

#[test]
fn mesh_gen_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    for (family, n, cells) in [("cart", "3", 27), ("pert", "3", 27), ("prism", "2", 10)] {
        let file = dir.path().join(format!("{family}.json"));
        let file = file.to_str().unwrap();
        let out = cdo(&[
            "mesh", "gen", "--family", family, "--n", n, "--seed", "7", "--out", file,
        ]);
        assert!(out.status.success(), "{out:?}");
        assert!(stdout(&out).contains(&format!("{cells} cells")));

        let out = cdo(&["validate", "--mesh", file]);
        assert!(out.status.success(), "{out:?}");
        let text = stdout(&out);
        assert!(text.contains("exactness         ok"), "{text}");
        let identities: f64 = text
            .lines()
            .find_map(|l| l.strip_prefix("dual identities"))
            .unwrap()
            .trim()
            .parse()
            .unwrap();
        assert!(identities <= 1e-12);
    }
}

#[test]
fn mesh_gen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<String> = (0..2)
        .map(|i| {
            let p = dir.path().join(format!("m{i}.json"));
            let p = p.to_str().unwrap().to_owned();
            let out = cdo(&["mesh", "gen", "--family", "pert", "--n", "3", "--out", &p]);
            assert!(out.status.success());
            p
        })
        .collect();
    assert_eq!(fs::read(&files[0]).unwrap(), fs::read(&files[1]).unwrap());
}

#[test]
fn validate_rejects_inverted_cell() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("cube.json");
    let file = file.to_str().unwrap();
    assert!(
        cdo(&["mesh", "gen", "--family", "cart", "--n", "1", "--out", file])
            .status
            .success()
    );
    // mirror the cube through z = 0: every cell loses its orientation
    let text = fs::read_to_string(file).unwrap();
    let mut doc: serde_like::Value = serde_like::parse(&text);
    doc.flip_z();
    fs::write(file, doc.render()).unwrap();
    let out = cdo(&["validate", "--mesh", file]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");
}

/// Minimal rewrite of the vertex block of a mesh file, enough for the test
/// above without pulling a JSON crate into the CLI's dev-dependencies.
mod serde_like {
    pub struct Value {
        head: String,
        vertices: Vec<[f64; 3]>,
        tail: String,
    }

    pub fn parse(text: &str) -> Value {
        let start = text.find("\"vertices\"").unwrap();
        let open = start + text[start..].find('[').unwrap();
        let mut depth = 0;
        let mut close = open;
        for (i, ch) in text[open..].char_indices() {
            match ch {
                '[' => depth += 1,
                ']' => {
                    depth -= 1;
                    if depth == 0 {
                        close = open + i;
                        break;
                    }
                }
                _ => {}
            }
        }
        let nums: Vec<f64> = text[open..=close]
            .split(|c: char| c == '[' || c == ']' || c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().unwrap())
            .collect();
        Value {
            head: text[..open].to_owned(),
            vertices: nums.chunks(3).map(|c| [c[0], c[1], c[2]]).collect(),
            tail: text[close + 1..].to_owned(),
        }
    }

    impl Value {
        pub fn flip_z(&mut self) {
            for v in &mut self.vertices {
                v[2] = -v[2];
            }
        }

        pub fn render(&self) -> String {
            let body: Vec<String> = self
                .vertices
                .iter()
                .map(|v| format!("[{:?},{:?},{:?}]", v[0], v[1], v[2]))
                .collect();
            format!("{}[{}]{}", self.head, body.join(","), self.tail)
        }
    }
}

#[test]
fn run_writes_case_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "vertex", "cart", 4, "sin-iso");
    let out = cdo(&["run", "--config", &cfg]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("err_l2_pot"), "{text}");
    let csv = fs::read_to_string(dir.path().join("out/case.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("h,dofs,err_energy,err_energy_rec,err_l2_pot,err_flux,iters"));
}

#[test]
fn convergence_reports_rates_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "vertex", "cart", 4, "sin-iso");
    let out = cdo(&["convergence", "--config", &cfg, "--levels", "4,6,8"]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    let l2: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("rate err_l2_pot "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((1.6..=2.4).contains(&l2), "{text}");
    assert!(text.contains("rate err_flux n/a"));
    let csv = fs::read_to_string(dir.path().join("out/convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let svg = fs::read_to_string(dir.path().join("out/convergence.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn convergence_needs_three_levels() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "cell", "cart", 4, "sin-iso");
    let out = cdo(&["convergence", "--config", &cfg, "--levels", "4,8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "vertex", "cart", 2, "no-such-case");
    assert_eq!(cdo(&["run", "--config", &cfg]).status.code(), Some(2));
    let cfg = write_config(dir.path(), r#"{"scheme": "vertex", "bogus": 1}"#);
    assert_eq!(cdo(&["run", "--config", &cfg]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(
        cdo(&["run", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cdo(&["run"]).status.code(), Some(2));
}

#[test]
fn solver_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scheme": "vertex", "mesh": {"family": "pert", "n": 6}, "case": "sin-iso", "solver": {"tol": 1e-12, "max_iter": 2}}"#,
    );
    let out = cdo(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn diagnose_poincare_and_sobolev() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "vertex", "cart", 4, "zero");
    let out = cdo(&[
        "diagnose",
        "--poincare",
        "--config",
        &cfg,
        "--levels",
        "2,4",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let cp: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!(cp > 0.1 && cp < 0.3, "{row}");
    }

    let out = cdo(&["diagnose", "--sobolev", "--config", &cfg, "--levels", "2,4"]);
    assert!(out.status.success(), "{out:?}");
    assert_eq!(stdout(&out).lines().count(), 1 + 2 * 3);

    let both = cdo(&["diagnose", "--poincare", "--sobolev", "--config", &cfg]);
    assert_eq!(both.status.code(), Some(2));
}
