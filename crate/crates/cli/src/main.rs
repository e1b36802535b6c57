use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cdo_core::mesh::{read_mesh, write_mesh, MeshQuality};
use cdo_core::study::{
    exit_code, poincare_constant, run_case, run_convergence, sobolev_ratio_diagnostic,
    table_to_csv, ConvergenceTable, MeshConfig, MeshFamily, ResolvedConfig, RunConfig, TableRow,
};
use cdo_core::{Error, MeshComplex, Result};
use clap::{Args, Parser, Subcommand};

/// Compatible discrete operator schemes for −div(Λ grad p) = s on polyhedral meshes.
#[derive(Parser)]
#[command(name = "cdo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh generation.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
    /// Solve one manufactured case at the configured resolution.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a refinement study and fit convergence rates.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        /// Mesh resolutions, at least three.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        levels: Vec<usize>,
    },
    /// Discrete Poincaré constant or Sobolev ratios across refinement.
    Diagnose(DiagnoseArgs),
    /// Check a mesh file and report its dual-geometry identities.
    Validate {
        #[arg(long)]
        mesh: PathBuf,
    },
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Build a mesh of a built-in family and write it to a file.
    Gen {
        /// cart, pert or prism.
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Perturbation amplitude as a fraction of the local spacing.
        #[arg(long, default_value_t = 0.2)]
        amplitude: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "diagnostic")]
struct DiagnoseFlags {
    #[arg(long)]
    poincare: bool,
    #[arg(long)]
    sobolev: bool,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    which: DiagnoseFlags,
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    levels: Vec<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Mesh {
            command:
                MeshCommand::Gen {
                    family,
                    n,
                    seed,
                    amplitude,
                    out,
                },
        } => mesh_gen(&family, n, seed, amplitude, &out),
        Command::Run { config } => run(&config),
        Command::Convergence { config, levels } => convergence(&config, &levels),
        Command::Diagnose(args) => diagnose(&args),
        Command::Validate { mesh } => validate(&mesh),
    }
}

fn load(path: &Path) -> Result<ResolvedConfig> {
    RunConfig::load(path)?.resolve()
}

fn mesh_gen(family: &str, n: usize, seed: u64, amplitude: f64, out: &Path) -> Result<()> {
    let family: MeshFamily = family.parse()?;
    let cfg = MeshConfig {
        family,
        n,
        amplitude,
        seed,
    };
    let mesh = cfg.build(n, seed)?;
    write_mesh(&mesh, out)?;
    println!(
        "{}: {} vertices, {} edges, {} faces, {} cells",
        out.display(),
        mesh.n_vertices(),
        mesh.n_edges(),
        mesh.n_faces(),
        mesh.n_cells()
    );
    Ok(())
}

fn validate(path: &Path) -> Result<()> {
    let cx = MeshComplex::new(read_mesh(path)?)?;
    let mesh = &cx.mesh;
    println!(
        "{} vertices, {} edges, {} faces, {} cells",
        mesh.n_vertices(),
        mesh.n_edges(),
        mesh.n_faces(),
        mesh.n_cells()
    );
    if !cx.incidence.is_exact() {
        return Err(Error::InvalidMesh(
            "incidence matrices violate CURL·GRAD = 0 or DIV·CURL = 0".into(),
        ));
    }
    let q = MeshQuality::of(mesh, &cx.geometry);
    println!("h                 {:.6e}", q.h);
    println!("min cell volume   {:.6e}", q.min_cell_volume);
    println!("max cell aspect   {:.6e}", q.max_cell_aspect);
    println!("max face warp     {:.6e}", q.max_face_warp);
    let (mut identity, mut partition) = (0.0f64, 0.0f64);
    for cd in cx.dual.cells() {
        let id = cd.local_identities();
        identity = identity.max(id.edge_deviation).max(id.face_deviation);
        partition = cd
            .partition_residuals()
            .iter()
            .fold(partition, |m, r| m.max(*r));
    }
    println!("dual identities   {identity:.3e}");
    println!("volume partitions {partition:.3e}");
    println!("exactness         ok");
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.6e}"))
}

fn run(path: &Path) -> Result<()> {
    let cfg = load(path)?;
    let report = run_case(&cfg)?;
    let e = &report.errors;
    println!(
        "{} scheme, {} n={} seed={}: {} vertices, {} faces, {} cells",
        cfg.scheme,
        cfg.mesh.family.tag(),
        report.n,
        report.seed,
        report.n_vertices,
        report.n_faces,
        report.n_cells
    );
    println!("h                {:.6e}", e.h);
    println!("dofs             {}", e.dofs);
    println!("err_energy       {}", fmt_opt(e.energy));
    println!("err_energy_rec   {:.6e}", e.energy_rec);
    println!("err_l2_pot       {:.6e}", e.l2_potential);
    println!("err_flux         {}", fmt_opt(e.flux));
    println!("iterations       {}", e.iterations);
    println!("residual         {:.3e}", e.residual);
    Ok(())
}

fn print_table(table: &ConvergenceTable) -> Result<()> {
    print!("{}", table_to_csv(table)?);
    Ok(())
}

fn convergence(path: &Path, levels: &[usize]) -> Result<()> {
    let cfg = load(path)?;
    match run_convergence(&cfg, levels) {
        Ok(table) => {
            print_table(&table)?;
            for (name, rate) in TableRow::ERROR_COLUMNS.iter().zip(table.rates()) {
                println!(
                    "rate {name} {}",
                    rate.map_or_else(|| "n/a".into(), |r| format!("{r:.4}"))
                );
            }
            Ok(())
        }
        Err(partial) => {
            if !partial.table.rows.is_empty() {
                eprintln!("completed levels before the failure:");
                print_table(&partial.table)?;
            }
            Err(partial.error)
        }
    }
}

fn diagnose(args: &DiagnoseArgs) -> Result<()> {
    let cfg = load(&args.config)?;
    let mut levels = args.levels.clone();
    levels.sort_unstable();
    levels.dedup();
    cfg.check_levels(&levels)?;
    if args.which.poincare {
        println!("n,h,c_p,lambda_min,iterations");
    } else {
        println!("n,h,q,ratio");
    }
    for (i, &n) in levels.iter().enumerate() {
        let cx = MeshComplex::new(cfg.mesh.build(n, cfg.mesh.seed + i as u64)?)?;
        if args.which.poincare {
            let p = poincare_constant(&cx, cfg.method, cfg.beta)?;
            println!(
                "{n},{:e},{:e},{:e},{}",
                cx.h(),
                p.constant,
                p.lambda_min,
                p.iterations
            );
        } else {
            for entry in
                sobolev_ratio_diagnostic(&cx, cfg.method, cfg.beta, &[2, 4, 6], cfg.mesh.seed)?
            {
                println!("{n},{:e},{},{:e}", cx.h(), entry.q, entry.ratio);
            }
        }
    }
    Ok(())
}
