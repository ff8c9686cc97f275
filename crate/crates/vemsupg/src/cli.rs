//! Command-line front end.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use vemsupg_core::analysis::{sample_grid, ConvergenceTable, LayerProblem, Problem, Problem1};
use vemsupg_core::mesh::{generate, Mesh, MeshFamily};

use crate::config::{build_problem, ProblemSpec, RunConfig};
use crate::csvout::{self, LayerRow, SweepRow};
use crate::meshio;
use crate::pipeline::{self, ConvergenceRun, RunOptions};

pub const DEFAULT_ALPHAS: [f64; 8] = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11];

#[derive(Debug, Parser)]
#[command(name = "vemsupg", version, about = "Nonconforming VEM with SUPG for convection-diffusion-reaction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated mesh to a file.
    Mesh {
        #[arg(long, value_parser = parse_family)]
        family: MeshFamily,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// One solve on a generated or file mesh.
    Solve(ConfigArg),
    /// Errors and rates over successive refinements.
    Convergence(ConfigArg),
    /// Errors over a range of diffusion scalings.
    SweepAlpha(ConfigArg),
    /// Internal and boundary layer benchmark.
    Layer(ConfigArg),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
}

fn parse_family(s: &str) -> Result<MeshFamily, String> {
    s.parse().map_err(|_| format!("unknown mesh family {s:?}, expected m1, m2, m3 or m4"))
}

fn load(arg: &ConfigArg) -> Result<RunConfig> {
    RunConfig::load(&arg.config).with_context(|| format!("config {}", arg.config.display()))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Mesh { family, n, out } => cmd_mesh(family, n, &out),
        Command::Solve(a) => cmd_solve(&load(&a)?),
        Command::Convergence(a) => cmd_convergence(&load(&a)?),
        Command::SweepAlpha(a) => cmd_sweep_alpha(&load(&a)?),
        Command::Layer(a) => cmd_layer(&load(&a)?),
    }
}

/// Writes to `path`, or to stdout when there is none.
fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> csv::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            let mut w = BufWriter::new(file);
            f(&mut w).with_context(|| format!("writing {}", p.display()))?;
            w.flush().with_context(|| format!("writing {}", p.display()))?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock).context("writing to stdout")?;
        }
    }
    Ok(())
}

pub fn cmd_mesh(family: MeshFamily, n: usize, out: &Path) -> Result<()> {
    let mesh = generate(family, n).map_err(|e| anyhow!("mesh {family} n={n}: {e}"))?;
    meshio::write(&mesh, out)?;
    eprintln!("{family} n={n}: {} cells, {} vertices -> {}", mesh.n_cells(), mesh.vertices.len(), out.display());
    Ok(())
}

fn problem_or(cfg: &RunConfig, default: impl FnOnce() -> Box<dyn Problem>) -> Result<Box<dyn Problem>> {
    Ok(match &cfg.problem {
        Some(spec) => build_problem(spec)?,
        None => default(),
    })
}

fn single<T: Copy>(values: &[T], field: &str) -> Result<T> {
    match values {
        [v] => Ok(*v),
        _ => bail!("field `{field}`: this command takes a single value, got {}", values.len()),
    }
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<()> {
    let k = single(&cfg.degrees(&[1]), "k")?;
    let problem = problem_or(cfg, || Box::new(Problem1::new(Problem1::DEFAULT_ALPHA)))?;
    let (mesh, family): (Mesh, Option<MeshFamily>) = match &cfg.mesh {
        Some(path) => (meshio::read(path)?, None),
        None => {
            let family = single(&cfg.families(&[MeshFamily::M1]), "family")?;
            let n = cfg.n.unwrap_or(5);
            (generate(family, n).map_err(|e| anyhow!("mesh {family} n={n}: {e}"))?, Some(family))
        }
    };
    let opts = cfg.run_options();
    let case = pipeline::run_case(&mesh, k, problem.as_ref(), &opts)?;
    let d = &case.discretization;
    eprintln!(
        "k={k}: {} dofs, relative residual {:e}",
        d.dofmap.n_dofs, case.solution.residual
    );
    if let Some(report) = case.report {
        let mut table = ConvergenceTable::default();
        table.push(report);
        let run = ConvergenceRun {
            family,
            k,
            table,
            refinements: vec![0],
            failures: Vec::new(),
        };
        emit(cfg.output.csv.as_deref(), |w| csvout::write_convergence(w, &[run]))?;
    }
    if let Some(path) = &cfg.output.samples {
        let samples = sample_grid(&mesh, &d.dofmap, &d.cells, &case.solution.values, cfg.grid.unwrap_or(100));
        emit(Some(path), |w| csvout::write_samples(w, &samples))?;
    }
    Ok(())
}

pub fn cmd_convergence(cfg: &RunConfig) -> Result<()> {
    let problem = problem_or(cfg, || Box::new(Problem1::new(Problem1::DEFAULT_ALPHA)))?;
    if problem.exact().is_none() {
        bail!("field `problem`: a convergence study needs an exact solution");
    }
    if cfg.mesh.is_some() {
        bail!("field `mesh`: a convergence study uses generated families");
    }
    let families = cfg.families(&[MeshFamily::M1, MeshFamily::M2, MeshFamily::M4]);
    let degrees = cfg.degrees(&[1, 2, 3]);
    let base = cfg.n.unwrap_or(5);
    let refinements = cfg.refinements.unwrap_or(4);
    let opts = cfg.run_options();
    let runs = convergence_runs(&families, &degrees, base, refinements, problem.as_ref(), &opts);
    emit(cfg.output.csv.as_deref(), |w| csvout::write_convergence(w, &runs))?;
    let failures: Vec<String> = runs
        .iter()
        .flat_map(|r| {
            r.failures
                .iter()
                .map(move |(i, e)| format!("{} k={} refinement {i}: {e}", csvout::family_label(r.family), r.k))
        })
        .collect();
    if !failures.is_empty() {
        bail!("{} failed runs:\n  {}", failures.len(), failures.join("\n  "));
    }
    Ok(())
}

pub fn convergence_runs(
    families: &[MeshFamily],
    degrees: &[usize],
    base: usize,
    refinements: usize,
    problem: &dyn Problem,
    opts: &RunOptions,
) -> Vec<ConvergenceRun> {
    let mut runs = Vec::new();
    for &family in families {
        for &k in degrees {
            runs.push(pipeline::run_convergence(family, k, base, refinements, problem, opts));
        }
    }
    runs
}

pub fn cmd_sweep_alpha(cfg: &RunConfig) -> Result<()> {
    let no_reaction = match &cfg.problem {
        None => true,
        Some(ProblemSpec::Problem1 { reaction, .. }) => !reaction,
        Some(_) => bail!("field `problem`: sweep-alpha scales the diffusion of `problem1`"),
    };
    if cfg.mesh.is_some() {
        bail!("field `mesh`: sweep-alpha uses generated families");
    }
    let families = cfg.families(&[MeshFamily::M1, MeshFamily::M4]);
    let degrees = cfg.degrees(&[1, 2, 3]);
    let alphas = cfg.alphas.clone().unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
    let n = cfg.n.unwrap_or(10);
    let opts = cfg.run_options();
    let mut rows = Vec::new();
    for &family in &families {
        let mesh = generate(family, n).map_err(|e| anyhow!("mesh {family} n={n}: {e}"))?;
        for &k in &degrees {
            for &alpha in &alphas {
                let problem = Problem1 { alpha, no_reaction };
                let case = pipeline::run_case(&mesh, k, &problem, &opts)
                    .with_context(|| format!("{family} k={k} alpha={alpha}"))?;
                let report = case.report.expect("problem1 has an exact solution");
                rows.push(SweepRow {
                    family,
                    k,
                    n,
                    alpha,
                    report,
                });
            }
        }
    }
    emit(cfg.output.csv.as_deref(), |w| csvout::write_sweep(w, &rows))
}

fn layer_problem(cfg: &RunConfig) -> Result<LayerProblem> {
    match &cfg.problem {
        None => Ok(LayerProblem::default()),
        Some(ProblemSpec::Layer { kappa, angle, split }) => Ok(LayerProblem {
            kappa: *kappa,
            angle: angle.to_radians(),
            split: *split,
        }),
        Some(_) => bail!("field `problem`: the layer command needs `\"kind\": \"layer\"`"),
    }
}

/// `samples.csv` becomes `samples-m1-k3.csv` when a run writes several grids.
fn samples_path(base: &Path, label: &str, k: usize) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}-{label}-k{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{label}-k{k}"),
    };
    base.with_file_name(name)
}

pub fn cmd_layer(cfg: &RunConfig) -> Result<()> {
    let problem = layer_problem(cfg)?;
    let degrees = cfg.degrees(&[1, 3]);
    let grid = cfg.grid.unwrap_or(200);
    let n = cfg.n.unwrap_or(40);
    let opts = cfg.run_options();
    let meshes: Vec<(Option<MeshFamily>, Mesh)> = match &cfg.mesh {
        Some(path) => vec![(None, meshio::read(path)?)],
        None => cfg
            .families(&[MeshFamily::M1, MeshFamily::M2])
            .into_iter()
            .map(|f| generate(f, n).map(|m| (Some(f), m)).map_err(|e| anyhow!("mesh {f} n={n}: {e}")))
            .collect::<Result<_>>()?,
    };
    let several = meshes.len() * degrees.len() > 1;
    let mut rows = Vec::new();
    for (family, mesh) in &meshes {
        let label = csvout::family_label(*family);
        for &k in &degrees {
            let run = pipeline::run_layer(mesh, k, &problem, grid, &opts).with_context(|| format!("{label} k={k}"))?;
            if let Some(path) = &cfg.output.samples {
                let path = if several { samples_path(path, label, k) } else { path.clone() };
                emit(Some(&path), |w| csvout::write_samples(w, &run.metrics.samples))?;
            }
            rows.push(LayerRow {
                family: *family,
                k,
                n,
                run,
            });
        }
    }
    emit(cfg.output.csv.as_deref(), |w| csvout::write_layer(w, &rows))
}
