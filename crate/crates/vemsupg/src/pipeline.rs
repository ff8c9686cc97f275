//! End-to-end runs: parallel assembly, solve, error evaluation.
//!
//! Local systems are computed on the current rayon pool and scattered in
//! cell order, and the sparse factorization runs sequentially, so every
//! result is bit-identical whatever the number of worker threads.

use rayon::prelude::*;
use thiserror::Error;
use vemsupg_core::analysis::{
    compute_errors, layer_metrics, ConvergenceTable, ErrorReport, LayerMetrics, LayerProblem, Problem,
};
use vemsupg_core::assembly::{self, AssemblyError, CellSystem, FormOptions, GlobalSystem};
use vemsupg_core::mesh::{generate, Mesh, MeshError, MeshFamily};
use vemsupg_core::solver::{SolveError, SolveOptions};
use vemsupg_core::vemspace::DofMap;

use crate::solve::{solve, Solution};

pub const THREADS_VAR: &str = "VEMSUPG_THREADS";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error("assembly: {0}")]
    Assembly(#[from] AssemblyError),
    #[error("solver: {0}")]
    Solve(#[from] SolveError),
    #[error("invalid {var}: {value:?}")]
    Threads { var: &'static str, value: String },
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Worker count from `VEMSUPG_THREADS`, or the available parallelism.
pub fn thread_count() -> Result<usize, PipelineError> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(PipelineError::Threads { var: THREADS_VAR, value: v }),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Runs `f` on a pool sized by [`thread_count`].
pub fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R, PipelineError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(thread_count()?).build()?;
    Ok(pool.install(f))
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub forms: FormOptions,
    pub solver: SolveOptions,
}

#[derive(Clone, Debug)]
pub struct Discretization {
    pub dofmap: DofMap,
    pub cells: Vec<CellSystem>,
    pub system: GlobalSystem,
}

pub fn discretize(mesh: &Mesh, k: usize, problem: &dyn Problem, forms: &FormOptions) -> Result<Discretization, AssemblyError> {
    let dofmap = DofMap::new(mesh, k);
    let cells = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| assembly::cell_system(mesh, c, k, problem, forms))
        .collect::<Result<Vec<_>, _>>()?;
    let dirichlet = assembly::boundary_values(mesh, &dofmap, |p| problem.dirichlet(p));
    let system = assembly::assemble_cells(mesh, &dofmap, &cells, dirichlet);
    Ok(Discretization { dofmap, cells, system })
}

#[derive(Clone, Debug)]
pub struct CaseResult {
    pub discretization: Discretization,
    pub solution: Solution,
    /// Present when the problem has an exact solution.
    pub report: Option<ErrorReport>,
}

pub fn run_case(mesh: &Mesh, k: usize, problem: &dyn Problem, opts: &RunOptions) -> Result<CaseResult, PipelineError> {
    let discretization = discretize(mesh, k, problem, &opts.forms)?;
    let solution = solve(&discretization.system, &opts.solver)?;
    let report = problem.exact().map(|exact| {
        compute_errors(
            mesh,
            &discretization.dofmap,
            &discretization.cells,
            &solution.values,
            exact,
            problem,
            opts.forms.function_projection,
        )
    });
    Ok(CaseResult {
        discretization,
        solution,
        report,
    })
}

/// Resolutions `base, 2 base, 4 base, ...`.
pub fn resolutions(base: usize, refinements: usize) -> Vec<usize> {
    (0..refinements).map(|i| base << i).collect()
}

#[derive(Clone, Debug, Default)]
pub struct ConvergenceRun {
    pub family: Option<MeshFamily>,
    pub k: usize,
    pub table: ConvergenceTable,
    /// Refinement index of every table row.
    pub refinements: Vec<usize>,
    /// Rows that failed, with the error message.
    pub failures: Vec<(usize, String)>,
}

/// One mesh family, one degree, successive refinements. A failing solve
/// drops its row and is recorded in `failures`.
pub fn run_convergence(
    family: MeshFamily,
    k: usize,
    base: usize,
    refinements: usize,
    problem: &dyn Problem,
    opts: &RunOptions,
) -> ConvergenceRun {
    let mut run = ConvergenceRun {
        family: Some(family),
        k,
        ..Default::default()
    };
    for (i, n) in resolutions(base, refinements).into_iter().enumerate() {
        let outcome = generate(family, n)
            .map_err(PipelineError::from)
            .and_then(|mesh| run_case(&mesh, k, problem, opts));
        match outcome {
            Ok(CaseResult { report: Some(r), .. }) => {
                run.table.push(r);
                run.refinements.push(i);
            }
            Ok(_) => run.failures.push((i, String::from("problem has no exact solution"))),
            Err(e) => run.failures.push((i, e.to_string())),
        }
    }
    run
}

#[derive(Clone, Debug)]
pub struct LayerRun {
    pub metrics: LayerMetrics,
    pub h_max: f64,
    pub ndof: usize,
    pub residual: f64,
}

pub fn run_layer(mesh: &Mesh, k: usize, problem: &LayerProblem, grid: usize, opts: &RunOptions) -> Result<LayerRun, PipelineError> {
    let case = run_case(mesh, k, problem, opts)?;
    let d = &case.discretization;
    let metrics = layer_metrics(mesh, &d.dofmap, &d.cells, &case.solution.values, problem, grid);
    Ok(LayerRun {
        metrics,
        h_max: mesh.h_max(),
        ndof: d.dofmap.n_dofs,
        residual: case.solution.residual,
    })
}
