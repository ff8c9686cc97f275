use vemsupg::pipeline::{discretize, run_case, run_convergence, RunOptions};
use vemsupg::solve::solve;
use vemsupg_core::analysis::{MonomialProblem, Problem1};
use vemsupg_core::assembly::{assemble, interpolate, FormOptions};
use vemsupg_core::mesh::{generate, MeshFamily};
use vemsupg_core::vemspace::DofMap;

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn parallel_assembly_matches_sequential_bitwise() {
    let p = Problem1::new(1e-7);
    let forms = FormOptions::default();
    for f in MeshFamily::ALL {
        let mesh = generate(f, 6).unwrap();
        for k in 1..=3 {
            let (seq, _) = assemble(&mesh, k, &p, &forms, |x| vemsupg_core::analysis::Problem::dirichlet(&p, x)).unwrap();
            for threads in [1, 3, 8] {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
                let par = pool.install(|| discretize(&mesh, k, &p, &forms)).unwrap();
                assert_eq!(par.system.matrix, seq.matrix);
                assert_eq!(bits(&par.system.rhs), bits(&seq.rhs));
            }
        }
    }
}

#[test]
fn direct_solves_have_small_residuals() {
    let opts = RunOptions::default();
    for f in [MeshFamily::M1, MeshFamily::M2, MeshFamily::M4] {
        let mesh = generate(f, 20).unwrap();
        for k in 1..=3 {
            let case = run_case(&mesh, k, &Problem1::new(1e-7), &opts).unwrap();
            assert!(case.solution.residual <= 1e-10, "{f} k={k}: {}", case.solution.residual);
        }
    }
}

/// Lower-degree monomials are reproduced to rounding on every family.
#[test]
fn solution_dofs_match_lower_degree_polynomials() {
    let opts = RunOptions::default();
    for f in MeshFamily::ALL {
        let mesh = generate(f, 4).unwrap();
        for k in 2..=3u32 {
            let problem = MonomialProblem::new(1, k - 2);
            let case = run_case(&mesh, k as usize, &problem, &opts).unwrap();
            let exact = interpolate(&mesh, &DofMap::new(&mesh, k as usize), |p| {
                p.x.powi(problem.mu as i32) * p.y.powi(problem.nu as i32)
            })
            .unwrap();
            let num: f64 = case.solution.values.iter().zip(&exact).map(|(a, b)| (a - b) * (a - b)).sum();
            let den: f64 = exact.iter().map(|b| b * b).sum();
            assert!((num / den).sqrt() <= 1e-9, "{f} k={k}");
        }
    }
}

#[test]
fn convergence_records_rows_per_refinement() {
    let run = run_convergence(MeshFamily::M4, 1, 3, 3, &Problem1::new(1e-3), &RunOptions::default());
    assert!(run.failures.is_empty());
    assert_eq!(run.refinements, vec![0, 1, 2]);
    assert_eq!(run.table.rows.len(), 3);
    let rates = run.table.rates();
    assert!(rates[0].iter().all(Option::is_none));
    assert!(rates[2].iter().all(Option::is_some));
}

#[test]
fn solve_returns_boundary_values() {
    let mesh = generate(MeshFamily::M1, 3).unwrap();
    let p = Problem1::new(1e-2);
    let d = discretize(&mesh, 2, &p, &FormOptions::default()).unwrap();
    let s = solve(&d.system, &Default::default()).unwrap();
    for (i, &b) in d.dofmap.boundary.iter().enumerate() {
        if b {
            assert_eq!(s.values[i], d.system.dirichlet[i]);
        }
    }
}
