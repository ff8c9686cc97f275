use proptest::prelude::*;
use vemsupg_core::geometry::signed_area;
use vemsupg_core::mesh::{generate, validate, Mesh, MeshFamily};

fn family() -> impl Strategy<Value = MeshFamily> {
    prop::sample::select(MeshFamily::ALL.to_vec())
}

fn on_boundary(p: vemsupg_core::Point2) -> bool {
    let tol = 1e-12;
    p.x.abs() < tol || p.y.abs() < tol || (p.x - 1.0).abs() < tol || (p.y - 1.0).abs() < tol
}

fn check_mesh(m: &Mesh) -> Result<(), TestCaseError> {
    // shoelace area from raw coordinates, independent of the stored areas
    let total: f64 = (0..m.n_cells()).map(|c| signed_area(&m.cell_coords(c))).sum();
    prop_assert!((total - 1.0).abs() < 1e-10, "total area {total}");
    let mut uses = vec![0usize; m.edges.len()];
    for (c, cell) in m.cells.iter().enumerate() {
        prop_assert!(signed_area(&m.cell_coords(c)) > 0.0, "cell {c} is not counterclockwise");
        for &e in &cell.edges {
            uses[e] += 1;
        }
    }
    for (e, edge) in m.edges.iter().enumerate() {
        prop_assert!((edge.normal.norm() - 1.0).abs() < 1e-14, "edge {e} normal");
        if edge.is_boundary() {
            prop_assert_eq!(uses[e], 1);
            prop_assert!(on_boundary(edge.midpoint), "boundary edge {} inside the square", e);
        } else {
            prop_assert_eq!(uses[e], 2);
            prop_assert!(edge.cell_minus != Some(edge.cell_plus));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn generated_meshes_are_consistent(f in family(), n in 2usize..14) {
        check_mesh(&generate(f, n).unwrap())?;
    }
}

#[test]
fn halving_halves_the_mesh_size() {
    for f in MeshFamily::ALL {
        // the remap of M2 is pre-asymptotic at n = 5 (ratio 1.61)
        let coarsest = if f == MeshFamily::M2 { 10 } else { 5 };
        for n in [5, 10, 20].into_iter().filter(|&n| n >= coarsest) {
            let ratio = generate(f, n).unwrap().h_max() / generate(f, 2 * n).unwrap().h_max();
            assert!((1.8..=2.2).contains(&ratio), "{f} n={n}: ratio {ratio}");
        }
    }
}

#[test]
fn remapped_hexagons_approach_the_halving_ratio() {
    let h: Vec<f64> = [5, 10, 20, 40].iter().map(|&n| generate(MeshFamily::M2, n).unwrap().h_max()).collect();
    let r: Vec<f64> = h.windows(2).map(|w| w[0] / w[1]).collect();
    assert!(r[0] < r[1] && r[1] < r[2] && r[2] <= 2.2, "{r:?}");
}

#[test]
fn octagon_mesh_counts() {
    let m = generate(MeshFamily::M4, 5).unwrap();
    assert_eq!(m.n_cells(), 25);
    let total: f64 = m.cells.iter().map(|c| c.area).sum();
    assert!((total - 1.0).abs() < 1e-10);
    assert!(m.cells.iter().all(|c| c.vertices.len() == 8));
}

#[test]
fn hexagons_are_star_shaped() {
    let report = validate(&generate(MeshFamily::M1, 5).unwrap(), 0.1);
    assert!(report.all_star_shaped());
}

#[test]
fn resolution_below_two_is_rejected() {
    for f in MeshFamily::ALL {
        assert!(generate(f, 1).is_err());
    }
}
