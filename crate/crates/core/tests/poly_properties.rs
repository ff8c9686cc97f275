use proptest::prelude::*;
use vemsupg_core::mesh::{generate, MeshFamily};
use vemsupg_core::poly::{cell_quadrature, dim_p, gauss_legendre, MonomialBasis};
use vemsupg_core::Point2;

/// `int_E x^a y^b` as `oint x^(a+1) y^b / (a+1) dy` over the boundary.
fn green_integral(vertices: &[Point2], a: i32, b: i32) -> f64 {
    let (t, w) = gauss_legendre(((a + b + 2) / 2 + 1) as usize);
    let n = vertices.len();
    let mut sum = 0.0;
    for i in 0..n {
        let (p, q) = (vertices[i], vertices[(i + 1) % n]);
        for (ti, wi) in t.iter().zip(&w) {
            // nodes on [-1, 1]
            let s = 0.5 * (ti + 1.0);
            let x = p.x + s * (q.x - p.x);
            let y = p.y + s * (q.y - p.y);
            sum += 0.5 * wi * x.powi(a + 1) * y.powi(b) / (a + 1) as f64 * (q.y - p.y);
        }
    }
    sum
}

#[test]
fn polynomial_space_dimensions() {
    for k in 0..=5 {
        assert_eq!(dim_p(k as isize), (k + 1) * (k + 2) / 2);
    }
    assert_eq!(dim_p(-1), 0);
}

#[test]
fn cell_rules_match_boundary_integrals() {
    for f in MeshFamily::ALL {
        let m = generate(f, 5).unwrap();
        for c in 0..m.n_cells() {
            let cell = m.local_cell(c);
            for k in 0..=4 {
                let degree = 2 * k + 2;
                let rule = cell_quadrature(&cell, degree).unwrap();
                for a in 0..=degree as i32 {
                    for b in 0..=(degree as i32 - a) {
                        let q = rule.integrate(|p| p.x.powi(a) * p.y.powi(b));
                        let r = green_integral(&cell.vertices, a, b);
                        let scale = rule.integrate(|p| (p.x.powi(a) * p.y.powi(b)).abs());
                        assert!(
                            (q - r).abs() <= 1e-11 * scale.max(1e-300),
                            "{f} cell {c} x^{a} y^{b}: {q} vs {r}"
                        );
                    }
                }
            }
        }
    }
}

fn point() -> impl Strategy<Value = Point2> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn gradients_match_central_differences(
        degree in 0usize..=4,
        centre in point(),
        scale in 0.05..2.0f64,
        p in point(),
    ) {
        let basis = MonomialBasis::new(degree, centre, scale);
        let g = basis.grad(p);
        let eps = 1e-6 * scale;
        let fd = |dx: f64, dy: f64| {
            let plus = basis.eval(Point2::new(p.x + dx, p.y + dy));
            let minus = basis.eval(Point2::new(p.x - dx, p.y - dy));
            plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * eps)).collect::<Vec<_>>()
        };
        let (gx, gy) = (fd(eps, 0.0), fd(0.0, eps));
        for i in 0..basis.len() {
            let size = 1.0 + g[i][0].abs().max(g[i][1].abs());
            prop_assert!((g[i][0] - gx[i]).abs() <= 1e-6 * size, "d/dx of {i}: {} vs {}", g[i][0], gx[i]);
            prop_assert!((g[i][1] - gy[i]).abs() <= 1e-6 * size, "d/dy of {i}: {} vs {}", g[i][1], gy[i]);
        }
    }

    #[test]
    fn constant_monomial_is_one(centre in point(), scale in 0.05..2.0f64, p in point()) {
        let basis = MonomialBasis::new(3, centre, scale);
        prop_assert_eq!(basis.eval(p)[0], 1.0);
        prop_assert_eq!(basis.grad(p)[0], [0.0, 0.0]);
    }
}
