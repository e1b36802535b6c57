use cdo_core::geom::{Mat3, Vec3};
use cdo_core::hodge::HodgeMethod;
use cdo_core::linalg::{dense_solve_spd, DenseSym};
use cdo_core::mesh::{build_cartesian_hex, build_prismatic_polygonal, perturb_hex, Aabb};
use cdo_core::schemes::{
    assemble_cell_scheme, assemble_scheme, assemble_vertex_scheme, evaluate_errors, patch_test,
    solve_scheme, Blocks, ManufacturedCase, SchemeKind,
};
use cdo_core::{Error, MeshComplex};

fn cartesian(n: usize) -> MeshComplex {
    MeshComplex::new(build_cartesian_hex([n; 3], Aabb::unit()).unwrap()).unwrap()
}

fn perturbed(n: usize) -> MeshComplex {
    let base = build_cartesian_hex([n; 3], Aabb::unit()).unwrap();
    MeshComplex::new(perturb_hex(&base, 0.2, 42).unwrap()).unwrap()
}

#[test]
fn manufactured_cases_are_consistent() {
    for name in ManufacturedCase::BUILTIN {
        ManufacturedCase::builtin(name)
            .unwrap()
            .check_consistency(7)
            .unwrap();
    }
    let affine =
        ManufacturedCase::affine(Vec3::new(1.0, 2.0, -1.0), 0.5, Mat3::diag(1.0, 2.0, 5.0));
    affine.check_consistency(1).unwrap();
    assert_eq!(affine.source(Vec3::new(0.3, 0.2, 0.1)), 0.0);
    assert!(matches!(
        ManufacturedCase::builtin("nope"),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn single_interior_vertex_stencil() {
    // 3×3×3 vertices: one unknown, h = 1/2
    let cx = cartesian(2);
    let case = ManufacturedCase::builtin("sin-iso").unwrap();
    let sys = assemble_vertex_scheme(&cx, &case, HodgeMethod::DiagonalOrthogonal, 1.0).unwrap();
    let a = sys.matrix().unwrap();
    assert_eq!(a.nrows(), 1);
    assert!((a.get(0, 0) - 6.0 * 0.5).abs() < 1e-14);
    let sol = solve_scheme(&sys, 1e-12, 10).unwrap();
    assert_eq!(sol.stats.iterations, 1);
    let Blocks::Spd { rhs, interior, .. } = &sys.blocks else {
        panic!()
    };
    assert!((sol.potential[interior[0]] - rhs[0] / a.get(0, 0)).abs() < 1e-15);
}

#[test]
fn seven_point_stencil_on_three_cubed_cells() {
    let cx = cartesian(3);
    let case = ManufacturedCase::builtin("sin-iso").unwrap();
    let sys = assemble_vertex_scheme(&cx, &case, HodgeMethod::DiagonalOrthogonal, 1.0).unwrap();
    let a = sys.matrix().unwrap();
    assert_eq!(a.nrows(), 8);
    let h = 1.0 / 3.0;
    for r in 0..8 {
        let (cols, vals) = a.row(r);
        let nonzero: Vec<(usize, f64)> = cols
            .iter()
            .zip(vals)
            .filter(|(_, v)| **v != 0.0)
            .map(|(&c, &v)| (c, v))
            .collect();
        for &(c, v) in &nonzero {
            let expect = if c == r { 6.0 * h } else { -h };
            assert!((v - expect).abs() < 1e-14, "({r}, {c}) = {v}");
        }
        // three interior neighbours; the other three are boundary vertices
        assert_eq!(nonzero.len(), 4);
    }
}

#[test]
fn affine_case_rejected_without_lifting() {
    let cx = cartesian(2);
    let case = ManufacturedCase::affine(Vec3::new(1.0, 1.0, 1.0), -1.5, Mat3::identity());
    for scheme in [SchemeKind::Vertex, SchemeKind::Cell] {
        let r = assemble_scheme(scheme, &cx, &case, HodgeMethod::Reconstruction, 1.0);
        assert!(matches!(r, Err(Error::InvalidProblem(_))));
    }
    let one = MeshComplex::new(build_cartesian_hex([1, 1, 1], Aabb::unit()).unwrap()).unwrap();
    let zero = ManufacturedCase::builtin("zero").unwrap();
    let r = assemble_vertex_scheme(&one, &zero, HodgeMethod::Reconstruction, 1.0);
    assert!(matches!(r, Err(Error::InvalidProblem(_))));
}

#[test]
fn zero_source_gives_zero_solution() {
    let cx = perturbed(3);
    let case = ManufacturedCase::builtin("zero").unwrap();
    for scheme in [SchemeKind::Vertex, SchemeKind::Cell] {
        let sys = assemble_scheme(scheme, &cx, &case, HodgeMethod::Reconstruction, 1.0).unwrap();
        assert!(sys.rhs().iter().all(|&r| r == 0.0));
        let sol = solve_scheme(&sys, 1e-10, 100).unwrap();
        assert!(sol.potential.iter().all(|&p| p == 0.0));
        assert!(sol.flux.iter().flatten().all(|&f| f == 0.0));
        let e = evaluate_errors(&case, &sys, &sol, &cx).unwrap();
        assert_eq!(e.energy_rec, 0.0);
        assert_eq!(e.l2_potential, 0.0);
    }
}

#[test]
fn saddle_block_is_symmetric_and_schur_couples_negatively() {
    let cx = MeshComplex::new(
        build_cartesian_hex([2, 1, 1], Aabb::new(Vec3::ZERO, Vec3::new(2.0, 1.0, 1.0))).unwrap(),
    )
    .unwrap();
    let case = ManufacturedCase::builtin("zero").unwrap();
    let sys = assemble_cell_scheme(&cx, &case, HodgeMethod::Reconstruction, 1.0).unwrap();
    let k = sys.matrix().unwrap();
    assert_eq!(k.symmetry_deviation(), 0.0);
    let nf = cx.mesh.n_faces();
    assert_eq!(nf, 11);
    // dense Schur oracle: S = DIV H⁻¹ DIVᵀ
    let h = sys.hodge.matrix.to_dense();
    let hs = DenseSym::from_fn(nf, |i, j| h[i][j]);
    let Blocks::Saddle { div, .. } = &sys.blocks else {
        panic!()
    };
    let d = div.to_dense();
    let cols: Vec<Vec<f64>> = (0..2)
        .map(|c| dense_solve_spd(&hs, &(0..nf).map(|f| d[c][f]).collect::<Vec<_>>()).unwrap())
        .collect();
    let s = |a: usize, b: usize| (0..nf).map(|f| d[a][f] * cols[b][f]).sum::<f64>();
    assert!(s(0, 1) < 0.0);
    assert!((s(0, 1) - s(1, 0)).abs() < 1e-14);
    assert!(s(0, 0) > 0.0 && s(1, 1) > 0.0);
}

#[test]
fn patch_tests_vertex_scheme() {
    let cx = perturbed(4);
    let r = patch_test(
        SchemeKind::Vertex,
        &cx,
        Mat3::identity(),
        Vec3::new(1.0, 0.0, 0.0),
        0.0,
        HodgeMethod::Reconstruction,
        1.0,
        1e-13,
    )
    .unwrap();
    assert!(r.potential <= 1e-10 && r.field <= 1e-10, "{r:?}");
    let c = patch_test(
        SchemeKind::Vertex,
        &cx,
        Mat3::identity(),
        Vec3::ZERO,
        2.5,
        HodgeMethod::Reconstruction,
        1.0,
        1e-13,
    )
    .unwrap();
    assert!(c.potential <= 1e-10 && c.field <= 1e-10, "{c:?}");
}

#[test]
fn patch_tests_cell_scheme() {
    for cx in [
        perturbed(4),
        MeshComplex::new(build_prismatic_polygonal(4, 2).unwrap()).unwrap(),
    ] {
        let r = patch_test(
            SchemeKind::Cell,
            &cx,
            Mat3::diag(1.0, 2.0, 5.0),
            Vec3::new(1.0, 2.0, -1.0),
            0.0,
            HodgeMethod::Reconstruction,
            1.0,
            1e-13,
        )
        .unwrap();
        assert!(
            r.potential <= 1e-10 && r.flux <= 1e-10 && r.field <= 1e-10,
            "{r:?}"
        );
    }
}

#[test]
fn sine_l2_ratio_between_two_grids() {
    let case = ManufacturedCase::builtin("sin-iso").unwrap();
    let errs: Vec<f64> = [8, 16]
        .iter()
        .map(|&n| {
            let cx = cartesian(n);
            let sys = assemble_vertex_scheme(&cx, &case, HodgeMethod::Reconstruction, 1.0).unwrap();
            let sol = solve_scheme(&sys, 1e-12, 10_000).unwrap();
            evaluate_errors(&case, &sys, &sol, &cx)
                .unwrap()
                .l2_potential
        })
        .collect();
    let ratio = errs[0] / errs[1];
    assert!(
        (3.4..=4.6).contains(&ratio),
        "ratio {ratio}, errors {errs:?}"
    );
}

#[test]
fn flux_conservation_cell_scheme() {
    let cx = perturbed(4);
    let case = ManufacturedCase::builtin("sin-rotated").unwrap();
    let sys = assemble_cell_scheme(&cx, &case, HodgeMethod::Reconstruction, 1.0).unwrap();
    let sol = solve_scheme(&sys, 1e-12, 10_000).unwrap();
    let Blocks::Saddle { div, rhs_cell, .. } = &sys.blocks else {
        panic!()
    };
    let d = div.mul_vec(sol.flux.as_ref().unwrap());
    let scale = rhs_cell.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in d.iter().zip(rhs_cell) {
        assert!((a + b).abs() <= 1e-9 * scale, "{a} vs {}", -b);
    }
}

#[test]
fn cell_relabeling_permutes_solution() {
    let base = perturbed(3);
    let n = base.mesh.n_cells();
    let perm: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
    let relabeled = MeshComplex::new(base.mesh.permute_cells(&perm).unwrap()).unwrap();
    let case = ManufacturedCase::builtin("sin-aniso").unwrap();
    for scheme in [SchemeKind::Vertex, SchemeKind::Cell] {
        let solve = |cx: &MeshComplex| {
            let sys = assemble_scheme(scheme, cx, &case, HodgeMethod::Reconstruction, 1.0).unwrap();
            solve_scheme(&sys, 1e-13, 10_000).unwrap()
        };
        let (a, b) = (solve(&base), solve(&relabeled));
        match scheme {
            SchemeKind::Vertex => {
                for (x, y) in a.potential.iter().zip(&b.potential) {
                    assert!((x - y).abs() <= 1e-12);
                }
            }
            SchemeKind::Cell => {
                for (old, x) in a.potential.iter().enumerate() {
                    let new = relabeled_index(&perm, old);
                    assert!((x - b.potential[new]).abs() <= 1e-12);
                }
            }
        }
    }
}

fn relabeled_index(perm: &[usize], old: usize) -> usize {
    // permute_cells places old cell perm[i] at position i
    perm.iter().position(|&p| p == old).unwrap()
}
