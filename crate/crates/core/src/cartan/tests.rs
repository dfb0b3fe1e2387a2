use super::*;
use crate::exterior::{Domain, FramePair, KForm, VectorField};
use crate::scalar::{ChartPoint, Coord, Evaluator, ScalarField};

fn zero() -> ScalarField {
    ScalarField::zero()
}

/// Round S² of radius 1 times the hyperbolic plane of curvature −1.
fn sphere_times_hyperbolic() -> FramePair {
    let (x, z) = (ScalarField::x(), ScalarField::z());
    let coframe = [
        KForm::one_form([ScalarField::one(), zero(), zero(), zero()]),
        KForm::one_form([zero(), x.sin(), zero(), zero()]),
        KForm::one_form([zero(), zero(), ScalarField::one(), zero()]),
        KForm::one_form([zero(), zero(), zero(), z.exp()]),
    ];
    let domain = Domain::new((0.3, 2.5), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0));
    let pts = domain.sample(10, 1);
    FramePair::from_coframe(coframe, domain, &pts).unwrap()
}

/// Upper half-space model of hyperbolic 4-space, `g = |dx|² / t²`.
fn hyperbolic4() -> FramePair {
    let w = ScalarField::one() / ScalarField::t();
    let coframe = Coord::ALL.map(|c| KForm::differential(c).scale(&w));
    let domain = Domain::new((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (1.0, 2.0));
    let pts = domain.sample(10, 2);
    FramePair::from_coframe(coframe, domain, &pts).unwrap()
}

fn flat() -> FramePair {
    FramePair::coordinate(Domain::new((0.0, 1.0), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0)))
}

const E: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
];

#[test]
fn flat_space_is_flat() {
    let fp = flat();
    let conn = solve_connection(&fp).unwrap();
    let curv = curvature(&conn).unwrap();
    let d = curv.at(&ChartPoint::new(0.5, 0.5, 0.5, 0.5)).unwrap();
    assert!(d.riemann.iter().flatten().flatten().flatten().all(|v| *v == 0.0));
    assert_eq!(d.tau, 0.0);
    let h = holomorphic_curvature(
        &curv,
        &ChartPoint::new(0.5, 0.5, 0.5, 0.5),
        fp.e(0),
        &ComplexStructure::opposite(),
    )
    .unwrap();
    assert_eq!(h, 0.0);
}

#[test]
fn product_of_sphere_and_hyperbolic_plane() {
    let fp = sphere_times_hyperbolic();
    let curv = curvature(&solve_connection(&fp).unwrap()).unwrap();
    for p in fp.domain().sample(20, 3) {
        let d = curv.at(&p).unwrap();
        assert!((d.sectional(&E[0], &E[1]).unwrap() - 1.0).abs() < 1e-12);
        assert!((d.sectional(&E[2], &E[3]).unwrap() + 1.0).abs() < 1e-12);
        assert!(d.sectional(&E[0], &E[2]).unwrap().abs() < 1e-12);
        assert!(d.tau.abs() < 1e-12);
        let want = [1.0, 1.0, -1.0, -1.0];
        for i in 0..4 {
            for j in 0..4 {
                let w = if i == j { want[i] } else { 0.0 };
                assert!((d.ricci[i][j] - w).abs() < 1e-12);
            }
        }
        assert!(d.symmetry_defect() < 1e-12);
        // a product of surfaces has W⁺ with eigenvalues (λ, λ, −2λ) up to order
        let ev = d.w_plus_eigenvalues();
        assert!((ev[0] - ev[1]).abs() < 1e-12 || (ev[1] - ev[2]).abs() < 1e-12);
    }
}

#[test]
fn hyperbolic_space_has_constant_curvature_and_vanishing_weyl() {
    let fp = hyperbolic4();
    let curv = curvature(&solve_connection(&fp).unwrap()).unwrap();
    for p in fp.domain().sample(10, 4) {
        let d = curv.at(&p).unwrap();
        assert!((d.tau + 12.0).abs() < 1e-11);
        for row in d.w_plus {
            assert!(row.iter().all(|v| v.abs() < 1e-11));
        }
        let x = [0.6, 0.0, 0.8, 0.0];
        let y = [0.0, 1.0, 0.3, -2.0];
        assert!((d.sectional(&x, &y).unwrap() + 1.0).abs() < 1e-11);
    }
}

#[test]
fn curvature_invariants_on_a_generic_metric() {
    // e^{2x}(dx² + dy²) + (dz + y dt)² + cosh²z dt²
    let (x, y, z) = (ScalarField::x(), ScalarField::y(), ScalarField::z());
    let coframe = [
        KForm::one_form([x.exp(), zero(), zero(), zero()]),
        KForm::one_form([zero(), x.exp(), zero(), zero()]),
        KForm::one_form([zero(), zero(), ScalarField::one(), y.clone()]),
        KForm::one_form([zero(), zero(), zero(), z.cosh()]),
    ];
    let domain = Domain::new((-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5), (0.0, 1.0));
    let fp = FramePair::from_coframe(coframe, domain, &domain.sample(5, 1)).unwrap();
    let curv = curvature(&solve_connection(&fp).unwrap()).unwrap();
    for p in domain.sample(30, 9) {
        let d = curv.at(&p).unwrap();
        assert!(d.symmetry_defect() < 1e-10);
        let tr = d.w_plus[0][0] + d.w_plus[1][1] + d.w_plus[2][2];
        assert!(tr.abs() < 1e-10);
        for i in 0..3 {
            for j in 0..3 {
                assert!((d.w_plus[i][j] - d.w_plus[j][i]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn contracted_second_bianchi_identity() {
    // dτ = 2 div Ric, derivatives along E_a by central differences
    let (x, y, z) = (ScalarField::x(), ScalarField::y(), ScalarField::z());
    let coframe = [
        KForm::one_form([(&x * &y).cosh(), zero(), zero(), zero()]),
        KForm::one_form([zero(), x.exp(), zero(), zero()]),
        KForm::one_form([zero(), &z * 0.5, ScalarField::one(), y.clone()]),
        KForm::one_form([zero(), zero(), zero(), z.cosh()]),
    ];
    let domain = Domain::new((-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5), (0.0, 1.0));
    let fp = FramePair::from_coframe(coframe, domain, &domain.sample(5, 1)).unwrap();
    let conn = solve_connection(&fp).unwrap();
    let curv = curvature(&conn).unwrap();
    let h = 1e-4;
    for p in domain.sample(20, 12) {
        let mut ev = Evaluator::new(&p);
        let d = curv.at_with(&mut ev).unwrap();
        let g = conn.gamma_at(&mut ev).unwrap();
        let shifted = |a: usize, s: f64| {
            let v = d.frame.e[a];
            let mut q = p.clone();
            for c in 0..4 {
                q.coords[c] += s * v[c];
            }
            curv.at(&q).unwrap()
        };
        let mut d_tau = [0.0; 4];
        let mut d_ric = [[[0.0; 4]; 4]; 4];
        for a in 0..4 {
            let (fwd, back) = (shifted(a, h), shifted(a, -h));
            d_tau[a] = (fwd.tau - back.tau) / (2.0 * h);
            for b in 0..4 {
                for c in 0..4 {
                    d_ric[a][b][c] = (fwd.ricci[b][c] - back.ricci[b][c]) / (2.0 * h);
                }
            }
        }
        for b in 0..4 {
            // (div Ric)(E_b) = Σ_a (∇_{E_a} Ric)(E_a, E_b)
            let mut div = 0.0;
            for a in 0..4 {
                div += d_ric[a][a][b];
                for m in 0..4 {
                    div -= g[m][a][a] * d.ricci[m][b] + g[m][a][b] * d.ricci[a][m];
                }
            }
            assert!((d_tau[b] - 2.0 * div).abs() < 1e-6, "b = {b}: {} vs {}", d_tau[b], 2.0 * div);
        }
    }
}

#[test]
fn parallel_forms_on_a_product() {
    let fp = sphere_times_hyperbolic();
    let conn = solve_connection(&fp).unwrap();
    let area = fp.theta(0).wedge(fp.theta(1));
    let nabla = covariant_derivative_2form(&area, &conn).unwrap();
    for p in fp.domain().sample(10, 5) {
        let v = nabla.at(&p).unwrap();
        assert!(v.iter().flatten().flatten().all(|c| c.abs() < 1e-12));
    }
    // θ₁∧θ₃ mixes the factors and is not parallel
    let mixed = fp.theta(0).wedge(fp.theta(2));
    let nabla = covariant_derivative_2form(&mixed, &conn).unwrap();
    let v = nabla.at(&ChartPoint::new(1.0, 0.0, 0.0, 0.0)).unwrap();
    assert!(v.iter().flatten().flatten().any(|c| c.abs() > 1e-3));
}

#[test]
fn plane_and_unit_checks() {
    let fp = sphere_times_hyperbolic();
    let curv = curvature(&solve_connection(&fp).unwrap()).unwrap();
    let p = ChartPoint::new(1.0, 0.0, 0.0, 0.0);
    let e1 = fp.e(0).clone();
    assert_eq!(
        sectional_curvature(&curv, &p, &e1, &e1.scale(&ScalarField::constant(2.0))),
        Err(CartanError::DegeneratePlane)
    );
    let k = sectional_curvature(&curv, &p, &e1, fp.e(1)).unwrap();
    assert!((k - 1.0).abs() < 1e-12);
    let long = VectorField::coordinate(Coord::X).scale(&ScalarField::constant(2.0));
    assert!(matches!(
        holomorphic_curvature(&curv, &p, &long, &ComplexStructure::standard()),
        Err(CartanError::NotUnit { .. })
    ));
}

#[test]
fn degenerate_coframe_at_evaluation() {
    let coframe = [
        KForm::differential(Coord::X).scale(&ScalarField::x()),
        KForm::differential(Coord::Y),
        KForm::differential(Coord::Z),
        KForm::differential(Coord::T),
    ];
    let domain = Domain::new((0.5, 1.0), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0));
    let fp = FramePair::new(
        coframe,
        [
            VectorField::coordinate(Coord::X).scale(&(1.0 / ScalarField::x())),
            VectorField::coordinate(Coord::Y),
            VectorField::coordinate(Coord::Z),
            VectorField::coordinate(Coord::T),
        ],
        domain,
    );
    let curv = curvature(&solve_connection(&fp).unwrap()).unwrap();
    assert!(curv.at(&ChartPoint::new(0.0, 0.5, 0.5, 0.5)).is_err());
}
