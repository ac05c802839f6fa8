use friedrichs_core::assembly::{assemble_global, assemble_monolithic, local_system};
use friedrichs_core::basis::HybridField;
use friedrichs_core::dense::Lu;
use friedrichs_core::discretization::{Discretization, SchemeOptions};
use friedrichs_core::identities::ah_direct;
use friedrichs_core::mesh::{generate_cartesian, generate_simplicial, Extent};
use friedrichs_core::model::{
    BoundaryCondition, BoundaryKind, ConstantVelocity, FriedrichsModel, InductionParams, ScalarDar, Stabilization,
    VectorDar,
};
use friedrichs_core::post::{
    apply_a1, cell_averages, check_conservation, error_vs_interpolant, l2_error, numerical_flux, triple_norm,
};
use friedrichs_core::small::{SmallMat, SmallVec};
use friedrichs_core::solve::{solve, Bicgstab, DenseLu, LinearSolver};
use friedrichs_core::{Entity, PolyMesh, Vec3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `K = I`, no advection, no penalties: only the mass and jump terms remain.
struct PureReaction {
    m: usize,
}

impl FriedrichsModel for PureReaction {
    fn dim(&self) -> usize {
        3
    }
    fn size(&self) -> usize {
        self.m
    }
    fn reaction(&self, _: Vec3) -> SmallMat {
        SmallMat::identity(self.m)
    }
    fn advection(&self, _: usize, _: Vec3) -> SmallMat {
        SmallMat::zeros(self.m)
    }
    fn div_advection(&self, _: Vec3) -> SmallMat {
        SmallMat::zeros(self.m)
    }
    fn boundary_kind(&self, _: Vec3) -> BoundaryKind {
        BoundaryKind::Dirichlet
    }
    fn boundary_operator(&self, _: BoundaryKind, _: Vec3, _: Vec3) -> SmallMat {
        SmallMat::zeros(self.m)
    }
    fn penalty_scale(&self, _: Vec3) -> f64 {
        1.0
    }
    fn interface_penalty(&self, _: Vec3, _: Vec3, _: f64) -> SmallMat {
        SmallMat::zeros(self.m)
    }
    fn boundary_penalty(&self, _: BoundaryKind, _: Vec3, _: Vec3, _: f64) -> SmallMat {
        SmallMat::zeros(self.m)
    }
    fn source(&self, _: Vec3) -> SmallVec {
        SmallVec::zeros(self.m)
    }
    fn boundary_datum(&self, _: Vec3) -> SmallVec {
        SmallVec::zeros(self.m)
    }
}

fn random_field(disc: &Discretization<'_>, seed: u64) -> HybridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = disc.space.zero_field();
    for c in &mut f.coeffs {
        *c = rng.gen_range(-1.0..1.0);
    }
    f
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn small_meshes() -> Vec<PolyMesh> {
    vec![
        generate_cartesian(2, 3, Extent::unit(3)).unwrap(),
        generate_simplicial(1, 3, Extent::unit(3)).unwrap(),
    ]
}

#[test]
fn lowest_order_blocks_by_hand() {
    let mesh = generate_cartesian(1, 3, Extent::unit(3)).unwrap();
    let model = PureReaction { m: 2 };
    let disc = Discretization::new(&mesh, &model, SchemeOptions::new(0)).unwrap();
    let loc = local_system(&disc, 0).unwrap();
    let h = 3f64.sqrt();
    for i in 0..2 {
        for j in 0..2 {
            let expected = if i == j { 1.0 + 6.0 * h } else { 0.0 };
            assert!((loc.a_tt[(i, j)] - expected).abs() < 1e-13);
        }
    }
    for lf in 0..6 {
        assert!((loc.a_tf[(0, 2 * lf)] + h).abs() < 1e-13);
        assert!(loc.a_tf[(0, 2 * lf + 1)].abs() < 1e-13);
        assert!((loc.a_ff[(2 * lf, 2 * lf)] - h).abs() < 1e-13);
    }
}

#[test]
fn constant_fields_only_see_reaction_and_boundary() {
    let mesh = generate_simplicial(1, 3, Extent::unit(3)).unwrap();
    let model = ScalarDar::manufactured(3);
    let disc = Discretization::new(&mesh, &model, SchemeOptions::new(1)).unwrap();
    let c = SmallVec::from_slice(&[0.5, -1.0, 2.0, 0.7]);
    let w = disc.space.interpolate(|_| c).unwrap();
    let v = random_field(&disc, 11);
    let mut expected = 0.0;
    for t in 0..mesh.n_elements() {
        let q = disc.space.quadrature(Entity::Element(t)).unwrap();
        for (&x, &wt) in q.points.iter().zip(&q.weights) {
            expected += wt * model.reaction(x).mul_vec(&c).dot(&disc.space.eval_element(&v, t, x));
        }
    }
    for f in mesh.boundary_faces() {
        let face = mesh.face(f);
        let q = disc.space.quadrature(Entity::Face(f)).unwrap();
        for (&x, &wt) in q.points.iter().zip(&q.weights) {
            let n = face.normal;
            let op = model.boundary_operator(BoundaryKind::Dirichlet, x, n)
                + model.boundary_penalty(BoundaryKind::Dirichlet, x, n, 1.0)
                - model.normal_matrix(x, n);
            expected += 0.5 * wt * op.mul_vec(&c).dot(&disc.space.eval_face(&v, f, x));
        }
    }
    let (a, _) = assemble_monolithic(&disc).unwrap();
    let got = a.bilinear(&v.coeffs, &w.coeffs);
    assert!((got - expected).abs() < 1e-12 * expected.abs().max(1.0));
}

#[test]
fn single_element_condenses_onto_its_faces() {
    let mesh = generate_cartesian(1, 3, Extent::unit(3)).unwrap();
    let model = ScalarDar::manufactured(3);
    let disc = Discretization::new(&mesh, &model, SchemeOptions::new(1)).unwrap();
    let sys = assemble_global(&disc).unwrap();
    assert_eq!(sys.matrix.dim(), 6 * 3 * 4);
    assert_eq!(sys.recovery.len(), 1);
}

#[test]
fn condensed_solve_matches_monolithic() {
    let scalar = ScalarDar::manufactured(3);
    let vector = VectorDar::manufactured();
    let models: [&dyn FriedrichsModel; 2] = [&scalar, &vector];
    for mesh in small_meshes() {
        for model in models {
            for k in 0..=2 {
                let disc = Discretization::new(&mesh, model, SchemeOptions::new(k)).unwrap();
                let (u, _) = solve(&disc, &DenseLu).unwrap();
                let (a, b) = assemble_monolithic(&disc).unwrap();
                let x = Lu::factor(a).unwrap().solve(&b);
                let diff: Vec<f64> = x.iter().zip(&u.coeffs).map(|(p, q)| p - q).collect();
                assert!(norm(&diff) <= 1e-9 * norm(&x), "m={} k={k}: {}", model.size(), norm(&diff) / norm(&x));
            }
        }
    }
}

#[test]
fn two_element_lowest_order() {
    let two = generate_cartesian_strip();
    let model = ScalarDar::manufactured(3);
    let disc = Discretization::new(&two, &model, SchemeOptions::new(0)).unwrap();
    let (u, _) = solve(&disc, &DenseLu).unwrap();
    let (a, b) = assemble_monolithic(&disc).unwrap();
    let x = Lu::factor(a).unwrap().solve(&b);
    let off = u.face_offset();
    for i in off..x.len() {
        assert!((x[i] - u.coeffs[i]).abs() <= 1e-10 * norm(&x));
    }
}

fn generate_cartesian_strip() -> PolyMesh {
    let text = "\
$Nodes
12
0 0 0
1 0 0
2 0 0
0 1 0
1 1 0
2 1 0
0 0 1
1 0 1
2 0 1
0 1 1
1 1 1
2 1 1
$Faces
11
4 0 1 4 3
4 1 2 5 4
4 6 7 10 9
4 7 8 11 10
4 0 1 7 6
4 1 2 8 7
4 3 4 10 9
4 4 5 11 10
4 0 3 9 6
4 1 4 10 7
4 2 5 11 8
$Cells
2
6 0 2 4 6 8 9
6 1 3 5 7 9 10
";
    friedrichs_core::mesh::parse_polymesh(text).unwrap()
}

#[test]
fn homogeneous_problem_has_zero_solution() {
    let model = ScalarDar::new(
        3,
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        Box::new(ConstantVelocity(Vec3::new(1.0, 1.0, 1.0))),
        1.0,
        BoundaryCondition::AllDirichlet,
    )
    .unwrap();
    let mesh = generate_simplicial(2, 3, Extent::unit(3)).unwrap();
    let disc = Discretization::new(&mesh, &model, SchemeOptions::new(1)).unwrap();
    for solver in [&DenseLu as &dyn LinearSolver, &Bicgstab::default()] {
        let (u, _) = solve(&disc, solver).unwrap();
        assert!(norm(&u.coeffs) <= 1e-11);
        let c = check_conservation(&disc, &u).unwrap();
        assert_eq!(c.max(), 0.0);
    }
}

#[test]
fn induction_at_rest_reproduces_uniform_field() {
    let params = InductionParams::default();
    let model = VectorDar::induction(&params).unwrap();
    let mesh = generate_simplicial(2, 3, Extent::new([-0.5; 3], [0.5; 3])).unwrap();
    for k in 0..=1 {
        let disc = Discretization::new(&mesh, &model, SchemeOptions::new(k)).unwrap();
        let (u, _) = solve(&disc, &DenseLu).unwrap();
        let exact = model.exact_solution().unwrap();
        let err = l2_error(&disc, exact, &u).unwrap();
        assert!(err <= 1e-8 * params.b0.norm(), "k={k}: {err}");
        for avg in cell_averages(&disc, &u).unwrap() {
            assert!((avg.segment3(3) - params.b0).norm() < 1e-8);
        }
    }
}

#[test]
fn rotating_induction_is_conservative() {
    // Variable velocity: the balance must hold at the discrete level even
    // though the coefficients are not polynomial.
    let params = InductionParams {
        omega: 2.0,
        ..InductionParams::default()
    };
    let model = VectorDar::induction(&params).unwrap();
    let mesh = generate_simplicial(2, 3, Extent::new([-0.5; 3], [0.5; 3])).unwrap();
    for k in 0..=1 {
        let disc = Discretization::new(&mesh, &model, SchemeOptions::new(k)).unwrap();
        let (u, _) = solve(&disc, &DenseLu).unwrap();
        let c = check_conservation(&disc, &u).unwrap();
        assert!(c.max() <= 1e-9, "k={k}: {c:?}");
    }
}

#[test]
fn solved_problems_are_conservative() {
    let scalar = ScalarDar::manufactured(3);
    let vector = VectorDar::manufactured();
    let models: [&dyn FriedrichsModel; 2] = [&scalar, &vector];
    let meshes = [
        generate_simplicial(2, 3, Extent::unit(3)).unwrap(),
        generate_cartesian(2, 3, Extent::unit(3)).unwrap(),
    ];
    for mesh in &meshes {
        for model in models {
            for stab in [Stabilization::Penalty, Stabilization::Upwind] {
                for k in 0..=1 {
                    let disc = Discretization::new(mesh, model, SchemeOptions::new(k).with_stabilization(stab)).unwrap();
                    let (mut u, _) = solve(&disc, &DenseLu).unwrap();
                    let c = check_conservation(&disc, &u).unwrap();
                    assert!(c.max() <= 1e-9, "m={} k={k} {stab:?}: {c:?}", model.size());
                    let f = mesh.element(0).faces[0];
                    u.face_block_mut(f)[0] += 1e-3;
                    let c = check_conservation(&disc, &u).unwrap();
                    assert!(c.balance > 1e-7, "{c:?}");
                }
            }
        }
    }
}

#[test]
fn iterative_and_direct_solutions_agree() {
    let mesh = generate_simplicial(3, 3, Extent::unit(3)).unwrap();
    let model = VectorDar::manufactured();
    let disc = Discretization::new(&mesh, &model, SchemeOptions::new(1)).unwrap();
    let sys = assemble_global(&disc).unwrap();
    let (x1, _) = DenseLu.solve(&sys.matrix, &sys.rhs).unwrap();
    let (x2, rep) = Bicgstab::default().solve(&sys.matrix, &sys.rhs).unwrap();
    assert!(rep.relative_residual <= 1e-10);
    let diff: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a - b).collect();
    assert!(norm(&diff) <= 1e-8 * norm(&x1));
}

#[test]
fn error_decreases_under_refinement() {
    let model = ScalarDar::manufactured(3);
    let exact = model.exact_solution().unwrap();
    let mut errors = Vec::new();
    for n in [1, 2] {
        let mesh = generate_simplicial(n, 3, Extent::unit(3)).unwrap();
        let disc = Discretization::new(&mesh, &model, SchemeOptions::new(1)).unwrap();
        let (u, _) = solve(&disc, &DenseLu).unwrap();
        errors.push(error_vs_interpolant(&disc, exact, &u).unwrap().energy);
    }
    assert!(errors[1] < errors[0], "{errors:?}");
}

#[test]
fn interpolant_has_zero_error() {
    let mesh = generate_simplicial(1, 3, Extent::unit(3)).unwrap();
    let model = VectorDar::manufactured();
    let disc = Discretization::new(&mesh, &model, SchemeOptions::new(1)).unwrap();
    let exact = model.exact_solution().unwrap();
    let u = disc.space.interpolate(|x| exact.value(x)).unwrap();
    let e = error_vs_interpolant(&disc, exact, &u).unwrap();
    assert_eq!(e.energy, 0.0);
    assert_eq!(e.flat, 0.0);
}

#[test]
fn a1_of_linear_potential() {
    let mesh = generate_simplicial(1, 3, Extent::unit(3)).unwrap();
    let model = ScalarDar::manufactured(3);
    let disc = Discretization::new(&mesh, &model, SchemeOptions::new(1)).unwrap();
    let v = disc.space.interpolate(|x| SmallVec::from_slice(&[0.0, 0.0, 0.0, x[0]])).unwrap();
    for t in 0..mesh.n_elements() {
        let q = disc.space.quadrature(Entity::Element(t)).unwrap();
        for &x in &q.points {
            let a = apply_a1(&disc, &v, t, x);
            for (c, e) in [1.0, 0.0, 0.0, 1.0].iter().enumerate() {
                assert!((a[c] - e).abs() < 1e-12);
            }
        }
    }
    let c = disc.space.interpolate(|_| SmallVec::from_slice(&[1.0, 2.0, 3.0, 4.0])).unwrap();
    assert!(apply_a1(&disc, &c, 0, mesh.element(0).barycenter).norm() < 1e-12);
}

#[test]
fn a1_matches_central_differences() {
    let mesh = generate_simplicial(1, 3, Extent::unit(3)).unwrap();
    let model = VectorDar::manufactured();
    let disc = Discretization::new(&mesh, &model, SchemeOptions::new(1)).unwrap();
    let lin = |x: Vec3| SmallVec::from_slice(&[x[1], -x[2], 2.0 * x[0], x[2], x[0], x[1]]);
    let v = disc.space.interpolate(lin).unwrap();
    for t in 0..mesh.n_elements() {
        let x = mesh.element(t).barycenter;
        let step = 1e-5 * mesh.element(t).diameter;
        let mut fd = SmallVec::zeros(6);
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += step;
            xm[i] -= step;
            let d = (disc.space.eval_element(&v, t, xp) - disc.space.eval_element(&v, t, xm)) * (0.5 / step);
            fd = fd + model.advection(i, x).mul_vec(&d);
        }
        assert!((apply_a1(&disc, &v, t, x) - fd).norm() < 1e-6);
    }
}

#[test]
fn flux_of_zero_and_constant_fields() {
    let mesh = generate_cartesian(2, 3, Extent::unit(3)).unwrap();
    let model = ScalarDar::manufactured(3);
    let disc = Discretization::new(&mesh, &model, SchemeOptions::new(1)).unwrap();
    let zero = disc.space.zero_field();
    assert!(numerical_flux(&disc, &zero, 0, 0).unwrap().iter().all(|v| *v == 0.0));
    let c = SmallVec::from_slice(&[1.0, -2.0, 0.5, 3.0]);
    let u = disc.space.interpolate(|_| c).unwrap();
    let el = mesh.element(0);
    let lf = el.faces.iter().position(|&f| !mesh.face(f).is_boundary()).unwrap();
    let f = el.faces[lf];
    let omega = el.orientations[lf] as f64;
    let expected = disc
        .space
        .project(Entity::Face(f), |x| model.normal_matrix(x, mesh.face(f).normal).mul_vec(&c) * omega)
        .unwrap();
    let got = numerical_flux(&disc, &u, 0, lf).unwrap();
    for (a, b) in got.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn triple_norm_of_constant_bounds_mass() {
    let mesh = generate_cartesian(1, 3, Extent::unit(3)).unwrap();
    let model = PureReaction { m: 3 };
    let disc = Discretization::new(&mesh, &model, SchemeOptions::new(0)).unwrap();
    let v = disc.space.interpolate(|_| SmallVec::from_slice(&[1.0, 2.0, 2.0])).unwrap();
    let n = triple_norm(&disc, &v).unwrap();
    assert!((n.flat - 3.0).abs() < 1e-12);
    assert_eq!(triple_norm(&disc, &disc.space.zero_field()).unwrap().full, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn triple_norm_is_a_norm(seed in any::<u64>(), c in -5.0f64..5.0, upwind in any::<bool>()) {
        let mesh = generate_simplicial(1, 3, Extent::unit(3)).unwrap();
        let model = ScalarDar::manufactured(3);
        let stab = if upwind { Stabilization::Upwind } else { Stabilization::Penalty };
        let disc = Discretization::new(&mesh, &model, SchemeOptions::new(1).with_stabilization(stab)).unwrap();
        let v = random_field(&disc, seed);
        let w = random_field(&disc, seed.wrapping_add(1));
        let nv = triple_norm(&disc, &v).unwrap();
        prop_assert!(nv.flat > 0.0 && nv.full >= nv.flat);
        let scaled = triple_norm(&disc, &v.scaled(c)).unwrap();
        prop_assert!((scaled.full - c.abs() * nv.full).abs() <= 1e-12 * nv.full.max(1.0));
        let mut sum = v.clone();
        sum.axpy(1.0, &w);
        let ns = triple_norm(&disc, &sum).unwrap();
        let nw = triple_norm(&disc, &w).unwrap();
        prop_assert!(ns.full <= nv.full + nw.full + 1e-12);
    }

    #[test]
    fn assembled_form_matches_direct_evaluation(seed in any::<u64>(), k in 0usize..3) {
        let mesh = generate_cartesian(1, 3, Extent::unit(3)).unwrap();
        let model = VectorDar::manufactured();
        let disc = Discretization::new(&mesh, &model, SchemeOptions::new(k)).unwrap();
        let w = random_field(&disc, seed);
        let v = random_field(&disc, !seed);
        let (a, _) = assemble_monolithic(&disc).unwrap();
        let blocks = a.bilinear(&v.coeffs, &w.coeffs);
        let direct = ah_direct(&disc, &w, &v).unwrap();
        prop_assert!((blocks - direct).abs() <= 1e-12 * direct.abs().max(1e-300));
    }
}
