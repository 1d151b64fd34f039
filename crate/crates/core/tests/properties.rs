use duality_lab::charproj::{char_projection, char_projection_of_adjoint, schur_complements};
use duality_lab::duality::{
    duality_operator, friedrichs_extension, friedrichs_reproduction_residual, kernel_complement_residual,
    krein_membership, quadratic_form_residual, spectral_measure,
};
use duality_lab::hilbert::{adjoint_graph_check, OperatorBetween};
use duality_lab::linalg::{cholesky_spd, DenseMatrix};
use duality_lab::network::{
    delta_identity_check, effective_resistance, energy_inner, laplacian_apply, reproducing_residual, sqrt2_ratio, wire,
    EnergySpace, Network,
};
use duality_lab::random::{self, seeded};
use duality_lab::sympair::{build_l, defect_space, q_condition_check, DefectModel, SymmetricPair};
use proptest::prelude::*;
use rand::Rng;

fn close(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> f64 {
    (a - b).max_abs()
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn cholesky_reconstructs(seed in any::<u64>(), n in 1usize..12) {
        let m = random::spd::<f64, _>(&mut seeded(seed), n);
        let l = cholesky_spd(&m).unwrap();
        prop_assert!(close(&l.matmul(&l.transpose()), &m) <= 1e-12 * m.max_abs());
    }

    #[test]
    fn adjoint_is_an_involution(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let t = random::operator::<f64, _>(&mut rng, 8);
        prop_assert!(close(t.adjoint().adjoint().matrix(), t.matrix()) <= 1e-10 * t.matrix().max_abs().max(1.0));
        let u = random::vector(&mut rng, t.domain().dim());
        let v = random::vector(&mut rng, t.codomain().dim());
        let lhs = t.codomain().inner(&t.apply(&u), &v);
        let rhs = t.domain().inner(&u, &t.adjoint().apply(&v));
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn adjoint_graph_is_the_rotated_complement(seed in any::<u64>()) {
        let t = random::operator::<f64, _>(&mut seeded(seed), 6);
        let g = adjoint_graph_check(&t, 1e-9).unwrap();
        prop_assert!(g.pass, "{:?}", g.residuals);
        prop_assert_eq!(g.combined_dim, g.ambient_dim);
    }

    #[test]
    fn characteristic_projection_is_an_orthogonal_projection(seed in any::<u64>()) {
        let t = random::operator::<f64, _>(&mut seeded(seed), 8);
        let e = char_projection(&t).unwrap();
        prop_assert!(e.idempotence_residual() <= 1e-10);
        prop_assert!(e.selfadjoint_residual() <= 1e-10);
        let via_adjoint = char_projection(&t.adjoint()).unwrap();
        prop_assert!(char_projection_of_adjoint(&e).distance(&via_adjoint) <= 1e-10);
    }

    #[test]
    fn schur_complements_vanish_for_injective_operators(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let n2 = rng.gen_range(1..=8);
        let n1 = rng.gen_range(1..=n2);
        let t = random::operator_of_shape::<f64, _>(&mut rng, n1, n2);
        let s = schur_complements(&char_projection(&t).unwrap(), false).unwrap();
        let (a, b) = s.norms(&char_projection(&t).unwrap());
        prop_assert!(a <= 1e-9 && b <= 1e-9, "{a:e} {b:e}");
    }

    #[test]
    fn duality_operator_reproduces_the_second_norm(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let cd = random::common_domain::<f64, _>(&mut rng, 10);
        let delta = duality_operator(&cd).unwrap();
        let c = random::vector(&mut rng, cd.ambient_dim());
        prop_assert!(quadratic_form_residual(&cd, &delta, &c) <= 1e-10);
        prop_assert!(kernel_complement_residual(&cd).unwrap() <= 1e-9);
        prop_assert!(delta.selfadjoint_residual() <= 1e-10);
    }

    #[test]
    fn spectral_mass_is_the_first_norm(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let cd = random::common_domain::<f64, _>(&mut rng, 10);
        let delta = duality_operator(&cd).unwrap();
        let phi = random::vector(&mut rng, cd.h1().dim());
        let mu = spectral_measure(&delta, &phi).unwrap();
        let n1 = cd.h1().inner(&phi, &phi);
        prop_assert!((mu.total_mass() - n1).abs() <= 1e-10 * n1);
        prop_assert!(mu.atoms.iter().all(|&(l, m)| l >= -1e-12 && m >= 0.0));
        let direct = cd.h1().inner(&phi, &delta.apply(&phi));
        prop_assert!((mu.moment(1) - direct).abs() <= 1e-10 * delta.norm().unwrap() * n1);
    }

    #[test]
    fn friedrichs_extension_is_a_krein_member(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = seeded(seed);
        let k = rng.gen_range(1..=n);
        let a = random::semibounded::<f64, _>(&mut rng, n, k).unwrap();
        let ext = friedrichs_extension(&a.form().unwrap()).unwrap();
        prop_assert!(friedrichs_reproduction_residual(&a, &ext) <= 1e-9);
        prop_assert!(ext.jj_star_norm <= 1.0 + 1e-10);
        prop_assert_eq!(ext.infinite_directions, n - k);
        let report = krein_membership(&a, &ext.jj_star).unwrap();
        prop_assert!(report.member, "{:?}", report.reasons);
    }

    #[test]
    fn finite_pairs_are_symmetric_without_defect(seed in any::<u64>()) {
        let t = random::operator::<f64, _>(&mut seeded(seed), 7);
        let pair = SymmetricPair::from_a(t).unwrap();
        prop_assert!(build_l(&pair).unwrap().symmetry_residual <= 1e-10);
        prop_assert_eq!(defect_space(&pair).unwrap().indices(), (0, 0));
    }

    #[test]
    fn admissible_q_form_a_group(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = seeded(seed);
        let h = random::space::<f64, _>(&mut rng, n, "defect");
        let b = random::matrix::<f64, _>(&mut rng, n, n);
        let s = b.transpose().matmul(&b);
        let model = DefectModel::new(h.gram().clone(), h.gram_solve(&s)).unwrap();
        // ⟨u, (I + BB*)u⟩ is the quadratic form of G + S; reflect in it.
        let form = h.gram() + &s;
        let reflection = |w: &[f64]| {
            let fw = form.matvec(w);
            let wfw: f64 = w.iter().zip(&fw).map(|(a, b)| a * b).sum();
            &DenseMatrix::identity(n) - &DenseMatrix::from_fn(n, n, |i, j| 2.0 * w[i] * fw[j] / wfw)
        };
        let q1 = reflection(&random::vector(&mut rng, n));
        let q2 = reflection(&random::vector(&mut rng, n));
        for q in [&q1, &q2, &q1.matmul(&q2)] {
            prop_assert!(q_condition_check(&model, q).unwrap().residual <= 1e-9);
        }
        prop_assert!(!q_condition_check(&model, &DenseMatrix::identity(n).scale(2.0)).unwrap().pass);
    }
}

fn random_network(seed: u64) -> Network<f64> {
    let mut rng = seeded(seed);
    let nv = rng.gen_range(2..=16);
    let extra = rng.gen_range(0..=nv);
    random::network(&mut rng, nv, extra).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn summation_by_parts(seed in any::<u64>()) {
        let n = random_network(seed);
        let mut rng = seeded(seed ^ 1);
        let u = random::vector::<f64, _>(&mut rng, n.vertex_count());
        let v = random::vector::<f64, _>(&mut rng, n.vertex_count());
        let lhs = energy_inner(&n, &u, &v);
        let rhs: f64 = u.iter().zip(laplacian_apply(&n, &v)).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn dipoles_reproduce_point_differences(seed in any::<u64>()) {
        let n = random_network(seed);
        let es = EnergySpace::new(n.clone()).unwrap();
        let f = random::vertex_function::<f64, _>(&mut seeded(seed ^ 2), n.vertex_count());
        for x in (0..n.vertex_count()).filter(|&x| x != n.base()) {
            prop_assert!(reproducing_residual(&es, x, &f).unwrap() <= 1e-9);
            prop_assert!(delta_identity_check(&es, x).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn sqrt2_bound_on_trees(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let nv = rng.gen_range(2..=12);
        let n = random::tree::<f64, _>(&mut rng, nv).unwrap();
        let es = EnergySpace::new(n.clone()).unwrap();
        let phi = random::vertex_function::<f64, _>(&mut rng, nv);
        for x in (0..nv).filter(|&x| x != n.base()) {
            let v = es.dipole(x).unwrap();
            prop_assert!(sqrt2_ratio(&n, &v, &phi) <= 2f64.sqrt() + 1e-9);
        }
    }

    #[test]
    fn wiring_never_raises_resistance(seed in any::<u64>()) {
        let n = random_network(seed);
        prop_assume!(n.vertex_count() >= 4);
        let (x, y) = (n.label(0).to_string(), n.label(1).to_string());
        let boundary: Vec<String> = n.vertices()[2..].iter().step_by(2).cloned().collect();
        let wired = wire(&n, &boundary).unwrap();
        let r_free = effective_resistance(&n, &x, &y).unwrap();
        let r_wired = effective_resistance(&wired, &x, &y).unwrap();
        prop_assert!(r_wired <= r_free + 1e-12, "{r_wired} > {r_free}");
    }
}

#[test]
fn single_precision_projection() {
    let t = random::operator::<f32, _>(&mut seeded(11), 5);
    let e = char_projection(&t).unwrap();
    assert!(e.idempotence_residual() <= 1e-4);
    let scalar = OperatorBetween::<f32>::new(
        DenseMatrix::from_row_major(1, 1, vec![2.0f32]),
        duality_lab::hilbert::WeightedSpace::euclidean(1, "a"),
        duality_lab::hilbert::WeightedSpace::euclidean(1, "b"),
    )
    .unwrap();
    let full = char_projection(&scalar).unwrap().full();
    let want = DenseMatrix::from_row_major(2, 2, vec![0.2f32, 0.4, 0.4, 0.8]);
    assert!((&full - &want).max_abs() <= 1e-6);
}
