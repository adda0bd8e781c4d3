//! Randomized structural invariants across the public API, driven by
//! proptest over (seed, dimension) inputs.

use num_complex::Complex64;
use proptest::prelude::*;
use qmix_core::{
    mixing, scenarios, verify, Classification, DensityOp, DescriptorSet, GramSpec, Ket,
    PhaseModel, SystemLayout, Tolerances,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn random_ket(label: &str, dim: usize, rng: &mut impl Rng) -> Ket {
    use rand_distr::{Distribution, StandardNormal};
    let layout = SystemLayout::single(label, dim).unwrap();
    loop {
        let entries: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        let v = qmix_core::CVec::new(entries).unwrap();
        if v.norm() > 1e-6 {
            return Ket::new(v.scaled(Complex64::new(1.0 / v.norm(), 0.0)), layout).unwrap();
        }
    }
}

fn random_density(label: &str, dim: usize, rng: &mut impl Rng) -> DensityOp {
    let kets: Vec<Ket> = (0..dim).map(|_| random_ket(label, dim, rng)).collect();
    let mut w: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() + 0.05).collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    DensityOp::mixture(&kets, &w).unwrap()
}

fn random_descriptor_set(dim: usize, count: usize, rng: &mut impl Rng) -> DescriptorSet {
    loop {
        let descriptors: Vec<Ket> = (0..count).map(|_| random_ket("S", dim, rng)).collect();
        let amps: Vec<Complex64> = {
            let raw: Vec<Complex64> = (0..count)
                .map(|_| {
                    Complex64::from_polar(
                        0.2 + 0.8 * rng.gen::<f64>(),
                        rng.gen::<f64>() * std::f64::consts::TAU,
                    )
                })
                .collect();
            let n: f64 = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            raw.iter().map(|z| z / Complex64::new(n, 0.0)).collect()
        };
        let d = DescriptorSet::with_amplitudes(descriptors, amps).unwrap();
        if d.linearly_independent(&tol()) {
            return d;
        }
    }
}

fn random_gram(n: usize, rng: &mut impl Rng) -> GramSpec {
    let vecs: Vec<qmix_core::CVec> = (0..n)
        .map(|_| random_ket("G", n, rng).vec().clone())
        .collect();
    GramSpec::new(qmix_core::tensor::gram(&vecs).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Tracing out a factor of a product state recovers the other factor.
    #[test]
    fn partial_trace_undoes_tensor_product(seed in any::<u64>(), da in 2usize..=4, db in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_density("A", da, &mut rng);
        let b = random_density("B", db, &mut rng);
        let prod = qmix_core::tensor::tensor_product_mat(a.mat(), b.mat()).unwrap();
        let layout = a.layout().tensor(b.layout()).unwrap();
        let joint = DensityOp::new(prod, layout).unwrap();
        let back_a = joint.partial_trace(&["A"]).unwrap();
        let back_b = joint.partial_trace(&["B"]).unwrap();
        prop_assert!(back_a.mat().sub(a.mat()).max_norm() < 1e-12);
        prop_assert!(back_b.mat().sub(b.mat()).max_norm() < 1e-12);
    }

    /// Partial tracing preserves the unit trace.
    #[test]
    fn partial_trace_preserves_trace(seed in any::<u64>(), da in 2usize..=4, db in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layout = SystemLayout::new(vec![("A", da), ("B", db)]).unwrap();
        let joint = Ket::new(
            random_ket("X", da * db, &mut rng).vec().clone(),
            layout,
        )
        .unwrap()
        .projector();
        let reduced = joint.partial_trace(&["A"]).unwrap();
        prop_assert!((reduced.mat().trace().re - 1.0).abs() < 1e-12);
    }

    /// Squared Schmidt coefficients are the eigenvalues of either reduction.
    #[test]
    fn schmidt_squares_are_reduced_eigenvalues(seed in any::<u64>(), da in 2usize..=4, db in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layout = SystemLayout::new(vec![("A", da), ("B", db)]).unwrap();
        let psi = Ket::new(random_ket("X", da * db, &mut rng).vec().clone(), layout).unwrap();
        let dec = qmix_core::tensor::schmidt(psi.vec(), (da, db), 1e-10).unwrap();
        let rho_a = psi.projector().partial_trace(&["A"]).unwrap();
        let mut evals: Vec<f64> = rho_a
            .spectral(&tol())
            .iter()
            .map(|(e, _)| *e)
            .collect();
        evals.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (k, coeff) in dec.coeffs.iter().enumerate() {
            prop_assert!((coeff * coeff - evals[k]).abs() < 1e-9);
        }
    }

    /// Realizing a Gram matrix reproduces it exactly.
    #[test]
    fn gram_realize_round_trip(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_gram(n, &mut rng);
        let vecs = qmix_core::tensor::gram_realize(g.mat(), None, &tol()).unwrap();
        let back = qmix_core::tensor::gram(&vecs).unwrap();
        prop_assert!(back.sub(g.mat()).max_norm() < 1e-9);
    }

    /// Outcome probabilities are affine in the state.
    #[test]
    fn prob_is_linear_in_the_state(seed in any::<u64>(), dim in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k1 = random_ket("S", dim, &mut rng);
        let k2 = random_ket("S", dim, &mut rng);
        let outcome = random_ket("S", dim, &mut rng);
        let w = rng.gen::<f64>();
        let mixed = DensityOp::mixture(&[k1.clone(), k2.clone()], &[w, 1.0 - w]).unwrap();
        let direct = mixed.prob(&outcome).unwrap();
        let parts = w * k1.projector().prob(&outcome).unwrap()
            + (1.0 - w) * k2.projector().prob(&outcome).unwrap();
        prop_assert!((direct - parts).abs() < 1e-12);
    }

    /// The closed-form reduction of a mixing construction equals the partial
    /// trace of its joint state, and the endpoints classify as expected.
    #[test]
    fn mix_general_self_consistency(seed in any::<u64>(), dim in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_descriptor_set(dim, dim.min(3), &mut rng);
        let g = random_gram(d.len(), &mut rng);
        let out = mixing::mix_general(&d, &g, "E", &tol()).unwrap();
        let traced = out.joint.projector().partial_trace(&["S"]).unwrap();
        prop_assert!(out.reduced.mat().sub(traced.mat()).max_norm() < 1e-10);

        let pure = mixing::mix_general(&d, &GramSpec::all_ones(d.len()), "E", &tol()).unwrap();
        prop_assert_eq!(pure.classification, Classification::Indistinguishable);
        prop_assert!((pure.reduced.purity() - 1.0).abs() < 1e-8);
    }

    /// Steering a purification over the support eigenbasis reproduces the
    /// original operator.
    #[test]
    fn steer_after_purify_reproduces_state(seed in any::<u64>(), dim in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density("S", dim, &mut rng);
        let psi = mixing::purify(&rho, "E", &tol()).unwrap();
        let d = DescriptorSet::new(rho.support_basis(&tol())).unwrap();
        let form = mixing::steer_ensemble(&psi, &d, &tol()).unwrap();
        let rebuilt = form
            .joint_ket()
            .unwrap()
            .projector()
            .partial_trace(&["S"])
            .unwrap();
        prop_assert!(rebuilt.mat().sub(rho.mat()).max_norm() < 1e-9);
    }

    /// Averaging over independent uniform phases reproduces the fully
    /// distinguishable (incoherent) mixture of the same weights.
    #[test]
    fn uniform_phase_average_matches_incoherent_mix(seed in any::<u64>(), dim in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_descriptor_set(dim, dim.min(3), &mut rng);
        let averaged = mixing::phase_average(&d, &PhaseModel::UniformIndependent, &tol()).unwrap();
        let weights: Vec<f64> = d
            .amplitudes()
            .unwrap()
            .iter()
            .map(|a| a.norm_sqr())
            .collect();
        let dw = DescriptorSet::with_weights(d.descriptors().to_vec(), weights).unwrap();
        let out = mixing::mix_distinguishable(&dw, "E", &tol()).unwrap();
        prop_assert!(averaged.mat().sub(out.reduced.mat()).max_norm() < 1e-12);
    }

    /// Two-slit fringe visibility equals the marker overlap modulus.
    #[test]
    fn two_slit_visibility_equals_overlap(g12 in 0.0f64..=1.0) {
        let mut g = qmix_core::CMat::identity(2);
        g.set(0, 1, Complex64::new(g12, 0.0));
        g.set(1, 0, Complex64::new(g12, 0.0));
        let scenario = scenarios::SlitScenario {
            n_slits: 2,
            amplitudes: vec![Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2],
            env: scenarios::EnvSpec::Gram(GramSpec::new(g).unwrap()),
            screen: scenarios::ScreenGeometry {
                slit_spacing: 1.0,
                wave_number: 2.0 * std::f64::consts::PI,
                angular_range: (-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2),
                sample_count: 20001,
            },
        };
        let out = scenarios::build_slit_scenario(&scenario, &tol()).unwrap();
        let pattern = scenarios::screen_intensity(&out.reduced, &scenario.screen).unwrap();
        prop_assert!((scenarios::visibility(&pattern) - g12).abs() < 1e-6);
    }

    /// Sub-seeded trial randomness is stable and collision-averse.
    #[test]
    fn subseed_is_stable(seed in any::<u64>(), trial in 0u64..1000) {
        let a = verify::subseed(seed, "family", trial);
        let b = verify::subseed(seed, "family", trial);
        prop_assert_eq!(a, b);
        prop_assert_ne!(a, verify::subseed(seed, "family", trial + 1));
        prop_assert_ne!(a, verify::subseed(seed, "other-family", trial));
    }
}
