use proptest::prelude::*;

use reur::entropy::{shannon_entropy, DiscreteDistribution};
use reur::maxent::DiscreteFamily;
use reur::quantum::{
    measure_projective, measured_state, quantum_relative_entropy, random_density_matrix,
    von_neumann_entropy, DensityMatrix, OrthonormalBasis,
};
use reur::reur::{evaluate_maassen_uffink, evaluate_reur_discrete, evaluate_reur_relative_only};

fn distribution() -> impl Strategy<Value = DiscreteDistribution> {
    (2usize..12)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(1e-3f64..1.0, n), -3.0f64..3.0))
        .prop_map(|(n, w, shift)| {
            let outcomes = (0..n).map(|i| i as f64 + shift).collect();
            DiscreteDistribution::from_weights(outcomes, w).unwrap()
        })
}

fn instance() -> impl Strategy<Value = (DensityMatrix, OrthonormalBasis, OrthonormalBasis)> {
    (2usize..=8, any::<u64>(), any::<u64>(), any::<u64>(), 0.0f64..1.0).prop_map(
        |(d, s1, s2, s3, frac)| {
            let rank = 1 + ((d - 1) as f64 * frac).round() as usize;
            (
                random_density_matrix(d, rank, s1).unwrap(),
                OrthonormalBasis::random(d, s2).unwrap(),
                OrthonormalBasis::random(d, s3).unwrap(),
            )
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn maxent_dominates_uniform(p in distribution()) {
        let m = DiscreteFamily::Uniform.fit_to(&p).unwrap();
        prop_assert!(m.entropy - shannon_entropy(&p) >= -1e-5);
    }

    #[test]
    fn maxent_dominates_boltzmann(p in distribution()) {
        let m = DiscreteFamily::Boltzmann.fit_to(&p).unwrap();
        prop_assert!(m.entropy - shannon_entropy(&p) >= -1e-5);
    }

    #[test]
    fn maxent_dominates_two_moments(p in distribution()) {
        let m = DiscreteFamily::Moments.fit_to(&p).unwrap();
        prop_assert!(m.entropy - shannon_entropy(&p) >= -1e-5);
    }

    #[test]
    fn divergence_from_model_is_entropy_deficit(p in distribution()) {
        let m = DiscreteFamily::Boltzmann.fit_to(&p).unwrap();
        let q = m.to_distribution(p.outcomes()).unwrap();
        let kl = reur::entropy::relative_entropy_discrete(&p, &q).unwrap();
        prop_assert!((kl - (m.entropy - shannon_entropy(&p))).abs() <= 1e-8);
    }

    #[test]
    fn relations_hold_on_random_instances((rho, a, b) in instance()) {
        for family in [DiscreteFamily::Uniform, DiscreteFamily::Boltzmann, DiscreteFamily::Moments] {
            let mp = family.fit_to(&measure_projective(&rho, &a).unwrap()).unwrap();
            let mq = family.fit_to(&measure_projective(&rho, &b).unwrap()).unwrap();
            let disc = evaluate_reur_discrete(&rho, &a, &b, &mp, &mq).unwrap();
            let rel = evaluate_reur_relative_only(&rho, &a, &b, &mp, &mq).unwrap();
            prop_assert!(disc.satisfied, "gap {}", disc.gap);
            prop_assert!(disc.rhs <= disc.trivial_bound.unwrap() + 1e-12);
            prop_assert!((disc.rhs - rel.rhs).abs() <= 1e-9);
        }
        prop_assert!(evaluate_maassen_uffink(&rho, &a, &b).unwrap().satisfied);
    }

    #[test]
    fn measured_state_entropy_gap((rho, a, _b) in instance()) {
        let p = measure_projective(&rho, &a).unwrap();
        let measured = measured_state(&rho, &a).unwrap();
        let rel = quantum_relative_entropy(&rho, &measured).unwrap();
        prop_assert!((shannon_entropy(&p) - von_neumann_entropy(&rho) - rel).abs() <= 1e-9);
        prop_assert!(shannon_entropy(&p) >= von_neumann_entropy(&rho) - 1e-12);
    }

    #[test]
    fn depolarizing_never_lowers_entropy((rho, _a, _b) in instance(), t in 0.0f64..0.9, dt in 0.0f64..0.1) {
        let s1 = von_neumann_entropy(&rho.depolarize(t).unwrap());
        let s2 = von_neumann_entropy(&rho.depolarize(t + dt).unwrap());
        prop_assert!(s2 >= s1 - 1e-10);
    }
}
