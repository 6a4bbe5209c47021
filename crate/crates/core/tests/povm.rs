//! Relations evaluated on genuinely non-projective measurements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reur::maxent::DiscreteFamily;
use reur::quantum::{
    random_density_matrix, CMatrix, DensityMatrix, OrthonormalBasis, Povm, C64,
};
use reur::reur::{evaluate_maassen_uffink, evaluate_reur_discrete, Measurement};

/// `{w |a_i⟩⟨a_i|} ∪ {(1-w) |b_i⟩⟨b_i|}`.
fn two_basis_povm(a: &OrthonormalBasis, b: &OrthonormalBasis, w: f64) -> Povm {
    let d = a.dim();
    let mut elements = Vec::with_capacity(2 * d);
    for i in 0..d {
        elements.push(a.projector(i) * C64::new(w, 0.0));
    }
    for i in 0..d {
        elements.push(b.projector(i) * C64::new(1.0 - w, 0.0));
    }
    Povm::new(elements, (0..2 * d).map(|i| i as f64).collect()).unwrap()
}

fn reports(rho: &DensityMatrix, pa: &Povm, pb: &Povm) -> (f64, f64) {
    let p = Measurement::from(pa).measure(rho).unwrap();
    let q = Measurement::from(pb).measure(rho).unwrap();
    let mp = DiscreteFamily::Uniform.fit_to(&p).unwrap();
    let mq = DiscreteFamily::Uniform.fit_to(&q).unwrap();
    let mu = evaluate_maassen_uffink(rho, pa, pb).unwrap();
    let reur = evaluate_reur_discrete(rho, pa, pb, &mp, &mq).unwrap();
    (mu.gap, reur.gap)
}

#[test]
fn pure_states_satisfy_both_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..300 {
        let d = rng.random_range(2..=5);
        let bases: Vec<OrthonormalBasis> =
            (0..4).map(|_| OrthonormalBasis::random(d, rng.random()).unwrap()).collect();
        let pa = two_basis_povm(&bases[0], &bases[1], rng.random_range(0.1..0.9));
        let pb = two_basis_povm(&bases[2], &bases[3], rng.random_range(0.1..0.9));
        let rho = random_density_matrix(d, 1, rng.random()).unwrap();
        let (mu, reur) = reports(&rho, &pa, &pb);
        assert!(mu >= -1e-9, "{mu}");
        assert!(reur >= -1e-9, "{reur}");
    }
}

#[test]
fn mixedness_term_fails_for_trivial_povm() {
    // Λ = Γ = {𝟙/k}: p and q are flat whatever the state, and c = 1/k².
    let d = 3;
    let k = 4;
    let element = CMatrix::identity(d, d) * C64::new(1.0 / k as f64, 0.0);
    let povm = Povm::new(vec![element; k], (0..k).map(|i| i as f64).collect()).unwrap();
    let pure = DensityMatrix::pure(&OrthonormalBasis::computational(d).unwrap().vector(0)).unwrap();
    let mixed = DensityMatrix::maximally_mixed(d).unwrap();
    let (mu_pure, reur_pure) = reports(&pure, &povm, &povm);
    assert!(mu_pure.abs() < 1e-12 && reur_pure.abs() < 1e-12);
    let (mu_mixed, reur_mixed) = reports(&mixed, &povm, &povm);
    let ln_d = (d as f64).ln();
    assert!((mu_mixed + ln_d).abs() < 1e-12);
    assert!((reur_mixed + ln_d).abs() < 1e-12);
}

#[test]
fn random_mixed_povm_instances_are_tallied() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut violations = 0;
    let trials = 300;
    for _ in 0..trials {
        let d = rng.random_range(2..=5);
        let bases: Vec<OrthonormalBasis> =
            (0..4).map(|_| OrthonormalBasis::random(d, rng.random()).unwrap()).collect();
        let pa = two_basis_povm(&bases[0], &bases[1], rng.random_range(0.1..0.9));
        let pb = two_basis_povm(&bases[2], &bases[3], rng.random_range(0.1..0.9));
        let rank = rng.random_range(2..=d);
        let rho = random_density_matrix(d, rank, rng.random()).unwrap();
        let (mu, reur) = reports(&rho, &pa, &pb);
        // Both forms share -ln(1/c) - S(ρ), so they fail together.
        assert_eq!(mu < -1e-9, reur < -1e-9);
        if reur < -1e-9 {
            violations += 1;
        }
    }
    println!("mixed-state POVM violations: {violations} of {trials}");
}
