//! Relative-entropy uncertainty relation for random qudit states, next to
//! Maassen-Uffink and the trivial bound.

use reur::maxent::DiscreteFamily;
use reur::quantum::{measure_projective, random_density_matrix, OrthonormalBasis};
use reur::reur::{evaluate_maassen_uffink, evaluate_reur_discrete, evaluate_reur_relative_only};

fn main() -> reur::Result<()> {
    let d = 4;
    let a = OrthonormalBasis::random(d, 1)?;
    let b = OrthonormalBasis::random(d, 2)?;
    for seed in 0..4 {
        let rho = random_density_matrix(d, 1 + seed as usize % d, seed)?;
        let p = measure_projective(&rho, &a)?;
        let q = measure_projective(&rho, &b)?;
        let mp = DiscreteFamily::Boltzmann.fit_to(&p)?;
        let mq = DiscreteFamily::Boltzmann.fit_to(&q)?;
        let mu = evaluate_maassen_uffink(&rho, &a, &b)?;
        let reur = evaluate_reur_discrete(&rho, &a, &b, &mp, &mq)?;
        let rel = evaluate_reur_relative_only(&rho, &a, &b, &mp, &mq)?;
        println!(
            "seed {seed}: MU gap {:.4}; REUR lhs {:.4} <= rhs {:.4} (trivial {:.4}); relative form rhs {:.4}",
            mu.gap,
            reur.lhs,
            reur.rhs,
            reur.trivial_bound.unwrap_or(f64::NAN),
            rel.rhs
        );
    }

    let rho = random_density_matrix(d, 2, 9)?;
    let mp = DiscreteFamily::Uniform.fit_to(&measure_projective(&rho, &a)?)?;
    let mq = DiscreteFamily::Uniform.fit_to(&measure_projective(&rho, &b)?)?;
    let report = evaluate_reur_discrete(&rho, &a, &b, &mp, &mq)?;
    println!("{}", reur::json::to_string(&report)?);
    Ok(())
}
