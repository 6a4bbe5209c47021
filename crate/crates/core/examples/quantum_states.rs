//! States, bases and measurements of a qutrit.

use reur::quantum::{
    max_overlap_pvm, measure_projective, measured_state, quantum_relative_entropy,
    random_density_matrix, von_neumann_entropy, DensityMatrix, OrthonormalBasis,
};

fn main() -> reur::Result<()> {
    let d = 3;
    let z = OrthonormalBasis::computational(d)?;
    let x = OrthonormalBasis::fourier(d)?;
    println!("c(Z, X) = {:.6} (1/d = {:.6})", max_overlap_pvm(&z, &x)?, 1.0 / d as f64);

    let rho = random_density_matrix(d, 2, 42)?;
    println!("eigenvalues {:?}", rho.eigenvalues());
    println!("S(rho) = {:.6}", von_neumann_entropy(&rho));

    for (name, basis) in [("Z", &z), ("X", &x)] {
        let p = measure_projective(&rho, basis)?;
        let rho_b = measured_state(&rho, basis)?;
        println!(
            "{name}: p = {:?}, S(rho || rho_{name}) = {:.6}",
            p.probs(),
            quantum_relative_entropy(&rho, &rho_b)?
        );
    }

    let noisy = rho.depolarize(0.5)?;
    println!("after depolarizing: S = {:.6}", von_neumann_entropy(&noisy));
    let mixed = DensityMatrix::maximally_mixed(d)?;
    println!("maximally mixed: S = {:.6} = ln d", von_neumann_entropy(&mixed));
    Ok(())
}
