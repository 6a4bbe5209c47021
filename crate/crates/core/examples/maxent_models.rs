//! Maximum-entropy fits: uniform, Boltzmann, two moments, Gaussian, von Mises.

use nalgebra::Complex;
use reur::entropy::{shannon_entropy, DiscreteDistribution};
use reur::maxent::{
    fit_boltzmann, fit_gaussian, fit_general_moments_traced, fit_uniform, fit_von_mises,
    MomentConstraint, MomentFunction, Support,
};

fn main() -> reur::Result<()> {
    let p = DiscreteDistribution::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.4, 0.3, 0.2, 0.1])?;
    println!("S(p) = {:.6}", shannon_entropy(&p));

    let uniform = fit_uniform(Support::Outcomes { outcomes: p.outcomes().to_vec() })?;
    println!("uniform:   S = {:.6}", uniform.entropy);

    let boltzmann = fit_boltzmann(p.outcomes(), p.mean())?;
    println!("boltzmann: S = {:.6} {}", boltzmann.entropy, boltzmann.to_json()?.trim());

    let constraints = [
        MomentConstraint::matching(MomentFunction::Power(1), &p),
        MomentConstraint::matching(MomentFunction::Power(2), &p),
    ];
    let (moments, trace) = fit_general_moments_traced(p.outcomes(), &constraints)?;
    println!(
        "moments:   S = {:.6} after {} Newton steps, final residual {:.1e}",
        moments.entropy,
        trace.residuals.len(),
        trace.residuals.last().copied().unwrap_or(0.0)
    );

    let gaussian = fit_gaussian(0.0, 2.0)?;
    println!("gaussian:  S = {:.6}", gaussian.entropy);

    let von_mises = fit_von_mises(Complex::from_polar(0.446_389_965_896_534_5, 0.3))?;
    println!("von mises: {}", von_mises.to_json()?.trim());

    match fit_boltzmann(p.outcomes(), 3.5) {
        Ok(_) => println!("unexpected fit"),
        Err(e) => println!("mean outside the outcome range: {e}"),
    }
    Ok(())
}
