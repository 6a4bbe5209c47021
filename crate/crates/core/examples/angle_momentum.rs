//! Angle and angular momentum: discrete angle basis against the continuous
//! angle POVM as J grows.

use reur::angular::{
    angle_povm_incompatibility, continuum_sweep, reur_angular_experiment, AngleFamily,
    AngularExperiment, AngularMode, AngularSystem, StateFamily,
};

fn main() -> reur::Result<()> {
    let sys = AngularSystem::new(6);
    println!("J = {}, c(continuous) = {:.6}", sys.j(), angle_povm_incompatibility(&sys)?);

    let rho = StateFamily::Phase { width: 1.0 }.state(&sys)?;
    for mode in [AngularMode::DiscretePvm, AngularMode::ContinuousPovm] {
        for scale_r in [1.0, 10.0] {
            let exp = AngularExperiment {
                angle_family: AngleFamily::VonMises,
                mode,
                scale_r,
                ..AngularExperiment::default()
            };
            let r = reur_angular_experiment(&sys, &rho, &exp)?;
            println!("{mode:?} R={scale_r}: lhs {:.6} rhs {:.6} c {:.6}", r.lhs, r.rhs, r.c);
        }
    }

    let rows = continuum_sweep(StateFamily::Phase { width: 4.0 }, &[4, 8, 16, 32, 64], 4096)?;
    println!("{:>4} {:>14} {:>14} {:>10}", "J", "S(p)+ln dθ", "h(angle)", "diff");
    for row in rows {
        println!(
            "{:>4} {:>14.8} {:>14.8} {:>10.2e}",
            row.two_j / 2,
            row.corrected_discrete_entropy,
            row.continuous_entropy,
            row.lhs_difference
        );
    }
    Ok(())
}
