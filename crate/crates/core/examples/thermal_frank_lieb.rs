//! Frank-Lieb gap of oscillator Gibbs states closing as temperature rises.

use reur::reur::{evaluate_frank_lieb, Preset};

fn main() -> reur::Result<()> {
    println!("{:>6} {:>10} {:>12} {:>12}", "beta", "S(rho)", "lhs", "gap");
    for beta in [4.0, 2.0, 1.0, 0.5, 0.25, 0.125] {
        let (f, g, s_rho) = Preset::Thermal { beta }.densities(4096)?;
        let report = evaluate_frank_lieb(&f, &g, s_rho)?;
        println!("{beta:>6} {s_rho:>10.6} {:>12.6} {:>12.3e}", report.lhs, report.gap);
    }
    Ok(())
}
