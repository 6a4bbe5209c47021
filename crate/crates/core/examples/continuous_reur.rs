//! Position and momentum densities of oscillator states on an FFT grid.

use reur::reur::{evaluate_birula, evaluate_frank_lieb, robertson_strengthened, Preset};

fn main() -> reur::Result<()> {
    let presets = [
        Preset::Gaussian,
        Preset::Squeezed { alpha: 4.0 },
        Preset::Hermite { n: 1 },
        Preset::Hermite { n: 3 },
        Preset::GaussianSuperposition { separation: 4.0 },
    ];
    println!(
        "{:<28} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "state", "birula lhs", "FL gap", "sx*sk", "strength.", "robertson"
    );
    for preset in presets {
        let (f, g, s_rho) = preset.densities(4096)?;
        let birula = evaluate_birula(&f, &g)?;
        let fl = evaluate_frank_lieb(&f, &g, s_rho)?;
        let b = robertson_strengthened(&f, &g)?;
        println!(
            "{:<28} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            preset.to_string(),
            birula.lhs,
            fl.gap,
            b.sigma_product,
            b.strengthened_bound,
            b.robertson_bound
        );
    }
    Ok(())
}
