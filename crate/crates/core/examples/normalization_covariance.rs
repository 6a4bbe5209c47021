//! Rescaling the position eigenstates changes individual terms but not the
//! bound.

use std::f64::consts::PI;

use reur::maxent::fit_gaussian_to;
use reur::quantum::C64;
use reur::reur::{
    check_normalization_covariance, evaluate_reur_sides, Preset, RelationId, Side, CONTINUOUS_TOL,
};

fn main() -> reur::Result<()> {
    let (f, g, s_rho) = Preset::Squeezed { alpha: 2.0 }.densities(4096)?;
    let model_g = fit_gaussian_to(&g)?;
    let report = |f: &reur::entropy::GriddedDensity, c: f64| {
        evaluate_reur_sides(
            Side::Continuous(f, &fit_gaussian_to(f)?),
            Side::Continuous(&g, &model_g),
            c,
            s_rho,
            RelationId::ReurContinuous,
            CONTINUOUS_TOL,
        )
    };
    for alpha in [C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(0.5, 0.5), C64::from_polar(1.0, 1.2)] {
        let check = check_normalization_covariance(&f, 1.0 / (2.0 * PI), alpha, report)?;
        let shifts: Vec<String> = check
            .term_shifts
            .iter()
            .map(|t| format!("{} {:+.4}", t.name, t.value))
            .collect();
        println!(
            "|alpha|^2 = {:.2}: rhs shift {:.1e}, lhs shift {:.1e}, terms [{}] {}",
            check.alpha_sqr,
            check.rhs_shift,
            check.lhs_shift,
            shifts.join(", "),
            if check.passed { "ok" } else { "FAILED" }
        );
    }
    Ok(())
}
