//! Running the `verify` experiment in-process, as the command line does.

use reur::cli::{run_verify_settings, VerifySettings};
use reur::maxent::DiscreteFamily;

fn main() {
    let settings = VerifySettings {
        seed: 7,
        instances: 700,
        dims: (2..=8).collect(),
        models: DiscreteFamily::Moments,
        ..VerifySettings::default()
    };
    let summary = run_verify_settings(&settings);
    println!(
        "{} instances, all satisfied: {}, violations: {}",
        summary.instances.len(),
        summary.all_satisfied,
        summary.violation_count
    );
    if let Some(w) = &summary.worst_gap {
        println!("smallest gap {:.3e} ({:?}, instance {}, seed {})", w.gap, w.relation_id, w.instance, w.seed);
    }

    let buggy = run_verify_settings(&VerifySettings { inject_bug: true, instances: 50, ..settings });
    println!("with the S(rho) sign flipped: {} of 50 instances flagged", buggy.violation_count);
}
