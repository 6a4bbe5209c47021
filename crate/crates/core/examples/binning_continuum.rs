//! Binning a Gaussian: S(p) + ln δx approaches the differential entropy.

use std::f64::consts::{E, PI};

use reur::entropy::{continuum_limit_check, differential_entropy, Grid, GriddedDensity};

fn main() -> reur::Result<()> {
    let grid = Grid::line_between(-12.0, 12.0, 24 * 512 + 1)?;
    let f = GriddedDensity::normalized(grid, grid.points().map(|x| (-0.5 * x * x).exp()).collect())?;
    let exact = 0.5 * (2.0 * PI * E).ln();
    println!("h(f) on grid {:.10}, exact {:.10}", differential_entropy(&f), exact);

    let widths = [2.0, 1.0, 0.5, 0.25, 0.125, 0.0625];
    let mut previous: Option<f64> = None;
    println!("{:>8} {:>14} {:>12} {:>7}", "dx", "S(p) + ln dx", "error", "ratio");
    for point in continuum_limit_check(&f, &widths)? {
        let err = (point.corrected_entropy - exact).abs();
        let ratio = previous.map(|p| format!("{:.2}", p / err)).unwrap_or_default();
        println!("{:>8} {:>14.10} {:>12.3e} {:>7}", point.bin_width, point.corrected_entropy, err, ratio);
        previous = Some(err);
    }
    Ok(())
}
