use std::f64::consts::{E, PI};

use reur::entropy::{
    bin_density, differential_entropy, relative_entropy_continuous, relative_entropy_discrete,
    shannon_entropy, DiscreteDistribution, Grid, GriddedDensity,
};

fn density(grid: Grid, f: impl Fn(f64) -> f64) -> GriddedDensity {
    GriddedDensity::normalized(grid, grid.points().map(f).collect()).unwrap()
}

#[test]
fn shannon_entropy_ignores_relabeling() {
    let p = DiscreteDistribution::new(vec![0.0, 1.0, 2.0], vec![0.5, 0.3, 0.2]).unwrap();
    let q = DiscreteDistribution::new(vec![-7.0, 3.5, 40.0], vec![0.2, 0.5, 0.3]).unwrap();
    assert!((shannon_entropy(&p) - shannon_entropy(&q)).abs() < 1e-15);
}

#[test]
fn differential_entropy_shifts_by_log_scale() {
    let base = density(Grid::line_between(-12.0, 12.0, 4097).unwrap(), |x| (-0.5 * x * x).exp());
    let s = 3.0;
    let scaled = density(Grid::line_between(-36.0, 36.0, 4097).unwrap(), |x| {
        (-0.5 * (x / s).powi(2)).exp()
    });
    let shift = differential_entropy(&scaled) - differential_entropy(&base);
    assert!((shift - s.ln()).abs() < 1e-10, "{shift}");
    assert!((differential_entropy(&base) - 0.5 * (2.0 * PI * E).ln()).abs() < 1e-10);
}

#[test]
fn relative_entropy_is_invariant_under_rescaling() {
    let f = |x: f64| (-0.5 * (x - 1.0).powi(2)).exp();
    let g = |x: f64| (-0.25 * x * x).exp();
    let grid = Grid::line_between(-15.0, 15.0, 6001).unwrap();
    let kl = relative_entropy_continuous(&density(grid, f), &density(grid, g)).unwrap();
    let s = 0.2;
    let grid_s = Grid::line_between(-15.0 * s, 15.0 * s, 6001).unwrap();
    let kl_s = relative_entropy_continuous(
        &density(grid_s, |y| f(y / s)),
        &density(grid_s, |y| g(y / s)),
    )
    .unwrap();
    assert!((kl - kl_s).abs() < 1e-10);
    // N(1,1) against N(0,2).
    let exact = 0.5 * (2.0f64.ln() + 0.5 + 0.5 - 1.0);
    assert!((kl - exact).abs() < 1e-8, "{kl} vs {exact}");
}

#[test]
fn relative_entropy_against_a_point_mass_is_infinite() {
    let p = DiscreteDistribution::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
    let q = DiscreteDistribution::new(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
    assert_eq!(relative_entropy_discrete(&p, &q).unwrap(), f64::INFINITY);
    assert_eq!(relative_entropy_discrete(&q, &p).unwrap(), 2.0f64.ln());
}

#[test]
fn coarse_graining_only_lowers_discrete_entropy() {
    let f = density(Grid::line_between(-10.0, 10.0, 2049).unwrap(), |x| {
        (-0.5 * x * x).exp() + 0.3 * (-2.0 * (x - 2.0).powi(2)).exp()
    });
    let mut last = f64::INFINITY;
    for width in [20.0 / 1024.0, 20.0 / 256.0, 20.0 / 64.0, 20.0 / 16.0] {
        let s = shannon_entropy(&bin_density(&f, width).unwrap());
        assert!(s <= last + 1e-12);
        last = s;
    }
}

#[test]
fn circle_bins_must_tile_the_period() {
    let f = density(Grid::circle(0.0, 64).unwrap(), |x| 1.0 + 0.5 * x.cos());
    assert!(bin_density(&f, 2.0 * PI / 16.0).is_ok());
    assert!(bin_density(&f, 2.0 * PI * 3.0 / 64.0).is_err());
}
