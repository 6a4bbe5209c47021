//! Classical entropies and divergences.
//!
//! Discrete distributions carry real outcome labels. Gridded densities are
//! uniformly sampled on a line (composite trapezoid rule) or on a periodic
//! circle (rectangle rule, spectrally accurate for smooth periodic
//! integrands). All entropies are in nats.
//!
//! Divergences return `f64::INFINITY` when the support condition fails; that
//! is a value, not an error.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities must sum to one within this tolerance.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Gridded densities must integrate to one within this tolerance.
pub const DENSITY_NORMALIZATION_TOL: f64 = 1e-6;

/// Values at or below this are exact zeros for support tests.
pub const ZERO_THRESHOLD: f64 = 1e-300;

/// A probability vector over distinct, ascending real outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution {
    outcomes: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Builds a distribution; pairs are sorted by outcome.
    pub fn new(outcomes: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if outcomes.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} outcomes but {} probabilities",
                outcomes.len(),
                probs.len()
            )));
        }
        if outcomes.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("probability {p}")));
        }
        if outcomes.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDistribution("non-finite outcome".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        let mut pairs: Vec<(f64, f64)> = outcomes.into_iter().zip(probs).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::DegenerateLabels);
        }
        let (outcomes, probs) = pairs.into_iter().unzip();
        Ok(Self { outcomes, probs })
    }

    /// Normalizes non-negative weights (e.g. counts) into a distribution.
    pub fn from_weights(outcomes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidDistribution(format!("total weight {total}")));
        }
        if weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidDistribution("negative weight".into()));
        }
        Self::new(outcomes, weights.into_iter().map(|w| w / total).collect())
    }

    /// Uniform distribution over outcomes `0, 1, …, n-1`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        Self::new((0..n).map(|i| i as f64).collect(), vec![1.0 / n as f64; n])
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.outcomes.iter().copied().zip(self.probs.iter().copied())
    }

    /// Expectation of `m(x)`.
    pub fn expectation(&self, m: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, p)| p * m(x)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|x| x)
    }

    /// First circular moment `<e^{ix}>` treating outcomes as angles.
    pub fn circular_moment(&self) -> Complex<f64> {
        self.iter()
            .map(|(x, p)| Complex::from_polar(p, x))
            .fold(Complex::new(0.0, 0.0), |a, b| a + b)
    }

    /// Same outcome labels, up to a relative tolerance of 1e-12.
    pub fn same_outcomes(&self, other: &Self) -> bool {
        self.outcomes.len() == other.outcomes.len()
            && self
                .outcomes
                .iter()
                .zip(&other.outcomes)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0))
    }

    /// Reads a two-column CSV of `outcome,probability` or `outcome,count`.
    ///
    /// A non-numeric first row is treated as a header. Columns that do not
    /// sum to one are normalized as counts.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut outcomes = Vec::new();
        let mut weights = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::Parse(format!(
                    "row {}: expected 2 columns, got {}",
                    row + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(w)) => {
                    outcomes.push(x);
                    weights.push(w);
                }
                _ if row == 0 => continue,
                _ => return Err(Error::Parse(format!("row {}: not numeric", row + 1))),
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() <= NORMALIZATION_TOL {
            Self::new(outcomes, weights)
        } else {
            Self::from_weights(outcomes, weights)
        }
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Line,
    /// Periodic grid; the period is `len * spacing`.
    Circle,
}

/// A uniform sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub spacing: f64,
    pub len: usize,
    pub topology: Topology,
}

impl Grid {
    pub fn new(start: f64, spacing: f64, len: usize, topology: Topology) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() || !start.is_finite() {
            return Err(Error::InvalidDensity(format!(
                "bad grid start {start} spacing {spacing}"
            )));
        }
        let min_len = match topology {
            Topology::Line => 2,
            Topology::Circle => 1,
        };
        if len < min_len {
            return Err(Error::InvalidDensity(format!("grid of {len} points")));
        }
        Ok(Self {
            start,
            spacing,
            len,
            topology,
        })
    }

    pub fn line(start: f64, spacing: f64, len: usize) -> Result<Self> {
        Self::new(start, spacing, len, Topology::Line)
    }

    /// Line grid from `lo` to `hi` inclusive with `len` points.
    pub fn line_between(lo: f64, hi: f64, len: usize) -> Result<Self> {
        if len < 2 || !(hi > lo) {
            return Err(Error::InvalidDensity(format!("bad interval [{lo}, {hi}]")));
        }
        Self::line(lo, (hi - lo) / (len - 1) as f64, len)
    }

    /// `len` points covering `[start, start + 2π)`.
    pub fn circle(start: f64, len: usize) -> Result<Self> {
        Self::periodic(start, 2.0 * PI, len)
    }

    pub fn periodic(start: f64, period: f64, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidDensity("empty circle grid".into()));
        }
        Self::new(start, period / len as f64, len, Topology::Circle)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.point(i))
    }

    /// Quadrature weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        match self.topology {
            Topology::Line if i == 0 || i + 1 == self.len => 0.5 * self.spacing,
            _ => self.spacing,
        }
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len);
        values
            .iter()
            .enumerate()
            .map(|(i, v)| self.weight(i) * v)
            .sum()
    }

    /// Circumference of a circle grid.
    pub fn period(&self) -> Option<f64> {
        match self.topology {
            Topology::Circle => Some(self.len as f64 * self.spacing),
            Topology::Line => None,
        }
    }

    /// Closed interval spanned by a line grid, or the half-open period of a circle.
    pub fn extent(&self) -> (f64, f64) {
        match self.topology {
            Topology::Line => (self.start, self.point(self.len - 1)),
            Topology::Circle => (self.start, self.start + self.len as f64 * self.spacing),
        }
    }

    pub fn matches(&self, other: &Self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        self.len == other.len
            && self.topology == other.topology
            && close(self.start, other.start)
            && close(self.spacing, other.spacing)
    }
}

/// A probability density sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GriddedDensity {
    grid: Grid,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DensityRecord {
    grid_start: f64,
    spacing: f64,
    topology: Topology,
    values: Vec<f64>,
}

impl GriddedDensity {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len {
            return Err(Error::InvalidDensity(format!(
                "{} values on a {}-point grid",
                values.len(),
                grid.len
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidDensity(format!("value {v}")));
        }
        let total = grid.integrate(&values);
        if (total - 1.0).abs() > DENSITY_NORMALIZATION_TOL {
            return Err(Error::InvalidDensity(format!("integrates to {total}")));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` on the grid without renormalizing.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    /// Divides non-negative samples by their quadrature integral.
    pub fn normalized(grid: Grid, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len {
            return Err(Error::InvalidDensity("length mismatch".into()));
        }
        let total = grid.integrate(&values);
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidDensity(format!("integrates to {total}")));
        }
        values.iter_mut().for_each(|v| *v /= total);
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn topology(&self) -> Topology {
        self.grid.topology
    }

    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn expectation(&self, m: impl Fn(f64) -> f64) -> f64 {
        let w: Vec<f64> = self
            .grid
            .points()
            .zip(&self.values)
            .map(|(x, f)| f * m(x))
            .collect();
        self.grid.integrate(&w)
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.expectation(|x| (x - mu) * (x - mu))
    }

    /// `<e^{i 2π x / P}>` on a circle of period `P`.
    pub fn circular_moment(&self) -> Result<Complex<f64>> {
        let period = self
            .grid
            .period()
            .ok_or_else(|| Error::InvalidDensity("circular moment needs a circle grid".into()))?;
        let k = 2.0 * PI / period;
        let re = self.expectation(|x| (k * x).cos());
        let im = self.expectation(|x| (k * x).sin());
        Ok(Complex::new(re, im))
    }

    /// Parses `{grid_start, spacing, topology, values}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let rec: DensityRecord = serde_json::from_str(s)?;
        let grid = Grid::new(rec.grid_start, rec.spacing, rec.values.len(), rec.topology)?;
        Self::new(grid, rec.values)
    }

    pub fn from_json_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(DensityRecord {
            grid_start: self.grid.start,
            spacing: self.grid.spacing,
            topology: self.grid.topology,
            values: self.values.clone(),
        })
        .expect("density record serializes")
    }
}

pub fn shannon_entropy(p: &DiscreteDistribution) -> f64 {
    -p.probs()
        .iter()
        .filter(|&&pi| pi > 0.0)
        .map(|&pi| pi * pi.ln())
        .sum::<f64>()
}

fn check_outcomes(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<()> {
    if p.same_outcomes(q) {
        Ok(())
    } else {
        Err(Error::OutcomeMismatch)
    }
}

/// `S(p‖q) = Σ p ln(p/q)`, `+∞` when `p > 0` somewhere `q = 0`.
pub fn relative_entropy_discrete(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    check_outcomes(p, q)?;
    let mut acc = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi <= ZERO_THRESHOLD {
            continue;
        }
        if qi <= ZERO_THRESHOLD {
            return Ok(f64::INFINITY);
        }
        acc += pi * (pi / qi).ln();
    }
    Ok(acc)
}

/// `S(p, q) = -Σ p ln q`.
pub fn cross_entropy(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    check_outcomes(p, q)?;
    let mut acc = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi <= ZERO_THRESHOLD {
            continue;
        }
        if qi <= ZERO_THRESHOLD {
            return Ok(f64::INFINITY);
        }
        acc -= pi * qi.ln();
    }
    Ok(acc)
}

/// `-∫ f ln f`; may be negative.
pub fn differential_entropy(f: &GriddedDensity) -> f64 {
    let integrand: Vec<f64> = f
        .values()
        .iter()
        .map(|&v| if v > ZERO_THRESHOLD { -v * v.ln() } else { 0.0 })
        .collect();
    f.grid().integrate(&integrand)
}

/// `∫ f ln(f/g)` on a shared grid.
pub fn relative_entropy_continuous(f: &GriddedDensity, g: &GriddedDensity) -> Result<f64> {
    if !f.grid().matches(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let mut integrand = Vec::with_capacity(f.values().len());
    for (&fv, &gv) in f.values().iter().zip(g.values()) {
        if fv <= ZERO_THRESHOLD {
            integrand.push(0.0);
        } else if gv <= ZERO_THRESHOLD {
            return Ok(f64::INFINITY);
        } else {
            integrand.push(fv * (fv / gv).ln());
        }
    }
    Ok(f.grid().integrate(&integrand))
}

fn cells_per_bin(grid: &Grid, bin_width: f64) -> Result<usize> {
    let err = Error::IncommensurateBins {
        bin_width,
        spacing: grid.spacing,
    };
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(err);
    }
    let ratio = bin_width / grid.spacing;
    let k = ratio.round();
    if k < 1.0 || (ratio - k).abs() > 1e-9 * k {
        return Err(err);
    }
    Ok(k as usize)
}

/// Integrates `f` over consecutive bins of width `bin_width`.
///
/// Line bins start at the first grid node; a shorter final bin collects the
/// remainder. Circle bins must tile the period. Labels are bin centers and
/// probabilities are renormalized by the total quadrature mass.
pub fn bin_density(f: &GriddedDensity, bin_width: f64) -> Result<DiscreteDistribution> {
    let grid = f.grid();
    let k = cells_per_bin(grid, bin_width)?;
    let v = f.values();
    let h = grid.spacing;
    let (labels, masses): (Vec<f64>, Vec<f64>) = match grid.topology {
        Topology::Line => {
            let cells = grid.len - 1;
            (0..cells)
                .step_by(k)
                .map(|first| {
                    let last = (first + k).min(cells);
                    let mass: f64 = (first..last).map(|c| 0.5 * h * (v[c] + v[c + 1])).sum();
                    let center = grid.point(first) + 0.5 * h * (last - first) as f64;
                    (center, mass)
                })
                .unzip()
        }
        Topology::Circle => {
            if grid.len % k != 0 {
                return Err(Error::IncommensurateBins {
                    bin_width,
                    spacing: h,
                });
            }
            (0..grid.len)
                .step_by(k)
                .map(|first| {
                    let mass: f64 = v[first..first + k].iter().map(|x| h * x).sum();
                    let center = grid.point(first) + 0.5 * h * (k - 1) as f64;
                    (center, mass)
                })
                .unzip()
        }
    };
    DiscreteDistribution::from_weights(labels, masses)
}

/// One row of a continuum-limit table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuumPoint {
    pub bin_width: f64,
    /// `S(p) + ln δx`.
    pub corrected_entropy: f64,
}

/// Shannon entropy of successively finer binnings, shifted by `ln δx`.
pub fn continuum_limit_check(f: &GriddedDensity, widths: &[f64]) -> Result<Vec<ContinuumPoint>> {
    if widths.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter(
            "bin widths must be strictly decreasing".into(),
        ));
    }
    widths
        .iter()
        .map(|&w| {
            let p = bin_density(f, w)?;
            Ok(ContinuumPoint {
                bin_width: w,
                corrected_entropy: shannon_entropy(&p) + w.ln(),
            })
        })
        .collect()
}
