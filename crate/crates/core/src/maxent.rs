//! Maximum-entropy reference distributions.
//!
//! Discrete families (uniform, Boltzmann, general moments) live on a finite
//! outcome set; continuous families are the Gaussian on the line, the uniform
//! distribution on an interval or circle, and the von Mises distribution on a
//! circle. Every model carries its entropy in closed form.

use std::f64::consts::{E, PI};

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::entropy::{DiscreteDistribution, Grid, GriddedDensity, Topology, ZERO_THRESHOLD};
use crate::error::{Error, Result};
use crate::special::{bessel_i0e, bessel_i1e, bessel_ratio};

/// Moment residual at which the dual solvers stop.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const MAX_NEWTON_ITERATIONS: usize = 200;
/// Minimum fraction of Gaussian mass a rendering grid must capture.
pub const GAUSSIAN_COVERAGE: f64 = 1.0 - 1e-9;

/// A real function of the outcome whose expectation is constrained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentFunction {
    /// `x^k`
    Power(u32),
    /// `1` at the given outcome, `0` elsewhere.
    Indicator(f64),
    /// `cos x`, real part of the circular moment.
    Cos,
    /// `sin x`, imaginary part of the circular moment.
    Sin,
}

impl MomentFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            MomentFunction::Power(k) => x.powi(k as i32),
            MomentFunction::Indicator(at) => {
                if x == at {
                    1.0
                } else {
                    0.0
                }
            }
            MomentFunction::Cos => x.cos(),
            MomentFunction::Sin => x.sin(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentConstraint {
    pub function: MomentFunction,
    pub target: f64,
}

impl MomentConstraint {
    pub fn new(function: MomentFunction, target: f64) -> Self {
        Self { function, target }
    }

    /// Constraint matching the expectation of `function` under `p`.
    pub fn matching(function: MomentFunction, p: &DiscreteDistribution) -> Self {
        Self::new(function, p.expectation(|x| function.eval(x)))
    }
}

/// Where a model lives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Support {
    /// Any `size` outcomes (uniform models only).
    Count { size: usize },
    Outcomes { outcomes: Vec<f64> },
    Interval { lo: f64, hi: f64 },
    Circle { circumference: f64 },
    RealLine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "parameters", rename_all = "snake_case")]
pub enum Family {
    Uniform {},
    /// `p(x) = e^{-γx}/Z`.
    Boltzmann { gamma: f64, log_z: f64 },
    /// `p(x) = exp(Σ_j λ_j m_j(x))`, with `lambdas[0]` the normalization
    /// multiplier paired with the constant function.
    GeneralMoment {
        lambdas: Vec<f64>,
        moments: Vec<MomentFunction>,
    },
    Gaussian { mean: f64, variance: f64 },
    /// Location `mu` and concentration `kappa` in angle units; a circle of
    /// circumference `P` uses the angle `2πx/P`.
    VonMises { kappa: f64, mu: f64 },
}

/// A fitted maximum-entropy distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEntModel {
    #[serde(flatten)]
    pub family: Family,
    pub entropy: f64,
    pub support: Support,
}

impl MaxEntModel {
    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Uniform {} => "uniform",
            Family::Boltzmann { .. } => "boltzmann",
            Family::GeneralMoment { .. } => "general_moment",
            Family::Gaussian { .. } => "gaussian",
            Family::VonMises { .. } => "von_mises",
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.support, Support::Count { .. } | Support::Outcomes { .. })
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    fn log_weight(&self, x: f64) -> f64 {
        match &self.family {
            Family::Uniform {} => 0.0,
            Family::Boltzmann { gamma, log_z } => -gamma * x - log_z,
            Family::GeneralMoment { lambdas, moments } => {
                lambdas[0]
                    + lambdas[1..]
                        .iter()
                        .zip(moments)
                        .map(|(l, m)| l * m.eval(x))
                        .sum::<f64>()
            }
            _ => unreachable!("continuous family"),
        }
    }

    /// Renders a discrete model on `outcomes`, which must be its support.
    pub fn to_distribution(&self, outcomes: &[f64]) -> Result<DiscreteDistribution> {
        match &self.support {
            Support::Count { size } => {
                if outcomes.len() != *size {
                    return Err(Error::IncompatibleSupport(format!(
                        "{} outcomes for a uniform model over {size}",
                        outcomes.len()
                    )));
                }
            }
            Support::Outcomes { outcomes: own } => {
                let mut want = outcomes.to_vec();
                want.sort_by(f64::total_cmp);
                let same = want.len() == own.len()
                    && want
                        .iter()
                        .zip(own)
                        .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0));
                if !same {
                    return Err(Error::IncompatibleSupport(
                        "requested outcomes differ from the model support".into(),
                    ));
                }
            }
            other => {
                return Err(Error::IncompatibleSupport(format!(
                    "{other:?} is not a discrete support"
                )))
            }
        }
        let logs: Vec<f64> = outcomes.iter().map(|&x| self.log_weight(x)).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        DiscreteDistribution::from_weights(outcomes.to_vec(), weights)
    }

    /// Log-density of a continuous model on a grid, normalized by quadrature.
    /// Points outside an interval support get `-∞`.
    pub fn log_density(&self, grid: &Grid) -> Result<Vec<f64>> {
        let incompatible =
            |why: &str| Err(Error::IncompatibleSupport(format!("{} {why}", self.family_name())));
        let logs: Vec<f64> = match (&self.family, &self.support) {
            (Family::Uniform {}, Support::Interval { lo, hi }) => {
                if grid.topology != Topology::Line {
                    return incompatible("on an interval needs a line grid");
                }
                let slack = 1e-12 * (hi - lo);
                let inside = -(hi - lo).ln();
                grid.points()
                    .map(|x| {
                        if x >= lo - slack && x <= hi + slack {
                            inside
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect()
            }
            (Family::Uniform {}, Support::Circle { circumference }) => {
                check_period(grid, *circumference)?;
                vec![-circumference.ln(); grid.len]
            }
            (Family::Gaussian { mean, variance }, _) => {
                if grid.topology != Topology::Line {
                    return incompatible("needs a line grid");
                }
                let sd = variance.sqrt();
                let (lo, hi) = grid.extent();
                let cdf = |x: f64| 0.5 * (1.0 + statrs::function::erf::erf((x - mean) / (sd * 2f64.sqrt())));
                let covered = cdf(hi) - cdf(lo);
                if covered < GAUSSIAN_COVERAGE {
                    return Err(Error::InadequateGrid(1.0 - covered));
                }
                let log_norm = -0.5 * (2.0 * PI * variance).ln();
                grid.points()
                    .map(|x| log_norm - (x - mean).powi(2) / (2.0 * variance))
                    .collect()
            }
            (Family::VonMises { kappa, mu }, Support::Circle { circumference }) => {
                check_period(grid, *circumference)?;
                let scale = 2.0 * PI / circumference;
                let log_norm = -(circumference * bessel_i0e(*kappa)).ln();
                grid.points()
                    .map(|x| log_norm + kappa * ((scale * x - mu).cos() - 1.0))
                    .collect()
            }
            _ => return incompatible("cannot be rendered as a density"),
        };
        let mass = grid.integrate(&logs.iter().map(|l| l.exp()).collect::<Vec<_>>());
        if !(mass > 0.0) {
            return Err(Error::InadequateGrid(1.0));
        }
        let shift = mass.ln();
        Ok(logs.into_iter().map(|l| l - shift).collect())
    }

    /// Renders a continuous model on a grid, normalized by quadrature.
    pub fn to_density(&self, grid: &Grid) -> Result<GriddedDensity> {
        let values = self.log_density(grid)?.into_iter().map(f64::exp).collect();
        GriddedDensity::normalized(*grid, values)
    }
}

/// `∫ f ln(f / m)` against a continuous model, using its log-density so that
/// far tails do not underflow into spurious support violations.
pub fn relative_entropy_to_model(f: &GriddedDensity, model: &MaxEntModel) -> Result<f64> {
    let logs = model.log_density(f.grid())?;
    let mut integrand = Vec::with_capacity(logs.len());
    for (&fv, &lm) in f.values().iter().zip(&logs) {
        if fv <= ZERO_THRESHOLD {
            integrand.push(0.0);
        } else if lm == f64::NEG_INFINITY {
            return Ok(f64::INFINITY);
        } else {
            integrand.push(fv * (fv.ln() - lm));
        }
    }
    Ok(f.grid().integrate(&integrand))
}

fn check_period(grid: &Grid, circumference: f64) -> Result<()> {
    match grid.period() {
        Some(p) if (p - circumference).abs() <= 1e-9 * circumference => Ok(()),
        _ => Err(Error::IncompatibleSupport(format!(
            "grid is not a circle of circumference {circumference}"
        ))),
    }
}

fn check_outcomes(outcomes: &[f64]) -> Result<Vec<f64>> {
    if outcomes.is_empty() {
        return Err(Error::IncompatibleSupport("empty outcome set".into()));
    }
    if outcomes.iter().any(|x| !x.is_finite()) {
        return Err(Error::IncompatibleSupport("non-finite outcome".into()));
    }
    let mut sorted = outcomes.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateLabels);
    }
    Ok(sorted)
}

/// Uniform model on a finite set, interval, or circle.
pub fn fit_uniform(support: Support) -> Result<MaxEntModel> {
    let entropy = match &support {
        Support::Count { size } if *size > 0 => (*size as f64).ln(),
        Support::Outcomes { outcomes } => {
            let sorted = check_outcomes(outcomes)?;
            return Ok(MaxEntModel {
                family: Family::Uniform {},
                entropy: (sorted.len() as f64).ln(),
                support: Support::Outcomes { outcomes: sorted },
            });
        }
        Support::Interval { lo, hi } if hi > lo && (hi - lo).is_finite() => (hi - lo).ln(),
        Support::Circle { circumference } if *circumference > 0.0 && circumference.is_finite() => {
            circumference.ln()
        }
        other => {
            return Err(Error::IncompatibleSupport(format!(
                "no uniform distribution on {other:?}"
            )))
        }
    };
    Ok(MaxEntModel {
        family: Family::Uniform {},
        entropy,
        support,
    })
}

/// `ln Σ e^{a_i}` and the normalized weights.
fn log_sum_exp(a: &[f64]) -> (f64, Vec<f64>) {
    let top = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = a.iter().map(|v| (v - top).exp()).collect();
    let s: f64 = w.iter().sum();
    (top + s.ln(), w.into_iter().map(|v| v / s).collect())
}

struct Gibbs {
    log_z: f64,
    mean: f64,
    variance: f64,
}

fn gibbs(outcomes: &[f64], gamma: f64) -> Gibbs {
    let logs: Vec<f64> = outcomes.iter().map(|x| -gamma * x).collect();
    let (log_z, p) = log_sum_exp(&logs);
    let mean: f64 = p.iter().zip(outcomes).map(|(p, x)| p * x).sum();
    let variance = p.iter().zip(outcomes).map(|(p, x)| p * (x - mean).powi(2)).sum();
    Gibbs {
        log_z,
        mean,
        variance,
    }
}

/// Boltzmann model `e^{-γx}/Z` with mean `target_mean`.
///
/// The mean is strictly decreasing in `γ`; Newton steps are kept inside a
/// bracket and replaced by bisection when they leave it.
pub fn fit_boltzmann(outcomes: &[f64], target_mean: f64) -> Result<MaxEntModel> {
    let sorted = check_outcomes(outcomes)?;
    let (lo_x, hi_x) = (sorted[0], sorted[sorted.len() - 1]);
    if !(target_mean > lo_x && target_mean < hi_x) {
        return Err(Error::Infeasible(format!(
            "mean {target_mean} outside the open hull ({lo_x}, {hi_x})"
        )));
    }
    let spread = hi_x - lo_x;
    let residual = |g: f64| gibbs(&sorted, g).mean - target_mean;

    let mut lo = -1.0 / spread;
    let mut hi = 1.0 / spread;
    while residual(lo) < 0.0 {
        lo *= 2.0;
    }
    while residual(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut gamma = 0.0;
    let mut last = f64::INFINITY;
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let g = gibbs(&sorted, gamma);
        let r = g.mean - target_mean;
        last = r.abs();
        if r.abs() <= 1e-15 * spread.max(target_mean.abs()) || hi - lo <= 1e-16 * hi.abs().max(1.0) {
            break;
        }
        if r > 0.0 {
            lo = gamma;
        } else {
            hi = gamma;
        }
        let newton = gamma + r / g.variance;
        gamma = if newton > lo && newton < hi && g.variance > 0.0 {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    let g = gibbs(&sorted, gamma);
    if (g.mean - target_mean).abs() > RESIDUAL_TOL {
        return Err(Error::NoConvergence {
            iterations: MAX_NEWTON_ITERATIONS,
            residual: last,
        });
    }
    Ok(MaxEntModel {
        family: Family::Boltzmann {
            gamma,
            log_z: g.log_z,
        },
        entropy: g.log_z + gamma * g.mean,
        support: Support::Outcomes { outcomes: sorted },
    })
}

struct DualState {
    value: f64,
    log_z: f64,
    moments: DVector<f64>,
    covariance: DMatrix<f64>,
}

fn dual_state(features: &DMatrix<f64>, targets: &DVector<f64>, lambda: &DVector<f64>) -> DualState {
    let logits: Vec<f64> = (features * lambda).iter().copied().collect();
    let (log_z, p) = log_sum_exp(&logits);
    let p = DVector::from_vec(p);
    let moments = features.transpose() * &p;
    let centered = DMatrix::from_fn(features.nrows(), features.ncols(), |i, j| {
        features[(i, j)] - moments[j]
    });
    let weighted = DMatrix::from_fn(features.nrows(), features.ncols(), |i, j| {
        centered[(i, j)] * p[i]
    });
    let covariance = centered.transpose() * weighted;
    DualState {
        value: log_z - lambda.dot(targets),
        log_z,
        moments,
        covariance,
    }
}

/// Values of the dual objective at each accepted Newton iterate.
#[derive(Debug, Clone, Default)]
pub struct SolverTrace {
    pub dual_values: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Maximum-entropy model on `outcomes` with the given moment constraints.
pub fn fit_general_moments(
    outcomes: &[f64],
    constraints: &[MomentConstraint],
) -> Result<MaxEntModel> {
    fit_general_moments_traced(outcomes, constraints).map(|(m, _)| m)
}

/// Damped Newton on the convex dual `ln Z(λ) - λ·t`, starting from the
/// uniform distribution (`λ = 0`). Steps are halved until the dual
/// decreases.
pub fn fit_general_moments_traced(
    outcomes: &[f64],
    constraints: &[MomentConstraint],
) -> Result<(MaxEntModel, SolverTrace)> {
    let sorted = check_outcomes(outcomes)?;
    if let Some(c) = constraints.iter().find(|c| !c.target.is_finite()) {
        return Err(Error::Infeasible(format!("target {}", c.target)));
    }
    let n = constraints.len();
    let features = DMatrix::from_fn(sorted.len(), n, |i, j| constraints[j].function.eval(sorted[i]));
    let targets = DVector::from_iterator(n, constraints.iter().map(|c| c.target));
    let mut lambda = DVector::zeros(n);
    let mut state = dual_state(&features, &targets, &lambda);
    let mut trace = SolverTrace::default();
    let mut converged = false;
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let gradient = &state.moments - &targets;
        residual = gradient.amax();
        trace.dual_values.push(state.value);
        trace.residuals.push(residual);
        if residual <= RESIDUAL_TOL {
            converged = true;
            break;
        }
        let svd = state.covariance.clone().svd(true, true);
        let eps = 1e-14 * svd.singular_values.max().max(f64::MIN_POSITIVE);
        let step = match svd.solve(&gradient, eps) {
            Ok(s) => -s,
            Err(_) => break,
        };
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let candidate = &lambda + &step * scale;
            let next = dual_state(&features, &targets, &candidate);
            let slack = 1e-15 * state.value.abs().max(1.0);
            let next_residual = (&next.moments - &targets).amax();
            if next.value < state.value
                || (next.value <= state.value + slack && next_residual < residual)
            {
                accepted = Some((candidate, next));
                break;
            }
            scale *= 0.5;
        }
        match accepted {
            Some((l, s)) => {
                lambda = l;
                state = s;
            }
            None => break,
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: trace.residuals.len(),
            residual,
        });
    }
    let lambda0 = -state.log_z;
    let entropy = -lambda0 - lambda.dot(&state.moments);
    let mut lambdas = vec![lambda0];
    lambdas.extend(lambda.iter());
    let model = MaxEntModel {
        family: Family::GeneralMoment {
            lambdas,
            moments: constraints.iter().map(|c| c.function).collect(),
        },
        entropy,
        support: Support::Outcomes { outcomes: sorted },
    };
    Ok((model, trace))
}

/// Gaussian with the given mean and variance; entropy `½ ln(2πeσ²)`.
pub fn fit_gaussian(mean: f64, variance: f64) -> Result<MaxEntModel> {
    if !(variance > 0.0) || !variance.is_finite() || !mean.is_finite() {
        return Err(Error::Infeasible(format!("variance {variance}")));
    }
    Ok(MaxEntModel {
        family: Family::Gaussian { mean, variance },
        entropy: 0.5 * (2.0 * PI * E * variance).ln(),
        support: Support::RealLine,
    })
}

/// Gaussian matching the mean and variance of a line density.
pub fn fit_gaussian_to(f: &GriddedDensity) -> Result<MaxEntModel> {
    if f.topology() != Topology::Line {
        return Err(Error::UnsupportedFamily(
            "gaussian fit on a circle; use von Mises".into(),
        ));
    }
    fit_gaussian(f.mean(), f.variance())
}

/// Solves `I_1(κ)/I_0(κ) = r` by Newton steps safeguarded with bisection.
pub fn invert_bessel_ratio(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Infeasible(format!(
            "circular moment modulus {r} has no finite concentration"
        )));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while bessel_ratio(hi) < r {
        lo = hi;
        hi *= 2.0;
    }
    let mut kappa = 0.5 * (lo + hi);
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let a = bessel_ratio(kappa);
        let f = a - r;
        if f.abs() <= 1e-16 || hi - lo <= 1e-15 * hi {
            break;
        }
        if f > 0.0 {
            hi = kappa;
        } else {
            lo = kappa;
        }
        let slope = 1.0 - a / kappa - a * a;
        let newton = kappa - f / slope;
        kappa = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    let residual = (bessel_ratio(kappa) - r).abs();
    if residual > 1e-12 {
        return Err(Error::NoConvergence {
            iterations: MAX_NEWTON_ITERATIONS,
            residual,
        });
    }
    Ok(kappa)
}

/// Differential entropy `ln(2π I_0(κ)) - κ I_1(κ)/I_0(κ)` on the unit circle.
pub fn von_mises_entropy(kappa: f64) -> f64 {
    let i0e = bessel_i0e(kappa);
    (2.0 * PI).ln() + i0e.ln() + kappa - kappa * bessel_i1e(kappa) / i0e
}

/// Von Mises model from the first circular moment `<e^{iφ}>`.
pub fn fit_von_mises(first_circular_moment: Complex<f64>) -> Result<MaxEntModel> {
    fit_von_mises_on(first_circular_moment, 2.0 * PI)
}

/// Von Mises model on a circle of the given circumference; the moment is
/// `<e^{i 2π x / P}>`.
pub fn fit_von_mises_on(moment: Complex<f64>, circumference: f64) -> Result<MaxEntModel> {
    if !(circumference > 0.0) || !circumference.is_finite() {
        return Err(Error::InvalidParameter(format!("circumference {circumference}")));
    }
    let r = moment.norm();
    let kappa = invert_bessel_ratio(r)?;
    let mu = if r > 0.0 {
        moment.arg().rem_euclid(2.0 * PI)
    } else {
        0.0
    };
    Ok(MaxEntModel {
        family: Family::VonMises { kappa, mu },
        entropy: von_mises_entropy(kappa) + (circumference / (2.0 * PI)).ln(),
        support: Support::Circle { circumference },
    })
}

/// Discrete reference families selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscreteFamily {
    Uniform,
    /// Matches the mean.
    Boltzmann,
    /// Matches the first two power moments.
    Moments,
}

impl DiscreteFamily {
    /// Fits the family to the outcome set and moments of `p`.
    pub fn fit_to(self, p: &DiscreteDistribution) -> Result<MaxEntModel> {
        match self {
            DiscreteFamily::Uniform => fit_uniform(Support::Outcomes {
                outcomes: p.outcomes().to_vec(),
            }),
            DiscreteFamily::Boltzmann => fit_boltzmann(p.outcomes(), p.mean()),
            DiscreteFamily::Moments => fit_general_moments(
                p.outcomes(),
                &[
                    MomentConstraint::matching(MomentFunction::Power(1), p),
                    MomentConstraint::matching(MomentFunction::Power(2), p),
                ],
            ),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DiscreteFamily::Uniform => "uniform",
            DiscreteFamily::Boltzmann => "boltzmann",
            DiscreteFamily::Moments => "moments",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{differential_entropy, shannon_entropy};

    #[test]
    fn uniform_examples() {
        assert!((fit_uniform(Support::Count { size: 6 }).unwrap().entropy - 6f64.ln()).abs() < 1e-15);
        let circle = fit_uniform(Support::Circle {
            circumference: 2.0 * PI,
        })
        .unwrap();
        assert!((circle.entropy - 1.8379).abs() < 1e-4);
        let half = fit_uniform(Support::Interval { lo: 0.0, hi: 0.5 }).unwrap();
        assert!((half.entropy + 2f64.ln()).abs() < 1e-15);
        assert!(fit_uniform(Support::Count { size: 0 }).is_err());
        assert!(fit_uniform(Support::RealLine).is_err());

        let u = fit_uniform(Support::Count { size: 4 }).unwrap();
        assert_eq!(u.to_distribution(&[0.0, 1.0, 2.0, 3.0]).unwrap().probs(), &[0.25; 4]);
        assert!(u.to_distribution(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn boltzmann_examples() {
        let flat = fit_boltzmann(&[0.0, 1.0, 2.0], 1.0).unwrap();
        let Family::Boltzmann { gamma, .. } = flat.family else {
            panic!()
        };
        assert!(gamma.abs() < 1e-14);
        assert!((flat.entropy - 3f64.ln()).abs() < 1e-14);

        let e = (-1.0f64).exp();
        let two = fit_boltzmann(&[0.0, 1.0], e / (1.0 + e)).unwrap();
        let Family::Boltzmann { gamma, .. } = two.family else {
            panic!()
        };
        assert!((gamma - 1.0).abs() < 1e-10);
        let p = two.to_distribution(&[0.0, 1.0]).unwrap();
        assert!((p.probs()[0] - 0.7311).abs() < 1e-4);
        assert!((p.probs()[0] - 1.0 / (1.0 + e)).abs() < 1e-12);

        let peaked = fit_boltzmann(&[0.0, 1.0, 2.0], 1.999).unwrap();
        let p = peaked.to_distribution(&[0.0, 1.0, 2.0]).unwrap();
        assert!((p.mean() - 1.999).abs() < 1e-10);
        assert!(p.probs()[2] > 0.998);
        assert!((shannon_entropy(&p) - peaked.entropy).abs() < 1e-12);
        assert!(peaked.entropy < 0.01);

        assert!(matches!(fit_boltzmann(&[0.0, 1.0], 1.0), Err(Error::Infeasible(_))));
        assert!(matches!(fit_boltzmann(&[0.0, 1.0], -0.5), Err(Error::Infeasible(_))));
    }

    #[test]
    fn general_moments_uniform_case() {
        let c = [
            MomentConstraint::new(MomentFunction::Power(1), 0.0),
            MomentConstraint::new(MomentFunction::Power(2), 2.0 / 3.0),
        ];
        let model = fit_general_moments(&[-1.0, 0.0, 1.0], &c).unwrap();
        let p = model.to_distribution(&[-1.0, 0.0, 1.0]).unwrap();
        for x in p.probs() {
            assert!((x - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!((model.entropy - 3f64.ln()).abs() < 1e-12);
    }

    /// Symmetric targets force `λ₁ = 0`; the remaining one-dimensional
    /// problem is solved here by bisection on `⟨m²⟩(λ₂)`.
    #[test]
    fn discrete_gaussian_matches_bisection_oracle() {
        let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let second = |l2: f64| {
            let w: Vec<f64> = xs.iter().map(|x: &f64| (l2 * x * x).exp()).collect();
            let z: f64 = w.iter().sum();
            (xs.iter().zip(&w).map(|(x, w)| w * x * x).sum::<f64>() / z, z)
        };
        let (mut lo, mut hi) = (-5.0, 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if second(mid).0 > 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let l2 = 0.5 * (lo + hi);
        let l0 = -second(l2).1.ln();
        assert!((l2 + 0.447939867307013750).abs() < 1e-12);

        let c = [
            MomentConstraint::new(MomentFunction::Power(1), 0.0),
            MomentConstraint::new(MomentFunction::Power(2), 1.0),
        ];
        let model = fit_general_moments(&xs, &c).unwrap();
        let Family::GeneralMoment { lambdas, .. } = &model.family else {
            panic!()
        };
        assert!(lambdas[1].abs() < 1e-10);
        assert!((lambdas[2] - l2).abs() < 1e-9);
        assert!((lambdas[0] - l0).abs() < 1e-9);
        assert!((model.entropy - (-l0 - l2)).abs() < 1e-9);
        assert!((model.entropy - 1.40775723691541925).abs() < 1e-9);
    }

    #[test]
    fn general_moments_reduce_to_boltzmann() {
        let outcomes = [0.0, 1.0, 2.5, 4.0];
        for i in 0..20 {
            let target = 0.2 + 3.6 * i as f64 / 19.0;
            let b = fit_boltzmann(&outcomes, target).unwrap();
            let g = fit_general_moments(
                &outcomes,
                &[MomentConstraint::new(MomentFunction::Power(1), target)],
            )
            .unwrap();
            let (Family::Boltzmann { gamma, .. }, Family::GeneralMoment { lambdas, .. }) =
                (&b.family, &g.family)
            else {
                panic!()
            };
            assert!((gamma + lambdas[1]).abs() < 1e-8);
            let pb = b.to_distribution(&outcomes).unwrap();
            let pg = g.to_distribution(&outcomes).unwrap();
            for (x, y) in pb.probs().iter().zip(pg.probs()) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn general_moments_infeasible_target() {
        let c = [MomentConstraint::new(MomentFunction::Power(1), 3.0)];
        assert!(matches!(
            fit_general_moments(&[0.0, 1.0, 2.0], &c),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn dual_decreases_monotonically() {
        let c = [
            MomentConstraint::new(MomentFunction::Power(1), 1.3),
            MomentConstraint::new(MomentFunction::Power(2), 3.1),
            MomentConstraint::new(MomentFunction::Cos, 0.1),
        ];
        let (_, trace) = fit_general_moments_traced(&[-1.0, 0.0, 1.0, 2.0, 3.0], &c).unwrap();
        for w in trace.dual_values.windows(2) {
            assert!(w[1] <= w[0] + 1e-14);
        }
        assert!(*trace.residuals.last().unwrap() <= RESIDUAL_TOL);
    }

    #[test]
    fn gaussian_examples() {
        let g = fit_gaussian(0.0, 1.0).unwrap();
        assert!((g.entropy - 1.4189385332046727).abs() < 1e-15);
        let zero = fit_gaussian(0.0, 1.0 / (2.0 * PI * E)).unwrap();
        assert!(zero.entropy.abs() < 1e-15);
        let a = fit_gaussian(0.0, 0.7).unwrap();
        let b = fit_gaussian(0.0, 4.0 * 0.7).unwrap();
        assert!((b.entropy - a.entropy - 2f64.ln()).abs() < 1e-15);
        assert!(fit_gaussian(0.0, 0.0).is_err());
        assert!(fit_gaussian(0.0, -1.0).is_err());
    }

    #[test]
    fn gaussian_rendering_needs_coverage() {
        let g = fit_gaussian(0.0, 1.0).unwrap();
        let wide = Grid::line(-10.0, 0.01, 2001).unwrap();
        let f = g.to_density(&wide).unwrap();
        assert!((f.integral() - 1.0).abs() < 1e-9);
        assert!((differential_entropy(&f) - g.entropy).abs() < 1e-7);
        let narrow = Grid::line(-3.0, 0.01, 601).unwrap();
        assert!(matches!(g.to_density(&narrow), Err(Error::InadequateGrid(_))));
        assert!(g.to_distribution(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn von_mises_examples() {
        let flat = fit_von_mises(Complex::new(0.0, 0.0)).unwrap();
        let Family::VonMises { kappa, .. } = flat.family else {
            panic!()
        };
        assert_eq!(kappa, 0.0);
        assert!((flat.entropy - (2.0 * PI).ln()).abs() < 1e-15);
        let density = flat.to_density(&Grid::circle(0.0, 16).unwrap()).unwrap();
        for v in density.values() {
            assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-15);
        }

        // I₁(1)/I₀(1) from the power series of the Bessel functions.
        let series = |nu: i32| {
            (0..30)
                .map(|k| {
                    let fact = |n: i32| (1..=n).map(f64::from).product::<f64>();
                    0.5f64.powi(2 * k + nu) / (fact(k) * fact(k + nu))
                })
                .sum::<f64>()
        };
        let r = series(1) / series(0);
        let m = Complex::from_polar(r, 0.7);
        let model = fit_von_mises(m).unwrap();
        let Family::VonMises { kappa, mu } = model.family else {
            panic!()
        };
        assert!((kappa - 1.0).abs() < 1e-10);
        assert!((mu - 0.7).abs() < 1e-14);
        assert!((crate::special::bessel_ratio(kappa) - r).abs() <= 1e-12);

        let grid = Grid::circle(0.0, 4096).unwrap();
        let f = model.to_density(&grid).unwrap();
        assert!((differential_entropy(&f) - model.entropy).abs() < 1e-8);
        assert!((model.entropy - 1.62740145901998963).abs() < 1e-12);

        assert!(matches!(
            fit_von_mises(Complex::new(1.0, 0.0)),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn von_mises_extreme_concentration() {
        for r in [1e-9, 0.5, 0.9, 0.999, 0.999999] {
            let k = invert_bessel_ratio(r).unwrap();
            assert!((crate::special::bessel_ratio(k) - r).abs() <= 1e-12);
        }
    }

    #[test]
    fn model_json_roundtrip() {
        let models = [
            fit_boltzmann(&[0.0, 1.0, 3.0], 1.2).unwrap(),
            fit_von_mises(Complex::new(0.3, -0.2)).unwrap(),
            fit_uniform(Support::Count { size: 3 }).unwrap(),
            fit_general_moments(
                &[0.0, 1.0, 2.0],
                &[MomentConstraint::new(MomentFunction::Power(1), 0.4)],
            )
            .unwrap(),
        ];
        for m in models {
            let text = m.to_json().unwrap();
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert!(v.get("family").is_some() && v.get("parameters").is_some());
            assert_eq!(MaxEntModel::from_json(&text).unwrap(), m);
        }
    }
}
