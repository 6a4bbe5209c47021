//! Angle and angular momentum of a spin-`J` system.
//!
//! Angle states `|φ⟩ = (2J+1)^{-1/2} Σ_m e^{-imφ} |m⟩` are overcomplete; the
//! `2J+1` equally spaced ones form an orthonormal basis that is mutually
//! unbiased with `{|m⟩}`. The continuous angle is measured as a POVM with
//! density `p(φ) = (2J+1)/(2π) ⟨φ|ρ|φ⟩`.
//!
//! `φ` is not reduced modulo `2π`: for half-integer `J` the state picks up a
//! sign under `φ -> φ + 2π`, and keeping it makes the shift relation exact.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{shannon_entropy, differential_entropy, Grid, GriddedDensity};
use crate::error::{Error, Result};
use crate::maxent::{
    fit_general_moments, fit_uniform, fit_von_mises_on, MaxEntModel, MomentConstraint,
    MomentFunction, Support,
};
use crate::quantum::{
    max_overlap_povm, max_overlap_pvm, measure_projective, von_neumann_entropy, CMatrix,
    CVector, DensityMatrix, OrthonormalBasis, Povm, C64,
};
use crate::reur::{
    evaluate_reur_sides, RelationId, ReurReport, Side, CONTINUOUS_TOL, DISCRETE_TOL,
};

/// Spin `J = two_j / 2` with angle offset `θ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularSystem {
    pub two_j: u32,
    pub theta0: f64,
}

impl AngularSystem {
    pub fn new(two_j: u32) -> Self {
        Self { two_j, theta0: 0.0 }
    }

    pub fn with_theta0(two_j: u32, theta0: f64) -> Result<Self> {
        if !(0.0..2.0 * PI).contains(&theta0) {
            return Err(Error::InvalidParameter(format!("theta0 {theta0} outside [0, 2π)")));
        }
        Ok(Self { two_j, theta0 })
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// `m = -J, ..., J`.
    pub fn m_values(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| (2 * i as i64 - self.two_j as i64) as f64 / 2.0)
            .collect()
    }

    /// `θ_j = θ₀ + 2πj/(2J+1)`.
    pub fn discrete_angles(&self) -> Vec<f64> {
        let d = self.dim() as f64;
        (0..self.dim())
            .map(|j| self.theta0 + 2.0 * PI * j as f64 / d)
            .collect()
    }

    /// `|m⟩` basis labelled by `m / scale`.
    pub fn momentum_basis(&self, scale: f64) -> Result<OrthonormalBasis> {
        OrthonormalBasis::computational(self.dim())?
            .with_labels(self.m_values().into_iter().map(|m| m / scale).collect())
    }

    /// `L_z = diag(m)`.
    pub fn lz(&self) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            self.dim(),
            self.m_values().into_iter().map(|m| C64::new(m, 0.0)),
        ))
    }

    /// `e^{-iφ' L_z}`.
    pub fn rotation(&self, phi: f64) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            self.dim(),
            self.m_values().into_iter().map(|m| C64::from_polar(1.0, -m * phi)),
        ))
    }
}

pub fn angle_state(sys: &AngularSystem, phi: f64) -> CVector {
    let norm = 1.0 / (sys.dim() as f64).sqrt();
    CVector::from_iterator(
        sys.dim(),
        sys.m_values().into_iter().map(|m| C64::from_polar(norm, -m * phi)),
    )
}

/// `⟨φ'|φ⟩ = sin((J+½)Δ) / ((2J+1) sin(Δ/2))` with `Δ = φ' - φ`.
pub fn angle_overlap(sys: &AngularSystem, phi: f64, varphi: f64) -> C64 {
    let delta = varphi - phi;
    let turns = (delta / (2.0 * PI)).round();
    let r = delta - 2.0 * PI * turns;
    let sign = if sys.two_j % 2 == 1 && (turns as i64).rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    };
    let j = sys.j();
    let d = sys.dim() as f64;
    let value = if r.abs() < 1e-6 {
        1.0 - j * (j + 1.0) * r * r / 6.0
    } else {
        ((j + 0.5) * r).sin() / (d * (0.5 * r).sin())
    };
    C64::new(sign * value, 0.0)
}

/// Orthonormal basis of the angle states at `θ_j`.
pub fn discrete_angle_basis(sys: &AngularSystem) -> Result<OrthonormalBasis> {
    let angles = sys.discrete_angles();
    let columns: Vec<CVector> = angles.iter().map(|&t| angle_state(sys, t)).collect();
    OrthonormalBasis::new(CMatrix::from_columns(&columns), angles)
}

/// `max |(2J+1)/n Σ_i |φ_i⟩⟨φ_i| - 𝟙|` for `n` equally spaced angles from `θ₀`.
pub fn completeness_residual(sys: &AngularSystem, points: usize) -> f64 {
    let d = sys.dim();
    let mut acc = CMatrix::zeros(d, d);
    for i in 0..points {
        let v = angle_state(sys, sys.theta0 + 2.0 * PI * i as f64 / points as f64);
        acc += &v * v.adjoint();
    }
    acc *= C64::new(d as f64 / points as f64, 0.0);
    (acc - CMatrix::identity(d, d))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Minimum quadrature size for exact angular integration.
pub fn min_quadrature_points(sys: &AngularSystem) -> usize {
    sys.dim() + 1
}

/// Rectangle-rule completeness check; exact once `points >= 2J+2`.
pub fn verify_completeness(sys: &AngularSystem, points: usize) -> Result<f64> {
    let needed = min_quadrature_points(sys);
    if points < needed {
        return Err(Error::TooFewPoints {
            got: points,
            needed,
        });
    }
    Ok(completeness_residual(sys, points))
}

/// `p(φ) = (2J+1)/(2π) ⟨φ|ρ|φ⟩` on `points` angles starting at `θ₀`.
pub fn angle_povm_density(
    rho: &DensityMatrix,
    sys: &AngularSystem,
    points: usize,
) -> Result<GriddedDensity> {
    if rho.dim() != sys.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sys.dim()));
    }
    let needed = min_quadrature_points(sys);
    if points < needed {
        return Err(Error::TooFewPoints {
            got: points,
            needed,
        });
    }
    let grid = Grid::circle(sys.theta0, points)?;
    let scale = sys.dim() as f64 / (2.0 * PI);
    let values = grid
        .points()
        .map(|phi| (scale * rho.expectation_in(&angle_state(sys, phi))).max(0.0))
        .collect();
    GriddedDensity::new(grid, values)
}

/// Incompatibility of the continuous angle POVM with `{|m⟩}` in the density
/// convention. A discretized POVM `(2J+1)/n |φ_i⟩⟨φ_i|` has `c = 1/n`; dividing
/// by the cell width `2π/n` gives `1/(2π)` for every `J`.
pub fn angle_povm_incompatibility(sys: &AngularSystem) -> Result<f64> {
    let n = min_quadrature_points(sys);
    let weight = C64::new(sys.dim() as f64 / n as f64, 0.0);
    let elements = (0..n)
        .map(|i| {
            let v = angle_state(sys, sys.theta0 + 2.0 * PI * i as f64 / n as f64);
            (&v * v.adjoint()) * weight
        })
        .collect();
    let labels = (0..n).map(|i| i as f64).collect();
    let povm = Povm::new(elements, labels)?;
    let c = max_overlap_povm(&povm, &Povm::from_basis(&sys.momentum_basis(1.0)?))?;
    Ok(c * n as f64 / (2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleFamily {
    Uniform,
    VonMises,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumFamily {
    Uniform,
    /// Discrete Gaussian in `m`, fixing `⟨m⟩` and `⟨m²⟩`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularMode {
    DiscretePvm,
    ContinuousPovm,
}

/// Inputs of one angle/angular-momentum evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularExperiment {
    pub angle_family: AngleFamily,
    pub momentum_family: MomentumFamily,
    pub mode: AngularMode,
    /// Length scale: `x = Rφ` and `k = m/R`.
    pub scale_r: f64,
    /// Angle grid size in continuous mode.
    pub grid_points: usize,
}

impl Default for AngularExperiment {
    fn default() -> Self {
        Self {
            angle_family: AngleFamily::Uniform,
            momentum_family: MomentumFamily::Uniform,
            mode: AngularMode::DiscretePvm,
            scale_r: 1.0,
            grid_points: 4096,
        }
    }
}

fn momentum_model(family: MomentumFamily, q: &crate::entropy::DiscreteDistribution) -> Result<MaxEntModel> {
    match family {
        MomentumFamily::Uniform => fit_uniform(Support::Count { size: q.len() }),
        MomentumFamily::Gaussian => fit_general_moments(
            q.outcomes(),
            &[
                MomentConstraint::matching(MomentFunction::Power(1), q),
                MomentConstraint::matching(MomentFunction::Power(2), q),
            ],
        ),
    }
}

/// Evaluates the relative-entropy relation for the angle and `L_z`, fitting
/// both reference models to the measured distributions of `rho`.
///
/// Discrete mode measures the angle basis (`c = 1/(2J+1)`); continuous mode
/// uses the angle density with `c = 1/(2πR)` and differential divergences.
pub fn reur_angular_experiment(
    sys: &AngularSystem,
    rho: &DensityMatrix,
    exp: &AngularExperiment,
) -> Result<ReurReport> {
    if rho.dim() != sys.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sys.dim()));
    }
    let r = exp.scale_r;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("scale_R = {r}")));
    }
    let m_basis = sys.momentum_basis(r)?;
    let q = measure_projective(rho, &m_basis)?;
    let q_model = momentum_model(exp.momentum_family, &q)?;
    let s_rho = von_neumann_entropy(rho);
    let report = match exp.mode {
        AngularMode::DiscretePvm => {
            let basis = discrete_angle_basis(sys)?;
            let p = measure_projective(rho, &basis)?;
            let p_model = match exp.angle_family {
                AngleFamily::Uniform => fit_uniform(Support::Count { size: p.len() })?,
                AngleFamily::VonMises => fit_general_moments(
                    p.outcomes(),
                    &[
                        MomentConstraint::matching(MomentFunction::Cos, &p),
                        MomentConstraint::matching(MomentFunction::Sin, &p),
                    ],
                )?,
            };
            let c = max_overlap_pvm(&basis, &m_basis)?;
            evaluate_reur_sides(
                Side::Discrete(&p, &p_model),
                Side::Discrete(&q, &q_model),
                c,
                s_rho,
                RelationId::ReurDiscrete,
                DISCRETE_TOL,
            )?
        }
        AngularMode::ContinuousPovm => {
            let density = angle_povm_density(rho, sys, exp.grid_points)?;
            let period = 2.0 * PI * r;
            let grid = Grid::periodic(r * sys.theta0, period, exp.grid_points)?;
            let f = GriddedDensity::new(grid, density.values().iter().map(|v| v / r).collect())?;
            let p_model = match exp.angle_family {
                AngleFamily::Uniform => fit_uniform(Support::Circle {
                    circumference: period,
                })?,
                AngleFamily::VonMises => fit_von_mises_on(f.circular_moment()?, period)?,
            };
            let c = angle_povm_incompatibility(sys)? / r;
            evaluate_reur_sides(
                Side::Continuous(&f, &p_model),
                Side::Discrete(&q, &q_model),
                c,
                s_rho,
                RelationId::ReurContinuous,
                CONTINUOUS_TOL,
            )?
        }
    };
    let mut fingerprint = report.fingerprint.clone();
    fingerprint.dim = Some(sys.dim());
    Ok(report.with_fingerprint(fingerprint))
}

/// States indexed by `J` for continuum sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StateFamily {
    /// Pure phase state with amplitudes `∝ exp(-m²/(4 s²))`: a fixed angular
    /// width of about `1/(2s)` once `J >> s`.
    Phase { width: f64 },
    MaximallyMixed,
}

impl StateFamily {
    pub fn state(&self, sys: &AngularSystem) -> Result<DensityMatrix> {
        match *self {
            StateFamily::Phase { width } => {
                if !(width > 0.0) {
                    return Err(Error::InvalidParameter(format!("width {width}")));
                }
                let amps: Vec<C64> = sys
                    .m_values()
                    .into_iter()
                    .map(|m| C64::new((-m * m / (4.0 * width * width)).exp(), 0.0))
                    .collect();
                let psi = CVector::from_vec(amps);
                let norm = psi.norm();
                DensityMatrix::pure(&psi.unscale(norm))
            }
            StateFamily::MaximallyMixed => DensityMatrix::maximally_mixed(sys.dim()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            StateFamily::Phase { width } => format!("phase(width={width})"),
            StateFamily::MaximallyMixed => "maximally_mixed".into(),
        }
    }
}

/// One `J` of a continuum sweep, with uniform reference models in both modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub two_j: u32,
    pub discrete: ReurReport,
    pub continuous: ReurReport,
    /// `S(p_j) + ln δθ` with `δθ = 2π/(2J+1)`.
    pub corrected_discrete_entropy: f64,
    pub continuous_entropy: f64,
    /// `|lhs_discrete - lhs_continuous|`; with uniform models this equals the
    /// corrected-entropy difference.
    pub lhs_difference: f64,
    pub completeness_residual: f64,
}

/// Discrete and continuous evaluations per `J`, computed in parallel and
/// returned in input order.
pub fn continuum_sweep(
    family: StateFamily,
    two_j_values: &[u32],
    grid_points: usize,
) -> Result<Vec<SweepRow>> {
    two_j_values
        .par_iter()
        .map(|&two_j| {
            let sys = AngularSystem::new(two_j);
            let rho = family.state(&sys)?;
            let mut exp = AngularExperiment {
                grid_points,
                ..AngularExperiment::default()
            };
            let discrete = reur_angular_experiment(&sys, &rho, &exp)?;
            exp.mode = AngularMode::ContinuousPovm;
            let continuous = reur_angular_experiment(&sys, &rho, &exp)?;
            let p = measure_projective(&rho, &discrete_angle_basis(&sys)?)?;
            let delta = 2.0 * PI / sys.dim() as f64;
            let corrected = shannon_entropy(&p) + delta.ln();
            let density = angle_povm_density(&rho, &sys, grid_points)?;
            Ok(SweepRow {
                two_j,
                lhs_difference: (discrete.lhs - continuous.lhs).abs(),
                discrete,
                continuous,
                corrected_discrete_entropy: corrected,
                continuous_entropy: differential_entropy(&density),
                completeness_residual: completeness_residual(&sys, min_quadrature_points(&sys)),
            })
        })
        .collect()
}
