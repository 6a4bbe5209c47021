//! Position/momentum pipeline: wavefunctions on a symmetric grid, their
//! momentum densities, and the continuous relations.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rustfft::FftPlanner;
use serde::Serialize;

use super::{evaluate_reur_sides, RelationId, ReurReport, Side, Term, CONTINUOUS_TOL};
use crate::entropy::{Grid, GriddedDensity, Topology};
use crate::error::{Error, Result};
use crate::maxent::{fit_gaussian_to, relative_entropy_to_model, Family, MaxEntModel};
use crate::quantum::{thermal_state, von_neumann_entropy, CMatrix, C64};

pub const WAVEFUNCTION_NORM_TOL: f64 = 1e-8;
/// Largest probability allowed in the outer sixteenth of the grid on each side.
pub const TAIL_MASS_TOL: f64 = 1e-9;
pub const THERMAL_LEVELS: usize = 64;

/// Amplitudes `ψ(x_j)` on `x_j = (j - N/2) δ` with `N` a power of two.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    grid: Grid,
    amplitudes: Vec<C64>,
}

impl WaveFunction {
    /// Grid of `n` points whose momentum grid has the same spacing,
    /// `δ = sqrt(2π/n)`.
    pub fn symmetric_grid(n: usize) -> Result<Grid> {
        let delta = (2.0 * PI / n as f64).sqrt();
        Grid::line(-((n / 2) as f64) * delta, delta, n)
    }

    pub fn new(grid: Grid, amplitudes: Vec<C64>) -> Result<Self> {
        let n = grid.len;
        if grid.topology != Topology::Line || !n.is_power_of_two() || n < 4 {
            return Err(Error::InvalidParameter(format!(
                "wavefunction grid needs a power-of-two line grid, got {n} points"
            )));
        }
        let centered = -((n / 2) as f64) * grid.spacing;
        if (grid.start - centered).abs() > 1e-12 * centered.abs() {
            return Err(Error::InvalidParameter(
                "wavefunction grid must be symmetric about 0".into(),
            ));
        }
        if amplitudes.len() != n {
            return Err(Error::DimensionMismatch(amplitudes.len(), n));
        }
        let psi = Self { grid, amplitudes };
        let norm = psi.norm_sqr();
        if (norm - 1.0).abs() > WAVEFUNCTION_NORM_TOL {
            return Err(Error::Unnormalized(norm));
        }
        Ok(psi)
    }

    /// Samples `f` and normalizes the result.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> C64) -> Result<Self> {
        let mut amplitudes: Vec<C64> = grid.points().map(f).collect();
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.spacing;
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Unnormalized(norm));
        }
        let scale = norm.sqrt();
        amplitudes.iter_mut().for_each(|a| *a /= scale);
        Self::new(grid, amplitudes)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `Σ |ψ_j|² δ`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.spacing
    }

    /// `ψ̂(k) = (2π)^{-1/2} ∫ ψ(x) e^{-ikx} dx` on `k_l = (l - N/2) Δk`,
    /// `Δk = 2π/(Nδ)`.
    pub fn momentum(&self) -> Result<(Grid, Vec<C64>)> {
        let n = self.grid.len;
        let delta = self.grid.spacing;
        let dk = 2.0 * PI / (n as f64 * delta);
        let sign = |j: usize| if j % 2 == 0 { 1.0 } else { -1.0 };
        let mut buf: Vec<C64> = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(j, a)| a * sign(j))
            .collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let scale = delta / (2.0 * PI).sqrt();
        let out = buf
            .into_iter()
            .enumerate()
            .map(|(l, v)| v * (scale * sign(l)))
            .collect();
        Ok((Grid::line(-((n / 2) as f64) * dk, dk, n)?, out))
    }
}

fn check_tails(values: &[f64], spacing: f64) -> Result<()> {
    let edge = values.len() / 16;
    let n = values.len();
    let mass: f64 = values[..edge].iter().chain(&values[n - edge..]).sum::<f64>() * spacing;
    if mass > TAIL_MASS_TOL {
        return Err(Error::InadequateGrid(mass));
    }
    Ok(())
}

fn amplitude_density(grid: Grid, amplitudes: &[C64]) -> Result<GriddedDensity> {
    let values: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    check_tails(&values, grid.spacing)?;
    GriddedDensity::new(grid, values)
}

/// Position and momentum densities `|ψ(x)|²` and `|ψ̂(k)|²`.
pub fn wavefunction_to_densities(psi: &WaveFunction) -> Result<(GriddedDensity, GriddedDensity)> {
    let (k_grid, phi) = psi.momentum()?;
    Ok((
        amplitude_density(*psi.grid(), psi.amplitudes())?,
        amplitude_density(k_grid, &phi)?,
    ))
}

/// Densities of the mixture `Σ w_i |ψ_i⟩⟨ψ_i|` of states on one grid.
pub fn mixture_densities(
    weights: &[f64],
    states: &[WaveFunction],
) -> Result<(GriddedDensity, GriddedDensity)> {
    if weights.len() != states.len() || states.is_empty() {
        return Err(Error::DimensionMismatch(weights.len(), states.len()));
    }
    let n = states[0].grid.len;
    let mut fx = vec![0.0; n];
    let mut gk = vec![0.0; n];
    let mut k_grid = None;
    for (w, psi) in weights.iter().zip(states) {
        if !psi.grid.matches(&states[0].grid) {
            return Err(Error::GridMismatch);
        }
        let (kg, phi) = psi.momentum()?;
        k_grid = Some(kg);
        for j in 0..n {
            fx[j] += w * psi.amplitudes[j].norm_sqr();
            gk[j] += w * phi[j].norm_sqr();
        }
    }
    let x_grid = states[0].grid;
    let k_grid = k_grid.expect("at least one state");
    check_tails(&fx, x_grid.spacing)?;
    check_tails(&gk, k_grid.spacing)?;
    Ok((
        GriddedDensity::new(x_grid, fx)?,
        GriddedDensity::new(k_grid, gk)?,
    ))
}

/// Oscillator eigenfunctions `ψ_0..ψ_{levels-1}` at `x`, by the stable
/// three-term recurrence.
fn hermite_functions(levels: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(levels);
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for n in 0..levels {
        out.push(cur);
        let next = (2.0 / (n + 1) as f64).sqrt() * x * cur - (n as f64 / (n + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    out
}

/// Normalized oscillator eigenfunction `ψ_n(x)`.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    hermite_functions(n + 1, x)[n]
}

/// Named states for the continuous pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// Oscillator ground state, `σ_x = σ_k = 1/√2`.
    Gaussian,
    /// Ground state stretched by `alpha` in position.
    Squeezed { alpha: f64 },
    /// Oscillator eigenstate `ψ_n`.
    Hermite { n: usize },
    /// Even superposition of ground states centered at `±separation/2`.
    GaussianSuperposition { separation: f64 },
    /// Truncated oscillator Gibbs state over the lowest levels.
    Thermal { beta: f64 },
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Gaussian => write!(f, "gaussian"),
            Preset::Squeezed { alpha } => write!(f, "squeezed({alpha})"),
            Preset::Hermite { n } => write!(f, "hermite-{n}"),
            Preset::GaussianSuperposition { separation } => {
                write!(f, "gaussian-superposition({separation})")
            }
            Preset::Thermal { beta } => write!(f, "thermal({beta})"),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    /// Accepts `gaussian`, `squeezed(4)`, `hermite-1`,
    /// `gaussian-superposition` (optionally `(separation)`), `thermal(0.5)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, arg) = match s.split_once('(') {
            Some((name, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(|| bad_preset(&s))?;
                let value: f64 = inner.trim().parse().map_err(|_| bad_preset(&s))?;
                (name.to_string(), Some(value))
            }
            None => (s.clone(), None),
        };
        if let Some(n) = name.strip_prefix("hermite-") {
            if arg.is_some() {
                return Err(bad_preset(&s));
            }
            let n = n.parse().map_err(|_| bad_preset(&s))?;
            return Ok(Preset::Hermite { n });
        }
        let preset = match (name.as_str(), arg) {
            ("gaussian", None) => Preset::Gaussian,
            ("squeezed", Some(alpha)) => Preset::Squeezed { alpha },
            ("gaussian-superposition", separation) => Preset::GaussianSuperposition {
                separation: separation.unwrap_or(4.0),
            },
            ("thermal", Some(beta)) => Preset::Thermal { beta },
            _ => return Err(bad_preset(&s)),
        };
        preset.validate()?;
        Ok(preset)
    }
}

fn bad_preset(s: &str) -> Error {
    Error::InvalidParameter(format!("unknown preset '{s}'"))
}

impl Preset {
    fn validate(&self) -> Result<()> {
        match *self {
            Preset::Squeezed { alpha } if !(alpha > 0.0) || !alpha.is_finite() => {
                Err(Error::InvalidParameter(format!("squeeze factor {alpha}")))
            }
            Preset::Thermal { beta } if !(beta > 0.0) || !beta.is_finite() => {
                Err(Error::InvalidParameter(format!("beta {beta}")))
            }
            Preset::GaussianSuperposition { separation } if !separation.is_finite() => {
                Err(Error::InvalidParameter(format!("separation {separation}")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_pure(&self) -> bool {
        !matches!(self, Preset::Thermal { .. })
    }

    pub fn wavefunction(&self, grid: Grid) -> Result<WaveFunction> {
        self.validate()?;
        let ground = |x: f64| (-0.5 * x * x).exp();
        match *self {
            Preset::Gaussian => WaveFunction::from_fn(grid, |x| C64::new(ground(x), 0.0)),
            Preset::Squeezed { alpha } => {
                WaveFunction::from_fn(grid, |x| C64::new(ground(x / alpha), 0.0))
            }
            Preset::Hermite { n } => {
                WaveFunction::from_fn(grid, |x| C64::new(hermite_function(n, x), 0.0))
            }
            Preset::GaussianSuperposition { separation } => {
                let a = 0.5 * separation;
                WaveFunction::from_fn(grid, |x| C64::new(ground(x - a) + ground(x + a), 0.0))
            }
            Preset::Thermal { .. } => Err(Error::InvalidParameter(
                "a thermal state has no single wavefunction".into(),
            )),
        }
    }

    /// Position density, momentum density and `S(ρ)` on an `n`-point grid.
    pub fn densities(&self, n: usize) -> Result<(GriddedDensity, GriddedDensity, f64)> {
        let grid = WaveFunction::symmetric_grid(n)?;
        match *self {
            Preset::Thermal { beta } => {
                let h = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(THERMAL_LEVELS, |i, _| {
                    C64::new(i as f64 + 0.5, 0.0)
                }));
                let rho = thermal_state(&h, beta)?;
                let weights: Vec<f64> = (0..THERMAL_LEVELS).map(|i| rho.matrix()[(i, i)].re).collect();
                let table: Vec<Vec<f64>> = grid.points().map(|x| hermite_functions(THERMAL_LEVELS, x)).collect();
                let states = (0..THERMAL_LEVELS)
                    .map(|level| {
                        WaveFunction::from_fn(grid, |x| {
                            let j = ((x - grid.start) / grid.spacing).round() as usize;
                            C64::new(table[j][level], 0.0)
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let (f, g) = mixture_densities(&weights, &states)?;
                Ok((f, g, von_neumann_entropy(&rho)))
            }
            _ => {
                let (f, g) = wavefunction_to_densities(&self.wavefunction(grid)?)?;
                Ok((f, g, 0.0))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuousVariant {
    /// `S(f‖f_max) + S(g‖g_max) <= ln 2 + ln(σ_x σ_k)`, pure states.
    Birula,
    /// `S(f‖f_max) + S(g‖g_max) <= 1 + ln(σ_x σ_k) - S(ρ)`.
    FrankLieb,
}

fn gaussian_moments(model: &MaxEntModel) -> Result<()> {
    match model.family {
        Family::Gaussian { .. } => Ok(()),
        _ => Err(Error::UnsupportedFamily(format!(
            "{} where a gaussian model is required",
            model.family_name()
        ))),
    }
}

/// Continuous relation with Gaussian reference models.
pub fn evaluate_reur_continuous(
    f: &GriddedDensity,
    g: &GriddedDensity,
    s_rho: f64,
    model_f: &MaxEntModel,
    model_g: &MaxEntModel,
    variant: ContinuousVariant,
) -> Result<ReurReport> {
    gaussian_moments(model_f)?;
    gaussian_moments(model_g)?;
    if !(s_rho >= 0.0) {
        return Err(Error::InvalidParameter(format!("S(rho) = {s_rho}")));
    }
    let c = 1.0 / (2.0 * PI);
    match variant {
        ContinuousVariant::FrankLieb => evaluate_reur_sides(
            Side::Continuous(f, model_f),
            Side::Continuous(g, model_g),
            c,
            s_rho,
            RelationId::FrankLieb,
            CONTINUOUS_TOL,
        ),
        ContinuousVariant::Birula => {
            let lhs = vec![
                Term::new("S(p||p_max)", relative_entropy_to_model(f, model_f)?),
                Term::new("S(q||q_max)", relative_entropy_to_model(g, model_g)?),
            ];
            let rhs = vec![
                Term::new("S(p_max)", model_f.entropy),
                Term::new("S(q_max)", model_g.entropy),
                Term::new("-(1+ln(pi))", -(1.0 + PI.ln())),
            ];
            Ok(ReurReport::new(RelationId::Birula, lhs, rhs, c, CONTINUOUS_TOL)
                .with_trivial_bound(model_f.entropy + model_g.entropy))
        }
    }
}

/// Frank-Lieb form with Gaussians fitted to `f` and `g`.
pub fn evaluate_frank_lieb(f: &GriddedDensity, g: &GriddedDensity, s_rho: f64) -> Result<ReurReport> {
    evaluate_reur_continuous(f, g, s_rho, &fit_gaussian_to(f)?, &fit_gaussian_to(g)?, ContinuousVariant::FrankLieb)
}

/// Birula form with Gaussians fitted to `f` and `g`.
pub fn evaluate_birula(f: &GriddedDensity, g: &GriddedDensity) -> Result<ReurReport> {
    evaluate_reur_continuous(f, g, 0.0, &fit_gaussian_to(f)?, &fit_gaussian_to(g)?, ContinuousVariant::Birula)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobertsonBounds {
    pub sigma_x: f64,
    pub sigma_k: f64,
    pub sigma_product: f64,
    /// `½ exp(S(f‖f_max) + S(g‖g_max))`.
    pub strengthened_bound: f64,
    pub robertson_bound: f64,
}

/// Variance product against the plain and the divergence-strengthened bound.
pub fn robertson_strengthened(f: &GriddedDensity, g: &GriddedDensity) -> Result<RobertsonBounds> {
    let (vx, vk) = (f.variance(), g.variance());
    if !(vx > 0.0) || !(vk > 0.0) {
        return Err(Error::InvalidDensity("zero variance on grid".into()));
    }
    let model_f = fit_gaussian_to(f)?;
    let model_g = fit_gaussian_to(g)?;
    let kl = relative_entropy_to_model(f, &model_f)?
        + relative_entropy_to_model(g, &model_g)?;
    Ok(RobertsonBounds {
        sigma_x: vx.sqrt(),
        sigma_k: vk.sqrt(),
        sigma_product: (vx * vk).sqrt(),
        strengthened_bound: 0.5 * kl.exp(),
        robertson_bound: 0.5,
    })
}

/// `σ_x σ_k >= ½` as a report.
pub fn evaluate_robertson(f: &GriddedDensity, g: &GriddedDensity) -> Result<ReurReport> {
    let b = robertson_strengthened(f, g)?;
    Ok(ReurReport::new(
        RelationId::Robertson,
        vec![Term::new("sigma_x*sigma_k", b.sigma_product)],
        vec![Term::new("1/2", b.robertson_bound)],
        1.0 / (2.0 * PI),
        CONTINUOUS_TOL,
    ))
}

/// Outcome of rescaling the outcome normalization by `α`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceCheck {
    pub alpha_sqr: f64,
    pub rhs_before: f64,
    pub rhs_after: f64,
    pub rhs_shift: f64,
    pub lhs_shift: f64,
    /// Change of each right-hand term, in report order.
    pub term_shifts: Vec<Term>,
    pub passed: bool,
}

pub const COVARIANCE_TOL: f64 = 1e-8;

/// Rescales the continuous outcome states `|x⟩ -> α|x⟩`, so the measure
/// becomes `|α|⁻² dx`, the density `|α|² f` and `c -> |α|² c`, then checks
/// that the report's right side does not move.
///
/// `report` builds the report from a density and the incompatibility
/// constant, fitting whatever models it needs.
pub fn check_normalization_covariance(
    f: &GriddedDensity,
    c: f64,
    alpha: C64,
    report: impl Fn(&GriddedDensity, f64) -> Result<ReurReport>,
) -> Result<CovarianceCheck> {
    let a2 = alpha.norm_sqr();
    if !(a2 > 0.0) || !a2.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha = {alpha}")));
    }
    let grid = f.grid();
    let scaled_grid = Grid::new(grid.start / a2, grid.spacing / a2, grid.len, grid.topology)?;
    let scaled = GriddedDensity::new(scaled_grid, f.values().iter().map(|v| v * a2).collect())?;
    let before = report(f, c)?;
    let after = report(&scaled, c * a2)?;
    let term_shifts = before
        .rhs_terms
        .iter()
        .zip(&after.rhs_terms)
        .map(|(b, a)| Term::new(b.name.clone(), a.value - b.value))
        .collect();
    let rhs_shift = after.rhs - before.rhs;
    Ok(CovarianceCheck {
        alpha_sqr: a2,
        rhs_before: before.rhs,
        rhs_after: after.rhs,
        rhs_shift,
        lhs_shift: after.lhs - before.lhs,
        term_shifts,
        passed: rhs_shift.abs() <= COVARIANCE_TOL,
    })
}
