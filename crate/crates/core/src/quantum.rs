//! Finite-dimensional states and measurements.
//!
//! Density matrices are validated on construction (Hermitian, unit trace,
//! positive semidefinite) and carry a lazily computed eigendecomposition.
//! Matrix functions (logarithm, square root) go through that
//! eigendecomposition; eigenvalues in `[-1e-12, 0)` are clamped to zero.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{Complex, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::entropy::DiscreteDistribution;
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-12;
pub const GRAM_TOL: f64 = 1e-12;
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Eigenvalues of `σ` at or below this are outside its support.
const SUPPORT_EIGENVALUE: f64 = 1e-14;
/// Weight of `ρ` outside `supp σ` that makes `S(ρ‖σ)` infinite.
const SUPPORT_WEIGHT: f64 = 1e-12;

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = symmetrize(m).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `V diag(f(λ)) V†`.
fn spectral_apply(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        let fv = f(v);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= fv);
    }
    &scaled * vectors.adjoint()
}

/// Square root of a positive semidefinite matrix.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(m);
    if let Some(&min) = values.first() {
        if min < -PSD_TOL {
            return Err(Error::InvalidState(min));
        }
    }
    Ok(spectral_apply(&values, &vectors, |v| v.max(0.0).sqrt()))
}

/// `-Σ λ ln λ` over a spectrum; eigenvalues below `-1e-12` are rejected.
pub fn spectral_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -PSD_TOL {
            return Err(Error::InvalidState(l));
        }
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    Ok(s)
}

#[derive(Debug, Clone)]
struct Spectrum {
    values: Vec<f64>,
    vectors: CMatrix,
}

/// A Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
    spectrum: OnceLock<Spectrum>,
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        if matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch(0, 1));
        }
        let dev = hermitian_deviation(&matrix);
        if !(dev <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian(dev));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(trace.re));
        }
        let matrix = symmetrize(&matrix);
        let (values, vectors) = hermitian_eigen(&matrix);
        if values[0] < -PSD_TOL {
            return Err(Error::InvalidState(values[0]));
        }
        let spectrum = OnceLock::new();
        let _ = spectrum.set(Spectrum {
            values: values.into_iter().map(|v| v.max(0.0)).collect(),
            vectors,
        });
        Ok(Self { matrix, spectrum })
    }

    /// `Σ p_i |v_i⟩⟨v_i|` for orthonormal columns `v_i`.
    fn from_spectrum(values: Vec<f64>, vectors: CMatrix) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| **v < -PSD_TOL || !v.is_finite()) {
            return Err(Error::InvalidState(*v));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(total));
        }
        let values: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
        let matrix = symmetrize(&spectral_apply(&values, &vectors, |v| v));
        let spectrum = OnceLock::new();
        let _ = spectrum.set(Spectrum { values, vectors });
        Ok(Self { matrix, spectrum })
    }

    /// `|ψ⟩⟨ψ|` for a (re-normalized) vector.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let psi = psi.unscale(norm);
        Self::new(&psi * psi.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch(0, 1));
        }
        Self::from_spectrum(vec![1.0 / dim as f64; dim], CMatrix::identity(dim, dim))
    }

    /// Diagonal state in the computational basis.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::from_spectrum(probs.to_vec(), CMatrix::identity(probs.len(), probs.len()))
    }

    /// `Σ_x w(x) |x⟩⟨x|` in the given basis.
    pub fn diagonal_in(basis: &OrthonormalBasis, weights: &[f64]) -> Result<Self> {
        if weights.len() != basis.dim() {
            return Err(Error::DimensionMismatch(weights.len(), basis.dim()));
        }
        Self::from_spectrum(weights.to_vec(), basis.vectors.clone())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    fn spectrum(&self) -> &Spectrum {
        self.spectrum.get_or_init(|| {
            let (values, vectors) = hermitian_eigen(&self.matrix);
            Spectrum {
                values: values.into_iter().map(|v| v.max(0.0)).collect(),
                vectors,
            }
        })
    }

    /// Eigenvalues, clamped to be non-negative.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum().values
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.spectrum().vectors
    }

    /// `(1-t) ρ + t 𝟙/d`.
    pub fn depolarize(&self, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("mixing weight {t}")));
        }
        let d = self.dim();
        let id = CMatrix::identity(d, d).scale(t / d as f64);
        Self::new(self.matrix.scale(1.0 - t) + id)
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(unitary.nrows(), self.dim()));
        }
        Self::new(unitary * &self.matrix * unitary.adjoint())
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_in(&self, psi: &CVector) -> f64 {
        (psi.adjoint() * &self.matrix * psi)[(0, 0)].re
    }
}

/// Orthonormal eigenbasis of a non-degenerate observable.
///
/// Column `i` of `vectors` is the eigenvector with eigenvalue `labels[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    vectors: CMatrix,
    labels: Vec<f64>,
}

fn check_labels(labels: &[f64]) -> Result<()> {
    if labels.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite label".into()));
    }
    let mut sorted = labels.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateLabels);
    }
    Ok(())
}

impl OrthonormalBasis {
    pub fn new(vectors: CMatrix, labels: Vec<f64>) -> Result<Self> {
        if !vectors.is_square() {
            return Err(Error::NotSquare(vectors.nrows(), vectors.ncols()));
        }
        let d = vectors.nrows();
        if d == 0 {
            return Err(Error::DimensionMismatch(0, 1));
        }
        if labels.len() != d {
            return Err(Error::DimensionMismatch(labels.len(), d));
        }
        check_labels(&labels)?;
        let gram = vectors.adjoint() * &vectors - CMatrix::identity(d, d);
        let dev = max_abs(&gram);
        if !(dev <= GRAM_TOL) {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self { vectors, labels })
    }

    /// Standard basis with labels `0, 1, …, d-1`.
    pub fn computational(dim: usize) -> Result<Self> {
        Self::new(CMatrix::identity(dim, dim), default_labels(dim))
    }

    /// Columns `e^{2πi jk/d}/√d`, mutually unbiased to the computational basis.
    pub fn fourier(dim: usize) -> Result<Self> {
        let norm = 1.0 / (dim as f64).sqrt();
        let m = CMatrix::from_fn(dim, dim, |j, k| {
            let phase = 2.0 * PI * ((j * k) % dim) as f64 / dim as f64;
            C64::from_polar(norm, phase)
        });
        Self::new(m, default_labels(dim))
    }

    /// `|±⟩ = (|0⟩ ± |1⟩)/√2`.
    pub fn hadamard() -> Self {
        Self::fourier(2).expect("valid basis")
    }

    /// Haar-random basis, deterministic in `seed`.
    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch(0, 1));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new(haar_unitary(dim, &mut rng), default_labels(dim))
    }

    pub fn with_labels(self, labels: Vec<f64>) -> Result<Self> {
        Self::new(self.vectors, labels)
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Eigenvectors as columns.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    pub fn projector(&self, i: usize) -> CMatrix {
        let v = self.vector(i);
        &v * v.adjoint()
    }
}

fn default_labels(dim: usize) -> Vec<f64> {
    (0..dim).map(|i| i as f64).collect()
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// QR of a complex Ginibre matrix with the phase of `R`'s diagonal removed.
pub fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

/// Positive operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
    labels: Vec<f64>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>, labels: Vec<f64>) -> Result<Self> {
        let d = elements
            .first()
            .map(|e| e.nrows())
            .ok_or_else(|| Error::InvalidParameter("empty POVM".into()))?;
        if labels.len() != elements.len() {
            return Err(Error::DimensionMismatch(labels.len(), elements.len()));
        }
        check_labels(&labels)?;
        let mut total = CMatrix::zeros(d, d);
        for (index, e) in elements.iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::DimensionMismatch(e.nrows(), d));
            }
            let dev = hermitian_deviation(e);
            if !(dev <= HERMITIAN_TOL) {
                return Err(Error::NotHermitian(dev));
            }
            let (values, _) = hermitian_eigen(e);
            if values[0] < -PSD_TOL {
                return Err(Error::NotPositive {
                    index,
                    min_eigenvalue: values[0],
                });
            }
            total += e;
        }
        let dev = max_abs(&(total - CMatrix::identity(d, d)));
        if !(dev <= COMPLETENESS_TOL) {
            return Err(Error::Incomplete(dev));
        }
        Ok(Self { elements, labels })
    }

    /// Rank-1 projective measurement in `basis`.
    pub fn from_basis(basis: &OrthonormalBasis) -> Self {
        let elements = (0..basis.dim()).map(|i| basis.projector(i)).collect();
        Self {
            elements,
            labels: basis.labels.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    spectral_entropy(rho.eigenvalues()).expect("validated state has a PSD spectrum")
}

/// `S(ρ‖σ) = Tr ρ(ln ρ - ln σ)`; `+∞` unless `supp ρ ⊆ supp σ`.
pub fn quantum_relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let neg_entropy = -von_neumann_entropy(rho);
    let (mu, v) = (sigma.eigenvalues(), sigma.eigenvectors());
    let mut cross = 0.0;
    for (j, &m) in mu.iter().enumerate() {
        let w = rho.expectation_in(&v.column(j).into_owned());
        if m <= SUPPORT_EIGENVALUE {
            if w > SUPPORT_WEIGHT {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += w * m.ln();
    }
    Ok(neg_entropy - cross)
}

fn clamp_probabilities(mut probs: Vec<f64>) -> Result<Vec<f64>> {
    for p in probs.iter_mut() {
        if *p < -PSD_TOL {
            return Err(Error::InvalidState(*p));
        }
        *p = p.max(0.0);
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(probs)
}

/// Outcome probabilities `⟨x|ρ|x⟩` in basis order.
fn basis_probabilities(rho: &DensityMatrix, basis: &OrthonormalBasis) -> Result<Vec<f64>> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), basis.dim()));
    }
    let raw = (0..basis.dim())
        .map(|i| rho.expectation_in(&basis.vector(i)))
        .collect();
    clamp_probabilities(raw)
}

/// `p(x) = ⟨x|ρ|x⟩`.
pub fn measure_projective(
    rho: &DensityMatrix,
    basis: &OrthonormalBasis,
) -> Result<DiscreteDistribution> {
    let probs = basis_probabilities(rho, basis)?;
    DiscreteDistribution::new(basis.labels.clone(), probs)
}

/// `p(x) = Tr Λ_x ρ`.
pub fn measure_povm(rho: &DensityMatrix, povm: &Povm) -> Result<DiscreteDistribution> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), povm.dim()));
    }
    let m = rho.matrix();
    let raw = povm
        .elements
        .iter()
        .map(|e| e.iter().zip(m.transpose().iter()).map(|(a, b)| a * b).sum::<C64>().re)
        .collect();
    DiscreteDistribution::new(povm.labels.clone(), clamp_probabilities(raw)?)
}

/// Non-selective measurement `ρ_X = Σ_x p(x) |x⟩⟨x|`.
pub fn measured_state(rho: &DensityMatrix, basis: &OrthonormalBasis) -> Result<DensityMatrix> {
    let probs = basis_probabilities(rho, basis)?;
    DensityMatrix::diagonal_in(basis, &probs)
}

/// `c = max_{x,z} |⟨x|z⟩|²`.
pub fn max_overlap_pvm(a: &OrthonormalBasis, b: &OrthonormalBasis) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let overlaps = a.vectors.adjoint() * &b.vectors;
    Ok(overlaps.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max))
}

/// `c = max_{x,z} ‖√Λ_x √Γ_z‖²_∞`.
pub fn max_overlap_povm(a: &Povm, b: &Povm) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let roots_a = a.elements.iter().map(psd_sqrt).collect::<Result<Vec<_>>>()?;
    let roots_b = b.elements.iter().map(psd_sqrt).collect::<Result<Vec<_>>>()?;
    let mut c: f64 = 0.0;
    for ra in &roots_a {
        for rb in &roots_b {
            let s = (ra * rb).singular_values().max();
            c = c.max(s * s);
        }
    }
    Ok(c)
}

/// Gibbs state `e^{-βH}/Tr e^{-βH}`, computed in the eigenbasis of `H`.
pub fn thermal_state(hamiltonian: &CMatrix, beta: f64) -> Result<DensityMatrix> {
    if !hamiltonian.is_square() {
        return Err(Error::NotSquare(hamiltonian.nrows(), hamiltonian.ncols()));
    }
    let dev = hermitian_deviation(hamiltonian);
    if !(dev <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(dev));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta = {beta}")));
    }
    let (energies, vectors) = hermitian_eigen(hamiltonian);
    let ground = energies[0];
    let weights: Vec<f64> = energies.iter().map(|e| (-beta * (e - ground)).exp()).collect();
    let z: f64 = weights.iter().sum();
    DensityMatrix::from_spectrum(weights.iter().map(|w| w / z).collect(), vectors)
}

/// Random state `G G† / Tr(G G†)` with `G` a `dim × rank` complex Gaussian matrix.
pub fn random_density_matrix(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, rank, |_, _| complex_gaussian(&mut rng));
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::new(gg.unscale(tr))
}
