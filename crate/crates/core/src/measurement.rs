//! Entangling measurement of an object by an apparatus, density matrices,
//! decoherence as block projection, outcome sampling, superselection
//! sectors and the 2π rotation of mixed boson/fermion superpositions.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::numerics::{sample_blocks, stream_rng};

/// Tolerance for Hermiticity, trace and positivity checks.
pub const MATRIX_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasurementError {
    #[error("amplitudes must have Σ|c_k|² = 1 (got {0})")]
    Unnormalized(f64),
    #[error("need d_o, d_A >= K = {needed} (got d_o = {object}, d_A = {apparatus})")]
    TooSmall { needed: usize, object: usize, apparatus: usize },
    #[error("matrix must be square and nonempty (got {rows}×{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |ρ − ρ†| = {0:e})")]
    NotHermitian(f64),
    #[error("matrix has eigenvalue {0:e} < 0")]
    NotPositive(f64),
    #[error("trace {0} is not 1")]
    BadTrace(f64),
    #[error("density matrix has off-diagonal entries up to {0:e}; decohere it first")]
    NotDiagonal(f64),
    #[error("sector specification: {0}")]
    BadSectors(String),
    #[error("dimension mismatch ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("index {0} has no spin label")]
    Unlabeled(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to
    /// [`MATRIX_TOLERANCE`].
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self, MeasurementError> {
        if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
            return Err(MeasurementError::NotSquare { rows: rho.nrows(), cols: rho.ncols() });
        }
        let herm = (&rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > MATRIX_TOLERANCE {
            return Err(MeasurementError::NotHermitian(herm));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > MATRIX_TOLERANCE || tr.im.abs() > MATRIX_TOLERANCE {
            return Err(MeasurementError::BadTrace(tr.re));
        }
        let sym = (&rho + rho.adjoint()).map(|z| z * 0.5);
        let min = sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -MATRIX_TOLERANCE {
            return Err(MeasurementError::NotPositive(min));
        }
        Ok(Self { rho })
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn pure(psi: &[Complex64]) -> Result<Self, MeasurementError> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let n = v.norm_squared();
        if !(n > 0.0) {
            return Err(MeasurementError::Unnormalized(n));
        }
        Self::new(&v * v.adjoint() / Complex64::from(n))
    }

    pub fn diagonal(p: &[f64]) -> Result<Self, MeasurementError> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(p.len(), p.iter().map(|&x| Complex64::from(x)))))
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.rho[(i, j)]
    }

    pub fn diagonal_probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).collect()
    }

    /// Largest off-diagonal modulus.
    pub fn off_diagonal(&self) -> f64 {
        let d = self.dim();
        (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).map(|ij| self.rho[ij].norm()).fold(0.0, f64::max)
    }
}

/// `tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // tr(ρ²) = Σ_ij |ρ_ij|² for Hermitian ρ
    rho.rho.iter().map(|z| z.norm_sqr()).sum()
}

/// Partition of `0..d` into labelled sectors with charges `s_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorStructure {
    sectors: Vec<Vec<usize>>,
    charges: Vec<f64>,
    label: Vec<usize>,
}

impl SectorStructure {
    /// Charges default to the sector index.
    pub fn new(sectors: Vec<Vec<usize>>) -> Result<Self, MeasurementError> {
        let charges = (0..sectors.len()).map(|i| i as f64).collect();
        Self::with_charges(sectors, charges)
    }

    pub fn with_charges(sectors: Vec<Vec<usize>>, charges: Vec<f64>) -> Result<Self, MeasurementError> {
        if sectors.len() != charges.len() {
            return Err(MeasurementError::BadSectors(format!("{} sectors but {} charges", sectors.len(), charges.len())));
        }
        let d: usize = sectors.iter().map(Vec::len).sum();
        let mut label = vec![usize::MAX; d];
        for (s, idx) in sectors.iter().enumerate() {
            if idx.is_empty() {
                return Err(MeasurementError::BadSectors(format!("sector {s} is empty")));
            }
            for &i in idx {
                if i >= d {
                    return Err(MeasurementError::BadSectors(format!("index {i} out of range 0..{d}")));
                }
                if label[i] != usize::MAX {
                    return Err(MeasurementError::BadSectors(format!("index {i} appears twice")));
                }
                label[i] = s;
            }
        }
        Ok(Self { sectors, charges, label })
    }

    /// One sector per basis index.
    pub fn singletons(d: usize) -> Self {
        Self::new((0..d).map(|i| vec![i]).collect()).expect("singleton partition is valid")
    }

    /// Parses `"0,1|2,3"`: sectors separated by `|`, indices by `,`.
    pub fn parse(s: &str) -> Result<Self, MeasurementError> {
        let sectors = s
            .split('|')
            .map(|part| {
                part.split(',')
                    .map(|t| {
                        t.trim().parse::<usize>().map_err(|_| MeasurementError::BadSectors(format!("bad index {:?}", t.trim())))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(sectors)
    }

    pub fn dim(&self) -> usize {
        self.label.len()
    }

    pub fn sectors(&self) -> &[Vec<usize>] {
        &self.sectors
    }

    pub fn sector_of(&self, i: usize) -> usize {
        self.label[i]
    }

    /// `S = Σ_i s_i Π_i`.
    pub fn charge_operator(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i == j {
                Complex64::from(self.charges[self.label[i]])
            } else {
                Complex64::default()
            }
        })
    }

    fn check_dim(&self, d: usize) -> Result<(), MeasurementError> {
        if d != self.dim() {
            return Err(MeasurementError::DimensionMismatch(d, self.dim()));
        }
        Ok(())
    }
}

/// Object ⊗ apparatus amplitudes, `amps[(i, j)]` for `|i⟩|A_j⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    amps: DMatrix<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Object,
    Apparatus,
}

impl BipartiteState {
    pub fn new(amps: DMatrix<Complex64>) -> Result<Self, MeasurementError> {
        let n = amps.norm_squared();
        if (n - 1.0).abs() > MATRIX_TOLERANCE {
            return Err(MeasurementError::Unnormalized(n));
        }
        Ok(Self { amps })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.amps.nrows(), self.amps.ncols())
    }

    pub fn amplitudes(&self) -> &DMatrix<Complex64> {
        &self.amps
    }

    /// Singular values of the amplitude table, largest first.
    pub fn schmidt_coefficients(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.amps.clone().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Number of singular values above [`MATRIX_TOLERANCE`].
    pub fn schmidt_rank(&self) -> usize {
        self.schmidt_coefficients().iter().filter(|&&s| s > MATRIX_TOLERANCE).count()
    }

    pub fn is_product(&self) -> bool {
        self.schmidt_rank() == 1
    }
}

/// `Σ_k c_k |k⟩|A_k⟩` with basis pointer states.
pub fn entangle(c: &[Complex64], d_o: usize, d_a: usize) -> Result<BipartiteState, MeasurementError> {
    let n: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    if (n - 1.0).abs() > MATRIX_TOLERANCE {
        return Err(MeasurementError::Unnormalized(n));
    }
    if d_o < c.len() || d_a < c.len() || c.is_empty() {
        return Err(MeasurementError::TooSmall { needed: c.len(), object: d_o, apparatus: d_a });
    }
    let mut amps = DMatrix::zeros(d_o, d_a);
    for (k, &ck) in c.iter().enumerate() {
        amps[(k, k)] = ck;
    }
    Ok(BipartiteState { amps })
}

/// Reduced density matrix of `keep`, tracing out the other factor.
pub fn reduced_density(s: &BipartiteState, keep: Subsystem) -> Result<DensityMatrix, MeasurementError> {
    let a = &s.amps;
    let rho = match keep {
        // ρ_o[i, i'] = Σ_j A[i, j] conj(A[i', j])
        Subsystem::Object => a * a.adjoint(),
        // ρ_A[j, j'] = Σ_i A[i, j] conj(A[i, j'])
        Subsystem::Apparatus => a.transpose() * a.map(|z| z.conj()),
    };
    DensityMatrix::new(rho)
}

/// Zeroes every element between distinct sectors.
pub fn decohere(rho: &DensityMatrix, sectors: &SectorStructure) -> Result<DensityMatrix, MeasurementError> {
    sectors.check_dim(rho.dim())?;
    let d = rho.dim();
    let m = DMatrix::from_fn(d, d, |i, j| {
        if sectors.sector_of(i) == sectors.sector_of(j) {
            rho.rho[(i, j)]
        } else {
            Complex64::default()
        }
    });
    Ok(DensityMatrix { rho: m })
}

/// Outcome frequencies from sampling a diagonal density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    pub samples: usize,
    pub counts: Vec<u64>,
    pub probabilities: Vec<f64>,
}

impl OutcomeTable {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.samples as f64).collect()
    }

    /// Binomial standard errors `√(p(1−p)/n)`.
    pub fn standard_errors(&self) -> Vec<f64> {
        self.probabilities.iter().map(|p| (p * (1.0 - p) / self.samples as f64).sqrt()).collect()
    }

    /// `|f_k − p_k| / σ_k` per outcome; zero where `σ_k = 0` and `f_k = p_k`.
    pub fn deviations(&self) -> Vec<f64> {
        self.frequencies()
            .iter()
            .zip(&self.probabilities)
            .zip(self.standard_errors())
            .map(|((f, p), s)| {
                let d = (f - p).abs();
                if d == 0.0 {
                    0.0
                } else {
                    d / s
                }
            })
            .collect()
    }
}

/// `n` independent outcomes drawn from `p_k = ρ_kk`.
pub fn sample_outcomes(rho: &DensityMatrix, n: usize, seed: u64) -> Result<OutcomeTable, MeasurementError> {
    let off = rho.off_diagonal();
    if off > 0.0 {
        return Err(MeasurementError::NotDiagonal(off));
    }
    let probabilities: Vec<f64> = rho.diagonal_probabilities().iter().map(|p| p.max(0.0)).collect();
    let total: f64 = probabilities.iter().sum();
    let cumulative: Vec<f64> = probabilities
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p / total;
            Some(*acc)
        })
        .collect();
    let last = probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let draws = sample_blocks(seed, n, |rng| {
        let u: f64 = rng.random();
        cumulative.iter().position(|&c| u < c).unwrap_or(last).min(last)
    });
    let mut counts = vec![0u64; rho.dim()];
    for k in draws {
        counts[k] += 1;
    }
    Ok(OutcomeTable { samples: n, counts, probabilities })
}

/// `max |⟨e_j|F|e_i⟩|` over basis vectors in distinct sectors.
pub fn sector_defect(f: &DMatrix<Complex64>, sectors: &SectorStructure) -> Result<f64, MeasurementError> {
    sectors.check_dim(f.nrows())?;
    sectors.check_dim(f.ncols())?;
    let d = f.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            if sectors.sector_of(i) != sectors.sector_of(j) {
                worst = worst.max(f[(i, j)].norm());
            }
        }
    }
    Ok(worst)
}

/// `max |[S, F]_ij|` with `S` the sector charge operator.
pub fn charge_commutator(f: &DMatrix<Complex64>, sectors: &SectorStructure) -> Result<f64, MeasurementError> {
    sectors.check_dim(f.nrows())?;
    let s = sectors.charge_operator();
    Ok((&s * f - f * &s).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Integer,
    HalfInteger,
}

/// Rotation by 2π: half-integer components change sign.
pub fn rotation_2pi(state: &[Complex64], labels: &[Spin]) -> Result<Vec<Complex64>, MeasurementError> {
    if labels.len() < state.len() {
        return Err(MeasurementError::Unlabeled(labels.len()));
    }
    Ok(state
        .iter()
        .zip(labels)
        .map(|(z, l)| match l {
            Spin::Integer => *z,
            Spin::HalfInteger => -z,
        })
        .collect())
}

/// `|⟨a|b⟩| / (‖a‖‖b‖)`; 1 exactly when `a` and `b` span the same ray.
pub fn ray_overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    ip.norm() / (na * nb)
}

/// Random density matrix `GG†/tr(GG†)` from a `d × rank` complex Gaussian `G`.
pub fn random_density_matrix(d: usize, rank: usize, seed: u64) -> DensityMatrix {
    let mut rng = stream_rng(seed, 0);
    let g = DMatrix::from_fn(d, rank.max(1), |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    let mut rho = m / tr;
    // restore exact Hermiticity lost to rounding
    rho = (&rho + rho.adjoint()).map(|z| z * 0.5);
    DensityMatrix { rho }
}

/// Random operator with nonzero entries only inside sector blocks.
pub fn random_block_operator(sectors: &SectorStructure, seed: u64) -> DMatrix<Complex64> {
    let mut rng = stream_rng(seed, 0);
    let d = sectors.dim();
    DMatrix::from_fn(d, d, |i, j| {
        let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        if sectors.sector_of(i) == sectors.sector_of(j) {
            z
        } else {
            Complex64::default()
        }
    })
}
