//! Bargmann–Fock space of one oscillator mode.
//!
//! Functions of `z` are square integrable against the Gaussian measure
//! `dμ = (πħ)^{-1} e^{-|z|²/ħ} d²z` and expanded in the orthonormal basis
//! `Z_n = zⁿ/√(n! ħⁿ)`. The ladder operators are `a⁺ = z` and `a = ħ d/dz`,
//! so `[a, a⁺] = ħ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::charfn::{CharFnError, GridWaveFunction, UniformGrid};
use crate::numerics::{trapezoid_weight, GaussLaguerre};

/// Largest truncation accepted by [`quadrature_inner_product`].
pub const QUADRATURE_MAX_TRUNCATION: usize = 12;
/// Largest Hermite index supported by the recurrence.
pub const HERMITE_MAX_ORDER: usize = 200;
/// Allowed tail of the Bargmann-kernel series.
pub const KERNEL_TAIL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("ħ must be positive and finite (got {0})")]
    BadHbar(f64),
    #[error("vectors carry different ħ ({0} vs {1})")]
    HbarMismatch(f64, f64),
    #[error("vectors carry different rescaling λ ({0} vs {1})")]
    LambdaMismatch(f64, f64),
    #[error("raising a vector with nonzero top coefficient at N_max = {n_max} would truncate; use raise_grow")]
    Overflow { n_max: usize },
    #[error("quadrature needs truncation <= {QUADRATURE_MAX_TRUNCATION} (got {0})")]
    TruncationTooLarge(usize),
    #[error("quadrature self-estimated error {estimate:e} exceeds 1e-8; increase radial/angular nodes")]
    QuadratureInaccurate { estimate: f64 },
    #[error("commutator check needs N_max >= 2 (got {0})")]
    TruncationTooSmall(usize),
    #[error("rescaling needs λ > 0 (got {0})")]
    BadLambda(f64),
    #[error("Hermite function order {0} exceeds {HERMITE_MAX_ORDER}")]
    HermiteOrder(usize),
    #[error("Bargmann series tail {tail:e} at |z| = {modulus} exceeds {KERNEL_TAIL_TOLERANCE:e}; use N_max >= {suggested}")]
    KernelTail { tail: f64, modulus: f64, suggested: usize },
    #[error(transparent)]
    Grid(#[from] CharFnError),
}

/// Truncated vector `Σ_{n ≤ N_max} c_n Z_n`.
///
/// `hbar` is the value of the commutator `[a, a⁺]` in this representation.
/// `lambda` records a non-canonical rescaling `a_λ = a/√λ` (1 when none has
/// been applied); the physical `ħ` is `lambda · hbar`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub coeffs: Vec<Complex64>,
    pub hbar: f64,
    pub lambda: f64,
}

fn check_hbar(hbar: f64) -> Result<(), FockError> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(FockError::BadHbar(hbar))
    }
}

impl FockVector {
    pub fn new(coeffs: Vec<Complex64>, hbar: f64) -> Result<Self, FockError> {
        check_hbar(hbar)?;
        assert!(!coeffs.is_empty(), "Fock vector needs at least one coefficient");
        Ok(Self { coeffs, hbar, lambda: 1.0 })
    }

    pub fn zero(n_max: usize, hbar: f64) -> Result<Self, FockError> {
        Self::new(vec![Complex64::new(0.0, 0.0); n_max + 1], hbar)
    }

    /// Basis vector `Z_n` in a truncation `N_max ≥ n`.
    pub fn basis(n: usize, n_max: usize, hbar: f64) -> Result<Self, FockError> {
        let mut v = Self::zero(n_max.max(n), hbar)?;
        v.coeffs[n] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    /// Truncated coherent state with `⟨a⟩ = z0`: `c_n ∝ αⁿ/√n!`, `α = z0/√ħ`.
    pub fn coherent(z0: Complex64, n_max: usize, hbar: f64) -> Result<Self, FockError> {
        check_hbar(hbar)?;
        let alpha = z0 / hbar.sqrt();
        let mut coeffs = Vec::with_capacity(n_max + 1);
        let mut c = Complex64::from((-0.5 * alpha.norm_sqr()).exp());
        for n in 0..=n_max {
            coeffs.push(c);
            c = c * alpha / ((n + 1) as f64).sqrt();
        }
        Self::new(coeffs, hbar)
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-12
    }

    pub fn normalized(&self) -> Self {
        let s = 1.0 / self.norm_sqr().sqrt();
        self.map(|c| c * s)
    }

    fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| f(c)).collect(), hbar: self.hbar, lambda: self.lambda }
    }

    /// Value `f(z) = Σ c_n Z_n(z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut basis = Complex64::new(1.0, 0.0);
        let w = z / self.hbar.sqrt();
        let mut sum = Complex64::new(0.0, 0.0);
        for (n, c) in self.coeffs.iter().enumerate() {
            sum += c * basis;
            basis = basis * w / ((n + 1) as f64).sqrt();
        }
        sum
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &Self, i: usize| v.coeffs.get(i).copied().unwrap_or_default();
        Self {
            coeffs: (0..n).map(|i| get(self, i) - get(other, i)).collect(),
            hbar: self.hbar,
            lambda: self.lambda,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|c| c * s)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

fn compatible(f: &FockVector, g: &FockVector) -> Result<(), FockError> {
    if f.hbar != g.hbar {
        return Err(FockError::HbarMismatch(f.hbar, g.hbar));
    }
    if f.lambda != g.lambda {
        return Err(FockError::LambdaMismatch(f.lambda, g.lambda));
    }
    Ok(())
}

/// `(f, g) = ∫ dμ f(z) conj(g(z)) = Σ c_n(f) conj(c_n(g))`.
pub fn inner_product(f: &FockVector, g: &FockVector) -> Result<Complex64, FockError> {
    compatible(f, g)?;
    Ok(f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a * b.conj()).sum())
}

/// Default node counts for [`quadrature_inner_product`].
pub const DEFAULT_RADIAL_NODES: usize = 16;
pub const DEFAULT_ANGULAR_NODES: usize = 32;

/// `∫ dμ f(z) conj(g(z))` evaluated numerically in polar coordinates:
/// with `u = |z|²/ħ` the measure becomes `(2π)^{-1} e^{-u} du dφ`, handled
/// by a Gauss–Laguerre rule in `u` and equispaced nodes in `φ`.
///
/// The result is compared with a finer rule (two more radial nodes, twice
/// the angular nodes); a discrepancy above `1e-8` is an error.
pub fn quadrature_inner_product(
    f: &FockVector,
    g: &FockVector,
    radial_nodes: usize,
    angular_nodes: usize,
) -> Result<Complex64, FockError> {
    compatible(f, g)?;
    let trunc = f.n_max().max(g.n_max());
    if trunc > QUADRATURE_MAX_TRUNCATION {
        return Err(FockError::TruncationTooLarge(trunc));
    }
    let coarse = polar_rule(f, g, radial_nodes.max(1), angular_nodes.max(1));
    let fine = polar_rule(f, g, radial_nodes.max(1) + 2, 2 * angular_nodes.max(1));
    let estimate = (coarse - fine).norm();
    if estimate > 1e-8 {
        return Err(FockError::QuadratureInaccurate { estimate });
    }
    Ok(fine)
}

fn polar_rule(f: &FockVector, g: &FockVector, radial: usize, angular: usize) -> Complex64 {
    let rule = GaussLaguerre::new(radial);
    let dphi = 2.0 * PI / angular as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for (&u, &w) in rule.nodes().iter().zip(rule.weights()) {
        let r = (f.hbar * u).sqrt();
        let ring: Complex64 = (0..angular)
            .map(|k| {
                let z = Complex64::from_polar(r, k as f64 * dphi);
                f.eval(z) * g.eval(z).conj()
            })
            .sum();
        sum += ring * (w / angular as f64);
    }
    sum
}

/// `a⁺ f = z f`: slot `n` contributes `√((n+1)ħ) c_n` to slot `n+1`.
/// Errors when the top coefficient is nonzero.
pub fn raise(f: &FockVector) -> Result<FockVector, FockError> {
    if f.coeffs[f.n_max()] != Complex64::new(0.0, 0.0) {
        return Err(FockError::Overflow { n_max: f.n_max() });
    }
    let mut out = f.map(|_| Complex64::new(0.0, 0.0));
    for n in 0..f.n_max() {
        out.coeffs[n + 1] = f.coeffs[n] * ((n + 1) as f64 * f.hbar).sqrt();
    }
    Ok(out)
}

/// [`raise`] with the truncation grown by one slot instead of failing.
pub fn raise_grow(f: &FockVector) -> FockVector {
    let mut padded = f.clone();
    padded.coeffs.push(Complex64::new(0.0, 0.0));
    raise(&padded).expect("padded vector has headroom")
}

/// `a⁺` as a truncated matrix: the top coefficient is dropped.
fn raise_truncating(f: &FockVector) -> FockVector {
    let mut out = f.map(|_| Complex64::new(0.0, 0.0));
    for n in 0..f.n_max() {
        out.coeffs[n + 1] = f.coeffs[n] * ((n + 1) as f64 * f.hbar).sqrt();
    }
    out
}

/// `a f = ħ f′`: slot `n` contributes `√(nħ) c_n` to slot `n−1`.
pub fn lower(f: &FockVector) -> FockVector {
    let mut out = f.map(|_| Complex64::new(0.0, 0.0));
    for n in 1..=f.n_max() {
        out.coeffs[n - 1] = f.coeffs[n] * (n as f64 * f.hbar).sqrt();
    }
    out
}

/// `max_{n ≤ N_max−1} |([a, a⁺] − ħ) Z_n|`.
pub fn commutator_defect(n_max: usize, hbar: f64) -> Result<f64, FockError> {
    commutator_defect_rescaled(n_max, hbar, 1.0)
}

/// Commutator defect in the representation obtained by
/// [`rescale_lambda`], measured against `ħ/λ`.
pub fn commutator_defect_rescaled(n_max: usize, hbar: f64, lambda: f64) -> Result<f64, FockError> {
    if n_max < 2 {
        return Err(FockError::TruncationTooSmall(n_max));
    }
    let mut worst: f64 = 0.0;
    for n in 0..n_max {
        let z = rescale_lambda(&FockVector::basis(n, n_max, hbar)?, lambda)?;
        let target = z.hbar;
        let aa_dag = lower(&raise(&z)?);
        let a_dag_a = raise(&lower(&z))?;
        let defect = aa_dag.sub(&a_dag_a).sub(&z.scale(target.into()));
        worst = worst.max(defect.max_abs());
    }
    Ok(worst)
}

/// Same as [`commutator_defect`] but also applying the truncated `a⁺` to
/// the edge slot `Z_{N_max}`. The edge contributes `ħ(N_max+1)`.
pub fn commutator_defect_with_edge(n_max: usize, hbar: f64) -> Result<f64, FockError> {
    let mut worst = commutator_defect(n_max, hbar)?;
    let z = FockVector::basis(n_max, n_max, hbar)?;
    let aa_dag = lower(&raise_truncating(&z));
    let a_dag_a = raise_truncating(&lower(&z));
    let defect = aa_dag.sub(&a_dag_a).sub(&z.scale(hbar.into()));
    worst = worst.max(defect.max_abs());
    Ok(worst)
}

/// `Ĥ f` for `Ĥ = ω λ a⁺a + ½ ω λ ħ_rep`, where `ħ_rep = f.hbar`; for an
/// unrescaled vector this is `ω a⁺a + ½ωħ`, and `Z_n` has eigenvalue
/// `ωħ(n + ½)` in every representation.
pub fn hamiltonian_apply(f: &FockVector, omega: f64) -> FockVector {
    let scale = omega * f.lambda;
    let mut out = f.clone();
    for (n, c) in out.coeffs.iter_mut().enumerate() {
        *c *= scale * f.hbar * (n as f64 + 0.5);
    }
    out
}

/// Eigenvalue of `Ĥ` on `Z_n` obtained by applying [`hamiltonian_apply`].
pub fn energy_level(n: usize, omega: f64, hbar: f64, lambda: f64) -> Result<f64, FockError> {
    let z = rescale_lambda(&FockVector::basis(n, n, hbar)?, lambda)?;
    Ok(hamiltonian_apply(&z, omega).coeffs[n].re)
}

/// Non-canonical rescaling `a_λ = a/√λ`: the same coefficients in the
/// representation whose commutator is `ħ/λ`.
pub fn rescale_lambda(f: &FockVector, lambda: f64) -> Result<FockVector, FockError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(FockError::BadLambda(lambda));
    }
    Ok(FockVector { coeffs: f.coeffs.clone(), hbar: f.hbar / lambda, lambda: f.lambda * lambda })
}

/// `Ψ_0(q), …, Ψ_{n_max}(q)` from the normalised three-term recurrence
/// `Ψ_{n+1} = √(2/(n+1)) q Ψ_n − √(n/(n+1)) Ψ_{n−1}`.
pub fn hermite_functions(n_max: usize, q: f64) -> Result<Vec<f64>, FockError> {
    if n_max > HERMITE_MAX_ORDER {
        return Err(FockError::HermiteOrder(n_max));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * q * q).exp();
    for n in 0..=n_max {
        out.push(cur);
        let next = (2.0 / (n + 1) as f64).sqrt() * q * cur - (n as f64 / (n + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    Ok(out)
}

pub fn hermite_function(n: usize, q: f64) -> Result<f64, FockError> {
    Ok(hermite_functions(n, q)?[n])
}

/// `Ψ_n^ħ(q) = ħ^{-1/4} Ψ_n(q/√ħ)` for all `n ≤ n_max`.
pub fn scaled_hermite_functions(n_max: usize, q: f64, hbar: f64) -> Result<Vec<f64>, FockError> {
    let s = hbar.sqrt();
    let mut v = hermite_functions(n_max, q / s)?;
    let k = hbar.powf(-0.25);
    v.iter_mut().for_each(|x| *x *= k);
    Ok(v)
}

/// Grid used for Hermite-function orthonormality checks.
pub fn default_position_grid() -> UniformGrid {
    UniformGrid::symmetric(16.0, 641).expect("static grid")
}

/// Smallest `N` with the Bargmann-series tail beyond `N` below the
/// tolerance, using `|Ψ_n| ≤ π^{-1/4}` and a geometric bound on `|z|ⁿ/√n!`.
pub fn kernel_tail_bound(modulus: f64, n_max: usize) -> f64 {
    // term_{n} = |z|^n / √n! for n = n_max + 1
    let n = n_max + 1;
    let log_term = n as f64 * modulus.max(1e-300).ln() - 0.5 * ln_factorial(n);
    let term = if modulus == 0.0 { 0.0 } else { log_term.exp() };
    let ratio = modulus / ((n + 1) as f64).sqrt();
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    PI.powf(-0.25) * term / (1.0 - ratio)
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Smallest truncation meeting [`KERNEL_TAIL_TOLERANCE`] at `|z|`.
pub fn kernel_truncation_for(modulus: f64) -> usize {
    (0..=HERMITE_MAX_ORDER)
        .find(|&n| kernel_tail_bound(modulus, n) <= KERNEL_TAIL_TOLERANCE)
        .unwrap_or(HERMITE_MAX_ORDER)
}

/// `U(z, q) = Σ_{n ≤ N_max} Z_n(z) Ψ_n(q)` at `ħ = 1`.
pub fn bargmann_kernel(z: Complex64, q: f64, n_max: usize) -> Result<Complex64, FockError> {
    let tail = kernel_tail_bound(z.norm(), n_max);
    if tail > KERNEL_TAIL_TOLERANCE {
        return Err(FockError::KernelTail { tail, modulus: z.norm(), suggested: kernel_truncation_for(z.norm()) });
    }
    let psi = hermite_functions(n_max, q)?;
    let mut zn = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for (n, p) in psi.iter().enumerate() {
        sum += zn * *p;
        zn = zn * z / ((n + 1) as f64).sqrt();
    }
    Ok(sum)
}

/// `∫ dq U(z, q) conj(U(z′, q))` by the trapezoidal rule on `grid`, with
/// the truncation chosen for the larger modulus. Equals `e^{z z̄′}` when
/// the grid covers the kernels.
pub fn kernel_overlap(z: Complex64, zp: Complex64, grid: UniformGrid) -> Result<Complex64, FockError> {
    let n_max = kernel_truncation_for(z.norm().max(zp.norm()));
    let n = grid.len;
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, q) in grid.points().enumerate() {
        sum += bargmann_kernel(z, q, n_max)? * bargmann_kernel(zp, q, n_max)?.conj() * trapezoid_weight(i, n);
    }
    Ok(sum * grid.spacing)
}

/// `ψ(q) = Σ c_n Ψ_n^ħ(q)` on `grid`.
pub fn to_position(f: &FockVector, grid: UniformGrid) -> Result<GridWaveFunction, FockError> {
    let phys_hbar = f.hbar;
    let values = grid
        .points()
        .map(|q| {
            let psi = scaled_hermite_functions(f.n_max(), q, phys_hbar)?;
            Ok(f.coeffs.iter().zip(&psi).map(|(c, p)| c * *p).sum())
        })
        .collect::<Result<Vec<Complex64>, FockError>>()?;
    Ok(GridWaveFunction::new(grid, values)?)
}

/// Coefficients `c_n = ∫ Ψ_n^ħ(q) ψ(q) dq` for `n ≤ n_max`.
pub fn from_position(psi: &GridWaveFunction, n_max: usize, hbar: f64) -> Result<FockVector, FockError> {
    check_hbar(hbar)?;
    psi.check_position_tail()?;
    let n = psi.values.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for (i, q) in psi.grid.points().enumerate() {
        let basis = scaled_hermite_functions(n_max, q, hbar)?;
        let w = trapezoid_weight(i, n) * psi.grid.spacing;
        for (c, b) in coeffs.iter_mut().zip(&basis) {
            *c += psi.values[i] * (b * w);
        }
    }
    FockVector::new(coeffs, hbar)
}

/// `z(t) = z0 e^{−iωt}`, the solution of `ż = −iωz`.
pub fn classical_trajectory(z0: Complex64, omega: f64, t: f64) -> Complex64 {
    z0 * Complex64::from_polar(1.0, -omega * t)
}

/// Evolves `f` under `Ĥ` for time `t` (units with the physical ħ):
/// `c_n ↦ c_n e^{−iω(n+½)t}`.
pub fn evolve(f: &FockVector, omega: f64, t: f64) -> FockVector {
    let mut out = f.clone();
    for (n, c) in out.coeffs.iter_mut().enumerate() {
        *c *= Complex64::from_polar(1.0, -omega * (n as f64 + 0.5) * t);
    }
    out
}

/// `⟨f| a |f⟩ / ⟨f|f⟩`.
pub fn lowering_expectation(f: &FockVector) -> Complex64 {
    let af = lower(f);
    let num: Complex64 = af.coeffs.iter().zip(&f.coeffs).map(|(a, c)| c.conj() * a).sum();
    num / f.norm_sqr()
}
