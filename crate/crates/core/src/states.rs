//! Uncertainty widths, momentum eigenstates on a circle, single- and
//! two-particle Fock states with profiles on disjoint regions, and the
//! one-particle marginal of an antisymmetrised two-particle amplitude.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::chain::{ChainError, MultiModeFockVector};
use crate::charfn::{
    momentum_amplitude, CharFnError, DensityGrid, GridWaveFunction, GUARD_FRACTION, NORM_TOLERANCE, TAIL_TOLERANCE,
};
use crate::numerics::{trapezoid, trapezoid_weight};

/// Profiles count as disjoint when `Σ_i |f1_i|·|f2_i|` (times the grid
/// spacing for grid functions) is at most this.
pub const OVERLAP_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatesError {
    #[error(transparent)]
    Grid(#[from] CharFnError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("wave function must be normalised (‖ψ‖² = {0})")]
    NotNormalized(f64),
    #[error("profiles declared disjoint overlap by {0:e}")]
    Overlap(f64),
    #[error("profile is identically zero")]
    ZeroProfile,
    #[error("profiles live on different index sets ({0} vs {1} points)")]
    LengthMismatch(usize, usize),
    #[error("region [{lo}, {hi}] is empty or not finite")]
    BadRegion { lo: f64, hi: f64 },
}

/// Root-mean-square widths `(Δx, Δk)` of a normalised wave function.
/// Δk comes from the discrete Fourier transform on the matching wavenumber
/// lattice; both domains must pass the tail-mass guard.
pub fn rms_widths(psi: &GridWaveFunction) -> Result<(f64, f64), StatesError> {
    let norm = psi.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(StatesError::NotNormalized(norm));
    }
    psi.check_position_tail()?;
    let dens: Vec<f64> = psi.values.iter().map(|v| v.norm_sqr()).collect();
    let dx = psi.grid.spacing;
    let xs: Vec<f64> = psi.grid.points().collect();
    let m1 = trapezoid(&dens.iter().zip(&xs).map(|(d, x)| d * x).collect::<Vec<_>>(), dx) / norm;
    let m2 = trapezoid(&dens.iter().zip(&xs).map(|(d, x)| d * (x - m1).powi(2)).collect::<Vec<_>>(), dx) / norm;

    let (lattice, amp) = momentum_amplitude(psi);
    let kd: Vec<f64> = amp.iter().map(|v| v.norm_sqr()).collect();
    let total: f64 = kd.iter().sum();
    let band = ((kd.len() as f64 * GUARD_FRACTION).ceil() as usize).max(1);
    let edge: f64 = kd[..band].iter().chain(&kd[kd.len() - band..]).sum();
    if edge / total > TAIL_TOLERANCE {
        return Err(CharFnError::TailMass { domain: "momentum", tail_mass: edge / total, half_width: -lattice.origin }.into());
    }
    let ks: Vec<f64> = lattice.points().collect();
    let k1 = kd.iter().zip(&ks).map(|(d, k)| d * k).sum::<f64>() / total;
    let k2 = kd.iter().zip(&ks).map(|(d, k)| d * (k - k1).powi(2)).sum::<f64>() / total;
    Ok((m2.sqrt(), k2.sqrt()))
}

/// Widths of the momentum eigenstate `e^{imφ}/√(2π)` on the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleUncertainty {
    /// Spread of the angular momentum `p_φ`, in units of ħ.
    pub momentum: f64,
    /// RMS deviation of the angle distribution on `[−π, π)`.
    pub angle_rms: f64,
    /// Length of the interval carrying the angle distribution.
    pub angle_support: f64,
}

pub fn circle_uncertainty(momentum_index: i64) -> CircleUncertainty {
    // single Fourier coefficient at m: the p_φ distribution is a point mass
    let coeffs = [(momentum_index, 1.0f64)];
    let mean = coeffs.iter().map(|(m, w)| *m as f64 * w).sum::<f64>();
    let var = coeffs.iter().map(|(m, w)| w * (*m as f64 - mean).powi(2)).sum::<f64>();
    // |e^{imφ}|² / 2π is uniform on [−π, π), whose variance is (2π)²/12
    CircleUncertainty { momentum: var.sqrt(), angle_rms: 2.0 * PI / 12f64.sqrt(), angle_support: 2.0 * PI }
}

/// Complex coefficients over a finite set of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    coeffs: Vec<Complex64>,
    support: Vec<usize>,
}

impl ModeProfile {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, StatesError> {
        let support: Vec<usize> =
            coeffs.iter().enumerate().filter(|(_, c)| **c != Complex64::default()).map(|(i, _)| i).collect();
        if support.is_empty() {
            return Err(StatesError::ZeroProfile);
        }
        Ok(Self { coeffs, support })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Sites with a nonzero coefficient.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn sites(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ_i |f_i|·|g_i|`.
    pub fn overlap(&self, other: &Self) -> Result<f64, StatesError> {
        if self.sites() != other.sites() {
            return Err(StatesError::LengthMismatch(self.sites(), other.sites()));
        }
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.norm() * b.norm()).sum())
    }

    pub fn supports_intersect(&self, other: &Self) -> bool {
        self.support.iter().any(|i| other.support.binary_search(i).is_ok())
    }

    fn check_disjoint(&self, other: &Self) -> Result<(), StatesError> {
        let o = self.overlap(other)?;
        if o > OVERLAP_TOLERANCE {
            return Err(StatesError::Overlap(o));
        }
        Ok(())
    }
}

/// `A⁺(f) Φ = ħ^{−1/2} Σ_i f_i â_i⁺ Φ`, normalised so that `A⁺(f)|0⟩` has
/// norm `‖f‖` for every ħ.
pub fn create(f: &ModeProfile, phi: &MultiModeFockVector) -> Result<MultiModeFockVector, StatesError> {
    if f.sites() != phi.modes() {
        return Err(StatesError::LengthMismatch(f.sites(), phi.modes()));
    }
    let (mc, tc) = phi.cutoffs();
    let mut out = MultiModeFockVector::zero(phi.modes(), phi.hbar(), mc, tc)?;
    let s = 1.0 / phi.hbar().sqrt();
    for &i in f.support() {
        out = out.add(&phi.raise(i)?.scale(f.coeffs()[i] * s))?;
    }
    Ok(out)
}

/// Single-particle state `A⁺(f1 + f2)|0⟩` for profiles on disjoint sites.
pub fn exotic_state(f1: &ModeProfile, f2: &ModeProfile, hbar: f64) -> Result<MultiModeFockVector, StatesError> {
    f1.check_disjoint(f2)?;
    let sum: Vec<Complex64> = f1.coeffs().iter().zip(f2.coeffs()).map(|(a, b)| a + b).collect();
    let vac = MultiModeFockVector::vacuum(f1.sites(), hbar, 2, 2)?;
    create(&ModeProfile::new(sum)?, &vac)
}

/// Two-particle state `A⁺(f1) A⁺(f2)|0⟩` for profiles on disjoint sites.
pub fn two_particle_state(f1: &ModeProfile, f2: &ModeProfile, hbar: f64) -> Result<MultiModeFockVector, StatesError> {
    f1.check_disjoint(f2)?;
    let vac = MultiModeFockVector::vacuum(f1.sites(), hbar, 2, 2)?;
    create(f1, &create(f2, &vac)?)
}

/// `⟨Φ| â_i⁺ â_i |Φ⟩ / ħ` per site, without normalising by `‖Φ‖²`.
pub fn site_density(phi: &MultiModeFockVector) -> Result<Vec<f64>, StatesError> {
    (0..phi.modes()).map(|i| Ok(phi.lower(i)?.norm_sqr() / phi.hbar())).collect()
}

/// Closed interval of the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, StatesError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(StatesError::BadRegion { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Marginal `∫ dx₂ |Ψ(x₁, x₂)|²` of `Ψ = (f1(x₁)f2(x₂) − f2(x₁)f1(x₂))/√2`,
/// integrated over `x₂` on the grid, and its mass inside `region`.
pub fn singlet_marginal(
    f1: &GridWaveFunction,
    f2: &GridWaveFunction,
    region: Interval,
) -> Result<(DensityGrid, f64), StatesError> {
    if f1.grid != f2.grid {
        return Err(StatesError::LengthMismatch(f1.grid.len, f2.grid.len));
    }
    for f in [f1, f2] {
        let n = f.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(StatesError::NotNormalized(n));
        }
    }
    let grid = f1.grid;
    let overlap: f64 = f1.values.iter().zip(&f2.values).map(|(a, b)| a.norm() * b.norm()).sum::<f64>() * grid.spacing;
    if overlap > OVERLAP_TOLERANCE {
        return Err(StatesError::Overlap(overlap));
    }
    let n = grid.len;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let row: Vec<f64> = (0..n)
                .map(|j| ((f1.values[i] * f2.values[j] - f2.values[i] * f1.values[j]) * s).norm_sqr())
                .collect();
            trapezoid(&row, grid.spacing)
        })
        .collect();
    let mass = values
        .iter()
        .enumerate()
        .filter(|(i, _)| region.contains(grid.point(*i)))
        .map(|(i, v)| v * trapezoid_weight(i, n))
        .sum::<f64>()
        * grid.spacing;
    Ok((DensityGrid { grid, values, renormalized: false }, mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::UniformGrid;
    use crate::fock::hermite_function;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gaussian(sigma: f64, center: f64, k0: f64) -> impl Fn(f64) -> Complex64 {
        let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
        move |x| Complex64::from_polar(norm * (-(x - center).powi(2) / (4.0 * sigma * sigma)).exp(), k0 * x)
    }

    fn grid() -> UniformGrid {
        UniformGrid::symmetric(20.0, 1024).unwrap()
    }

    #[test]
    fn gaussian_saturates_the_bound() {
        let psi = GridWaveFunction::from_fn(grid(), gaussian(1.0, 0.5, 1.5));
        let (dx, dk) = rms_widths(&psi).unwrap();
        assert!((dx * dk - 0.5).abs() < 1e-6, "{}", dx * dk);
        assert!((dx - 1.0).abs() < 1e-6);
        let wide = GridWaveFunction::from_fn(grid(), gaussian(2.0, 0.5, 1.5));
        let (dx2, dk2) = rms_widths(&wide).unwrap();
        assert!((dx2 / dx - 2.0).abs() < 1e-6);
        assert!((dk2 / dk - 0.5).abs() < 1e-6);
        assert!((dx2 * dk2 - 0.5).abs() < 1e-6);
    }

    #[test]
    fn hermite_widths() {
        for n in 0..=6 {
            let psi = GridWaveFunction::from_fn(grid(), |x| c(hermite_function(n, x).unwrap(), 0.0));
            let (dx, dk) = rms_widths(&psi).unwrap();
            // oracle: ⟨x²⟩ = ⟨k²⟩ = n + ½ for Ψ_n
            let moment: Vec<f64> = grid().points().map(|x| x * x * hermite_function(n, x).unwrap().powi(2)).collect();
            let x2 = trapezoid(&moment, grid().spacing);
            assert!((x2 - (n as f64 + 0.5)).abs() < 1e-9);
            assert!((dx * dk - (n as f64 + 0.5)).abs() < 1e-6, "n = {n}: {}", dx * dk);
        }
    }

    #[test]
    fn width_guards() {
        let psi = GridWaveFunction::from_fn(grid(), gaussian(1.0, 0.0, 0.0));
        assert!(matches!(rms_widths(&psi.scaled(c(2.0, 0.0))), Err(StatesError::NotNormalized(_))));
        let edge = GridWaveFunction::from_fn(grid(), gaussian(1.0, 18.0, 0.0)).normalized().unwrap();
        assert!(matches!(rms_widths(&edge), Err(StatesError::Grid(CharFnError::TailMass { domain: "position", .. }))));
        let fast = GridWaveFunction::from_fn(grid(), gaussian(1.0, 0.0, 75.0));
        assert!(matches!(rms_widths(&fast), Err(StatesError::Grid(CharFnError::TailMass { domain: "momentum", .. }))));
    }

    #[test]
    fn circle_examples() {
        for m in [-3, 0, 1, 7] {
            let u = circle_uncertainty(m);
            assert_eq!(u.momentum, 0.0);
            assert_eq!(u.angle_support, 2.0 * PI);
            // oracle: midpoint quadrature of φ² against the uniform density
            let n = 200_000;
            let h = 2.0 * PI / n as f64;
            let var: f64 = (0..n).map(|i| (-PI + (i as f64 + 0.5) * h).powi(2) * h / (2.0 * PI)).sum();
            assert!((u.angle_rms - var.sqrt()).abs() < 1e-10);
            assert!((u.angle_rms - 2.0 * PI / 12f64.sqrt()).abs() < 1e-12);
        }
    }

    fn profiles() -> (ModeProfile, ModeProfile) {
        let f1 = ModeProfile::new(vec![c(0.3, 0.1), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let f2 = ModeProfile::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.4), c(0.6, 0.0)]).unwrap();
        (f1, f2)
    }

    #[test]
    fn exotic_state_is_one_particle() {
        let (f1, f2) = profiles();
        for hbar in [0.5, 1.0, 2.0] {
            let phi = exotic_state(&f1, &f2, hbar).unwrap();
            let (mean, var) = phi.number_moments().unwrap();
            assert_eq!(mean, 1.0);
            assert!(var.abs() < 1e-12);
            assert!((phi.norm_sqr() - (f1.norm_sqr() + f2.norm_sqr())).abs() < 1e-15);
            let dens = site_density(&phi).unwrap();
            for i in 0..5 {
                let expect = f1.coeffs()[i].norm_sqr() + f2.coeffs()[i].norm_sqr();
                assert!((dens[i] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn two_particle_state_examples() {
        let (f1, f2) = profiles();
        let two = two_particle_state(&f1, &f2, 1.0).unwrap();
        let (mean, var) = two.number_moments().unwrap();
        assert!((mean - 2.0).abs() < 1e-14);
        assert!(var.abs() < 1e-12);
        let one = exotic_state(&f1, &f2, 1.0).unwrap();
        assert_eq!(crate::chain::fock_inner(&one, &two).unwrap(), c(0.0, 0.0));
        // oracle: occupation-basis expansion Σ_{i∈Ω1, j∈Ω2} f1_i f2_j |1_i 1_j⟩
        let mut norm = 0.0;
        for &i in f1.support() {
            for &j in f2.support() {
                let mut occ = vec![0; 5];
                occ[i] = 1;
                occ[j] = 1;
                let expect = f1.coeffs()[i] * f2.coeffs()[j];
                assert!((two.get(&occ) - expect).norm() < 1e-15);
                norm += expect.norm_sqr();
            }
        }
        assert!((two.norm_sqr() - norm).abs() < 1e-15);
        assert!((two.norm_sqr().sqrt() - f1.norm_sqr().sqrt() * f2.norm_sqr().sqrt()).abs() < 1e-15);
    }

    #[test]
    fn overlapping_profiles_rejected() {
        let f1 = ModeProfile::new(vec![c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
        let f2 = ModeProfile::new(vec![c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(f1.supports_intersect(&f2));
        assert!(matches!(exotic_state(&f1, &f2, 1.0), Err(StatesError::Overlap(_))));
        assert!(matches!(two_particle_state(&f1, &f2, 1.0), Err(StatesError::Overlap(_))));
        assert!(matches!(ModeProfile::new(vec![c(0.0, 0.0)]), Err(StatesError::ZeroProfile)));
    }

    /// `cos²` bump of half-width `w` centred at `x0`, zero outside.
    pub(crate) fn bump(x0: f64, w: f64) -> impl Fn(f64) -> Complex64 {
        move |x| {
            let u = (x - x0) / w;
            if u.abs() < 1.0 {
                c((0.5 * PI * u).cos().powi(2), 0.0)
            } else {
                c(0.0, 0.0)
            }
        }
    }

    #[test]
    fn singlet_marginal_examples() {
        let g = UniformGrid::symmetric(12.0, 481).unwrap();
        let f1 = GridWaveFunction::from_fn(g, bump(-6.0, 3.0)).normalized().unwrap();
        let f2 = GridWaveFunction::from_fn(g, bump(5.0, 2.0)).normalized().unwrap();
        let (marg, mass) = singlet_marginal(&f1, &f2, Interval::new(-10.0, 0.0).unwrap()).unwrap();
        assert!((mass - 0.5).abs() < 1e-10);
        let (_, full) = singlet_marginal(&f1, &f2, Interval::new(-12.0, 12.0).unwrap()).unwrap();
        assert!((full - 1.0).abs() < 1e-10);
        for (i, v) in marg.values.iter().enumerate() {
            let closed = 0.5 * (f1.values[i].norm_sqr() + f2.values[i].norm_sqr());
            assert!((v - closed).abs() < 1e-10);
        }
        let f3 = GridWaveFunction::from_fn(g, bump(-5.0, 3.0)).normalized().unwrap();
        assert!(matches!(singlet_marginal(&f1, &f3, Interval::new(-1.0, 1.0).unwrap()), Err(StatesError::Overlap(_))));
        assert!(Interval::new(1.0, 1.0).is_err());
    }

    fn packet(parts: &[(f64, f64, f64, f64)]) -> GridWaveFunction {
        GridWaveFunction::from_fn(grid(), |x| {
            parts.iter().map(|&(a, x0, s, k)| Complex64::from_polar(a * (-(x - x0).powi(2) / (4.0 * s * s)).exp(), k * x)).sum()
        })
        .normalized()
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn uncertainty_bound(parts in prop::collection::vec((0.1..1.0f64, -4.0..4.0f64, 0.5..2.0f64, -3.0..3.0f64), 1..4)) {
            let (dx, dk) = rms_widths(&packet(&parts)).unwrap();
            prop_assert!(dx * dk >= 0.5 - 1e-9, "{}", dx * dk);
        }

        #[test]
        fn number_dichotomy(a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6), split in 1usize..5) {
            let mut c1 = vec![c(0.0, 0.0); 6];
            let mut c2 = vec![c(0.0, 0.0); 6];
            for (i, &(re, im)) in a.iter().enumerate() {
                if i < split { c1[i] = c(re, im) } else { c2[i] = c(re, im) }
            }
            let (Ok(f1), Ok(f2)) = (ModeProfile::new(c1), ModeProfile::new(c2)) else { return Ok(()) };
            let one = exotic_state(&f1, &f2, 1.0).unwrap();
            let two = two_particle_state(&f1, &f2, 1.0).unwrap();
            prop_assert_eq!(one.apply_number().unwrap().sub(&one).unwrap().max_abs(), 0.0);
            prop_assert!(two.apply_number().unwrap().sub(&two.scale(c(2.0, 0.0))).unwrap().max_abs() < 1e-15);
        }
    }
}
