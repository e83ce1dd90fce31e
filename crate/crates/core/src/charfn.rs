//! Characteristic functions of absolutely continuous distributions, computed
//! two ways: directly from the density `p = |ψ|²`, and as the
//! autocorrelation `f(t) = ∫ g(t+ξ) ḡ(ξ) dξ` of the amplitude's Fourier
//! transform `g(ξ) = (2π)^{-1/2} ∫ ψ(x) e^{iξx} dx`.
//!
//! Everything lives on uniform grids. Integrals in position space use the
//! trapezoidal rule; the ξ integral runs over one full period of the
//! sampled transform, `|ξ| ≤ π/dx`, unless a narrower window is requested.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::numerics::{trapezoid, trapezoid_weight};

/// Mass allowed outside the captured region of a grid.
pub const TAIL_TOLERANCE: f64 = 1e-8;
/// Fraction of a grid, at each end, treated as the tail guard band.
pub const GUARD_FRACTION: f64 = 0.05;
/// A wave function counts as normalised when `|‖ψ‖² − 1| ≤` this.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharFnError {
    #[error("wave function has zero norm")]
    ZeroNorm,
    #[error("grid needs spacing > 0 and at least 2 points (got spacing {spacing}, {len} points)")]
    BadGrid { spacing: f64, len: usize },
    #[error("sample count {got} does not match grid length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(
        "Fourier window |ξ| <= {half_width} misses {tail_mass:e} of ‖g‖² (limit {TAIL_TOLERANCE:e}); \
         extend the window to at least |ξ| <= {required_half_width}"
    )]
    InsufficientCoverage { half_width: f64, tail_mass: f64, required_half_width: f64 },
    #[error(
        "{domain} tail mass {tail_mass:e} exceeds {TAIL_TOLERANCE:e}; extend the {domain} grid \
         (currently half-width {half_width})"
    )]
    TailMass { domain: &'static str, tail_mass: f64, half_width: f64 },
}

/// Uniform grid `x_i = origin + i·spacing`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub origin: f64,
    pub spacing: f64,
    pub len: usize,
}

impl UniformGrid {
    pub fn new(origin: f64, spacing: f64, len: usize) -> Result<Self, CharFnError> {
        if !(spacing > 0.0) || len < 2 {
            return Err(CharFnError::BadGrid { spacing, len });
        }
        Ok(Self { origin, spacing, len })
    }

    /// `len` points spanning `[-half_width, half_width]` inclusive.
    pub fn symmetric(half_width: f64, len: usize) -> Result<Self, CharFnError> {
        if len < 2 {
            return Err(CharFnError::BadGrid { spacing: 0.0, len });
        }
        Self::new(-half_width, 2.0 * half_width / (len - 1) as f64, len)
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.point(i))
    }

    pub fn end(&self) -> f64 {
        self.point(self.len - 1)
    }
}

/// Complex samples of a wave function on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWaveFunction {
    pub grid: UniformGrid,
    pub values: Vec<Complex64>,
}

impl GridWaveFunction {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self, CharFnError> {
        if values.len() != grid.len {
            return Err(CharFnError::LengthMismatch { expected: grid.len, got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: UniformGrid, f: F) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    /// `∫|ψ|² dx` by the trapezoidal rule.
    pub fn norm_sqr(&self) -> f64 {
        let dens: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        trapezoid(&dens, self.grid.spacing)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn normalized(&self) -> Result<Self, CharFnError> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(CharFnError::ZeroNorm);
        }
        let s = 1.0 / n.sqrt();
        Ok(Self { grid: self.grid, values: self.values.iter().map(|v| v * s).collect() })
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * s).collect() }
    }

    /// `∫ conj(self)·other dx`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let n = self.values.len();
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| a.conj() * b * trapezoid_weight(i, n))
            .sum::<Complex64>()
            * self.grid.spacing
    }

    /// Fraction of `∫|ψ|²` sitting in the guard bands at both grid ends.
    pub fn edge_mass(&self) -> f64 {
        let n = self.values.len();
        let band = ((n as f64 * GUARD_FRACTION).ceil() as usize).max(1);
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        let edge: f64 = self.values[..band]
            .iter()
            .chain(&self.values[n - band..])
            .map(|v| v.norm_sqr())
            .sum();
        if total > 0.0 {
            edge / total
        } else {
            0.0
        }
    }

    /// Errors when more than [`TAIL_TOLERANCE`] of the mass is in the
    /// position-space guard bands.
    pub fn check_position_tail(&self) -> Result<(), CharFnError> {
        let tail_mass = self.edge_mass();
        if tail_mass > TAIL_TOLERANCE {
            let half_width = 0.5 * (self.grid.end() - self.grid.origin);
            return Err(CharFnError::TailMass { domain: "position", tail_mass, half_width });
        }
        Ok(())
    }
}

/// Nonnegative density samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub grid: UniformGrid,
    pub values: Vec<f64>,
    /// Whether the source amplitude had to be rescaled to unit norm.
    pub renormalized: bool,
}

impl DensityGrid {
    pub fn total(&self) -> f64 {
        trapezoid(&self.values, self.grid.spacing)
    }
}

/// Values `f(t)` of a characteristic function on a `t` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicSamples {
    pub t: UniformGrid,
    pub values: Vec<Complex64>,
}

impl CharacteristicSamples {
    pub fn max_difference(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `p_i = |ψ_i|²`, after normalising `ψ` if needed.
pub fn density_from_amplitude(psi: &GridWaveFunction) -> Result<DensityGrid, CharFnError> {
    let norm = psi.norm_sqr();
    if !(norm > 0.0) {
        return Err(CharFnError::ZeroNorm);
    }
    let renormalized = (norm - 1.0).abs() > NORM_TOLERANCE;
    let scale = if renormalized { 1.0 / norm } else { 1.0 };
    Ok(DensityGrid {
        grid: psi.grid,
        values: psi.values.iter().map(|v| v.norm_sqr() * scale).collect(),
        renormalized,
    })
}

/// `f(t) = ∫ e^{itx} p(x) dx` by trapezoidal quadrature.
pub fn characteristic_function(p: &DensityGrid, t_grid: UniformGrid) -> CharacteristicSamples {
    let n = p.values.len();
    let values = t_grid
        .points()
        .map(|t| {
            p.values
                .iter()
                .enumerate()
                .map(|(j, &pj)| Complex64::from_polar(pj * trapezoid_weight(j, n), t * p.grid.point(j)))
                .sum::<Complex64>()
                * p.grid.spacing
        })
        .collect();
    CharacteristicSamples { t: t_grid, values }
}

/// `g(ξ) = (2π)^{-1/2} Σ_j ψ_j e^{iξx_j} dx` at a single point.
pub fn fourier_at(psi: &GridWaveFunction, xi: f64) -> Complex64 {
    let n = psi.values.len();
    let s: Complex64 = psi
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| v * Complex64::from_polar(trapezoid_weight(j, n), xi * psi.grid.point(j)))
        .sum();
    s * psi.grid.spacing / (2.0 * PI).sqrt()
}

/// The ξ lattice `ξ_m = −π/dx + m·2π/(N dx)`, one period of the sampled
/// transform.
pub fn xi_lattice(grid: &UniformGrid) -> UniformGrid {
    let n = grid.len;
    UniformGrid { origin: -PI / grid.spacing, spacing: 2.0 * PI / (n as f64 * grid.spacing), len: n }
}

/// `g(ξ_m + shift)` on the whole [`xi_lattice`], using rectangle weights.
/// Uses an FFT when the sample count is a power of two and direct
/// summation otherwise.
pub fn fourier_on_lattice(psi: &GridWaveFunction, shift: f64) -> Vec<Complex64> {
    if psi.values.len().is_power_of_two() {
        fourier_on_lattice_fft(psi, shift)
    } else {
        fourier_on_lattice_direct(psi, shift)
    }
}

pub fn fourier_on_lattice_direct(psi: &GridWaveFunction, shift: f64) -> Vec<Complex64> {
    let lattice = xi_lattice(&psi.grid);
    let norm = psi.grid.spacing / (2.0 * PI).sqrt();
    lattice
        .points()
        .map(|xi| {
            psi.values
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, (xi + shift) * psi.grid.point(j)))
                .sum::<Complex64>()
                * norm
        })
        .collect()
}

pub fn fourier_on_lattice_fft(psi: &GridWaveFunction, shift: f64) -> Vec<Complex64> {
    let n = psi.values.len();
    let dx = psi.grid.spacing;
    let x0 = psi.grid.origin;
    let lattice = xi_lattice(&psi.grid);
    // (ξ_m + s)(x0 + l dx) = (ξ_m + s) x0 + s l dx − π l + 2π m l / N
    let mut buf: Vec<Complex64> = psi
        .values
        .iter()
        .enumerate()
        .map(|(l, v)| v * Complex64::from_polar(1.0, shift * l as f64 * dx - PI * l as f64))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let norm = dx / (2.0 * PI).sqrt();
    buf.iter()
        .enumerate()
        .map(|(m, v)| v * Complex64::from_polar(norm, (lattice.point(m) + shift) * x0))
        .collect()
}

/// Options for [`autocorrelation_charfn_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AutocorrelationOptions {
    /// Half-width of the ξ integration window; `None` means the full
    /// period `π/dx`.
    pub xi_half_width: Option<f64>,
}

/// `f(t) = ∫ g(t+ξ) ḡ(ξ) dξ` over the full ξ period.
pub fn autocorrelation_charfn(psi: &GridWaveFunction, t_grid: UniformGrid) -> Result<CharacteristicSamples, CharFnError> {
    autocorrelation_charfn_with(psi, t_grid, AutocorrelationOptions::default())
}

pub fn autocorrelation_charfn_with(
    psi: &GridWaveFunction,
    t_grid: UniformGrid,
    opts: AutocorrelationOptions,
) -> Result<CharacteristicSamples, CharFnError> {
    if !(psi.norm_sqr() > 0.0) {
        return Err(CharFnError::ZeroNorm);
    }
    let lattice = xi_lattice(&psi.grid);
    let nyquist = PI / psi.grid.spacing;
    let half_width = opts.xi_half_width.unwrap_or(nyquist).min(nyquist);
    let g0 = fourier_on_lattice(psi, 0.0);
    let inside: Vec<bool> = lattice.points().map(|xi| xi.abs() <= half_width + 1e-12 * nyquist).collect();

    let total: f64 = g0.iter().map(|g| g.norm_sqr()).sum();
    let captured: f64 = g0.iter().zip(&inside).filter(|(_, &k)| k).map(|(g, _)| g.norm_sqr()).sum();
    let tail_mass = 1.0 - captured / total;
    if tail_mass > TAIL_TOLERANCE {
        // Smallest symmetric window meeting the tolerance.
        let mut order: Vec<(f64, f64)> = lattice.points().zip(&g0).map(|(xi, g)| (xi.abs(), g.norm_sqr())).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = 0.0;
        let mut required_half_width = nyquist;
        for (r, m) in order {
            acc += m;
            if 1.0 - acc / total <= TAIL_TOLERANCE {
                required_half_width = r;
                break;
            }
        }
        return Err(CharFnError::InsufficientCoverage { half_width, tail_mass, required_half_width });
    }

    let values = t_grid
        .points()
        .map(|t| {
            let gt = fourier_on_lattice(psi, t);
            gt.iter()
                .zip(&g0)
                .zip(&inside)
                .filter(|(_, &k)| k)
                .map(|((a, b), _)| a * b.conj())
                .sum::<Complex64>()
                * lattice.spacing
        })
        .collect();
    Ok(CharacteristicSamples { t: t_grid, values })
}

/// Default `t` grid for [`verify_theorem`]: 101 points on `[−5, 5]`.
pub fn default_t_grid() -> UniformGrid {
    UniformGrid { origin: -5.0, spacing: 0.1, len: 101 }
}

/// Maximum difference between the density route and the autocorrelation
/// route over the default `t` grid.
pub fn verify_theorem(psi: &GridWaveFunction) -> Result<f64, CharFnError> {
    let t = default_t_grid();
    let direct = characteristic_function(&density_from_amplitude(psi)?, t);
    let auto = autocorrelation_charfn(psi, t)?;
    Ok(direct.max_difference(&auto))
}

/// Momentum-space amplitude `ψ̂(k) = (2π)^{-1/2} ∫ ψ(x) e^{−ikx} dx` on the
/// FFT wavenumber lattice `k_m = −π/dx + m·2π/(N dx)`.
pub fn momentum_amplitude(psi: &GridWaveFunction) -> (UniformGrid, Vec<Complex64>) {
    // ψ̂(k) = conj(g_{ψ̄}(k))
    let conj = GridWaveFunction { grid: psi.grid, values: psi.values.iter().map(|v| v.conj()).collect() };
    let values = fourier_on_lattice(&conj, 0.0).into_iter().map(|v| v.conj()).collect();
    (xi_lattice(&psi.grid), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaussian(sigma: f64, center: f64, k0: f64) -> impl Fn(f64) -> Complex64 {
        let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
        move |x| Complex64::from_polar(norm * (-(x - center).powi(2) / (4.0 * sigma * sigma)).exp(), k0 * x)
    }

    fn grid() -> UniformGrid {
        UniformGrid::symmetric(20.0, 1024).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(UniformGrid::new(0.0, 0.0, 10).is_err());
        assert!(UniformGrid::new(0.0, 1.0, 1).is_err());
        assert!(GridWaveFunction::new(grid(), vec![]).is_err());
    }

    #[test]
    fn phase_invariance_is_exact() {
        let psi = GridWaveFunction::from_fn(grid(), gaussian(1.0, 0.3, 0.0));
        let rotated = psi.scaled(Complex64::from_polar(1.0, 0.7));
        let a = density_from_amplitude(&psi).unwrap();
        let b = density_from_amplitude(&rotated).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 4.0 * f64::EPSILON * x.abs());
        }
    }

    #[test]
    fn gaussian_density_variance_halves() {
        let sigma = 1.3;
        let psi = GridWaveFunction::from_fn(grid(), gaussian(sigma, 0.0, 0.0));
        let p = density_from_amplitude(&psi).unwrap();
        assert!(!p.renormalized);
        let var = |vals: &[f64]| {
            let tot = trapezoid(vals, psi.grid.spacing);
            let m2: Vec<f64> = vals.iter().zip(psi.grid.points()).map(|(v, x)| v * x * x).collect();
            trapezoid(&m2, psi.grid.spacing) / tot
        };
        let modulus: Vec<f64> = psi.values.iter().map(|v| v.norm()).collect();
        // closed form: |ψ| ∝ e^{-x²/(4σ²)} has variance parameter 2σ², p has σ²
        assert!((var(&modulus) - 2.0 * sigma * sigma).abs() < 1e-9);
        assert!((var(&p.values) - sigma * sigma).abs() < 1e-9);
    }

    #[test]
    fn disjoint_bumps_have_no_cross_term() {
        let f1 = gaussian(0.5, -6.0, 1.0);
        let f2 = gaussian(0.5, 6.0, -2.0);
        let g = grid();
        let psi = GridWaveFunction::from_fn(g, |x| (f1(x) + f2(x)) / 2f64.sqrt());
        let p = density_from_amplitude(&psi).unwrap();
        for (i, x) in g.points().enumerate() {
            let expect = (f1(x).norm_sqr() + f2(x).norm_sqr()) / 2.0;
            assert!((p.values[i] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_norm_is_an_error() {
        let psi = GridWaveFunction::from_fn(grid(), |_| Complex64::new(0.0, 0.0));
        assert_eq!(density_from_amplitude(&psi), Err(CharFnError::ZeroNorm));
    }

    #[test]
    fn unnormalised_input_is_flagged() {
        let psi = GridWaveFunction::from_fn(grid(), |x| gaussian(1.0, 0.0, 0.0)(x) * 3.0);
        let p = density_from_amplitude(&psi).unwrap();
        assert!(p.renormalized);
        assert!((p.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn standard_gaussian_characteristic_function() {
        // p = N(0,1) ⇒ f(t) = e^{-t²/2}
        let psi = GridWaveFunction::from_fn(grid(), gaussian(1.0, 0.0, 0.0));
        let f = characteristic_function(&density_from_amplitude(&psi).unwrap(), default_t_grid());
        for (t, v) in f.t.points().zip(&f.values) {
            assert!((v - Complex64::from((-t * t / 2.0).exp())).norm() < 1e-6);
        }
        let mid = f.values[50];
        assert!((mid - 1.0).norm() < 1e-12);
        for v in &f.values {
            assert!(v.im.abs() < 1e-12, "symmetric density gives real f");
        }
    }

    #[test]
    fn fft_matches_direct_quadrature() {
        let psi = GridWaveFunction::from_fn(UniformGrid::symmetric(15.0, 256).unwrap(), gaussian(0.8, 0.5, 1.5));
        for &s in &[0.0, 0.37, -2.0] {
            let a = fourier_on_lattice_fft(&psi, s);
            let b = fourier_on_lattice_direct(&psi, s);
            let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(err < 1e-9, "shift {s}: {err}");
        }
    }

    #[test]
    fn lattice_matches_pointwise_transform() {
        let psi = GridWaveFunction::from_fn(UniformGrid::symmetric(15.0, 256).unwrap(), gaussian(0.8, 0.0, 0.0));
        let lat = xi_lattice(&psi.grid);
        let g = fourier_on_lattice(&psi, 0.0);
        // closed form for this Gaussian: g(ξ) = (2σ²/π)^{1/4} e^{-σ²ξ²}
        for (m, xi) in lat.points().enumerate().filter(|(_, xi)| xi.abs() < 4.0) {
            let exact = (2.0 * 0.64 / PI).powf(0.25) * (-0.64 * xi * xi).exp();
            assert!((g[m] - exact).norm() < 1e-10);
            assert!((fourier_at(&psi, xi) - exact).norm() < 1e-10);
        }
    }

    #[test]
    fn autocorrelation_at_zero_is_parseval() {
        let psi = GridWaveFunction::from_fn(grid(), gaussian(1.0, 0.0, 0.0));
        let f = autocorrelation_charfn(&psi, UniformGrid { origin: 0.0, spacing: 1.0, len: 2 }).unwrap();
        assert!((f.values[0] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn routes_agree_for_gaussian_and_box() {
        let psi = GridWaveFunction::from_fn(grid(), gaussian(1.0, 0.4, 0.8));
        assert!(verify_theorem(&psi).unwrap() < 1e-6);

        let g = UniformGrid::symmetric(10.0, 1000).unwrap();
        let boxed = GridWaveFunction::from_fn(g, |x| if (-1.0..1.0).contains(&x) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
            .normalized()
            .unwrap();
        assert!(verify_theorem(&boxed).unwrap() < 1e-5);
    }

    #[test]
    fn narrow_window_is_rejected_with_extension() {
        let psi = GridWaveFunction::from_fn(grid(), gaussian(0.3, 0.0, 0.0));
        let err = autocorrelation_charfn_with(&psi, default_t_grid(), AutocorrelationOptions { xi_half_width: Some(1.0) })
            .unwrap_err();
        match err {
            CharFnError::InsufficientCoverage { required_half_width, tail_mass, .. } => {
                assert!(tail_mass > TAIL_TOLERANCE);
                assert!(required_half_width > 1.0);
                // the suggested window is sufficient
                let ok = autocorrelation_charfn_with(
                    &psi,
                    default_t_grid(),
                    AutocorrelationOptions { xi_half_width: Some(required_half_width) },
                );
                assert!(ok.is_ok());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn momentum_amplitude_of_moving_gaussian() {
        let sigma = 1.0;
        let k0 = 2.0;
        let psi = GridWaveFunction::from_fn(grid(), gaussian(sigma, 0.0, k0));
        let (k, amp) = momentum_amplitude(&psi);
        for (m, kv) in k.points().enumerate() {
            let exact = (2.0 * sigma * sigma / PI).powf(0.25) * (-sigma * sigma * (kv - k0).powi(2)).exp();
            assert!((amp[m] - exact).norm() < 1e-10, "k = {kv}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn charfn_bounded_and_hermitian(sigma in 0.5..2.0f64, c in -3.0..3.0f64, k0 in -2.0..2.0f64) {
            let psi = GridWaveFunction::from_fn(grid(), gaussian(sigma, c, k0));
            let t = UniformGrid::symmetric(4.0, 41).unwrap();
            let auto = autocorrelation_charfn(&psi, t).unwrap();
            let direct = characteristic_function(&density_from_amplitude(&psi).unwrap(), t);
            prop_assert!(direct.max_difference(&auto) < 1e-6);
            for i in 0..t.len {
                prop_assert!(direct.values[i].norm() <= 1.0 + 1e-9);
                prop_assert!((direct.values[i] - direct.values[t.len - 1 - i].conj()).norm() < 1e-12);
                prop_assert!((auto.values[i] - auto.values[t.len - 1 - i].conj()).norm() < 1e-9);
            }
        }
    }
}
