//! Spherical phase space and its thermal picture: stereographic and
//! thermal maps of the sphere to the complex plane, the Gibbs distribution
//! of an oscillator, area as probability, mean energy, Planck-law limits
//! and the ħ → 0 regime table.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::numerics::{adaptive_simpson, ks_statistic, mean_and_stderr, sample_blocks};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SphereError {
    #[error("{name} must be positive and finite (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error("point (θ = {theta}, φ = {phi}) outside θ ∈ [0, π], φ ∈ [0, 2π)")]
    InvalidPoint { theta: f64, phi: f64 },
    #[error("θ = 0 maps to the point at infinity under stereographic projection")]
    PoleAtInfinity,
    #[error("θ = π is the logarithmic pole of the measure-preserving thermal map")]
    SingularPole,
    #[error("Monte Carlo needs at least 1000 samples (got {0})")]
    TooFewSamples(usize),
    #[error("region quadrature did not converge to {tolerance:e}")]
    QuadratureFailed { tolerance: f64 },
    #[error("region is empty or malformed: {0}")]
    BadRegion(String),
}

fn positive(name: &'static str, value: f64) -> Result<f64, SphereError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(SphereError::NonPositive { name, value })
    }
}

/// Sphere of radius `R`; its area `h = 4πR²` plays the role of Planck's
/// constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereGeometry {
    pub radius: f64,
}

impl SphereGeometry {
    pub fn new(radius: f64) -> Result<Self, SphereError> {
        Ok(Self { radius: positive("radius", radius)? })
    }

    pub fn area(&self) -> f64 {
        4.0 * PI * self.radius * self.radius
    }

    /// `ħ = h/2π = 2R²`.
    pub fn hbar(&self) -> f64 {
        self.area() / (2.0 * PI)
    }

    /// Inverse temperature fixed by equating the sphere area to `h`:
    /// `β = 2π/(ω h) = 1/(ωħ)`.
    pub fn matched_beta(&self, omega: f64) -> f64 {
        2.0 * PI / (omega * self.area())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
}

impl SpherePoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self, SphereError> {
        if !(0.0..=PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(SphereError::InvalidPoint { theta, phi });
        }
        Ok(Self { theta, phi })
    }

    /// Fraction of the sphere's area in the cap `{θ' ≤ θ}`.
    pub fn cap_fraction(&self) -> f64 {
        (0.5 * self.theta).sin().powi(2)
    }
}

/// Oscillator `H = p²/2m + mω²q²/2` in a thermostat at inverse
/// temperature `β`. The constructor [`ThermalOscillator::matched`] ties
/// `ħ` to `βω = 1/ħ`; [`ThermalOscillator::new`] accepts any `ħ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalOscillator {
    pub beta: f64,
    pub omega: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl ThermalOscillator {
    pub fn new(beta: f64, omega: f64, mass: f64, hbar: f64) -> Result<Self, SphereError> {
        Ok(Self {
            beta: positive("beta", beta)?,
            omega: positive("omega", omega)?,
            mass: positive("mass", mass)?,
            hbar: positive("hbar", hbar)?,
        })
    }

    pub fn matched(beta: f64, omega: f64, mass: f64) -> Result<Self, SphereError> {
        let beta = positive("beta", beta)?;
        let omega = positive("omega", omega)?;
        Self::new(beta, omega, mass, 1.0 / (beta * omega))
    }

    /// Oscillator whose temperature is fixed by `βω = 1/ħ`.
    pub fn from_hbar(hbar: f64, omega: f64, mass: f64) -> Result<Self, SphereError> {
        let hbar = positive("hbar", hbar)?;
        let omega = positive("omega", omega)?;
        Self::new(1.0 / (hbar * omega), omega, mass, hbar)
    }

    pub fn planck_h(&self) -> f64 {
        2.0 * PI * self.hbar
    }

    pub fn is_matched(&self) -> bool {
        (self.beta * self.omega * self.hbar - 1.0).abs() <= 1e-14
    }

    pub fn energy(&self, q: f64, p: f64) -> f64 {
        p * p / (2.0 * self.mass) + 0.5 * self.mass * self.omega * self.omega * q * q
    }

    /// Gibbs weight `e^{−βH}/h`.
    pub fn weight(&self, q: f64, p: f64) -> f64 {
        (-self.beta * self.energy(q, p)).exp() / self.planck_h()
    }

    /// Standard deviations of `q` and `p` under the Gibbs law.
    pub fn widths(&self) -> (f64, f64) {
        let sq = (1.0 / (self.beta * self.mass * self.omega * self.omega)).sqrt();
        let sp = (self.mass / self.beta).sqrt();
        (sq, sp)
    }
}

/// `|Z| = 2R cot(θ/2)`, `arg Z = φ`.
pub fn stereographic(p: SpherePoint, radius: f64) -> Result<Complex64, SphereError> {
    positive("radius", radius)?;
    if p.theta == 0.0 {
        return Err(SphereError::PoleAtInfinity);
    }
    let modulus = 2.0 * radius / (0.5 * p.theta).tan();
    Ok(Complex64::from_polar(modulus.max(0.0), p.phi))
}

/// `|z|² = (ln 2/β)·3R²·sin²(θ/2)`, `arg z = φ`, taken literally.
pub fn thermal_map_sin2(p: SpherePoint, radius: f64, beta: f64) -> Result<Complex64, SphereError> {
    positive("radius", radius)?;
    positive("beta", beta)?;
    let mod2 = LN_2 / beta * 3.0 * radius * radius * (0.5 * p.theta).sin().powi(2);
    Ok(Complex64::from_polar(mod2.sqrt(), p.phi))
}

/// `|z|² = −ln(1 − sin²(θ/2))/β`, `arg z = φ`. Pushes the normalised area
/// measure of the sphere forward to `β e^{−β|z|²} d²z/π`.
pub fn thermal_map_exact(p: SpherePoint, beta: f64) -> Result<Complex64, SphereError> {
    positive("beta", beta)?;
    if p.theta >= PI {
        return Err(SphereError::SingularPole);
    }
    let c = (0.5 * p.theta).cos();
    let mod2 = -(c * c).ln() / beta;
    Ok(Complex64::from_polar(mod2.max(0.0).sqrt(), p.phi))
}

/// `|z|²` of [`thermal_map_sin2`] divided by that of [`thermal_map_exact`]
/// at the same point; equal to 1 only where the two maps agree.
pub fn thermal_map_ratio(p: SpherePoint, radius: f64, beta: f64) -> Result<f64, SphereError> {
    let a = thermal_map_sin2(p, radius, beta)?.norm_sqr();
    let b = thermal_map_exact(p, beta)?.norm_sqr();
    Ok(a / b)
}

/// `n` points uniform in area on the unit sphere (`cos θ` and `φ`
/// uniform), drawn with the block-stream sampler.
pub fn sample_sphere(n: usize, seed: u64) -> Vec<SpherePoint> {
    sample_blocks(seed, n, |rng| {
        // u ∈ [0,1) keeps θ < π
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        SpherePoint { theta: (1.0 - 2.0 * u).acos(), phi: 2.0 * PI * v }
    })
}

/// Kolmogorov–Smirnov distance between the radii of uniformly sampled
/// sphere points under [`thermal_map_exact`] and the Gibbs radial law
/// `1 − e^{−βr²}`.
pub fn pushforward_ks(beta: f64, n: usize, seed: u64) -> Result<f64, SphereError> {
    positive("beta", beta)?;
    let radii = sample_sphere(n, seed)
        .into_iter()
        .map(|p| thermal_map_exact(p, beta).map(|z| z.norm()))
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(ks_statistic(&radii, |r| -(-beta * r * r).exp_m1()))
}

/// Same statistic for the literal map of [`thermal_map_sin2`].
pub fn pushforward_ks_sin2(radius: f64, beta: f64, n: usize, seed: u64) -> Result<f64, SphereError> {
    positive("beta", beta)?;
    let radii = sample_sphere(n, seed)
        .into_iter()
        .map(|p| thermal_map_sin2(p, radius, beta).map(|z| z.norm()))
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(ks_statistic(&radii, |r| -(-beta * r * r).exp_m1()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsNormalization {
    /// `2π/(βω h)`.
    pub analytic: f64,
    /// Tensor-product trapezoidal rule over `±14σ` in each variable.
    pub quadrature: f64,
    /// Whether both values equal 1 within `1e−8`.
    pub normalized: bool,
}

/// `h^{-1} ∫∫ e^{−βH} dq dp`, analytically and by quadrature.
pub fn gibbs_normalization_check(osc: &ThermalOscillator) -> GibbsNormalization {
    let analytic = 2.0 * PI / (osc.beta * osc.omega * osc.planck_h());
    let (sq, sp) = osc.widths();
    let n = 281;
    let (lq, lp) = (14.0 * sq, 14.0 * sp);
    let (dq, dp) = (2.0 * lq / (n - 1) as f64, 2.0 * lp / (n - 1) as f64);
    let w = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    let mut sum = 0.0;
    for i in 0..n {
        let q = -lq + i as f64 * dq;
        let mut row = 0.0;
        for j in 0..n {
            let p = -lp + j as f64 * dp;
            row += w(j) * osc.weight(q, p);
        }
        sum += w(i) * row;
    }
    let quadrature = sum * dq * dp;
    let normalized = (analytic - 1.0).abs() <= 1e-8 && (quadrature - 1.0).abs() <= 1e-8;
    GibbsNormalization { analytic, quadrature, normalized }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMethod {
    Analytic,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Standard error; zero for analytic results.
    pub stderr: f64,
}

/// Mean energy `Ē = h^{-1}∫ H e^{−βH} dq dp`.
pub fn mean_energy(osc: &ThermalOscillator, method: EnergyMethod) -> Result<Estimate, SphereError> {
    match method {
        EnergyMethod::Analytic => Ok(Estimate { value: 1.0 / osc.beta, stderr: 0.0 }),
        EnergyMethod::MonteCarlo { samples, seed } => {
            if samples < 1000 {
                return Err(SphereError::TooFewSamples(samples));
            }
            let (sq, sp) = osc.widths();
            let energies = sample_blocks(seed, samples, |rng| {
                let q: f64 = StandardNormal.sample(rng);
                let p: f64 = StandardNormal.sample(rng);
                osc.energy(sq * q, sp * p)
            });
            let (value, stderr) = mean_and_stderr(&energies);
            Ok(Estimate { value, stderr })
        }
    }
}

/// `|1/β − ħω|`; zero whenever `βω = 1/ħ`.
pub fn energy_identity_defect(osc: &ThermalOscillator) -> f64 {
    (mean_energy(osc, EnergyMethod::Analytic).expect("analytic").value - osc.hbar * osc.omega).abs()
}

/// Regions of the `(q, p)` plane. Rectangle bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    FullPlane,
    Rectangle { q: (f64, f64), p: (f64, f64) },
    Disk { center: (f64, f64), radius: f64 },
}

const REGION_TOL: f64 = 1e-12;
const REGION_INNER_TOL: f64 = 1e-15;
const REGION_DEPTH: u32 = 40;

/// `P(A) = ∫_A e^{−βH} dq dp / h` by nested adaptive Simpson quadrature.
/// Infinite rectangle sides are cut at 14 standard deviations.
pub fn region_probability(region: Region, osc: &ThermalOscillator) -> Result<f64, SphereError> {
    let (sq, sp) = osc.widths();
    let fail = || SphereError::QuadratureFailed { tolerance: REGION_TOL };
    match region {
        Region::FullPlane => region_probability(
            Region::Rectangle { q: (f64::NEG_INFINITY, f64::INFINITY), p: (f64::NEG_INFINITY, f64::INFINITY) },
            osc,
        ),
        Region::Rectangle { q, p } => {
            if q.0.is_nan() || q.1.is_nan() || p.0.is_nan() || p.1.is_nan() {
                return Err(SphereError::BadRegion("NaN bound".into()));
            }
            let clip = |(lo, hi): (f64, f64), s: f64| (lo.max(-14.0 * s), hi.min(14.0 * s));
            let (q0, q1) = clip(q, sq);
            let (p0, p1) = clip(p, sp);
            if q0 >= q1 || p0 >= p1 {
                return Ok(0.0);
            }
            let inner = |qq: f64| adaptive_simpson(&|pp: f64| osc.weight(qq, pp), p0, p1, REGION_INNER_TOL, REGION_DEPTH);
            let outer = |qq: f64| inner(qq).unwrap_or(f64::NAN);
            let v = adaptive_simpson(&outer, q0, q1, REGION_TOL, REGION_DEPTH).ok_or_else(fail)?;
            if v.is_nan() {
                return Err(fail());
            }
            Ok(v)
        }
        Region::Disk { center, radius } => {
            if !(radius >= 0.0) {
                return Err(SphereError::BadRegion(format!("disk radius {radius}")));
            }
            if radius == 0.0 {
                return Ok(0.0);
            }
            // polar coordinates about the center
            let radial = |phi: f64| {
                let (c, s) = (phi.cos(), phi.sin());
                adaptive_simpson(
                    &|rho: f64| rho * osc.weight(center.0 + rho * c, center.1 + rho * s),
                    0.0,
                    radius,
                    REGION_INNER_TOL,
                    REGION_DEPTH,
                )
                .unwrap_or(f64::NAN)
            };
            let v = adaptive_simpson(&radial, 0.0, 2.0 * PI, REGION_TOL, REGION_DEPTH).ok_or_else(fail)?;
            if v.is_nan() {
                return Err(fail());
            }
            Ok(v)
        }
    }
}

/// Gibbs mass of the centered disk of radius `ρ` read off as the area
/// fraction of its preimage cap under [`thermal_map_exact`]. Requires
/// `mω = 1` so that the disk is a level set of `H = ω(q² + p²)/2`.
pub fn disk_probability_via_sphere(radius: f64, osc: &ThermalOscillator) -> Result<f64, SphereError> {
    if (osc.mass * osc.omega - 1.0).abs() > 1e-12 {
        return Err(SphereError::BadRegion("centered disks are level sets of H only when mω = 1".into()));
    }
    // z = (q + ip)/√2 in the rescaled variables, β_eff = βω
    let beta_eff = osc.beta * osc.omega;
    let mod2 = radius * radius / 2.0;
    let theta = 2.0 * ((-beta_eff * mod2).exp().sqrt()).acos();
    let cap = SpherePoint::new(theta.min(PI), 0.0)?;
    debug_assert!((thermal_map_exact(cap, beta_eff).map(|z| z.norm_sqr()).unwrap_or(mod2) - mod2).abs() < 1e-9 * (1.0 + mod2));
    Ok(cap.cap_fraction() / (osc.beta * osc.omega * osc.hbar))
}

/// Radius of the centered disk holding half the Gibbs mass.
pub fn gibbs_median_radius(osc: &ThermalOscillator) -> f64 {
    // mω = 1: 1 − e^{−βωρ²/2} = ½
    (2.0 * LN_2 / (osc.beta * osc.omega)).sqrt()
}

/// Physical constants for [`planck_density`]; natural units by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanckConstants {
    pub h: f64,
    pub c: f64,
    pub k: f64,
}

impl Default for PlanckConstants {
    fn default() -> Self {
        Self { h: 1.0, c: 1.0, k: 1.0 }
    }
}

/// `u(ν, T) = (8πhν³/c³)/(e^{hν/kT} − 1)`.
pub fn planck_density(nu: f64, temperature: f64, k: PlanckConstants) -> Result<f64, SphereError> {
    positive("frequency", nu)?;
    positive("temperature", temperature)?;
    let x = k.h * nu / (k.k * temperature);
    Ok(8.0 * PI * k.h * nu.powi(3) / k.c.powi(3) / x.exp_m1())
}

/// `8πhν³ e^{−hν/kT}/c³`.
pub fn wien_density(nu: f64, temperature: f64, k: PlanckConstants) -> f64 {
    8.0 * PI * k.h * nu.powi(3) / k.c.powi(3) * (-k.h * nu / (k.k * temperature)).exp()
}

/// `8πν² kT/c³`.
pub fn rayleigh_jeans_density(nu: f64, temperature: f64, k: PlanckConstants) -> f64 {
    8.0 * PI * nu * nu * k.k * temperature / k.c.powi(3)
}

/// `(u/Wien, u/Rayleigh–Jeans)` at `(ν, T)`.
pub fn limit_ratios(nu: f64, temperature: f64, k: PlanckConstants) -> Result<(f64, f64), SphereError> {
    let u = planck_density(nu, temperature, k)?;
    Ok((u / wien_density(nu, temperature, k), u / rayleigh_jeans_density(nu, temperature, k)))
}

/// [`limit_ratios`] as a function of `x = hν/kT` alone (natural units).
pub fn limit_ratios_at(x: f64) -> Result<(f64, f64), SphereError> {
    limit_ratios(x, 1.0, PlanckConstants::default())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalLimitRow {
    pub hbar: f64,
    pub temperature: f64,
    pub radius: f64,
}

/// Rows `(ħ, T = ħω, R = √(h/4π))` for `k_B = 1`; `ħ = 0` is allowed as
/// the limit row.
pub fn classical_limit_table(hbars: &[f64], omega: f64) -> Result<Vec<ClassicalLimitRow>, SphereError> {
    positive("omega", omega)?;
    hbars
        .iter()
        .map(|&hbar| {
            if !(hbar >= 0.0 && hbar.is_finite()) {
                return Err(SphereError::NonPositive { name: "hbar", value: hbar });
            }
            let h = 2.0 * PI * hbar;
            Ok(ClassicalLimitRow { hbar, temperature: hbar * omega, radius: (h / (4.0 * PI)).sqrt() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(theta: f64) -> SpherePoint {
        SpherePoint::new(theta, 0.3).unwrap()
    }

    #[test]
    fn geometry() {
        let g = SphereGeometry::new(0.7).unwrap();
        assert_eq!(g.area(), 4.0 * PI * 0.7 * 0.7);
        let beta = g.matched_beta(2.0);
        assert!((beta * 2.0 * g.hbar() - 1.0).abs() < 1e-14);
        assert!(SphereGeometry::new(0.0).is_err());
        assert!(SpherePoint::new(4.0, 0.0).is_err());
        assert!(SpherePoint::new(1.0, 2.0 * PI).is_err());
    }

    #[test]
    fn stereographic_examples() {
        assert!((stereographic(pt(PI / 2.0), 1.0).unwrap().norm() - 2.0).abs() < 1e-14);
        assert!(stereographic(pt(PI), 1.0).unwrap().norm() < 1e-15);
        assert!((stereographic(pt(PI / 3.0), 1.0).unwrap().norm() - 2.0 * 3f64.sqrt()).abs() < 1e-14);
        assert_eq!(stereographic(pt(0.0), 1.0), Err(SphereError::PoleAtInfinity));
        let z = stereographic(pt(1.0), 1.0).unwrap();
        assert!((z.arg() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn sin2_map_examples() {
        assert_eq!(thermal_map_sin2(pt(0.0), 1.0, 1.0).unwrap().norm(), 0.0);
        assert!((thermal_map_sin2(pt(PI), 1.0, 1.0).unwrap().norm_sqr() - 3.0 * LN_2).abs() < 1e-14);
        let mut last = -1.0;
        for i in 0..=100 {
            let v = thermal_map_sin2(pt(PI * i as f64 / 100.0), 1.0, 1.0).unwrap().norm_sqr();
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn exact_map_examples() {
        assert_eq!(thermal_map_exact(pt(0.0), 1.0).unwrap().norm(), 0.0);
        for &beta in &[0.5, 1.0, 3.0] {
            let v = thermal_map_exact(pt(PI / 2.0), beta).unwrap().norm_sqr();
            assert!((v - LN_2 / beta).abs() < 1e-14);
        }
        assert_eq!(thermal_map_exact(pt(PI), 1.0), Err(SphereError::SingularPole));
    }

    #[test]
    fn maps_disagree_away_from_one_point() {
        // the literal map is not the measure-preserving one
        let r = thermal_map_ratio(pt(PI / 2.0), 1.0, 1.0).unwrap();
        assert!((r - 1.5).abs() < 1e-12);
        let k = pushforward_ks_sin2(1.0, 1.0, 20_000, 3).unwrap();
        assert!(k > 0.05);
    }

    #[test]
    fn pushforward_is_gibbs() {
        let d = pushforward_ks(1.3, 100_000, 11).unwrap();
        assert!(d < 0.01, "KS = {d}");
        assert_eq!(d, pushforward_ks(1.3, 100_000, 11).unwrap());
    }

    #[test]
    fn equal_measure_caps() {
        for i in 1..40 {
            let theta = PI * i as f64 / 40.0;
            let beta = 0.7;
            let z = thermal_map_exact(pt(theta), beta).unwrap();
            let gibbs = -(-beta * z.norm_sqr()).exp_m1();
            assert!((gibbs - pt(theta).cap_fraction()).abs() < 1e-10);
        }
    }

    #[test]
    fn normalization_examples() {
        for &omega in &[1.0, 3.0] {
            let osc = ThermalOscillator::from_hbar(1.0, omega, 1.0).unwrap();
            let n = gibbs_normalization_check(&osc);
            assert!(n.normalized, "{n:?}");
        }
        let osc = ThermalOscillator::new(1.0, 1.0, 2.5, 0.5).unwrap();
        let n = gibbs_normalization_check(&osc);
        assert!(!n.normalized);
        assert!((n.analytic - 2.0).abs() < 1e-12);
        assert!((n.quadrature - 2.0).abs() < 1e-8);
    }

    #[test]
    fn mean_energy_examples() {
        let one = ThermalOscillator::matched(1.0, 1.0, 1.0).unwrap();
        assert_eq!(mean_energy(&one, EnergyMethod::Analytic).unwrap().value, 1.0);
        let two = ThermalOscillator::matched(2.0, 1.0, 1.0).unwrap();
        assert_eq!(mean_energy(&two, EnergyMethod::Analytic).unwrap().value, 0.5);
        assert_eq!(two.hbar, 0.5);
        assert_eq!(energy_identity_defect(&two), 0.0);
        assert!(matches!(
            mean_energy(&one, EnergyMethod::MonteCarlo { samples: 10, seed: 1 }),
            Err(SphereError::TooFewSamples(10))
        ));
        let mc = mean_energy(&one, EnergyMethod::MonteCarlo { samples: 200_000, seed: 5 }).unwrap();
        assert!((mc.value - 1.0).abs() < 3.0 * mc.stderr);
    }

    #[test]
    fn region_examples() {
        let osc = ThermalOscillator::matched(1.0, 1.0, 1.0).unwrap();
        assert!((region_probability(Region::FullPlane, &osc).unwrap() - 1.0).abs() < 1e-9);
        let half = Region::Rectangle { q: (0.0, f64::INFINITY), p: (f64::NEG_INFINITY, f64::INFINITY) };
        assert!((region_probability(half, &osc).unwrap() - 0.5).abs() < 1e-9);
        let disk = Region::Disk { center: (0.0, 0.0), radius: gibbs_median_radius(&osc) };
        assert!((region_probability(disk, &osc).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn region_matches_sphere_caps() {
        let osc = ThermalOscillator::matched(0.8, 1.0, 1.0).unwrap();
        for &rho in &[0.3, 1.0, 2.2] {
            let quad = region_probability(Region::Disk { center: (0.0, 0.0), radius: rho }, &osc).unwrap();
            let cap = disk_probability_via_sphere(rho, &osc).unwrap();
            assert!((quad - cap).abs() < 1e-9, "ρ={rho}: {quad} vs {cap}");
        }
    }

    #[test]
    fn region_monotone() {
        let osc = ThermalOscillator::matched(1.0, 2.0, 0.5).unwrap();
        let mut last = 0.0;
        for i in 1..8 {
            let r = Region::Rectangle { q: (-0.3 * i as f64, 0.2 * i as f64), p: (-0.25 * i as f64, 0.4 * i as f64) };
            let v = region_probability(r, &osc).unwrap();
            assert!(v >= last - 1e-12);
            last = v;
        }
        assert!(last <= 1.0 + 1e-9);
    }

    #[test]
    fn planck_examples() {
        let (wien, _) = limit_ratios_at(10.0).unwrap();
        assert!((wien - 1.0000454).abs() < 1e-6);
        assert!((wien - 1.0 / (1.0 - (-10f64).exp())).abs() < 1e-12);
        let (_, rj) = limit_ratios_at(0.01).unwrap();
        assert!((rj - 0.99502).abs() < 1e-4);
        assert!((rj - 0.01 / 0.01f64.exp_m1()).abs() < 1e-12);
        // increasing x: u/RJ falls away from 1, u/Wien falls toward 1
        let mut last = (f64::INFINITY, f64::INFINITY);
        for i in 0..60 {
            let x = 10f64.powf(-4.0 + i as f64 * 0.1);
            let (w, r) = limit_ratios_at(x).unwrap();
            assert!(w >= 1.0 && w <= last.0 + 4.0 * f64::EPSILON);
            assert!(r < 1.0 && r < last.1);
            last = (w, r);
        }
        assert!(planck_density(0.0, 1.0, PlanckConstants::default()).is_err());
    }

    #[test]
    fn classical_limit_examples() {
        let rows = classical_limit_table(&[1.0, 0.5, 0.0], 1.0).unwrap();
        assert_eq!(rows[0].temperature, 1.0);
        assert_eq!(rows[1].temperature, 0.5);
        assert_eq!(rows[2].temperature, 0.0);
        assert_eq!(rows[2].radius, 0.0);
        assert!((rows[0].radius - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(classical_limit_table(&[-1.0], 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn consistency_triangle(hbar in 0.05..5.0f64, omega in 0.1..10.0f64) {
            let osc = ThermalOscillator::from_hbar(hbar, omega, 1.0).unwrap();
            let e = mean_energy(&osc, EnergyMethod::Analytic).unwrap().value;
            prop_assert!((e - 1.0 / osc.beta).abs() <= 1e-14 * e);
            prop_assert!((e - hbar * omega).abs() <= 1e-14 * e.max(1.0));
        }

        #[test]
        fn cap_mass_is_area(theta in 0.0..3.1f64, beta in 0.1..5.0f64) {
            let p = SpherePoint::new(theta, 0.0).unwrap();
            let z = thermal_map_exact(p, beta).unwrap();
            prop_assert!((-(-beta * z.norm_sqr()).exp_m1() - p.cap_fraction()).abs() < 1e-10);
        }
    }
}
