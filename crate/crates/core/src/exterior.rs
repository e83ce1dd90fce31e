//! Probabilities written as bilinear, exterior and Grassmann-valued
//! expressions, plus an executable checker for the amplitude axiom system.
//!
//! The graded algebras here have exactly two generators. An
//! [`ExteriorElement`] is generic over its coefficient ring so that the same
//! wedge product serves complex scalars and [`GrassmannElement`]s (vectors in
//! phase space whose components are themselves anticommuting numbers).

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExteriorError {
    #[error("weight {name} = {value} lies outside the physical region (must be >= 0)")]
    NegativeWeight { name: &'static str, value: f64 },
}

/// Coefficient ring for [`ExteriorElement`].
pub trait Coefficient: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn zero() -> Self;
}

impl Coefficient for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

/// Element of the exterior algebra on two generators, stored over the
/// graded basis `{1, e1, e2, e1∧e2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorElement<C = Complex64> {
    pub coeffs: [C; 4],
}

impl<C: Coefficient> ExteriorElement<C> {
    pub fn new(scalar: C, e1: C, e2: C, e12: C) -> Self {
        Self { coeffs: [scalar, e1, e2, e12] }
    }

    /// Grade-1 element `a·e1 + b·e2`.
    pub fn vector(a: C, b: C) -> Self {
        Self::new(C::zero(), a, b, C::zero())
    }

    pub fn scalar(&self) -> C {
        self.coeffs[0]
    }

    /// Coefficient at the unit bivector `e1∧e2`.
    pub fn bivector(&self) -> C {
        self.coeffs[3]
    }

    /// Exterior product; coefficients multiply in the order the factors
    /// appear, so non-commuting coefficient rings are handled correctly.
    pub fn wedge(&self, rhs: &Self) -> Self {
        let [a0, a1, a2, a3] = self.coeffs;
        let [b0, b1, b2, b3] = rhs.coeffs;
        Self::new(
            a0 * b0,
            a0 * b1 + a1 * b0,
            a0 * b2 + a2 * b0,
            a0 * b3 + a3 * b0 + a1 * b2 - a2 * b1,
        )
    }

    pub fn scale(&self, s: C) -> Self {
        Self { coeffs: self.coeffs.map(|c| s * c) }
    }
}

impl<C: Coefficient> Add for ExteriorElement<C> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for (o, r) in out.coeffs.iter_mut().zip(rhs.coeffs) {
            *o = *o + r;
        }
        out
    }
}

/// Element of the Grassmann algebra generated by two real anticommuting
/// generators, over the basis `{1, θ1, θ2, θ1θ2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrassmannElement {
    pub coeffs: [Complex64; 4],
}

impl GrassmannElement {
    pub fn new(one: Complex64, t1: Complex64, t2: Complex64, t12: Complex64) -> Self {
        Self { coeffs: [one, t1, t2, t12] }
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::new(c, 0.0.into(), 0.0.into(), 0.0.into())
    }

    pub fn theta1() -> Self {
        Self::new(0.0.into(), 1.0.into(), 0.0.into(), 0.0.into())
    }

    pub fn theta2() -> Self {
        Self::new(0.0.into(), 0.0.into(), 1.0.into(), 0.0.into())
    }

    /// `θ = θ1 + iθ2`.
    pub fn theta() -> Self {
        Self::new(0.0.into(), 1.0.into(), I, 0.0.into())
    }

    /// `θ̄ = θ1 − iθ2`.
    pub fn theta_bar() -> Self {
        Self::new(0.0.into(), 1.0.into(), -I, 0.0.into())
    }

    /// Top-degree coefficient (at `θ1θ2`).
    pub fn top(&self) -> Complex64 {
        self.coeffs[3]
    }

    /// Complex conjugation: conjugates coefficients, keeps the real
    /// generators fixed and reverses the order of factors, so
    /// `(θ1θ2)* = θ2θ1 = −θ1θ2`.
    pub fn conj(&self) -> Self {
        let [a0, a1, a2, a3] = self.coeffs;
        Self::new(a0.conj(), a1.conj(), a2.conj(), -a3.conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { coeffs: self.coeffs.map(|c| s * c) }
    }
}

impl Add for GrassmannElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.coeffs;
        for (o, r) in c.iter_mut().zip(rhs.coeffs) {
            *o += r;
        }
        Self { coeffs: c }
    }
}

impl Sub for GrassmannElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for GrassmannElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self { coeffs: self.coeffs.map(|c| -c) }
    }
}

impl Mul for GrassmannElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let [a0, a1, a2, a3] = self.coeffs;
        let [b0, b1, b2, b3] = rhs.coeffs;
        Self::new(
            a0 * b0,
            a0 * b1 + a1 * b0,
            a0 * b2 + a2 * b0,
            a0 * b3 + a3 * b0 + a1 * b2 - a2 * b1,
        )
    }
}

impl Coefficient for GrassmannElement {
    fn zero() -> Self {
        Self::scalar(0.0.into())
    }
}

fn check_weight(name: &'static str, value: f64) -> Result<(), ExteriorError> {
    if value < 0.0 || value.is_nan() {
        return Err(ExteriorError::NegativeWeight { name, value });
    }
    Ok(())
}

/// Product density `W = w1·w2` realised as the bivector coefficient of
/// `½ w̄∧w`, where `w = w1 e1 + w2 e2` and `w̄ = w σ3`.
pub fn bilinear_density(w1: f64, w2: f64) -> Result<f64, ExteriorError> {
    check_weight("w1", w1)?;
    check_weight("w2", w2)?;
    let w = ExteriorElement::vector(Complex64::from(w1), Complex64::from(w2));
    let w_bar = ExteriorElement::vector(Complex64::from(w1), Complex64::from(-w2));
    Ok(w_bar.wedge(&w).scale(0.5.into()).bivector().re)
}

/// Non-factorised density `Σ_k w1k·w2k` through the tagged basis
/// `e_i^(k) = e_i ξ^(k)` with `ξ^(k)·ξ^(k') = δ_kk'`.
pub fn sum_density(terms: &[(f64, f64)]) -> Result<f64, ExteriorError> {
    for &(a, b) in terms {
        check_weight("w1", a)?;
        check_weight("w2", b)?;
    }
    // Each tagged component pair lives in its own copy of the plane; the
    // tag product kills every cross-tag wedge, so only k == k' survives.
    let mut total = ExteriorElement::<Complex64>::new(0.0.into(), 0.0.into(), 0.0.into(), 0.0.into());
    for (k, &(a1, a2)) in terms.iter().enumerate() {
        for (kp, &(b1, b2)) in terms.iter().enumerate() {
            let tag = if k == kp { 1.0 } else { 0.0 };
            let w_bar = ExteriorElement::vector(Complex64::from(a1), Complex64::from(-a2));
            let w = ExteriorElement::vector(Complex64::from(b1), Complex64::from(b2));
            total = total + w_bar.wedge(&w).scale((0.5 * tag).into());
        }
    }
    Ok(total.bivector().re)
}

/// Coefficient at the unit bivector of `i z̄∧z` for
/// `z = z_q e_q + z_p e_p`, i.e. `i(z_q* z_p − z_p* z_q)`.
pub fn complex_pair_density(z_q: Complex64, z_p: Complex64) -> f64 {
    let z = ExteriorElement::vector(z_q, z_p);
    let z_bar = ExteriorElement::vector(z_q.conj(), z_p.conj());
    let w = z_bar.wedge(&z).scale(I).bivector();
    debug_assert!(w.im.abs() <= 1e-12 * (1.0 + w.re.abs()));
    w.re
}

/// Value of `θ̄θ` expressed as a multiple of `θ1θ2`.
fn theta_bar_theta_unit() -> Complex64 {
    (GrassmannElement::theta_bar() * GrassmannElement::theta()).top()
}

/// Value of `θθ̄` expressed as a multiple of `θ1θ2`.
fn theta_theta_bar_unit() -> Complex64 {
    (GrassmannElement::theta() * GrassmannElement::theta_bar()).top()
}

/// Fermionic density: with `ψ = qθ/√2`, `ψ⁺ = q*θ̄/√2` and
/// `z = ψ e_q + ψ⁺ e_p`, returns the coefficient at `θθ̄·e` of `z̄∧z`.
///
/// Conjugation maps `ψ ↦ ψ⁺` and swaps the paired basis vectors
/// `e_q ↔ e_p`, so `z̄ = ψ⁺ e_p + ψ e_q` and
/// `z̄∧z = (ψψ⁺ − ψ⁺ψ) e = |q|² θθ̄ e`. Note `θ̄θ = −θθ̄`.
pub fn fermion_density(q: Complex64) -> f64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = GrassmannElement::theta().scale(q * s);
    let psi_plus = GrassmannElement::theta_bar().scale(q.conj() * s);
    let z = ExteriorElement::vector(psi, psi_plus);
    let z_bar = ExteriorElement::vector(psi_plus.conj(), psi.conj());
    let w = z_bar.wedge(&z).bivector();
    let coeff = w.top() / theta_theta_bar_unit();
    coeff.re
}

/// A plane-wave component `A·exp(−iEt + ikx)` of a scalar field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub energy: f64,
    pub amplitude: Complex64,
    pub wavenumber: f64,
}

impl PlaneWave {
    pub fn new(energy: f64, amplitude: Complex64, wavenumber: f64) -> Self {
        Self { energy, amplitude, wavenumber }
    }
}

/// Time component of the Klein–Fock–Gordon current,
/// `ρ = i(φ* ∂₀φ − ∂₀φ*·φ)`, for a finite superposition of plane waves.
pub fn boson_density(waves: &[PlaneWave], x: f64, t: f64) -> f64 {
    let mut phi = Complex64::new(0.0, 0.0);
    let mut dphi = Complex64::new(0.0, 0.0);
    for w in waves {
        let v = w.amplitude * Complex64::from_polar(1.0, -w.energy * t + w.wavenumber * x);
        phi += v;
        dphi += -I * w.energy * v;
    }
    (I * (phi.conj() * dphi - dphi.conj() * phi)).re
}

/// How the barred amplitudes are tied to the unbarred ones when the
/// probability of an elementary event is read off a bivector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeMode {
    /// `ψ̄_j = −φ̄_j`: the bivector measure reduces to `|ψ_j|²`.
    Nonrelativistic,
    /// `ψ̄_j = φ̄_j` with commuting scalars: the literal expression vanishes.
    RelativisticBivector,
    /// Grassmann-valued basis; the measure is normalised on `θ̄θ·b`.
    Fermionic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    /// Event algebra contains ∅ and Ω and is closed under union and complement.
    O2,
    Q1,
    Q2,
    Q3,
    Q4,
    /// Bivector measure is real and non-negative, and normalises.
    Q6,
}

/// Finite amplitude event space: states `e_i`, `ē_i`, elementary events
/// `ω_i` and an algebra of events given as index sets with their assigned
/// amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeEventSpace {
    /// `ψ(e_i)`.
    pub states: Vec<Complex64>,
    /// `ψ(ē_i)`.
    pub conjugate_states: Vec<Complex64>,
    /// `ψ(ω_i)`.
    pub elementary: Vec<Complex64>,
    /// Events as bitmasks over elementary events, with their amplitude.
    pub events: Vec<(u64, Complex64)>,
}

impl AmplitudeEventSpace {
    /// Space where elementary amplitudes follow Q2 and the event algebra is
    /// the full power set with additive amplitudes.
    pub fn from_states(states: Vec<Complex64>, conjugate_states: Vec<Complex64>) -> Self {
        let elementary: Vec<Complex64> = states
            .iter()
            .zip(&conjugate_states)
            .map(|(e, eb)| eb * e)
            .collect();
        let n = elementary.len();
        assert!(n < 20, "power-set event algebra limited to < 20 elementary events");
        let events = (0..(1u64 << n))
            .map(|mask| {
                let amp = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| elementary[i]).sum();
                (mask, amp)
            })
            .collect();
        Self { states, conjugate_states, elementary, events }
    }

    /// The one-element example `ψ(e) = e^{iα}`, `ψ(ē) = e^{−iα}`.
    pub fn single(alpha: f64) -> Self {
        Self::from_states(vec![Complex64::from_polar(1.0, alpha)], vec![Complex64::from_polar(1.0, -alpha)])
    }

    fn full_mask(&self) -> u64 {
        let n = self.elementary.len();
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    fn amplitude_of(&self, mask: u64) -> Option<Complex64> {
        self.events.iter().find(|(m, _)| *m == mask).map(|(_, a)| *a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub mode: AmplitudeMode,
    /// Bivector measure `P(ω_j)` of each elementary event.
    pub probabilities: Vec<Complex64>,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

const AXIOM_TOL: f64 = 1e-12;

/// Checks all axioms of the amplitude event space.
pub fn check_axioms(space: &AmplitudeEventSpace, mode: AmplitudeMode) -> AxiomReport {
    check_axioms_except(space, mode, &[])
}

/// Checks the axioms, skipping those listed in `skip`.
pub fn check_axioms_except(space: &AmplitudeEventSpace, mode: AmplitudeMode, skip: &[Axiom]) -> AxiomReport {
    let mut violations = Vec::new();
    let mut flag = |axiom: Axiom, detail: String| {
        if !skip.contains(&axiom) {
            violations.push(AxiomViolation { axiom, detail });
        }
    };
    let n = space.elementary.len();

    if space.states.len() != n || space.conjugate_states.len() != n {
        flag(
            Axiom::Q1,
            format!(
                "|E| = {}, |Ē| = {}, |Ω| = {} are not in bijection",
                space.states.len(),
                space.conjugate_states.len(),
                n
            ),
        );
    }

    for (j, ((e, eb), w)) in space.states.iter().zip(&space.conjugate_states).zip(&space.elementary).enumerate() {
        if (eb * e - w).norm() > AXIOM_TOL {
            flag(Axiom::Q2, format!("ψ(ω_{j}) = {w} differs from ψ(ē_{j})ψ(e_{j}) = {}", eb * e));
        }
    }

    let full = space.full_mask();
    let masks: Vec<u64> = space.events.iter().map(|(m, _)| *m).collect();
    if !masks.contains(&0) || !masks.contains(&full) {
        flag(Axiom::O2, "event algebra must contain ∅ and Ω".into());
    }
    for &a in &masks {
        if !masks.contains(&(full & !a)) {
            flag(Axiom::O2, format!("complement of event {a:#b} missing"));
        }
        for &b in &masks {
            if !masks.contains(&(a | b)) {
                flag(Axiom::O2, format!("union of events {a:#b} and {b:#b} missing"));
            }
        }
    }
    if let Some(empty) = space.amplitude_of(0) {
        if empty.norm() > AXIOM_TOL {
            flag(Axiom::Q3, format!("ψ(∅) = {empty} must vanish"));
        }
    }
    for &(a, pa) in &space.events {
        for &(b, pb) in &space.events {
            if a & b != 0 || a >= b {
                continue;
            }
            if let Some(pab) = space.amplitude_of(a | b) {
                if (pab - pa - pb).norm() > AXIOM_TOL {
                    flag(
                        Axiom::Q3,
                        format!("ψ({:#b}) = {pab} but ψ({a:#b}) + ψ({b:#b}) = {}", a | b, pa + pb),
                    );
                }
            }
        }
    }
    for (j, w) in space.elementary.iter().enumerate() {
        if let Some(p) = space.amplitude_of(1 << j) {
            if (p - w).norm() > AXIOM_TOL {
                flag(Axiom::Q3, format!("event {{ω_{j}}} carries {p}, elementary amplitude is {w}"));
            }
        }
    }

    match space.amplitude_of(full) {
        Some(omega) if (omega - 1.0).norm() <= AXIOM_TOL => {}
        Some(omega) => flag(Axiom::Q4, format!("ψ(Ω) = {omega} ≠ 1")),
        None => flag(Axiom::Q4, "Ω is not an event".into()),
    }

    let probabilities: Vec<Complex64> = space
        .states
        .iter()
        .zip(&space.conjugate_states)
        .map(|(&psi, &phi_bar)| bivector_measure(psi, phi_bar, mode))
        .collect();
    for (j, p) in probabilities.iter().enumerate() {
        if p.im.abs() > AXIOM_TOL {
            flag(Axiom::Q6, format!("P(ω_{j}) = {p} is not real"));
        } else if p.re < -AXIOM_TOL {
            flag(Axiom::Q6, format!("P(ω_{j}) = {} is negative", p.re));
        }
    }
    let total: Complex64 = probabilities.iter().sum();
    if (total - 1.0).norm() > 1e-9 {
        flag(Axiom::Q6, format!("Σ P(ω_j) = {total} does not normalise"));
    }

    AxiomReport { mode, probabilities, violations }
}

/// Bivector measure of the elementary event with amplitude `ψ_j = ψ(e_j)`
/// and conjugate amplitude `φ̄_j = ψ(ē_j)`.
///
/// The event vector is `z_j = ψ_j n + ψ̄_j n̄` and its partner is
/// `ψ_j n + φ̄_j n̄`; the measure is half the coefficient of `n∧n̄` in their
/// wedge, `½(ψ_j φ̄_j − ψ̄_j ψ_j)`, with `ψ̄_j` fixed by the mode.
pub fn bivector_measure(psi: Complex64, phi_bar: Complex64, mode: AmplitudeMode) -> Complex64 {
    match mode {
        AmplitudeMode::Nonrelativistic | AmplitudeMode::RelativisticBivector => {
            let psi_bar = if mode == AmplitudeMode::Nonrelativistic { -phi_bar } else { phi_bar };
            let z = ExteriorElement::vector(psi, psi_bar);
            let partner = ExteriorElement::vector(psi, phi_bar);
            z.wedge(&partner).scale(0.5.into()).bivector()
        }
        AmplitudeMode::Fermionic => {
            // z^g = ψ θ n + φ̄ θ̄ n̄ and its conjugate with n* = n̄.
            let a = GrassmannElement::theta().scale(psi);
            let b = GrassmannElement::theta_bar().scale(phi_bar);
            let z = ExteriorElement::vector(a, b);
            let z_conj = ExteriorElement::vector(b.conj(), a.conj());
            // n∧n̄ = −b, so the coefficient at b = n̄∧n flips sign.
            let w = -z_conj.wedge(&z).bivector().scale(0.5.into());
            w.top() / theta_bar_theta_unit()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exterior_antisymmetry() {
        let e1 = ExteriorElement::vector(c(1.0, 0.0), c(0.0, 0.0));
        let e2 = ExteriorElement::vector(c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(e1.wedge(&e1).coeffs, [c(0.0, 0.0); 4]);
        assert_eq!(e2.wedge(&e2).coeffs, [c(0.0, 0.0); 4]);
        assert_eq!(e1.wedge(&e2).bivector(), c(1.0, 0.0));
        assert_eq!(e2.wedge(&e1).bivector(), c(-1.0, 0.0));
    }

    #[test]
    fn grade_one_product_is_pure_bivector() {
        let u = ExteriorElement::vector(c(0.3, 1.0), c(-2.0, 0.5));
        let v = ExteriorElement::vector(c(1.5, -0.2), c(0.7, 0.7));
        let w = u.wedge(&v);
        assert_eq!(w.coeffs[0], c(0.0, 0.0));
        assert_eq!(w.coeffs[1], c(0.0, 0.0));
        assert_eq!(w.coeffs[2], c(0.0, 0.0));
    }

    #[test]
    fn grassmann_relations() {
        let t1 = GrassmannElement::theta1();
        let t2 = GrassmannElement::theta2();
        let zero = GrassmannElement::zero();
        assert_eq!(t1 * t1, zero);
        assert_eq!(t2 * t2, zero);
        assert_eq!(t1 * t2, -(t2 * t1));
        assert_eq!(GrassmannElement::theta().conj(), GrassmannElement::theta_bar());
        // conjugation reverses order
        let a = GrassmannElement::theta().scale(c(0.3, 0.4));
        let b = GrassmannElement::theta_bar().scale(c(-1.0, 2.0));
        assert_eq!((a * b).conj(), b.conj() * a.conj());
        // θ̄θ = 2iθ1θ2 and θθ̄ = −θ̄θ
        let tbt = GrassmannElement::theta_bar() * GrassmannElement::theta();
        assert_eq!(tbt.top(), c(0.0, 2.0));
        assert_eq!(GrassmannElement::theta() * GrassmannElement::theta_bar(), -tbt);
    }

    #[test]
    fn bilinear_examples() {
        assert!((bilinear_density(0.3, 0.5).unwrap() - 0.15).abs() < 1e-15);
        assert_eq!(bilinear_density(0.0, 0.7).unwrap(), 0.0);
        assert_eq!(bilinear_density(1.0, 1.0).unwrap(), 1.0);
        assert!(matches!(bilinear_density(-0.1, 1.0), Err(ExteriorError::NegativeWeight { name: "w1", .. })));
        assert!(bilinear_density(0.1, -1.0).is_err());
    }

    #[test]
    fn sum_density_examples() {
        assert_eq!(sum_density(&[]).unwrap(), 0.0);
        assert_eq!(sum_density(&[(1.0, 1.0)]).unwrap(), 1.0);
        assert!((sum_density(&[(0.5, 0.2), (0.1, 0.3)]).unwrap() - 0.13).abs() < 1e-15);
        assert!(sum_density(&[(0.5, -0.2)]).is_err());
    }

    #[test]
    fn complex_pair_examples() {
        assert!((complex_pair_density(c(1.0, 0.0), c(0.0, -0.5)) - 1.0).abs() < 1e-15);
        let z = c(0.7, -1.3);
        assert_eq!(complex_pair_density(z, z), 0.0);
    }

    #[test]
    fn fermion_examples() {
        assert!((fermion_density(c(1.0, 0.0)) - 1.0).abs() < 1e-14);
        assert!((fermion_density(c(1.0, 1.0)) - 2.0).abs() < 1e-14);
        assert_eq!(fermion_density(c(0.0, 0.0)), 0.0);
    }

    #[test]
    fn boson_single_waves() {
        let a = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        for &(x, t) in &[(0.0, 0.0), (1.3, -2.0), (-4.0, 7.5)] {
            let pos = boson_density(&[PlaneWave::new(1.0, a, 1.0)], x, t);
            let neg = boson_density(&[PlaneWave::new(-1.0, a, 1.0)], x, t);
            assert!((pos - 1.0).abs() < 1e-14);
            assert!((neg + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn boson_superpositions() {
        let a = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        // E = ±1 with equal weights: the interference term is purely
        // imaginary, so the density is identically zero.
        let pm = [PlaneWave::new(1.0, a, 1.0), PlaneWave::new(-1.0, a, -1.0)];
        // Positive-energy packet with unequal frequencies changes sign.
        let pos = [PlaneWave::new(3.0, c(1.0, 0.0), 3.0), PlaneWave::new(1.0, c(2.0, 0.0), 1.0)];
        let (mut lo, mut hi) = (f64::MAX, f64::MIN);
        for i in 0..200 {
            let x = -5.0 + 0.05 * i as f64;
            assert!(boson_density(&pm, x, 0.3 * i as f64).abs() < 1e-14);
            let r = boson_density(&pos, x, 0.0);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        assert!(lo < -0.5 && hi > 0.5, "range [{lo}, {hi}]");
    }

    #[test]
    fn single_element_space_is_consistent() {
        let report = check_axioms(&AmplitudeEventSpace::single(0.7), AmplitudeMode::Nonrelativistic);
        assert!(report.passed(), "{:?}", report.violations);
        assert!((report.probabilities[0] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn additivity_on_disjoint_events() {
        let s = 0.6f64.sqrt();
        let t = 0.4f64.sqrt();
        let space = AmplitudeEventSpace::from_states(vec![c(s, 0.0), c(0.0, t)], vec![c(s, 0.0), c(0.0, -t)]);
        let a = space.amplitude_of(0b01).unwrap();
        let b = space.amplitude_of(0b10).unwrap();
        assert_eq!(space.amplitude_of(0b11).unwrap(), a + b);
        let report = check_axioms(&space, AmplitudeMode::Nonrelativistic);
        assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn fermionic_unit_amplitude() {
        let space = AmplitudeEventSpace::from_states(vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]);
        let report = check_axioms(&space, AmplitudeMode::Fermionic);
        assert!(report.passed(), "{:?}", report.violations);
        assert!((report.probabilities[0] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn relativistic_bivector_vanishes() {
        let report = check_axioms(&AmplitudeEventSpace::single(0.2), AmplitudeMode::RelativisticBivector);
        assert_eq!(report.probabilities[0], c(0.0, 0.0));
        assert!(report.violates(Axiom::Q6));
    }

    #[test]
    fn normalisation_failure_is_labelled() {
        let space = AmplitudeEventSpace::from_states(vec![c(0.5, 0.0)], vec![c(0.5, 0.0)]);
        let report = check_axioms(&space, AmplitudeMode::Nonrelativistic);
        assert!(report.violates(Axiom::Q4));
    }

    #[test]
    fn dropping_q3_admits_nonadditive_space() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut space = AmplitudeEventSpace::from_states(vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(s, 0.0)]);
        // Break additivity on {ω_0} while keeping Ω normalised.
        for ev in space.events.iter_mut() {
            if ev.0 == 0b01 {
                ev.1 = c(0.9, 0.0);
            }
        }
        let full = check_axioms(&space, AmplitudeMode::Nonrelativistic);
        assert!(full.violates(Axiom::Q3));
        assert_eq!(full.violations.iter().filter(|v| v.axiom != Axiom::Q3).count(), 0);
        let relaxed = check_axioms_except(&space, AmplitudeMode::Nonrelativistic, &[Axiom::Q3]);
        assert!(relaxed.passed());
    }

    #[test]
    fn bijection_violation() {
        let mut space = AmplitudeEventSpace::single(0.0);
        space.conjugate_states.push(c(0.0, 0.0));
        assert!(check_axioms(&space, AmplitudeMode::Nonrelativistic).violates(Axiom::Q1));
    }

    fn complex() -> impl Strategy<Value = Complex64> {
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| c(a, b))
    }

    proptest! {
        #[test]
        fn bilinear_matches_product(w1 in 0.0..10.0f64, w2 in 0.0..10.0f64) {
            prop_assert!((bilinear_density(w1, w2).unwrap() - w1 * w2).abs() < 1e-14 * (1.0 + w1 * w2));
        }

        #[test]
        fn sum_density_matches_direct(terms in prop::collection::vec((0.0..5.0f64, 0.0..5.0f64), 5)) {
            let direct: f64 = terms.iter().map(|(a, b)| a * b).sum();
            prop_assert!((sum_density(&terms).unwrap() - direct).abs() < 1e-12);
        }

        #[test]
        fn complex_pair_symbolic(zq in complex(), zp in complex()) {
            // symbolic expansion: i(zq* zp − zp* zq) = −2 Im(zq* zp)
            let expect = -2.0 * (zq.conj() * zp).im;
            let got = complex_pair_density(zq, zp);
            prop_assert!((got - expect).abs() < 1e-12);
            prop_assert!((complex_pair_density(zp, zq) + got).abs() < 1e-12);
        }

        #[test]
        fn fermion_is_modulus_squared(q in complex()) {
            prop_assert!((fermion_density(q) - q.norm_sqr()).abs() < 1e-12 * (1.0 + q.norm_sqr()), "{} vs {}", fermion_density(q), q.norm_sqr());
        }

        #[test]
        fn nonrelativistic_probabilities(raw in prop::collection::vec(complex(), 1..6)) {
            let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            let states: Vec<Complex64> = raw.iter().map(|z| z / norm).collect();
            // ψ(ē_j) = conj ψ(e_j), so ψ(ω_j) = |ψ_j|² and ψ(Ω) = 1.
            let conj: Vec<Complex64> = states.iter().map(|z| z.conj()).collect();
            let report = check_axioms(&AmplitudeEventSpace::from_states(states.clone(), conj), AmplitudeMode::Nonrelativistic);
            prop_assert!(report.passed(), "{:?}", report.violations);
            for (p, z) in report.probabilities.iter().zip(&states) {
                prop_assert!((p - z.norm_sqr()).norm() < 1e-12);
            }
        }
    }
}
