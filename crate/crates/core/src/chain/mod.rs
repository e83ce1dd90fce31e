//! Periodic chain of coupled oscillators
//! `H = Σ ½(p_n² + m² q_n² + γ (q_{n+1} − q_n)²)`: normal modes and
//! dispersion, leapfrog dynamics, exact Gibbs sampling, and the continuum
//! and non-relativistic limits of the dispersion law.

mod multimode;

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use thiserror::Error;

use crate::charfn::{momentum_amplitude, GridWaveFunction, UniformGrid};
use crate::numerics::sample_blocks;

pub use multimode::{apply_mode_hamiltonian, fock_inner, hamiltonian_operator_apply, MultiModeFockVector, Occupation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("chain needs N >= 2, a > 0, m >= 0, γ > 0 (got N = {sites}, a = {spacing}, m = {mass}, γ = {gamma})")]
    BadSpec { sites: usize, spacing: f64, mass: f64, gamma: f64 },
    #[error("state has {got} sites, chain has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("mode {index} (k = {wavenumber}) has zero frequency; massless chains have no normal amplitude there")]
    ZeroFrequency { index: usize, wavenumber: f64 },
    #[error("time step {dt} is not below the leapfrog stability bound 2/ω_max = {bound}")]
    Unstable { dt: f64, bound: f64 },
    #[error("β must be positive (got {0})")]
    BadBeta(f64),
    #[error("k window {window} exceeds the Brillouin zone π/a = {zone} at a = {spacing}")]
    WindowTooWide { window: f64, zone: f64, spacing: f64 },
    #[error(
        "packet too fast for the non-relativistic limit: spectral mass {tail_mass:e} above |k| = m/10 = {cutoff} \
         (must be <= 1e-3)"
    )]
    Relativistic { tail_mass: f64, cutoff: f64 },
    #[error("mass must be positive (got {0})")]
    BadMass(f64),
    #[error("mode structures differ: {0}")]
    StructureMismatch(String),
    #[error("occupation {occupation:?} exceeds the truncation (per mode {mode_cutoff}, total {total_cutoff})")]
    Overflow { occupation: Vec<u32>, mode_cutoff: u32, total_cutoff: u32 },
    #[error("mode index {index} out of range for {modes} modes")]
    ModeIndex { index: usize, modes: usize },
    #[error("ħ must be positive (got {0})")]
    BadHbar(f64),
}

/// Periodic chain with `N` sites at spacing `a`, mass `m` and coupling `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub sites: usize,
    pub spacing: f64,
    pub mass: f64,
    pub gamma: f64,
}

impl ChainSpec {
    pub fn new(sites: usize, spacing: f64, mass: f64, gamma: f64) -> Result<Self, ChainError> {
        let ok = sites >= 2
            && spacing > 0.0
            && spacing.is_finite()
            && mass >= 0.0
            && mass.is_finite()
            && gamma > 0.0
            && gamma.is_finite();
        if !ok {
            return Err(ChainError::BadSpec { sites, spacing, mass, gamma });
        }
        Ok(Self { sites, spacing, mass, gamma })
    }

    /// Brillouin bound `Δ = π/a`.
    pub fn zone_edge(&self) -> f64 {
        PI / self.spacing
    }

    /// Wavenumber of DFT mode `j`, folded into `(−π/a, π/a]`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let n = self.sites as i64;
        let mut s = j as i64;
        if 2 * s > n {
            s -= n;
        }
        2.0 * PI * s as f64 / (n as f64 * self.spacing)
    }

    /// `ω(k)² = m² + 4γ sin²(ka/2)`.
    pub fn dispersion(&self, k: f64) -> f64 {
        (self.mass * self.mass + 4.0 * self.gamma * (0.5 * k * self.spacing).sin().powi(2)).sqrt()
    }

    /// Reference frequency `ω = √(m² + γ/a²)` for the rescaled amplitudes.
    pub fn reference_frequency(&self) -> f64 {
        (self.mass * self.mass + self.gamma / (self.spacing * self.spacing)).sqrt()
    }

    pub fn max_frequency(&self) -> f64 {
        (0..self.sites).map(|j| self.dispersion(self.wavenumber(j))).fold(0.0, f64::max)
    }

    /// Largest stable leapfrog step `2/ω_max`.
    pub fn stability_bound(&self) -> f64 {
        2.0 / self.max_frequency()
    }

    /// Default leapfrog step `0.1/ω_max`.
    pub fn default_dt(&self) -> f64 {
        0.1 / self.max_frequency()
    }

    /// Force matrix `K` with `H = ½pᵀp + ½qᵀKq`.
    pub fn coupling_matrix(&self) -> DMatrix<f64> {
        let n = self.sites;
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            k[(i, i)] += self.mass * self.mass;
            let j = (i + 1) % n;
            k[(i, i)] += self.gamma;
            k[(j, j)] += self.gamma;
            k[(i, j)] -= self.gamma;
            k[(j, i)] -= self.gamma;
        }
        k
    }

    /// `(Kq)_n = m² q_n + γ(2q_n − q_{n+1} − q_{n−1})`.
    pub fn apply_coupling(&self, q: &[f64], out: &mut [f64]) {
        let n = self.sites;
        let m2 = self.mass * self.mass;
        for i in 0..n {
            let l = q[(i + n - 1) % n];
            let r = q[(i + 1) % n];
            out[i] = m2 * q[i] + self.gamma * (2.0 * q[i] - l - r);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl ChainState {
    pub fn zero(sites: usize) -> Self {
        Self { q: vec![0.0; sites], p: vec![0.0; sites] }
    }

    fn check(&self, spec: &ChainSpec) -> Result<(), ChainError> {
        for len in [self.q.len(), self.p.len()] {
            if len != spec.sites {
                return Err(ChainError::LengthMismatch { expected: spec.sites, got: len });
            }
        }
        Ok(())
    }
}

/// `H = Σ ½(p_n² + m² q_n² + γ(q_{n+1} − q_n)²)` with periodic indexing.
pub fn hamiltonian(s: &ChainState, spec: &ChainSpec) -> Result<f64, ChainError> {
    s.check(spec)?;
    let n = spec.sites;
    Ok((0..n)
        .map(|i| {
            let d = s.q[(i + 1) % n] - s.q[i];
            0.5 * (s.p[i] * s.p[i] + spec.mass * spec.mass * s.q[i] * s.q[i] + spec.gamma * d * d)
        })
        .sum())
}

/// Normal-mode description of a chain state. Index `j` is the DFT index;
/// `wavenumbers[j]` is folded into the Brillouin zone.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeData {
    pub wavenumbers: Vec<f64>,
    pub frequencies: Vec<f64>,
    /// `u(k_j) = N^{-1/2} Σ_n e^{−i k_j n a} q_n`.
    pub u: Vec<Complex64>,
    /// `p(k_j)`, same transform of the momenta.
    pub p: Vec<Complex64>,
}

impl ModeData {
    fn index_of_negative(&self, j: usize) -> usize {
        let n = self.u.len();
        (n - j) % n
    }

    /// Complex normal amplitudes `a(k) = √(ω_k/2) u(−k) + i p(−k)/√(2ω_k)`,
    /// so that `H = Σ_k ω_k |a(k)|²`.
    pub fn amplitudes(&self) -> Result<Vec<Complex64>, ChainError> {
        (0..self.u.len())
            .map(|j| {
                let w = self.frequencies[j];
                if w == 0.0 {
                    return Err(ChainError::ZeroFrequency { index: j, wavenumber: self.wavenumbers[j] });
                }
                let mj = self.index_of_negative(j);
                Ok((0.5 * w).sqrt() * self.u[mj] + Complex64::i() * self.p[mj] / (2.0 * w).sqrt())
            })
            .collect()
    }

    /// `½(|p(k)|² + ω_k² |u(k)|²)` for each mode.
    pub fn mode_energies(&self) -> Vec<f64> {
        (0..self.u.len())
            .map(|j| 0.5 * (self.p[j].norm_sqr() + self.frequencies[j].powi(2) * self.u[j].norm_sqr()))
            .collect()
    }

    pub fn total_energy(&self) -> f64 {
        self.mode_energies().iter().sum()
    }
}

/// Wavenumbers and frequencies of all `N` modes; amplitudes are zero.
pub fn normal_modes(spec: &ChainSpec) -> ModeData {
    let n = spec.sites;
    let wavenumbers: Vec<f64> = (0..n).map(|j| spec.wavenumber(j)).collect();
    let frequencies = wavenumbers.iter().map(|&k| spec.dispersion(k)).collect();
    ModeData { wavenumbers, frequencies, u: vec![Complex64::default(); n], p: vec![Complex64::default(); n] }
}

/// Frequencies from a dense symmetric eigen-decomposition of the coupling
/// matrix, sorted ascending.
pub fn dense_frequencies(spec: &ChainSpec) -> Vec<f64> {
    let eig = SymmetricEigen::new(spec.coupling_matrix());
    let mut w: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    w.sort_by(f64::total_cmp);
    w
}

fn dft(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let norm = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|j| {
            values
                .iter()
                .enumerate()
                .map(|(site, &v)| Complex64::from_polar(v, -2.0 * PI * (j * site % n) as f64 / n as f64))
                .sum::<Complex64>()
                * norm
        })
        .collect()
}

fn idft(values: &[Complex64]) -> Vec<f64> {
    let n = values.len();
    let norm = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|site| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, 2.0 * PI * (j * site % n) as f64 / n as f64))
                .sum::<Complex64>()
                .re
                * norm
        })
        .collect()
}

/// Orthonormal plane-wave transform of a chain state.
pub fn mode_transform(s: &ChainState, spec: &ChainSpec) -> Result<ModeData, ChainError> {
    s.check(spec)?;
    let mut modes = normal_modes(spec);
    modes.u = dft(&s.q);
    modes.p = dft(&s.p);
    Ok(modes)
}

/// Inverse of [`mode_transform`].
pub fn inverse_transform(m: &ModeData, spec: &ChainSpec) -> Result<ChainState, ChainError> {
    if m.u.len() != spec.sites || m.p.len() != spec.sites {
        return Err(ChainError::LengthMismatch { expected: spec.sites, got: m.u.len() });
    }
    Ok(ChainState { q: idft(&m.u), p: idft(&m.p) })
}

/// Amplitudes in the rescaled variables `a_k = √λ_k a(k)`, `λ_k = ω_k/ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledModes {
    pub reference_frequency: f64,
    pub lambdas: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
}

impl RescaledModes {
    /// `ω Σ_k |a_k|²`.
    pub fn energy(&self) -> f64 {
        self.reference_frequency * self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }
}

pub fn rescaled_modes(m: &ModeData, spec: &ChainSpec) -> Result<RescaledModes, ChainError> {
    let a = m.amplitudes()?;
    let omega = spec.reference_frequency();
    let lambdas: Vec<f64> = m.frequencies.iter().map(|w| w / omega).collect();
    let amplitudes = a.iter().zip(&lambdas).map(|(a, l)| a * l.sqrt()).collect();
    Ok(RescaledModes { reference_frequency: omega, lambdas, amplitudes })
}

/// `½pᵀp + ½qᵀK(I − dt²K/4)q`, the quadratic form conserved exactly by the
/// kick–drift–kick leapfrog map with step `dt`.
pub fn shadow_energy(s: &ChainState, spec: &ChainSpec, dt: f64) -> Result<f64, ChainError> {
    s.check(spec)?;
    let n = spec.sites;
    let mut kq = vec![0.0; n];
    spec.apply_coupling(&s.q, &mut kq);
    let mut kkq = vec![0.0; n];
    spec.apply_coupling(&kq, &mut kkq);
    let kinetic: f64 = s.p.iter().map(|p| p * p).sum::<f64>() * 0.5;
    let potential: f64 = s.q.iter().zip(&kq).zip(&kkq).map(|((q, a), b)| q * (a - 0.25 * dt * dt * b)).sum::<f64>() * 0.5;
    Ok(kinetic + potential)
}

/// Leapfrog (kick–drift–kick) trajectory. Element `i` is the state after
/// `i` steps; element 0 is the initial state.
pub fn evolve(s: &ChainState, spec: &ChainSpec, dt: f64, steps: usize) -> Result<Vec<ChainState>, ChainError> {
    let mut out = Vec::with_capacity(steps + 1);
    leapfrog(s, spec, dt, steps, |st| out.push(st.clone()))?;
    Ok(out)
}

/// Same dynamics as [`evolve`], calling `visit` on every state instead of
/// storing the trajectory.
pub fn leapfrog<F: FnMut(&ChainState)>(
    s: &ChainState,
    spec: &ChainSpec,
    dt: f64,
    steps: usize,
    mut visit: F,
) -> Result<ChainState, ChainError> {
    s.check(spec)?;
    let bound = spec.stability_bound();
    if !(dt.abs() < bound) {
        return Err(ChainError::Unstable { dt, bound });
    }
    let n = spec.sites;
    let mut st = s.clone();
    let mut force = vec![0.0; n];
    spec.apply_coupling(&st.q, &mut force);
    visit(&st);
    for _ in 0..steps {
        for i in 0..n {
            st.p[i] -= 0.5 * dt * force[i];
            st.q[i] += dt * st.p[i];
        }
        spec.apply_coupling(&st.q, &mut force);
        for i in 0..n {
            st.p[i] -= 0.5 * dt * force[i];
        }
        visit(&st);
    }
    Ok(st)
}

/// Energy bookkeeping of a leapfrog run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDrift {
    /// `max_t |H̃(t) − H̃(0)| / H̃(0)` for the conserved [`shadow_energy`].
    pub shadow_relative: f64,
    /// `max_t |H(t) − H(0)| / H(0)`; bounded by about `(ω_max dt)²/4`,
    /// oscillating rather than drifting.
    pub hamiltonian_relative: f64,
}

pub fn energy_drift(s: &ChainState, spec: &ChainSpec, dt: f64, steps: usize) -> Result<EnergyDrift, ChainError> {
    let h0 = hamiltonian(s, spec)?;
    let s0 = shadow_energy(s, spec, dt)?;
    let mut worst_h: f64 = 0.0;
    let mut worst_s: f64 = 0.0;
    leapfrog(s, spec, dt, steps, |st| {
        let h = hamiltonian(st, spec).expect("checked");
        let sh = shadow_energy(st, spec, dt).expect("checked");
        worst_h = worst_h.max((h - h0).abs());
        worst_s = worst_s.max((sh - s0).abs());
    })?;
    let rel = |x: f64, r: f64| if r > 0.0 { x / r } else { x };
    Ok(EnergyDrift { shadow_relative: rel(worst_s, s0), hamiltonian_relative: rel(worst_h, h0) })
}

/// State with only the standing wave `q_n = A cos(k_j n a)` excited.
pub fn standing_wave(spec: &ChainSpec, j: usize, amplitude: f64) -> ChainState {
    let k = spec.wavenumber(j);
    let q = (0..spec.sites).map(|n| amplitude * (k * n as f64 * spec.spacing).cos()).collect();
    ChainState { q, p: vec![0.0; spec.sites] }
}

/// Angular frequency of the dominant spectral line of `signal` sampled at
/// step `dt`: Hann-windowed FFT peak, refined by golden-section search on
/// the windowed discrete-time Fourier transform.
pub fn spectral_peak(signal: &[f64], dt: f64) -> f64 {
    let n = signal.len();
    let windowed: Vec<f64> = signal
        .iter()
        .enumerate()
        .map(|(i, x)| x * (0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos()))
        .collect();
    let padded = (4 * n).next_power_of_two();
    let mut buf: Vec<Complex64> = windowed.iter().map(|&x| Complex64::from(x)).collect();
    buf.resize(padded, Complex64::default());
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);
    let (best, _) = buf[1..padded / 2]
        .iter()
        .enumerate()
        .map(|(i, v)| (i + 1, v.norm_sqr()))
        .fold((1, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let bin = 2.0 * PI / (padded as f64 * dt);
    let power = |w: f64| -> f64 {
        windowed
            .iter()
            .enumerate()
            .map(|(i, &x)| Complex64::from_polar(x, -w * i as f64 * dt))
            .sum::<Complex64>()
            .norm_sqr()
    };
    // golden-section maximisation on [bin·(best−1), bin·(best+1)]
    let (mut lo, mut hi) = (bin * (best as f64 - 1.0), bin * (best as f64 + 1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (power(x1), power(x2));
    for _ in 0..80 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = power(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = power(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Runs a standing wave in mode `j` and returns the spectral-peak
/// frequency of its projection onto that mode.
pub fn measured_mode_frequency(spec: &ChainSpec, j: usize, dt: f64, steps: usize) -> Result<f64, ChainError> {
    let init = standing_wave(spec, j, 1.0);
    let k = spec.wavenumber(j);
    let basis: Vec<f64> = (0..spec.sites).map(|n| (k * n as f64 * spec.spacing).cos()).collect();
    let mut signal = Vec::with_capacity(steps + 1);
    leapfrog(&init, spec, dt, steps, |st| {
        signal.push(st.q.iter().zip(&basis).map(|(q, b)| q * b).sum::<f64>());
    })?;
    Ok(spectral_peak(&signal, dt))
}

/// Real orthonormal Fourier basis: vectors and their mode frequencies.
fn real_mode_basis(spec: &ChainSpec) -> Vec<(Vec<f64>, f64)> {
    let n = spec.sites;
    let mut out = Vec::with_capacity(n);
    let site_angle = |j: usize, s: usize| 2.0 * PI * (j * s % n) as f64 / n as f64;
    out.push((vec![1.0 / (n as f64).sqrt(); n], spec.dispersion(0.0)));
    let c = (2.0 / n as f64).sqrt();
    for j in 1..n.div_ceil(2) {
        let w = spec.dispersion(spec.wavenumber(j));
        out.push(((0..n).map(|s| c * site_angle(j, s).cos()).collect(), w));
        out.push(((0..n).map(|s| c * site_angle(j, s).sin()).collect(), w));
    }
    if n.is_multiple_of(2) {
        let w = spec.dispersion(spec.wavenumber(n / 2));
        out.push(((0..n).map(|s| if s % 2 == 0 { 1.0 } else { -1.0 } / (n as f64).sqrt()).collect(), w));
    }
    out
}

/// `n` independent draws from `e^{−βH}`, sampled exactly as independent
/// Gaussians in real normal coordinates and mapped back to sites.
pub fn gibbs_sample(spec: &ChainSpec, beta: f64, n: usize, seed: u64) -> Result<Vec<ChainState>, ChainError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(ChainError::BadBeta(beta));
    }
    let basis = real_mode_basis(spec);
    if let Some((i, _)) = basis.iter().enumerate().find(|(_, (_, w))| *w == 0.0) {
        return Err(ChainError::ZeroFrequency { index: i, wavenumber: 0.0 });
    }
    let sites = spec.sites;
    let sd_p = 1.0 / beta.sqrt();
    Ok(sample_blocks(seed, n, |rng| {
        let mut st = ChainState::zero(sites);
        for (vec, w) in &basis {
            let zq: f64 = StandardNormal.sample(rng);
            let zp: f64 = StandardNormal.sample(rng);
            let qm = zq * sd_p / w;
            let pm = zp * sd_p;
            for s in 0..sites {
                st.q[s] += qm * vec[s];
                st.p[s] += pm * vec[s];
            }
        }
        st
    }))
}

/// `ω_chain(k)` for `γ = 1/a²`, compared with `√(m² + k²)` on `points`
/// wavenumbers spanning `[−k_window, k_window]`; one `(a, max error)` row
/// per spacing.
pub fn continuum_limit_error(mass: f64, k_window: f64, spacings: &[f64]) -> Result<Vec<(f64, f64)>, ChainError> {
    const POINTS: usize = 201;
    spacings
        .iter()
        .map(|&a| {
            let spec = ChainSpec::new(2, a, mass, 1.0 / (a * a))?;
            if k_window > spec.zone_edge() {
                return Err(ChainError::WindowTooWide { window: k_window, zone: spec.zone_edge(), spacing: a });
            }
            let err = (0..POINTS)
                .map(|i| {
                    let k = -k_window + 2.0 * k_window * i as f64 / (POINTS - 1) as f64;
                    (spec.dispersion(k) - (mass * mass + k * k).sqrt()).abs()
                })
                .fold(0.0, f64::max);
            Ok((a, err))
        })
        .collect()
}

/// Ratios `err(a_i)/err(a_{i+1})` of consecutive rows.
pub fn convergence_ratios(rows: &[(f64, f64)]) -> Vec<f64> {
    rows.windows(2).map(|w| w[0].1 / w[1].1).collect()
}

/// Gaussian packet with `σ_x = 1`, mean wavenumber 1, on `[−20, 20]` with
/// 1024 points.
pub fn standard_packet() -> GridWaveFunction {
    packet(1.0, 1.0)
}

pub fn packet(sigma: f64, k0: f64) -> GridWaveFunction {
    let grid = UniformGrid::new(-20.0, 40.0 / 1024.0, 1024).expect("static grid");
    let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
    GridWaveFunction::from_fn(grid, |x| Complex64::from_polar(norm * (-x * x / (4.0 * sigma * sigma)).exp(), k0 * x))
}

/// `|⟨ψ_S(t)|ψ_K(t)⟩|` between the packet evolved with the positive-energy
/// Klein–Fock–Gordon phase `e^{−i(√(m²+k²) − m)t}` (rest phase removed) and
/// with the free Schrödinger phase `e^{−ik²t/2m}`, computed on the momentum
/// lattice. No precondition is checked.
pub fn dual_evolution_overlap(packet: &GridWaveFunction, mass: f64, t: f64) -> Result<f64, ChainError> {
    if !(mass > 0.0) {
        return Err(ChainError::BadMass(mass));
    }
    let (k, amp) = momentum_amplitude(packet);
    let mut inner = Complex64::default();
    let mut norm = 0.0;
    for (kv, a) in k.points().zip(&amp) {
        let kfg = ((mass * mass + kv * kv).sqrt() - mass) * t;
        let schr = kv * kv * t / (2.0 * mass);
        inner += a.norm_sqr() * Complex64::from_polar(1.0, schr - kfg);
        norm += a.norm_sqr();
    }
    Ok(inner.norm() / norm)
}

/// Fraction of the packet's spectral mass with `|k| > m/10`.
pub fn spectral_tail_above(packet: &GridWaveFunction, cutoff: f64) -> f64 {
    let (k, amp) = momentum_amplitude(packet);
    let total: f64 = amp.iter().map(|a| a.norm_sqr()).sum();
    let tail: f64 = k.points().zip(&amp).filter(|(kv, _)| kv.abs() > cutoff).map(|(_, a)| a.norm_sqr()).sum();
    tail / total
}

/// [`dual_evolution_overlap`] after checking that at least 99.9% of the
/// spectral mass lies below `m/10`.
pub fn nonrelativistic_overlap(packet: &GridWaveFunction, mass: f64, t: f64) -> Result<f64, ChainError> {
    if !(mass > 0.0) {
        return Err(ChainError::BadMass(mass));
    }
    let cutoff = mass / 10.0;
    let tail_mass = spectral_tail_above(packet, cutoff);
    if tail_mass > 1e-3 {
        return Err(ChainError::Relativistic { tail_mass, cutoff });
    }
    dual_evolution_overlap(packet, mass, t)
}
