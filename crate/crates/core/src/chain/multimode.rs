//! Fock space of finitely many modes, stored sparsely over occupation
//! tuples. Each mode carries the one-mode Gaussian measure, so the inner
//! product factorises and occupation states are orthonormal.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{normal_modes, ChainError, ChainSpec};
use crate::fock::FockVector;

/// Occupation numbers `(n_0, …, n_{M−1})`.
pub type Occupation = Vec<u32>;

#[derive(Debug, Clone, PartialEq)]
pub struct MultiModeFockVector {
    modes: usize,
    hbar: f64,
    mode_cutoff: u32,
    total_cutoff: u32,
    coeffs: BTreeMap<Occupation, Complex64>,
}

impl MultiModeFockVector {
    /// Zero vector over `modes` modes with occupations `n_k ≤ mode_cutoff`
    /// and `Σ n_k ≤ total_cutoff`.
    pub fn zero(modes: usize, hbar: f64, mode_cutoff: u32, total_cutoff: u32) -> Result<Self, ChainError> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(ChainError::BadHbar(hbar));
        }
        Ok(Self { modes, hbar, mode_cutoff, total_cutoff, coeffs: BTreeMap::new() })
    }

    pub fn vacuum(modes: usize, hbar: f64, mode_cutoff: u32, total_cutoff: u32) -> Result<Self, ChainError> {
        let mut v = Self::zero(modes, hbar, mode_cutoff, total_cutoff)?;
        v.coeffs.insert(vec![0; modes], Complex64::new(1.0, 0.0));
        Ok(v)
    }

    /// Occupation basis state.
    pub fn basis(
        occupation: Occupation,
        hbar: f64,
        mode_cutoff: u32,
        total_cutoff: u32,
    ) -> Result<Self, ChainError> {
        let mut v = Self::zero(occupation.len(), hbar, mode_cutoff, total_cutoff)?;
        v.set(occupation, Complex64::new(1.0, 0.0))?;
        Ok(v)
    }

    /// Tensor product of one-mode vectors; all must share `ħ`.
    pub fn product(factors: &[FockVector], mode_cutoff: u32, total_cutoff: u32) -> Result<Self, ChainError> {
        let hbar = factors.first().map(|f| f.hbar).unwrap_or(1.0);
        if factors.iter().any(|f| f.hbar != hbar) {
            return Err(ChainError::StructureMismatch("factors carry different ħ".into()));
        }
        let mut out = Self::vacuum(0, hbar, mode_cutoff, total_cutoff)?;
        out.modes = factors.len();
        out.coeffs = BTreeMap::from([(Vec::new(), Complex64::new(1.0, 0.0))]);
        for f in factors {
            let mut next = BTreeMap::new();
            for (occ, c) in &out.coeffs {
                for (n, fc) in f.coeffs.iter().enumerate() {
                    if *fc == Complex64::default() {
                        continue;
                    }
                    let mut o = occ.clone();
                    o.push(n as u32);
                    next.insert(o, c * fc);
                }
            }
            out.coeffs = next;
        }
        for occ in out.coeffs.keys() {
            out.check_occupation(occ)?;
        }
        Ok(out)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn cutoffs(&self) -> (u32, u32) {
        (self.mode_cutoff, self.total_cutoff)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn get(&self, occupation: &[u32]) -> Complex64 {
        self.coeffs.get(occupation).copied().unwrap_or_default()
    }

    fn check_occupation(&self, occupation: &[u32]) -> Result<(), ChainError> {
        if occupation.len() != self.modes {
            return Err(ChainError::StructureMismatch(format!(
                "occupation has {} modes, vector has {}",
                occupation.len(),
                self.modes
            )));
        }
        let total: u32 = occupation.iter().sum();
        if occupation.iter().any(|&n| n > self.mode_cutoff) || total > self.total_cutoff {
            return Err(ChainError::Overflow {
                occupation: occupation.to_vec(),
                mode_cutoff: self.mode_cutoff,
                total_cutoff: self.total_cutoff,
            });
        }
        Ok(())
    }

    pub fn set(&mut self, occupation: Occupation, value: Complex64) -> Result<(), ChainError> {
        self.check_occupation(&occupation)?;
        if value == Complex64::default() {
            self.coeffs.remove(&occupation);
        } else {
            self.coeffs.insert(occupation, value);
        }
        Ok(())
    }

    fn accumulate(&mut self, occupation: Occupation, value: Complex64) {
        *self.coeffs.entry(occupation).or_default() += value;
    }

    fn empty_like(&self) -> Self {
        Self { coeffs: BTreeMap::new(), ..self.clone() }
    }

    fn check_same(&self, other: &Self) -> Result<(), ChainError> {
        if self.modes != other.modes {
            return Err(ChainError::StructureMismatch(format!("{} vs {} modes", self.modes, other.modes)));
        }
        if self.hbar != other.hbar {
            return Err(ChainError::StructureMismatch(format!("ħ {} vs {}", self.hbar, other.hbar)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, ChainError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (o, c) in &other.coeffs {
            out.accumulate(o.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ChainError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(o, c)| (o.clone(), c * s)).collect(), ..self.clone() }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn check_mode(&self, k: usize) -> Result<(), ChainError> {
        if k >= self.modes {
            return Err(ChainError::ModeIndex { index: k, modes: self.modes });
        }
        Ok(())
    }

    /// `â_k⁺`: `|…n_k…⟩ ↦ √((n_k+1)ħ) |…n_k+1…⟩`; errors when the result
    /// leaves the truncation.
    pub fn raise(&self, k: usize) -> Result<Self, ChainError> {
        self.check_mode(k)?;
        let mut out = self.empty_like();
        for (occ, c) in &self.coeffs {
            let mut o = occ.clone();
            o[k] += 1;
            self.check_occupation(&o)?;
            out.accumulate(o, c * ((occ[k] as f64 + 1.0) * self.hbar).sqrt());
        }
        Ok(out)
    }

    /// `â_k`: `|…n_k…⟩ ↦ √(n_k ħ) |…n_k−1…⟩`.
    pub fn lower(&self, k: usize) -> Result<Self, ChainError> {
        self.check_mode(k)?;
        let mut out = self.empty_like();
        for (occ, c) in &self.coeffs {
            if occ[k] == 0 {
                continue;
            }
            let mut o = occ.clone();
            o[k] -= 1;
            out.accumulate(o, c * (occ[k] as f64 * self.hbar).sqrt());
        }
        Ok(out)
    }

    /// `N̂ Φ` with `N̂ = Σ_k â_k⁺ â_k / ħ`.
    pub fn apply_number(&self) -> Result<Self, ChainError> {
        let mut out = self.empty_like();
        for k in 0..self.modes {
            let term = self.lower(k)?.raise(k)?;
            out = out.add(&term)?;
        }
        Ok(out.scale(Complex64::from(1.0 / self.hbar)))
    }

    /// `⟨N̂⟩` and `Var(N̂)` in this (not necessarily normalised) state.
    pub fn number_moments(&self) -> Result<(f64, f64), ChainError> {
        let norm = self.norm_sqr();
        let n1 = self.apply_number()?;
        let mean = fock_inner(&n1, self)?.re / norm;
        let second = n1.norm_sqr() / norm;
        Ok((mean, second - mean * mean))
    }

    /// `⟨â_k⁺ â_k⟩/ħ` for each mode, normalised by `‖Φ‖²`.
    pub fn mode_occupations(&self) -> Result<Vec<f64>, ChainError> {
        let norm = self.norm_sqr();
        (0..self.modes).map(|k| Ok(self.lower(k)?.norm_sqr() / (self.hbar * norm))).collect()
    }
}

/// `(Φ1, Φ2) = Σ_n c_n(Φ1) conj(c_n(Φ2))`, the product over modes of the
/// one-mode Gaussian-measure inner products in the occupation basis.
pub fn fock_inner(a: &MultiModeFockVector, b: &MultiModeFockVector) -> Result<Complex64, ChainError> {
    a.check_same(b)?;
    Ok(a.coeffs.iter().map(|(o, c)| c * b.get(o).conj()).sum())
}

/// `Ĥ Φ` with `Ĥ = Σ_k ω_k ½(â_k⁺â_k + â_kâ_k⁺)` and `ω_k` the chain's
/// normal-mode frequencies (one Fock mode per chain mode). Occupation
/// states have eigenvalue `Σ_k ω_k ħ (n_k + ½)`.
pub fn hamiltonian_operator_apply(phi: &MultiModeFockVector, spec: &ChainSpec) -> Result<MultiModeFockVector, ChainError> {
    if phi.modes != spec.sites {
        return Err(ChainError::StructureMismatch(format!("{} Fock modes for {} chain modes", phi.modes, spec.sites)));
    }
    apply_mode_hamiltonian(phi, &normal_modes(spec).frequencies)
}

/// [`hamiltonian_operator_apply`] with explicit frequencies.
pub fn apply_mode_hamiltonian(phi: &MultiModeFockVector, frequencies: &[f64]) -> Result<MultiModeFockVector, ChainError> {
    if phi.modes != frequencies.len() {
        return Err(ChainError::StructureMismatch(format!("{} modes, {} frequencies", phi.modes, frequencies.len())));
    }
    let mut out = phi.empty_like();
    for (k, &w) in frequencies.iter().enumerate() {
        let normal = phi.lower(k)?.raise(k)?;
        let anti = phi.raise(k)?.lower(k)?;
        out = out.add(&normal.add(&anti)?.scale(Complex64::from(0.5 * w)))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_product_examples() {
        let vac = MultiModeFockVector::vacuum(3, 1.0, 3, 4).unwrap();
        assert_eq!(fock_inner(&vac, &vac).unwrap(), c(1.0, 0.0));
        let one0 = MultiModeFockVector::basis(vec![1, 0, 0], 1.0, 3, 4).unwrap();
        let one1 = MultiModeFockVector::basis(vec![0, 1, 0], 1.0, 3, 4).unwrap();
        assert_eq!(fock_inner(&one0, &one1).unwrap(), c(0.0, 0.0));
        let other = MultiModeFockVector::vacuum(2, 1.0, 3, 4).unwrap();
        assert!(fock_inner(&vac, &other).is_err());
        let other_hbar = MultiModeFockVector::vacuum(3, 0.5, 3, 4).unwrap();
        assert!(fock_inner(&vac, &other_hbar).is_err());
    }

    #[test]
    fn product_states_factorise() {
        let f = FockVector::new(vec![c(0.3, 0.1), c(0.5, -0.2), c(0.0, 0.4)], 0.7).unwrap();
        let g = FockVector::new(vec![c(0.1, 0.0), c(-0.6, 0.3)], 0.7).unwrap();
        let h = FockVector::new(vec![c(0.2, 0.2), c(0.1, -0.1), c(0.3, 0.0)], 0.7).unwrap();
        let k = FockVector::new(vec![c(0.5, 0.0), c(0.0, 0.5)], 0.7).unwrap();
        let fg = MultiModeFockVector::product(&[f.clone(), g.clone()], 3, 6).unwrap();
        let hk = MultiModeFockVector::product(&[h.clone(), k.clone()], 3, 6).unwrap();
        let expect = crate::fock::inner_product(&f, &h).unwrap() * crate::fock::inner_product(&g, &k).unwrap();
        assert!((fock_inner(&fg, &hk).unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn overflow_is_an_error() {
        let top = MultiModeFockVector::basis(vec![2, 0], 1.0, 2, 2).unwrap();
        assert!(matches!(top.raise(0), Err(ChainError::Overflow { .. })));
        assert!(matches!(top.raise(1), Err(ChainError::Overflow { .. })));
        assert!(top.raise(2).is_err());
        assert!(MultiModeFockVector::basis(vec![3], 1.0, 2, 5).is_err());
    }

    #[test]
    fn hamiltonian_examples() {
        let spec = ChainSpec::new(4, 1.0, 1.0, 1.0).unwrap();
        let w = normal_modes(&spec).frequencies;
        let hbar = 0.8;
        let vac = MultiModeFockVector::vacuum(4, hbar, 3, 3).unwrap();
        let hv = hamiltonian_operator_apply(&vac, &spec).unwrap();
        let zero_point: f64 = w.iter().map(|x| 0.5 * hbar * x).sum();
        assert!((hv.get(&[0, 0, 0, 0]) - zero_point).norm() < 1e-14);
        for k in 0..4 {
            let mut occ = vec![0; 4];
            occ[k] = 1;
            let one = MultiModeFockVector::basis(occ.clone(), hbar, 3, 3).unwrap();
            let h1 = hamiltonian_operator_apply(&one, &spec).unwrap();
            assert!((h1.get(&occ) - (zero_point + hbar * w[k])).norm() < 1e-14);
            assert_eq!(h1.coefficients().count(), 1);
        }
        // additivity: two quanta in different modes
        let two = MultiModeFockVector::basis(vec![1, 0, 1, 0], hbar, 3, 3).unwrap();
        let h2 = hamiltonian_operator_apply(&two, &spec).unwrap();
        assert!((h2.get(&[1, 0, 1, 0]) - (zero_point + hbar * (w[0] + w[2]))).norm() < 1e-14);
    }

    #[test]
    fn number_moments_of_basis_states() {
        let v = MultiModeFockVector::basis(vec![2, 1, 0], 1.3, 3, 4).unwrap();
        let (mean, var) = v.number_moments().unwrap();
        assert!((mean - 3.0).abs() < 1e-14);
        assert!(var.abs() < 1e-12);
    }

    fn random_vector(parts: &[(f64, f64)]) -> MultiModeFockVector {
        // three modes, interior occupations (total ≤ 3) inside cutoff 5
        let mut v = MultiModeFockVector::zero(3, 0.9, 5, 5).unwrap();
        let mut i = 0;
        for a in 0..=3u32 {
            for b in 0..=(3 - a) {
                for cc in 0..=(3 - a - b) {
                    let (re, im) = parts[i % parts.len()];
                    v.set(vec![a, b, cc], c(re, im)).unwrap();
                    i += 1;
                }
            }
        }
        v
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn commutators_on_interior(parts in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 20)) {
            let v = random_vector(&parts);
            for k in 0..3 {
                for kp in 0..3 {
                    let lhs = v.raise(kp).unwrap().lower(k).unwrap();
                    let rhs = v.lower(k).unwrap().raise(kp).unwrap();
                    let mut d = lhs.sub(&rhs).unwrap();
                    if k == kp {
                        d = d.sub(&v.scale(c(0.9, 0.0))).unwrap();
                    }
                    prop_assert!(d.max_abs() < 1e-12, "k={} k'={} defect {}", k, kp, d.max_abs());
                }
            }
        }

        #[test]
        fn ladder_adjointness(a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 20),
                              b in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 20)) {
            let f = random_vector(&a);
            let g = random_vector(&b);
            for k in 0..3 {
                let lhs = fock_inner(&f.raise(k).unwrap(), &g).unwrap();
                let rhs = fock_inner(&f, &g.lower(k).unwrap()).unwrap();
                prop_assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }
}
