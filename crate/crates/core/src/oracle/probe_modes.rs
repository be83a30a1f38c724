use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::DEFAULT_CAPACITY;
use crate::error::{domain, Error, Result};
use crate::models::{thermal_occupation, Statistics};

/// Two-level probe coupled to `M` independent modes,
/// `H = ν σ+σ- + Σ ω_m b†_m b_m + g Σ A_m (σ+ b_m + σ- b†_m)`.
///
/// Fermionic modes hold 0 or 1 quanta; bosonic ones up to `truncation`.
/// The excitation number `σ+σ- + Σ b†b` is conserved, so each sector is diagonalised on its own.
#[derive(Debug, Clone)]
pub struct FockSystem {
    pub mode_frequencies: Vec<f64>,
    pub mode_couplings: Vec<f64>,
    pub statistics: Statistics,
    pub level_gap: f64,
    pub coupling: f64,
    pub truncation: usize,
    sectors: Vec<Sector>,
    /// occupation vector → (sector, row) for ground-state probe configurations
    lookup: HashMap<Vec<usize>, (usize, usize)>,
}

#[derive(Debug, Clone)]
struct Sector {
    /// (probe excited, occupations)
    states: Vec<(bool, Vec<usize>)>,
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

fn occupations(m: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max).map(move |q| {
                    let mut w = v.clone();
                    w.push(q);
                    w
                })
            })
            .collect();
    }
    out
}

impl FockSystem {
    pub fn new(
        mode_frequencies: Vec<f64>,
        mode_couplings: Vec<f64>,
        statistics: Statistics,
        level_gap: f64,
        coupling: f64,
        truncation: usize,
    ) -> Result<Self> {
        Self::with_capacity(mode_frequencies, mode_couplings, statistics, level_gap, coupling, truncation, DEFAULT_CAPACITY)
    }

    pub fn with_capacity(
        mode_frequencies: Vec<f64>,
        mode_couplings: Vec<f64>,
        statistics: Statistics,
        level_gap: f64,
        coupling: f64,
        truncation: usize,
        capacity: usize,
    ) -> Result<Self> {
        let m = mode_frequencies.len();
        if m == 0 || mode_couplings.len() != m {
            return domain("need one coupling per mode and at least one mode");
        }
        let max = match statistics {
            Statistics::Fermionic => 1,
            Statistics::Bosonic => {
                if truncation == 0 {
                    return domain("bosonic truncation must be at least 1");
                }
                truncation
            }
        };
        let dimension = (max + 1).checked_pow(m as u32).and_then(|d| d.checked_mul(2)).unwrap_or(usize::MAX);
        if dimension > capacity {
            return Err(Error::Capacity { dimension, cap: capacity });
        }

        let mut by_count: HashMap<usize, Vec<(bool, Vec<usize>)>> = HashMap::new();
        for occ in occupations(m, max) {
            let total: usize = occ.iter().sum();
            by_count.entry(total).or_default().push((false, occ.clone()));
            by_count.entry(total + 1).or_default().push((true, occ));
        }
        let mut counts: Vec<usize> = by_count.keys().copied().collect();
        counts.sort_unstable();

        let mut sectors = Vec::with_capacity(counts.len());
        let mut lookup = HashMap::new();
        for count in counts {
            let states = by_count.remove(&count).unwrap();
            let index: HashMap<&(bool, Vec<usize>), usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
            let d = states.len();
            let mut h = DMatrix::<f64>::zeros(d, d);
            for (i, (excited, occ)) in states.iter().enumerate() {
                h[(i, i)] = if *excited { level_gap } else { 0.0 }
                    + occ.iter().zip(&mode_frequencies).map(|(&q, w)| q as f64 * w).sum::<f64>();
                if !*excited {
                    // σ+ b_m takes one quantum out of mode m
                    for mode in 0..m {
                        if occ[mode] > 0 {
                            let mut lower = occ.clone();
                            lower[mode] -= 1;
                            if let Some(&jdx) = index.get(&(true, lower)) {
                                let v = coupling * mode_couplings[mode] * (occ[mode] as f64).sqrt();
                                h[(jdx, i)] += v;
                                h[(i, jdx)] += v;
                            }
                        }
                    }
                }
            }
            if (&h - h.transpose()).amax() > 1e-12 {
                return Err(Error::Contract("sector Hamiltonian is not Hermitian".into()));
            }
            let eig = SymmetricEigen::new(h);
            let sector_id = sectors.len();
            for (row, (excited, occ)) in states.iter().enumerate() {
                if !*excited {
                    lookup.insert(occ.clone(), (sector_id, row));
                }
            }
            sectors.push(Sector { states, energies: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors });
        }
        Ok(Self { mode_frequencies, mode_couplings, statistics, level_gap, coupling, truncation: max, sectors, lookup })
    }

    fn evolve(&self, initial: &[usize], t: f64) -> Result<(usize, Vec<Complex64>)> {
        let &(sid, row) = self
            .lookup
            .get(initial)
            .ok_or_else(|| Error::Domain(format!("occupation {initial:?} outside the truncated space")))?;
        let s = &self.sectors[sid];
        let d = s.states.len();
        let coeff: Vec<Complex64> = (0..d).map(|n| Complex64::from_polar(s.vectors[(row, n)], -s.energies[n] * t)).collect();
        let psi = (0..d).map(|r| (0..d).map(|n| coeff[n] * s.vectors[(r, n)]).sum()).collect();
        Ok((sid, psi))
    }

    /// Excited-state probability after time `t` from `|ḡ⟩ ⊗ |occupations⟩`.
    pub fn excitation_from(&self, initial: &[usize], t: f64) -> Result<f64> {
        let (sid, psi) = self.evolve(initial, t)?;
        Ok(self.sectors[sid].states.iter().zip(&psi).filter(|(s, _)| s.0).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// Norm of the evolved state (1 up to rounding).
    pub fn norm_after(&self, initial: &[usize], t: f64) -> Result<f64> {
        Ok(self.evolve(initial, t)?.1.iter().map(|a| a.norm_sqr()).sum())
    }

    /// Per-mode thermal distribution over `0..=truncation` quanta.
    pub fn mode_distribution(&self, mode: usize, beta: f64) -> Result<Vec<f64>> {
        let w = self.mode_frequencies[mode];
        match self.statistics {
            Statistics::Fermionic => {
                let n = thermal_occupation(w, beta, Statistics::Fermionic)?;
                Ok(vec![1.0 - n, n])
            }
            Statistics::Bosonic => {
                if !(w > 0.0) {
                    return domain("bosonic modes need positive frequency");
                }
                let raw: Vec<f64> = (0..=self.truncation).map(|q| (-beta * w * q as f64).exp()).collect();
                let z: f64 = raw.iter().sum();
                Ok(raw.into_iter().map(|p| p / z).collect())
            }
        }
    }

    /// Mean quanta of one mode in the (truncated) thermal state.
    pub fn thermal_mode_number(&self, mode: usize, beta: f64) -> Result<f64> {
        Ok(self.mode_distribution(mode, beta)?.iter().enumerate().map(|(q, p)| q as f64 * p).sum())
    }

    /// Exact `Γ(t)` for each time, from `|ḡ⟩⟨ḡ| ⊗ ρ_β` with a product thermal state of the modes.
    pub fn transition_probabilities(&self, beta: f64, times: &[f64]) -> Result<Vec<f64>> {
        let m = self.mode_frequencies.len();
        let dists: Vec<Vec<f64>> = (0..m).map(|i| self.mode_distribution(i, beta)).collect::<Result<_>>()?;
        let mut out = vec![0.0; times.len()];
        for occ in occupations(m, self.truncation) {
            let p: f64 = occ.iter().enumerate().map(|(i, &q)| dists[i][q]).product();
            if p < 1e-300 {
                continue;
            }
            for (o, &t) in out.iter_mut().zip(times) {
                *o += p * self.excitation_from(&occ, t)?;
            }
        }
        Ok(out)
    }

    pub fn exact_transition_probability(&self, beta: f64, t: f64) -> Result<f64> {
        Ok(self.transition_probabilities(beta, &[t])?[0])
    }

    /// Second-order prediction `g² t² Σ A² n sinc²((ν-ω)t/2)` for the same system.
    pub fn golden_rule(&self, beta: f64, t: f64) -> Result<f64> {
        let mut sum = 0.0;
        for i in 0..self.mode_frequencies.len() {
            let n = self.thermal_mode_number(i, beta)?;
            let x = (self.level_gap - self.mode_frequencies[i]) * t / 2.0;
            sum += self.mode_couplings[i].powi(2) * n * crate::rates::sinc(x).powi(2);
        }
        Ok(self.coupling * self.coupling * t * t * sum)
    }
}
