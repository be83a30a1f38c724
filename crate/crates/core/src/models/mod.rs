//! Solvable lattice models: dispersion, coupling factors, degeneracy, occupations.

mod bose_hubbard;
mod kitaev;
mod synthetic;

pub use bose_hubbard::BHModel;
pub use kitaev::KitaevModel;
pub use synthetic::synthetic_modes;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::grid::{BrillouinGrid, GridPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Fermionic,
    Bosonic,
}

impl Statistics {
    /// `+1` for bosons, `-1` for fermions.
    pub fn sign(self) -> f64 {
        match self {
            Statistics::Bosonic => 1.0,
            Statistics::Fermionic => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeData {
    pub point: GridPoint,
    pub frequency: f64,
    /// Real amplitude of the quasiparticle in the probe coupling.
    pub coupling_factor: f64,
    /// Bogoliubov angle θ (0 where the model has none).
    pub angle: f64,
    pub degeneracy: usize,
    pub statistics: Statistics,
    pub occupation: f64,
    /// Set when ω = 0 and the angle was fixed by convention.
    pub gapless: bool,
}

impl ModeData {
    pub fn momentum(&self) -> [f64; 2] {
        self.point.k
    }
}

pub trait LatticeModel: Send + Sync {
    fn grid(&self) -> &BrillouinGrid;
    fn statistics(&self) -> Statistics;
    /// Dispersion evaluated at an arbitrary momentum.
    fn frequency(&self, k: [f64; 2]) -> f64;
    /// All modes on the grid at inverse temperature `beta` (`f64::INFINITY` for T = 0).
    fn modes(&self, beta: f64) -> Result<Vec<ModeData>>;
    fn id(&self) -> String;
}

/// Bose–Einstein or Fermi–Dirac occupation. `beta = ∞` is the zero-temperature limit.
pub fn thermal_occupation(frequency: f64, beta: f64, statistics: Statistics) -> Result<f64> {
    if beta.is_nan() || beta < 0.0 {
        return domain(format!("inverse temperature must be non-negative, got {beta}"));
    }
    if frequency.is_nan() {
        return domain("frequency is NaN");
    }
    match statistics {
        Statistics::Bosonic => {
            if frequency <= 0.0 {
                return domain(format!("bosonic occupation needs ω > 0, got {frequency}"));
            }
            if beta == 0.0 {
                return domain("bosonic occupation diverges at β = 0");
            }
            let x = beta * frequency;
            Ok(if x.is_infinite() { 0.0 } else { 1.0 / x.exp_m1() })
        }
        Statistics::Fermionic => {
            let x = beta * frequency;
            if x.is_nan() {
                // β = ∞ and ω = 0
                return Ok(0.5);
            }
            if x > 0.0 {
                let e = (-x).exp();
                Ok(e / (1.0 + e))
            } else {
                Ok(1.0 / (1.0 + x.exp()))
            }
        }
    }
}

/// Central finite difference of the dispersion with the grid spacing as step.
pub fn group_velocity(model: &dyn LatticeModel, k: [f64; 2]) -> [f64; 2] {
    let grid = model.grid();
    let h = grid.spacing();
    let mut v = [0.0; 2];
    for (axis, va) in v.iter_mut().enumerate().take(grid.dimension()) {
        let mut kp = k;
        let mut km = k;
        kp[axis] += h;
        km[axis] -= h;
        *va = (model.frequency(kp) - model.frequency(km)) / (2.0 * h);
    }
    v
}

pub(crate) fn orbit_degeneracy(grid: &BrillouinGrid) -> impl Fn(&GridPoint) -> usize {
    let sizes = grid.orbit_sizes();
    move |p: &GridPoint| sizes[&p.orbit_key()]
}

/// One mode per point-group orbit: the member with non-negative, ascending index.
pub fn orbit_modes(modes: &[ModeData], dimension: usize) -> Vec<ModeData> {
    modes
        .iter()
        .filter(|m| {
            let (a, b) = m.point.orbit_key();
            match dimension {
                1 => m.point.index == [b, 0],
                _ => m.point.index == [a, b],
            }
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_temperature_boson_is_empty() {
        assert_eq!(thermal_occupation(1.0, f64::INFINITY, Statistics::Bosonic).unwrap(), 0.0);
    }

    #[test]
    fn ln2_values() {
        let b = 2f64.ln();
        assert!((thermal_occupation(1.0, b, Statistics::Fermionic).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((thermal_occupation(1.0, b, Statistics::Bosonic).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn boson_needs_positive_frequency() {
        assert!(thermal_occupation(0.0, 1.0, Statistics::Bosonic).is_err());
        assert!(thermal_occupation(-1.0, 1.0, Statistics::Bosonic).is_err());
    }

    #[test]
    fn fermion_infinite_temperature_is_half() {
        assert_eq!(thermal_occupation(3.0, 0.0, Statistics::Fermionic).unwrap(), 0.5);
    }
}
