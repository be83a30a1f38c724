use std::f64::consts::PI;

use super::{orbit_degeneracy, thermal_occupation, LatticeModel, ModeData, Statistics};
use crate::error::{domain, Result};
use crate::grid::BrillouinGrid;

/// Kitaev ring with power-law hopping `J_r = J |π/(N sin(πr/N))|^α`.
///
/// `range_exponent = ∞` is the nearest-neighbour limit with `J_1 = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct KitaevModel {
    hopping_strength: f64,
    pairing: f64,
    range_exponent: f64,
    grid: BrillouinGrid,
    hoppings: Vec<f64>,
}

impl KitaevModel {
    /// Ring of odd length `sites`.
    pub fn new(hopping_strength: f64, pairing: f64, range_exponent: f64, sites: usize) -> Result<Self> {
        if sites.is_multiple_of(2) {
            return domain(format!("ring length must be odd, got {sites}"));
        }
        Self::with_any_length(hopping_strength, pairing, range_exponent, sites)
    }

    /// Like [`KitaevModel::new`] but also accepts even rings (used for cross-checks).
    pub fn with_any_length(hopping_strength: f64, pairing: f64, range_exponent: f64, sites: usize) -> Result<Self> {
        if sites < 3 {
            return domain(format!("ring needs at least 3 sites, got {sites}"));
        }
        if !hopping_strength.is_finite() {
            return domain("hopping strength must be finite");
        }
        if !(pairing >= 0.0 && pairing.is_finite()) {
            return domain(format!("pairing must be non-negative, got {pairing}"));
        }
        if range_exponent.is_nan() || range_exponent < 0.0 {
            return domain(format!("range exponent must be non-negative, got {range_exponent}"));
        }
        let grid = BrillouinGrid::new(1, sites, 1.0)?;
        let mut model = Self { hopping_strength, pairing, range_exponent, grid, hoppings: Vec::new() };
        model.hoppings = (1..sites).map(|r| model.hopping_unchecked(r)).collect();
        Ok(model)
    }

    pub fn hopping_strength(&self) -> f64 {
        self.hopping_strength
    }

    pub fn pairing(&self) -> f64 {
        self.pairing
    }

    pub fn range_exponent(&self) -> f64 {
        self.range_exponent
    }

    pub fn sites(&self) -> usize {
        self.grid.sites_per_axis()
    }

    fn hopping_unchecked(&self, r: usize) -> f64 {
        let n = self.sites();
        if self.range_exponent.is_infinite() {
            return if r == 1 || r == n - 1 { self.hopping_strength } else { 0.0 };
        }
        let base = (PI / (n as f64 * (PI * r as f64 / n as f64).sin())).abs();
        self.hopping_strength * base.powf(self.range_exponent)
    }

    /// Hopping amplitude at separation `r ∈ [1, N-1]`.
    pub fn hopping(&self, r: usize) -> Result<f64> {
        if r == 0 || r >= self.sites() {
            return domain(format!("separation must be in [1, {}], got {r}", self.sites() - 1));
        }
        Ok(self.hoppings[r - 1])
    }

    /// Real-space hopping matrix `J_{lj} = J_{|l-j| mod N}`, zero diagonal.
    pub fn hopping_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.sites();
        (0..n).map(|l| (0..n).map(|j| if l == j { 0.0 } else { self.hoppings[(j + n - l) % n - 1] }).collect()).collect()
    }

    /// Single-particle energy `Σ_{r=1}^{N-1} J_r cos(kr)`.
    pub fn band_energy(&self, k: f64) -> f64 {
        self.hoppings.iter().enumerate().map(|(i, jr)| jr * (k * (i + 1) as f64).cos()).sum()
    }

    pub fn pairing_gap(&self, k: f64) -> f64 {
        // + 0.0 turns -0.0 into +0.0 so the angle stays in {0, π} without pairing
        2.0 * self.pairing * k.sin() + 0.0
    }
}

impl LatticeModel for KitaevModel {
    fn grid(&self) -> &BrillouinGrid {
        &self.grid
    }

    fn statistics(&self) -> Statistics {
        Statistics::Fermionic
    }

    fn frequency(&self, k: [f64; 2]) -> f64 {
        self.band_energy(k[0]).hypot(self.pairing_gap(k[0]))
    }

    fn modes(&self, beta: f64) -> Result<Vec<ModeData>> {
        let degeneracy = orbit_degeneracy(&self.grid);
        self.grid
            .points()
            .into_iter()
            .map(|point| {
                let k = point.k[0];
                let eps = self.band_energy(k);
                let gap = self.pairing_gap(k);
                let omega = eps.hypot(gap);
                let gapless = omega == 0.0;
                let angle = if gapless { 0.0 } else { gap.atan2(eps) };
                Ok(ModeData {
                    point,
                    frequency: omega,
                    coupling_factor: (angle / 2.0).cos(),
                    angle,
                    degeneracy: degeneracy(&point),
                    statistics: Statistics::Fermionic,
                    occupation: thermal_occupation(omega, beta, Statistics::Fermionic)?,
                    gapless,
                })
            })
            .collect()
    }

    fn id(&self) -> String {
        format!("kitaev(J={}, delta={}, alpha={}, N={})", self.hopping_strength, self.pairing, self.range_exponent, self.sites())
    }
}
