use serde::{Deserialize, Serialize};

use super::{orbit_degeneracy, thermal_occupation, LatticeModel, ModeData, Statistics};
use crate::error::{domain, Error, Result};
use crate::grid::{BrillouinGrid, GridPoint};

/// Above this `U/J` the Bogoliubov description of the superfluid is questionable.
const SUPERFLUID_RATIO_LIMIT: f64 = 0.5;

/// Square-lattice Bose–Hubbard superfluid at the Bogoliubov level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BHModel {
    hopping: f64,
    interaction: f64,
    condensate_filling: f64,
    grid: BrillouinGrid,
}

impl BHModel {
    pub fn new(hopping: f64, interaction: f64, condensate_filling: f64, sites_per_axis: usize) -> Result<Self> {
        if !(hopping > 0.0 && hopping.is_finite()) {
            return domain(format!("hopping must be positive, got {hopping}"));
        }
        if !(interaction >= 0.0 && interaction.is_finite()) {
            return domain(format!("interaction must be non-negative, got {interaction}"));
        }
        if !(condensate_filling > 0.0 && condensate_filling.is_finite()) {
            return domain(format!("condensate filling must be positive, got {condensate_filling}"));
        }
        let grid = BrillouinGrid::new(2, sites_per_axis, 1.0)?;
        Ok(Self { hopping, interaction, condensate_filling, grid })
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn interaction(&self) -> f64 {
        self.interaction
    }

    pub fn condensate_filling(&self) -> f64 {
        self.condensate_filling
    }

    /// Warning text when `U/J` leaves the weakly interacting regime.
    pub fn regime_warning(&self) -> Option<String> {
        let ratio = self.interaction / self.hopping;
        (ratio > SUPERFLUID_RATIO_LIMIT)
            .then(|| format!("U/J = {ratio} exceeds {SUPERFLUID_RATIO_LIMIT}; Bogoliubov superfluid assumption is weak"))
    }

    /// Free-lattice energy `4J[sin²(kx a/2) + sin²(ky a/2)]`.
    pub fn free_energy(&self, k: [f64; 2]) -> f64 {
        let a = self.grid.lattice_constant();
        4.0 * self.hopping * ((k[0] * a / 2.0).sin().powi(2) + (k[1] * a / 2.0).sin().powi(2))
    }

    /// Phonon velocity `a sqrt(2 U n0 J)`.
    pub fn sound_speed(&self) -> f64 {
        self.grid.lattice_constant() * (2.0 * self.interaction * self.condensate_filling * self.hopping).sqrt()
    }

    /// Mode at a grid point; the condensate (k = 0) is excluded.
    pub fn mode_at(&self, point: GridPoint, beta: f64) -> Result<ModeData> {
        if point.is_origin() {
            return Err(Error::ExcludedMode("k = 0 is the condensate".into()));
        }
        let eps = self.free_energy(point.k);
        let omega = self.frequency(point.k);
        Ok(ModeData {
            point,
            frequency: omega,
            coupling_factor: (eps / omega).sqrt(),
            angle: 0.0,
            degeneracy: self.grid.orbit_sizes()[&point.orbit_key()],
            statistics: Statistics::Bosonic,
            occupation: thermal_occupation(omega, beta, Statistics::Bosonic)?,
            gapless: false,
        })
    }
}

impl LatticeModel for BHModel {
    fn grid(&self) -> &BrillouinGrid {
        &self.grid
    }

    fn statistics(&self) -> Statistics {
        Statistics::Bosonic
    }

    fn frequency(&self, k: [f64; 2]) -> f64 {
        let eps = self.free_energy(k);
        (eps * (eps + 2.0 * self.interaction * self.condensate_filling)).sqrt()
    }

    fn modes(&self, beta: f64) -> Result<Vec<ModeData>> {
        if !(beta > 0.0) {
            return domain(format!("inverse temperature must be positive, got {beta}"));
        }
        let degeneracy = orbit_degeneracy(&self.grid);
        self.grid
            .points()
            .into_iter()
            .filter(|p| !p.is_origin())
            .map(|point| {
                let eps = self.free_energy(point.k);
                let omega = self.frequency(point.k);
                Ok(ModeData {
                    point,
                    frequency: omega,
                    coupling_factor: (eps / omega).sqrt(),
                    angle: 0.0,
                    degeneracy: degeneracy(&point),
                    statistics: Statistics::Bosonic,
                    occupation: thermal_occupation(omega, beta, Statistics::Bosonic)?,
                    gapless: false,
                })
            })
            .collect()
    }

    fn id(&self) -> String {
        format!(
            "bose_hubbard(J={}, U={}, n0={}, N={}x{})",
            self.hopping,
            self.interaction,
            self.condensate_filling,
            self.grid.sites_per_axis(),
            self.grid.sites_per_axis()
        )
    }
}
