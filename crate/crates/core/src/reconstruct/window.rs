use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::models::{group_velocity, LatticeModel};

/// Reciprocal length that multiplies the group velocity in the lower time bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowConvention {
    /// Grid spacing `2π/(N a)`: a wave packet must cross one momentum cell.
    #[default]
    GridSpacing,
    /// `1/(N a)`, giving `4π N a / c_s` for a linear band.
    SystemLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementWindow {
    pub t_min: f64,
    pub t_max: f64,
    pub convention: WindowConvention,
}

impl MeasurementWindow {
    pub fn is_empty(&self) -> bool {
        !(self.t_min < self.t_max)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_min && t <= self.t_max
    }
}

/// `t_min = max_k 4π/(|v_k| V_R)` over non-stationary grid modes, `t_max = 1/g`.
pub fn measurement_window(model: &dyn LatticeModel, coupling: f64, convention: WindowConvention) -> Result<MeasurementWindow> {
    if !(coupling > 0.0) {
        return domain(format!("coupling must be positive, got {coupling}"));
    }
    let grid = model.grid();
    let reciprocal = match convention {
        WindowConvention::GridSpacing => grid.spacing(),
        WindowConvention::SystemLength => 1.0 / (grid.sites_per_axis() as f64 * grid.lattice_constant()),
    };
    let speeds: Vec<f64> = grid
        .points()
        .iter()
        .map(|p| {
            let v = group_velocity(model, p.k);
            v[0].hypot(v[1])
        })
        .collect();
    let fastest = speeds.iter().copied().fold(0.0, f64::max);
    if !(fastest > 0.0) {
        return domain("dispersion is flat: no group velocity to bound the measurement time");
    }
    let slowest = speeds.iter().copied().filter(|&v| v > 1e-12 * fastest).fold(f64::INFINITY, f64::min);
    Ok(MeasurementWindow { t_min: 4.0 * PI / (slowest * reciprocal), t_max: 1.0 / coupling, convention })
}
