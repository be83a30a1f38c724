use super::{ModeData, Statistics};
use crate::grid::GridPoint;

/// Hand-specified modes `(frequency, amplitude, occupation)` for tests and calibration runs.
pub fn synthetic_modes(spec: &[(f64, f64, f64)], statistics: Statistics) -> Vec<ModeData> {
    spec.iter()
        .enumerate()
        .map(|(i, &(frequency, amplitude, occupation))| ModeData {
            point: GridPoint { index: [i as i64, 0], k: [0.0, 0.0] },
            frequency,
            coupling_factor: amplitude,
            angle: 0.0,
            degeneracy: 1,
            statistics,
            occupation,
            gapless: frequency == 0.0,
        })
        .collect()
}
