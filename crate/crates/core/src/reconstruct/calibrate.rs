use serde::{Deserialize, Serialize};

use super::invert::GeometryForm;
use super::peaks::{merge_radius, PeakSet};
use crate::error::{Error, Result};
use crate::grid::BrillouinGrid;

/// What the summed peak ratios are divided by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CalibrationMode {
    /// `N_matched · ⟨G⟩` with the continuum zone average.
    AnalyticMean,
    /// `N_matched · ⟨G⟩` averaged over the grid's point-group orbits (one peak per orbit).
    OrbitMean { grid: BrillouinGrid, exclude_origin: bool },
    /// `Σ G(k)` at known momenta of the matched peaks, for diagnosing the pipeline.
    Exact { momenta: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Estimated `|J_i/J_0|²`.
    pub estimate: f64,
    pub matched: usize,
    /// Frequencies present in only one of the two peak sets.
    pub orphans: Vec<f64>,
}

pub const MIN_MATCHED: usize = 3;

/// One-to-one pairs `(base index, alt index)` by nearest frequency within `tolerance`.
pub fn match_peaks(base: &PeakSet, alt: &PeakSet, tolerance: f64) -> (Vec<(usize, usize)>, Vec<f64>) {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, b) in base.peaks.iter().enumerate() {
        for (j, a) in alt.peaks.iter().enumerate() {
            let d = (a.frequency - b.frequency).abs();
            if d <= tolerance {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut used_b = vec![false; base.len()];
    let mut used_a = vec![false; alt.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        if !used_b[i] && !used_a[j] {
            used_b[i] = true;
            used_a[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort_unstable();
    let mut orphans: Vec<f64> = base
        .peaks
        .iter()
        .zip(&used_b)
        .chain(alt.peaks.iter().zip(&used_a))
        .filter(|(_, u)| !**u)
        .map(|(p, _)| p.frequency)
        .collect();
    orphans.sort_by(f64::total_cmp);
    (pairs, orphans)
}

fn orbit_mean(form: GeometryForm, grid: &BrillouinGrid, exclude_origin: bool) -> Result<f64> {
    let reps: Vec<_> = grid.orbit_representatives().into_iter().filter(|p| !(exclude_origin && p.is_origin())).collect();
    if reps.is_empty() {
        return Err(Error::Calibration { message: "grid has no orbits".into(), orphans: Vec::new() });
    }
    let a = grid.lattice_constant();
    Ok(reps.iter().map(|p| form.value([p.k[0] * a, p.k[1] * a])).sum::<f64>() / reps.len() as f64)
}

/// `|J_i/J_0|²` from matched peak amplitudes, `Σ r / (denominator from the mode)`.
pub fn calibrate_ratio(base: &PeakSet, alt: &PeakSet, form: GeometryForm, mode: &CalibrationMode) -> Result<Calibration> {
    let (pairs, orphans) = match_peaks(base, alt, merge_radius(base.time));
    let usable: Vec<(usize, usize)> = pairs.into_iter().filter(|&(i, _)| base.peaks[i].amplitude > 0.0).collect();
    if usable.len() < MIN_MATCHED {
        return Err(Error::Calibration {
            message: format!("{} matched peaks, need at least {MIN_MATCHED}", usable.len()),
            orphans,
        });
    }
    let sum: f64 = usable.iter().map(|&(i, j)| alt.peaks[j].amplitude / base.peaks[i].amplitude).sum();
    let count = usable.len() as f64;
    let denominator = match mode {
        CalibrationMode::AnalyticMean => count * form.zone_mean(),
        CalibrationMode::OrbitMean { grid, exclude_origin } => count * orbit_mean(form, grid, *exclude_origin)?,
        CalibrationMode::Exact { momenta } => {
            if momenta.len() != base.len() {
                return Err(Error::Calibration { message: "need one momentum per base peak".into(), orphans });
            }
            usable.iter().map(|&(i, _)| form.value(momenta[i])).sum()
        }
    };
    if !(denominator > 0.0) {
        return Err(Error::Calibration { message: "vanishing geometry sum".into(), orphans });
    }
    Ok(Calibration { estimate: sum / denominator, matched: usable.len(), orphans })
}
