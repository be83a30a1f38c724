use serde::{Deserialize, Serialize};

use super::calibrate::{calibrate_ratio, Calibration, CalibrationMode};
use super::invert::{invert_1d_clipped, invert_2d_clipped, snap_1d, snap_2d, GeometryForm, RANGE_TOLERANCE};
use super::noise::inject_noise;
use super::peaks::{detect_peaks, measure_at, DetectOptions, PeakSet};
use crate::error::{Error, Result};
use crate::grid::BrillouinGrid;
use crate::probe::Position;
use crate::rates::TransitionCurve;

/// Inversions clipped by less than this are round-off and not reported.
const ROUNDOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub relative_error: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    /// Momentum grid the assignments are snapped to.
    pub grid: BrillouinGrid,
    /// Ratio form of each displaced position, in position order (II, then III).
    pub forms: Vec<GeometryForm>,
    pub calibration: CalibrationMode,
    pub detect: DetectOptions,
    pub noise: Option<NoiseSpec>,
}

impl ReconstructOptions {
    /// Chain with the given ratio form, orbit-mean calibration.
    pub fn chain(grid: BrillouinGrid, form: GeometryForm) -> Self {
        Self {
            calibration: CalibrationMode::OrbitMean { grid: grid.clone(), exclude_origin: false },
            grid,
            forms: vec![form],
            detect: DetectOptions::default(),
            noise: None,
        }
    }

    /// Square lattice with bond and plaquette positions; the condensate orbit is left out of the calibration mean.
    pub fn square(grid: BrillouinGrid) -> Self {
        Self {
            calibration: CalibrationMode::OrbitMean { grid: grid.clone(), exclude_origin: true },
            grid,
            forms: vec![GeometryForm::SquareBond, GeometryForm::SquarePlaquette],
            detect: DetectOptions::default(),
            noise: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint {
    /// Snapped momentum: `[|k|, 0]` on the chain, ascending `{|kx|, |ky|}` on the square lattice.
    pub momentum: [f64; 2],
    /// Momentum straight from the inversion, before snapping.
    pub raw_momentum: [f64; 2],
    pub frequency: f64,
    /// Amplitude ratios to the on-site peak, one per displaced position.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnassignedPeak {
    pub frequency: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructedDispersion {
    pub dimension: usize,
    /// Sorted by frequency.
    pub points: Vec<DispersionPoint>,
    pub unassigned: Vec<UnassignedPeak>,
    /// One per displaced position.
    pub calibrations: Vec<Calibration>,
    pub time: f64,
    pub warnings: Vec<String>,
}

impl ReconstructedDispersion {
    pub fn peak_count(&self) -> usize {
        self.points.len() + self.unassigned.len()
    }
}

fn required_positions(dimension: usize) -> &'static [Position] {
    if dimension == 1 {
        &[Position::I, Position::II]
    } else {
        &[Position::I, Position::II, Position::III]
    }
}

fn check_options(options: &ReconstructOptions) -> Result<usize> {
    let dim = options.grid.dimension();
    if options.forms.len() != dim || options.forms.iter().any(|f| f.dimension() != dim) {
        return Err(Error::Pipeline(format!("{dim}D reconstruction needs {dim} ratio forms of matching dimension")));
    }
    if matches!(options.calibration, CalibrationMode::Exact { .. }) {
        return Err(Error::Pipeline("exact calibration needs known momenta; call calibrate_ratio directly".into()));
    }
    Ok(dim)
}

/// Detect on the on-site curve and measure every displaced curve at the same frequencies.
pub fn collect_peaks(curves: &[TransitionCurve], options: &ReconstructOptions) -> Result<(PeakSet, Vec<PeakSet>)> {
    let dim = check_options(options)?;
    let find = |p: Position| {
        curves
            .iter()
            .find(|c| c.position == p)
            .ok_or_else(|| Error::Pipeline(format!("missing curve for position {}", p.label())))
    };
    let positions = required_positions(dim);
    let base_curve = find(Position::I)?;
    for &p in &positions[1..] {
        let c = find(p)?;
        if c.nu_grid != base_curve.nu_grid || c.time != base_curve.time {
            return Err(Error::Pipeline(format!("curve {} uses a different frequency grid or time", p.label())));
        }
    }
    let base = detect_peaks(base_curve, &options.detect);
    let alts = positions[1..].iter().map(|&p| find(p).map(|c| measure_at(c, &base))).collect::<Result<_>>()?;
    Ok((base, alts))
}

/// Calibrate, invert and snap from already measured peak sets.
pub fn reconstruct_from_peaks(base: &PeakSet, alts: &[PeakSet], options: &ReconstructOptions) -> Result<ReconstructedDispersion> {
    let dim = check_options(options)?;
    if alts.len() != dim {
        return Err(Error::Pipeline(format!("{dim}D reconstruction needs {dim} displaced peak sets, got {}", alts.len())));
    }
    let noisy: Vec<PeakSet> = match options.noise {
        Some(spec) => alts
            .iter()
            .enumerate()
            .map(|(i, a)| inject_noise(a, spec.relative_error, spec.seed.wrapping_add(i as u64)))
            .collect::<Result<_>>()?,
        None => alts.to_vec(),
    };
    let calibrations: Vec<Calibration> = noisy
        .iter()
        .zip(&options.forms)
        .map(|(alt, &form)| calibrate_ratio(base, alt, form, &options.calibration))
        .collect::<Result<_>>()?;

    let a = options.grid.lattice_constant();
    let mut points = Vec::new();
    let mut unassigned = Vec::new();
    let (mut clipped, mut excess) = (0, 0.0f64);
    for (i, peak) in base.peaks.iter().enumerate() {
        let ratios: Vec<f64> = noisy
            .iter()
            .map(|alt| {
                // displaced sets are measured at the base frequencies, in the same order
                alt.peaks.get(i).map_or(f64::NAN, |p| p.amplitude.max(0.0) / peak.amplitude)
            })
            .collect();
        let raw = if dim == 1 {
            invert_1d_clipped(ratios[0], calibrations[0].estimate, options.forms[0]).map(|(k, c)| ([k, 0.0], c))
        } else {
            invert_2d_clipped(ratios[0], ratios[1], calibrations[0].estimate, calibrations[1].estimate)
        };
        match raw {
            Ok((ka, e)) => {
                if e > ROUNDOFF {
                    clipped += 1;
                    excess = excess.max(e);
                }
                let raw_momentum = [ka[0] / a, ka[1] / a];
                let momentum =
                    if dim == 1 { [snap_1d(raw_momentum[0], &options.grid), 0.0] } else { snap_2d(raw_momentum, &options.grid) };
                points.push(DispersionPoint { momentum, raw_momentum, frequency: peak.frequency, ratios });
            }
            Err(e) => unassigned.push(UnassignedPeak { frequency: peak.frequency, reason: e.to_string() }),
        }
    }
    points.sort_by(|x, y| x.frequency.total_cmp(&y.frequency));
    let mut warnings = base.metadata.warnings.clone();
    if clipped > 0 {
        warnings.push(format!(
            "{clipped} inversions clipped into range (largest excursion {excess:.2e}, tolerance {RANGE_TOLERANCE})"
        ));
    }
    Ok(ReconstructedDispersion { dimension: dim, points, unassigned, calibrations, time: base.time, warnings })
}

/// Detect, match, calibrate, invert and snap.
pub fn reconstruct_dispersion(curves: &[TransitionCurve], options: &ReconstructOptions) -> Result<ReconstructedDispersion> {
    let (base, alts) = collect_peaks(curves, options)?;
    let mut out = reconstruct_from_peaks(&base, &alts, options)?;
    for c in curves {
        for w in &c.metadata.warnings {
            if !out.warnings.contains(w) {
                out.warnings.push(w.clone());
            }
        }
    }
    Ok(out)
}
