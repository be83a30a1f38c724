//! Ready-made spectroscopy runs on the pairing ring and the 2D superfluid, plus scoring.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::models::{orbit_modes, BHModel, KitaevModel, LatticeModel, ModeData};
use crate::probe::{AmplitudeRule, OverlapSet, ProbeSetup};
use crate::rates::{
    absorption_lines, orbit_lines, resolving_step, sweep, BhSpectrum, CurveMetadata, Line, NuGrid, TransitionCurve,
};
use crate::reconstruct::{
    measurement_window, merge_radius, DetectOptions, GeometryForm, MeasurementWindow, ReconstructOptions,
    ReconstructedDispersion, WindowConvention,
};

/// Sweep range padding on either side of the band, in merge radii.
const PADDING: f64 = 20.0;

fn band_grid(lines: &[Line], t: f64, floor: Option<f64>) -> Result<NuGrid> {
    let lo = lines.iter().map(|l| l.frequency).fold(f64::INFINITY, f64::min);
    let hi = lines.iter().map(|l| l.frequency).fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) {
        return domain("no lines to sweep");
    }
    let pad = PADDING * merge_radius(t);
    let start = floor.map_or(lo - pad, |f| (lo - pad).max(f));
    NuGrid::uniform(start, hi + pad, resolving_step(t))
}

fn metadata(model: &dyn LatticeModel, beta: f64, coupling: f64, window: &MeasurementWindow, t: f64) -> CurveMetadata {
    let mut warnings = Vec::new();
    if !window.contains(t) {
        warnings.push(format!("measurement time {t} outside the window [{}, {}]", window.t_min, window.t_max));
    }
    CurveMetadata { coupling, beta, model_id: model.id(), seed: None, warnings }
}

/// Pairing ring probed on-site and at the bond centre with the cosine coupling.
#[derive(Debug, Clone)]
pub struct ChainScenario {
    pub model: KitaevModel,
    pub beta: f64,
    pub coupling: f64,
    /// True `|J_1/J_0|²`.
    pub ratio: f64,
    pub window: MeasurementWindow,
    pub time: f64,
    pub detect_threshold: f64,
}

impl ChainScenario {
    /// `N = 51`, `α = 0.3`, `J/Δ = 5`, `βΔ = 0.02`, `g = 10⁻⁶`, `t = 1.25 t_min`.
    pub fn reference() -> Result<Self> {
        Self::new(KitaevModel::new(5.0, 1.0, 0.3, 51)?, 0.02, 1e-6, 1.0, 1.25, 1e-5)
    }

    /// Measurement time `time_factor · t_min`.
    pub fn new(
        model: KitaevModel,
        beta: f64,
        coupling: f64,
        ratio: f64,
        time_factor: f64,
        detect_threshold: f64,
    ) -> Result<Self> {
        let window = measurement_window(&model, coupling, WindowConvention::GridSpacing)?;
        let time = time_factor * window.t_min;
        Ok(Self { model, beta, coupling, ratio, window, time, detect_threshold })
    }

    pub fn setup(&self) -> Result<ProbeSetup> {
        ProbeSetup::new(OverlapSet::from_ratios(&[self.ratio])?, AmplitudeRule::KitaevCosine, 1)
    }

    pub fn modes(&self) -> Result<Vec<ModeData>> {
        self.model.modes(self.beta)
    }

    pub fn curves(&self) -> Result<Vec<TransitionCurve>> {
        self.curves_on(None)
    }

    /// Sweeps on `grid`, or on the band padded by 20 merge radii at step `2π/(5t)`.
    pub fn curves_on(&self, grid: Option<NuGrid>) -> Result<Vec<TransitionCurve>> {
        let setup = self.setup()?;
        let modes = self.modes()?;
        let per_position: Vec<Vec<Line>> = setup
            .positions()
            .iter()
            .map(|&p| Ok(orbit_lines(&modes, &absorption_lines(&modes, &setup, p)?)))
            .collect::<Result<_>>()?;
        let grid = match grid {
            Some(g) => g,
            None => band_grid(&per_position[0], self.time, None)?,
        };
        let meta = metadata(&self.model, self.beta, self.coupling, &self.window, self.time);
        setup
            .positions()
            .into_iter()
            .zip(per_position)
            .map(|(p, lines)| sweep(&lines, grid.clone(), self.time, p, meta.clone()))
            .collect()
    }

    pub fn options(&self) -> ReconstructOptions {
        let mut o = ReconstructOptions::chain(self.model.grid().clone(), GeometryForm::ChainCos4);
        o.detect = DetectOptions { relative_threshold: self.detect_threshold, ..DetectOptions::default() };
        o
    }
}

/// Superfluid square lattice probed on-site, at the bond centre and at the plaquette centre.
#[derive(Debug, Clone)]
pub struct SquareScenario {
    pub model: BHModel,
    pub beta: f64,
    pub coupling: f64,
    /// True `|J_1/J_0|²` and `|J_2/J_0|²`.
    pub ratios: [f64; 2],
    pub elastic_overlap: f64,
    pub window: MeasurementWindow,
    pub time: f64,
    pub detect_threshold: f64,
}

impl SquareScenario {
    /// `31 × 31`, `U = 0.1 J`, `n₀ = 1`, `βJ = 1`, `g = 10⁻⁶`, `t = 5·10⁴`, positive-frequency sweep.
    pub fn reference() -> Result<Self> {
        Self::new(BHModel::new(1.0, 0.1, 1.0, 31)?, 1.0, 1e-6, [0.6, 0.35], 5e4, 1e-6)
    }

    pub fn new(model: BHModel, beta: f64, coupling: f64, ratios: [f64; 2], time: f64, detect_threshold: f64) -> Result<Self> {
        let window = measurement_window(&model, coupling, WindowConvention::GridSpacing)?;
        Ok(Self { model, beta, coupling, ratios, elastic_overlap: 0.0, window, time, detect_threshold })
    }

    pub fn setup(&self) -> Result<ProbeSetup> {
        ProbeSetup::new(OverlapSet::from_ratios(&self.ratios)?, AmplitudeRule::PhaseSum, 2)
    }

    pub fn modes(&self) -> Result<Vec<ModeData>> {
        self.model.modes(self.beta)
    }

    pub fn curves(&self) -> Result<Vec<TransitionCurve>> {
        self.curves_on(None)
    }

    /// Sweeps on `grid`, or on the absorption band from one grid step above zero.
    pub fn curves_on(&self, grid: Option<NuGrid>) -> Result<Vec<TransitionCurve>> {
        let setup = self.setup()?;
        let modes = self.modes()?;
        let per_position: Vec<Vec<Line>> = setup
            .positions()
            .iter()
            .map(|&p| Ok(BhSpectrum::new(&self.model, &modes, &setup, p, self.elastic_overlap)?.lines(&modes)))
            .collect::<Result<_>>()?;
        let grid = match grid {
            Some(g) => g,
            None => {
                let absorbing: Vec<Line> = per_position[0].iter().copied().filter(|l| l.frequency > 0.0).collect();
                band_grid(&absorbing, self.time, Some(resolving_step(self.time)))?
            }
        };
        let meta = metadata(&self.model, self.beta, self.coupling, &self.window, self.time);
        setup
            .positions()
            .into_iter()
            .zip(per_position)
            .map(|(p, lines)| sweep(&lines, grid.clone(), self.time, p, meta.clone()))
            .collect()
    }

    pub fn options(&self) -> ReconstructOptions {
        let mut o = ReconstructOptions::square(self.model.grid().clone());
        o.detect = DetectOptions { relative_threshold: self.detect_threshold, ..DetectOptions::default() };
        o
    }
}

/// How many point-group orbits of the true spectrum were recovered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssignmentScore {
    /// Orbits with distinct frequencies.
    pub distinct: usize,
    /// Orbits found at the right frequency and snapped to the right momentum.
    pub correct: usize,
    /// Orbits found at the right frequency but assigned elsewhere.
    pub misassigned: usize,
    pub missing: usize,
}

impl AssignmentScore {
    pub fn fraction(&self) -> f64 {
        if self.distinct == 0 {
            0.0
        } else {
            self.correct as f64 / self.distinct as f64
        }
    }
}

fn orbit_momentum(m: &ModeData, dimension: usize) -> [f64; 2] {
    let a = m.point.k[0].abs();
    let b = m.point.k[1].abs();
    match dimension {
        1 => [a, 0.0],
        _ => [a.min(b), a.max(b)],
    }
}

/// Compare a reconstruction with the model's orbits. Orbits closer in frequency than
/// `merge_radius` to another orbit are not distinct and are skipped.
pub fn score_assignment(result: &ReconstructedDispersion, modes: &[ModeData], tolerance: f64) -> AssignmentScore {
    let dim = result.dimension;
    let orbits = orbit_modes(modes, dim);
    let radius = merge_radius(result.time);
    let mut score = AssignmentScore { distinct: 0, correct: 0, misassigned: 0, missing: 0 };
    for (i, m) in orbits.iter().enumerate() {
        let crowded = orbits.iter().enumerate().any(|(j, o)| j != i && (o.frequency - m.frequency).abs() < radius);
        if crowded {
            continue;
        }
        score.distinct += 1;
        let truth = orbit_momentum(m, dim);
        let hit = result.points.iter().find(|p| (p.frequency - m.frequency).abs() <= tolerance);
        match hit {
            Some(p) if (p.momentum[0] - truth[0]).abs() < 1e-9 && (p.momentum[1] - truth[1]).abs() < 1e-9 => score.correct += 1,
            Some(_) => score.misassigned += 1,
            None => score.missing += 1,
        }
    }
    score
}

/// Largest `|ω̂ - ω(k̂)|` over assigned points.
pub fn surface_deviation(result: &ReconstructedDispersion, model: &dyn LatticeModel) -> f64 {
    result.points.iter().map(|p| (p.frequency - model.frequency(p.momentum)).abs()).fold(0.0, f64::max)
}
