//! Single-probe transition rates: sinc² line sums, the double-time integral, sweeps.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::models::{BHModel, LatticeModel, ModeData};
use crate::probe::{interaction_amplitude, Position, ProbeSetup};

/// A resonance at `frequency` with time-rescaled strength `weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub frequency: f64,
    pub weight: f64,
}

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Squared amplitudes times occupation, one line per mode.
pub fn absorption_lines(modes: &[ModeData], setup: &ProbeSetup, position: Position) -> Result<Vec<Line>> {
    modes
        .iter()
        .map(|m| {
            let a = interaction_amplitude(m, setup, position)?;
            Ok(Line { frequency: m.frequency, weight: a * a * m.occupation })
        })
        .collect()
}

/// Merge lines of one point-group orbit (identical frequency) into a single line.
pub fn orbit_lines(modes: &[ModeData], lines: &[Line]) -> Vec<Line> {
    let mut grouped: BTreeMap<(i64, i64), Line> = BTreeMap::new();
    for (m, l) in modes.iter().zip(lines) {
        grouped.entry(m.point.orbit_key()).and_modify(|acc| acc.weight += l.weight).or_insert(*l);
    }
    let mut out: Vec<Line> = grouped.into_values().collect();
    out.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    out
}

/// `Σ_lines w · sinc²((ν-ω)t/2)`.
pub fn rate_lines(lines: &[Line], nu: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("measurement time must be positive, got {t}"));
    }
    Ok(lines.iter().map(|l| l.weight * sinc((nu - l.frequency) * t / 2.0).powi(2)).sum())
}

/// Time-rescaled rate `Γ/(g²t²)`, summing every mode explicitly.
pub fn rate_sinc(modes: &[ModeData], setup: &ProbeSetup, position: Position, nu: f64, t: f64) -> Result<f64> {
    rate_lines(&absorption_lines(modes, setup, position)?, nu, t)
}

/// `g² ∬₀ᵗ C(t1,t2) e^{-iν(t1-t2)} dt1 dt2` by tensor Gauss–Legendre quadrature.
pub fn rate_integral<F>(correlation: F, g: f64, nu: f64, t: f64, points: usize) -> Result<f64>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    if !(t > 0.0) {
        return domain(format!("measurement time must be positive, got {t}"));
    }
    let n = NonZeroUsize::new(points).ok_or_else(|| Error::Domain("need at least one quadrature point".into()))?;
    let rule = GaussLegendre::new(n);
    let nodes: Vec<(f64, f64)> = rule.as_node_weight_pairs().iter().map(|&(x, w)| (0.5 * t * (x + 1.0), 0.5 * t * w)).collect();

    let probes = [0.1, 0.37, 0.73, 0.95];
    for &a in &probes {
        for &b in &probes {
            let (t1, t2) = (a * t, b * t);
            let c12 = correlation(t1, t2);
            let c21 = correlation(t2, t1).conj();
            if (c12 - c21).norm() > 1e-9 * (c12.norm() + c21.norm()).max(1e-300) {
                return Err(Error::Contract(format!("correlation is not Hermitian at ({t1}, {t2})")));
            }
        }
    }

    let (sum, scale) = nodes
        .par_iter()
        .map(|&(t1, w1)| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut mag = 0.0;
            for &(t2, w2) in &nodes {
                let v = correlation(t1, t2) * Complex64::from_polar(w1 * w2, -nu * (t1 - t2));
                mag += v.norm();
                acc += v;
            }
            (acc, mag)
        })
        .reduce(|| (Complex64::new(0.0, 0.0), 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let tol = 1e-9 * scale.max(1e-300);
    if sum.im.abs() > tol.max(1e-9 * sum.norm()) {
        return Err(Error::Contract(format!("integral has imaginary part {} (scale {scale})", sum.im)));
    }
    let re = if sum.re < 0.0 && sum.re.abs() <= tol { 0.0 } else { sum.re };
    Ok(g * g * re)
}

/// Elastic, emission and absorption parts of the time-rescaled superfluid rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BhComponents {
    pub elastic: f64,
    pub emission: f64,
    pub absorption: f64,
}

impl BhComponents {
    pub fn total(&self) -> f64 {
        self.elastic + self.emission + self.absorption
    }
}

/// Superfluid line lists with the condensate factor `Φ₀² = n₀` folded in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BhSpectrum {
    pub elastic: Line,
    pub emission: Vec<Line>,
    pub absorption: Vec<Line>,
}

impl BhSpectrum {
    pub fn new(
        model: &BHModel,
        modes: &[ModeData],
        setup: &ProbeSetup,
        position: Position,
        elastic_overlap: f64,
    ) -> Result<Self> {
        let n0 = model.condensate_filling();
        let mut emission = Vec::with_capacity(modes.len());
        let mut absorption = Vec::with_capacity(modes.len());
        for m in modes {
            let a2 = interaction_amplitude(m, setup, position)?.powi(2) * n0;
            emission.push(Line { frequency: -m.frequency, weight: a2 * (1.0 + m.occupation) });
            absorption.push(Line { frequency: m.frequency, weight: a2 * m.occupation });
        }
        let elastic = Line { frequency: 0.0, weight: elastic_overlap.powi(2) * n0 * n0 };
        Ok(Self { elastic, emission, absorption })
    }

    pub fn components(&self, nu: f64, t: f64) -> Result<BhComponents> {
        Ok(BhComponents {
            elastic: rate_lines(std::slice::from_ref(&self.elastic), nu, t)?,
            emission: rate_lines(&self.emission, nu, t)?,
            absorption: rate_lines(&self.absorption, nu, t)?,
        })
    }

    /// All lines, orbit-merged, for sweeping.
    pub fn lines(&self, modes: &[ModeData]) -> Vec<Line> {
        let mut out = orbit_lines(modes, &self.emission);
        out.extend(orbit_lines(modes, &self.absorption));
        if self.elastic.weight > 0.0 {
            out.push(self.elastic);
        }
        out.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        out
    }
}

/// Convenience wrapper computing the three parts straight from the model.
pub fn bh_rate_components(
    model: &BHModel,
    setup: &ProbeSetup,
    position: Position,
    elastic_overlap: f64,
    nu: f64,
    t: f64,
    beta: f64,
) -> Result<BhComponents> {
    let modes = model.modes(beta)?;
    BhSpectrum::new(model, &modes, setup, position, elastic_overlap)?.components(nu, t)
}

/// Probe-frequency grid: uniform (stored compactly) or explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NuGrid {
    Uniform { start: f64, step: f64, len: usize },
    Explicit { values: Vec<f64> },
}

impl NuGrid {
    pub fn uniform(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(stop >= start) {
            return domain(format!("bad uniform grid [{start}, {stop}] step {step}"));
        }
        let len = ((stop - start) / step).floor() as usize + 1;
        Ok(NuGrid::Uniform { start, step, len })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("frequency grid must be strictly increasing");
        }
        Ok(NuGrid::Explicit { values })
    }

    pub fn len(&self) -> usize {
        match self {
            NuGrid::Uniform { len, .. } => *len,
            NuGrid::Explicit { values } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> f64 {
        match self {
            NuGrid::Uniform { start, step, .. } => start + i as f64 * step,
            NuGrid::Explicit { values } => values[i],
        }
    }

    /// Largest spacing between neighbours (0 for fewer than two points).
    pub fn max_step(&self) -> f64 {
        match self {
            NuGrid::Uniform { step, len, .. } => {
                if *len > 1 {
                    *step
                } else {
                    0.0
                }
            }
            NuGrid::Explicit { values } => values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max),
        }
    }

    /// Index of the grid point closest to `nu`.
    pub fn nearest(&self, nu: f64) -> usize {
        match self {
            NuGrid::Uniform { start, step, len } => {
                let i = ((nu - start) / step).round();
                i.clamp(0.0, (*len as f64 - 1.0).max(0.0)) as usize
            }
            NuGrid::Explicit { values } => {
                let i = values.partition_point(|&v| v < nu);
                if i == 0 {
                    0
                } else if i >= values.len() {
                    values.len() - 1
                } else if nu - values[i - 1] <= values[i] - nu {
                    i - 1
                } else {
                    i
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CurveMetadata {
    pub coupling: f64,
    pub beta: f64,
    pub model_id: String,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
}

/// Sampled `Γ̃(ν)` at fixed measurement time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionCurve {
    pub nu_grid: NuGrid,
    pub values: Vec<f64>,
    pub time: f64,
    pub position: Position,
    pub metadata: CurveMetadata,
}

impl TransitionCurve {
    pub fn nu(&self, i: usize) -> f64 {
        self.nu_grid.get(i)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Grid spacing that resolves sinc² peaks of half-width `2π/t`.
pub fn resolving_step(t: f64) -> f64 {
    2.0 * PI / (5.0 * t)
}

const CHUNK: usize = 1 << 14;
const RESEED: usize = 256;

fn accumulate_uniform(out: &mut [f64], first: f64, step: f64, lines: &[Line], t: f64) {
    let h = step * t / 2.0;
    let (sh, ch) = h.sin_cos();
    for l in lines {
        let x0 = (first - l.frequency) * t / 2.0;
        let mut s = 0.0;
        let mut c = 1.0;
        for (j, o) in out.iter_mut().enumerate() {
            let x = x0 + j as f64 * h;
            if j % RESEED == 0 {
                (s, c) = x.sin_cos();
            }
            let v = if x.abs() < 0.1 { sinc(x) } else { s / x };
            *o += l.weight * v * v;
            (s, c) = (s * ch + c * sh, c * ch - s * sh);
        }
    }
}

/// Evaluate a line list on a frequency grid. Chunks run in parallel; each point
/// sums lines in list order, so results do not depend on the thread count.
pub fn sweep(
    lines: &[Line],
    nu_grid: NuGrid,
    t: f64,
    position: Position,
    mut metadata: CurveMetadata,
) -> Result<TransitionCurve> {
    if !(t > 0.0) {
        return domain(format!("measurement time must be positive, got {t}"));
    }
    let len = nu_grid.len();
    let resolving = resolving_step(t);
    if nu_grid.max_step() > resolving * (1.0 + 1e-9) {
        metadata.warnings.push(format!(
            "frequency grid step {} exceeds 2π/(5t) = {resolving}; peaks may be under-resolved",
            nu_grid.max_step()
        ));
    }
    let mut values = vec![0.0; len];
    match &nu_grid {
        NuGrid::Uniform { start, step, .. } => {
            values.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
                let first = start + (ci * CHUNK) as f64 * step;
                accumulate_uniform(chunk, first, *step, lines, t);
            });
        }
        NuGrid::Explicit { values: nus } => {
            values.par_iter_mut().zip(nus.par_iter()).for_each(|(v, &nu)| {
                *v = lines.iter().map(|l| l.weight * sinc((nu - l.frequency) * t / 2.0).powi(2)).sum();
            });
        }
    }
    Ok(TransitionCurve { nu_grid, values, time: t, position, metadata })
}

/// Sweep of a lattice model at one position with orbit-merged lines.
pub fn sweep_model(
    model: &dyn LatticeModel,
    setup: &ProbeSetup,
    position: Position,
    nu_grid: NuGrid,
    t: f64,
    beta: f64,
    coupling: f64,
) -> Result<TransitionCurve> {
    let modes = model.modes(beta)?;
    let lines = orbit_lines(&modes, &absorption_lines(&modes, setup, position)?);
    let metadata = CurveMetadata { coupling, beta, model_id: model.id(), seed: None, warnings: Vec::new() };
    sweep(&lines, nu_grid, t, position, metadata)
}
