use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::probe::Position;
use crate::rates::{sinc, CurveMetadata, TransitionCurve};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub frequency: f64,
    /// Time-rescaled peak height, `A² n` for an isolated line.
    pub amplitude: f64,
    /// Full width between the first zeros, estimated from the curvature at the top.
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
    pub position: Position,
    pub time: f64,
    pub metadata: CurveMetadata,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.frequency).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectOptions {
    /// Candidates below this fraction of the global maximum are ignored.
    pub relative_threshold: f64,
    /// Peaks closer than this are merged; `None` means `4π/t`.
    pub merge_radius: Option<f64>,
    /// Drop maxima that are explained by the sinc² tails of taller peaks.
    pub reject_sidelobes: bool,
    /// Rounds of joint amplitude fit and position refinement (0 keeps the interpolated values).
    pub refine_rounds: usize,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self { relative_threshold: 1e-3, merge_radius: None, reject_sidelobes: true, refine_rounds: 2 }
    }
}

pub fn merge_radius(t: f64) -> f64 {
    4.0 * PI / t
}

fn kernel(nu: f64, centre: f64, t: f64) -> f64 {
    sinc((nu - centre) * t / 2.0).powi(2)
}

/// Vertex of the parabola through three points: (position, height, curvature coefficient).
fn parabola(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64, f64)> {
    let d0 = (x[0] - x[1]) * (x[0] - x[2]);
    let d1 = (x[1] - x[0]) * (x[1] - x[2]);
    let d2 = (x[2] - x[0]) * (x[2] - x[1]);
    let a = y[0] / d0 + y[1] / d1 + y[2] / d2;
    let b = -(y[0] * (x[1] + x[2]) / d0 + y[1] * (x[0] + x[2]) / d1 + y[2] * (x[0] + x[1]) / d2);
    let c = y[0] * x[1] * x[2] / d0 + y[1] * x[0] * x[2] / d1 + y[2] * x[0] * x[1] / d2;
    if !(a < 0.0) {
        return None;
    }
    let xv = (-b / (2.0 * a)).clamp(x[0], x[2]);
    Some((xv, c - b * b / (4.0 * a), a))
}

/// Local maxima above threshold, refined by three-point interpolation.
pub fn detect_peaks(curve: &TransitionCurve, options: &DetectOptions) -> PeakSet {
    let t = curve.time;
    let empty = PeakSet { peaks: Vec::new(), position: curve.position, time: t, metadata: curve.metadata.clone() };
    let v = &curve.values;
    let n = v.len();
    if n < 3 {
        return empty;
    }
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) || v.iter().all(|&x| x == v[0]) {
        return empty;
    }
    let threshold = options.relative_threshold * max;

    let mut candidates: Vec<Peak> = Vec::new();
    for i in 1..n - 1 {
        if v[i] >= threshold && v[i] > v[i - 1] && v[i] >= v[i + 1] {
            let x = [curve.nu(i - 1), curve.nu(i), curve.nu(i + 1)];
            let (pos, height, a) = parabola(x, [v[i - 1], v[i], v[i + 1]]).unwrap_or((x[1], v[i], f64::NAN));
            let t_est = (-12.0 * a / height).sqrt();
            let width = if t_est.is_finite() && t_est > 0.0 { 4.0 * PI / t_est } else { merge_radius(t) };
            candidates.push(Peak { frequency: pos, amplitude: height, width });
        }
    }

    if options.reject_sidelobes {
        candidates.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
        let mut accepted: Vec<Peak> = Vec::new();
        for c in candidates {
            let explained: f64 = accepted.iter().map(|p| p.amplitude * kernel(c.frequency, p.frequency, t)).sum();
            if c.amplitude - explained > 0.5 * c.amplitude {
                accepted.push(c);
            }
        }
        candidates = accepted;
    }
    candidates.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));

    let radius = options.merge_radius.unwrap_or_else(|| merge_radius(t));
    let mut merged: Vec<Peak> = Vec::new();
    for c in candidates {
        match merged.last_mut() {
            Some(last) if c.frequency - last.frequency < radius => {
                if c.amplitude > last.amplitude {
                    *last = c;
                }
            }
            _ => merged.push(c),
        }
    }

    let mut set = PeakSet { peaks: merged, ..empty };
    if options.refine_rounds > 0 && !set.peaks.is_empty() {
        refine_peaks(curve, &mut set.peaks, options.refine_rounds);
        set.peaks.retain(|p| p.amplitude > 0.0);
        set.peaks.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    }
    set
}

/// Grid indices used to fit each peak: the nearest point and two on either side.
fn sample_indices(curve: &TransitionCurve, centre: f64) -> Vec<usize> {
    let i = curve.nu_grid.nearest(centre);
    let lo = i.saturating_sub(2);
    let hi = (i + 2).min(curve.len() - 1);
    (lo..=hi).collect()
}

/// Least-squares line strengths for fixed positions, fitting the sinc² kernel jointly.
pub fn fit_amplitudes(curve: &TransitionCurve, positions: &[f64]) -> Vec<f64> {
    if positions.is_empty() || curve.is_empty() {
        return Vec::new();
    }
    let mut rows: Vec<usize> = positions.iter().flat_map(|&p| sample_indices(curve, p)).collect();
    rows.sort_unstable();
    rows.dedup();
    let t = curve.time;
    let m = DMatrix::from_fn(rows.len(), positions.len(), |r, c| kernel(curve.nu(rows[r]), positions[c], t));
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|&i| curve.values[i]));
    match m.svd(true, true).solve(&y, 1e-12) {
        Ok(x) => x.iter().copied().collect(),
        Err(_) => vec![0.0; positions.len()],
    }
}

/// Alternate joint amplitude fits with per-peak golden-section position refinement.
fn refine_peaks(curve: &TransitionCurve, peaks: &mut [Peak], rounds: usize) {
    let t = curve.time;
    let step = curve.nu_grid.max_step();
    for _ in 0..rounds {
        let positions: Vec<f64> = peaks.iter().map(|p| p.frequency).collect();
        let amps = fit_amplitudes(curve, &positions);
        for (p, a) in peaks.iter_mut().zip(&amps) {
            p.amplitude = *a;
        }
        if step == 0.0 {
            continue;
        }
        for i in 0..peaks.len() {
            let idx = sample_indices(curve, peaks[i].frequency);
            let residual: Vec<(f64, f64)> = idx
                .iter()
                .map(|&s| {
                    let nu = curve.nu(s);
                    let others: f64 = peaks
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, p)| p.amplitude * kernel(nu, p.frequency, t))
                        .sum();
                    (nu, curve.values[s] - others)
                })
                .collect();
            let cost = |centre: f64| -> (f64, f64) {
                let (mut kk, mut ky) = (0.0, 0.0);
                for &(nu, r) in &residual {
                    let k = kernel(nu, centre, t);
                    kk += k * k;
                    ky += k * r;
                }
                let a = if kk > 0.0 { ky / kk } else { 0.0 };
                let err = residual.iter().map(|&(nu, r)| (r - a * kernel(nu, centre, t)).powi(2)).sum();
                (err, a)
            };
            let centre = golden_min(|x| cost(x).0, peaks[i].frequency - step, peaks[i].frequency + step, 60);
            let (_, a) = cost(centre);
            peaks[i].frequency = centre;
            peaks[i].amplitude = a;
        }
    }
    let positions: Vec<f64> = peaks.iter().map(|p| p.frequency).collect();
    for (p, a) in peaks.iter_mut().zip(fit_amplitudes(curve, &positions)) {
        p.amplitude = a;
    }
}

pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iterations: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iterations {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Strengths of another configuration's curve at already known peak positions.
pub fn measure_at(curve: &TransitionCurve, reference: &PeakSet) -> PeakSet {
    let positions = reference.frequencies();
    let amps = fit_amplitudes(curve, &positions);
    let peaks = reference
        .peaks
        .iter()
        .zip(amps)
        .map(|(p, a)| Peak { frequency: p.frequency, amplitude: a.max(0.0), width: p.width })
        .collect();
    PeakSet { peaks, position: curve.position, time: curve.time, metadata: curve.metadata.clone() }
}
